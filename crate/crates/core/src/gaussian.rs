//! Two-mode Gaussian states in the symmetric `(a, b, c)` form.
//!
//! The covariance matrix is
//!
//! ```text
//! [ a·I    c·σZ ]
//! [ c·σZ   b·I  ]
//! ```
//!
//! in quadrature order `(q_A, p_A, q_B, p_B)`, shot-noise units.
//!
//! Heterodyne outcomes are expressed in double-quadrature coordinates
//! `y = 2α`: the outcome mean equals the state mean and the outcome
//! covariance equals `V + I`. The Husimi Q-function parameters (mean `μ/2`,
//! covariance `(V + I)/4`) are available from [`MeasurementDistribution`].

use crate::{Error, Result};
use std::f64::consts::PI;

/// Slack below 1 tolerated before a variance or eigenvalue counts as
/// sub-shot-noise.
pub const PHYSICALITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeGaussian {
    /// `(q_A, p_A, q_B, p_B)`
    pub mean: [f64; 4],
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TwoModeGaussian {
    /// Zero-mean state. Physicality is not enforced here; see [`is_physical`].
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::with_mean([0.0; 4], a, b, c)
    }

    pub fn with_mean(mean: [f64; 4], a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::domain(
                "TwoModeGaussian",
                format!("non-finite entries (a = {a}, b = {b}, c = {c}, mean = {mean:?})"),
            ));
        }
        Ok(TwoModeGaussian { mean, a, b, c })
    }

    /// Two-mode squeezed vacuum of variance `v`.
    pub fn tmsv(v: f64) -> Result<Self> {
        if !(v >= 1.0) {
            return Err(Error::domain("TwoModeGaussian::tmsv", format!("V = {v} < 1")));
        }
        Self::new(v, v, (v * v - 1.0).sqrt())
    }

    pub fn covariance(&self) -> [[f64; 4]; 4] {
        let (a, b, c) = (self.a, self.b, self.c);
        [
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, -c],
            [c, 0.0, b, 0.0],
            [0.0, -c, 0.0, b],
        ]
    }

    /// Same covariance, mean set to zero.
    pub fn centered(&self) -> Self {
        TwoModeGaussian {
            mean: [0.0; 4],
            ..*self
        }
    }
}

/// Symplectic eigenvalues of a two-mode state plus the invariants
/// `D1 = a² + b² - 2c²` and `D2 = ab - c²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticSpectrum {
    pub lambda1: f64,
    pub lambda2: f64,
    pub d1: f64,
    pub d2: f64,
}

pub fn symplectic_spectrum(state: &TwoModeGaussian) -> Result<SymplecticSpectrum> {
    let (a, b, c) = (state.a, state.b, state.c);
    let d1 = a * a + b * b - 2.0 * c * c;
    let d2 = a * b - c * c;
    // D1² - 4 D2² = (a - b)² ((a + b)² - 4c²), factored to avoid cancellation
    let mut disc = (a - b) * (a - b) * ((a + b) * (a + b) - 4.0 * c * c);
    if disc < 0.0 {
        if disc < -1e-12 {
            return Err(Error::numeric(
                "symplectic_spectrum",
                format!("negative discriminant {disc:e} for a = {a}, b = {b}, c = {c}"),
            ));
        }
        disc = 0.0;
    }
    let l1_sq = 0.5 * (d1 + disc.sqrt());
    if !(l1_sq > 0.0) {
        return Err(Error::numeric(
            "symplectic_spectrum",
            format!("non-positive eigenvalue square {l1_sq:e}"),
        ));
    }
    let lambda1 = l1_sq.sqrt();
    // λ1 λ2 = |D2| keeps λ2 accurate when λ1 ≫ λ2
    let lambda2 = d2.abs() / lambda1;
    Ok(SymplecticSpectrum {
        lambda1,
        lambda2,
        d1,
        d2,
    })
}

/// Symplectic eigenvalue of Alice's mode conditioned on Bob's heterodyne
/// outcome: `a - c²/(b + 1)`.
pub fn conditional_eigenvalue(state: &TwoModeGaussian) -> Result<f64> {
    let l3 = conditional_eigenvalue_unchecked(state);
    if l3 < 1.0 - PHYSICALITY_SLACK {
        return Err(Error::physicality(
            "conditional_eigenvalue",
            format!("λ3 = {l3} < 1"),
        ));
    }
    Ok(l3)
}

pub(crate) fn conditional_eigenvalue_unchecked(state: &TwoModeGaussian) -> f64 {
    state.a - state.c * state.c / (state.b + 1.0)
}

/// Bosonic entropy function in bits,
/// `G(x) = (x+1)/2 log2((x+1)/2) - (x-1)/2 log2((x-1)/2)`.
pub fn g_function(x: f64) -> Result<f64> {
    if x.is_nan() || x < 1.0 - 1e-12 {
        return Err(Error::domain("g_function", format!("x = {x} < 1")));
    }
    Ok(g_clamped(x))
}

/// `G(max(x, 1))`, used where the caller has already flagged physicality.
pub(crate) fn g_clamped(x: f64) -> f64 {
    if !(x > 1.0) {
        return 0.0;
    }
    let p = 0.5 * (x + 1.0);
    let m = 0.5 * (x - 1.0);
    p * p.log2() - m * m.log2()
}

/// Heterodyne outcome distribution of a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDistribution {
    /// Outcome mean in double-quadrature coordinates (equals the state mean).
    pub mean: [f64; 4],
    /// Outcome covariance in double-quadrature coordinates, `V + I`.
    pub covariance: [[f64; 4]; 4],
}

impl MeasurementDistribution {
    /// Q-function mean in `α` coordinates, `μ/2`.
    pub fn alpha_mean(&self) -> [f64; 4] {
        self.mean.map(|m| 0.5 * m)
    }

    /// Q-function covariance in `α` coordinates, `(V + I)/4`.
    pub fn alpha_covariance(&self) -> [[f64; 4]; 4] {
        self.covariance.map(|row| row.map(|v| 0.25 * v))
    }

    /// `M = 2 (V + I)^{-1}`.
    pub fn precision(&self) -> [[f64; 4]; 4] {
        // the (q_A, q_B) and (p_A, p_B) blocks decouple
        let mut m = [[0.0; 4]; 4];
        for (i, j) in [(0, 2), (1, 3)] {
            let (s11, s12, s22) = (
                self.covariance[i][i],
                self.covariance[i][j],
                self.covariance[j][j],
            );
            let det = s11 * s22 - s12 * s12;
            m[i][i] = 2.0 * s22 / det;
            m[j][j] = 2.0 * s11 / det;
            m[i][j] = -2.0 * s12 / det;
            m[j][i] = m[i][j];
        }
        m
    }

    /// Husimi Q-function `sqrt(det M)/π² · exp(-(α - μ/2)ᵀ M (α - μ/2))`.
    pub fn q_function(&self, alpha: [f64; 4]) -> f64 {
        let m = self.precision();
        let mu = self.alpha_mean();
        let d: Vec<f64> = alpha.iter().zip(mu).map(|(x, m)| x - m).collect();
        let mut quad = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                quad += d[i] * m[i][j] * d[j];
            }
        }
        let det_m = (m[0][0] * m[2][2] - m[0][2] * m[0][2]) * (m[1][1] * m[3][3] - m[1][3] * m[1][3]);
        det_m.sqrt() / (PI * PI) * (-quad).exp()
    }
}

pub fn measurement_distribution(state: &TwoModeGaussian) -> MeasurementDistribution {
    let mut covariance = state.covariance();
    for (i, row) in covariance.iter_mut().enumerate() {
        row[i] += 1.0;
    }
    MeasurementDistribution {
        mean: state.mean,
        covariance,
    }
}

/// Outcome of [`is_physical`]. `violation` is how far the smallest of
/// `a`, `b`, `λ1`, `λ2` sits below 1 (zero when physical).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    pub violation: f64,
}

/// Uncertainty-principle check: both symplectic eigenvalues and both local
/// variances must be at least 1.
pub fn is_physical(state: &TwoModeGaussian) -> Physicality {
    let floor = match symplectic_spectrum(state) {
        Ok(s) => s.lambda1.min(s.lambda2).min(state.a).min(state.b),
        Err(_) => {
            // |c| > (a + b)/2: report how far the correlation overshoots
            let overshoot = state.c.abs() - 0.5 * (state.a + state.b);
            return Physicality {
                physical: false,
                violation: overshoot.max(f64::MIN_POSITIVE),
            };
        }
    };
    let violation = (1.0 - floor).max(0.0);
    Physicality {
        physical: floor >= 1.0 - PHYSICALITY_SLACK,
        violation,
    }
}
