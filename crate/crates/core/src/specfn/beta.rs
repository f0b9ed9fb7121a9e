//! Regularized incomplete beta function and the symmetric Beta quantile
//! used by the finite-size confidence intervals.

use super::erf::normal_quantile;
use super::gamma::{ln_beta, stirling_correction};
use super::Tolerance;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Half-sample size above which the symmetric Beta quantile switches to
/// its normal approximation.
pub const DEFAULT_NORMAL_THRESHOLD: f64 = 1e6;

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_reg(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(
            "beta_reg",
            format!("shape parameters must be positive and finite (a = {a}, b = {b})"),
        ));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("beta_reg", format!("x = {x} outside [0, 1]")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    // The continued fraction converges fast below the mean; use the
    // reflection I_x(a, b) = 1 - I_{1-x}(b, a) above it.
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(prefactor(x, a, b) * continued_fraction(x, a, b)? / a)
    } else {
        let y = 1.0 - x;
        Ok(1.0 - prefactor(y, b, a) * continued_fraction(y, b, a)? / b)
    }
}

/// `x^a (1-x)^b / B(a, b)`, evaluated around the mean for large shapes.
fn prefactor(x: f64, a: f64, b: f64) -> f64 {
    if a >= 10.0 && b >= 10.0 {
        let s = a + b;
        let x0 = a / s;
        let dx = x - x0;
        let log_core = a * (dx / x0).ln_1p() + b * (-dx / (1.0 - x0)).ln_1p();
        let corr = stirling_correction(a) + stirling_correction(b) - stirling_correction(s);
        // √(ab/(2π s)) · (1/√... ) rearranged: x^a(1-x)^b/B = √(a b / (2π s)) e^{log_core - corr}
        (a * b / (2.0 * PI * s)).sqrt() * (log_core - corr).exp()
    } else {
        (a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b)).exp()
    }
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn continued_fraction(x: f64, a: f64, b: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let max_iter = 10_000 + (100.0 * a.max(b).sqrt()) as usize;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    let mut last = f64::INFINITY;
    for m in 1..=max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        last = (delta - 1.0).abs();
        if last < EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence {
        func: "beta_reg",
        iterations: max_iter,
        residual: last,
    })
}

/// Configuration for [`beta_inv_cdf_symmetric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaQuantile {
    pub tolerance: Tolerance,
    /// Above this half-sample size the normal approximation
    /// `Beta(a, a) ≈ N(1/2, 1/(8a + 4))` is used.
    pub normal_threshold: f64,
}

impl Default for BetaQuantile {
    fn default() -> Self {
        BetaQuantile {
            tolerance: Tolerance::default(),
            normal_threshold: DEFAULT_NORMAL_THRESHOLD,
        }
    }
}

impl BetaQuantile {
    /// Quantile `x` with `I_x(half_n, half_n) = z`.
    pub fn quantile(&self, z: f64, half_n: f64) -> Result<f64> {
        if !(z > 0.0 && z < 1.0) {
            return Err(Error::domain(
                "beta_inv_cdf_symmetric",
                format!("need 0 < z < 1, got {z}"),
            ));
        }
        if !(half_n >= 0.5) || !half_n.is_finite() {
            return Err(Error::domain(
                "beta_inv_cdf_symmetric",
                format!("need half_n >= 0.5, got {half_n}"),
            ));
        }
        if z == 0.5 {
            return Ok(0.5);
        }
        if half_n > self.normal_threshold {
            return normal_branch(z, half_n);
        }
        self.bisection_branch(z, half_n)
    }

    /// Forces the bisection branch regardless of `normal_threshold`.
    pub fn bisection_branch(&self, z: f64, half_n: f64) -> Result<f64> {
        self.tolerance.validate()?;
        // work in the lower half and reflect: the distribution is symmetric
        if z > 0.5 {
            return Ok(1.0 - self.bisection_branch(1.0 - z, half_n)?);
        }
        let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
        let mut residual = f64::INFINITY;
        for _ in 0..self.tolerance.max_iter {
            let mid = 0.5 * (lo + hi);
            let f = beta_reg(mid, half_n, half_n)? - z;
            residual = f.abs();
            if f < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= self.tolerance.abs_tol || residual <= self.tolerance.rel_tol * z {
                return Ok(0.5 * (lo + hi));
            }
        }
        Err(Error::NoConvergence {
            func: "beta_inv_cdf_symmetric",
            iterations: self.tolerance.max_iter,
            residual,
        })
    }
}

/// Normal approximation to the symmetric Beta quantile.
pub fn normal_branch(z: f64, half_n: f64) -> Result<f64> {
    Ok(0.5 + normal_quantile(z)? / (8.0 * half_n + 4.0).sqrt())
}

/// Quantile of `Beta(half_n, half_n)` with default configuration.
pub fn beta_inv_cdf_symmetric(z: f64, half_n: f64) -> Result<f64> {
    BetaQuantile::default().quantile(z, half_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_forms() {
        for &a in &[0.5, 1.0, 3.0, 50.0, 2000.0] {
            assert!((beta_reg(0.5, a, a).unwrap() - 0.5).abs() < 1e-13, "a = {a}");
        }
        // I_x(2, 2) = x²(3 - 2x)
        assert!((beta_reg(0.3, 2.0, 2.0).unwrap() - 0.216).abs() < 1e-14);
        for &x in &[0.0, 0.1, 0.37, 0.9, 1.0] {
            assert!((beta_reg(x, 1.0, 1.0).unwrap() - x).abs() < 1e-15);
        }
        // I_x(a, 1) = x^a
        assert!((beta_reg(0.7, 3.5, 1.0).unwrap() - 0.7_f64.powf(3.5)).abs() < 1e-14);
    }

    #[test]
    fn endpoints_and_domain() {
        assert_eq!(beta_reg(0.0, 2.0, 3.0).unwrap(), 0.0);
        assert_eq!(beta_reg(1.0, 2.0, 3.0).unwrap(), 1.0);
        assert!(beta_reg(-0.1, 2.0, 3.0).is_err());
        assert!(beta_reg(1.1, 2.0, 3.0).is_err());
        assert!(beta_reg(0.5, 0.0, 3.0).is_err());
        assert!(beta_reg(0.5, 1.0, -3.0).is_err());
    }

    #[test]
    fn large_shape_matches_normal_limit() {
        // Beta(a, a) at a = 5e5 is N(1/2, 1/(8a+4)) to ~1e-6 in the bulk
        let a = 5e5;
        let sd = 1.0 / (8.0 * a + 4.0_f64).sqrt();
        let v = beta_reg(0.5 - 1.5 * sd, a, a).unwrap();
        assert!((v - 0.066_807_201_268_858_1).abs() < 1e-6, "{v}");
    }

    #[test]
    fn symmetric_quantile_examples() {
        assert_eq!(beta_inv_cdf_symmetric(0.5, 7.0).unwrap(), 0.5);
        let x = beta_inv_cdf_symmetric(0.025, 50.0).unwrap();
        assert!((beta_reg(x, 50.0, 50.0).unwrap() - 0.025).abs() < 1e-10);
        // mpmath root of I_x(50, 50) = 0.025
        assert!((x - 0.402_697_916_590_057_5).abs() < 1e-10);
        let hi = beta_inv_cdf_symmetric(0.975, 50.0).unwrap();
        assert!((hi - (1.0 - x)).abs() < 1e-12);
    }

    #[test]
    fn branches_agree_at_threshold() {
        let cfg = BetaQuantile::default();
        let half_n = cfg.normal_threshold;
        for &z in &[1e-10 / 12.0, 1e-20 / 1296.0, 0.01, 0.3, 0.8] {
            let exact = cfg.bisection_branch(z, half_n).unwrap();
            let approx = normal_branch(z, half_n).unwrap();
            assert!((exact - approx).abs() < 1e-6, "z = {z:e}: {exact} vs {approx}");
        }
    }

    #[test]
    fn normal_branch_at_paper_block_size() {
        // half_n = 5e7 (N = 1e8): normal formula vs forced bisection
        let cfg = BetaQuantile::default();
        for &z in &[0.025, 1e-10 / 12.0] {
            let exact = cfg.bisection_branch(z, 5e7).unwrap();
            let approx = cfg.quantile(z, 5e7).unwrap();
            let formula = 0.5 + normal_quantile(z).unwrap() / (4.0 * 1e8 + 4.0_f64).sqrt();
            assert_eq!(approx, formula);
            assert!((exact - approx).abs() < 1e-8, "z = {z:e}");
        }
    }

    #[test]
    fn quantile_domain() {
        assert!(beta_inv_cdf_symmetric(0.0, 10.0).is_err());
        assert!(beta_inv_cdf_symmetric(1.0, 10.0).is_err());
        assert!(beta_inv_cdf_symmetric(0.3, 0.2).is_err());
    }

    proptest! {
        #[test]
        fn reflection_identity(x in 0.0..1.0f64, a in 0.1..500.0f64, b in 0.1..500.0f64) {
            let lhs = beta_reg(x, a, b).unwrap() + beta_reg(1.0 - x, b, a).unwrap();
            prop_assert!((lhs - 1.0).abs() < 1e-12);
        }

        #[test]
        fn monotone_in_x(x in 0.0..0.99f64, dx in 1e-6..0.01f64, a in 0.5..200.0f64, b in 0.5..200.0f64) {
            let lo = beta_reg(x, a, b).unwrap();
            let hi = beta_reg((x + dx).min(1.0), a, b).unwrap();
            prop_assert!(hi >= lo - 1e-15);
        }
    }
}
