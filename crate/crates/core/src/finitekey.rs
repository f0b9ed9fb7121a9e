//! Composable finite-size key length for a block of `N` signals.

use crate::channel::{ChannelParams, ProtocolParams};
use crate::gaussian::TwoModeGaussian;
use crate::keyrate::{asymptotic_rate, holevo_bound, mutual_information, KeyRateResult, Optimum, VSearch};
use crate::optimize::maximise_log;
use crate::specfn::BetaQuantile;
use crate::sqcc::{required_displacement, Strategy};
use crate::{Error, Result};

/// Block size, reconciliation and failure-probability budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecurityParams {
    pub block_size: u64,
    /// Fraction of blocks that survive error correction.
    pub frame_success: f64,
    /// Bits per quadrature after discretisation.
    pub discretisation_bits: u32,
    pub eps_pe: f64,
    pub eps_smooth: f64,
    pub eps_hash: f64,
    pub eps_ent: f64,
    /// Budget entries that only enter the total, not the rate.
    pub eps_qrng: f64,
    pub eps_ir: f64,
    pub eps_cal: f64,
    pub beta_quantile: BetaQuantile,
}

impl Default for SecurityParams {
    fn default() -> Self {
        SecurityParams {
            block_size: 100_000_000,
            frame_success: 0.9964,
            discretisation_bits: 6,
            eps_pe: 1e-10,
            eps_smooth: 1e-10,
            eps_hash: 1e-10,
            eps_ent: 1e-10,
            eps_qrng: 1e-10,
            eps_ir: 1e-10,
            eps_cal: 1e-10,
            beta_quantile: BetaQuantile::default(),
        }
    }
}

impl SecurityParams {
    pub fn with_block_size(block_size: u64) -> Self {
        SecurityParams {
            block_size,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::domain("SecurityParams", msg));
        if self.block_size < 2 {
            return bad(format!("N = {} < 2", self.block_size));
        }
        if !(self.frame_success > 0.0 && self.frame_success <= 1.0) {
            return bad(format!("p_f = {} not in (0, 1]", self.frame_success));
        }
        if self.discretisation_bits == 0 {
            return bad("discretisation bits must be positive".into());
        }
        for (name, e) in [
            ("eps_pe", self.eps_pe),
            ("eps_smooth", self.eps_smooth),
            ("eps_hash", self.eps_hash),
            ("eps_ent", self.eps_ent),
        ] {
            if !(e > 0.0 && e < 1.0) {
                return bad(format!("{name} = {e} not in (0, 1)"));
            }
        }
        for (name, e) in [("eps_qrng", self.eps_qrng), ("eps_ir", self.eps_ir), ("eps_cal", self.eps_cal)] {
            if !(e >= 0.0 && e < 1.0) {
                return bad(format!("{name} = {e} not in [0, 1)"));
            }
        }
        Ok(())
    }

    /// Sum of all seven failure probabilities.
    pub fn epsilon_total(&self) -> f64 {
        self.eps_qrng + self.eps_hash + self.eps_smooth + self.eps_ir + self.eps_ent + self.eps_pe + self.eps_cal
    }
}

/// Finite-size correction terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerms {
    pub aep: f64,
    pub ent: f64,
    pub smooth: f64,
    pub hash: f64,
}

pub fn delta_terms(sec: &SecurityParams) -> Result<DeltaTerms> {
    sec.validate()?;
    let pf = sec.frame_success;
    let smooth_loss = pf * sec.eps_smooth * sec.eps_smooth / 3.0;
    if !(pf - smooth_loss > 0.0) {
        return Err(Error::domain("delta_terms", "p_f - p_f ε_s²/3 is not positive"));
    }
    let aep = 4.0 * (sec.discretisation_bits as f64 + 1.0) * (2.0 / (smooth_loss * smooth_loss)).log2().sqrt();
    let ent = (2.0 * (2.0 / sec.eps_ent).log2()).sqrt();
    let smooth = (pf - smooth_loss).log2();
    let hash = 2.0 * (std::f64::consts::SQRT_2 * sec.eps_hash).log2();
    Ok(DeltaTerms { aep, ent, smooth, hash })
}

/// Confidence-interval extremes of the covariance entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstCase {
    pub delta_var: f64,
    pub delta_cov: f64,
    pub sigma_a_max: f64,
    pub sigma_b_max: f64,
    pub sigma_c_min: f64,
}

impl WorstCase {
    pub fn state(&self) -> TwoModeGaussian {
        TwoModeGaussian {
            mean: [0.0; 4],
            a: self.sigma_a_max,
            b: self.sigma_b_max,
            c: self.sigma_c_min,
        }
    }
}

/// Worst-case estimators with `A(z) = 2 x`, `x` the `z`-quantile of
/// `Beta(N/2, N/2)`.
pub fn worst_case_estimators(a_hat: f64, b_hat: f64, c_hat: f64, sec: &SecurityParams) -> Result<WorstCase> {
    sec.validate()?;
    let half_n = sec.block_size as f64 / 2.0;
    let q = &sec.beta_quantile;
    let a1 = 2.0 * q.quantile(sec.eps_pe / 12.0, half_n)?;
    let a2 = 2.0 * q.quantile(sec.eps_pe * sec.eps_pe / 1296.0, half_n)?;
    worst_case_from_quantiles(a_hat, b_hat, c_hat, a1, a2, sec.block_size as f64, sec.eps_pe)
}

/// Same as [`worst_case_estimators`] with the two quantile values supplied:
/// `a1 = A(ε_PE/12)`, `a2 = A(ε_PE²/1296)`.
///
/// If the covariance interval reaches zero the correlation estimate is
/// floored at 0 rather than allowed to change sign.
pub fn worst_case_from_quantiles(
    a_hat: f64,
    b_hat: f64,
    c_hat: f64,
    a1: f64,
    a2: f64,
    block_size: f64,
    eps_pe: f64,
) -> Result<WorstCase> {
    if c_hat == 0.0 || !c_hat.is_finite() {
        return Err(Error::domain(
            "worst_case_estimators",
            "zero correlation estimate, nothing to bound",
        ));
    }
    if !(a_hat > 0.0 && b_hat > 0.0) {
        return Err(Error::domain(
            "worst_case_estimators",
            format!("variances must be positive (a = {a_hat}, b = {b_hat})"),
        ));
    }
    let delta_var = (2.0 - a1) * (1.0 + 240.0 / eps_pe * (-block_size / 32.0).exp()) - 1.0;
    let delta_cov = 0.5 * (1.0 - a1) + (1.0 - a2);
    let shrink = (1.0 - 2.0 * (a_hat * b_hat / (c_hat * c_hat)).sqrt() * delta_cov).max(0.0);
    Ok(WorstCase {
        delta_var,
        delta_cov,
        sigma_a_max: (1.0 + delta_var) * a_hat,
        sigma_b_max: (1.0 + delta_var) * b_hat,
        sigma_c_min: shrink * c_hat,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteKeyResult {
    pub deltas: DeltaTerms,
    pub worst_case: WorstCase,
    /// Mutual information at the mean estimators.
    pub mutual_information: f64,
    /// Holevo bound at the worst-case estimators.
    pub holevo: f64,
    /// `β I - χ_worst`.
    pub k_pe_inf: f64,
    pub key_length: f64,
    pub rate: f64,
    pub epsilon_total: f64,
    pub block_size: u64,
}

/// Finite-size rate from estimated covariance entries.
pub fn finite_rate_from_moments(a_hat: f64, b_hat: f64, c_hat: f64, beta: f64, sec: &SecurityParams) -> Result<FiniteKeyResult> {
    let deltas = delta_terms(sec)?;
    let worst_case = worst_case_estimators(a_hat, b_hat, c_hat, sec)?;
    let mean_state = TwoModeGaussian::new(a_hat, b_hat, c_hat)?;
    let mi = mutual_information(&mean_state)?;
    let chi = holevo_bound(&worst_case.state())?;
    let k_pe_inf = beta * mi - chi;
    let n = sec.block_size as f64;
    let pf = sec.frame_success;
    let rate = pf * k_pe_inf - (pf / n).sqrt() * deltas.aep - (pf * (pf * n).log2() / n).sqrt() * deltas.ent
        + deltas.smooth / n
        + deltas.hash / n;
    Ok(FiniteKeyResult {
        deltas,
        worst_case,
        mutual_information: mi,
        holevo: chi,
        k_pe_inf,
        key_length: rate * n,
        rate,
        epsilon_total: sec.epsilon_total(),
        block_size: sec.block_size,
    })
}

/// Finite-size rate with the analytic renormalised moments as the mean
/// estimators. Also returns the asymptotic result it was built on.
pub fn finite_rate(
    proto: &ProtocolParams,
    chan: &ChannelParams,
    strategy: Strategy,
    sec: &SecurityParams,
) -> Result<(FiniteKeyResult, KeyRateResult)> {
    let asym = asymptotic_rate(proto, chan, strategy)?;
    let st = asym.state;
    let fk = finite_rate_from_moments(st.a, st.b, st.c, proto.reconciliation_efficiency, sec)?;
    Ok((fk, asym))
}

/// Finite-size rate with `d` tied to the QoS target.
pub fn finite_rate_at_qos(
    modulation_variance: f64,
    chan: &ChannelParams,
    qos: f64,
    beta: f64,
    strategy: Strategy,
    sec: &SecurityParams,
) -> Result<(FiniteKeyResult, KeyRateResult)> {
    let d = required_displacement(modulation_variance, chan, qos)?;
    let proto = ProtocolParams::new(modulation_variance, d, beta)?;
    let (fk, mut asym) = finite_rate(&proto, chan, strategy, sec)?;
    asym.qos = Some(qos);
    Ok((fk, asym))
}

/// Maximise the finite-size rate over `V`.
pub fn optimise_v_finite(
    chan: &ChannelParams,
    qos: f64,
    beta: f64,
    strategy: Strategy,
    sec: &SecurityParams,
    search: &VSearch,
) -> Result<Optimum> {
    if !(qos > 0.0 && qos <= 0.5) {
        return Err(Error::domain("optimise_v_finite", format!("W = {qos} not in (0, 0.5]")));
    }
    chan.validate()?;
    sec.validate()?;
    // the Beta quantiles do not depend on V
    let half_n = sec.block_size as f64 / 2.0;
    let a1 = 2.0 * sec.beta_quantile.quantile(sec.eps_pe / 12.0, half_n)?;
    let a2 = 2.0 * sec.beta_quantile.quantile(sec.eps_pe * sec.eps_pe / 1296.0, half_n)?;
    let deltas = delta_terms(sec)?;
    let n = sec.block_size as f64;
    let pf = sec.frame_success;
    let penalty = -(pf / n).sqrt() * deltas.aep - (pf * (pf * n).log2() / n).sqrt() * deltas.ent
        + deltas.smooth / n
        + deltas.hash / n;
    let objective = |v: f64| -> Option<f64> {
        let d = required_displacement(v, chan, qos).ok()?;
        let proto = ProtocolParams::new(v, d, beta).ok()?;
        let asym = asymptotic_rate(&proto, chan, strategy).ok().filter(|r| r.feasible)?;
        let st = asym.state;
        let wc = worst_case_from_quantiles(st.a, st.b, st.c, a1, a2, n, sec.eps_pe).ok()?;
        let chi = holevo_bound(&wc.state()).ok()?;
        Some(pf * (beta * asym.mutual_information - chi) + penalty)
    };
    let m = maximise_log(&search.as_log_search(), objective)?;
    Ok(Optimum::from_maximum(m))
}
