//! Asymptotic secret-key rates under collective Gaussian attacks with
//! reverse reconciliation, and their maximisation over modulation variance.

use crate::channel::{qi_baseline_state, shared_state, ChannelParams, ProtocolParams};
use crate::gaussian::{
    conditional_eigenvalue_unchecked, g_clamped, is_physical, symplectic_spectrum, TwoModeGaussian,
    PHYSICALITY_SLACK,
};
use crate::optimize::{maximise_log, LogSearch};
use crate::sqcc::{postprocess_stats, renormalise, required_displacement, PostprocessStats, Strategy};
use crate::{Error, Result};

/// Which description of the classical/quantum coupling to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Discrimination, re-displacement and renormalisation.
    Sqcc(Strategy),
    /// Earlier model: symbol errors become extra excess noise `4 d² e_C`.
    Baseline,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Sqcc(s) => s.name(),
            Model::Baseline => "baseline",
        }
    }
}

impl Default for Model {
    fn default() -> Self {
        Model::Sqcc(Strategy::default())
    }
}

/// Evaluation switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RateOptions {
    /// Count the mutual information once per quadrature (factor 2).
    pub mi_double: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateResult {
    pub modulation_variance: f64,
    pub transmissivity: f64,
    pub excess_noise: f64,
    pub phase_noise: f64,
    pub displacement: f64,
    pub reconciliation_efficiency: f64,
    /// Bit error rate target the displacement was chosen for, if any.
    pub qos: Option<f64>,
    pub model: Model,
    pub stats: PostprocessStats,
    /// Rescaling factor, 1 for the baseline model.
    pub delta_v: f64,
    /// State the entropies were evaluated on (mean discarded).
    pub state: TwoModeGaussian,
    pub mutual_information: f64,
    pub holevo: f64,
    /// `β I - χ`, not clamped.
    pub rate: f64,
    pub feasible: bool,
}

/// `log2((a + 1)/(a + 1 - c²/(b + 1)))`.
pub fn mutual_information(state: &TwoModeGaussian) -> Result<f64> {
    let ratio = state.c * state.c / ((state.b + 1.0) * (state.a + 1.0));
    if !(ratio < 1.0) || !(state.b + 1.0 > 0.0) || !(state.a + 1.0 > 0.0) {
        return Err(Error::numeric(
            "mutual_information",
            format!("non-positive denominator for a = {}, b = {}, c = {}", state.a, state.b, state.c),
        ));
    }
    Ok(-(-ratio).ln_1p() / std::f64::consts::LN_2)
}

/// Holevo bound on Eve's information about Bob's heterodyne data,
/// `G(λ1) + G(λ2) - G(λ3)`.
pub fn holevo_bound(state: &TwoModeGaussian) -> Result<f64> {
    let verdict = is_physical(&state.centered());
    if !verdict.physical {
        return Err(Error::physicality(
            "holevo_bound",
            format!("state violates the uncertainty principle by {:e}", verdict.violation),
        ));
    }
    let l3 = conditional_eigenvalue_unchecked(state);
    if l3 < 1.0 - PHYSICALITY_SLACK {
        return Err(Error::physicality("holevo_bound", format!("λ3 = {l3} < 1")));
    }
    holevo_clamped(state)
}

/// Holevo bound with every eigenvalue clamped to at least 1. Used for states
/// already flagged as unphysical, where a number is still wanted for sweeps.
fn holevo_clamped(state: &TwoModeGaussian) -> Result<f64> {
    let s = symplectic_spectrum(state)?;
    let l3 = conditional_eigenvalue_unchecked(state);
    let chi = g_clamped(s.lambda1) + g_clamped(s.lambda2) - g_clamped(l3);
    Ok(chi.max(0.0))
}

/// Rate on an already-prepared state. `feasible` gates the physicality check.
fn rate_on_state(state: &TwoModeGaussian, beta: f64, feasible: bool, opts: RateOptions) -> Result<(f64, f64, f64, bool)> {
    let mut mi = mutual_information(state)?;
    if opts.mi_double {
        mi *= 2.0;
    }
    let (chi, ok) = match holevo_bound(state) {
        Ok(chi) => (chi, feasible),
        Err(Error::Physicality { .. }) => (holevo_clamped(state)?, false),
        Err(e) => return Err(e),
    };
    Ok((mi, chi, beta * mi - chi, ok))
}

/// Plain heterodyne GMCS rate: no classical displacement.
pub fn heterodyne_rate(modulation_variance: f64, chan: &ChannelParams, beta: f64) -> Result<KeyRateResult> {
    let proto = ProtocolParams::new(modulation_variance, 0.0, beta)?;
    asymptotic_rate(&proto, chan, Strategy::default())
}

pub fn asymptotic_rate(proto: &ProtocolParams, chan: &ChannelParams, strategy: Strategy) -> Result<KeyRateResult> {
    asymptotic_rate_with(proto, chan, strategy, RateOptions::default())
}

/// Rate after discrimination, re-displacement and renormalisation.
pub fn asymptotic_rate_with(
    proto: &ProtocolParams,
    chan: &ChannelParams,
    strategy: Strategy,
    opts: RateOptions,
) -> Result<KeyRateResult> {
    let base = shared_state(proto, chan, 1)?;
    let stats = postprocess_stats(proto, chan)?;
    let renorm = renormalise(&stats, &base, strategy)?;
    let state = renorm.state_prime.centered();
    let (mi, chi, rate, feasible) = rate_on_state(&state, proto.reconciliation_efficiency, renorm.physical, opts)?;
    Ok(result(proto, chan, Model::Sqcc(strategy), stats, renorm.delta_v, state, mi, chi, rate, feasible))
}

pub fn baseline_rate(proto: &ProtocolParams, chan: &ChannelParams) -> Result<KeyRateResult> {
    baseline_rate_with(proto, chan, RateOptions::default())
}

/// Rate of the earlier model: bit errors counted as excess noise, no
/// postprocessing of the quantum data.
pub fn baseline_rate_with(proto: &ProtocolParams, chan: &ChannelParams, opts: RateOptions) -> Result<KeyRateResult> {
    let stats = postprocess_stats(proto, chan)?;
    let state = qi_baseline_state(proto, chan, stats.e_c)?;
    let (mi, chi, rate, feasible) = rate_on_state(&state, proto.reconciliation_efficiency, true, opts)?;
    Ok(result(proto, chan, Model::Baseline, stats, 1.0, state, mi, chi, rate, feasible))
}

#[allow(clippy::too_many_arguments)]
fn result(
    proto: &ProtocolParams,
    chan: &ChannelParams,
    model: Model,
    stats: PostprocessStats,
    delta_v: f64,
    state: TwoModeGaussian,
    mutual_information: f64,
    holevo: f64,
    rate: f64,
    feasible: bool,
) -> KeyRateResult {
    KeyRateResult {
        modulation_variance: proto.modulation_variance,
        transmissivity: chan.transmissivity,
        excess_noise: chan.excess_noise,
        phase_noise: chan.phase_noise,
        displacement: proto.displacement,
        reconciliation_efficiency: proto.reconciliation_efficiency,
        qos: None,
        model,
        stats,
        delta_v,
        state,
        mutual_information,
        holevo,
        rate,
        feasible,
    }
}

/// Rate with the displacement set so that the bit error rate equals `qos`.
pub fn rate_at_qos(
    modulation_variance: f64,
    chan: &ChannelParams,
    qos: f64,
    beta: f64,
    model: Model,
    opts: RateOptions,
) -> Result<KeyRateResult> {
    let d = required_displacement(modulation_variance, chan, qos)?;
    let proto = ProtocolParams::new(modulation_variance, d, beta)?;
    let mut r = match model {
        Model::Sqcc(s) => asymptotic_rate_with(&proto, chan, s, opts)?,
        Model::Baseline => baseline_rate_with(&proto, chan, opts)?,
    };
    r.qos = Some(qos);
    Ok(r)
}

/// Search range and resolution for the optimisation over `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VSearch {
    pub v_min: f64,
    pub v_max: f64,
    pub grid_points: usize,
    /// Width of the final bracket in `ln V`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for VSearch {
    fn default() -> Self {
        VSearch {
            v_min: 1.001,
            v_max: 1e3,
            grid_points: 64,
            rel_tol: 1e-7,
            max_iter: 200,
        }
    }
}

impl VSearch {
    pub(crate) fn as_log_search(&self) -> LogSearch {
        LogSearch {
            lo: self.v_min,
            hi: self.v_max,
            grid_points: self.grid_points,
            rel_tol: self.rel_tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    /// Maximising `V` when the best rate is positive.
    pub v_star: Option<f64>,
    /// Best rate floored at 0 (no key).
    pub k_star: f64,
    /// Maximising `V` and raw best rate over feasible evaluations.
    pub v_best: Option<f64>,
    pub k_best: Option<f64>,
    pub evaluations: usize,
    pub bracket: (f64, f64),
}

impl Optimum {
    pub(crate) fn from_maximum(m: crate::optimize::Maximum) -> Self {
        let positive = m.value.is_some_and(|v| v > 0.0);
        Optimum {
            v_star: if positive { m.x } else { None },
            k_star: m.value.unwrap_or(0.0).max(0.0),
            v_best: m.x,
            k_best: m.value,
            evaluations: m.evaluations,
            bracket: m.bracket,
        }
    }
}

/// Maximise the asymptotic rate over `V` with `d` tied to the QoS target.
/// Infeasible and failed evaluations are skipped.
pub fn optimise_v(chan: &ChannelParams, qos: f64, beta: f64, model: Model, search: &VSearch) -> Result<Optimum> {
    optimise_v_with(chan, qos, beta, model, RateOptions::default(), search)
}

pub fn optimise_v_with(
    chan: &ChannelParams,
    qos: f64,
    beta: f64,
    model: Model,
    opts: RateOptions,
    search: &VSearch,
) -> Result<Optimum> {
    if !(qos > 0.0 && qos <= 0.5) {
        return Err(Error::domain("optimise_v", format!("W = {qos} not in (0, 0.5]")));
    }
    chan.validate()?;
    ProtocolParams::new(search.v_min.max(1.0), 0.0, beta)?;
    let m = maximise_log(&search.as_log_search(), |v| {
        rate_at_qos(v, chan, qos, beta, model, opts)
            .ok()
            .filter(|r| r.feasible)
            .map(|r| r.rate)
    })?;
    Ok(Optimum::from_maximum(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::g_function;
    use crate::sqcc::Strategy;
    use proptest::prelude::*;

    fn reference_point() -> (ProtocolParams, ChannelParams) {
        (ProtocolParams::new(5.0, 12.0, 0.95).unwrap(), ChannelParams::new(0.1, 0.05).unwrap())
    }

    #[test]
    fn mutual_information_examples() {
        assert_eq!(mutual_information(&TwoModeGaussian::new(5.0, 3.0, 0.0).unwrap()).unwrap(), 0.0);
        let st = TwoModeGaussian::new(5.0, 1.405, 2.4_f64.sqrt()).unwrap();
        let want = (6.0_f64 / (6.0 - 2.4 / 2.405)).log2();
        let got = mutual_information(&st).unwrap();
        assert!((got - want).abs() < 1e-14);
        assert!((got - 0.2624).abs() < 1e-3);
        let mut prev = 0.0;
        for i in 1..20 {
            let c = 0.1 * i as f64;
            let mi = mutual_information(&TwoModeGaussian::new(5.0, 1.405, c).unwrap()).unwrap();
            assert!(mi > prev);
            prev = mi;
        }
        assert!(mutual_information(&TwoModeGaussian::new(1.0, 1.0, 3.0).unwrap()).is_err());
    }

    #[test]
    fn holevo_examples() {
        assert!(holevo_bound(&TwoModeGaussian::tmsv(8.0).unwrap()).unwrap().abs() < 1e-12);
        assert!((holevo_bound(&TwoModeGaussian::new(5.0, 3.0, 0.0).unwrap()).unwrap() - 2.0).abs() < 1e-14);
        let st = TwoModeGaussian::new(5.0, 1.405, 2.4_f64.sqrt()).unwrap();
        // recompute from the raw invariants
        let d1: f64 = 25.0 + 1.405 * 1.405 - 4.8;
        let d2: f64 = 5.0 * 1.405 - 2.4;
        let root = (d1 * d1 - 4.0 * d2 * d2).sqrt();
        let l1 = ((d1 + root) / 2.0).sqrt();
        let l2 = ((d1 - root) / 2.0).sqrt();
        let l3 = 5.0 - 2.4 / 2.405;
        let want = g_function(l1).unwrap() + g_function(l2).unwrap() - g_function(l3).unwrap();
        let got = holevo_bound(&st).unwrap();
        assert!(got > 0.0);
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        assert!(matches!(
            holevo_bound(&TwoModeGaussian::new(1.0, 0.8, 0.0).unwrap()),
            Err(Error::Physicality { .. })
        ));
    }

    #[test]
    fn zero_displacement_is_heterodyne() {
        let chan = ChannelParams::new(0.3, 0.05).unwrap();
        let het = heterodyne_rate(10.0, &chan, 0.95).unwrap();
        let st = TwoModeGaussian::new(10.0, 0.3 * 9.05 + 1.0, (0.3_f64 * 99.0).sqrt()).unwrap();
        let want = 0.95 * mutual_information(&st).unwrap() - holevo_bound(&st).unwrap();
        assert!((het.rate - want).abs() < 1e-14);
        for s in [Strategy::BPreserving, Strategy::CPreserving] {
            let r = rate_at_qos(10.0, &chan, 0.5, 0.95, Model::Sqcc(s), RateOptions::default()).unwrap();
            assert_eq!(r.rate, het.rate);
        }
        let b = rate_at_qos(10.0, &chan, 0.5, 0.95, Model::Baseline, RateOptions::default()).unwrap();
        assert_eq!(b.rate, het.rate);
    }

    #[test]
    fn large_snr_recovers_heterodyne() {
        let chan = ChannelParams::new(0.2, 0.05).unwrap();
        let het = heterodyne_rate(6.0, &chan, 0.95).unwrap();
        let b = 0.2 * 5.05 + 1.0;
        let d = (1e4 * (b + 1.0) / 0.2_f64).sqrt();
        let r = asymptotic_rate(&ProtocolParams::new(6.0, d, 0.95).unwrap(), &chan, Strategy::BPreserving).unwrap();
        assert!((r.stats.snr - 1e4).abs() < 1e-8);
        assert!((r.rate - het.rate).abs() < 1e-6);
    }

    #[test]
    fn reference_point_chain() {
        let (p, c) = reference_point();
        let r = asymptotic_rate(&p, &c, Strategy::BPreserving).unwrap();
        // spreadsheet-style recomputation from scalar formulas only
        let b: f64 = 1.405;
        let cc: f64 = 2.4_f64.sqrt();
        let snr = 14.4 / (b + 1.0);
        let e_c = 0.041792862668082956;
        let delta = (snr / std::f64::consts::PI).sqrt() * (-snr / 4.0).exp();
        let b_d = b + 2.0 * 14.4 * e_c - 2.0 * (b + 1.0) * delta - 2.0 * 14.4 * e_c * e_c;
        let c_prime = cc * (1.0 - delta) * ((b + 1.0) / (b_d + 1.0)).sqrt();
        let mi = (6.0 / (6.0 - c_prime * c_prime / (b + 1.0))).log2();
        let d1 = 25.0 + b * b - 2.0 * c_prime * c_prime;
        let d2 = 5.0 * b - c_prime * c_prime;
        let root = (d1 * d1 - 4.0 * d2 * d2).sqrt();
        let l1 = ((d1 + root) / 2.0).sqrt();
        let l2 = ((d1 - root) / 2.0).sqrt();
        let l3 = 5.0 - c_prime * c_prime / (b + 1.0);
        let g = |x: f64| g_function(x).unwrap();
        let chi = g(l1) + g(l2) - g(l3);
        assert!((r.mutual_information - mi).abs() < 1e-12);
        assert!((r.holevo - chi).abs() < 1e-10);
        assert!((r.rate - (0.95 * mi - chi)).abs() < 1e-10);
        assert!(r.feasible);
        assert_eq!(r.rate, 0.95 * r.mutual_information - r.holevo);
    }

    #[test]
    fn baseline_below_new_model_at_reference_point() {
        let (p, c) = reference_point();
        let new = asymptotic_rate(&p, &c, Strategy::BPreserving).unwrap();
        let old = baseline_rate(&p, &c).unwrap();
        assert!(old.rate < new.rate);
        assert_eq!(old.delta_v, 1.0);
        // e_C = 0 baseline equals the d = 0 rate
        let p0 = ProtocolParams::new(5.0, 0.0, 0.95).unwrap();
        let s = qi_baseline_state(&p0, &c, 0.0).unwrap();
        let r0 = heterodyne_rate(5.0, &c, 0.95).unwrap();
        assert!((0.95 * mutual_information(&s).unwrap() - holevo_bound(&s).unwrap() - r0.rate).abs() < 1e-15);
    }

    #[test]
    fn baseline_reports_negative_rates() {
        let p = ProtocolParams::new(5.0, 30.0, 0.95).unwrap();
        let c = ChannelParams::new(0.05, 0.05).unwrap();
        let r = baseline_rate(&p, &c).unwrap();
        assert!(r.rate < 0.0);
    }

    #[test]
    fn mi_double_doubles_information_only() {
        let (p, c) = reference_point();
        let single = asymptotic_rate(&p, &c, Strategy::BPreserving).unwrap();
        let double = asymptotic_rate_with(&p, &c, Strategy::BPreserving, RateOptions { mi_double: true }).unwrap();
        assert_eq!(double.mutual_information, 2.0 * single.mutual_information);
        assert_eq!(double.holevo, single.holevo);
    }

    #[test]
    fn qos_half_optimum_is_heterodyne_optimum() {
        let chan = ChannelParams::new(0.3, 0.05).unwrap();
        let s = VSearch::default();
        let o = optimise_v(&chan, 0.5, 0.95, Model::default(), &s).unwrap();
        let het = crate::optimize::maximise_log(&s.as_log_search(), |v| heterodyne_rate(v, &chan, 0.95).ok().map(|r| r.rate)).unwrap();
        assert!((o.k_star - het.value.unwrap()).abs() < 1e-6);
        assert!(o.v_star.is_some());
    }

    #[test]
    fn deep_loss_has_no_key() {
        let chan = ChannelParams::new(0.01, 0.05).unwrap();
        let o = optimise_v(&chan, 1e-3, 0.95, Model::default(), &VSearch::default()).unwrap();
        assert_eq!(o.k_star, 0.0);
        assert_eq!(o.v_star, None);
        assert!(o.k_best.unwrap() <= 0.0);
    }

    #[test]
    fn optimum_matches_dense_grid() {
        let chan = ChannelParams::new(0.2, 0.05).unwrap();
        for model in [Model::Sqcc(Strategy::BPreserving), Model::Baseline] {
            let o = optimise_v(&chan, 1e-3, 0.95, model, &VSearch::default()).unwrap();
            let grid = crate::optimize::log_grid(1.001, 1e3, 10_000).unwrap();
            let brute = grid
                .iter()
                .filter_map(|&v| rate_at_qos(v, &chan, 1e-3, 0.95, model, RateOptions::default()).ok())
                .filter(|r| r.feasible)
                .map(|r| r.rate)
                .fold(f64::NEG_INFINITY, f64::max);
            let best = o.k_best.unwrap();
            assert!(best >= brute - 1e-5 * brute.abs(), "{model:?}: {best} vs {brute}");
            assert!(best <= brute + 1e-5 * brute.abs().max(1e-12), "{model:?}: {best} vs {brute}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rate_structure(v in 1.001..1000.0f64, t in 0.01..0.95f64, eps in 0.0..0.1f64, lw in -6.0..-0.31f64) {
            let chan = ChannelParams::new(t, eps).unwrap();
            let w = 10f64.powf(lw);
            let r = rate_at_qos(v, &chan, w, 0.95, Model::default(), RateOptions::default()).unwrap();
            prop_assert!(r.holevo >= 0.0);
            prop_assert!(r.rate <= 0.95 * r.mutual_information);
            prop_assert_eq!(r.rate, 0.95 * r.mutual_information - r.holevo);
            let het = heterodyne_rate(v, &chan, 0.95).unwrap();
            prop_assert!(r.rate <= het.rate + 1e-12);
        }
    }
}
