//! Receiver postprocessing for the multiplexed classical symbol.
//!
//! Bob decides the QPSK symbol by quadrant, subtracts the decided centroid
//! from his outcome, then rescales the data by `1/sqrt(Δ_V)` so that the
//! second moments again describe a physical Gaussian channel. This module
//! gives the closed-form moments of that pipeline and the equivalent
//! channels they correspond to.

use crate::channel::{ChannelParams, ProtocolParams};
use crate::gaussian::{is_physical, Physicality, TwoModeGaussian};
use crate::specfn::{erfc, erfc_inv};
use crate::{Error, Result};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Slack used by the strategy-specific physicality conditions.
pub const RENORM_SLACK: f64 = 1e-12;

/// Moments of Bob's data after discrimination and re-displacement, for the
/// symbol-1 sub-ensemble (the others follow by symmetry).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostprocessStats {
    /// `T d² / (b + 1)`.
    pub snr: f64,
    /// Per-quadrature sign error probability.
    pub e_c: f64,
    /// `sqrt(snr/π) exp(-snr/4)`.
    pub delta: f64,
    pub a_d: f64,
    pub b_d: f64,
    pub c_d: f64,
    /// Mean of the re-displaced data, `(0, 0, 2 m e_C, 2 m e_C)` with
    /// `m = sqrt(T) d/√2`.
    pub mean_d: [f64; 4],
    pub transmissivity: f64,
    /// Received classical power `T d²`.
    pub received_power: f64,
}

impl PostprocessStats {
    /// Postprocessed state before rescaling. Generally not physical.
    pub fn state(&self) -> TwoModeGaussian {
        TwoModeGaussian {
            mean: self.mean_d,
            a: self.a_d,
            b: self.b_d,
            c: self.c_d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// Keep Bob's variance: `Δ_V = (b_d + 1)/(b + 1)`.
    #[default]
    BPreserving,
    /// Keep the correlation: `Δ_V = (1 - δ)²`.
    CPreserving,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::BPreserving => "b-preserving",
            Strategy::CPreserving => "c-preserving",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "b-preserving" | "b" => Ok(Strategy::BPreserving),
            "c-preserving" | "c" => Ok(Strategy::CPreserving),
            other => Err(Error::domain("Strategy", format!("unknown strategy {other:?}"))),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Channel equivalent to the physical channel followed by the postprocessing.
///
/// The postprocessing acts like a second lossy thermal channel
/// `(virtual_transmissivity, virtual_excess_noise)` placed after the physical
/// one. `transmissivity` and `excess_noise` describe the composition, with the
/// noise referred to the input of the physical channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveChannel {
    pub transmissivity: f64,
    pub excess_noise: f64,
    pub virtual_transmissivity: f64,
    pub virtual_excess_noise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormResult {
    pub strategy: Strategy,
    pub delta_v: f64,
    pub state_prime: TwoModeGaussian,
    pub effective_channel: EffectiveChannel,
    pub physical: bool,
}

/// Outcome of [`physicality_check`]. `margin` is `c - c'` for the
/// b-preserving rule and `b' - b` for the c-preserving one; negative values
/// mean the rule is violated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormVerdict {
    pub pass: bool,
    pub margin: f64,
    pub state: Physicality,
}

/// Closed-form postprocessed moments at the given protocol and channel.
pub fn postprocess_stats(proto: &ProtocolParams, chan: &ChannelParams) -> Result<PostprocessStats> {
    let base = crate::channel::shared_state(proto, chan, 1)?;
    let d = proto.displacement;
    postprocess_moments(&base, chan.transmissivity, chan.transmissivity * d * d)
}

/// Postprocessed moments for an arbitrary base covariance `(a, b, c)` and
/// received classical power `T d²`.
pub fn postprocess_moments(base: &TwoModeGaussian, transmissivity: f64, received_power: f64) -> Result<PostprocessStats> {
    if !(received_power >= 0.0) || !received_power.is_finite() {
        return Err(Error::domain(
            "postprocess_moments",
            format!("received power {received_power} < 0"),
        ));
    }
    if !(base.b + 1.0 > 0.0) {
        return Err(Error::domain("postprocess_moments", format!("b = {} ≤ -1", base.b)));
    }
    let snr = received_power / (base.b + 1.0);
    let e_c = 0.5 * erfc(0.5 * snr.sqrt())?;
    let delta = (snr / PI).sqrt() * (-0.25 * snr).exp();
    let b_d = base.b + 2.0 * received_power * e_c * (1.0 - e_c) - 2.0 * (base.b + 1.0) * delta;
    let c_d = base.c * (1.0 - delta);
    let centroid = received_power.sqrt() * FRAC_1_SQRT_2;
    let shift = 2.0 * centroid * e_c;
    Ok(PostprocessStats {
        snr,
        e_c,
        delta,
        a_d: base.a,
        b_d,
        c_d,
        mean_d: [0.0, 0.0, shift, shift],
        transmissivity,
        received_power,
    })
}

/// Rescale the postprocessed data with the chosen strategy.
pub fn renormalise(stats: &PostprocessStats, base: &TwoModeGaussian, strategy: Strategy) -> Result<RenormResult> {
    let delta_v = match strategy {
        Strategy::BPreserving => (stats.b_d + 1.0) / (base.b + 1.0),
        Strategy::CPreserving => (1.0 - stats.delta).powi(2),
    };
    if !(delta_v > 0.0) || !delta_v.is_finite() {
        return Err(Error::numeric("renormalise", format!("Δ_V = {delta_v} is not positive")));
    }
    let scale = delta_v.sqrt().recip();
    let b_prime = match strategy {
        Strategy::BPreserving => base.b,
        Strategy::CPreserving => stats.b_d / delta_v + (delta_v.recip() - 1.0),
    };
    let c_prime = match strategy {
        Strategy::BPreserving => stats.c_d * scale,
        Strategy::CPreserving => base.c,
    };
    let state_prime = TwoModeGaussian {
        mean: stats.mean_d.map(|m| m * scale),
        a: stats.a_d,
        b: b_prime,
        c: c_prime,
    };
    let effective_channel = effective_channel(base, &state_prime, stats.transmissivity);
    let mut result = RenormResult {
        strategy,
        delta_v,
        state_prime,
        effective_channel,
        physical: false,
    };
    result.physical = physicality_check(&result, base).pass;
    Ok(result)
}

/// Second channel that takes `base` to `prime`:
/// `c' = sqrt(T_v) c` and `b' = T_v (b + ε_v - 1) + 1`.
fn effective_channel(base: &TwoModeGaussian, prime: &TwoModeGaussian, transmissivity: f64) -> EffectiveChannel {
    let t_v = if base.c != 0.0 { (prime.c / base.c).powi(2) } else { 1.0 };
    let eps_v = (prime.b - 1.0) / t_v - (base.b - 1.0);
    let base_noise = (base.b - 1.0) / transmissivity - base.a + 1.0;
    EffectiveChannel {
        transmissivity: transmissivity * t_v,
        excess_noise: base_noise + eps_v / transmissivity,
        virtual_transmissivity: t_v,
        virtual_excess_noise: eps_v,
    }
}

/// Strategy-specific consistency condition plus the uncertainty principle
/// on the rescaled state.
pub fn physicality_check(result: &RenormResult, base: &TwoModeGaussian) -> RenormVerdict {
    let prime = &result.state_prime;
    let margin = match result.strategy {
        Strategy::BPreserving => base.c - prime.c,
        Strategy::CPreserving => prime.b - base.b,
    };
    let state = is_physical(&prime.centered());
    RenormVerdict {
        pass: margin >= -RENORM_SLACK && state.physical,
        margin,
        state,
    }
}

/// Smallest displacement keeping the per-quadrature bit error rate at or
/// below `qos`.
///
/// With phase noise the received noise grows with `d²`; the threshold is then
/// reachable only while `4 u² σ T < 1`, `u = erfc⁻¹(2 qos)`, and a domain
/// error is returned otherwise.
pub fn required_displacement(modulation_variance: f64, chan: &ChannelParams, qos: f64) -> Result<f64> {
    if !(qos > 0.0 && qos <= 0.5) {
        return Err(Error::domain("required_displacement", format!("W = {qos} not in (0, 0.5]")));
    }
    if !(modulation_variance >= 1.0) {
        return Err(Error::domain(
            "required_displacement",
            format!("V = {modulation_variance} < 1"),
        ));
    }
    chan.validate()?;
    let u = erfc_inv(2.0 * qos)?;
    let t = chan.transmissivity;
    let noise = modulation_variance + chan.excess_noise - 1.0 + 2.0 / t;
    let denom = 1.0 - 4.0 * u * u * chan.phase_noise * t;
    if !(denom > 0.0) {
        return Err(Error::domain(
            "required_displacement",
            format!("bit error rate {qos} unreachable with phase-noise factor {}", chan.phase_noise),
        ));
    }
    Ok(2.0 * u * (noise / denom).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::Strategy;
    use crate::channel::shared_state;
    use proptest::prelude::*;

    fn point(v: f64, t: f64, eps: f64, d: f64) -> (TwoModeGaussian, PostprocessStats) {
        let p = ProtocolParams::new(v, d, 0.95).unwrap();
        let c = ChannelParams::new(t, eps).unwrap();
        (shared_state(&p, &c, 1).unwrap(), postprocess_stats(&p, &c).unwrap())
    }

    /// Apply a lossy thermal channel to Bob's mode of a zero-mean state.
    fn through(st: &TwoModeGaussian, t: f64, eps: f64) -> TwoModeGaussian {
        TwoModeGaussian {
            mean: [0.0; 4],
            a: st.a,
            b: t * (st.b + eps - 1.0) + 1.0,
            c: t.sqrt() * st.c,
        }
    }

    #[test]
    fn zero_displacement_is_identity() {
        let (base, s) = point(5.0, 0.1, 0.05, 0.0);
        assert_eq!((s.snr, s.e_c, s.delta), (0.0, 0.5, 0.0));
        assert_eq!((s.a_d, s.b_d, s.c_d), (base.a, base.b, base.c));
        assert_eq!(s.mean_d, [0.0; 4]);
        for strat in [Strategy::BPreserving, Strategy::CPreserving] {
            let r = renormalise(&s, &base, strat).unwrap();
            assert_eq!(r.delta_v, 1.0);
            assert_eq!(r.state_prime.c, base.c);
            assert!((r.state_prime.b - base.b).abs() < 1e-15);
            assert_eq!(r.effective_channel.virtual_transmissivity, 1.0);
            assert!(r.effective_channel.virtual_excess_noise.abs() < 1e-15);
            let v = physicality_check(&r, &base);
            assert!(v.pass && v.margin == 0.0);
        }
    }

    #[test]
    fn reference_point_moments() {
        let (_, s) = point(5.0, 0.1, 0.05, 12.0);
        assert!((s.snr - 5.988).abs() < 2e-3, "{s:?}");
        assert!((s.e_c - 0.0419).abs() < 2e-3);
        assert!((s.delta - 0.309).abs() < 2e-3);
        assert!((s.c_d - 1.070).abs() < 2e-3);
        // 30-digit evaluation of the same closed forms
        assert!((s.snr - 5.987525987525988).abs() < 1e-13);
        assert!((s.e_c - 0.041792862668082956).abs() < 1e-15);
        assert!((s.delta - 0.3090020745681698).abs() < 1e-14);
        assert!((s.b_d - 1.072031137112087).abs() < 1e-12);
        assert!((s.c_d - 1.070489382984541).abs() < 1e-12);
        assert_eq!(s.a_d, 5.0);
        let m = 2.0 * 0.1_f64.sqrt() * 12.0 * FRAC_1_SQRT_2 * s.e_c;
        assert!((s.mean_d[2] - m).abs() < 1e-14 && s.mean_d[3] == s.mean_d[2]);
    }

    #[test]
    fn reference_point_renormalisation() {
        let (base, s) = point(5.0, 0.1, 0.05, 12.0);
        let b = renormalise(&s, &base, Strategy::BPreserving).unwrap();
        assert!((b.delta_v - 0.8626).abs() < 2e-3);
        assert!((b.delta_v - 0.8615514083626140).abs() < 1e-12);
        assert!((b.state_prime.c - 1.1526).abs() < 2e-3);
        assert_eq!(b.state_prime.b, base.b);
        assert!(b.physical);
        let verdict = physicality_check(&b, &base);
        assert!((verdict.margin - 0.397).abs() < 2e-3);

        let c = renormalise(&s, &base, Strategy::CPreserving).unwrap();
        assert!((c.delta_v - 0.4775).abs() < 2e-3);
        assert_eq!(c.state_prime.c, base.c);
        assert!((c.state_prime.b - 3.339530952560543).abs() < 1e-11);
        assert!(c.physical);
    }

    #[test]
    fn small_displacement_is_unphysical_before_rescaling() {
        let (_, s) = point(5.0, 0.1, 0.05, 6.0);
        assert!(s.b_d < 1.0);
        assert!(!is_physical(&s.state().centered()).physical);
    }

    #[test]
    fn large_snr_decouples() {
        let (base, s) = point(5.0, 0.1, 0.05, 200.0);
        assert!(s.snr > 100.0);
        assert!(s.e_c < 1e-6 && s.delta < 1e-9);
        assert!((s.b_d - base.b).abs() < 1e-4 && (s.c_d - base.c).abs() < 1e-4);
    }

    #[test]
    fn synthetic_violation_fails() {
        let (base, mut s) = point(5.0, 0.1, 0.05, 12.0);
        s.c_d = base.c * 1.2;
        let r = renormalise(&s, &base, Strategy::BPreserving).unwrap();
        let v = physicality_check(&r, &base);
        assert!(!v.pass && v.margin < 0.0 && !r.physical);
        let mut s2 = s;
        s2.b_d = -1.5;
        assert!(matches!(renormalise(&s2, &base, Strategy::BPreserving), Err(Error::Numeric { .. })));
    }

    #[test]
    fn composed_channel_reproduces_rescaled_state() {
        for &(v, t, eps, d) in &[(5.0, 0.1, 0.05, 12.0), (20.0, 0.5, 0.01, 30.0), (3.0, 0.9, 0.2, 4.0), (50.0, 0.02, 0.05, 60.0)] {
            let p = ProtocolParams::new(v, d, 0.95).unwrap();
            let ch = ChannelParams::new(t, eps).unwrap();
            let base = shared_state(&p, &ch, 1).unwrap();
            let s = postprocess_stats(&p, &ch).unwrap();
            for strat in [Strategy::BPreserving, Strategy::CPreserving] {
                let r = renormalise(&s, &base, strat).unwrap();
                let e = r.effective_channel;
                let tmsv = TwoModeGaussian::tmsv(v).unwrap();
                let two_step = through(&through(&tmsv, t, eps), e.virtual_transmissivity, e.virtual_excess_noise);
                let one_step = through(&tmsv, e.transmissivity, e.excess_noise);
                for st in [two_step, one_step] {
                    assert!((st.b - r.state_prime.b).abs() < 1e-10, "{strat:?} {st:?} {r:?}");
                    assert!((st.c - r.state_prime.c).abs() < 1e-10);
                }
                if strat == Strategy::CPreserving {
                    assert_eq!(e.transmissivity, t);
                    assert!((t * (e.excess_noise - eps) - (r.state_prime.b - base.b)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn required_displacement_examples() {
        let ch = ChannelParams::new(0.1, 0.05).unwrap();
        assert_eq!(required_displacement(5.0, &ch, 0.5).unwrap(), 0.0);
        let d = required_displacement(5.0, &ch, 1e-3).unwrap();
        assert!((d - 21.43).abs() < 0.05, "{d}");
        // oracle: 2 erfc⁻¹(0.002) sqrt(V + ε - 1 + 2/T)
        assert!((d - 2.0 * 2.185124219133004 * (4.05_f64 + 20.0).sqrt()).abs() < 1e-9);
        assert!(required_displacement(5.0, &ch, 0.0).is_err());
        assert!(required_displacement(5.0, &ch, 0.6).is_err());
    }

    #[test]
    fn required_displacement_with_phase_noise_roundtrips() {
        let ch = ChannelParams::with_phase_noise(0.3, 0.05, crate::channel::PHASE_NOISE_PRESET).unwrap();
        let d = required_displacement(8.0, &ch, 1e-4).unwrap();
        let p = ProtocolParams::new(8.0, d, 0.95).unwrap();
        assert!((postprocess_stats(&p, &ch).unwrap().e_c - 1e-4).abs() < 1e-12);
        let heavy = ChannelParams::with_phase_noise(1.0, 0.0, 0.1).unwrap();
        assert!(required_displacement(2.0, &heavy, 1e-6).is_err());
    }

    #[test]
    fn first_order_noise_expansion() {
        for &(v, t, eps, d) in &[(5.0, 0.1, 0.05, 25.0), (10.0, 0.5, 0.02, 20.0), (3.0, 0.9, 0.05, 11.0)] {
            let (base, s) = point(v, t, eps, d);
            assert!(s.snr > 25.0);
            let r = renormalise(&s, &base, Strategy::CPreserving).unwrap();
            let eps_eff = (r.state_prime.b - base.b) / t;
            let approx = 2.0 * d * d * s.e_c * (1.0 + 2.0 * s.delta);
            assert!((eps_eff / approx - 1.0).abs() < 0.05, "{eps_eff} vs {approx}");
        }
    }

    proptest! {
        #[test]
        fn displacement_roundtrip(v in 1.0..1000.0f64, t in 1e-3..=1.0f64, eps in 0.0..0.3f64, lw in -9.0..-0.31f64) {
            let w = 10f64.powf(lw);
            let ch = ChannelParams::new(t, eps).unwrap();
            let d = required_displacement(v, &ch, w).unwrap();
            let s = postprocess_stats(&ProtocolParams::new(v, d, 0.95).unwrap(), &ch).unwrap();
            prop_assert!((s.e_c - w).abs() < 1e-9 * w.max(1e-3));
        }

        #[test]
        fn moment_invariants(v in 1.0..1000.0f64, t in 1e-3..=1.0f64, eps in 0.0..0.3f64, d in 0.0..200.0f64) {
            let (base, s) = point(v, t, eps, d);
            prop_assert_eq!(s.a_d, base.a);
            prop_assert!(s.c_d <= base.c);
            let b = renormalise(&s, &base, Strategy::BPreserving).unwrap();
            prop_assert!(b.physical);
            prop_assert!(b.state_prime.c <= base.c + RENORM_SLACK);
            let c = renormalise(&s, &base, Strategy::CPreserving).unwrap();
            prop_assert!(c.state_prime.b >= base.b - RENORM_SLACK);
        }
    }
}
