//! Lossy thermal channel, optional power-dependent phase noise, and the
//! earlier excess-noise coupling model used as a baseline.

use crate::gaussian::TwoModeGaussian;
use crate::{Error, Result};
use std::f64::consts::FRAC_1_SQRT_2;

/// Phase-noise factor used when the feature is switched on without an
/// explicit value.
pub const PHASE_NOISE_PRESET: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub transmissivity: f64,
    /// Excess noise referred to the channel input, SNU.
    pub excess_noise: f64,
    /// Extra excess noise per unit received classical power (`σ T d²`).
    pub phase_noise: f64,
}

impl ChannelParams {
    pub fn new(transmissivity: f64, excess_noise: f64) -> Result<Self> {
        Self::with_phase_noise(transmissivity, excess_noise, 0.0)
    }

    pub fn with_phase_noise(transmissivity: f64, excess_noise: f64, phase_noise: f64) -> Result<Self> {
        let p = ChannelParams {
            transmissivity,
            excess_noise,
            phase_noise,
        };
        p.validate()?;
        Ok(p)
    }

    /// Channel with the given attenuation in dB (`T = 10^{-dB/10}`).
    pub fn from_db(loss_db: f64, excess_noise: f64) -> Result<Self> {
        if !(loss_db >= 0.0) || !loss_db.is_finite() {
            return Err(Error::domain("ChannelParams::from_db", format!("loss {loss_db} dB")));
        }
        Self::new(db_to_transmissivity(loss_db), excess_noise)
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.transmissivity;
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain("ChannelParams", format!("T = {t} not in (0, 1]")));
        }
        if !(self.excess_noise >= 0.0) || !self.excess_noise.is_finite() {
            return Err(Error::domain(
                "ChannelParams",
                format!("excess noise {} < 0", self.excess_noise),
            ));
        }
        if !(self.phase_noise >= 0.0) || !self.phase_noise.is_finite() {
            return Err(Error::domain(
                "ChannelParams",
                format!("phase-noise factor {} < 0", self.phase_noise),
            ));
        }
        Ok(())
    }

    /// Excess noise including the phase-noise contribution at displacement `d`.
    pub fn total_excess_noise(&self, d: f64) -> f64 {
        if self.phase_noise > 0.0 {
            self.excess_noise + self.phase_noise * self.transmissivity * d * d
        } else {
            self.excess_noise
        }
    }

    /// Bob's variance `T(V + ε - 1) + 1` for a given modulation variance and
    /// input-referred excess noise.
    pub(crate) fn output_variance(&self, v: f64, excess: f64) -> f64 {
        self.transmissivity * (v + excess - 1.0) + 1.0
    }
}

pub fn db_to_transmissivity(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

pub fn transmissivity_to_db(t: f64) -> f64 {
    -10.0 * t.log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    pub modulation_variance: f64,
    /// Classical QPSK displacement amplitude.
    pub displacement: f64,
    pub reconciliation_efficiency: f64,
}

impl ProtocolParams {
    pub fn new(modulation_variance: f64, displacement: f64, reconciliation_efficiency: f64) -> Result<Self> {
        let p = ProtocolParams {
            modulation_variance,
            displacement,
            reconciliation_efficiency,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.modulation_variance;
        if !(v >= 1.0) || !v.is_finite() {
            return Err(Error::domain("ProtocolParams", format!("V = {v} < 1")));
        }
        if !(self.displacement >= 0.0) || !self.displacement.is_finite() {
            return Err(Error::domain(
                "ProtocolParams",
                format!("displacement {} < 0", self.displacement),
            ));
        }
        let beta = self.reconciliation_efficiency;
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::domain("ProtocolParams", format!("β = {beta} not in (0, 1]")));
        }
        Ok(())
    }

    /// Two-mode squeezing parameter `λ = sqrt((V-1)/(V+1))`.
    pub fn squeezing(&self) -> f64 {
        let v = self.modulation_variance;
        ((v - 1.0) / (v + 1.0)).sqrt()
    }
}

/// QPSK symbol, numbered 1 to 4 counter-clockwise from the first quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QpskSymbol(u8);

impl QpskSymbol {
    pub const ALL: [QpskSymbol; 4] = [QpskSymbol(1), QpskSymbol(2), QpskSymbol(3), QpskSymbol(4)];

    pub fn new(index: u8) -> Result<Self> {
        if (1..=4).contains(&index) {
            Ok(QpskSymbol(index))
        } else {
            Err(Error::domain("QpskSymbol", format!("index {index} not in 1..=4")))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Unit-magnitude sign pair `(sign q, sign p)` of the constellation point.
    pub fn signs(self) -> (f64, f64) {
        match self.0 {
            1 => (1.0, 1.0),
            2 => (-1.0, 1.0),
            3 => (-1.0, -1.0),
            _ => (1.0, -1.0),
        }
    }

    /// Gray-coded bit pair: first bit from the `p` sign, second from `q`.
    pub fn bits(self) -> [u8; 2] {
        match self.0 {
            1 => [0, 0],
            2 => [0, 1],
            3 => [1, 1],
            _ => [1, 0],
        }
    }

    /// Quadrant decision with the boundary conventions
    /// `{q ≥ 0, p ≥ 0} → 1`, `{q < 0, p > 0} → 2`, `{q ≤ 0, p ≤ 0} → 3`,
    /// `{q > 0, p < 0} → 4`, checked in that order.
    pub fn decide(q: f64, p: f64) -> Self {
        if q >= 0.0 && p >= 0.0 {
            QpskSymbol(1)
        } else if q < 0.0 && p > 0.0 {
            QpskSymbol(2)
        } else if q <= 0.0 && p <= 0.0 {
            QpskSymbol(3)
        } else {
            QpskSymbol(4)
        }
    }

    /// Bob-mode mean `(q, p)` after the channel: `±sqrt(T) d/√2` per quadrature.
    pub fn received_mean(self, transmissivity: f64, displacement: f64) -> (f64, f64) {
        let m = transmissivity.sqrt() * displacement * FRAC_1_SQRT_2;
        let (sq, sp) = self.signs();
        (sq * m, sp * m)
    }
}

/// State shared by Alice and Bob when symbol `symbol_index` is sent.
pub fn shared_state(proto: &ProtocolParams, chan: &ChannelParams, symbol_index: u8) -> Result<TwoModeGaussian> {
    let symbol = QpskSymbol::new(symbol_index)?;
    proto.validate()?;
    chan.validate()?;
    let v = proto.modulation_variance;
    let d = proto.displacement;
    let b = chan.output_variance(v, chan.total_excess_noise(d));
    let c = (chan.transmissivity * (v * v - 1.0)).sqrt();
    let (mq, mp) = symbol.received_mean(chan.transmissivity, d);
    TwoModeGaussian::with_mean([0.0, 0.0, mq, mp], v, b, c)
}

/// Zero-mean state of the earlier model, where symbol errors at rate `e_c`
/// add `4 d² e_c` of input-referred excess noise.
pub fn qi_baseline_state(proto: &ProtocolParams, chan: &ChannelParams, e_c: f64) -> Result<TwoModeGaussian> {
    if !(0.0..=0.5).contains(&e_c) {
        return Err(Error::domain("qi_baseline_state", format!("e_C = {e_c} not in [0, 0.5]")));
    }
    proto.validate()?;
    chan.validate()?;
    let v = proto.modulation_variance;
    let d = proto.displacement;
    let eps = chan.total_excess_noise(d) + 4.0 * d * d * e_c;
    let b = chan.output_variance(v, eps);
    let c = (chan.transmissivity * (v * v - 1.0)).sqrt();
    TwoModeGaussian::new(v, b, c)
}

/// Mean photon number of the thermal state injected by an entangling cloner
/// that reproduces the channel's excess noise.
pub fn mean_photon_number(chan: &ChannelParams) -> Result<f64> {
    chan.validate()?;
    let t = chan.transmissivity;
    let eps = chan.excess_noise;
    if eps == 0.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Err(Error::domain(
            "mean_photon_number",
            "lossless channel with excess noise has no thermal-input equivalent",
        ));
    }
    Ok(t * eps / (2.0 * (1.0 - t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::is_physical;
    use proptest::prelude::*;

    fn reference_point() -> (ProtocolParams, ChannelParams) {
        (ProtocolParams::new(5.0, 12.0, 0.95).unwrap(), ChannelParams::new(0.1, 0.05).unwrap())
    }

    #[test]
    fn shared_state_at_reference_point() {
        let (p, c) = reference_point();
        let st = shared_state(&p, &c, 1).unwrap();
        assert_eq!(st.a, 5.0);
        assert!((st.b - 1.405).abs() < 1e-12);
        assert!((st.c - 2.4_f64.sqrt()).abs() < 1e-12);
        let m = 0.1_f64.sqrt() * 12.0 / 2.0_f64.sqrt();
        assert!((m - 2.683).abs() < 1e-3);
        assert!((st.mean[2] - m).abs() < 1e-15 && st.mean[3] == st.mean[2]);
        assert_eq!((st.mean[0], st.mean[1]), (0.0, 0.0));
    }

    #[test]
    fn symbol_means_follow_quadrants() {
        let p = ProtocolParams::new(3.0, 2.0, 1.0).unwrap();
        let c = ChannelParams::new(1.0, 0.0).unwrap();
        let s = std::f64::consts::SQRT_2;
        let want = [(s, s), (-s, s), (-s, -s), (s, -s)];
        for (k, (q, pp)) in (1..=4).zip(want) {
            let st = shared_state(&p, &c, k).unwrap();
            assert!((st.mean[2] - q).abs() < 1e-15 && (st.mean[3] - pp).abs() < 1e-15);
            assert!((st.c - 8.0_f64.sqrt()).abs() < 1e-15 && st.b == 3.0);
        }
        assert!(shared_state(&p, &c, 0).is_err());
        assert!(shared_state(&p, &c, 5).is_err());
    }

    #[test]
    fn zero_displacement_means_zero_mean() {
        let p = ProtocolParams::new(3.0, 0.0, 1.0).unwrap();
        let c = ChannelParams::new(0.4, 0.02).unwrap();
        for k in 1..=4 {
            assert!(shared_state(&p, &c, k).unwrap().mean.iter().all(|&m| m == 0.0));
        }
    }

    #[test]
    fn decision_regions_and_bits() {
        assert_eq!(QpskSymbol::decide(0.0, 0.0).index(), 1);
        assert_eq!(QpskSymbol::decide(-1.0, 0.0).index(), 3);
        assert_eq!(QpskSymbol::decide(0.0, -1.0).index(), 3);
        assert_eq!(QpskSymbol::decide(1.0, -1e-300).index(), 4);
        assert_eq!(QpskSymbol::decide(-1e-300, 2.0).index(), 2);
        for s in QpskSymbol::ALL {
            let (q, p) = s.signs();
            assert_eq!(QpskSymbol::decide(q, p), s);
            let [b_p, b_q] = s.bits();
            assert_eq!(b_p == 1, p < 0.0);
            assert_eq!(b_q == 1, q < 0.0);
        }
    }

    #[test]
    fn phase_noise_adds_power_dependent_excess() {
        let p = ProtocolParams::new(5.0, 12.0, 0.95).unwrap();
        let c = ChannelParams::with_phase_noise(0.1, 0.05, PHASE_NOISE_PRESET).unwrap();
        let st = shared_state(&p, &c, 2).unwrap();
        let eps = 0.05 + 1e-4 * 0.1 * 144.0;
        assert!((st.b - (0.1 * (5.0 + eps - 1.0) + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn baseline_state_examples() {
        let (p, c) = reference_point();
        let st = qi_baseline_state(&p, &c, 0.0419).unwrap();
        let eps: f64 = 0.05 + 4.0 * 144.0 * 0.0419;
        assert!((eps - 24.18).abs() < 0.01);
        assert!((st.b - (0.1 * (4.0 + eps) + 1.0)).abs() < 1e-12);
        assert!((st.b - 3.81844).abs() < 1e-5);
        assert_eq!(st.mean, [0.0; 4]);

        let s0 = shared_state(&p, &c, 1).unwrap();
        let b0 = qi_baseline_state(&p, &c, 0.0).unwrap();
        assert_eq!((b0.a, b0.b, b0.c), (s0.a, s0.b, s0.c));

        let p0 = ProtocolParams::new(5.0, 0.0, 0.95).unwrap();
        let bh = qi_baseline_state(&p0, &c, 0.5).unwrap();
        assert!((bh.b - 1.405).abs() < 1e-12);
        assert!(qi_baseline_state(&p, &c, 0.6).is_err());
    }

    #[test]
    fn photon_number_examples() {
        assert_eq!(mean_photon_number(&ChannelParams::new(0.3, 0.0).unwrap()).unwrap(), 0.0);
        assert!((mean_photon_number(&ChannelParams::new(0.5, 0.05).unwrap()).unwrap() - 0.025).abs() < 1e-15);
        let n = mean_photon_number(&ChannelParams::new(0.1, 0.05).unwrap()).unwrap();
        assert!((n - 0.1 * 0.05 / 1.8).abs() < 1e-15);
        assert_eq!(mean_photon_number(&ChannelParams::new(1.0, 0.0).unwrap()).unwrap(), 0.0);
        assert!(mean_photon_number(&ChannelParams::new(1.0, 0.01).unwrap()).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(ChannelParams::new(0.0, 0.1).is_err());
        assert!(ChannelParams::new(1.1, 0.1).is_err());
        assert!(ChannelParams::new(0.5, -0.1).is_err());
        assert!(ChannelParams::with_phase_noise(0.5, 0.1, -1.0).is_err());
        assert!(ProtocolParams::new(0.9, 1.0, 0.9).is_err());
        assert!(ProtocolParams::new(2.0, -1.0, 0.9).is_err());
        assert!(ProtocolParams::new(2.0, 1.0, 0.0).is_err());
        assert!(ProtocolParams::new(2.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn db_conversion() {
        let c = ChannelParams::from_db(10.0, 0.05).unwrap();
        assert!((c.transmissivity - 0.1).abs() < 1e-15);
        assert!((transmissivity_to_db(0.01) - 20.0).abs() < 1e-12);
        assert!(ChannelParams::from_db(-1.0, 0.0).is_err());
    }

    #[test]
    fn squeezing_recovers_variance() {
        let p = ProtocolParams::new(7.0, 0.0, 1.0).unwrap();
        let l = p.squeezing();
        assert!(((1.0 + l * l) / (1.0 - l * l) - 7.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn shared_state_is_physical(v in 1.0..1000.0f64, t in 1e-4..=1.0f64, eps in 0.0..1.0f64, d in 0.0..50.0f64, k in 1u8..=4) {
            let st = shared_state(&ProtocolParams::new(v, d, 0.95).unwrap(), &ChannelParams::new(t, eps).unwrap(), k).unwrap();
            prop_assert!(is_physical(&st).physical);
        }

        #[test]
        fn b_affine_in_noise(v in 1.0..100.0f64, t in 1e-3..=1.0f64, e1 in 0.0..1.0f64, e2 in 0.0..1.0f64, d in 0.0..30.0f64) {
            let p = ProtocolParams::new(v, d, 0.95).unwrap();
            let s1 = shared_state(&p, &ChannelParams::new(t, e1).unwrap(), 1).unwrap();
            let s2 = shared_state(&p, &ChannelParams::new(t, e2).unwrap(), 1).unwrap();
            prop_assert!(((s1.b - s2.b) - t * (e1 - e2)).abs() < 1e-12 * s1.b.max(s2.b));
            prop_assert_eq!(s1.c, s2.c);
        }
    }
}
