//! Holevo bound against a dense-matrix computation: symplectic eigenvalues
//! from the spectrum of `(Ω V)²` and the conditional state from the Schur
//! complement `V_A - C (V_B + I)⁻¹ Cᵀ`.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use proptest::prelude::*;
use sqcc_core::channel::{ChannelParams, ProtocolParams};
use sqcc_core::gaussian::TwoModeGaussian;
use sqcc_core::keyrate::{asymptotic_rate, holevo_bound};
use sqcc_core::sqcc::Strategy;

fn g(x: f64) -> f64 {
    if x <= 1.0 + 1e-12 {
        return 0.0;
    }
    let p = (x + 1.0) / 2.0;
    let m = (x - 1.0) / 2.0;
    p * p.log2() - m * m.log2()
}

fn covariance(a: f64, b: f64, c: f64) -> Matrix4<f64> {
    Matrix4::new(
        a, 0.0, c, 0.0, //
        0.0, a, 0.0, -c, //
        c, 0.0, b, 0.0, //
        0.0, -c, 0.0, b,
    )
}

fn symplectic_eigenvalues(v: &Matrix4<f64>) -> Vec<f64> {
    let j = Matrix2::new(0.0, 1.0, -1.0, 0.0);
    let mut omega = Matrix4::zeros();
    omega.fixed_view_mut::<2, 2>(0, 0).copy_from(&j);
    omega.fixed_view_mut::<2, 2>(2, 2).copy_from(&j);
    let m = omega * v;
    // eigenvalues of -(ΩV)² are the squared symplectic eigenvalues, each twice
    let sq = DMatrix::from_iterator(4, 4, (-(m * m)).iter().copied());
    let mut ev: Vec<f64> = sq
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re.max(1.0).sqrt())
        .collect();
    ev.sort_by(f64::total_cmp);
    vec![ev[3], ev[1]]
}

fn holevo_dense(a: f64, b: f64, c: f64) -> f64 {
    let v = covariance(a, b, c);
    let nu = symplectic_eigenvalues(&v);
    let va = v.fixed_view::<2, 2>(0, 0).into_owned();
    let vb = v.fixed_view::<2, 2>(2, 2).into_owned();
    let cab = v.fixed_view::<2, 2>(0, 2).into_owned();
    let cond = va - cab * (vb + Matrix2::identity()).try_inverse().unwrap() * cab.transpose();
    let nu_cond = cond.determinant().sqrt();
    (g(nu[0]) + g(nu[1]) - g(nu_cond)).max(0.0)
}

proptest! {
    #[test]
    fn matches_dense_oracle_on_channel_states(v in 1.01..200.0f64, t in 0.01..1.0f64, eps in 0.0..0.2f64) {
        let a = v;
        let b = t * (v - 1.0) + 1.0 + t * eps;
        let c = (t * (v * v - 1.0)).sqrt();
        let chi = holevo_bound(&TwoModeGaussian::new(a, b, c).unwrap()).unwrap();
        let oracle = holevo_dense(a, b, c);
        prop_assert!((chi - oracle).abs() < 1e-7 * oracle.max(1.0), "{chi} vs {oracle}");
    }

    #[test]
    fn matches_dense_oracle_on_renormalised_states(
        v in 1.5..100.0f64,
        t in 0.05..1.0f64,
        d in 0.0..30.0f64,
        c_preserving in any::<bool>(),
    ) {
        let chan = ChannelParams::new(t, 0.05).unwrap();
        let proto = ProtocolParams::new(v, d, 0.95).unwrap();
        let s = if c_preserving { Strategy::CPreserving } else { Strategy::BPreserving };
        let r = asymptotic_rate(&proto, &chan, s).unwrap();
        prop_assume!(r.feasible);
        let oracle = holevo_dense(r.state.a, r.state.b, r.state.c);
        prop_assert!((r.holevo - oracle).abs() < 1e-7 * oracle.max(1.0), "{} vs {oracle}", r.holevo);
    }
}
