use sqcc_core::channel::{ChannelParams, ProtocolParams};
use sqcc_core::keyrate::{asymptotic_rate, optimise_v, Model, VSearch};
use sqcc_core::sqcc::{required_displacement, Strategy};
use sqcc_ffi::*;
use std::ptr;

fn scenario(t: f64, eps: f64) -> *mut SqccScenario {
    let mut s = ptr::null_mut();
    assert_eq!(sqcc_scenario_new(t, eps, &mut s), SqccStatus::Ok);
    s
}

fn zero_rate() -> SqccRate {
    SqccRate {
        modulation_variance: 0.0,
        displacement: 0.0,
        snr: 0.0,
        bit_error_rate: 0.0,
        delta: 0.0,
        a_d: 0.0,
        b_d: 0.0,
        c_d: 0.0,
        delta_v: 0.0,
        a: 0.0,
        b: 0.0,
        c: 0.0,
        mutual_information: 0.0,
        holevo: 0.0,
        rate: 0.0,
        feasible: false,
    }
}

#[test]
fn rates_match_core() {
    let s = scenario(0.5, 0.05);
    let mut d = 0.0;
    assert_eq!(sqcc_required_displacement(s, 5.0, 1e-3, &mut d), SqccStatus::Ok);
    let chan = ChannelParams::new(0.5, 0.05).unwrap();
    assert_eq!(d, required_displacement(5.0, &chan, 1e-3).unwrap());

    let mut r = zero_rate();
    assert_eq!(sqcc_asymptotic_rate(s, 5.0, d, &mut r), SqccStatus::Ok);
    let expect = asymptotic_rate(&ProtocolParams::new(5.0, d, 0.95).unwrap(), &chan, Strategy::BPreserving).unwrap();
    assert_eq!(r.rate, expect.rate);
    assert_eq!(r.c, expect.state.c);
    assert!(r.feasible);

    assert_eq!(sqcc_scenario_set_strategy(s, SqccStrategy::CPreserving), SqccStatus::Ok);
    let mut rc = zero_rate();
    assert_eq!(sqcc_asymptotic_rate(s, 5.0, d, &mut rc), SqccStatus::Ok);
    assert!(rc.rate <= r.rate);
    assert!((rc.c - (0.5f64 * 24.0).sqrt()).abs() < 1e-12);
    sqcc_scenario_free(s);
}

#[test]
fn optimise_and_finite() {
    let s = scenario(0.9, 0.05);
    let mut o = SqccOptimum { v_star: 0.0, k_star: 0.0, v_best: 0.0, k_best: 0.0, evaluations: 0 };
    assert_eq!(sqcc_optimise(s, 1e-3, false, &mut o), SqccStatus::Ok);
    let chan = ChannelParams::new(0.9, 0.05).unwrap();
    let expect = optimise_v(&chan, 1e-3, 0.95, Model::default(), &VSearch::default()).unwrap();
    assert_eq!(o.k_star, expect.k_star);

    let mut fin = o;
    assert_eq!(sqcc_optimise(s, 1e-3, true, &mut fin), SqccStatus::Ok);
    assert!(fin.k_star > 0.0 && fin.k_star < o.k_star);

    let mut d = 0.0;
    assert_eq!(sqcc_required_displacement(s, fin.v_star, 1e-3, &mut d), SqccStatus::Ok);
    let mut fr = SqccFiniteRate {
        asymptotic: zero_rate(),
        block_size: 0,
        delta_aep: 0.0,
        delta_ent: 0.0,
        delta_smooth: 0.0,
        delta_hash: 0.0,
        sigma_a_max: 0.0,
        sigma_b_max: 0.0,
        sigma_c_min: 0.0,
        holevo_pe: 0.0,
        rate_pe: 0.0,
        rate: 0.0,
        key_length: 0.0,
        epsilon_total: 0.0,
    };
    assert_eq!(sqcc_finite_rate(s, fin.v_star, d, &mut fr), SqccStatus::Ok);
    assert_eq!(fr.block_size, 100_000_000);
    assert!((fr.rate - fin.k_star).abs() < 1e-12);
    assert!((fr.key_length - fr.rate * 1e8).abs() < 1e-3);

    assert_eq!(sqcc_scenario_set_block_size(s, 10_000_000_000), SqccStatus::Ok);
    let mut big = fr;
    assert_eq!(sqcc_finite_rate(s, fin.v_star, d, &mut big), SqccStatus::Ok);
    assert!(big.rate > fr.rate);
    sqcc_scenario_free(s);
}

#[test]
fn errors_are_reported() {
    let mut s = ptr::null_mut();
    assert_eq!(sqcc_scenario_new(1.5, 0.05, &mut s), SqccStatus::Domain);
    assert!(s.is_null());
    assert!(!last_error().is_empty());

    let s = scenario(0.5, 0.05);
    let mut d = -1.0;
    assert_eq!(sqcc_required_displacement(s, 5.0, 0.7, &mut d), SqccStatus::Domain);
    assert_eq!(d, -1.0);
    assert_eq!(sqcc_required_displacement(ptr::null(), 5.0, 1e-3, &mut d), SqccStatus::NullPointer);
    assert!(last_error().contains("scenario"));
    assert_eq!(sqcc_required_displacement(s, 5.0, 1e-3, ptr::null_mut()), SqccStatus::NullPointer);
    assert_eq!(sqcc_scenario_set_reconciliation_efficiency(s, 1.2), SqccStatus::InvalidArgument);
    assert_eq!(sqcc_scenario_set_block_size(s, 0), SqccStatus::Domain);
    assert_eq!(sqcc_scenario_set_v_search(s, 0.5, 10.0, 16), SqccStatus::InvalidArgument);
    assert_eq!(sqcc_required_displacement(s, 5.0, 1e-3, &mut d), SqccStatus::Ok);
    assert!(last_error().is_empty());
    sqcc_scenario_free(s);
    sqcc_scenario_free(ptr::null_mut());
}

#[test]
fn batch_lifecycle() {
    let s = scenario(0.1, 0.05);
    let mut raw = ptr::null_mut();
    assert_eq!(sqcc_batch_sample(s, 5.0, 10.0, 20_000, 7, &mut raw), SqccStatus::Ok);
    assert_eq!(sqcc_batch_len(raw), 20_000);
    let mut post = ptr::null_mut();
    assert_eq!(sqcc_batch_postprocess(raw, &mut post), SqccStatus::Ok);

    let mut shot = SqccShot { alice_q: 0.0, alice_p: 0.0, bob_q: 0.0, bob_p: 0.0, true_symbol: 0, decided_symbol: 0 };
    assert_eq!(sqcc_batch_shot(raw, 3, &mut shot), SqccStatus::Ok);
    assert_eq!(shot.decided_symbol, sqcc_decide_symbol(shot.bob_q, shot.bob_p));
    assert!((1..=4).contains(&shot.true_symbol));
    assert_eq!(sqcc_batch_shot(raw, 20_000, &mut shot), SqccStatus::InvalidArgument);

    let mut m = SqccMoments {
        n_shots: 0,
        a: 0.0,
        b: 0.0,
        c: 0.0,
        a_se: 0.0,
        b_se: 0.0,
        c_se: 0.0,
        bit_error_rate: 0.0,
        bit_error_rate_se: 0.0,
        symbol_error_rate: 0.0,
    };
    assert_eq!(sqcc_batch_moments(post, &mut m), SqccStatus::Ok);
    let mut r = zero_rate();
    assert_eq!(sqcc_asymptotic_rate(s, 5.0, 10.0, &mut r), SqccStatus::Ok);
    assert!(((m.b - r.b_d) / m.b_se).abs() < 5.0);
    assert!(((m.c - r.c_d) / m.c_se).abs() < 5.0);
    assert!(((m.bit_error_rate - r.bit_error_rate) / m.bit_error_rate_se).abs() < 5.0);

    sqcc_batch_free(post);
    sqcc_batch_free(raw);
    assert_eq!(sqcc_batch_len(ptr::null()), 0);
    sqcc_scenario_free(s);
}

#[test]
fn version_string() {
    let v = unsafe { std::ffi::CStr::from_ptr(sqcc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
