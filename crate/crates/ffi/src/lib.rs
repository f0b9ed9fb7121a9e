//! C ABI for `sqcc-core`.
//!
//! Conventions:
//! * every fallible function returns an [`SqccStatus`] and writes results
//!   through out-pointers, which are left untouched on failure;
//! * after a non-`SQCC_STATUS_OK` return, [`sqcc_last_error_message`] gives a
//!   description valid until the next call on the same thread;
//! * objects created by `*_new` / `*_sample` / `*_postprocess` are owned by
//!   the caller and released with the matching `*_free`;
//! * missing values in result structs are NaN.

use sqcc_core::channel::{ChannelParams, ProtocolParams, QpskSymbol};
use sqcc_core::finitekey::{finite_rate, optimise_v_finite, SecurityParams};
use sqcc_core::keyrate::{asymptotic_rate_with, optimise_v_with, KeyRateResult, Model, Optimum, RateOptions, VSearch};
use sqcc_core::mc::{discriminate_and_redisplace, empirical_moments, sample_joint, ShotBatch, SymbolSchedule};
use sqcc_core::sqcc::{required_displacement, Strategy};
use sqcc_core::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqccStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NoConvergence = 4,
    Numeric = 5,
    Physicality = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqccStrategy {
    BPreserving = 0,
    CPreserving = 1,
}

impl From<SqccStrategy> for Strategy {
    fn from(s: SqccStrategy) -> Self {
        match s {
            SqccStrategy::BPreserving => Strategy::BPreserving,
            SqccStrategy::CPreserving => Strategy::CPreserving,
        }
    }
}

/// Channel, reconciliation and finite-size settings shared by the rate calls.
pub struct SqccScenario {
    channel: ChannelParams,
    beta: f64,
    strategy: Strategy,
    mi_double: bool,
    security: SecurityParams,
    search: VSearch,
}

/// Monte Carlo shots plus the protocol that produced them.
pub struct SqccBatch {
    batch: ShotBatch,
    proto: ProtocolParams,
    channel: ChannelParams,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqccRate {
    pub modulation_variance: f64,
    pub displacement: f64,
    pub snr: f64,
    pub bit_error_rate: f64,
    pub delta: f64,
    pub a_d: f64,
    pub b_d: f64,
    pub c_d: f64,
    pub delta_v: f64,
    /// Renormalised covariance entries.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mutual_information: f64,
    pub holevo: f64,
    pub rate: f64,
    pub feasible: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqccFiniteRate {
    pub asymptotic: SqccRate,
    pub block_size: u64,
    pub delta_aep: f64,
    pub delta_ent: f64,
    pub delta_smooth: f64,
    pub delta_hash: f64,
    pub sigma_a_max: f64,
    pub sigma_b_max: f64,
    pub sigma_c_min: f64,
    pub holevo_pe: f64,
    pub rate_pe: f64,
    pub rate: f64,
    pub key_length: f64,
    pub epsilon_total: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqccOptimum {
    /// Maximising variance when the best rate is positive, else NaN.
    pub v_star: f64,
    /// Best rate floored at 0.
    pub k_star: f64,
    /// Maximising variance and raw best rate, NaN without any feasible point.
    pub v_best: f64,
    pub k_best: f64,
    pub evaluations: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqccMoments {
    pub n_shots: u64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub a_se: f64,
    pub b_se: f64,
    pub c_se: f64,
    pub bit_error_rate: f64,
    pub bit_error_rate_se: f64,
    pub symbol_error_rate: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqccShot {
    pub alice_q: f64,
    pub alice_p: f64,
    pub bob_q: f64,
    pub bob_p: f64,
    /// QPSK symbol indices 1-4.
    pub true_symbol: u8,
    pub decided_symbol: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: SqccStatus, msg: &str) -> SqccStatus {
    set_last_error(msg);
    status
}

fn status_of(e: &Error) -> SqccStatus {
    match e {
        Error::Domain { .. } => SqccStatus::Domain,
        Error::NoConvergence { .. } => SqccStatus::NoConvergence,
        Error::Numeric { .. } => SqccStatus::Numeric,
        Error::Physicality { .. } => SqccStatus::Physicality,
    }
}

/// Runs `body`, mapping core errors and panics to status codes.
fn guard(body: impl FnOnce() -> Result<(), SqccStatus>) -> SqccStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            SqccStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(SqccStatus::Panic, "internal panic"),
    }
}

fn core<T>(r: sqcc_core::Result<T>) -> Result<T, SqccStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, SqccStatus> {
    // SAFETY: callers pass either null or a pointer obtained from this library
    unsafe { p.as_ref() }.ok_or_else(|| fail(SqccStatus::NullPointer, &format!("{name} is null")))
}

fn deref_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, SqccStatus> {
    // SAFETY: as for `deref`; the caller guarantees exclusive access
    unsafe { p.as_mut() }.ok_or_else(|| fail(SqccStatus::NullPointer, &format!("{name} is null")))
}

fn rate_struct(r: &KeyRateResult) -> SqccRate {
    SqccRate {
        modulation_variance: r.modulation_variance,
        displacement: r.displacement,
        snr: r.stats.snr,
        bit_error_rate: r.stats.e_c,
        delta: r.stats.delta,
        a_d: r.stats.a_d,
        b_d: r.stats.b_d,
        c_d: r.stats.c_d,
        delta_v: r.delta_v,
        a: r.state.a,
        b: r.state.b,
        c: r.state.c,
        mutual_information: r.mutual_information,
        holevo: r.holevo,
        rate: r.rate,
        feasible: r.feasible,
    }
}

fn optimum_struct(o: &Optimum) -> SqccOptimum {
    SqccOptimum {
        v_star: o.v_star.unwrap_or(f64::NAN),
        k_star: o.k_star,
        v_best: o.v_best.unwrap_or(f64::NAN),
        k_best: o.k_best.unwrap_or(f64::NAN),
        evaluations: o.evaluations as u64,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sqcc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread (empty after success).
#[no_mangle]
pub extern "C" fn sqcc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// New scenario with reconciliation efficiency 0.95, B-preserving
/// renormalisation, no phase noise and default finite-size parameters.
#[no_mangle]
pub extern "C" fn sqcc_scenario_new(transmissivity: f64, excess_noise: f64, out: *mut *mut SqccScenario) -> SqccStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let channel = core(ChannelParams::new(transmissivity, excess_noise))?;
        *out = Box::into_raw(Box::new(SqccScenario {
            channel,
            beta: 0.95,
            strategy: Strategy::BPreserving,
            mi_double: false,
            security: SecurityParams::default(),
            search: VSearch::default(),
        }));
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
#[no_mangle]
pub extern "C" fn sqcc_scenario_free(scenario: *mut SqccScenario) {
    if !scenario.is_null() {
        // SAFETY: non-null pointers come from `sqcc_scenario_new`
        drop(unsafe { Box::from_raw(scenario) });
    }
}

#[no_mangle]
pub extern "C" fn sqcc_scenario_set_phase_noise(scenario: *mut SqccScenario, phase_noise: f64) -> SqccStatus {
    guard(|| {
        let s = deref_mut(scenario, "scenario")?;
        let c = s.channel;
        s.channel = core(ChannelParams::with_phase_noise(c.transmissivity, c.excess_noise, phase_noise))?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sqcc_scenario_set_reconciliation_efficiency(scenario: *mut SqccScenario, beta: f64) -> SqccStatus {
    guard(|| {
        let s = deref_mut(scenario, "scenario")?;
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(fail(SqccStatus::InvalidArgument, &format!("beta = {beta} not in (0, 1]")));
        }
        s.beta = beta;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sqcc_scenario_set_strategy(scenario: *mut SqccScenario, strategy: SqccStrategy) -> SqccStatus {
    guard(|| {
        deref_mut(scenario, "scenario")?.strategy = strategy.into();
        Ok(())
    })
}

/// Count the mutual information once per quadrature.
#[no_mangle]
pub extern "C" fn sqcc_scenario_set_mi_double(scenario: *mut SqccScenario, enabled: bool) -> SqccStatus {
    guard(|| {
        deref_mut(scenario, "scenario")?.mi_double = enabled;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sqcc_scenario_set_block_size(scenario: *mut SqccScenario, block_size: u64) -> SqccStatus {
    guard(|| {
        let s = deref_mut(scenario, "scenario")?;
        let sec = SecurityParams { block_size, ..s.security };
        core(sec.validate())?;
        s.security = sec;
        Ok(())
    })
}

/// Frame success probability, discretisation bits and one failure
/// probability applied to every security term.
#[no_mangle]
pub extern "C" fn sqcc_scenario_set_security(
    scenario: *mut SqccScenario,
    frame_success: f64,
    discretisation_bits: u32,
    epsilon: f64,
) -> SqccStatus {
    guard(|| {
        let s = deref_mut(scenario, "scenario")?;
        let sec = SecurityParams {
            frame_success,
            discretisation_bits,
            eps_pe: epsilon,
            eps_smooth: epsilon,
            eps_hash: epsilon,
            eps_ent: epsilon,
            eps_qrng: epsilon,
            eps_ir: epsilon,
            eps_cal: epsilon,
            ..s.security
        };
        core(sec.validate())?;
        s.security = sec;
        Ok(())
    })
}

/// Range and coarse grid size of the modulation-variance search.
#[no_mangle]
pub extern "C" fn sqcc_scenario_set_v_search(
    scenario: *mut SqccScenario,
    v_min: f64,
    v_max: f64,
    grid_points: u32,
) -> SqccStatus {
    guard(|| {
        let s = deref_mut(scenario, "scenario")?;
        if !(v_min >= 1.0 && v_max > v_min) || grid_points < 3 {
            return Err(fail(SqccStatus::InvalidArgument, "need 1 <= v_min < v_max and grid_points >= 3"));
        }
        s.search = VSearch { v_min, v_max, grid_points: grid_points as usize, ..s.search };
        Ok(())
    })
}

/// Smallest displacement meeting the per-quadrature bit-error target `qos`.
#[no_mangle]
pub extern "C" fn sqcc_required_displacement(
    scenario: *const SqccScenario,
    modulation_variance: f64,
    qos: f64,
    out: *mut f64,
) -> SqccStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let out = deref_mut(out, "out")?;
        *out = core(required_displacement(modulation_variance, &s.channel, qos))?;
        Ok(())
    })
}

/// Asymptotic rate at a fixed variance and displacement.
#[no_mangle]
pub extern "C" fn sqcc_asymptotic_rate(
    scenario: *const SqccScenario,
    modulation_variance: f64,
    displacement: f64,
    out: *mut SqccRate,
) -> SqccStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let out = deref_mut(out, "out")?;
        let proto = core(ProtocolParams::new(modulation_variance, displacement, s.beta))?;
        let r = core(asymptotic_rate_with(&proto, &s.channel, s.strategy, RateOptions { mi_double: s.mi_double }))?;
        *out = rate_struct(&r);
        Ok(())
    })
}

/// Finite-size rate at a fixed variance and displacement, block size from the scenario.
#[no_mangle]
pub extern "C" fn sqcc_finite_rate(
    scenario: *const SqccScenario,
    modulation_variance: f64,
    displacement: f64,
    out: *mut SqccFiniteRate,
) -> SqccStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let out = deref_mut(out, "out")?;
        let proto = core(ProtocolParams::new(modulation_variance, displacement, s.beta))?;
        let (f, a) = core(finite_rate(&proto, &s.channel, s.strategy, &s.security))?;
        *out = SqccFiniteRate {
            asymptotic: rate_struct(&a),
            block_size: f.block_size,
            delta_aep: f.deltas.aep,
            delta_ent: f.deltas.ent,
            delta_smooth: f.deltas.smooth,
            delta_hash: f.deltas.hash,
            sigma_a_max: f.worst_case.sigma_a_max,
            sigma_b_max: f.worst_case.sigma_b_max,
            sigma_c_min: f.worst_case.sigma_c_min,
            holevo_pe: f.holevo,
            rate_pe: f.k_pe_inf,
            rate: f.rate,
            key_length: f.key_length,
            epsilon_total: f.epsilon_total,
        };
        Ok(())
    })
}

/// Maximise the rate over the modulation variance with the displacement
/// tied to `qos`; finite-size when `finite` is true.
#[no_mangle]
pub extern "C" fn sqcc_optimise(
    scenario: *const SqccScenario,
    qos: f64,
    finite: bool,
    out: *mut SqccOptimum,
) -> SqccStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let out = deref_mut(out, "out")?;
        let o = if finite {
            core(optimise_v_finite(&s.channel, qos, s.beta, s.strategy, &s.security, &s.search))?
        } else {
            let opts = RateOptions { mi_double: s.mi_double };
            core(optimise_v_with(&s.channel, qos, s.beta, Model::Sqcc(s.strategy), opts, &s.search))?
        };
        *out = optimum_struct(&o);
        Ok(())
    })
}

/// Sample `n_shots` joint heterodyne outcomes with uniformly drawn symbols.
#[no_mangle]
pub extern "C" fn sqcc_batch_sample(
    scenario: *const SqccScenario,
    modulation_variance: f64,
    displacement: f64,
    n_shots: u64,
    seed: u64,
    out: *mut *mut SqccBatch,
) -> SqccStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let out = deref_mut(out, "out")?;
        let proto = core(ProtocolParams::new(modulation_variance, displacement, s.beta))?;
        let n = usize::try_from(n_shots).map_err(|_| fail(SqccStatus::InvalidArgument, "n_shots too large"))?;
        let batch = core(sample_joint(&proto, &s.channel, SymbolSchedule::Uniform, n, seed))?;
        *out = Box::into_raw(Box::new(SqccBatch { batch, proto, channel: s.channel }));
        Ok(())
    })
}

/// New batch after quadrant decision and re-displacement by the analytic centroid.
#[no_mangle]
pub extern "C" fn sqcc_batch_postprocess(batch: *const SqccBatch, out: *mut *mut SqccBatch) -> SqccStatus {
    guard(|| {
        let b = deref(batch, "batch")?;
        let out = deref_mut(out, "out")?;
        let post = core(discriminate_and_redisplace(&b.batch, &b.proto, &b.channel))?;
        *out = Box::into_raw(Box::new(SqccBatch { batch: post, proto: b.proto, channel: b.channel }));
        Ok(())
    })
}

/// Number of shots, 0 for null.
#[no_mangle]
pub extern "C" fn sqcc_batch_len(batch: *const SqccBatch) -> u64 {
    // SAFETY: null or a pointer from this library
    unsafe { batch.as_ref() }.map_or(0, |b| b.batch.n_shots as u64)
}

#[no_mangle]
pub extern "C" fn sqcc_batch_shot(batch: *const SqccBatch, index: u64, out: *mut SqccShot) -> SqccStatus {
    guard(|| {
        let b = &deref(batch, "batch")?.batch;
        let out = deref_mut(out, "out")?;
        let i = usize::try_from(index)
            .ok()
            .filter(|&i| i < b.n_shots)
            .ok_or_else(|| fail(SqccStatus::InvalidArgument, &format!("index {index} out of range")))?;
        *out = SqccShot {
            alice_q: b.alice[i][0],
            alice_p: b.alice[i][1],
            bob_q: b.bob[i][0],
            bob_p: b.bob[i][1],
            true_symbol: b.true_symbols[i].index(),
            decided_symbol: b.decided_symbols[i].index(),
        };
        Ok(())
    })
}

/// Second moments folded onto symbol 1, with standard errors.
#[no_mangle]
pub extern "C" fn sqcc_batch_moments(batch: *const SqccBatch, out: *mut SqccMoments) -> SqccStatus {
    guard(|| {
        let b = deref(batch, "batch")?;
        let out = deref_mut(out, "out")?;
        let m = core(empirical_moments(&b.batch))?;
        *out = SqccMoments {
            n_shots: m.n_shots as u64,
            a: m.a_hat,
            b: m.b_hat,
            c: m.c_hat,
            a_se: m.se.a,
            b_se: m.se.b,
            c_se: m.se.c,
            bit_error_rate: m.e_c_hat,
            bit_error_rate_se: m.se.e_c,
            symbol_error_rate: m.symbol_error_rate,
        };
        Ok(())
    })
}

/// Releases a batch. Null is ignored.
#[no_mangle]
pub extern "C" fn sqcc_batch_free(batch: *mut SqccBatch) {
    if !batch.is_null() {
        // SAFETY: non-null pointers come from this library's batch constructors
        drop(unsafe { Box::from_raw(batch) });
    }
}

/// Quadrant decision for one outcome, as a symbol index 1-4.
#[no_mangle]
pub extern "C" fn sqcc_decide_symbol(q: f64, p: f64) -> u8 {
    QpskSymbol::decide(q, p).index()
}

#[doc(hidden)]
pub fn last_error() -> String {
    // SAFETY: the pointer refers to the thread-local buffer, alive for this call
    unsafe { CStr::from_ptr(sqcc_last_error_message()) }.to_string_lossy().into_owned()
}
