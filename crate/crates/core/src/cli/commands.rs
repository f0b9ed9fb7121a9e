//! Subcommand bodies. Each returns its rows in deterministic input order;
//! rows whose evaluation fails carry `status = failed` and the error.

use super::args::{ChannelSettings, FiniteSettings, McSettings, RateSettings, SignalSettings, UsageError};
use super::output::{Row, Value};
use crate::channel::{transmissivity_to_db, ChannelParams, ProtocolParams};
use crate::finitekey::{finite_rate, optimise_v_finite, FiniteKeyResult, SecurityParams};
use crate::keyrate::{
    asymptotic_rate_with, baseline_rate_with, heterodyne_rate, optimise_v_with, rate_at_qos, KeyRateResult, Model,
    Optimum, RateOptions, VSearch,
};
use crate::mc::{
    discriminate_and_redisplace, empirical_moments, estimation_pipeline, sample_joint, streaming_moments,
    EmpiricalMoments, EstimationConfig, EstimationOutcome, SymbolSchedule, RNG_ALGORITHM,
};
use crate::optimize::maximise_log;
use crate::sqcc::{postprocess_stats, renormalise, required_displacement, Strategy};
use crate::{Error, Result};
use rayon::prelude::*;
use std::path::Path;

/// Above this many shots `simulate` switches to streaming moments and skips
/// the stored-batch estimation pipeline.
pub const STORED_BATCH_LIMIT: usize = 10_000_000;

/// Agreement threshold for `validate-fig2`, in standard errors.
pub const VALIDATION_SIGMAS: f64 = 5.0;

#[derive(Debug)]
pub enum CommandError {
    Usage(UsageError),
    Hard(Error),
    Io(std::io::Error),
}

impl From<UsageError> for CommandError {
    fn from(e: UsageError) -> Self {
        CommandError::Usage(e)
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        CommandError::Hard(e)
    }
}

impl From<std::io::Error> for CommandError {
    fn from(e: std::io::Error) -> Self {
        CommandError::Io(e)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub rows: Vec<Row>,
    pub failed: usize,
}

impl Report {
    fn from_rows(rows: Vec<Row>) -> Self {
        let failed = rows
            .iter()
            .filter(|r| r.get("status") == Some(&Value::Text("failed".into())))
            .count();
        Report { rows, failed }
    }
}

/// How the displacement of a point is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Drive {
    Qos(f64),
    Fixed(f64),
}

impl Drive {
    fn list(sig: &SignalSettings) -> Vec<Drive> {
        match &sig.displacements {
            Some(ds) => ds.iter().map(|&d| Drive::Fixed(d)).collect(),
            None => sig.qos.iter().map(|&w| Drive::Qos(w)).collect(),
        }
    }

    fn displacement(self, v: f64, chan: &ChannelParams) -> Result<f64> {
        match self {
            Drive::Qos(w) => required_displacement(v, chan, w),
            Drive::Fixed(d) => Ok(d),
        }
    }

    fn qos(self) -> Option<f64> {
        match self {
            Drive::Qos(w) => Some(w),
            Drive::Fixed(_) => None,
        }
    }
}

fn channel_at(ch: &ChannelSettings, t: f64) -> Result<ChannelParams> {
    ChannelParams::with_phase_noise(t, ch.eps, ch.sigma)
}

fn echo_channel(row: &mut Row, ch: &ChannelSettings, t: f64) {
    row.push("T", t)
        .push("loss_dB", transmissivity_to_db(t))
        .push("eps", ch.eps)
        .push("sigma", ch.sigma);
}

fn echo_rate(row: &mut Row, rate: &RateSettings, model: Model) {
    row.push("beta", rate.beta)
        .push("model", model.name())
        .push("mi_double", rate.mi_double);
}

fn echo_search(row: &mut Row, search: &VSearch) {
    row.push("v_min", search.v_min)
        .push("v_max", search.v_max)
        .push("grid_points", search.grid_points);
}

fn echo_security(row: &mut Row, sec: &SecurityParams) {
    row.push("N", sec.block_size)
        .push("pf", sec.frame_success)
        .push("drx", sec.discretisation_bits as u64)
        .push("eps_pe", sec.eps_pe)
        .push("eps_s", sec.eps_smooth)
        .push("eps_h", sec.eps_hash)
        .push("eps_ent", sec.eps_ent)
        .push("eps_qrng", sec.eps_qrng)
        .push("eps_ir", sec.eps_ir)
        .push("eps_cal", sec.eps_cal);
}

fn optimum_columns(row: &mut Row, opt: Option<&Optimum>) {
    row.push("v_star", opt.and_then(|o| o.v_star))
        .push("k_star", opt.map(|o| o.k_star))
        .push("evaluations", opt.map(|o| o.evaluations));
}

/// Per-point analytic columns shared by every rate command.
fn rate_columns(row: &mut Row, r: Option<&KeyRateResult>) {
    let s = r.map(|r| &r.stats);
    let st = r.map(|r| &r.state);
    row.push("V", r.map(|r| r.modulation_variance))
        .push("d", r.map(|r| r.displacement))
        .push("snr", s.map(|s| s.snr))
        .push("e_C", s.map(|s| s.e_c))
        .push("delta", s.map(|s| s.delta))
        .push("a_d", s.map(|s| s.a_d))
        .push("b_d", s.map(|s| s.b_d))
        .push("c_d", s.map(|s| s.c_d))
        .push("delta_v", r.map(|r| r.delta_v))
        .push("a_prime", st.map(|s| s.a))
        .push("b_prime", st.map(|s| s.b))
        .push("c_prime", st.map(|s| s.c))
        .push("I_AB", r.map(|r| r.mutual_information))
        .push("chi_EB", r.map(|r| r.holevo))
        .push("K", r.map(|r| r.rate))
        .push("feasible", r.map(|r| r.feasible));
}

fn finite_columns(row: &mut Row, f: Option<&FiniteKeyResult>) {
    let wc = f.map(|f| &f.worst_case);
    row.push("delta_aep", f.map(|f| f.deltas.aep))
        .push("delta_ent", f.map(|f| f.deltas.ent))
        .push("delta_smooth", f.map(|f| f.deltas.smooth))
        .push("delta_hash", f.map(|f| f.deltas.hash))
        .push("sigma_a_max", wc.map(|w| w.sigma_a_max))
        .push("sigma_b_max", wc.map(|w| w.sigma_b_max))
        .push("sigma_c_min", wc.map(|w| w.sigma_c_min))
        .push("chi_EB_PE", f.map(|f| f.holevo))
        .push("K_PE", f.map(|f| f.k_pe_inf))
        .push("K_F", f.map(|f| f.rate))
        .push("ell", f.map(|f| f.key_length))
        .push("epsilon_total", f.map(|f| f.epsilon_total));
}

fn status(row: &mut Row, outcome: &Result<()>) {
    match outcome {
        Ok(()) => row.push("status", "ok").push("error_kind", "").push("error_message", ""),
        Err(e) => row.push("status", "failed").push("error_kind", e.kind()).push("error_message", e.to_string()),
    };
}

fn evaluate(model: Model, v: f64, drive: Drive, chan: &ChannelParams, rate: &RateSettings) -> Result<KeyRateResult> {
    let opts = RateOptions { mi_double: rate.mi_double };
    match drive {
        Drive::Qos(w) => rate_at_qos(v, chan, w, rate.beta, model, opts),
        Drive::Fixed(d) => {
            let proto = ProtocolParams::new(v, d, rate.beta)?;
            match model {
                Model::Sqcc(s) => asymptotic_rate_with(&proto, chan, s, opts),
                Model::Baseline => baseline_rate_with(&proto, chan, opts),
            }
        }
    }
}

/// Plain heterodyne GMCS rate maximised over `V`.
fn optimise_heterodyne(chan: &ChannelParams, beta: f64, search: &VSearch) -> Result<Optimum> {
    let m = maximise_log(&search.as_log_search(), |v| {
        heterodyne_rate(v, chan, beta).ok().filter(|r| r.feasible).map(|r| r.rate)
    })?;
    Ok(Optimum::from_maximum(m))
}

/// One asymptotic row: optimised over `V` unless fixed variances were given.
fn asymptotic_row(
    ch: &ChannelSettings,
    t: f64,
    drive: Drive,
    fixed_v: Option<f64>,
    model: Option<Model>,
    rate: &RateSettings,
) -> Row {
    let mut row = Row::new();
    echo_channel(&mut row, ch, t);
    row.push("W", drive.qos());
    let label = model.map_or("heterodyne", Model::name);
    row.push("beta", rate.beta).push("model", label).push("mi_double", rate.mi_double);
    echo_search(&mut row, &rate.search);
    row.push("V_fixed", fixed_v);
    let mut opt = None;
    let mut result = None;
    let outcome = (|| -> Result<()> {
        let chan = channel_at(ch, t)?;
        let v = match fixed_v {
            Some(v) => Some(v),
            None => {
                let o = match (model, drive) {
                    (None, _) => optimise_heterodyne(&chan, rate.beta, &rate.search)?,
                    (Some(m), Drive::Qos(w)) => {
                        optimise_v_with(&chan, w, rate.beta, m, RateOptions { mi_double: rate.mi_double }, &rate.search)?
                    }
                    (Some(_), Drive::Fixed(_)) => unreachable!("fixed d requires fixed V"),
                };
                opt = Some(o);
                o.v_best
            }
        };
        if let Some(v) = v {
            result = Some(match model {
                None => heterodyne_rate(v, &chan, rate.beta)?,
                Some(m) => evaluate(m, v, drive, &chan, rate)?,
            });
        }
        Ok(())
    })();
    optimum_columns(&mut row, opt.as_ref());
    rate_columns(&mut row, result.as_ref());
    status(&mut row, &outcome);
    row
}

fn variance_choices(sig: &SignalSettings) -> Vec<Option<f64>> {
    match &sig.variances {
        Some(vs) => vs.iter().copied().map(Some).collect(),
        None => vec![None],
    }
}

fn require_v_with_d(sig: &SignalSettings) -> std::result::Result<(), UsageError> {
    if sig.displacements.is_some() && sig.variances.is_none() {
        return Err(UsageError("--d fixes the displacement, so --V must be given as well".into()));
    }
    Ok(())
}

pub fn sweep_asymptotic(ch: &ChannelSettings, sig: &SignalSettings, rate: &RateSettings) -> std::result::Result<Report, CommandError> {
    require_v_with_d(sig)?;
    let mut points = Vec::new();
    for &t in &ch.transmissivities {
        for drive in Drive::list(sig) {
            for v in variance_choices(sig) {
                points.push((t, drive, v));
            }
        }
    }
    let model = Some(Model::Sqcc(rate.strategy));
    let rows = points
        .par_iter()
        .map(|&(t, drive, v)| asymptotic_row(ch, t, drive, v, model, rate))
        .collect();
    Ok(Report::from_rows(rows))
}

fn finite_row(
    ch: &ChannelSettings,
    t: f64,
    drive: Drive,
    fixed_v: Option<f64>,
    rate: &RateSettings,
    sec: &SecurityParams,
) -> Row {
    let mut row = Row::new();
    echo_channel(&mut row, ch, t);
    row.push("W", drive.qos());
    echo_rate(&mut row, rate, Model::Sqcc(rate.strategy));
    echo_search(&mut row, &rate.search);
    echo_security(&mut row, sec);
    row.push("V_fixed", fixed_v);
    let mut opt = None;
    let mut result: Option<(FiniteKeyResult, KeyRateResult)> = None;
    let outcome = (|| -> Result<()> {
        let chan = channel_at(ch, t)?;
        let v = match (fixed_v, drive) {
            (Some(v), _) => Some(v),
            (None, Drive::Qos(w)) => {
                let o = optimise_v_finite(&chan, w, rate.beta, rate.strategy, sec, &rate.search)?;
                opt = Some(o);
                o.v_best
            }
            (None, Drive::Fixed(_)) => unreachable!("fixed d requires fixed V"),
        };
        if let Some(v) = v {
            let d = drive.displacement(v, &chan)?;
            let proto = ProtocolParams::new(v, d, rate.beta)?;
            let (fk, mut asym) = finite_rate(&proto, &chan, rate.strategy, sec)?;
            asym.qos = drive.qos();
            result = Some((fk, asym));
        }
        Ok(())
    })();
    optimum_columns(&mut row, opt.as_ref());
    rate_columns(&mut row, result.as_ref().map(|r| &r.1));
    finite_columns(&mut row, result.as_ref().map(|r| &r.0));
    status(&mut row, &outcome);
    row
}

fn finite_only(rate: &RateSettings) -> std::result::Result<(), UsageError> {
    if rate.mi_double {
        return Err(UsageError("--mi-double applies to asymptotic rates only".into()));
    }
    Ok(())
}

pub fn sweep_finite(
    ch: &ChannelSettings,
    sig: &SignalSettings,
    rate: &RateSettings,
    fin: &FiniteSettings,
) -> std::result::Result<Report, CommandError> {
    require_v_with_d(sig)?;
    finite_only(rate)?;
    let sizes = fin.block_sizes.clone().unwrap_or_else(|| vec![fin.security.block_size]);
    let mut points = Vec::new();
    for &t in &ch.transmissivities {
        for drive in Drive::list(sig) {
            for v in variance_choices(sig) {
                for &n in &sizes {
                    points.push((t, drive, v, SecurityParams { block_size: n, ..fin.security }));
                }
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|(t, drive, v, sec)| finite_row(ch, *t, *drive, *v, rate, sec))
        .collect();
    Ok(Report::from_rows(rows))
}

/// Asymptotic optimum per (T, W), or finite-size optimum per (T, W, N) when
/// block sizes were requested.
pub fn optimize(
    ch: &ChannelSettings,
    sig: &SignalSettings,
    rate: &RateSettings,
    fin: &FiniteSettings,
) -> std::result::Result<Report, CommandError> {
    if sig.variances.is_some() || sig.displacements.is_some() {
        return Err(UsageError("optimize searches V itself; drop --V and --d".into()).into());
    }
    let mut rows = Vec::new();
    match &fin.block_sizes {
        None => {
            let points: Vec<_> = ch
                .transmissivities
                .iter()
                .flat_map(|&t| sig.qos.iter().map(move |&w| (t, w)))
                .collect();
            let model = Some(Model::Sqcc(rate.strategy));
            rows = points
                .par_iter()
                .map(|&(t, w)| asymptotic_row(ch, t, Drive::Qos(w), None, model, rate))
                .collect();
        }
        Some(sizes) => {
            finite_only(rate)?;
            let mut points = Vec::new();
            for &t in &ch.transmissivities {
                for &w in &sig.qos {
                    for &n in sizes {
                        points.push((t, w, SecurityParams { block_size: n, ..fin.security }));
                    }
                }
            }
            rows.par_extend(
                points
                    .par_iter()
                    .map(|(t, w, sec)| finite_row(ch, *t, Drive::Qos(*w), None, rate, sec)),
            );
        }
    }
    Ok(Report::from_rows(rows))
}

/// Optimised rates of both renormalisations, the baseline model and plain
/// heterodyne, one row per model.
pub fn compare_baseline(ch: &ChannelSettings, sig: &SignalSettings, rate: &RateSettings) -> std::result::Result<Report, CommandError> {
    require_v_with_d(sig)?;
    let models = [
        Some(Model::Sqcc(Strategy::BPreserving)),
        Some(Model::Sqcc(Strategy::CPreserving)),
        Some(Model::Baseline),
        None,
    ];
    let mut points = Vec::new();
    for &t in &ch.transmissivities {
        for drive in Drive::list(sig) {
            for v in variance_choices(sig) {
                for m in models {
                    points.push((t, drive, v, m));
                }
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(t, drive, v, m)| asymptotic_row(ch, t, drive, v, m, rate))
        .collect();
    Ok(Report::from_rows(rows))
}

fn moment_columns(row: &mut Row, m: Option<&EmpiricalMoments>) {
    let se = m.map(|m| &m.se);
    row.push("a_hat", m.map(|m| m.a_hat))
        .push("a_hat_se", se.map(|s| s.a))
        .push("b_hat", m.map(|m| m.b_hat))
        .push("b_hat_se", se.map(|s| s.b))
        .push("c_hat", m.map(|m| m.c_hat))
        .push("c_hat_se", se.map(|s| s.c))
        .push("mean_hat", m.map(|m| m.mean_hat[2]))
        .push("mean_hat_se", se.map(|s| s.mean[2]))
        .push("e_C_hat", m.map(|m| m.e_c_hat))
        .push("e_C_hat_se", se.map(|s| s.e_c))
        .push("symbol_error_rate", m.map(|m| m.symbol_error_rate))
        .push("symbol_error_rate_se", se.map(|s| s.symbol_error));
}

fn estimate_columns(row: &mut Row, est: Option<&EstimationOutcome>, rescaled: Option<&EmpiricalMoments>) {
    let e = est.map(|o| &o.estimate);
    let se = est.map(|o| &o.se);
    row.push("disclosed_bits", e.map(|e| e.disclosed_bits))
        .push("disclosed_errors", e.map(|e| e.disclosed_errors))
        .push("peak_hat", e.map(|e| e.peak_hat))
        .push("peak_hat_se", se.map(|s| s.peak))
        .push("e_C_point", e.map(|e| e.e_c_point))
        .push("e_C_point_se", se.map(|s| s.e_c_point))
        .push("e_C_bound", e.map(|e| e.e_c_bound))
        .push("snr_point", e.map(|e| e.snr_point))
        .push("snr_point_se", se.map(|s| s.snr_point))
        .push("snr_hat", e.map(|e| e.snr_hat))
        .push("snr_hat_se", se.map(|s| s.snr_hat))
        .push("b_base_hat", e.map(|e| e.b_hat))
        .push("b_base_hat_se", se.map(|s| s.b_hat))
        .push("delta_v_hat", e.map(|e| e.delta_v_hat))
        .push("delta_v_hat_se", se.map(|s| s.delta_v_hat))
        .push("a_prime_hat", rescaled.map(|m| m.a_hat))
        .push("a_prime_hat_se", rescaled.map(|m| m.se.a))
        .push("b_prime_hat", rescaled.map(|m| m.b_hat))
        .push("b_prime_hat_se", rescaled.map(|m| m.se.b))
        .push("c_prime_hat", rescaled.map(|m| m.c_hat))
        .push("c_prime_hat_se", rescaled.map(|m| m.se.c));
}

fn echo_mc(row: &mut Row, mc: &McSettings, seed: u64) {
    let schedule = match mc.schedule {
        SymbolSchedule::Uniform => "uniform".to_string(),
        SymbolSchedule::Fixed(s) => s.index().to_string(),
    };
    row.push("n", mc.n)
        .push("seed", seed)
        .push("rng", RNG_ALGORITHM)
        .push("schedule", schedule)
        .push("disclose", mc.disclose);
}

fn simulate_row(
    ch: &ChannelSettings,
    t: f64,
    v: f64,
    drive: Drive,
    rate: &RateSettings,
    mc: &McSettings,
    seed: u64,
    shots: Option<&Path>,
) -> std::result::Result<Row, CommandError> {
    let mut row = Row::new();
    echo_channel(&mut row, ch, t);
    row.push("W", drive.qos());
    echo_rate(&mut row, rate, Model::Sqcc(rate.strategy));
    echo_mc(&mut row, mc, seed);
    let mut analytic = None;
    let mut raw = None;
    let mut est = None;
    let mut rescaled = None;
    let mut io_error = None;
    let outcome = (|| -> Result<()> {
        let chan = channel_at(ch, t)?;
        let d = drive.displacement(v, &chan)?;
        let proto = ProtocolParams::new(v, d, rate.beta)?;
        analytic = Some(evaluate(Model::Sqcc(rate.strategy), v, Drive::Fixed(d), &chan, rate).map(|mut r| {
            r.qos = drive.qos();
            r
        })?);
        if mc.n > STORED_BATCH_LIMIT {
            raw = Some(streaming_moments(&proto, &chan, mc.schedule, mc.n, seed, true)?);
            return Ok(());
        }
        let batch = sample_joint(&proto, &chan, mc.schedule, mc.n, seed)?;
        if let Some(path) = shots {
            let written = std::fs::File::create(path)
                .map_err(|e| e.to_string())
                .and_then(|f| batch.write_csv(std::io::BufWriter::new(f)).map_err(|e| e.to_string()));
            if let Err(e) = written {
                io_error = Some(std::io::Error::other(format!("{}: {e}", path.display())));
                return Ok(());
            }
        }
        raw = Some(empirical_moments(&discriminate_and_redisplace(&batch, &proto, &chan)?)?);
        let cfg = EstimationConfig {
            disclose_fraction: mc.disclose,
            strategy: rate.strategy,
            ..EstimationConfig::default()
        };
        let o = estimation_pipeline(&batch, &cfg)?;
        rescaled = Some(empirical_moments(&o.rescaled)?);
        est = Some(o);
        Ok(())
    })();
    if let Some(e) = io_error {
        return Err(CommandError::Io(e));
    }
    rate_columns(&mut row, analytic.as_ref());
    moment_columns(&mut row, raw.as_ref());
    estimate_columns(&mut row, est.as_ref(), rescaled.as_ref());
    status(&mut row, &outcome);
    Ok(row)
}

/// Monte Carlo points over T × V × (W or d). Point `i` uses seed `seed + i`;
/// `--shots` exports the raw shots of the first point.
pub fn simulate(
    ch: &ChannelSettings,
    sig: &SignalSettings,
    rate: &RateSettings,
    mc: &McSettings,
) -> std::result::Result<Report, CommandError> {
    let variances = sig.variances.clone().unwrap_or_else(|| vec![5.0]);
    let mut points = Vec::new();
    for &t in &ch.transmissivities {
        for &v in &variances {
            for drive in Drive::list(sig) {
                points.push((t, v, drive));
            }
        }
    }
    if mc.shots.is_some() && mc.n > STORED_BATCH_LIMIT {
        return Err(UsageError(format!("--shots needs --n <= {STORED_BATCH_LIMIT}")).into());
    }
    let rows: Vec<std::result::Result<Row, CommandError>> = points
        .par_iter()
        .enumerate()
        .map(|(i, &(t, v, drive))| {
            let shots = if i == 0 { mc.shots.as_deref() } else { None };
            simulate_row(ch, t, v, drive, rate, mc, mc.seed.wrapping_add(i as u64), shots)
        })
        .collect();
    Ok(Report::from_rows(rows.into_iter().collect::<std::result::Result<_, _>>()?))
}

fn check(row: &mut Row, name: &'static str, z_name: &'static str, analytic: f64, empirical: f64, se: f64) -> bool {
    let z = (empirical - analytic) / se;
    let pass = z.abs() <= VALIDATION_SIGMAS;
    row.push(name, analytic).push(z_name, z);
    pass
}

/// Empirical against analytic postprocessed moments over displacements,
/// with a pass flag per moment at five standard errors.
pub fn validate_fig2(ch: &ChannelSettings, sig: &SignalSettings, mc: &McSettings) -> std::result::Result<Report, CommandError> {
    if ch.transmissivities.len() != 1 {
        return Err(UsageError("validate-fig2 takes a single transmissivity".into()).into());
    }
    let t = ch.transmissivities[0];
    let v = match sig.variances.as_deref() {
        Some([v]) => *v,
        None => 5.0,
        Some(_) => return Err(UsageError("validate-fig2 takes a single --V".into()).into()),
    };
    let ds = sig.displacements.clone().unwrap_or_default();
    let rows = ds
        .par_iter()
        .enumerate()
        .map(|(i, &d)| {
            let seed = mc.seed.wrapping_add(i as u64);
            let mut row = Row::new();
            echo_channel(&mut row, ch, t);
            row.push("V", v).push("d", d);
            echo_mc(&mut row, mc, seed);
            let mut cols = Row::new();
            let outcome = (|| -> Result<()> {
                let chan = channel_at(ch, t)?;
                let proto = ProtocolParams::new(v, d, 1.0)?;
                let stats = postprocess_stats(&proto, &chan)?;
                let b_prime = renormalise(&stats, &crate::channel::shared_state(&proto, &chan, 1)?, Strategy::BPreserving)?;
                let m = streaming_moments(&proto, &chan, mc.schedule, mc.n, seed, true)?;
                cols.push("snr", stats.snr);
                let pa = check(&mut cols, "a_d", "a_z", stats.a_d, m.a_hat, m.se.a);
                cols.push("a_hat", m.a_hat).push("a_hat_se", m.se.a).push("a_pass", pa);
                let pb = check(&mut cols, "b_d", "b_z", stats.b_d, m.b_hat, m.se.b);
                cols.push("b_hat", m.b_hat).push("b_hat_se", m.se.b).push("b_pass", pb);
                let pc = check(&mut cols, "c_d", "c_z", stats.c_d, m.c_hat, m.se.c);
                cols.push("c_hat", m.c_hat).push("c_hat_se", m.se.c).push("c_pass", pc);
                let pe = check(&mut cols, "e_C", "e_C_z", stats.e_c, m.e_c_hat, m.se.e_c.max(f64::MIN_POSITIVE));
                cols.push("e_C_hat", m.e_c_hat).push("e_C_hat_se", m.se.e_c).push("e_C_pass", pe);
                cols.push("mean_d", stats.mean_d[2])
                    .push("mean_hat", m.mean_hat[2])
                    .push("mean_hat_se", m.se.mean[2])
                    .push("delta_v_b_preserving", b_prime.delta_v)
                    .push("c_prime_b_preserving", b_prime.state_prime.c)
                    .push("pass", pa && pb && pc && pe);
                Ok(())
            })();
            if outcome.is_err() {
                cols = Row::new();
            }
            row.extend(cols);
            status(&mut row, &outcome);
            row
        })
        .collect();
    Ok(Report::from_rows(rows))
}
