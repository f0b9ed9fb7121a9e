//! Command-line flags, the optional TOML config file and their merge.
//!
//! Every flag has a config-file key of the same name with `-` replaced by
//! `_` (`--T-grid` becomes `T_grid`). A flag given on the command line wins
//! over the file, and the file wins over the built-in default.

use super::output::Format;
use crate::channel::QpskSymbol;
use crate::finitekey::SecurityParams;
use crate::keyrate::VSearch;
use crate::mc::SymbolSchedule;
use crate::optimize::log_grid;
use crate::sqcc::Strategy;
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "SQCC_OUTPUT_DIR";

const KNOWN_KEYS: &[&str] = &[
    "T", "T_grid", "dB", "dB_grid", "eps", "sigma", "phase_noise", "W", "V", "d", "beta", "strategy", "mi_double",
    "v_min", "v_max", "grid_points", "N", "pf", "drx", "eps_pe", "eps_s", "eps_h", "eps_ent", "eps_qrng", "eps_ir",
    "eps_cal", "n", "seed", "disclose", "schedule", "shots", "out", "format",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

type Usage<T> = std::result::Result<T, UsageError>;

fn usage<T>(msg: impl Into<String>) -> Usage<T> {
    Err(UsageError(msg.into()))
}

#[derive(Debug, Parser)]
#[command(name = "sqcc", version, about = "Secret-key rates and Monte Carlo checks for QPSK-multiplexed CV-QKD")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Flat TOML file with default values for any flag.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file. Defaults to `$SQCC_OUTPUT_DIR/<command>.<format>` when the
    /// variable is set, standard output otherwise.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_parser = ["csv", "json"])]
    pub format: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimised asymptotic rate over a grid of transmissivities and QoS targets.
    SweepAsymptotic {
        #[command(flatten)]
        channel: ChannelOpts,
        #[command(flatten)]
        signal: SignalOpts,
        #[command(flatten)]
        rate: RateOpts,
    },
    /// Optimised finite-size rate over transmissivities, QoS targets and block sizes.
    SweepFinite {
        #[command(flatten)]
        channel: ChannelOpts,
        #[command(flatten)]
        signal: SignalOpts,
        #[command(flatten)]
        rate: RateOpts,
        #[command(flatten)]
        finite: FiniteOpts,
    },
    /// Optimal modulation variance; finite-size when --N is given.
    Optimize {
        #[command(flatten)]
        channel: ChannelOpts,
        #[command(flatten)]
        signal: SignalOpts,
        #[command(flatten)]
        rate: RateOpts,
        #[command(flatten)]
        finite: FiniteOpts,
    },
    /// Monte Carlo of the receiver chain with analytic comparison columns.
    Simulate {
        #[command(flatten)]
        channel: ChannelOpts,
        #[command(flatten)]
        signal: SignalOpts,
        #[command(flatten)]
        rate: RateOpts,
        #[command(flatten)]
        mc: McOpts,
    },
    /// Empirical versus analytic postprocessed moments over a displacement grid.
    #[command(name = "validate-fig2")]
    ValidateFig2 {
        #[command(flatten)]
        channel: ChannelOpts,
        #[command(flatten)]
        signal: SignalOpts,
        #[command(flatten)]
        mc: McOpts,
    },
    /// Optimised rates of both renormalisations, the baseline model and plain heterodyne.
    CompareBaseline {
        #[command(flatten)]
        channel: ChannelOpts,
        #[command(flatten)]
        signal: SignalOpts,
        #[command(flatten)]
        rate: RateOpts,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SweepAsymptotic { .. } => "sweep-asymptotic",
            Command::SweepFinite { .. } => "sweep-finite",
            Command::Optimize { .. } => "optimize",
            Command::Simulate { .. } => "simulate",
            Command::ValidateFig2 { .. } => "validate-fig2",
            Command::CompareBaseline { .. } => "compare-baseline",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ChannelOpts {
    /// Transmissivities, comma separated.
    #[arg(long = "T", value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pub t: Option<Vec<f64>>,
    /// Transmissivity grid `log:lo:hi:n` or `lin:lo:hi:n`.
    #[arg(long = "T-grid", value_name = "GRID")]
    pub t_grid: Option<String>,
    /// Channel losses in dB, comma separated.
    #[arg(long = "dB", value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pub db: Option<Vec<f64>>,
    /// Loss grid in dB, same syntax as --T-grid.
    #[arg(long = "dB-grid", value_name = "GRID")]
    pub db_grid: Option<String>,
    /// Excess noise in shot-noise units.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Phase-noise factor (extra excess noise per unit received power).
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Use the preset phase-noise factor 1e-4.
    #[arg(long)]
    pub phase_noise: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SignalOpts {
    /// Classical bit-error-rate targets, comma separated.
    #[arg(long = "W", value_delimiter = ',', num_args = 1..)]
    pub w: Option<Vec<f64>>,
    /// Fixed modulation variances instead of optimising.
    #[arg(long = "V", value_delimiter = ',', num_args = 1..)]
    pub v: Option<Vec<f64>>,
    /// Fixed displacements instead of deriving them from --W.
    #[arg(long = "d", value_delimiter = ',', num_args = 1..)]
    pub d: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RateOpts {
    /// Reconciliation efficiency.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Renormalisation: b-preserving or c-preserving.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Count mutual information once per quadrature.
    #[arg(long)]
    pub mi_double: bool,
    #[arg(long)]
    pub v_min: Option<f64>,
    #[arg(long)]
    pub v_max: Option<f64>,
    /// Points in the coarse log-spaced V scan.
    #[arg(long)]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FiniteOpts {
    /// Block sizes, comma separated (scientific notation accepted).
    #[arg(long = "N", value_delimiter = ',', num_args = 1.., value_parser = parse_count)]
    pub n: Option<Vec<u64>>,
    /// Frame success probability.
    #[arg(long)]
    pub pf: Option<f64>,
    /// Discretisation bits.
    #[arg(long)]
    pub drx: Option<u32>,
    #[arg(long)]
    pub eps_pe: Option<f64>,
    #[arg(long)]
    pub eps_s: Option<f64>,
    #[arg(long)]
    pub eps_h: Option<f64>,
    #[arg(long)]
    pub eps_ent: Option<f64>,
    #[arg(long)]
    pub eps_qrng: Option<f64>,
    #[arg(long)]
    pub eps_ir: Option<f64>,
    #[arg(long)]
    pub eps_cal: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct McOpts {
    /// Shots per simulated point (scientific notation accepted).
    #[arg(long, value_parser = parse_count)]
    pub n: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fraction of shots whose symbols are disclosed for error-rate estimation.
    #[arg(long)]
    pub disclose: Option<f64>,
    /// `uniform` or a fixed symbol index 1-4.
    #[arg(long)]
    pub schedule: Option<String>,
    /// Also write the individual shots of the first simulated point here.
    #[arg(long, value_name = "PATH")]
    pub shots: Option<PathBuf>,
}

/// Accepts integers written as `100000` or `1e5`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("{s:?} is not a non-negative integer")),
    }
}

/// `log:lo:hi:n` or `lin:lo:hi:n`.
pub fn parse_grid(spec: &str) -> Usage<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || UsageError(format!("bad grid {spec:?}, expected log:lo:hi:n or lin:lo:hi:n"));
    if parts.len() != 4 {
        return Err(bad());
    }
    let lo: f64 = parts[1].parse().map_err(|_| bad())?;
    let hi: f64 = parts[2].parse().map_err(|_| bad())?;
    let n: usize = parts[3].parse().map_err(|_| bad())?;
    if n == 0 || !(hi >= lo) {
        return Err(bad());
    }
    match parts[0] {
        "log" => log_grid(lo, hi, n).map_err(|e| UsageError(e.to_string())),
        "lin" => Ok(if n == 1 {
            vec![lo]
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }),
        _ => Err(bad()),
    }
}

/// Parsed config file.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    table: toml::Table,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Usage<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Usage<Self> {
        let table: toml::Table = text.parse().map_err(|e| UsageError(format!("config: {e}")))?;
        for key in table.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return usage(format!("config: unknown key {key:?}"));
            }
        }
        Ok(ConfigFile { table })
    }

    fn f64(&self, key: &str) -> Usage<Option<f64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(v) => as_f64(v).map(Some).ok_or_else(|| UsageError(format!("config: {key} must be a number"))),
        }
    }

    fn f64_list(&self, key: &str) -> Usage<Option<Vec<f64>>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Array(items)) => items
                .iter()
                .map(|v| as_f64(v).ok_or_else(|| UsageError(format!("config: {key} must hold numbers"))))
                .collect::<Usage<Vec<_>>>()
                .map(Some),
            Some(v) => as_f64(v)
                .map(|x| Some(vec![x]))
                .ok_or_else(|| UsageError(format!("config: {key} must be a number or array"))),
        }
    }

    fn count(&self, key: &str) -> Usage<Option<u64>> {
        self.f64(key)?
            .map(|v| parse_count(&format!("{v}")).map_err(|e| UsageError(format!("config: {key}: {e}"))))
            .transpose()
    }

    fn count_list(&self, key: &str) -> Usage<Option<Vec<u64>>> {
        self.f64_list(key)?
            .map(|vs| {
                vs.into_iter()
                    .map(|v| parse_count(&format!("{v}")).map_err(|e| UsageError(format!("config: {key}: {e}"))))
                    .collect()
            })
            .transpose()
    }

    fn string(&self, key: &str) -> Usage<Option<String>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(v) if key == "schedule" => as_f64(v)
                .map(|x| Some(format!("{x}")))
                .ok_or_else(|| UsageError(format!("config: {key} must be a string"))),
            Some(_) => usage(format!("config: {key} must be a string")),
        }
    }

    fn bool(&self, key: &str) -> Usage<bool> {
        match self.table.get(key) {
            None => Ok(false),
            Some(toml::Value::Boolean(b)) => Ok(*b),
            Some(_) => usage(format!("config: {key} must be true or false")),
        }
    }

    pub fn out(&self) -> Usage<Option<PathBuf>> {
        Ok(self.string("out")?.map(PathBuf::from))
    }

    pub fn format(&self) -> Usage<Option<String>> {
        self.string("format")
    }
}

fn as_f64(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(f) => Some(*f),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

pub fn resolve_format(cli: Option<&str>, cfg: &ConfigFile) -> Usage<Format> {
    match cli.map(str::to_string).or(cfg.format()?).as_deref() {
        None | Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => usage(format!("unknown format {other:?}")),
    }
}

/// Channel settings after merging.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSettings {
    pub transmissivities: Vec<f64>,
    pub eps: f64,
    pub sigma: f64,
}

impl ChannelOpts {
    pub fn resolve(&self, cfg: &ConfigFile, default_t: &[f64], default_eps: f64) -> Usage<ChannelSettings> {
        let from_cli = transmissivity_spec(self.t.clone(), self.t_grid.as_deref(), self.db.clone(), self.db_grid.as_deref(), "")?;
        let transmissivities = match from_cli {
            Some(t) => t,
            None => {
                let t_grid = cfg.string("T_grid")?;
                let db_grid = cfg.string("dB_grid")?;
                transmissivity_spec(cfg.f64_list("T")?, t_grid.as_deref(), cfg.f64_list("dB")?, db_grid.as_deref(), "config: ")?
                    .unwrap_or_else(|| default_t.to_vec())
            }
        };
        if transmissivities.is_empty() {
            return usage("empty transmissivity list");
        }
        for &t in &transmissivities {
            if !(t > 0.0 && t <= 1.0) {
                return usage(format!("transmissivity {t} not in (0, 1]"));
            }
        }
        let eps = pick(self.eps, cfg.f64("eps")?, default_eps);
        if !(eps >= 0.0) {
            return usage(format!("--eps {eps} must be non-negative"));
        }
        let preset = self.phase_noise || cfg.bool("phase_noise")?;
        let sigma = match self.sigma.or(cfg.f64("sigma")?) {
            Some(s) => s,
            None if preset => crate::channel::PHASE_NOISE_PRESET,
            None => 0.0,
        };
        if !(sigma >= 0.0) {
            return usage(format!("--sigma {sigma} must be non-negative"));
        }
        Ok(ChannelSettings { transmissivities, eps, sigma })
    }
}

fn transmissivity_spec(
    t: Option<Vec<f64>>,
    t_grid: Option<&str>,
    db: Option<Vec<f64>>,
    db_grid: Option<&str>,
    prefix: &str,
) -> Usage<Option<Vec<f64>>> {
    let given = [t.is_some(), t_grid.is_some(), db.is_some(), db_grid.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if given > 1 {
        return usage(format!("{prefix}give only one of T, T-grid, dB, dB-grid"));
    }
    let to_t = |dbs: Vec<f64>| -> Usage<Vec<f64>> {
        dbs.into_iter()
            .map(|l| {
                if l >= 0.0 && l.is_finite() {
                    Ok(crate::channel::db_to_transmissivity(l))
                } else {
                    usage(format!("loss {l} dB must be non-negative"))
                }
            })
            .collect()
    };
    Ok(match (t, t_grid, db, db_grid) {
        (Some(t), ..) => Some(t),
        (_, Some(g), ..) => Some(parse_grid(g)?),
        (_, _, Some(d), _) => Some(to_t(d)?),
        (_, _, _, Some(g)) => Some(to_t(parse_grid(g)?)?),
        _ => None,
    })
}

fn pick<T>(cli: Option<T>, cfg: Option<T>, default: T) -> T {
    cli.or(cfg).unwrap_or(default)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSettings {
    pub qos: Vec<f64>,
    pub variances: Option<Vec<f64>>,
    pub displacements: Option<Vec<f64>>,
}

impl SignalOpts {
    pub fn resolve(
        &self,
        cfg: &ConfigFile,
        default_w: &[f64],
        default_v: Option<&[f64]>,
        default_d: Option<&[f64]>,
    ) -> Usage<SignalSettings> {
        let qos = self.w.clone().or(cfg.f64_list("W")?).unwrap_or_else(|| default_w.to_vec());
        for &w in &qos {
            if !(w > 0.0 && w <= 0.5) {
                return usage(format!("QoS target W = {w} not in (0, 0.5]"));
            }
        }
        let variances = self.v.clone().or(cfg.f64_list("V")?).or(default_v.map(<[f64]>::to_vec));
        if let Some(vs) = &variances {
            if vs.is_empty() || vs.iter().any(|&v| !(v >= 1.0)) {
                return usage("modulation variances must be >= 1");
            }
        }
        let displacements = self.d.clone().or(cfg.f64_list("d")?).or(default_d.map(<[f64]>::to_vec));
        if let Some(ds) = &displacements {
            if ds.is_empty() || ds.iter().any(|&d| !(d >= 0.0)) {
                return usage("displacements must be >= 0");
            }
        }
        if qos.is_empty() {
            return usage("empty W list");
        }
        Ok(SignalSettings { qos, variances, displacements })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSettings {
    pub beta: f64,
    pub strategy: Strategy,
    pub mi_double: bool,
    pub search: VSearch,
}

impl RateOpts {
    pub fn resolve(&self, cfg: &ConfigFile) -> Usage<RateSettings> {
        let beta = pick(self.beta, cfg.f64("beta")?, 0.95);
        if !(beta > 0.0 && beta <= 1.0) {
            return usage(format!("--beta {beta} not in (0, 1]"));
        }
        let strategy = match self.strategy.clone().or(cfg.string("strategy")?) {
            None => Strategy::default(),
            Some(s) => s.parse().map_err(|e: crate::Error| UsageError(e.to_string()))?,
        };
        let d = VSearch::default();
        let search = VSearch {
            v_min: pick(self.v_min, cfg.f64("v_min")?, d.v_min),
            v_max: pick(self.v_max, cfg.f64("v_max")?, d.v_max),
            grid_points: pick(self.grid_points, cfg.count("grid_points")?.map(|g| g as usize), d.grid_points),
            ..d
        };
        if !(search.v_min >= 1.0 && search.v_max > search.v_min) || search.grid_points < 3 {
            return usage("need 1 <= v_min < v_max and grid_points >= 3");
        }
        Ok(RateSettings {
            beta,
            strategy,
            mi_double: self.mi_double || cfg.bool("mi_double")?,
            search,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSettings {
    /// `None` when no block size was requested and none is defaulted.
    pub block_sizes: Option<Vec<u64>>,
    pub security: SecurityParams,
}

impl FiniteOpts {
    pub fn resolve(&self, cfg: &ConfigFile, default_n: Option<&[u64]>) -> Usage<FiniteSettings> {
        let block_sizes = self.n.clone().or(cfg.count_list("N")?).or(default_n.map(<[u64]>::to_vec));
        let d = SecurityParams::default();
        let security = SecurityParams {
            block_size: block_sizes.as_ref().and_then(|v| v.first().copied()).unwrap_or(d.block_size),
            frame_success: pick(self.pf, cfg.f64("pf")?, d.frame_success),
            discretisation_bits: pick(self.drx, cfg.count("drx")?.map(|v| v as u32), d.discretisation_bits),
            eps_pe: pick(self.eps_pe, cfg.f64("eps_pe")?, d.eps_pe),
            eps_smooth: pick(self.eps_s, cfg.f64("eps_s")?, d.eps_smooth),
            eps_hash: pick(self.eps_h, cfg.f64("eps_h")?, d.eps_hash),
            eps_ent: pick(self.eps_ent, cfg.f64("eps_ent")?, d.eps_ent),
            eps_qrng: pick(self.eps_qrng, cfg.f64("eps_qrng")?, d.eps_qrng),
            eps_ir: pick(self.eps_ir, cfg.f64("eps_ir")?, d.eps_ir),
            eps_cal: pick(self.eps_cal, cfg.f64("eps_cal")?, d.eps_cal),
            beta_quantile: d.beta_quantile,
        };
        if let Some(ns) = &block_sizes {
            if ns.is_empty() {
                return usage("empty block-size list");
            }
            for &n in ns {
                SecurityParams { block_size: n, ..security }
                    .validate()
                    .map_err(|e| UsageError(e.to_string()))?;
            }
        } else {
            security.validate().map_err(|e| UsageError(e.to_string()))?;
        }
        Ok(FiniteSettings { block_sizes, security })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSettings {
    pub n: usize,
    pub seed: u64,
    pub disclose: f64,
    pub schedule: SymbolSchedule,
    pub shots: Option<PathBuf>,
}

impl McOpts {
    pub fn resolve(&self, cfg: &ConfigFile, default_schedule: SymbolSchedule) -> Usage<McSettings> {
        let n = pick(self.n, cfg.count("n")?, 100_000);
        if n < 32 {
            return usage(format!("--n {n} too small, need at least 32 shots"));
        }
        let disclose = pick(self.disclose, cfg.f64("disclose")?, 0.1);
        if !(disclose > 0.0 && disclose < 1.0) {
            return usage(format!("--disclose {disclose} not in (0, 1)"));
        }
        let schedule = match self.schedule.clone().or(cfg.string("schedule")?).as_deref() {
            None => default_schedule,
            Some("uniform") => SymbolSchedule::Uniform,
            Some(k) => {
                let idx: u8 = k
                    .parse()
                    .map_err(|_| UsageError(format!("schedule {k:?}: expected uniform or 1-4")))?;
                SymbolSchedule::Fixed(QpskSymbol::new(idx).map_err(|e| UsageError(e.to_string()))?)
            }
        };
        Ok(McSettings {
            n: n as usize,
            seed: pick(self.seed, cfg.count("seed")?, 42),
            disclose,
            schedule,
            shots: self.shots.clone().or(cfg.string("shots")?.map(PathBuf::from)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = parse_grid("log:0.01:0.9:50").unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!((g[0], g[49]), (0.01, 0.9));
        assert_eq!(parse_grid("lin:0:20:11").unwrap()[3], 6.0);
        assert!(parse_grid("log:0.01:0.9").is_err());
        assert!(parse_grid("cubic:1:2:3").is_err());
        assert!(parse_grid("lin:2:1:3").is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("100000"), Ok(100_000));
        assert_eq!(parse_count("1e8"), Ok(100_000_000));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn flags_override_config() {
        let cfg = ConfigFile::parse("T = [0.2, 0.3]\neps = 0.02\nW = 1e-6\nbeta = 0.9\nN = [1e6, 1e8]\n").unwrap();
        let ch = ChannelOpts { eps: Some(0.07), ..Default::default() }.resolve(&cfg, &[0.5], 0.05).unwrap();
        assert_eq!(ch.transmissivities, vec![0.2, 0.3]);
        assert_eq!(ch.eps, 0.07);
        let ch = ChannelOpts { db: Some(vec![10.0]), ..Default::default() }.resolve(&cfg, &[0.5], 0.05).unwrap();
        assert!((ch.transmissivities[0] - 0.1).abs() < 1e-15);
        assert_eq!(ch.eps, 0.02);
        let sig = SignalOpts::default().resolve(&cfg, &[1e-3], None, None).unwrap();
        assert_eq!(sig.qos, vec![1e-6]);
        let rate = RateOpts::default().resolve(&cfg).unwrap();
        assert_eq!(rate.beta, 0.9);
        let fin = FiniteOpts::default().resolve(&cfg, None).unwrap();
        assert_eq!(fin.block_sizes, Some(vec![1_000_000, 100_000_000]));
    }

    #[test]
    fn conflicting_channel_specs_rejected() {
        let cfg = ConfigFile::default();
        let both = ChannelOpts {
            t: Some(vec![0.1]),
            db: Some(vec![3.0]),
            ..Default::default()
        };
        assert!(both.resolve(&cfg, &[0.5], 0.05).is_err());
        let cfg = ConfigFile::parse("T = 0.1\ndB_grid = \"lin:1:3:3\"").unwrap();
        assert!(ChannelOpts::default().resolve(&cfg, &[0.5], 0.05).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ConfigFile::parse("bogus = 1").is_err());
        assert!(ConfigFile::parse("eps = \"x\"").unwrap().f64("eps").is_err());
        assert!(ConfigFile::parse("T = [").is_err());
        let cfg = ConfigFile::parse("schedule = 1\nphase_noise = true").unwrap();
        let mc = McOpts::default().resolve(&cfg, SymbolSchedule::Uniform).unwrap();
        assert_eq!(mc.schedule, SymbolSchedule::Fixed(QpskSymbol::new(1).unwrap()));
        let ch = ChannelOpts::default().resolve(&cfg, &[0.5], 0.05).unwrap();
        assert_eq!(ch.sigma, crate::channel::PHASE_NOISE_PRESET);
    }

    #[test]
    fn invalid_values_rejected() {
        let cfg = ConfigFile::default();
        let bad_t = ChannelOpts { t: Some(vec![1.5]), ..Default::default() };
        assert!(bad_t.resolve(&cfg, &[0.5], 0.05).is_err());
        let bad_w = SignalOpts { w: Some(vec![0.7]), ..Default::default() };
        assert!(bad_w.resolve(&cfg, &[1e-3], None, None).is_err());
        let bad_beta = RateOpts { beta: Some(0.0), ..Default::default() };
        assert!(bad_beta.resolve(&cfg).is_err());
        let bad_strategy = RateOpts { strategy: Some("x".into()), ..Default::default() };
        assert!(bad_strategy.resolve(&cfg).is_err());
        let bad_n = McOpts { n: Some(4), ..Default::default() };
        assert!(bad_n.resolve(&cfg, SymbolSchedule::Uniform).is_err());
    }
}
