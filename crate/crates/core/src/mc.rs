//! Seeded Monte Carlo of the receiver chain: joint heterodyne outcomes,
//! quadrant decisions, re-displacement, moment estimation and rescaling.
//!
//! A batch of `n` shots is split into [`SUB_BATCHES`] contiguous groups.
//! Group `g` draws from a ChaCha20 generator seeded with the batch seed on
//! stream `g`, so results do not depend on the thread count. The same groups
//! provide the standard errors.

use crate::channel::{shared_state, ChannelParams, ProtocolParams, QpskSymbol};
use crate::gaussian::measurement_distribution;
use crate::specfn::{beta_reg, erfc, erfc_inv};
use crate::sqcc::Strategy;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;
use std::ops::Range;

/// Identifier of the sampling scheme, recorded in every output.
pub const RNG_ALGORITHM: &str = "chacha20-stream-per-subbatch-v1";

/// Number of independently seeded groups per batch.
pub const SUB_BATCHES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolSchedule {
    /// Each shot carries a uniformly random symbol.
    Uniform,
    Fixed(QpskSymbol),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BatchStage {
    Raw,
    /// Decided centroid subtracted; `centroid` is the per-quadrature offset used.
    Redisplaced { centroid: f64 },
    /// Re-displaced, then divided by `sqrt(delta_v)`.
    Rescaled { centroid: f64, delta_v: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotBatch {
    pub seed: u64,
    pub n_shots: usize,
    pub algorithm: &'static str,
    /// `(q, p)` heterodyne outcomes, double-quadrature coordinates.
    pub alice: Vec<[f64; 2]>,
    pub bob: Vec<[f64; 2]>,
    pub true_symbols: Vec<QpskSymbol>,
    /// Quadrant of Bob's raw outcome.
    pub decided_symbols: Vec<QpskSymbol>,
    pub stage: BatchStage,
}

/// Contiguous shot ranges of the sub-batches.
pub fn sub_batch_ranges(n: usize) -> Vec<Range<usize>> {
    (0..SUB_BATCHES)
        .map(|g| (g * n / SUB_BATCHES)..((g + 1) * n / SUB_BATCHES))
        .collect()
}

struct Sampler {
    chol: [[f64; 4]; 4],
    centroid: f64,
    schedule: SymbolSchedule,
}

impl Sampler {
    fn new(proto: &ProtocolParams, chan: &ChannelParams, schedule: SymbolSchedule) -> Result<Self> {
        let state = shared_state(proto, chan, 1)?;
        let chol = cholesky4(&measurement_distribution(&state).covariance)?;
        Ok(Sampler {
            chol,
            centroid: chan.transmissivity.sqrt() * proto.displacement * FRAC_1_SQRT_2,
            schedule,
        })
    }

    /// Draw `len` shots of group `group`, passing each to `sink`.
    fn run_group(&self, seed: u64, group: usize, len: usize, mut sink: impl FnMut(QpskSymbol, [f64; 4])) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(group as u64);
        for _ in 0..len {
            let symbol = match self.schedule {
                SymbolSchedule::Uniform => QpskSymbol::ALL[rng.random_range(0..4)],
                SymbolSchedule::Fixed(s) => s,
            };
            let z: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let (sq, sp) = symbol.signs();
            let mean = [0.0, 0.0, sq * self.centroid, sp * self.centroid];
            let mut y = mean;
            for (i, yi) in y.iter_mut().enumerate() {
                for (j, zj) in z.iter().enumerate().take(i + 1) {
                    *yi += self.chol[i][j] * zj;
                }
            }
            sink(symbol, y);
        }
    }
}

fn cholesky4(m: &[[f64; 4]; 4]) -> Result<[[f64; 4]; 4]> {
    let mut l = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = m[i][i] - s;
                if !(d > 0.0) {
                    return Err(Error::numeric(
                        "sample_joint",
                        format!("outcome covariance is not positive definite (pivot {i}: {d:e})"),
                    ));
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (m[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Draw `n` joint heterodyne outcomes.
pub fn sample_joint(
    proto: &ProtocolParams,
    chan: &ChannelParams,
    schedule: SymbolSchedule,
    n: usize,
    seed: u64,
) -> Result<ShotBatch> {
    if n == 0 {
        return Err(Error::domain("sample_joint", "need at least one shot"));
    }
    let sampler = Sampler::new(proto, chan, schedule)?;
    let groups: Vec<_> = sub_batch_ranges(n)
        .into_par_iter()
        .enumerate()
        .map(|(g, range)| {
            let mut shots = Vec::with_capacity(range.len());
            sampler.run_group(seed, g, range.len(), |s, y| shots.push((s, y)));
            shots
        })
        .collect();
    let mut batch = ShotBatch {
        seed,
        n_shots: n,
        algorithm: RNG_ALGORITHM,
        alice: Vec::with_capacity(n),
        bob: Vec::with_capacity(n),
        true_symbols: Vec::with_capacity(n),
        decided_symbols: Vec::with_capacity(n),
        stage: BatchStage::Raw,
    };
    for (s, y) in groups.into_iter().flatten() {
        batch.alice.push([y[0], y[1]]);
        batch.bob.push([y[2], y[3]]);
        batch.true_symbols.push(s);
        batch.decided_symbols.push(QpskSymbol::decide(y[2], y[3]));
    }
    Ok(batch)
}

/// Quadrant decision followed by subtraction of the decided symbol's
/// analytic centroid `±sqrt(T) d/√2`.
pub fn discriminate_and_redisplace(batch: &ShotBatch, proto: &ProtocolParams, chan: &ChannelParams) -> Result<ShotBatch> {
    proto.validate()?;
    chan.validate()?;
    redisplace(batch, chan.transmissivity.sqrt() * proto.displacement * FRAC_1_SQRT_2)
}

/// Subtract `centroid · signs(decided)` from every Bob outcome.
pub fn redisplace(batch: &ShotBatch, centroid: f64) -> Result<ShotBatch> {
    if batch.stage != BatchStage::Raw {
        return Err(Error::domain("redisplace", "batch is already postprocessed"));
    }
    let mut out = batch.clone();
    for (i, y) in out.bob.iter_mut().enumerate() {
        let decided = QpskSymbol::decide(y[0], y[1]);
        out.decided_symbols[i] = decided;
        let (sq, sp) = decided.signs();
        y[0] -= sq * centroid;
        y[1] -= sp * centroid;
    }
    out.stage = BatchStage::Redisplaced { centroid };
    Ok(out)
}

impl ShotBatch {
    /// Per-quadrature bit errors between true and decided symbols.
    pub fn bit_errors(&self, range: Range<usize>) -> u64 {
        range
            .map(|i| {
                let (tq, tp) = self.true_symbols[i].signs();
                let (dq, dp) = self.decided_symbols[i].signs();
                (tq != dq) as u64 + (tp != dp) as u64
            })
            .sum()
    }

    pub fn symbol_errors(&self, range: Range<usize>) -> u64 {
        range
            .filter(|&i| self.true_symbols[i] != self.decided_symbols[i])
            .count() as u64
    }

    /// Write one row per shot: `shot,true_symbol,decided_symbol,alice_q,alice_p,bob_q,bob_p`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let io = |e: csv::Error| Error::numeric("ShotBatch::write_csv", e.to_string());
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["shot", "true_symbol", "decided_symbol", "alice_q", "alice_p", "bob_q", "bob_p"])
            .map_err(io)?;
        for i in 0..self.n_shots {
            w.write_record([
                i.to_string(),
                self.true_symbols[i].index().to_string(),
                self.decided_symbols[i].index().to_string(),
                self.alice[i][0].to_string(),
                self.alice[i][1].to_string(),
                self.bob[i][0].to_string(),
                self.bob[i][1].to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::numeric("ShotBatch::write_csv", e.to_string()))
    }
}

/// Running mean and co-moments of `(alice_q, alice_p, bob_q, bob_p)`.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    n: f64,
    mean: [f64; 4],
    m2: [[f64; 4]; 4],
}

impl Accumulator {
    fn push(&mut self, x: [f64; 4]) {
        self.n += 1.0;
        let d: [f64; 4] = std::array::from_fn(|i| x[i] - self.mean[i]);
        for i in 0..4 {
            self.mean[i] += d[i] / self.n;
        }
        for i in 0..4 {
            for j in i..4 {
                self.m2[i][j] += d[i] * (x[j] - self.mean[j]);
            }
        }
    }

    fn merge(&mut self, o: &Accumulator) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        let d: [f64; 4] = std::array::from_fn(|i| o.mean[i] - self.mean[i]);
        for i in 0..4 {
            for j in i..4 {
                self.m2[i][j] += o.m2[i][j] + d[i] * d[j] * self.n * o.n / n;
            }
        }
        for i in 0..4 {
            self.mean[i] += d[i] * o.n / n;
        }
        self.n = n;
    }

    fn cov(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.m2[i][j] / (self.n - 1.0)
    }

    /// `(a, b, c)` in SNU from the outcome covariance.
    fn moments(&self) -> [f64; 3] {
        [
            0.5 * (self.cov(0, 0) + self.cov(1, 1)) - 1.0,
            0.5 * (self.cov(2, 2) + self.cov(3, 3)) - 1.0,
            0.5 * (self.cov(0, 2) - self.cov(1, 3)),
        ]
    }
}

/// Outcome folded into the symbol-1 frame of the true symbol.
fn folded(alice: [f64; 2], bob: [f64; 2], symbol: QpskSymbol) -> [f64; 4] {
    let (sq, sp) = symbol.signs();
    [sq * alice[0], sp * alice[1], sq * bob[0], sp * bob[1]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalMoments {
    pub n_shots: usize,
    pub a_hat: f64,
    pub b_hat: f64,
    pub c_hat: f64,
    /// Mean in the symbol-1 frame.
    pub mean_hat: [f64; 4],
    /// Per-quadrature bit error rate.
    pub e_c_hat: f64,
    pub symbol_error_rate: f64,
    pub se: MomentErrors,
}

/// Standard errors: sub-batch spread for the moments, binomial for the rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentErrors {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mean: [f64; 4],
    pub e_c: f64,
    pub symbol_error: f64,
}

fn spread<const K: usize>(values: &[[f64; K]]) -> [f64; K] {
    let g = values.len() as f64;
    std::array::from_fn(|k| {
        let m = values.iter().map(|v| v[k]).sum::<f64>() / g;
        let var = values.iter().map(|v| (v[k] - m).powi(2)).sum::<f64>() / (g - 1.0);
        (var / g).sqrt()
    })
}

fn moments_from_groups(groups: &[Accumulator], bit_errors: u64, symbol_errors: u64, n: usize) -> EmpiricalMoments {
    let mut total = Accumulator::default();
    for g in groups {
        total.merge(g);
    }
    let [a, b, c] = total.moments();
    let per_group: Vec<[f64; 7]> = groups
        .iter()
        .map(|g| {
            let [a, b, c] = g.moments();
            [a, b, c, g.mean[0], g.mean[1], g.mean[2], g.mean[3]]
        })
        .collect();
    let se = spread(&per_group);
    let nf = n as f64;
    let e_c = bit_errors as f64 / (2.0 * nf);
    let ser = symbol_errors as f64 / nf;
    EmpiricalMoments {
        n_shots: n,
        a_hat: a,
        b_hat: b,
        c_hat: c,
        mean_hat: total.mean,
        e_c_hat: e_c,
        symbol_error_rate: ser,
        se: MomentErrors {
            a: se[0],
            b: se[1],
            c: se[2],
            mean: [se[3], se[4], se[5], se[6]],
            e_c: (e_c * (1.0 - e_c) / (2.0 * nf)).sqrt(),
            symbol_error: (ser * (1.0 - ser) / nf).sqrt(),
        },
    }
}

/// Covariance entries, mean and error rates of a batch, with every shot
/// folded into the symbol-1 frame of its true symbol.
pub fn empirical_moments(batch: &ShotBatch) -> Result<EmpiricalMoments> {
    if batch.n_shots < 2 * SUB_BATCHES {
        return Err(Error::domain(
            "empirical_moments",
            format!("need at least {} shots, got {}", 2 * SUB_BATCHES, batch.n_shots),
        ));
    }
    let groups: Vec<Accumulator> = sub_batch_ranges(batch.n_shots)
        .into_iter()
        .map(|r| {
            let mut acc = Accumulator::default();
            for i in r {
                acc.push(folded(batch.alice[i], batch.bob[i], batch.true_symbols[i]));
            }
            acc
        })
        .collect();
    let all = 0..batch.n_shots;
    Ok(moments_from_groups(
        &groups,
        batch.bit_errors(all.clone()),
        batch.symbol_errors(all),
        batch.n_shots,
    ))
}

/// Same statistics as `empirical_moments(discriminate_and_redisplace(sample_joint(..)))`
/// (or of the raw batch when `redisplace` is false) without storing shots.
/// Results are bit-identical to the stored path.
pub fn streaming_moments(
    proto: &ProtocolParams,
    chan: &ChannelParams,
    schedule: SymbolSchedule,
    n: usize,
    seed: u64,
    redisplace: bool,
) -> Result<EmpiricalMoments> {
    if n < 2 * SUB_BATCHES {
        return Err(Error::domain(
            "streaming_moments",
            format!("need at least {} shots, got {n}", 2 * SUB_BATCHES),
        ));
    }
    let sampler = Sampler::new(proto, chan, schedule)?;
    let offset = if redisplace { sampler.centroid } else { 0.0 };
    let groups: Vec<(Accumulator, u64, u64)> = sub_batch_ranges(n)
        .into_par_iter()
        .enumerate()
        .map(|(g, range)| {
            let mut acc = Accumulator::default();
            let (mut bits, mut symbols) = (0u64, 0u64);
            sampler.run_group(seed, g, range.len(), |s, y| {
                let decided = QpskSymbol::decide(y[2], y[3]);
                let (dq, dp) = decided.signs();
                let (tq, tp) = s.signs();
                bits += (tq != dq) as u64 + (tp != dp) as u64;
                symbols += (s != decided) as u64;
                let bob = [y[2] - dq * offset, y[3] - dp * offset];
                acc.push(folded([y[0], y[1]], bob, s));
            });
            (acc, bits, symbols)
        })
        .collect();
    let accs: Vec<Accumulator> = groups.iter().map(|g| g.0).collect();
    let bits = groups.iter().map(|g| g.1).sum();
    let symbols = groups.iter().map(|g| g.2).sum();
    Ok(moments_from_groups(&accs, bits, symbols, n))
}

/// One-sided upper confidence bound on a binomial rate: the largest `p`
/// with `P(X <= errors; trials, p) >= alpha`.
pub fn binomial_upper_bound(errors: u64, trials: u64, alpha: f64) -> Result<f64> {
    if trials == 0 || errors > trials {
        return Err(Error::domain(
            "binomial_upper_bound",
            format!("{errors} errors in {trials} trials"),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("binomial_upper_bound", format!("alpha = {alpha} not in (0, 1)")));
    }
    if errors == trials {
        return Ok(1.0);
    }
    let n = trials as f64;
    if errors == 0 {
        return Ok(-(alpha.ln() / n).exp_m1());
    }
    // P(X <= k; p) = I_{1-p}(n - k, k + 1), increasing in q = 1 - p
    let (a, b) = ((trials - errors) as f64, errors as f64 + 1.0);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(mid, a, b)? < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(1.0 - 0.5 * (lo + hi))
}

/// Settings for [`estimation_pipeline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationConfig {
    /// Fraction of shots whose classical symbols are compared publicly.
    pub disclose_fraction: f64,
    /// Failure probability of the bit-error-rate bound.
    pub eps_pe: f64,
    pub strategy: Strategy,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            disclose_fraction: 0.1,
            eps_pe: 1e-10,
            strategy: Strategy::default(),
        }
    }
}

/// What the receiver infers from its own data plus the disclosed symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    /// Mean raw outcome of the shots decided into each quadrant (symbols 1 to 4).
    pub centroid_hat: [[f64; 2]; 4],
    /// Constellation offset per quadrature from the raw second and fourth moments.
    pub peak_hat: f64,
    pub disclosed_bits: u64,
    pub disclosed_errors: u64,
    pub e_c_point: f64,
    /// Upper confidence bound on the bit error rate at level `1 - eps_pe`.
    pub e_c_bound: f64,
    pub snr_point: f64,
    /// Conservative signal-to-noise ratio inverted from `e_c_bound`.
    pub snr_hat: f64,
    pub delta_hat: f64,
    pub b_d_hat: f64,
    pub b_hat: f64,
    pub delta_v_hat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateErrors {
    pub peak: f64,
    pub e_c_point: f64,
    pub snr_point: f64,
    pub snr_hat: f64,
    pub b_hat: f64,
    pub delta_v_hat: f64,
    pub centroid: [[f64; 2]; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationOutcome {
    pub estimate: Estimate,
    /// Spread of the estimates over independent sub-batches.
    pub se: EstimateErrors,
    pub rescaled: ShotBatch,
}

fn snr_from_error_rate(e: f64) -> Result<f64> {
    if e <= 0.0 {
        return Ok(f64::INFINITY);
    }
    if e >= 0.5 {
        return Ok(0.0);
    }
    Ok(4.0 * erfc_inv(2.0 * e)?.powi(2))
}

fn estimate_range(batch: &ShotBatch, range: Range<usize>, cfg: &EstimationConfig) -> Result<Estimate> {
    let len = range.len();
    let mut sums = [[0.0; 2]; 4];
    let mut counts = [0usize; 4];
    let (mut m2, mut m4) = (0.0, 0.0);
    for i in range.clone() {
        let y = batch.bob[i];
        let k = QpskSymbol::decide(y[0], y[1]).index() as usize - 1;
        sums[k][0] += y[0];
        sums[k][1] += y[1];
        counts[k] += 1;
        for v in y {
            let s = v * v;
            m2 += s;
            m4 += s * s;
        }
    }
    let centroid_hat = std::array::from_fn(|k| {
        let c = counts[k] as f64;
        [sums[k][0] / c, sums[k][1] / c]
    });
    m2 /= 2.0 * len as f64;
    m4 /= 2.0 * len as f64;
    // symmetric two-point mixture: 3 (E x²)² - E x⁴ = 2 m⁴
    let peak_hat = (0.5 * (3.0 * m2 * m2 - m4)).max(0.0).powf(0.25);

    let disclosed = ((cfg.disclose_fraction * len as f64).ceil() as usize).min(len);
    let start = range.start;
    let disclosed_bits = 2 * disclosed as u64;
    let disclosed_errors = batch.bit_errors(start..start + disclosed);
    let e_c_point = disclosed_errors as f64 / disclosed_bits as f64;
    let e_c_bound = binomial_upper_bound(disclosed_errors, disclosed_bits, cfg.eps_pe)?;
    let snr_point = snr_from_error_rate(e_c_point)?;
    let snr_hat = snr_from_error_rate(e_c_bound)?;

    // second moment of the re-displaced data minus its expected offset
    let mut s2 = 0.0;
    for i in range {
        let y = batch.bob[i];
        let (sq, sp) = QpskSymbol::decide(y[0], y[1]).signs();
        s2 += (y[0] - sq * peak_hat).powi(2) + (y[1] - sp * peak_hat).powi(2);
    }
    s2 /= 2.0 * len as f64;
    let shift = 2.0 * peak_hat * e_c_point;
    let b_d_hat = s2 - shift * shift - 1.0;

    let (delta_hat, gain) = if snr_point.is_finite() {
        let delta = (snr_point / PI).sqrt() * (-0.25 * snr_point).exp();
        (delta, 1.0 + 2.0 * snr_point * e_c_point * (1.0 - e_c_point) - 2.0 * delta)
    } else {
        (0.0, 1.0)
    };
    let b_hat = (b_d_hat + 1.0) / gain - 1.0;
    let delta_v_hat = match cfg.strategy {
        Strategy::BPreserving => gain,
        Strategy::CPreserving => (1.0 - delta_hat).powi(2),
    };
    Ok(Estimate {
        centroid_hat,
        peak_hat,
        disclosed_bits,
        disclosed_errors,
        e_c_point,
        e_c_bound,
        snr_point,
        snr_hat,
        delta_hat,
        b_d_hat,
        b_hat,
        delta_v_hat,
    })
}

/// Receiver-side estimation on a raw batch: peak location, bit-error-rate
/// bound from the disclosed symbols, signal-to-noise ratio, inferred `b` and
/// rescaling factor, then re-displacement by the estimated peak and rescaling.
pub fn estimation_pipeline(batch: &ShotBatch, cfg: &EstimationConfig) -> Result<EstimationOutcome> {
    if batch.stage != BatchStage::Raw {
        return Err(Error::domain("estimation_pipeline", "expects a raw batch"));
    }
    let f = cfg.disclose_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::domain("estimation_pipeline", format!("disclose fraction {f} not in (0, 1)")));
    }
    if f * (batch.n_shots as f64) < 100.0 {
        return Err(Error::domain(
            "estimation_pipeline",
            format!("only {} disclosed shots, need at least 100", f * batch.n_shots as f64),
        ));
    }
    let estimate = estimate_range(batch, 0..batch.n_shots, cfg)?;
    let groups: Vec<Estimate> = sub_batch_ranges(batch.n_shots)
        .into_iter()
        .map(|r| estimate_range(batch, r, cfg))
        .collect::<Result<_>>()?;
    let rows: Vec<[f64; 14]> = groups
        .iter()
        .map(|e| {
            let c = e.centroid_hat;
            [
                e.peak_hat, e.e_c_point, e.snr_point, e.snr_hat, e.b_hat, e.delta_v_hat, c[0][0], c[0][1], c[1][0],
                c[1][1], c[2][0], c[2][1], c[3][0], c[3][1],
            ]
        })
        .collect();
    let s = spread(&rows);
    let se = EstimateErrors {
        peak: s[0],
        e_c_point: s[1],
        snr_point: s[2],
        snr_hat: s[3],
        b_hat: s[4],
        delta_v_hat: s[5],
        centroid: [[s[6], s[7]], [s[8], s[9]], [s[10], s[11]], [s[12], s[13]]],
    };
    if !(estimate.delta_v_hat > 0.0) {
        return Err(Error::numeric(
            "estimation_pipeline",
            format!("estimated Δ_V = {} is not positive", estimate.delta_v_hat),
        ));
    }
    let mut rescaled = redisplace(batch, estimate.peak_hat)?;
    let scale = estimate.delta_v_hat.sqrt().recip();
    for y in rescaled.bob.iter_mut() {
        y[0] *= scale;
        y[1] *= scale;
    }
    rescaled.stage = BatchStage::Rescaled {
        centroid: estimate.peak_hat,
        delta_v: estimate.delta_v_hat,
    };
    Ok(EstimationOutcome { estimate, se, rescaled })
}

/// Analytic per-quadrature bit error rate at a given signal-to-noise ratio.
pub fn bit_error_rate(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(Error::domain("bit_error_rate", format!("snr = {snr} < 0")));
    }
    Ok(0.5 * erfc(0.5 * snr.sqrt())?)
}
