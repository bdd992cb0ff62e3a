//! Channel sampling and Monte Carlo experiment runner.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, RisError};
use crate::model::{ChannelRealization, PhaseSet};
use crate::{solve, Method};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelModelConfig {
    pub n_elements: usize,
    /// Rician factor; 0 gives Rayleigh fading.
    pub kappa: f64,
    /// Multiplies `h_0`; 0 models a fully blocked direct link.
    pub direct_link_scale: f64,
    /// `h_n = u_n v_n` (BS→RIS times RIS→UE) instead of a single draw.
    pub cascade: bool,
}

impl ChannelModelConfig {
    /// Cascaded Rayleigh with a unit-scale direct link.
    pub fn new(n_elements: usize) -> Self {
        Self {
            n_elements,
            kappa: 0.0,
            direct_link_scale: 1.0,
            cascade: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(RisError::Config("need at least one element".into()));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(RisError::Config(format!(
                "kappa must be >= 0, got {}",
                self.kappa
            )));
        }
        if !(self.direct_link_scale >= 0.0 && self.direct_link_scale.is_finite()) {
            return Err(RisError::Config(format!(
                "direct link scale must be >= 0, got {}",
                self.direct_link_scale
            )));
        }
        Ok(())
    }
}

/// Unit-variance circularly symmetric complex Gaussian.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Unit-power Rician draw with a uniformly distributed LOS phase.
fn rician<R: Rng + ?Sized>(rng: &mut R, kappa: f64) -> Complex64 {
    let nlos = complex_gaussian(rng);
    if kappa == 0.0 {
        return nlos;
    }
    let psi = rng.random_range(-PI..PI);
    Complex64::from_polar((kappa / (kappa + 1.0)).sqrt(), psi) + nlos * (1.0 / (kappa + 1.0)).sqrt()
}

pub fn sample_channel<R: Rng + ?Sized>(
    config: &ChannelModelConfig,
    rng: &mut R,
) -> Result<ChannelRealization> {
    config.validate()?;
    let mut h = Vec::with_capacity(config.n_elements + 1);
    h.push(rician(rng, config.kappa) * config.direct_link_scale);
    for _ in 0..config.n_elements {
        let hn = if config.cascade {
            rician(rng, config.kappa) * rician(rng, config.kappa)
        } else {
            rician(rng, config.kappa)
        };
        h.push(hn);
    }
    ChannelRealization::from_coefficients(&h)
}

/// Generator for one trial: the base seed selects the key, the trial index
/// the stream, so trials can run in any order.
pub fn trial_rng(base_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Cdf,
    PerfVsN,
    BoostVsR,
}

impl std::str::FromStr for ExperimentKind {
    type Err = RisError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cdf" => Ok(Self::Cdf),
            "perf-vs-n" => Ok(Self::PerfVsN),
            "boost-vs-r" => Ok(Self::BoostVsR),
            _ => Err(RisError::Config(format!("unknown experiment '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub methods: Vec<Method>,
    pub ranges_deg: Vec<f64>,
    pub num_phases: Vec<usize>,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
}

impl ExperimentSpec {
    /// Checks the spec and builds the alphabet for every `(R, K)` pair in
    /// row order.
    fn alphabets(&self) -> Result<Vec<(f64, usize, PhaseSet)>> {
        if self.trials == 0 {
            return Err(RisError::Config("need at least one trial".into()));
        }
        if self.methods.is_empty()
            || self.ranges_deg.is_empty()
            || self.num_phases.is_empty()
            || self.n_values.is_empty()
        {
            return Err(RisError::Config(
                "methods, ranges, K and N lists must be nonempty".into(),
            ));
        }
        if let Some(m) = self.methods.iter().find(|m| !m.is_scalable()) {
            return Err(RisError::Config(format!(
                "method '{m}' is not available in sweeps"
            )));
        }
        if self.n_values.contains(&0) {
            return Err(RisError::Config("N must be at least 1".into()));
        }
        let mut sets = Vec::new();
        for &deg in &self.ranges_deg {
            for &k in &self.num_phases {
                let set = PhaseSet::equally_separated(deg.to_radians(), k)
                    .map_err(|e| RisError::Config(format!("R = {deg} deg, K = {k}: {e}")))?;
                sets.push((deg, k, set));
            }
        }
        Ok(sets)
    }
}

/// `(objective, snr_boost, normalized_performance)` of one solve.
type Metrics = (f64, Option<f64>, f64);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub method: Method,
    pub range_deg: f64,
    pub k: usize,
    pub n: usize,
    pub trial: usize,
    pub objective: f64,
    pub snr_boost: Option<f64>,
    pub normalized_performance: f64,
}

/// Solves every `(method, R, K)` cell on each trial's channel. All methods
/// and alphabets of a trial see the same realization. Rows come back ordered
/// by `(method, R, K, N, trial)`.
pub fn run_experiment(spec: &ExperimentSpec, model: &ChannelModelConfig) -> Result<Vec<TrialRow>> {
    let sets = spec.alphabets()?;
    let cells = spec.methods.len() * sets.len();

    // results[n_idx][trial][method_idx * sets + set_idx]
    let mut results: Vec<Vec<Vec<Metrics>>> = Vec::with_capacity(spec.n_values.len());
    for &n in &spec.n_values {
        let cfg = ChannelModelConfig {
            n_elements: n,
            ..*model
        };
        cfg.validate()?;
        let per_trial = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let channel = sample_channel(&cfg, &mut trial_rng(spec.base_seed, t as u64))?;
                let beta0 = channel.beta()[0];
                let bound = channel.magnitude_sum().powi(2);
                if bound == 0.0 {
                    return Err(RisError::DegenerateChannel);
                }
                let mut out = Vec::with_capacity(cells);
                for &method in &spec.methods {
                    for (_, _, set) in &sets {
                        let f = solve(method, &channel, set)?.objective;
                        let boost = (beta0 > 0.0).then(|| f / (beta0 * beta0));
                        out.push((f, boost, (f / bound).min(1.0)));
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        results.push(per_trial);
    }

    let mut rows = Vec::with_capacity(cells * spec.n_values.len() * spec.trials);
    for (m_idx, &method) in spec.methods.iter().enumerate() {
        for (s_idx, (deg, k, _)) in sets.iter().enumerate() {
            let cell = m_idx * sets.len() + s_idx;
            for (n_idx, &n) in spec.n_values.iter().enumerate() {
                for (trial, values) in results[n_idx].iter().enumerate() {
                    let (objective, snr_boost, normalized_performance) = values[cell];
                    rows.push(TrialRow {
                        method,
                        range_deg: *deg,
                        k: *k,
                        n,
                        trial,
                        objective,
                        snr_boost,
                        normalized_performance,
                    });
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    /// `(v_(i), i/M)`; repeated values keep only their last (highest) step.
    pub cdf: Vec<(f64, f64)>,
    /// `(p, value)` for `p` in [`PERCENTILES`].
    pub percentiles: Vec<(u8, f64)>,
}

pub const PERCENTILES: [u8; 5] = [5, 25, 50, 75, 95];

/// Nearest-rank percentile of an ascending slice.
fn nearest_rank(sorted: &[f64], p: u8) -> f64 {
    let m = sorted.len();
    let rank = ((p as f64 / 100.0) * m as f64).ceil() as usize;
    sorted[rank.clamp(1, m) - 1]
}

pub fn empirical_cdf(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(RisError::Domain("empirical CDF of an empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(RisError::Domain("sample contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut cdf: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (i, &v) in sorted.iter().enumerate() {
        let p = (i + 1) as f64 / m;
        match cdf.last_mut() {
            Some(last) if last.0 == v => last.1 = p,
            _ => cdf.push((v, p)),
        }
    }
    Ok(SummaryStats {
        mean: sorted.iter().sum::<f64>() / m,
        percentiles: PERCENTILES
            .iter()
            .map(|&p| (p, nearest_rank(&sorted, p)))
            .collect(),
        cdf,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub method: Method,
    pub range_deg: f64,
    pub k: usize,
    pub n: usize,
    /// `None` when any trial had a blocked direct link.
    pub mean_boost: Option<f64>,
    pub stats: SummaryStats,
}

/// One row per `(method, R, K, N)` cell, in first-appearance order.
/// Percentiles are taken over normalized performance.
pub fn aggregate(rows: &[TrialRow]) -> Result<Vec<AggregateRow>> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let key = |r: &TrialRow| (r.method, r.range_deg.to_bits(), r.k, r.n);
        let first = key(&rows[start]);
        let end = rows[start..]
            .iter()
            .position(|r| key(r) != first)
            .map_or(rows.len(), |p| start + p);
        let cell = &rows[start..end];
        let perf: Vec<f64> = cell.iter().map(|r| r.normalized_performance).collect();
        let boosts: Option<Vec<f64>> = cell.iter().map(|r| r.snr_boost).collect();
        let head = &rows[start];
        out.push(AggregateRow {
            method: head.method,
            range_deg: head.range_deg,
            k: head.k,
            n: head.n,
            mean_boost: boosts.map(|b| b.iter().sum::<f64>() / b.len() as f64),
            stats: empirical_cdf(&perf)?,
        });
        start = end;
    }
    Ok(out)
}

fn csv_error(e: impl std::fmt::Display) -> RisError {
    RisError::Format(e.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_trials_csv<W: Write>(rows: &[TrialRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "R_deg",
        "K",
        "N",
        "trial",
        "snr_boost",
        "normalized_performance",
    ])
    .map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.method.to_string(),
            r.range_deg.to_string(),
            r.k.to_string(),
            r.n.to_string(),
            r.trial.to_string(),
            opt(r.snr_boost),
            r.normalized_performance.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(csv_error)
}

pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "R_deg",
        "K",
        "N",
        "mean_boost",
        "mean_normperf",
        "p5",
        "p25",
        "p50",
        "p75",
        "p95",
    ])
    .map_err(csv_error)?;
    for r in rows {
        let mut rec = vec![
            r.method.to_string(),
            r.range_deg.to_string(),
            r.k.to_string(),
            r.n.to_string(),
            opt(r.mean_boost),
            r.stats.mean.to_string(),
        ];
        rec.extend(r.stats.percentiles.iter().map(|(_, v)| v.to_string()));
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush().map_err(csv_error)
}
