//! Large-N approximation ratios of the quantizers and checks on where the
//! discrete phases should be placed.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, RisError};
use crate::model::{range_limit, PhaseSet, TWO_PI};

/// Expected quantized power over the continuous maximum `(Σβ_n)²`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct RatioValue(f64);

impl RatioValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for RatioValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(&self.0, f)
    }
}

/// Normalized sinc, `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn check_domain(range: f64, k: usize) -> Result<()> {
    if k < 2 {
        return Err(RisError::Domain(format!("need K >= 2, got {k}")));
    }
    if !range.is_finite() || range <= 0.0 {
        return Err(RisError::Domain(format!(
            "phase range {range} must be positive"
        )));
    }
    let limit = range_limit(k);
    if range >= limit {
        return Err(RisError::RangeViolation { range, k, limit });
    }
    Ok(())
}

/// `(1/π²)[Σ sin((φ_{k+1}-φ_k)/2) + sin((φ_K-φ_1)/2)]²` for any alphabet.
pub fn approx_ratio_arbitrary(set: &PhaseSet) -> RatioValue {
    let k = set.len();
    let inner: f64 = set.gaps()[..k - 1].iter().map(|g| (g / 2.0).sin()).sum();
    let s = inner + (set.range() / 2.0).sin();
    RatioValue((s / PI).powi(2))
}

/// NPQ ratio for `K` phases equally separated over `[-R/2, R/2]`.
pub fn approx_ratio_npq(range: f64, k: usize) -> Result<RatioValue> {
    check_domain(range, k)?;
    let m = (k - 1) as f64;
    let s = sinc(range / (TWO_PI * m)) + sinc(range / TWO_PI);
    Ok(RatioValue((range / TWO_PI).powi(2) * s * s))
}

/// ENPQ ratio for the same alphabet: elements whose quantization error
/// exceeds π/2 are switched off instead of subtracting.
pub fn approx_ratio_enpq(range: f64, k: usize) -> Result<RatioValue> {
    check_domain(range, k)?;
    let m = (k - 1) as f64;
    let s = m * (range / (2.0 * m)).sin() + 1.0;
    Ok(RatioValue((s / PI).powi(2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlacementReport {
    pub passed: bool,
    pub trials: usize,
    /// Ratio of the unperturbed alphabet.
    pub baseline: f64,
    /// Largest `perturbed - baseline` seen (negative when every perturbation lost).
    pub max_excess: f64,
}

pub const PLACEMENT_TOL: f64 = 1e-12;

fn run_placement<F>(
    baseline: &PhaseSet,
    trials: usize,
    seed: u64,
    mut draw: F,
) -> Result<PlacementReport>
where
    F: FnMut(&mut ChaCha8Rng, usize) -> Vec<f64>,
{
    if trials == 0 {
        return Err(RisError::Domain("need at least one trial".into()));
    }
    let base = approx_ratio_arbitrary(baseline).value();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_excess = f64::NEG_INFINITY;
    let mut done = 0;
    while done < trials {
        let Ok(set) = PhaseSet::new(&draw(&mut rng, done)) else {
            continue;
        };
        max_excess = max_excess.max(approx_ratio_arbitrary(&set).value() - base);
        done += 1;
    }
    Ok(PlacementReport {
        passed: max_excess <= PLACEMENT_TOL,
        trials,
        baseline: base,
        max_excess,
    })
}

/// Perturbs the interior phases of the equally separated alphabet over
/// `[-R/2, R/2]` with the endpoints held fixed. Even trials jitter the
/// baseline slightly, odd trials draw the interior uniformly at random.
pub fn placement_perturbation_check(
    range: f64,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<PlacementReport> {
    let baseline = PhaseSet::equally_separated(range, k)?;
    let half = range / 2.0;
    let step = range / (k - 1) as f64;
    let base = baseline.phases().to_vec();
    run_placement(&baseline, trials, seed, |rng, t| {
        let mut interior: Vec<f64> = if t % 2 == 0 {
            let scale = step * 10f64.powf(-rng.random_range(1.0..6.0));
            base[1..k - 1]
                .iter()
                .map(|&p| p + scale * rng.random_range(-1.0..1.0))
                .collect()
        } else {
            (1..k - 1).map(|_| rng.random_range(-half..half)).collect()
        };
        interior.sort_by(f64::total_cmp);
        let mut phases = vec![-half];
        phases.extend(interior);
        phases.push(half);
        phases
    })
}

/// Full-circle counterpart: perturbs all phases of the uniform `2π/K` set.
pub fn uniform_placement_perturbation_check(
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<PlacementReport> {
    let baseline = PhaseSet::uniform(k)?;
    let step = TWO_PI / k as f64;
    let base = baseline.phases().to_vec();
    run_placement(&baseline, trials, seed, |rng, t| {
        if t % 2 == 0 {
            let scale = step * 10f64.powf(-rng.random_range(1.0..6.0));
            base.iter()
                .map(|&p| p + scale * rng.random_range(-1.0..1.0))
                .collect()
        } else {
            (0..k).map(|_| rng.random_range(-PI..PI)).collect()
        }
    })
}
