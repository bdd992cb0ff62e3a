//! Domain types shared by every solver: phase alphabets, channel
//! realizations, RIS configurations, and the objective evaluators.
//!
//! Phase indices are 0-based inside the library. The circular index
//! arithmetic used throughout (`k ⊕ 1`, `k ⊖ 1`) is exposed 1-based through
//! [`idx_add`] and [`idx_sub`] to match the usual `k ∈ {1..K}` notation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RisError};

pub const TWO_PI: f64 = 2.0 * PI;

/// Tolerance below which two phases of an alphabet count as the same phase.
pub const DUPLICATE_TOL: f64 = 1e-12;

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_two_pi(x: f64) -> f64 {
    let y = x.rem_euclid(TWO_PI);
    // rem_euclid rounds tiny negative inputs up to exactly 2π
    if y >= TWO_PI {
        y - TWO_PI
    } else {
        y
    }
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_pi(x: f64) -> f64 {
    let y = wrap_two_pi(x);
    if y >= PI {
        y - TWO_PI
    } else {
        y
    }
}

/// `k1 ⊕ k2` on 1-based phase indices.
pub fn idx_add(k1: usize, k2: usize, k: usize) -> Result<usize> {
    check_index(k1, k)?;
    check_index(k2, k)?;
    let s = k1 + k2;
    Ok(if s <= k { s } else { s - k })
}

/// `k1 ⊖ k2` on 1-based phase indices.
pub fn idx_sub(k1: usize, k2: usize, k: usize) -> Result<usize> {
    check_index(k1, k)?;
    check_index(k2, k)?;
    Ok(if k1 > k2 { k1 - k2 } else { k + k1 - k2 })
}

fn check_index(idx: usize, k: usize) -> Result<()> {
    if idx == 0 || idx > k {
        return Err(RisError::Domain(format!(
            "phase index {idx} outside 1..={k}"
        )));
    }
    Ok(())
}

/// The largest phase range that still forces a nonuniform alphabet of `k` phases.
pub fn range_limit(k: usize) -> f64 {
    TWO_PI * (k as f64 - 1.0) / k as f64
}

/// A discrete phase alphabet `φ_1 < ... < φ_K` in `[-π, π)` together with
/// its circular gaps `ω_k = φ_{k⊕1} - φ_k (mod 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSet {
    phases: Vec<f64>,
    gaps: Vec<f64>,
    range: f64,
    wide_gap: Option<usize>,
}

impl PhaseSet {
    /// Builds an alphabet from arbitrary (unsorted) angles in `[-π, π)`.
    pub fn new(angles: &[f64]) -> Result<Self> {
        if angles.len() < 2 {
            return Err(RisError::InvalidAlphabet(format!(
                "need at least 2 phases, got {}",
                angles.len()
            )));
        }
        for &a in angles {
            if !a.is_finite() || !(-PI..PI).contains(&a) {
                return Err(RisError::Domain(format!("phase {a} outside [-π, π)")));
            }
        }
        let mut phases = angles.to_vec();
        phases.sort_by(f64::total_cmp);
        let k = phases.len();

        let mut gaps = Vec::with_capacity(k);
        for i in 0..k - 1 {
            gaps.push(phases[i + 1] - phases[i]);
        }
        gaps.push(TWO_PI + phases[0] - phases[k - 1]);
        if let Some(g) = gaps.iter().find(|&&g| g <= DUPLICATE_TOL) {
            return Err(RisError::InvalidAlphabet(format!(
                "phases closer than {DUPLICATE_TOL} (gap {g})"
            )));
        }

        // at most one gap can exceed π since the gaps sum to 2π
        let wide_gap = gaps.iter().position(|&g| g > PI);
        let range = phases[k - 1] - phases[0];
        Ok(Self {
            phases,
            gaps,
            range,
            wide_gap,
        })
    }

    /// `K` phases equally spaced over `[-R/2, R/2]`.
    pub fn equally_separated(range: f64, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(RisError::InvalidAlphabet(format!("need K >= 2, got {k}")));
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
        let step = range / (k - 1) as f64;
        let phases: Vec<f64> = (0..k).map(|i| -range / 2.0 + i as f64 * step).collect();
        Self::new(&phases)
    }

    /// `K` phases uniformly spaced over the full circle, starting at `-π`.
    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(RisError::InvalidAlphabet(format!("need K >= 2, got {k}")));
        }
        let step = TWO_PI / k as f64;
        let phases: Vec<f64> = (0..k).map(|i| -PI + i as f64 * step).collect();
        Self::new(&phases)
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn phase(&self, k: usize) -> f64 {
        self.phases[k]
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// `ω_k`, the gap from phase `k` to phase `k ⊕ 1` (0-based).
    pub fn gap(&self, k: usize) -> f64 {
        self.gaps[k]
    }

    /// `R = φ_K - φ_1`.
    pub fn range(&self) -> f64 {
        self.range
    }

    /// 0-based index `k̄` of the unique gap wider than π, if any.
    pub fn wide_gap_index(&self) -> Option<usize> {
        self.wide_gap
    }

    /// 0-based `k ⊕ 1`.
    pub fn next(&self, k: usize) -> usize {
        if k + 1 == self.len() {
            0
        } else {
            k + 1
        }
    }

    /// 0-based `k ⊖ 1`.
    pub fn prev(&self, k: usize) -> usize {
        if k == 0 {
            self.len() - 1
        } else {
            k - 1
        }
    }

    /// Unit phasors `e^{jφ_k}`.
    pub fn phasors(&self) -> Vec<Complex64> {
        self.phases.iter().map(|&p| Complex64::cis(p)).collect()
    }
}

/// Channel coefficients `h_n = β_n e^{jα_n}` for the direct link (`n = 0`)
/// and each of the `N` RIS elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel")]
pub struct ChannelRealization {
    beta: Vec<f64>,
    alpha: Vec<f64>,
}

#[derive(Deserialize)]
struct RawChannel {
    beta: Vec<f64>,
    alpha: Vec<f64>,
}

impl TryFrom<RawChannel> for ChannelRealization {
    type Error = RisError;

    fn try_from(raw: RawChannel) -> Result<Self> {
        Self::new(raw.beta, raw.alpha)
    }
}

impl ChannelRealization {
    /// Validates magnitudes and stores the phases wrapped into `[-π, π)`.
    pub fn new(beta: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if beta.len() != alpha.len() {
            return Err(RisError::Dimension {
                expected: beta.len(),
                actual: alpha.len(),
            });
        }
        if beta.len() < 2 {
            return Err(RisError::Domain(
                "a channel needs the direct link and at least one element".into(),
            ));
        }
        if let Some(b) = beta.iter().find(|b| !b.is_finite() || **b < 0.0) {
            return Err(RisError::Domain(format!(
                "magnitude {b} must be finite and >= 0"
            )));
        }
        if let Some(a) = alpha.iter().find(|a| !a.is_finite()) {
            return Err(RisError::Domain(format!("phase {a} must be finite")));
        }
        let alpha = alpha.into_iter().map(wrap_pi).collect();
        Ok(Self { beta, alpha })
    }

    /// Builds a realization from complex coefficients `h_0..h_N`.
    pub fn from_coefficients(h: &[Complex64]) -> Result<Self> {
        let beta = h.iter().map(|z| z.norm()).collect();
        let alpha = h.iter().map(|z| z.arg()).collect();
        Self::new(beta, alpha)
    }

    /// Number of RIS elements `N`.
    pub fn n_elements(&self) -> usize {
        self.beta.len() - 1
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `h_n` for `n = 0..=N`.
    pub fn coefficient(&self, n: usize) -> Complex64 {
        Complex64::from_polar(self.beta[n], self.alpha[n])
    }

    /// All coefficients `h_0..h_N`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        (0..self.beta.len()).map(|n| self.coefficient(n)).collect()
    }

    /// `Σ_{n=0}^{N} β_n`, the square root of the continuous optimum.
    pub fn magnitude_sum(&self) -> f64 {
        self.beta.iter().sum()
    }
}

/// Per-element phase selection (0-based indices into a [`PhaseSet`]) and
/// ON/OFF gains.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RisConfig {
    pub theta_idx: Vec<usize>,
    pub on: Vec<bool>,
}

impl RisConfig {
    pub fn new(theta_idx: Vec<usize>, on: Vec<bool>) -> Result<Self> {
        if theta_idx.len() != on.len() {
            return Err(RisError::Dimension {
                expected: theta_idx.len(),
                actual: on.len(),
            });
        }
        Ok(Self { theta_idx, on })
    }

    /// Every element ON with the given phases.
    pub fn all_on(theta_idx: Vec<usize>) -> Self {
        let on = vec![true; theta_idx.len()];
        Self { theta_idx, on }
    }

    pub fn len(&self) -> usize {
        self.theta_idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_idx.is_empty()
    }

    /// Gains `β_n^r` as 0/1 integers.
    pub fn gains(&self) -> Vec<u8> {
        self.on.iter().map(|&b| u8::from(b)).collect()
    }

    /// 1-based phase indices.
    pub fn theta_idx_one_based(&self) -> Vec<usize> {
        self.theta_idx.iter().map(|k| k + 1).collect()
    }

    pub fn angles(&self, set: &PhaseSet) -> Vec<f64> {
        self.theta_idx.iter().map(|&k| set.phase(k)).collect()
    }
}

/// Result of a solver: the chosen configuration, its received vector and
/// power, and instrumentation counters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub config: RisConfig,
    pub g: Complex64,
    pub objective: f64,
    /// Event angles crossed by a sweep (0 for non-sweep solvers).
    pub events_processed: u64,
    /// Complex vector additions spent building and updating `g`.
    pub complex_additions: u64,
}

pub(crate) fn check_config(
    channel: &ChannelRealization,
    set: &PhaseSet,
    config: &RisConfig,
) -> Result<()> {
    if channel.n_elements() != config.len() {
        return Err(RisError::Dimension {
            expected: channel.n_elements(),
            actual: config.len(),
        });
    }
    if config.on.len() != config.theta_idx.len() {
        return Err(RisError::Dimension {
            expected: config.theta_idx.len(),
            actual: config.on.len(),
        });
    }
    if let Some(k) = config.theta_idx.iter().find(|&&k| k >= set.len()) {
        return Err(RisError::Domain(format!(
            "phase index {k} outside alphabet of size {}",
            set.len()
        )));
    }
    Ok(())
}

/// Received vector `g = h_0 + Σ h_n β_n^r e^{jθ_n}` and power `f = |g|²`.
pub fn objective(
    channel: &ChannelRealization,
    set: &PhaseSet,
    config: &RisConfig,
) -> Result<(Complex64, f64)> {
    check_config(channel, set, config)?;
    let g = received_vector(channel, set, config);
    Ok((g, g.norm_sqr()))
}

pub(crate) fn received_vector(
    channel: &ChannelRealization,
    set: &PhaseSet,
    config: &RisConfig,
) -> Complex64 {
    let mut g = channel.coefficient(0);
    for (n, (&k, &on)) in config.theta_idx.iter().zip(&config.on).enumerate() {
        if on {
            g += Complex64::from_polar(channel.beta[n + 1], channel.alpha[n + 1] + set.phase(k));
        }
    }
    g
}

/// Received power relative to the direct link alone, `f / β_0²`.
pub fn snr_boost(channel: &ChannelRealization, set: &PhaseSet, config: &RisConfig) -> Result<f64> {
    let b0 = channel.beta[0];
    if b0 == 0.0 {
        return Err(RisError::UndefinedBoost);
    }
    let (_, f) = objective(channel, set, config)?;
    Ok(f / (b0 * b0))
}

/// Received power relative to the continuous optimum, `f / (Σ β_n)²`.
pub fn normalized_performance(
    channel: &ChannelRealization,
    set: &PhaseSet,
    config: &RisConfig,
) -> Result<f64> {
    let total = channel.magnitude_sum();
    if total == 0.0 {
        return Err(RisError::DegenerateChannel);
    }
    let (_, f) = objective(channel, set, config)?;
    // rounding can push a perfectly aligned sum a hair above 1
    Ok((f / (total * total)).min(1.0))
}
