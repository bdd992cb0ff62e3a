//! Continuous relaxation and the two polar quantizers.
//!
//! NPQ projects the continuous per-element optimum `α_0 - α_n` onto the
//! alphabet with midpoint thresholds; ENPQ additionally switches an element
//! OFF whenever its quantization error points more than π/2 away.

use crate::error::{Result, RisError};
use crate::model::{range_limit, wrap_pi, ChannelRealization, PhaseSet, RisConfig};

/// Continuous solution, quantized configuration and per-element error
/// `δ_n = θ_n - θ_n^cont` wrapped to `[-π, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerOutput {
    pub theta_cont: Vec<f64>,
    pub config: RisConfig,
    pub delta: Vec<f64>,
}

/// `θ_n^cont = α_0 - α_n`, which aligns every element with the direct link.
pub fn continuous_solution(channel: &ChannelRealization) -> Vec<f64> {
    let alpha = channel.alpha();
    alpha[1..].iter().map(|&a| wrap_pi(alpha[0] - a)).collect()
}

/// Threshold rule over the sorted alphabet: the first interval starts at
/// `-π`, interior boundaries are the midpoints `(φ_k + φ_{k+1})/2` and the
/// last phase takes everything else. Midpoints belong to the upper phase.
///
/// The wrap gap is split at ±π rather than at its circular midpoint. For
/// alphabets symmetric about zero both coincide.
pub fn npq_index(set: &PhaseSet, theta: f64) -> usize {
    let phases = set.phases();
    let mut k = 0;
    while k + 1 < phases.len() && theta >= 0.5 * (phases[k] + phases[k + 1]) {
        k += 1;
    }
    k
}

fn quantize_with(channel: &ChannelRealization, set: &PhaseSet, allow_off: bool) -> QuantizerOutput {
    let theta_cont = continuous_solution(channel);
    let n = theta_cont.len();
    let mut theta_idx = Vec::with_capacity(n);
    let mut on = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    for &t in &theta_cont {
        let k = npq_index(set, t);
        let d = wrap_pi(set.phase(k) - t);
        theta_idx.push(k);
        on.push(!allow_off || ceil_cos(d.cos()));
        delta.push(d);
    }
    QuantizerOutput {
        theta_cont,
        config: RisConfig { theta_idx, on },
        delta,
    }
}

/// `⌈c⌉` for `c = cos δ ∈ [-1, 1]` as an ON flag; `⌈0⌉ = 0` is OFF.
pub(crate) fn ceil_cos(c: f64) -> bool {
    c > 0.0
}

/// Nonuniform polar quantization: every element ON at its NPQ phase.
pub fn npq(channel: &ChannelRealization, set: &PhaseSet) -> QuantizerOutput {
    quantize_with(channel, set, false)
}

/// Extended NPQ: NPQ phases with gain `⌈cos δ_n⌉`.
pub fn enpq(channel: &ChannelRealization, set: &PhaseSet) -> QuantizerOutput {
    quantize_with(channel, set, true)
}

/// `⌊x⌉ = sgn(x)⌊|x| + 0.5⌋`.
fn round_half_away(x: f64) -> f64 {
    x.signum() * (x.abs() + 0.5).floor()
}

/// Index form of [`npq_rounding`]: 0-based position in the equally
/// separated alphabet.
pub fn npq_rounding_index(theta: f64, range: f64, k: usize) -> Result<usize> {
    check_rounding_domain(range, k)?;
    let half = range / 2.0;
    if theta >= half {
        return Ok(k - 1);
    }
    if theta < -half {
        return Ok(0);
    }
    let step = range / (k - 1) as f64;
    let r = round_half_away((theta + half) / step);
    Ok((r as usize).min(k - 1))
}

/// Closed-form NPQ decision for the equally separated alphabet over
/// `[-R/2, R/2]`: clamp outside the range, round to the grid inside it.
pub fn npq_rounding(theta: f64, range: f64, k: usize) -> Result<f64> {
    check_rounding_domain(range, k)?;
    let half = range / 2.0;
    if theta >= half {
        return Ok(half);
    }
    if theta < -half {
        return Ok(-half);
    }
    let step = range / (k - 1) as f64;
    Ok(round_half_away((theta + half) / step) * step - half)
}

fn check_rounding_domain(range: f64, k: usize) -> Result<()> {
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
    Ok(())
}
