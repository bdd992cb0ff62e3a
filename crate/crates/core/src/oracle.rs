//! Brute-force reference solvers for small instances.
//!
//! Every assignment is enumerated in mixed-radix little-endian order (element
//! 1 varies fastest) and `f` is recomputed from scratch for each one. The
//! first maximizer in that order is kept.

use num_complex::Complex64;

use crate::error::{Result, RisError};
use crate::model::{received_vector, ChannelRealization, PhaseSet, RisConfig, SolveOutcome};

/// Maximum number of assignments either oracle will evaluate.
pub const ORACLE_BUDGET: u64 = 10_000_000;

fn search_size(radix: usize, n: usize) -> Result<u64> {
    let size = (radix as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > ORACLE_BUDGET as u128 {
        return Err(RisError::Budget {
            size,
            budget: ORACLE_BUDGET,
        });
    }
    Ok(size as u64)
}

/// Digit `K` of the ON/OFF radix means OFF.
fn enumerate(channel: &ChannelRealization, set: &PhaseSet, radix: usize) -> Result<SolveOutcome> {
    let n = channel.n_elements();
    let k = set.len();
    let size = search_size(radix, n)?;
    let h = channel.coefficients();
    let phasors = set.phasors();

    let mut digits = vec![0usize; n];
    let mut best_digits = digits.clone();
    let mut best_power = f64::NEG_INFINITY;
    for step in 0..size {
        if step > 0 {
            for d in digits.iter_mut() {
                *d += 1;
                if *d < radix {
                    break;
                }
                *d = 0;
            }
        }
        let mut g: Complex64 = h[0];
        for (hn, &d) in h[1..].iter().zip(&digits) {
            if d < k {
                g += hn * phasors[d];
            }
        }
        let power = g.norm_sqr();
        if power > best_power {
            best_power = power;
            best_digits.clone_from(&digits);
        }
    }

    let parked = set.wide_gap_index().map_or(0, |w| set.next(w));
    let config = RisConfig {
        theta_idx: best_digits
            .iter()
            .map(|&d| if d < k { d } else { parked })
            .collect(),
        on: best_digits.iter().map(|&d| d < k).collect(),
    };
    let g = received_vector(channel, set, &config);
    Ok(SolveOutcome {
        config,
        g,
        objective: g.norm_sqr(),
        events_processed: size,
        complex_additions: size * n as u64,
    })
}

/// Best of all `K^N` phase assignments with every element ON.
pub fn exhaustive_all_on(channel: &ChannelRealization, set: &PhaseSet) -> Result<SolveOutcome> {
    enumerate(channel, set, set.len())
}

/// Best of all `(K+1)^N` assignments where each element is OFF or takes one
/// of the `K` phases. OFF elements are reported at `φ_{k̄⊕1}` (index 0 if the
/// alphabet has no gap wider than π).
pub fn exhaustive_on_off(channel: &ChannelRealization, set: &PhaseSet) -> Result<SolveOutcome> {
    enumerate(channel, set, set.len() + 1)
}
