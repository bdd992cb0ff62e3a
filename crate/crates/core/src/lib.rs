//! Discrete phase-shift selection for reconfigurable intelligent surfaces
//! whose phase shifters only cover a limited range.
//!
//! The objective is the received power `|h_0 + Σ h_n e^{jθ_n}|²` with each
//! `θ_n` drawn from a finite alphabet and, optionally, each element switched
//! off. [`optimal`] finds the global optimum in `O(NK log NK)`,
//! [`quantize`] gives the cheap per-element baselines and [`oracle`] checks
//! both by enumeration on small instances.

pub mod error;
pub mod model;
pub mod montecarlo;
pub mod optimal;
pub mod oracle;
pub mod quantize;
pub mod ratios;

use serde::Serialize;

pub use error::{Result, RisError};
pub use model::{
    normalized_performance, objective, snr_boost, ChannelRealization, PhaseSet, RisConfig,
    SolveOutcome,
};

/// Every solver the library exposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Npq,
    Enpq,
    Alg1,
    Alg2,
    Oracle,
    #[serde(rename = "oracle-onoff")]
    OracleOnOff,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Npq,
        Method::Enpq,
        Method::Alg1,
        Method::Alg2,
        Method::Oracle,
        Method::OracleOnOff,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Npq => "npq",
            Method::Enpq => "enpq",
            Method::Alg1 => "alg1",
            Method::Alg2 => "alg2",
            Method::Oracle => "oracle",
            Method::OracleOnOff => "oracle-onoff",
        }
    }

    /// Whether the method runs in polynomial time (usable in sweeps).
    pub fn is_scalable(self) -> bool {
        !matches!(self, Method::Oracle | Method::OracleOnOff)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = RisError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| RisError::Config(format!("unknown method '{s}'")))
    }
}

/// Runs `method` on one channel. Quantizers report zero events and one
/// complex addition per element.
pub fn solve(method: Method, channel: &ChannelRealization, set: &PhaseSet) -> Result<SolveOutcome> {
    let quantized = |config: RisConfig| {
        let g = model::received_vector(channel, set, &config);
        SolveOutcome {
            config,
            g,
            objective: g.norm_sqr(),
            events_processed: 0,
            complex_additions: channel.n_elements() as u64,
        }
    };
    match method {
        Method::Npq => Ok(quantized(quantize::npq(channel, set).config)),
        Method::Enpq => Ok(quantized(quantize::enpq(channel, set).config)),
        Method::Alg1 => Ok(optimal::algorithm1(channel, set)),
        Method::Alg2 => Ok(optimal::algorithm2(channel, set)),
        Method::Oracle => oracle::exhaustive_all_on(channel, set),
        Method::OracleOnOff => oracle::exhaustive_on_off(channel, set),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert!("alg3".parse::<Method>().is_err());
    }
}
