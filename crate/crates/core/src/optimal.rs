//! Linear-time global optimization by sweeping the direction `μ = g/|g|`
//! of the received vector around the unit circle.
//!
//! For a fixed `μ`, every element independently picks the phase maximizing
//! `cos(φ_k + α_n - ∠μ)`, and (when gains may be switched) turns OFF if even
//! that cosine is negative. Each element's choice only changes at a few
//! boundary angles, so sorting all boundaries and walking them once visits
//! every candidate configuration while updating `g` incrementally.
//!
//! Element `n` selects `φ_k` while `∠μ` lies in the open arc from
//! `α_n + φ_k - ω_{k⊖1}/2` to `α_n + φ_{k⊕1} - ω_k/2`. When the alphabet has
//! a gap `ω_k̄ > π`, the boundary in the middle of that gap is replaced by an
//! OFF arc from `α_n + φ_k̄ + π/2` to `α_n + φ_{k̄⊕1} - π/2`, inside which no
//! phase contributes positively.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, RisError};
use crate::model::{
    check_config, received_vector, wrap_two_pi, ChannelRealization, PhaseSet, RisConfig,
    SolveOutcome,
};
use crate::quantize::ceil_cos;

/// Event angles closer than this are merged into one update step.
pub const MERGE_TOL: f64 = 1e-12;

/// What happens to an element when the sweep crosses one of its boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UpdateKind {
    /// Switch to the given 0-based phase index (element stays ON).
    SetPhase(usize),
    /// Entering the OFF arc: the element leaves `φ_k̄` and is parked at `φ_{k̄⊕1}`.
    TurnOff,
    /// Leaving the OFF arc: the element comes back ON at `φ_{k̄⊕1}`.
    TurnOn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UpdateRecord {
    /// 0-based element index (`n - 1`).
    pub element: usize,
    pub kind: UpdateKind,
}

/// Sorted distinct event angles `0 <= λ_1 < ... < λ_L < 2π` with the updates
/// triggered at each.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventSchedule {
    lambdas: Vec<f64>,
    updates: Vec<Vec<UpdateRecord>>,
}

impl EventSchedule {
    fn from_records(mut records: Vec<(f64, UpdateRecord)>) -> Self {
        records.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut lambdas: Vec<f64> = Vec::new();
        let mut updates: Vec<Vec<UpdateRecord>> = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for (angle, rec) in records {
            match updates.last_mut() {
                Some(group) if angle - last <= MERGE_TOL => group.push(rec),
                _ => {
                    lambdas.push(angle);
                    updates.push(vec![rec]);
                }
            }
            last = angle;
        }
        Self { lambdas, updates }
    }

    /// Number of distinct event angles `L`.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `N(λ_l)` for 0-based `l`.
    pub fn updates(&self, l: usize) -> &[UpdateRecord] {
        &self.updates[l]
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[UpdateRecord])> {
        self.lambdas
            .iter()
            .copied()
            .zip(self.updates.iter().map(Vec::as_slice))
    }

    /// Total number of update records across all angles.
    pub fn record_count(&self) -> usize {
        self.updates.iter().map(Vec::len).sum()
    }
}

/// One `SetPhase(k)` boundary per element and phase, at
/// `∠s_nk = α_n + φ_k - ω_{k⊖1}/2`.
pub fn build_events_alg1(channel: &ChannelRealization, set: &PhaseSet) -> EventSchedule {
    let alpha = &channel.alpha()[1..];
    let mut records = Vec::with_capacity(alpha.len() * set.len());
    for (n, &a) in alpha.iter().enumerate() {
        for k in 0..set.len() {
            let angle = wrap_two_pi(a + set.phase(k) - set.gap(set.prev(k)) / 2.0);
            records.push((
                angle,
                UpdateRecord {
                    element: n,
                    kind: UpdateKind::SetPhase(k),
                },
            ));
        }
    }
    EventSchedule::from_records(records)
}

/// Like [`build_events_alg1`], except that the boundary inside the wide gap
/// is split into a `TurnOff` at `α_n + φ_k̄ + π/2` and a `TurnOn` at
/// `α_n + φ_{k̄⊕1} - π/2`. Alphabets without a gap wider than π get the
/// plain schedule.
pub fn build_events_alg2(channel: &ChannelRealization, set: &PhaseSet) -> EventSchedule {
    let Some(wide) = set.wide_gap_index() else {
        return build_events_alg1(channel, set);
    };
    let after = set.next(wide);
    let alpha = &channel.alpha()[1..];
    let mut records = Vec::with_capacity(alpha.len() * (set.len() + 1));
    for (n, &a) in alpha.iter().enumerate() {
        for k in (0..set.len()).filter(|&k| k != after) {
            let angle = wrap_two_pi(a + set.phase(k) - set.gap(set.prev(k)) / 2.0);
            records.push((
                angle,
                UpdateRecord {
                    element: n,
                    kind: UpdateKind::SetPhase(k),
                },
            ));
        }
        records.push((
            wrap_two_pi(a + set.phase(wide) + FRAC_PI_2),
            UpdateRecord {
                element: n,
                kind: UpdateKind::TurnOff,
            },
        ));
        records.push((
            wrap_two_pi(a + set.phase(after) - FRAC_PI_2),
            UpdateRecord {
                element: n,
                kind: UpdateKind::TurnOn,
            },
        ));
    }
    EventSchedule::from_records(records)
}

/// Per-element best response to a direction `∠μ`: the phase maximizing
/// `cos(φ_k + α_n - ∠μ)` (lowest index on ties) and, with `allow_off`, the
/// gain `⌈cos(θ_n + α_n - ∠μ)⌉`. OFF elements are parked at `φ_{k̄⊕1}`.
pub fn init_config(
    channel: &ChannelRealization,
    set: &PhaseSet,
    mu_angle: f64,
    allow_off: bool,
) -> RisConfig {
    let alpha = &channel.alpha()[1..];
    let parked = set.wide_gap_index().map(|w| set.next(w));
    let mut theta_idx = Vec::with_capacity(alpha.len());
    let mut on = Vec::with_capacity(alpha.len());
    for &a in alpha {
        let (k, c) = best_phase(set, a - mu_angle);
        if allow_off && !ceil_cos(c) {
            theta_idx.push(parked.unwrap_or(k));
            on.push(false);
        } else {
            theta_idx.push(k);
            on.push(true);
        }
    }
    RisConfig { theta_idx, on }
}

/// argmax over `k` of `cos(φ_k + offset)` with the lowest index winning ties.
fn best_phase(set: &PhaseSet, offset: f64) -> (usize, f64) {
    let mut best = (0, (set.phase(0) + offset).cos());
    for k in 1..set.len() {
        let c = (set.phase(k) + offset).cos();
        if c > best.1 {
            best = (k, c);
        }
    }
    best
}

#[derive(Clone)]
struct Sweep<'a> {
    elems: &'a [Complex64],
    phasors: Vec<Complex64>,
    /// `(k̄, k̄⊕1)` when OFF arcs are part of the schedule.
    wide: Option<(usize, usize)>,
    theta: Vec<usize>,
    on: Vec<bool>,
    g: Complex64,
    additions: u64,
}

impl<'a> Sweep<'a> {
    fn new(
        h: &'a [Complex64],
        set: &PhaseSet,
        schedule: &EventSchedule,
        wide: Option<(usize, usize)>,
    ) -> Self {
        let elems = &h[1..];
        let n = elems.len();
        // The state in force just below λ_1 is the one entered at each
        // element's last boundary before 2π.
        let mut last: Vec<Option<UpdateKind>> = vec![None; n];
        for (_, group) in schedule.iter() {
            for rec in group {
                last[rec.element] = Some(rec.kind);
            }
        }
        let mut theta = Vec::with_capacity(n);
        let mut on = Vec::with_capacity(n);
        for kind in last {
            let parked = wide.map_or(0, |(_, after)| after);
            let (k, is_on) = match kind.expect("every element owns at least two boundaries") {
                UpdateKind::SetPhase(k) => (k, true),
                UpdateKind::TurnOff => (parked, false),
                UpdateKind::TurnOn => (parked, true),
            };
            theta.push(k);
            on.push(is_on);
        }

        let phasors = set.phasors();
        let mut g = h[0];
        let mut additions = 0;
        for ((hn, &k), &is_on) in elems.iter().zip(&theta).zip(&on) {
            if is_on {
                g += hn * phasors[k];
                additions += 1;
            }
        }
        Self {
            elems,
            phasors,
            wide,
            theta,
            on,
            g,
            additions,
        }
    }

    fn apply(&mut self, rec: &UpdateRecord, set: &PhaseSet) {
        let n = rec.element;
        let hn = self.elems[n];
        match rec.kind {
            UpdateKind::SetPhase(k) => {
                debug_assert_eq!(self.theta[n], set.prev(k), "element {n} skipped a boundary");
                if self.on[n] {
                    self.g += hn * self.phasors[k];
                    self.g -= hn * self.phasors[self.theta[n]];
                    self.additions += 2;
                }
                self.theta[n] = k;
            }
            UpdateKind::TurnOff => {
                let (wide, after) = self.wide.expect("TurnOff requires a wide gap");
                // The subtraction of h_n e^{jφ_k̄} is only valid if the
                // element actually sits at φ_k̄ when its OFF arc begins.
                assert!(
                    self.on[n] && self.theta[n] == wide,
                    "element {n} entered its OFF arc from phase {} (on = {}), expected {wide}",
                    self.theta[n],
                    self.on[n]
                );
                self.g -= hn * self.phasors[wide];
                self.additions += 1;
                self.on[n] = false;
                self.theta[n] = after;
            }
            UpdateKind::TurnOn => {
                assert!(!self.on[n], "element {n} left an OFF arc while ON");
                self.on[n] = true;
                self.g += hn * self.phasors[self.theta[n]];
                self.additions += 1;
            }
        }
    }

    fn recomputed(&self, h0: Complex64) -> Complex64 {
        let mut g = h0;
        for ((hn, &k), &is_on) in self.elems.iter().zip(&self.theta).zip(&self.on) {
            if is_on {
                g += hn * self.phasors[k];
            }
        }
        g
    }
}

fn run_sweep(
    channel: &ChannelRealization,
    set: &PhaseSet,
    schedule: &EventSchedule,
    wide: Option<(usize, usize)>,
) -> SolveOutcome {
    let h = channel.coefficients();
    let scale = channel.magnitude_sum().max(f64::MIN_POSITIVE);
    let mut sweep = Sweep::new(&h, set, schedule, wide);
    let start = cfg!(debug_assertions).then(|| sweep.clone());

    let mut best_power = sweep.g.norm_sqr();
    let mut best = RisConfig {
        theta_idx: sweep.theta.clone(),
        on: sweep.on.clone(),
    };
    let mut events = 0u64;

    // The arc after λ_L wraps around to the starting arc, so λ_L is skipped.
    for l in 0..schedule.len().saturating_sub(1) {
        for rec in schedule.updates(l) {
            sweep.apply(rec, set);
        }
        events += 1;
        if cfg!(debug_assertions) && events.is_multiple_of(64) {
            let exact = sweep.recomputed(h[0]);
            debug_assert!(
                (exact - sweep.g).norm() <= 1e-9 * scale,
                "incremental g drifted: {} vs {exact}",
                sweep.g
            );
        }
        let power = sweep.g.norm_sqr();
        if power > best_power {
            best_power = power;
            best.theta_idx.clone_from(&sweep.theta);
            best.on.clone_from(&sweep.on);
        }
    }

    if let Some(start) = start {
        let mut closed = sweep.clone();
        if let Some(l) = schedule.len().checked_sub(1) {
            for rec in schedule.updates(l) {
                closed.apply(rec, set);
            }
        }
        debug_assert_eq!(closed.theta, start.theta, "sweep did not close");
        debug_assert_eq!(closed.on, start.on, "sweep did not close");
        debug_assert!((closed.g - start.g).norm() <= 1e-9 * scale);
    }

    let g = received_vector(channel, set, &best);
    SolveOutcome {
        config: best,
        g,
        objective: g.norm_sqr(),
        events_processed: events,
        complex_additions: sweep.additions,
    }
}

/// Global maximizer of `|g|²` over all phase assignments with every element ON.
pub fn algorithm1(channel: &ChannelRealization, set: &PhaseSet) -> SolveOutcome {
    let schedule = build_events_alg1(channel, set);
    run_sweep(channel, set, &schedule, None)
}

/// Global maximizer of `|g|²` over phases and ON/OFF gains. Alphabets with no
/// gap wider than π never benefit from switching elements off, so they are
/// solved by [`algorithm1`].
pub fn algorithm2(channel: &ChannelRealization, set: &PhaseSet) -> SolveOutcome {
    match set.wide_gap_index() {
        None => algorithm1(channel, set),
        Some(wide) => {
            let schedule = build_events_alg2(channel, set);
            run_sweep(channel, set, &schedule, Some((wide, set.next(wide))))
        }
    }
}

/// Tolerance on cosines when checking best-response conditions.
pub const CONDITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ElementCheck {
    /// An ON element uses a phase maximizing `cos(φ_k + α_n - ∠μ)`.
    pub phase_ok: bool,
    /// The gain equals `⌈cos(·)⌉` of the best phase (only checked when OFF
    /// is permitted).
    pub gain_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityReport {
    pub mu_angle: f64,
    pub elements: Vec<ElementCheck>,
}

impl OptimalityReport {
    pub fn passed(&self) -> bool {
        self.elements.iter().all(|e| e.phase_ok && e.gain_ok)
    }

    /// 0-based indices of elements violating a condition.
    pub fn failures(&self) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| !(e.phase_ok && e.gain_ok))
            .map(|(n, _)| n)
            .collect()
    }
}

/// Checks the necessary best-response conditions at `μ = g/|g|` for every
/// element of `config`.
pub fn verify_optimality_conditions(
    channel: &ChannelRealization,
    set: &PhaseSet,
    config: &RisConfig,
    allow_off: bool,
) -> Result<OptimalityReport> {
    check_config(channel, set, config)?;
    let g = received_vector(channel, set, config);
    if g.norm() <= f64::MIN_POSITIVE {
        return Err(RisError::UndefinedDirection);
    }
    let mu = g.arg();
    let beta = &channel.beta()[1..];
    let alpha = &channel.alpha()[1..];
    let elements = (0..config.len())
        .map(|n| {
            if beta[n] == 0.0 {
                return ElementCheck {
                    phase_ok: true,
                    gain_ok: true,
                };
            }
            let offset = alpha[n] - mu;
            let (_, best) = best_phase(set, offset);
            let on = config.on[n];
            let own = (set.phase(config.theta_idx[n]) + offset).cos();
            let phase_ok = !on || own >= best - CONDITION_TOL;
            let gain_ok = if !allow_off || best > CONDITION_TOL {
                on
            } else if best < -CONDITION_TOL {
                !on
            } else {
                true
            };
            ElementCheck { phase_ok, gain_ok }
        })
        .collect();
    Ok(OptimalityReport {
        mu_angle: mu,
        elements,
    })
}
