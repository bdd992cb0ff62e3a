//! Acceptance criteria. Runs as a plain binary so every criterion prints a
//! PASS/FAIL line even when the run succeeds; exits non-zero on any failure.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ris_core::model::range_limit;
use ris_core::montecarlo::{
    run_experiment, sample_channel, ChannelModelConfig, ExperimentKind, ExperimentSpec,
};
use ris_core::optimal::{algorithm1, algorithm2, verify_optimality_conditions};
use ris_core::oracle::{exhaustive_all_on, exhaustive_on_off};
use ris_core::ratios::{
    approx_ratio_enpq, approx_ratio_npq, placement_perturbation_check, sinc,
    uniform_placement_perturbation_check,
};
use ris_core::{ChannelRealization, Method, PhaseSet, SolveOutcome};

type Verdict = Result<String, String>;

struct Instance {
    channel: ChannelRealization,
    set: PhaseSet,
    solved: SolveOutcome,
    reference: SolveOutcome,
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Random cascaded Rayleigh instances with `(R, K)` drawn from the valid
/// combinations of the given grids.
fn instances(
    count: usize,
    seed: u64,
    ns: std::ops::RangeInclusive<usize>,
    ks: &[usize],
    ranges_deg: &[f64],
    on_off: bool,
) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(ns.clone());
            let k = ks[rng.random_range(0..ks.len())];
            let valid: Vec<f64> = ranges_deg
                .iter()
                .copied()
                .filter(|d| d.to_radians() < range_limit(k))
                .collect();
            let deg = valid[rng.random_range(0..valid.len())];
            let set = PhaseSet::equally_separated(deg.to_radians(), k).unwrap();
            let channel = sample_channel(&ChannelModelConfig::new(n), &mut rng).unwrap();
            let (solved, reference) = if on_off {
                (
                    algorithm2(&channel, &set),
                    exhaustive_on_off(&channel, &set).unwrap(),
                )
            } else {
                (
                    algorithm1(&channel, &set),
                    exhaustive_all_on(&channel, &set).unwrap(),
                )
            };
            Instance {
                channel,
                set,
                solved,
                reference,
            }
        })
        .collect()
}

fn equivalence(inst: &[Instance]) -> Verdict {
    let worst = inst
        .iter()
        .map(|i| rel_err(i.solved.objective, i.reference.objective))
        .fold(0.0, f64::max);
    let detail = format!("{} instances, max rel err {worst:.1e}", inst.len());
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn audit(all_on: &[Instance], on_off: &[Instance]) -> Verdict {
    let mut failed = 0;
    for (group, allow_off) in [(all_on, false), (on_off, true)] {
        for i in group {
            let report =
                verify_optimality_conditions(&i.channel, &i.set, &i.solved.config, allow_off)
                    .map_err(|e| e.to_string())?;
            if !report.passed() {
                failed += 1;
            }
        }
    }
    let detail = format!(
        "{} solutions, {failed} violations",
        all_on.len() + on_off.len()
    );
    if failed == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn complexity(all_on: &[Instance], on_off: &[Instance]) -> Verdict {
    let mut failed = 0;
    let mut peak: f64 = 0.0;
    for (group, extra) in [(all_on, 0), (on_off, 1)] {
        for i in group {
            let n = i.channel.n_elements() as u64;
            let k = i.set.len() as u64;
            let events_ok = i.solved.events_processed <= n * (k + extra);
            let adds_ok = i.solved.complex_additions <= n * (2 * k + 1);
            peak = peak.max(i.solved.complex_additions as f64 / (n * (2 * k + 1)) as f64);
            if !(events_ok && adds_ok) {
                failed += 1;
            }
        }
    }
    let detail = format!("{failed} bound violations, peak additions / N(2K+1) = {peak:.3}");
    if failed == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn spec(
    methods: Vec<Method>,
    deg: f64,
    k: usize,
    n: usize,
    trials: usize,
    seed: u64,
) -> ExperimentSpec {
    ExperimentSpec {
        kind: ExperimentKind::PerfVsN,
        methods,
        ranges_deg: vec![deg],
        num_phases: vec![k],
        n_values: vec![n],
        trials,
        base_seed: seed,
    }
}

fn mean_perf(rows: &[ris_core::montecarlo::TrialRow], method: Method) -> f64 {
    let v: Vec<f64> = rows
        .iter()
        .filter(|r| r.method == method)
        .map(|r| r.normalized_performance)
        .collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn convergence() -> Verdict {
    let model = ChannelModelConfig::new(256);
    let mut ok = true;
    let mut parts = Vec::new();
    for (deg, k) in [(90.0, 2), (90.0, 4), (120.0, 4), (150.0, 2)] {
        let rows = run_experiment(
            &spec(vec![Method::Npq, Method::Enpq], deg, k, 256, 10_000, 2024),
            &model,
        )
        .map_err(|e| e.to_string())?;
        let r = f64::to_radians(deg);
        let dn = mean_perf(&rows, Method::Npq) - approx_ratio_npq(r, k).unwrap().value();
        let de = mean_perf(&rows, Method::Enpq) - approx_ratio_enpq(r, k).unwrap().value();
        ok &= dn.abs() <= 0.01 && de.abs() <= 0.01;
        parts.push(format!("({deg}°,{k}) npq {dn:+.4} enpq {de:+.4}"));
    }
    let detail = parts.join(", ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn enpq_limit() -> Verdict {
    let target = 1.0 / (PI * PI);
    let worst = [2, 4, 8]
        .iter()
        .map(|&k| (approx_ratio_enpq(1e-9, k).unwrap().value() - target).abs())
        .fold(0.0, f64::max);
    let detail = format!("max |E - 1/π²| = {worst:.1e}");
    if worst <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn crossover() -> Verdict {
    let npq8 = |deg: f64| approx_ratio_npq(deg.to_radians(), 8).unwrap().value();
    let enpq2 = |deg: f64| approx_ratio_enpq(deg.to_radians(), 2).unwrap().value();
    let floor = 1.0 / (PI * PI);
    let enpq_wins = (1..115).all(|d| enpq2(d as f64) > npq8(d as f64));
    let floor_wins = (1..57).all(|d| floor > npq8(d as f64));
    let (mut lo, mut hi) = (1.0, 179.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if npq8(mid) < floor {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root_ok = (55.0..=62.0).contains(&lo);
    let detail = format!(
        "ENPQ(K=2) > NPQ(K=8) below 115°: {enpq_wins}, root of 1/π² = NPQ(K=8) at {lo:.2}°"
    );
    if enpq_wins && floor_wins && root_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn placement() -> Verdict {
    let reports = [
        placement_perturbation_check(120f64.to_radians(), 3, 1000, 11),
        placement_perturbation_check(150f64.to_radians(), 4, 1000, 12),
        uniform_placement_perturbation_check(2, 1000, 13),
        uniform_placement_perturbation_check(4, 1000, 14),
    ];
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    for r in reports {
        let r = r.map_err(|e| e.to_string())?;
        ok &= r.passed;
        worst = worst.max(r.max_excess);
    }
    let detail = format!("4 checks x 1000 perturbations, max excess {worst:.1e}");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dominance() -> Verdict {
    let model = ChannelModelConfig::new(64);
    let methods = vec![Method::Npq, Method::Enpq, Method::Alg1, Method::Alg2];
    let rows = run_experiment(&spec(methods, 90.0, 2, 64, 10_000, 99), &model)
        .map_err(|e| e.to_string())?;
    let t = 10_000;
    let f = |m: usize, i: usize| rows[m * t + i].objective;
    let mut order_violations = 0;
    for i in 0..t {
        let tol = 1e-12 * f(3, i);
        if !(f(3, i) >= f(2, i) - tol && f(2, i) >= f(0, i) - tol && f(3, i) >= f(1, i) - tol) {
            order_violations += 1;
        }
    }

    let rows_180 = run_experiment(
        &spec(vec![Method::Alg1, Method::Alg2], 180.0, 4, 64, 10_000, 100),
        &model,
    )
    .map_err(|e| e.to_string())?;
    let g = |m: usize, i: usize| rows_180[m * t + i].objective;
    let worst = (0..t)
        .map(|i| rel_err(g(0, i), g(1, i)))
        .fold(0.0, f64::max);
    let detail = format!(
        "{order_violations} ordering violations; alg1 vs alg2 at 180° max rel diff {worst:.1e}"
    );
    if order_violations == 0 && worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn limit_consistency() -> Verdict {
    let mut worst: f64 = 0.0;
    for k in [2, 3, 4, 6, 8] {
        let v = approx_ratio_npq(range_limit(k) - 1e-9, k).unwrap().value();
        worst = worst.max((v - sinc(1.0 / k as f64).powi(2)).abs());
    }
    let detail = format!("max |E - sinc²(1/K)| = {worst:.1e}");
    if worst <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run(id: usize, name: &str, check: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
        Err(format!(
            "panicked: {:?}",
            p.downcast_ref::<String>()
                .map(String::as_str)
                .or(p.downcast_ref::<&str>().copied())
        ))
    });
    let secs = start.elapsed().as_secs_f64();
    let (tag, detail) = match &verdict {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {id:>2} {tag} {name:<32} [{secs:6.2}s] {detail}");
    verdict.is_ok()
}

fn main() -> ExitCode {
    const DEGS_ALL_ON: [f64; 5] = [60.0, 90.0, 120.0, 180.0, 240.0];
    const DEGS_ON_OFF: [f64; 3] = [60.0, 90.0, 120.0];

    let mut all_on = Vec::new();
    let mut on_off = Vec::new();
    let mut results = Vec::new();
    results.push(run(1, "oracle equivalence, all-ON", || {
        all_on = instances(500, 1, 2..=8, &[2, 3, 4], &DEGS_ALL_ON, false);
        equivalence(&all_on)
    }));
    results.push(run(2, "oracle equivalence, ON/OFF", || {
        on_off = instances(500, 2, 2..=6, &[2, 3], &DEGS_ON_OFF, true);
        equivalence(&on_off)
    }));
    results.push(run(3, "optimality conditions", || audit(&all_on, &on_off)));
    results.push(run(4, "operation counts", || complexity(&all_on, &on_off)));
    results.push(run(5, "closed-form convergence", convergence));
    results.push(run(6, "ENPQ small-range limit", enpq_limit));
    results.push(run(7, "crossover claims", crossover));
    results.push(run(8, "placement optimality", placement));
    results.push(run(9, "dominance and R = 180°", dominance));
    results.push(run(10, "full-circle limit", limit_consistency));

    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
