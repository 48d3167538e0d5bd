//! Solver study: every held-out instance is solved unbounded, with both
//! estimated boundaries, with the cutting boundary only, and with a fixed
//! cutting boundary halfway between the optimum and the first solution.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compile::compile;
use crate::error::{Error, Result};
use crate::estimator::{estimate_bounds, BoundaryEstimate, TrainedEstimator};
use crate::model::{Instance, ProblemClass, Sense};
use crate::par;
use crate::solver::{solve, solve_with_fallback, Incumbent, InjectMode, SolveConfig, SolveResult, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RunLabel {
    Original,
    Both,
    Upper,
    Fixed,
}

impl RunLabel {
    pub const ALL: [RunLabel; 4] = [RunLabel::Original, RunLabel::Both, RunLabel::Upper, RunLabel::Fixed];

    pub fn as_str(self) -> &'static str {
        match self {
            RunLabel::Original => "original",
            RunLabel::Both => "both",
            RunLabel::Upper => "upper",
            RunLabel::Fixed => "fixed",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.as_str() == s)
    }
}

/// Cutting boundary halfway between optimum and first solution, rounded
/// towards the optimum.
pub fn fixed_upper_bound(z_opt: i64, z_first: i64, sense: Sense) -> i64 {
    match sense {
        Sense::Minimize => z_opt + (z_first - z_opt).div_euclid(2),
        Sense::Maximize => z_opt - (z_opt - z_first).div_euclid(2),
    }
}

/// Percent change of `bounded` relative to `original`; NaN if `original`
/// is zero.
pub fn relative_change(bounded: f64, original: f64) -> f64 {
    if original == 0.0 {
        f64::NAN
    } else {
        (bounded - original) / original * 100.0
    }
}

/// A derived percentage and whether it needed a fallback or is undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub value: f64,
    pub flagged: bool,
}

impl Metric {
    fn undefined() -> Self {
        Metric { value: f64::NAN, flagged: true }
    }

    fn of(value: f64, flagged: bool) -> Self {
        Metric { value, flagged: flagged || value.is_nan() }
    }
}

/// Effort measure along a run: wall time in ms or explored nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Effort {
    Time,
    Nodes,
}

impl Effort {
    fn at(self, inc: &Incumbent) -> f64 {
        match self {
            Effort::Time => millis(inc.elapsed),
            Effort::Nodes => inc.nodes as f64,
        }
    }

    fn total(self, r: &SolveResult) -> f64 {
        match self {
            Effort::Time => millis(r.elapsed),
            Effort::Nodes => r.nodes_explored as f64,
        }
    }
}

pub fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// Effort of the bounded run's first solution relative to the effort the
/// original run needed to reach at least that quality. If it never did, the
/// original run's total effort is used and the metric is flagged.
pub fn equivalent_solution_effort(
    original_timeline: &[Incumbent],
    original_total: f64,
    bounded_first: &Incumbent,
    sense: Sense,
    effort: Effort,
) -> Metric {
    let reached = original_timeline.iter().find(|inc| sense.at_least_as_good(inc.objective, bounded_first.objective));
    match reached {
        Some(inc) => Metric::of(relative_change(effort.at(bounded_first), effort.at(inc)), false),
        None => Metric::of(relative_change(effort.at(bounded_first), original_total), true),
    }
}

pub fn equivalent_solution_time(original: &SolveResult, bounded: &SolveResult, sense: Sense) -> Metric {
    equivalent(original, bounded, sense, Effort::Time)
}

pub fn equivalent_solution_nodes(original: &SolveResult, bounded: &SolveResult, sense: Sense) -> Metric {
    equivalent(original, bounded, sense, Effort::Nodes)
}

fn equivalent(original: &SolveResult, bounded: &SolveResult, sense: Sense, effort: Effort) -> Metric {
    match (original.first_solution, &bounded.first_solution) {
        (Some(_), Some(b)) => equivalent_solution_effort(&original.timeline, effort.total(original), b, sense, effort),
        _ => Metric::undefined(),
    }
}

/// `(1 - z_bounds / z_original) * 100`; `None` if `z_original` is zero.
pub fn quality_of_first(z_bounds_first: i64, z_original_first: i64) -> Option<f64> {
    if z_original_first == 0 {
        return None;
    }
    let (b, o) = (z_bounds_first as i128, z_original_first as i128);
    Some(((o - b) * 100) as f64 / o as f64)
}

/// Relative total effort; defined only when both runs proved optimality.
pub fn time_to_completion(original: &SolveResult, bounded: &SolveResult, effort: Effort) -> Metric {
    if original.status != SolveStatus::Optimal || bounded.status != SolveStatus::Optimal {
        return Metric::undefined();
    }
    Metric::of(relative_change(effort.total(bounded), effort.total(original)), false)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub class: ProblemClass,
    pub instance_id: String,
    pub config: RunLabel,
    pub known_optimum: i64,
    /// Bounds imposed for this run; `None` for the original run.
    pub estimate: Option<BoundaryEstimate>,
    pub result: SolveResult,
    pub eqtime: Option<Metric>,
    pub eqnodes: Option<Metric>,
    pub qof: Option<Metric>,
    pub ttc: Option<Metric>,
    pub ttc_nodes: Option<Metric>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkOutcome {
    pub records: Vec<BenchmarkRecord>,
    /// Instances without a known optimum.
    pub n_skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub solve: SolveConfig,
    /// `Both` runs all four configurations; `CuttingOnly` leaves out the
    /// both-bounds run.
    pub mode: InjectMode,
    pub n_instances: usize,
    pub seed: u64,
}

/// Picks up to `n_instances` solved instances (seeded) and runs every
/// configuration on each. Fails if any instance appears in `training_ids`.
pub fn run_benchmark(
    instances: &[Instance],
    lower: &TrainedEstimator,
    upper: &TrainedEstimator,
    training_ids: &BTreeSet<String>,
    config: &BenchConfig,
) -> Result<BenchmarkOutcome> {
    if let Some(i) = instances.iter().find(|i| training_ids.contains(&i.id)) {
        return Err(Error::Mismatch(format!("instance {} was used for training", i.id)));
    }
    let mut eligible: Vec<&Instance> = instances.iter().filter(|i| i.known_optimum.is_some()).collect();
    let n_skipped = instances.len() - eligible.len();
    eligible.sort_by(|a, b| a.id.cmp(&b.id));
    eligible.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    eligible.truncate(config.n_instances);
    eligible.sort_by(|a, b| a.id.cmp(&b.id));

    let per_instance = par::map(&eligible, |inst| bench_instance(inst, lower, upper, config));
    let mut records = Vec::new();
    for r in per_instance {
        records.extend(r?);
    }
    Ok(BenchmarkOutcome { records, n_skipped })
}

fn bench_instance(
    inst: &Instance,
    lower: &TrainedEstimator,
    upper: &TrainedEstimator,
    config: &BenchConfig,
) -> Result<Vec<BenchmarkRecord>> {
    let model = compile(inst)?;
    let sense = inst.sense();
    let z_opt = inst.known_optimum.expect("filtered");
    let original = solve(&model, &config.solve);
    let estimate = estimate_bounds(lower, upper, inst)?;

    let record =
        |label: RunLabel, est: Option<BoundaryEstimate>, result: SolveResult, flags: Vec<String>| BenchmarkRecord {
            class: inst.class,
            instance_id: inst.id.clone(),
            config: label,
            known_optimum: z_opt,
            estimate: est,
            result,
            eqtime: None,
            eqnodes: None,
            qof: None,
            ttc: None,
            ttc_nodes: None,
            flags,
        };
    let mut out = alloc::vec![record(RunLabel::Original, None, original.clone(), Vec::new())];

    let mut runs: Vec<(RunLabel, Option<(BoundaryEstimate, InjectMode)>)> = Vec::new();
    if config.mode == InjectMode::Both {
        runs.push((RunLabel::Both, Some((estimate, InjectMode::Both))));
    }
    runs.push((RunLabel::Upper, Some((estimate, InjectMode::CuttingOnly))));
    let fixed = original.first_solution.map(|first| {
        let b = fixed_upper_bound(z_opt, first.objective, sense);
        let (lb, ub) = (inst.objective_lb, inst.objective_ub);
        let est = match sense {
            Sense::Minimize => {
                BoundaryEstimate { est_lb: lb, est_ub: b, clamped_lb: false, clamped_ub: false, crossed: false }
            }
            Sense::Maximize => {
                BoundaryEstimate { est_lb: b, est_ub: ub, clamped_lb: false, clamped_ub: false, crossed: false }
            }
        };
        (est, InjectMode::CuttingOnly)
    });
    runs.push((RunLabel::Fixed, fixed));

    for (label, setup) in runs {
        let Some((est, mode)) = setup else {
            out.push(record(label, None, original.clone(), alloc::vec![String::from("no_first_solution")]));
            continue;
        };
        let result = solve_with_fallback(&model, &est, mode, &config.solve);
        let mut flags = Vec::new();
        if label == RunLabel::Fixed && original.first_solution.map(|f| f.objective) == Some(z_opt) {
            flags.push(String::from("fixed_bound_degenerate"));
        }
        let eqtime = equivalent_solution_time(&original, &result, sense);
        let eqnodes = equivalent_solution_nodes(&original, &result, sense);
        let qof = match (result.first_solution, original.first_solution) {
            (Some(b), Some(o)) => {
                quality_of_first(b.objective, o.objective).map_or(Metric::undefined(), |v| Metric::of(v, false))
            }
            _ => Metric::undefined(),
        };
        let ttc = time_to_completion(&original, &result, Effort::Time);
        let ttc_nodes = time_to_completion(&original, &result, Effort::Nodes);
        for (name, m) in
            [("eqtime", eqtime), ("eqnodes", eqnodes), ("qof", qof), ("ttc", ttc), ("ttc_nodes", ttc_nodes)]
        {
            if m.flagged {
                flags.push(format!("{name}_flagged"));
            }
        }
        let mut rec = record(label, Some(est), result, flags);
        rec.eqtime = Some(eqtime);
        rec.eqnodes = Some(eqnodes);
        rec.qof = Some(qof);
        rec.ttc = Some(ttc);
        rec.ttc_nodes = Some(ttc_nodes);
        out.push(rec);
    }
    Ok(out)
}

/// Per (class, configuration) means over the records with a defined metric.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub class: ProblemClass,
    pub config: RunLabel,
    pub n_instances: usize,
    pub n_fallback: usize,
    pub eqtime: Option<f64>,
    pub eqnodes: Option<f64>,
    pub qof: Option<f64>,
    pub ttc: Option<f64>,
    pub ttc_nodes: Option<f64>,
}

pub fn summarize(records: &[BenchmarkRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(ProblemClass, RunLabel)> = records.iter().map(|r| (r.class, r.config)).collect();
    keys.sort_by_key(|&(c, l)| (c.name(), l));
    keys.dedup();
    keys.into_iter()
        .map(|(class, config)| {
            let rs: Vec<&BenchmarkRecord> = records.iter().filter(|r| r.class == class && r.config == config).collect();
            let mean = |get: fn(&BenchmarkRecord) -> Option<Metric>| -> Option<f64> {
                let vals: Vec<f64> =
                    rs.iter().filter_map(|r| get(r)).map(|m| m.value).filter(|v| !v.is_nan()).collect();
                (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
            };
            SummaryRow {
                class,
                config,
                n_instances: rs.len(),
                n_fallback: rs.iter().filter(|r| r.result.fallback_used).count(),
                eqtime: mean(|r| r.eqtime),
                eqnodes: mean(|r| r.eqnodes),
                qof: mean(|r| r.qof),
                ttc: mean(|r| r.ttc),
                ttc_nodes: mean(|r| r.ttc_nodes),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn inc(objective: i64, ms: u64, nodes: u64) -> Incumbent {
        Incumbent { objective, elapsed: Duration::from_millis(ms), nodes }
    }

    fn result(status: SolveStatus, timeline: Vec<Incumbent>, ms: u64, nodes: u64) -> SolveResult {
        SolveResult {
            status,
            best_objective: timeline.last().map(|i| i.objective),
            best_assignment: None,
            first_solution: timeline.first().copied(),
            timeline,
            nodes_explored: nodes,
            elapsed: Duration::from_millis(ms),
            fallback_used: false,
        }
    }

    #[test]
    fn fixed_bound() {
        assert_eq!(fixed_upper_bound(10, 20, Sense::Minimize), 15);
        assert_eq!(fixed_upper_bound(10, 10, Sense::Minimize), 10);
        assert_eq!(fixed_upper_bound(22, 14, Sense::Maximize), 18);
        assert_eq!(fixed_upper_bound(10, 13, Sense::Minimize), 11);
    }

    #[test]
    fn equivalent_time() {
        let original = result(SolveStatus::Optimal, vec![inc(20, 10, 5), inc(12, 100, 40), inc(10, 150, 60)], 300, 90);
        let bounded = result(SolveStatus::Optimal, vec![inc(12, 50, 20)], 80, 30);
        let m = equivalent_solution_time(&original, &bounded, Sense::Minimize);
        assert_eq!(m, Metric { value: -50.0, flagged: false });
        assert_eq!(equivalent_solution_nodes(&original, &bounded, Sense::Minimize).value, -50.0);
        let slower = result(SolveStatus::Optimal, vec![inc(12, 200, 80)], 250, 90);
        assert_eq!(equivalent_solution_time(&original, &slower, Sense::Minimize).value, 100.0);
        assert_eq!(equivalent_solution_time(&original, &original, Sense::Minimize).value, 0.0);
    }

    #[test]
    fn equivalent_time_never_reached() {
        let original = result(SolveStatus::Satisfiable, vec![inc(20, 10, 5)], 200, 100);
        let bounded = result(SolveStatus::Optimal, vec![inc(12, 50, 20)], 80, 30);
        let m = equivalent_solution_time(&original, &bounded, Sense::Minimize);
        assert!(m.flagged);
        assert_eq!(m.value, -75.0);
    }

    #[test]
    fn quality() {
        assert_eq!(quality_of_first(12, 20), Some(40.0));
        assert_eq!(quality_of_first(20, 20), Some(0.0));
        assert!((quality_of_first(20, 12).unwrap() + 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(quality_of_first(3, 0), None);
    }

    #[test]
    fn completion() {
        let original = result(SolveStatus::Optimal, vec![inc(5, 1, 1)], 100, 50);
        let bounded = result(SolveStatus::Optimal, vec![inc(5, 1, 1)], 80, 40);
        assert_eq!(time_to_completion(&original, &bounded, Effort::Time).value, -20.0);
        assert_eq!(time_to_completion(&original, &original, Effort::Nodes).value, 0.0);
        let partial = result(SolveStatus::Satisfiable, vec![inc(5, 1, 1)], 80, 40);
        let m = time_to_completion(&original, &partial, Effort::Time);
        assert!(m.flagged && m.value.is_nan());
    }
}
