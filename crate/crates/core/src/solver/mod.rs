//! Depth-first branch-and-bound over interval domains.
//!
//! Search is fully deterministic: the unfixed variable with the smallest
//! domain is split at its midpoint (ties go to the earlier declaration), the
//! lower half is explored first when minimizing and the upper half first
//! when maximizing. Every incumbent with objective `z` tightens the
//! objective domain to values strictly better than `z`.

mod clock;
mod propagate;

use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

#[cfg(feature = "std")]
pub use clock::WallClock;
pub use clock::{Clock, NullClock};
pub use propagate::{propagate, Propagator};

use crate::estimator::BoundaryEstimate;
use crate::model::{Domain, FlatModel, Sense, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveConfig {
    pub node_budget: u64,
    pub time_budget: Duration,
    pub record_timeline: bool,
}

impl SolveConfig {
    pub fn new(node_budget: u64, time_budget: Duration) -> Self {
        SolveConfig { node_budget, time_budget, record_timeline: true }
    }

    pub fn nodes(node_budget: u64) -> Self {
        Self::new(node_budget, Duration::MAX)
    }

    pub fn is_positive(&self) -> bool {
        self.node_budget > 0 && !self.time_budget.is_zero()
    }
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self::new(1_000_000, Duration::from_secs(60))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    /// Search exhausted with an incumbent: it is optimal.
    Optimal,
    /// Budget hit after at least one solution.
    Satisfiable,
    /// Search exhausted without any solution.
    Unsatisfiable,
    /// Budget hit before any solution.
    BudgetExhausted,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Satisfiable => "satisfiable",
            SolveStatus::Unsatisfiable => "unsatisfiable",
            SolveStatus::BudgetExhausted => "budget_exhausted",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Self::Optimal, Self::Satisfiable, Self::Unsatisfiable, Self::BudgetExhausted]
            .into_iter()
            .find(|st| st.as_str() == s)
    }

    pub fn is_complete(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Unsatisfiable)
    }
}

/// One improving solution: objective, time since start, nodes so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incumbent {
    pub objective: i64,
    pub elapsed: Duration,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub best_objective: Option<i64>,
    pub best_assignment: Option<Vec<i64>>,
    pub first_solution: Option<Incumbent>,
    /// Every incumbent in discovery order (only when `record_timeline`).
    pub timeline: Vec<Incumbent>,
    pub nodes_explored: u64,
    pub elapsed: Duration,
    pub fallback_used: bool,
}

struct Node {
    domains: Vec<Domain>,
    changed: Option<VarId>,
}

/// Runs branch-and-bound with the default clock (wall time under `std`,
/// otherwise no time budget).
pub fn solve(model: &FlatModel, config: &SolveConfig) -> SolveResult {
    #[cfg(feature = "std")]
    {
        solve_with_clock(model, config, &WallClock::start())
    }
    #[cfg(not(feature = "std"))]
    {
        solve_with_clock(model, config, &NullClock)
    }
}

pub fn solve_with_clock(model: &FlatModel, config: &SolveConfig, clock: &dyn Clock) -> SolveResult {
    let prop = Propagator::new(model);
    let obj = model.objective;
    let sense = model.sense;

    let mut result = SolveResult {
        status: SolveStatus::Unsatisfiable,
        best_objective: None,
        best_assignment: None,
        first_solution: None,
        timeline: Vec::new(),
        nodes_explored: 0,
        elapsed: Duration::ZERO,
        fallback_used: false,
    };

    let mut stack = vec![Node { domains: model.domains(), changed: None }];
    let mut out_of_budget = false;

    while let Some(mut node) = stack.pop() {
        if result.nodes_explored >= config.node_budget
            || (result.nodes_explored.is_multiple_of(64) && clock.elapsed() >= config.time_budget)
        {
            out_of_budget = true;
            break;
        }
        result.nodes_explored += 1;

        let mut changed: Vec<VarId> = node.changed.into_iter().collect();
        if let Some(best) = result.best_objective {
            let d = node.domains[obj.0];
            let cut = match sense {
                Sense::Minimize => Domain::new(d.lb, d.ub.min(best - 1)),
                Sense::Maximize => Domain::new(d.lb.max(best + 1), d.ub),
            };
            if cut != d {
                node.domains[obj.0] = cut;
                changed.push(obj);
            }
        }
        let ok = if node.changed.is_none() {
            prop.propagate_all(&mut node.domains)
        } else {
            prop.propagate_from(&mut node.domains, &changed)
        };
        if !ok {
            continue;
        }

        match select_variable(&node.domains) {
            None => {
                let assignment: Vec<i64> = node.domains.iter().map(|d| d.lb).collect();
                debug_assert!(model.is_solution(&assignment));
                let inc =
                    Incumbent { objective: assignment[obj.0], elapsed: clock.elapsed(), nodes: result.nodes_explored };
                if result.first_solution.is_none() {
                    result.first_solution = Some(inc);
                }
                if config.record_timeline {
                    result.timeline.push(inc);
                }
                result.best_objective = Some(inc.objective);
                result.best_assignment = Some(assignment);
            }
            Some(v) => {
                let d = node.domains[v.0];
                let mid = d.lb + (d.ub - d.lb) / 2;
                let mut low = node.domains.clone();
                low[v.0] = Domain::new(d.lb, mid);
                let mut high = node.domains;
                high[v.0] = Domain::new(mid + 1, d.ub);
                let (first, second) = match sense {
                    Sense::Minimize => (low, high),
                    Sense::Maximize => (high, low),
                };
                stack.push(Node { domains: second, changed: Some(v) });
                stack.push(Node { domains: first, changed: Some(v) });
            }
        }
    }

    result.elapsed = clock.elapsed();
    result.status = match (out_of_budget, result.best_objective.is_some()) {
        (false, true) => SolveStatus::Optimal,
        (false, false) => SolveStatus::Unsatisfiable,
        (true, true) => SolveStatus::Satisfiable,
        (true, false) => SolveStatus::BudgetExhausted,
    };
    result
}

/// First-fail: smallest unfixed domain, earliest declaration on ties.
fn select_variable(domains: &[Domain]) -> Option<VarId> {
    let mut best: Option<(u64, usize)> = None;
    for (i, d) in domains.iter().enumerate() {
        let size = d.size();
        if size > 1 && best.is_none_or(|(s, _)| size < s) {
            best = Some((size, i));
            if size == 2 {
                break;
            }
        }
    }
    best.map(|(_, i)| VarId(i))
}

/// Which estimated boundaries to post on the objective variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InjectMode {
    /// `z in est_lb..est_ub`.
    Both,
    /// Only the cutting side: the upper bound when minimizing, the lower
    /// bound when maximizing.
    CuttingOnly,
}

impl InjectMode {
    pub fn as_str(self) -> &'static str {
        match self {
            InjectMode::Both => "both",
            InjectMode::CuttingOnly => "upper",
        }
    }
}

/// Copy of `model` with the objective domain intersected with the estimate.
pub fn inject_bounds(model: &FlatModel, est: &BoundaryEstimate, mode: InjectMode) -> FlatModel {
    let mut out = model.clone();
    let var = &mut out.variables[model.objective.0];
    let d = var.domain;
    var.domain = match (mode, model.sense) {
        (InjectMode::Both, _) => d.intersect(Domain::new(est.est_lb, est.est_ub)),
        (InjectMode::CuttingOnly, Sense::Minimize) => Domain::new(d.lb, d.ub.min(est.est_ub)),
        (InjectMode::CuttingOnly, Sense::Maximize) => Domain::new(d.lb.max(est.est_lb), d.ub),
    };
    out
}

/// Solves with injected bounds and reverts to the original domain if that
/// renders the model unsatisfiable. Effort of both runs is accumulated.
pub fn solve_with_fallback(
    model: &FlatModel,
    est: &BoundaryEstimate,
    mode: InjectMode,
    config: &SolveConfig,
) -> SolveResult {
    #[cfg(feature = "std")]
    {
        solve_with_fallback_clock(model, est, mode, config, &WallClock::start())
    }
    #[cfg(not(feature = "std"))]
    {
        solve_with_fallback_clock(model, est, mode, config, &NullClock)
    }
}

pub fn solve_with_fallback_clock(
    model: &FlatModel,
    est: &BoundaryEstimate,
    mode: InjectMode,
    config: &SolveConfig,
    clock: &dyn Clock,
) -> SolveResult {
    let bounded = inject_bounds(model, est, mode);
    let first = solve_with_clock(&bounded, config, clock);
    if first.status != SolveStatus::Unsatisfiable {
        return first;
    }
    let remaining = SolveConfig {
        node_budget: config.node_budget.saturating_sub(first.nodes_explored),
        time_budget: config.time_budget,
        record_timeline: config.record_timeline,
    };
    // the shared clock keeps counting, so elapsed values are cumulative
    let mut second = solve_with_clock(model, &remaining, clock);
    let offset = first.nodes_explored;
    for inc in second.timeline.iter_mut().chain(second.first_solution.as_mut()) {
        inc.nodes += offset;
    }
    second.nodes_explored += offset;
    second.fallback_used = true;
    second
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile;
    use crate::generate::{bin_packing, knapsack};
    use crate::model::{Linear, ModelBuilder};

    #[test]
    fn knapsack_optimum() {
        let m = compile(&knapsack("k", vec![6, 10, 12], vec![1, 2, 3], 5)).unwrap();
        let r = solve(&m, &SolveConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.best_objective, Some(22));
    }

    #[test]
    fn bin_packing_optimum() {
        let m = compile(&bin_packing("b", vec![5, 5, 5, 5], 10)).unwrap();
        let r = solve(&m, &SolveConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.best_objective, Some(2));
    }

    #[test]
    fn contradiction_is_unsat() {
        let mut b = ModelBuilder::new();
        let x = b.var("x", 0, 10);
        b.post(Linear::ge(vec![(1, x)], 3));
        b.post(Linear::le(vec![(1, x)], 2));
        let r = solve(&b.build(x, Sense::Minimize), &SolveConfig::default());
        assert_eq!(r.status, SolveStatus::Unsatisfiable);
        assert_eq!(r.best_objective, None);
    }

    #[test]
    fn budget_exhaustion() {
        let m = compile(&bin_packing("b", vec![5, 5, 5, 5, 7, 3, 2], 10)).unwrap();
        let r = solve(&m, &SolveConfig::nodes(1));
        assert_eq!(r.nodes_explored, 1);
        assert!(matches!(r.status, SolveStatus::BudgetExhausted | SolveStatus::Satisfiable));
    }

    #[test]
    fn timeline_strictly_improves() {
        let m = compile(&bin_packing("b", vec![3, 7, 5, 5, 2, 8, 6, 4], 10)).unwrap();
        let r = solve(&m, &SolveConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.best_objective, Some(4));
        for w in r.timeline.windows(2) {
            assert!(w[1].objective < w[0].objective);
            assert!(w[1].nodes >= w[0].nodes);
        }
        assert_eq!(r.timeline.last().map(|i| i.objective), r.best_objective);
        assert_eq!(r.first_solution, r.timeline.first().copied());
    }

    fn est(lb: i64, ub: i64) -> BoundaryEstimate {
        BoundaryEstimate { est_lb: lb, est_ub: ub, clamped_lb: false, clamped_ub: false, crossed: false }
    }

    #[test]
    fn injection_modes() {
        let mut b = ModelBuilder::new();
        let z = b.var("z", 0, 100);
        let m = b.build(z, Sense::Minimize);
        assert_eq!(inject_bounds(&m, &est(10, 60), InjectMode::Both).objective_domain(), Domain::new(10, 60));
        assert_eq!(inject_bounds(&m, &est(10, 60), InjectMode::CuttingOnly).objective_domain(), Domain::new(0, 60));
        let mut mx = m.clone();
        mx.sense = Sense::Maximize;
        assert_eq!(inject_bounds(&mx, &est(10, 60), InjectMode::CuttingOnly).objective_domain(), Domain::new(10, 100));
        // original untouched
        assert_eq!(m.objective_domain(), Domain::new(0, 100));
    }

    #[test]
    fn fallback_on_inadmissible_cut() {
        let m = compile(&bin_packing("b", vec![5, 5, 5, 5], 10)).unwrap();
        let r = solve_with_fallback(&m, &est(1, 1), InjectMode::Both, &SolveConfig::default());
        assert!(r.fallback_used);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.best_objective, Some(2));

        let r = solve_with_fallback(&m, &est(2, 3), InjectMode::Both, &SolveConfig::default());
        assert!(!r.fallback_used);
        assert_eq!(r.best_objective, Some(2));
    }
}
