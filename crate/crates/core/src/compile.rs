//! Compilation of instances into [`FlatModel`]s.
//!
//! Encodings:
//!
//! * bin packing: `x[i][j]` puts item `i` into bin `j` (only `j <= i`, which
//!   removes bin-relabelling symmetry), `u[j]` marks bin `j` used, used bins
//!   are a prefix, and `cap * bins >= sum(weights)` is posted as an implied
//!   bound.
//! * knapsack: one 0/1 variable per item, a capacity row and the objective
//!   link.
//! * jobshop: one start time per operation, job precedences as linear rows,
//!   and one disjunction per pair of operations sharing a machine.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{FlatModel, Instance, Linear, ModelBuilder, ProblemClass, Sense, VarId};

pub(crate) fn check_params(instance: &Instance) -> Result<()> {
    match instance.class {
        ProblemClass::BinPacking => {
            let cap = instance.int_param("capacity")?;
            if cap < 1 {
                return Err(Error::validation("capacity", "must be positive"));
            }
            let weights = instance.list_param("weights")?;
            if weights.is_empty() {
                return Err(Error::validation("weights", "no items"));
            }
            if let Some(w) = weights.iter().find(|&&w| w < 1 || w > cap) {
                return Err(Error::validation("weights", format!("weight {w} outside 1..={cap}")));
            }
        }
        ProblemClass::Knapsack => {
            let cap = instance.int_param("capacity")?;
            if cap < 0 {
                return Err(Error::validation("capacity", "must be non-negative"));
            }
            let values = instance.list_param("values")?;
            let weights = instance.list_param("weights")?;
            if values.is_empty() {
                return Err(Error::validation("values", "no items"));
            }
            if values.len() != weights.len() {
                return Err(Error::validation("weights", "length differs from values"));
            }
            if values.iter().any(|&v| v < 1) {
                return Err(Error::validation("values", "values must be positive"));
            }
            if weights.iter().any(|&w| w < 1) {
                return Err(Error::validation("weights", "weights must be positive"));
            }
        }
        ProblemClass::Jobshop => {
            let n_machines = instance.int_param("n_machines")?;
            if n_machines < 1 {
                return Err(Error::validation("n_machines", "must be positive"));
            }
            let durations = instance.nested_param("durations")?;
            let machines = instance.nested_param("machines")?;
            if durations.is_empty() {
                return Err(Error::validation("durations", "no jobs"));
            }
            if durations.len() != machines.len() || durations.iter().zip(machines).any(|(d, m)| d.len() != m.len()) {
                return Err(Error::validation("machines", "shape differs from durations"));
            }
            if durations.iter().any(|job| job.is_empty()) {
                return Err(Error::validation("durations", "job without operations"));
            }
            if durations.iter().flatten().any(|&d| d < 1) {
                return Err(Error::validation("durations", "durations must be positive"));
            }
            if machines.iter().flatten().any(|&m| m < 0 || m >= n_machines) {
                return Err(Error::validation("machines", format!("machine index outside 0..{n_machines}")));
            }
        }
    }
    Ok(())
}

/// Builds the flat constraint system of a valid instance. The objective
/// variable's domain is the instance's original objective domain.
pub fn compile(instance: &Instance) -> Result<FlatModel> {
    check_params(instance)?;
    let (lb, ub) = (instance.objective_lb, instance.objective_ub);
    if lb > ub {
        return Err(Error::validation("objective_lb", "exceeds objective_ub"));
    }
    let model = match instance.class {
        ProblemClass::BinPacking => {
            bin_packing(instance.int_param("capacity")?, instance.list_param("weights")?, lb, ub)
        }
        ProblemClass::Knapsack => knapsack(
            instance.int_param("capacity")?,
            instance.list_param("values")?,
            instance.list_param("weights")?,
            lb,
            ub,
        ),
        ProblemClass::Jobshop => {
            jobshop(instance.nested_param("durations")?, instance.nested_param("machines")?, lb, ub)
        }
    };
    debug_assert!(model.validate().is_ok());
    Ok(model)
}

fn bin_packing(capacity: i64, weights: &[i64], lb: i64, ub: i64) -> FlatModel {
    let n = weights.len();
    let mut b = ModelBuilder::new();
    let assign: Vec<Vec<VarId>> =
        (0..n).map(|i| (0..=i).map(|j| b.var(format!("x[{i}][{j}]"), 0, 1)).collect()).collect();
    let used: Vec<VarId> = (0..n).map(|j| b.var(format!("u[{j}]"), 0, 1)).collect();
    let bins = b.var("bins", lb, ub);

    for row in &assign {
        b.post(Linear::eq(row.iter().map(|&x| (1, x)).collect(), 1));
    }
    for j in 0..n {
        let mut terms: Vec<(i64, VarId)> = (j..n).map(|i| (weights[i], assign[i][j])).collect();
        terms.push((-capacity, used[j]));
        b.post(Linear::le(terms, 0));
    }
    for j in 1..n {
        b.post(Linear::ge(vec![(1, used[j - 1]), (-1, used[j])], 0));
    }
    let mut link: Vec<(i64, VarId)> = used.iter().map(|&u| (-1, u)).collect();
    link.push((1, bins));
    b.post(Linear::eq(link, 0));
    b.post(Linear::ge(vec![(capacity, bins)], weights.iter().sum()));
    b.build(bins, Sense::Minimize)
}

fn knapsack(capacity: i64, values: &[i64], weights: &[i64], lb: i64, ub: i64) -> FlatModel {
    let mut b = ModelBuilder::new();
    let take: Vec<VarId> = (0..values.len()).map(|i| b.var(format!("x[{i}]"), 0, 1)).collect();
    let profit = b.var("profit", lb, ub);
    b.post(Linear::le(weights.iter().zip(&take).map(|(&w, &x)| (w, x)).collect(), capacity));
    let mut link: Vec<(i64, VarId)> = values.iter().zip(&take).map(|(&v, &x)| (v, x)).collect();
    link.push((-1, profit));
    b.post(Linear::eq(link, 0));
    b.build(profit, Sense::Maximize)
}

fn jobshop(durations: &[Vec<i64>], machines: &[Vec<i64>], lb: i64, ub: i64) -> FlatModel {
    let horizon: i64 = durations.iter().flatten().sum();
    let mut b = ModelBuilder::new();
    let starts: Vec<Vec<VarId>> = durations
        .iter()
        .enumerate()
        .map(|(j, ops)| ops.iter().enumerate().map(|(k, &d)| b.var(format!("s[{j}][{k}]"), 0, horizon - d)).collect())
        .collect();
    let makespan = b.var("makespan", lb, ub);

    for (j, ops) in durations.iter().enumerate() {
        for k in 1..ops.len() {
            b.post(Linear::ge(vec![(1, starts[j][k]), (-1, starts[j][k - 1])], ops[k - 1]));
        }
        let last = ops.len() - 1;
        b.post(Linear::ge(vec![(1, makespan), (-1, starts[j][last])], ops[last]));
    }

    let mut ops_by_machine: Vec<(i64, usize, usize)> = Vec::new();
    for (j, ms) in machines.iter().enumerate() {
        for (k, &m) in ms.iter().enumerate() {
            ops_by_machine.push((m, j, k));
        }
    }
    ops_by_machine.sort_unstable();
    for (a_idx, &(ma, ja, ka)) in ops_by_machine.iter().enumerate() {
        for &(mb, jb, kb) in &ops_by_machine[a_idx + 1..] {
            if mb != ma {
                break;
            }
            if ja == jb {
                // same job: already ordered by precedence
                continue;
            }
            let (sa, sb) = (starts[ja][ka], starts[jb][kb]);
            // a before b, or b before a
            b.post_either(
                Linear::le(vec![(1, sa), (-1, sb)], -durations[ja][ka]),
                Linear::le(vec![(1, sb), (-1, sa)], -durations[jb][kb]),
            );
        }
    }
    b.build(makespan, Sense::Minimize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{bin_packing as bp, jobshop_from, knapsack as ks};
    use crate::model::{Constraint, Relation};

    #[test]
    fn knapsack_encoding() {
        let m = compile(&ks("k", vec![6, 10, 12], vec![1, 2, 3], 5)).unwrap();
        assert_eq!(m.variables.len(), 4);
        assert_eq!(m.constraints.len(), 2);
        assert_eq!(m.sense, Sense::Maximize);
        let Constraint::Linear(cap) = &m.constraints[0] else { panic!() };
        assert_eq!(cap.relation, Relation::Le);
        assert_eq!(cap.rhs, 5);
        let Constraint::Linear(link) = &m.constraints[1] else { panic!() };
        assert_eq!(link.relation, Relation::Eq);
        assert_eq!(link.terms, vec![(6, VarId(0)), (10, VarId(1)), (12, VarId(2)), (-1, VarId(3))]);
        assert_eq!(m.objective_domain(), crate::model::Domain::new(0, 28));
    }

    #[test]
    fn single_task_jobshop_forces_makespan() {
        let m = compile(&jobshop_from("j", vec![vec![4]], vec![vec![0]])).unwrap();
        assert_eq!(m.objective_domain(), crate::model::Domain::new(4, 4));
    }

    #[test]
    fn missing_param_is_named() {
        let mut inst = bp("b", vec![5, 5], 10);
        inst.params.remove("weights");
        match compile(&inst) {
            Err(Error::Validation { param, .. }) => assert_eq!(param, "weights"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overweight_item_rejected() {
        let inst = bp("b", vec![5, 11], 10);
        assert!(matches!(compile(&inst), Err(Error::Validation { .. })));
    }

    #[test]
    fn jobshop_disjunction_count() {
        // 2 jobs x 2 machines: one pair per machine
        let inst = jobshop_from("j", vec![vec![3, 2], vec![2, 4]], vec![vec![0, 1], vec![1, 0]]);
        let m = compile(&inst).unwrap();
        let n = m.constraints.iter().filter(|c| matches!(c, Constraint::Disjunction(..))).count();
        assert_eq!(n, 2);
    }
}
