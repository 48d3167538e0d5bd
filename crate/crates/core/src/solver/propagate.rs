//! Bounds-consistency propagation over linear rows and binary disjunctions.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Constraint, Domain, FlatModel, Linear, Relation, VarId};

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

fn clamp_i64(v: i128) -> i64 {
    v.clamp(i128::from(i64::MIN), i128::from(i64::MAX)) as i64
}

fn term_min(c: i64, d: Domain) -> i128 {
    let c = i128::from(c);
    if c > 0 {
        c * i128::from(d.lb)
    } else {
        c * i128::from(d.ub)
    }
}

fn term_max(c: i64, d: Domain) -> i128 {
    let c = i128::from(c);
    if c > 0 {
        c * i128::from(d.ub)
    } else {
        c * i128::from(d.lb)
    }
}

/// Activity range `[min, max]` of the left-hand side.
pub(crate) fn activity(l: &Linear, domains: &[Domain]) -> (i128, i128) {
    l.terms.iter().fold((0, 0), |(lo, hi), &(c, v)| {
        let d = domains[v.0];
        (lo + term_min(c, d), hi + term_max(c, d))
    })
}

/// The row cannot hold under the current bounds.
pub(crate) fn disentailed(l: &Linear, domains: &[Domain]) -> bool {
    let (lo, hi) = activity(l, domains);
    let rhs = i128::from(l.rhs);
    match l.relation {
        Relation::Le => lo > rhs,
        Relation::Ge => hi < rhs,
        Relation::Eq => lo > rhs || hi < rhs,
    }
}

/// `sum(sign * c * x) <= rhs` pass. Returns `None` on failure, otherwise
/// whether any bound moved.
fn tighten_le(
    terms: &[(i64, VarId)],
    sign: i64,
    rhs: i128,
    domains: &mut [Domain],
    changed: &mut Vec<VarId>,
) -> Option<bool> {
    let min_sum: i128 = terms.iter().map(|&(c, v)| term_min(sign * c, domains[v.0])).sum();
    if min_sum > rhs {
        return None;
    }
    let mut moved = false;
    for &(c, v) in terms {
        let c = sign * c;
        let d = domains[v.0];
        let slack = rhs - (min_sum - term_min(c, d));
        let cc = i128::from(c);
        let nd = if c > 0 {
            Domain::new(d.lb, d.ub.min(clamp_i64(div_floor(slack, cc))))
        } else {
            Domain::new(d.lb.max(clamp_i64(div_ceil(slack, cc))), d.ub)
        };
        if nd != d {
            if nd.is_empty() {
                return None;
            }
            domains[v.0] = nd;
            changed.push(v);
            moved = true;
        }
    }
    Some(moved)
}

/// Bounds consistency for a single row, to its own fixpoint.
pub(crate) fn propagate_linear(l: &Linear, domains: &mut [Domain], changed: &mut Vec<VarId>) -> bool {
    let rhs = i128::from(l.rhs);
    loop {
        let moved = match l.relation {
            Relation::Le => tighten_le(&l.terms, 1, rhs, domains, changed),
            Relation::Ge => tighten_le(&l.terms, -1, -rhs, domains, changed),
            Relation::Eq => tighten_le(&l.terms, 1, rhs, domains, changed)
                .and_then(|a| tighten_le(&l.terms, -1, -rhs, domains, changed).map(|b| a || b)),
        };
        match moved {
            None => return false,
            // a single inequality is idempotent after one pass
            Some(true) if l.relation == Relation::Eq => continue,
            Some(_) => return true,
        }
    }
}

/// Variable-to-constraint watch lists for a model.
#[derive(Debug, Clone)]
pub struct Propagator<'m> {
    model: &'m FlatModel,
    watches: Vec<Vec<usize>>,
}

impl<'m> Propagator<'m> {
    pub fn new(model: &'m FlatModel) -> Self {
        let mut watches = vec![Vec::new(); model.variables.len()];
        for (ci, c) in model.constraints.iter().enumerate() {
            for l in c.linears() {
                for &(_, v) in &l.terms {
                    if watches[v.0].last() != Some(&ci) {
                        watches[v.0].push(ci);
                    }
                }
            }
        }
        for w in &mut watches {
            w.dedup();
        }
        Propagator { model, watches }
    }

    /// Propagates every constraint to a common fixpoint. Returns `false` iff
    /// some domain became empty.
    pub fn propagate_all(&self, domains: &mut [Domain]) -> bool {
        let all: Vec<usize> = (0..self.model.constraints.len()).collect();
        self.run(domains, all)
    }

    /// Propagates starting from constraints that watch `changed`.
    pub fn propagate_from(&self, domains: &mut [Domain], changed: &[VarId]) -> bool {
        let mut queue = Vec::new();
        for v in changed {
            queue.extend_from_slice(&self.watches[v.0]);
        }
        self.run(domains, queue)
    }

    fn run(&self, domains: &mut [Domain], mut queue: Vec<usize>) -> bool {
        if domains.iter().any(Domain::is_empty) {
            return false;
        }
        let mut queued = vec![false; self.model.constraints.len()];
        // FIFO over a growing vector: process in insertion order
        queue.retain(|&c| !core::mem::replace(&mut queued[c], true));
        let mut head = 0;
        let mut changed = Vec::new();
        while head < queue.len() {
            let ci = queue[head];
            head += 1;
            queued[ci] = false;
            changed.clear();
            let ok = match &self.model.constraints[ci] {
                Constraint::Linear(l) => propagate_linear(l, domains, &mut changed),
                Constraint::Disjunction(a, b) => match (disentailed(a, domains), disentailed(b, domains)) {
                    (true, true) => false,
                    (true, false) => propagate_linear(b, domains, &mut changed),
                    (false, true) => propagate_linear(a, domains, &mut changed),
                    (false, false) => true,
                },
            };
            if !ok {
                return false;
            }
            let self_idempotent = matches!(self.model.constraints[ci], Constraint::Linear(_));
            for v in &changed {
                for &cj in &self.watches[v.0] {
                    if cj == ci && self_idempotent {
                        continue;
                    }
                    if !queued[cj] {
                        queued[cj] = true;
                        queue.push(cj);
                    }
                }
            }
            if head > 4096 && head * 2 > queue.len() {
                queue.drain(..head);
                head = 0;
            }
        }
        true
    }
}

/// Propagates `domains` against `model` to a fixpoint. `None` means failure.
pub fn propagate(model: &FlatModel, domains: &[Domain]) -> Option<Vec<Domain>> {
    let mut out = domains.to_vec();
    Propagator::new(model).propagate_all(&mut out).then_some(out)
}
