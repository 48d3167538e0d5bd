//! Independent oracles used by the acceptance suite: direct loss
//! evaluation, finite-difference gradients and brute-force optima computed
//! from instance parameters without the model compiler or solver.

use std::path::PathBuf;

use bion_core::estimator::nn::Network;
use bion_core::loss::LossSpec;
use bion_core::Instance;

/// Loss value, gradient and hessian of `r^2 (sgn(r) + alpha)^2`, written out
/// term by term.
pub fn direct(r: f64, alpha: f64) -> (f64, f64, f64) {
    let s = if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    };
    let c = (s + alpha) * (s + alpha);
    (r * r * c, 2.0 * r * c, 2.0 * c)
}

/// Largest relative error between backpropagated and central-difference
/// gradients, `|a - n| / max(|a|, |n|, 1e-6)`, with step 1e-5.
pub fn max_relative_error(net: &Network, batch: &[&[f64]], targets: &[f64], loss: &LossSpec) -> f64 {
    const EPS: f64 = 1e-5;
    let analytic = net.loss_and_gradient(batch, targets, loss).1.flatten();
    let theta = net.parameters();
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for (i, a) in analytic.iter().enumerate() {
        let mut p = theta.clone();
        p[i] = theta[i] + EPS;
        probe.set_parameters(&p);
        let up = probe.loss_and_gradient(batch, targets, loss).0;
        p[i] = theta[i] - EPS;
        probe.set_parameters(&p);
        let down = probe.loss_and_gradient(batch, targets, loss).0;
        let numeric = (up - down) / (2.0 * EPS);
        worst = worst.max((a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6));
    }
    worst
}

/// Best total value over all item subsets.
pub fn bf_knapsack(i: &Instance) -> i64 {
    let v = i.list_param("values").unwrap();
    let w = i.list_param("weights").unwrap();
    let cap = i.int_param("capacity").unwrap();
    let n = v.len();
    (0u32..1 << n)
        .filter_map(|mask| {
            let pick = |xs: &[i64]| (0..n).filter(|k| mask >> k & 1 == 1).map(|k| xs[k]).sum::<i64>();
            (pick(w) <= cap).then(|| pick(v))
        })
        .max()
        .unwrap()
}

/// Fewest bins over all item-to-bin assignments.
pub fn bf_bin_packing(i: &Instance) -> i64 {
    let w = i.list_param("weights").unwrap();
    let cap = i.int_param("capacity").unwrap();
    let n = w.len();
    let mut best = n as i64;
    let mut assign = vec![0usize; n];
    loop {
        let mut load = vec![0i64; n];
        for (k, &b) in assign.iter().enumerate() {
            load[b] += w[k];
        }
        if load.iter().all(|&l| l <= cap) {
            best = best.min(load.iter().filter(|&&l| l > 0).count() as i64);
        }
        // odometer over n^n assignments
        let mut k = 0;
        while k < n {
            assign[k] += 1;
            if assign[k] < n {
                break;
            }
            assign[k] = 0;
            k += 1;
        }
        if k == n {
            return best;
        }
    }
}

fn permutations(items: Vec<usize>) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.clone();
        let head = rest.remove(k);
        for mut p in permutations(rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Makespan of the semi-active schedule for fixed machine orders, or `None`
/// if the orders contradict the job routes.
pub fn makespan(dur: &[Vec<i64>], route: &[Vec<i64>], orders: &[Vec<usize>]) -> Option<i64> {
    let jobs = dur.len();
    let ops = dur[0].len();
    let id = |j: usize, k: usize| j * ops + k;
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); jobs * ops];
    for j in 0..jobs {
        for k in 1..ops {
            preds[id(j, k)].push(id(j, k - 1));
        }
    }
    for (m, order) in orders.iter().enumerate() {
        let op_of = |j: usize| (0..ops).find(|&k| route[j][k] as usize == m).unwrap();
        for w in order.windows(2) {
            preds[id(w[1], op_of(w[1]))].push(id(w[0], op_of(w[0])));
        }
    }
    let d = |o: usize| dur[o / ops][o % ops];
    let mut start = vec![0i64; jobs * ops];
    for _ in 0..=jobs * ops {
        let mut changed = false;
        for o in 0..jobs * ops {
            let s = preds[o].iter().map(|&p| start[p] + d(p)).max().unwrap_or(0);
            if s != start[o] {
                start[o] = s;
                changed = true;
            }
        }
        if !changed {
            return (0..jobs * ops).map(|o| start[o] + d(o)).max();
        }
    }
    None
}

/// Shortest makespan over all machine orders.
pub fn bf_jobshop(i: &Instance) -> i64 {
    let dur = i.nested_param("durations").unwrap();
    let route = i.nested_param("machines").unwrap();
    let machines = dur[0].len();
    let perms = permutations((0..dur.len()).collect());
    let mut best = i64::MAX;
    let mut choice = vec![0usize; machines];
    loop {
        let orders: Vec<Vec<usize>> = choice.iter().map(|&c| perms[c].clone()).collect();
        if let Some(m) = makespan(dur, route, &orders) {
            best = best.min(m);
        }
        let mut k = 0;
        while k < machines {
            choice[k] += 1;
            if choice[k] < perms.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == machines {
            return best;
        }
    }
}

/// The `bion` executable next to the running test binary
/// (`target/<profile>/deps/<test>` -> `target/<profile>/bion`).
pub fn bion_exe() -> PathBuf {
    let exe = std::env::current_exe().expect("test binary path");
    let profile_dir = exe.parent().and_then(|d| d.parent()).expect("target layout");
    profile_dir.join(format!("bion{}", std::env::consts::EXE_SUFFIX))
}

#[cfg(test)]
mod tests {
    use super::*;
    use bion_core::generate::{bin_packing, jobshop_from, knapsack};

    #[test]
    fn hand_checked_optima() {
        assert_eq!(bf_knapsack(&knapsack("k", vec![6, 10, 12], vec![1, 2, 3], 5)), 22);
        assert_eq!(bf_bin_packing(&bin_packing("b", vec![5, 5, 5, 5], 10)), 2);
        assert_eq!(bf_bin_packing(&bin_packing("b", vec![6, 6, 6], 10)), 3);
        // job 0: m0 for 3 then m1 for 2; job 1: m1 for 4 then m0 for 1
        let js = jobshop_from("j", vec![vec![3, 2], vec![4, 1]], vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(bf_jobshop(&js), 6);
    }

    #[test]
    fn contradictory_orders_have_no_schedule() {
        // routes m0->m1 and m1->m0; the first order set closes a cycle
        let dur = vec![vec![1, 1], vec![1, 1]];
        let route = vec![vec![0, 1], vec![1, 0]];
        assert!(makespan(&dur, &route, &[vec![1, 0], vec![0, 1]]).is_none());
        assert_eq!(makespan(&dur, &route, &[vec![0, 1], vec![1, 0]]), Some(2));
    }
}
