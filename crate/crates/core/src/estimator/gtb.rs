//! Gradient tree boosting with second-order (Newton) leaf values.
//!
//! Trees are grown depth-wise with exact greedy splits. A sample goes to
//! the left child when `x[feature] < threshold`. Leaf values stored in the
//! ensemble already include the learning rate, so a prediction is
//! `base_score + sum(leaf)` over all trees.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::loss::LossSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GtbParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// L2 penalty on leaf values.
    pub reg_lambda: f64,
    /// Lower bound applied to every per-sample hessian.
    pub hessian_floor: f64,
    /// Both children of a split need at least this much hessian.
    #[serde(default)]
    pub min_child_weight: f64,
}

impl Default for GtbParams {
    fn default() -> Self {
        GtbParams {
            n_trees: 100,
            max_depth: 6,
            learning_rate: 0.3,
            reg_lambda: 1.0,
            hessian_floor: 1e-6,
            min_child_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { leaf: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    /// Node 0 is the root.
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { leaf } => return leaf,
                TreeNode::Split { feature, threshold, left, right } => {
                    i = if x[feature] < threshold { left } else { right };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
}

impl Ensemble {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }
}

struct Builder<'a> {
    xs: &'a [&'a [f64]],
    /// Sample indices sorted by each feature.
    order: Vec<Vec<usize>>,
    grad: Vec<f64>,
    hess: Vec<f64>,
    params: GtbParams,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Builder<'_> {
    fn leaf_value(&self, g: f64, h: f64) -> f64 {
        -g / (h + self.params.reg_lambda) * self.params.learning_rate
    }

    fn score(&self, g: f64, h: f64) -> f64 {
        g * g / (h + self.params.reg_lambda)
    }

    fn best_split(&self, member: &[bool], g_total: f64, h_total: f64) -> Option<SplitChoice> {
        let parent = self.score(g_total, h_total);
        let mcw = self.params.min_child_weight;
        let mut best: Option<SplitChoice> = None;
        for (feature, order) in self.order.iter().enumerate() {
            let (mut gl, mut hl) = (0.0, 0.0);
            let mut prev: Option<f64> = None;
            for &i in order.iter().filter(|&&i| member[i]) {
                let v = self.xs[i][feature];
                if let Some(p) = prev {
                    if v > p && hl >= mcw && h_total - hl >= mcw {
                        let gain = 0.5 * (self.score(gl, hl) + self.score(g_total - gl, h_total - hl) - parent);
                        if gain > 1e-12 && best.as_ref().is_none_or(|b| gain > b.gain) {
                            best = Some(SplitChoice { feature, threshold: p + (v - p) / 2.0, gain });
                        }
                    }
                }
                gl += self.grad[i];
                hl += self.hess[i];
                prev = Some(v);
            }
        }
        best
    }

    fn grow(&self, samples: Vec<usize>) -> Tree {
        let mut nodes = Vec::new();
        let mut member = vec![false; self.xs.len()];
        self.grow_node(&mut nodes, &mut member, samples, 0);
        Tree { nodes }
    }

    fn grow_node(&self, nodes: &mut Vec<TreeNode>, member: &mut [bool], samples: Vec<usize>, depth: usize) -> usize {
        let g: f64 = samples.iter().map(|&i| self.grad[i]).sum();
        let h: f64 = samples.iter().map(|&i| self.hess[i]).sum();
        let id = nodes.len();
        nodes.push(TreeNode::Leaf { leaf: self.leaf_value(g, h) });
        if depth >= self.params.max_depth || samples.len() < 2 {
            return id;
        }
        for &i in &samples {
            member[i] = true;
        }
        let split = self.best_split(member, g, h);
        for &i in &samples {
            member[i] = false;
        }
        let Some(split) = split else { return id };
        let (left, right): (Vec<usize>, Vec<usize>) =
            samples.into_iter().partition(|&i| self.xs[i][split.feature] < split.threshold);
        let l = self.grow_node(nodes, member, left, depth + 1);
        let r = self.grow_node(nodes, member, right, depth + 1);
        nodes[id] = TreeNode::Split { feature: split.feature, threshold: split.threshold, left: l, right: r };
        id
    }
}

pub(crate) fn fit(xs: &[&[f64]], ys: &[f64], loss: &LossSpec, params: GtbParams) -> Ensemble {
    let n = xs.len();
    let d = xs.first().map_or(0, |x| x.len());
    let base_score = ys.iter().sum::<f64>() / n as f64;
    let order: Vec<Vec<usize>> = (0..d)
        .map(|j| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| xs[a][j].total_cmp(&xs[b][j]).then(a.cmp(&b)));
            idx
        })
        .collect();
    let mut builder = Builder { xs, order, grad: vec![0.0; n], hess: vec![0.0; n], params };
    let mut pred = vec![base_score; n];
    let mut trees = Vec::with_capacity(params.n_trees);
    for _ in 0..params.n_trees {
        for i in 0..n {
            let r = pred[i] - ys[i];
            builder.grad[i] = loss.gradient(r);
            builder.hess[i] = loss.hessian(r).max(params.hessian_floor);
        }
        let tree = builder.grow((0..n).collect());
        for (p, x) in pred.iter_mut().zip(xs) {
            *p += tree.predict(x);
        }
        trees.push(tree);
    }
    Ensemble { base_score, learning_rate: params.learning_rate, trees }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (Vec<Vec<f64>>, Vec<f64>) {
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, ((i * 7) % 5) as f64]).collect();
        let ys = xs.iter().map(|x| if x[0] < 10.0 { 0.2 } else { 0.8 }).collect();
        (xs, ys)
    }

    #[test]
    fn learns_a_step() {
        let (xs, ys) = data();
        let refs: Vec<&[f64]> = xs.iter().map(|x| x.as_slice()).collect();
        let e = fit(&refs, &ys, &LossSpec::SQUARED, GtbParams::default());
        assert_eq!(e.trees.len(), 100);
        for (x, y) in xs.iter().zip(&ys) {
            assert!((e.predict(x) - y).abs() < 0.01);
        }
        match &e.trees[0].nodes[0] {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 9.5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn asymmetric_overestimator_stays_above() {
        let (xs, ys) = data();
        let refs: Vec<&[f64]> = xs.iter().map(|x| x.as_slice()).collect();
        let e = fit(&refs, &ys, &LossSpec::shifted(-1.0), GtbParams::default());
        let under = xs.iter().zip(&ys).filter(|(x, y)| e.predict(x) < **y - 1e-3).count();
        assert_eq!(under, 0);
    }

    #[test]
    fn depth_respected() {
        let (xs, ys) = data();
        let refs: Vec<&[f64]> = xs.iter().map(|x| x.as_slice()).collect();
        let e = fit(&refs, &ys, &LossSpec::SQUARED, GtbParams { max_depth: 1, ..GtbParams::default() });
        assert!(e.trees.iter().all(|t| t.nodes.len() <= 3));
    }
}
