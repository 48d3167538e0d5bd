//! Dataset assembly, repeated k-fold validation and the label-shift sweep.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compile::compile;
use crate::error::{Error, Result};
use crate::estimator::{estimate_bounds_raw, train, BoundaryEstimate, PairConfig, TrainedEstimator};
use crate::features::{apply_schema, fit_schema, raw_features, FeatureSchema, RawFeatures, DEFAULT_VARIANCE_THRESHOLD};
use crate::hash::Fnv64;
use crate::metrics::{admissible, gap_reduction, size_reduction, EstimationMetrics, MedMad};
use crate::model::{Instance, ProblemClass};
use crate::par;
use crate::solver::{solve, SolveConfig, SolveStatus};

/// Fewest solved instances a dataset may contain.
pub const MIN_SOLVED: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry {
    /// Always carries `known_optimum`.
    pub instance: Instance,
    pub raw: RawFeatures,
}

impl DatasetEntry {
    pub fn optimum(&self) -> i64 {
        self.instance.known_optimum.expect("dataset entries are solved")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub class: ProblemClass,
    pub entries: Vec<DatasetEntry>,
    /// Fitted on all entries; validation refits inside each fold.
    pub schema: FeatureSchema,
    /// Instances dropped because the solver did not prove optimality.
    pub n_unsolved: usize,
}

impl Dataset {
    /// Assembles a dataset from already solved entries.
    pub fn from_entries(class: ProblemClass, entries: Vec<DatasetEntry>, n_unsolved: usize) -> Result<Self> {
        if entries.len() < MIN_SOLVED {
            return Err(Error::Dataset(format!("only {} solved instances, need at least {MIN_SOLVED}", entries.len())));
        }
        for e in &entries {
            if e.instance.class != class {
                return Err(Error::Dataset(format!("instance {} is not of class {class}", e.instance.id)));
            }
            match e.instance.known_optimum {
                Some(z) if e.instance.objective_lb <= z && z <= e.instance.objective_ub => {}
                _ => return Err(Error::Dataset(format!("instance {} has no valid optimum", e.instance.id))),
            }
        }
        let raws: Vec<RawFeatures> = entries.iter().map(|e| e.raw.clone()).collect();
        let schema = fit_schema(&raws, DEFAULT_VARIANCE_THRESHOLD)?;
        Ok(Dataset { class, entries, schema, n_unsolved })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> BTreeSet<String> {
        self.entries.iter().map(|e| e.instance.id.clone()).collect()
    }

    /// Content hash over ids and optima, in entry order.
    pub fn hash(&self) -> u64 {
        let mut h = Fnv64::default();
        h.write_str(self.class.name());
        for e in &self.entries {
            h.write_str(&e.instance.id);
            h.write_i64(e.optimum());
        }
        h.finish()
    }
}

/// Solves every instance that lacks a known optimum and keeps the ones
/// proven optimal.
pub fn build_dataset(instances: Vec<Instance>, budget: &SolveConfig) -> Result<Dataset> {
    let Some(first) = instances.first() else {
        return Err(Error::Dataset("no instances".to_string()));
    };
    let class = first.class;
    if let Some(other) = instances.iter().find(|i| i.class != class) {
        return Err(Error::Dataset(format!("mixed classes: {} and {}", class, other.class)));
    }
    if !budget.is_positive() {
        return Err(Error::Dataset("solver budget must be positive".to_string()));
    }
    for i in &instances {
        i.validate()?;
    }
    let solved: Vec<Result<Option<DatasetEntry>>> = par::map(&instances, |inst| {
        let mut inst = inst.clone();
        if inst.known_optimum.is_none() {
            let r = solve(&compile(&inst)?, budget);
            match (r.status, r.best_objective) {
                (SolveStatus::Optimal, Some(z)) => inst.known_optimum = Some(z),
                _ => return Ok(None),
            }
        }
        let raw = raw_features(&inst)?;
        Ok(Some(DatasetEntry { instance: inst, raw }))
    });
    let mut entries = Vec::new();
    let mut n_unsolved = 0;
    for r in solved {
        match r? {
            Some(e) => entries.push(e),
            None => n_unsolved += 1,
        }
    }
    Dataset::from_entries(class, entries, n_unsolved)
}

/// Something that can be fitted on training folds and then bound held-out
/// instances. Implemented by [`PairConfig`]; tests plug in stubs.
pub trait BoundaryTrainer: Sync {
    type Model;

    fn fit(
        &self,
        class: ProblemClass,
        schema: &FeatureSchema,
        train: &[&DatasetEntry],
        seed: u64,
    ) -> Result<Self::Model>;

    fn estimate(&self, model: &Self::Model, entry: &DatasetEntry) -> Result<BoundaryEstimate>;
}

impl BoundaryTrainer for PairConfig {
    type Model = (TrainedEstimator, TrainedEstimator);

    fn fit(
        &self,
        class: ProblemClass,
        schema: &FeatureSchema,
        train_set: &[&DatasetEntry],
        seed: u64,
    ) -> Result<Self::Model> {
        self.validate()?;
        let fit_one = |config: &crate::estimator::EstimatorConfig, seed: u64| -> Result<TrainedEstimator> {
            let mut config = *config;
            config.seed = seed;
            let mut examples = Vec::with_capacity(train_set.len());
            for e in train_set {
                let y = config
                    .label(&e.instance)
                    .ok_or_else(|| Error::Dataset(format!("instance {} is unsolved", e.instance.id)))?;
                examples.push((apply_schema(schema, &e.raw)?, y));
            }
            train(class, &config, schema, &examples)
        };
        Ok((fit_one(&self.lower, seed)?, fit_one(&self.upper, seed.wrapping_add(1))?))
    }

    fn estimate(&self, model: &Self::Model, entry: &DatasetEntry) -> Result<BoundaryEstimate> {
        estimate_bounds_raw(&model.0, &model.1, &entry.instance, &entry.raw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvConfig {
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { k: 10, repeats: 10, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceEval {
    pub id: String,
    pub optimum: i64,
    pub estimate: BoundaryEstimate,
    pub admissible: bool,
    pub gap_pct: Option<f64>,
    pub size_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub repeat: usize,
    pub fold: usize,
    pub train_ids: Vec<String>,
    pub evals: Vec<InstanceEval>,
}

impl FoldRecord {
    pub fn admissible_pct(&self) -> f64 {
        let n = self.evals.iter().filter(|e| e.admissible).count();
        n as f64 * 100.0 / self.evals.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub metrics: EstimationMetrics,
    pub folds: Vec<FoldRecord>,
}

/// Fold index of each entry for one repeat: a seeded shuffle dealt
/// round-robin into `k` folds.
pub fn fold_assignment(n: usize, k: usize, seed: u64, repeat: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, repeat as u64));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut fold = alloc::vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold[i] = pos % k;
    }
    fold
}

fn mix(seed: u64, x: u64) -> u64 {
    let mut h = Fnv64::default();
    h.write_i64(seed as i64);
    h.write_i64(x as i64);
    h.finish()
}

/// Repeated k-fold validation. The schema is refitted on every training
/// split. Admissibility is aggregated as one percentage per fold; gap and
/// size over every evaluated instance.
pub fn cross_validate<T: BoundaryTrainer>(dataset: &Dataset, trainer: &T, cv: &CvConfig) -> Result<CvOutcome>
where
    T::Model: Send,
{
    if cv.k < 2 || cv.repeats == 0 {
        return Err(Error::validation(
            "k",
            format!("need k >= 2 and repeats >= 1, got k={} repeats={}", cv.k, cv.repeats),
        ));
    }
    if dataset.len() < 2 * cv.k {
        return Err(Error::Dataset(format!("{} entries is fewer than 2k = {}", dataset.len(), 2 * cv.k)));
    }
    let assignments: Vec<Vec<usize>> =
        (0..cv.repeats).map(|r| fold_assignment(dataset.len(), cv.k, cv.seed, r)).collect();
    let tasks: Vec<(usize, usize)> = (0..cv.repeats).flat_map(|r| (0..cv.k).map(move |f| (r, f))).collect();
    let folds = par::map(&tasks, |&(repeat, fold)| -> Result<FoldRecord> {
        let assign = &assignments[repeat];
        let (train_set, test_set): (Vec<&DatasetEntry>, Vec<&DatasetEntry>) = {
            let mut tr = Vec::new();
            let mut te = Vec::new();
            for (e, &f) in dataset.entries.iter().zip(assign) {
                if f == fold {
                    te.push(e)
                } else {
                    tr.push(e)
                }
            }
            (tr, te)
        };
        let raws: Vec<RawFeatures> = train_set.iter().map(|e| e.raw.clone()).collect();
        let schema = fit_schema(&raws, dataset.schema.variance_threshold)?;
        let seed = mix(cv.seed, (repeat * cv.k + fold) as u64);
        let model = trainer.fit(dataset.class, &schema, &train_set, seed)?;
        let mut evals = Vec::with_capacity(test_set.len());
        for e in test_set {
            let est = trainer.estimate(&model, e)?;
            evals.push(evaluate(e, est));
        }
        Ok(FoldRecord { repeat, fold, train_ids: train_set.iter().map(|e| e.instance.id.clone()).collect(), evals })
    });
    let folds = folds.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CvOutcome { metrics: aggregate(&folds), folds })
}

pub fn evaluate(entry: &DatasetEntry, estimate: BoundaryEstimate) -> InstanceEval {
    let i = &entry.instance;
    let z = entry.optimum();
    InstanceEval {
        id: i.id.clone(),
        optimum: z,
        estimate,
        admissible: admissible(&estimate, z),
        gap_pct: gap_reduction(&estimate, z, i.objective_lb, i.objective_ub, i.sense()),
        size_pct: size_reduction(&estimate, i.objective_lb, i.objective_ub),
    }
}

pub fn aggregate(folds: &[FoldRecord]) -> EstimationMetrics {
    let adm: Vec<f64> = folds.iter().filter(|f| !f.evals.is_empty()).map(FoldRecord::admissible_pct).collect();
    let evals = folds.iter().flat_map(|f| &f.evals);
    let gaps: Vec<f64> = evals.clone().filter_map(|e| e.gap_pct).collect();
    let sizes: Vec<f64> = evals.clone().filter_map(|e| e.size_pct).collect();
    let n_excluded = evals.clone().filter(|e| e.gap_pct.is_none() || e.size_pct.is_none()).count();
    EstimationMetrics {
        admissible_pct: MedMad::of(&adm),
        gap_pct: MedMad::of(&gaps),
        size_pct: MedMad::of(&sizes),
        n_excluded,
        n_evaluated: evals.count(),
    }
}

/// `0, 0.08, ..., 0.8`.
pub fn lambda_grid() -> Vec<f64> {
    (0..=10).map(|i| (i * 8) as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub outcome: CvOutcome,
    pub dataset_hash: u64,
}

/// One validation run per label-shift factor, all on the same folds.
pub fn lambda_sweep(dataset: &Dataset, base: &PairConfig, lambdas: &[f64], cv: &CvConfig) -> Result<Vec<SweepRow>> {
    let hash = dataset.hash();
    lambdas
        .iter()
        .map(|&lambda| {
            let outcome = cross_validate(dataset, &base.with_lambda(lambda), cv)?;
            Ok(SweepRow { lambda, outcome, dataset_hash: hash })
        })
        .collect()
}
