//! Versioned JSON documents: instances, datasets, trained models and solver
//! runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use bion_core::bench::{BenchmarkRecord, Metric};
use bion_core::estimator::{BoundaryEstimate, EstimatorConfig, Parameters, TrainedEstimator};
use bion_core::features::{raw_features, FeatureSchema};
use bion_core::solver::{Incumbent, SolveResult, SolveStatus};
use bion_core::validation::{Dataset, DatasetEntry};
use bion_core::{Instance, ParamValue, ProblemClass, Sense};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{BionError, Result};

pub const FORMAT_VERSION: u64 = 1;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| BionError::io(path, e))
}

/// Writes `text`, creating parent directories as needed.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| BionError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| BionError::io(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Parses a document after checking its `format_version`.
pub fn parse_versioned<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| BionError::parse(path, "", e.to_string()))?;
    match value.get("format_version") {
        None => return Err(BionError::parse(path, "/format_version", "missing field")),
        Some(v) => match v.as_u64() {
            Some(FORMAT_VERSION) => {}
            Some(found) => return Err(BionError::Version { path: path.into(), found, expected: FORMAT_VERSION }),
            None => return Err(BionError::parse(path, "/format_version", "expected a non-negative integer")),
        },
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let ptr = pointer(e.path());
        BionError::parse(path, ptr, e.into_inner().to_string())
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub format_version: u64,
    pub id: String,
    pub class: ProblemClass,
    pub sense: Sense,
    pub params: BTreeMap<String, ParamValue>,
    pub objective_lb: i64,
    pub objective_ub: i64,
    #[serde(default)]
    pub known_optimum: Option<i64>,
}

impl From<&Instance> for InstanceDoc {
    fn from(i: &Instance) -> Self {
        InstanceDoc {
            format_version: FORMAT_VERSION,
            id: i.id.clone(),
            class: i.class,
            sense: i.sense(),
            params: i.params.clone(),
            objective_lb: i.objective_lb,
            objective_ub: i.objective_ub,
            known_optimum: i.known_optimum,
        }
    }
}

impl InstanceDoc {
    /// Checks the document invariants; `base` is the pointer prefix of this
    /// document inside its file.
    fn into_instance(self, path: &Path, base: &str) -> Result<Instance> {
        if self.sense != self.class.sense() {
            return Err(BionError::parse(
                path,
                format!("{base}/sense"),
                format!("{} is a {} problem", self.class, self.class.sense().as_str()),
            ));
        }
        if self.objective_lb > self.objective_ub {
            return Err(BionError::parse(
                path,
                format!("{base}/objective_lb"),
                format!("objective_lb {} exceeds objective_ub {}", self.objective_lb, self.objective_ub),
            ));
        }
        if let Some(z) = self.known_optimum {
            if z < self.objective_lb || z > self.objective_ub {
                return Err(BionError::parse(
                    path,
                    format!("{base}/known_optimum"),
                    format!("{z} is outside the objective domain"),
                ));
            }
        }
        let instance = Instance {
            id: self.id,
            class: self.class,
            params: self.params,
            objective_lb: self.objective_lb,
            objective_ub: self.objective_ub,
            known_optimum: self.known_optimum,
        };
        instance.validate().map_err(|source| BionError::Invalid { path: path.into(), source })?;
        Ok(instance)
    }
}

pub fn instance_to_json(instance: &Instance) -> String {
    to_json(&InstanceDoc::from(instance))
}

pub fn instance_from_str(path: &Path, text: &str) -> Result<Instance> {
    parse_versioned::<InstanceDoc>(path, text)?.into_instance(path, "")
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    instance_from_str(path, &read_text(path)?)
}

pub fn write_instance(instance: &Instance, path: &Path) -> Result<()> {
    write_text(path, &instance_to_json(instance))
}

/// All `*.json` instance files in `dir`, sorted by file name.
pub fn read_instance_dir(dir: &Path) -> Result<Vec<Instance>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| BionError::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| BionError::io(dir, err)))
        .collect::<Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "json"));
    paths.sort();
    paths.iter().map(|p| read_instance(p)).collect()
}

pub fn instance_file_name(instance: &Instance) -> String {
    format!("{}.json", instance.id)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetDoc {
    format_version: u64,
    class: ProblemClass,
    n_unsolved: usize,
    dataset_hash: String,
    instances: Vec<InstanceDoc>,
}

pub fn hex(h: u64) -> String {
    format!("{h:016x}")
}

pub fn dataset_to_json(dataset: &Dataset) -> String {
    to_json(&DatasetDoc {
        format_version: FORMAT_VERSION,
        class: dataset.class,
        n_unsolved: dataset.n_unsolved,
        dataset_hash: hex(dataset.hash()),
        instances: dataset.entries.iter().map(|e| InstanceDoc::from(&e.instance)).collect(),
    })
}

pub fn write_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    write_text(path, &dataset_to_json(dataset))
}

/// Loads a dataset; features are recomputed and the schema refitted.
pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let doc: DatasetDoc = parse_versioned(path, &read_text(path)?)?;
    let mut entries = Vec::with_capacity(doc.instances.len());
    for (i, d) in doc.instances.into_iter().enumerate() {
        let base = format!("/instances/{i}");
        if d.known_optimum.is_none() {
            return Err(BionError::parse(path, format!("{base}/known_optimum"), "dataset instances must be solved"));
        }
        let instance = d.into_instance(path, &base)?;
        let raw = raw_features(&instance).map_err(|source| BionError::Invalid { path: path.into(), source })?;
        entries.push(DatasetEntry { instance, raw });
    }
    let dataset = Dataset::from_entries(doc.class, entries, doc.n_unsolved)
        .map_err(|source| BionError::Invalid { path: path.into(), source })?;
    if hex(dataset.hash()) != doc.dataset_hash {
        return Err(BionError::parse(path, "/dataset_hash", "does not match the listed instances"));
    }
    Ok(dataset)
}

/// A trained estimator with the provenance needed to keep benchmark
/// instances out of its training data.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub estimator: TrainedEstimator,
    pub training_ids: Vec<String>,
    pub dataset_hash: u64,
}

#[derive(Serialize)]
struct ModelDocRef<'a> {
    format_version: u64,
    class: ProblemClass,
    config: &'a EstimatorConfig,
    schema: &'a FeatureSchema,
    parameters: &'a Parameters,
    dataset_hash: String,
    training_ids: &'a [String],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    #[allow(dead_code)]
    format_version: u64,
    class: ProblemClass,
    config: EstimatorConfig,
    schema: FeatureSchema,
    parameters: Parameters,
    dataset_hash: String,
    training_ids: Vec<String>,
}

pub fn model_to_json(model: &ModelFile) -> String {
    let e = &model.estimator;
    to_json(&ModelDocRef {
        format_version: FORMAT_VERSION,
        class: e.class,
        config: &e.config,
        schema: &e.schema,
        parameters: &e.parameters,
        dataset_hash: hex(model.dataset_hash),
        training_ids: &model.training_ids,
    })
}

pub fn model_from_str(path: &Path, text: &str) -> Result<ModelFile> {
    let doc: ModelDoc = parse_versioned(path, text)?;
    doc.config.validate().map_err(|source| BionError::Invalid { path: path.into(), source })?;
    let dataset_hash = u64::from_str_radix(&doc.dataset_hash, 16)
        .map_err(|e| BionError::parse(path, "/dataset_hash", e.to_string()))?;
    Ok(ModelFile {
        estimator: TrainedEstimator {
            class: doc.class,
            config: doc.config,
            schema: doc.schema,
            parameters: doc.parameters,
        },
        training_ids: doc.training_ids,
        dataset_hash,
    })
}

pub fn save_model(model: &ModelFile, path: &Path) -> Result<()> {
    write_text(path, &model_to_json(model))
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    model_from_str(path, &read_text(path)?)
}

/// `[objective, elapsed_ms, nodes]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimelineEntry(pub i64, pub f64, pub u64);

impl From<&Incumbent> for TimelineEntry {
    fn from(i: &Incumbent) -> Self {
        TimelineEntry(i.objective, bion_core::bench::millis(i.elapsed), i.nodes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDoc {
    pub status: String,
    pub best_objective: Option<i64>,
    pub first_solution: Option<TimelineEntry>,
    pub timeline: Vec<TimelineEntry>,
    pub nodes_explored: u64,
    pub elapsed_ms: f64,
    pub fallback_used: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<i64>>,
}

impl RunDoc {
    pub fn new(r: &SolveResult, with_assignment: bool) -> Self {
        RunDoc {
            status: r.status.as_str().to_string(),
            best_objective: r.best_objective,
            first_solution: r.first_solution.as_ref().map(TimelineEntry::from),
            timeline: r.timeline.iter().map(TimelineEntry::from).collect(),
            nodes_explored: r.nodes_explored,
            elapsed_ms: bion_core::bench::millis(r.elapsed),
            fallback_used: r.fallback_used,
            assignment: if with_assignment { r.best_assignment.clone() } else { None },
        }
    }

    pub fn status(&self) -> Option<SolveStatus> {
        SolveStatus::from_name(&self.status)
    }
}

/// Output of the `solve` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveDoc {
    pub format_version: u64,
    pub instance_id: String,
    pub mode: Option<String>,
    pub estimate: Option<BoundaryEstimate>,
    pub result: RunDoc,
}

/// One benchmark run with its raw solver outcome, so every percentage can be
/// recomputed from this file alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordDoc {
    pub class: ProblemClass,
    pub instance_id: String,
    pub config: String,
    pub known_optimum: i64,
    pub estimate: Option<BoundaryEstimate>,
    pub run: RunDoc,
    pub eqtime_pct: Option<f64>,
    pub eqnodes_pct: Option<f64>,
    pub qof_pct: Option<f64>,
    pub ttc_pct: Option<f64>,
    pub ttc_nodes_pct: Option<f64>,
    pub flags: Vec<String>,
}

fn finite(m: Option<Metric>) -> Option<f64> {
    m.map(|m| m.value).filter(|v| !v.is_nan())
}

impl From<&BenchmarkRecord> for RecordDoc {
    fn from(r: &BenchmarkRecord) -> Self {
        RecordDoc {
            class: r.class,
            instance_id: r.instance_id.clone(),
            config: r.config.as_str().to_string(),
            known_optimum: r.known_optimum,
            estimate: r.estimate,
            run: RunDoc::new(&r.result, false),
            eqtime_pct: finite(r.eqtime),
            eqnodes_pct: finite(r.eqnodes),
            qof_pct: finite(r.qof),
            ttc_pct: finite(r.ttc),
            ttc_nodes_pct: finite(r.ttc_nodes),
            flags: r.flags.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordsDoc {
    pub format_version: u64,
    pub n_skipped: usize,
    pub records: Vec<RecordDoc>,
}
