//! CSV layouts for validation metrics, label-shift sweeps and benchmarks.

use std::path::Path;

use bion_core::bench::{millis, BenchmarkRecord, Metric, SummaryRow};
use bion_core::estimator::PairConfig;
use bion_core::metrics::EstimationMetrics;
use bion_core::ProblemClass;

use crate::error::Result;
use crate::files::{hex, write_text};

pub const METRICS_HEADER: [&str; 12] = [
    "class",
    "model",
    "direction",
    "lambda",
    "alpha",
    "admissible_med",
    "admissible_mad",
    "gap_med",
    "gap_mad",
    "size_med",
    "size_mad",
    "n_excluded",
];

pub const BENCHMARK_HEADER: [&str; 16] = [
    "class",
    "instance_id",
    "config",
    "status",
    "best_obj",
    "first_obj",
    "first_ms",
    "first_nodes",
    "total_ms",
    "total_nodes",
    "fallback_used",
    "eqtime_pct",
    "eqnodes_pct",
    "qof_pct",
    "ttc_pct",
    "ttc_nodes_pct",
];

/// Columns that carry wall-clock measurements.
pub const WALL_CLOCK_COLUMNS: [&str; 4] = ["first_ms", "total_ms", "eqtime_pct", "ttc_pct"];

pub const SUMMARY_HEADER: [&str; 9] = [
    "class",
    "config",
    "n_instances",
    "n_fallback",
    "eqtime_pct",
    "eqnodes_pct",
    "qof_pct",
    "ttc_pct",
    "ttc_nodes_pct",
];

/// Shortest representation that parses back to the same value.
pub fn num(v: f64) -> String {
    format!("{v}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn metric(m: Option<Metric>) -> String {
    m.map_or_else(String::new, |m| num(m.value))
}

pub fn metrics_record(class: ProblemClass, model: &str, pair: &PairConfig, m: &EstimationMetrics) -> Vec<String> {
    vec![
        class.name().to_string(),
        model.to_string(),
        "both".to_string(),
        num(pair.upper.lambda),
        num(pair.upper.loss.effective_alpha()),
        num(m.admissible_pct.median),
        num(m.admissible_pct.mad),
        num(m.gap_pct.median),
        num(m.gap_pct.mad),
        num(m.size_pct.median),
        num(m.size_pct.mad),
        m.n_excluded.to_string(),
    ]
}

pub fn benchmark_record(r: &BenchmarkRecord) -> Vec<String> {
    let res = &r.result;
    let first = res.first_solution.as_ref();
    vec![
        r.class.name().to_string(),
        r.instance_id.clone(),
        r.config.as_str().to_string(),
        res.status.as_str().to_string(),
        opt(res.best_objective),
        opt(first.map(|f| f.objective)),
        opt(first.map(|f| num(millis(f.elapsed)))),
        opt(first.map(|f| f.nodes)),
        num(millis(res.elapsed)),
        res.nodes_explored.to_string(),
        res.fallback_used.to_string(),
        metric(r.eqtime),
        metric(r.eqnodes),
        metric(r.qof),
        metric(r.ttc),
        metric(r.ttc_nodes),
    ]
}

pub fn summary_record(s: &SummaryRow) -> Vec<String> {
    vec![
        s.class.name().to_string(),
        s.config.as_str().to_string(),
        s.n_instances.to_string(),
        s.n_fallback.to_string(),
        opt(s.eqtime.map(num)),
        opt(s.eqnodes.map(num)),
        opt(s.qof.map(num)),
        opt(s.ttc.map(num)),
        opt(s.ttc_nodes.map(num)),
    ]
}

pub fn to_csv<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::BionError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    write_text(path, &to_csv(header, rows)?)
}

pub fn sweep_header() -> Vec<&'static str> {
    let mut h = METRICS_HEADER.to_vec();
    h.push("dataset_hash");
    h
}

pub fn sweep_record(
    class: ProblemClass,
    model: &str,
    pair: &PairConfig,
    m: &EstimationMetrics,
    hash: u64,
) -> Vec<String> {
    let mut r = metrics_record(class, model, pair, m);
    r.push(hex(hash));
    r
}

/// A parsed CSV: header plus string rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn get<'a>(&self, row: &'a [String], name: &str) -> Option<&'a str> {
        self.column(name).map(|i| row[i].as_str())
    }

    /// Copy without the named columns.
    pub fn without(&self, names: &[&str]) -> Table {
        let keep: Vec<usize> = (0..self.header.len()).filter(|&i| !names.contains(&self.header[i].as_str())).collect();
        Table {
            header: keep.iter().map(|&i| self.header[i].clone()).collect(),
            rows: self.rows.iter().map(|r| keep.iter().map(|&i| r[i].clone()).collect()).collect(),
        }
    }
}

pub fn is_benchmark(t: &Table) -> bool {
    t.header.iter().map(String::as_str).eq(BENCHMARK_HEADER)
}

pub fn is_metrics(t: &Table) -> bool {
    t.header.len() >= METRICS_HEADER.len()
        && t.header[..METRICS_HEADER.len()].iter().map(String::as_str).eq(METRICS_HEADER)
}
