//! Markdown summary of metrics, sweep and benchmark CSVs.

use std::collections::BTreeMap;
use std::fmt::Write;

use bion_core::bench::RunLabel;

use crate::tables::{is_benchmark, is_metrics, Table};

const AVERAGED: [&str; 5] = ["eqtime_pct", "eqnodes_pct", "qof_pct", "ttc_pct", "ttc_nodes_pct"];

/// Per (class, configuration) averages recomputed from benchmark rows.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchAverages {
    pub class: String,
    pub config: RunLabel,
    pub n_instances: usize,
    pub n_fallback: usize,
    /// Means of [`AVERAGED`] over rows with a numeric value.
    pub means: [Option<f64>; 5],
}

type Rows<'a> = Vec<(&'a Table, &'a Vec<String>)>;

pub fn bench_averages(tables: &[&Table]) -> Vec<BenchAverages> {
    let mut groups: BTreeMap<(String, RunLabel), Rows> = BTreeMap::new();
    for t in tables {
        for row in &t.rows {
            let (Some(class), Some(config)) = (t.get(row, "class"), t.get(row, "config").and_then(RunLabel::from_name))
            else {
                continue;
            };
            groups.entry((class.to_string(), config)).or_default().push((t, row));
        }
    }
    groups
        .into_iter()
        .map(|((class, config), rows)| {
            let means = AVERAGED.map(|col| {
                let vals: Vec<f64> = rows
                    .iter()
                    .filter_map(|(t, r)| t.get(r, col))
                    .filter_map(|v| v.parse::<f64>().ok())
                    .filter(|v| !v.is_nan())
                    .collect();
                (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
            });
            BenchAverages {
                class,
                config,
                n_instances: rows.len(),
                n_fallback: rows.iter().filter(|(t, r)| t.get(r, "fallback_used") == Some("true")).count(),
                means,
            }
        })
        .collect()
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"))
}

fn med_mad(t: &Table, r: &[String], name: &str) -> String {
    let med = t.get(r, &format!("{name}_med")).and_then(|v| v.parse::<f64>().ok());
    let mad = t.get(r, &format!("{name}_mad")).and_then(|v| v.parse::<f64>().ok());
    match (med, mad) {
        (Some(m), Some(d)) if !m.is_nan() => format!("{m:.1} ± {d:.1}"),
        _ => "-".to_string(),
    }
}

/// Renders every recognised table; unknown CSV layouts are ignored.
pub fn render(tables: &[Table]) -> String {
    let metrics: Vec<&Table> = tables.iter().filter(|t| is_metrics(t) && t.column("dataset_hash").is_none()).collect();
    let sweeps: Vec<&Table> = tables.iter().filter(|t| is_metrics(t) && t.column("dataset_hash").is_some()).collect();
    let bench: Vec<&Table> = tables.iter().filter(|t| is_benchmark(t)).collect();

    let mut out = String::from("# Objective boundary report\n");
    if !metrics.is_empty() {
        out.push_str("\n## Estimation quality\n\nMedian ± MAD over validation folds (admissible) and held-out instances (gap, size), in percent.\n\n");
        out.push_str(
            "| class | model | λ | α | admissible | gap | size | excluded |\n|---|---|---|---|---|---|---|---|\n",
        );
        for t in &metrics {
            for r in &t.rows {
                let g = |c| t.get(r, c).unwrap_or("");
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} | {} |",
                    g("class"),
                    g("model"),
                    g("lambda"),
                    g("alpha"),
                    med_mad(t, r, "admissible"),
                    med_mad(t, r, "gap"),
                    med_mad(t, r, "size"),
                    g("n_excluded"),
                );
            }
        }
    }
    if !sweeps.is_empty() {
        out.push_str(
            "\n## Label-shift sweep\n\n| class | model | λ | admissible | gap | size |\n|---|---|---|---|---|---|\n",
        );
        for t in &sweeps {
            for r in &t.rows {
                let g = |c| t.get(r, c).unwrap_or("");
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} |",
                    g("class"),
                    g("model"),
                    g("lambda"),
                    med_mad(t, r, "admissible"),
                    med_mad(t, r, "gap"),
                    med_mad(t, r, "size")
                );
            }
        }
    }
    if !bench.is_empty() {
        out.push_str(
            "\n## Solver study\n\nAverages over benchmark instances, in percent relative to the original run. ",
        );
        out.push_str("Negative effort values mean the bounded run needed less.\n\n");
        out.push_str("| class | config | instances | fallback | eq. time | eq. nodes | quality of first | completion time | completion nodes |\n");
        out.push_str("|---|---|---|---|---|---|---|---|---|\n");
        for a in bench_averages(&bench) {
            let [eqt, eqn, qof, ttc, ttcn] = a.means;
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                a.class,
                a.config.as_str(),
                a.n_instances,
                a.n_fallback,
                cell(eqt),
                cell(eqn),
                cell(qof),
                cell(ttc),
                cell(ttcn)
            );
        }
        out.push_str(
            "\nAll runs use the built-in branch-and-bound solver. How much a solver gains from objective \
             boundaries depends on the solver, so these figures do not transfer to other solvers.\n",
        );
    }
    out
}
