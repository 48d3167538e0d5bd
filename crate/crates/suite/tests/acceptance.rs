//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line. Pass criterion numbers as arguments to
//! run a subset, e.g. `cargo test -p bion-suite --test acceptance -- 1 6`.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use bion::cli::train_full;
use bion::files::model_to_json;
use bion::tables::{Table, WALL_CLOCK_COLUMNS};
use bion_core::bench::{equivalent_solution_effort, fixed_upper_bound, quality_of_first, time_to_completion, Effort};
use bion_core::compile::compile;
use bion_core::estimator::nn::{Network, NnParams};
use bion_core::estimator::{BoundaryEstimate, ModelSpec, PairConfig, Variant};
use bion_core::generate::{bin_packing, dataset_sizes, generate_batch, generate_instance, jobshop};
use bion_core::loss::{loss_gradient, loss_hessian, loss_value, LossSpec};
use bion_core::metrics::{gap_reduction, size_reduction};
use bion_core::solver::{solve, solve_with_fallback, Incumbent, InjectMode, SolveConfig, SolveResult, SolveStatus};
use bion_core::validation::{build_dataset, cross_validate, lambda_grid, lambda_sweep, CvConfig, Dataset};
use bion_core::{Instance, ProblemClass, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bion_suite::{bf_bin_packing, bf_jobshop, bf_knapsack, bion_exe, direct, max_relative_error};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

const SEED: u64 = 42;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

// ---------------------------------------------------------------- loss

fn c1_loss() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..1000 {
        let r: f64 = rng.random_range(-5.0..5.0);
        let alpha: f64 = rng.random_range(-1.0..=1.0);
        let spec = LossSpec::shifted(alpha);
        let (v, g, h) = direct(r, alpha);
        ensure!(
            close(loss_value(r, &spec), v, 1e-12)
                && close(loss_gradient(r, &spec), g, 1e-12)
                && close(loss_hessian(r, &spec), h, 1e-12),
            "mismatch at r={r} alpha={alpha}"
        );
    }
    let worked = [
        (loss_value(0.0, &LossSpec::shifted(-0.8)), 0.0),
        (loss_value(0.0, &LossSpec::shifted(0.5)), 0.0),
        (loss_value(-1.0, &LossSpec::shifted(-0.8)), 3.24),
        (loss_value(1.0, &LossSpec::shifted(-0.8)), 0.04),
        (loss_value(2.0, &LossSpec::shifted(0.0)), 4.0),
        (loss_value(2.0, &LossSpec::SQUARED), 4.0),
    ];
    for (got, want) in worked {
        ensure!((got - want).abs() <= 1e-12, "worked value {got} != {want}");
    }
    Ok("1000 random points and worked values 0, 3.24, 0.04, 4".into())
}

// ---------------------------------------------------------------- nn

fn c2_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let params = NnParams { hidden_layers: 3, hidden_units: 6, ..NnParams::default() };
    let mut worst: f64 = 0.0;
    for b in 0..10 {
        let d = rng.random_range(2..6);
        let n = rng.random_range(2..6);
        let net = Network::new(d, &params, &mut rng);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let batch: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
        let alpha = [0.0, -0.8, 0.8, -0.3][b % 4];
        let loss = if alpha == 0.0 { LossSpec::SQUARED } else { LossSpec::shifted(alpha) };
        worst = worst.max(max_relative_error(&net, &batch, &ys, &loss));
    }
    ensure!(worst < 1e-4, "max relative error {worst:e}");
    Ok(format!("10 batches, max relative error {worst:.2e}"))
}

// ---------------------------------------------------------------- gtb

fn c3_gtb_symmetric() -> Outcome {
    let instances = generate_batch(ProblemClass::Knapsack, 60, dataset_sizes(ProblemClass::Knapsack), SEED).unwrap();
    let dataset = build_dataset(instances, &SolveConfig::nodes(200_000)).unwrap();
    let ids: Vec<String> = dataset.ids().into_iter().collect();
    let file = |pair: PairConfig| {
        let mut out = String::new();
        for config in [pair.lower, pair.upper] {
            let estimator = train_full(&dataset, &config).unwrap();
            out += &model_to_json(&bion::files::ModelFile {
                estimator,
                training_ids: ids.clone(),
                dataset_hash: dataset.hash(),
            });
        }
        out
    };
    let asym = file(Variant::GtbA.pair(0.3, 0.0, 9));
    let mut squared = Variant::GtbA.pair(0.3, 0.0, 9);
    squared.lower.loss = LossSpec::SQUARED;
    squared.upper.loss = LossSpec::SQUARED;
    ensure!(matches!(squared.upper.model, ModelSpec::Gtb(_)), "not a GTB spec");
    let sq = file(squared);
    ensure!(asym == sq, "model files differ");
    Ok(format!("{} bytes identical", sq.len()))
}

// ---------------------------------------------------------------- solver

/// 100 seeded small instances with their brute-force optimum.
fn oracle_instances() -> &'static [(Instance, i64)] {
    static CELL: OnceLock<Vec<(Instance, i64)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        (0..100u64)
            .map(|k| {
                let seed = SEED * 1000 + k;
                let inst = match k % 3 {
                    0 => generate_instance(ProblemClass::Knapsack, rng.random_range(4..=12), seed).unwrap(),
                    1 => generate_instance(ProblemClass::BinPacking, rng.random_range(4..=6), seed).unwrap(),
                    _ => jobshop(2, rng.random_range(2..=3), seed).unwrap(),
                };
                let z = match inst.class {
                    ProblemClass::Knapsack => bf_knapsack(&inst),
                    ProblemClass::BinPacking => bf_bin_packing(&inst),
                    ProblemClass::Jobshop => bf_jobshop(&inst),
                };
                (inst, z)
            })
            .collect()
    })
}

fn optimal(r: &SolveResult) -> Option<i64> {
    (r.status == SolveStatus::Optimal).then_some(r.best_objective).flatten()
}

fn c4_solver_oracle() -> Outcome {
    let config = SolveConfig::nodes(2_000_000);
    let fixture = bin_packing("fixture", vec![5, 5, 5, 5], 10);
    ensure!(optimal(&solve(&compile(&fixture).unwrap(), &config)) == Some(2), "[5,5,5,5]/10 is not 2");
    let mut agree = 0;
    for (inst, z) in oracle_instances() {
        let got = optimal(&solve(&compile(inst).unwrap(), &config));
        ensure!(got == Some(*z), "{}: solver {got:?}, brute force {z}", inst.id);
        agree += 1;
    }
    Ok(format!("{agree}/100 optima agree with enumeration"))
}

fn c5_injection() -> Outcome {
    let config = SolveConfig::nodes(2_000_000);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let (mut admissible_runs, mut cut_runs) = (0, 0);
    for (inst, _) in oracle_instances() {
        let model = compile(inst).unwrap();
        let plain = optimal(&solve(&model, &config)).ok_or("plain solve not optimal")?;
        let (lb, ub) = (inst.objective_lb, inst.objective_ub);
        for _ in 0..20 {
            let est = BoundaryEstimate {
                est_lb: rng.random_range(lb..=plain),
                est_ub: rng.random_range(plain..=ub),
                clamped_lb: false,
                clamped_ub: false,
                crossed: false,
            };
            let mode = if rng.random_bool(0.5) { InjectMode::Both } else { InjectMode::CuttingOnly };
            let r = solve_with_fallback(&model, &est, mode, &config);
            ensure!(optimal(&r) == Some(plain), "{}: admissible {est:?} gave {:?}", inst.id, r.best_objective);
            ensure!(!r.fallback_used, "{}: fallback on admissible estimate", inst.id);
            admissible_runs += 1;
        }
        // cutting bound strictly beyond the optimum
        let est = match inst.sense() {
            Sense::Minimize if plain > lb => BoundaryEstimate::original(lb, rng.random_range(lb..plain)),
            Sense::Maximize if plain < ub => BoundaryEstimate::original(rng.random_range(plain + 1..=ub), ub),
            _ => continue,
        };
        for mode in [InjectMode::Both, InjectMode::CuttingOnly] {
            let r = solve_with_fallback(&model, &est, mode, &config);
            ensure!(r.fallback_used, "{}: no fallback for {est:?}", inst.id);
            ensure!(optimal(&r) == Some(plain), "{}: fallback value {:?} != {plain}", inst.id, r.best_objective);
            cut_runs += 1;
        }
    }
    Ok(format!("{admissible_runs} admissible runs, {cut_runs} inadmissible cuts with fallback"))
}

// ---------------------------------------------------------------- metrics

fn inc(objective: i64, ms: u64) -> Incumbent {
    Incumbent { objective, elapsed: Duration::from_millis(ms), nodes: ms }
}

fn finished(ms: u64) -> SolveResult {
    SolveResult {
        status: SolveStatus::Optimal,
        best_objective: Some(1),
        best_assignment: None,
        first_solution: Some(inc(1, ms)),
        timeline: vec![inc(1, ms)],
        nodes_explored: ms,
        elapsed: Duration::from_millis(ms),
        fallback_used: false,
    }
}

fn c6_metrics() -> Outcome {
    let est = |lo, hi| BoundaryEstimate::original(lo, hi);
    let checks: Vec<(&str, f64, f64)> = vec![
        ("gap min", gap_reduction(&est(0, 20), 10, 0, 100, Sense::Minimize).unwrap(), 800.0 / 9.0),
        ("gap no cut", gap_reduction(&est(0, 100), 10, 0, 100, Sense::Minimize).unwrap(), 0.0),
        ("gap max", gap_reduction(&est(11, 40), 22, 0, 40, Sense::Maximize).unwrap(), 50.0),
        ("size", size_reduction(&est(5, 20), 0, 100).unwrap(), 85.0),
        ("size same", size_reduction(&est(0, 100), 0, 100).unwrap(), 0.0),
        ("size point", size_reduction(&est(7, 7), 0, 100).unwrap(), 100.0),
        ("fixed min", fixed_upper_bound(10, 20, Sense::Minimize) as f64, 15.0),
        ("fixed degenerate", fixed_upper_bound(10, 10, Sense::Minimize) as f64, 10.0),
        ("fixed max", fixed_upper_bound(22, 14, Sense::Maximize) as f64, 18.0),
        ("qof", quality_of_first(12, 20).unwrap(), 40.0),
        ("qof equal", quality_of_first(20, 20).unwrap(), 0.0),
        ("qof worse", quality_of_first(20, 12).unwrap(), -200.0 / 3.0),
        (
            "est faster",
            equivalent_solution_effort(
                &[inc(15, 40), inc(12, 100)],
                300.0,
                &inc(12, 50),
                Sense::Minimize,
                Effort::Time,
            )
            .value,
            -50.0,
        ),
        (
            "est identical",
            equivalent_solution_effort(&[inc(12, 100)], 300.0, &inc(12, 100), Sense::Minimize, Effort::Time).value,
            0.0,
        ),
        (
            "est slower",
            equivalent_solution_effort(&[inc(12, 100)], 300.0, &inc(12, 200), Sense::Minimize, Effort::Time).value,
            100.0,
        ),
        ("ttc", time_to_completion(&finished(100), &finished(80), Effort::Time).value, -20.0),
        ("ttc equal", time_to_completion(&finished(100), &finished(100), Effort::Time).value, 0.0),
    ];
    for (name, got, want) in &checks {
        ensure!((got - want).abs() <= 1e-9, "{name}: {got} != {want}");
    }
    let mut incomplete = finished(80);
    incomplete.status = SolveStatus::Satisfiable;
    let m = time_to_completion(&finished(100), &incomplete, Effort::Time);
    ensure!(m.value.is_nan() && m.flagged, "incomplete run not flagged");
    Ok(format!("{} worked examples", checks.len() + 1))
}

// ---------------------------------------------------------------- estimation

fn bin_packing_dataset() -> &'static Dataset {
    static CELL: OnceLock<Dataset> = OnceLock::new();
    CELL.get_or_init(|| {
        let class = ProblemClass::BinPacking;
        let instances = generate_batch(class, 500, dataset_sizes(class), SEED).unwrap();
        build_dataset(instances, &SolveConfig::nodes(200_000)).unwrap()
    })
}

fn c7_estimation() -> Outcome {
    let d = bin_packing_dataset();
    let cv = CvConfig { k: 10, repeats: 10, seed: SEED };
    let mut lines = vec![format!("{} solved / {} unsolved", d.len(), d.n_unsolved)];
    let mut failed = false;
    for v in [Variant::GtbA, Variant::NnA] {
        let m = cross_validate(d, &v.default_pair(SEED), &cv).map_err(|e| e.to_string())?.metrics;
        let ok = m.admissible_pct.median >= 95.0 && m.size_pct.median >= 50.0;
        failed |= !ok;
        lines.push(format!(
            "{} admissible {:.1} size {:.1} gap {:.1}{}",
            v.name(),
            m.admissible_pct.median,
            m.size_pct.median,
            m.gap_pct.median,
            if ok { "" } else { " (below threshold)" }
        ));
    }
    let text = lines.join("; ");
    if failed {
        Err(text)
    } else {
        Ok(text)
    }
}

/// Repeats for the NN_s sweep; 11 lambdas x 10 folds x 2 networks each
/// dominate the runtime.
const NN_SWEEP_REPEATS: usize = 2;

fn c8_sweep() -> Outcome {
    let d = bin_packing_dataset();
    let mut lines = Vec::new();
    for (v, repeats) in [(Variant::GtbS, 10), (Variant::NnS, NN_SWEEP_REPEATS)] {
        let cv = CvConfig { k: 10, repeats, seed: SEED };
        let base = v.default_pair(SEED);
        let rows = lambda_sweep(d, &base, &lambda_grid(), &cv).map_err(|e| e.to_string())?;
        ensure!(rows.len() == 11, "{} rows", rows.len());
        ensure!(rows[0].lambda == 0.0 && rows[10].lambda == 0.8, "grid does not span [0, 0.8]");
        ensure!(rows.iter().all(|r| r.dataset_hash == d.hash()), "dataset hash differs between rows");
        let at_zero = &rows[0].outcome;
        let selected = v.default_lambda();
        let chosen = match rows.iter().find(|r| r.lambda == selected) {
            Some(r) => r.outcome.clone(),
            None => cross_validate(d, &base.with_lambda(selected), &cv).map_err(|e| e.to_string())?,
        };
        let same_folds = at_zero.folds.iter().zip(&chosen.folds).all(|(a, b)| a.train_ids == b.train_ids);
        ensure!(same_folds, "{}: folds differ", v.name());
        let (a0, a1) = (at_zero.metrics.admissible_pct.median, chosen.metrics.admissible_pct.median);
        ensure!(a1 >= a0, "{}: admissibility {a1} at lambda {selected} < {a0} at 0", v.name());
        lines.push(format!("{} admissible {a0:.1} at 0 -> {a1:.1} at {selected} ({repeats} repeats)", v.name()));
    }
    Ok(lines.join("; "))
}

// ---------------------------------------------------------------- cli

fn bion(args: &[&str], seed_env: Option<&str>) -> Result<(), String> {
    let exe = bion_exe();
    if !exe.exists() {
        return Err(format!("{} not found; build it with `cargo build -p bion`", exe.display()));
    }
    let mut cmd = Command::new(exe);
    cmd.args(args);
    match seed_env {
        Some(s) => cmd.env("BION_SEED", s),
        None => cmd.env_remove("BION_SEED"),
    };
    let out = cmd.output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("bion {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn c9_benchmark() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |x: &str| dir.path().join(x);
    let models = p("models");
    let mut held = Vec::new();
    for class in ProblemClass::ALL {
        let c = class.name();
        let (train_dir, held_dir) = (p(&format!("{c}-train")), p(&format!("{c}-held")));
        let (train_ds, held_ds) = (p(&format!("{c}-train.json")), p(&format!("{c}-held.json")));
        bion(&["--class", c, "--seed", "42", "--out", s(&train_dir), "generate", "--count", "100"], None)?;
        bion(
            &["--class", c, "--seed", "42", "--out", s(&held_dir), "generate", "--count", "40", "--start", "100"],
            None,
        )?;
        bion(&["--out", s(&train_ds), "build-dataset", "--input", s(&train_dir)], None)?;
        bion(&["--out", s(&held_ds), "build-dataset", "--input", s(&held_dir)], None)?;
        bion(&["--model", "gtb-a", "--seed", "42", "--out", s(&models), "train", "--dataset", s(&train_ds)], None)?;
        held.push(held_ds);
    }
    let mut args: Vec<String> =
        ["--model", "gtb-a", "--seed", "42", "--out", s(&p("bench")), "benchmark"].map(String::from).to_vec();
    for h in &held {
        args.extend(["--dataset".to_string(), s(h).to_string()]);
    }
    args.extend(["--models".to_string(), s(&models).to_string(), "--count".to_string(), "30".to_string()]);
    bion(&args.iter().map(String::as_str).collect::<Vec<_>>(), None)?;

    let t = Table::parse(&std::fs::read_to_string(p("bench/benchmark.csv")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    for col in ["eqnodes_pct", "ttc_nodes_pct", "first_nodes", "total_nodes"] {
        ensure!(t.column(col).is_some(), "missing column {col}");
    }
    let mut fallbacks_fixed = 0;
    for class in ProblemClass::ALL {
        let rows: Vec<&Vec<String>> = t.rows.iter().filter(|r| t.get(r, "class") == Some(class.name())).collect();
        let ids: BTreeSet<&str> = rows.iter().map(|r| t.get(r, "instance_id").unwrap()).collect();
        ensure!(ids.len() == 30, "{class}: {} instances", ids.len());
        for cfg in ["original", "both", "upper", "fixed"] {
            let n = rows.iter().filter(|r| t.get(r, "config") == Some(cfg)).count();
            ensure!(n == 30, "{class}: {n} {cfg} rows");
        }
        fallbacks_fixed += rows
            .iter()
            .filter(|r| t.get(r, "config") == Some("fixed") && t.get(r, "fallback_used") != Some("false"))
            .count();
    }
    ensure!(fallbacks_fixed == 0, "{fallbacks_fixed} fixed-bound runs used the fallback");
    let eqnodes: Vec<f64> = t
        .rows
        .iter()
        .filter(|r| t.get(r, "config") != Some("original"))
        .filter_map(|r| t.get(r, "eqnodes_pct").and_then(|v| v.parse().ok()))
        .collect();
    ensure!(!eqnodes.is_empty(), "no node-based equivalent effort values");
    Ok(format!("3 classes x 30 instances x 4 configs, {} eqnodes values, fixed never fell back", eqnodes.len()))
}

fn pipeline(root: &Path) -> Result<(), String> {
    let env = Some("42");
    let p = |x: &str| root.join(x);
    let run = |args: &[&str]| bion(args, env);
    run(&["--class", "knapsack", "--out", s(&p("train")), "generate", "--count", "60"])?;
    run(&["--class", "knapsack", "--out", s(&p("held")), "generate", "--count", "20", "--start", "60"])?;
    run(&["--out", s(&p("train.json")), "build-dataset", "--input", s(&p("train"))])?;
    run(&["--out", s(&p("held.json")), "build-dataset", "--input", s(&p("held"))])?;
    run(&["--model", "gtb-a,nn-a", "--out", s(&p("models")), "train", "--dataset", s(&p("train.json"))])?;
    run(&[
        "--model",
        "lr,gtb-s",
        "--out",
        s(&p("out/sweep.csv")),
        "sweep-lambda",
        "--dataset",
        s(&p("train.json")),
        "--folds",
        "5",
        "--repeats",
        "1",
    ])?;
    run(&[
        "--model",
        "gtb-a,nn-a",
        "--out",
        s(&p("out/cv.csv")),
        "evaluate",
        "--dataset",
        s(&p("train.json")),
        "--folds",
        "5",
        "--repeats",
        "1",
    ])?;
    run(&[
        "--model",
        "gtb-a",
        "--out",
        s(&p("out/held.csv")),
        "evaluate",
        "--dataset",
        s(&p("held.json")),
        "--models",
        s(&p("models")),
    ])?;
    run(&[
        "--model",
        "gtb-a",
        "--out",
        s(&p("out")),
        "benchmark",
        "--dataset",
        s(&p("held.json")),
        "--models",
        s(&p("models")),
        "--count",
        "10",
    ])?;
    run(&["report", "--input", s(&p("out"))])?;
    Ok(())
}

fn c10_determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    pipeline(a.path())?;
    pipeline(b.path())?;
    let mut names: Vec<String> = std::fs::read_dir(a.path().join("out"))
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    ensure!(names.len() == 5, "expected 5 CSVs, found {names:?}");
    for n in &names {
        let read = |root: &Path| -> Result<String, String> {
            let text = std::fs::read_to_string(root.join("out").join(n)).map_err(|e| e.to_string())?;
            let t = Table::parse(&text).map_err(|e| e.to_string())?.without(&WALL_CLOCK_COLUMNS);
            Ok(format!("{:?}\n{:?}", t.header, t.rows))
        };
        ensure!(read(a.path())? == read(b.path())?, "{n} differs between runs");
    }
    for m in std::fs::read_dir(a.path().join("models")).map_err(|e| e.to_string())? {
        let m = m.map_err(|e| e.to_string())?.path();
        let other = b.path().join("models").join(m.file_name().unwrap());
        ensure!(std::fs::read(&m).ok() == std::fs::read(&other).ok(), "{} differs", m.display());
    }
    Ok(format!("{} CSVs identical outside wall-clock columns: {}", names.len(), names.join(", ")))
}

// ---------------------------------------------------------------- driver

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 10] = [
    (1, "loss function", c1_loss),
    (2, "nn gradient check", c2_gradient),
    (3, "gtb symmetric reduction", c3_gtb_symmetric),
    (4, "solver vs brute force", c4_solver_oracle),
    (5, "bound injection soundness", c5_injection),
    (6, "metric formulas", c6_metrics),
    (7, "bin-packing estimation quality", c7_estimation),
    (8, "label-shift sweep", c8_sweep),
    (9, "benchmark structure", c9_benchmark),
    (10, "end-to-end determinism", c10_determinism),
];

fn main() {
    let selected: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (n, name, f) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {n:>2} FAIL  {name} [{secs:.1}s]: {detail}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
