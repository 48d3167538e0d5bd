//! The `bion` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Duration;

use bion_core::bench::{run_benchmark, summarize, BenchConfig};
use bion_core::estimator::{estimate_bounds, train, BoundaryEstimate, PairConfig, TrainedEstimator, Variant};
use bion_core::features::apply_schema;
use bion_core::generate::{dataset_sizes, generate_indexed};
use bion_core::solver::{solve, solve_with_fallback, InjectMode, SolveConfig};
use bion_core::validation::{
    aggregate, build_dataset, cross_validate, evaluate, lambda_grid, lambda_sweep, CvConfig, Dataset, FoldRecord,
};
use bion_core::{compile::compile, ProblemClass};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{BionError, Result};
use crate::files::{
    self, instance_file_name, load_model, read_dataset, read_instance, read_instance_dir, save_model, to_json,
    write_dataset, write_instance, write_text, ModelFile, RecordDoc, RecordsDoc, RunDoc, SolveDoc, FORMAT_VERSION,
};
use crate::report::render;
use crate::tables::{
    benchmark_record, metrics_record, summary_record, sweep_header, sweep_record, write_csv, Table, BENCHMARK_HEADER,
    METRICS_HEADER, SUMMARY_HEADER,
};

pub const SEED_ENV: &str = "BION_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "bion",
    version,
    about = "Learn objective boundaries for constraint optimization and measure their effect"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Base seed (default 0). BION_SEED overrides it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Problem class: bin-packing, jobshop or knapsack.
    #[arg(long, global = true, value_parser = parse_class)]
    pub class: Option<ProblemClass>,
    /// Estimator variants, comma separated: lr, gtb-s, gtb-a, nn-s, nn-a.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_variant)]
    pub model: Vec<Variant>,
    /// Label-shift factor in [0, 1).
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Loss factor of the overestimator (<= 0); the underestimator uses its negation.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Which estimated bounds to impose: both, or only the cutting side.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Wall-clock budget per solver run (default 60000).
    #[arg(long, global = true)]
    pub budget_ms: Option<u64>,
    /// Node budget per solver run (default 200000).
    #[arg(long, global = true)]
    pub budget_nodes: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Both,
    Upper,
}

impl From<ModeArg> for InjectMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Both => InjectMode::Both,
            ModeArg::Upper => InjectMode::CuttingOnly,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write seeded instances of one class into the --out directory.
    Generate {
        #[arg(long)]
        count: usize,
        /// Fixed size; by default sizes cycle through a solvable range.
        #[arg(long)]
        size: Option<usize>,
        /// Index of the first instance in the seeded sequence, so a second
        /// call can continue a batch with disjoint instances.
        #[arg(long, default_value_t = 0)]
        start: usize,
    },
    /// Solve one instance, optionally with estimated or explicit bounds.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Directory with trained models; bounds come from the first --model.
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        lb: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        ub: Option<i64>,
    },
    /// Solve a directory of instances to optimality and store the dataset.
    BuildDataset {
        #[arg(long)]
        input: PathBuf,
    },
    /// Train lower and upper estimators on a whole dataset.
    Train {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Cross-validate each model over the label-shift grid 0, 0.08, ..., 0.8.
    SweepLambda {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
    },
    /// Estimation metrics: cross-validation, or held-out evaluation with --models.
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        /// Evaluate trained models on the whole dataset instead of cross-validating.
        #[arg(long)]
        models: Option<PathBuf>,
    },
    /// Run the four solver configurations on held-out instances.
    Benchmark {
        /// Solved held-out datasets, one per class.
        #[arg(long, required = true)]
        dataset: Vec<PathBuf>,
        /// Directory with trained models for every benchmarked class.
        #[arg(long)]
        models: PathBuf,
        /// Instances drawn from each dataset.
        #[arg(long, default_value_t = 30)]
        count: usize,
    },
    /// Summarise every CSV in a directory as markdown.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

fn parse_class(s: &str) -> std::result::Result<ProblemClass, String> {
    ProblemClass::from_name(s).ok_or_else(|| format!("unknown class '{s}' (bin-packing, jobshop, knapsack)"))
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    Variant::from_name(s).ok_or_else(|| format!("unknown model '{s}' (lr, gtb-s, gtb-a, nn-s, nn-a)"))
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

impl Global {
    pub fn seed(&self) -> Result<u64> {
        match std::env::var(SEED_ENV) {
            Ok(v) => {
                v.trim().parse().map_err(|_| BionError::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer")))
            }
            Err(_) => Ok(self.seed.unwrap_or(0)),
        }
    }

    fn out(&self) -> Result<&Path> {
        self.out.as_deref().ok_or_else(|| BionError::Usage("--out is required".into()))
    }

    fn class(&self) -> Result<ProblemClass> {
        self.class.ok_or_else(|| BionError::Usage("--class is required".into()))
    }

    fn models_or(&self, default: &[Variant]) -> Vec<Variant> {
        if self.model.is_empty() {
            default.to_vec()
        } else {
            self.model.clone()
        }
    }

    fn solve_config(&self) -> Result<SolveConfig> {
        let c = SolveConfig::new(
            self.budget_nodes.unwrap_or(200_000),
            Duration::from_millis(self.budget_ms.unwrap_or(60_000)),
        );
        Ok(c)
    }

    /// Lower/upper configuration for `v` with flag overrides applied.
    fn pair(&self, v: Variant, seed: u64) -> Result<PairConfig> {
        let lambda = self.lambda.unwrap_or(v.default_lambda());
        let alpha = match self.alpha {
            Some(a) if !v.is_asymmetric() && a != 0.0 => {
                return Err(BionError::Usage(format!("--alpha applies to gtb-a and nn-a, not {}", v.name())))
            }
            Some(a) => a,
            None => v.default_alpha(),
        };
        let pair = v.pair(lambda, alpha, seed);
        pair.validate()?;
        Ok(pair)
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Generate { count, size, start } => cmd_generate(g, *count, *size, *start),
        Command::Solve { instance, models, lb, ub } => cmd_solve(g, instance, models.as_deref(), *lb, *ub),
        Command::BuildDataset { input } => cmd_build_dataset(g, input),
        Command::Train { dataset } => cmd_train(g, dataset),
        Command::SweepLambda { dataset, folds, repeats } => cmd_sweep(g, dataset, *folds, *repeats),
        Command::Evaluate { dataset, folds, repeats, models } => {
            cmd_evaluate(g, dataset, *folds, *repeats, models.as_deref())
        }
        Command::Benchmark { dataset, models, count } => cmd_benchmark(g, dataset, models, *count),
        Command::Report { input } => cmd_report(g, input),
    }
}

fn cmd_generate(g: &Global, count: usize, size: Option<usize>, start: usize) -> Result<()> {
    let class = g.class()?;
    let out = g.out()?;
    let sizes = size.map_or_else(|| dataset_sizes(class), |s| s..=s);
    let instances = generate_indexed(class, start..start + count, sizes, g.seed()?)?;
    for i in &instances {
        write_instance(i, &out.join(instance_file_name(i)))?;
    }
    eprintln!("wrote {} {} instances to {}", instances.len(), class, out.display());
    Ok(())
}

pub fn model_path(dir: &Path, class: ProblemClass, v: Variant, side: &str) -> PathBuf {
    dir.join(format!("{}-{}-{side}.json", class.name(), v.name()))
}

fn load_pair(dir: &Path, class: ProblemClass, v: Variant) -> Result<(ModelFile, ModelFile)> {
    Ok((load_model(&model_path(dir, class, v, "lower"))?, load_model(&model_path(dir, class, v, "upper"))?))
}

fn cmd_solve(g: &Global, path: &Path, models: Option<&Path>, lb: Option<i64>, ub: Option<i64>) -> Result<()> {
    let instance = read_instance(path)?;
    let model = compile(&instance)?;
    let config = g.solve_config()?;
    let mode = InjectMode::from(g.mode.unwrap_or(ModeArg::Both));
    let estimate = match (models, lb, ub) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(BionError::Usage("use either --models or --lb/--ub".into()))
        }
        (Some(dir), ..) => {
            let v = g.models_or(&[Variant::GtbA])[0];
            let (lo, hi) = load_pair(dir, instance.class, v)?;
            Some(estimate_bounds(&lo.estimator, &hi.estimator, &instance)?)
        }
        (None, None, None) => None,
        (None, lo, hi) => {
            let (olb, oub) = (instance.objective_lb, instance.objective_ub);
            let est_lb = lo.unwrap_or(olb).clamp(olb, oub);
            let est_ub = hi.unwrap_or(oub).clamp(olb, oub);
            if est_lb > est_ub {
                return Err(BionError::Usage(format!("--lb {est_lb} exceeds --ub {est_ub}")));
            }
            Some(BoundaryEstimate { est_lb, est_ub, clamped_lb: false, clamped_ub: false, crossed: false })
        }
    };
    let result = match &estimate {
        Some(est) => solve_with_fallback(&model, est, mode, &config),
        None => solve(&model, &config),
    };
    let doc = SolveDoc {
        format_version: FORMAT_VERSION,
        instance_id: instance.id.clone(),
        mode: estimate.map(|_| mode.as_str().to_string()),
        estimate,
        result: RunDoc::new(&result, true),
    };
    match &g.out {
        Some(out) => write_text(out, &to_json(&doc)),
        None => {
            print!("{}", to_json(&doc));
            Ok(())
        }
    }
}

fn cmd_build_dataset(g: &Global, input: &Path) -> Result<()> {
    let out = g.out()?;
    let instances = read_instance_dir(input)?;
    let dataset = build_dataset(instances, &g.solve_config()?)?;
    write_dataset(&dataset, out)?;
    eprintln!("{} solved, {} unsolved -> {}", dataset.len(), dataset.n_unsolved, out.display());
    Ok(())
}

fn cmd_train(g: &Global, dataset_path: &Path) -> Result<()> {
    let out = g.out()?;
    let dataset = read_dataset(dataset_path)?;
    let seed = g.seed()?;
    let ids: Vec<String> = dataset.ids().into_iter().collect();
    for v in g.models_or(&[Variant::GtbA]) {
        let pair = g.pair(v, seed)?;
        for (side, config) in [("lower", &pair.lower), ("upper", &pair.upper)] {
            let estimator = train_full(&dataset, config)?;
            let file = ModelFile { estimator, training_ids: ids.clone(), dataset_hash: dataset.hash() };
            save_model(&file, &model_path(out, dataset.class, v, side))?;
        }
        eprintln!("trained {} on {} instances", v.name(), dataset.len());
    }
    Ok(())
}

/// Trains one estimator on every dataset entry under the dataset schema.
pub fn train_full(dataset: &Dataset, config: &bion_core::estimator::EstimatorConfig) -> Result<TrainedEstimator> {
    let mut examples = Vec::with_capacity(dataset.len());
    for e in &dataset.entries {
        let y = config.label(&e.instance).expect("dataset entries are solved");
        examples.push((apply_schema(&dataset.schema, &e.raw)?, y));
    }
    Ok(train(dataset.class, config, &dataset.schema, &examples)?)
}

fn cv_config(folds: usize, repeats: usize, seed: u64) -> CvConfig {
    CvConfig { k: folds, repeats, seed }
}

fn cmd_sweep(g: &Global, dataset_path: &Path, folds: usize, repeats: usize) -> Result<()> {
    let out = g.out()?;
    let dataset = read_dataset(dataset_path)?;
    let seed = g.seed()?;
    let cv = cv_config(folds, repeats, seed);
    let mut rows = Vec::new();
    for v in g.models_or(&Variant::ALL) {
        let base = g.pair(v, seed)?;
        for row in lambda_sweep(&dataset, &base, &lambda_grid(), &cv)? {
            rows.push(sweep_record(
                dataset.class,
                v.name(),
                &base.with_lambda(row.lambda),
                &row.outcome.metrics,
                row.dataset_hash,
            ));
        }
        eprintln!("swept {}", v.name());
    }
    write_csv(out, &sweep_header(), rows)
}

fn cmd_evaluate(g: &Global, dataset_path: &Path, folds: usize, repeats: usize, models: Option<&Path>) -> Result<()> {
    let out = g.out()?;
    let dataset = read_dataset(dataset_path)?;
    let seed = g.seed()?;
    let mut rows = Vec::new();
    for v in g.models_or(&Variant::ALL) {
        let (pair, metrics) = match models {
            None => {
                let pair = g.pair(v, seed)?;
                (pair, cross_validate(&dataset, &pair, &cv_config(folds, repeats, seed))?.metrics)
            }
            Some(dir) => {
                let (lo, hi) = load_pair(dir, dataset.class, v)?;
                let trained: std::collections::BTreeSet<&String> =
                    lo.training_ids.iter().chain(&hi.training_ids).collect();
                if let Some(e) = dataset.entries.iter().find(|e| trained.contains(&e.instance.id)) {
                    return Err(BionError::Core(bion_core::Error::Mismatch(format!(
                        "instance {} was used to train {}",
                        e.instance.id,
                        v.name()
                    ))));
                }
                let mut evals = Vec::with_capacity(dataset.len());
                for e in &dataset.entries {
                    let est =
                        bion_core::estimator::estimate_bounds_raw(&lo.estimator, &hi.estimator, &e.instance, &e.raw)?;
                    evals.push(evaluate(e, est));
                }
                let fold = FoldRecord { repeat: 0, fold: 0, train_ids: Vec::new(), evals };
                let pair = PairConfig { lower: lo.estimator.config, upper: hi.estimator.config };
                (pair, aggregate(&[fold]))
            }
        };
        rows.push(metrics_record(dataset.class, v.name(), &pair, &metrics));
        eprintln!("evaluated {}", v.name());
    }
    write_csv(out, &METRICS_HEADER, rows)
}

fn cmd_benchmark(g: &Global, datasets: &[PathBuf], models: &Path, count: usize) -> Result<()> {
    let out = g.out()?;
    let v = g.models_or(&[Variant::GtbA])[0];
    let config = BenchConfig {
        solve: g.solve_config()?,
        mode: InjectMode::from(g.mode.unwrap_or(ModeArg::Both)),
        n_instances: count,
        seed: g.seed()?,
    };
    let mut records = Vec::new();
    let mut n_skipped = 0;
    for path in datasets {
        let dataset = read_dataset(path)?;
        let (lo, hi) = load_pair(models, dataset.class, v)?;
        let trained = lo.training_ids.iter().chain(&hi.training_ids).cloned().collect();
        let instances: Vec<_> = dataset.entries.into_iter().map(|e| e.instance).collect();
        let outcome = run_benchmark(&instances, &lo.estimator, &hi.estimator, &trained, &config)?;
        n_skipped += outcome.n_skipped;
        records.extend(outcome.records);
        eprintln!("benchmarked {}", dataset.class);
    }
    write_csv(&out.join("benchmark.csv"), &BENCHMARK_HEADER, records.iter().map(benchmark_record))?;
    write_csv(&out.join("summary.csv"), &SUMMARY_HEADER, summarize(&records).iter().map(summary_record))?;
    let doc = RecordsDoc {
        format_version: FORMAT_VERSION,
        n_skipped,
        records: records.iter().map(RecordDoc::from).collect(),
    };
    write_text(&out.join("records.json"), &to_json(&doc))
}

fn cmd_report(g: &Global, input: &Path) -> Result<()> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(input)
        .map_err(|e| BionError::io(input, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    let mut tables = Vec::new();
    for p in &paths {
        tables.push(Table::parse(&files::read_text(p)?)?);
    }
    let out = g.out.clone().unwrap_or_else(|| input.join("report.md"));
    write_text(&out, &render(&tables))
}
