use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use sparse_forest::experiment::{
    self, load_spec, plot_cut_probs, plot_mse_curve, run_cut_probability, run_mse_curve, write_cut_probs,
    write_mse_curve, ExperimentSpec, Manifest, PolicyKind,
};
use sparse_forest::forest::ForestSnapshot;
use sparse_forest::models::{ModelKind, SyntheticModel};
use sparse_forest::rng::{stream, tag};
use sparse_forest::theory::{run_theory_suite, write_bound_report, TheoryConfig};
use sparse_forest::{fit, Dataset, Error, ForestConfig, SplitProbabilities};

#[derive(Parser)]
#[command(name = "sparse-forest", version, about = "Midpoint random forests and sparse-regression experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed; overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic dataset and write it as data.csv.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        noise_sd: Option<f64>,
    },
    /// Fit a forest on a CSV dataset and write forest.json.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Training data (columns x1..xd, y).
        #[arg(long)]
        data: PathBuf,
        /// Independent sample guiding the coordinate choice (guided policy).
        #[arg(long)]
        split_data: Option<PathBuf>,
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        #[arg(long)]
        k_n: Option<usize>,
        #[arg(long)]
        trees: Option<usize>,
        #[arg(long)]
        m_try: Option<usize>,
        #[arg(long)]
        target_leaves: Option<usize>,
    },
    /// Predict with a saved forest and write predictions.csv.
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        forest: PathBuf,
        /// Query points (columns x1..xd, y optional).
        #[arg(long)]
        data: PathBuf,
    },
    /// Per-coordinate split ratios over an (n, d) grid.
    CutProbs {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Test MSE over an (n, d) grid.
    MseCurve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Verify the convergence bounds and write bound_report.csv.
    TheoryCheck {
        #[command(flatten)]
        common: Common,
        /// Skip the Monte-Carlo checks.
        #[arg(long)]
        exact_only: bool,
    },
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Model for the default grid when no config is given.
    #[arg(long, value_enum, default_value = "sinus")]
    model: ModelArg,
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    /// 100 replicates, full-sized forests and 50000 test points.
    #[arg(long)]
    full_scale: bool,
    #[arg(long)]
    no_plots: bool,
}

#[derive(ValueEnum, Clone, Copy)]
enum ModelArg {
    Sinus,
    Friedman1,
    Tree,
    SinusPlusLinear,
}

impl ModelArg {
    fn kind(self) -> ModelKind {
        match self {
            ModelArg::Sinus => ModelKind::Sinus,
            ModelArg::Friedman1 => ModelKind::Friedman1 { center: sparse_forest::models::default_friedman_center() },
            ModelArg::Tree => ModelKind::Tree,
            ModelArg::SinusPlusLinear => ModelKind::SinusPlusLinear,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum PolicyArg {
    PurelyRandom,
    Guided,
    Cart,
}

impl From<PolicyArg> for PolicyKind {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::PurelyRandom => PolicyKind::PurelyRandom,
            PolicyArg::Guided => PolicyKind::Guided,
            PolicyArg::Cart => PolicyKind::Cart,
        }
    }
}

/// `fit --config` file.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FitFile {
    policy: Option<PolicyArg>,
    k_n: Option<usize>,
    trees: Option<usize>,
    m_try: Option<usize>,
    target_leaves: Option<usize>,
    probs: Option<Vec<f64>>,
    seed: Option<u64>,
}

/// `theory-check --config` file.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct TheoryFile {
    seed: Option<u64>,
    monte_carlo: Option<bool>,
    law_trees: Option<usize>,
    law_replicates: Option<usize>,
    decomposition_replicates: Option<usize>,
}

enum Failure {
    Error(Error),
    ChecksFailed(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(e.into())
    }
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn prepare(common: &Common) -> Result<(), Failure> {
    if let Some(t) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    fs::create_dir_all(&common.out)?;
    Ok(())
}

fn grid_spec(common: &Common, grid: &GridArgs, for_cut_probs: bool) -> Result<ExperimentSpec, Error> {
    let mut spec = match &common.config {
        Some(path) => load_spec(path)?,
        None => {
            let policy = if for_cut_probs { PolicyKind::Guided } else { PolicyKind::Cart };
            ExperimentSpec::desk(grid.model.kind(), policy, 0)
        }
    };
    if let Some(p) = grid.policy {
        spec.policy = p.into();
    }
    if let Some(s) = common.seed {
        spec.seed = s;
    }
    if grid.full_scale {
        spec = spec.full_scale(for_cut_probs);
    }
    spec.validate()?;
    Ok(spec)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate { common, model, d, n, noise_sd } => {
            prepare(&common)?;
            let spec = common.config.as_deref().map(load_spec).transpose()?;
            let kind = match (model, &spec) {
                (Some(m), _) => m.kind(),
                (None, Some(s)) => s.model.clone(),
                (None, None) => ModelKind::Sinus,
            };
            let d = d.or(spec.as_ref().map(|s| s.d_values[0])).unwrap_or(10);
            let n = n.or(spec.as_ref().map(|s| s.n_values[0])).unwrap_or(1000);
            let noise = noise_sd.or(spec.as_ref().map(|s| s.noise_sd)).unwrap_or(1.0);
            let seed = common.seed.or(spec.as_ref().map(|s| s.seed)).unwrap_or(0);
            let model = SyntheticModel::new(kind, d, noise)?;
            let data = model.generate(n, &mut stream(seed, &[tag::TRAIN]));
            data.save_csv(common.out.join("data.csv"))?;
        }
        Command::Fit { common, data, split_data, policy, k_n, trees, m_try, target_leaves } => {
            prepare(&common)?;
            let file: FitFile = match &common.config {
                Some(p) => read_toml(p)?,
                None => FitFile::default(),
            };
            let train = Arc::new(Dataset::load_csv(&data)?);
            let seed = common.seed.or(file.seed).unwrap_or(0);
            let k_n =
                k_n.or(file.k_n).unwrap_or_else(|| sparse_forest::config::default_target_leaves(train.n()).max(2));
            let trees = trees.or(file.trees).unwrap_or(500);
            let policy = policy.or(file.policy).unwrap_or(PolicyArg::PurelyRandom);
            let target = target_leaves.or(file.target_leaves);
            let mut config = match policy {
                PolicyArg::PurelyRandom => ForestConfig::purely_random(k_n, trees, seed),
                PolicyArg::Guided => {
                    let path =
                        split_data.ok_or_else(|| Error::Config("the guided policy needs --split-data".into()))?;
                    let sample = Arc::new(Dataset::load_csv(&path)?);
                    ForestConfig::guided(k_n, trees, m_try.or(file.m_try).unwrap_or(train.d()), sample, seed)
                }
                PolicyArg::Cart => {
                    ForestConfig::cart(trees, m_try.or(file.m_try).unwrap_or((train.d() / 3).max(1)), seed)
                }
            };
            if let Some(p) = file.probs {
                config = config.with_probs(SplitProbabilities::new(p)?);
            }
            if let Some(t) = target {
                config = config.with_target_leaves(t);
            }
            let forest = fit(&config, train)?;
            let out = BufWriter::new(File::create(common.out.join("forest.json"))?);
            serde_json::to_writer(out, &forest.snapshot()).map_err(|e| Error::Data(e.to_string()))?;
        }
        Command::Predict { common, forest, data } => {
            prepare(&common)?;
            let file = File::open(&forest)?;
            let snapshot: ForestSnapshot =
                serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| Error::Data(e.to_string()))?;
            let queries = Dataset::load_csv(&data)?;
            if queries.d() != snapshot.d {
                return Err(Error::Dimension { expected: snapshot.d, got: queries.d() }.into());
            }
            let mut w = csv::Writer::from_path(common.out.join("predictions.csv")).map_err(Error::from)?;
            w.write_record(["prediction"]).map_err(Error::from)?;
            for x in queries.rows() {
                w.write_record([snapshot.predict(x).to_string()]).map_err(Error::from)?;
            }
            w.flush()?;
        }
        Command::CutProbs { common, grid } => {
            prepare(&common)?;
            let spec = grid_spec(&common, &grid, true)?;
            let run = run_cut_probability(&spec)?;
            for w in &run.warnings {
                eprintln!("warning: {w}");
            }
            write_cut_probs(&run.table, File::create(common.out.join(experiment::CUT_PROBS_FILE))?)?;
            Manifest::new("cut-probs", &spec).save(common.out.join(experiment::MANIFEST_FILE))?;
            if !grid.no_plots {
                plot_cut_probs(&run.table, &common.out)?;
            }
        }
        Command::MseCurve { common, grid } => {
            prepare(&common)?;
            let spec = grid_spec(&common, &grid, false)?;
            let curve = run_mse_curve(&spec)?;
            write_mse_curve(&curve, File::create(common.out.join(experiment::MSE_CURVE_FILE))?)?;
            Manifest::new("mse-curve", &spec).save(common.out.join(experiment::MANIFEST_FILE))?;
            if !grid.no_plots {
                plot_mse_curve(&curve, &common.out)?;
            }
        }
        Command::TheoryCheck { common, exact_only } => {
            prepare(&common)?;
            let file: TheoryFile = match &common.config {
                Some(p) => read_toml(p)?,
                None => TheoryFile::default(),
            };
            let defaults = TheoryConfig::default();
            let config = TheoryConfig {
                seed: common.seed.or(file.seed).unwrap_or(defaults.seed),
                monte_carlo: !exact_only && file.monte_carlo.unwrap_or(true),
                law_trees: file.law_trees.unwrap_or(defaults.law_trees),
                law_replicates: file.law_replicates.unwrap_or(defaults.law_replicates),
                decomposition_replicates: file.decomposition_replicates.unwrap_or(defaults.decomposition_replicates),
            };
            let reports = run_theory_suite(&config)?;
            write_bound_report(&reports, File::create(common.out.join("bound_report.csv"))?)?;
            let failed = reports.iter().filter(|r| !r.pass).count();
            eprintln!("{} checks written", reports.len());
            if failed > 0 {
                return Err(Failure::ChecksFailed(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed(n)) => {
            eprintln!("{n} checks failed");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
