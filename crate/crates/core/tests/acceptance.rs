//! End-to-end acceptance run. Prints one line per criterion and exits
//! non-zero when any of them fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use sparse_forest::config::ceil_log2;
use sparse_forest::experiment::{
    minimax_exponent, rate_exponent, run_cut_probability, run_mse_curve, sparse_rate_wins, ExperimentSpec, PolicyKind,
    MSE_CURVE_FILE,
};
use sparse_forest::forest::tree_at;
use sparse_forest::rng::derive;
use sparse_forest::theory::{
    best_population_cut, consistency_diagnostics, empirical_decomposition, inverse_moment_grid, inversion_grid,
    occupancy_law_check, positive_part_grid, split_count_law_check, weighted_variance_decrease, xi_cap_grid,
    BoundReport, ConsistencySpec, DecompositionSpec, LinearModel,
};
use sparse_forest::{Cell, Dataset, ForestConfig, ModelKind, SplitProbabilities, SyntheticModel};

const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn failures(reports: &[BoundReport]) -> Vec<&BoundReport> {
    reports.iter().filter(|r| !r.pass).collect()
}

fn partitions() -> Outcome {
    let mut bad = Vec::new();
    for k in 2..=1024usize {
        let tree = tree_at(&ForestConfig::purely_random(k, 1, derive(SEED, &[k as u64])), &Dataset::empty(3), 0)
            .expect("tree");
        let depth = ceil_log2(k);
        let cells = tree.leaf_cells();
        let leaf = 0.5f64.powi(depth as i32);
        let total: f64 = cells.iter().map(Cell::measure).sum();
        if cells.len() != 1 << depth || cells.iter().any(|c| c.measure() != leaf) || total != 1.0 {
            bad.push(k);
        }
    }
    outcome(bad.is_empty(), format!("k_n in 2..=1024, {} mismatches {:?}", bad.len(), bad))
}

fn laws() -> Outcome {
    let uniform = SplitProbabilities::uniform(4).expect("probs");
    let mut reports =
        split_count_law_check(&uniform, 16, 10_000, &[0.3, 0.7, 0.1, 0.55], derive(SEED, &[1])).expect("split counts");
    reports.push(occupancy_law_check(4, 16, 4096, 10_000, derive(SEED, &[2])).expect("occupancy"));
    let pvalues: Vec<String> = reports.iter().map(|r| format!("{:.3}", r.rhs)).collect();
    outcome(failures(&reports).is_empty(), format!("p-values {} at alpha 0.001", pvalues.join(" ")))
}

fn exact_grids() -> Outcome {
    let mut reports = inverse_moment_grid();
    reports.extend(positive_part_grid());
    reports.extend(inversion_grid());
    reports.extend(xi_cap_grid(SEED, 500).expect("xi cap grid"));
    let bad = failures(&reports);
    outcome(bad.is_empty(), format!("{} exact checks, {} violations", reports.len(), bad.len()))
}

fn population_decrease() -> Outcome {
    let model = LinearModel::new(0.0, vec![2.0, 0.0, 0.0]);
    let cell = Cell::unit(3);
    let (t, best) = best_population_cut(&model, &cell, 0, 999).expect("oracle");
    let weak = (1..3)
        .flat_map(|j| (1..=999).map(move |i| (j, i as f64 / 1000.0)))
        .map(|(j, t)| weighted_variance_decrease(&model, &cell, j, t).expect("oracle").abs())
        .fold(0.0, f64::max);
    let pass = (best - 0.25).abs() <= 1e-6 && (t - 0.5).abs() <= 1e-3 && weak <= 1e-9;
    outcome(pass, format!("max decrease {best:.8} at {t:.4}, weak max {weak:.2e}"))
}

fn cut_concentration() -> Outcome {
    let mut spec = ExperimentSpec::desk(ModelKind::Sinus, PolicyKind::Guided, SEED);
    spec.d_values = vec![25];
    spec.n_values = vec![50, 1000];
    spec.replicates = 20;
    spec.trees = 500;
    let table = run_cut_probability(&spec).expect("cut probabilities").table;
    let small = table.coordinate_means(50, 25);
    let large = table.coordinate_means(1000, 25);
    let weak = large[1..].iter().map(|m| m.0).fold(0.0, f64::max);
    let factor = large[0].0 / weak;
    let pass = large[0].0 > small[0].0 && factor >= 3.0;
    outcome(
        pass,
        format!(
            "coordinate 1: {:.4} (n=50) -> {:.4} (n=1000), max weak {weak:.4}, factor {factor:.2}",
            small[0].0, large[0].0
        ),
    )
}

fn dimension_insensitivity() -> Outcome {
    let mut spec = ExperimentSpec::desk(ModelKind::Sinus, PolicyKind::Cart, SEED);
    spec.d_values = vec![10, 100];
    spec.n_values = vec![50, 1000];
    let curve = run_mse_curve(&spec).expect("mse curve");
    let mse = |n, d| curve.point(n, d).expect("grid point").mse_mean;
    let ratio = mse(1000, 100) / mse(1000, 10);
    let decreasing = mse(1000, 10) < mse(50, 10) && mse(1000, 100) < mse(50, 100);
    outcome(
        (0.5..=2.0).contains(&ratio) && decreasing,
        format!(
            "MSE d=10: {:.2} -> {:.2}, d=100: {:.2} -> {:.2}, ratio {ratio:.3}",
            mse(50, 10),
            mse(1000, 10),
            mse(50, 100),
            mse(1000, 100)
        ),
    )
}

fn bound_envelopes() -> Outcome {
    let model = SyntheticModel::new(ModelKind::SinusPlusLinear, 4, 1.0).expect("model");
    let probs = SplitProbabilities::new(vec![0.4, 0.4, 0.1, 0.1]).expect("probs");
    let mut reports = Vec::new();
    for &n in &[500usize, 2000] {
        for &k_n in &[8usize, 32, 128] {
            let spec = DecompositionSpec {
                model: model.clone(),
                n,
                k_n,
                probs: Some(probs.clone()),
                trees: 100,
                replicates: 20,
                queries: 500,
                seed: derive(SEED, &[5, n as u64, k_n as u64]),
            };
            let all = empirical_decomposition(&spec).expect("decomposition").reports(&spec).expect("bounds");
            reports.extend(all.into_iter().filter(|r| r.name != "decomposition additivity"));
        }
    }
    let worst = reports.iter().map(|r| r.lhs / r.rhs).fold(0.0, f64::max);
    let bad = failures(&reports);
    outcome(
        bad.is_empty(),
        format!("{} term checks, {} above bound, largest term/bound {worst:.3}", reports.len(), bad.len()),
    )
}

fn rate_arithmetic() -> Outcome {
    let minimax = minimax_exponent(100);
    let mut missed = Vec::new();
    let mut outside = Vec::new();
    for d in 2..=200usize {
        let rule = (0.54 * d as f64).floor() as usize;
        for s in 1..=d {
            let wins = sparse_rate_wins(s, d);
            if s <= rule && !wins {
                missed.push((s, d));
            }
            if s > rule && wins {
                outside.push((s, d));
            }
        }
    }
    let consistent = rate_exponent(1) > minimax;
    let pass = (minimax - 0.0196).abs() <= 1e-4 && missed.is_empty() && consistent;
    outcome(
        pass,
        format!(
            "2/(d+2) at d=100 = {minimax:.5}, rule violations {}, pairs beyond the rounded rule where sparsity still wins {}",
            missed.len(),
            outside.len()
        ),
    )
}

fn consistency() -> Outcome {
    let mut reports = Vec::new();
    for &n in &[100usize, 1000] {
        for &k_n in &[4usize, 16, 64] {
            let spec = ConsistencySpec {
                n,
                k_n,
                d: 3,
                probs: Some(SplitProbabilities::new(vec![0.5, 0.25, 0.25]).expect("probs")),
                m_values: vec![2, 5, 10],
                replicates: 10_000,
                seed: derive(SEED, &[4, n as u64, k_n as u64]),
            };
            let all = consistency_diagnostics(&spec).expect("diagnostics").reports(&spec);
            reports.extend(all.into_iter().filter(|r| r.name != "consistency E[V_j]"));
        }
    }
    let bad = failures(&reports);
    outcome(bad.is_empty(), format!("{} probability bounds, {} violations", reports.len(), bad.len()))
}

fn run_cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_sparse-forest")).args(args).status().map(|s| s.success()).unwrap_or(false)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let (first, second) = (dir.path().join("one"), dir.path().join("two"));
    let mut spec = ExperimentSpec::desk(ModelKind::Sinus, PolicyKind::Cart, SEED);
    spec.d_values = vec![5, 20];
    spec.n_values = vec![50, 200];
    spec.replicates = 4;
    spec.trees = 50;
    spec.test_size = 1000;
    let spec_path = dir.path().join("spec.toml");
    std::fs::write(&spec_path, spec.to_toml()).expect("spec file");
    let s = |p: &Path| p.to_str().expect("utf-8 path").to_string();
    let ok1 = run_cli(&["mse-curve", "--config", &s(&spec_path), "--out", &s(&first), "--threads", "1", "--no-plots"]);
    let manifest = first.join(sparse_forest::experiment::MANIFEST_FILE);
    let ok2 = run_cli(&["mse-curve", "--config", &s(&manifest), "--out", &s(&second), "--threads", "4", "--no-plots"]);
    if !(ok1 && ok2) {
        return outcome(false, "mse-curve exited with an error".into());
    }
    let a = std::fs::read(first.join(MSE_CURVE_FILE)).expect("first csv");
    let b = std::fs::read(second.join(MSE_CURVE_FILE)).expect("second csv");
    outcome(a == b && !a.is_empty(), format!("1 vs 4 threads, {} bytes, identical: {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("partition exactness", partitions),
        ("split count and occupancy laws", laws),
        ("exact enumeration grids", exact_grids),
        ("population variance decrease", population_decrease),
        ("cut-probability concentration", cut_concentration),
        ("dimension insensitivity", dimension_insensitivity),
        ("bound envelopes", bound_envelopes),
        ("rate arithmetic", rate_arithmetic),
        ("consistency diagnostics", consistency),
        ("determinism across thread counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let status = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failed += 1;
        }
        println!("criterion {}: {status} {name}: {} ({:.1} s)", i + 1, result.detail, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
