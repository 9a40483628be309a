//! The full verification run behind `theory-check`.

use rand::Rng;
use rayon::prelude::*;

use super::binomial::{
    contour_inversion_check, difference_pmf, inverse_moment_check, phi_identity_reports, positive_part_bound,
};
use super::bounds::{xi_product, xi_product_cap};
use super::consistency::{consistency_diagnostics, ConsistencySpec};
use super::decomposition::{empirical_decomposition, DecompositionSpec};
use super::laws::{ideal_probability_check, occupancy_law_check, split_count_law_check};
use super::{BoundParams, BoundReport};
use crate::config::SplitProbabilities;
use crate::error::Result;
use crate::models::{ModelKind, SyntheticModel};
use crate::rng::{derive, stream};

#[derive(Debug, Clone)]
pub struct TheoryConfig {
    pub seed: u64,
    /// Run the simulated checks in addition to the exact ones.
    pub monte_carlo: bool,
    /// Trees for the split-count law.
    pub law_trees: usize,
    /// Replicates for the occupancy law and the consistency diagnostics.
    pub law_replicates: usize,
    /// Replicates per grid point of the risk decomposition.
    pub decomposition_replicates: usize,
}

impl Default for TheoryConfig {
    fn default() -> Self {
        Self { seed: 0, monte_carlo: true, law_trees: 10_000, law_replicates: 10_000, decomposition_replicates: 20 }
    }
}

/// `p ∈ {0.05, 0.10, …, 0.95}`.
pub fn p_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

/// Exact checks over the whole inverse-moment grid.
pub fn inverse_moment_grid() -> Vec<BoundReport> {
    let grid: Vec<(usize, f64)> = (0..=64).flat_map(|n| p_grid().into_iter().map(move |p| (n, p))).collect();
    grid.par_iter().flat_map_iter(|&(n, p)| inverse_moment_check(n, p)).collect()
}

/// Exact checks of the positive-part bound for `N ≤ 128`, `d ≤ 8`, plus the
/// generating-function identities at each `(N, p)`.
pub fn positive_part_grid() -> Vec<BoundReport> {
    let grid: Vec<(usize, f64)> = (1..=128).flat_map(|n| p_grid().into_iter().map(move |p| (n, p))).collect();
    grid.par_iter()
        .flat_map_iter(|&(big_n, p)| {
            let diff = difference_pmf(big_n, p);
            let bound = positive_part_bound(big_n, p);
            let base = BoundParams { big_n: Some(big_n), p: Some(p), ..Default::default() };
            let mut out: Vec<BoundReport> = (1..=8)
                .map(|d| {
                    let exact: f64 = diff
                        .iter()
                        .enumerate()
                        .map(|(idx, w)| w * 2f64.powi(-(d as i32) * (idx as i32 - big_n as i32).max(0)))
                        .sum();
                    BoundReport::exact(
                        "positive part E[2^-d(Z1-Z2)+]",
                        BoundParams { d: Some(d), ..base.clone() },
                        exact,
                        bound,
                    )
                })
                .collect();
            out.extend(phi_identity_reports(big_n, p, &diff));
            out
        })
        .collect()
}

pub fn inversion_grid() -> Vec<BoundReport> {
    (0..=12).flat_map(|n| p_grid().into_iter().map(move |p| contour_inversion_check(n, p))).collect()
}

/// The exact product `1 + ξ_n` against its cap for random admissible
/// `(a, b, S, d)` and probabilities drawn inside `(a, b)`.
pub fn xi_cap_grid(seed: u64, cases: usize) -> Result<Vec<BoundReport>> {
    let mut rng = stream(seed, &[0x5e3a]);
    let mut out = Vec::with_capacity(cases);
    for _ in 0..cases {
        let s = rng.random_range(2..=10usize);
        let d = rng.random_range(s..=100usize);
        let a = rng.random_range(0.01..0.5) / s as f64;
        let b = a + rng.random_range(0.01..0.99) * (1.0 - a);
        let probs: Vec<f64> = (0..s).map(|_| rng.random_range(a..b)).collect();
        let xi: Vec<f64> = probs.iter().map(|p| s as f64 * p - 1.0).collect();
        let exact = xi_product(s, d, &xi)?;
        let cap = xi_product_cap(s, d, a, b)?;
        let params =
            BoundParams { s: Some(s), d: Some(d), extra: Some(format!("a={a:.6};b={b:.6}")), ..Default::default() };
        out.push(BoundReport::exact("xi product cap", params, exact, cap));
    }
    Ok(out)
}

fn monte_carlo_checks(config: &TheoryConfig) -> Result<Vec<BoundReport>> {
    let seed = config.seed;
    let mut out = Vec::new();

    let uniform4 = SplitProbabilities::uniform(4)?;
    out.extend(split_count_law_check(&uniform4, 16, config.law_trees, &[0.3, 0.7, 0.1, 0.55], derive(seed, &[1]))?);
    out.push(occupancy_law_check(4, 16, 4096, config.law_replicates, derive(seed, &[2]))?);
    out.push(ideal_probability_check(5, 100, 10, 100_000, derive(seed, &[3]))?);

    for &n in &[100usize, 1000] {
        for &k_n in &[4usize, 16, 64] {
            let spec = ConsistencySpec {
                n,
                k_n,
                d: 3,
                probs: Some(SplitProbabilities::new(vec![0.5, 0.25, 0.25])?),
                m_values: vec![2, 5, 10],
                replicates: config.law_replicates,
                seed: derive(seed, &[4, n as u64, k_n as u64]),
            };
            out.extend(consistency_diagnostics(&spec)?.reports(&spec));
        }
    }

    let model = SyntheticModel::new(ModelKind::SinusPlusLinear, 4, 1.0)?;
    let probs = SplitProbabilities::new(vec![0.4, 0.4, 0.1, 0.1])?;
    for &n in &[500usize, 2000] {
        for &k_n in &[8usize, 32, 128] {
            let spec = DecompositionSpec {
                model: model.clone(),
                n,
                k_n,
                probs: Some(probs.clone()),
                trees: 100,
                replicates: config.decomposition_replicates,
                queries: 500,
                seed: derive(seed, &[5, n as u64, k_n as u64]),
            };
            out.extend(empirical_decomposition(&spec)?.reports(&spec)?);
        }
    }
    Ok(out)
}

/// Every check, sorted by name then parameters.
pub fn run_theory_suite(config: &TheoryConfig) -> Result<Vec<BoundReport>> {
    let mut out = inverse_moment_grid();
    out.extend(positive_part_grid());
    out.extend(inversion_grid());
    out.extend(xi_cap_grid(config.seed, 500)?);
    if config.monte_carlo {
        out.extend(monte_carlo_checks(config)?);
    }
    let mut keyed: Vec<(String, BoundReport)> = out.into_iter().map(|r| (r.params.to_string(), r)).collect();
    keyed.sort_by(|a, b| a.1.name.cmp(&b.1.name).then_with(|| a.0.cmp(&b.0)));
    Ok(keyed.into_iter().map(|(_, r)| r).collect())
}
