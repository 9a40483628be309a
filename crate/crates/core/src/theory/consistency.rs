//! Monte-Carlo diagnostics for the cell-shrinkage and cell-occupancy
//! conditions behind consistency.

use rand::Rng;
use rayon::prelude::*;

use super::{BoundParams, BoundReport, Estimate};
use crate::builder::build_tree;
use crate::config::{ceil_log2, ForestConfig, SplitProbabilities};
use crate::data::Dataset;
use crate::error::Result;
use crate::rng::{stream, tag};

#[derive(Debug, Clone)]
pub struct ConsistencySpec {
    pub n: usize,
    pub k_n: usize,
    pub d: usize,
    /// Uniform over `d` coordinates when `None`.
    pub probs: Option<SplitProbabilities>,
    /// Thresholds `M` for `P(N < M)`.
    pub m_values: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    /// `(M, estimate of P(N < M), bound 2 M k_n / (n + 1))`.
    pub small_cell: Vec<(usize, Estimate, f64)>,
    /// Estimate of `P(N = 0)` and the bound `exp(-n / (2 k_n))`.
    pub empty_cell: (Estimate, f64),
    /// Per coordinate: estimate of `E[V_j]` (leaf side length) and its exact
    /// value `(1 - p_j/2)^ceil(log2 k_n)`.
    pub side_length: Vec<(Estimate, f64)>,
}

impl ConsistencyReport {
    pub fn reports(&self, spec: &ConsistencySpec) -> Vec<BoundReport> {
        let params = BoundParams { n: Some(spec.n), k_n: Some(spec.k_n), d: Some(spec.d), ..Default::default() };
        let mut out = Vec::new();
        for (m, est, bound) in &self.small_cell {
            out.push(BoundReport::estimated(
                "consistency P(N<M)",
                BoundParams { extra: Some(format!("M={m}")), ..params.clone() },
                est.mean,
                est.stderr,
                *bound,
            ));
        }
        let (est, bound) = self.empty_cell;
        out.push(BoundReport::estimated("consistency P(empty cell)", params.clone(), est.mean, est.stderr, bound));
        for (j, (est, exact)) in self.side_length.iter().enumerate() {
            out.push(BoundReport::agreement(
                "consistency E[V_j]",
                BoundParams { extra: Some(format!("j={}", j + 1)), ..params.clone() },
                est.mean,
                est.stderr,
                *exact,
            ));
        }
        out
    }
}

fn proportion(hits: usize, total: usize) -> Estimate {
    let p = hits as f64 / total as f64;
    let stderr = if total > 1 { (p * (1.0 - p) / total as f64).sqrt() } else { 0.0 };
    Estimate { mean: p, stderr }
}

/// One replicate is a fresh uniform sample of size `n`, a fresh uniform query
/// and one fresh purely random tree; the statistics are the occupancy of the
/// query's leaf and its side lengths.
pub fn consistency_diagnostics(spec: &ConsistencySpec) -> Result<ConsistencyReport> {
    let probs = match &spec.probs {
        Some(p) => p.clone(),
        None => SplitProbabilities::uniform(spec.d)?,
    };
    let config = ForestConfig::purely_random(spec.k_n, 1, spec.seed).with_probs(probs.clone());
    config.validate(spec.d)?;
    let shape = Dataset::empty(spec.d);
    let draws = (0..spec.replicates)
        .into_par_iter()
        .map(|rep| {
            let rep = rep as u64;
            let mut rng = stream(spec.seed, &[tag::TRAIN, rep]);
            let x: Vec<f64> = (0..spec.n * spec.d).map(|_| rng.random()).collect();
            let mut qrng = stream(spec.seed, &[tag::QUERY, rep]);
            let query: Vec<f64> = (0..spec.d).map(|_| qrng.random()).collect();
            let tree = build_tree(&config, &shape, &mut stream(spec.seed, &[tag::TREE, rep]))?;
            let cell = tree.leaf_cell(&query);
            let count = x.chunks_exact(spec.d).filter(|row| cell.contains(row)).count();
            let sides: Vec<f64> = (0..spec.d).map(|j| cell.side(j)).collect();
            Ok((count, sides))
        })
        .collect::<Result<Vec<_>>>()?;

    let r = spec.replicates;
    let small_cell = spec
        .m_values
        .iter()
        .map(|&m| {
            let hits = draws.iter().filter(|(c, _)| *c < m).count();
            (m, proportion(hits, r), 2.0 * (m * spec.k_n) as f64 / (spec.n + 1) as f64)
        })
        .collect();
    let empty = draws.iter().filter(|(c, _)| *c == 0).count();
    let empty_cell = (proportion(empty, r), (-(spec.n as f64) / (2.0 * spec.k_n as f64)).exp());
    let depth = ceil_log2(spec.k_n) as i32;
    let side_length = (0..spec.d)
        .map(|j| {
            let values: Vec<f64> = draws.iter().map(|(_, s)| s[j]).collect();
            (Estimate::from_values(&values), (1.0 - probs.as_slice()[j] / 2.0).powi(depth))
        })
        .collect();
    Ok(ConsistencyReport { small_cell, empty_cell, side_length })
}
