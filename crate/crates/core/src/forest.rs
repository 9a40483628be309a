//! The Θ-averaged estimator: fit `M` independent trees, average their cell means.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builder::build_tree;
use crate::cell::Cell;
use crate::config::ForestConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::{stream, tag};
use crate::tree::{LeafStats, RandomTree};

/// Trees built per parallel batch when streaming over a forest.
const TREE_BATCH: usize = 64;

#[derive(Debug, Clone)]
pub struct Forest {
    trees: Vec<RandomTree>,
    stats: Vec<LeafStats>,
    config: ForestConfig,
    data: Arc<Dataset>,
}

/// The serializable part of a fitted forest (structure plus leaf statistics).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestSnapshot {
    pub d: usize,
    pub k_n: usize,
    pub policy: String,
    pub seed: u64,
    pub trees: Vec<RandomTree>,
    pub stats: Vec<LeafStats>,
}

fn check_fit_inputs(config: &ForestConfig, data: &Dataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Config("cannot fit a forest on an empty dataset".into()));
    }
    if data.d() < 2 {
        return Err(Error::Config(format!("forests need d >= 2, got d = {}", data.d())));
    }
    config.validate(data.d())
}

/// Builds tree `i` of the forest from its own stream.
pub fn tree_at(config: &ForestConfig, data: &Dataset, i: usize) -> Result<RandomTree> {
    let mut rng = stream(config.seed, &[tag::TREE, i as u64]);
    build_tree(config, data, &mut rng)
}

/// Fits `config.trees` trees. Tree `i` depends only on `(seed, i, config, data)`.
pub fn fit(config: &ForestConfig, data: impl Into<Arc<Dataset>>) -> Result<Forest> {
    let data = data.into();
    check_fit_inputs(config, &data)?;
    let trees = (0..config.trees).into_par_iter().map(|i| tree_at(config, &data, i)).collect::<Result<Vec<_>>>()?;
    let stats = trees.par_iter().map(|t| leaf_stats(t, &data, data.y())).collect();
    Ok(Forest { trees, stats, config: config.clone(), data })
}

fn leaf_stats(tree: &RandomTree, data: &Dataset, y: &[f64]) -> LeafStats {
    LeafStats::compute(tree, data.rows().zip(y.iter().copied()))
}

impl Forest {
    pub fn trees(&self) -> &[RandomTree] {
        &self.trees
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn data(&self) -> &Arc<Dataset> {
        &self.data
    }

    pub fn leaf_stats(&self) -> &[LeafStats] {
        &self.stats
    }

    /// Average of the per-tree cell means; empty cells contribute 0.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let total: f64 = self.trees.iter().zip(&self.stats).map(|(t, s)| s.mean(t.leaf_of(x))).sum();
        total / self.trees.len() as f64
    }

    pub fn predict_many(&self, queries: &Dataset) -> Vec<f64> {
        (0..queries.n()).into_par_iter().map(|i| self.predict(queries.row(i))).collect()
    }

    /// Same trees, leaf statistics recomputed for other responses on the same
    /// covariates.
    pub fn with_responses(&self, y: &[f64]) -> Result<Forest> {
        if y.len() != self.data.n() {
            return Err(Error::Dimension { expected: self.data.n(), got: y.len() });
        }
        let stats = self.trees.par_iter().map(|t| leaf_stats(t, &self.data, y)).collect();
        Ok(Forest { trees: self.trees.clone(), stats, config: self.config.clone(), data: self.data.clone() })
    }

    /// Per-coordinate split totals over every internal node of every tree.
    pub fn split_counts(&self) -> Vec<u64> {
        split_totals(self.data.d(), self.trees.iter())
    }

    pub fn snapshot(&self) -> ForestSnapshot {
        ForestSnapshot {
            d: self.data.d(),
            k_n: self.config.k_n,
            policy: self.config.policy.name().into(),
            seed: self.config.seed,
            trees: self.trees.clone(),
            stats: self.stats.clone(),
        }
    }
}

impl ForestSnapshot {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let total: f64 = self.trees.iter().zip(&self.stats).map(|(t, s)| s.mean(t.leaf_of(x))).sum();
        total / self.trees.len() as f64
    }
}

pub(crate) fn split_totals<'a>(d: usize, trees: impl Iterator<Item = &'a RandomTree>) -> Vec<u64> {
    let mut totals = vec![0u64; d];
    for t in trees {
        for (acc, &c) in totals.iter_mut().zip(t.split_counts()) {
            *acc += u64::from(c);
        }
    }
    totals
}

/// Single-tree estimate: mean response of the training points sharing the
/// leaf of `x`, or exactly 0 when that leaf is empty.
pub fn predict_tree(tree: &RandomTree, data: &Dataset, x: &[f64]) -> f64 {
    let leaf = tree.leaf_of(x);
    let (sum, count) = data
        .rows()
        .zip(data.y())
        .filter(|(row, _)| tree.leaf_of(row) == leaf)
        .fold((0.0, 0usize), |(s, c), (_, y)| (s + y, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Connection weights `W_i(x)` of one tree: `1/N` on the points sharing the
/// leaf of `x`, 0 elsewhere (all zero on an empty leaf).
pub fn tree_weights(tree: &RandomTree, data: &Dataset, x: &[f64]) -> Vec<f64> {
    let leaf = tree.leaf_of(x);
    let members: Vec<bool> = data.rows().map(|row| tree.leaf_of(row) == leaf).collect();
    let n_in = members.iter().filter(|&&m| m).count();
    members.into_iter().map(|m| if m { 1.0 / n_in as f64 } else { 0.0 }).collect()
}

/// Number of rows of `data` inside `cell`.
pub fn count_in_cell(data: &Dataset, cell: &Cell) -> usize {
    data.rows().filter(|row| cell.contains(row)).count()
}

/// Forest estimates at every query point for several response vectors sharing
/// the training covariates, without keeping the trees.
///
/// Trees are grown in parallel batches and accumulated in index order, so the
/// result is bit-identical for any thread count.
pub fn ensemble_estimates(
    config: &ForestConfig,
    data: &Dataset,
    responses: &[&[f64]],
    queries: &Dataset,
) -> Result<Vec<Vec<f64>>> {
    check_fit_inputs(config, data)?;
    if queries.d() != data.d() {
        return Err(Error::Dimension { expected: data.d(), got: queries.d() });
    }
    for y in responses {
        if y.len() != data.n() {
            return Err(Error::Dimension { expected: data.n(), got: y.len() });
        }
    }
    let mut sums = vec![vec![0.0; queries.n()]; responses.len()];
    for_each_tree(config, data, |tree| {
        for (y, acc) in responses.iter().zip(sums.iter_mut()) {
            let stats = leaf_stats(tree, data, y);
            for (q, a) in queries.rows().zip(acc.iter_mut()) {
                *a += stats.mean(tree.leaf_of(q));
            }
        }
    })?;
    let m = config.trees as f64;
    for acc in &mut sums {
        acc.iter_mut().for_each(|v| *v /= m);
    }
    Ok(sums)
}

/// Per-coordinate split totals of a forest, without keeping the trees.
pub fn forest_split_counts(config: &ForestConfig, data: &Dataset) -> Result<Vec<u64>> {
    check_fit_inputs(config, data)?;
    let mut totals = vec![0u64; data.d()];
    for_each_tree(config, data, |tree| {
        for (acc, &c) in totals.iter_mut().zip(tree.split_counts()) {
            *acc += u64::from(c);
        }
    })?;
    Ok(totals)
}

/// Visits trees `0..config.trees` in index order; batches are built in parallel.
fn for_each_tree(config: &ForestConfig, data: &Dataset, mut visit: impl FnMut(&RandomTree)) -> Result<()> {
    let mut start = 0;
    while start < config.trees {
        let end = (start + TREE_BATCH).min(config.trees);
        let batch = (start..end).into_par_iter().map(|i| tree_at(config, data, i)).collect::<Result<Vec<_>>>()?;
        batch.iter().for_each(&mut visit);
        start = end;
    }
    Ok(())
}
