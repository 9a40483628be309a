//! How often each coordinate is cut, per replicate forest.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::job_stream;
use super::spec::{ExperimentSpec, PolicyKind};
use crate::error::Result;
use crate::forest::forest_split_counts;
use crate::rng::{derive, tag};
use crate::stats::mean_stderr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutRow {
    pub model: String,
    pub n: usize,
    pub d: usize,
    pub replicate: usize,
    /// One-based coordinate index.
    pub coordinate: usize,
    pub ratio: f64,
}

/// Per replicate and coordinate: splits on that coordinate over all splits in
/// the forest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CutProbabilityTable {
    pub rows: Vec<CutRow>,
}

impl CutProbabilityTable {
    /// Ratios of one `(n, d)` cell as `[replicate][coordinate]`.
    pub fn ratios(&self, n: usize, d: usize) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for r in self.rows.iter().filter(|r| r.n == n && r.d == d) {
            if out.len() <= r.replicate {
                out.resize(r.replicate + 1, vec![0.0; d]);
            }
            out[r.replicate][r.coordinate - 1] = r.ratio;
        }
        out
    }

    /// Mean ratio and its standard error for every coordinate of one `(n, d)` cell.
    pub fn coordinate_means(&self, n: usize, d: usize) -> Vec<(f64, f64)> {
        let ratios = self.ratios(n, d);
        (0..d).map(|j| mean_stderr(&ratios.iter().map(|r| r[j]).collect::<Vec<_>>())).collect()
    }

    pub fn grid(&self) -> Vec<(usize, usize)> {
        let mut g: Vec<(usize, usize)> = self.rows.iter().map(|r| (r.n, r.d)).collect();
        g.dedup();
        g.sort_unstable();
        g.dedup();
        g
    }
}

pub struct CutProbabilityRun {
    pub table: CutProbabilityTable,
    pub warnings: Vec<String>,
}

/// One forest per `(n, d, replicate)`. The guided regime chooses coordinates
/// on a fresh second sample of size `n`; CART cuts on the training sample.
pub fn run_cut_probability(spec: &ExperimentSpec) -> Result<CutProbabilityRun> {
    spec.validate()?;
    let mut warnings = Vec::new();
    if spec.policy == PolicyKind::PurelyRandom {
        warnings.push("purely random trees ignore the data: the ratios only estimate the split probabilities".into());
    }
    let jobs: Vec<(usize, usize, usize)> = spec
        .d_values
        .iter()
        .flat_map(|&d| spec.n_values.iter().flat_map(move |&n| (0..spec.replicates).map(move |r| (n, d, r))))
        .collect();
    let mut results = jobs
        .par_iter()
        .map(|&(n, d, rep)| {
            let model = spec.model_at(d)?;
            let key = [n as u64, d as u64, rep as u64];
            let train = model.generate(n, &mut job_stream(spec.seed, tag::TRAIN, key));
            let split_sample = (spec.policy == PolicyKind::Guided)
                .then(|| Arc::new(model.generate(n, &mut job_stream(spec.seed, tag::SPLIT_SAMPLE, key))));
            let config =
                spec.forest_config(n, d, derive(spec.seed, &[tag::FOREST, key[0], key[1], key[2]]), split_sample);
            let counts = forest_split_counts(&config, &train)?;
            let total: u64 = counts.iter().sum();
            let rows: Vec<CutRow> = counts
                .iter()
                .enumerate()
                .map(|(j, &c)| CutRow {
                    model: spec.model.label(),
                    n,
                    d,
                    replicate: rep,
                    coordinate: j + 1,
                    ratio: if total == 0 { 0.0 } else { c as f64 / total as f64 },
                })
                .collect();
            Ok(((n, d, rep), rows, total))
        })
        .collect::<Result<Vec<_>>>()?;
    results.sort_by_key(|(key, _, _)| *key);
    for ((n, d, rep), _, total) in &results {
        if *total == 0 {
            warnings.push(format!("n={n} d={d} replicate={rep}: the forest made no split, ratios set to 0"));
        }
    }
    let rows = results.into_iter().flat_map(|(_, rows, _)| rows).collect();
    Ok(CutProbabilityRun { table: CutProbabilityTable { rows }, warnings })
}
