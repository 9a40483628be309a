//! Monte-Carlo test error over an `(n, d)` grid.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::job_stream;
use super::spec::{ExperimentSpec, PolicyKind};
use crate::error::Result;
use crate::forest::ensemble_estimates;
use crate::rng::{derive, tag};
use crate::stats::mean_stderr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsePoint {
    pub model: String,
    pub n: usize,
    pub d: usize,
    pub mse_mean: f64,
    pub mse_stderr: f64,
    pub replicates: usize,
}

/// Mean and standard error of the test error per `(n, d)`, with the
/// per-replicate values kept alongside.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MseCurve {
    pub points: Vec<MsePoint>,
    /// `(n, d, replicate, mse)`.
    pub replicate_values: Vec<(usize, usize, usize, f64)>,
}

impl MseCurve {
    pub fn point(&self, n: usize, d: usize) -> Option<&MsePoint> {
        self.points.iter().find(|p| p.n == n && p.d == d)
    }
}

/// `(1/T) Σ (forest(x_t) - r(x_t))²` over a fresh uniform test set of size
/// `test_size`, for one training set and one forest.
pub fn replicate_mse(spec: &ExperimentSpec, n: usize, d: usize, rep: usize) -> Result<f64> {
    let model = spec.model_at(d)?;
    let key = [n as u64, d as u64, rep as u64];
    let train = model.generate(n, &mut job_stream(spec.seed, tag::TRAIN, key));
    let test = model.noiseless_points(spec.test_size, &mut job_stream(spec.seed, tag::TEST, key));
    let split_sample = (spec.policy == PolicyKind::Guided)
        .then(|| Arc::new(model.generate(n, &mut job_stream(spec.seed, tag::SPLIT_SAMPLE, key))));
    let config = spec.forest_config(n, d, derive(spec.seed, &[tag::FOREST, key[0], key[1], key[2]]), split_sample);
    let est = ensemble_estimates(&config, &train, &[train.y()], &test)?;
    let sse: f64 = est[0].iter().zip(test.y()).map(|(f, r)| (f - r).powi(2)).sum();
    Ok(sse / test.n() as f64)
}

/// Every replicate is an independent job; results are keyed by
/// `(n, d, replicate)` and aggregated in key order.
pub fn run_mse_curve(spec: &ExperimentSpec) -> Result<MseCurve> {
    spec.validate()?;
    let jobs: Vec<(usize, usize, usize)> = spec
        .d_values
        .iter()
        .flat_map(|&d| spec.n_values.iter().flat_map(move |&n| (0..spec.replicates).map(move |r| (n, d, r))))
        .collect();
    let mut values = jobs
        .par_iter()
        .map(|&(n, d, rep)| Ok((n, d, rep, replicate_mse(spec, n, d, rep)?)))
        .collect::<Result<Vec<_>>>()?;
    values.sort_by_key(|&(n, d, rep, _)| (d, n, rep));
    let mut points = Vec::new();
    for chunk in values.chunk_by(|a, b| (a.0, a.1) == (b.0, b.1)) {
        let mses: Vec<f64> = chunk.iter().map(|v| v.3).collect();
        let (mean, stderr) = mean_stderr(&mses);
        points.push(MsePoint {
            model: spec.model.label(),
            n: chunk[0].0,
            d: chunk[0].1,
            mse_mean: mean,
            mse_stderr: stderr,
            replicates: mses.len(),
        });
    }
    Ok(MseCurve { points, replicate_values: values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelKind;

    fn small(model: ModelKind, policy: PolicyKind) -> ExperimentSpec {
        let mut spec = ExperimentSpec::desk(model, policy, 5);
        spec.d_values = vec![5];
        spec.n_values = vec![20, 400];
        spec.replicates = 4;
        spec.trees = 20;
        spec.test_size = 300;
        spec
    }

    #[test]
    fn constant_noiseless_model_is_recovered() {
        let mut spec = small(ModelKind::Constant { value: 1.25 }, PolicyKind::Cart);
        spec.noise_sd = 0.0;
        let curve = run_mse_curve(&spec).unwrap();
        assert!(curve.points.iter().all(|p| p.mse_mean <= 1e-24), "{curve:?}");
    }

    #[test]
    fn error_drops_with_more_data() {
        let curve = run_mse_curve(&small(ModelKind::Tree, PolicyKind::Cart)).unwrap();
        let small_n = curve.point(20, 5).unwrap().mse_mean;
        let large_n = curve.point(400, 5).unwrap().mse_mean;
        assert!(large_n < small_n, "{small_n} vs {large_n}");
        assert!(curve.points.iter().all(|p| p.mse_mean >= 0.0 && p.replicates == 4));
    }
}
