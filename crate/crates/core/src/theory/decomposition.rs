//! Monte-Carlo split of the forest risk into its variance and bias terms.

use rayon::prelude::*;

use super::{bias_bound_value, variance_bound_value, xi_from_probs, BoundParams, BoundReport};
use crate::config::{ForestConfig, SplitProbabilities};
use crate::error::{Error, Result};
use crate::forest::ensemble_estimates;
use crate::models::SyntheticModel;
use crate::rng::{derive, stream, tag};
use crate::stats::mean_stderr;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_values(values: &[f64]) -> Self {
        let (mean, stderr) = mean_stderr(values);
        Self { mean, stderr }
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionSpec {
    pub model: SyntheticModel,
    pub n: usize,
    pub k_n: usize,
    /// Split probabilities of the purely random trees; uniform when `None`.
    pub probs: Option<SplitProbabilities>,
    /// Trees per forest.
    pub trees: usize,
    pub replicates: usize,
    /// Fresh query points per replicate.
    pub queries: usize,
    pub seed: u64,
}

/// Per-replicate means of `(r̄ - r̃)²`, `(r̃ - r)²` and `(r̄ - r)²`, where `r̃`
/// is the forest built on the true regression values at the design points.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub variance: Estimate,
    pub bias: Estimate,
    pub total: Estimate,
    /// `total - variance - bias` per replicate, i.e. twice the cross term.
    pub cross: Estimate,
}

impl Decomposition {
    /// Variance term against its closed-form bound, bias term against its
    /// closed-form bound, and the cross term against 0.
    pub fn reports(&self, spec: &DecompositionSpec) -> Result<Vec<BoundReport>> {
        let model = &spec.model;
        let (s, d) = (model.sparsity(), model.d);
        let probs = match &spec.probs {
            Some(p) => p.clone(),
            None => SplitProbabilities::uniform(d)?,
        };
        let xi = xi_from_probs(probs.as_slice(), &model.strong_set());
        let gamma = xi.iter().copied().fold(f64::INFINITY, f64::min);
        let sigma2 = model.noise_sd * model.noise_sd;
        let l = model
            .lipschitz()
            .ok_or_else(|| Error::Domain(format!("{} has no Lipschitz constant", model.kind.label())))?;
        let params = BoundParams {
            n: Some(spec.n),
            k_n: Some(spec.k_n),
            s: Some(s),
            d: Some(d),
            sigma2: Some(sigma2),
            l: Some(l),
            extra: Some(format!("trees={};replicates={}", spec.trees, spec.replicates)),
            ..Default::default()
        };
        let var_bound = variance_bound_value(spec.n, spec.k_n, s, d, sigma2, &xi)?;
        let bias_bound = bias_bound_value(spec.n, spec.k_n, s, l, model.sup_truth_squared(), gamma)?;
        Ok(vec![
            BoundReport::estimated(
                "decomposition variance term",
                params.clone(),
                self.variance.mean,
                self.variance.stderr,
                var_bound,
            ),
            BoundReport::estimated(
                "decomposition bias term",
                params.clone(),
                self.bias.mean,
                self.bias.stderr,
                bias_bound,
            ),
            BoundReport::agreement("decomposition additivity", params, self.cross.mean, self.cross.stderr, 0.0),
        ])
    }
}

/// Each replicate draws a fresh training set, a fresh query set and a fresh
/// forest. `r̄` and `r̃` share the forest, so they coincide when the model is
/// noiseless.
pub fn empirical_decomposition(spec: &DecompositionSpec) -> Result<Decomposition> {
    let per_rep =
        (0..spec.replicates).into_par_iter().map(|rep| replicate(spec, rep as u64)).collect::<Result<Vec<_>>>()?;
    let column = |k: usize| per_rep.iter().map(|r| r[k]).collect::<Vec<_>>();
    Ok(Decomposition {
        variance: Estimate::from_values(&column(0)),
        bias: Estimate::from_values(&column(1)),
        total: Estimate::from_values(&column(2)),
        cross: Estimate::from_values(&column(3)),
    })
}

fn replicate(spec: &DecompositionSpec, rep: u64) -> Result<[f64; 4]> {
    let model = &spec.model;
    let data = model.generate(spec.n, &mut stream(spec.seed, &[tag::TRAIN, rep]));
    let queries = model.noiseless_points(spec.queries, &mut stream(spec.seed, &[tag::QUERY, rep]));
    let truth_at_data: Vec<f64> = data.rows().map(|x| model.truth(x)).collect();
    let mut config = ForestConfig::purely_random(spec.k_n, spec.trees, derive(spec.seed, &[tag::FOREST, rep]));
    if let Some(p) = &spec.probs {
        config = config.with_probs(p.clone());
    }
    let est = ensemble_estimates(&config, &data, &[data.y(), &truth_at_data], &queries)?;
    let (r_bar, r_tilde) = (&est[0], &est[1]);
    let q = queries.n() as f64;
    let mut acc = [0.0; 4];
    for ((a, b), r) in r_bar.iter().zip(r_tilde).zip(queries.y()) {
        let v = (a - b).powi(2);
        let bias = (b - r).powi(2);
        let total = (a - r).powi(2);
        acc[0] += v;
        acc[1] += bias;
        acc[2] += total;
        acc[3] += total - v - bias;
    }
    Ok(acc.map(|s| s / q))
}
