//! Forest configuration: leaf budget, number of trees, split regime.

use std::sync::Arc;

use crate::data::Dataset;
use crate::error::{Error, Result};

const PROB_SUM_TOL: f64 = 1e-12;

/// Per-coordinate probabilities of being chosen at a split.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SplitProbabilities(Vec<f64>);

impl SplitProbabilities {
    /// Every entry must lie strictly inside `(0, 1)` and the entries must sum
    /// to one within `1e-12`.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Config("split probabilities must be non-empty".into()));
        }
        if let Some((j, v)) = p.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v < 1.0)) {
            return Err(Error::Config(format!("p[{}] = {v} is not in (0, 1)", j + 1)));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::Config(format!("split probabilities sum to {sum}, not 1")));
        }
        Ok(Self(p))
    }

    pub fn uniform(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Config("uniform split probabilities need d >= 2".into()));
        }
        Ok(Self(vec![1.0 / d as f64; d]))
    }

    /// `p_j = (1 + xi_j) / S` on the strong set, with the remaining mass spread
    /// evenly over the weak coordinates.
    pub fn sparse(d: usize, strong: &[usize], xi: &[f64]) -> Result<Self> {
        if strong.len() != xi.len() || strong.is_empty() || strong.len() >= d {
            return Err(Error::Config("need 1 <= S < d and one xi per strong coordinate".into()));
        }
        let s = strong.len() as f64;
        let mut p = vec![0.0; d];
        for (&j, &x) in strong.iter().zip(xi) {
            p[j] = (1.0 + x) / s;
        }
        let strong_mass: f64 = p.iter().sum();
        let weak = (d - strong.len()) as f64;
        for (j, v) in p.iter_mut().enumerate() {
            if !strong.contains(&j) {
                *v = (1.0 - strong_mass) / weak;
            }
        }
        Self::new(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for SplitProbabilities {
    type Error = Error;
    fn try_from(p: Vec<f64>) -> Result<Self> {
        Self::new(p)
    }
}

impl From<SplitProbabilities> for Vec<f64> {
    fn from(p: SplitProbabilities) -> Self {
        p.0
    }
}

/// How a tree chooses where to cut.
#[derive(Debug, Clone)]
pub enum SplitPolicy {
    /// Coordinate drawn from [`SplitProbabilities`], cut at the midpoint.
    PurelyRandom,
    /// Coordinate chosen by the best midpoint sum-of-squares decrease on an
    /// independent second sample, among `m_try` candidates drawn with
    /// replacement. Cuts stay at midpoints.
    SecondSampleGuided(Arc<Dataset>),
    /// CART-style cuts on the training sample with a fixed leaf budget.
    CartEmpirical,
}

impl SplitPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            SplitPolicy::PurelyRandom => "purely-random",
            SplitPolicy::SecondSampleGuided(_) => "guided",
            SplitPolicy::CartEmpirical => "cart",
        }
    }

    /// True for the two regimes whose trees are complete midpoint partitions.
    pub fn is_dyadic(&self) -> bool {
        !matches!(self, SplitPolicy::CartEmpirical)
    }
}

#[derive(Debug, Clone)]
pub struct ForestConfig {
    /// Leaf-count parameter; dyadic trees have `2^ceil(log2 k_n)` leaves.
    pub k_n: usize,
    pub trees: usize,
    pub policy: SplitPolicy,
    /// Used by [`SplitPolicy::PurelyRandom`]; `None` means uniform.
    pub probs: Option<SplitProbabilities>,
    /// Candidate coordinates per node in the guided and CART regimes.
    pub m_try: usize,
    pub seed: u64,
    /// Leaf budget for [`SplitPolicy::CartEmpirical`]; `None` means `ceil(n / 5)`.
    pub target_leaves: Option<usize>,
}

impl ForestConfig {
    pub fn purely_random(k_n: usize, trees: usize, seed: u64) -> Self {
        Self { k_n, trees, policy: SplitPolicy::PurelyRandom, probs: None, m_try: 1, seed, target_leaves: None }
    }

    pub fn guided(k_n: usize, trees: usize, m_try: usize, split_sample: Arc<Dataset>, seed: u64) -> Self {
        Self {
            k_n,
            trees,
            policy: SplitPolicy::SecondSampleGuided(split_sample),
            probs: None,
            m_try,
            seed,
            target_leaves: None,
        }
    }

    pub fn cart(trees: usize, m_try: usize, seed: u64) -> Self {
        Self { k_n: 2, trees, policy: SplitPolicy::CartEmpirical, probs: None, m_try, seed, target_leaves: None }
    }

    pub fn with_probs(mut self, probs: SplitProbabilities) -> Self {
        self.probs = Some(probs);
        self
    }

    pub fn with_target_leaves(mut self, leaves: usize) -> Self {
        self.target_leaves = Some(leaves);
        self
    }

    /// Number of midpoint levels, `ceil(log2 k_n)`.
    pub fn depth(&self) -> u32 {
        ceil_log2(self.k_n)
    }

    pub fn leaf_budget(&self, n: usize) -> usize {
        self.target_leaves.unwrap_or_else(|| default_target_leaves(n))
    }

    /// Checks the configuration against a training set of dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        if self.k_n < 2 {
            return Err(Error::Config(format!("k_n = {} must be at least 2", self.k_n)));
        }
        if self.trees == 0 {
            return Err(Error::Config("the forest needs at least one tree".into()));
        }
        if self.m_try == 0 {
            return Err(Error::Config("m_try must be at least 1".into()));
        }
        if self.k_n > 1 << 40 {
            return Err(Error::Config(format!("k_n = {} is too large", self.k_n)));
        }
        if let Some(p) = &self.probs {
            if p.len() != d {
                return Err(Error::Dimension { expected: d, got: p.len() });
            }
        }
        match &self.policy {
            SplitPolicy::SecondSampleGuided(sample) if sample.d() != d => {
                Err(Error::Dimension { expected: d, got: sample.d() })
            }
            SplitPolicy::SecondSampleGuided(sample) if sample.is_empty() => {
                Err(Error::Config("the guided policy needs a non-empty split sample".into()))
            }
            SplitPolicy::CartEmpirical if self.target_leaves == Some(0) => {
                Err(Error::Config("target_leaves must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// `ceil(log2 k)` for `k >= 1`.
pub fn ceil_log2(k: usize) -> u32 {
    k.max(1).next_power_of_two().trailing_zeros()
}

/// `ceil(n / 5)`, at least one leaf.
pub fn default_target_leaves(n: usize) -> usize {
    n.div_ceil(5).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(1000), 10);
        assert_eq!(ceil_log2(1024), 10);
        assert_eq!(ceil_log2(1025), 11);
    }

    #[test]
    fn probabilities_must_be_interior() {
        assert!(SplitProbabilities::new(vec![1.0, 0.0]).is_err());
        assert!(SplitProbabilities::new(vec![0.6, 0.6]).is_err());
        assert!(SplitProbabilities::new(vec![0.7, 0.3]).is_ok());
    }

    #[test]
    fn sparse_probabilities_sum_to_one() {
        let p = SplitProbabilities::sparse(6, &[0, 1], &[-0.2, 0.1]).unwrap();
        let s: f64 = p.as_slice().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!((p.as_slice()[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn guided_dimension_mismatch() {
        let sample = Arc::new(Dataset::new(vec![0.5; 3], vec![1.0], 3).unwrap());
        let cfg = ForestConfig::guided(4, 1, 2, sample, 0);
        assert!(matches!(cfg.validate(2), Err(Error::Dimension { expected: 2, got: 3 })));
    }

    #[test]
    fn target_leaves_default() {
        assert_eq!(default_target_leaves(100), 20);
        assert_eq!(default_target_leaves(101), 21);
        assert_eq!(default_target_leaves(3), 1);
    }
}
