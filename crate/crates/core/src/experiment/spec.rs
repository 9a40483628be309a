use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::{default_target_leaves, ForestConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::{ModelKind, SyntheticModel};

/// Which split regime an experiment grows its forests with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    PurelyRandom,
    Guided,
    Cart,
}

fn default_noise_sd() -> f64 {
    1.0
}

/// A batch experiment over an `(n, d)` grid.
///
/// ```toml
/// policy = "guided"
/// d_values = [10, 25, 100]
/// n_values = [10, 50, 100, 500, 1000]
/// replicates = 20
/// trees = 500
/// test_size = 5000
/// seed = 42
///
/// [model]
/// name = "sinus"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub model: ModelKind,
    #[serde(default = "default_noise_sd")]
    pub noise_sd: f64,
    pub d_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub replicates: usize,
    pub trees: usize,
    pub test_size: usize,
    pub policy: PolicyKind,
    /// Candidates per node; `d` for the guided regime and `max(d/3, 1)` for
    /// CART when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_try: Option<usize>,
    /// Depth parameter of the midpoint regimes; `max(2, ceil(n/5))` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_n: Option<usize>,
    /// CART leaf budget; `ceil(n/5)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_leaves: Option<usize>,
    pub seed: u64,
}

impl ExperimentSpec {
    /// The scaled-down grid used by default: 20 replicates, 500 trees,
    /// 5000 test points, `d ∈ {10, 25, 100}`, `n ∈ {10, 50, 100, 500, 1000}`.
    pub fn desk(model: ModelKind, policy: PolicyKind, seed: u64) -> Self {
        Self {
            model,
            noise_sd: 1.0,
            d_values: vec![10, 25, 100],
            n_values: vec![10, 50, 100, 500, 1000],
            replicates: 20,
            trees: 500,
            test_size: 5000,
            policy,
            m_try: None,
            k_n: None,
            target_leaves: None,
            seed,
        }
    }

    /// 100 replicates, 10⁴ trees for split counting or 10³ for risk curves,
    /// and 5·10⁴ test points.
    pub fn full_scale(mut self, for_cut_probs: bool) -> Self {
        self.replicates = 100;
        self.trees = if for_cut_probs { 10_000 } else { 1000 };
        self.test_size = 50_000;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.d_values.is_empty() || self.n_values.is_empty() {
            return bad("d_values and n_values must be non-empty".into());
        }
        if self.replicates == 0 || self.trees == 0 || self.test_size == 0 {
            return bad("replicates, trees and test_size must be at least 1".into());
        }
        if self.n_values.contains(&0) {
            return bad("every n must be at least 1".into());
        }
        if !self.n_values.windows(2).all(|w| w[0] < w[1]) {
            return bad("n_values must be strictly increasing".into());
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return bad(format!("noise_sd = {} must be finite and non-negative", self.noise_sd));
        }
        let min_d = self.model.min_dimension().max(2);
        if let Some(&d) = self.d_values.iter().find(|&&d| d < min_d) {
            return bad(format!("{} needs d >= {min_d}, got {d}", self.model.label()));
        }
        if matches!(self.m_try, Some(0)) || matches!(self.target_leaves, Some(0)) {
            return bad("m_try and target_leaves must be at least 1".into());
        }
        if matches!(self.k_n, Some(k) if k < 2) {
            return bad("k_n must be at least 2".into());
        }
        if self.policy == PolicyKind::Cart {
            if let Some(m) = self.m_try {
                if let Some(&d) = self.d_values.iter().find(|&&d| m > d) {
                    return bad(format!("m_try = {m} exceeds d = {d} (CART draws without replacement)"));
                }
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn model_at(&self, d: usize) -> Result<SyntheticModel> {
        SyntheticModel::new(self.model.clone(), d, self.noise_sd)
    }

    pub fn m_try_for(&self, d: usize) -> usize {
        match (self.m_try, self.policy) {
            (Some(m), _) => m,
            (None, PolicyKind::Cart) => (d / 3).max(1),
            (None, _) => d,
        }
    }

    pub fn k_n_for(&self, n: usize) -> usize {
        self.k_n.unwrap_or_else(|| default_target_leaves(n).max(2))
    }

    /// Forest configuration for one job. The guided regime needs the
    /// independent split sample.
    pub fn forest_config(&self, n: usize, d: usize, seed: u64, split_sample: Option<Arc<Dataset>>) -> ForestConfig {
        let k_n = self.k_n_for(n);
        match self.policy {
            PolicyKind::PurelyRandom => ForestConfig::purely_random(k_n, self.trees, seed),
            PolicyKind::Guided => ForestConfig::guided(
                k_n,
                self.trees,
                self.m_try_for(d),
                split_sample.expect("guided jobs draw a split sample"),
                seed,
            ),
            PolicyKind::Cart => {
                let config = ForestConfig::cart(self.trees, self.m_try_for(d), seed);
                match self.target_leaves {
                    Some(t) => config.with_target_leaves(t),
                    None => config,
                }
            }
        }
    }
}
