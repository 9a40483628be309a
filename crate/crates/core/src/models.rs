//! Synthetic sparse regression problems with known truth.

use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::standard_normal;

const TREE_MODEL_SPEC: &str = include_str!("../data/tree_model_v1.toml");

#[derive(Debug, Clone, Deserialize)]
struct TreeNodeSpec {
    coord: usize,
    threshold: f64,
}

/// The frozen piecewise-constant function behind [`ModelKind::Tree`].
#[derive(Debug, Clone, Deserialize)]
pub struct TreeFunction {
    pub version: u32,
    nodes: Vec<TreeNodeSpec>,
    leaves: Vec<f64>,
}

impl TreeFunction {
    pub fn get() -> &'static TreeFunction {
        static TREE: OnceLock<TreeFunction> = OnceLock::new();
        TREE.get_or_init(|| {
            let t: TreeFunction = toml::from_str(TREE_MODEL_SPEC).expect("embedded tree model parses");
            assert_eq!(t.leaves.len(), t.nodes.len() + 1, "complete tree expected");
            t
        })
    }

    /// Index of the leaf region containing `x`.
    pub fn region(&self, x: &[f64]) -> usize {
        let mut k = 0;
        while k < self.nodes.len() {
            let node = &self.nodes[k];
            k = if x[node.coord - 1] < node.threshold { 2 * k + 1 } else { 2 * k + 2 };
        }
        k - self.nodes.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.leaves[self.region(x)]
    }

    pub fn n_regions(&self) -> usize {
        self.leaves.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum ModelKind {
    /// `10 sin(10π x1)`.
    Sinus,
    /// `10 sin(π x1 x2) + 20 (x3 - center)^2 + 10 x4 + 5 x5`.
    Friedman1 {
        #[serde(default = "default_friedman_center")]
        center: f64,
    },
    /// Piecewise constant on 8 regions of coordinates 1..5.
    Tree,
    /// `10 sin(10π x1) + x2`: the two-strong-variable variant used for bound comparisons.
    SinusPlusLinear,
    Constant {
        value: f64,
    },
}

pub fn default_friedman_center() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticModel {
    pub kind: ModelKind,
    pub d: usize,
    pub noise_sd: f64,
}

impl SyntheticModel {
    pub fn new(kind: ModelKind, d: usize, noise_sd: f64) -> Result<Self> {
        let d_min = kind.min_dimension();
        if d < d_min {
            return Err(Error::Config(format!("model {} needs d >= {d_min}, got {d}", kind.label())));
        }
        if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
            return Err(Error::Config(format!("noise_sd = {noise_sd} must be a finite non-negative number")));
        }
        Ok(Self { kind, d, noise_sd })
    }

    pub fn sinus(d: usize) -> Result<Self> {
        Self::new(ModelKind::Sinus, d, 1.0)
    }

    pub fn friedman1(d: usize) -> Result<Self> {
        Self::new(ModelKind::Friedman1 { center: default_friedman_center() }, d, 1.0)
    }

    pub fn tree(d: usize) -> Result<Self> {
        Self::new(ModelKind::Tree, d, 1.0)
    }

    pub fn with_noise(mut self, noise_sd: f64) -> Self {
        self.noise_sd = noise_sd;
        self
    }

    /// Zero-based indices of the coordinates the truth depends on.
    pub fn strong_set(&self) -> Vec<usize> {
        (0..self.kind.sparsity()).collect()
    }

    pub fn sparsity(&self) -> usize {
        self.kind.sparsity()
    }

    /// Noiseless regression value at `x`.
    pub fn truth(&self, x: &[f64]) -> f64 {
        use std::f64::consts::PI;
        match &self.kind {
            ModelKind::Sinus => 10.0 * (10.0 * PI * x[0]).sin(),
            ModelKind::Friedman1 { center } => {
                10.0 * (PI * x[0] * x[1]).sin() + 20.0 * (x[2] - center).powi(2) + 10.0 * x[3] + 5.0 * x[4]
            }
            ModelKind::Tree => TreeFunction::get().eval(x),
            ModelKind::SinusPlusLinear => 10.0 * (10.0 * PI * x[0]).sin() + x[1],
            ModelKind::Constant { value } => *value,
        }
    }

    /// Lipschitz constant of the truth on the strong coordinates (Euclidean
    /// norm), when it has one.
    pub fn lipschitz(&self) -> Option<f64> {
        use std::f64::consts::PI;
        match self.kind {
            ModelKind::Sinus => Some(100.0 * PI),
            ModelKind::SinusPlusLinear => Some((100.0 * PI).hypot(1.0)),
            ModelKind::Constant { .. } => Some(0.0),
            ModelKind::Friedman1 { .. } | ModelKind::Tree => None,
        }
    }

    /// `sup_x r(x)^2` over the unit hypercube.
    pub fn sup_truth_squared(&self) -> f64 {
        match &self.kind {
            ModelKind::Sinus => 100.0,
            ModelKind::SinusPlusLinear => 121.0,
            ModelKind::Constant { value } => value * value,
            ModelKind::Tree => TreeFunction::get().leaves.iter().map(|v| v * v).fold(0.0, f64::max),
            ModelKind::Friedman1 { center } => {
                let c = center.abs().max((1.0 - center).abs());
                (10.0 + 20.0 * c * c + 15.0_f64).powi(2)
            }
        }
    }

    /// `n` rows with `X ~ U([0,1]^d)` and `Y = r(X) + noise_sd * N(0,1)`.
    ///
    /// Each row consumes `d` uniforms then one standard normal from `rng`.
    pub fn generate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Dataset {
        let mut x = Vec::with_capacity(n * self.d);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let start = x.len();
            x.extend((0..self.d).map(|_| rng.random::<f64>()));
            let eps = standard_normal(rng);
            y.push(self.truth(&x[start..]) + self.noise_sd * eps);
        }
        Dataset::new(x, y, self.d).expect("generated covariates lie in [0, 1)")
    }

    /// Uniform covariates only (responses set to the truth).
    pub fn noiseless_points<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Dataset {
        self.clone().with_noise(0.0).generate(n, rng)
    }
}

impl ModelKind {
    pub fn min_dimension(&self) -> usize {
        match self {
            ModelKind::Sinus | ModelKind::Constant { .. } => 1,
            ModelKind::SinusPlusLinear => 2,
            ModelKind::Friedman1 { .. } | ModelKind::Tree => 5,
        }
    }

    pub fn sparsity(&self) -> usize {
        match self {
            ModelKind::Constant { .. } => 0,
            ModelKind::Sinus => 1,
            ModelKind::SinusPlusLinear => 2,
            ModelKind::Friedman1 { .. } | ModelKind::Tree => 5,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ModelKind::Sinus => "sinus".into(),
            ModelKind::Friedman1 { center } => format!("friedman1(center={center})"),
            ModelKind::Tree => "tree".into(),
            ModelKind::SinusPlusLinear => "sinus-plus-linear".into(),
            ModelKind::Constant { value } => format!("constant({value})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::stats::mean_stderr;

    #[test]
    fn dimension_requirements() {
        assert!(SyntheticModel::sinus(1).is_ok());
        assert!(SyntheticModel::friedman1(4).is_err());
        assert!(SyntheticModel::tree(5).is_ok());
        assert_eq!(SyntheticModel::tree(9).unwrap().strong_set(), vec![0, 1, 2, 3, 4]);
        assert_eq!(SyntheticModel::sinus(9).unwrap().sparsity(), 1);
    }

    #[test]
    fn known_values() {
        let s = SyntheticModel::sinus(3).unwrap();
        assert!((s.truth(&[0.05, 0.3, 0.9]) - 10.0).abs() < 1e-12);
        let f = SyntheticModel::friedman1(6).unwrap();
        assert!((f.truth(&[0.0; 6]) - 0.05).abs() < 1e-15);
        let classic = SyntheticModel::new(ModelKind::Friedman1 { center: 0.5 }, 5, 1.0).unwrap();
        assert!((classic.truth(&[0.0; 5]) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn tree_function_is_piecewise_constant() {
        let t = SyntheticModel::tree(7).unwrap();
        let tf = TreeFunction::get();
        assert_eq!(tf.version, 1);
        assert_eq!(tf.n_regions(), 8);
        let a = [0.1, 0.1, 0.1, 0.2, 0.9, 0.4, 0.4];
        let b = [0.4, 0.2, 0.45, 0.9, 0.1, 0.9, 0.0];
        assert_eq!(tf.region(&a), tf.region(&b));
        assert_eq!(t.truth(&a), t.truth(&b));
        let mut rng = stream(3, &[]);
        let mut seen = [false; 8];
        for _ in 0..2000 {
            let x: Vec<f64> = (0..7).map(|_| rng.random()).collect();
            seen[tf.region(&x)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn noiseless_generation_equals_truth() {
        let m = SyntheticModel::friedman1(8).unwrap().with_noise(0.0);
        let data = m.generate(100, &mut stream(4, &[]));
        for (row, y) in data.rows().zip(data.y()) {
            assert_eq!(*y, m.truth(row));
        }
    }

    #[test]
    fn sinus_response_moments() {
        let m = SyntheticModel::sinus(2).unwrap();
        let data = m.generate(100_000, &mut stream(5, &[]));
        // the truth integrates to 0 over [0, 1]; Var(Y) = 50 + 1
        let (mean, se) = mean_stderr(data.y());
        assert!(mean.abs() <= 3.0 * se, "mean {mean} se {se}");
        let resid: Vec<f64> = data.rows().zip(data.y()).map(|(x, y)| y - m.truth(x)).collect();
        let (rm, _) = mean_stderr(&resid);
        let var = resid.iter().map(|r| (r - rm).powi(2)).sum::<f64>() / (resid.len() - 1) as f64;
        assert!((0.97..=1.03).contains(&var), "residual variance {var}");
    }
}
