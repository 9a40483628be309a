//! Small statistical helpers: binomial masses, summary statistics and
//! Pearson chi-square goodness-of-fit.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

/// Mass function of Binomial(`n`, `p`) on `0..=n`.
pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    assert!((0.0..=1.0).contains(&p), "p = {p} outside [0, 1]");
    let mut pmf = vec![0.0; n + 1];
    if p == 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if p == 1.0 {
        pmf[n] = 1.0;
        return pmf;
    }
    let q = 1.0 - p;
    let start = q.powi(n as i32);
    if start > 1e-280 {
        pmf[0] = start;
        let ratio = p / q;
        for k in 0..n {
            pmf[k + 1] = pmf[k] * (n - k) as f64 / (k + 1) as f64 * ratio;
        }
    } else {
        let (lp, lq) = (p.ln(), q.ln());
        let lnf = ln_gamma(n as f64 + 1.0);
        for (k, v) in pmf.iter_mut().enumerate() {
            let ln_choose = lnf - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
            *v = (ln_choose + k as f64 * lp + (n - k) as f64 * lq).exp();
        }
    }
    pmf
}

/// Sample mean and standard error of the mean (0 for a single value).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Pearson goodness-of-fit of integer observations against a mass function
/// on `0..pmf.len()`.
///
/// Adjacent values are pooled left to right until each bin expects at least
/// five observations; a short tail bin is merged into its neighbour.
pub fn chi_square_gof(observed: &[usize], pmf: &[f64]) -> ChiSquareTest {
    let total = observed.len() as f64;
    let mut counts = vec![0usize; pmf.len()];
    for &o in observed {
        assert!(o < pmf.len(), "observation {o} outside the support");
        counts[o] += 1;
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (c, p) in counts.iter().zip(pmf) {
        obs += *c as f64;
        exp += p * total;
        if exp >= 5.0 {
            bins.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => bins.push((obs, exp)),
        }
    }
    let statistic = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = bins.len().saturating_sub(1).max(1);
    let p_value = ChiSquared::new(dof as f64).expect("dof >= 1").sf(statistic);
    ChiSquareTest { statistic, dof, p_value }
}
