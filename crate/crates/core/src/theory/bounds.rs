//! Closed-form variance and bias bounds.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

fn require_sparsity(s: usize, d: usize) -> Result<()> {
    if s < 2 {
        return Err(Error::Domain(format!("the bounds need S >= 2, got S = {s}")));
    }
    if d < s {
        return Err(Error::Domain(format!("S = {s} exceeds d = {d}")));
    }
    Ok(())
}

/// `C = (288/π) (π log 2 / 16)^{S/2d}`.
pub fn variance_bound_constant(s: usize, d: usize) -> Result<f64> {
    require_sparsity(s, d)?;
    Ok(288.0 / PI * (PI * LN_2 / 16.0).powf(s as f64 / (2 * d) as f64))
}

/// `ξ_j = S p_j - 1` on the strong coordinates.
pub fn xi_from_probs(probs: &[f64], strong: &[usize]) -> Vec<f64> {
    let s = strong.len() as f64;
    strong.iter().map(|&j| s * probs[j] - 1.0).collect()
}

/// `1 + ξ_n = Π_j [(1 + ξ_j)^{-1} (1 - ξ_j/(S-1))^{-1}]^{1/2d}` over the strong set.
pub fn xi_product(s: usize, d: usize, xi: &[f64]) -> Result<f64> {
    require_sparsity(s, d)?;
    if xi.len() != s {
        return Err(Error::Dimension { expected: s, got: xi.len() });
    }
    let sm1 = (s - 1) as f64;
    let mut prod = 1.0;
    for &x in xi {
        let a = 1.0 + x;
        let b = 1.0 - x / sm1;
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::Domain(format!("xi = {x} gives a probability outside (0, 1)")));
        }
        prod *= (a * b).recip().powf(1.0 / (2 * d) as f64);
    }
    Ok(prod)
}

/// `((S-1)/(S^2 a (1-b)))^{S/2d}`, the cap on `1 + ξ_n` when every strong
/// probability lies in `(a, b)`.
pub fn xi_product_cap(s: usize, d: usize, a: f64, b: f64) -> Result<f64> {
    require_sparsity(s, d)?;
    let s_f = s as f64;
    Ok(((s_f - 1.0) / (s_f * s_f * a * (1.0 - b))).powf(s_f / (2 * d) as f64))
}

/// Variance-term bound
/// `C σ² (S²/(S-1))^{S/2d} (1 + ξ_n) k_n / (n (log k_n)^{S/2d})`.
pub fn variance_bound_value(n: usize, k_n: usize, s: usize, d: usize, sigma2: f64, xi: &[f64]) -> Result<f64> {
    if k_n < 2 || n == 0 {
        return Err(Error::Domain(format!("need k_n >= 2 and n >= 1 (k_n={k_n}, n={n})")));
    }
    let c = variance_bound_constant(s, d)?;
    let one_plus_xi = xi_product(s, d, xi)?;
    let expo = s as f64 / (2 * d) as f64;
    let s_f = s as f64;
    let k = k_n as f64;
    Ok(c * sigma2 * (s_f * s_f / (s_f - 1.0)).powf(expo) * one_plus_xi * k / (n as f64 * k.ln().powf(expo)))
}

/// The two summands of the bias bound:
/// `2 S L² / k_n^{(0.75/(S log 2))(1+γ)}` and `sup r² · e^{-n/(2 k_n)}`.
pub fn bias_bound_terms(n: usize, k_n: usize, s: usize, l: f64, sup_r2: f64, gamma: f64) -> Result<(f64, f64)> {
    if s < 2 {
        return Err(Error::Domain(format!("the bounds need S >= 2, got S = {s}")));
    }
    if k_n < 2 {
        return Err(Error::Domain(format!("need k_n >= 2, got {k_n}")));
    }
    let s_f = s as f64;
    let k = k_n as f64;
    let approx = 2.0 * s_f * l * l / k.powf(0.75 / (s_f * LN_2) * (1.0 + gamma));
    let empty = sup_r2 * (-(n as f64) / (2.0 * k)).exp();
    Ok((approx, empty))
}

pub fn bias_bound_value(n: usize, k_n: usize, s: usize, l: f64, sup_r2: f64, gamma: f64) -> Result<f64> {
    let (a, b) = bias_bound_terms(n, k_n, s, l, sup_r2, gamma)?;
    Ok(a + b)
}

/// Combined risk bound `Ξ_n k_n / n + 2 S L² / k_n^{(0.75/(S log 2))(1+γ)}` with
/// `Ξ_n = C σ² (S²/(S-1))^{S/2d} (1 + ξ_n) + 2 e^{-1} sup r²`.
#[allow(clippy::too_many_arguments)]
pub fn risk_bound(
    n: usize,
    k_n: usize,
    s: usize,
    d: usize,
    sigma2: f64,
    xi: &[f64],
    l: f64,
    sup_r2: f64,
) -> Result<f64> {
    let c = variance_bound_constant(s, d)?;
    let expo = s as f64 / (2 * d) as f64;
    let s_f = s as f64;
    let big_xi =
        c * sigma2 * (s_f * s_f / (s_f - 1.0)).powf(expo) * xi_product(s, d, xi)? + 2.0 * (-1.0f64).exp() * sup_r2;
    let gamma = xi.iter().copied().fold(f64::INFINITY, f64::min);
    let (approx, _) = bias_bound_terms(n, k_n, s, l, sup_r2, gamma)?;
    Ok(big_xi * k_n as f64 / n as f64 + approx)
}
