//! Rate exponents and the rate-optimal leaf count.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// `0.75 / (S log 2 + 0.75)`: the forest rate `n^-e` for sparsity `S`.
pub fn rate_exponent(s: usize) -> f64 {
    0.75 / (s as f64 * LN_2 + 0.75)
}

/// `2 / (d + 2)`: the minimax rate for Lipschitz functions on `[0, 1]^d`.
pub fn minimax_exponent(d: usize) -> f64 {
    2.0 / (d as f64 + 2.0)
}

/// `1 / (1 + 0.75 / (S log 2))`, the growth exponent of the optimal `k_n`.
pub fn optimal_kn_exponent(s: usize) -> f64 {
    1.0 / (1.0 + 0.75 / (s as f64 * LN_2))
}

/// `(L² / Ξ)^e n^e` with `e` from [`optimal_kn_exponent`], rounded and
/// floored at 2.
pub fn optimal_kn(n: usize, s: usize, l: f64, xi: f64) -> Result<usize> {
    if s < 2 {
        return Err(Error::Domain(format!("the optimal k_n needs S >= 2, got S = {s}")));
    }
    if n < 2 || l.is_nan() || l <= 0.0 || xi.is_nan() || xi <= 0.0 {
        return Err(Error::Domain(format!("need n >= 2, L > 0 and Xi > 0 (n={n}, L={l}, Xi={xi})")));
    }
    let e = optimal_kn_exponent(s);
    let k = ((l * l / xi) * n as f64).powf(e).round();
    Ok(if k < 2.0 { 2 } else { k as usize })
}

/// Whether the sparse rate beats the minimax rate: `rate_exponent(S) > minimax_exponent(d)`.
pub fn sparse_rate_wins(s: usize, d: usize) -> bool {
    rate_exponent(s) > minimax_exponent(d)
}

/// Largest `S` for which the sparse rate still beats the minimax rate:
/// the inequality is `S < 0.75 d / (2 log 2)`.
pub fn crossover_sparsity(d: usize) -> usize {
    (1..=d).take_while(|&s| sparse_rate_wins(s, d)).last().unwrap_or(0)
}
