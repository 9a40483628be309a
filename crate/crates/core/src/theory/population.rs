//! Population-level split criterion for linear truths, by quadrature.

use crate::cell::Cell;
use crate::error::{Error, Result};

/// `r(x) = intercept + Σ_j coef_j x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub intercept: f64,
    pub coef: Vec<f64>,
}

impl LinearModel {
    pub fn new(intercept: f64, coef: Vec<f64>) -> Self {
        Self { intercept, coef }
    }

    pub fn d(&self) -> usize {
        self.coef.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.intercept + self.coef.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
    }
}

const SIMPSON_PANELS: usize = 64;

/// Composite Simpson rule; exact for polynomials up to degree three.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / SIMPSON_PANELS as f64;
    let mut acc = f(a) + f(b);
    for i in 1..SIMPSON_PANELS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// First and second moment of `r(X)` over `X` uniform on the box, integrated
/// one coordinate at a time (the coordinates are independent).
fn moments(model: &LinearModel, lo: &[f64], hi: &[f64]) -> (f64, f64) {
    let mut mean = model.intercept;
    let mut var = 0.0;
    for j in 0..model.d() {
        let (a, b) = (lo[j], hi[j]);
        let width = b - a;
        let c = model.coef[j];
        let m1 = simpson(|t| c * t, a, b) / width;
        let m2 = simpson(|t| (c * t) * (c * t), a, b) / width;
        mean += m1;
        var += m2 - m1 * m1;
    }
    (mean, var + mean * mean)
}

/// Decrease of `Var(Y | X ∈ A)` obtained by cutting `A` along `j` at relative
/// position `t ∈ (0, 1)` of its side, weighted by the child masses:
/// `Var(Y|A) - P(A_L|A) Var(Y|A_L) - P(A_R|A) Var(Y|A_R)` with `Y = r(X)` and
/// `X` uniform on `A`.
pub fn weighted_variance_decrease(model: &LinearModel, cell: &Cell, j: usize, t: f64) -> Result<f64> {
    if cell.d() != model.d() {
        return Err(Error::Dimension { expected: model.d(), got: cell.d() });
    }
    if j >= cell.d() || !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("need j < d and t in (0, 1), got j={j}, t={t}")));
    }
    let pos = cell.lo[j] + t * cell.side(j);
    let variance = |lo: &[f64], hi: &[f64]| {
        let (m1, m2) = moments(model, lo, hi);
        m2 - m1 * m1
    };
    let parent = variance(&cell.lo, &cell.hi);
    let mut left_hi = cell.hi.clone();
    left_hi[j] = pos;
    let mut right_lo = cell.lo.clone();
    right_lo[j] = pos;
    let left = variance(&cell.lo, &left_hi);
    let right = variance(&right_lo, &cell.hi);
    Ok(parent - t * left - (1.0 - t) * right)
}

/// Evaluates the decrease at `t = i/(points+1)`, `i = 1..=points`, and returns
/// the best `(t, decrease)`; the first maximiser wins.
pub fn best_population_cut(model: &LinearModel, cell: &Cell, j: usize, points: usize) -> Result<(f64, f64)> {
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for i in 1..=points {
        let t = i as f64 / (points + 1) as f64;
        let v = weighted_variance_decrease(model, cell, j, t)?;
        if v > best.1 {
            best = (t, v);
        }
    }
    Ok(best)
}
