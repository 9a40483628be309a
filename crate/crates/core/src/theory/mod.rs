//! Numerical verification of the convergence analysis: exact enumeration of
//! the binomial inequalities, closed-form bound evaluators and Monte-Carlo
//! estimates compared against them.

use std::fmt;

use serde::Serialize;

mod binomial;
mod bounds;
mod consistency;
mod decomposition;
mod laws;
mod population;
mod suite;

pub use binomial::{
    contour_inversion_check, difference_pmf, difference_pmf_by_contour, inverse_moment_check, inverse_moments,
    inverse_moments_exact, phi, positive_part_bound, positive_part_check, positive_part_exact,
};
pub use bounds::{
    bias_bound_terms, bias_bound_value, risk_bound, variance_bound_constant, variance_bound_value, xi_from_probs,
    xi_product, xi_product_cap,
};
pub use consistency::{consistency_diagnostics, ConsistencyReport, ConsistencySpec};
pub use decomposition::{empirical_decomposition, Decomposition, DecompositionSpec, Estimate};
pub use laws::{
    ideal_probability_check, occupancy_law_check, split_coordinate_frequency_check, split_count_law_check, LAW_ALPHA,
};
pub use population::{best_population_cut, weighted_variance_decrease, LinearModel};
pub use suite::{
    inverse_moment_grid, inversion_grid, p_grid, positive_part_grid, run_theory_suite, xi_cap_grid, TheoryConfig,
};

/// Multiplier on the standard error allowed for Monte-Carlo estimates.
pub const SIGMA_MARGIN: f64 = 3.0;

/// Parameters a check was evaluated at. Unused slots stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundParams {
    pub big_n: Option<usize>,
    pub p: Option<f64>,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub k_n: Option<usize>,
    pub s: Option<usize>,
    pub sigma2: Option<f64>,
    pub l: Option<f64>,
    pub extra: Option<String>,
}

impl fmt::Display for BoundParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(v) = self.big_n {
            parts.push(format!("N={v}"));
        }
        if let Some(v) = self.p {
            parts.push(format!("p={v}"));
        }
        if let Some(v) = self.d {
            parts.push(format!("d={v}"));
        }
        if let Some(v) = self.n {
            parts.push(format!("n={v}"));
        }
        if let Some(v) = self.k_n {
            parts.push(format!("k_n={v}"));
        }
        if let Some(v) = self.s {
            parts.push(format!("S={v}"));
        }
        if let Some(v) = self.sigma2 {
            parts.push(format!("sigma2={v}"));
        }
        if let Some(v) = self.l {
            parts.push(format!("L={v}"));
        }
        if let Some(v) = &self.extra {
            parts.push(v.clone());
        }
        f.write_str(&parts.join(";"))
    }
}

/// One verified inequality `lhs <= rhs`.
///
/// `pass` holds exactly when `lhs <= rhs + 3 * stderr`; exact checks carry
/// `stderr = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub params: BoundParams,
    pub lhs: f64,
    pub stderr: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl BoundReport {
    pub fn exact(name: impl Into<String>, params: BoundParams, lhs: f64, rhs: f64) -> Self {
        Self::estimated(name, params, lhs, 0.0, rhs)
    }

    pub fn estimated(name: impl Into<String>, params: BoundParams, lhs: f64, stderr: f64, rhs: f64) -> Self {
        let pass = lhs <= rhs + SIGMA_MARGIN * stderr;
        Self { name: name.into(), params, lhs, stderr, rhs, margin: rhs - lhs, pass }
    }

    /// Two-sided agreement `|estimate - exact| <= 3 * stderr`, encoded as
    /// `lhs = |estimate - exact|`, `rhs = 0`.
    pub fn agreement(name: impl Into<String>, params: BoundParams, estimate: f64, stderr: f64, exact: f64) -> Self {
        Self::estimated(name, params, (estimate - exact).abs(), stderr, 0.0)
    }
}

/// Writes `name,params,lhs,stderr,rhs,margin,pass` rows.
pub fn write_bound_report<W: std::io::Write>(reports: &[BoundReport], writer: W) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["name", "params", "lhs", "stderr", "rhs", "margin", "pass"])?;
    for r in reports {
        w.write_record([
            r.name.clone(),
            r.params.to_string(),
            format!("{:e}", r.lhs),
            format!("{:e}", r.stderr),
            format!("{:e}", r.rhs),
            format!("{:e}", r.margin),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule_uses_three_standard_errors() {
        let p = BoundParams::default();
        assert!(BoundReport::estimated("a", p.clone(), 1.2, 0.1, 1.0).pass);
        assert!(!BoundReport::estimated("b", p.clone(), 1.31, 0.1, 1.0).pass);
        assert!(!BoundReport::exact("c", p.clone(), 1.0 + 1e-15, 1.0).pass);
        assert!(BoundReport::agreement("d", p, 0.52, 0.01, 0.5).pass);
    }

    #[test]
    fn params_display() {
        let p = BoundParams { big_n: Some(2), p: Some(0.5), d: Some(1), ..Default::default() };
        assert_eq!(p.to_string(), "N=2;p=0.5;d=1");
    }
}
