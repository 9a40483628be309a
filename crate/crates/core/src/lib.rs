//! Midpoint-split random forests whose randomization is independent of the
//! training sample, together with the tooling used to study them: synthetic
//! sparse regression models, a Monte-Carlo experiment harness and exact or
//! simulated checks of the variance, bias and binomial inequalities that
//! govern their convergence rate.

pub mod builder;
pub mod cell;
pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod forest;
pub mod models;
pub mod rng;
pub mod stats;
pub mod theory;
pub mod tree;

pub use builder::{
    best_cart_split, best_midpoint_split, build_tree, choose_coordinate_random, ideal_cut_probability,
    sample_candidates, SplitDecision,
};
pub use cell::Cell;
pub use config::{ForestConfig, SplitPolicy, SplitProbabilities};
pub use data::Dataset;
pub use error::{Error, Result};
pub use forest::{count_in_cell, fit, predict_tree, Forest};
pub use models::{ModelKind, SyntheticModel};
pub use tree::RandomTree;
