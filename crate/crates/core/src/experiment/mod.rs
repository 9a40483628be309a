//! Batch experiments over `(n, d)` grids: split-ratio tables and test-error
//! curves, with CSV, SVG and manifest output.

mod cut_probs;
mod mse;
mod output;
mod plot;
mod rates;
mod spec;

pub use cut_probs::{run_cut_probability, CutProbabilityRun, CutProbabilityTable, CutRow};
pub use mse::{replicate_mse, run_mse_curve, MseCurve, MsePoint};
pub use output::{
    load_spec, read_cut_probs, read_mse_curve, write_cut_probs, write_mse_curve, Manifest, CUT_PROBS_FILE,
    MANIFEST_FILE, MSE_CURVE_FILE,
};
pub use plot::{plot_cut_probs, plot_mse_curve};
pub use rates::{
    crossover_sparsity, minimax_exponent, optimal_kn, optimal_kn_exponent, rate_exponent, sparse_rate_wins,
};
pub use spec::{ExperimentSpec, PolicyKind};

use crate::rng::{stream, StreamRng};

/// Stream of one `(n, d, replicate)` job for a given role tag.
pub(crate) fn job_stream(seed: u64, role: u64, key: [u64; 3]) -> StreamRng {
    stream(seed, &[role, key[0], key[1], key[2]])
}
