//! Binary image segmentation with a shape-compactness prior.
//!
//! The model couples a pixelwise region force with the scale-invariant
//! squared-perimeter-to-area ratio of the foreground, which is minimal for a
//! disk. The perimeter of a labeling `u` is approximated by the Gaussian
//! boundary form `<u, G_sigma * (1 - u)>`, and rewriting the resulting ratio
//! through its dual representation turns the non-convex energy into an
//! alternating pair of cheap updates: a pointwise labeling step against the
//! field `phi` and a closed-form scalar dual step.
//!
//! Two solvers implement that scheme. PD-TD thresholds `phi` into a binary
//! labeling each sweep; PD-STD replaces the hard threshold with an
//! entropy-regularized sigmoid, staying differentiable so the unrolled
//! iteration doubles as a network output layer ([`solver::std_layer_forward`]).
//! An ADMM splitting with graph-cut, CG, and cubic-root subproblems serves
//! as the reference baseline ([`solver::run_admm`]).
//!
//! ```
//! use compactseg_core::prelude::*;
//!
//! let truth = disk_mask(64, 64, 31.5, 31.5, 14.0);
//! let image = add_gaussian_noise(&truth.to_field(), 0.1, 7);
//! let f = two_phase_force(&image, 1.0, 0.0);
//! let report = run_pdstd(&f, &SolverConfig::default(), None, None).unwrap();
//! assert!(dice(&report.mask, &truth).unwrap() > 0.95);
//! ```

pub mod error;
pub mod field;
pub mod kernel;
pub mod metrics;
pub mod region;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use field::{inner_product, threshold, BinaryMask, LabelField, ScalarField};
pub use kernel::{
    calibrate_perimeter_constant, convolve_zero_pad, default_half_width, td_boundary_measure,
    GaussianKernel,
};
pub use solver::{SolveReport, SolverConfig, StopReason, TraceEntry};

/// Convenience re-exports for callers that want everything in scope.
pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::field::{inner_product, threshold, BinaryMask, LabelField, ScalarField};
    pub use crate::kernel::{
        calibrate_perimeter_constant, convolve_zero_pad, default_half_width, td_boundary_measure,
        GaussianKernel,
    };
    pub use crate::metrics::{
        circularity, compactness, dice, discrete_tv, iou, perimeter, PerimeterScheme, TvScheme,
    };
    pub use crate::region::{force_from_logits, two_phase_force, update_means};
    pub use crate::solver::{
        admm_s_update, admm_u_update, admm_z_update, default_initial_mask, energy_value,
        lagrangian_value, pdstd_p_update, pdstd_u_update, pdtd_p_update, pdtd_u_update, phi_field,
        run_admm, run_pdstd, run_pdtd, std_layer_forward, AdmmConfig, AdmmState, SolveReport,
        SolverConfig, StopReason, TraceEntry,
    };
    pub use crate::synth::{
        add_gaussian_noise, add_salt_pepper, disk_mask, disk_with_tabs_mask, rect_mask,
    };
}
