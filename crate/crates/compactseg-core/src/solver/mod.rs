//! Solvers for the compactness-regularized segmentation model: the
//! primal-dual threshold-dynamics pair (PD-TD, PD-STD) and the ADMM
//! baseline they are compared against.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::field::{BinaryMask, LabelField, ScalarField};
use crate::synth::disk_mask;

pub mod admm;
mod cg;
mod maxflow;
mod pd;

pub use admm::{admm_s_update, admm_u_update, admm_z_update, run_admm, AdmmConfig, AdmmState};
pub use cg::CgSummary;
pub use pd::{
    energy_value, lagrangian_value, pdstd_p_update, pdstd_u_update, pdtd_p_update, pdtd_u_update,
    phi_field, run_pdstd, run_pdtd, std_layer_forward,
};

/// Parameters shared by the PD-TD and PD-STD solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Fidelity weight; smaller values weight the compactness prior more.
    pub lambda: f64,
    /// Entropy weight of the soft update (PD-STD only).
    pub epsilon: f64,
    /// Proximal step of the dual update (PD-STD only); `f64::INFINITY`
    /// recovers the exact maximizer used by PD-TD.
    pub tau: f64,
    /// Gaussian kernel standard deviation in pixels.
    pub sigma: f64,
    /// Kernel half-width `n`; the window is `(2n+1) x (2n+1)`.
    pub kernel_half_width: usize,
    /// Iteration cap `I`.
    pub max_iters: usize,
    /// PD-STD stops when the max-norm change of `u` drops below this.
    pub stop_tol: f64,
    /// Threshold applied to the final soft labeling.
    pub final_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda: 1.0,
            epsilon: 0.1,
            tau: 1.0,
            sigma: 2.0,
            kernel_half_width: 6,
            max_iters: 300,
            stop_tol: 1e-4,
            final_threshold: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter("lambda must be positive".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParameter("tau must be positive".into()));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidParameter("sigma must be positive".into()));
        }
        if self.kernel_half_width < 1 {
            return Err(Error::InvalidParameter(
                "kernel half-width must be at least 1".into(),
            ));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter(
                "iteration cap must be at least 1".into(),
            ));
        }
        if self.stop_tol < 0.0 {
            return Err(Error::InvalidParameter(
                "stop tolerance must be nonnegative".into(),
            ));
        }
        if !(self.final_threshold > 0.0 && self.final_threshold < 1.0) {
            return Err(Error::InvalidParameter(
                "final threshold must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// One row of the per-iteration trace. Entry 0 describes the initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub iter: usize,
    /// Model energy of the current labeling.
    pub energy: f64,
    /// Saddle-function value for the PD solvers, augmented Lagrangian for
    /// ADMM.
    pub lagrangian: f64,
    /// Scalar dual state: `p` for the PD solvers, `s` for ADMM.
    pub dual: f64,
}

/// Why a solve stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// PD-TD reached `u_next == u` exactly.
    FixedPoint,
    /// The configured tolerance was met.
    Tolerance,
    /// The iteration cap was hit.
    MaxIters,
    /// A PD-TD iterate emptied; the previous iterate was kept.
    EmptiedRegion,
}

/// Everything a solve produces: final labeling, dual state, and the full
/// per-iteration trace.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub mask: BinaryMask,
    pub soft_u: LabelField,
    /// Final scalar dual value (`p` for PD solvers, `s` for ADMM).
    pub p_final: f64,
    /// Completed outer iterations; `trace.len() == iters_used + 1`.
    pub iters_used: usize,
    pub trace: Vec<TraceEntry>,
    pub wall_time: Duration,
    pub stop_reason: StopReason,
}

/// Data-driven starting mask: the negative set of the region force, falling
/// back to a centered disk of radius `min(w, h) / 4` when that set is empty.
pub fn default_initial_mask(f: &ScalarField) -> BinaryMask {
    let (width, height) = f.dims();
    let mask = BinaryMask::from_fn(width, height, |x, y| f.get(x, y) < 0.0);
    if !mask.is_empty() {
        return mask;
    }
    let radius = width.min(height) as f64 / 4.0;
    disk_mask(
        width,
        height,
        (width as f64 - 1.0) / 2.0,
        (height as f64 - 1.0) / 2.0,
        radius,
    )
}
