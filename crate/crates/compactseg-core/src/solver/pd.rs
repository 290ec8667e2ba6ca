//! Primal-dual threshold-dynamics solvers.
//!
//! Both algorithms alternate a labeling update against
//! `phi = lambda * f - p^2 / 4 + p * G * (1 - 2u)` with a closed-form update
//! of the scalar dual `p`. PD-TD thresholds `phi` to a binary labeling and
//! maximizes the dual exactly; PD-STD applies an entropy-regularized
//! (sigmoid) update and a proximal dual step, keeping the labeling in
//! `(0, 1)` so the whole pass is differentiable.

use std::time::Instant;

use crate::error::Result;
use crate::field::{inner_product, threshold, BinaryMask, LabelField, ScalarField};
use crate::kernel::{calibrate_perimeter_constant, convolve_zero_pad, td_boundary_measure, GaussianKernel};
use crate::region::force_from_logits;
use crate::solver::{default_initial_mask, SolveReport, SolverConfig, StopReason, TraceEntry};

/// `phi = lambda * f - p^2/4 + p * G * (1 - 2u)`, the pointwise cost of
/// assigning a pixel to the foreground at the current linearization.
pub fn phi_field(
    f: &ScalarField,
    u: &ScalarField,
    p: f64,
    lambda: f64,
    kernel: &GaussianKernel,
) -> Result<ScalarField> {
    f.check_same_dims(u)?;
    let conv = convolve_zero_pad(u, kernel);
    Ok(phi_from_conv(f, &conv, p, lambda))
}

/// Same as [`phi_field`] but reusing an already-computed `G * u`.
fn phi_from_conv(f: &ScalarField, conv_u: &ScalarField, p: f64, lambda: f64) -> ScalarField {
    let quarter_p2 = p * p / 4.0;
    let (width, height) = f.dims();
    let data = f
        .as_slice()
        .iter()
        .zip(conv_u.as_slice())
        .map(|(&fv, &cv)| lambda * fv - quarter_p2 + p * (1.0 - 2.0 * cv))
        .collect();
    ScalarField::from_vec(width, height, data)
}

/// Hard threshold step: foreground exactly where `phi < 0`.
pub fn pdtd_u_update(phi: &ScalarField) -> BinaryMask {
    BinaryMask::from_fn(phi.width(), phi.height(), |x, y| phi.get(x, y) < 0.0)
}

/// Exact dual maximizer `p = 2 <u, G*(1-u)> / <u, 1>`.
///
/// Fails with [`crate::Error::EmptyRegion`] on an empty mask, where the
/// maximizer is undefined.
pub fn pdtd_p_update(u: &BinaryMask, kernel: &GaussianKernel) -> Result<f64> {
    let area = u.area();
    if area == 0 {
        return Err(crate::error::Error::EmptyRegion);
    }
    let q = td_boundary_measure(&u.to_field(), kernel);
    Ok(2.0 * q / area as f64)
}

/// Soft threshold step: the entropy-regularized minimizer
/// `u = 1 / (1 + exp(phi / epsilon))`, evaluated through the
/// negative-magnitude exponent only so large `|phi| / epsilon` saturates to
/// 0 or 1 instead of overflowing.
pub fn pdstd_u_update(phi: &ScalarField, epsilon: f64) -> LabelField {
    assert!(epsilon > 0.0, "epsilon must be positive");
    LabelField::from_field_unchecked(phi.map(|v| stable_neg_sigmoid(v / epsilon)))
}

/// `1 / (1 + exp(t))` without overflow for any finite `t`.
#[inline]
fn stable_neg_sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

/// Proximal dual step `p = (p_prev + tau q) / (1 + tau area / 2)`.
///
/// `tau = +inf` recovers the exact maximizer `2q / area` (or leaves `p`
/// unchanged when the labeling is identically zero).
pub fn pdstd_p_update(u: &LabelField, p_prev: f64, tau: f64, kernel: &GaussianKernel) -> f64 {
    assert!(tau > 0.0, "tau must be positive");
    let q = td_boundary_measure(u.field(), kernel);
    let area = u.field().sum();
    proximal_dual(p_prev, tau, q, area)
}

#[inline]
fn proximal_dual(p_prev: f64, tau: f64, q: f64, area: f64) -> f64 {
    if tau.is_infinite() {
        if area > 0.0 {
            return 2.0 * q / area;
        }
        return p_prev;
    }
    (p_prev + tau * q) / (1.0 + tau * area / 2.0)
}

/// Saddle-function value `L(u, p) = <lambda f - p^2/4, u> + p <u, G*(1-u)>`.
pub fn lagrangian_value(
    u: &ScalarField,
    p: f64,
    f: &ScalarField,
    lambda: f64,
    kernel: &GaussianKernel,
) -> Result<f64> {
    u.check_same_dims(f)?;
    let fu = inner_product(f, u)?;
    let q = td_boundary_measure(u, kernel);
    let area = u.sum();
    Ok(lagrangian_from_parts(lambda, fu, q, area, p))
}

#[inline]
fn lagrangian_from_parts(lambda: f64, fu: f64, q: f64, area: f64, p: f64) -> f64 {
    lambda * fu - p * p / 4.0 * area + p * q
}

/// Model energy `E = lambda <f, u> + <u, G*(1-u)>^2 / <u, 1>`.
///
/// For the identically-zero labeling the compactness term takes its
/// isoperimetric floor, `4 pi` scaled into estimator units by the squared
/// perimeter-calibration constant, which keeps an energy trace that crosses
/// the empty state on a single scale.
pub fn energy_value(u: &ScalarField, f: &ScalarField, lambda: f64, kernel: &GaussianKernel) -> f64 {
    assert!(u.same_dims(f), "energy operands must share dimensions");
    let area = u.sum();
    let fu = inner_product(f, u).expect("dimensions checked");
    let q = td_boundary_measure(u, kernel);
    energy_from_parts(lambda, fu, q, area, kernel)
}

fn energy_from_parts(lambda: f64, fu: f64, q: f64, area: f64, kernel: &GaussianKernel) -> f64 {
    if area == 0.0 {
        return empty_energy_floor(kernel);
    }
    lambda * fu + q * q / area
}

fn empty_energy_floor(kernel: &GaussianKernel) -> f64 {
    let half_width = kernel.half_width();
    let grid = (8 * (half_width + 2)).max(128);
    let c = calibrate_perimeter_constant(kernel.sigma(), half_width, grid)
        .expect("kernel parameters were already validated");
    4.0 * std::f64::consts::PI * c * c
}

struct IterState {
    conv_u: ScalarField,
    q: f64,
    area: f64,
}

impl IterState {
    fn from_field(u: &ScalarField, kernel: &GaussianKernel) -> Self {
        let conv_u = convolve_zero_pad(u, kernel);
        let q = u
            .as_slice()
            .iter()
            .zip(conv_u.as_slice())
            .map(|(&ux, &cx)| ux * (1.0 - cx))
            .sum();
        let area = u.sum();
        IterState { conv_u, q, area }
    }
}

/// Runs PD-TD: hard thresholding of `phi` against the exact dual maximizer.
///
/// Stops at an exact fixed point of the binary labeling or after
/// `cfg.max_iters` iterations. If an iterate empties the foreground the
/// previous iterate is returned with [`StopReason::EmptiedRegion`]. An empty
/// caller-supplied `u0` without an explicit `p0` is an error.
pub fn run_pdtd(
    f: &ScalarField,
    cfg: &SolverConfig,
    u0: Option<&BinaryMask>,
    p0: Option<f64>,
) -> Result<SolveReport> {
    cfg.validate()?;
    let kernel = GaussianKernel::new(cfg.sigma, cfg.kernel_half_width)?;
    let start = Instant::now();

    let mut u = match u0 {
        Some(mask) => {
            f.check_same_dims(&mask.to_field())?;
            mask.clone()
        }
        None => default_initial_mask(f),
    };
    let mut p = match p0 {
        Some(p) => p,
        None => pdtd_p_update(&u, &kernel)?,
    };

    let fu0 = inner_product(f, &u.to_field())?;
    let mut state = IterState::from_field(&u.to_field(), &kernel);
    let mut trace = vec![TraceEntry {
        iter: 0,
        energy: energy_from_parts(cfg.lambda, fu0, state.q, state.area, &kernel),
        lagrangian: lagrangian_from_parts(cfg.lambda, fu0, state.q, state.area, p),
        dual: p,
    }];

    let mut stop_reason = StopReason::MaxIters;
    let mut iters_used = 0;
    for k in 0..cfg.max_iters {
        let phi = phi_from_conv(f, &state.conv_u, p, cfg.lambda);
        let u_next = pdtd_u_update(&phi);
        if u_next.is_empty() {
            stop_reason = StopReason::EmptiedRegion;
            break;
        }
        let fixed_point = u_next == u;
        let u_next_field = u_next.to_field();
        let next_state = IterState::from_field(&u_next_field, &kernel);
        let p_next = 2.0 * next_state.q / next_state.area;
        let fu = inner_product(f, &u_next_field)?;
        trace.push(TraceEntry {
            iter: k + 1,
            energy: energy_from_parts(cfg.lambda, fu, next_state.q, next_state.area, &kernel),
            lagrangian: lagrangian_from_parts(cfg.lambda, fu, next_state.q, next_state.area, p_next),
            dual: p_next,
        });
        u = u_next;
        state = next_state;
        p = p_next;
        iters_used = k + 1;
        if fixed_point {
            stop_reason = StopReason::FixedPoint;
            break;
        }
    }

    let soft_u = LabelField::from(&u);
    Ok(SolveReport {
        mask: u,
        soft_u,
        p_final: p,
        iters_used,
        trace,
        wall_time: start.elapsed(),
        stop_reason,
    })
}

/// Runs PD-STD: sigmoid (soft-threshold) labeling updates against a proximal
/// dual step, then binarizes at `cfg.final_threshold`.
///
/// Stops when the max-norm change of the labeling drops below
/// `cfg.stop_tol` or after `cfg.max_iters` iterations.
pub fn run_pdstd(
    f: &ScalarField,
    cfg: &SolverConfig,
    u0: Option<&LabelField>,
    p0: Option<f64>,
) -> Result<SolveReport> {
    cfg.validate()?;
    let kernel = GaussianKernel::new(cfg.sigma, cfg.kernel_half_width)?;
    let start = Instant::now();

    let mut u: ScalarField = match u0 {
        Some(label) => {
            f.check_same_dims(label.field())?;
            label.field().clone()
        }
        None => default_initial_mask(f).to_field(),
    };
    let mut state = IterState::from_field(&u, &kernel);
    let mut p = match p0 {
        Some(p) => p,
        None if state.area > 0.0 => 2.0 * state.q / state.area,
        None => 0.0,
    };

    let fu0 = inner_product(f, &u)?;
    let mut trace = vec![TraceEntry {
        iter: 0,
        energy: energy_from_parts(cfg.lambda, fu0, state.q, state.area, &kernel),
        lagrangian: lagrangian_from_parts(cfg.lambda, fu0, state.q, state.area, p),
        dual: p,
    }];

    let mut stop_reason = StopReason::MaxIters;
    let mut iters_used = 0;
    for k in 0..cfg.max_iters {
        let phi = phi_from_conv(f, &state.conv_u, p, cfg.lambda);
        let u_next = pdstd_u_update(&phi, cfg.epsilon).into_field();
        let next_state = IterState::from_field(&u_next, &kernel);
        let p_next = proximal_dual(p, cfg.tau, next_state.q, next_state.area);
        let fu = inner_product(f, &u_next)?;
        trace.push(TraceEntry {
            iter: k + 1,
            energy: energy_from_parts(cfg.lambda, fu, next_state.q, next_state.area, &kernel),
            lagrangian: lagrangian_from_parts(cfg.lambda, fu, next_state.q, next_state.area, p_next),
            dual: p_next,
        });
        let delta = u
            .as_slice()
            .iter()
            .zip(u_next.as_slice())
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        u = u_next;
        state = next_state;
        p = p_next;
        iters_used = k + 1;
        if delta < cfg.stop_tol {
            stop_reason = StopReason::Tolerance;
            break;
        }
    }

    let mask = threshold(&u, cfg.final_threshold);
    Ok(SolveReport {
        mask,
        soft_u: LabelField::from_field_unchecked(u),
        p_final: p,
        iters_used,
        trace,
        wall_time: start.elapsed(),
        stop_reason,
    })
}

/// Forward pass of the compactness layer: runs PD-STD on `f = -o` starting
/// from `p = 0` and returns the soft labeling without binarization. With
/// `max_iters = 1`, `epsilon = 1` and `lambda = 1` this reduces to the plain
/// sigmoid of the logits.
pub fn std_layer_forward(logits: &ScalarField, cfg: &SolverConfig) -> Result<LabelField> {
    let f = force_from_logits(logits);
    let report = run_pdstd(&f, cfg, None, Some(0.0))?;
    Ok(report.soft_u)
}
