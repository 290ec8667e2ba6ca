//! ADMM baseline for the compactness-regularized model, following the
//! Dolz-Ayed-Desrosiers splitting: auxiliary variables `z = u` and
//! `s = <u, 1>` turn the squared-perimeter-to-area ratio into
//! `|u|_TV |z|_TV / s` under linear constraints.
//!
//! Per sweep the binary `u` is recovered exactly by a min-cut, `z` solves a
//! symmetric positive-definite linear system by conjugate gradient (the
//! nonsmooth `|z|_TV` factor is lagged to its previous value, which removes
//! it from the optimality system), and `s` is the positive root of a cubic.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::{inner_product, BinaryMask, LabelField, ScalarField};
use crate::metrics::{discrete_tv, TvScheme};
use crate::solver::cg::{conjugate_gradient, CgSummary};
use crate::solver::maxflow::GridMaxFlow;
use crate::solver::{default_initial_mask, SolveReport, StopReason, TraceEntry};

/// Smallest admissible surrogate area; keeps the cubic nondegenerate.
const S_MIN: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmConfig {
    /// Fidelity weight.
    pub lambda: f64,
    /// Penalty on the `u = z` constraint.
    pub mu1: f64,
    /// Penalty on the `s = <z, 1>` constraint.
    pub mu2: f64,
    pub max_iters: usize,
    /// Relative tolerance of the inner CG solve.
    pub inner_cg_tol: f64,
    /// Iteration cap of the inner CG solve.
    pub inner_cg_max: usize,
    /// Both primal residuals below this stop the outer loop.
    pub primal_tol: f64,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        AdmmConfig {
            lambda: 1.0,
            mu1: 1.0,
            mu2: 1.0,
            max_iters: 150,
            inner_cg_tol: 1e-10,
            inner_cg_max: 200,
            primal_tol: 1e-3,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu1 > 0.0 && self.mu2 > 0.0) {
            return Err(Error::InvalidParameter(
                "penalty weights mu1, mu2 must be positive".into(),
            ));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter(
                "iteration cap must be at least 1".into(),
            ));
        }
        if !(self.inner_cg_tol >= 0.0) || self.inner_cg_max < 1 {
            return Err(Error::InvalidParameter(
                "inner CG tolerance/cap out of range".into(),
            ));
        }
        if !(self.primal_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "primal tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Primal and scaled dual state of the splitting.
#[derive(Debug, Clone)]
pub struct AdmmState {
    pub u: BinaryMask,
    pub z: ScalarField,
    /// Surrogate area, kept positive.
    pub s: f64,
    /// Scaled multiplier of `u = z`.
    pub nu1: ScalarField,
    /// Scaled multiplier of `s = <z, 1>`.
    pub nu2: f64,
}

impl AdmmState {
    /// Starting state: data-driven mask, `z` its copy, `s` its area.
    pub fn init(f: &ScalarField) -> Self {
        let u = default_initial_mask(f);
        let z = u.to_field();
        let s = z.sum().max(S_MIN);
        AdmmState {
            u,
            z,
            s,
            nu1: ScalarField::zeros(f.width(), f.height()),
            nu2: 0.0,
        }
    }

    /// Classical scaled-form multiplier step
    /// `nu1 += u - z`, `nu2 += s - <z, 1>`.
    pub fn update_multipliers(&mut self) {
        let u = self.u.to_field();
        for ((n, &uv), &zv) in self
            .nu1
            .as_mut_slice()
            .iter_mut()
            .zip(u.as_slice())
            .zip(self.z.as_slice())
        {
            *n += uv - zv;
        }
        self.nu2 += self.s - self.z.sum();
    }

    /// Max-norm of `u - z` and absolute gap `|s - <z, 1>|`.
    pub fn primal_residuals(&self) -> (f64, f64) {
        let r1 = self
            .u
            .to_field()
            .as_slice()
            .iter()
            .zip(self.z.as_slice())
            .map(|(&uv, &zv)| (uv - zv).abs())
            .fold(0.0f64, f64::max);
        let r2 = (self.s - self.z.sum()).abs();
        (r1, r2)
    }
}

/// Exact binary minimizer of the `u`-subproblem
/// `lambda <f, u> + (|z|_TV / s) |u|_TV + (mu1 / 2) ||u - z + nu1||^2`
/// by a min-cut on the 4-connected grid. The anisotropic TV makes every
/// pairwise term submodular.
pub fn admm_u_update(state: &AdmmState, f: &ScalarField, cfg: &AdmmConfig) -> BinaryMask {
    assert!(state.s > 0.0, "surrogate area must be positive");
    let (width, height) = f.dims();
    let w_tv = discrete_tv(&state.z, TvScheme::Anisotropic) / state.s;

    let mut graph = GridMaxFlow::new(width, height);
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            let zn = state.z.get(x, y) - state.nu1.get(x, y);
            // Cost difference of labeling the pixel 1 versus 0.
            let mut d = cfg.lambda * f.get(x, y) + cfg.mu1 / 2.0 * (1.0 - 2.0 * zn);
            // Forward differences see zero beyond the right and bottom
            // borders, which charges border pixels for their cut edge.
            if x + 1 == width {
                d += w_tv;
            }
            if y + 1 == height {
                d += w_tv;
            }
            if d >= 0.0 {
                graph.add_terminal(i, 0.0, d);
            } else {
                graph.add_terminal(i, -d, 0.0);
            }
            if w_tv > 0.0 {
                if x + 1 < width {
                    graph.add_pairwise(i, 0, w_tv);
                }
                if y + 1 < height {
                    graph.add_pairwise(i, 2, w_tv);
                }
            }
        }
    }
    graph.max_flow();
    BinaryMask::from_fn(width, height, |x, y| graph.is_source_side(y * width + x))
}

/// Solves the `z`-subproblem optimality system
/// `(mu1 I + mu2 1 1^T) z = mu1 (u + nu1) + mu2 (s + nu2) 1`
/// by conjugate gradient, returning the solution and the CG summary (on
/// non-convergence the best iterate is kept and its residual reported).
pub fn admm_z_update(state: &AdmmState, cfg: &AdmmConfig) -> (ScalarField, CgSummary) {
    assert!(state.s > 0.0, "surrogate area must be positive");
    let (width, height) = state.z.dims();
    let u = state.u.to_field();
    let rhs_const = cfg.mu2 * (state.s + state.nu2);
    let b: Vec<f64> = u
        .as_slice()
        .iter()
        .zip(state.nu1.as_slice())
        .map(|(&uv, &nv)| cfg.mu1 * (uv + nv) + rhs_const)
        .collect();
    let (mu1, mu2) = (cfg.mu1, cfg.mu2);
    let apply = move |v: &[f64], out: &mut [f64]| {
        let total: f64 = v.iter().sum();
        for (o, &vi) in out.iter_mut().zip(v) {
            *o = mu1 * vi + mu2 * total;
        }
    };
    let (z, summary) = conjugate_gradient(
        apply,
        &b,
        state.z.as_slice(),
        cfg.inner_cg_tol,
        cfg.inner_cg_max,
    );
    (ScalarField::from_vec(width, height, z), summary)
}

/// Minimizes `a / s + (mu2 / 2) (s - b + nu2)^2` over `s > 0` with
/// `a = |u|_TV |z|_TV` and `b = <z, 1>`: the unique positive root of
/// `mu2 s^3 - mu2 (b - nu2) s^2 - a`. For `a = 0` returns
/// `max(b - nu2, 1)`.
pub fn admm_s_update(state: &AdmmState, cfg: &AdmmConfig) -> f64 {
    let a = discrete_tv(&state.u.to_field(), TvScheme::Anisotropic)
        * discrete_tv(&state.z, TvScheme::Anisotropic);
    debug_assert!(a >= 0.0);
    let c = state.z.sum() - state.nu2;
    if a == 0.0 {
        return c.max(S_MIN);
    }
    cubic_positive_root(cfg.mu2, c, a)
}

/// Unique positive root of `g(s) = mu2 s^3 - mu2 c s^2 - a` for `a > 0`.
///
/// `g` is negative at `s = 0`, convex and increasing past `max(2c/3, 0)`,
/// so safeguarded Newton from an upper bound converges monotonically.
fn cubic_positive_root(mu2: f64, c: f64, a: f64) -> f64 {
    debug_assert!(mu2 > 0.0 && a > 0.0);
    let g = |s: f64| mu2 * s * s * (s - c) - a;
    let dg = |s: f64| mu2 * s * (3.0 * s - 2.0 * c);
    let lo = (2.0 * c / 3.0).max(0.0);
    // g(hi) >= 0 by construction.
    let mut s = c.max(0.0) + (a / mu2).cbrt();
    for _ in 0..200 {
        let gs = g(s);
        if gs == 0.0 {
            break;
        }
        let step = gs / dg(s);
        let next = s - step;
        let next = if next > lo { next } else { (s + lo) / 2.0 };
        if (next - s).abs() <= 1e-16 * s.abs() {
            s = next;
            break;
        }
        s = next;
    }
    s
}

fn tv_energy(u: &BinaryMask, f: &ScalarField, lambda: f64) -> f64 {
    let uf = u.to_field();
    let fu = inner_product(f, &uf).expect("dimensions match");
    let area = u.area() as f64;
    if area == 0.0 {
        return 4.0 * std::f64::consts::PI;
    }
    let tv = discrete_tv(&uf, TvScheme::Anisotropic);
    lambda * fu + tv * tv / area
}

fn augmented_lagrangian(state: &AdmmState, f: &ScalarField, cfg: &AdmmConfig) -> f64 {
    let uf = state.u.to_field();
    let fu = inner_product(f, &uf).expect("dimensions match");
    let tv_u = discrete_tv(&uf, TvScheme::Anisotropic);
    let tv_z = discrete_tv(&state.z, TvScheme::Anisotropic);
    let coupling: f64 = uf
        .as_slice()
        .iter()
        .zip(state.z.as_slice())
        .zip(state.nu1.as_slice())
        .map(|((&uv, &zv), &nv)| {
            let d = uv - zv + nv;
            d * d
        })
        .sum();
    let gap = state.s - state.z.sum() + state.nu2;
    cfg.lambda * fu
        + tv_u * tv_z / state.s
        + cfg.mu1 / 2.0 * coupling
        + cfg.mu2 / 2.0 * gap * gap
}

/// Runs the full ADMM loop: `u`, `z`, `s` sweeps followed by the multiplier
/// step, until both primal residuals drop below `cfg.primal_tol` or the
/// iteration cap is reached.
pub fn run_admm(f: &ScalarField, cfg: &AdmmConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut state = AdmmState::init(f);

    let mut trace = vec![TraceEntry {
        iter: 0,
        energy: tv_energy(&state.u, f, cfg.lambda),
        lagrangian: augmented_lagrangian(&state, f, cfg),
        dual: state.s,
    }];

    let mut stop_reason = StopReason::MaxIters;
    let mut iters_used = 0;
    for k in 0..cfg.max_iters {
        state.u = admm_u_update(&state, f, cfg);
        let (z, _cg) = admm_z_update(&state, cfg);
        state.z = z;
        state.s = admm_s_update(&state, cfg);
        state.update_multipliers();

        trace.push(TraceEntry {
            iter: k + 1,
            energy: tv_energy(&state.u, f, cfg.lambda),
            lagrangian: augmented_lagrangian(&state, f, cfg),
            dual: state.s,
        });
        iters_used = k + 1;

        let (r1, r2) = state.primal_residuals();
        if r1 < cfg.primal_tol && r2 < cfg.primal_tol {
            stop_reason = StopReason::Tolerance;
            break;
        }
    }

    let soft = state.z.map(|v| v.clamp(0.0, 1.0));
    Ok(SolveReport {
        mask: state.u.clone(),
        soft_u: LabelField::new(soft).expect("clamped to [0, 1]"),
        p_final: state.s,
        iters_used,
        trace,
        wall_time: start.elapsed(),
        stop_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::two_phase_force;
    use crate::synth::disk_mask;

    fn pseudo(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    fn random_state(w: usize, h: usize, next: &mut impl FnMut() -> f64) -> AdmmState {
        let z = ScalarField::from_fn(w, h, |_, _| next() * 1.4 - 0.2);
        let nu1 = ScalarField::from_fn(w, h, |_, _| next() - 0.5);
        AdmmState {
            u: BinaryMask::from_fn(w, h, |_, _| next() > 0.5),
            z,
            s: 1.0 + 20.0 * next(),
            nu1,
            nu2: next() - 0.5,
        }
    }

    /// Evaluates the exact u-subproblem objective for a candidate labeling.
    fn u_objective(
        bits: &dyn Fn(usize) -> bool,
        state: &AdmmState,
        f: &ScalarField,
        cfg: &AdmmConfig,
    ) -> f64 {
        let (w, h) = f.dims();
        let u = BinaryMask::from_fn(w, h, |x, y| bits(y * w + x));
        let uf = u.to_field();
        let w_tv = discrete_tv(&state.z, TvScheme::Anisotropic) / state.s;
        let fid = cfg.lambda * inner_product(f, &uf).unwrap();
        let tv = w_tv * discrete_tv(&uf, TvScheme::Anisotropic);
        let coupling: f64 = uf
            .as_slice()
            .iter()
            .zip(state.z.as_slice())
            .zip(state.nu1.as_slice())
            .map(|((&uv, &zv), &nv)| {
                let d = uv - zv + nv;
                d * d
            })
            .sum();
        fid + tv + cfg.mu1 / 2.0 * coupling
    }

    #[test]
    fn u_update_matches_enumeration_on_small_grids() {
        let cfg = AdmmConfig::default();
        let mut next = pseudo(42);
        for case in 0..60 {
            let (w, h) = match case % 3 {
                0 => (3, 3),
                1 => (2, 5),
                _ => (4, 3),
            };
            let n = w * h;
            let state = random_state(w, h, &mut next);
            let f = ScalarField::from_fn(w, h, |_, _| next() * 2.0 - 1.0);

            let got = admm_u_update(&state, &f, &cfg);
            let got_energy = u_objective(&|i| got.get(i % w, i / w), &state, &f, &cfg);

            let mut best = f64::INFINITY;
            for code in 0u32..(1 << n) {
                let e = u_objective(&|i| code >> i & 1 == 1, &state, &f, &cfg);
                best = best.min(e);
            }
            assert!(
                (got_energy - best).abs() < 1e-9,
                "case {case}: graph-cut {got_energy} vs enumeration {best}"
            );
        }
    }

    #[test]
    fn u_update_without_pairwise_weight_is_pixelwise() {
        let cfg = AdmmConfig::default();
        let mut next = pseudo(7);
        let mut state = random_state(6, 5, &mut next);
        state.z = ScalarField::filled(6, 5, 0.4); // constant z: |z|_TV from borders only
        state.z = state.z.map(|_| 0.0); // make it exactly zero so w_tv = 0
        let f = ScalarField::from_fn(6, 5, |_, _| next() * 2.0 - 1.0);
        let got = admm_u_update(&state, &f, &cfg);
        for y in 0..5 {
            for x in 0..6 {
                let zn = state.z.get(x, y) - state.nu1.get(x, y);
                let d = cfg.lambda * f.get(x, y) + cfg.mu1 / 2.0 * (1.0 - 2.0 * zn);
                assert_eq!(got.get(x, y), d < 0.0, "pixel ({x},{y})");
            }
        }
    }

    #[test]
    fn u_update_all_ones_under_strong_negative_force() {
        let cfg = AdmmConfig::default();
        let mut next = pseudo(11);
        let state = random_state(5, 4, &mut next);
        let f = ScalarField::filled(5, 4, -100.0);
        assert_eq!(admm_u_update(&state, &f, &cfg).area(), 20);
    }

    #[test]
    fn z_update_matches_dense_solve() {
        let cfg = AdmmConfig {
            mu1: 0.8,
            mu2: 1.7,
            ..AdmmConfig::default()
        };
        let mut next = pseudo(3);
        let state = random_state(4, 4, &mut next);
        let (z, summary) = admm_z_update(&state, &cfg);
        assert!(summary.converged);

        // Dense Gaussian elimination on the 16x16 system as the oracle.
        let n = 16;
        let mut a = vec![vec![0.0f64; n + 1]; n];
        let u = state.u.to_field();
        for i in 0..n {
            for j in 0..n {
                a[i][j] = cfg.mu2 + if i == j { cfg.mu1 } else { 0.0 };
            }
            a[i][n] = cfg.mu1 * (u.as_slice()[i] + state.nu1.as_slice()[i])
                + cfg.mu2 * (state.s + state.nu2);
        }
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
                .unwrap();
            a.swap(col, pivot);
            for row in 0..n {
                if row != col {
                    let factor = a[row][col] / a[col][col];
                    for k in col..=n {
                        a[row][k] -= factor * a[col][k];
                    }
                }
            }
        }
        for i in 0..n {
            let expect = a[i][n] / a[i][i];
            assert!(
                (z.as_slice()[i] - expect).abs() < 1e-8,
                "z[{i}] = {} vs {expect}",
                z.as_slice()[i]
            );
        }
    }

    #[test]
    fn z_update_is_stationary_at_consistent_state() {
        let cfg = AdmmConfig::default();
        let u = disk_mask(8, 8, 3.5, 3.5, 2.5);
        let z = u.to_field();
        let s = z.sum();
        let state = AdmmState {
            u,
            z: z.clone(),
            s,
            nu1: ScalarField::zeros(8, 8),
            nu2: 0.0,
        };
        let (z_next, summary) = admm_z_update(&state, &cfg);
        assert!(summary.converged);
        for (a, b) in z_next.as_slice().iter().zip(z.as_slice()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn s_update_closed_forms() {
        let cfg = AdmmConfig::default();
        // a = 0: the root degenerates to the constraint target.
        let state = AdmmState {
            u: BinaryMask::zeros(4, 4),
            z: ScalarField::filled(4, 4, 100.0 / 16.0),
            s: 1.0,
            nu1: ScalarField::zeros(4, 4),
            nu2: 0.0,
        };
        assert_eq!(admm_s_update(&state, &cfg), 100.0);
        // mu2 = 1, c = 0, a = 1: the root of s^3 = 1.
        assert!((cubic_positive_root(1.0, 0.0, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_root_residual_is_tiny() {
        let mut next = pseudo(99);
        for _ in 0..1000 {
            let mu2 = 0.05 + 5.0 * next();
            let c = 10.0 * next();
            let a = 0.01 + 10.0 * next();
            let s = cubic_positive_root(mu2, c, a);
            assert!(s > 0.0);
            let residual = mu2 * s * s * s - mu2 * c * s * s - a;
            assert!(residual.abs() < 1e-9, "residual {residual}");
            // Stationarity of the original objective.
            let grad = -a / (s * s) + mu2 * (s - c);
            assert!(grad.abs() < 1e-8, "gradient {grad}");
        }
    }

    #[test]
    fn multiplier_step_accumulates_residuals() {
        let mut next = pseudo(5);
        let mut state = random_state(5, 5, &mut next);
        let before_nu1 = state.nu1.clone();
        let before_nu2 = state.nu2;
        let (r1_field, r2): (Vec<f64>, f64) = {
            let uf = state.u.to_field();
            (
                uf.as_slice()
                    .iter()
                    .zip(state.z.as_slice())
                    .map(|(&a, &b)| a - b)
                    .collect(),
                state.s - state.z.sum(),
            )
        };
        state.update_multipliers();
        for i in 0..25 {
            let delta = state.nu1.as_slice()[i] - before_nu1.as_slice()[i];
            assert!((delta - r1_field[i]).abs() < 1e-15);
        }
        assert!((state.nu2 - before_nu2 - r2).abs() < 1e-12);
    }

    #[test]
    fn penalty_dominance_forces_consensus() {
        let image = disk_mask(24, 24, 11.5, 11.5, 6.0).to_field();
        let f = two_phase_force(&image, 1.0, 0.0);
        let cfg = AdmmConfig {
            mu1: 1e4,
            mu2: 1e4,
            max_iters: 10,
            ..AdmmConfig::default()
        };
        let report = run_admm(&f, &cfg).unwrap();
        // With huge penalties z hugs u and s hugs <z, 1> within a few sweeps.
        let trace_last = report.trace.last().unwrap();
        assert!(trace_last.dual > 0.0);
        let mask_area = report.mask.area() as f64;
        assert!((report.p_final - mask_area).abs() / mask_area < 0.05);
    }

    #[test]
    fn admm_converges_on_small_disk() {
        let image = disk_mask(16, 16, 7.5, 7.5, 4.0).to_field();
        let f = two_phase_force(&image, 1.0, 0.0);
        let cfg = AdmmConfig {
            max_iters: 600,
            ..AdmmConfig::default()
        };
        let report = run_admm(&f, &cfg).unwrap();
        assert_eq!(report.stop_reason, StopReason::Tolerance);
        assert_eq!(report.trace.len(), report.iters_used + 1);
        // Converged run: primal residuals below the tolerance.
        let gt = disk_mask(16, 16, 7.5, 7.5, 4.0);
        let d = crate::metrics::dice(&report.mask, &gt).unwrap();
        assert!(d > 0.9, "dice {d}");
    }

    #[test]
    fn admm_segments_noisy_disk() {
        let clean = disk_mask(48, 48, 23.5, 23.5, 11.0);
        let image = crate::synth::add_gaussian_noise(&clean.to_field(), 0.12, 17);
        let f = two_phase_force(&image, 1.0, 0.0);
        let cfg = AdmmConfig {
            lambda: 0.5,
            max_iters: 80,
            ..AdmmConfig::default()
        };
        let report = run_admm(&f, &cfg).unwrap();
        let d = crate::metrics::dice(&report.mask, &clean).unwrap();
        assert!(d > 0.9, "dice {d}");
    }
}
