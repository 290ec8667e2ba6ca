//! Matrix-free conjugate gradient for symmetric positive-definite systems.

/// Outcome of a CG solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgSummary {
    pub iterations: usize,
    /// Euclidean norm of the final residual `b - A x`.
    pub residual: f64,
    /// Whether the relative tolerance was reached within the iteration cap.
    pub converged: bool,
}

/// Solves `A x = b` with `A` given as `apply(x, out)`. Stops when
/// `||r|| <= tol * ||b||` or after `max_iters` iterations, returning the
/// iterate with the smallest residual seen.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x0: &[f64],
    tol: f64,
    max_iters: usize,
) -> (Vec<f64>, CgSummary) {
    let n = b.len();
    assert_eq!(x0.len(), n);
    let norm_b = b.iter().map(|&v| v * v).sum::<f64>().sqrt();
    let target = tol * norm_b;

    let mut x = x0.to_vec();
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(&bv, &av)| bv - av).collect();
    let mut rr: f64 = r.iter().map(|&v| v * v).sum();

    let mut best_x = x.clone();
    let mut best_res = rr.sqrt();
    if best_res <= target {
        return (
            best_x,
            CgSummary {
                iterations: 0,
                residual: best_res,
                converged: true,
            },
        );
    }

    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut iterations = 0;
    for _ in 0..max_iters {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(&pv, &av)| pv * av).sum();
        if pap <= 0.0 {
            // Not positive definite along this direction; keep best iterate.
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        iterations += 1;
        let rr_next: f64 = r.iter().map(|&v| v * v).sum();
        let res = rr_next.sqrt();
        if res < best_res {
            best_res = res;
            best_x.copy_from_slice(&x);
        }
        if res <= target {
            return (
                best_x,
                CgSummary {
                    iterations,
                    residual: res,
                    converged: true,
                },
            );
        }
        let beta = rr_next / rr;
        rr = rr_next;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }

    (
        best_x,
        CgSummary {
            iterations,
            residual: best_res,
            converged: false,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_diagonal_system() {
        let diag = [2.0, 5.0, 0.5, 7.0];
        let b = [2.0, 10.0, 2.0, -7.0];
        let (x, summary) = conjugate_gradient(
            |v, out| {
                for i in 0..4 {
                    out[i] = diag[i] * v[i];
                }
            },
            &b,
            &[0.0; 4],
            1e-12,
            100,
        );
        assert!(summary.converged);
        for (xi, expect) in x.iter().zip([1.0, 2.0, 4.0, -1.0]) {
            assert!((xi - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_plus_rank_one_converges_in_two_steps() {
        // A = I + 3 * ones * ones^T has two distinct eigenvalues, so CG
        // finishes in at most two iterations.
        let n = 50;
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let (x, summary) = conjugate_gradient(
            |v, out| {
                let s: f64 = v.iter().sum();
                for i in 0..v.len() {
                    out[i] = v[i] + 3.0 * s;
                }
            },
            &b,
            &vec![0.0; n],
            1e-12,
            100,
        );
        assert!(summary.converged);
        assert!(summary.iterations <= 2, "{} iterations", summary.iterations);
        // Verify the solution directly.
        let s: f64 = x.iter().sum();
        for i in 0..n {
            assert!((x[i] + 3.0 * s - b[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn residual_norm_is_monotone_in_best_iterate() {
        // Laplacian-like tridiagonal SPD system.
        let n = 30;
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let left = if i > 0 { v[i - 1] } else { 0.0 };
                let right = if i + 1 < n { v[i + 1] } else { 0.0 };
                out[i] = 2.5 * v[i] - left - right;
            }
        };
        let b: Vec<f64> = (0..n).map(|i| ((i * 13 % 7) as f64) - 3.0).collect();
        let mut last = f64::INFINITY;
        for iters in 1..=12 {
            let (_, summary) = conjugate_gradient(&apply, &b, &vec![0.0; n], 0.0, iters);
            assert!(summary.residual <= last + 1e-12);
            last = summary.residual;
        }
    }
}
