//! Gauss–Newton projection onto the zero set of a residual map.
//!
//! Each step solves `J Δ = −r` in the minimum-norm sense, so the iterate moves
//! to the nearby point of the zero set rather than wandering along it.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct ProjectionOptions {
    pub max_steps: usize,
    /// Central finite-difference step.
    pub fd_step: f64,
    /// Stop once `‖r‖` is at or below this.
    pub target: f64,
    /// Singular values below `rcond · σ_max` are dropped.
    pub rcond: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self { max_steps: 40, fd_step: 1e-6, target: 1e-13, rcond: 1e-9 }
    }
}

/// Drives `‖residual(x)‖` towards zero from `x0`. Returns the best point seen
/// and its residual norm.
pub fn project_to_zero_set(
    residual: impl Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    options: &ProjectionOptions,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = residual(&x);
    let mut norm = l2(&r);
    if n == 0 {
        return (x, norm);
    }
    for _ in 0..options.max_steps {
        if norm <= options.target {
            break;
        }
        let m = r.len();
        let mut jac = DMatrix::<f64>::zeros(m, n);
        let mut probe = x.clone();
        for j in 0..n {
            probe[j] = x[j] + options.fd_step;
            let plus = residual(&probe);
            probe[j] = x[j] - options.fd_step;
            let minus = residual(&probe);
            probe[j] = x[j];
            for i in 0..m {
                jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * options.fd_step);
            }
        }
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        if smax <= 0.0 {
            break;
        }
        let eps = options.rcond * smax;
        let Ok(delta) = svd.solve(&(-DVector::from_vec(r.clone())), eps) else {
            break;
        };
        // Backtrack until the residual drops.
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let cand: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + t * d).collect();
            let rc = residual(&cand);
            let nc = l2(&rc);
            if nc < norm {
                x = cand;
                r = rc;
                norm = nc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, norm)
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}
