//! Nelder–Mead direct search with dimension-adaptive coefficients and restarts.

use std::cell::Cell;

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Edge length used when restarting around the incumbent.
    pub restart_step: f64,
    /// Converged when `max f − min f` over the simplex falls below this.
    pub f_tol: f64,
    /// Total function evaluations across all restarts.
    pub max_evaluations: usize,
    /// Stop restarting once a restart improves the incumbent by less than this.
    pub min_restart_gain: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { initial_step: 0.5, restart_step: 0.05, f_tol: 1e-10, max_evaluations: 20_000, min_restart_gain: 1e-12 }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub restarts: usize,
}

struct Coefficients {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coefficients {
    fn for_dimension(n: usize) -> Self {
        if n < 2 {
            return Self { reflect: 1.0, expand: 2.0, contract: 0.5, shrink: 0.5 };
        }
        let n = n as f64;
        Self { reflect: 1.0, expand: 1.0 + 2.0 / n, contract: 0.75 - 1.0 / (2.0 * n), shrink: 1.0 - 1.0 / n }
    }
}

/// Minimizes `f` from `x0`. Deterministic: no randomness inside.
pub fn minimize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], options: &SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let evaluations = Cell::new(0usize);
    let mut eval = |x: &[f64]| {
        evaluations.set(evaluations.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best_x = x0.to_vec();
    let mut best_f = eval(&best_x);
    if n == 0 {
        return SimplexResult { x: best_x, f: best_f, evaluations: evaluations.get(), restarts: 0 };
    }
    let coeff = Coefficients::for_dimension(n);
    let mut restarts = 0;
    let mut step = options.initial_step;
    loop {
        let before = best_f;
        let (x, fx) = run_once(&mut eval, &best_x, best_f, step, &coeff, options, &|| evaluations.get());
        if fx < best_f {
            best_x = x;
            best_f = fx;
        }
        if evaluations.get() >= options.max_evaluations || before - best_f < options.min_restart_gain && restarts > 0 {
            break;
        }
        restarts += 1;
        step = options.restart_step;
    }
    SimplexResult { x: best_x, f: best_f, evaluations: evaluations.get(), restarts }
}

fn run_once(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    f0: f64,
    step: f64,
    c: &Coefficients,
    options: &SimplexOptions,
    evaluations: &dyn Fn() -> usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    values.push(f0);
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        values.push(f(&p));
        points.push(p);
    }
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, second, worst) = (order[0], order[n - 1], order[n]);
        if values[worst] - values[best] <= options.f_tol || evaluations() >= options.max_evaluations {
            return (points[best].clone(), values[best]);
        }
        centroid.iter_mut().for_each(|x| *x = 0.0);
        for &i in &order[..n] {
            for (cx, px) in centroid.iter_mut().zip(&points[i]) {
                *cx += px / n as f64;
            }
        }
        let along = |t: f64, out: &mut Vec<f64>, worst_p: &[f64]| {
            for ((o, cx), wx) in out.iter_mut().zip(&centroid).zip(worst_p) {
                *o = cx + t * (cx - wx);
            }
        };
        along(c.reflect, &mut trial, &points[worst]);
        let fr = f(&trial);
        if fr < values[best] {
            let reflected = trial.clone();
            along(c.reflect * c.expand, &mut trial, &points[worst]);
            let fe = f(&trial);
            if fe < fr {
                points[worst].copy_from_slice(&trial);
                values[worst] = fe;
            } else {
                points[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            points[worst].copy_from_slice(&trial);
            values[worst] = fr;
            continue;
        }
        // Outside contraction when the reflection beat the worst point, inside otherwise.
        let (t, bar) = if fr < values[worst] { (c.reflect * c.contract, fr) } else { (-c.contract, values[worst]) };
        along(t, &mut trial, &points[worst]);
        let fc = f(&trial);
        if fc <= bar {
            points[worst].copy_from_slice(&trial);
            values[worst] = fc;
            continue;
        }
        let anchor = points[best].clone();
        for &i in &order[1..] {
            for (p, a) in points[i].iter_mut().zip(&anchor) {
                *p = a + c.shrink * (*p - a);
            }
            values[i] = f(&points[i]);
        }
    }
}
