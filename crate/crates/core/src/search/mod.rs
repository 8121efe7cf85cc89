//! Direct search over postselected circuits for a target gate.
//!
//! For each photon-count outcome on the helper modes, the mode unitary is
//! optimized from seeded random starts to maximize
//! `success probability − penalty · deviation²`. The penalty is then raised
//! once, and the converged point is projected onto the set of exactly valid
//! circuits before it is scored.

mod polish;
mod simplex;

pub use polish::{project_to_zero_set, ProjectionOptions};
pub use simplex::{minimize, SimplexOptions, SimplexResult};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::success_bound;
use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, OccupationVector};
use crate::gates::{check_postselected_gate, GateEvaluator, GateSpec, PostselectedCircuit, DEFAULT_VALIDITY_TOL};
use crate::optics::ModeUnitary;
use crate::postselect::PostselectionPattern;

/// Slack allowed above a proven bound before a result is treated as a defect.
pub const BOUND_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub n_ancilla_modes: usize,
    /// Helper photons, one per helper mode starting from the first.
    pub n_ancilla_photons: usize,
    /// Random starts per helper outcome.
    pub restarts: usize,
    /// Objective evaluations per optimization stage.
    pub max_iterations: usize,
    pub validity_tolerance: f64,
    pub penalty_weight: f64,
    /// Factor applied to the penalty for the second stage.
    pub penalty_growth: f64,
    pub seed: u64,
    /// Restart 0 of every outcome starts from this circuit's unitary.
    pub warm_start: Option<PostselectedCircuit>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_ancilla_modes: 2,
            n_ancilla_photons: 1,
            restarts: 20,
            max_iterations: 20_000,
            validity_tolerance: DEFAULT_VALIDITY_TOL,
            penalty_weight: 1e3,
            penalty_growth: 10.0,
            seed: 20_030_307,
            warm_start: None,
        }
    }
}

impl SearchConfig {
    fn validate(&self, spec: &GateSpec) -> Result<()> {
        if self.n_ancilla_photons > self.n_ancilla_modes {
            return Err(Error::InvalidConfig(format!(
                "n_ancilla_photons ({}) exceeds n_ancilla_modes ({})",
                self.n_ancilla_photons, self.n_ancilla_modes
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        let negative = |x: f64| x.is_nan() || x < 0.0;
        if negative(self.validity_tolerance)
            || negative(self.penalty_weight)
            || negative(self.penalty_growth)
            || self.penalty_growth == 0.0
        {
            return Err(Error::InvalidConfig("tolerance and penalty parameters must be non-negative".into()));
        }
        if let Some(w) = &self.warm_start {
            if w.n_signal_modes() != spec.n_signal_modes() || w.n_ancilla_modes() != self.n_ancilla_modes {
                return Err(Error::InvalidConfig("warm_start: mode counts do not match the search".into()));
            }
        }
        Ok(())
    }

    pub fn n_modes(&self, spec: &GateSpec) -> usize {
        spec.n_signal_modes() + self.n_ancilla_modes
    }

    pub fn ancilla_preparation(&self) -> OccupationVector {
        OccupationVector::new((0..self.n_ancilla_modes).map(|i| usize::from(i < self.n_ancilla_photons)).collect())
    }

    /// Helper outcomes tried: every count vector on the helper modes with the
    /// same total as the helper photons.
    pub fn ancilla_outcomes(&self) -> Vec<OccupationVector> {
        enumerate_basis(self.n_ancilla_modes, self.n_ancilla_photons).states().to_vec()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub ancilla_outcome: OccupationVector,
    pub restart: usize,
    /// Penalized objective at the end of the second stage.
    pub objective: f64,
    pub success_probability: f64,
    pub deviation: f64,
    pub valid: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_circuit: PostselectedCircuit,
    pub best_success_probability: f64,
    pub best_deviation: f64,
    /// Whether `best_circuit` passed the validity check.
    pub valid: bool,
    /// Proven upper bound for the gate, when known.
    pub bound: Option<f64>,
    pub history: Vec<RestartRecord>,
}

/// Hermitian generator from `n²` reals: `n` diagonal entries, then the real and
/// imaginary parts of each upper-triangular entry in row-major order.
fn hermitian(params: &[f64], n: usize) -> Result<DMatrix<Complex64>> {
    if params.len() != n * n {
        return Err(Error::ParameterLength { expected: n * n, found: params.len() });
    }
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(params[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = Complex64::new(params[k], params[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    Ok(h)
}

fn exp_i_hermitian(h: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(h);
    let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, l));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&phases) * v.adjoint()
}

/// `exp(iH)` for the Hermitian `H` encoded by `params` (length `n²`).
pub fn parameterize_unitary(params: &[f64], n_modes: usize) -> Result<ModeUnitary> {
    Ok(ModeUnitary::from_matrix_unchecked(exp_i_hermitian(hermitian(params, n_modes)?)))
}

/// Objective for one helper outcome, optionally relative to a base unitary
/// (`U = exp(iH) · base`).
struct Problem<'a> {
    evaluator: GateEvaluator,
    base: Option<&'a DMatrix<Complex64>>,
    n: usize,
}

impl Problem<'_> {
    fn unitary(&self, x: &[f64]) -> DMatrix<Complex64> {
        let u = exp_i_hermitian(hermitian(x, self.n).expect("length fixed by construction"));
        match self.base {
            Some(b) => u * b,
            None => u,
        }
    }

    fn penalized(&self, x: &[f64], weight: f64) -> f64 {
        let (p, dev) = self.evaluator.score(&self.unitary(x));
        p - weight * dev * dev
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let m = self.evaluator.conditional_matrix(&self.unitary(x));
        let (_, r) = self.evaluator.fit(&m);
        r.iter().flat_map(|z| [z.re, z.im]).collect()
    }
}

/// Penalized objective, maximized over the helper outcomes: success
/// probability minus `penalty_weight · deviation²`. Higher is better.
pub fn objective(params: &[f64], spec: &GateSpec, config: &SearchConfig) -> Result<f64> {
    let n = config.n_modes(spec);
    let u = parameterize_unitary(params, n)?;
    let prep = config.ancilla_preparation();
    let mut best = f64::NEG_INFINITY;
    for outcome in config.ancilla_outcomes() {
        let (p, dev) = GateEvaluator::new(spec, &prep, &outcome)?.score(u.matrix());
        best = best.max(p - config.penalty_weight * dev * dev);
    }
    Ok(best)
}

struct TaskOutcome {
    record: RestartRecord,
    unitary: DMatrix<Complex64>,
}

fn run_task(
    spec: &GateSpec,
    config: &SearchConfig,
    outcome: &OccupationVector,
    restart: usize,
    stream: u64,
) -> Result<TaskOutcome> {
    let n = config.n_modes(spec);
    let prep = config.ancilla_preparation();
    let base = config.warm_start.as_ref().map(|w| w.unitary().matrix());
    let problem = Problem { evaluator: GateEvaluator::new(spec, &prep, outcome)?, base, n };
    let x0: Vec<f64> = if base.is_some() && restart == 0 {
        vec![0.0; n * n]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(stream);
        (0..n * n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
    };
    let options = SimplexOptions { max_evaluations: config.max_iterations, ..SimplexOptions::default() };
    let mut weight = config.penalty_weight;
    let stage1 = minimize(|x| -problem.penalized(x, weight), &x0, &options);
    weight *= config.penalty_growth;
    let stage2 = minimize(|x| -problem.penalized(x, weight), &stage1.x, &options);
    let objective = -stage2.f;
    let (x, _) = project_to_zero_set(|x| problem.residual(x), &stage2.x, &ProjectionOptions::default());
    let unitary = problem.unitary(&x);
    let (p, dev) = problem.evaluator.score(&unitary);
    Ok(TaskOutcome {
        record: RestartRecord {
            ancilla_outcome: outcome.clone(),
            restart,
            objective,
            success_probability: p,
            deviation: dev,
            valid: dev <= config.validity_tolerance,
        },
        unitary,
    })
}

/// Runs `restarts` seeded local searches per helper outcome and returns the
/// best valid circuit (ties go to the earliest outcome and restart). With no
/// valid circuit, the least-deviating one is returned with `valid = false`.
///
/// A valid result above the gate's proven bound is an error: it can only come
/// from a simulator defect.
pub fn optimize_gate(spec: &GateSpec, config: &SearchConfig) -> Result<SearchResult> {
    config.validate(spec)?;
    let n = config.n_modes(spec);
    let prep = config.ancilla_preparation();
    let outcomes = config.ancilla_outcomes();
    let tasks: Vec<(usize, usize)> =
        (0..outcomes.len()).flat_map(|o| (0..config.restarts).map(move |r| (o, r))).collect();
    let results = tasks
        .par_iter()
        .enumerate()
        .map(|(i, &(o, r))| run_task(spec, config, &outcomes[o], r, i as u64))
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<usize> = None;
    for (i, t) in results.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => {
                let (cur, new) = (&results[b].record, &t.record);
                match (cur.valid, new.valid) {
                    (false, true) => true,
                    (true, false) => false,
                    (true, true) => new.success_probability > cur.success_probability,
                    (false, false) => new.deviation < cur.deviation,
                }
            }
        };
        if better {
            best = Some(i);
        }
    }
    let best = &results[best.expect("at least one task")];
    let pattern = PostselectionPattern::contiguous(spec.n_signal_modes(), best.record.ancilla_outcome.counts());
    let unitary = ModeUnitary::with_tolerance(best.unitary.clone(), 1e-9)?;
    let circuit = PostselectedCircuit::new(spec.n_signal_modes(), config.n_ancilla_modes, prep, unitary, pattern)?;
    debug_assert_eq!(circuit.n_modes(), n);

    // Score what will be reported from the circuit itself.
    let check = check_postselected_gate(&circuit, spec, config.validity_tolerance)?;
    let bound = success_bound(spec)?;
    if let (true, Some(b)) = (check.is_valid, bound) {
        if check.success_probability > b + BOUND_SLACK {
            return Err(Error::BoundViolation {
                gate: spec.name().to_string(),
                probability: check.success_probability,
                bound: b,
            });
        }
    }
    Ok(SearchResult {
        best_circuit: circuit,
        best_success_probability: check.success_probability,
        best_deviation: check.deviation,
        valid: check.is_valid,
        bound,
        history: results.into_iter().map(|t| t.record).collect(),
    })
}
