//! Sign-shift gate targets, postselected circuits and the proportionality check.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, OccupationVector, StateVector};
use crate::optics::{check_distinct, permanent_with, ModeUnitary};
use crate::postselect::PostselectionPattern;
use crate::serde_complex::{matrix_to_rows, to_pair, Pair};

/// Default tolerance on the deviation `‖M − λT‖` for a circuit to count as valid.
pub const DEFAULT_VALIDITY_TOL: f64 = 1e-8;

/// A target gate: a diagonal unit-modulus matrix over a list of signal occupations.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    name: String,
    n_signal_modes: usize,
    computational_basis: Vec<OccupationVector>,
    target_diagonal: Vec<Complex64>,
}

impl GateSpec {
    pub fn new(
        name: impl Into<String>,
        n_signal_modes: usize,
        computational_basis: Vec<OccupationVector>,
        target_diagonal: Vec<Complex64>,
    ) -> Result<Self> {
        if computational_basis.len() != target_diagonal.len() {
            return Err(Error::DimensionMismatch { expected: computational_basis.len(), found: target_diagonal.len() });
        }
        if let Some(b) = computational_basis.iter().find(|b| b.n_modes() != n_signal_modes) {
            return Err(Error::DimensionMismatch { expected: n_signal_modes, found: b.n_modes() });
        }
        if let Some(z) = target_diagonal.iter().find(|z| (z.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidConfig(format!("target entry {z} does not have unit modulus")));
        }
        Ok(Self { name: name.into(), n_signal_modes, computational_basis, target_diagonal })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_signal_modes(&self) -> usize {
        self.n_signal_modes
    }

    pub fn computational_basis(&self) -> &[OccupationVector] {
        &self.computational_basis
    }

    pub fn target_diagonal(&self) -> &[Complex64] {
        &self.target_diagonal
    }

    pub fn target_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.target_diagonal.clone()))
    }

    /// Target phase on `occupation`, if it belongs to the computational basis.
    pub fn phase_of(&self, occupation: &OccupationVector) -> Option<Complex64> {
        self.computational_basis.iter().position(|b| b == occupation).map(|i| self.target_diagonal[i])
    }
}

fn occ(v: &[usize]) -> OccupationVector {
    OccupationVector::new(v.to_vec())
}

/// Nonlinear sign shift: `α|0⟩ + β|1⟩ + γ|2⟩ → α|0⟩ + β|1⟩ − γ|2⟩`.
pub fn ns_spec() -> GateSpec {
    let one = Complex64::new(1.0, 0.0);
    GateSpec::new("NS", 1, vec![occ(&[0]), occ(&[1]), occ(&[2])], vec![one, one, -one]).expect("static spec")
}

/// Conditional sign shift: flips the sign of `|11⟩`, basis order `|00⟩, |10⟩, |01⟩, |11⟩`.
pub fn cs_spec() -> GateSpec {
    let one = Complex64::new(1.0, 0.0);
    GateSpec::new("CS", 2, vec![occ(&[0, 0]), occ(&[1, 0]), occ(&[0, 1]), occ(&[1, 1])], vec![one, one, one, -one])
        .expect("static spec")
}

/// Looks up a built-in gate by name (case-insensitive).
pub fn spec_by_name(name: &str) -> Result<GateSpec> {
    match name.to_ascii_lowercase().as_str() {
        "ns" => Ok(ns_spec()),
        "cs" => Ok(cs_spec()),
        other => Err(Error::InvalidConfig(format!("unknown gate `{other}` (expected ns or cs)"))),
    }
}

/// What an ideal gate does to signal occupations outside its computational basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutsideBasis {
    /// Refuse: the gate is only defined on its basis.
    Reject,
    /// Leave such components untouched.
    Identity,
}

/// Multiplies each amplitude by the target phase of its signal-mode occupation.
/// Errors if any component falls outside the computational basis.
pub fn apply_ideal_gate(state: &StateVector, spec: &GateSpec, signal_modes: &[usize]) -> Result<StateVector> {
    apply_ideal_gate_with(state, spec, signal_modes, OutsideBasis::Reject)
}

pub fn apply_ideal_gate_with(
    state: &StateVector,
    spec: &GateSpec,
    signal_modes: &[usize],
    outside: OutsideBasis,
) -> Result<StateVector> {
    if signal_modes.len() != spec.n_signal_modes {
        return Err(Error::DimensionMismatch { expected: spec.n_signal_modes, found: signal_modes.len() });
    }
    check_distinct(signal_modes, state.n_modes())?;
    let mut amps = state.amplitudes().clone();
    for (i, occupation) in state.basis().states().iter().enumerate() {
        if amps[i].norm_sqr() == 0.0 {
            continue;
        }
        let local = OccupationVector::new(signal_modes.iter().map(|&m| occupation.get(m)).collect());
        match (spec.phase_of(&local), outside) {
            (Some(phase), _) => amps[i] *= phase,
            (None, OutsideBasis::Identity) => {}
            (None, OutsideBasis::Reject) => return Err(Error::OutsideGateSupport(local.to_string())),
        }
    }
    Ok(state.with_amplitudes(amps))
}

/// Helper photons, a mode unitary on signal + ancilla modes, and a photon-count
/// pattern on the ancilla modes. Signal modes come first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRepr", into = "CircuitRepr")]
pub struct PostselectedCircuit {
    n_signal_modes: usize,
    n_ancilla_modes: usize,
    ancilla_preparation: OccupationVector,
    unitary: ModeUnitary,
    pattern: PostselectionPattern,
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    n_signal_modes: usize,
    n_ancilla_modes: usize,
    ancilla_preparation: Vec<usize>,
    unitary: ModeUnitary,
    pattern: PostselectionPattern,
}

impl TryFrom<CircuitRepr> for PostselectedCircuit {
    type Error = Error;

    fn try_from(r: CircuitRepr) -> Result<Self> {
        Self::new(
            r.n_signal_modes,
            r.n_ancilla_modes,
            OccupationVector::new(r.ancilla_preparation),
            r.unitary,
            r.pattern,
        )
    }
}

impl From<PostselectedCircuit> for CircuitRepr {
    fn from(c: PostselectedCircuit) -> Self {
        Self {
            n_signal_modes: c.n_signal_modes,
            n_ancilla_modes: c.n_ancilla_modes,
            ancilla_preparation: c.ancilla_preparation.counts().to_vec(),
            unitary: c.unitary,
            pattern: c.pattern,
        }
    }
}

impl PostselectedCircuit {
    pub fn new(
        n_signal_modes: usize,
        n_ancilla_modes: usize,
        ancilla_preparation: OccupationVector,
        unitary: ModeUnitary,
        pattern: PostselectionPattern,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidCircuit(msg));
        if ancilla_preparation.n_modes() != n_ancilla_modes {
            return invalid(format!(
                "ancilla_preparation: expected {n_ancilla_modes} entries, found {}",
                ancilla_preparation.n_modes()
            ));
        }
        if let Some(i) = ancilla_preparation.counts().iter().position(|&n| n > 1) {
            return invalid(format!("ancilla_preparation[{i}]: helper modes hold 0 or 1 photons"));
        }
        let n_modes = n_signal_modes + n_ancilla_modes;
        if unitary.n_modes() != n_modes {
            return invalid(format!("unitary: expected {n_modes} modes, found {}", unitary.n_modes()));
        }
        let measured: BTreeSet<usize> = pattern.measured_modes().iter().copied().collect();
        let ancillas: BTreeSet<usize> = (n_signal_modes..n_modes).collect();
        if measured != ancillas {
            return invalid(format!(
                "pattern: must measure exactly the ancilla modes {ancillas:?}, found {:?}",
                pattern.measured_modes()
            ));
        }
        Ok(Self { n_signal_modes, n_ancilla_modes, ancilla_preparation, unitary, pattern })
    }

    pub fn n_signal_modes(&self) -> usize {
        self.n_signal_modes
    }

    pub fn n_ancilla_modes(&self) -> usize {
        self.n_ancilla_modes
    }

    pub fn n_modes(&self) -> usize {
        self.n_signal_modes + self.n_ancilla_modes
    }

    pub fn ancilla_preparation(&self) -> &OccupationVector {
        &self.ancilla_preparation
    }

    pub fn unitary(&self) -> &ModeUnitary {
        &self.unitary
    }

    pub fn pattern(&self) -> &PostselectionPattern {
        &self.pattern
    }

    /// Required count per ancilla mode, in ancilla order.
    pub fn ancilla_outcome(&self) -> OccupationVector {
        let mut counts = vec![0; self.n_ancilla_modes];
        for (&m, &n) in self.pattern.measured_modes().iter().zip(self.pattern.required_counts()) {
            counts[m - self.n_signal_modes] = n;
        }
        OccupationVector::new(counts)
    }
}

#[derive(Clone, Debug)]
pub struct GateCheckResult {
    pub is_valid: bool,
    pub success_probability: f64,
    /// Least-squares scalar `λ` in `M ≈ λT`.
    pub scale: Complex64,
    /// `‖M − λT‖` (Frobenius).
    pub deviation: f64,
    /// Conditional amplitudes: column per computational input, row per signal output.
    pub conditional_matrix: DMatrix<Complex64>,
    pub input_basis: Vec<OccupationVector>,
    /// Every signal occupation reachable from some input, including those
    /// outside the computational basis.
    pub output_basis: Vec<OccupationVector>,
}

impl GateCheckResult {
    /// `‖M e_b‖²` for each input `b`.
    pub fn per_input_probabilities(&self) -> Vec<f64> {
        self.conditional_matrix.column_iter().map(|c| c.norm_squared()).collect()
    }
}

#[derive(Serialize)]
struct GateCheckRepr {
    is_valid: bool,
    success_probability: f64,
    scale: Pair,
    deviation: f64,
    input_basis: Vec<OccupationVector>,
    output_basis: Vec<OccupationVector>,
    conditional_matrix: Vec<Vec<Pair>>,
    per_input_probabilities: Vec<f64>,
}

impl Serialize for GateCheckResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GateCheckRepr {
            is_valid: self.is_valid,
            success_probability: self.success_probability,
            scale: to_pair(self.scale),
            deviation: self.deviation,
            input_basis: self.input_basis.clone(),
            output_basis: self.output_basis.clone(),
            conditional_matrix: matrix_to_rows(&self.conditional_matrix),
            per_input_probabilities: self.per_input_probabilities(),
        }
        .serialize(serializer)
    }
}

struct Entry {
    row: usize,
    col: usize,
    out_modes: Vec<usize>,
    in_modes: Vec<usize>,
    inv_norm: f64,
}

/// Precomputed bookkeeping for evaluating many unitaries against one gate,
/// ancilla preparation and outcome. Each conditional amplitude is a single
/// permanent, so no full sector is ever lifted.
pub struct GateEvaluator {
    entries: Vec<Entry>,
    input_basis: Vec<OccupationVector>,
    output_basis: Vec<OccupationVector>,
    target: DMatrix<Complex64>,
    target_norm_sqr: f64,
    n_modes: usize,
}

impl GateEvaluator {
    pub fn new(
        spec: &GateSpec,
        ancilla_preparation: &OccupationVector,
        ancilla_outcome: &OccupationVector,
    ) -> Result<Self> {
        if ancilla_preparation.n_modes() != ancilla_outcome.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: ancilla_preparation.n_modes(),
                found: ancilla_outcome.n_modes(),
            });
        }
        let n_signal = spec.n_signal_modes;
        let added = ancilla_preparation.total();
        let removed = ancilla_outcome.total();
        let mut totals = BTreeSet::new();
        for b in &spec.computational_basis {
            let available = b.total() + added;
            if removed > available {
                return Err(Error::ImpossiblePattern { required: removed, available });
            }
            totals.insert(available - removed);
        }
        let mut output_basis = Vec::new();
        for t in totals {
            output_basis.extend(enumerate_basis(n_signal, t).states().iter().cloned());
        }
        let input_basis = spec.computational_basis.clone();
        let mut target = DMatrix::zeros(output_basis.len(), input_basis.len());
        let mut entries = Vec::new();
        for (col, b) in input_basis.iter().enumerate() {
            let full_in = b.concat(ancilla_preparation);
            let out_total = b.total() + added - removed;
            for (row, s) in output_basis.iter().enumerate() {
                if s == b {
                    target[(row, col)] = spec.target_diagonal[col];
                }
                if s.total() != out_total {
                    continue;
                }
                let full_out = s.concat(ancilla_outcome);
                entries.push(Entry {
                    row,
                    col,
                    out_modes: full_out.mode_list(),
                    in_modes: full_in.mode_list(),
                    inv_norm: 1.0 / (full_in.factorial_product() * full_out.factorial_product()).sqrt(),
                });
            }
        }
        let target_norm_sqr = target.norm_squared();
        Ok(Self {
            entries,
            input_basis,
            output_basis,
            target,
            target_norm_sqr,
            n_modes: n_signal + ancilla_preparation.n_modes(),
        })
    }

    pub fn for_circuit(circuit: &PostselectedCircuit, spec: &GateSpec) -> Result<Self> {
        if circuit.n_signal_modes != spec.n_signal_modes {
            return Err(Error::InvalidCircuit(format!(
                "n_signal_modes: circuit has {}, {} needs {}",
                circuit.n_signal_modes, spec.name, spec.n_signal_modes
            )));
        }
        Self::new(spec, &circuit.ancilla_preparation, &circuit.ancilla_outcome())
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn output_len(&self) -> usize {
        self.output_basis.len()
    }

    pub fn input_len(&self) -> usize {
        self.input_basis.len()
    }

    /// Unnormalized conditional amplitudes `M` for the Schrödinger matrix `s`.
    pub fn conditional_matrix(&self, s: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        debug_assert_eq!(s.nrows(), self.n_modes);
        let mut m = DMatrix::zeros(self.output_basis.len(), self.input_basis.len());
        for e in &self.entries {
            let per = permanent_with(e.out_modes.len(), |i, j| s[(e.out_modes[i], e.in_modes[j])]);
            m[(e.row, e.col)] = per * e.inv_norm;
        }
        m
    }

    /// Least-squares `λ` and the residual `M − λT`.
    pub fn fit(&self, m: &DMatrix<Complex64>) -> (Complex64, DMatrix<Complex64>) {
        let overlap: Complex64 = self.target.iter().zip(m.iter()).map(|(t, x)| t.conj() * x).sum();
        let scale = overlap / self.target_norm_sqr;
        let residual = m - &self.target * scale;
        (scale, residual)
    }

    /// `(success probability |λ|², deviation ‖M − λT‖)`.
    pub fn score(&self, s: &DMatrix<Complex64>) -> (f64, f64) {
        let (scale, residual) = self.fit(&self.conditional_matrix(s));
        (scale.norm_sqr(), residual.norm())
    }

    pub fn check(&self, u: &ModeUnitary, tol: f64) -> Result<GateCheckResult> {
        if u.n_modes() != self.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, found: u.n_modes() });
        }
        let m = self.conditional_matrix(u.matrix());
        let (scale, residual) = self.fit(&m);
        let deviation = residual.norm();
        Ok(GateCheckResult {
            is_valid: deviation <= tol,
            success_probability: scale.norm_sqr(),
            scale,
            deviation,
            conditional_matrix: m,
            input_basis: self.input_basis.clone(),
            output_basis: self.output_basis.clone(),
        })
    }
}

/// Runs every computational input through the circuit, postselects, and fits
/// the conditional map to a multiple of the target.
pub fn check_postselected_gate(circuit: &PostselectedCircuit, spec: &GateSpec, tol: f64) -> Result<GateCheckResult> {
    GateEvaluator::for_circuit(circuit, spec)?.check(&circuit.unitary, tol)
}
