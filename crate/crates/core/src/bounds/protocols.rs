use std::f64::consts::FRAC_PI_4;
use std::f64::consts::FRAC_PI_8;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{single_photon_state, StateVector};
use crate::gates::{
    apply_ideal_gate_with, check_postselected_gate, cs_spec, ns_spec, GateSpec, OutsideBasis, PostselectedCircuit,
    DEFAULT_VALIDITY_TOL,
};
use crate::optics::{apply_mode_unitary, beam_splitter, BeamSplitterParams};
use crate::postselect::project;

/// How a sign-shift gate is realized inside a protocol.
#[derive(Clone, Debug)]
pub enum GateImplementation {
    /// The exact target map, succeeding with probability one.
    Ideal,
    /// A postselected circuit, simulated with its helper modes and photon counts.
    Circuit(PostselectedCircuit),
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolStep {
    pub label: String,
    pub state: StateVector,
}

/// Snapshots of a protocol run. Every snapshot is normalized.
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolTrace {
    pub steps: Vec<ProtocolStep>,
    pub final_state: StateVector,
    /// Probability that every postselection in the run succeeded.
    pub claimed_success_probability: f64,
    /// Number of times the gate under study was applied.
    pub gate_applications: usize,
}

impl ProtocolTrace {
    pub fn step(&self, label_prefix: &str) -> Option<&StateVector> {
        self.steps.iter().find(|s| s.label.starts_with(label_prefix)).map(|s| &s.state)
    }
}

pub(crate) struct TraceBuilder {
    steps: Vec<ProtocolStep>,
    state: StateVector,
    probability: f64,
    gate_applications: usize,
}

impl TraceBuilder {
    pub(crate) fn new(label: impl Into<String>, state: StateVector) -> Self {
        let steps = vec![ProtocolStep { label: label.into(), state: state.clone() }];
        Self { steps, state, probability: 1.0, gate_applications: 0 }
    }

    pub(crate) fn state(&self) -> &StateVector {
        &self.state
    }

    pub(crate) fn beam_splitter(&mut self, label: impl Into<String>, params: BeamSplitterParams) -> Result<()> {
        let bs = beam_splitter(params, self.state.n_modes())?;
        let next = apply_mode_unitary(&self.state, &bs)?;
        self.push(label, next);
        Ok(())
    }

    pub(crate) fn gate(
        &mut self,
        label: impl Into<String>,
        gate: &GateImplementation,
        spec: &GateSpec,
        signal_modes: &[usize],
        outside: OutsideBasis,
    ) -> Result<()> {
        let (next, p) = apply_gate(&self.state, gate, spec, signal_modes, outside)?;
        self.probability *= p;
        self.gate_applications += 1;
        self.push(label, next);
        Ok(())
    }

    pub(crate) fn push(&mut self, label: impl Into<String>, state: StateVector) {
        self.steps.push(ProtocolStep { label: label.into(), state: state.clone() });
        self.state = state;
    }

    pub(crate) fn scale_probability(&mut self, p: f64) {
        self.probability *= p;
    }

    pub(crate) fn finish(self) -> ProtocolTrace {
        ProtocolTrace {
            final_state: self.state,
            steps: self.steps,
            claimed_success_probability: self.probability,
            gate_applications: self.gate_applications,
        }
    }
}

/// Applies the gate on `signal_modes`. For a circuit, helper modes are appended
/// after the existing modes, the circuit unitary acts on signal + helpers, and the
/// helpers are postselected away. Returns the normalized conditional state and
/// the postselection probability.
fn apply_gate(
    state: &StateVector,
    gate: &GateImplementation,
    spec: &GateSpec,
    signal_modes: &[usize],
    outside: OutsideBasis,
) -> Result<(StateVector, f64)> {
    match gate {
        GateImplementation::Ideal => Ok((apply_ideal_gate_with(state, spec, signal_modes, outside)?, 1.0)),
        GateImplementation::Circuit(circuit) => {
            let check = check_postselected_gate(circuit, spec, DEFAULT_VALIDITY_TOL)?;
            if !check.is_valid {
                return Err(Error::GateNotImplemented {
                    gate: spec.name().to_string(),
                    deviation: check.deviation,
                    tol: DEFAULT_VALIDITY_TOL,
                });
            }
            let n = state.n_modes();
            let extended = state.tensor_occupation(circuit.ancilla_preparation());
            let global: Vec<usize> = signal_modes.iter().copied().chain(n..n + circuit.n_ancilla_modes()).collect();
            let u = circuit.unitary().embed(extended.n_modes(), &global)?;
            let evolved = apply_mode_unitary(&extended, &u)?;
            let pattern = circuit.pattern().remapped(&global)?;
            let projected = project(&evolved, &pattern)?;
            let p = projected.norm().powi(2);
            let conditional = projected.normalized().ok_or_else(|| {
                Error::InvalidCircuit("postselection outcome has zero probability on this input".into())
            })?;
            Ok((conditional, p))
        }
    }
}

/// Two photons, one NS: `|11⟩ → π/8 beam splitter → NS on mode a → 50/50
/// recombination`, ending in `|20⟩`.
pub fn run_ns_two_photon_protocol(ns: &GateImplementation) -> Result<ProtocolTrace> {
    let spec = ns_spec();
    let mut trace = TraceBuilder::new("1: prepare |11>", single_photon_state(2, &[0, 1])?);
    trace.beam_splitter("2: beam splitter (a,b) theta=pi/8", BeamSplitterParams::new(0, 1, FRAC_PI_8))?;
    trace.gate("3: NS on mode a", ns, &spec, &[0], OutsideBasis::Reject)?;
    // Inverse of the π/4 splitter sends (a† + b†)/√2 to a†.
    trace.beam_splitter("4: beam splitter (a,b) theta=-pi/4", BeamSplitterParams::new(0, 1, -FRAC_PI_4))?;
    Ok(trace.finish())
}

/// Three modes, one CS, ending in `(|110⟩ + |101⟩ + |011⟩)/√3`.
///
/// Step 4 meets `|20⟩` on modes (b, c), outside CS's computational basis. The
/// ideal gate leaves that component untouched there; a circuit acts on it however
/// its optics dictate.
pub fn run_cs_three_mode_protocol(cs: &GateImplementation) -> Result<ProtocolTrace> {
    let spec = cs_spec();
    let mut trace = TraceBuilder::new("1: prepare |110>", single_photon_state(3, &[0, 1])?);
    let theta = (1.0 / 3f64.sqrt()).acos();
    trace.beam_splitter("2: beam splitter (b,c) cos(theta)=1/sqrt(3)", BeamSplitterParams::new(1, 2, theta))?;
    trace.beam_splitter("3: U1 = beam splitter (a,b) theta=-pi/8", BeamSplitterParams::new(0, 1, -FRAC_PI_8))?;
    trace.gate("4: CS on modes (b,c)", cs, &spec, &[1, 2], OutsideBasis::Identity)?;
    trace.beam_splitter("5: inverse U1 = beam splitter (a,b) theta=pi/8", BeamSplitterParams::new(0, 1, FRAC_PI_8))?;
    Ok(trace.finish())
}
