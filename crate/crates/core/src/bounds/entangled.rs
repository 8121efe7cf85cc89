//! Search for a beam-splitter layout that turns `|11⟩` into
//! `(|1100⟩ + |0011⟩)/√2` with a single CS.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::protocols::{ProtocolTrace, TraceBuilder};
use crate::error::{Error, Result};
use crate::fock::{
    enumerate_basis, fidelity_up_to_phase, single_photon_state, OccupationVector, SectorBasis, StateVector,
};
use crate::gates::{apply_ideal_gate, cs_spec, GateSpec};
use crate::optics::{beam_splitter, BeamSplitterParams, LiftedOperator};
use crate::postselect::{postselect, PostselectionPattern};

const SIGNAL_MODES: usize = 4;
const FIDELITY_TOL: f64 = 1e-8;

/// Layout space explored by [`build_entangled_cs_state_with`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EntangledSearchOptions {
    /// Beam-splitter angles to try.
    pub angles: Vec<f64>,
    /// Maximum number of beam splitters before the CS.
    pub max_before: usize,
    /// Maximum number of beam splitters after the CS.
    pub max_after: usize,
    /// Try layouts without helper modes.
    pub direct: bool,
    /// Also try layouts with one vacuum helper mode postselected on zero photons.
    pub auxiliary_mode: bool,
}

impl Default for EntangledSearchOptions {
    fn default() -> Self {
        Self {
            angles: (-3..=4).filter(|&k| k != 0).map(|k| k as f64 * PI / 8.0).collect(),
            max_before: 2,
            max_after: 2,
            direct: true,
            auxiliary_mode: true,
        }
    }
}

#[derive(Clone)]
struct Candidate {
    ops: Vec<usize>,
    state: StateVector,
}

struct Layout {
    before: Vec<usize>,
    cs_modes: [usize; 2],
    after: Vec<usize>,
}

fn target() -> StateVector {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    StateVector::from_terms(&[
        (OccupationVector::new(vec![1, 1, 0, 0]), r),
        (OccupationVector::new(vec![0, 0, 1, 1]), r),
    ])
    .expect("static target")
}

struct Tier {
    n_modes: usize,
    params: Vec<BeamSplitterParams>,
    lifts: Vec<LiftedOperator>,
    pattern: Option<PostselectionPattern>,
}

impl Tier {
    fn new(n_modes: usize, angles: &[f64], basis: &Arc<SectorBasis>) -> Result<Self> {
        let mut params = Vec::new();
        for a in 0..n_modes {
            for b in a + 1..n_modes {
                params.extend(angles.iter().map(|&t| BeamSplitterParams::new(a, b, t)));
            }
        }
        let lifts = params
            .iter()
            .map(|&p| LiftedOperator::new(&beam_splitter(p, n_modes)?, basis.clone()))
            .collect::<Result<Vec<_>>>()?;
        let pattern = (n_modes > SIGNAL_MODES)
            .then(|| PostselectionPattern::contiguous(SIGNAL_MODES, &vec![0; n_modes - SIGNAL_MODES]));
        Ok(Self { n_modes, params, lifts, pattern })
    }

    /// All states reachable with exactly `depth` beam splitters from `start`.
    fn expand(&self, start: &Candidate, depth: usize) -> Result<Vec<Candidate>> {
        let mut level = vec![start.clone()];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(level.len() * self.lifts.len());
            for cand in &level {
                for (i, lift) in self.lifts.iter().enumerate() {
                    let mut ops = cand.ops.clone();
                    ops.push(i);
                    next.push(Candidate { ops, state: lift.apply(&cand.state)? });
                }
            }
            level = next;
        }
        Ok(level)
    }

    fn signal_state(&self, state: &StateVector) -> Result<Option<(StateVector, f64)>> {
        match &self.pattern {
            None => Ok(Some((state.clone(), 1.0))),
            Some(p) => {
                let out = postselect(state, p)?;
                Ok(out.conditional_state.map(|s| (s, out.probability)))
            }
        }
    }

    fn search(
        &self,
        options: &EntangledSearchOptions,
        spec: &GateSpec,
        target: &StateVector,
    ) -> Result<Option<Layout>> {
        let start = Candidate { ops: Vec::new(), state: single_photon_state(self.n_modes, &[0, 1])? };
        let mut pairs = Vec::new();
        for a in 0..self.n_modes {
            for b in a + 1..self.n_modes {
                pairs.push([a, b]);
            }
        }
        for total in 0..=options.max_before + options.max_after {
            for n_before in (0..=total.min(options.max_before)).rev() {
                let n_after = total - n_before;
                if n_after > options.max_after {
                    continue;
                }
                for before in self.expand(&start, n_before)? {
                    for &cs_modes in &pairs {
                        // Components with two photons on a CS mode are outside its domain.
                        let Ok(gated) = apply_ideal_gate(&before.state, spec, &cs_modes) else {
                            continue;
                        };
                        let seed = Candidate { ops: Vec::new(), state: gated };
                        for after in self.expand(&seed, n_after)? {
                            let Some((signal, _)) = self.signal_state(&after.state)? else {
                                continue;
                            };
                            if fidelity_up_to_phase(&signal, target)? >= 1.0 - FIDELITY_TOL {
                                return Ok(Some(Layout { before: before.ops, cs_modes, after: after.ops }));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    fn replay(&self, layout: &Layout, spec: &GateSpec) -> Result<ProtocolTrace> {
        let mut trace = TraceBuilder::new(
            format!("prepare |11> on modes (0,1) of {}", self.n_modes),
            single_photon_state(self.n_modes, &[0, 1])?,
        );
        let label =
            |p: &BeamSplitterParams| format!("beam splitter ({},{}) theta={:.6}*pi", p.mode_a, p.mode_b, p.theta / PI);
        for &i in &layout.before {
            trace.beam_splitter(label(&self.params[i]), self.params[i])?;
        }
        let [a, b] = layout.cs_modes;
        trace.gate(
            format!("CS on modes ({a},{b})"),
            &super::GateImplementation::Ideal,
            spec,
            &layout.cs_modes,
            crate::gates::OutsideBasis::Reject,
        )?;
        for &i in &layout.after {
            trace.beam_splitter(label(&self.params[i]), self.params[i])?;
        }
        if let Some(p) = &self.pattern {
            let out = postselect(trace.state(), p)?;
            let state =
                out.conditional_state.ok_or_else(|| Error::ConstructionNotFound("replay lost the outcome".into()))?;
            trace.scale_probability(out.probability);
            trace.push("postselect helper mode on 0 photons", state);
        }
        Ok(trace.finish())
    }
}

/// [`build_entangled_cs_state_with`] with default options.
pub fn build_entangled_cs_state() -> Result<ProtocolTrace> {
    build_entangled_cs_state_with(&EntangledSearchOptions::default())
}

/// Enumerates layouts `beam splitters → CS → beam splitters` (optionally with
/// a helper mode postselected on vacuum), shortest first, and replays the first
/// one producing `(|1100⟩ + |0011⟩)/√2` within fidelity `1 − 1e-8`.
pub fn build_entangled_cs_state_with(options: &EntangledSearchOptions) -> Result<ProtocolTrace> {
    let spec = cs_spec();
    let target = target();
    let mut tiers = Vec::new();
    if options.direct {
        tiers.push(SIGNAL_MODES);
    }
    if options.auxiliary_mode {
        tiers.push(SIGNAL_MODES + 1);
    }
    for n_modes in tiers {
        let tier = Tier::new(n_modes, &options.angles, &enumerate_basis(n_modes, 2))?;
        if let Some(layout) = tier.search(options, &spec, &target)? {
            let trace = tier.replay(&layout, &spec)?;
            let fidelity = fidelity_up_to_phase(&trace.final_state, &target)?;
            if fidelity < 1.0 - FIDELITY_TOL {
                return Err(Error::ConstructionNotFound(format!("replayed layout reached fidelity {fidelity}")));
            }
            return Ok(trace);
        }
    }
    Err(Error::ConstructionNotFound(format!(
        "no layout with at most {} + {} beam splitters over {} angles",
        options.max_before,
        options.max_after,
        options.angles.len()
    )))
}
