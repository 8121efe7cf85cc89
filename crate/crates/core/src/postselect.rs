//! Ideal photon-number projections on subsets of modes.
//!
//! After conditioning, the unmeasured modes keep their relative order and are
//! re-indexed from 0.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, OccupationVector, StateVector};
use crate::optics::check_distinct;

/// Required photon counts on a list of modes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternRepr", into = "PatternRepr")]
pub struct PostselectionPattern {
    measured_modes: Vec<usize>,
    required_counts: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PatternRepr {
    measured_modes: Vec<usize>,
    required_counts: Vec<usize>,
}

impl TryFrom<PatternRepr> for PostselectionPattern {
    type Error = Error;

    fn try_from(r: PatternRepr) -> Result<Self> {
        Self::new(r.measured_modes, r.required_counts)
    }
}

impl From<PostselectionPattern> for PatternRepr {
    fn from(p: PostselectionPattern) -> Self {
        Self { measured_modes: p.measured_modes, required_counts: p.required_counts }
    }
}

impl PostselectionPattern {
    pub fn new(measured_modes: Vec<usize>, required_counts: Vec<usize>) -> Result<Self> {
        if measured_modes.len() != required_counts.len() {
            return Err(Error::InvalidPattern(format!(
                "{} measured modes but {} required counts",
                measured_modes.len(),
                required_counts.len()
            )));
        }
        let bound = measured_modes.iter().max().map_or(0, |m| m + 1);
        check_distinct(&measured_modes, bound).map_err(|e| Error::InvalidPattern(e.to_string()))?;
        Ok(Self { measured_modes, required_counts })
    }

    /// Measures nothing.
    pub fn empty() -> Self {
        Self { measured_modes: Vec::new(), required_counts: Vec::new() }
    }

    /// Requires `counts[i]` photons on mode `first_mode + i`.
    pub fn contiguous(first_mode: usize, counts: &[usize]) -> Self {
        Self { measured_modes: (first_mode..first_mode + counts.len()).collect(), required_counts: counts.to_vec() }
    }

    pub fn measured_modes(&self) -> &[usize] {
        &self.measured_modes
    }

    pub fn required_counts(&self) -> &[usize] {
        &self.required_counts
    }

    pub fn required_total(&self) -> usize {
        self.required_counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.measured_modes.is_empty()
    }

    /// Same requirement with every mode index shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            measured_modes: self.measured_modes.iter().map(|m| m + offset).collect(),
            required_counts: self.required_counts.clone(),
        }
    }

    /// Relabels mode `i` as `map[i]`.
    pub fn remapped(&self, map: &[usize]) -> Result<Self> {
        let modes = self
            .measured_modes
            .iter()
            .map(|&m| map.get(m).copied().ok_or(Error::ModeOutOfRange { mode: m, n_modes: map.len() }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(modes, self.required_counts.clone())
    }

    fn validate_for(&self, state: &StateVector) -> Result<()> {
        check_distinct(&self.measured_modes, state.n_modes())?;
        if self.required_total() > state.total_photons() {
            return Err(Error::ImpossiblePattern { required: self.required_total(), available: state.total_photons() });
        }
        Ok(())
    }

    fn matches(&self, occ: &OccupationVector) -> bool {
        self.measured_modes.iter().zip(&self.required_counts).all(|(&m, &n)| occ.get(m) == n)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PostselectionOutcome {
    pub probability: f64,
    /// Normalized state of the unmeasured modes; `None` when the outcome has zero probability.
    pub conditional_state: Option<StateVector>,
}

fn unmeasured_modes(n_modes: usize, pattern: &PostselectionPattern) -> Vec<usize> {
    (0..n_modes).filter(|m| !pattern.measured_modes.contains(m)).collect()
}

/// Projects onto the pattern and drops the measured modes, without
/// renormalizing. The squared norm of the result is the outcome probability.
pub fn project(state: &StateVector, pattern: &PostselectionPattern) -> Result<StateVector> {
    pattern.validate_for(state)?;
    let keep = unmeasured_modes(state.n_modes(), pattern);
    let basis = enumerate_basis(keep.len(), state.total_photons() - pattern.required_total());
    let mut amps = DVector::from_element(basis.size(), Complex64::new(0.0, 0.0));
    for (occ, amp) in state.basis().states().iter().zip(state.amplitudes().iter()) {
        if pattern.matches(occ) {
            let reduced = OccupationVector::new(keep.iter().map(|&m| occ.get(m)).collect());
            let i = basis.index_of(&reduced).expect("sector arithmetic");
            amps[i] = *amp;
        }
    }
    StateVector::new(basis, amps)
}

pub fn postselect(state: &StateVector, pattern: &PostselectionPattern) -> Result<PostselectionOutcome> {
    let projected = project(state, pattern)?;
    let probability = projected.norm().powi(2);
    Ok(PostselectionOutcome { probability, conditional_state: projected.normalized() })
}

/// Photon-count distribution of a single mode. Counts with zero probability are omitted.
pub fn marginal_count_distribution(state: &StateVector, mode: usize) -> Result<BTreeMap<usize, f64>> {
    Ok(joint_count_distribution(state, &[mode])?.into_iter().map(|(k, p)| (k[0], p)).collect())
}

/// Joint photon-count distribution of several modes, keyed by their counts in
/// the order given.
pub fn joint_count_distribution(state: &StateVector, modes: &[usize]) -> Result<BTreeMap<Vec<usize>, f64>> {
    check_distinct(modes, state.n_modes())?;
    let mut dist = BTreeMap::new();
    for (occ, amp) in state.basis().states().iter().zip(state.amplitudes().iter()) {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let key: Vec<usize> = modes.iter().map(|&m| occ.get(m)).collect();
        *dist.entry(key).or_insert(0.0) += amp.norm_sqr();
    }
    Ok(dist)
}
