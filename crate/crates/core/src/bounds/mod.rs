//! Executable versions of the bound-proving constructions.
//!
//! A gate that succeeds with probability `p` lets one prepare, from single
//! photons, a target state whose mode expectation `E` exceeds one. Since every
//! single-photon linear-optics state has at most one photon per mode on average
//! ([`verify_theorem1`] checks this numerically), `p·E ≤ 1` and so
//! `p ≤ 1/E` ([`bound_from_expectation`]).

mod entangled;
mod protocols;
mod theorem;

pub use entangled::{build_entangled_cs_state, build_entangled_cs_state_with, EntangledSearchOptions};
pub use protocols::{
    run_cs_three_mode_protocol, run_ns_two_photon_protocol, GateImplementation, ProtocolStep, ProtocolTrace,
};
pub use theorem::{
    expected_photon_number, sample_lop, sample_lop_state, verify_theorem1, ConfigurationSummary, Theorem1Report,
    DEFAULT_THEOREM1_CONFIGS, DEFAULT_THEOREM1_SEED, THEOREM1_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::fock::LogicalMode;
use crate::gates::GateSpec;

/// Upper bound on the probability of preparing a state whose target mode holds
/// `target_expectation` photons on average: `min(1, 1/E)`.
pub fn bound_from_expectation(target_expectation: f64) -> Result<f64> {
    if target_expectation.is_nan() || target_expectation <= 0.0 {
        return Err(Error::NonPositiveExpectation(target_expectation));
    }
    Ok((1.0 / target_expectation).min(1.0))
}

/// Mode expectation of the ideal two-photon protocol's output on its target
/// mode (mode 0).
pub fn ns_target_expectation() -> Result<f64> {
    let trace = run_ns_two_photon_protocol(&GateImplementation::Ideal)?;
    expected_photon_number(&trace.final_state, &LogicalMode::physical(trace.final_state.n_modes(), 0)?)
}

/// Expectation of the ideal three-mode protocol's output on the equal-weight
/// logical mode.
pub fn cs_target_expectation() -> Result<f64> {
    let trace = run_cs_three_mode_protocol(&GateImplementation::Ideal)?;
    expected_photon_number(&trace.final_state, &LogicalMode::uniform(3))
}

/// Proven success-probability bound for the built-in gates, recomputed from
/// the protocols. `None` for gates without a construction.
pub fn success_bound(spec: &GateSpec) -> Result<Option<f64>> {
    let expectation = match spec.name() {
        "NS" => ns_target_expectation()?,
        "CS" => cs_target_expectation()?,
        _ => return Ok(None),
    };
    bound_from_expectation(expectation).map(Some)
}

/// Highest success probabilities reported for constructions in the literature.
pub fn best_known_probability(spec: &GateSpec) -> Option<f64> {
    match spec.name() {
        "NS" => Some(0.25),
        "CS" => Some(2.0 / 27.0),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{cs_spec, ns_spec};

    #[test]
    fn bound_arithmetic() {
        assert_eq!(bound_from_expectation(2.0).unwrap(), 0.5);
        assert_eq!(bound_from_expectation(4.0 / 3.0).unwrap(), 0.75);
        assert_eq!(bound_from_expectation(1.0).unwrap(), 1.0);
        assert_eq!(bound_from_expectation(0.5).unwrap(), 1.0);
        assert!(matches!(bound_from_expectation(0.0), Err(Error::NonPositiveExpectation(_))));
        assert!(bound_from_expectation(-1.0).is_err());
        assert!(bound_from_expectation(f64::NAN).is_err());
    }

    #[test]
    fn gate_bounds_from_protocols() {
        let ns = success_bound(&ns_spec()).unwrap().unwrap();
        let cs = success_bound(&cs_spec()).unwrap().unwrap();
        assert!((ns - 0.5).abs() < 1e-12, "{ns}");
        assert!((cs - 0.75).abs() < 1e-12, "{cs}");
    }
}
