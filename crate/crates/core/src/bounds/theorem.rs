use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{single_photon_state, LogicalMode, StateVector};
use crate::optics::{apply_mode_unitary, haar_unitary, ModeUnitary};

/// Slack allowed above one photon per mode.
pub const THEOREM1_TOLERANCE: f64 = 1e-9;
/// Agreement required between the simulated expectation and the closed form.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_THEOREM1_SEED: u64 = 0x5eed_0001;
pub const DEFAULT_THEOREM1_CONFIGS: &[(usize, usize)] = &[(2, 1), (3, 2), (4, 2), (4, 4), (6, 3)];

/// `⟨ψ| b̂† b̂ |ψ⟩` for the logical annihilator `b̂ = Σⱼ c̄ⱼ âⱼ`, evaluated as
/// `‖b̂ψ‖²`.
pub fn expected_photon_number(state: &StateVector, mode: &LogicalMode) -> Result<f64> {
    state.require_normalized()?;
    Ok(state.annihilate(mode)?.norm().powi(2))
}

/// One photon in each of the first `k_photons` modes, then a Haar-random mode
/// unitary. Returns the unitary alongside the state.
pub fn sample_lop<R: rand::Rng + ?Sized>(
    n_modes: usize,
    k_photons: usize,
    rng: &mut R,
) -> Result<(ModeUnitary, StateVector)> {
    if k_photons > n_modes {
        return Err(Error::TooManyPhotons { photons: k_photons, modes: n_modes });
    }
    let occupied: Vec<usize> = (0..k_photons).collect();
    let input = single_photon_state(n_modes, &occupied)?;
    let u = haar_unitary(n_modes, rng);
    let state = apply_mode_unitary(&input, &u)?;
    Ok((u, state))
}

/// Deterministic in `seed`.
pub fn sample_lop_state(n_modes: usize, k_photons: usize, seed: u64) -> Result<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_lop(n_modes, k_photons, &mut rng).map(|(_, s)| s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationSummary {
    pub n_modes: usize,
    pub k_photons: usize,
    /// Base seed; trial `t` of configuration `c` draws from ChaCha8 stream `(c << 32) | t`.
    pub seed: u64,
    pub stream_base: u64,
    pub trials: usize,
    pub max_expectation: f64,
    /// Largest `|⟨n̂ₘ⟩ − Σ_{j<k} |û_{jm}|²|` seen.
    pub max_identity_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub trials: usize,
    pub max_observed_expectation: f64,
    pub max_identity_error: f64,
    pub tolerance: f64,
    pub identity_tolerance: f64,
    pub configurations: Vec<ConfigurationSummary>,
    pub passed: bool,
}

struct TrialOutcome {
    max_expectation: f64,
    max_identity_error: f64,
}

fn run_trial(n: usize, k: usize, seed: u64, stream: u64) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let (u, state) = sample_lop(n, k, &mut rng)?;
    let heis = u.heisenberg();
    let mut max_expectation = f64::NEG_INFINITY;
    let mut max_identity_error: f64 = 0.0;
    for m in 0..n {
        let e = expected_photon_number(&state, &LogicalMode::physical(n, m)?)?;
        let closed_form: f64 = (0..k).map(|j| heis[(j, m)].norm_sqr()).sum();
        max_expectation = max_expectation.max(e);
        max_identity_error = max_identity_error.max((e - closed_form).abs());
    }
    Ok(TrialOutcome { max_expectation, max_identity_error })
}

/// Samples `trials_per_config` random single-photon linear-optics states per
/// `(n_modes, k_photons)` configuration and checks every physical mode's
/// expectation against one and against `Σ_{j<k} |û_{jm}|²`.
///
/// Trials run in parallel; each owns a ChaCha8 stream derived from its
/// configuration and trial index, so the report does not depend on scheduling.
pub fn verify_theorem1(configs: &[(usize, usize)], trials_per_config: usize, seed: u64) -> Result<Theorem1Report> {
    if trials_per_config == 0 {
        return Err(Error::InvalidConfig("trials_per_config must be at least 1".into()));
    }
    let configurations = configs
        .iter()
        .enumerate()
        .map(|(c, &(n, k))| {
            let stream_base = (c as u64) << 32;
            let outcomes = (0..trials_per_config as u64)
                .into_par_iter()
                .map(|t| run_trial(n, k, seed, stream_base | t))
                .collect::<Result<Vec<_>>>()?;
            Ok(ConfigurationSummary {
                n_modes: n,
                k_photons: k,
                seed,
                stream_base,
                trials: trials_per_config,
                max_expectation: outcomes.iter().map(|o| o.max_expectation).fold(f64::NEG_INFINITY, f64::max),
                max_identity_error: outcomes.iter().map(|o| o.max_identity_error).fold(0.0, f64::max),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_observed_expectation = configurations.iter().map(|c| c.max_expectation).fold(f64::NEG_INFINITY, f64::max);
    let max_identity_error = configurations.iter().map(|c| c.max_identity_error).fold(0.0, f64::max);
    Ok(Theorem1Report {
        trials: trials_per_config * configs.len(),
        max_observed_expectation,
        max_identity_error,
        tolerance: THEOREM1_TOLERANCE,
        identity_tolerance: IDENTITY_TOLERANCE,
        passed: max_observed_expectation <= 1.0 + THEOREM1_TOLERANCE && max_identity_error <= IDENTITY_TOLERANCE,
        configurations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::OccupationVector;
    use num_complex::Complex64;

    #[test]
    fn number_state_expectation() {
        let s = StateVector::basis_state(&OccupationVector::new(vec![2]));
        assert!((expected_photon_number(&s, &LogicalMode::physical(1, 0).unwrap()).unwrap() - 2.0).abs() < 1e-14);
        let unnormalized = s.scaled(Complex64::new(2.0, 0.0));
        assert!(matches!(
            expected_photon_number(&unnormalized, &LogicalMode::physical(1, 0).unwrap()),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn single_photon_expectation_is_matrix_entry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (u, s) = sample_lop(3, 1, &mut rng).unwrap();
        for m in 0..3 {
            let e = expected_photon_number(&s, &LogicalMode::physical(3, m).unwrap()).unwrap();
            assert!((e - u.matrix()[(m, 0)].norm_sqr()).abs() < 1e-14);
            assert!(e <= 1.0);
        }
    }

    #[test]
    fn sampling_edge_cases() {
        let s = sample_lop_state(1, 1, 99).unwrap();
        assert!((s.amplitude(&OccupationVector::new(vec![1])).norm() - 1.0).abs() < 1e-14);
        assert!(matches!(sample_lop_state(2, 3, 0), Err(Error::TooManyPhotons { .. })));
        let a = sample_lop_state(4, 2, 17).unwrap();
        let b = sample_lop_state(4, 2, 17).unwrap();
        assert!(a.approx_eq(&b, 0.0));
    }

    #[test]
    fn full_occupation_saturates_every_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (n, k) in [(2, 2), (4, 4)] {
            let (_, s) = sample_lop(n, k, &mut rng).unwrap();
            for m in 0..n {
                let e = expected_photon_number(&s, &LogicalMode::physical(n, m).unwrap()).unwrap();
                assert!((e - 1.0).abs() < 1e-10, "n={n} k={k} m={m}: {e}");
            }
        }
    }

    #[test]
    fn one_photon_in_three_modes() {
        let report = verify_theorem1(&[(3, 1)], 20, 1).unwrap();
        assert!(report.passed);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (_, s) = sample_lop(3, 1, &mut rng).unwrap();
        let total: f64 =
            (0..3).map(|m| expected_photon_number(&s, &LogicalMode::physical(3, m).unwrap()).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn report_is_reproducible() {
        let a = verify_theorem1(&[(3, 2), (4, 2)], 10, 42).unwrap();
        let b = verify_theorem1(&[(3, 2), (4, 2)], 10, 42).unwrap();
        assert_eq!(a, b);
        assert!(verify_theorem1(&[(3, 2)], 0, 42).is_err());
    }
}
