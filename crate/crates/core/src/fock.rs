//! Fock-basis bookkeeping: occupation vectors, fixed-photon-number sectors and
//! dense state vectors over a sector.
//!
//! Sectors are enumerated in reverse-lexicographic order of the occupation
//! vector, so the first mode's count decreases first:
//! `(2,0) < (1,1) < (0,2)`. Modes are indexed from 0.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_complex::{from_pair, vec_to_pairs, Pair};
use crate::DEFAULT_TOL;

/// Photon count per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(Vec<usize>);

impl OccupationVector {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    /// The all-zero occupation on `n_modes` modes.
    pub fn vacuum(n_modes: usize) -> Self {
        Self(vec![0; n_modes])
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn get(&self, mode: usize) -> usize {
        self.0[mode]
    }

    /// `∏ nᵢ!` as a float.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }

    /// Occupation of `self` on the first modes followed by `other`.
    pub fn concat(&self, other: &OccupationVector) -> OccupationVector {
        let mut counts = self.0.clone();
        counts.extend_from_slice(&other.0);
        Self(counts)
    }

    /// Mode index repeated once per photon, in mode order.
    pub fn mode_list(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(m, &n)| std::iter::repeat_n(m, n)).collect()
    }
}

impl From<Vec<usize>> for OccupationVector {
    fn from(counts: Vec<usize>) -> Self {
        Self(counts)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 && self.0.iter().any(|&c| c > 9) {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of ways to place `total_photons` bosons in `n_modes` modes.
pub fn sector_size(n_modes: usize, total_photons: usize) -> usize {
    if n_modes == 0 {
        return usize::from(total_photons == 0);
    }
    binomial(n_modes + total_photons - 1, total_photons)
}

/// All occupation vectors with a fixed number of modes and photons, with a
/// bijective index map.
#[derive(Debug)]
pub struct SectorBasis {
    n_modes: usize,
    total_photons: usize,
    states: Vec<OccupationVector>,
    index: HashMap<OccupationVector, usize>,
}

impl PartialEq for SectorBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n_modes == other.n_modes && self.total_photons == other.total_photons
    }
}

impl SectorBasis {
    pub fn new(n_modes: usize, total_photons: usize) -> Self {
        let mut states = Vec::with_capacity(sector_size(n_modes, total_photons));
        let mut prefix = Vec::with_capacity(n_modes);
        enumerate_into(n_modes, total_photons, &mut prefix, &mut states);
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Self { n_modes, total_photons, states, index }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn total_photons(&self) -> usize {
        self.total_photons
    }

    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn occupation_at(&self, index: usize) -> &OccupationVector {
        &self.states[index]
    }

    pub fn index_of(&self, occupation: &OccupationVector) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    fn shape(&self) -> (usize, usize) {
        (self.n_modes, self.total_photons)
    }
}

fn enumerate_into(modes_left: usize, photons_left: usize, prefix: &mut Vec<usize>, out: &mut Vec<OccupationVector>) {
    match modes_left {
        0 => {
            if photons_left == 0 {
                out.push(OccupationVector(prefix.clone()));
            }
        }
        1 => {
            prefix.push(photons_left);
            out.push(OccupationVector(prefix.clone()));
            prefix.pop();
        }
        _ => {
            for n in (0..=photons_left).rev() {
                prefix.push(n);
                enumerate_into(modes_left - 1, photons_left - n, prefix, out);
                prefix.pop();
            }
        }
    }
}

/// Enumerates the sector in canonical order.
///
/// A zero-mode sector is allowed: it holds the single empty occupation when
/// `total_photons == 0` and nothing otherwise. Postselecting every mode lands
/// there.
pub fn enumerate_basis(n_modes: usize, total_photons: usize) -> Arc<SectorBasis> {
    Arc::new(SectorBasis::new(n_modes, total_photons))
}

/// Dense amplitudes over one sector.
#[derive(Clone, Debug)]
pub struct StateVector {
    basis: Arc<SectorBasis>,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn new(basis: Arc<SectorBasis>, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.size() {
            return Err(Error::DimensionMismatch { expected: basis.size(), found: amplitudes.len() });
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn zero(basis: Arc<SectorBasis>) -> Self {
        let amplitudes = DVector::zeros(basis.size());
        Self { basis, amplitudes }
    }

    /// The number state `|occupation⟩`.
    pub fn basis_state(occupation: &OccupationVector) -> Self {
        let basis = enumerate_basis(occupation.n_modes(), occupation.total());
        let mut state = Self::zero(basis);
        let i = state.basis.index_of(occupation).expect("occupation belongs to its own sector");
        state.amplitudes[i] = Complex64::new(1.0, 0.0);
        state
    }

    /// Superposition `Σ c |n⟩`. All terms must share one sector. Not normalized.
    pub fn from_terms(terms: &[(OccupationVector, Complex64)]) -> Result<Self> {
        let (first, _) = terms.first().ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?;
        let basis = enumerate_basis(first.n_modes(), first.total());
        let mut state = Self::zero(basis);
        for (occ, amp) in terms {
            let i = state
                .basis
                .index_of(occ)
                .ok_or_else(|| Error::BasisMismatch(occ.n_modes(), occ.total(), first.n_modes(), first.total()))?;
            state.amplitudes[i] += amp;
        }
        Ok(state)
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn n_modes(&self) -> usize {
        self.basis.n_modes
    }

    pub fn total_photons(&self) -> usize {
        self.basis.total_photons
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    /// Amplitude on `occupation`, zero when it lies outside the sector.
    pub fn amplitude(&self, occupation: &OccupationVector) -> Complex64 {
        self.basis.index_of(occupation).map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    /// Nonzero terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, Complex64)> {
        self.basis.states.iter().zip(self.amplitudes.iter()).filter(|(_, a)| a.norm_sqr() > 0.0).map(|(o, a)| (o, *a))
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(())
    }

    /// `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let norm = self.norm();
        (norm > 0.0).then(|| self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { basis: self.basis.clone(), amplitudes: &self.amplitudes * factor }
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: DVector<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), self.basis.size());
        Self { basis: self.basis.clone(), amplitudes }
    }

    pub(crate) fn check_same_basis(&self, other: &StateVector) -> Result<()> {
        if self.basis.shape() != other.basis.shape() {
            let (a, b) = self.basis.shape();
            let (c, d) = other.basis.shape();
            return Err(Error::BasisMismatch(a, b, c, d));
        }
        Ok(())
    }

    /// Appends modes prepared in the number state `extra`.
    pub fn tensor_occupation(&self, extra: &OccupationVector) -> StateVector {
        let basis = enumerate_basis(self.n_modes() + extra.n_modes(), self.total_photons() + extra.total());
        let mut out = StateVector::zero(basis);
        for (occ, amp) in self.basis.states.iter().zip(self.amplitudes.iter()) {
            let i = out.basis.index_of(&occ.concat(extra)).expect("sector arithmetic");
            out.amplitudes[i] = *amp;
        }
        out
    }

    /// Applies the annihilator `Σⱼ c̄ⱼ âⱼ` of a logical mode. The result lives in
    /// the sector with one photon fewer and is not normalized.
    pub fn annihilate(&self, mode: &LogicalMode) -> Result<StateVector> {
        if mode.n_modes() != self.n_modes() {
            return Err(Error::DimensionMismatch { expected: self.n_modes(), found: mode.n_modes() });
        }
        if self.total_photons() == 0 {
            return Ok(StateVector::zero(enumerate_basis(self.n_modes(), 0)));
        }
        let basis = enumerate_basis(self.n_modes(), self.total_photons() - 1);
        let mut out = StateVector::zero(basis);
        let mut counts = vec![0; self.n_modes()];
        for (occ, amp) in self.basis.states.iter().zip(self.amplitudes.iter()) {
            for (j, c) in mode.coeffs.iter().enumerate() {
                let n = occ.get(j);
                if n == 0 || c.norm_sqr() == 0.0 {
                    continue;
                }
                counts.copy_from_slice(occ.counts());
                counts[j] -= 1;
                let i = out.basis.index_of(&OccupationVector(counts.clone())).expect("sector arithmetic");
                out.amplitudes[i] += c.conj() * (n as f64).sqrt() * amp;
            }
        }
        Ok(out)
    }

    /// Amplitude-wise comparison.
    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.basis.shape() == other.basis.shape()
            && self.amplitudes.iter().zip(other.amplitudes.iter()).all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// `⟨x|y⟩`, conjugate-linear in `x`.
pub fn inner_product(x: &StateVector, y: &StateVector) -> Result<Complex64> {
    x.check_same_basis(y)?;
    Ok(x.amplitudes.iter().zip(y.amplitudes.iter()).map(|(a, b)| a.conj() * b).sum())
}

/// `|⟨x|y⟩|²`. Insensitive to global phase on either side.
pub fn fidelity_up_to_phase(x: &StateVector, y: &StateVector) -> Result<f64> {
    Ok(inner_product(x, y)?.norm_sqr())
}

/// `|n₁ n₂ …⟩` with one photon in each listed mode.
pub fn single_photon_state(n_modes: usize, occupied_modes: &[usize]) -> Result<StateVector> {
    let mut counts = vec![0; n_modes];
    for &m in occupied_modes {
        if m >= n_modes {
            return Err(Error::ModeOutOfRange { mode: m, n_modes });
        }
        if counts[m] != 0 {
            return Err(Error::DuplicateMode(m));
        }
        counts[m] = 1;
    }
    Ok(StateVector::basis_state(&OccupationVector(counts)))
}

/// A normalized combination of mode operators. The annihilator is
/// `Σⱼ c̄ⱼ âⱼ` and the creator `Σⱼ cⱼ â†ⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalMode {
    coeffs: Vec<Complex64>,
}

impl LogicalMode {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidLogicalMode(norm));
        }
        Ok(Self { coeffs })
    }

    /// Physical mode `mode` as the unit vector `e_mode`.
    pub fn physical(n_modes: usize, mode: usize) -> Result<Self> {
        if mode >= n_modes {
            return Err(Error::ModeOutOfRange { mode, n_modes });
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_modes];
        coeffs[mode] = Complex64::new(1.0, 0.0);
        Ok(Self { coeffs })
    }

    /// Equal-weight mode `(1, …, 1)/√n`.
    pub fn uniform(n_modes: usize) -> Self {
        let c = Complex64::new(1.0 / (n_modes as f64).sqrt(), 0.0);
        Self { coeffs: vec![c; n_modes] }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len()
    }
}

#[derive(Serialize, Deserialize)]
struct StateVectorRepr {
    n_modes: usize,
    total_photons: usize,
    amplitudes: Vec<Pair>,
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StateVectorRepr {
            n_modes: self.n_modes(),
            total_photons: self.total_photons(),
            amplitudes: vec_to_pairs(self.amplitudes.iter()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = StateVectorRepr::deserialize(deserializer)?;
        let basis = enumerate_basis(repr.n_modes, repr.total_photons);
        let amps = DVector::from_iterator(repr.amplitudes.len(), repr.amplitudes.into_iter().map(from_pair));
        StateVector::new(basis, amps).map_err(|e| serde::de::Error::custom(format!("amplitudes: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_8;

    fn occ(v: &[usize]) -> OccupationVector {
        OccupationVector::new(v.to_vec())
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn two_modes_two_photons_canonical_order() {
        let b = enumerate_basis(2, 2);
        assert_eq!(b.states(), &[occ(&[2, 0]), occ(&[1, 1]), occ(&[0, 2])]);
        assert_eq!(b.size(), 3);
    }

    #[test]
    fn vacuum_sector_and_stars_and_bars() {
        let b = enumerate_basis(1, 0);
        assert_eq!(b.states(), &[occ(&[0])]);
        assert_eq!(enumerate_basis(3, 2).size(), 6);
        assert_eq!(enumerate_basis(8, 4).size(), 330);
        assert_eq!(enumerate_basis(0, 0).size(), 1);
        assert_eq!(enumerate_basis(0, 2).size(), 0);
    }

    #[test]
    fn index_round_trip() {
        for n in 1..=5 {
            for k in 0..=4 {
                let b = enumerate_basis(n, k);
                assert_eq!(b.size(), sector_size(n, k));
                for i in 0..b.size() {
                    assert_eq!(b.occupation_at(i).total(), k);
                    assert_eq!(b.index_of(b.occupation_at(i)), Some(i));
                }
            }
        }
    }

    #[test]
    fn single_photon_states() {
        let s = single_photon_state(2, &[0, 1]).unwrap();
        assert_eq!(s.amplitude(&occ(&[1, 1])), c(1.0));
        let s = single_photon_state(3, &[0, 1]).unwrap();
        assert_eq!(s.amplitude(&occ(&[1, 1, 0])), c(1.0));
        let s = single_photon_state(1, &[]).unwrap();
        assert_eq!(s.total_photons(), 0);
        assert_eq!(s.amplitude(&occ(&[0])), c(1.0));
        assert!(matches!(single_photon_state(2, &[1, 1]), Err(Error::DuplicateMode(1))));
        assert!(matches!(single_photon_state(2, &[2]), Err(Error::ModeOutOfRange { .. })));
    }

    #[test]
    fn inner_products_and_fidelity() {
        let s11 = StateVector::basis_state(&occ(&[1, 1]));
        let s20 = StateVector::basis_state(&occ(&[2, 0]));
        assert_eq!(inner_product(&s11, &s11).unwrap(), c(1.0));
        assert_eq!(inner_product(&s20, &s11).unwrap(), c(0.0));
        let phased = s20.scaled(Complex64::from_polar(1.0, 0.7));
        assert!((fidelity_up_to_phase(&s20, &phased).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity_up_to_phase(&s20, &s11).unwrap(), 0.0);
        let s1 = StateVector::basis_state(&occ(&[1, 0]));
        assert!(matches!(inner_product(&s1, &s11), Err(Error::BasisMismatch(..))));
    }

    #[test]
    fn two_photon_interference_amplitudes_are_normalized() {
        let (a, b) = (FRAC_PI_8.cos(), FRAC_PI_8.sin());
        let s = StateVector::from_terms(&[
            (occ(&[2, 0]), c(-(2f64).sqrt() * a * b)),
            (occ(&[1, 1]), c(a * a - b * b)),
            (occ(&[0, 2]), c((2f64).sqrt() * a * b)),
        ])
        .unwrap();
        assert!((inner_product(&s, &s).unwrap() - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn annihilate_uniform_mode() {
        let r3 = 1.0 / 3f64.sqrt();
        let psi =
            StateVector::from_terms(&[(occ(&[1, 1, 0]), c(r3)), (occ(&[1, 0, 1]), c(r3)), (occ(&[0, 1, 1]), c(r3))])
                .unwrap();
        let out = psi.annihilate(&LogicalMode::uniform(3)).unwrap();
        assert_eq!(out.total_photons(), 1);
        assert!((out.norm().powi(2) - 4.0 / 3.0).abs() < 1e-14);
        let two = StateVector::basis_state(&occ(&[2]));
        let out = two.annihilate(&LogicalMode::physical(1, 0).unwrap()).unwrap();
        assert!((out.amplitude(&occ(&[1])) - c(2f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn tensor_appends_modes() {
        let s = StateVector::basis_state(&occ(&[1, 0])).tensor_occupation(&occ(&[0, 1]));
        assert_eq!(s.n_modes(), 4);
        assert_eq!(s.amplitude(&occ(&[1, 0, 0, 1])), c(1.0));
    }

    #[test]
    fn logical_mode_validation() {
        assert!(LogicalMode::new(vec![c(1.0), c(1.0)]).is_err());
        assert!(LogicalMode::physical(2, 2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = StateVector::from_terms(&[
            (occ(&[1, 1]), Complex64::new(0.6, 0.0)),
            (occ(&[2, 0]), Complex64::new(0.0, 0.8)),
        ])
        .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"n_modes":2,"total_photons":2,"amplitudes":[[0.0,0.8],[0.6,0.0],[0.0,0.0]]}"#);
        let back: StateVector = serde_json::from_str(&text).unwrap();
        assert!(back.approx_eq(&s, 0.0));
        assert!(serde_json::from_str::<StateVector>(r#"{"n_modes":2,"total_photons":2,"amplitudes":[[1,0]]}"#).is_err());
    }
}
