#![allow(dead_code)]

use lopsim::fock::{enumerate_basis, OccupationVector, StateVector};
use lopsim::optics::ModeUnitary;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn random_state(n_modes: usize, photons: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let basis = enumerate_basis(n_modes, photons);
    let amps = DVector::from_fn(basis.size(), |_, _| gaussian(rng));
    let norm = amps.norm();
    StateVector::new(basis, amps / Complex64::new(norm, 0.0)).unwrap()
}

/// Random state supported only on occupations accepted by `keep`.
pub fn random_state_where(
    n_modes: usize,
    photons: usize,
    rng: &mut ChaCha8Rng,
    keep: impl Fn(&OccupationVector) -> bool,
) -> Option<StateVector> {
    let basis = enumerate_basis(n_modes, photons);
    let amps = DVector::from_fn(basis.size(), |i, _| {
        let z = gaussian(rng);
        if keep(basis.occupation_at(i)) {
            z
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let norm = amps.norm();
    (norm > 0.0).then(|| StateVector::new(basis, amps / Complex64::new(norm, 0.0)).unwrap())
}

pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ModeUnitary {
    lopsim::optics::haar_unitary(n, rng)
}

/// Unitary whose first column is the unit vector `c`, by Gram–Schmidt.
pub fn unitary_with_first_column(c: &[Complex64], rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let n = c.len();
    let mut cols: Vec<DVector<Complex64>> = vec![DVector::from_column_slice(c)];
    while cols.len() < n {
        let mut v = DVector::from_fn(n, |_, _| gaussian(rng));
        for _ in 0..2 {
            for q in &cols {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let norm = v.norm();
        cols.push(v / Complex64::new(norm, 0.0));
    }
    DMatrix::from_columns(&cols)
}

pub fn occ(counts: &[usize]) -> OccupationVector {
    OccupationVector::new(counts.to_vec())
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
