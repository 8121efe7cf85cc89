//! Mode unitaries and their action on Fock sectors.
//!
//! A [`ModeUnitary`] stores the Schrödinger-action matrix `S`, defined by how the
//! optical unitary `U` rewrites creation operators:
//!
//! ```text
//! U â†_l U† = Σⱼ S_{jl} â†ⱼ
//! ```
//!
//! so column `l` of `S` is the image of a photon entering mode `l`. The
//! Heisenberg-picture matrix `û` with `U† â†_l U = Σⱼ û_{jl} â†ⱼ` is `S^†` and is
//! exposed by [`ModeUnitary::heisenberg`].
//!
//! Two independent routes lift `S` to a sector: permanents of repeated
//! submatrices ([`apply_mode_unitary`]) and expansion of the substituted
//! creation-operator polynomial ([`lift_oracle`]).

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{OccupationVector, SectorBasis, StateVector};
use crate::serde_complex::{matrix_to_rows, rows_to_matrix, Pair};
use crate::DEFAULT_TOL;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    matrix: DMatrix<Complex64>,
}

impl ModeUnitary {
    /// Wraps `matrix` after checking it is square and unitary within [`DEFAULT_TOL`].
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_TOL)
    }

    pub fn with_tolerance(matrix: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        let dev = unitarity_deviation(&matrix);
        if dev > tol {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<Complex64>) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self { matrix: DMatrix::identity(n_modes, n_modes) }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows()
    }

    /// Schrödinger-action matrix `S`.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Heisenberg matrix `û = S^†`, with `U† â†_l U = Σⱼ û_{jl} â†ⱼ`.
    pub fn heisenberg(&self) -> DMatrix<Complex64> {
        self.matrix.adjoint()
    }

    pub fn inverse(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    /// Places `self` on `modes` of an `n_modes`-mode system, identity elsewhere.
    /// `modes[i]` receives local mode `i`.
    pub fn embed(&self, n_modes: usize, modes: &[usize]) -> Result<Self> {
        if modes.len() != self.n_modes() {
            return Err(Error::DimensionMismatch { expected: self.n_modes(), found: modes.len() });
        }
        check_distinct(modes, n_modes)?;
        let mut m = DMatrix::identity(n_modes, n_modes);
        for (i, &gi) in modes.iter().enumerate() {
            for (j, &gj) in modes.iter().enumerate() {
                m[(gi, gj)] = self.matrix[(i, j)];
            }
        }
        Ok(Self { matrix: m })
    }
}

pub(crate) fn check_distinct(modes: &[usize], n_modes: usize) -> Result<()> {
    let mut seen = vec![false; n_modes];
    for &m in modes {
        if m >= n_modes {
            return Err(Error::ModeOutOfRange { mode: m, n_modes });
        }
        if std::mem::replace(&mut seen[m], true) {
            return Err(Error::DuplicateMode(m));
        }
    }
    Ok(())
}

/// `max |S S^† − I|` entrywise.
pub fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let prod = m * m.adjoint();
    (prod - DMatrix::<Complex64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Beam splitter between two modes. `theta` sets `α = cos θ`, `β = sin θ`:
/// `â†_a → α â†_a + β â†_b` and `â†_b → −β â†_a + α â†_b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterParams {
    pub mode_a: usize,
    pub mode_b: usize,
    pub theta: f64,
}

impl BeamSplitterParams {
    pub fn new(mode_a: usize, mode_b: usize, theta: f64) -> Self {
        Self { mode_a, mode_b, theta }
    }
}

pub fn beam_splitter(params: BeamSplitterParams, n_modes: usize) -> Result<ModeUnitary> {
    let BeamSplitterParams { mode_a: a, mode_b: b, theta } = params;
    check_distinct(&[a, b], n_modes)?;
    let (s, c) = theta.sin_cos();
    let mut m = DMatrix::identity(n_modes, n_modes);
    m[(a, a)] = Complex64::new(c, 0.0);
    m[(b, a)] = Complex64::new(s, 0.0);
    m[(a, b)] = Complex64::new(-s, 0.0);
    m[(b, b)] = Complex64::new(c, 0.0);
    Ok(ModeUnitary { matrix: m })
}

/// `e^{iφ}` on one mode. A number state `|k⟩` picks up `e^{ikφ}`.
pub fn phase_shifter(mode: usize, phi: f64, n_modes: usize) -> Result<ModeUnitary> {
    if mode >= n_modes {
        return Err(Error::ModeOutOfRange { mode, n_modes });
    }
    let mut m = DMatrix::identity(n_modes, n_modes);
    m[(mode, mode)] = Complex64::from_polar(1.0, phi);
    Ok(ModeUnitary { matrix: m })
}

/// Applies `v` first, then `u`.
pub fn compose(u: &ModeUnitary, v: &ModeUnitary) -> Result<ModeUnitary> {
    if u.n_modes() != v.n_modes() {
        return Err(Error::DimensionMismatch { expected: u.n_modes(), found: v.n_modes() });
    }
    Ok(ModeUnitary { matrix: &u.matrix * &v.matrix })
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// fixed so that R has a real positive diagonal.
pub fn haar_unitary<R: Rng + ?Sized>(n_modes: usize, rng: &mut R) -> ModeUnitary {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::from_fn(n_modes, n_modes, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n_modes {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for x in q.column_mut(j).iter_mut() {
            *x *= phase;
        }
    }
    ModeUnitary { matrix: q }
}

/// Matrix permanent. Direct expansion up to 2×2, Ryser's formula with
/// Gray-code column updates beyond. The empty matrix has permanent 1.
pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let n = m.nrows();
    Ok(permanent_with(n, |i, j| m[(i, j)]))
}

/// Permanent of the `n×n` matrix with entries `entry(i, j)`.
pub(crate) fn permanent_with(n: usize, entry: impl Fn(usize, usize) -> Complex64) -> Complex64 {
    match n {
        0 => ONE,
        1 => entry(0, 0),
        2 => entry(0, 0) * entry(1, 1) + entry(0, 1) * entry(1, 0),
        _ => ryser_gray(n, entry),
    }
}

fn ryser_gray(n: usize, entry: impl Fn(usize, usize) -> Complex64) -> Complex64 {
    assert!(n < usize::BITS as usize, "permanent dimension too large");
    let a: Vec<Complex64> = (0..n * n).map(|k| entry(k / n, k % n)).collect();
    let mut row_sums = vec![ZERO; n];
    let mut in_subset = vec![false; n];
    let mut total = ZERO;
    let mut subset_odd = false;
    for k in 1usize..(1 << n) {
        let j = k.trailing_zeros() as usize;
        let adding = !in_subset[j];
        in_subset[j] = adding;
        subset_odd = !subset_odd;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if adding {
                *s += a[i * n + j];
            } else {
                *s -= a[i * n + j];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        // (-1)^{|S|}; the overall (-1)^n is applied below.
        if subset_odd {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// `⟨output| Û |input⟩ = Per(S[output, input]) / √(∏ output! ∏ input!)`, where
/// row `i` of `S` is repeated `outputᵢ` times and column `j` repeated `inputⱼ` times.
pub fn transition_amplitude(u: &ModeUnitary, input: &OccupationVector, output: &OccupationVector) -> Result<Complex64> {
    let n = u.n_modes();
    for occ in [input, output] {
        if occ.n_modes() != n {
            return Err(Error::DimensionMismatch { expected: n, found: occ.n_modes() });
        }
    }
    if input.total() != output.total() {
        return Err(Error::PhotonNumberMismatch { input: input.total(), output: output.total() });
    }
    let rows = output.mode_list();
    let cols = input.mode_list();
    let norm = (input.factorial_product() * output.factorial_product()).sqrt();
    Ok(permanent_with(rows.len(), |i, j| u.matrix[(rows[i], cols[j])]) / norm)
}

/// A mode unitary lifted to one sector: the dense matrix of transition
/// amplitudes. Hold on to it to reuse the lift across many states.
#[derive(Clone, Debug)]
pub struct LiftedOperator {
    basis: Arc<SectorBasis>,
    matrix: DMatrix<Complex64>,
}

impl LiftedOperator {
    pub fn new(u: &ModeUnitary, basis: Arc<SectorBasis>) -> Result<Self> {
        if u.n_modes() != basis.n_modes() {
            return Err(Error::DimensionMismatch { expected: basis.n_modes(), found: u.n_modes() });
        }
        let states = basis.states();
        let mut matrix = DMatrix::zeros(states.len(), states.len());
        for (c, input) in states.iter().enumerate() {
            let cols = input.mode_list();
            let in_fact = input.factorial_product();
            for (r, output) in states.iter().enumerate() {
                let rows = output.mode_list();
                let norm = (in_fact * output.factorial_product()).sqrt();
                matrix[(r, c)] = permanent_with(rows.len(), |i, j| u.matrix[(rows[i], cols[j])]) / norm;
            }
        }
        Ok(Self { basis, matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if **state.basis() != *self.basis {
            return Err(Error::BasisMismatch(
                state.n_modes(),
                state.total_photons(),
                self.basis.n_modes(),
                self.basis.total_photons(),
            ));
        }
        Ok(state.with_amplitudes(&self.matrix * state.amplitudes()))
    }
}

/// Evolves `state` under the lift of `u` (permanent route).
pub fn apply_mode_unitary(state: &StateVector, u: &ModeUnitary) -> Result<StateVector> {
    if u.n_modes() != state.n_modes() {
        return Err(Error::DimensionMismatch { expected: state.n_modes(), found: u.n_modes() });
    }
    LiftedOperator::new(u, state.basis().clone())?.apply(state)
}

/// Evolves `state` under `u` by substituting `â†_l → Σⱼ S_{jl} â†ⱼ` into each
/// basis state's creation-operator monomial and expanding. Shares no code with
/// the permanent route.
pub fn lift_oracle(state: &StateVector, u: &ModeUnitary) -> Result<StateVector> {
    let n = state.n_modes();
    if u.n_modes() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.n_modes() });
    }
    let s = u.matrix();
    let mut out: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        // |n⟩ = ∏ (â†_l)^{n_l} / √(n_l!) |vac⟩
        let mut poly: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        poly.insert(vec![0; n], amp / occ.factorial_product().sqrt());
        for (l, &count) in occ.counts().iter().enumerate() {
            for _ in 0..count {
                let mut next = BTreeMap::new();
                for (mono, coeff) in &poly {
                    for j in 0..n {
                        let sj = s[(j, l)];
                        if sj == ZERO {
                            continue;
                        }
                        let mut m = mono.clone();
                        m[j] += 1;
                        *next.entry(m).or_insert(ZERO) += coeff * sj;
                    }
                }
                poly = next;
            }
        }
        for (mono, coeff) in poly {
            *out.entry(mono).or_insert(ZERO) += coeff;
        }
    }
    let mut result = StateVector::zero(state.basis().clone());
    let mut amps = result.amplitudes().clone();
    for (mono, coeff) in out {
        let occ = OccupationVector::new(mono);
        // (â†)^m |vac⟩ = √(m!) |m⟩
        let i = state.basis().index_of(&occ).expect("substitution conserves photon number");
        amps[i] += coeff * occ.factorial_product().sqrt();
    }
    result = result.with_amplitudes(amps);
    Ok(result)
}

#[derive(Serialize, Deserialize)]
struct ModeUnitaryRepr {
    n_modes: usize,
    convention: String,
    matrix: Vec<Vec<Pair>>,
}

pub const SCHRODINGER_CONVENTION: &str = "schrodinger";

impl Serialize for ModeUnitary {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ModeUnitaryRepr {
            n_modes: self.n_modes(),
            convention: SCHRODINGER_CONVENTION.to_string(),
            matrix: matrix_to_rows(&self.matrix),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModeUnitary {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ModeUnitaryRepr::deserialize(deserializer)?;
        if repr.convention != SCHRODINGER_CONVENTION {
            return Err(D::Error::custom(format!(
                "convention: expected \"{SCHRODINGER_CONVENTION}\", found \"{}\"",
                repr.convention
            )));
        }
        let m = rows_to_matrix(&repr.matrix).ok_or_else(|| D::Error::custom("matrix: ragged rows"))?;
        if m.nrows() != repr.n_modes || m.ncols() != repr.n_modes {
            return Err(D::Error::custom(format!(
                "matrix: expected {0}x{0}, found {1}x{2}",
                repr.n_modes,
                m.nrows(),
                m.ncols()
            )));
        }
        // Files carry decimal text; allow for rounding in hand-written inputs.
        ModeUnitary::with_tolerance(m, 1e-8).map_err(|e| D::Error::custom(format!("matrix: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

    fn occ(v: &[usize]) -> OccupationVector {
        OccupationVector::new(v.to_vec())
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn beam_splitter_block() {
        assert_eq!(beam_splitter(BeamSplitterParams::new(0, 1, 0.0), 3).unwrap(), ModeUnitary::identity(3));
        let bs = beam_splitter(BeamSplitterParams::new(0, 1, FRAC_PI_8), 2).unwrap();
        let (a, b) = (FRAC_PI_8.cos(), FRAC_PI_8.sin());
        let out = apply_mode_unitary(&StateVector::basis_state(&occ(&[1, 0])), &bs).unwrap();
        assert!(close(out.amplitude(&occ(&[1, 0])), c(a), 1e-15));
        assert!(close(out.amplitude(&occ(&[0, 1])), c(b), 1e-15));
        let out = apply_mode_unitary(&StateVector::basis_state(&occ(&[0, 1])), &bs).unwrap();
        assert!(close(out.amplitude(&occ(&[1, 0])), c(-b), 1e-15));
        assert!(close(out.amplitude(&occ(&[0, 1])), c(a), 1e-15));
        assert!(matches!(beam_splitter(BeamSplitterParams::new(0, 2, 0.1), 2), Err(Error::ModeOutOfRange { .. })));
        assert!(beam_splitter(BeamSplitterParams::new(1, 1, 0.1), 2).is_err());
    }

    #[test]
    fn fifty_fifty_recombines_symmetric_photon() {
        let plus =
            StateVector::from_terms(&[(occ(&[1, 0]), c(FRAC_1_SQRT_2)), (occ(&[0, 1]), c(FRAC_1_SQRT_2))]).unwrap();
        let bs = beam_splitter(BeamSplitterParams::new(0, 1, FRAC_PI_4), 2).unwrap();
        let out = apply_mode_unitary(&plus, &bs).unwrap();
        assert!(close(out.amplitude(&occ(&[0, 1])), c(1.0), 1e-15));
        let out = apply_mode_unitary(&plus, &bs.inverse()).unwrap();
        assert!(close(out.amplitude(&occ(&[1, 0])), c(1.0), 1e-15));
    }

    #[test]
    fn phase_shifter_examples() {
        assert_eq!(phase_shifter(0, 0.0, 2).unwrap(), ModeUnitary::identity(2));
        let ps = phase_shifter(0, PI, 1).unwrap();
        let out = apply_mode_unitary(&StateVector::basis_state(&occ(&[2])), &ps).unwrap();
        assert!(close(out.amplitude(&occ(&[2])), c(1.0), 1e-15));
        let ps = phase_shifter(0, FRAC_PI_2, 1).unwrap();
        let out = apply_mode_unitary(&StateVector::basis_state(&occ(&[1])), &ps).unwrap();
        assert!(close(out.amplitude(&occ(&[1])), Complex64::i(), 1e-15));
        assert!(phase_shifter(1, 0.3, 1).is_err());
    }

    #[test]
    fn compose_examples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let u = haar_unitary(3, &mut rng);
        assert_eq!(compose(&u, &ModeUnitary::identity(3)).unwrap(), u);
        let id = compose(&u, &u.inverse()).unwrap();
        assert!(unitarity_deviation(id.matrix()) < 1e-12);
        assert!((id.matrix() - DMatrix::<Complex64>::identity(3, 3)).iter().all(|z| z.norm() < 1e-12));
        let p = BeamSplitterParams::new(0, 2, 0.37);
        let m = BeamSplitterParams { theta: -0.37, ..p };
        let id = compose(&beam_splitter(p, 3).unwrap(), &beam_splitter(m, 3).unwrap()).unwrap();
        assert!((id.matrix() - DMatrix::<Complex64>::identity(3, 3)).iter().all(|z| z.norm() < 1e-15));
        assert!(compose(&u, &ModeUnitary::identity(2)).is_err());
    }

    #[test]
    fn permanent_examples() {
        let a = Complex64::new(0.3, -1.2);
        assert_eq!(permanent(&DMatrix::from_element(1, 1, a)).unwrap(), a);
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(3.0), c(4.0)]);
        assert_eq!(permanent(&m).unwrap(), c(10.0));
        assert_eq!(permanent(&DMatrix::from_element(4, 4, ONE)).unwrap(), c(24.0));
        assert_eq!(permanent(&DMatrix::<Complex64>::zeros(0, 0)).unwrap(), ONE);
        assert!(matches!(permanent(&DMatrix::<Complex64>::zeros(2, 3)), Err(Error::NotSquare { .. })));
        let m3 =
            DMatrix::from_row_slice(3, 3, &[c(1.0), c(2.0), c(3.0), c(4.0), c(5.0), c(6.0), c(7.0), c(8.0), c(9.0)]);
        assert_eq!(permanent(&m3).unwrap(), c(450.0));
    }

    #[test]
    fn two_photon_transition_amplitudes() {
        let bs = beam_splitter(BeamSplitterParams::new(0, 1, FRAC_PI_8), 2).unwrap();
        let a = transition_amplitude(&bs, &occ(&[1, 1]), &occ(&[2, 0])).unwrap();
        assert!(close(a, c(-0.5), 1e-15));
        let a = transition_amplitude(&bs, &occ(&[1, 1]), &occ(&[1, 1])).unwrap();
        assert!(close(a, c(FRAC_1_SQRT_2), 1e-15));
        let id = ModeUnitary::identity(2);
        assert_eq!(transition_amplitude(&id, &occ(&[1, 1]), &occ(&[1, 1])).unwrap(), ONE);
        assert!(matches!(
            transition_amplitude(&id, &occ(&[1, 1]), &occ(&[1, 0])),
            Err(Error::PhotonNumberMismatch { input: 2, output: 1 })
        ));
    }

    #[test]
    fn beam_splitter_on_two_single_photons() {
        let bs = beam_splitter(BeamSplitterParams::new(0, 1, FRAC_PI_8), 2).unwrap();
        let s = StateVector::basis_state(&occ(&[1, 1]));
        for out in [apply_mode_unitary(&s, &bs).unwrap(), lift_oracle(&s, &bs).unwrap()] {
            assert!(close(out.amplitude(&occ(&[2, 0])), c(-0.5), 1e-15));
            assert!(close(out.amplitude(&occ(&[1, 1])), c(FRAC_1_SQRT_2), 1e-15));
            assert!(close(out.amplitude(&occ(&[0, 2])), c(0.5), 1e-15));
        }
        assert!(apply_mode_unitary(&s, &ModeUnitary::identity(2)).unwrap().approx_eq(&s, 0.0));
    }

    #[test]
    fn oracle_vacuum_and_single_photon() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let u = haar_unitary(3, &mut rng);
        let vac = StateVector::basis_state(&occ(&[0, 0, 0]));
        assert!(lift_oracle(&vac, &u).unwrap().approx_eq(&vac, 1e-15));
        let one = StateVector::basis_state(&occ(&[0, 1, 0]));
        let out = lift_oracle(&one, &u).unwrap();
        for j in 0..3 {
            let mut o = vec![0; 3];
            o[j] = 1;
            assert!(close(out.amplitude(&occ(&o)), u.matrix()[(j, 1)], 1e-15));
        }
    }

    #[test]
    fn haar_is_unitary_and_seeded() {
        use rand::SeedableRng;
        let u = haar_unitary(5, &mut rand_chacha::ChaCha8Rng::seed_from_u64(1));
        let v = haar_unitary(5, &mut rand_chacha::ChaCha8Rng::seed_from_u64(1));
        assert_eq!(u, v);
        assert!(unitarity_deviation(u.matrix()) < 1e-12);
    }

    #[test]
    fn embed_places_block() {
        let bs = beam_splitter(BeamSplitterParams::new(0, 1, 0.4), 2).unwrap();
        let big = bs.embed(4, &[3, 1]).unwrap();
        assert_eq!(big, beam_splitter(BeamSplitterParams::new(3, 1, 0.4), 4).unwrap());
        assert!(bs.embed(4, &[1, 1]).is_err());
    }

    #[test]
    fn json_requires_convention() {
        let bs = beam_splitter(BeamSplitterParams::new(0, 1, FRAC_PI_4), 2).unwrap();
        let text = serde_json::to_string(&bs).unwrap();
        assert!(text.contains(r#""convention":"schrodinger""#));
        let back: ModeUnitary = serde_json::from_str(&text).unwrap();
        assert_eq!(back, bs);
        let bad = text.replace("schrodinger", "heisenberg");
        let err = serde_json::from_str::<ModeUnitary>(&bad).unwrap_err().to_string();
        assert!(err.contains("convention"), "{err}");
        let not_unitary = r#"{"n_modes":1,"convention":"schrodinger","matrix":[[[2,0]]]}"#;
        assert!(serde_json::from_str::<ModeUnitary>(not_unitary).is_err());
    }

    use rand::SeedableRng;
}
