//! Bipartite entanglement diagnostics: Schmidt decomposition, factorizability,
//! entanglement entropy and conditional collapse.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{CMatrix, Svd};
use crate::qstate::PureState;
use crate::{Error, Result};

/// Default threshold on the second Schmidt coefficient below which a state is
/// treated as a product state.
pub const DEFAULT_FACTORIZABLE_TOL: f64 = 1e-9;

/// A split of a register's qubits into two nonempty complementary sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteSplit {
    num_qubits: usize,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl BipartiteSplit {
    /// `left` lists the qubits on one side; the rest form the other side.
    pub fn new(num_qubits: usize, left: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &q in left {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            if mask & (1 << q) != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            mask |= 1 << q;
        }
        if left.is_empty() {
            return Err(Error::InvalidSplit("left side is empty"));
        }
        if left.len() == num_qubits {
            return Err(Error::InvalidSplit("right side is empty"));
        }
        let mut left = left.to_vec();
        left.sort_unstable();
        let right = (0..num_qubits).filter(|q| mask & (1 << q) == 0).collect();
        Ok(Self {
            num_qubits,
            left,
            right,
        })
    }

    /// Every split that keeps qubit 0 on the left, ordered by bitmask.
    pub fn all(num_qubits: usize) -> Vec<Self> {
        if num_qubits < 2 {
            return Vec::new();
        }
        let full = (1u64 << num_qubits) - 1;
        (1..full)
            .step_by(2)
            .map(|mask| {
                let left: Vec<usize> = (0..num_qubits).filter(|q| mask >> q & 1 == 1).collect();
                Self::new(num_qubits, &left).expect("valid by construction")
            })
            .collect()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    /// Reshapes amplitudes into a `2^|left| × 2^|right|` matrix.
    fn reshape(&self, state: &PureState) -> CMatrix {
        let rows = 1usize << self.left.len();
        let cols = 1usize << self.right.len();
        let mut m = CMatrix::zeros(rows, cols);
        for (idx, amp) in state.amplitudes().iter().enumerate() {
            let (r, c) = self.side_indices(idx);
            m[(r, c)] = *amp;
        }
        m
    }

    fn side_indices(&self, idx: usize) -> (usize, usize) {
        let gather = |qubits: &[usize]| {
            qubits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &q)| acc | ((idx >> q & 1) << j))
        };
        (gather(&self.left), gather(&self.right))
    }

    fn check(&self, state: &PureState) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: state.num_qubits(),
            });
        }
        Ok(())
    }
}

/// Schmidt coefficients in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtSpectrum {
    coefficients: Vec<f64>,
}

impl SchmidtSpectrum {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Squared coefficients, i.e. the reduced density matrix eigenvalues.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    /// Second-largest coefficient, or 0 for a one-term spectrum.
    pub fn second(&self) -> f64 {
        self.coefficients.get(1).copied().unwrap_or(0.0)
    }

    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c >= tol).count()
    }

    /// Von Neumann entropy of either side in bits.
    pub fn entropy_bits(&self) -> f64 {
        -self
            .coefficients
            .iter()
            .map(|c| c * c)
            .filter(|&w| w > 0.0)
            .map(|w| w * libm::log2(w))
            .sum::<f64>()
    }
}

/// Full Schmidt form `|ψ> = Σₖ σₖ |uₖ>_left |wₖ>_right`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    split: BipartiteSplit,
    spectrum: SchmidtSpectrum,
    /// Column `k` is `|uₖ>` over the left qubits.
    left_vectors: CMatrix,
    /// Column `k` is `|wₖ>` over the right qubits.
    right_vectors: CMatrix,
}

impl SchmidtDecomposition {
    pub fn new(state: &PureState, split: &BipartiteSplit) -> Result<Self> {
        split.check(state)?;
        let svd = Svd::new(&split.reshape(state));
        let right_vectors = CMatrix::from_rows(
            svd.v.rows(),
            svd.v.cols(),
            svd.v.as_slice().iter().map(|z| z.conj()).collect(),
        )?;
        Ok(Self {
            split: split.clone(),
            spectrum: SchmidtSpectrum {
                coefficients: svd.singular_values,
            },
            left_vectors: svd.u,
            right_vectors,
        })
    }

    pub fn spectrum(&self) -> &SchmidtSpectrum {
        &self.spectrum
    }

    pub fn left_vectors(&self) -> &CMatrix {
        &self.left_vectors
    }

    pub fn right_vectors(&self) -> &CMatrix {
        &self.right_vectors
    }

    /// Rebuilds the full amplitude vector from the Schmidt terms.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let n = self.split.num_qubits;
        (0..1usize << n)
            .map(|idx| {
                let (r, c) = self.split.side_indices(idx);
                self.spectrum
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(k, &s)| self.left_vectors[(r, k)] * self.right_vectors[(c, k)] * s)
                    .sum()
            })
            .collect()
    }
}

/// Schmidt coefficients of `state` across `split`.
pub fn schmidt_decompose(state: &PureState, split: &BipartiteSplit) -> Result<SchmidtSpectrum> {
    Ok(SchmidtDecomposition::new(state, split)?.spectrum)
}

/// True iff the second Schmidt coefficient is below `tol`.
pub fn is_factorizable(state: &PureState, split: &BipartiteSplit, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    Ok(schmidt_decompose(state, split)?.second() < tol)
}

pub fn entanglement_entropy(spectrum: &SchmidtSpectrum) -> f64 {
    spectrum.entropy_bits()
}

/// Projects `qubit` onto `outcome`; the post-measurement state of the rest of
/// the register follows from the renormalized amplitudes.
pub fn conditional_collapse(state: &PureState, qubit: usize, outcome: u8) -> Result<PureState> {
    let mut collapsed = state.clone();
    collapsed.project(qubit, outcome)?;
    Ok(collapsed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;
    use rand::SeedableRng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn bell() -> PureState {
        PureState::from_kets(&[("00", c(1.0)), ("11", c(1.0))]).unwrap()
    }

    fn zeta() -> PureState {
        PureState::from_kets(&[("00", c(1.0)), ("01", c(1.0)), ("11", c(1.0))]).unwrap()
    }

    #[test]
    fn split_validation() {
        assert_eq!(
            BipartiteSplit::new(2, &[]),
            Err(Error::InvalidSplit("left side is empty"))
        );
        assert_eq!(
            BipartiteSplit::new(2, &[0, 1]),
            Err(Error::InvalidSplit("right side is empty"))
        );
        assert!(BipartiteSplit::new(2, &[2]).is_err());
        assert!(BipartiteSplit::new(3, &[1, 1]).is_err());
        let s = BipartiteSplit::new(4, &[3, 1]).unwrap();
        assert_eq!(s.left(), &[1, 3]);
        assert_eq!(s.right(), &[0, 2]);
    }

    #[test]
    fn all_splits_are_distinct_and_complete() {
        assert_eq!(BipartiteSplit::all(1).len(), 0);
        assert_eq!(BipartiteSplit::all(2).len(), 1);
        assert_eq!(BipartiteSplit::all(3).len(), 3);
        assert_eq!(BipartiteSplit::all(4).len(), 7);
    }

    #[test]
    fn bell_spectrum() {
        let split = BipartiteSplit::new(2, &[0]).unwrap();
        let spectrum = schmidt_decompose(&bell(), &split).unwrap();
        for &x in spectrum.coefficients() {
            assert!((x - FRAC_1_SQRT_2).abs() < 1e-12);
        }
        assert!((spectrum.entropy_bits() - 1.0).abs() < 1e-12);
        assert!(!is_factorizable(&bell(), &split, DEFAULT_FACTORIZABLE_TOL).unwrap());
    }

    #[test]
    fn product_spectrum() {
        let split = BipartiteSplit::new(2, &[0]).unwrap();
        let spectrum = schmidt_decompose(&PureState::ground(2).unwrap(), &split).unwrap();
        assert_eq!(spectrum.coefficients()[0], 1.0);
        assert_eq!(spectrum.second(), 0.0);
        assert_eq!(spectrum.entropy_bits(), 0.0);
    }

    #[test]
    fn zeta_spectrum_matches_closed_form() {
        // singular values of (1/√3)[[1,1],[0,1]]: squares (3 ± √5)/6
        let split = BipartiteSplit::new(2, &[0]).unwrap();
        let spectrum = schmidt_decompose(&zeta(), &split).unwrap();
        let w = spectrum.weights();
        let s5 = 5f64.sqrt();
        assert!((w[0] - (3.0 + s5) / 6.0).abs() < 1e-12);
        assert!((w[1] - (3.0 - s5) / 6.0).abs() < 1e-12);
        assert!((spectrum.coefficients()[0] - 0.9342).abs() < 1e-4);
        assert!((spectrum.coefficients()[1] - 0.3568).abs() < 1e-4);
        assert!((spectrum.entropy_bits() - 0.550).abs() < 1e-3);
    }

    #[test]
    fn zero_tolerance_rejected() {
        let split = BipartiteSplit::new(2, &[0]).unwrap();
        assert!(is_factorizable(&bell(), &split, 0.0).is_err());
    }

    #[test]
    fn split_dimension_must_match_state() {
        let split = BipartiteSplit::new(3, &[0]).unwrap();
        assert!(matches!(
            schmidt_decompose(&bell(), &split),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn conditional_collapse_on_product_keeps_marginal() {
        let a = PureState::from_real(1, &[0.6, 0.8]).unwrap();
        let b = PureState::from_real(1, &[1.0, 2.0]).unwrap();
        let prod = a.tensor_product(&b).unwrap();
        let before = prod.probability_of_one(1).unwrap();
        let after = conditional_collapse(&prod, 0, 1).unwrap();
        assert!((after.probability_of_one(1).unwrap() - before).abs() < 1e-12);
    }

    #[test]
    fn collapse_on_zero_probability_fails() {
        let s = PureState::ground(2).unwrap();
        assert!(matches!(
            conditional_collapse(&s, 0, 1),
            Err(Error::ZeroProbability { .. })
        ));
    }

    #[test]
    fn reconstruction_on_random_states() {
        let mut rng = crate::SimRng::seed_from_u64(42);
        for n in 2..=5 {
            let s = PureState::random(n, &mut rng).unwrap();
            for split in BipartiteSplit::all(n) {
                let d = SchmidtDecomposition::new(&s, &split).unwrap();
                let sum: f64 = d.spectrum().weights().iter().sum();
                assert!((sum - 1.0).abs() < 1e-10);
                for (a, b) in d.reconstruct().iter().zip(s.amplitudes()) {
                    assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }
}
