//! Pure-state algebra over tubulin qubits.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::{CMatrix, HermitianEigen};
use crate::{Error, Result, ALGEBRAIC_TOL};

/// Largest register a dense state may span.
pub const MAX_QUBITS: usize = 26;

/// Largest register a dense Hamiltonian may span.
pub const MAX_HAMILTONIAN_QUBITS: usize = 10;

/// Inputs with a norm below this are rejected rather than renormalized.
pub const MIN_NORM: f64 = 1e-14;

/// Tunneling rate whose inverse is the 10⁻¹¹ s conformational flip time
/// (units of s⁻¹ with ħ = 1).
pub const DEFAULT_TUNNELING: f64 = 1.0e11;

/// Conformation of a tubulin dimer; the qubit's computational basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Conformation {
    /// `|a>`, bit 0.
    A,
    /// `|b>`, bit 1.
    B,
}

impl Conformation {
    pub fn bit(self) -> u8 {
        match self {
            Conformation::A => 0,
            Conformation::B => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Conformation::A
        } else {
            Conformation::B
        }
    }
}

/// A normalized state vector over `num_qubits` qubits.
///
/// Amplitude index bit `i` holds the conformation of qubit `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Normalizes `amplitudes` into a state. Rejects wrong lengths, non-finite
    /// entries and (near-)zero vectors.
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let mut state = Self {
            num_qubits,
            amplitudes,
        };
        let norm = libm::sqrt(state.norm_sqr());
        if !(norm >= MIN_NORM) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        if norm != 1.0 {
            state.scale(1.0 / norm);
        }
        Ok(state)
    }

    /// Builds a state from real amplitudes, normalizing them.
    pub fn from_real(num_qubits: usize, amplitudes: &[f64]) -> Result<Self> {
        Self::new(
            num_qubits,
            amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// All qubits in the `|a>` conformation.
    pub fn ground(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Equal-weight superposition of every basis state.
    pub fn uniform(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        Self::new(num_qubits, vec![Complex64::new(1.0, 0.0); dim])
    }

    /// Builds a state from ket labels such as `"01"`, where the first
    /// character is qubit 0. Repeated labels add up.
    pub fn from_kets(terms: &[(&str, Complex64)]) -> Result<Self> {
        let num_qubits = terms.first().map(|(k, _)| k.len()).unwrap_or(0);
        check_qubit_count(num_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        for (label, amp) in terms {
            amplitudes[ket_index(label, num_qubits)?] += amp;
        }
        Self::new(num_qubits, amplitudes)
    }

    /// Haar-ish random state: Gaussian-free but uniform-box amplitudes, which
    /// is enough for property checks.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let amplitudes = (0..1usize << num_qubits)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        Self::new(num_qubits, amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Result<Complex64> {
        self.amplitudes
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index,
                dim: self.dim(),
            })
    }

    /// Σ |cᵢ|², summed in index order.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// |c_index|².
    pub fn probability(&self, index: usize) -> Result<f64> {
        Ok(self.amplitude(index)?.norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Probability that `qubit` reads 1.
    pub fn probability_of_one(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, z)| z.norm_sqr())
            .sum())
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &PureState) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`; `self` occupies the low qubits.
    pub fn tensor_product(&self, other: &PureState) -> Result<PureState> {
        let num_qubits = self.num_qubits + other.num_qubits;
        check_qubit_count(num_qubits)?;
        let mut amplitudes = Vec::with_capacity(1 << num_qubits);
        for b in &other.amplitudes {
            amplitudes.extend(self.amplitudes.iter().map(|a| a * b));
        }
        PureState::new(num_qubits, amplitudes)
    }

    /// Applies `op` to `targets`, where bit `j` of the operator's row/column
    /// index corresponds to `targets[j]`.
    pub fn apply_operator(&mut self, op: &UnitaryOperator, targets: &[usize]) -> Result<()> {
        self.check_targets(targets)?;
        let k = targets.len();
        if op.dim() != 1 << k {
            return Err(Error::DimensionMismatch {
                left: op.dim(),
                right: 1 << k,
            });
        }
        let sub_dim = 1usize << k;
        let target_mask: usize = targets.iter().map(|&q| 1usize << q).sum();
        let offsets: Vec<usize> = (0..sub_dim)
            .map(|s| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| s >> j & 1 == 1)
                    .map(|(_, &q)| 1usize << q)
                    .sum()
            })
            .collect();
        let m = op.matrix();
        let mut gathered = vec![Complex64::new(0.0, 0.0); sub_dim];
        for base in 0..self.dim() {
            if base & target_mask != 0 {
                continue;
            }
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = self.amplitudes[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, g) in gathered.iter().enumerate() {
                    acc += m[(row, col)] * g;
                }
                self.amplitudes[base | off] = acc;
            }
        }
        Ok(())
    }

    /// One step of `exp(-i H dt)` with ħ = 1. Diagonalizes `h` on every
    /// call; use [`Propagator`] for repeated steps.
    pub fn schrodinger_step(&mut self, h: &Hamiltonian, dt: f64) -> Result<()> {
        h.propagator()?.step(self, dt)
    }

    /// Projectively measures `qubit`, collapsing the state.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<u8> {
        let p_one = self.probability_of_one(qubit)?;
        let u: f64 = rng.random();
        let outcome = u8::from(u < p_one);
        self.project(qubit, outcome)?;
        Ok(outcome)
    }

    /// Projects `qubit` onto `outcome` and renormalizes.
    pub fn project(&mut self, qubit: usize, outcome: u8) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        let keep_set = outcome != 0;
        let mut kept = 0.0;
        for (i, z) in self.amplitudes.iter_mut().enumerate() {
            if (i & mask != 0) == keep_set {
                kept += z.norm_sqr();
            } else {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        if !(kept > MIN_NORM * MIN_NORM) {
            return Err(Error::ZeroProbability { qubit, outcome });
        }
        self.scale(1.0 / libm::sqrt(kept));
        Ok(())
    }

    /// Renormalizes in place; used to absorb rounding after long runs.
    pub fn renormalize(&mut self) -> Result<()> {
        let norm = libm::sqrt(self.norm_sqr());
        if !(norm >= MIN_NORM) {
            return Err(Error::ZeroNorm);
        }
        self.scale(1.0 / norm);
        Ok(())
    }

    fn scale(&mut self, factor: f64) {
        for z in &mut self.amplitudes {
            *z *= factor;
        }
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        let mut seen = 0usize;
        for &q in targets {
            self.check_qubit(q)?;
            if seen & (1 << q) != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount {
            got: n,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Index of a ket label; character `i` is qubit `i`.
pub fn ket_index(label: &str, num_qubits: usize) -> Result<usize> {
    if label.len() != num_qubits {
        return Err(Error::LengthMismatch {
            expected: num_qubits,
            found: label.len(),
        });
    }
    label
        .bytes()
        .enumerate()
        .try_fold(0usize, |acc, (i, b)| match b {
            b'0' | b'a' => Ok(acc),
            b'1' | b'b' => Ok(acc | 1 << i),
            _ => Err(Error::param("ket", "labels use 0/1 or a/b")),
        })
}

/// A unitary matrix acting on `log2(dim)` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    /// Validates that `matrix` is square, power-of-two sized and unitary.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                left: matrix.rows(),
                right: matrix.cols(),
            });
        }
        if !matrix.rows().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(matrix.rows()));
        }
        let dev = matrix.unitary_deviation();
        if !(dev <= ALGEBRAIC_TOL) {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix })
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self {
            matrix: CMatrix::identity(1 << num_qubits),
        }
    }

    /// Single-qubit operator written in the `(|1>, |0>)` ordering, i.e. with
    /// the spin-up state as the first vector component. Converted to the
    /// crate's `(|0>, |1>)` ordering.
    pub fn from_up_down_basis(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let data = alloc::vec![m[1][1], m[1][0], m[0][1], m[0][0]];
        Self::new(CMatrix::from_rows(2, 2, data)?)
    }

    /// The real symmetric operator `(1/√2)[[1, 1], [1, -1]]`.
    pub fn hadamard() -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        Self {
            matrix: CMatrix::from_real(2, 2, &[h, h, h, -h]).expect("2x2"),
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            matrix: CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2"),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Per-qubit parameters of the two-state tubulin Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubulinParams {
    /// Bias ε multiplying σ_z.
    pub bias: f64,
    /// Tunneling Δ multiplying σ_x.
    pub tunneling: f64,
    /// Nearest-neighbor σ_z⊗σ_z coupling J.
    pub coupling: f64,
}

impl Default for TubulinParams {
    fn default() -> Self {
        Self {
            bias: 0.0,
            tunneling: DEFAULT_TUNNELING,
            coupling: 0.1 * DEFAULT_TUNNELING,
        }
    }
}

/// Hermitian generator of unitary evolution, in units with ħ = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    num_qubits: usize,
    matrix: CMatrix,
}

impl Hamiltonian {
    /// H = Σᵢ (εᵢ σzᵢ + Δᵢ σxᵢ) + J Σ₍ᵢ,ⱼ₎ σzᵢ σzⱼ over `edges`.
    pub fn tubulin(
        num_qubits: usize,
        biases: &[f64],
        tunnelings: &[f64],
        coupling: f64,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        check_hamiltonian_size(num_qubits)?;
        for len in [biases.len(), tunnelings.len()] {
            if len != num_qubits {
                return Err(Error::LengthMismatch {
                    expected: num_qubits,
                    found: len,
                });
            }
        }
        let finite = biases.iter().chain(tunnelings).all(|x| x.is_finite());
        if !finite || !coupling.is_finite() {
            return Err(Error::NonFinite);
        }
        for &(i, j) in edges {
            let q = i.max(j);
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            if i == j {
                return Err(Error::DuplicateQubit(i));
            }
        }
        let dim = 1usize << num_qubits;
        let mut matrix = CMatrix::zeros(dim, dim);
        let z = |idx: usize, q: usize| if idx >> q & 1 == 0 { 1.0 } else { -1.0 };
        for idx in 0..dim {
            let mut diag = 0.0;
            for q in 0..num_qubits {
                diag += biases[q] * z(idx, q);
                let flipped = idx ^ (1 << q);
                matrix[(idx, flipped)] += Complex64::new(tunnelings[q], 0.0);
            }
            for &(i, j) in edges {
                diag += coupling * z(idx, i) * z(idx, j);
            }
            matrix[(idx, idx)] = Complex64::new(diag, 0.0);
        }
        Ok(Self { num_qubits, matrix })
    }

    /// Same parameters on every qubit.
    pub fn uniform(
        num_qubits: usize,
        params: &TubulinParams,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        Self::tubulin(
            num_qubits,
            &vec![params.bias; num_qubits],
            &vec![params.tunneling; num_qubits],
            params.coupling,
            edges,
        )
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_hamiltonian_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        Ok(Self {
            num_qubits,
            matrix: CMatrix::zeros(dim, dim),
        })
    }

    /// Wraps an explicit matrix, checking Hermiticity to 1e-12.
    pub fn from_matrix(num_qubits: usize, matrix: CMatrix) -> Result<Self> {
        check_hamiltonian_size(num_qubits)?;
        if matrix.rows() != 1 << num_qubits || !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                left: matrix.rows(),
                right: 1 << num_qubits,
            });
        }
        let dev = matrix.hermitian_deviation();
        if !(dev <= 1e-12) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { num_qubits, matrix })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Diagonalizes once so that repeated steps cost two matrix-vector
    /// products each.
    pub fn propagator(&self) -> Result<Propagator> {
        Ok(Propagator {
            num_qubits: self.num_qubits,
            eigen: HermitianEigen::new(&self.matrix, 1e-12)?,
        })
    }
}

fn check_hamiltonian_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_HAMILTONIAN_QUBITS {
        return Err(Error::QubitCount {
            got: n,
            max: MAX_HAMILTONIAN_QUBITS,
        });
    }
    Ok(())
}

/// Spectral form of a Hamiltonian, applying `exp(-i H dt)` as
/// `V exp(-i D dt) V†`.
#[derive(Clone, Debug)]
pub struct Propagator {
    num_qubits: usize,
    eigen: HermitianEigen,
}

impl Propagator {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn step(&self, state: &mut PureState, dt: f64) -> Result<()> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::param("dt", "must be positive and finite"));
        }
        if state.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: state.num_qubits,
            });
        }
        let mut coeffs = self.eigen.vectors.adjoint_mul_vec(&state.amplitudes)?;
        for (c, &e) in coeffs.iter_mut().zip(&self.eigen.values) {
            let phase = -e * dt;
            *c *= Complex64::new(libm::cos(phase), libm::sin(phase));
        }
        state.amplitudes = self.eigen.vectors.mul_vec(&coeffs)?;
        Ok(())
    }

    /// The full unitary `exp(-i H dt)`.
    pub fn unitary(&self, dt: f64) -> Result<UnitaryOperator> {
        let n = self.eigen.values.len();
        let v = &self.eigen.vectors;
        let mut phased = v.clone();
        for (c, &e) in self.eigen.values.iter().enumerate() {
            let phase = Complex64::new(libm::cos(-e * dt), libm::sin(-e * dt));
            for r in 0..n {
                phased[(r, c)] *= phase;
            }
        }
        UnitaryOperator::new(phased.matmul(&v.adjoint())?)
    }
}
