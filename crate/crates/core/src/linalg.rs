//! Small dense complex linear algebra: a row-major matrix type, a cyclic
//! Jacobi eigen-solver for Hermitian matrices and a one-sided (Hestenes)
//! Jacobi SVD.
//!
//! Sizes here are at most a few hundred rows, so the O(n³) Jacobi sweeps are
//! preferred for their accuracy on tiny eigen/singular values.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const MAX_SWEEPS: usize = 100;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_rows(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    /// Plain (non-conjugating) transpose.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: v.len(),
            });
        }
        Ok(self
            .data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `self† · v`, without materializing the adjoint.
    pub fn adjoint_mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.rows != v.len() {
            return Err(Error::DimensionMismatch {
                left: self.rows,
                right: v.len(),
            });
        }
        let mut out = vec![ZERO; self.cols];
        for (row, x) in self.data.chunks_exact(self.cols).zip(v) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * x;
            }
        }
        Ok(out)
    }

    /// Largest entrywise deviation `|A - A†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise deviation `|U†U - I|`.
    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let mut dot = ZERO;
                for k in 0..n {
                    dot += self[(k, i)].conj() * self[(k, j)];
                }
                let expected = if i == j { ONE } else { ZERO };
                worst = worst.max((dot - expected).norm());
            }
        }
        worst
    }

    fn column(&self, c: usize) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.rows).map(move |r| self[(r, c)])
    }

    fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Eigen-decomposition `A = V diag(values) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Diagonalizes `a` with cyclic complex Jacobi rotations.
    ///
    /// `tol` bounds the accepted deviation from Hermiticity.
    pub fn new(a: &CMatrix, tol: f64) -> Result<Self> {
        let dev = a.hermitian_deviation();
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        let n = a.rows();
        let mut m = a.clone();
        // Symmetrize exactly so rotations see a Hermitian matrix.
        for r in 0..n {
            m[(r, r)] = Complex64::new(m[(r, r)].re, 0.0);
            for c in r + 1..n {
                let avg = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
                m[(r, c)] = avg;
                m[(c, r)] = avg.conj();
            }
        }
        let mut v = CMatrix::identity(n);
        let scale = m.frobenius_sqr();

        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|r| (r + 1..n).map(move |c| (r, c)))
                .map(|(r, c)| m[(r, c)].norm_sqr())
                .sum();
            if off <= scale * 1e-32 || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    jacobi_rotate(&mut m, &mut v, p, q);
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
        let values = order.iter().map(|&i| m[(i, i)].re).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (new_c, &old_c) in order.iter().enumerate() {
            for r in 0..n {
                vectors[(r, new_c)] = v[(r, old_c)];
            }
        }
        Ok(Self { values, vectors })
    }
}

/// Zeroes `m[p][q]` with a unitary rotation in the (p, q) plane, accumulating
/// the rotation into `v`.
fn jacobi_rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    if r < 1e-300 || (app.abs() + aqq.abs()) * f64::EPSILON * 1e-3 > r {
        m[(p, q)] = ZERO;
        m[(q, p)] = ZERO;
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    let n = m.rows();

    // Rotation block J = diag(1, conj(phase)) * [[c, s], [-s, c]].
    let j_pp = Complex64::new(c, 0.0);
    let j_pq = Complex64::new(s, 0.0);
    let j_qp = -phase.conj() * s;
    let j_qq = phase.conj() * c;

    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * j_pp + akq * j_qp;
        m[(k, q)] = akp * j_pq + akq * j_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        m[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}

/// Thin singular value decomposition `A = U diag(sigma) V†`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// Singular values, descending, length `min(rows, cols)`.
    pub singular_values: Vec<f64>,
    /// `rows × k` matrix of left singular vectors.
    pub u: CMatrix,
    /// `cols × k` matrix of right singular vectors.
    pub v: CMatrix,
}

impl Svd {
    /// One-sided Jacobi SVD. Accurate for singular values far below the
    /// largest one, which matters for rank tests.
    pub fn new(a: &CMatrix) -> Self {
        if a.cols() > a.rows() {
            // A^T = U' S V'^†  =>  A = conj(V') S U'^T
            let t = Self::tall(&a.transpose());
            return Self {
                singular_values: t.singular_values,
                u: conj(&t.v),
                v: conj(&t.u),
            };
        }
        Self::tall(a)
    }

    fn tall(a: &CMatrix) -> Self {
        let (rows, cols) = (a.rows(), a.cols());
        let mut w = a.clone();
        let mut v = CMatrix::identity(cols);

        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for i in 0..cols {
                for j in i + 1..cols {
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = ZERO;
                    for r in 0..rows {
                        let x = w[(r, i)];
                        let y = w[(r, j)];
                        alpha += x.norm_sqr();
                        beta += y.norm_sqr();
                        gamma += x.conj() * y;
                    }
                    let g = gamma.norm();
                    if g == 0.0 || g <= 1e-15 * libm::sqrt(alpha * beta) {
                        continue;
                    }
                    rotated = true;
                    let phase_conj = gamma.conj() / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = if zeta >= 0.0 {
                        1.0 / (zeta + libm::sqrt(1.0 + zeta * zeta))
                    } else {
                        -1.0 / (-zeta + libm::sqrt(1.0 + zeta * zeta))
                    };
                    let c = 1.0 / libm::sqrt(1.0 + t * t);
                    let s = c * t;
                    for r in 0..rows {
                        let x = w[(r, i)];
                        let y = w[(r, j)] * phase_conj;
                        w[(r, i)] = x * c - y * s;
                        w[(r, j)] = x * s + y * c;
                    }
                    for r in 0..cols {
                        let x = v[(r, i)];
                        let y = v[(r, j)] * phase_conj;
                        v[(r, i)] = x * c - y * s;
                        v[(r, j)] = x * s + y * c;
                    }
                }
            }
            if !rotated {
                break;
            }
        }

        let norms: Vec<f64> = (0..cols)
            .map(|c| libm::sqrt(w.column(c).map(|z| z.norm_sqr()).sum::<f64>()))
            .collect();
        let mut order: Vec<usize> = (0..cols).collect();
        order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));

        let mut u = CMatrix::zeros(rows, cols);
        let mut v_sorted = CMatrix::zeros(cols, cols);
        let mut singular_values = Vec::with_capacity(cols);
        for (k, &c) in order.iter().enumerate() {
            let sigma = norms[c];
            singular_values.push(sigma);
            for r in 0..cols {
                v_sorted[(r, k)] = v[(r, c)];
            }
            if sigma > 0.0 {
                for r in 0..rows {
                    u[(r, k)] = w[(r, c)] / sigma;
                }
            }
        }
        Self {
            singular_values,
            u,
            v: v_sorted,
        }
    }
}

fn conj(m: &CMatrix) -> CMatrix {
    CMatrix {
        rows: m.rows,
        cols: m.cols,
        data: m.data.iter().map(|z| z.conj()).collect(),
    }
}
