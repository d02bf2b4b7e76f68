//! Dense complex linear algebra for the handful of dimensions (2 to 16) the
//! simulator needs.
//!
//! Everything here is a pure function of its inputs. The Hermitian
//! eigensolver is a cyclic complex Jacobi iteration, which is exact to a few
//! ulps at these sizes and needs no external numerics.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute tolerance for `M = M†`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues below this are treated as zero by [`inverse_sqrt`].
pub const PINV_CUTOFF: f64 = 1e-12;

const MAX_JACOBI_SWEEPS: usize = 64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Row-major dense complex matrix. Column vectors are `n x 1` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = r(1.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| r(x)).collect())
    }

    pub fn column(entries: &[C64]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(r(s))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Largest `|m_ij - conj(m_ji)|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let mut out = self + &adj;
        out.data.iter_mut().for_each(|z| *z *= 0.5);
        out
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    /// Largest deviation of `M†M` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix sum shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix difference shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
}

pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

/// Spectral decomposition `M = V diag(values) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Sorted in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    m.require_hermitian()?;
    Ok(jacobi(m.hermitian_part()))
}

fn off_diagonal_sqr(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi(mut a: ComplexMatrix) -> HermitianEig {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let scale: f64 = a.entries().iter().map(|z| z.norm_sqr()).sum();

    for _ in 0..MAX_JACOBI_SWEEPS {
        let off = off_diagonal_sqr(&a);
        if off == 0.0 || off <= scale * 1e-32 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)];
                let g_abs = g.norm();
                if g_abs == 0.0 {
                    continue;
                }
                // Phase-strip the pivot, then a real Jacobi rotation zeroes it.
                let phase = (g / g_abs).conj();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g_abs);
                let t = if theta >= 0.0 {
                    1.0 / (theta + Float::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + Float::sqrt(theta * theta + 1.0))
                };
                let cs = 1.0 / Float::sqrt(t * t + 1.0);
                let sn = t * cs;
                let j_pp = r(cs);
                let j_pq = r(sn);
                let j_qp = phase * (-sn);
                let j_qq = phase * cs;

                // A <- A J and V <- V J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j_pp + akq * j_qp;
                    a[(k, q)] = akp * j_pq + akq * j_qq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j_pp + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * j_qq;
                }
                // A <- J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[(p, q)] = C64::zero();
                a[(q, p)] = C64::zero();
                a[(p, p)] = r(a[(p, p)].re);
                a[(q, q)] = r(a[(q, q)].re);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new)] = v[(i, old)];
        }
    }
    HermitianEig { values, vectors }
}

/// `V diag(f(λ)) V†` for Hermitian `m`.
pub fn herm_matrix_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.map(f))
}

/// Principal square root, with small negative eigenvalues clamped to zero.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    herm_matrix_function(m, |x| if x > 0.0 { Float::sqrt(x) } else { 0.0 })
}

/// Pseudo-inverse square root: eigenvalues at or below [`PINV_CUTOFF`] map to zero.
pub fn inverse_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    herm_matrix_function(m, inv_sqrt_scalar)
}

pub(crate) fn inv_sqrt_scalar(x: f64) -> f64 {
    if x > PINV_CUTOFF {
        1.0 / Float::sqrt(x)
    } else {
        0.0
    }
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.values.iter().map(|x| x.abs()).sum())
}

/// Multiple of machine epsilon, per unit of dimension and operand scale, that
/// separates a genuine eigenvalue of `x - y` from rounding noise.
pub const NOISE_ULPS: f64 = 16.0;

/// Eigenvalues of `x - y` at or below this magnitude are rounding noise.
pub fn difference_floor(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    let dim = x.rows().max(y.rows()) as f64;
    NOISE_ULPS * f64::EPSILON * dim * dim * x.max_abs().max(y.max_abs())
}

/// Trace norm of `x - y` with rounding-noise eigenvalues dropped, so that
/// operands equal up to roundoff give exactly zero.
pub fn trace_norm_of_difference(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    let floor = difference_floor(x, y);
    let diff = (x - y).hermitian_part();
    Ok(hermitian_eig(&diff)?
        .values
        .iter()
        .map(|v| v.abs())
        .filter(|&v| v > floor)
        .sum::<f64>()
        + 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn unif(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let data = (0..n * n)
            .map(|_| c(2.0 * unif(rng) - 1.0, 2.0 * unif(rng) - 1.0))
            .collect();
        ComplexMatrix::from_vec(n, n, data).unwrap()
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        random_matrix(rng, n).hermitian_part()
    }

    fn ket(amps: &[C64]) -> ComplexMatrix {
        ComplexMatrix::column(amps)
    }

    #[test]
    fn tensor_basis_cases() {
        let zero = ket(&[r(1.0), r(0.0)]);
        let one = ket(&[r(0.0), r(1.0)]);
        let k01 = tensor_product(&zero, &one);
        assert_eq!(k01, ket(&[r(0.0), r(1.0), r(0.0), r(0.0)]));

        let ix = tensor_product(&ComplexMatrix::identity(2), &pauli_x());
        let k00 = zero.tensor(&zero);
        assert_eq!(&ix * &k00, k01);

        let v4 = zero.tensor(&one);
        let v8 = one.tensor(&v4);
        assert_eq!((v8.rows(), v8.cols()), (8, 1));
    }

    #[test]
    fn tensor_mixed_product_and_associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 2);
        let b = random_matrix(&mut rng, 2);
        let cm = random_matrix(&mut rng, 2);
        let d = random_matrix(&mut rng, 2);
        let lhs = &a.tensor(&b) * &cm.tensor(&d);
        let rhs = (&a * &cm).tensor(&(&b * &d));
        assert!(lhs.approx_eq(&rhs, 1e-12));

        let x = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = ComplexMatrix::from_real(2, 1, &[5.0, -6.0]).unwrap();
        let z = ComplexMatrix::from_real(1, 2, &[7.0, 8.0]).unwrap();
        assert_eq!(x.tensor(&y).tensor(&z), x.tensor(&y.tensor(&z)));
    }

    #[test]
    fn adjoint_cases() {
        assert_eq!(adjoint(&pauli_z()), pauli_z());
        let psi = ket(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let bra = psi.adjoint();
        assert_eq!((bra.rows(), bra.cols()), (1, 2));
        assert_eq!(bra[(0, 1)], c(0.0, -0.8));

        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = c(0.0, 2f64.sqrt());
        let adj = m.adjoint();
        assert_eq!(adj[(1, 0)], c(0.0, -(2f64.sqrt())));
        assert_eq!(adj.adjoint(), m);
    }

    #[test]
    fn eig_of_paulis() {
        let ez = hermitian_eig(&pauli_z()).unwrap();
        assert_eq!(ez.values, vec![1.0, -1.0]);
        assert!((ez.vectors[(0, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((ez.vectors[(1, 1)].norm() - 1.0).abs() < 1e-15);

        let ex = hermitian_eig(&pauli_x()).unwrap();
        assert!((ex.values[0] - 1.0).abs() < 1e-15 && (ex.values[1] + 1.0).abs() < 1e-15);
        let plus = ex.vectors.col(0);
        let minus = ex.vectors.col(1);
        assert!(((plus[0] * plus[1].conj()).re - 0.5).abs() < 1e-14);
        assert!(((minus[0] * minus[1].conj()).re + 0.5).abs() < 1e-14);
        assert!((plus[0].norm() - FRAC_1_SQRT_2).abs() < 1e-14);

        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let eh = hermitian_eig(&half).unwrap();
        assert_eq!(eh.values, vec![0.5, 0.5]);
        let vv = &eh.vectors.adjoint() * &eh.vectors;
        assert!(vv.approx_eq(&ComplexMatrix::identity(2), 1e-14));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(Error::NotSquare { .. })));
        assert!(trace_norm(&m).is_err());
        assert!(herm_matrix_function(&m, |x| x).is_err());
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 3, 4, 8, 16] {
            for _ in 0..20 {
                let m = random_hermitian(&mut rng, n);
                let e = hermitian_eig(&m).unwrap();
                let rebuilt = e.map(|x| x);
                assert!(rebuilt.approx_eq(&m, 1e-10), "n={n}");
                let vv = &e.vectors.adjoint() * &e.vectors;
                assert!(vv.approx_eq(&ComplexMatrix::identity(n), 1e-10));
                assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
                let sum: f64 = e.values.iter().sum();
                assert!((sum - m.trace().re).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn matrix_functions_on_half_identity() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let s = herm_matrix_function(&half, f64::sqrt).unwrap();
        assert!(s.approx_eq(&ComplexMatrix::identity(2).scale_real(FRAC_1_SQRT_2), 1e-15));
        let is = inverse_sqrt(&half).unwrap();
        assert!(is.approx_eq(&ComplexMatrix::identity(2).scale_real(2f64.sqrt()), 1e-14));
    }

    #[test]
    fn inverse_sqrt_is_pseudo_inverse_on_support() {
        let p0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let is = inverse_sqrt(&p0.scale_real(0.25)).unwrap();
        assert!(is.approx_eq(&p0.scale_real(2.0), 1e-14));
        let zero = ComplexMatrix::zeros(2, 2);
        assert_eq!(inverse_sqrt(&zero).unwrap(), zero);
    }

    #[test]
    fn sqrt_round_trip_on_random_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for i in 0..100 {
            let n = 2 + i % 3;
            let g = random_matrix(&mut rng, n);
            let m = &g * &g.adjoint();
            let s = sqrt_psd(&m).unwrap();
            assert!((&s * &s).approx_eq(&m, 1e-10));
        }
    }

    #[test]
    fn trace_norm_cases() {
        assert!((trace_norm(&pauli_z()).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(trace_norm(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
    }

    // Independent oracle: closed-form eigenvalues of a 2x2 Hermitian matrix.
    fn trace_norm_2x2_closed_form(m: &ComplexMatrix) -> f64 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)].norm();
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        (mean + rad).abs() + (mean - rad).abs()
    }

    #[test]
    fn trace_norm_of_pure_state_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let random_ket = |rng: &mut ChaCha8Rng| {
            let v = [
                c(unif(rng) - 0.5, unif(rng) - 0.5),
                c(unif(rng) - 0.5, unif(rng) - 0.5),
            ];
            let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            ket(&[v[0] / n, v[1] / n])
        };
        for _ in 0..100 {
            let psi = random_ket(&mut rng);
            let phi = random_ket(&mut rng);
            let diff = &(&psi * &psi.adjoint()) - &(&phi * &phi.adjoint());
            let overlap = (&psi.adjoint() * &phi)[(0, 0)].norm_sqr();
            let expected = 2.0 * (1.0 - overlap).sqrt();
            let oracle = trace_norm_2x2_closed_form(&diff);
            let got = trace_norm(&diff).unwrap();
            assert!((oracle - expected).abs() < 1e-10);
            assert!((got - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_norm_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for n in [2usize, 4] {
            for _ in 0..25 {
                let h = random_hermitian(&mut rng, n);
                let u = hermitian_eig(&h).unwrap().vectors;
                let m = random_hermitian(&mut rng, n);
                let rotated = &(&u * &m) * &u.adjoint();
                let a = trace_norm(&m).unwrap();
                let b = trace_norm(&rotated).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn difference_norm_ignores_roundoff_only() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let mut nudged = half.clone();
        nudged[(0, 0)] += r(3e-16);
        nudged[(1, 1)] -= r(3e-16);
        assert_eq!(trace_norm_of_difference(&half, &nudged).unwrap(), 0.0);
        nudged[(0, 0)] += r(1e-12);
        let n = trace_norm_of_difference(&half, &nudged).unwrap();
        assert!((n - 1.0e-12).abs() < 1e-15);
    }
}
