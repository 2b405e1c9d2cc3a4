//! Dense complex matrix engine.
//!
//! [`CMatrix`] is a row-major dense matrix of [`Complex`] entries. It carries
//! every operator, density matrix and unitary in the crate. Hermitian
//! eigendecomposition is delegated to `nalgebra`; everything else (products,
//! commutators, characteristic coefficients, similarity transforms) is done
//! here.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use itertools::Itertools;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Relative Hermiticity tolerance, scaled by `max |M|`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Largest dimension accepted by [`char_coeffs`].
pub const MAX_MINOR_DIM: usize = 12;
/// Largest condition-number estimate accepted by [`similarity`].
pub const MAX_CONDITION: f64 = 1e12;

const EIGH_MAX_ITER: usize = 100_000;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
pub const I: Complex = Complex::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
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
        for k in 0..n {
            m[(k, k)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Rejects wrong lengths and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadLength {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                op: "from_row_major",
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(
            rows,
            cols,
            data.iter().map(|&x| Complex::new(x, 0.0)).collect(),
        )
    }

    pub fn from_diag(diag: &[Complex]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = Complex::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
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

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |M - M†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Hermitian within `HERMITIAN_TOL * max|M|`.
    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermitian_deviation() <= HERMITIAN_TOL * self.max_abs()
    }

    pub fn ensure_hermitian(&self, op: &'static str) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                op,
                rows: self.rows,
                cols: self.cols,
            });
        }
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL * self.max_abs() {
            return Err(Error::NotHermitian { op, deviation });
        }
        Ok(())
    }

    /// Checked product `self · rhs`.
    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(self.mismatch("matmul", rhs));
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Checked matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                op: "mul_vec",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: v.len(),
                right_cols: 1,
            });
        }
        Ok(self
            .data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    pub fn checked_add(&self, rhs: &CMatrix) -> Result<CMatrix> {
        self.zip_with("add", rhs, |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &CMatrix) -> Result<CMatrix> {
        self.zip_with("sub", rhs, |a, b| a - b)
    }

    /// Real parts as an `nalgebra` matrix.
    pub fn re(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].re)
    }

    pub fn from_nalgebra_real(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| Complex::new(m[(i, j)], 0.0))
    }

    fn zip_with(
        &self,
        op: &'static str,
        rhs: &CMatrix,
        f: impl Fn(Complex, Complex) -> Complex,
    ) -> Result<CMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(self.mismatch(op, rhs));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    fn mismatch(&self, op: &'static str, rhs: &CMatrix) -> Error {
        Error::DimensionMismatch {
            op,
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: rhs.rows,
            right_cols: rhs.cols,
        }
    }

    fn to_nalgebra(&self) -> DMatrix<Complex> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex;

    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols.max(1)) {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator sugar for internal use where the shapes are known to agree.
// Mismatched shapes panic; the checked methods above return errors.

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.checked_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.checked_sub(rhs)
            .expect("matrix difference shape mismatch")
    }
}

impl Mul<Complex> for &CMatrix {
    type Output = CMatrix;

    fn mul(self, s: Complex) -> CMatrix {
        self.scale(s)
    }
}

impl Mul<f64> for &CMatrix {
    type Output = CMatrix;

    fn mul(self, s: f64) -> CMatrix {
        self.scale(Complex::new(s, 0.0))
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale(-ONE)
    }
}

fn check_same_square(op: &'static str, a: &CMatrix, b: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op,
            rows: a.rows,
            cols: a.cols,
        });
    }
    if a.rows != b.rows || a.cols != b.cols {
        return Err(a.mismatch(op, b));
    }
    Ok(())
}

/// `AB − BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_same_square("commutator", a, b)?;
    a.matmul(b)?.checked_sub(&b.matmul(a)?)
}

/// `AB + BA`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_same_square("anticommutator", a, b)?;
    a.matmul(b)?.checked_add(&b.matmul(a)?)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `eigenvalues` are ascending; the columns of `eigenvectors` are the
/// matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct EighResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EighResult {
    /// `exp(i·s·M)` as a dense matrix.
    pub fn exp_i(&self, s: f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let phases: Vec<Complex> = self
            .eigenvalues
            .iter()
            .map(|&l| Complex::from_polar(1.0, s * l))
            .collect();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += v[(i, k)] * phases[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// `exp(i·s·M)·x` without forming the exponential.
    pub fn exp_i_apply(&self, s: f64, x: &[Complex]) -> Result<Vec<Complex>> {
        let n = self.eigenvalues.len();
        if x.len() != n {
            return Err(Error::BadLength {
                expected: n,
                got: x.len(),
            });
        }
        let v = &self.eigenvectors;
        // coordinates in the eigenbasis, then phase, then back
        let mut coords = vec![ZERO; n];
        for i in 0..n {
            let xi = x[i];
            if xi == ZERO {
                continue;
            }
            for (k, c) in coords.iter_mut().enumerate() {
                *c += v[(i, k)].conj() * xi;
            }
        }
        for (c, &l) in coords.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex::from_polar(1.0, s * l);
        }
        Ok(v.mul_vec(&coords).expect("eigenvector matrix is square"))
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn eigh(m: &CMatrix) -> Result<EighResult> {
    m.ensure_hermitian("eigh")?;
    if !m
        .as_slice()
        .iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
    {
        return Err(Error::NonFinite { op: "eigh" });
    }
    let n = m.rows;
    // symmetrize so the solver sees an exactly Hermitian input
    let sym = CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let eig = nalgebra::SymmetricEigen::try_new(sym.to_nalgebra(), f64::EPSILON, EIGH_MAX_ITER)
        .ok_or(Error::NoConvergence {
            iterations: EIGH_MAX_ITER,
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EighResult {
        eigenvalues,
        eigenvectors,
    })
}

/// `U = exp(i·s·H)` for Hermitian `H`, via eigendecomposition.
pub fn expm_skew(h: &CMatrix, s: f64) -> Result<CMatrix> {
    Ok(eigh(h)?.exp_i(s))
}

/// Characteristic coefficients `(C_1, …, C_n)` of a real (within tolerance)
/// square matrix, where `C_r` is the sum of all `r×r` principal minors.
/// `C_1` is the trace and `C_n` the determinant.
pub fn char_coeffs(phi: &CMatrix) -> Result<Vec<f64>> {
    if !phi.is_square() {
        return Err(Error::NotSquare {
            op: "char_coeffs",
            rows: phi.rows,
            cols: phi.cols,
        });
    }
    let n = phi.rows;
    if n > MAX_MINOR_DIM {
        return Err(Error::TooLarge {
            n,
            max: MAX_MINOR_DIM,
        });
    }
    let residue = phi
        .as_slice()
        .iter()
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    if residue > 1e-8 * phi.max_abs().max(1.0) {
        return Err(Error::NotReal {
            op: "char_coeffs",
            residue,
        });
    }
    let re: Vec<f64> = phi.as_slice().iter().map(|z| z.re).collect();
    Ok(principal_minor_sums(&re, n))
}

pub(crate) fn principal_minor_sums(a: &[f64], n: usize) -> Vec<f64> {
    let mut sub = Vec::with_capacity(n * n);
    (1..=n)
        .map(|r| {
            (0..n)
                .combinations(r)
                .map(|idx| {
                    sub.clear();
                    for &i in &idx {
                        for &j in &idx {
                            sub.push(a[i * n + j]);
                        }
                    }
                    if r <= 4 {
                        det_cofactor(&sub, r)
                    } else {
                        det_lu(&mut sub, r)
                    }
                })
                .sum()
        })
        .collect()
}

/// Laplace expansion along the first row; used for `n ≤ 4`.
fn det_cofactor(a: &[f64], n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        _ => {
            let mut minor = Vec::with_capacity((n - 1) * (n - 1));
            let mut det = 0.0;
            for col in 0..n {
                minor.clear();
                for i in 1..n {
                    for j in (0..n).filter(|&j| j != col) {
                        minor.push(a[i * n + j]);
                    }
                }
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                det += sign * a[col] * det_cofactor(&minor, n - 1);
            }
            det
        }
    }
}

/// LU with partial pivoting; destroys `a`.
fn det_lu(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
            .expect("non-empty pivot range");
        if a[pivot * n + k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
            det = -det;
        }
        let p = a[k * n + k];
        det *= p;
        for i in k + 1..n {
            let factor = a[i * n + k] / p;
            if factor == 0.0 {
                continue;
            }
            for j in k..n {
                a[i * n + j] -= factor * a[k * n + j];
            }
        }
    }
    det
}

/// Gauss–Jordan inverse with partial pivoting. Fails on singular input or
/// when the 1-norm condition estimate exceeds [`MAX_CONDITION`].
pub fn inverse(t: &CMatrix) -> Result<CMatrix> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            op: "inverse",
            rows: t.rows,
            cols: t.cols,
        });
    }
    let n = t.rows;
    let mut a = t.clone();
    let mut inv = CMatrix::identity(n);
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm()))
            .expect("non-empty pivot range");
        if a[(pivot, k)].norm() == 0.0 {
            return Err(Error::Singular {
                op: "inverse",
                condition: f64::INFINITY,
            });
        }
        if pivot != k {
            for j in 0..n {
                a.data.swap(k * n + j, pivot * n + j);
                inv.data.swap(k * n + j, pivot * n + j);
            }
        }
        let p = a[(k, k)].inv();
        for j in 0..n {
            a[(k, j)] *= p;
            inv[(k, j)] *= p;
        }
        for i in (0..n).filter(|&i| i != k) {
            let factor = a[(i, k)];
            if factor == ZERO {
                continue;
            }
            for j in 0..n {
                let (akj, ikj) = (a[(k, j)], inv[(k, j)]);
                a[(i, j)] -= factor * akj;
                inv[(i, j)] -= factor * ikj;
            }
        }
    }
    let condition = norm_1(t) * norm_1(&inv);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::Singular {
            op: "inverse",
            condition,
        });
    }
    Ok(inv)
}

fn norm_1(m: &CMatrix) -> f64 {
    (0..m.cols)
        .map(|j| (0..m.rows).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `T Φ T⁻¹`.
pub fn similarity(phi: &CMatrix, t: &CMatrix) -> Result<CMatrix> {
    check_same_square("similarity", phi, t)?;
    let t_inv = inverse(t).map_err(|e| match e {
        Error::Singular { condition, .. } => Error::Singular {
            op: "similarity",
            condition,
        },
        other => other,
    })?;
    t.matmul(phi)?.matmul(&t_inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_real(rows, cols, data).unwrap()
    }

    #[test]
    fn identity_commutes() {
        let m = CMatrix::from_fn(3, 3, |i, j| Complex::new(i as f64, j as f64 - 1.0));
        let z = commutator(&CMatrix::identity(3), &m).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn commutator_two_by_two() {
        let a = CMatrix::from_real_diag(&[1.0, 2.0]);
        let b = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let z = commutator(&a, &b).unwrap();
        assert_eq!(z, real(2, 2, &[0.0, -1.0, 0.0, 0.0]));
    }

    #[test]
    fn anticommutator_identities() {
        let m = CMatrix::from_fn(3, 3, |i, j| Complex::new((i * 3 + j) as f64, 0.5));
        let two_m = anticommutator(&CMatrix::identity(3), &m).unwrap();
        assert_eq!(two_m, &m * 2.0);
        let sq = anticommutator(&m, &m).unwrap();
        assert_eq!(sq, &(&m * &m) * 2.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = CMatrix::identity(2);
        let b = CMatrix::identity(3);
        assert!(matches!(
            commutator(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            anticommutator(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(a.matmul(&CMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn rejects_non_finite_entries() {
        let r = CMatrix::from_row_major(1, 1, vec![Complex::new(f64::NAN, 0.0)]);
        assert!(matches!(r, Err(Error::NonFinite { .. })));
        assert!(matches!(
            CMatrix::from_row_major(2, 2, vec![ONE]),
            Err(Error::BadLength { .. })
        ));
    }

    #[test]
    fn eigh_small_cases() {
        let e = eigh(&CMatrix::from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0]);

        let e = eigh(&CMatrix::identity(4)).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| (l - 1.0).abs() < 1e-14));

        let e = eigh(&real(2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_complex_hermitian_residual() {
        let h = CMatrix::from_row_major(
            3,
            3,
            vec![
                c(2.0),
                Complex::new(0.5, -1.0),
                Complex::new(0.0, 0.3),
                Complex::new(0.5, 1.0),
                c(-1.0),
                c(0.7),
                Complex::new(0.0, -0.3),
                c(0.7),
                c(0.25),
            ],
        )
        .unwrap();
        let e = eigh(&h).unwrap();
        let v = &e.eigenvectors;
        let lhs = &h * v;
        let rhs = v * &CMatrix::from_real_diag(&e.eigenvalues);
        assert!((&lhs - &rhs).max_abs() < 1e-10 * h.max_abs());
        let gram = &v.adjoint() * v;
        assert!((&gram - &CMatrix::identity(3)).max_abs() < 1e-10);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn expm_skew_basics() {
        let h = CMatrix::from_real_diag(&[0.0, std::f64::consts::PI]);
        let u0 = expm_skew(&h, 0.0).unwrap();
        assert!((&u0 - &CMatrix::identity(2)).max_abs() < 1e-15);
        let u = expm_skew(&h, 1.0).unwrap();
        assert!((&u - &CMatrix::from_real_diag(&[1.0, -1.0])).max_abs() < 1e-15);
    }

    #[test]
    fn exp_i_apply_matches_dense() {
        let h = real(3, 3, &[1.0, 0.2, 0.0, 0.2, -0.5, 0.4, 0.0, 0.4, 2.0]);
        let e = eigh(&h).unwrap();
        let x = vec![ONE, Complex::new(0.0, 1.0), c(-0.5)];
        let dense = e.exp_i(0.7).mul_vec(&x).unwrap();
        let applied = e.exp_i_apply(0.7, &x).unwrap();
        for (a, b) in dense.iter().zip(&applied) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn char_coeffs_small_cases() {
        assert_eq!(
            char_coeffs(&CMatrix::identity(3)).unwrap(),
            vec![3.0, 3.0, 1.0]
        );
        assert_eq!(
            char_coeffs(&real(2, 2, &[2.0, 1.0, 1.0, 3.0])).unwrap(),
            vec![5.0, 5.0]
        );
    }

    #[test]
    fn char_coeffs_errors() {
        assert!(matches!(
            char_coeffs(&CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        let err = char_coeffs(&CMatrix::identity(13)).unwrap_err();
        assert!(err.to_string().contains("use eigenvalue route"));
        let complex = CMatrix::from_row_major(1, 1, vec![Complex::new(1.0, 0.5)]).unwrap();
        assert!(matches!(char_coeffs(&complex), Err(Error::NotReal { .. })));
    }

    #[test]
    fn lu_and_cofactor_determinants_agree() {
        let a: Vec<f64> = (0..25).map(|k| ((k * 7 + 3) % 11) as f64 - 4.5).collect();
        let cof = {
            // 5x5 through cofactor recursion
            det_cofactor(&a, 5)
        };
        let lu = det_lu(&mut a.clone(), 5);
        assert!((cof - lu).abs() < 1e-9 * cof.abs().max(1.0));
    }

    #[test]
    fn similarity_cases() {
        let phi = real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(similarity(&phi, &CMatrix::identity(2)).unwrap(), phi);

        let perm = real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let d = similarity(&CMatrix::from_real_diag(&[1.0, 2.0]), &perm).unwrap();
        assert_eq!(d, CMatrix::from_real_diag(&[2.0, 1.0]));

        let singular = real(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            similarity(&phi, &singular),
            Err(Error::Singular { .. })
        ));
    }
}
