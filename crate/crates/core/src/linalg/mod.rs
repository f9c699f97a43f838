//! Dense complex matrices and the decompositions the solvers are built on.
//!
//! Everything here is small-dimensional and dense: the matrices that appear
//! in a finite spectral triple have at most a few dozen rows, so cyclic
//! Jacobi methods are used throughout for their accuracy and deterministic
//! sweep order.

mod eig;
mod qr;
mod svd;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use eig::{hermitian_eig, HermitianEig};
pub use svd::{
    clip_to_operator_ball, nuclear_norm, operator_norm, singular_value_soft_threshold, svd,
    thin_svd, Svd,
};

pub(crate) use qr::householder_r;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting bad lengths and
    /// non-finite components.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Argument(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Square matrix with the given real diagonal.
    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    /// Real matrix from row-major entries.
    pub fn from_real(rows: usize, cols: usize, re: &[T]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            re.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        )
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

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.mul_unchecked(rhs))
    }

    pub(crate) fn mul_unchecked(&self, rhs: &Self) -> Self {
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let mut out = Self::zeros(n, m);
        for i in 0..n {
            let row = &self.data[i * k..(i + 1) * k];
            let dst = &mut out.data[i * m..(i + 1) * m];
            for (l, &a) in row.iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let src = &rhs.data[l * m..(l + 1) * m];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// `self += s * other`, shapes assumed equal.
    pub fn axpy(&mut self, s: T, other: &Self) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn trace(&self) -> Complex<T> {
        self.diagonal().into_iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    /// Real Frobenius pairing `Re Tr(self† other)`.
    pub fn inner(&self, other: &Self) -> T {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// `Tr(self · other)` without conjugation.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        debug_assert_eq!(self.cols, other.rows);
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// `(M − M†)/2`.
    pub fn antihermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] - self[(j, i)].conj()) * half)
    }

    /// Largest entrywise deviation from `M = M†`.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_diagonal(&self, tol: T) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    /// Keeps the diagonal, zeroing everything else.
    pub fn diagonal_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            if i == j {
                self[(i, j)]
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    fn assert_same_shape(&self, other: &Self, op: &str) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "{op}: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.assert_same_shape(rhs, "add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.assert_same_shape(rhs, "sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

/// Panics on incompatible shapes; use [`ComplexMatrix::matmul`] for a checked product.
impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs).expect("matrix product shapes")
    }
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols.max(1)) {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

/// `ab − ba`.
pub fn commutator<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if !a.is_square() || !b.is_square() || a.rows != b.rows {
        return Err(Error::Shape(format!(
            "commutator of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(commutator_unchecked(a, b))
}

pub(crate) fn commutator_unchecked<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut ab = a.mul_unchecked(b);
    let ba = b.mul_unchecked(a);
    for (x, &y) in ab.data.iter_mut().zip(&ba.data) {
        *x -= y;
    }
    ab
}

/// Self-adjoint square matrix.
///
/// The default constructor symmetrizes its input as `(M + M†)/2`, so the
/// stored entries satisfy `M = M†` exactly.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix<T> {
    inner: ComplexMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", m.rows(), m.cols())));
        }
        Ok(Self {
            inner: m.hermitian_part(),
        })
    }

    /// Rejects inputs whose Hermitian defect exceeds `tol` instead of
    /// silently symmetrizing them.
    pub fn new_strict(m: ComplexMatrix<T>, tol: T) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", m.rows(), m.cols())));
        }
        let defect = m.hermitian_defect();
        if defect > tol {
            return Err(Error::Argument(format!(
                "matrix deviates from its adjoint by {defect:e}"
            )));
        }
        Ok(Self {
            inner: m.hermitian_part(),
        })
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        Self {
            inner: ComplexMatrix::from_diag(diag),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.inner
    }

    /// `Tr(self · other)` for another Hermitian matrix; always real.
    pub fn pairing(&self, other: &Self) -> T {
        self.inner.inner(&other.inner)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            inner: self.inner.scale(s),
        }
    }

    pub fn conjugate_by(&self, unitary: &ComplexMatrix<T>) -> Self {
        let m = unitary.mul_unchecked(&self.inner).mul_unchecked(&unitary.adjoint());
        Self {
            inner: m.hermitian_part(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for HermitianMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.inner)
    }
}

impl<T: Real> AsRef<ComplexMatrix<T>> for HermitianMatrix<T> {
    fn as_ref(&self) -> &ComplexMatrix<T> {
        &self.inner
    }
}
