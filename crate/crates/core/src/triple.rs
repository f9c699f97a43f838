//! Finite spectral triples `A ⊂ Mₙ(ℂ)`, `H = ℂⁿ ⊗ ℂᴺ`, `D = Σᵢ Lᵢ ⊗ Eᵢᵢ`.
//!
//! `D` is never assembled: it is block diagonal, so `[D, a ⊗ 1]` is the
//! tuple of commutators `([Lᵢ, a])ᵢ`, its operator norm is the largest block
//! norm, and the dual (nuclear) norm of a one-form is the sum of block
//! nuclear norms.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    commutator_unchecked, hermitian_eig, nuclear_norm, operator_norm, thin_svd, ComplexMatrix,
    HermitianMatrix,
};
use crate::scalar::Real;

/// Which subalgebra of `Mₙ(ℂ)` is represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algebra {
    /// All of `Mₙ(ℂ)`.
    Full,
    /// The commutative diagonal subalgebra `ℂⁿ`.
    Diagonal,
}

/// Relative cutoff below which singular values of `∇` count as zero.
pub const KERNEL_THRESHOLD: f64 = 1e-9;
/// Absolute tolerance on `|Tr(Δρ k)|` for kernel elements `k`.
pub const FINITENESS_TOLERANCE: f64 = 1e-9;
const STATE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralTriple<T> {
    n: usize,
    dirac: Vec<HermitianMatrix<T>>,
    algebra: Algebra,
}

impl<T: Real> SpectralTriple<T> {
    pub fn new(dirac: Vec<HermitianMatrix<T>>, algebra: Algebra) -> Result<Self> {
        let Some(first) = dirac.first() else {
            return Err(Error::Argument("a triple needs at least one Dirac block".into()));
        };
        let n = first.dim();
        if n == 0 {
            return Err(Error::Argument("algebra dimension must be at least 1".into()));
        }
        if let Some(i) = dirac.iter().position(|l| l.dim() != n) {
            return Err(Error::Shape(format!(
                "block {i} is {}x{}, expected {n}x{n}",
                dirac[i].dim(),
                dirac[i].dim()
            )));
        }
        Ok(Self { n, dirac, algebra })
    }

    /// Matrix size `n` of `A = Mₙ(ℂ)`.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number `N` of Dirac blocks.
    pub fn blocks(&self) -> usize {
        self.dirac.len()
    }

    pub fn dirac_blocks(&self) -> &[HermitianMatrix<T>] {
        &self.dirac
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    /// `maxᵢ ‖Lᵢ‖_op`, the scale against which kernel cutoffs are measured.
    pub fn dirac_scale(&self) -> T {
        self.dirac
            .iter()
            .map(|l| operator_norm(l.as_matrix()).unwrap_or(T::zero()))
            .fold(T::zero(), T::max)
    }

    /// Same triple with every `Lᵢ` multiplied by `s`.
    pub fn scaled(&self, s: T) -> Self {
        Self {
            n: self.n,
            dirac: self.dirac.iter().map(|l| l.scale(s)).collect(),
            algebra: self.algebra,
        }
    }

    /// Same triple with every `Lᵢ` replaced by `U Lᵢ U†`.
    pub fn conjugated(&self, unitary: &ComplexMatrix<T>) -> Self {
        Self {
            n: self.n,
            dirac: self.dirac.iter().map(|l| l.conjugate_by(unitary)).collect(),
            algebra: self.algebra,
        }
    }

    fn check_element(&self, a: &ComplexMatrix<T>) -> Result<()> {
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::Shape(format!(
                "element is {}x{}, algebra is M_{}",
                a.rows(),
                a.cols(),
                self.n
            )));
        }
        if self.algebra == Algebra::Diagonal && !a.is_diagonal(T::zero()) {
            return Err(Error::Mode("element is not diagonal in Diagonal mode".into()));
        }
        Ok(())
    }

    /// `∇a = [D, a] = ([Lᵢ, a])ᵢ`.
    pub fn nabla(&self, a: &HermitianMatrix<T>) -> Result<OneForm<T>> {
        self.check_element(a.as_matrix())?;
        Ok(self.nabla_unchecked(a.as_matrix()))
    }

    /// `∇` extended to arbitrary `n × n` matrices, ignoring the algebra mode.
    pub fn nabla_general(&self, a: &ComplexMatrix<T>) -> Result<OneForm<T>> {
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::Shape(format!("element is {}x{}", a.rows(), a.cols())));
        }
        Ok(self.nabla_unchecked(a))
    }

    pub(crate) fn nabla_unchecked(&self, a: &ComplexMatrix<T>) -> OneForm<T> {
        OneForm {
            blocks: self
                .dirac
                .iter()
                .map(|l| commutator_unchecked(l.as_matrix(), a))
                .collect(),
        }
    }

    /// `L(a) = ‖[D, a]‖ = maxᵢ ‖[Lᵢ, a]‖_op`.
    pub fn lipschitz_seminorm(&self, a: &HermitianMatrix<T>) -> Result<T> {
        self.check_element(a.as_matrix())?;
        self.lipschitz_unchecked(a.as_matrix())
    }

    pub(crate) fn lipschitz_unchecked(&self, a: &ComplexMatrix<T>) -> Result<T> {
        let mut worst = T::zero();
        for l in &self.dirac {
            worst = worst.max(operator_norm(&commutator_unchecked(l.as_matrix(), a))?);
        }
        Ok(worst)
    }

    /// `Σᵢ [Lᵢ, uᵢ]`, projected onto the represented algebra in Diagonal mode.
    pub fn divergence(&self, u: &OneForm<T>) -> Result<ComplexMatrix<T>> {
        self.check_form(u)?;
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for (l, b) in self.dirac.iter().zip(&u.blocks) {
            acc = &acc + &commutator_unchecked(l.as_matrix(), b);
        }
        Ok(match self.algebra {
            Algebra::Full => acc,
            Algebra::Diagonal => acc.diagonal_part(),
        })
    }

    pub(crate) fn check_form(&self, u: &OneForm<T>) -> Result<()> {
        if u.blocks.len() != self.blocks() {
            return Err(Error::Shape(format!(
                "one-form has {} blocks, triple has {}",
                u.blocks.len(),
                self.blocks()
            )));
        }
        if let Some(b) = u.blocks.iter().find(|b| b.rows() != self.n || b.cols() != self.n) {
            return Err(Error::Shape(format!("one-form block is {}x{}", b.rows(), b.cols())));
        }
        Ok(())
    }

    /// Orthogonal projection (under `Re Tr(x†y)`) onto the represented
    /// algebra: identity in Full mode, diagonal extraction in Diagonal mode.
    pub fn algebra_projection(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        match self.algebra {
            Algebra::Full => m.clone(),
            Algebra::Diagonal => m.diagonal_part(),
        }
    }

    /// Real basis of the self-adjoint part of the represented algebra.
    pub(crate) fn algebra_basis(&self) -> RealBasis {
        match self.algebra {
            Algebra::Full => RealBasis::Hermitian,
            Algebra::Diagonal => RealBasis::Diagonal,
        }
    }

    /// Real matrix of `a ↦ ([Lᵢ, a])ᵢ` from the self-adjoint algebra basis
    /// into the complex block coordinates, row-major.
    pub(crate) fn nabla_matrix(&self) -> ComplexMatrix<T> {
        let basis = self.algebra_basis();
        let m = basis.dim(self.n);
        let block = RealBasis::Complex.dim(self.n);
        let rows = block * self.blocks();
        let mut out = ComplexMatrix::zeros(rows, m);
        for j in 0..m {
            let e = basis.element(self.n, j);
            for (i, l) in self.dirac.iter().enumerate() {
                let c = RealBasis::Complex.coords(&commutator_unchecked(l.as_matrix(), &e));
                for (k, v) in c.into_iter().enumerate() {
                    out[(i * block + k, j)] = Complex::new(v, T::zero());
                }
            }
        }
        out
    }

    /// Orthonormal basis of `ker ∇` inside the self-adjoint algebra.
    pub fn kernel_basis(&self) -> KernelBasis<T> {
        let basis = self.algebra_basis();
        let nabla = self.nabla_matrix();
        let cutoff = T::lit(KERNEL_THRESHOLD) * self.dirac_scale();
        let d = thin_svd(&nabla).expect("Jacobi SVD of the derivation matrix");
        let elements = d
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s <= cutoff)
            .map(|(j, _)| {
                let coords: Vec<T> = d.v.column(j).iter().map(|z| z.re).collect();
                HermitianMatrix::new(basis.from_coords(self.n, &coords)).expect("square")
            })
            .collect();
        KernelBasis { elements }
    }

    /// True iff `∇a = 0` only for scalar `a`.
    pub fn is_connected(&self) -> bool {
        self.kernel_basis().dim() == 1
    }

    /// Finite-distance gate: the states can only be at finite distance if their
    /// difference annihilates the kernel of `∇`.
    pub fn check_finite_distance(&self, rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<bool> {
        Ok(self.finite_distance_report(rho1, rho2)?.finite)
    }

    pub fn finite_distance_report(&self, rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<FinitenessReport<T>> {
        rho1.check_compatible(self)?;
        rho2.check_compatible(self)?;
        let kernel = self.kernel_basis();
        Ok(kernel.finiteness(&(rho1.as_matrix() - rho2.as_matrix())))
    }
}

/// Orthonormal elements spanning `ker ∇`.
#[derive(Clone, Debug)]
pub struct KernelBasis<T> {
    pub elements: Vec<HermitianMatrix<T>>,
}

impl<T: Real> KernelBasis<T> {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Checks `|Tr(Δρ k)| ≤ 1e-9` on every basis element.
    ///
    /// When the check fails, the reported witness is the Frobenius projection
    /// of `Δρ` onto the kernel, rescaled to unit operator norm: the kernel
    /// element of norm one with the largest pairing.
    pub fn finiteness(&self, delta: &ComplexMatrix<T>) -> FinitenessReport<T> {
        let tol = T::tol(FINITENESS_TOLERANCE);
        let pairings: Vec<Complex<T>> = self
            .elements
            .iter()
            .map(|k| delta.trace_product(k.as_matrix()))
            .collect();
        let finite = pairings.iter().all(|p| p.norm() <= tol);
        let violation = if finite {
            None
        } else {
            let n = delta.rows();
            let mut w = ComplexMatrix::zeros(n, n);
            for (k, p) in self.elements.iter().zip(&pairings) {
                w.axpy(p.re, k.as_matrix());
            }
            let w = HermitianMatrix::new(w).expect("square");
            let norm = operator_norm(w.as_matrix()).unwrap_or(T::one());
            let w = w.scale(T::one() / norm);
            let pairing = delta.trace_product(w.as_matrix()).norm();
            Some((w, pairing))
        };
        FinitenessReport {
            finite,
            kernel_dimension: self.dim(),
            violation,
        }
    }
}

/// Outcome of the finite-distance gate.
#[derive(Clone, Debug)]
pub struct FinitenessReport<T> {
    pub finite: bool,
    pub kernel_dimension: usize,
    /// Kernel element with the largest `|Tr(Δρ k)|`, when the gate fails.
    pub violation: Option<(HermitianMatrix<T>, T)>,
}

/// Positive semidefinite, trace-one matrix `ρ`, the state `a ↦ Tr(ρa)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    inner: HermitianMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        let tol = T::tol(STATE_TOLERANCE);
        let h = HermitianMatrix::new_strict(m, tol.max(T::lit(1e-12)))
            .map_err(|e| Error::State(e.to_string()))?;
        let tr = h.as_matrix().trace().re;
        if (tr - T::one()).abs() > tol {
            return Err(Error::State(format!("trace is {tr}, expected 1")));
        }
        let lowest = hermitian_eig(&h)?.eigenvalues.first().copied().unwrap_or(T::zero());
        if lowest < -tol {
            return Err(Error::State(format!("smallest eigenvalue {lowest} is negative")));
        }
        Ok(Self { inner: h })
    }

    /// Pure state `|k⟩⟨k|`.
    pub fn basis_state(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::Argument(format!("basis index {k} out of range for dimension {n}")));
        }
        let mut diag = vec![T::zero(); n];
        diag[k] = T::one();
        Self::new(ComplexMatrix::from_diag(&diag))
    }

    /// Diagonal state with the given probability weights.
    pub fn diagonal(weights: &[T]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diag(weights))
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix<T> {
        self.inner.as_matrix()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix<T> {
        &self.inner
    }

    /// `φ(a) = Tr(ρa)`.
    pub fn expectation(&self, a: &HermitianMatrix<T>) -> T {
        self.inner.pairing(a)
    }

    pub fn conjugate_by(&self, unitary: &ComplexMatrix<T>) -> Self {
        Self {
            inner: self.inner.conjugate_by(unitary),
        }
    }

    pub fn check_compatible(&self, t: &SpectralTriple<T>) -> Result<()> {
        if self.dim() != t.dim() {
            return Err(Error::Shape(format!(
                "state has dimension {}, triple has {}",
                self.dim(),
                t.dim()
            )));
        }
        if t.algebra() == Algebra::Diagonal && !self.as_matrix().is_diagonal(T::tol(1e-12)) {
            return Err(Error::Mode("state has off-diagonal entries in Diagonal mode".into()));
        }
        Ok(())
    }
}

/// Tuple `(u₁, …, u_N)` of `n × n` blocks, an element of the one-form space.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm<T> {
    pub blocks: Vec<ComplexMatrix<T>>,
}

impl<T: Real> OneForm<T> {
    pub fn zeros(n: usize, blocks: usize) -> Self {
        Self {
            blocks: vec![ComplexMatrix::zeros(n, n); blocks],
        }
    }

    pub fn new(blocks: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let n = blocks.first().map_or(0, |b| b.rows());
        if blocks.iter().any(|b| b.rows() != n || b.cols() != n) {
            return Err(Error::Shape("one-form blocks must share one square shape".into()));
        }
        Ok(Self { blocks })
    }

    /// `Σᵢ ‖uᵢ‖_*`, the dual of the block operator norm.
    pub fn nuclear_norm(&self) -> Result<T> {
        self.blocks.iter().map(nuclear_norm).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.blocks
            .iter()
            .map(|b| {
                let f = b.frobenius_norm();
                f * f
            })
            .sum::<T>()
            .sqrt()
    }

    /// `Re Σᵢ Tr(uᵢ† vᵢ)`.
    pub fn inner(&self, other: &Self) -> T {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.inner(b)).sum()
    }

    pub fn axpy(&mut self, s: T, other: &Self) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            a.axpy(s, b);
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b.scale(s)).collect(),
        }
    }

    pub fn antihermitian_part(&self) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b.antihermitian_part()).collect(),
        }
    }

    /// Largest `‖uᵢ† + uᵢ‖` entry over blocks.
    pub fn antihermitian_defect(&self) -> T {
        self.blocks
            .iter()
            .map(|b| (b + &b.adjoint()).max_abs())
            .fold(T::zero(), T::max)
    }

    pub fn conjugate_by(&self, unitary: &ComplexMatrix<T>) -> Self {
        let ud = unitary.adjoint();
        Self {
            blocks: self.blocks.iter().map(|b| &(unitary * b) * &ud).collect(),
        }
    }
}

/// Orthonormal real coordinate systems on `n × n` matrix subspaces, all
/// under the pairing `Re Tr(x†y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RealBasis {
    /// Self-adjoint matrices: `Eₖₖ`, `(Eⱼₖ+Eₖⱼ)/√2`, `i(Eⱼₖ−Eₖⱼ)/√2`.
    Hermitian,
    /// `i` times the Hermitian basis.
    AntiHermitian,
    /// Real diagonal matrices.
    Diagonal,
    /// All complex matrices: `Eⱼₖ` and `iEⱼₖ`, interleaved.
    Complex,
}

impl RealBasis {
    pub(crate) fn dim(self, n: usize) -> usize {
        match self {
            RealBasis::Hermitian | RealBasis::AntiHermitian => n * n,
            RealBasis::Diagonal => n,
            RealBasis::Complex => 2 * n * n,
        }
    }

    pub(crate) fn coords<T: Real>(self, m: &ComplexMatrix<T>) -> Vec<T> {
        let n = m.rows();
        match self {
            RealBasis::Diagonal => (0..n).map(|k| m[(k, k)].re).collect(),
            RealBasis::Complex => m.as_slice().iter().flat_map(|z| [z.re, z.im]).collect(),
            RealBasis::Hermitian => {
                let r = T::lit(std::f64::consts::FRAC_1_SQRT_2);
                let mut out = Vec::with_capacity(n * n);
                out.extend((0..n).map(|k| m[(k, k)].re));
                for j in 0..n {
                    for k in j + 1..n {
                        out.push((m[(j, k)].re + m[(k, j)].re) * r);
                        out.push((m[(j, k)].im - m[(k, j)].im) * r);
                    }
                }
                out
            }
            RealBasis::AntiHermitian => {
                let rotated = m.scale_complex(Complex::new(T::zero(), -T::one()));
                RealBasis::Hermitian.coords(&rotated)
            }
        }
    }

    pub(crate) fn from_coords<T: Real>(self, n: usize, c: &[T]) -> ComplexMatrix<T> {
        debug_assert_eq!(c.len(), self.dim(n));
        match self {
            RealBasis::Diagonal => ComplexMatrix::from_diag(c),
            RealBasis::Complex => ComplexMatrix::from_fn(n, n, |i, j| {
                let k = 2 * (i * n + j);
                Complex::new(c[k], c[k + 1])
            }),
            RealBasis::Hermitian => {
                let r = T::lit(std::f64::consts::FRAC_1_SQRT_2);
                let mut m = ComplexMatrix::zeros(n, n);
                for k in 0..n {
                    m[(k, k)] = Complex::new(c[k], T::zero());
                }
                let mut idx = n;
                for j in 0..n {
                    for k in j + 1..n {
                        let (s, a) = (c[idx] * r, c[idx + 1] * r);
                        m[(j, k)] = Complex::new(s, a);
                        m[(k, j)] = Complex::new(s, -a);
                        idx += 2;
                    }
                }
                m
            }
            RealBasis::AntiHermitian => RealBasis::Hermitian
                .from_coords(n, c)
                .scale_complex(Complex::new(T::zero(), T::one())),
        }
    }

    pub(crate) fn element<T: Real>(self, n: usize, k: usize) -> ComplexMatrix<T> {
        let mut c = vec![T::zero(); self.dim(n)];
        c[k] = T::one();
        self.from_coords(n, &c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_complex, random_density, random_hermitian, rng};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn sx() -> HermitianMatrix<f64> {
        HermitianMatrix::new(ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.]).unwrap()).unwrap()
    }

    fn sy() -> ComplexMatrix<f64> {
        ComplexMatrix::new(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
    }

    fn sz() -> HermitianMatrix<f64> {
        HermitianMatrix::from_real_diag(&[1., -1.])
    }

    fn two_point(lambda: f64, algebra: Algebra) -> SpectralTriple<f64> {
        SpectralTriple::new(vec![sx().scale(lambda)], algebra).unwrap()
    }

    #[test]
    fn nabla_examples() {
        let t = two_point(1.5, Algebra::Full);
        let id = t.nabla(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!(id.frobenius_norm(), 0.0);

        let (a1, a2) = (0.3, -1.1);
        let a = HermitianMatrix::from_real_diag(&[a1, a2]);
        let u = t.nabla(&a).unwrap();
        // (a₂ − a₁)·Λ·(E₁₂ − E₂₁)
        let e = ComplexMatrix::from_real(2, 2, &[0., 1., -1., 0.]).unwrap().scale((a2 - a1) * 1.5);
        assert!((&u.blocks[0] - &e).frobenius_norm() < 1e-15);
        assert!(t.nabla(&sx()).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn nabla_rejects_off_diagonal_in_diagonal_mode() {
        let t = two_point(1.0, Algebra::Diagonal);
        assert!(matches!(t.nabla(&sx()), Err(Error::Mode(_))));
        let big = HermitianMatrix::<f64>::identity(3);
        assert!(matches!(t.nabla(&big), Err(Error::Shape(_))));
    }

    #[test]
    fn lipschitz_examples() {
        let lam = 2.0;
        let t = two_point(lam, Algebra::Full);
        assert_eq!(t.lipschitz_seminorm(&HermitianMatrix::identity(2)).unwrap(), 0.0);
        let a = HermitianMatrix::from_real_diag(&[0.25, 1.0]);
        assert!((t.lipschitz_seminorm(&a).unwrap() - lam * 0.75).abs() < 1e-15);
        let mut rng = rng(1);
        let a = random_hermitian(&mut rng, 2);
        let base = t.lipschitz_seminorm(&a).unwrap();
        let scaled = t.lipschitz_seminorm(&a.scale(-3.0)).unwrap();
        assert!((scaled - 3.0 * base).abs() < 1e-13);
    }

    #[test]
    fn divergence_examples() {
        let lam = 1.7;
        let t = two_point(lam, Algebra::Full);
        assert_eq!(t.divergence(&OneForm::zeros(2, 1)).unwrap().frobenius_norm(), 0.0);
        let u = OneForm::new(vec![sy().scale_complex(c(0., -1.0 / (2.0 * lam)))]).unwrap();
        let k = t.divergence(&u).unwrap();
        assert!((&k - sz().as_matrix()).frobenius_norm() < 1e-15);
        let commuting = OneForm::new(vec![sx().into_matrix()]).unwrap();
        assert!(t.divergence(&commuting).unwrap().frobenius_norm() < 1e-15);
        assert!(t.divergence(&OneForm::zeros(2, 2)).is_err());
    }

    #[test]
    fn projection_examples() {
        let full = two_point(1.0, Algebra::Full);
        let diag = two_point(1.0, Algebra::Diagonal);
        let m = &ComplexMatrix::from_diag(&[1., 2.]) + sx().as_matrix();
        assert_eq!(full.algebra_projection(&m), m);
        assert_eq!(diag.algebra_projection(sx().as_matrix()).frobenius_norm(), 0.0);
        assert_eq!(diag.algebra_projection(&m), ComplexMatrix::from_diag(&[1., 2.]));
    }

    #[test]
    fn kernel_examples() {
        let t = SpectralTriple::new(vec![sx()], Algebra::Full).unwrap();
        let k = t.kernel_basis();
        assert_eq!(k.dim(), 2);
        // span{I, σx}: each element has no σy/σz component
        for e in &k.elements {
            assert!(e.as_matrix().inner(&sy()).abs() < 1e-12);
            assert!(e.as_matrix().inner(sz().as_matrix()).abs() < 1e-12);
        }
        assert!(!t.is_connected());

        let mut rng = rng(7);
        let generic = SpectralTriple::new(
            vec![random_hermitian::<f64, _>(&mut rng, 4), random_hermitian(&mut rng, 4)],
            Algebra::Full,
        )
        .unwrap();
        let k = generic.kernel_basis();
        assert_eq!(k.dim(), 1);
        let id = k.elements[0].as_matrix().scale(2.0); // I/2 normalized, up to sign
        assert!((id.max_abs() - 1.0).abs() < 1e-10 && id.is_diagonal(1e-10));
        assert!(generic.is_connected());

        let d = two_point(3.0, Algebra::Diagonal);
        assert_eq!(d.kernel_basis().dim(), 1);
        assert!(d.is_connected());
    }

    #[test]
    fn zero_dirac_has_full_kernel() {
        let t = SpectralTriple::new(vec![HermitianMatrix::<f64>::zeros(3)], Algebra::Full).unwrap();
        assert_eq!(t.kernel_basis().dim(), 9);
    }

    #[test]
    fn finiteness_gate_examples() {
        let up = DensityMatrix::basis_state(2, 0).unwrap();
        let down = DensityMatrix::basis_state(2, 1).unwrap();
        let z = SpectralTriple::new(vec![sz()], Algebra::Full).unwrap();
        assert!(z.check_finite_distance(&up, &up).unwrap());
        let report = z.finite_distance_report(&up, &down).unwrap();
        assert!(!report.finite);
        let (_, pairing) = report.violation.unwrap();
        // witness is ±σz, pairing |Tr(σz·σz)| = 2
        assert!((pairing - 2.0).abs() < 1e-10);
        let x = two_point(1.0, Algebra::Full);
        assert!(x.check_finite_distance(&up, &down).unwrap());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::from_diag(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_diag(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(sy()).is_err());
        let mut rng = rng(2);
        let rho = random_density::<f64, _>(&mut rng, 4, 2);
        assert!((rho.as_matrix().trace().re - 1.0).abs() < 1e-14);
        let t = two_point(1.0, Algebra::Diagonal);
        let offdiag = DensityMatrix::new(
            ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap(),
        )
        .unwrap();
        assert!(matches!(offdiag.check_compatible(&t), Err(Error::Mode(_))));
    }

    #[test]
    fn real_bases_are_orthonormal_and_invertible() {
        let mut rng = rng(3);
        for basis in [RealBasis::Hermitian, RealBasis::AntiHermitian, RealBasis::Diagonal, RealBasis::Complex] {
            let n = 3;
            let dim = basis.dim(n);
            for i in 0..dim {
                for j in 0..dim {
                    let g = basis.element::<f64>(n, i).inner(&basis.element(n, j));
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-15, "{basis:?} {i} {j}");
                }
            }
            let m = random_complex::<f64, _>(&mut rng, n, n);
            let projected = basis.from_coords(n, &basis.coords(&m));
            let again = basis.from_coords(n, &basis.coords(&projected));
            assert!((&projected - &again).frobenius_norm() < 1e-14);
        }
    }
}
