use num_complex::Complex;
use rand::Rng;

use crate::error::Result;
use crate::linalg::{commutator_unchecked, thin_svd, ComplexMatrix};
use crate::random::rng;
use crate::scalar::Real;
use crate::triple::{Algebra, OneForm, RealBasis, SpectralTriple, KERNEL_THRESHOLD};

const POWER_MAX_ITER: usize = 10_000;

/// Materialized real-linear map `K: (u₁,…,u_N) ↦ P(Σᵢ [Lᵢ, uᵢ])`, where `P`
/// projects onto the self-adjoint part of the represented algebra.
///
/// Its adjoint under `Re Tr(x†y)` is `∇` itself: `⟨K u, a⟩ = ⟨u, ∇a⟩`.
/// The pseudoinverse is computed once from an SVD of the materialized
/// matrix and reused by every affine projection onto `{K u = Δρ}`.
#[derive(Clone, Debug)]
pub struct ConstraintOperator<T> {
    triple: SpectralTriple<T>,
    restrict_antihermitian: bool,
    domain: RealBasis,
    range: RealBasis,
    domain_dim: usize,
    range_dim: usize,
    /// `range_dim × domain_dim`, row-major.
    matrix: Vec<T>,
    /// `domain_dim × range_dim`, row-major.
    pinv: Vec<T>,
    singular_values: Vec<T>,
    rank: usize,
    norm_estimate: T,
}

impl<T: Real> ConstraintOperator<T> {
    pub fn build(triple: &SpectralTriple<T>, restrict_antihermitian: bool, seed: u64) -> Result<Self> {
        let n = triple.dim();
        let domain = if restrict_antihermitian {
            RealBasis::AntiHermitian
        } else {
            RealBasis::Complex
        };
        let range = triple.algebra_basis();
        let block_dim = domain.dim(n);
        let domain_dim = block_dim * triple.blocks();
        let range_dim = range.dim(n);

        let mut matrix = vec![T::zero(); range_dim * domain_dim];
        for (i, l) in triple.dirac_blocks().iter().enumerate() {
            for k in 0..block_dim {
                let e = domain.element(n, k);
                let col = range.coords(&commutator_unchecked(l.as_matrix(), &e));
                let j = i * block_dim + k;
                for (r, v) in col.into_iter().enumerate() {
                    matrix[r * domain_dim + j] = v;
                }
            }
        }

        let k = ComplexMatrix::from_real(range_dim, domain_dim, &matrix)?;
        let d = thin_svd(&k)?;
        let cutoff = T::lit(KERNEL_THRESHOLD) * triple.dirac_scale();
        let rank = d.singular_values.iter().filter(|&&s| s > cutoff).count();
        let mut pinv = vec![T::zero(); domain_dim * range_dim];
        for c in 0..rank {
            let inv = T::one() / d.singular_values[c];
            for i in 0..domain_dim {
                let vi = d.v[(i, c)].re * inv;
                if vi == T::zero() {
                    continue;
                }
                for j in 0..range_dim {
                    pinv[i * range_dim + j] += vi * d.u[(j, c)].re;
                }
            }
        }

        let mut op = Self {
            triple: triple.clone(),
            restrict_antihermitian,
            domain,
            range,
            domain_dim,
            range_dim,
            matrix,
            pinv,
            singular_values: d.singular_values,
            rank,
            norm_estimate: T::zero(),
        };
        op.norm_estimate = op.power_iteration(seed);
        Ok(op)
    }

    /// Power iteration on `KᵀK` from a seeded random start.
    fn power_iteration(&self, seed: u64) -> T {
        let mut rng = rng(seed);
        let mut x: Vec<T> = (0..self.domain_dim).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
        let mut estimate = T::zero();
        for it in 0..POWER_MAX_ITER {
            let norm = x.iter().map(|&v| v * v).sum::<T>().sqrt();
            if norm == T::zero() {
                return T::zero();
            }
            x.iter_mut().for_each(|v| *v /= norm);
            let y = self.matvec(&x);
            let next = y.iter().map(|&v| v * v).sum::<T>().sqrt();
            x = self.matvec_transpose(&y);
            let settled = (next - estimate).abs() <= T::lit(1e-13) * next;
            estimate = next;
            if it > 10 && settled {
                break;
            }
        }
        estimate
    }

    pub fn triple(&self) -> &SpectralTriple<T> {
        &self.triple
    }

    pub fn is_antihermitian(&self) -> bool {
        self.restrict_antihermitian
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn range_dim(&self) -> usize {
        self.range_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Singular values of the materialized matrix, descending.
    pub fn singular_values(&self) -> &[T] {
        &self.singular_values
    }

    /// Power-iteration estimate of `‖K‖`.
    pub fn norm_estimate(&self) -> T {
        self.norm_estimate
    }

    /// Row-major `range_dim × domain_dim` matrix of `K`.
    pub fn matrix(&self) -> &[T] {
        &self.matrix
    }

    /// Row-major `domain_dim × range_dim` pseudoinverse.
    pub fn pseudoinverse(&self) -> &[T] {
        &self.pinv
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        self.matrix
            .chunks(self.domain_dim)
            .map(|row| row.iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn matvec_transpose(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.domain_dim];
        for (row, &yi) in self.matrix.chunks(self.domain_dim).zip(y) {
            if yi == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
        out
    }

    pub fn pinv_matvec(&self, y: &[T]) -> Vec<T> {
        self.pinv
            .chunks(self.range_dim)
            .map(|row| row.iter().zip(y).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn pinv_matvec_transpose(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.range_dim];
        for (row, &xi) in self.pinv.chunks(self.range_dim).zip(x) {
            if xi == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        out
    }

    pub fn encode_form(&self, u: &OneForm<T>) -> Vec<T> {
        u.blocks.iter().flat_map(|b| self.domain.coords(b)).collect()
    }

    pub fn decode_form(&self, c: &[T]) -> OneForm<T> {
        let n = self.triple.dim();
        OneForm {
            blocks: c
                .chunks(self.domain.dim(n))
                .map(|chunk| self.domain.from_coords(n, chunk))
                .collect(),
        }
    }

    pub fn encode_element(&self, m: &ComplexMatrix<T>) -> Vec<T> {
        self.range.coords(m)
    }

    pub fn decode_element(&self, c: &[T]) -> ComplexMatrix<T> {
        self.range.from_coords(self.triple.dim(), c)
    }

    /// Orthogonal projection of a one-form onto the operator's domain.
    pub fn project_form(&self, u: &OneForm<T>) -> OneForm<T> {
        if self.restrict_antihermitian {
            u.antihermitian_part()
        } else {
            u.clone()
        }
    }

    /// Self-adjoint part of the algebra projection of `m`.
    pub fn project_element(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        match self.triple.algebra() {
            Algebra::Full => m.hermitian_part(),
            Algebra::Diagonal => ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| {
                if i == j {
                    Complex::new(m[(i, i)].re, T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            }),
        }
    }

    /// `K u`, evaluated blockwise with commutators.
    pub fn apply(&self, u: &OneForm<T>) -> ComplexMatrix<T> {
        let n = self.triple.dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for (l, b) in self.triple.dirac_blocks().iter().zip(&u.blocks) {
            let c = commutator_unchecked(l.as_matrix(), b);
            acc.axpy(T::one(), &c);
        }
        self.project_element(&acc)
    }

    /// `K* a = ∇a`, projected onto the domain.
    pub fn apply_adjoint(&self, a: &ComplexMatrix<T>) -> OneForm<T> {
        let g = self.triple.nabla_unchecked(a);
        self.project_form(&g)
    }

    /// Minimum-norm one-form `v` with `K v = P(r)` for `r` in the range.
    pub fn apply_pinv(&self, r: &ComplexMatrix<T>) -> OneForm<T> {
        let c = self.encode_element(r);
        self.decode_form(&self.pinv_matvec(&c))
    }
}
