use num_complex::Complex;

use super::{ComplexMatrix, HermitianMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `h = V diag(λ) V†` with eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

/// Unitary 2×2 rotation `J` (entries `[jpp, jpq, jqp, jqq]`) such that
/// `J† [[app, apq], [conj(apq), aqq]] J` is diagonal.
///
/// The phase of `apq` is first absorbed into column `q`, which leaves a real
/// symmetric pair handled by the classical Jacobi rotation.
pub(super) fn jacobi_rotation<T: Real>(app: T, aqq: T, apq: Complex<T>) -> Option<[Complex<T>; 4]> {
    let g = apq.norm();
    if g == T::zero() {
        return None;
    }
    let phase = apq.unscale(g).conj();
    let two = T::lit(2.0);
    let theta = (aqq - app) / (two * g);
    let t = if theta.is_infinite() {
        T::zero()
    } else {
        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let zero = T::zero();
    Some([
        Complex::new(c, zero),
        Complex::new(s, zero),
        phase * (-s),
        phase * c,
    ])
}

/// `M ← M J` on columns `p`, `q`.
pub(super) fn rotate_columns<T: Real>(m: &mut ComplexMatrix<T>, p: usize, q: usize, j: &[Complex<T>; 4]) {
    let cols = m.cols();
    let rows = m.rows();
    let data = m.as_mut_slice();
    for r in 0..rows {
        let x = data[r * cols + p];
        let y = data[r * cols + q];
        data[r * cols + p] = x * j[0] + y * j[2];
        data[r * cols + q] = x * j[1] + y * j[3];
    }
}

/// `M ← J† M` on rows `p`, `q`.
fn rotate_rows<T: Real>(m: &mut ComplexMatrix<T>, p: usize, q: usize, j: &[Complex<T>; 4]) {
    let cols = m.cols();
    let data = m.as_mut_slice();
    for c in 0..cols {
        let x = data[p * cols + c];
        let y = data[q * cols + c];
        data[p * cols + c] = j[0].conj() * x + j[2].conj() * y;
        data[q * cols + c] = j[1].conj() * x + j[3].conj() * y;
    }
}

fn off_diagonal_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    let n = m.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eig<T: Real>(h: &HermitianMatrix<T>) -> Result<HermitianEig<T>> {
    let n = h.dim();
    let mut a = h.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = T::epsilon() * scale;
    let mut converged = n < 2 || scale == T::zero();
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // negligible relative to both diagonal entries
                let g = apq.norm();
                if g <= T::epsilon() * T::lit(0.01) * (app.abs().min(aqq.abs())) {
                    a[(p, q)] = Complex::new(T::zero(), T::zero());
                    a[(q, p)] = Complex::new(T::zero(), T::zero());
                    continue;
                }
                let Some(j) = jacobi_rotation(app, aqq, apq) else {
                    continue;
                };
                rotate_columns(&mut a, p, q, &j);
                rotate_rows(&mut a, p, q, &j);
                rotate_columns(&mut v, p, q, &j);
                a[(p, q)] = Complex::new(T::zero(), T::zero());
                a[(q, p)] = Complex::new(T::zero(), T::zero());
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }
    if !converged {
        return Err(Error::NonConvergence {
            routine: "hermitian_eig",
            sweeps,
            residual: off_diagonal_norm(&a).to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}
