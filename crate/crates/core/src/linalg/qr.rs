use num_complex::Complex;

use super::ComplexMatrix;
use crate::scalar::Real;

/// Upper-triangular factor `R` (cols × cols) of a tall matrix `A = QR`,
/// computed with complex Householder reflections. `Q` is not formed.
pub(crate) fn householder_r<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let mut w = a.clone();
    let zero = Complex::new(T::zero(), T::zero());
    let mut v = vec![zero; m];
    for k in 0..n {
        let norm = (k..m).map(|i| w[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = w[(k, k)];
        let phase = if x0.norm() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0.unscale(x0.norm())
        };
        let alpha = -phase * norm;
        for i in k..m {
            v[i] = w[(i, k)];
        }
        v[k] -= alpha;
        let vnorm2 = (k..m).map(|i| v[i].norm_sqr()).sum::<T>();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for j in k..n {
            let mut dot = zero;
            for i in k..m {
                dot += v[i].conj() * w[(i, j)];
            }
            let f = dot * (two / vnorm2);
            for i in k..m {
                let vi = v[i];
                w[(i, j)] -= vi * f;
            }
        }
        w[(k, k)] = alpha;
        for i in k + 1..m {
            w[(i, k)] = zero;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| if i <= j { w[(i, j)] } else { zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_complex, rng};

    #[test]
    fn gram_matrix_is_preserved() {
        let mut rng = rng(5);
        let a = random_complex::<f64, _>(&mut rng, 9, 4);
        let r = householder_r(&a);
        let lhs = &a.adjoint() * &a;
        let rhs = &r.adjoint() * &r;
        assert!((&lhs - &rhs).frobenius_norm() < 1e-12 * lhs.frobenius_norm());
    }
}
