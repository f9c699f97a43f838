use num_complex::Complex;

use super::eig::{jacobi_rotation, rotate_columns};
use super::{householder_r, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

/// Singular value decomposition `m = U diag(s) V†`, `s` descending.
///
/// From [`svd`] both factors are square unitaries; from [`thin_svd`] they
/// hold `min(rows, cols)` orthonormal columns. Equal singular values come in
/// no particular order.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: ComplexMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: ComplexMatrix<T>,
}

impl<T: Real> Svd<T> {
    /// Rebuilds `U diag(f(s)) V†` over the leading `min(rows, cols)` columns.
    pub fn recompose(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut out = ComplexMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            let w = f(s);
            if w == T::zero() {
                continue;
            }
            for i in 0..m {
                let ui = self.u[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += ui * self.v[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// One-sided (Hestenes) Jacobi: orthogonalizes the columns of `a` while
/// accumulating the rotations into `v`.
fn orthogonalize_columns<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>) -> Result<()> {
    let (m, n) = (a.rows(), a.cols());
    let eps = T::epsilon();
    let scale_sq = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<T>();
    let negligible = scale_sq * eps * eps * eps;
    let mut worst = T::zero();
    for sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        worst = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta) = (T::zero(), T::zero());
                let mut gamma = Complex::new(T::zero(), T::zero());
                let data = a.as_slice();
                for r in 0..m {
                    let x = data[r * n + p];
                    let y = data[r * n + q];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == T::zero() {
                    continue;
                }
                // a column far below the working precision of the whole
                // matrix is numerically zero; rotating it only shuffles noise
                if alpha.min(beta) <= negligible {
                    continue;
                }
                let rel = g / (alpha.sqrt() * beta.sqrt());
                if !(rel > eps) {
                    continue;
                }
                worst = worst.max(rel);
                if let Some(j) = jacobi_rotation(alpha, beta, gamma) {
                    rotate_columns(a, p, q, &j);
                    rotate_columns(v, p, q, &j);
                    rotated = true;
                }
            }
        }
        if !rotated {
            return Ok(());
        }
        // orthogonal to working precision even if rotations keep firing
        if sweep > 10 && worst < T::lit(64.0) * eps {
            return Ok(());
        }
    }
    if worst < T::epsilon().sqrt() {
        return Ok(());
    }
    Err(Error::NonConvergence {
        routine: "svd",
        sweeps: MAX_SWEEPS,
        residual: worst.to_f64().unwrap_or(f64::NAN),
    })
}

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn vec_norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Orthogonalizes `v` against `basis` twice (classical Gram-Schmidt with
/// reorthogonalization) and returns its remaining norm.
fn orthogonalize_against<T: Real>(v: &mut [Complex<T>], basis: &[Vec<Complex<T>>]) -> T {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            for (x, &y) in v.iter_mut().zip(b) {
                *x -= y * c;
            }
        }
    }
    vec_norm(v)
}

/// Extends orthonormal `basis` (vectors of length `dim`) to `target` vectors
/// with standard-basis candidates.
fn complete_basis<T: Real>(basis: &mut Vec<Vec<Complex<T>>>, dim: usize, target: usize) {
    let zero = Complex::new(T::zero(), T::zero());
    while basis.len() < target {
        let mut best: Option<(T, Vec<Complex<T>>)> = None;
        for k in 0..dim {
            let mut e = vec![zero; dim];
            e[k] = Complex::new(T::one(), T::zero());
            let r = orthogonalize_against(&mut e, basis);
            if best.as_ref().map_or(true, |(b, _)| r > *b) {
                best = Some((r, e));
            }
        }
        let (r, mut e) = best.expect("dimension exceeds basis size");
        for x in e.iter_mut() {
            *x = x.unscale(r);
        }
        basis.push(e);
    }
}

fn columns_to_matrix<T: Real>(cols: &[Vec<Complex<T>>], rows: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Thin SVD with `min(rows, cols)` singular triplets.
pub fn thin_svd<T: Real>(m: &ComplexMatrix<T>) -> Result<Svd<T>> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows < cols {
        let t = thin_svd(&m.adjoint())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    if cols == 0 {
        return Ok(Svd {
            u: ComplexMatrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v: ComplexMatrix::zeros(0, 0),
        });
    }
    // Tall inputs are first reduced to their triangular factor.
    let tall = rows > cols;
    let mut work = if tall { householder_r(m) } else { m.clone() };
    let mut v = ComplexMatrix::identity(cols);
    orthogonalize_columns(&mut work, &mut v)?;

    let norms: Vec<T> = (0..cols).map(|j| vec_norm(&work.column(j))).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    let singular_values: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let v = ComplexMatrix::from_fn(cols, cols, |i, c| v[(i, order[c])]);

    let s_max = singular_values[0];
    let cutoff = s_max * T::epsilon() * T::lit(rows.max(cols) as f64);
    let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(cols);
    let mut pending = false;
    for (c, &s) in singular_values.iter().enumerate() {
        if s <= cutoff || s <= T::min_positive_value() {
            pending = true;
            break;
        }
        let mut col: Vec<Complex<T>> = if tall {
            let vc = v.column(c);
            (0..rows)
                .map(|i| (0..cols).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + m[(i, k)] * vc[k]))
                .collect()
        } else {
            work.column(order[c])
        };
        let r = orthogonalize_against(&mut col, &basis);
        if r <= T::min_positive_value() {
            pending = true;
            break;
        }
        for x in col.iter_mut() {
            *x = x.unscale(r);
        }
        basis.push(col);
    }
    if pending || basis.len() < cols {
        complete_basis(&mut basis, rows, cols);
    }
    Ok(Svd {
        u: columns_to_matrix(&basis, rows),
        singular_values,
        v,
    })
}

/// Full SVD with square unitary factors.
pub fn svd<T: Real>(m: &ComplexMatrix<T>) -> Result<Svd<T>> {
    let thin = thin_svd(m)?;
    let extend = |f: &ComplexMatrix<T>, dim: usize| {
        let mut cols: Vec<Vec<Complex<T>>> = (0..f.cols()).map(|j| f.column(j)).collect();
        complete_basis(&mut cols, dim, dim);
        columns_to_matrix(&cols, dim)
    };
    Ok(Svd {
        u: extend(&thin.u, m.rows()),
        singular_values: thin.singular_values,
        v: extend(&thin.v, m.cols()),
    })
}

pub fn operator_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(thin_svd(m)?.singular_values.first().copied().unwrap_or(T::zero()))
}

pub fn nuclear_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(thin_svd(m)?.singular_values.iter().copied().sum())
}

/// Proximal map of `τ‖·‖_*`: shrinks every singular value by `τ`.
pub fn singular_value_soft_threshold<T: Real>(m: &ComplexMatrix<T>, tau: T) -> Result<ComplexMatrix<T>> {
    if !(tau >= T::zero()) {
        return Err(Error::Argument(format!("threshold must be nonnegative, got {tau}")));
    }
    if tau == T::zero() {
        return Ok(m.clone());
    }
    let d = thin_svd(m)?;
    Ok(d.recompose(|s| (s - tau).max(T::zero())))
}

/// Frobenius projection onto the operator-norm ball of radius `r`.
pub fn clip_to_operator_ball<T: Real>(m: &ComplexMatrix<T>, r: T) -> Result<ComplexMatrix<T>> {
    if !(r > T::zero()) {
        return Err(Error::Argument(format!("radius must be positive, got {r}")));
    }
    let d = thin_svd(m)?;
    if d.singular_values.first().map_or(true, |&s| s <= r) {
        return Ok(m.clone());
    }
    let excess = d.recompose(|s| (s - r).max(T::zero()));
    Ok(m - &excess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, HermitianMatrix};
    use crate::random::{random_complex, rng};
    use rand::Rng;

    fn reconstruction_error(m: &ComplexMatrix<f64>, d: &Svd<f64>) -> f64 {
        (&d.recompose(|s| s) - m).frobenius_norm()
    }

    fn unitarity_defect(u: &ComplexMatrix<f64>) -> f64 {
        (&(&u.adjoint() * u) - &ComplexMatrix::identity(u.cols())).frobenius_norm()
    }

    #[test]
    fn identity_and_diagonal() {
        let d = svd(&ComplexMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(d.singular_values, vec![1.0; 3]);
        let d = svd(&ComplexMatrix::from_diag(&[3.0, -4.0])).unwrap();
        assert_eq!(d.singular_values, vec![4.0, 3.0]);
        assert!(reconstruction_error(&ComplexMatrix::from_diag(&[3.0, -4.0]), &d) < 1e-15);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let mut rng = rng(1);
        let m = random_complex::<f64, _>(&mut rng, 4, 4);
        let d = svd(&m).unwrap();
        let gram = HermitianMatrix::new(&m.adjoint() * &m).unwrap();
        let mut ev = hermitian_eig(&gram).unwrap().eigenvalues;
        ev.reverse();
        for (s, l) in d.singular_values.iter().zip(&ev) {
            assert!((s * s - l).abs() < 1e-12 * ev[0], "{s} {l}");
        }
        assert!((operator_norm(&m).unwrap() - ev[0].sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_and_orthonormality_rectangular() {
        let mut rng = rng(2);
        for (r, c) in [(1, 1), (3, 5), (5, 3), (8, 8), (20, 6), (6, 20), (32, 32)] {
            let m = random_complex::<f64, _>(&mut rng, r, c);
            let d = svd(&m).unwrap();
            let scale = m.frobenius_norm();
            assert!(reconstruction_error(&m, &d) <= 1e-10 * r.max(c) as f64 * scale);
            assert!(unitarity_defect(&d.u) <= 1e-10, "U {r}x{c}");
            assert!(unitarity_defect(&d.v) <= 1e-10, "V {r}x{c}");
            assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_deficient_input_still_has_unitary_factors() {
        let mut rng = rng(4);
        let a = random_complex::<f64, _>(&mut rng, 6, 2);
        let b = random_complex::<f64, _>(&mut rng, 2, 6);
        let m = &a * &b;
        let d = svd(&m).unwrap();
        assert!(d.singular_values[2] < 1e-13 * d.singular_values[0]);
        assert!(unitarity_defect(&d.u) <= 1e-10);
        assert!(unitarity_defect(&d.v) <= 1e-10);
        assert!(reconstruction_error(&m, &d) <= 1e-12 * m.frobenius_norm());
        let z = svd(&ComplexMatrix::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(z.singular_values, vec![0.0; 3]);
        assert!(unitarity_defect(&z.u) <= 1e-15);
    }

    #[test]
    fn norms() {
        let lam = 2.5f64;
        let m = ComplexMatrix::from_real(2, 2, &[0.0, lam, lam, 0.0]).unwrap();
        assert!((operator_norm(&m).unwrap() - lam).abs() < 1e-15);
        assert_eq!(operator_norm(&ComplexMatrix::<f64>::identity(4)).unwrap(), 1.0);
        assert_eq!(nuclear_norm(&ComplexMatrix::from_diag(&[3.0, -4.0])).unwrap(), 7.0);
        assert_eq!(nuclear_norm(&ComplexMatrix::<f64>::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn nuclear_dominates_operator_with_equality_at_rank_one() {
        let mut rng = rng(6);
        let m = random_complex::<f64, _>(&mut rng, 4, 4);
        assert!(nuclear_norm(&m).unwrap() > operator_norm(&m).unwrap() + 1e-6);
        let x = random_complex::<f64, _>(&mut rng, 4, 1);
        let y = random_complex::<f64, _>(&mut rng, 1, 4);
        let r1 = &x * &y;
        let (nuc, op) = (nuclear_norm(&r1).unwrap(), operator_norm(&r1).unwrap());
        assert!((nuc - op).abs() < 1e-12 * op);
    }

    #[test]
    fn norm_duality_witness() {
        let mut rng = rng(7);
        for _ in 0..5 {
            let m = random_complex::<f64, _>(&mut rng, 5, 5);
            let d = svd(&m).unwrap();
            let x = &d.u * &d.v.adjoint();
            let nuc = nuclear_norm(&m).unwrap();
            assert!((x.inner(&m) - nuc).abs() < 1e-12 * nuc);
            for _ in 0..100 {
                let y = random_complex::<f64, _>(&mut rng, 5, 5);
                let y = y.scale(1.0 / operator_norm(&y).unwrap());
                assert!(y.inner(&m) <= nuc + 1e-12);
            }
        }
    }

    #[test]
    fn soft_threshold_examples() {
        let m = ComplexMatrix::from_diag(&[3.0, 1.0]);
        assert_eq!(singular_value_soft_threshold(&m, 0.0).unwrap(), m);
        let z = singular_value_soft_threshold(&m, 3.5).unwrap();
        assert_eq!(z.frobenius_norm(), 0.0);
        let p = singular_value_soft_threshold(&m, 2.0).unwrap();
        assert!((&p - &ComplexMatrix::from_diag(&[1.0, 0.0])).frobenius_norm() < 1e-15);
        assert!(singular_value_soft_threshold(&m, -1.0).is_err());
    }

    #[test]
    fn soft_threshold_is_the_prox() {
        let mut rng = rng(8);
        for _ in 0..5 {
            let m = random_complex::<f64, _>(&mut rng, 4, 4);
            let tau = rng.gen_range(0.1..1.5);
            let p = singular_value_soft_threshold(&m, tau).unwrap();
            let obj = |x: &ComplexMatrix<f64>| {
                let r = (x - &m).frobenius_norm();
                0.5 * r * r + tau * nuclear_norm(x).unwrap()
            };
            let best = obj(&p);
            let s = svd(&m).unwrap().singular_values;
            let bound = (s.iter().sum::<f64>() - s.len() as f64 * tau).max(0.0);
            assert!(nuclear_norm(&p).unwrap() >= bound - 1e-12);
            for _ in 0..100 {
                let d = random_complex::<f64, _>(&mut rng, 4, 4).scale(rng.gen_range(1e-3..0.3));
                assert!(obj(&(&p + &d)) >= best - 1e-12);
            }
        }
    }

    #[test]
    fn clip_examples_and_properties() {
        let m = ComplexMatrix::from_diag(&[3.0, 1.0]);
        let c = clip_to_operator_ball(&m, 2.0).unwrap();
        assert!((&c - &ComplexMatrix::from_diag(&[2.0, 1.0])).frobenius_norm() < 1e-15);
        let five = ComplexMatrix::<f64>::identity(3).scale(5.0);
        let c = clip_to_operator_ball(&five, 1.0).unwrap();
        assert!((&c - &ComplexMatrix::identity(3)).frobenius_norm() < 1e-14);
        assert_eq!(clip_to_operator_ball(&m, 4.0).unwrap(), m);
        assert!(clip_to_operator_ball(&m, 0.0).is_err());

        let mut rng = rng(9);
        for _ in 0..20 {
            let a = random_complex::<f64, _>(&mut rng, 4, 4);
            let b = random_complex::<f64, _>(&mut rng, 4, 4);
            let ca = clip_to_operator_ball(&a, 0.7).unwrap();
            let cb = clip_to_operator_ball(&b, 0.7).unwrap();
            let again = clip_to_operator_ball(&ca, 0.7).unwrap();
            assert!((&again - &ca).frobenius_norm() < 1e-12);
            assert!(operator_norm(&ca).unwrap() <= 0.7 + 1e-12);
            assert!((&ca - &cb).frobenius_norm() <= (&a - &b).frobenius_norm() + 1e-12);
        }
    }
}
