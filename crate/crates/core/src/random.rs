//! Seeded generators for matrices, states and triples.
//!
//! All generators draw from a caller-supplied RNG, so a fixed seed gives
//! bit-identical output across runs and platforms.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::scalar::Real;
use crate::triple::{Algebra, DensityMatrix, SpectralTriple};

const MAX_DRAWS: usize = 100;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.gen_range(-1.0..1.0))
}

/// Matrix with independent entries uniform on the square `[-1,1]²`.
pub fn random_complex<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex::new(uniform(rng), uniform(rng)))
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix<T> {
    HermitianMatrix::new(random_complex(rng, n, n)).expect("square")
}

/// Unitary from Gram-Schmidt on a random complex matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    let m = random_complex::<T, R>(rng, n, n);
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = m.column(j);
        for _ in 0..2 {
            for b in &cols {
                let c = b
                    .iter()
                    .zip(&v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y);
                for (x, &y) in v.iter_mut().zip(b) {
                    *x -= y * c;
                }
            }
        }
        let r = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for x in v.iter_mut() {
            *x = x.unscale(r);
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Density matrix `GG†/Tr(GG†)` with `G` an `n × rank` random matrix.
pub fn random_density<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> DensityMatrix<T> {
    let g = random_complex::<T, R>(rng, n, rank.clamp(1, n));
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale(T::one() / tr)).expect("valid by construction")
}

/// Diagonal density matrix with random weights; `support` entries nonzero.
pub fn random_diagonal_density<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, support: usize) -> DensityMatrix<T> {
    let mut w = vec![0.0f64; n];
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..support.clamp(1, n) {
        let k = rng.gen_range(i..n);
        idx.swap(i, k);
        w[idx[i]] = rng.gen_range(0.05..1.0);
    }
    let total: f64 = w.iter().sum();
    let diag: Vec<T> = w.iter().map(|&x| T::lit(x / total)).collect();
    let sum = diag.iter().copied().sum::<T>();
    let diag: Vec<T> = diag.iter().map(|&x| x / sum).collect();
    DensityMatrix::new(ComplexMatrix::from_diag(&diag)).expect("valid by construction")
}

/// Triple with Hermitian `Lᵢ` drawn independently.
pub fn random_triple<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, blocks: usize, algebra: Algebra) -> SpectralTriple<T> {
    let l = (0..blocks).map(|_| random_hermitian(rng, n)).collect();
    SpectralTriple::new(l, algebra).expect("valid by construction")
}

/// Redraws until the triple is connected.
///
/// Full-mode triples with one block are rejected for `n > 1`: a single
/// Hermitian matrix commutes with its own spectral projections, so the
/// kernel of `∇` has dimension at least `n`.
pub fn random_connected_triple<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    blocks: usize,
    algebra: Algebra,
) -> Result<SpectralTriple<T>> {
    if algebra == Algebra::Full && blocks < 2 && n > 1 {
        return Err(Error::Argument(format!(
            "a Full-mode triple on M_{n} needs at least two blocks to be connected"
        )));
    }
    for _ in 0..MAX_DRAWS {
        let t = random_triple(rng, n, blocks, algebra);
        if t.is_connected() {
            return Ok(t);
        }
    }
    Err(Error::Argument(format!(
        "no connected triple found in {MAX_DRAWS} draws (n = {n}, N = {blocks})"
    )))
}
