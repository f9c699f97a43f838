//! Problem files for the standard fixtures.

use rand::Rng;
use specdist::random::{random_connected_triple, random_density, random_diagonal_density, random_triple, rng};
use specdist::{line_triple, Algebra, ComplexMatrix, DensityMatrix, HermitianMatrix, SpectralTriple};

use crate::error::CliError;
use crate::io::ProblemFile;

/// `L = Λσx` on `M₂` with the two basis states, at distance `1/Λ`.
pub fn two_point(lambda: f64) -> Result<ProblemFile, CliError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(CliError::validation("lambda", format!("must be positive and finite, got {lambda}")));
    }
    let l = ComplexMatrix::from_real(2, 2, &[0.0, lambda, lambda, 0.0])?;
    let t = SpectralTriple::new(vec![HermitianMatrix::new(l)?], Algebra::Full)?;
    let a = DensityMatrix::basis_state(2, 0)?;
    let b = DensityMatrix::basis_state(2, 1)?;
    Ok(ProblemFile::from_parts(&t, Some((&a, &b)), None))
}

/// Diagonal-mode chain on `positions` with the measures `mu` and `nu` as
/// diagonal states.
pub fn line(positions: &[f64], mu: &[f64], nu: &[f64]) -> Result<ProblemFile, CliError> {
    let t = line_triple(positions).map_err(|e| CliError::validation("positions", e.to_string()))?;
    let state = |w: &[f64], field: &str| {
        if w.len() != positions.len() {
            return Err(CliError::validation(
                field,
                format!("{} weights for {} positions", w.len(), positions.len()),
            ));
        }
        DensityMatrix::diagonal(w).map_err(|e| CliError::validation(field, e.to_string()))
    };
    let a = state(mu, "mu")?;
    let b = state(nu, "nu")?;
    Ok(ProblemFile::from_parts(&t, Some((&a, &b)), None))
}

/// Random triple and states, a pure function of the arguments.
///
/// The triple is redrawn until connected unless that is impossible
/// (one Full-mode block on `n > 1`), in which case the first draw is kept.
pub fn random(n: usize, blocks: usize, seed: u64, algebra: Algebra) -> Result<ProblemFile, CliError> {
    if n == 0 {
        return Err(CliError::validation("n", "must be at least 1"));
    }
    if blocks == 0 {
        return Err(CliError::validation("N", "must be at least 1"));
    }
    let mut r = rng(seed);
    let t = if algebra == Algebra::Full && blocks < 2 && n > 1 {
        random_triple(&mut r, n, blocks, algebra)
    } else {
        random_connected_triple(&mut r, n, blocks, algebra)?
    };
    let (a, b) = match algebra {
        Algebra::Full => {
            let k = r.gen_range(1..=n);
            (random_density(&mut r, n, k), random_density(&mut r, n, n))
        }
        Algebra::Diagonal => {
            let k = r.gen_range(1..=n);
            (random_diagonal_density(&mut r, n, k), random_diagonal_density(&mut r, n, n))
        }
    };
    Ok(ProblemFile::from_parts(&t, Some((&a, &b)), None))
}
