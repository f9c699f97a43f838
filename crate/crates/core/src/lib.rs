//! Certified spectral distances between states of finite spectral triples.
//!
//! A finite triple is given by Hermitian blocks `L₁, …, L_N ∈ Mₙ(ℂ)` acting on
//! either the full matrix algebra or its diagonal subalgebra. The distance
//! between two density matrices is the supremum of `Tr((ρ₁ − ρ₂)a)` over
//! self-adjoint `a` with `maxᵢ ‖[Lᵢ, a]‖ ≤ 1`, and equals the minimum of
//! `Σᵢ ‖uᵢ‖_*` over one-forms with `Σᵢ [Lᵢ, uᵢ] = ρ₁ − ρ₂`.
//! [`solver::solve_distance`] brackets it between a feasible primal element
//! and an exactly feasible one-form.
//!
//! Numeric code is generic over [`Real`]; the aliases below fix `f64`.

pub mod error;
pub mod linalg;
pub mod random;
pub mod scalar;
pub mod solver;
pub mod transport;
pub mod triple;

pub use error::{Error, Result};
pub use linalg::{commutator, ComplexMatrix, HermitianMatrix};
pub use scalar::Real;
pub use solver::{
    round_dual, round_primal, solve_distance, solve_primal_ascent, ConstraintOperator,
    DistanceCertificate, DistanceSolver, SolverConfig, Status,
};
pub use transport::{
    cumulative_difference, line_triple, optimal_potential, w1_distance, DiscreteMeasure1D,
    PiecewiseLinear1Lip, StepFunction,
};
pub use triple::{Algebra, DensityMatrix, KernelBasis, OneForm, SpectralTriple};

pub type Complex64 = num_complex::Complex<f64>;
pub type Matrix = ComplexMatrix<f64>;
pub type Hermitian = HermitianMatrix<f64>;
pub type Triple = SpectralTriple<f64>;
pub type State = DensityMatrix<f64>;
pub type Form = OneForm<f64>;
pub type Certificate = DistanceCertificate<f64>;
pub type Config = SolverConfig<f64>;
pub type Measure = DiscreteMeasure1D<f64>;
