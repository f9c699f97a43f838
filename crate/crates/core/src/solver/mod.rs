//! Certified bracketing of the spectral distance.
//!
//! The distance is the common value of
//!
//! * `sup { Re Tr(Δρ a) : a = a†, maxᵢ ‖[Lᵢ, a]‖ ≤ 1 }` and
//! * `min { Σᵢ ‖uᵢ‖_* : K(u) = Δρ }`,
//!
//! with `K(u)` the self-adjoint algebra part of `Σᵢ [Lᵢ, uᵢ]`. Iterates of the
//! saddle-point method below are never trusted: every reported number comes
//! from [`round_primal`] (rescale into the unit ball) or [`round_dual`]
//! (project onto the constraint), each of which yields a valid bound.

mod constraint;
mod primal;

use std::sync::OnceLock;

pub use constraint::ConstraintOperator;
pub use primal::{solve_primal_ascent, PrimalAscent};

use crate::error::{Error, Result};
use crate::linalg::{singular_value_soft_threshold, HermitianMatrix};
use crate::scalar::Real;
use crate::triple::{DensityMatrix, FinitenessReport, OneForm, SpectralTriple};

/// States closer than this in Frobenius norm are treated as equal.
pub const ZERO_DISTANCE_TOLERANCE: f64 = 1e-12;
/// Maximum `‖K(u) − Δρ‖_F` accepted from the dual projection.
pub const DUAL_RESIDUAL_TOLERANCE: f64 = 1e-9;
const UNBOUNDED_SEMINORM: f64 = 1e-14;
const UNBOUNDED_PAIRING: f64 = 1e-12;
/// `τσ‖K‖² = STEP_PRODUCT`.
const STEP_PRODUCT: f64 = 0.95;
const REFINEMENT_PASSES: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    /// Target for `(upper − lower) / max(1, upper)`.
    pub tol_gap: T,
    pub max_iter: usize,
    /// Iterations between certifications.
    pub check_every: usize,
    /// Search the dual over anti-Hermitian one-forms only.
    pub restrict_antihermitian: bool,
    /// `τ/σ = step_ratio²`; balances the primal and dual step sizes.
    pub step_ratio: T,
    pub seed: u64,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tol_gap: T::lit(1e-7),
            max_iter: 200_000,
            check_every: 100,
            restrict_antihermitian: false,
            step_ratio: T::one(),
            seed: 0,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_gap > T::zero()) {
            return Err(Error::Argument(format!("tol_gap must be positive, got {}", self.tol_gap)));
        }
        if self.max_iter == 0 {
            return Err(Error::Argument("max_iter must be at least 1".into()));
        }
        if self.check_every == 0 {
            return Err(Error::Argument("check_every must be at least 1".into()));
        }
        if !(self.step_ratio > T::zero()) || !self.step_ratio.is_finite() {
            return Err(Error::Argument(format!(
                "step_ratio must be positive and finite, got {}",
                self.step_ratio
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    MaxIter,
    Infinite,
    ZeroDistance,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::MaxIter => "MaxIter",
            Status::Infinite => "Infinite",
            Status::ZeroDistance => "ZeroDistance",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Converged" => Ok(Status::Converged),
            "MaxIter" => Ok(Status::MaxIter),
            "Infinite" => Ok(Status::Infinite),
            "ZeroDistance" => Ok(Status::ZeroDistance),
            other => Err(Error::Argument(format!("unknown status {other:?}"))),
        }
    }
}

/// Bounds obtained at one certification step, before taking running extrema.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certification<T> {
    pub iteration: usize,
    pub lower: T,
    pub upper: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceCertificate<T> {
    pub lower: T,
    pub upper: T,
    /// `upper − lower`; zero when the distance is infinite.
    pub gap: T,
    /// Self-adjoint `a` with `L(a) ≤ 1` and `Re Tr(Δρ a) = lower`.
    pub primal_witness: Option<HermitianMatrix<T>>,
    /// One-form with `K(u) = Δρ` and `Σ‖uᵢ‖_* = upper`.
    pub dual_witness: Option<OneForm<T>>,
    pub iterations: usize,
    pub status: Status,
    pub kernel_dimension: usize,
    /// Every certification performed, in order.
    pub history: Vec<Certification<T>>,
}

impl<T: Real> DistanceCertificate<T> {
    /// `gap / max(1, upper)`.
    pub fn relative_gap(&self) -> T {
        self.gap / self.upper.max(T::one())
    }

    pub fn is_finite(&self) -> bool {
        self.status != Status::Infinite
    }
}

/// Self-adjoint `ρ₁ − ρ₂`.
pub fn state_difference<T: Real>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> HermitianMatrix<T> {
    HermitianMatrix::new(rho1.as_matrix() - rho2.as_matrix()).expect("square difference")
}

/// Rescales `a` into the unit Lipschitz ball.
///
/// Returns `Re Tr(Δρ a/max(L(a),1))`, a lower bound on the distance, and the
/// rescaled element. A seminorm-free element with nonzero pairing means the
/// distance is infinite, which contradicts a passed finiteness gate and is
/// reported as an error.
pub fn round_primal<T: Real>(
    t: &SpectralTriple<T>,
    a: &HermitianMatrix<T>,
    delta: &HermitianMatrix<T>,
) -> Result<(T, HermitianMatrix<T>)> {
    let s = t.lipschitz_seminorm(a)?;
    if delta.dim() != t.dim() {
        return Err(Error::Shape(format!(
            "state difference is {}x{}, triple acts on dimension {}",
            delta.dim(),
            delta.dim(),
            t.dim()
        )));
    }
    let pairing = delta.pairing(a);
    if s <= T::lit(UNBOUNDED_SEMINORM) && pairing.abs() > T::tol(UNBOUNDED_PAIRING) {
        return Err(Error::UnboundedDirection {
            pairing: pairing.to_f64().unwrap_or(f64::NAN),
        });
    }
    let feasible = if s > T::one() { a.scale(T::one() / s) } else { a.clone() };
    Ok((delta.pairing(&feasible), feasible))
}

/// Projects `u` onto `{K(v) = Δρ}` with the cached pseudoinverse and returns
/// `Σᵢ ‖vᵢ‖_*`, an upper bound on the distance, with the projected form.
///
/// In anti-Hermitian mode `u` is first projected onto the restricted domain.
pub fn round_dual<T: Real>(
    op: &ConstraintOperator<T>,
    u: &OneForm<T>,
    delta: &HermitianMatrix<T>,
) -> Result<(T, OneForm<T>)> {
    op.triple().check_form(u)?;
    if delta.dim() != op.triple().dim() {
        return Err(Error::Shape(format!("state difference has dimension {}", delta.dim())));
    }
    let target = op.project_element(delta.as_matrix());
    let threshold = T::tol(DUAL_RESIDUAL_TOLERANCE);
    // Each correction removes the residual up to rounding; a few refinement
    // passes push it to machine level, so that it cannot leak into the bound.
    let floor = T::epsilon() * T::lit(64.0) * (T::one() + target.frobenius_norm());
    let mut v = op.project_form(u);
    let mut residual = (&target - &op.apply(&v)).frobenius_norm();
    for _ in 0..REFINEMENT_PASSES {
        if residual <= floor {
            break;
        }
        let r = &target - &op.apply(&v);
        let mut next = v.clone();
        next.axpy(T::one(), &op.apply_pinv(&r));
        let next_residual = (&target - &op.apply(&next)).frobenius_norm();
        if !(next_residual < residual) {
            break;
        }
        v = next;
        residual = next_residual;
    }
    if !(residual <= threshold) {
        return Err(Error::Infeasible {
            residual: residual.to_f64().unwrap_or(f64::NAN),
            threshold: threshold.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok((v.nuclear_norm()?, v))
}

/// Solver bound to one triple, caching the kernel and both constraint
/// operators across calls.
#[derive(Debug)]
pub struct DistanceSolver<T> {
    triple: SpectralTriple<T>,
    kernel: OnceLock<crate::triple::KernelBasis<T>>,
    full: OnceLock<Result<ConstraintOperator<T>>>,
    restricted: OnceLock<Result<ConstraintOperator<T>>>,
}

impl<T: Real> DistanceSolver<T> {
    pub fn new(triple: SpectralTriple<T>) -> Self {
        Self {
            triple,
            kernel: OnceLock::new(),
            full: OnceLock::new(),
            restricted: OnceLock::new(),
        }
    }

    pub fn triple(&self) -> &SpectralTriple<T> {
        &self.triple
    }

    pub fn kernel(&self) -> &crate::triple::KernelBasis<T> {
        self.kernel.get_or_init(|| self.triple.kernel_basis())
    }

    /// Constraint operator for the chosen dual domain, built on first use.
    /// The seed only affects the start vector of the norm estimate.
    pub fn operator(&self, restrict_antihermitian: bool, seed: u64) -> Result<&ConstraintOperator<T>> {
        let cell = if restrict_antihermitian {
            &self.restricted
        } else {
            &self.full
        };
        cell.get_or_init(|| ConstraintOperator::build(&self.triple, restrict_antihermitian, seed))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn finiteness(&self, rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<FinitenessReport<T>> {
        rho1.check_compatible(&self.triple)?;
        rho2.check_compatible(&self.triple)?;
        Ok(self.kernel().finiteness(&(rho1.as_matrix() - rho2.as_matrix())))
    }

    pub fn solve(
        &self,
        rho1: &DensityMatrix<T>,
        rho2: &DensityMatrix<T>,
        cfg: &SolverConfig<T>,
    ) -> Result<DistanceCertificate<T>> {
        cfg.validate()?;
        let report = self.finiteness(rho1, rho2)?;
        let kernel_dimension = report.kernel_dimension;
        let n = self.triple.dim();
        let blocks = self.triple.blocks();
        if !report.finite {
            return Ok(DistanceCertificate {
                lower: T::infinity(),
                upper: T::infinity(),
                gap: T::zero(),
                primal_witness: None,
                dual_witness: None,
                iterations: 0,
                status: Status::Infinite,
                kernel_dimension,
                history: Vec::new(),
            });
        }
        let raw = state_difference(rho1, rho2);
        if raw.as_matrix().frobenius_norm() <= T::lit(ZERO_DISTANCE_TOLERANCE) {
            return Ok(DistanceCertificate {
                lower: T::zero(),
                upper: T::zero(),
                gap: T::zero(),
                primal_witness: Some(HermitianMatrix::zeros(n)),
                dual_witness: Some(OneForm::zeros(n, blocks)),
                iterations: 0,
                status: Status::ZeroDistance,
                kernel_dimension,
                history: Vec::new(),
            });
        }

        let op = self.operator(cfg.restrict_antihermitian, cfg.seed)?;
        let delta = HermitianMatrix::new(op.project_element(raw.as_matrix()))?;
        let norm = op.norm_estimate();
        let root = T::lit(STEP_PRODUCT).sqrt();
        let tau = root * cfg.step_ratio / norm;
        let sigma = root / (cfg.step_ratio * norm);

        let s0 = self.triple.lipschitz_seminorm(&delta)?;
        let mut a = delta.as_matrix().scale(T::one() / s0.max(T::one()));
        let mut u = OneForm::zeros(n, blocks);

        let mut best_lower = T::neg_infinity();
        let mut best_upper = T::infinity();
        let mut primal_witness = None;
        let mut dual_witness = None;
        let mut history = Vec::new();
        let mut iterations = 0;
        let mut status = Status::MaxIter;

        loop {
            if iterations % cfg.check_every == 0 || iterations == cfg.max_iter {
                let ah = HermitianMatrix::new(a.clone())?;
                let (lower, af) = round_primal(&self.triple, &ah, &delta)?;
                let (upper, uf) = round_dual(op, &u, &delta)?;
                history.push(Certification {
                    iteration: iterations,
                    lower,
                    upper,
                });
                if lower > best_lower {
                    best_lower = lower;
                    primal_witness = Some(af);
                }
                if upper < best_upper {
                    best_upper = upper;
                    dual_witness = Some(uf);
                }
                if (best_upper - best_lower) / best_upper.max(T::one()) <= cfg.tol_gap {
                    status = Status::Converged;
                    break;
                }
                if iterations == cfg.max_iter {
                    break;
                }
            }

            let grad = op.apply_adjoint(&a);
            let mut next = OneForm::zeros(n, blocks);
            for ((out, ub), gb) in next.blocks.iter_mut().zip(&u.blocks).zip(&grad.blocks) {
                let mut z = ub.clone();
                z.axpy(tau, gb);
                *out = singular_value_soft_threshold(&z, tau)?;
            }
            let next = op.project_form(&next);
            let mut bar = next.scale(T::lit(2.0));
            bar.axpy(-T::one(), &u);
            let r = delta.as_matrix() - &op.apply(&bar);
            a.axpy(sigma, &r);
            u = next;
            iterations += 1;
        }

        Ok(DistanceCertificate {
            lower: best_lower,
            upper: best_upper,
            gap: best_upper - best_lower,
            primal_witness,
            dual_witness,
            iterations,
            status,
            kernel_dimension,
            history,
        })
    }
}

/// Brackets `d(ρ₁, ρ₂)` between certified primal and dual bounds.
///
/// Runs the finiteness gate first; an infinite distance is a status, not an
/// error. Build a [`DistanceSolver`] directly to reuse the operator cache
/// across many state pairs on one triple.
pub fn solve_distance<T: Real>(
    t: &SpectralTriple<T>,
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
    cfg: &SolverConfig<T>,
) -> Result<DistanceCertificate<T>> {
    DistanceSolver::new(t.clone()).solve(rho1, rho2, cfg)
}
