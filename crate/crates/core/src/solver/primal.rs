use crate::error::{Error, Result};
use crate::linalg::{clip_to_operator_ball, HermitianMatrix};
use crate::scalar::Real;
use crate::triple::{DensityMatrix, OneForm, SpectralTriple};

use super::{round_primal, state_difference, ConstraintOperator, SolverConfig, ZERO_DISTANCE_TOLERANCE};

/// Result of the primal-only computation.
#[derive(Clone, Debug)]
pub struct PrimalAscent<T> {
    /// `Re Tr(Δρ a)`, a certified lower bound on the distance.
    pub value: T,
    /// Self-adjoint element with `L(a) ≤ 1`.
    pub a: HermitianMatrix<T>,
    pub iterations: usize,
    /// Whether the residuals met the tolerance before `max_iter`.
    pub converged: bool,
}

const BALANCE_FACTOR: f64 = 10.0;
const BALANCE_STEP: f64 = 2.0;
const BALANCE_UNTIL: usize = 20_000;

/// Maximizes `Re Tr(Δρ a)` over `{maxᵢ ‖[Lᵢ, a]‖ ≤ 1}` without touching the
/// dual problem.
///
/// The constraint is split as `∇a = z` with each `zᵢ` kept in the unit
/// operator-norm ball. Alternating steps solve the least-squares problem in
/// `a` through the pseudoinverse of `∇`, clip each block of `∇a` back into
/// the ball, and accumulate the scaled multiplier. The penalty is rebalanced
/// when one residual dominates the other. The final iterate goes through
/// [`round_primal`], so the value is a valid lower bound however far the
/// iteration got.
pub fn solve_primal_ascent<T: Real>(
    t: &SpectralTriple<T>,
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
    cfg: &SolverConfig<T>,
) -> Result<PrimalAscent<T>> {
    cfg.validate()?;
    rho1.check_compatible(t)?;
    rho2.check_compatible(t)?;
    let n = t.dim();
    let raw = state_difference(rho1, rho2);
    if raw.as_matrix().frobenius_norm() <= T::lit(ZERO_DISTANCE_TOLERANCE) {
        return Ok(PrimalAscent {
            value: T::zero(),
            a: HermitianMatrix::zeros(n),
            iterations: 0,
            converged: true,
        });
    }
    let report = t.kernel_basis().finiteness(raw.as_matrix());
    if !report.finite {
        return Err(Error::Argument("states are at infinite distance".into()));
    }

    // K is the adjoint of ∇, so K† transposed solves min ‖∇a − y‖ for a.
    let op = ConstraintOperator::build(t, false, cfg.seed)?;
    let delta = HermitianMatrix::new(op.project_element(raw.as_matrix()))?;
    let g = op.pinv_matvec(&op.encode_element(delta.as_matrix()));
    let g_norm = g.iter().map(|&x| x * x).sum::<T>().sqrt();

    let blocks = t.blocks();
    let d = op.domain_dim();
    let mut rho = g_norm.max(T::tol(1e-12));
    let mut z = vec![T::zero(); d];
    let mut w = vec![T::zero(); d];
    let mut a_coords = vec![T::zero(); op.range_dim()];
    let eps = cfg.tol_gap * T::lit(1e-2);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        let rhs: Vec<T> = (0..d).map(|k| g[k] / rho + z[k] - w[k]).collect();
        a_coords = op.pinv_matvec_transpose(&rhs);
        let grad = op.matvec_transpose(&a_coords);

        let shifted: Vec<T> = grad.iter().zip(&w).map(|(&x, &y)| x + y).collect();
        let form = op.decode_form(&shifted);
        let mut clipped = OneForm::zeros(n, blocks);
        for (out, b) in clipped.blocks.iter_mut().zip(&form.blocks) {
            *out = clip_to_operator_ball(b, T::one())?;
        }
        let z_new = op.encode_form(&clipped);

        let mut primal_res = T::zero();
        let mut dual_res = T::zero();
        let mut z_norm = T::zero();
        for k in 0..d {
            let r = grad[k] - z_new[k];
            w[k] += r;
            primal_res += r * r;
            let s = z_new[k] - z[k];
            dual_res += s * s;
            z_norm += z_new[k] * z_new[k];
        }
        z = z_new;
        let primal_res = primal_res.sqrt();
        let dual_res = rho * dual_res.sqrt();
        let scale = z_norm.sqrt().max(T::one());
        if primal_res <= eps * scale && dual_res <= eps * rho * scale {
            converged = true;
            break;
        }

        if iterations < BALANCE_UNTIL && iterations % 10 == 0 {
            let factor = T::lit(BALANCE_STEP);
            let mut rescale = T::one();
            if primal_res > T::lit(BALANCE_FACTOR) * dual_res {
                rescale = factor;
            } else if dual_res > T::lit(BALANCE_FACTOR) * primal_res {
                rescale = T::one() / factor;
            }
            if rescale != T::one() {
                rho *= rescale;
                w.iter_mut().for_each(|x| *x /= rescale);
            }
        }
    }

    let a = HermitianMatrix::new(op.decode_element(&a_coords))?;
    let (value, a) = round_primal(t, &a, &delta)?;
    Ok(PrimalAscent {
        value,
        a,
        iterations,
        converged,
    })
}
