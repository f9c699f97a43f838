//! Wasserstein-1 distance between atomic measures on the real line, and the
//! commutative triples whose spectral distance reproduces it.

use std::cmp::Ordering;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::scalar::Real;
use crate::triple::{Algebra, DensityMatrix, SpectralTriple};

/// Tolerance on the total mass of a measure.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// `|w| ≤ SIGN_THRESHOLD` is treated as zero by [`optimal_potential`].
pub const SIGN_THRESHOLD: f64 = 1e-12;

/// Probability measure `Σⱼ wⱼ δ_{xⱼ}` with strictly increasing atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure1D<T> {
    atoms: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> DiscreteMeasure1D<T> {
    pub fn new(atoms: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Argument("measure has no atoms".into()));
        }
        if atoms.len() != weights.len() {
            return Err(Error::Shape(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if let Some(x) = atoms.iter().chain(&weights).find(|x| !x.is_finite()) {
            return Err(Error::Argument(format!("non-finite entry {x}")));
        }
        if let Some(j) = atoms.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::Argument(format!(
                "atoms must be strictly increasing: {} then {}",
                atoms[j],
                atoms[j + 1]
            )));
        }
        if let Some(w) = weights.iter().find(|&&w| w < T::zero()) {
            return Err(Error::Argument(format!("negative weight {w}")));
        }
        let mass: T = weights.iter().copied().sum();
        if (mass - T::one()).abs() > T::tol(MASS_TOLERANCE) {
            return Err(Error::Argument(format!("total mass is {mass}, expected 1")));
        }
        Ok(Self { atoms, weights })
    }

    /// Builds a measure from `(position, weight)` pairs in any order; repeated
    /// positions have their weights added.
    pub fn from_pairs(pairs: &[(T, T)]) -> Result<Self> {
        let mut sorted = pairs.to_vec();
        if sorted.iter().any(|(x, _)| x.is_nan()) {
            return Err(Error::Argument("NaN position".into()));
        }
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut atoms: Vec<T> = Vec::with_capacity(sorted.len());
        let mut weights: Vec<T> = Vec::with_capacity(sorted.len());
        for (x, w) in sorted {
            if w < T::zero() {
                return Err(Error::Argument(format!("negative weight {w} at {x}")));
            }
            match atoms.last() {
                Some(&last) if last == x => *weights.last_mut().expect("paired") += w,
                _ => {
                    atoms.push(x);
                    weights.push(w);
                }
            }
        }
        Self::new(atoms, weights)
    }

    /// Unit mass at `x`.
    pub fn dirac(x: T) -> Self {
        Self {
            atoms: vec![x],
            weights: vec![T::one()],
        }
    }

    pub fn atoms(&self) -> &[T] {
        &self.atoms
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.atoms.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Pushforward under `x ↦ scale·x + shift`, `scale > 0`.
    pub fn affine(&self, scale: T, shift: T) -> Result<Self> {
        if !(scale > T::zero()) {
            return Err(Error::Argument(format!("scale must be positive, got {scale}")));
        }
        Self::new(
            self.atoms.iter().map(|&x| scale * x + shift).collect(),
            self.weights.clone(),
        )
    }

    /// Weights of this measure on a sorted superset of its atoms.
    pub fn weights_on(&self, support: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); support.len()];
        let mut j = 0;
        for (&x, &w) in self.atoms.iter().zip(&self.weights) {
            while j < support.len() && support[j] < x {
                j += 1;
            }
            if j == support.len() || support[j] != x {
                return Err(Error::Argument(format!("atom {x} is not in the support")));
            }
            out[j] = w;
        }
        Ok(out)
    }

    /// Diagonal density matrix with this measure's weights, indexed by the
    /// atoms of `support`.
    pub fn to_density(&self, support: &[T]) -> Result<DensityMatrix<T>> {
        DensityMatrix::diagonal(&self.weights_on(support)?)
    }
}

/// Sorted union of the atoms of two measures.
pub fn merged_support<T: Real>(mu: &DiscreteMeasure1D<T>, nu: &DiscreteMeasure1D<T>) -> Vec<T> {
    let mut xs: Vec<T> = mu.atoms.iter().chain(&nu.atoms).copied().collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite atoms"));
    xs.dedup();
    xs
}

/// Right-continuous function equal to `values[j]` on
/// `[breakpoints[j], breakpoints[j+1])` and to zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction<T> {
    pub breakpoints: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> StepFunction<T> {
    pub fn evaluate(&self, x: T) -> T {
        match self.interval(x) {
            Some(j) => self.values[j],
            None => T::zero(),
        }
    }

    fn interval(&self, x: T) -> Option<usize> {
        let k = self.breakpoints.len();
        if k < 2 || x < self.breakpoints[0] || x >= self.breakpoints[k - 1] {
            return None;
        }
        // last breakpoint ≤ x
        Some(self.breakpoints.partition_point(|&b| b <= x) - 1)
    }

    /// Interval lengths `breakpoints[j+1] − breakpoints[j]`.
    pub fn lengths(&self) -> impl Iterator<Item = T> + '_ {
        self.breakpoints.windows(2).map(|w| w[1] - w[0])
    }

    /// `∫ |f(x)| dx`.
    pub fn l1_norm(&self) -> T {
        // folded from +0 so that an empty function integrates to +0, not −0
        self.values
            .iter()
            .zip(self.lengths())
            .fold(T::zero(), |acc, (v, l)| acc + v.abs() * l)
    }
}

/// `w(x) = (μ − ν)((−∞, x])` on the merged support.
pub fn cumulative_difference<T: Real>(mu: &DiscreteMeasure1D<T>, nu: &DiscreteMeasure1D<T>) -> StepFunction<T> {
    let support = merged_support(mu, nu);
    let wm = mu.weights_on(&support).expect("atoms lie in the merged support");
    let wn = nu.weights_on(&support).expect("atoms lie in the merged support");
    let mut running = T::zero();
    let mut values = Vec::with_capacity(support.len().saturating_sub(1));
    for j in 0..support.len().saturating_sub(1) {
        running += wm[j] - wn[j];
        values.push(running);
    }
    StepFunction {
        breakpoints: support,
        values,
    }
}

/// `W₁(μ, ν) = ∫ |F_μ − F_ν| dx`.
pub fn w1_distance<T: Real>(mu: &DiscreteMeasure1D<T>, nu: &DiscreteMeasure1D<T>) -> T {
    cumulative_difference(mu, nu).l1_norm()
}

/// Continuous piecewise-linear function with slopes in `{−1, 0, 1}`,
/// constant outside `[breakpoints[0], breakpoints[last]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear1Lip<T> {
    pub breakpoints: Vec<T>,
    pub slopes: Vec<T>,
    /// Value at `breakpoints[0]`.
    pub start: T,
}

impl<T: Real> PiecewiseLinear1Lip<T> {
    pub fn new(breakpoints: Vec<T>, slopes: Vec<T>, start: T) -> Result<Self> {
        if breakpoints.is_empty() || slopes.len() + 1 != breakpoints.len() {
            return Err(Error::Shape(format!(
                "{} breakpoints need {} slopes, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                slopes.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Argument("breakpoints must be strictly increasing".into()));
        }
        if let Some(s) = slopes.iter().find(|&&s| !(s.abs() <= T::one())) {
            return Err(Error::Argument(format!("slope {s} exceeds 1 in magnitude")));
        }
        Ok(Self {
            breakpoints,
            slopes,
            start,
        })
    }

    /// Values at the breakpoints.
    pub fn knot_values(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.breakpoints.len());
        let mut acc = self.start;
        v.push(acc);
        for (w, &s) in self.breakpoints.windows(2).zip(&self.slopes) {
            acc += s * (w[1] - w[0]);
            v.push(acc);
        }
        v
    }

    pub fn evaluate(&self, x: T) -> T {
        let knots = self.knot_values();
        let k = self.breakpoints.len();
        if x <= self.breakpoints[0] {
            return knots[0];
        }
        if x >= self.breakpoints[k - 1] {
            return knots[k - 1];
        }
        let j = self.breakpoints.partition_point(|&b| b <= x) - 1;
        knots[j] + self.slopes[j] * (x - self.breakpoints[j])
    }

    /// Largest `|slope|`.
    pub fn lipschitz_constant(&self) -> T {
        self.slopes.iter().fold(T::zero(), |m, s| m.max(s.abs()))
    }

    /// `∫ φ d(μ − ν)`.
    pub fn pairing(&self, mu: &DiscreteMeasure1D<T>, nu: &DiscreteMeasure1D<T>) -> T {
        mu.integrate(|x| self.evaluate(x)) - nu.integrate(|x| self.evaluate(x))
    }
}

/// Potential `φ` with `φ' = sign(F_μ − F_ν)` and `φ(x₁) = 0`.
///
/// Integrating by parts gives `∫ φ d(μ − ν) = −∫ φ' w dx = −W₁(μ, ν)`.
pub fn optimal_potential<T: Real>(mu: &DiscreteMeasure1D<T>, nu: &DiscreteMeasure1D<T>) -> PiecewiseLinear1Lip<T> {
    let w = cumulative_difference(mu, nu);
    let threshold = T::lit(SIGN_THRESHOLD);
    let slopes = w
        .values
        .iter()
        .map(|&v| {
            if v > threshold {
                T::one()
            } else if v < -threshold {
                -T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    PiecewiseLinear1Lip {
        breakpoints: w.breakpoints,
        slopes,
        start: T::zero(),
    }
}

/// Diagonal-mode triple on the path graph through `positions`:
/// `Lᵢ = (E_{i,i+1} + E_{i+1,i}) / (x_{i+1} − xᵢ)`.
///
/// For diagonal `a`, `L(a) = maxᵢ |a_{i+1} − aᵢ| / (x_{i+1} − xᵢ)`.
pub fn line_triple<T: Real>(positions: &[T]) -> Result<SpectralTriple<T>> {
    if positions.len() < 2 {
        return Err(Error::Argument(format!(
            "need at least two positions, got {}",
            positions.len()
        )));
    }
    if positions.iter().any(|x| !x.is_finite()) {
        return Err(Error::Argument("positions must be finite".into()));
    }
    if let Some(j) = positions.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(Error::Argument(format!(
            "positions must be strictly increasing: {} then {}",
            positions[j],
            positions[j + 1]
        )));
    }
    let n = positions.len();
    let blocks = (0..n - 1)
        .map(|i| {
            let c = Complex::new(T::one() / (positions[i + 1] - positions[i]), T::zero());
            let mut m = ComplexMatrix::zeros(n, n);
            m[(i, i + 1)] = c;
            m[(i + 1, i)] = c;
            HermitianMatrix::new(m).expect("square")
        })
        .collect();
    SpectralTriple::new(blocks, Algebra::Diagonal)
}
