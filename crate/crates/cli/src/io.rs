//! JSON documents read and written by the command-line tool.
//!
//! Complex entries are `[re, im]` pairs and matrices are arrays of rows.
//! Every real number is written with 17 significant digits, which makes
//! `parse ∘ serialize` the identity on `f64`. Bounds that are not finite
//! (the distance of states separated by the kernel of `∇`) are written as
//! `null` and read back as `+∞`.

use std::fmt;

use num_complex::Complex;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use specdist::{
    Algebra, Certificate, ComplexMatrix, Config, DensityMatrix, HermitianMatrix, OneForm,
    SpectralTriple, Status,
};

use crate::error::CliError;

/// Largest accepted `‖L − L†‖`, relative to the largest entry.
const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Finite real written with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom(format!("non-finite number {}", self.0)));
        }
        let n: serde_json::Number = format!("{:.16e}", self.0)
            .parse()
            .map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        if x.is_finite() {
            Ok(Num(x))
        } else {
            Err(de::Error::custom("number out of range"))
        }
    }
}

/// Real that may be `+∞`, encoded as `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound(pub f64);

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            Num(self.0).serialize(s)
        } else if self.0 == f64::INFINITY {
            s.serialize_none()
        } else {
            Err(serde::ser::Error::custom(format!("bound {} cannot be encoded", self.0)))
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Bound(Option::<Num>::deserialize(d)?.map_or(f64::INFINITY, |n| n.0)))
    }
}

/// `n × n` matrix as rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[Num; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix<f64>) -> MatrixJson {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [Num(m[(i, j)].re), Num(m[(i, j)].im)]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson, n: usize, field: &str) -> Result<ComplexMatrix<f64>, CliError> {
    if rows.len() != n {
        return Err(CliError::validation(field, format!("expected {n} rows, found {}", rows.len())));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::validation(
                &format!("{field}[{i}]"),
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        data.extend(row.iter().map(|[re, im]| Complex::new(re.0, im.0)));
    }
    ComplexMatrix::new(n, n, data).map_err(|e| CliError::validation(field, e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraName {
    Full,
    Diagonal,
}

impl From<AlgebraName> for Algebra {
    fn from(a: AlgebraName) -> Self {
        match a {
            AlgebraName::Full => Algebra::Full,
            AlgebraName::Diagonal => Algebra::Diagonal,
        }
    }
}

impl From<Algebra> for AlgebraName {
    fn from(a: Algebra) -> Self {
        match a {
            Algebra::Full => AlgebraName::Full,
            Algebra::Diagonal => AlgebraName::Diagonal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleJson {
    pub n: usize,
    #[serde(rename = "N")]
    pub blocks: usize,
    pub algebra: AlgebraName,
    #[serde(rename = "L")]
    pub dirac: Vec<MatrixJson>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_gap: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restrict_antihermitian: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub triple: TripleJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho1: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho2: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverJson>,
}

/// Validated contents of a [`ProblemFile`].
#[derive(Clone, Debug)]
pub struct Problem {
    pub triple: SpectralTriple<f64>,
    pub states: Option<(DensityMatrix<f64>, DensityMatrix<f64>)>,
    pub config: Config,
}

/// Overrides applied on top of a file's solver section.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverOverrides {
    pub tol_gap: Option<f64>,
    pub max_iter: Option<usize>,
    pub restrict_antihermitian: bool,
    pub seed: Option<u64>,
}

impl SolverJson {
    pub fn to_config(&self, overrides: &SolverOverrides) -> Result<Config, CliError> {
        let mut cfg = Config::default();
        if let Some(t) = overrides.tol_gap.or(self.tol_gap.map(|n| n.0)) {
            cfg.tol_gap = t;
        }
        if let Some(m) = overrides.max_iter.or(self.max_iter) {
            cfg.max_iter = m;
        }
        cfg.restrict_antihermitian = overrides.restrict_antihermitian || self.restrict_antihermitian.unwrap_or(false);
        if let Some(s) = overrides.seed.or(self.seed) {
            cfg.seed = s;
        }
        cfg.validate().map_err(|e| CliError::validation("solver", e.to_string()))?;
        Ok(cfg)
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        parse_json(text)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_parts(
        triple: &SpectralTriple<f64>,
        states: Option<(&DensityMatrix<f64>, &DensityMatrix<f64>)>,
        solver: Option<SolverJson>,
    ) -> Self {
        Self {
            triple: TripleJson {
                n: triple.dim(),
                blocks: triple.blocks(),
                algebra: triple.algebra().into(),
                dirac: triple.dirac_blocks().iter().map(|l| matrix_to_json(l.as_matrix())).collect(),
            },
            rho1: states.map(|(a, _)| matrix_to_json(a.as_matrix())),
            rho2: states.map(|(_, b)| matrix_to_json(b.as_matrix())),
            solver,
        }
    }

    pub fn validate(&self, overrides: &SolverOverrides) -> Result<Problem, CliError> {
        let t = &self.triple;
        if t.n == 0 {
            return Err(CliError::validation("triple.n", "must be at least 1"));
        }
        if t.dirac.len() != t.blocks {
            return Err(CliError::validation(
                "triple.L",
                format!("N is {} but {} matrices are given", t.blocks, t.dirac.len()),
            ));
        }
        let mut dirac = Vec::with_capacity(t.blocks);
        for (i, l) in t.dirac.iter().enumerate() {
            let field = format!("triple.L[{i}]");
            let m = matrix_from_json(l, t.n, &field)?;
            let tol = HERMITIAN_TOLERANCE * m.max_abs().max(1.0);
            dirac.push(HermitianMatrix::new_strict(m, tol).map_err(|e| CliError::validation(&field, e.to_string()))?);
        }
        let triple = SpectralTriple::new(dirac, t.algebra.into())
            .map_err(|e| CliError::validation("triple", e.to_string()))?;
        let state = |m: &MatrixJson, field: &str| -> Result<DensityMatrix<f64>, CliError> {
            let rho = DensityMatrix::new(matrix_from_json(m, t.n, field)?)
                .map_err(|e| CliError::validation(field, e.to_string()))?;
            rho.check_compatible(&triple)
                .map_err(|e| CliError::validation(field, e.to_string()))?;
            Ok(rho)
        };
        let states = match (&self.rho1, &self.rho2) {
            (Some(a), Some(b)) => Some((state(a, "rho1")?, state(b, "rho2")?)),
            (None, None) => None,
            (Some(_), None) => return Err(CliError::validation("rho2", "missing while rho1 is given")),
            (None, Some(_)) => return Err(CliError::validation("rho1", "missing while rho2 is given")),
        };
        let config = self.solver.clone().unwrap_or_default().to_config(overrides)?;
        Ok(Problem {
            triple,
            states,
            config,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub lower: Bound,
    pub upper: Bound,
    pub gap: Bound,
    pub status: StatusName,
    pub iterations: usize,
    pub primal_witness: Option<MatrixJson>,
    pub dual_witness: Option<Vec<MatrixJson>>,
    pub kernel_dimension: usize,
    pub connected: bool,
    pub runtime_ms: Num,
}

/// [`Status`] under its JSON spelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StatusName(pub Status);

impl Serialize for StatusName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.0.as_str())
    }
}

impl<'de> Deserialize<'de> for StatusName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map(StatusName).map_err(de::Error::custom)
    }
}

impl CertificateFile {
    pub fn from_certificate(c: &Certificate, runtime_ms: f64) -> Self {
        Self {
            lower: Bound(c.lower),
            upper: Bound(c.upper),
            gap: Bound(c.gap),
            status: StatusName(c.status),
            iterations: c.iterations,
            primal_witness: c.primal_witness.as_ref().map(|a| matrix_to_json(a.as_matrix())),
            dual_witness: c.dual_witness.as_ref().map(form_to_json),
            kernel_dimension: c.kernel_dimension,
            connected: c.kernel_dimension == 1,
            runtime_ms: Num(runtime_ms),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        parse_json(text)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

pub fn form_to_json(u: &OneForm<f64>) -> Vec<MatrixJson> {
    u.blocks.iter().map(matrix_to_json).collect()
}

/// Measure given as `[[position, weight], ...]`.
pub type MeasureJson = Vec<[Num; 2]>;

pub fn parse_measure(text: &str, field: &str) -> Result<specdist::Measure, CliError> {
    let pairs: MeasureJson = parse_json(text).map_err(|e| e.within(field))?;
    let pairs: Vec<(f64, f64)> = pairs.iter().map(|[x, w]| (x.0, w.0)).collect();
    specdist::Measure::from_pairs(&pairs).map_err(|e| CliError::validation(field, e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    pub breakpoints: Vec<Num>,
    pub slopes: Vec<Num>,
    pub start: Num,
}

impl From<&specdist::PiecewiseLinear1Lip<f64>> for PotentialFile {
    fn from(p: &specdist::PiecewiseLinear1Lip<f64>) -> Self {
        Self {
            breakpoints: p.breakpoints.iter().copied().map(Num).collect(),
            slopes: p.slopes.iter().copied().map(Num).collect(),
            start: Num(p.start),
        }
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse {
            line: inner.line(),
            column: inner.column(),
            path,
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        path: ".".into(),
        message: e.to_string(),
    })?;
    Ok(value)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents hold only finite numbers")
}

impl fmt::Display for AlgebraName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraName::Full => "full",
            AlgebraName::Diagonal => "diagonal",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn numbers_round_trip_bit_exact() {
        let mut r = specdist::random::rng(5);
        let mut xs = vec![0.0, -0.0, 1.0, f64::MIN_POSITIVE, 5e-324, f64::MAX, -f64::MAX, 0.1, 1.0 / 3.0];
        xs.extend((0..20000).map(|_| f64::from_bits(r.gen::<u64>())).filter(|x| x.is_finite()));
        for x in xs {
            let text = to_json(&Num(x));
            let back: Num = parse_json(&text).unwrap();
            assert_eq!(back.0.to_bits(), x.to_bits(), "{x:e} -> {text}");
        }
    }

    #[test]
    fn bounds_encode_infinity_as_null() {
        assert_eq!(to_json(&Bound(f64::INFINITY)), "null");
        assert_eq!(parse_json::<Bound>("null").unwrap().0, f64::INFINITY);
        assert_eq!(parse_json::<Bound>("2.5").unwrap().0, 2.5);
        assert!(serde_json::to_string(&Bound(f64::NAN)).is_err());
        assert!(serde_json::to_string(&Num(f64::INFINITY)).is_err());
    }

    #[test]
    fn trailing_input_is_rejected() {
        assert!(parse_json::<Num>("1.0 2.0").is_err());
    }
}
