use std::io::Read;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use specdist::{optimal_potential, solve_distance, w1_distance, Status};

use crate::error::CliError;
use crate::io::{self, CertificateFile, MatrixJson, Num, PotentialFile, ProblemFile, SolverOverrides};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INFINITE: i32 = 2;
pub const EXIT_MAX_ITER: i32 = 3;

/// Text for standard output and the process exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: EXIT_OK }
    }
}

/// Reads a file, or standard input for `-`.
pub fn read_input(source: &str) -> Result<String, CliError> {
    let mut text = String::new();
    let result = if source == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(source).map(|t| text = t)
    };
    result.map_err(|source_err| CliError::Read {
        path: source.into(),
        source: source_err,
    })?;
    Ok(text)
}

pub fn status_code(status: Status) -> i32 {
    match status {
        Status::Converged | Status::ZeroDistance => EXIT_OK,
        Status::Infinite => EXIT_INFINITE,
        Status::MaxIter => EXIT_MAX_ITER,
    }
}

pub fn distance(text: &str, overrides: &SolverOverrides) -> Result<Outcome, CliError> {
    let problem = ProblemFile::parse(text)?.validate(overrides)?;
    let (a, b) = problem
        .states
        .ok_or_else(|| CliError::validation("rho1", "distance needs both rho1 and rho2"))?;
    let start = Instant::now();
    let cert = solve_distance(&problem.triple, &a, &b, &problem.config)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let file = CertificateFile::from_certificate(&cert, runtime_ms);
    Ok(Outcome {
        stdout: file.to_json(),
        code: status_code(cert.status),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub connected: bool,
    pub kernel_dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite: Option<bool>,
    /// Unit-norm kernel element with the largest `|Tr(Δρ k)|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_witness: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Num>,
}

pub fn check_report(text: &str) -> Result<CheckReport, CliError> {
    let problem = ProblemFile::parse(text)?.validate(&SolverOverrides::default())?;
    let kernel = problem.triple.kernel_basis();
    let mut report = CheckReport {
        connected: kernel.dim() == 1,
        kernel_dimension: kernel.dim(),
        finite: None,
        kernel_witness: None,
        pairing: None,
    };
    if let Some((a, b)) = &problem.states {
        let gate = kernel.finiteness(&(a.as_matrix() - b.as_matrix()));
        report.finite = Some(gate.finite);
        if let Some((w, p)) = gate.violation {
            report.kernel_witness = Some(io::matrix_to_json(w.as_matrix()));
            report.pairing = Some(Num(p));
        }
    }
    Ok(report)
}

pub fn check(text: &str) -> Result<Outcome, CliError> {
    Ok(Outcome::ok(io::to_json(&check_report(text)?)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct W1Report {
    distance: Num,
}

/// Measures are inline JSON when the argument starts with `[`, otherwise a
/// path (or `-`).
pub fn measure_argument(arg: &str, field: &str) -> Result<specdist::Measure, CliError> {
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else {
        read_input(arg)?
    };
    io::parse_measure(&text, field)
}

pub fn w1(mu: &str, nu: &str, potential: Option<&Path>) -> Result<Outcome, CliError> {
    let mu = measure_argument(mu, "mu")?;
    let nu = measure_argument(nu, "nu")?;
    let d = w1_distance(&mu, &nu);
    if let Some(path) = potential {
        let phi = PotentialFile::from(&optimal_potential(&mu, &nu));
        std::fs::write(path, io::to_json(&phi) + "\n").map_err(|source| CliError::Write {
            path: path.into(),
            source,
        })?;
    }
    Ok(Outcome::ok(io::to_json(&W1Report { distance: Num(d) })))
}

pub fn gen(file: ProblemFile) -> Outcome {
    Outcome::ok(file.to_json())
}
