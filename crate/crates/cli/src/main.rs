use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use specdist::Algebra;
use specdist_cli::commands::{self, EXIT_INVALID};
use specdist_cli::io::SolverOverrides;
use specdist_cli::{gen, CliError, Outcome};

/// Certified spectral distances on finite spectral triples.
#[derive(Parser)]
#[command(name = "specdist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the distance between rho1 and rho2 and print a certificate.
    Distance {
        /// Problem file, or `-` for standard input.
        input: String,
        /// Relative gap at which to stop.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Restrict the one-form to anti-Hermitian blocks.
        #[arg(long)]
        anti_hermitian: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Report the kernel of the derivation and the finite-distance verdict.
    Check {
        /// Problem file, or `-` for standard input.
        input: String,
    },
    /// Exact transport distance between two measures on the line.
    W1 {
        /// `[[position, weight], ...]` inline, or a path to such a file.
        mu: String,
        nu: String,
        /// Write the optimal 1-Lipschitz potential to this file.
        #[arg(long)]
        potential: Option<PathBuf>,
    },
    /// Print a problem file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// `L = Λσx` on two points.
    TwoPoint {
        #[arg(long)]
        lambda: f64,
    },
    /// Points on the line with two weight vectors.
    Line {
        #[arg(long, value_delimiter = ',', required = true)]
        positions: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        mu: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        nu: Vec<f64>,
    },
    /// Random triple and states, deterministic in the seed.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        blocks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = AlgebraArg::Full)]
        algebra: AlgebraArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgebraArg {
    Full,
    Diagonal,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Distance {
            input,
            tol,
            max_iter,
            anti_hermitian,
            seed,
        } => {
            let overrides = SolverOverrides {
                tol_gap: tol,
                max_iter,
                restrict_antihermitian: anti_hermitian,
                seed,
            };
            commands::distance(&commands::read_input(&input)?, &overrides)
        }
        Command::Check { input } => commands::check(&commands::read_input(&input)?),
        Command::W1 { mu, nu, potential } => commands::w1(&mu, &nu, potential.as_deref()),
        Command::Gen { kind } => {
            let file = match kind {
                GenKind::TwoPoint { lambda } => gen::two_point(lambda)?,
                GenKind::Line { positions, mu, nu } => gen::line(&positions, &mu, &nu)?,
                GenKind::Random { n, blocks, seed, algebra } => {
                    let algebra = match algebra {
                        AlgebraArg::Full => Algebra::Full,
                        AlgebraArg::Diagonal => Algebra::Diagonal,
                    };
                    gen::random(n, blocks, seed, algebra)?
                }
            };
            Ok(commands::gen(file))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{}", out.stdout);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("specdist: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
