//! `egan-verify`: command-line front end for the verification library.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails or a
//! counterexample is found, 2 on usage or input errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use egan_core::harness::Generator;
use egan_core::GeometryError;

#[derive(Parser, Debug)]
#[command(
    name = "egan-verify",
    version,
    about = "Numerical verification of the simplex inradius-circumradius inequality"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Simplex JSON file
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Seed of the trial generator
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Dimension: n for Euclidean simplices, m for spherical ones
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Number of trials or search starts
    #[arg(long, global = true, default_value_t = 1)]
    pub trials: usize,
    /// Relative tolerance of every pass/fail decision
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub rtol: f64,
    /// Write the JSON report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write CSV output here (convergence tables)
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check one simplex read from --input
    Verify {
        #[arg(value_enum)]
        geometry: Geometry,
    },
    /// Run the matrix certificate on a spherical simplex and its polar
    Certificate {
        /// Use generated simplices instead of --input
        #[arg(long)]
        random: bool,
        #[arg(long, value_enum, default_value_t = GeneratorArg::Gaussian)]
        generator: GeneratorArg,
    },
    /// Scan generated Euclidean simplices for violations
    Falsify {
        #[arg(long, value_enum, default_value_t = GeneratorArg::Gaussian)]
        generator: GeneratorArg,
        /// Noise scale of the regular-perturbed generator
        #[arg(long, default_value_t = 1e-3)]
        perturbation: f64,
    },
    /// Minimize the relative slack from generated starts
    Extremal {
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        #[arg(long, value_enum, default_value_t = GeneratorArg::Gaussian)]
        generator: GeneratorArg,
    },
    /// Lift a Euclidean simplex onto spheres of growing radius
    Converge {
        /// Comma-separated absolute heights; defaults to 10, 100, 1000, 10000 times R
        #[arg(long, value_delimiter = ',')]
        heights: Option<Vec<f64>>,
    },
    /// Residual of the spherical Euler relation for triangles
    EulerResidual {
        /// Use generated triangles instead of --input
        #[arg(long)]
        random: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Geometry {
    Euclid,
    Spherical,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum GeneratorArg {
    Gaussian,
    NearDegenerate,
    RegularPerturbed,
}

impl From<GeneratorArg> for Generator {
    fn from(g: GeneratorArg) -> Self {
        match g {
            GeneratorArg::Gaussian => Generator::Gaussian,
            GeneratorArg::NearDegenerate => Generator::NearDegenerate,
            GeneratorArg::RegularPerturbed => Generator::RegularPerturbed,
        }
    }
}

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("EGAN_VERIFY_THREADS") {
        let n: usize = value
            .parse()
            .map_err(|_| anyhow::anyhow!("EGAN_VERIFY_THREADS must be a positive integer"))?;
        if n == 0 {
            anyhow::bail!("EGAN_VERIFY_THREADS must be a positive integer");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| commands::run(&cli));
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let check_failed = matches!(
                e.downcast_ref::<GeometryError>(),
                Some(GeometryError::CertificateViolation(_))
            );
            ExitCode::from(if check_failed { 1 } else { 2 })
        }
    }
}
