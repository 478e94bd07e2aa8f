//! Command-line front end: argument parsing, dispatch and exit codes.
//!
//! ```text
//! baker-otoc <otoc|semiquantum|spectrum|cue-baseline|verify>
//!     [--n N] [--tmax T] [--jmin a] [--jmax b] [--mode quantum|semiquantum]
//!     [--seed s] [--samples k] [--normalize] [--out path] [--config file]
//! ```
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 failed numerical check,
//! 3 I/O error.

pub mod config;
pub mod dataset;
pub mod experiments;
pub mod verify;

use std::path::PathBuf;

use clap::Parser;

use crate::error::{Error, Result};
use crate::otoc::OtocMode;
pub use config::{CommandKind, ConfigLayer, ExperimentConfig};
pub use dataset::{Cell, Dataset};

#[derive(Debug, Parser)]
#[command(name = "baker-otoc", version, about = "Commutator growth in the quantum baker's map")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: CommandKind,
    /// Hilbert-space dimension N (even, at most 4096).
    #[arg(long)]
    pub n: Option<usize>,
    /// Last time step.
    #[arg(long)]
    pub tmax: Option<usize>,
    /// First position index of the projector.
    #[arg(long)]
    pub jmin: Option<usize>,
    /// Last position index of the projector.
    #[arg(long)]
    pub jmax: Option<usize>,
    /// Propagator: quantum (B^t) or semiquantum (B_t).
    #[arg(long)]
    pub mode: Option<OtocMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of CUE samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Divide f-columns by N.
    #[arg(long)]
    pub normalize: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key=value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Cli {
    fn flag_layer(&self) -> ConfigLayer {
        ConfigLayer {
            n: self.n,
            t_max: self.tmax,
            j_min: self.jmin,
            j_max: self.jmax,
            mode: self.mode,
            seed: self.seed,
            n_samples: self.samples,
            normalize: self.normalize.then_some(true),
            output_path: self.out.clone(),
        }
    }

    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => ConfigLayer::from_file(path)?,
            None => ConfigLayer::default(),
        };
        ExperimentConfig::resolve(self.command, self.flag_layer().over(file))
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::DimensionMismatch(_) | Error::NotSquare { .. } => {
            EXIT_VALIDATION
        }
        Error::NotConverged { .. } | Error::NumericalCheck(_) => EXIT_NUMERICAL,
        Error::Io { .. } => EXIT_IO,
    }
}

/// Runs a resolved configuration, writing its output; returns the exit code.
pub fn execute(config: &ExperimentConfig) -> Result<i32> {
    let out = config.output_path.as_deref();
    let data = match config.command {
        CommandKind::Otoc => experiments::run_otoc(config)?,
        CommandKind::Semiquantum => experiments::run_semiquantum(config)?,
        CommandKind::Spectrum => experiments::run_spectrum(config)?,
        CommandKind::CueBaseline => experiments::run_cue_baseline(config)?,
        CommandKind::Verify => {
            let report = verify::run_verify(config);
            dataset::emit(&report.render(), out)?;
            return Ok(if report.all_passed() { EXIT_OK } else { EXIT_NUMERICAL });
        }
    };
    dataset::emit(&data.to_csv(), out)?;
    Ok(EXIT_OK)
}

/// Full entry point from raw arguments; diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.resolve().and_then(|c| execute(&c)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("baker-otoc: {e}");
            exit_code(&e)
        }
    }
}
