//! Experiment configuration: command-line flags layered over an optional
//! `key=value` file, validated before any computation starts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::otoc::{validate_series, OtocMode, ProjectorRange};
use crate::quantum_baker::BakerConfig;

/// Largest dimension accepted; a dense 4096x4096 complex matrix is ~268 MB.
pub const MAX_DIMENSION: usize = 4096;
pub const DEFAULT_DIMENSION: usize = 256;
pub const DEFAULT_TMAX: usize = 10;
pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CommandKind {
    Otoc,
    Semiquantum,
    Spectrum,
    CueBaseline,
    Verify,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Otoc => "otoc",
            CommandKind::Semiquantum => "semiquantum",
            CommandKind::Spectrum => "spectrum",
            CommandKind::CueBaseline => "cue-baseline",
            CommandKind::Verify => "verify",
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Partially specified configuration; one layer per source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigLayer {
    pub n: Option<usize>,
    pub t_max: Option<usize>,
    pub j_min: Option<usize>,
    pub j_max: Option<usize>,
    pub mode: Option<OtocMode>,
    pub seed: Option<u64>,
    pub n_samples: Option<usize>,
    pub normalize: Option<bool>,
    pub output_path: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("line {line}: cannot parse {key} = {value:?}")))
}

impl ConfigLayer {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut layer = ConfigLayer::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("line {line_no}: expected key=value")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" | "N" => layer.n = Some(parse_value(key, value, line_no)?),
                "tmax" | "t_max" => layer.t_max = Some(parse_value(key, value, line_no)?),
                "jmin" | "j_min" => layer.j_min = Some(parse_value(key, value, line_no)?),
                "jmax" | "j_max" => layer.j_max = Some(parse_value(key, value, line_no)?),
                "mode" => layer.mode = Some(value.parse()?),
                "seed" => layer.seed = Some(parse_value(key, value, line_no)?),
                "samples" | "n_samples" => layer.n_samples = Some(parse_value(key, value, line_no)?),
                "normalize" => layer.normalize = Some(parse_value(key, value, line_no)?),
                "out" | "output_path" => layer.output_path = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::invalid(format!("line {line_no}: unknown key {other:?}")))
                }
            }
        }
        Ok(layer)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            n: self.n.or(base.n),
            t_max: self.t_max.or(base.t_max),
            j_min: self.j_min.or(base.j_min),
            j_max: self.j_max.or(base.j_max),
            mode: self.mode.or(base.mode),
            seed: self.seed.or(base.seed),
            n_samples: self.n_samples.or(base.n_samples),
            normalize: self.normalize.or(base.normalize),
            output_path: self.output_path.or(base.output_path),
        }
    }
}

/// A fully resolved, validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub n: usize,
    pub t_max: usize,
    pub range: ProjectorRange,
    pub mode: OtocMode,
    pub seed: u64,
    pub n_samples: usize,
    pub normalize: bool,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Fills defaults and checks every precondition of the target command.
    pub fn resolve(command: CommandKind, layer: ConfigLayer) -> Result<Self> {
        let n = layer.n.unwrap_or(DEFAULT_DIMENSION);
        if n > MAX_DIMENSION {
            return Err(Error::invalid(format!(
                "N={n} exceeds the memory guard of {MAX_DIMENSION}"
            )));
        }
        let baker = BakerConfig::new(n)?;
        let big_t = baker.max_semiquantum_time() as usize;
        let mode = match command {
            CommandKind::Semiquantum => OtocMode::Semiquantum,
            _ => layer.mode.unwrap_or(OtocMode::Quantum),
        };
        let default_tmax = match mode {
            OtocMode::Semiquantum => big_t,
            OtocMode::Quantum => DEFAULT_TMAX,
        };
        let t_max = layer.t_max.unwrap_or(default_tmax);
        let j_min = layer.j_min.unwrap_or(0);
        let j_max = layer.j_max.unwrap_or(n / 2 - 1);
        let range = ProjectorRange::new(n, j_min, j_max)?;
        let n_samples = layer.n_samples.unwrap_or(DEFAULT_SAMPLES);

        match command {
            CommandKind::Otoc | CommandKind::Spectrum | CommandKind::Semiquantum => {
                validate_series(n, t_max, &range, mode)?
            }
            CommandKind::CueBaseline => {
                if n_samples < 2 {
                    return Err(Error::invalid("cue-baseline needs at least 2 samples"));
                }
            }
            CommandKind::Verify => {
                if n > 1024 {
                    return Err(Error::invalid(format!(
                        "verify runs at N <= 1024, got N={n}"
                    )));
                }
            }
        }

        Ok(Self {
            command,
            n,
            t_max,
            range,
            mode,
            seed: layer.seed.unwrap_or(0),
            n_samples,
            normalize: layer.normalize.unwrap_or(false),
            output_path: layer.output_path,
        })
    }

    /// One-line echo used in dataset headers.
    pub fn echo(&self) -> String {
        format!(
            "command={} n={} tmax={} jmin={} jmax={} mode={} seed={} samples={} normalize={}",
            self.command,
            self.n,
            self.t_max,
            self.range.j_min(),
            self.range.j_max(),
            self.mode,
            self.seed,
            self.n_samples,
            self.normalize
        )
    }
}
