//! Run configuration: a TOML file with one section per concern.
//!
//! ```toml
//! [bench]
//! family = "erdos_renyi(0.5)"
//! depth = 1
//! size_limit = 14
//! connectivity = "grid"
//!
//! [bench.optimizer]
//! max_evaluations = 300
//!
//! [backend]
//! kind = "noisy"
//! eps1 = 0.004
//! eps2 = 0.02
//!
//! [output]
//! report = "perfect.csv"
//! raw = "perfect.raw"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::backend::{Backend, ExactSolverStub, NoisyBackend, PerfectBackend, UniformRandomStub};
use crate::bench::BenchmarkConfig;
use crate::graphs::DEFAULT_ENUMERATION_LIMIT;
use crate::plugin::ExternalBackend;
use crate::sim::{NoiseModel, Simulator, DEFAULT_MAX_QUBITS};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    Perfect,
    Noisy,
    RandomStub,
    ExactStub,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendSpec {
    pub kind: BackendKind,
    pub eps1: f64,
    pub eps2: f64,
    /// Command line of an external backend.
    pub command: Option<String>,
    pub timeout_s: f64,
    pub max_qubits: usize,
    pub samples_per_trajectory: usize,
}

impl Default for BackendSpec {
    fn default() -> Self {
        BackendSpec {
            kind: BackendKind::Perfect,
            eps1: 0.0,
            eps2: 0.0,
            command: None,
            timeout_s: 600.0,
            max_qubits: DEFAULT_MAX_QUBITS,
            samples_per_trajectory: 1,
        }
    }
}

impl BackendSpec {
    pub fn validate(&self) -> Result<()> {
        NoiseModel::new(self.eps1, self.eps2)?;
        if self.kind == BackendKind::External
            && self.command.as_deref().map_or(true, |c| c.trim().is_empty())
        {
            return Err(Error::Parameter("external backend needs a command".into()));
        }
        if !(self.timeout_s > 0.0 && self.timeout_s.is_finite()) {
            return Err(Error::Parameter(format!("timeout {} s must be positive", self.timeout_s)));
        }
        if self.samples_per_trajectory < 1 {
            return Err(Error::Parameter("samples_per_trajectory must be at least 1".into()));
        }
        if self.max_qubits < 1 || self.max_qubits > 40 {
            return Err(Error::Parameter(format!("max_qubits = {} outside [1, 40]", self.max_qubits)));
        }
        Ok(())
    }

    fn simulator(&self) -> Simulator {
        Simulator {
            max_qubits: self.max_qubits,
            samples_per_trajectory: self.samples_per_trajectory,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Backend>> {
        self.validate()?;
        Ok(match self.kind {
            BackendKind::Perfect => Box::new(PerfectBackend { sim: self.simulator() }),
            BackendKind::Noisy => Box::new(NoisyBackend {
                sim: self.simulator(),
                noise: NoiseModel::new(self.eps1, self.eps2)?,
            }),
            BackendKind::RandomStub => Box::new(UniformRandomStub),
            BackendKind::ExactStub => Box::new(ExactSolverStub {
                enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
            }),
            BackendKind::External => Box::new(ExternalBackend::new(
                self.command.as_deref().unwrap_or_default(),
                Duration::from_secs_f64(self.timeout_s),
            )?),
        })
    }
}

/// Short form used on the command line: `perfect`, `noisy:eps1=A,eps2=B`,
/// `random-stub`, `exact-stub` or `external:<command>`. Only the kind and
/// its own arguments are set; other fields keep their defaults.
impl FromStr for BackendSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r)),
            None => (s, None),
        };
        let mut spec = BackendSpec::default();
        let bad = || Error::Parameter(format!("unrecognized backend '{s}'"));
        match (head, rest) {
            ("perfect", None) => {}
            ("random-stub" | "random_stub", None) => spec.kind = BackendKind::RandomStub,
            ("exact-stub" | "exact_stub", None) => spec.kind = BackendKind::ExactStub,
            ("noisy", Some(args)) => {
                spec.kind = BackendKind::Noisy;
                for kv in args.split(',').filter(|t| !t.trim().is_empty()) {
                    let (k, v) = kv.split_once('=').ok_or_else(bad)?;
                    let v: f64 = v.trim().parse().map_err(|_| bad())?;
                    match k.trim() {
                        "eps1" => spec.eps1 = v,
                        "eps2" => spec.eps2 = v,
                        _ => return Err(bad()),
                    }
                }
            }
            ("external", Some(cmd)) => {
                spec.kind = BackendKind::External;
                spec.command = Some(cmd.trim().to_string());
            }
            _ => return Err(bad()),
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for BackendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BackendKind::Perfect => write!(f, "perfect"),
            BackendKind::Noisy => write!(f, "noisy:eps1={},eps2={}", self.eps1, self.eps2),
            BackendKind::RandomStub => write!(f, "random-stub"),
            BackendKind::ExactStub => write!(f, "exact-stub"),
            BackendKind::External => {
                write!(f, "external:{}", self.command.as_deref().unwrap_or_default())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Report CSV; nothing is written when unset.
    pub report: Option<PathBuf>,
    /// Per-graph raw data.
    pub raw: Option<PathBuf>,
    /// Per-evaluation optimizer traces.
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bench: BenchmarkConfig,
    pub backend: BackendSpec,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parameter(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
            .map_err(|e| Error::Parameter(format!("{}: {e}", path.display())))
    }

    /// The fully resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.bench.validate()?;
        self.backend.validate()
    }
}
