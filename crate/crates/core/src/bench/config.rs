//! Experiment manifests: a TOML file plus command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::devsim::DeviceSpec;
use crate::error::{Error, Result};
use crate::gatesim::noise::{NoiseSpec, DEFAULT_READOUT_FLIP, DEFAULT_T1, DEFAULT_T2};
use crate::models::{Model, SpinOneParams, TimParams};
use crate::qcore::state::QuantumState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// `exp(-i H t)` with no product-formula error.
    Exact,
    /// Gate-level density matrices over the CNOT set.
    Gate,
    /// Pulse-level resonator/transmon model over the exchange set.
    Device,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Gate => "gate",
            Backend::Device => "device",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Backend::Exact),
            "gate" => Ok(Backend::Gate),
            "device" => Ok(Backend::Device),
            other => Err(Error::Config(format!(
                "unknown backend `{other}` (expected exact, gate or device)"
            ))),
        }
    }
}

/// Evenly spaced times in the model's dimensionless units (`E t` for the
/// spin-1 model, `gamma t` for the Ising model).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_min: 0.0,
            t_max: 3.0,
            points: 31,
        }
    }
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let span = self.t_max - self.t_min;
        (0..self.points)
            .map(|k| self.t_min + span * k as f64 / (self.points - 1) as f64)
            .collect()
    }
}

/// Uniform decoherence of the gate-level backend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateNoiseConfig {
    pub t1: f64,
    pub t2: f64,
    pub readout_flip: f64,
}

impl Default for GateNoiseConfig {
    fn default() -> Self {
        Self {
            t1: DEFAULT_T1,
            t2: DEFAULT_T2,
            readout_flip: DEFAULT_READOUT_FLIP,
        }
    }
}

impl GateNoiseConfig {
    pub fn noiseless() -> Self {
        Self {
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            readout_flip: 0.0,
        }
    }

    pub fn to_noise_spec(&self, n_qubits: usize) -> NoiseSpec {
        NoiseSpec::uniform(n_qubits, self.t1, self.t2, self.readout_flip)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub backend: Backend,
    /// Trotter steps `n`.
    pub steps: usize,
    /// Measurement shots per point; zero evaluates the expectation exactly.
    #[serde(default)]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    /// Product state, one character per qubit (see
    /// [`product_state`](crate::models::product_state)); the model's default
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub model: Model,
    #[serde(default)]
    pub grid: TimeGrid,
    #[serde(default)]
    pub gate: GateNoiseConfig,
    #[serde(default)]
    pub device: DeviceSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Gate,
            steps: 1,
            shots: 0,
            seed: 0,
            initial_state: None,
            out: None,
            model: Model::Spin1(SpinOneParams::default()),
            grid: TimeGrid::default(),
            gate: GateNoiseConfig::default(),
            device: DeviceSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.steps < 1 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        let g = &self.grid;
        if g.points < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {}", g.points)));
        }
        if !(g.t_min.is_finite() && g.t_max.is_finite() && g.t_max > g.t_min) {
            return Err(Error::Config(format!(
                "grid must satisfy t_min < t_max (got {} and {})",
                g.t_min, g.t_max
            )));
        }
        if g.t_min < 0.0 {
            return Err(Error::Config(format!("t_min must be >= 0, got {}", g.t_min)));
        }
        if let Some(s) = &self.initial_state {
            if s.chars().count() != 2 {
                return Err(Error::Config(format!("initial state `{s}` must name 2 qubits")));
            }
        }
        self.initial_state()?;
        self.gate.to_noise_spec(2).validate()?;
        self.device.validate()?;
        Ok(())
    }

    pub fn initial_state(&self) -> Result<QuantumState> {
        let spec = self
            .initial_state
            .as_deref()
            .unwrap_or_else(|| self.model.default_initial_state());
        crate::models::product_state(spec).map_err(|e| Error::Config(e.to_string()))
    }

    /// The coherence time that labels this run: the qubit `T2` of the gate
    /// backend or the resonator `T2` of the device.
    pub fn t2_label(&self) -> Option<f64> {
        match self.backend {
            Backend::Exact => None,
            Backend::Gate => Some(self.gate.t2),
            Backend::Device => Some(self.device.t2_nr),
        }
    }

    /// Sets the coherence time of the active backend. An infinite `T2`
    /// also removes relaxation, since `T2 <= 2 T1`.
    pub fn set_t2(&mut self, t2: f64) -> Result<()> {
        if !(t2 > 0.0) {
            return Err(Error::Config(format!("T2 must be positive, got {t2}")));
        }
        match self.backend {
            Backend::Exact => {}
            Backend::Gate => {
                self.gate.t2 = t2;
                if t2.is_infinite() {
                    self.gate.t1 = f64::INFINITY;
                }
            }
            Backend::Device => self.device = self.device.clone().with_nr_t2(t2),
        }
        Ok(())
    }

    /// Applies command-line overrides; flags win over the file.
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(m) = &o.model {
            self.model = match (m.to_ascii_lowercase().as_str(), self.model) {
                ("spin1", Model::Spin1(p)) => Model::Spin1(p),
                ("spin1", _) => Model::Spin1(SpinOneParams::default()),
                ("tim", Model::Tim(p)) => Model::Tim(p),
                ("tim", _) => Model::Tim(TimParams::default()),
                (other, _) => {
                    return Err(Error::Config(format!(
                        "unknown model `{other}` (expected spin1 or tim)"
                    )))
                }
            };
        }
        if let Some(b) = o.backend {
            self.backend = b;
        }
        if let Some(n) = o.steps {
            self.steps = n;
        }
        if let Some(t) = o.tmax {
            self.grid.t_max = t;
        }
        if let Some(p) = o.points {
            self.grid.points = p;
        }
        if let Some(t2) = o.t2 {
            self.set_t2(t2)?;
        }
        if let Some(s) = o.shots {
            self.shots = s;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(p) = &o.out {
            self.out = Some(p.clone());
        }
        self.validate()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub model: Option<String>,
    pub backend: Option<Backend>,
    pub steps: Option<usize>,
    pub tmax: Option<f64>,
    pub points: Option<usize>,
    pub t2: Option<f64>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Parses a time in seconds; accepts `inf` and unit suffixes `s`, `ms`,
/// `us`.
pub fn parse_seconds(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    if t == "inf" || t == "infinity" {
        return Ok(f64::INFINITY);
    }
    let (num, exp) = if let Some(v) = t.strip_suffix("us") {
        (v, -6)
    } else if let Some(v) = t.strip_suffix("ms") {
        (v, -3)
    } else if let Some(v) = t.strip_suffix('s') {
        (v, 0)
    } else {
        (t.as_str(), 0)
    };
    let bad = || Error::Config(format!("cannot parse time `{s}`"));
    let v: f64 = num.trim().parse().map_err(|_| bad())?;
    if exp == 0 {
        return Ok(v);
    }
    // scale in decimal so that "100us" is exactly 1e-4
    let (mantissa, e) = match num.trim().split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (num.trim(), 0),
    };
    format!("{mantissa}e{}", e + exp).parse().map_err(|_| bad())
}
