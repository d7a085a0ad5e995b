//! Physical parameters of the two-resonator, one-transmon unit.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `g / |Omega - omega_i|` accepted without a warning.
pub const DISPERSIVE_RATIO_LIMIT: f64 = 0.05;

/// Device parameters. Frequencies are angular (rad/s), times in seconds.
/// Infinite times switch the corresponding decoherence channel off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceSpec {
    /// Bare resonator frequencies.
    pub omega: [f64; 2],
    /// Transmon splitting.
    #[serde(rename = "Omega")]
    pub big_omega: f64,
    pub g: f64,
    /// Duffing shift `delta` in `(delta/2) n (n - 1)`; negative.
    pub anharm: f64,
    pub n_fock: usize,
    pub t1_nr: f64,
    pub t2_nr: f64,
    pub t1_tr: f64,
    pub t2_tr: f64,
}

impl Default for DeviceSpec {
    fn default() -> Self {
        Self {
            omega: [TAU * 75e6, TAU * 85e6],
            big_omega: TAU * 2.5e9,
            g: TAU * 6e6,
            anharm: -TAU * 5e6,
            n_fock: 3,
            t1_nr: 10e-3,
            t2_nr: 1e-3,
            t1_tr: 50e-6,
            t2_tr: 40e-6,
        }
    }
}

fn check_times(what: &str, t1: f64, t2: f64) -> Result<()> {
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(Error::Config(format!(
            "{what}: T1 and T2 must be positive (T1 = {t1}, T2 = {t2})"
        )));
    }
    if t2 > 2.0 * t1 {
        return Err(Error::Config(format!("{what}: T2 = {t2} exceeds 2 T1 = {}", 2.0 * t1)));
    }
    Ok(())
}

/// `1/T_phi = 1/T2 - 1/(2 T1)`, zero when either time is infinite and the
/// other makes the difference vanish.
pub fn pure_dephasing_rate(t1: f64, t2: f64) -> f64 {
    (1.0 / t2 - 0.5 / t1).max(0.0)
}

impl DeviceSpec {
    /// The default device with every decoherence channel switched off.
    pub fn noiseless() -> Self {
        Self::default().without_noise()
    }

    pub fn without_noise(mut self) -> Self {
        self.t1_nr = f64::INFINITY;
        self.t2_nr = f64::INFINITY;
        self.t1_tr = f64::INFINITY;
        self.t2_tr = f64::INFINITY;
        self
    }

    pub fn is_noiseless(&self) -> bool {
        [self.t1_nr, self.t2_nr, self.t1_tr, self.t2_tr]
            .iter()
            .all(|t| t.is_infinite())
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.omega.iter().chain([&self.big_omega, &self.g, &self.anharm]);
        if finite.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("device frequencies must be finite".into()));
        }
        if self.omega.iter().any(|&w| w <= 0.0) || self.big_omega <= 0.0 {
            return Err(Error::Config("device frequencies must be positive".into()));
        }
        if self.g < 0.0 {
            return Err(Error::Config(format!("coupling g = {} must be >= 0", self.g)));
        }
        if self.anharm >= 0.0 {
            return Err(Error::Config(format!(
                "resonator anharmonicity must be negative, got {}",
                self.anharm
            )));
        }
        if self.n_fock < 3 {
            return Err(Error::Config(format!("n_fock = {} must be at least 3", self.n_fock)));
        }
        check_times("resonator", self.t1_nr, self.t2_nr)?;
        check_times("transmon", self.t1_tr, self.t2_tr)?;
        let ratio = self.dispersive_ratio();
        if ratio >= DISPERSIVE_RATIO_LIMIT {
            log::warn!("g/|Omega - omega| = {ratio:.3} is outside the dispersive regime");
        }
        Ok(())
    }

    /// `max_i g / |Omega - omega_i|`.
    pub fn dispersive_ratio(&self) -> f64 {
        self.omega
            .iter()
            .map(|&w| self.g / (self.big_omega - w).abs())
            .fold(0.0, f64::max)
    }

    pub fn dim(&self) -> usize {
        self.n_fock * 2 * self.n_fock
    }

    pub fn nr_dephasing_rate(&self) -> f64 {
        pure_dephasing_rate(self.t1_nr, self.t2_nr)
    }

    pub fn transmon_dephasing_rate(&self) -> f64 {
        pure_dephasing_rate(self.t1_tr, self.t2_tr)
    }

    /// Resonator `T2` set to `t2`; an infinite value also removes
    /// resonator energy relaxation.
    pub fn with_nr_t2(mut self, t2: f64) -> Self {
        self.t2_nr = t2;
        if t2.is_infinite() {
            self.t1_nr = f64::INFINITY;
        }
        self
    }
}
