//! Per-gate decoherence model and its Kraus channels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::matrix::{c, ComplexMatrix, ZERO};
use crate::trotter::{Gate, GateKind};

/// Relaxation and coherence times of one qubit, in seconds. Infinite values
/// switch the corresponding process off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitNoise {
    pub t1: f64,
    pub t2: f64,
}

impl QubitNoise {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        let q = Self { t1, t2 };
        q.validate()?;
        Ok(q)
    }

    pub fn ideal() -> Self {
        Self {
            t1: f64::INFINITY,
            t2: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t1 > 0.0) || !(self.t2 > 0.0) {
            return Err(Error::Config(format!(
                "T1 and T2 must be positive (T1 = {}, T2 = {})",
                self.t1, self.t2
            )));
        }
        if self.t2 > 2.0 * self.t1 {
            return Err(Error::Config(format!(
                "T2 = {} exceeds 2 T1 = {}",
                self.t2,
                2.0 * self.t1
            )));
        }
        Ok(())
    }

    /// `1/T_phi = 1/T2 - 1/(2 T1)`, clamped at zero against rounding.
    pub fn dephasing_rate(&self) -> f64 {
        (1.0 / self.t2 - 0.5 / self.t1).max(0.0)
    }

    /// `(p_damp, p_flip)` for an interval `dt`.
    pub fn probabilities(&self, dt: f64) -> (f64, f64) {
        let p1 = -(-dt / self.t1).exp_m1();
        let pphi = -0.5 * (-dt * self.dephasing_rate()).exp_m1();
        (p1, pphi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub qubits: Vec<QubitNoise>,
    /// Seconds per gate kind; kinds absent from the map take zero time.
    pub gate_durations: BTreeMap<GateKind, f64>,
    pub readout_flip: f64,
}

pub const DEFAULT_SINGLE_QUBIT_GATE: f64 = 50e-9;
pub const DEFAULT_TWO_QUBIT_GATE: f64 = 300e-9;
pub const DEFAULT_READOUT_FLIP: f64 = 0.03;
pub const DEFAULT_T1: f64 = 50e-6;
pub const DEFAULT_T2: f64 = 40e-6;

impl NoiseSpec {
    /// Defaults representative of a 2018 superconducting cloud processor.
    pub fn ibm_like(n_qubits: usize) -> Self {
        Self::uniform(n_qubits, DEFAULT_T1, DEFAULT_T2, DEFAULT_READOUT_FLIP)
    }

    pub fn uniform(n_qubits: usize, t1: f64, t2: f64, readout_flip: f64) -> Self {
        Self {
            qubits: vec![QubitNoise { t1, t2 }; n_qubits],
            gate_durations: default_durations(),
            readout_flip,
        }
    }

    /// No decoherence and perfect readout; gate durations are kept.
    pub fn noiseless(n_qubits: usize) -> Self {
        Self::uniform(n_qubits, f64::INFINITY, f64::INFINITY, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for q in &self.qubits {
            q.validate()?;
        }
        for (kind, &d) in &self.gate_durations {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::Config(format!("duration of {kind} must be >= 0, got {d}")));
            }
        }
        if !(0.0..0.5).contains(&self.readout_flip) {
            return Err(Error::Config(format!(
                "readout flip probability {} outside [0, 0.5)",
                self.readout_flip
            )));
        }
        Ok(())
    }

    pub fn qubit(&self, q: usize) -> Result<QubitNoise> {
        self.qubits.get(q).copied().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "noise spec covers {} qubits, asked for qubit {q}",
                self.qubits.len()
            ))
        })
    }

    /// The gate's own duration if set, else the spec's value for its kind.
    pub fn duration_of(&self, gate: &Gate) -> f64 {
        if gate.kind == GateKind::Barrier {
            return 0.0;
        }
        gate.duration
            .unwrap_or_else(|| self.gate_durations.get(&gate.kind).copied().unwrap_or(0.0))
    }
}

pub fn default_durations() -> BTreeMap<GateKind, f64> {
    use GateKind::*;
    let mut m = BTreeMap::new();
    for k in [Rx, Ry, Rz, H, X] {
        m.insert(k, DEFAULT_SINGLE_QUBIT_GATE);
    }
    for k in [Cnot, Xy, Sqiswap] {
        m.insert(k, DEFAULT_TWO_QUBIT_GATE);
    }
    m.insert(Barrier, 0.0);
    m
}

type Kraus2 = [[num_complex::Complex64; 2]; 2];

/// `rho -> sum_k K_k rho K_k†` with each `K_k` acting on `qubit`.
pub(crate) fn apply_single_qubit_kraus(
    rho: &ComplexMatrix,
    qubit: usize,
    n_qubits: usize,
    kraus: &[Kraus2],
) -> ComplexMatrix {
    let dim = rho.rows();
    let shift = n_qubits - 1 - qubit;
    let mask = 1usize << shift;
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut tmp = ComplexMatrix::zeros(dim, dim);
    for k in kraus {
        // tmp = K rho
        for r in 0..dim {
            let br = (r >> shift) & 1;
            let r0 = r & !mask;
            let r1 = r | mask;
            for col in 0..dim {
                tmp[(r, col)] = k[br][0] * rho[(r0, col)] + k[br][1] * rho[(r1, col)];
            }
        }
        // out += tmp K†
        for r in 0..dim {
            for col in 0..dim {
                let bc = (col >> shift) & 1;
                let c0 = col & !mask;
                let c1 = col | mask;
                out[(r, col)] += tmp[(r, c0)] * k[bc][0].conj() + tmp[(r, c1)] * k[bc][1].conj();
            }
        }
    }
    out
}

/// Amplitude damping followed by phase flip on one qubit for an interval
/// `dt`.
pub fn noise_channel(
    rho: &ComplexMatrix,
    qubit: usize,
    n_qubits: usize,
    dt: f64,
    noise: QubitNoise,
) -> Result<ComplexMatrix> {
    if !(dt >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative idle interval {dt}")));
    }
    let (p1, pphi) = noise.probabilities(dt);
    let mut out = rho.clone();
    if p1 > 0.0 {
        let damp: [Kraus2; 2] = [
            [[c(1.0, 0.0), ZERO], [ZERO, c((1.0 - p1).sqrt(), 0.0)]],
            [[ZERO, c(p1.sqrt(), 0.0)], [ZERO, ZERO]],
        ];
        out = apply_single_qubit_kraus(&out, qubit, n_qubits, &damp);
    }
    if pphi > 0.0 {
        let a = (1.0 - pphi).sqrt();
        let b = pphi.sqrt();
        let flip: [Kraus2; 2] = [
            [[c(a, 0.0), ZERO], [ZERO, c(a, 0.0)]],
            [[c(b, 0.0), ZERO], [ZERO, c(-b, 0.0)]],
        ];
        out = apply_single_qubit_kraus(&out, qubit, n_qubits, &flip);
    }
    Ok(out)
}
