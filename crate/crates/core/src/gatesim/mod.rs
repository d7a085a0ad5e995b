//! Gate-level noisy density-matrix backend.
//!
//! Every gate is applied as a unitary and followed by an idle slot of the
//! gate's duration on every qubit, modelled as amplitude damping then phase
//! flip. Measurement is in the Z basis with independent readout flips.

pub mod noise;

pub use noise::{noise_channel, NoiseSpec, QubitNoise};

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::models::PauliAxis;
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::state::QuantumState;
use crate::trotter::{Circuit, Gate, GateKind};

fn n_qubits_of(dim: usize) -> Result<usize> {
    if dim.is_power_of_two() && dim > 1 {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::InvalidState(format!("dimension {dim} is not a qubit register")))
    }
}

/// `rho -> U rho U†` for the gate's unitary.
pub fn apply_gate(rho: &QuantumState, g: &Gate) -> Result<QuantumState> {
    g.validate()?;
    let m = rho.to_density_matrix();
    let n = n_qubits_of(m.rows())?;
    if let Some(&q) = g.qubits.iter().find(|&&q| q >= n) {
        return Err(Error::InvalidArgument(format!("{g} addresses qubit {q} of {n}")));
    }
    if g.kind == GateKind::Barrier {
        return Ok(QuantumState::density_unchecked(m));
    }
    Ok(QuantumState::density_unchecked(m.conjugate_by(&g.matrix(n)?)))
}

/// Idle decoherence on one qubit for `dt` seconds.
pub fn apply_noise(rho: &QuantumState, qubit: usize, dt: f64, ns: &NoiseSpec) -> Result<QuantumState> {
    let m = rho.to_density_matrix();
    let n = n_qubits_of(m.rows())?;
    if qubit >= n {
        return Err(Error::InvalidArgument(format!("qubit {qubit} of {n}")));
    }
    Ok(QuantumState::density_unchecked(noise_channel(
        &m,
        qubit,
        n,
        dt,
        ns.qubit(qubit)?,
    )?))
}

pub fn run_circuit(c: &Circuit, rho0: &QuantumState, ns: &NoiseSpec) -> Result<QuantumState> {
    c.validate()?;
    ns.validate()?;
    let n = c.n_qubits();
    if rho0.dim() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            actual: rho0.dim(),
        });
    }
    let noise: Vec<QubitNoise> = (0..n).map(|q| ns.qubit(q)).collect::<Result<_>>()?;
    let mut rho = rho0.to_density_matrix();
    for g in c.gates() {
        if g.kind == GateKind::Barrier {
            continue;
        }
        rho = rho.conjugate_by(&g.matrix(n)?);
        let dt = ns.duration_of(g);
        if dt > 0.0 {
            for (q, &qn) in noise.iter().enumerate() {
                rho = noise_channel(&rho, q, n, dt, qn)?;
            }
        }
    }
    Ok(QuantumState::density_unchecked(rho))
}

/// Gates that rotate `axis` onto Z on each qubit, for measuring a
/// non-Z observable with Z-basis counts.
pub fn measurement_basis_gates(axis: PauliAxis, qubits: &[usize]) -> Vec<Gate> {
    qubits
        .iter()
        .filter_map(|&q| match axis {
            PauliAxis::Z => None,
            PauliAxis::X => Some(Gate::h(q)),
            PauliAxis::Y => Some(Gate::rx(q, FRAC_PI_2)),
        })
        .collect()
}

/// Measurement counts keyed by bitstring, qubit 0 leftmost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotResult {
    counts: BTreeMap<String, u64>,
    shots: u64,
}

impl ShotResult {
    pub fn new(counts: BTreeMap<String, u64>) -> Result<Self> {
        let shots: u64 = counts.values().sum();
        if shots == 0 {
            return Err(Error::InvalidArgument("shot result with no shots".into()));
        }
        let width = counts.keys().next().map(|k| k.len()).unwrap_or(0);
        if counts
            .keys()
            .any(|k| k.len() != width || k.chars().any(|ch| ch != '0' && ch != '1'))
        {
            return Err(Error::InvalidArgument("malformed bitstring in counts".into()));
        }
        Ok(Self { counts, shots })
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn frequency(&self, bits: &str) -> f64 {
        self.counts.get(bits).copied().unwrap_or(0) as f64 / self.shots as f64
    }
}

/// Draws `shots` bitstrings from the Z-basis populations of `rho`, then
/// flips each bit independently with the readout error probability.
pub fn sample(rho: &QuantumState, shots: u64, ns: &NoiseSpec, seed: u64) -> Result<ShotResult> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    ns.validate()?;
    let n = n_qubits_of(rho.dim())?;
    let pops: Vec<f64> = rho.populations().into_iter().map(|p| p.max(0.0)).collect();
    let dist = WeightedIndex::new(&pops).map_err(|e| Error::InvalidState(format!("cannot sample populations: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = ns.readout_flip;
    let mut hist = vec![0u64; 1 << n];
    for _ in 0..shots {
        let mut idx = dist.sample(&mut rng);
        if f > 0.0 {
            for q in 0..n {
                if rng.gen_bool(f) {
                    idx ^= 1 << (n - 1 - q);
                }
            }
        }
        hist[idx] += 1;
    }
    let counts = hist
        .into_iter()
        .enumerate()
        .filter(|&(_, k)| k > 0)
        .map(|(i, k)| (format!("{i:0n$b}"), k))
        .collect();
    ShotResult::new(counts)
}

/// `constant + sum_k c_k prod_{q in S_k} Z_q`, an observable diagonal in
/// the computational basis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZObservable {
    pub constant: f64,
    pub terms: Vec<(f64, Vec<usize>)>,
}

impl ZObservable {
    /// `(Z_0 + ... + Z_{n-1}) / 2`, the total spin along the measured axis.
    pub fn total_spin(n_qubits: usize) -> Self {
        Self {
            constant: 0.0,
            terms: (0..n_qubits).map(|q| (0.5, vec![q])).collect(),
        }
    }

    fn eval(&self, bits: &[u8], flip: f64) -> f64 {
        let mut v = self.constant;
        for (coef, qs) in &self.terms {
            let parity = qs.iter().fold(1.0, |acc, &q| if bits[q] == 1 { -acc } else { acc });
            v += coef * parity / (1.0 - 2.0 * flip).powi(qs.len() as i32);
        }
        v
    }

    /// Exact value on a density matrix.
    pub fn expectation(&self, rho: &QuantumState) -> Result<f64> {
        let n = n_qubits_of(rho.dim())?;
        let pops = rho.populations();
        Ok(pops
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let bits: Vec<u8> = (0..n).map(|q| ((i >> (n - 1 - q)) & 1) as u8).collect();
                p * self.eval(&bits, 0.0)
            })
            .sum())
    }

    /// Dense diagonal matrix of the observable.
    pub fn to_matrix(&self, n_qubits: usize) -> ComplexMatrix {
        let d: Vec<f64> = (0..1usize << n_qubits)
            .map(|i| {
                let bits: Vec<u8> = (0..n_qubits).map(|q| ((i >> (n_qubits - 1 - q)) & 1) as u8).collect();
                self.eval(&bits, 0.0)
            })
            .collect();
        ComplexMatrix::from_real_diag(&d)
    }
}

/// Sample mean and standard error of the observable over the shots.
pub fn estimate_observable(sr: &ShotResult, obs: &ZObservable) -> Result<(f64, f64)> {
    estimate_with_flip(sr, obs, 0.0)
}

/// Like [`estimate_observable`], with each Z-string divided by its readout
/// attenuation `(1 - 2 f)^weight`. For independent symmetric flips with
/// probability `f` this removes the readout bias.
pub fn estimate_observable_mitigated(sr: &ShotResult, obs: &ZObservable, flip: f64) -> Result<(f64, f64)> {
    if !(0.0..0.5).contains(&flip) {
        return Err(Error::InvalidArgument(format!("readout flip {flip} outside [0, 0.5)")));
    }
    estimate_with_flip(sr, obs, flip)
}

fn estimate_with_flip(sr: &ShotResult, obs: &ZObservable, flip: f64) -> Result<(f64, f64)> {
    if sr.shots == 0 || sr.counts.is_empty() {
        return Err(Error::InvalidArgument("empty counts".into()));
    }
    let n = sr.counts.keys().next().unwrap().len();
    if let Some(&q) = obs.terms.iter().flat_map(|(_, qs)| qs).find(|&&q| q >= n) {
        return Err(Error::InvalidArgument(format!("observable uses qubit {q} of {n}")));
    }
    let total = sr.shots as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (bits, &k) in &sr.counts {
        let b: Vec<u8> = bits.bytes().map(|ch| ch - b'0').collect();
        let v = obs.eval(&b, flip);
        sum += v * k as f64;
        sum_sq += v * v * k as f64;
    }
    let mean = sum / total;
    let stderr = if sr.shots > 1 {
        let var = ((sum_sq - total * mean * mean) / (total - 1.0)).max(0.0);
        (var / total).sqrt()
    } else {
        0.0
    };
    Ok((mean, stderr))
}
