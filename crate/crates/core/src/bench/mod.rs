//! Experiment runner: time series of a total-spin observable under a
//! Trotterized model, on one of three backends, with sweeps over the step
//! count or a coherence time.
//!
//! Grid points and sweep values run in parallel; results come back in grid
//! order, and all file output happens afterwards from the caller.

pub mod config;
pub mod qasm;
pub mod series;

pub use config::{parse_seconds, Backend, ExperimentConfig, GateNoiseConfig, Overrides, TimeGrid};
pub use qasm::{export_qasm, parse_qasm, relower_to_cnot_set, to_qasm};
pub use series::{
    diagnostics_path, write_csv, write_csv_to, write_diagnostics, write_diagnostics_to, SeriesMeta, SeriesPoint,
    TimeSeries, CSV_HEADER,
};

use rayon::prelude::*;

use crate::devsim::device::LEAKAGE_WARN;
use crate::devsim::Device;
use crate::error::{Error, Result};
use crate::gatesim::{
    estimate_observable_mitigated, measurement_basis_gates, run_circuit, sample, NoiseSpec, ZObservable,
};
use crate::models::exact_evolve;
use crate::qcore::state::{fidelity, QuantumState};
use crate::trotter::{circuit_unitary, trotterize, Circuit, NativeSet, TrotterPlan};

/// Trotter circuit for dimensionless time `t`, followed by the rotation of
/// the measured axis onto Z.
pub fn experiment_circuit(cfg: &ExperimentConfig, t: f64, set: NativeSet) -> Result<Circuit> {
    let plan = TrotterPlan::new(cfg.model.hamiltonian(), physical_time(cfg, t), cfg.steps)?;
    let mut c = trotterize(&plan, set)?;
    c.extend(measurement_basis_gates(cfg.model.observable_axis(), &[0, 1]))?;
    Ok(c)
}

/// Model time for a grid value in units of the model's time-scale coupling.
pub fn physical_time(cfg: &ExperimentConfig, t: f64) -> f64 {
    t / cfg.model.time_scale().abs()
}

/// Seed of the sampler at grid index `k`.
fn point_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64)
}

/// Exact expectation, or a sampled estimate and its standard error.
fn measure(rho: &QuantumState, shots: u64, readout: &NoiseSpec, seed: u64) -> Result<(f64, Option<f64>)> {
    let obs = ZObservable::total_spin(2);
    if shots == 0 {
        return Ok((obs.expectation(rho)?, None));
    }
    let counts = sample(rho, shots, readout, seed)?;
    let (mean, se) = estimate_observable_mitigated(&counts, &obs, readout.readout_flip)?;
    Ok((mean, Some(se)))
}

fn exact_point(cfg: &ExperimentConfig, psi0: &QuantumState, t: f64, k: usize) -> Result<SeriesPoint> {
    let psi = exact_evolve(&cfg.model.hamiltonian(), psi0, physical_time(cfg, t))?;
    let rotate = Circuit::from_gates(
        2,
        NativeSet::CnotSet,
        measurement_basis_gates(cfg.model.observable_axis(), &[0, 1]),
    )?;
    let psi = psi.evolve(&circuit_unitary(&rotate)?)?;
    let (value, stderr) = measure(&psi, cfg.shots, &NoiseSpec::noiseless(2), point_seed(cfg.seed, k))?;
    Ok(SeriesPoint {
        t,
        value,
        stderr,
        fidelity: None,
        leakage: None,
    })
}

fn gate_point(cfg: &ExperimentConfig, psi0: &QuantumState, t: f64, k: usize) -> Result<SeriesPoint> {
    let c = experiment_circuit(cfg, t, NativeSet::CnotSet)?;
    let ns = cfg.gate.to_noise_spec(2);
    let rho = run_circuit(&c, psi0, &ns)?;
    let ideal = psi0.evolve(&circuit_unitary(&c)?)?;
    let (value, stderr) = measure(&rho, cfg.shots, &ns, point_seed(cfg.seed, k))?;
    Ok(SeriesPoint {
        t,
        value,
        stderr,
        fidelity: Some(fidelity(&rho, &ideal)?),
        leakage: None,
    })
}

fn device_point(cfg: &ExperimentConfig, dev: &Device, psi0: &QuantumState, t: f64, k: usize) -> Result<SeriesPoint> {
    let c = experiment_circuit(cfg, t, NativeSet::SqiswapSet)?;
    let run = dev.run(&c, psi0)?;
    if run.leakage > LEAKAGE_WARN {
        return Err(Error::Leakage {
            leakage: run.leakage,
            limit: LEAKAGE_WARN,
        });
    }
    let ideal = psi0.evolve(&circuit_unitary(&c)?)?;
    let (value, stderr) = measure(&run.state, cfg.shots, &NoiseSpec::noiseless(2), point_seed(cfg.seed, k))?;
    Ok(SeriesPoint {
        t,
        value,
        stderr,
        fidelity: Some(fidelity(&run.state, &ideal)?),
        leakage: Some(run.leakage),
    })
}

pub fn series_meta(cfg: &ExperimentConfig) -> SeriesMeta {
    SeriesMeta {
        backend: cfg.backend,
        model: cfg.model.name().to_string(),
        steps: cfg.steps,
        t2: cfg.t2_label(),
        shots: cfg.shots,
        seed: cfg.seed,
    }
}

/// Runs every grid point of `cfg` from the initial state.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<TimeSeries> {
    cfg.validate()?;
    let psi0 = cfg.initial_state()?;
    let times = cfg.grid.times();
    let device = match cfg.backend {
        Backend::Device => Some(Device::new(cfg.device.clone())?),
        _ => None,
    };
    log::info!(
        "{} on {} backend: n = {}, {} points",
        cfg.model.name(),
        cfg.backend,
        cfg.steps,
        times.len()
    );
    let points = times
        .par_iter()
        .enumerate()
        .map(|(k, &t)| match cfg.backend {
            Backend::Exact => exact_point(cfg, &psi0, t, k),
            Backend::Gate => gate_point(cfg, &psi0, t, k),
            Backend::Device => device_point(cfg, device.as_ref().expect("device backend"), &psi0, t, k),
        })
        .collect::<Result<Vec<_>>>()?;
    let series = TimeSeries {
        meta: series_meta(cfg),
        points,
    };
    series.validate()?;
    Ok(series)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    Steps(Vec<usize>),
    /// Coherence time of the active backend, see
    /// [`ExperimentConfig::set_t2`].
    T2(Vec<f64>),
}

impl SweepAxis {
    pub fn len(&self) -> usize {
        match self {
            SweepAxis::Steps(v) => v.len(),
            SweepAxis::T2(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The base config with the axis value at index `k` applied.
    pub fn config_at(&self, base: &ExperimentConfig, k: usize) -> Result<ExperimentConfig> {
        let mut cfg = base.clone();
        match self {
            SweepAxis::Steps(v) => cfg.steps = v[k],
            SweepAxis::T2(v) => cfg.set_t2(v[k])?,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One series per axis value, in axis order.
pub fn sweep(base: &ExperimentConfig, axis: &SweepAxis) -> Result<Vec<TimeSeries>> {
    if axis.is_empty() {
        return Err(Error::Config("sweep axis is empty".into()));
    }
    let cfgs = (0..axis.len())
        .map(|k| axis.config_at(base, k))
        .collect::<Result<Vec<_>>>()?;
    cfgs.par_iter().map(run_experiment).collect()
}

/// Default resonator `T2` values of the coherence sweep.
pub const DEFAULT_T2_SWEEP: [f64; 4] = [100e-6, 1e-3, 10e-3, f64::INFINITY];
