//! Pulse-level simulator of two nanomechanical resonators coupled through a
//! transmon.
//!
//! Each resonator's two lowest levels form a qubit, isolated from the rest
//! of its ladder by a Duffing anharmonicity. Single-qubit rotations are
//! resonant drives, `RZ` is a frame update, and two-qubit `XY` gates come
//! from tuning both resonators into resonance so that the far-detuned
//! transmon mediates an exchange coupling.

pub mod calibrate;
pub mod device;
pub mod hamiltonian;
pub mod lindblad;
pub mod noise;
pub mod schedule;
pub mod spec;

pub use calibrate::{calibrate_exchange, exchange_populations, ExchangeCalibration};
pub use device::{subspace_distance, Device, DeviceRun, DrivePulse, ExchangePulse};
pub use hamiltonian::{build_device_hamiltonian, device_hamiltonian_at, DeviceSpace, DressedBasis};
pub use lindblad::{device_collapse_operators, lindblad_evolve, CollapseOperator, HamiltonianPiece, LindbladProblem};
pub use schedule::{Envelope, PulseSchedule, Segment};
pub use spec::DeviceSpec;

use crate::error::Result;
use crate::qcore::state::QuantumState;
use crate::trotter::Circuit;

/// Schedule for an exchange-set circuit on a freshly calibrated device.
pub fn compile_to_pulses(c: &Circuit, spec: &DeviceSpec) -> Result<PulseSchedule> {
    Device::new(spec.clone())?.compile(c)
}

/// Runs a two-qubit circuit on the device and returns the reduced state.
pub fn run_digital_on_device(c: &Circuit, spec: &DeviceSpec, rho0: &QuantumState) -> Result<DeviceRun> {
    Device::new(spec.clone())?.run(c, rho0)
}
