//! The calibrated device: compiles circuits to pulses and integrates them.
//!
//! States are carried in the logical frame `rho_I = exp(iEt) rho exp(-iEt)`,
//! written in the idle dressed basis, where `E` are the idle dressed
//! energies. An undriven, untuned device leaves `rho_I` unchanged up to
//! decoherence and the residual dispersive ZZ shift. Every segment is
//! integrated in its own frame `F`, with offsets `o = E - F`:
//!
//! | segment | frame | generator |
//! |---|---|---|
//! | exchange | lab | tuned device Hamiltonian |
//! | drive | resonator `q` rotating at the carrier | RWA drive |
//! | idle | logical | none |
//!
//! With noise, each segment is split into sub-steps; each sub-step applies
//! the exact unitary and then the dissipator over the same interval.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::linalg::HermitianEigen;
use crate::qcore::matrix::{c, ComplexMatrix};
use crate::qcore::state::QuantumState;
use crate::trotter::{Circuit, GateKind, NativeSet};

use super::calibrate::{calibrate_exchange_at, exchange_eigen, ExchangeCalibration};
use super::hamiltonian::{build_device_hamiltonian, DeviceSpace, DressedBasis};
use super::lindblad::{device_collapse_operators, TRACE_DRIFT_LIMIT};
use super::noise::FrameNoise;
use super::schedule::{Envelope, PulseSchedule, Segment};
use super::spec::DeviceSpec;

/// Drive peak amplitude as a fraction of `|delta|`.
pub const DRIVE_PEAK_FRACTION: f64 = 0.1;
/// Shortest drive, in periods of the anharmonic shift `2 pi / |delta|`.
pub const MIN_DRIVE_PERIODS: f64 = 4.0;
/// Longest sub-step between dissipator applications.
pub const DEFAULT_MAX_SUBSTEP: f64 = 50e-9;
pub const LEAKAGE_WARN: f64 = 0.05;
const DRIVE_CALIBRATION_ROUNDS: usize = 3;

/// A calibrated rotation `RX(theta)`: the drive and the frame updates that
/// remove its residual phase errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivePulse {
    pub amplitude: f64,
    pub duration: f64,
    pub pre_z: f64,
    pub post_z: f64,
    /// Frame update on the undriven qubit.
    pub other_z: f64,
}

/// A calibrated exchange pulse and its frame updates (before and after, per
/// qubit), valid for a segment starting at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangePulse {
    pub duration: f64,
    pub pre: [f64; 2],
    pub post: [f64; 2],
}

type SliceKey = (usize, u64, u64, u64, Envelope);

#[derive(Debug)]
pub struct Device {
    spec: DeviceSpec,
    space: DeviceSpace,
    idle: DressedBasis,
    exchange: ExchangeCalibration,
    exchange_eig: HermitianEigen,
    /// Dressed RWA raising operator of each resonator.
    raising: [ComplexMatrix; 2],
    noise: FrameNoise,
    max_substep: f64,
    pulses: Mutex<HashMap<(usize, u64), DrivePulse>>,
    exchanges: Mutex<HashMap<u64, ExchangePulse>>,
    slices: Mutex<HashMap<SliceKey, Arc<Vec<ComplexMatrix>>>>,
}

/// Output of a device run.
#[derive(Debug, Clone)]
pub struct DeviceRun {
    /// Two-qubit state after projection onto the lowest two levels of each
    /// resonator and renormalization.
    pub state: QuantumState,
    /// `1 - Tr` of the projected state before renormalization.
    pub leakage: f64,
    pub duration: f64,
}

/// `U_I = diag(e^{i o t1}) U_S diag(e^{-i o t0})`.
fn frame_step(o: &[f64], us: &ComplexMatrix, t0: f64, t1: f64) -> ComplexMatrix {
    let n = o.len();
    let left: Vec<Complex64> = o.iter().map(|&x| Complex64::from_polar(1.0, x * t1)).collect();
    let right: Vec<Complex64> = o.iter().map(|&x| Complex64::from_polar(1.0, -x * t0)).collect();
    ComplexMatrix::from_fn(n, n, |r, k| left[r] * us[(r, k)] * right[k])
}

fn propagator_of(eig: &HermitianEigen, h: f64) -> ComplexMatrix {
    eig.map_spectrum(|e| Complex64::from_polar(1.0, -e * h))
}

/// Angle wrapped into `(-pi, pi]`.
fn wrap(a: f64) -> f64 {
    reduce_angle(a).0
}

/// Angle reduced into `(-pi, pi]` and the number of whole turns removed.
fn reduce_angle(theta: f64) -> (f64, i64) {
    let k = (theta / TAU).round();
    let mut r = theta - k * TAU;
    let mut k = k as i64;
    if r <= -PI {
        r += TAU;
        k -= 1;
    }
    (r, k)
}

/// `(a, theta, b)` with `u ~ RZ(a) RX(theta) RZ(b)` up to global phase, for
/// a 2x2 block close to such a product.
fn zxz_angles(u: [[Complex64; 2]; 2]) -> (f64, f64, f64) {
    let sum = (u[1][1] / u[0][0]).arg();
    let diff = (u[1][0] / u[0][1]).arg();
    let theta = 2.0 * (u[0][1].norm() + u[1][0].norm()).atan2(u[0][0].norm() + u[1][1].norm());
    (0.5 * (sum + diff), theta, 0.5 * (sum - diff))
}

enum Evolving<'a> {
    Unitary(&'a mut ComplexMatrix),
    Density(&'a mut ComplexMatrix),
}

impl Device {
    pub fn new(spec: DeviceSpec) -> Result<Self> {
        spec.validate()?;
        let space = DeviceSpace::new(spec.n_fock);
        let idle = DressedBasis::new(&build_device_hamiltonian(&spec))?;
        let frequency = 0.5 * (spec.omega[0] + spec.omega[1]);
        let exchange = calibrate_exchange_at(&spec, &idle, frequency)?;
        let exchange_eig = exchange_eigen(&spec, &idle, frequency)?;
        let raising = [0, 1].map(|i| {
            let b = space.b(i);
            let x = idle.to_dressed(&(&b + &b.adjoint()));
            ComplexMatrix::from_fn(space.dim(), space.dim(), |r, k| {
                let (lr, lk) = (space.label(r), space.label(k));
                let others_equal = lr.1 == lk.1 && if i == 0 { lr.2 == lk.2 } else { lr.0 == lk.0 };
                if others_equal && space.level(r, i) == space.level(k, i) + 1 {
                    x[(r, k)]
                } else {
                    c(0.0, 0.0)
                }
            })
        });
        let noise = FrameNoise::new(&device_collapse_operators(&spec), &idle);
        Ok(Self {
            spec,
            space,
            idle,
            exchange,
            exchange_eig,
            raising,
            noise,
            max_substep: DEFAULT_MAX_SUBSTEP,
            pulses: Mutex::new(HashMap::new()),
            exchanges: Mutex::new(HashMap::new()),
            slices: Mutex::new(HashMap::new()),
        })
    }

    /// Same device with a different longest sub-step for noisy runs.
    pub fn with_max_substep(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(format!("sub-step {h} must be positive")));
        }
        self.max_substep = h;
        Ok(self)
    }

    pub fn spec(&self) -> &DeviceSpec {
        &self.spec
    }

    pub fn space(&self) -> DeviceSpace {
        self.space
    }

    pub fn exchange(&self) -> &ExchangeCalibration {
        &self.exchange
    }

    pub fn idle_energies(&self) -> &[f64] {
        &self.idle.energies
    }

    /// Dressed `|0> -> |1>` frequency of resonator `q` with the other in
    /// its ground state.
    pub fn dressed_frequency(&self, q: usize) -> f64 {
        let e = &self.idle.energies;
        let one = if q == 0 {
            self.space.computational(1, 0)
        } else {
            self.space.computational(0, 1)
        };
        e[one] - e[self.space.computational(0, 0)]
    }

    /// Conditional phase rate `E_11 - E_10 - E_01 + E_00` of the idle device.
    pub fn idle_zz(&self) -> f64 {
        let e = &self.idle.energies;
        let s = self.space;
        e[s.computational(1, 1)] - e[s.computational(1, 0)] - e[s.computational(0, 1)] + e[s.computational(0, 0)]
    }

    /// Frame offsets `E - F` of a drive on resonator `q` at `carrier`.
    fn drive_offsets(&self, q: usize, carrier: f64) -> Vec<f64> {
        let s = self.space;
        let e = &self.idle.energies;
        (0..s.dim())
            .map(|k| e[k] - e[s.with_level(k, q, 0)] - carrier * s.level(k, q) as f64)
            .collect()
    }

    /// Phase-zero slice propagators of a drive, in the carrier frame.
    fn drive_slices(
        &self,
        q: usize,
        amplitude: f64,
        carrier: f64,
        duration: f64,
        envelope: Envelope,
    ) -> Result<Arc<Vec<ComplexMatrix>>> {
        let key = (q, amplitude.to_bits(), carrier.to_bits(), duration.to_bits(), envelope);
        if let Some(v) = self.slices.lock().expect("slice cache").get(&key) {
            return Ok(v.clone());
        }
        let eps = self.drive_offsets(q, carrier);
        let m = envelope.slices();
        let h = duration / m as f64;
        let x = &self.raising[q];
        let coupling = x + &x.adjoint();
        let mut out = Vec::with_capacity(m);
        for slice in 0..m {
            let a = amplitude * envelope.sample(slice);
            let stark = -a * a / (2.0 * self.spec.anharm);
            let mut hs = coupling.scale_real(0.5 * a);
            for (k, &ek) in eps.iter().enumerate() {
                hs[(k, k)] += c(ek - stark * self.space.level(k, q) as f64, 0.0);
            }
            let eig = crate::qcore::linalg::eigh(&hs)?;
            out.push(propagator_of(&eig, h));
        }
        let v = Arc::new(out);
        self.slices.lock().expect("slice cache").insert(key, v.clone());
        Ok(v)
    }

    /// `P U P†` with `P = diag(exp(i phase n_q))`.
    fn with_drive_phase(&self, u: &ComplexMatrix, q: usize, phase: f64) -> ComplexMatrix {
        let s = self.space;
        ComplexMatrix::from_fn(u.rows(), u.cols(), |r, k| {
            let dn = s.level(r, q) as f64 - s.level(k, q) as f64;
            u[(r, k)] * Complex64::from_polar(1.0, phase * dn)
        })
    }

    fn virtual_z(&self, q: usize, angle: f64) -> Vec<Complex64> {
        (0..self.space.dim())
            .map(|k| Complex64::from_polar(1.0, angle * self.space.level(k, q) as f64))
            .collect()
    }

    fn check_trace(rho: &ComplexMatrix, t: f64) -> Result<()> {
        let drift = (rho.trace().re - 1.0).abs();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::TraceDrift {
                drift,
                time: t,
                limit: TRACE_DRIFT_LIMIT,
            });
        }
        Ok(())
    }

    /// Applies one logical-frame step and, for densities, the dissipator
    /// over `[t0, t1]`.
    fn step(&self, state: &mut Evolving<'_>, u: &ComplexMatrix, t0: f64, t1: f64) {
        match state {
            Evolving::Unitary(acc) => **acc = u.matmul(acc),
            Evolving::Density(rho) => {
                let r = rho.conjugate_by(u);
                **rho = self.noise.apply(&r, t0, t1 - t0);
            }
        }
    }

    fn evolve_segment(&self, seg: &Segment, t0: f64, state: &mut Evolving<'_>) -> Result<()> {
        let noisy = matches!(state, Evolving::Density(_)) && !self.noise.is_empty();
        match *seg {
            Segment::VirtualZ { qubit, angle } => {
                let p = self.virtual_z(qubit, angle);
                match state {
                    Evolving::Unitary(u) => {
                        **u = ComplexMatrix::from_fn(u.rows(), u.cols(), |r, k| p[r] * u[(r, k)]);
                    }
                    Evolving::Density(rho) => {
                        **rho = ComplexMatrix::from_fn(rho.rows(), rho.cols(), |r, k| p[r] * rho[(r, k)] * p[k].conj());
                    }
                }
            }
            Segment::Idle { duration } => {
                if let Evolving::Density(rho) = state {
                    **rho = self.noise.apply(rho, t0, duration);
                }
            }
            Segment::Exchange { duration, frequency } => {
                let fresh;
                let eig = if frequency == self.exchange.frequency {
                    &self.exchange_eig
                } else {
                    fresh = exchange_eigen(&self.spec, &self.idle, frequency)?;
                    &fresh
                };
                let o = &self.idle.energies;
                let n = if noisy {
                    (duration / self.max_substep).ceil().max(1.0) as usize
                } else {
                    1
                };
                let h = duration / n as f64;
                let us = propagator_of(eig, h);
                for s in 0..n {
                    let (a, b) = (t0 + s as f64 * h, t0 + (s + 1) as f64 * h);
                    self.step(state, &frame_step(o, &us, a, b), a, b);
                }
            }
            Segment::Drive {
                qubit,
                amplitude,
                carrier,
                phase,
                duration,
                envelope,
            } => {
                let o = self.drive_offsets(qubit, carrier);
                let slices = self.drive_slices(qubit, amplitude, carrier, duration, envelope)?;
                if noisy {
                    let h = duration / slices.len() as f64;
                    for (s, u0) in slices.iter().enumerate() {
                        let (a, b) = (t0 + s as f64 * h, t0 + (s + 1) as f64 * h);
                        let us = self.with_drive_phase(u0, qubit, phase);
                        self.step(state, &frame_step(&o, &us, a, b), a, b);
                    }
                } else {
                    let mut total = ComplexMatrix::identity(self.space.dim());
                    for u0 in slices.iter() {
                        total = u0.matmul(&total);
                    }
                    let us = self.with_drive_phase(&total, qubit, phase);
                    self.step(state, &frame_step(&o, &us, t0, t0 + duration), t0, t0 + duration);
                }
            }
        }
        Ok(())
    }

    /// Noiseless logical-frame propagator of a schedule on the full space.
    pub fn schedule_unitary(&self, sched: &PulseSchedule) -> Result<ComplexMatrix> {
        sched.validate(self.spec.anharm)?;
        let mut u = ComplexMatrix::identity(self.space.dim());
        let mut t = 0.0;
        for seg in &sched.segments {
            self.evolve_segment(seg, t, &mut Evolving::Unitary(&mut u))?;
            t += seg.duration();
        }
        Ok(u)
    }

    /// Evolves a logical-frame density matrix on the full space through a
    /// schedule, with the device's decoherence.
    pub fn execute(&self, sched: &PulseSchedule, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        sched.validate(self.spec.anharm)?;
        let mut rho = rho.clone();
        let mut t = 0.0;
        for seg in &sched.segments {
            self.evolve_segment(seg, t, &mut Evolving::Density(&mut rho))?;
            t += seg.duration();
            Self::check_trace(&rho, t)?;
        }
        Ok(rho)
    }

    /// `4 x 4` block of a full-space operator on the computational states.
    pub fn computational_block(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let idx = self.space.computational_indices();
        m.select(&idx, &idx)
    }

    /// A two-qubit density matrix placed on the computational states with
    /// the transmon in its ground state.
    pub fn embed(&self, rho: &QuantumState) -> Result<ComplexMatrix> {
        if rho.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                actual: rho.dim(),
            });
        }
        let r = rho.to_density_matrix();
        let idx = self.space.computational_indices();
        let n = self.space.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                out[(ia, ib)] = r[(a, b)];
            }
        }
        Ok(out)
    }

    /// Traces out the transmon, keeps the lowest two levels of each
    /// resonator and renormalizes. Returns the state and the lost weight.
    pub fn reduce(&self, rho: &ComplexMatrix) -> Result<(QuantumState, f64)> {
        let s = self.space;
        let mut out = ComplexMatrix::zeros(4, 4);
        for a in 0..4 {
            for b in 0..4 {
                let mut acc = c(0.0, 0.0);
                for t in 0..2 {
                    acc += rho[(s.index((a >> 1, t, a & 1)), s.index((b >> 1, t, b & 1)))];
                }
                out[(a, b)] = acc;
            }
        }
        let tr = out.trace().re;
        if !(tr > 0.0) {
            return Err(Error::Leakage {
                leakage: 1.0,
                limit: LEAKAGE_WARN,
            });
        }
        Ok((
            QuantumState::density_unchecked(out.scale_real(1.0 / tr).hermitian_part()),
            1.0 - tr,
        ))
    }

    /// The two computational indices of resonator `q` with the other
    /// resonator at `other`.
    fn qubit_pair(&self, q: usize, other: usize) -> (usize, usize) {
        let s = self.space;
        if q == 0 {
            (s.computational(0, other), s.computational(1, other))
        } else {
            (s.computational(other, 0), s.computational(other, 1))
        }
    }

    /// Calibrated `RX(theta)` for `0 < theta <= pi` on resonator `q`.
    ///
    /// The drive is simulated with the other resonator in `|0>` and in
    /// `|1>`; each branch is written as `e^{i g} RZ(a) RX(theta') RZ(b)`.
    /// The amplitude is rescaled until the mean `theta'` hits the target,
    /// the mean `a` and `b` are undone by frame updates on `q`, and the
    /// phase between the branches by a frame update on the other qubit.
    pub fn drive_pulse(&self, q: usize, theta: f64) -> Result<DrivePulse> {
        let key = (q, theta.to_bits());
        if let Some(p) = self.pulses.lock().expect("pulse cache").get(&key) {
            return Ok(*p);
        }
        let peak = DRIVE_PEAK_FRACTION * self.spec.anharm.abs();
        let area = Envelope::Hann.area_factor();
        let duration = (theta / (peak * area)).max(MIN_DRIVE_PERIODS * TAU / self.spec.anharm.abs());
        let mut amplitude = theta / (duration * area);
        let carrier = self.dressed_frequency(q);
        let mut fit = [(0.0, theta, 0.0, 0.0); 2];
        for round in 0..=DRIVE_CALIBRATION_ROUNDS {
            if round > 0 {
                amplitude *= theta / (0.5 * (fit[0].1 + fit[1].1));
            }
            let seg = Segment::Drive {
                qubit: q,
                amplitude,
                carrier,
                phase: 0.0,
                duration,
                envelope: Envelope::Hann,
            };
            let u = self.schedule_unitary(&PulseSchedule { segments: vec![seg] })?;
            for (other, f) in fit.iter_mut().enumerate() {
                let (lo, hi) = self.qubit_pair(q, other);
                let block = [[u[(lo, lo)], u[(lo, hi)]], [u[(hi, lo)], u[(hi, hi)]]];
                let (a, th, b) = zxz_angles(block);
                let g = block[0][0].arg() + 0.5 * (a + b);
                *f = (a, th, b, g);
            }
        }
        let pulse = DrivePulse {
            amplitude,
            duration,
            pre_z: -0.5 * (fit[0].2 + fit[1].2),
            post_z: -0.5 * (fit[0].0 + fit[1].0),
            other_z: wrap(fit[0].3 - fit[1].3),
        };
        self.pulses.lock().expect("pulse cache").insert(key, pulse);
        Ok(pulse)
    }

    /// Calibrated `XY(sign(J) theta)` for `0 < theta <= pi`.
    ///
    /// The exchange segment is simulated from `t = 0`; its computational
    /// block is number-conserving, so up to a conditional phase it equals
    /// the target dressed with frame phases `exp(i alpha.n)` after and
    /// `exp(i beta.n)` before. These are fitted by weighted least squares on
    /// the phases of the six non-zero elements.
    pub fn exchange_pulse(&self, theta: f64) -> Result<ExchangePulse> {
        if let Some(p) = self.exchanges.lock().expect("exchange cache").get(&theta.to_bits()) {
            return Ok(*p);
        }
        let cal = &self.exchange;
        let duration = theta / FRAC_PI_2 * cal.t_sqiswap;
        let seg = Segment::Exchange {
            duration,
            frequency: cal.frequency,
        };
        let u = self.computational_block(&self.schedule_unitary(&PulseSchedule { segments: vec![seg] })?);
        let signed = theta * cal.j.signum();
        let target = crate::trotter::circuit::xy_matrix(signed);
        // unknowns (alpha0, alpha1, beta0, gamma); beta1 is a gauge choice
        let rows: [(usize, usize, [f64; 4]); 6] = [
            (0, 0, [0.0, 0.0, 0.0, 1.0]),
            (3, 3, [1.0, 1.0, 1.0, 1.0]),
            (1, 1, [0.0, 1.0, 0.0, 1.0]),
            (2, 2, [1.0, 0.0, 1.0, 1.0]),
            (1, 2, [0.0, 1.0, 1.0, 1.0]),
            (2, 1, [1.0, 0.0, 0.0, 1.0]),
        ];
        let mut ata = nalgebra::Matrix4::<f64>::zeros();
        let mut atb = nalgebra::Vector4::<f64>::zeros();
        for &(r, k, coef) in &rows {
            let w = target[(r, k)].norm() * u[(r, k)].norm();
            if w < 1e-9 {
                continue;
            }
            let d = wrap(target[(r, k)].arg() - u[(r, k)].arg());
            let a = nalgebra::Vector4::from_column_slice(&coef);
            ata += a * a.transpose() * w;
            atb += a * (w * d);
        }
        let x = ata
            .lu()
            .solve(&atb)
            .ok_or_else(|| Error::Calibration(format!("singular phase fit for XY({signed})")))?;
        let pulse = ExchangePulse {
            duration,
            pre: [x[2], 0.0],
            post: [x[0], x[1]],
        };
        self.exchanges
            .lock()
            .expect("exchange cache")
            .insert(theta.to_bits(), pulse);
        Ok(pulse)
    }

    /// Schedule implementing a two-qubit circuit of the exchange native set.
    ///
    /// * `RX`, `RY`, `X`, `H`: resonant Hann drives (`H = RX(pi) RY(pi/2)`)
    ///   with calibrated frame corrections;
    /// * `RZ`: a frame update;
    /// * `XY`, `SQISWAP`: an exchange segment of `|theta| / (pi/2)` times
    ///   the `√iSWAP` time, framed by updates that undo the frequency shift
    ///   of the tuned resonators, the linear part of the conditional phase
    ///   and, if needed, the sign of the coupling;
    /// * `BARRIER`: a zero-length idle.
    pub fn compile(&self, c: &Circuit) -> Result<PulseSchedule> {
        c.validate()?;
        if c.n_qubits() != 2 {
            return Err(Error::InvalidArgument(format!(
                "the device holds 2 qubits, circuit has {}",
                c.n_qubits()
            )));
        }
        let mut sched = PulseSchedule::new();
        let mut t = 0.0;
        for g in c.gates() {
            if !NativeSet::SqiswapSet.admits(g.kind) {
                return Err(Error::InadmissibleGate {
                    gate: g.kind.name().to_string(),
                    set: NativeSet::SqiswapSet.name().to_string(),
                });
            }
            let q = g.qubits[0];
            match g.kind {
                GateKind::Rx => self.emit_rotation(&mut sched, &mut t, q, g.angle, 0.0)?,
                GateKind::Ry => self.emit_rotation(&mut sched, &mut t, q, g.angle, FRAC_PI_2)?,
                GateKind::X => self.emit_rotation(&mut sched, &mut t, q, PI, 0.0)?,
                GateKind::H => {
                    self.emit_rotation(&mut sched, &mut t, q, FRAC_PI_2, FRAC_PI_2)?;
                    self.emit_rotation(&mut sched, &mut t, q, PI, 0.0)?;
                }
                GateKind::Rz => push_vz(&mut sched, q, g.angle),
                GateKind::Xy => self.emit_exchange(&mut sched, &mut t, g.angle)?,
                GateKind::Sqiswap => self.emit_exchange(&mut sched, &mut t, FRAC_PI_2)?,
                GateKind::Barrier => sched.push(Segment::Idle { duration: 0.0 }),
                GateKind::Cnot => unreachable!("rejected by the native-set check"),
            }
        }
        Ok(sched)
    }

    fn emit_rotation(&self, sched: &mut PulseSchedule, t: &mut f64, q: usize, theta: f64, phase: f64) -> Result<()> {
        let (theta, _) = reduce_angle(theta);
        if theta.abs() < 1e-12 {
            return Ok(());
        }
        let phase = if theta < 0.0 { phase + PI } else { phase };
        let pulse = self.drive_pulse(q, theta.abs())?;
        let carrier = self.dressed_frequency(q);
        let o = self.drive_offsets(q, carrier);
        let (zero, one) = self.qubit_pair(q, 0);
        let lock = (o[one] - o[zero]) * *t;
        push_vz(sched, q, pulse.pre_z);
        sched.push(Segment::Drive {
            qubit: q,
            amplitude: pulse.amplitude,
            carrier,
            phase: phase - lock,
            duration: pulse.duration,
            envelope: Envelope::Hann,
        });
        push_vz(sched, q, pulse.post_z);
        push_vz(sched, 1 - q, pulse.other_z);
        *t += pulse.duration;
        Ok(())
    }

    fn emit_exchange(&self, sched: &mut PulseSchedule, t: &mut f64, theta: f64) -> Result<()> {
        let (theta, turns) = reduce_angle(theta);
        // XY(theta + 2 pi k) = XY(theta) ZZ^k, and ZZ is a pi update on both
        let turn = if turns % 2 != 0 { PI } else { 0.0 };
        if theta.abs() < 1e-12 {
            push_vz(sched, 0, turn);
            push_vz(sched, 1, turn);
            return Ok(());
        }
        let pulse = self.exchange_pulse(theta.abs())?;
        // XY(-theta) = Z0 XY(theta) Z0
        let flip = if theta.signum() != self.exchange.j.signum() {
            PI
        } else {
            0.0
        };
        let t0 = *t;
        for q in 0..2 {
            let own = if q == 0 { flip } else { 0.0 };
            push_vz(sched, q, pulse.pre[q] + self.dressed_frequency(q) * t0 + own);
        }
        sched.push(Segment::Exchange {
            duration: pulse.duration,
            frequency: self.exchange.frequency,
        });
        for q in 0..2 {
            let own = if q == 0 { flip } else { 0.0 };
            push_vz(sched, q, pulse.post[q] - self.dressed_frequency(q) * t0 + own + turn);
        }
        *t += pulse.duration;
        Ok(())
    }

    /// Compiles and runs a circuit from a two-qubit initial state.
    pub fn run(&self, c: &Circuit, rho0: &QuantumState) -> Result<DeviceRun> {
        let sched = self.compile(c)?;
        let rho = self.execute(&sched, &self.embed(rho0)?)?;
        let (state, leakage) = self.reduce(&rho)?;
        if leakage > LEAKAGE_WARN {
            log::warn!("leakage {leakage:.3e} out of the computational subspace");
        }
        Ok(DeviceRun {
            state,
            leakage,
            duration: sched.duration(),
        })
    }
}

/// `max |a - e^{i phi} b|` with `e^{i phi}` the phase of `Tr(b† a)`; for a
/// nearly unitary `a` this is the global-phase-insensitive gate error.
pub fn subspace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let tr = b.adjoint().matmul(a).trace();
    let phase = if tr.norm() > 0.0 { tr / tr.norm() } else { c(1.0, 0.0) };
    a.max_abs_diff(&b.scale(phase))
}

fn push_vz(sched: &mut PulseSchedule, q: usize, angle: f64) {
    let a = angle.rem_euclid(TAU);
    if a.abs() > 1e-15 && (TAU - a).abs() > 1e-15 {
        sched.push(Segment::VirtualZ { qubit: q, angle: a });
    }
}
