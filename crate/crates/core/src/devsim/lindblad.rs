//! Fixed-step RK4 integration of the Lindblad master equation.
//!
//! ```text
//! d rho/dt = -i [H(t), rho] + sum_j r_j (L_j rho L_j† - {L_j† L_j, rho}/2)
//! ```
//!
//! `H(t)` is piecewise constant. Steps never straddle a piece boundary or a
//! grid point, so the error is that of RK4 on a constant generator.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::qcore::linalg::eigh;
use crate::qcore::matrix::{c, ComplexMatrix};
use crate::qcore::state::QuantumState;

use super::hamiltonian::DeviceSpace;
use super::spec::DeviceSpec;

pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;
/// Steps per shortest period of the generator.
pub const STEPS_PER_PERIOD: f64 = 200.0;
/// Largest `rate * h` per step.
pub const MAX_DECAY_PER_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPiece {
    pub duration: f64,
    pub h: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOperator {
    pub op: ComplexMatrix,
    pub rate: f64,
}

impl CollapseOperator {
    pub fn new(op: ComplexMatrix, rate: f64) -> Self {
        Self { op, rate }
    }
}

/// A master-equation initial-value problem. After the last piece the
/// Hamiltonian is zero and only the dissipator acts.
#[derive(Debug, Clone)]
pub struct LindbladProblem {
    pub pieces: Vec<HamiltonianPiece>,
    pub collapse: Vec<CollapseOperator>,
    pub rho0: ComplexMatrix,
    pub t_grid: Vec<f64>,
    /// Upper bound on the RK4 step in addition to the automatic one.
    pub max_step: Option<f64>,
}

impl LindbladProblem {
    pub fn validate(&self) -> Result<usize> {
        let dim = self.rho0.require_square()?;
        QuantumState::density(self.rho0.clone())?;
        for p in &self.pieces {
            if !(p.duration >= 0.0 && p.duration.is_finite()) {
                return Err(Error::InvalidArgument(format!("piece duration {}", p.duration)));
            }
            if p.h.rows() != dim || p.h.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: p.h.rows(),
                });
            }
            let dev = p.h.hermiticity_deviation();
            if dev > 1e-9 * p.h.max_abs().max(1.0) {
                return Err(Error::NotHermitian { deviation: dev });
            }
        }
        for l in &self.collapse {
            if !(l.rate >= 0.0 && l.rate.is_finite()) {
                return Err(Error::InvalidArgument(format!("collapse rate {}", l.rate)));
            }
            if l.op.rows() != dim || l.op.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: l.op.rows(),
                });
            }
        }
        if self.t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::InvalidArgument("time grid must be finite and >= 0".into()));
        }
        if self.t_grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("time grid must be non-decreasing".into()));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(Error::InvalidArgument(format!("max_step {h} must be positive")));
            }
        }
        Ok(dim)
    }
}

/// `rho -> K rho + rho K† + sum_j r_j L_j rho L_j†` with the effective
/// non-Hermitian generator `K = -i H - sum_j r_j L_j† L_j / 2`.
struct Generator {
    k: ComplexMatrix,
    jumps: Vec<(f64, ComplexMatrix, ComplexMatrix)>,
}

impl Generator {
    fn new(h: &ComplexMatrix, collapse: &[CollapseOperator]) -> Self {
        let mut k = h.scale(c(0.0, -1.0));
        let mut jumps = Vec::new();
        for l in collapse.iter().filter(|l| l.rate > 0.0) {
            let ld = l.op.adjoint();
            k.axpy(c(-0.5 * l.rate, 0.0), &ld.matmul(&l.op));
            jumps.push((l.rate, l.op.clone(), ld));
        }
        Self { k, jumps }
    }

    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let kr = self.k.matmul(rho);
        let mut out = &kr + &kr.adjoint();
        for (rate, l, ld) in &self.jumps {
            out.axpy(c(*rate, 0.0), &l.matmul(rho).matmul(ld));
        }
        out
    }

    fn rk4(&self, rho: &ComplexMatrix, h: f64) -> ComplexMatrix {
        let k1 = self.apply(rho);
        let mut tmp = rho.clone();
        tmp.axpy(c(0.5 * h, 0.0), &k1);
        let k2 = self.apply(&tmp);
        let mut tmp = rho.clone();
        tmp.axpy(c(0.5 * h, 0.0), &k2);
        let k3 = self.apply(&tmp);
        let mut tmp = rho.clone();
        tmp.axpy(c(h, 0.0), &k3);
        let k4 = self.apply(&tmp);
        let mut out = rho.clone();
        out.axpy(c(h / 6.0, 0.0), &k1);
        out.axpy(c(h / 3.0, 0.0), &k2);
        out.axpy(c(h / 3.0, 0.0), &k3);
        out.axpy(c(h / 6.0, 0.0), &k4);
        out
    }
}

fn spectral_spread(h: &ComplexMatrix) -> Result<f64> {
    if h.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let ev = eigh(h)?.values;
    Ok(ev[ev.len() - 1] - ev[0])
}

/// The step bound `min(2 pi / (200 spread), 0.05 / sum rates, max_step)`.
fn step_bound(spread: f64, total_rate: f64, max_step: Option<f64>) -> f64 {
    let mut h = max_step.unwrap_or(f64::INFINITY);
    if spread > 0.0 {
        h = h.min(TAU / (STEPS_PER_PERIOD * spread));
    }
    if total_rate > 0.0 {
        h = h.min(MAX_DECAY_PER_STEP / total_rate);
    }
    h
}

/// Density matrices at each time of the grid.
pub fn lindblad_evolve(p: &LindbladProblem) -> Result<Vec<QuantumState>> {
    let dim = p.validate()?;
    let total_rate: f64 = p.collapse.iter().map(|l| l.rate * l.op.operator_norm().powi(2)).sum();
    let mut pieces: Vec<(f64, f64, Generator, f64)> = Vec::new();
    let mut start = 0.0;
    for piece in &p.pieces {
        let hmax = step_bound(spectral_spread(&piece.h)?, total_rate, p.max_step);
        pieces.push((
            start,
            start + piece.duration,
            Generator::new(&piece.h, &p.collapse),
            hmax,
        ));
        start += piece.duration;
    }
    let tail = Generator::new(&ComplexMatrix::zeros(dim, dim), &p.collapse);
    let tail_h = step_bound(0.0, total_rate, p.max_step);

    let mut rho = p.rho0.clone();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(p.t_grid.len());
    for &target in &p.t_grid {
        while t < target {
            let (end, gen, hmax) = match pieces.iter().find(|(s, e, _, _)| t >= *s && t < *e) {
                Some((_, e, g, h)) => (e.min(target), g, *h),
                None => (target, &tail, tail_h),
            };
            let span = end - t;
            let n = if hmax.is_finite() {
                (span / hmax).ceil().max(1.0)
            } else {
                1.0
            };
            let h = span / n;
            if h <= f64::EPSILON * end.max(f64::MIN_POSITIVE) {
                return Err(Error::StepUnderflow(h));
            }
            for _ in 0..n as usize {
                rho = gen.rk4(&rho, h);
            }
            t = end;
            let drift = (rho.trace().re - 1.0).abs();
            if drift > TRACE_DRIFT_LIMIT {
                return Err(Error::TraceDrift {
                    drift,
                    time: t,
                    limit: TRACE_DRIFT_LIMIT,
                });
            }
        }
        out.push(QuantumState::density_unchecked(rho.clone()));
    }
    Ok(out)
}

/// Lab-frame collapse operators of the device:
///
/// | operator | rate |
/// |---|---|
/// | `b_i` | `1/T1_nr` |
/// | `n_i` | `2/Tphi_nr` |
/// | `sigma_-` | `1/T1_tr` |
/// | `sigma_z` | `1/(2 Tphi_tr)` |
///
/// With these rates a coherence between adjacent levels decays as
/// `exp(-t/T2)`. Channels with zero rate are omitted.
pub fn device_collapse_operators(spec: &DeviceSpec) -> Vec<CollapseOperator> {
    let s = DeviceSpace::new(spec.n_fock);
    let mut out = Vec::new();
    for i in 0..2 {
        out.push(CollapseOperator::new(s.b(i), 1.0 / spec.t1_nr));
        out.push(CollapseOperator::new(s.number(i), 2.0 * spec.nr_dephasing_rate()));
    }
    out.push(CollapseOperator::new(s.sigma_minus(), 1.0 / spec.t1_tr));
    out.push(CollapseOperator::new(s.sigma_z(), 0.5 * spec.transmon_dephasing_rate()));
    out.retain(|l| l.rate > 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::propagator;
    use crate::qcore::ops::{annihilation, number, pauli_x, pauli_z};
    use crate::qcore::state::fidelity;

    fn ket_density(dim: usize, k: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = c(1.0, 0.0);
        m
    }

    #[test]
    fn free_decay_of_one_phonon() {
        let t1 = 2e-6;
        let p = LindbladProblem {
            pieces: vec![],
            collapse: vec![CollapseOperator::new(annihilation(3), 1.0 / t1)],
            rho0: ket_density(3, 1),
            t_grid: vec![0.0, 0.5e-6, 2e-6, 5e-6],
            max_step: None,
        };
        let out = lindblad_evolve(&p).unwrap();
        for (s, &t) in out.iter().zip(&p.t_grid) {
            let pop = s.populations()[1];
            let want = (-t / t1).exp();
            assert!(((pop - want) / want).abs() < 1e-6, "t={t}: {pop} vs {want}");
        }
    }

    #[test]
    fn unitary_limit_matches_propagator() {
        let h = (&pauli_x().scale_real(2.0) + &pauli_z().scale_real(0.7)).scale_real(1e6);
        let psi0 = QuantumState::pure_normalized(vec![c(0.8, 0.0), c(0.3, 0.5)]).unwrap();
        let p = LindbladProblem {
            pieces: vec![HamiltonianPiece {
                duration: 3e-6,
                h: h.clone(),
            }],
            collapse: vec![],
            rho0: psi0.to_density_matrix(),
            t_grid: vec![3e-6],
            max_step: None,
        };
        let out = lindblad_evolve(&p).unwrap();
        let want = psi0.evolve(&propagator(&h, 3e-6).unwrap()).unwrap();
        let f = fidelity(&out[0], &want).unwrap();
        assert!(1.0 - f < 1e-8, "{f}");
    }

    #[test]
    fn dephasing_decays_coherence() {
        let tphi = 1e-6;
        let rho0 = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let p = LindbladProblem {
            pieces: vec![],
            collapse: vec![CollapseOperator::new(number(2), 2.0 / tphi)],
            rho0,
            t_grid: vec![0.7e-6],
            max_step: None,
        };
        let out = lindblad_evolve(&p).unwrap()[0].to_density_matrix();
        assert!((out[(0, 1)].re / 0.5 - (-0.7f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn rejects_invalid_problems() {
        let base = LindbladProblem {
            pieces: vec![],
            collapse: vec![],
            rho0: ket_density(2, 0),
            t_grid: vec![1.0, 0.5],
            max_step: None,
        };
        assert!(lindblad_evolve(&base).is_err());
        let mut p = base.clone();
        p.t_grid = vec![1.0];
        p.collapse = vec![CollapseOperator::new(pauli_z(), -1.0)];
        assert!(lindblad_evolve(&p).is_err());
        let mut p = base;
        p.t_grid = vec![1.0];
        p.rho0 = ComplexMatrix::from_real_diag(&[0.7, 0.7]);
        assert!(lindblad_evolve(&p).is_err());
    }

    #[test]
    fn collapse_set_follows_spec() {
        assert_eq!(device_collapse_operators(&DeviceSpec::default()).len(), 6);
        assert!(device_collapse_operators(&DeviceSpec::noiseless()).is_empty());
    }
}
