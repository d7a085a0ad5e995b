//! First-order product-formula compiler.
//!
//! `exp(-i H t)` is approximated by `(prod_k exp(-i H_k t / n))^n` with the
//! product taken in the Hamiltonian's term order. Each factor is lowered to
//! gates of a native set, and the `n` step blocks are separated by barriers.

pub mod circuit;
pub mod lower;

pub use circuit::{circuit_unitary, Circuit, Gate, GateKind, NativeSet, MAX_UNITARY_QUBITS};
pub use lower::{exchange_pair, lower_exchange_pair, lower_term};

use crate::error::{Error, Result};
use crate::models::{PauliAxis, PauliHamiltonian};
use crate::qcore::linalg::{phase_invariant_distance, propagator};

#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    hamiltonian: PauliHamiltonian,
    total_time: f64,
    steps: usize,
}

impl TrotterPlan {
    pub fn new(hamiltonian: PauliHamiltonian, total_time: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("Trotter step count must be at least 1".into()));
        }
        if !total_time.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite total time {total_time}")));
        }
        Ok(Self {
            hamiltonian,
            total_time,
            steps,
        })
    }

    pub fn hamiltonian(&self) -> &PauliHamiltonian {
        &self.hamiltonian
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_time(&self) -> f64 {
        self.total_time / self.steps as f64
    }
}

/// Gates for one step `prod_k exp(-i c_k P_k dt)`.
///
/// In the exchange set an adjacent XX/YY pair of equal-magnitude
/// coefficients on the same qubits is emitted as one XY pulse.
pub fn lower_step(h: &PauliHamiltonian, dt: f64, set: NativeSet) -> Result<Vec<Gate>> {
    let terms = h.terms();
    let mut gates = Vec::new();
    let mut k = 0;
    while k < terms.len() {
        if set == NativeSet::SqiswapSet && k + 1 < terms.len() {
            if let Some((a, b, sign)) = exchange_pair(&terms[k], &terms[k + 1]) {
                let xx_coef = if terms[k].support()[0].1 == PauliAxis::X {
                    terms[k].coefficient()
                } else {
                    terms[k + 1].coefficient()
                };
                gates.extend(lower_exchange_pair(a, b, xx_coef * dt, sign));
                k += 2;
                continue;
            }
        }
        gates.extend(lower_term(&terms[k], terms[k].coefficient() * dt, set)?);
        k += 1;
    }
    Ok(gates)
}

pub fn trotterize(plan: &TrotterPlan, set: NativeSet) -> Result<Circuit> {
    let n_qubits = plan.hamiltonian.n_qubits();
    let step = lower_step(&plan.hamiltonian, plan.step_time(), set)?;
    let mut circ = Circuit::new(n_qubits, set)?;
    for s in 0..plan.steps {
        if s > 0 {
            circ.push(Gate::barrier((0..n_qubits).collect()))?;
        }
        circ.extend(step.iter().cloned())?;
    }
    Ok(circ)
}

/// Operator-norm distance, minimized over a global phase, between the
/// compiled circuit and the exact propagator.
pub fn digital_error(plan: &TrotterPlan) -> Result<f64> {
    let circ = trotterize(plan, NativeSet::CnotSet)?;
    let u = circuit_unitary(&circ)?;
    let exact = propagator(&plan.hamiltonian.to_matrix()?, plan.total_time)?;
    phase_invariant_distance(&u, &exact)
}
