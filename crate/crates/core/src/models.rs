//! Pauli-string Hamiltonians and the two target spin models.
//!
//! Spin-1/2 operators are `s = sigma / 2`. Coefficients of a
//! [`PauliHamiltonian`] multiply bare Pauli strings, so the spin-model
//! builders below carry the factors of 1/2 explicitly. Qubit `|0>` is spin up
//! (`sigma_z = +1`).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::propagator;
use crate::qcore::matrix::{c, ComplexMatrix};
use crate::qcore::ops::{embed_qubits, pauli_x, pauli_y, pauli_z};
use crate::qcore::state::QuantumState;

/// Largest register `to_matrix` will build densely.
pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            PauliAxis::X => pauli_x(),
            PauliAxis::Y => pauli_y(),
            PauliAxis::Z => pauli_z(),
        }
    }

    pub fn label(self) -> char {
        match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }
}

/// `coefficient * P_q1 P_q2 ...`, identity on qubits absent from `factors`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    coefficient: f64,
    factors: BTreeMap<usize, PauliAxis>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, factors: &[(usize, PauliAxis)]) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite coefficient {coefficient}")));
        }
        let mut map = BTreeMap::new();
        for &(q, axis) in factors {
            if map.insert(q, axis).is_some() {
                return Err(Error::InvalidArgument(format!("qubit {q} repeated in Pauli term")));
            }
        }
        Ok(Self {
            coefficient,
            factors: map,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn factors(&self) -> &BTreeMap<usize, PauliAxis> {
        &self.factors
    }

    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    /// `(qubit, axis)` pairs in ascending qubit order.
    pub fn support(&self) -> Vec<(usize, PauliAxis)> {
        self.factors.iter().map(|(&q, &a)| (q, a)).collect()
    }

    /// The bare Pauli string (without coefficient) on an `n`-qubit register.
    pub fn pauli_matrix(&self, n_qubits: usize) -> Result<ComplexMatrix> {
        let mut m = ComplexMatrix::identity(1 << n_qubits);
        for (&q, &axis) in &self.factors {
            m = embed_qubits(&axis.matrix(), &[q], n_qubits)?.matmul(&m);
        }
        Ok(m)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.coefficient)?;
        if self.factors.is_empty() {
            return write!(f, " I");
        }
        for (q, a) in &self.factors {
            write!(f, " {}{}", a.label(), q)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyUnit {
    /// Coefficients are pure numbers; time is measured in their reciprocal.
    Dimensionless,
    RadPerSecond,
}

/// Ordered sum of Pauli terms. Term order is part of the value: it fixes the
/// product order of the Trotter expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    unit: FrequencyUnit,
}

impl PauliHamiltonian {
    pub fn new(n_qubits: usize, unit: FrequencyUnit) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("Hamiltonian needs at least one qubit".into()));
        }
        Ok(Self {
            n_qubits,
            terms: Vec::new(),
            unit,
        })
    }

    /// Appends a term. Zero-coefficient terms are dropped.
    pub fn push(&mut self, term: PauliTerm) -> Result<()> {
        if let Some((&q, _)) = term.factors.iter().find(|(&q, _)| q >= self.n_qubits) {
            return Err(Error::InvalidArgument(format!(
                "qubit {q} outside {}-qubit Hamiltonian",
                self.n_qubits
            )));
        }
        if term.coefficient != 0.0 {
            self.terms.push(term);
        }
        Ok(())
    }

    pub fn add(&mut self, coefficient: f64, factors: &[(usize, PauliAxis)]) -> Result<()> {
        self.push(PauliTerm::new(coefficient, factors)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn unit(&self) -> FrequencyUnit {
        self.unit
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::Guardrail {
                what: "qubit count",
                value: self.n_qubits,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let dim = self.dim();
        let mut h = ComplexMatrix::zeros(dim, dim);
        for term in &self.terms {
            h.axpy(c(term.coefficient, 0.0), &term.pauli_matrix(self.n_qubits)?);
        }
        Ok(h)
    }
}

impl fmt::Display for PauliHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Axial (`d`) and rhombic (`e`) anisotropy of the spin-1 model
/// `D Sz^2 + E (Sx^2 - Sy^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinOneParams {
    pub d: f64,
    pub e: f64,
}

impl Default for SpinOneParams {
    fn default() -> Self {
        Self { d: 1.0, e: 0.25 }
    }
}

/// Two-spin transverse-field Ising model `gamma sx1 sx2 + b (sz1 + sz2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimParams {
    pub gamma: f64,
    pub b: f64,
}

impl Default for TimParams {
    fn default() -> Self {
        Self { gamma: 2.0, b: 1.0 }
    }
}

/// Two-qubit image of the spin-1 Hamiltonian,
/// `2D sz1 sz2 + 2E (sx1 sx2 - sy1 sy2)` as Pauli strings
/// `[ZZ: D/2, XX: E/2, YY: -E/2]`. The constant from `Sz^2 = 1/2 + 2 sz1 sz2`
/// is a global phase and is dropped.
pub fn build_spin1_qubit_hamiltonian(p: SpinOneParams) -> PauliHamiltonian {
    use PauliAxis::*;
    let mut h = PauliHamiltonian::new(2, FrequencyUnit::Dimensionless).unwrap();
    h.add(p.d / 2.0, &[(0, Z), (1, Z)]).unwrap();
    h.add(p.e / 2.0, &[(0, X), (1, X)]).unwrap();
    h.add(-p.e / 2.0, &[(0, Y), (1, Y)]).unwrap();
    h
}

/// `[XX: gamma/4, Z0: b/2, Z1: b/2]`.
pub fn build_tim_hamiltonian(p: TimParams) -> PauliHamiltonian {
    use PauliAxis::*;
    let mut h = PauliHamiltonian::new(2, FrequencyUnit::Dimensionless).unwrap();
    h.add(p.gamma / 4.0, &[(0, X), (1, X)]).unwrap();
    h.add(p.b / 2.0, &[(0, Z)]).unwrap();
    h.add(p.b / 2.0, &[(1, Z)]).unwrap();
    h
}

/// `exp(-i H t) psi0`, with no product-formula error.
pub fn exact_evolve(h: &PauliHamiltonian, psi0: &QuantumState, t: f64) -> Result<QuantumState> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    if t == 0.0 || h.is_empty() {
        return Ok(psi0.clone());
    }
    psi0.evolve(&propagator(&h.to_matrix()?, t)?)
}

/// Total spin component `sum_i sigma_a(i) / 2`.
pub fn total_spin(axis: PauliAxis, n_qubits: usize) -> ComplexMatrix {
    let dim = 1 << n_qubits;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for q in 0..n_qubits {
        m.axpy(c(0.5, 0.0), &embed_qubits(&axis.matrix(), &[q], n_qubits).unwrap());
    }
    m
}

/// Product state from one character per qubit: `0`/`u` (spin up), `1`/`d`,
/// `+`, `-`, `r` (`+i`), `l` (`-i`).
pub fn product_state(spec: &str) -> Result<QuantumState> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![c(1.0, 0.0)];
    for ch in spec.chars() {
        let local = match ch {
            '0' | 'u' => [c(1.0, 0.0), c(0.0, 0.0)],
            '1' | 'd' => [c(0.0, 0.0), c(1.0, 0.0)],
            '+' => [c(s, 0.0), c(s, 0.0)],
            '-' => [c(s, 0.0), c(-s, 0.0)],
            'r' => [c(s, 0.0), c(0.0, s)],
            'l' => [c(s, 0.0), c(0.0, -s)],
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown single-qubit state '{other}' in \"{spec}\""
                )))
            }
        };
        amps = amps.iter().flat_map(|a| local.iter().map(move |l| a * l)).collect();
    }
    if spec.is_empty() {
        return Err(Error::InvalidArgument("empty product-state spec".into()));
    }
    QuantumState::pure(amps)
}

/// One of the two target models with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Spin1(SpinOneParams),
    Tim(TimParams),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Spin1(_) => "spin1",
            Model::Tim(_) => "tim",
        }
    }

    pub fn hamiltonian(&self) -> PauliHamiltonian {
        match *self {
            Model::Spin1(p) => build_spin1_qubit_hamiltonian(p),
            Model::Tim(p) => build_tim_hamiltonian(p),
        }
    }

    /// Measured total-spin axis: `S_z` for the spin-1 tunneling experiment,
    /// `S_x` for the Ising model.
    pub fn observable_axis(&self) -> PauliAxis {
        match self {
            Model::Spin1(_) => PauliAxis::Z,
            Model::Tim(_) => PauliAxis::X,
        }
    }

    pub fn observable(&self) -> ComplexMatrix {
        total_spin(self.observable_axis(), 2)
    }

    /// `|up up>` for spin-1 (m = +1), `|+ +>` for the Ising model.
    pub fn default_initial_state(&self) -> &'static str {
        match self {
            Model::Spin1(_) => "00",
            Model::Tim(_) => "++",
        }
    }

    /// The coupling that makes the time axis dimensionless (`E t` or
    /// `gamma t`).
    pub fn time_scale(&self) -> f64 {
        match *self {
            Model::Spin1(p) => p.e,
            Model::Tim(p) => p.gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = match *self {
            Model::Spin1(p) => (p.d, p.e),
            Model::Tim(p) => (p.gamma, p.b),
        };
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Config(format!("{} parameters must be finite", self.name())));
        }
        if self.time_scale() == 0.0 {
            return Err(Error::Config(format!(
                "{}: the time-scale coupling ({}) must be nonzero",
                self.name(),
                if matches!(self, Model::Spin1(_)) { "e" } else { "gamma" }
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::state::expectation;
    use PauliAxis::*;

    #[test]
    fn spin1_axial_only() {
        let h = build_spin1_qubit_hamiltonian(SpinOneParams { d: 1.0, e: 0.0 });
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.terms()[0].coefficient(), 0.5);
        assert_eq!(h.terms()[0].support(), vec![(0, Z), (1, Z)]);
    }

    #[test]
    fn zero_params_give_empty_hamiltonians() {
        assert!(build_spin1_qubit_hamiltonian(SpinOneParams { d: 0.0, e: 0.0 }).is_empty());
        assert!(build_tim_hamiltonian(TimParams { gamma: 0.0, b: 0.0 }).is_empty());
    }

    #[test]
    fn spin1_term_order_is_zz_xx_yy() {
        let h = build_spin1_qubit_hamiltonian(SpinOneParams { d: 1.0, e: 0.3 });
        let axes: Vec<Vec<(usize, PauliAxis)>> = h.terms().iter().map(|t| t.support()).collect();
        assert_eq!(axes[0], vec![(0, Z), (1, Z)]);
        assert_eq!(axes[1], vec![(0, X), (1, X)]);
        assert_eq!(axes[2], vec![(0, Y), (1, Y)]);
        let coefs: Vec<f64> = h.terms().iter().map(|t| t.coefficient()).collect();
        assert_eq!(coefs, vec![0.5, 0.15, -0.15]);
    }

    #[test]
    fn tim_coefficients() {
        let h = build_tim_hamiltonian(TimParams { gamma: 2.0, b: 1.0 });
        let coefs: Vec<f64> = h.terms().iter().map(|t| t.coefficient()).collect();
        assert_eq!(coefs, vec![0.5, 0.5, 0.5]);
        assert_eq!(h.terms()[1].support(), vec![(0, Z)]);
        assert_eq!(h.terms()[2].support(), vec![(1, Z)]);
    }

    #[test]
    fn to_matrix_basics() {
        let h = PauliHamiltonian::new(2, FrequencyUnit::Dimensionless).unwrap();
        assert_eq!(h.to_matrix().unwrap(), ComplexMatrix::zeros(4, 4));
        let mut h1 = PauliHamiltonian::new(1, FrequencyUnit::Dimensionless).unwrap();
        h1.add(1.0, &[(0, Z)]).unwrap();
        assert_eq!(h1.to_matrix().unwrap(), ComplexMatrix::from_real_diag(&[1.0, -1.0]));
        let big = PauliHamiltonian::new(13, FrequencyUnit::Dimensionless).unwrap();
        assert!(matches!(big.to_matrix(), Err(Error::Guardrail { .. })));
    }

    #[test]
    fn push_validates_qubit_range_and_drops_zeros() {
        let mut h = PauliHamiltonian::new(2, FrequencyUnit::Dimensionless).unwrap();
        assert!(h.add(1.0, &[(2, X)]).is_err());
        h.add(0.0, &[(0, X)]).unwrap();
        assert!(h.is_empty());
        assert!(PauliTerm::new(f64::NAN, &[]).is_err());
        assert!(PauliTerm::new(1.0, &[(0, X), (0, Y)]).is_err());
    }

    #[test]
    fn spin1_tunneling_matrix_element() {
        // (E/2) <11|XX - YY|00> = (E/2)(1 + 1)
        let e = 0.5;
        let h = build_spin1_qubit_hamiltonian(SpinOneParams { d: 1.0, e })
            .to_matrix()
            .unwrap();
        assert!((h[(3, 0)] - c(e, 0.0)).norm() < 1e-15);
        assert!(h.is_hermitian(1e-12));
    }

    #[test]
    fn exact_evolve_zero_time_is_identity() {
        let h = build_tim_hamiltonian(TimParams::default());
        let psi = product_state("+-").unwrap();
        assert_eq!(exact_evolve(&h, &psi, 0.0).unwrap(), psi);
        assert!(exact_evolve(&h, &QuantumState::basis(2, 0), 1.0).is_err());
    }

    #[test]
    fn product_states() {
        let pp = product_state("++").unwrap();
        let sx = total_spin(X, 2);
        assert!((expectation(&pp, &sx).unwrap() - 1.0).abs() < 1e-14);
        let uu = product_state("uu").unwrap();
        assert!((expectation(&uu, &total_spin(Z, 2)).unwrap() - 1.0).abs() < 1e-14);
        assert!(product_state("0x").is_err());
    }

    #[test]
    fn model_validation() {
        assert!(Model::Spin1(SpinOneParams { d: 1.0, e: 0.0 }).validate().is_err());
        assert!(Model::Tim(TimParams::default()).validate().is_ok());
    }
}
