//! Gates, native gate sets and circuits.
//!
//! Angle conventions:
//!
//! * `RX(a) = exp(-i a X / 2)`, likewise `RY`, `RZ`;
//! * `XY(a) = exp(-i a (XX + YY) / 4)`, so `SQISWAP = XY(pi / 2)`;
//! * `CNOT` takes `[control, target]`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::matrix::{c, ComplexMatrix, ONE};
use crate::qcore::ops::{embed_qubits, pauli_x};

/// Largest register `circuit_unitary` will build densely.
pub const MAX_UNITARY_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    H,
    X,
    Cnot,
    Xy,
    Sqiswap,
    Barrier,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Cnot => "CNOT",
            GateKind::Xy => "XY",
            GateKind::Sqiswap => "SQISWAP",
            GateKind::Barrier => "BARRIER",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name.to_ascii_uppercase().as_str() {
            "RX" => GateKind::Rx,
            "RY" => GateKind::Ry,
            "RZ" => GateKind::Rz,
            "H" => GateKind::H,
            "X" => GateKind::X,
            "CNOT" | "CX" => GateKind::Cnot,
            "XY" => GateKind::Xy,
            "SQISWAP" => GateKind::Sqiswap,
            "BARRIER" => GateKind::Barrier,
            _ => return None,
        })
    }

    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::H | GateKind::X => Some(1),
            GateKind::Cnot | GateKind::Xy | GateKind::Sqiswap => Some(2),
            GateKind::Barrier => None,
        }
    }

    pub fn has_angle(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Xy)
    }

    pub fn is_two_qubit(self) -> bool {
        self.arity() == Some(2)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NativeSet {
    CnotSet,
    SqiswapSet,
}

impl NativeSet {
    pub fn name(self) -> &'static str {
        match self {
            NativeSet::CnotSet => "CNOT_SET",
            NativeSet::SqiswapSet => "SQISWAP_SET",
        }
    }

    /// Single-qubit rotations and barriers are admissible everywhere; the
    /// entangling gates belong to one set each.
    pub fn admits(self, kind: GateKind) -> bool {
        match kind {
            GateKind::Cnot => self == NativeSet::CnotSet,
            GateKind::Xy | GateKind::Sqiswap => self == NativeSet::SqiswapSet,
            _ => true,
        }
    }
}

impl fmt::Display for NativeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// Radians; zero for gates without a parameter.
    pub angle: f64,
    /// Seconds. Left empty by the compiler and filled in by a backend.
    pub duration: Option<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, angle: f64) -> Result<Self> {
        let g = Self {
            kind,
            qubits,
            angle: if kind.has_angle() { angle } else { 0.0 },
            duration: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn rx(q: usize, angle: f64) -> Self {
        Self::unchecked(GateKind::Rx, vec![q], angle)
    }

    pub fn ry(q: usize, angle: f64) -> Self {
        Self::unchecked(GateKind::Ry, vec![q], angle)
    }

    pub fn rz(q: usize, angle: f64) -> Self {
        Self::unchecked(GateKind::Rz, vec![q], angle)
    }

    pub fn h(q: usize) -> Self {
        Self::unchecked(GateKind::H, vec![q], 0.0)
    }

    pub fn x(q: usize) -> Self {
        Self::unchecked(GateKind::X, vec![q], 0.0)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::unchecked(GateKind::Cnot, vec![control, target], 0.0)
    }

    pub fn xy(a: usize, b: usize, angle: f64) -> Self {
        Self::unchecked(GateKind::Xy, vec![a, b], angle)
    }

    pub fn sqiswap(a: usize, b: usize) -> Self {
        Self::unchecked(GateKind::Sqiswap, vec![a, b], 0.0)
    }

    pub fn barrier(qubits: Vec<usize>) -> Self {
        Self::unchecked(GateKind::Barrier, qubits, 0.0)
    }

    fn unchecked(kind: GateKind, qubits: Vec<usize>, angle: f64) -> Self {
        Self {
            kind,
            qubits,
            angle,
            duration: None,
        }
    }

    pub fn with_duration(mut self, seconds: f64) -> Self {
        self.duration = Some(seconds);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(format!("{}: {msg}", self.kind)));
        match self.kind.arity() {
            Some(k) if self.qubits.len() != k => {
                return bad(format!("expects {k} qubit(s), got {}", self.qubits.len()))
            }
            None if self.qubits.is_empty() => return bad("needs at least one qubit".into()),
            _ => {}
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if self.qubits[..i].contains(q) {
                return bad(format!("repeated qubit {q}"));
            }
        }
        if !self.angle.is_finite() {
            return bad(format!("non-finite angle {}", self.angle));
        }
        if let Some(d) = self.duration {
            if !(d >= 0.0 && d.is_finite()) {
                return bad(format!("invalid duration {d}"));
            }
        }
        Ok(())
    }

    /// Local unitary on `self.qubits` (in that order); `None` for barriers.
    pub fn local_matrix(&self) -> Option<ComplexMatrix> {
        let a = self.angle;
        let (cs, sn) = ((a / 2.0).cos(), (a / 2.0).sin());
        Some(match self.kind {
            GateKind::Rx => {
                ComplexMatrix::from_vec(2, 2, vec![c(cs, 0.0), c(0.0, -sn), c(0.0, -sn), c(cs, 0.0)]).unwrap()
            }
            GateKind::Ry => ComplexMatrix::from_real(2, 2, &[cs, -sn, sn, cs]).unwrap(),
            GateKind::Rz => ComplexMatrix::from_diag(&[c(cs, -sn), c(cs, sn)]),
            GateKind::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap()
            }
            GateKind::X => pauli_x(),
            GateKind::Cnot => {
                ComplexMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.])
                    .unwrap()
            }
            GateKind::Xy => xy_matrix(a),
            GateKind::Sqiswap => xy_matrix(FRAC_PI_2),
            GateKind::Barrier => return None,
        })
    }

    /// Unitary on an `n_qubits` register.
    pub fn matrix(&self, n_qubits: usize) -> Result<ComplexMatrix> {
        match self.local_matrix() {
            Some(m) => embed_qubits(&m, &self.qubits, n_qubits),
            None => Ok(ComplexMatrix::identity(1 << n_qubits)),
        }
    }
}

pub(crate) fn xy_matrix(angle: f64) -> ComplexMatrix {
    // XX + YY = 2(|01><10| + |10><01|), so the exchange block is
    // exp(-i angle/2 sigma_x) on span{|01>, |10>}
    let (cs, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(3, 3)] = ONE;
    m[(1, 1)] = c(cs, 0.0);
    m[(2, 2)] = c(cs, 0.0);
    m[(1, 2)] = c(0.0, -sn);
    m[(2, 1)] = c(0.0, -sn);
    m
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if self.kind.has_angle() {
            write!(f, "({:.6})", self.angle)?;
        }
        let qs: Vec<String> = self.qubits.iter().map(|q| format!("q{q}")).collect();
        write!(f, " {}", qs.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    native_set: NativeSet,
}

impl Circuit {
    pub fn new(n_qubits: usize, native_set: NativeSet) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("circuit needs at least one qubit".into()));
        }
        Ok(Self {
            n_qubits,
            gates: Vec::new(),
            native_set,
        })
    }

    pub fn from_gates(n_qubits: usize, native_set: NativeSet, gates: Vec<Gate>) -> Result<Self> {
        let mut circ = Self::new(n_qubits, native_set)?;
        for g in gates {
            circ.push(g)?;
        }
        Ok(circ)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.check_gate(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    fn check_gate(&self, gate: &Gate) -> Result<()> {
        gate.validate()?;
        if !self.native_set.admits(gate.kind) {
            return Err(Error::InadmissibleGate {
                gate: gate.kind.name().to_string(),
                set: self.native_set.name().to_string(),
            });
        }
        if let Some(&q) = gate.qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::InvalidArgument(format!(
                "{gate} addresses qubit {q} of a {}-qubit circuit",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Re-checks every gate against the circuit invariants.
    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| self.check_gate(g))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gates_mut(&mut self) -> &mut [Gate] {
        &mut self.gates
    }

    pub fn native_set(&self) -> NativeSet {
        self.native_set
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    /// Sum of gate durations, treating unset durations as zero.
    pub fn total_duration(&self) -> f64 {
        self.gates.iter().filter_map(|g| g.duration).sum()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit[{} qubits, {}]", self.n_qubits, self.native_set)?;
        for g in &self.gates {
            writeln!(f, "  {g}")?;
        }
        Ok(())
    }
}

/// Ordered product of the gate unitaries: the first gate acts first.
pub fn circuit_unitary(circ: &Circuit) -> Result<ComplexMatrix> {
    let n = circ.n_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::Guardrail {
            what: "circuit qubits",
            value: n,
            limit: MAX_UNITARY_QUBITS,
        });
    }
    let mut u = ComplexMatrix::identity(1 << n);
    for g in circ.gates() {
        if g.kind != GateKind::Barrier {
            u = g.matrix(n)?.matmul(&u);
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{expm, phase_invariant_distance};
    use crate::qcore::ops::{kron, pauli_y, pauli_z};
    use std::f64::consts::PI;

    #[test]
    fn empty_circuit_is_identity() {
        let circ = Circuit::new(3, NativeSet::CnotSet).unwrap();
        assert_eq!(circuit_unitary(&circ).unwrap(), ComplexMatrix::identity(8));
    }

    #[test]
    fn single_x_is_sigma_x() {
        let circ = Circuit::from_gates(1, NativeSet::CnotSet, vec![Gate::x(0)]).unwrap();
        assert_eq!(circuit_unitary(&circ).unwrap(), pauli_x());
    }

    #[test]
    fn cnot_truth_table() {
        let u = Gate::cnot(0, 1).matrix(2).unwrap();
        let perm = [0usize, 1, 3, 2];
        for (col, &row) in perm.iter().enumerate() {
            assert_eq!(u[(row, col)], ONE);
        }
    }

    #[test]
    fn rotation_conventions() {
        let a = 0.73;
        let cases = [
            (Gate::rx(0, a), pauli_x()),
            (Gate::ry(0, a), pauli_y()),
            (Gate::rz(0, a), pauli_z()),
        ];
        for (g, p) in cases {
            let expected = expm(&p, c(0.0, -a / 2.0)).unwrap();
            assert!(g.local_matrix().unwrap().max_abs_diff(&expected) < 1e-14, "{g}");
        }
    }

    #[test]
    fn xy_convention_and_period() {
        let a = 1.1;
        let gen = &kron(&pauli_x(), &pauli_x()) + &kron(&pauli_y(), &pauli_y());
        let expected = expm(&gen, c(0.0, -a / 4.0)).unwrap();
        assert!(xy_matrix(a).max_abs_diff(&expected) < 1e-14);
        assert!(xy_matrix(a + 4.0 * PI).max_abs_diff(&xy_matrix(a)) < 1e-13);
        let zz = kron(&pauli_z(), &pauli_z());
        assert!(phase_invariant_distance(&xy_matrix(2.0 * PI), &zz).unwrap() < 1e-13);
        assert_eq!(
            Gate::sqiswap(0, 1).local_matrix(),
            Gate::xy(0, 1, FRAC_PI_2).local_matrix()
        );
    }

    #[test]
    fn admissibility() {
        let mut circ = Circuit::new(2, NativeSet::CnotSet).unwrap();
        assert!(matches!(
            circ.push(Gate::sqiswap(0, 1)),
            Err(Error::InadmissibleGate { .. })
        ));
        circ.push(Gate::rz(1, 0.1)).unwrap();
        assert!(circ.push(Gate::cnot(0, 2)).is_err());
        assert!(circ.push(Gate::cnot(1, 1)).is_err());
        let mut sq = Circuit::new(2, NativeSet::SqiswapSet).unwrap();
        assert!(sq.push(Gate::cnot(0, 1)).is_err());
        sq.push(Gate::xy(0, 1, 0.2)).unwrap();
        assert!(Gate::new(GateKind::Rx, vec![0, 1], 0.0).is_err());
    }

    #[test]
    fn guardrail() {
        let circ = Circuit::new(11, NativeSet::CnotSet).unwrap();
        assert!(matches!(circuit_unitary(&circ), Err(Error::Guardrail { .. })));
    }
}
