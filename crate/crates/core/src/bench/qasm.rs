//! OpenQASM 2.0 export of CNOT-set circuits, and a reader for the subset we
//! emit.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::models::{PauliAxis, PauliTerm};
use crate::trotter::lower::lower_term;
use crate::trotter::{Circuit, Gate, GateKind, NativeSet};

/// Rewrites exchange-set gates over the CNOT set:
/// `XY(theta) = exp(-i theta/4 XX) exp(-i theta/4 YY)` (the two commute)
/// and `SQISWAP = XY(pi/2)`.
pub fn relower_to_cnot_set(c: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(c.n_qubits(), NativeSet::CnotSet)?;
    for g in c.gates() {
        let angle = match g.kind {
            GateKind::Xy => g.angle,
            GateKind::Sqiswap => std::f64::consts::FRAC_PI_2,
            _ => {
                out.push(g.clone())?;
                continue;
            }
        };
        let (a, b) = (g.qubits[0], g.qubits[1]);
        for axis in [PauliAxis::X, PauliAxis::Y] {
            let term = PauliTerm::new(1.0, &[(a, axis), (b, axis)])?;
            out.extend(lower_term(&term, angle / 4.0, NativeSet::CnotSet)?)?;
        }
    }
    Ok(out)
}

fn qasm_gate(g: &Gate) -> Result<String> {
    let q = |i: usize| format!("q[{}]", g.qubits[i]);
    Ok(match g.kind {
        GateKind::Rx => format!("rx({}) {};", g.angle, q(0)),
        GateKind::Ry => format!("ry({}) {};", g.angle, q(0)),
        GateKind::Rz => format!("rz({}) {};", g.angle, q(0)),
        GateKind::H => format!("h {};", q(0)),
        GateKind::X => format!("x {};", q(0)),
        GateKind::Cnot => format!("cx {},{};", q(0), q(1)),
        GateKind::Barrier => {
            let args: Vec<String> = g.qubits.iter().map(|k| format!("q[{k}]")).collect();
            format!("barrier {};", args.join(","))
        }
        GateKind::Xy | GateKind::Sqiswap => {
            return Err(Error::InvalidArgument(format!("{g} has no OpenQASM 2.0 encoding")))
        }
    })
}

/// OpenQASM 2.0 listing with a Z measurement of every qubit. Exchange-set
/// circuits are first re-lowered to the CNOT set. Angles are printed as
/// shortest round-trip decimals, so the text is byte-deterministic.
pub fn to_qasm(c: &Circuit) -> Result<String> {
    let c = match c.native_set() {
        NativeSet::CnotSet => c.clone(),
        NativeSet::SqiswapSet => relower_to_cnot_set(c)?,
    };
    let n = c.n_qubits();
    let mut s = String::new();
    writeln!(s, "OPENQASM 2.0;").unwrap();
    writeln!(s, "include \"qelib1.inc\";").unwrap();
    writeln!(s, "qreg q[{n}];").unwrap();
    writeln!(s, "creg c[{n}];").unwrap();
    for g in c.gates() {
        writeln!(s, "{}", qasm_gate(g)?).unwrap();
    }
    for k in 0..n {
        writeln!(s, "measure q[{k}] -> c[{k}];").unwrap();
    }
    Ok(s)
}

pub fn export_qasm(c: &Circuit, path: &Path) -> Result<()> {
    std::fs::write(path, to_qasm(c)?)?;
    Ok(())
}

/// Angle expression: numbers, `pi`, `+ - * /`, unary minus, parentheses.
struct Expr<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Expr<'_> {
    fn eval(text: &str) -> std::result::Result<f64, String> {
        let mut e = Expr {
            s: text.as_bytes(),
            pos: 0,
        };
        let v = e.sum()?;
        e.skip_ws();
        if e.pos != e.s.len() {
            return Err(format!("unexpected `{}` in angle", &text[e.pos..]));
        }
        Ok(v)
    }

    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let r = self.product()?;
            v = if op == b'+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn product(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let r = self.unary()?;
            v = if op == b'*' { v * r } else { v / r };
        }
        Ok(v)
    }

    fn unary(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err("missing `)` in angle".into());
                }
                self.pos += 1;
                Ok(v)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> std::result::Result<f64, String> {
        let start = self.pos;
        if self.s[start..].starts_with(b"pi") {
            self.pos += 2;
            return Ok(std::f64::consts::PI);
        }
        while let Some(&b) = self.s.get(self.pos) {
            let exp_sign = (b == b'-' || b == b'+') && matches!(self.s.get(self.pos - 1), Some(b'e' | b'E'));
            if b.is_ascii_digit() || b == b'.' || b == b'e' || b == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let tok = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        tok.parse().map_err(|_| format!("bad number `{tok}`"))
    }
}

fn qubit_arg(arg: &str, reg: &str, n: usize) -> std::result::Result<usize, String> {
    let arg = arg.trim();
    let inner = arg
        .strip_prefix(reg)
        .and_then(|r| r.trim_start().strip_prefix('['))
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("expected {reg}[k], got `{arg}`"))?;
    let k: usize = inner.trim().parse().map_err(|_| format!("bad qubit index `{inner}`"))?;
    if k >= n {
        return Err(format!("qubit {k} outside register of {n}"));
    }
    Ok(k)
}

/// Reads the OpenQASM subset written by [`to_qasm`]: one quantum register,
/// gates `rx ry rz h x cx barrier`; `creg` and `measure` are skipped.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut reg: Option<(String, usize)> = None;
    let mut gates = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| Error::QasmParse { line: line_no, msg };
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let stmt = line.strip_suffix(';').ok_or_else(|| err("missing `;`".into()))?.trim();
        let (head, rest) = match stmt.find(|ch: char| ch.is_whitespace() || ch == '(') {
            Some(k) => (&stmt[..k], stmt[k..].trim()),
            None => (stmt, ""),
        };
        match head {
            "OPENQASM" => {
                if rest != "2.0" {
                    return Err(err(format!("unsupported version `{rest}`")));
                }
            }
            "include" | "creg" | "measure" => {}
            "qreg" => {
                if reg.is_some() {
                    return Err(err("only one quantum register is supported".into()));
                }
                let open = rest.find('[').ok_or_else(|| err(format!("bad register `{rest}`")))?;
                let name = rest[..open].trim().to_string();
                let size = rest[open + 1..]
                    .strip_suffix(']')
                    .and_then(|s| s.trim().parse::<usize>().ok())
                    .ok_or_else(|| err(format!("bad register size in `{rest}`")))?;
                reg = Some((name, size));
            }
            _ => {
                let (name, n) = reg.clone().ok_or_else(|| err("gate before qreg".into()))?;
                let kind = match head {
                    "rx" => GateKind::Rx,
                    "ry" => GateKind::Ry,
                    "rz" => GateKind::Rz,
                    "h" => GateKind::H,
                    "x" => GateKind::X,
                    "cx" => GateKind::Cnot,
                    "barrier" => GateKind::Barrier,
                    other => return Err(err(format!("unsupported statement `{other}`"))),
                };
                let (angle, args) = if kind.has_angle() {
                    let close = rest.rfind(')').ok_or_else(|| err("missing `)`".into()))?;
                    let expr = rest
                        .strip_prefix('(')
                        .map(|r| &r[..close - 1])
                        .ok_or_else(|| err("missing angle".into()))?;
                    (Expr::eval(expr).map_err(err)?, &rest[close + 1..])
                } else {
                    (0.0, rest)
                };
                let qubits = args
                    .split(',')
                    .map(|a| qubit_arg(a, &name, n))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(err)?;
                gates.push(Gate::new(kind, qubits, angle).map_err(|e| err(e.to_string()))?);
            }
        }
    }
    let (_, n) = reg.ok_or(Error::QasmParse {
        line: text.lines().count(),
        msg: "no qreg declaration".into(),
    })?;
    Circuit::from_gates(n, NativeSet::CnotSet, gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trotter::circuit_unitary;
    use std::f64::consts::FRAC_PI_2;

    const BELL: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\nh q[0];\ncx q[0],q[1];\nmeasure q[0] -> c[0];\nmeasure q[1] -> c[1];\n";

    #[test]
    fn empty_circuit() {
        let c = Circuit::new(2, NativeSet::CnotSet).unwrap();
        assert_eq!(
            to_qasm(&c).unwrap(),
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\nmeasure q[0] -> c[0];\nmeasure q[1] -> c[1];\n"
        );
    }

    #[test]
    fn bell_pair() {
        let c = Circuit::from_gates(2, NativeSet::CnotSet, vec![Gate::h(0), Gate::cnot(0, 1)]).unwrap();
        assert_eq!(to_qasm(&c).unwrap(), BELL);
        assert_eq!(parse_qasm(BELL).unwrap().gates(), c.gates());
    }

    #[test]
    fn angles_round_trip_exactly() {
        let c = Circuit::from_gates(
            2,
            NativeSet::CnotSet,
            vec![Gate::rz(1, -0.1234567890123), Gate::rx(0, 1e-17), Gate::ry(0, 3.0)],
        )
        .unwrap();
        assert_eq!(parse_qasm(&to_qasm(&c).unwrap()).unwrap().gates(), c.gates());
    }

    #[test]
    fn exchange_gates_are_relowered() {
        let c = Circuit::from_gates(
            2,
            NativeSet::SqiswapSet,
            vec![Gate::sqiswap(0, 1), Gate::rx(1, 0.3), Gate::xy(0, 1, -1.7)],
        )
        .unwrap();
        let back = parse_qasm(&to_qasm(&c).unwrap()).unwrap();
        let a = circuit_unitary(&c).unwrap();
        let b = circuit_unitary(&back).unwrap();
        let tr = b.adjoint().matmul(&a).trace();
        assert!(a.max_abs_diff(&b.scale(tr / tr.norm())) < 1e-12);
    }

    #[test]
    fn angle_expressions() {
        let c = parse_qasm("OPENQASM 2.0;\nqreg r[1];\nrz(-pi/2) r[0];\nrx(2*(pi - 1e-1)) r[0];\n").unwrap();
        assert!((c.gates()[0].angle + FRAC_PI_2).abs() < 1e-15);
        assert!((c.gates()[1].angle - 2.0 * (std::f64::consts::PI - 0.1)).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("OPENQASM 2.0;\nqreg q[2];\ncz q[0],q[1];\n", 3),
            ("OPENQASM 2.0;\nqreg q[2];\nh q[2];\n", 3),
            ("OPENQASM 2.0;\nh q[0];\n", 2),
            ("OPENQASM 2.0;\nqreg q[2]\n", 2),
        ] {
            match parse_qasm(text) {
                Err(Error::QasmParse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
