//! Lowering of single Pauli-term exponentials `exp(-i theta P)` to gates.
//!
//! The CNOT set rotates every factor into the Z basis and uses the
//! `CNOT . RZ(2 theta) . CNOT` parity core. The exchange set rotates every
//! factor into the X basis and builds `exp(-i theta XX)` from two XY pulses,
//! using `X_b (XX + YY) X_b = XX - YY`:
//!
//! ```text
//! exp(-i theta XX) = XY(2 theta) . X_b XY(2 theta) X_b
//! ```

use std::f64::consts::FRAC_PI_2;

use super::circuit::{Gate, NativeSet};
use crate::error::{Error, Result};
use crate::models::{PauliAxis, PauliTerm};

/// Gates `(into, out_of)` such that `out_of . Z . into = P` for the CNOT set
/// and `out_of . X . into = P` for the exchange set.
fn basis_change(axis: PauliAxis, q: usize, set: NativeSet) -> (Vec<Gate>, Vec<Gate>) {
    use PauliAxis::*;
    match (set, axis) {
        (NativeSet::CnotSet, Z) | (NativeSet::SqiswapSet, X) => (vec![], vec![]),
        (NativeSet::CnotSet, X) | (NativeSet::SqiswapSet, Z) => (vec![Gate::h(q)], vec![Gate::h(q)]),
        (NativeSet::CnotSet, Y) => (vec![Gate::rx(q, FRAC_PI_2)], vec![Gate::rx(q, -FRAC_PI_2)]),
        (NativeSet::SqiswapSet, Y) => (vec![Gate::rz(q, -FRAC_PI_2)], vec![Gate::rz(q, FRAC_PI_2)]),
    }
}

/// Gates whose product equals `exp(-i theta P)` up to global phase, where
/// `P` is the bare Pauli string of `term` (its coefficient is ignored; fold
/// it into `theta`).
pub fn lower_term(term: &PauliTerm, theta: f64, set: NativeSet) -> Result<Vec<Gate>> {
    let support = term.support();
    match support.as_slice() {
        [] => Ok(vec![]),
        &[(q, axis)] => Ok(match axis {
            PauliAxis::Z => vec![Gate::rz(q, 2.0 * theta)],
            PauliAxis::X => vec![Gate::h(q), Gate::rz(q, 2.0 * theta), Gate::h(q)],
            PauliAxis::Y => {
                let (into, out) = basis_change(PauliAxis::Y, q, NativeSet::CnotSet);
                [into, vec![Gate::rz(q, 2.0 * theta)], out].concat()
            }
        }),
        &[(a, pa), (b, pb)] => {
            let (into_a, out_a) = basis_change(pa, a, set);
            let (into_b, out_b) = basis_change(pb, b, set);
            let core = match set {
                NativeSet::CnotSet => {
                    vec![Gate::cnot(a, b), Gate::rz(b, 2.0 * theta), Gate::cnot(a, b)]
                }
                NativeSet::SqiswapSet => vec![
                    Gate::x(b),
                    Gate::xy(a, b, 2.0 * theta),
                    Gate::x(b),
                    Gate::xy(a, b, 2.0 * theta),
                ],
            };
            Ok([into_a, into_b, core, out_a, out_b].concat())
        }
        _ => Err(Error::UnsupportedLocality(support.len())),
    }
}

/// `exp(-i theta (XX + sign YY))` on `(a, b)` as a single exchange pulse,
/// with `sign = +1` or `-1`.
pub fn lower_exchange_pair(a: usize, b: usize, theta: f64, sign: f64) -> Vec<Gate> {
    let xy = Gate::xy(a, b, 4.0 * theta);
    if sign > 0.0 {
        vec![xy]
    } else {
        vec![Gate::x(b), xy, Gate::x(b)]
    }
}

/// If `first` and `second` are an XX and a YY term on the same pair with
/// coefficients of equal magnitude, returns `(a, b, sign)` where
/// `first + second = c_xx (XX + sign YY)`.
pub fn exchange_pair(first: &PauliTerm, second: &PauliTerm) -> Option<(usize, usize, f64)> {
    let (xx, yy) = match (axes(first)?, axes(second)?) {
        ((PauliAxis::X, _), (PauliAxis::Y, _)) => (first, second),
        ((PauliAxis::Y, _), (PauliAxis::X, _)) => (second, first),
        _ => return None,
    };
    let sx = xx.support();
    let sy = yy.support();
    if sx[0].0 != sy[0].0 || sx[1].0 != sy[1].0 {
        return None;
    }
    let (cx, cy) = (xx.coefficient(), yy.coefficient());
    let tol = 1e-12 * cx.abs().max(cy.abs());
    let sign = if (cx - cy).abs() <= tol {
        1.0
    } else if (cx + cy).abs() <= tol {
        -1.0
    } else {
        return None;
    };
    Some((sx[0].0, sx[1].0, sign))
}

/// Axis of a two-body term whose factors share one axis.
fn axes(t: &PauliTerm) -> Option<(PauliAxis, PauliAxis)> {
    match t.support().as_slice() {
        &[(_, p), (_, q)] if p == q => Some((p, q)),
        _ => None,
    }
}
