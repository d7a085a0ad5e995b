//! Standard operator constructors and tensor products.
//!
//! Tensor ordering: the leftmost factor is the most significant index, so
//! `kron(a, b)` acting on `|q0 q1>` puts `a` on `q0` and basis state
//! `|q0 q1>` has index `2*q0 + q1`.

use super::matrix::{c, ComplexMatrix, I, ONE, ZERO};
use crate::error::{Error, Result};

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |r, k| a[(r / br, k / bc)] * b[(r % br, k % bc)])
}

/// Kronecker product of a list of factors, leftmost most significant.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(None, |acc: Option<ComplexMatrix>, f| {
            Some(match acc {
                None => f.clone(),
                Some(a) => kron(&a, f),
            })
        })
        .unwrap_or_else(|| ComplexMatrix::identity(1))
}

pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

/// Spin-1/2 operators `s_a = sigma_a / 2`.
pub fn spin_half_x() -> ComplexMatrix {
    pauli_x().scale_real(0.5)
}

pub fn spin_half_y() -> ComplexMatrix {
    pauli_y().scale_real(0.5)
}

pub fn spin_half_z() -> ComplexMatrix {
    pauli_z().scale_real(0.5)
}

/// Bosonic annihilation operator truncated to `n` Fock levels.
pub fn annihilation(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, k| if k == r + 1 { c((k as f64).sqrt(), 0.0) } else { ZERO })
}

pub fn creation(n: usize) -> ComplexMatrix {
    annihilation(n).adjoint()
}

pub fn number(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&(0..n).map(|k| k as f64).collect::<Vec<_>>())
}

/// Computational basis vector `|index>` in dimension `dim`.
pub fn basis(dim: usize, index: usize) -> Vec<num_complex::Complex64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

/// Embeds `op` acting on `targets` (in that order) into an `n_qubits`
/// register. Target order defines which factor of `op` maps to which qubit.
pub fn embed_qubits(op: &ComplexMatrix, targets: &[usize], n_qubits: usize) -> Result<ComplexMatrix> {
    let k = targets.len();
    if op.rows() != 1 << k || op.cols() != 1 << k {
        return Err(Error::DimensionMismatch {
            expected: 1 << k,
            actual: op.rows(),
        });
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits || targets[..i].contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "bad target list {targets:?} for {n_qubits} qubits"
            )));
        }
    }
    let dim = 1usize << n_qubits;
    let bit = |state: usize, q: usize| (state >> (n_qubits - 1 - q)) & 1;
    let sub_index = |state: usize| targets.iter().fold(0usize, |acc, &q| (acc << 1) | bit(state, q));
    let mut mask = 0usize;
    for &q in targets {
        mask |= 1 << (n_qubits - 1 - q);
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |r, col| {
        if r & !mask != col & !mask {
            ZERO
        } else {
            op[(sub_index(r), sub_index(col))]
        }
    }))
}

/// Embeds a single-site operator into a product space with arbitrary local
/// dimensions.
pub fn embed_site(op: &ComplexMatrix, site: usize, dims: &[usize]) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = dims
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if i == site {
                op.clone()
            } else {
                ComplexMatrix::identity(d)
            }
        })
        .collect();
    kron_all(&factors)
}
