//! Pure states, density matrices and the operations that read them out.

use std::collections::BTreeSet;

use num_complex::Complex64;

use super::linalg::eigh;
use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

pub const STATE_TOL: f64 = 1e-10;
pub const EIGEN_FLOOR: f64 = -1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(Vec<Complex64>),
    Density(ComplexMatrix),
}

impl QuantumState {
    /// Checked pure state; the norm must be 1 within 1e-10.
    pub fn pure(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty state vector".into()));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("state norm {norm} is not 1")));
        }
        Ok(Self::Pure(amplitudes))
    }

    /// Normalizes the vector first.
    pub fn pure_normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self::Pure(amplitudes))
    }

    /// Checked density matrix: Hermitian and unit trace within 1e-10,
    /// eigenvalues no lower than -1e-8.
    pub fn density(rho: ComplexMatrix) -> Result<Self> {
        rho.require_square()?;
        let herm = rho.hermiticity_deviation();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("density matrix trace {tr}")));
        }
        let min = eigh(&rho)?.values[0];
        if min < EIGEN_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self::Density(rho))
    }

    /// Wraps a matrix without validation. For hot loops that preserve
    /// validity by construction.
    pub fn density_unchecked(rho: ComplexMatrix) -> Self {
        Self::Density(rho)
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        Self::Pure(super::ops::basis(dim, index))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(v) => v.len(),
            Self::Density(m) => m.rows(),
        }
    }

    pub fn is_pure_kind(&self) -> bool {
        matches!(self, Self::Pure(_))
    }

    pub fn to_density_matrix(&self) -> ComplexMatrix {
        match self {
            Self::Pure(v) => ComplexMatrix::outer(v, v),
            Self::Density(m) => m.clone(),
        }
    }

    pub fn to_density(&self) -> Self {
        Self::Density(self.to_density_matrix())
    }

    pub fn trace(&self) -> f64 {
        match self {
            Self::Pure(v) => v.iter().map(|z| z.norm_sqr()).sum(),
            Self::Density(m) => m.trace().re,
        }
    }

    /// Diagonal of the density matrix in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        match self {
            Self::Pure(v) => v.iter().map(|z| z.norm_sqr()).collect(),
            Self::Density(m) => m.diag().iter().map(|z| z.re).collect(),
        }
    }

    /// `U |psi>` or `U rho U†`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.cols() != self.dim() || u.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.rows(),
            });
        }
        Ok(match self {
            Self::Pure(v) => Self::Pure(u.matvec(v)),
            Self::Density(m) => Self::Density(m.conjugate_by(u)),
        })
    }
}

/// Local dimensions of a tensor-product Hilbert space, leftmost factor most
/// significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertFactorization {
    dims: Vec<usize>,
}

impl HilbertFactorization {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!("invalid subsystem dims {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn qubits(n: usize) -> Self {
        Self { dims: vec![2; n] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Multi-index of a flat index.
    pub fn unflatten(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn flatten(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&x, &d)| acc * d + x)
    }
}

/// Reduced density matrix over the subsystems in `keep`.
pub fn partial_trace(rho: &QuantumState, fact: &HilbertFactorization, keep: &BTreeSet<usize>) -> Result<QuantumState> {
    if rho.dim() != fact.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: fact.total_dim(),
            actual: rho.dim(),
        });
    }
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace needs a non-empty keep set".into(),
        ));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= fact.dims().len()) {
        return Err(Error::InvalidArgument(format!("subsystem {bad} out of range")));
    }
    let m = rho.to_density_matrix();
    let kept: Vec<usize> = keep.iter().copied().collect();
    let traced: Vec<usize> = (0..fact.dims().len()).filter(|i| !keep.contains(i)).collect();
    let kept_fact = HilbertFactorization::new(kept.iter().map(|&i| fact.dims()[i]).collect())?;
    let traced_dim: usize = traced.iter().map(|&i| fact.dims()[i]).product();
    let traced_fact = if traced.is_empty() {
        None
    } else {
        Some(HilbertFactorization::new(
            traced.iter().map(|&i| fact.dims()[i]).collect(),
        )?)
    };
    let n_out = kept_fact.total_dim();
    let full_index = |kept_digits: &[usize], traced_digits: &[usize]| {
        let mut digits = vec![0; fact.dims().len()];
        for (&i, &x) in kept.iter().zip(kept_digits) {
            digits[i] = x;
        }
        for (&i, &x) in traced.iter().zip(traced_digits) {
            digits[i] = x;
        }
        fact.flatten(&digits)
    };
    let mut out = ComplexMatrix::zeros(n_out, n_out);
    for r in 0..n_out {
        let rd = kept_fact.unflatten(r);
        for k in 0..n_out {
            let kd = kept_fact.unflatten(k);
            let mut acc = ZERO;
            for t in 0..traced_dim {
                let td = traced_fact.as_ref().map(|f| f.unflatten(t)).unwrap_or_default();
                acc += m[(full_index(&rd, &td), full_index(&kd, &td))];
            }
            out[(r, k)] = acc;
        }
    }
    Ok(QuantumState::Density(out))
}

/// `Tr[rho O]` for Hermitian `O`. Imaginary parts up to 1e-6 are treated as
/// round-off and dropped; anything larger is an error.
pub fn expectation(rho: &QuantumState, obs: &ComplexMatrix) -> Result<f64> {
    if obs.rows() != rho.dim() || obs.cols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: obs.rows(),
        });
    }
    let value: Complex64 = match rho {
        QuantumState::Pure(v) => {
            let ov = obs.matvec(v);
            v.iter().zip(&ov).map(|(a, b)| a.conj() * b).sum()
        }
        QuantumState::Density(m) => {
            let n = m.rows();
            let mut acc = ZERO;
            for r in 0..n {
                for k in 0..n {
                    acc += m[(r, k)] * obs[(k, r)];
                }
            }
            acc
        }
    };
    if value.im.abs() > 1e-6 {
        return Err(Error::ComplexExpectation(value.im));
    }
    Ok(value.re)
}

/// Square root of a positive semidefinite Hermitian matrix, clipping tiny
/// negative eigenvalues.
fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(m)?;
    Ok(eig.map_spectrum(|x| Complex64::new(x.max(0.0).sqrt(), 0.0)))
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(a) b sqrt(a)))^2`; `|<a|b>|^2` for pure
/// states.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let f = match (a, b) {
        (QuantumState::Pure(x), QuantumState::Pure(y)) => {
            let overlap: Complex64 = x.iter().zip(y).map(|(p, q)| p.conj() * q).sum();
            overlap.norm_sqr()
        }
        (QuantumState::Pure(x), QuantumState::Density(m)) | (QuantumState::Density(m), QuantumState::Pure(x)) => {
            let mx = m.matvec(x);
            x.iter().zip(&mx).map(|(p, q)| p.conj() * q).sum::<Complex64>().re
        }
        (QuantumState::Density(p), QuantumState::Density(q)) => {
            let sp = psd_sqrt(p)?;
            let inner = sp.matmul(q).matmul(&sp);
            let eig = eigh(&inner)?;
            let tr: f64 = eig.values.iter().map(|&x| x.max(0.0).sqrt()).sum();
            tr * tr
        }
    };
    Ok(f.clamp(0.0, 1.0))
}
