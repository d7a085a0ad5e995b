//! Hermitian eigendecomposition and matrix exponentials.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::{c, ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Eigen-pairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let n = self.vectors.rows();
        (0..n).map(|r| self.vectors[(r, k)]).collect()
    }

    /// Reassembles `V f(Λ) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<Complex64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for k in 0..n {
                let mut acc = ZERO;
                for (j, &f) in fv.iter().enumerate() {
                    acc += v[(r, j)] * f * v[(k, j)].conj();
                }
                out[(r, k)] = acc;
            }
        }
        out
    }
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn from_nalgebra(m: &DMatrix<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |r, k| m[(r, k)])
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized
/// before decomposition, so entries below the Hermiticity tolerance of the
/// caller are irrelevant.
pub fn eigh(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = h.require_square()?;
    let sym = to_nalgebra(&h.hermitian_part());
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NonConvergence(format!("Hermitian eigensolver ({n}x{n})")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = from_nalgebra(&eig.eigenvectors);
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| vecs[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// `exp(scale * h)` for Hermitian `h`, through its eigendecomposition.
pub fn expm_hermitian(h: &ComplexMatrix, scale: Complex64) -> Result<ComplexMatrix> {
    let dev = h.hermiticity_deviation();
    if dev > 1e-10 {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let eig = eigh(h)?;
    Ok(eig.map_spectrum(|x| (scale * x).exp()))
}

/// `exp(-i h t)`, the propagator of a time-independent Hamiltonian.
pub fn propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    expm_hermitian(h, c(0.0, -t))
}

/// `exp(scale * a)` for a general square matrix.
///
/// Hermitian inputs take the eigendecomposition path; everything else
/// (Liouvillians, non-normal generators) goes through scaling and squaring
/// with a degree-13 Padé approximant.
pub fn expm(a: &ComplexMatrix, scale: Complex64) -> Result<ComplexMatrix> {
    a.require_square()?;
    if a.hermiticity_deviation() <= 1e-12 {
        return expm_hermitian(a, scale);
    }
    expm_pade(&a.scale(scale))
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Padé-13 1-norm bound for which no scaling is needed.
const THETA13: f64 = 5.371920351148152;

/// Scaling-and-squaring Padé(13,13) exponential of `a`.
pub fn expm_pade(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square()?;
    let norm = a.one_norm();
    if !norm.is_finite() {
        return Err(Error::NonConvergence("matrix exponential of non-finite input".into()));
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    if squarings > 1000 {
        return Err(Error::NonConvergence(format!("expm scaling needs 2^{squarings}")));
    }
    let a = a.scale_real(0.5f64.powi(squarings));
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = &PADE13;
    let lin = |m: &[(&ComplexMatrix, f64)]| {
        let mut out = ComplexMatrix::zeros(n, n);
        for (x, s) in m {
            out.axpy(c(*s, 0.0), x);
        }
        out
    };
    let u_inner = lin(&[(&a6, b[13]), (&a4, b[11]), (&a2, b[9])]);
    let u_tail = lin(&[(&a6, b[7]), (&a4, b[5]), (&a2, b[3]), (&id, b[1])]);
    let u = a.matmul(&(&a6.matmul(&u_inner) + &u_tail));
    let v_inner = lin(&[(&a6, b[12]), (&a4, b[10]), (&a2, b[8])]);
    let v_tail = lin(&[(&a6, b[6]), (&a4, b[4]), (&a2, b[2]), (&id, b[0])]);
    let v = &a6.matmul(&v_inner) + &v_tail;

    let p = &v + &u;
    let q = &v - &u;
    let lu = to_nalgebra(&q).lu();
    let mut r = from_nalgebra(
        &lu.solve(&to_nalgebra(&p))
            .ok_or_else(|| Error::NonConvergence("singular Padé denominator".into()))?,
    );
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    Ok(r)
}

/// In-place `D rho D†` with `D = exp(-i diag(energies) t)`.
pub fn rotate_diagonal(rho: &mut ComplexMatrix, energies: &[f64], t: f64) {
    let n = energies.len();
    let phases: Vec<Complex64> = energies.iter().map(|&e| c(0.0, -e * t).exp()).collect();
    for r in 0..n {
        for k in 0..n {
            let z = rho[(r, k)];
            rho[(r, k)] = z * phases[r] * phases[k].conj();
        }
    }
}

/// Identity check helper used by the unit tests and by validation code.
pub fn identity_distance(u: &ComplexMatrix) -> f64 {
    u.max_abs_diff(&ComplexMatrix::identity(u.rows()))
}

/// Eigenphases in `(-pi, pi]` of a unitary matrix.
///
/// A unitary is normal, so a generic real combination of its Hermitian and
/// anti-Hermitian parts shares its eigenvectors; the phases are then read
/// off as Rayleigh quotients.
pub fn unitary_eigenphases(u: &ComplexMatrix) -> Result<Vec<f64>> {
    u.require_square()?;
    let ud = u.adjoint();
    let re = (u + &ud).scale_real(0.5);
    let im = (u - &ud).scale(c(0.0, -0.5));
    let mix = &re + &im.scale_real(0.577_215_664_901_532_9);
    let eig = eigh(&mix)?;
    Ok((0..u.rows())
        .map(|k| {
            let v = eig.vector(k);
            let uv = u.matvec(&v);
            let q: Complex64 = v.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum();
            q.arg()
        })
        .collect())
}

/// `min_phi || a - e^{i phi} b ||` in operator norm, for unitaries `a`, `b`.
///
/// With `W = b† a` the distance is the chord from `e^{i phi}` to the farthest
/// eigenvalue of `W`; the optimal `phi` bisects the shortest arc that holds
/// all eigenphases, giving `2 sin(arc / 4)`.
pub fn phase_invariant_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: b.rows(),
        });
    }
    let w = b.adjoint().matmul(a);
    let mut phases: Vec<f64> = unitary_eigenphases(&w)?
        .into_iter()
        .map(|p| p.rem_euclid(std::f64::consts::TAU))
        .collect();
    phases.sort_by(f64::total_cmp);
    let n = phases.len();
    let mut widest_gap = phases[0] + std::f64::consts::TAU - phases[n - 1];
    for k in 1..n {
        widest_gap = widest_gap.max(phases[k] - phases[k - 1]);
    }
    let arc = (std::f64::consts::TAU - widest_gap).max(0.0);
    Ok(2.0 * (arc / 4.0).sin())
}
