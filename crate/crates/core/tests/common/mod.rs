//! Reference implementations that share no code with the library: a cyclic
//! Jacobi eigensolver, matrix exponentials built from it, and the spin-1
//! model in its native three-level form.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64;

/// Dense row-major real matrix.
pub type Real = Vec<Vec<f64>>;
/// Dense row-major complex matrix.
pub type Cplx = Vec<Vec<Complex64>>;

/// Eigenvalues and column eigenvectors of a real symmetric matrix by cyclic
/// Jacobi rotations.
pub fn jacobi(a: &Real) -> (Vec<f64>, Real) {
    let n = a.len();
    let mut a = a.clone();
    let mut v: Real = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Eigenpairs of a complex Hermitian matrix through the real symmetric
/// embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `h` twice.
/// One complex vector per eigenvalue pair is kept by Gram-Schmidt.
pub fn hermitian_eigen(h: &Cplx) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = h.len();
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = h[i][j].re;
            m[i + n][j + n] = h[i][j].re;
            m[i][j + n] = -h[i][j].im;
            m[i + n][j] = h[i][j].im;
        }
    }
    let (vals, vecs) = jacobi(&m);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut out_vals = Vec::new();
    let mut out_vecs: Vec<Vec<Complex64>> = Vec::new();
    for k in order {
        let mut x: Vec<Complex64> = (0..n).map(|i| Complex64::new(vecs[i][k], vecs[i + n][k])).collect();
        for u in &out_vecs {
            let ov: Complex64 = u.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
            for (xi, ui) in x.iter_mut().zip(u) {
                *xi -= ov * ui;
            }
        }
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.5 {
            out_vals.push(vals[k]);
            out_vecs.push(x.into_iter().map(|z| z / norm).collect());
        }
        if out_vecs.len() == n {
            break;
        }
    }
    (out_vals, out_vecs)
}

/// `exp(-i h t)` from the Jacobi eigenpairs.
pub fn expm_i(h: &Cplx, t: f64) -> Cplx {
    let n = h.len();
    let (vals, vecs) = hermitian_eigen(h);
    let mut u = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (lam, v) in vals.iter().zip(&vecs) {
        let ph = Complex64::from_polar(1.0, -lam * t);
        for i in 0..n {
            for j in 0..n {
                u[i][j] += ph * v[i] * v[j].conj();
            }
        }
    }
    u
}

pub fn matmul(a: &Cplx, b: &Cplx) -> Cplx {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn kron(a: &Cplx, b: &Cplx) -> Cplx {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn pauli(axis: char) -> Cplx {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match axis {
        'I' => vec![vec![o, z], vec![z, o]],
        'X' => vec![vec![z, o], vec![o, z]],
        'Y' => vec![vec![z, -i], vec![i, z]],
        'Z' => vec![vec![o, z], vec![z, -o]],
        _ => panic!("unknown Pauli {axis}"),
    }
}

/// Pauli string on `n` qubits, qubit 0 leftmost: `ops` lists `(qubit, axis)`.
pub fn pauli_string(n: usize, ops: &[(usize, char)]) -> Cplx {
    let mut m = vec![vec![Complex64::new(1.0, 0.0)]];
    for q in 0..n {
        let axis = ops.iter().find(|(k, _)| *k == q).map(|(_, a)| *a).unwrap_or('I');
        m = kron(&m, &pauli(axis));
    }
    m
}

/// `max |a - e^{i phi} b|` with the phase taken from `Tr(b† a)`.
pub fn phase_distance(a: &Cplx, b: &Cplx) -> f64 {
    let n = a.len();
    let tr: Complex64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| b[i][j].conj() * a[i][j])
        .sum();
    let ph = if tr.norm() > 0.0 {
        tr / tr.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (a[i][j] - ph * b[i][j]).norm())
        .fold(0.0, f64::max)
}

/// `<S_z>(t)` of the spin-1 Hamiltonian `D Sz^2 + E (Sx^2 - Sy^2)` from
/// `m = +1`, in the basis `(|+1>, |0>, |-1>)` where it reads
/// `[[D, 0, E], [0, 0, 0], [E, 0, D]]`.
pub fn spin1_sz(d: f64, e: f64, t: f64) -> f64 {
    let h = vec![vec![d, 0.0, e], vec![0.0, 0.0, 0.0], vec![e, 0.0, d]];
    let (vals, v) = jacobi(&h);
    let psi: Vec<Complex64> = (0..3)
        .map(|i| {
            (0..3)
                .map(|k| Complex64::from_polar(v[i][k] * v[0][k], -vals[k] * t))
                .sum()
        })
        .collect();
    psi[0].norm_sqr() - psi[2].norm_sqr()
}

/// Seeded generator for test inputs.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}
