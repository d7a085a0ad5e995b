//! Static Hamiltonian of the unit and its dressed eigenbasis.
//!
//! The space is `NR1 (x) transmon (x) NR2` with the transmon ground state
//! first and `sigma_z = diag(-1, +1)`:
//!
//! ```text
//! H = sum_i [w_i n_i + (delta/2) n_i (n_i - 1)] + (Omega/2) sigma_z
//!     + g sum_i (b_i + b_i†) sigma_x
//! ```

use crate::error::Result;
use crate::qcore::linalg::eigh;
use crate::qcore::matrix::{c, ComplexMatrix};
use crate::qcore::ops::{annihilation, embed_site, pauli_x};

use super::spec::DeviceSpec;

/// A basis label: resonator 1 level, transmon level (0 = ground), resonator
/// 2 level.
pub type Label = (usize, usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeviceSpace {
    pub n_fock: usize,
}

impl DeviceSpace {
    pub fn new(n_fock: usize) -> Self {
        Self { n_fock }
    }

    pub fn dim(&self) -> usize {
        2 * self.n_fock * self.n_fock
    }

    fn dims(&self) -> [usize; 3] {
        [self.n_fock, 2, self.n_fock]
    }

    pub fn index(&self, (n1, t, n2): Label) -> usize {
        (n1 * 2 + t) * self.n_fock + n2
    }

    pub fn label(&self, k: usize) -> Label {
        let nf = self.n_fock;
        (k / (2 * nf), (k / nf) % 2, k % nf)
    }

    /// Level of resonator `i` in basis state `k`.
    pub fn level(&self, k: usize, i: usize) -> usize {
        let (n1, _, n2) = self.label(k);
        if i == 0 {
            n1
        } else {
            n2
        }
    }

    /// The label of `k` with resonator `i` set to `level`.
    pub fn with_level(&self, k: usize, i: usize, level: usize) -> usize {
        let (n1, t, n2) = self.label(k);
        if i == 0 {
            self.index((level, t, n2))
        } else {
            self.index((n1, t, level))
        }
    }

    /// Index of the computational state `|q0 q1>` (transmon in ground).
    pub fn computational(&self, q0: usize, q1: usize) -> usize {
        self.index((q0, 0, q1))
    }

    /// The four computational indices in `|00>, |01>, |10>, |11>` order.
    pub fn computational_indices(&self) -> [usize; 4] {
        [
            self.computational(0, 0),
            self.computational(0, 1),
            self.computational(1, 0),
            self.computational(1, 1),
        ]
    }

    /// Annihilation operator of resonator `i`.
    pub fn b(&self, i: usize) -> ComplexMatrix {
        embed_site(&annihilation(self.n_fock), 2 * i, &self.dims())
    }

    pub fn number(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&(0..self.dim()).map(|k| self.level(k, i) as f64).collect::<Vec<_>>())
    }

    pub fn sigma_z(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(
            &(0..self.dim())
                .map(|k| if self.label(k).1 == 0 { -1.0 } else { 1.0 })
                .collect::<Vec<_>>(),
        )
    }

    pub fn sigma_x(&self) -> ComplexMatrix {
        embed_site(&pauli_x(), 1, &self.dims())
    }

    /// `|g><e|` on the transmon.
    pub fn sigma_minus(&self) -> ComplexMatrix {
        let mut sm = ComplexMatrix::zeros(2, 2);
        sm[(0, 1)] = c(1.0, 0.0);
        embed_site(&sm, 1, &self.dims())
    }
}

/// The device Hamiltonian with resonator frequencies `omega` in place of
/// the spec's idle values.
pub fn device_hamiltonian_at(spec: &DeviceSpec, omega: [f64; 2]) -> ComplexMatrix {
    let space = DeviceSpace::new(spec.n_fock);
    let dim = space.dim();
    let mut diag = vec![0.0; dim];
    for (k, d) in diag.iter_mut().enumerate() {
        let (n1, t, n2) = space.label(k);
        for (n, w) in [(n1, omega[0]), (n2, omega[1])] {
            let n = n as f64;
            *d += w * n + 0.5 * spec.anharm * n * (n - 1.0);
        }
        *d += 0.5 * spec.big_omega * if t == 0 { -1.0 } else { 1.0 };
    }
    let mut h = ComplexMatrix::from_real_diag(&diag);
    let sx = space.sigma_x();
    for i in 0..2 {
        let b = space.b(i);
        let x = &b + &b.adjoint();
        h += &x.matmul(&sx).scale_real(spec.g);
    }
    h
}

/// Static part of the device Hamiltonian at the idle resonator frequencies.
pub fn build_device_hamiltonian(spec: &DeviceSpec) -> ComplexMatrix {
    device_hamiltonian_at(spec, spec.omega)
}

/// Eigenbasis of a device Hamiltonian, with each eigenvector assigned to
/// the bare label it overlaps most.
///
/// Column `k` of `vectors` is the dressed state continuously connected to
/// bare state `k`, phased so that its `k`-th component is real and
/// positive; `energies[k]` is its eigenvalue.
#[derive(Debug, Clone)]
pub struct DressedBasis {
    pub energies: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl DressedBasis {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        let eig = eigh(h)?;
        let n = eig.values.len();
        let overlap = |r: usize, k: usize| eig.vectors[(r, k)].norm_sqr();
        let mut rows: Vec<usize> = (0..n).collect();
        let best = |r: usize| (0..n).map(|k| overlap(r, k)).fold(0.0, f64::max);
        rows.sort_by(|&a, &b| best(b).total_cmp(&best(a)));
        let mut assigned = vec![usize::MAX; n];
        let mut used = vec![false; n];
        for r in rows {
            let k = (0..n)
                .filter(|&k| !used[k])
                .max_by(|&a, &b| overlap(r, a).total_cmp(&overlap(r, b)))
                .expect("one column per row");
            used[k] = true;
            assigned[r] = k;
        }
        let mut vectors = ComplexMatrix::zeros(n, n);
        let mut energies = vec![0.0; n];
        for (r, &k) in assigned.iter().enumerate() {
            let z = eig.vectors[(r, k)];
            let phase = if z.norm() > 0.0 {
                z.conj() / z.norm()
            } else {
                c(1.0, 0.0)
            };
            for row in 0..n {
                vectors[(row, r)] = eig.vectors[(row, k)] * phase;
            }
            energies[r] = eig.values[k];
        }
        Ok(Self { energies, vectors })
    }

    /// `V† A V`: an operator in the dressed basis.
    pub fn to_dressed(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.vectors.adjoint().matmul(a).matmul(&self.vectors)
    }

    /// Smallest diagonal overlap `|<k|k~>|^2`; close to 1 in the dispersive
    /// regime.
    pub fn min_overlap(&self) -> f64 {
        (0..self.energies.len())
            .map(|k| self.vectors[(k, k)].norm_sqr())
            .fold(1.0, f64::min)
    }
}
