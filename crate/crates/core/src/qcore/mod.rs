//! Dense complex linear algebra and quantum-state primitives.

pub mod linalg;
pub mod matrix;
pub mod ops;
pub mod state;

pub use linalg::{eigh, expm, expm_hermitian, expm_pade, phase_invariant_distance, propagator, HermitianEigen};
pub use matrix::{c, ComplexMatrix};
pub use ops::{kron, kron_all};
pub use state::{expectation, fidelity, partial_trace, HilbertFactorization, QuantumState};
