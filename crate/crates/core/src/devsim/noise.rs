//! Dissipator in the frame of the idle dressed energies.
//!
//! With `rho_I = exp(iEt) rho exp(-iEt)` each collapse operator becomes a
//! sum of elements `L_kl exp(i (E_k - E_l) t) |k><l|`. Elements are grouped
//! into channels by frequency; cross terms between channels whose
//! frequencies differ by more than [`CHANNEL_GAP`] oscillate much faster
//! than any decay and are dropped, while elements inside a channel keep
//! their exact relative phases.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::qcore::matrix::{c, ComplexMatrix, ZERO};

use super::hamiltonian::DressedBasis;
use super::lindblad::CollapseOperator;

/// Frequency separation (rad/s) above which two elements belong to
/// different channels.
pub const CHANNEL_GAP: f64 = TAU * 1e6;
/// Elements smaller than this fraction of the operator's largest element
/// are dropped. They stem from dressing of order `g/Delta`.
pub const ELEMENT_FLOOR: f64 = 1e-2;
/// Largest phase excursion inside a channel per RK4 step.
const MAX_PHASE_PER_STEP: f64 = 0.5;
const MAX_DECAY_PER_STEP: f64 = 0.02;

#[derive(Debug, Clone)]
struct Element {
    row: usize,
    col: usize,
    amp: Complex64,
    freq: f64,
}

#[derive(Debug, Clone)]
struct Channel {
    rate: f64,
    elements: Vec<Element>,
}

#[derive(Debug, Clone, Default)]
pub struct FrameNoise {
    dim: usize,
    channels: Vec<Channel>,
    /// `sum rate |L|^2` over channels, bounding the decay per unit time.
    strength: f64,
    max_spread: f64,
}

impl FrameNoise {
    pub fn new(collapse: &[CollapseOperator], idle: &DressedBasis) -> Self {
        let dim = idle.energies.len();
        let mut channels = Vec::new();
        let mut strength = 0.0;
        let mut max_spread: f64 = 0.0;
        for l in collapse.iter().filter(|l| l.rate > 0.0) {
            let d = idle.to_dressed(&l.op);
            let floor = ELEMENT_FLOOR * d.max_abs();
            let mut elems: Vec<Element> = Vec::new();
            for row in 0..dim {
                for col in 0..dim {
                    let amp = d[(row, col)];
                    if amp.norm() > floor {
                        let freq = idle.energies[row] - idle.energies[col];
                        elems.push(Element { row, col, amp, freq });
                    }
                }
            }
            elems.sort_by(|a, b| a.freq.total_cmp(&b.freq));
            let mut groups: Vec<Vec<Element>> = Vec::new();
            for e in elems {
                match groups.last_mut() {
                    Some(g) if e.freq - g.last().unwrap().freq <= CHANNEL_GAP => g.push(e),
                    _ => groups.push(vec![e]),
                }
            }
            for g in groups {
                let spread = g.last().unwrap().freq - g[0].freq;
                max_spread = max_spread.max(spread);
                strength += l.rate * g.iter().map(|e| e.amp.norm_sqr()).sum::<f64>();
                channels.push(Channel {
                    rate: l.rate,
                    elements: g,
                });
            }
        }
        Self {
            dim,
            channels,
            strength,
            max_spread,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    fn derivative(&self, rho: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n, n);
        let mut lr = ComplexMatrix::zeros(n, n);
        let mut nr = ComplexMatrix::zeros(n, n);
        for ch in &self.channels {
            let m: Vec<Complex64> = ch
                .elements
                .iter()
                .map(|e| e.amp * Complex64::from_polar(1.0, e.freq * t))
                .collect();
            lr.as_mut_slice().fill(ZERO);
            nr.as_mut_slice().fill(ZERO);
            // lr = L rho
            for (e, &me) in ch.elements.iter().zip(&m) {
                for k in 0..n {
                    lr[(e.row, k)] += me * rho[(e.col, k)];
                }
            }
            // out += rate L rho L†
            for (e, &me) in ch.elements.iter().zip(&m) {
                let w = c(ch.rate, 0.0) * me.conj();
                for r in 0..n {
                    out[(r, e.row)] += w * lr[(r, e.col)];
                }
            }
            // nr = L†L rho, using (L†L)_{b b'} = sum_a conj(L_ab) L_ab'
            for (e1, &m1) in ch.elements.iter().zip(&m) {
                for (e2, &m2) in ch.elements.iter().zip(&m) {
                    if e1.row != e2.row {
                        continue;
                    }
                    let w = m1.conj() * m2;
                    for k in 0..n {
                        nr[(e1.col, k)] += w * rho[(e2.col, k)];
                    }
                }
            }
            let half = c(-0.5 * ch.rate, 0.0);
            for r in 0..n {
                for k in 0..n {
                    out[(r, k)] += half * (nr[(r, k)] + nr[(k, r)].conj());
                }
            }
        }
        out
    }

    /// Evolves `rho` under the dissipator alone from `t0` to `t0 + h`.
    pub fn apply(&self, rho: &ComplexMatrix, t0: f64, h: f64) -> ComplexMatrix {
        if self.is_empty() || h <= 0.0 {
            return rho.clone();
        }
        let steps = (h * self.max_spread / MAX_PHASE_PER_STEP)
            .max(h * self.strength / MAX_DECAY_PER_STEP)
            .ceil()
            .max(1.0) as usize;
        let dt = h / steps as f64;
        let mut rho = rho.clone();
        for s in 0..steps {
            let t = t0 + s as f64 * dt;
            let k1 = self.derivative(&rho, t);
            let mut tmp = rho.clone();
            tmp.axpy(c(0.5 * dt, 0.0), &k1);
            let k2 = self.derivative(&tmp, t + 0.5 * dt);
            let mut tmp = rho.clone();
            tmp.axpy(c(0.5 * dt, 0.0), &k2);
            let k3 = self.derivative(&tmp, t + 0.5 * dt);
            let mut tmp = rho.clone();
            tmp.axpy(c(dt, 0.0), &k3);
            let k4 = self.derivative(&tmp, t + dt);
            rho.axpy(c(dt / 6.0, 0.0), &k1);
            rho.axpy(c(dt / 3.0, 0.0), &k2);
            rho.axpy(c(dt / 3.0, 0.0), &k3);
            rho.axpy(c(dt / 6.0, 0.0), &k4);
        }
        rho
    }
}
