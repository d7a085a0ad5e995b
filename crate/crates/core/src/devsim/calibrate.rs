//! Calibration of the transmon-mediated exchange between the resonators.
//!
//! Both resonators are tuned to a common frequency `w_x`; the transmon,
//! detuned by `Delta = Omega - w_x`, is only virtually excited and mediates
//! an effective `J (sigma+ sigma- + h.c.)` coupling in the single-excitation
//! manifold. `J` is first read off the spectrum and then refined from the
//! simulated `|10> -> |01>` transfer.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::qcore::linalg::{eigh, HermitianEigen};

use super::hamiltonian::{device_hamiltonian_at, DeviceSpace, DressedBasis};
use super::spec::DeviceSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeCalibration {
    /// Common resonator frequency during exchange.
    pub frequency: f64,
    /// Dispersive estimate `g^2 (1/Delta_1 + 1/Delta_2) / 2`.
    pub j_seed: f64,
    /// Exchange rate from the dressed spectrum, signed.
    pub j_spectral: f64,
    /// Exchange rate `pi / (4 t_sqiswap)` from the simulated transfer,
    /// carrying the sign of `j_spectral`.
    pub j: f64,
    /// First time at which half of `|10>` has moved to `|01>`.
    pub t_sqiswap: f64,
    /// Single-excitation frequency of the tuned pair, relative to the
    /// dressed ground state.
    pub e_x: f64,
    /// `E_11 - 2 e_x - E_00` during exchange: the conditional-phase rate.
    pub kappa: f64,
}

/// Exchange Hamiltonian expressed in the idle dressed basis, with its
/// eigendecomposition.
pub(crate) fn exchange_eigen(spec: &DeviceSpec, idle: &DressedBasis, frequency: f64) -> Result<HermitianEigen> {
    let hx = idle.to_dressed(&device_hamiltonian_at(spec, [frequency, frequency]));
    eigh(&hx)
}

fn dominant(eig: &HermitianEigen, k: usize) -> usize {
    (0..eig.values.len())
        .max_by(|&a, &b| {
            eig.vectors[(k, a)]
                .norm_sqr()
                .total_cmp(&eig.vectors[(k, b)].norm_sqr())
        })
        .expect("non-empty spectrum")
}

/// Exchange calibration with the resonators tuned to the midpoint of their
/// idle frequencies.
pub fn calibrate_exchange(spec: &DeviceSpec) -> Result<ExchangeCalibration> {
    spec.validate()?;
    let idle = DressedBasis::new(&device_hamiltonian_at(spec, spec.omega))?;
    calibrate_exchange_at(spec, &idle, 0.5 * (spec.omega[0] + spec.omega[1]))
}

pub(crate) fn calibrate_exchange_at(
    spec: &DeviceSpec,
    idle: &DressedBasis,
    frequency: f64,
) -> Result<ExchangeCalibration> {
    let space = DeviceSpace::new(spec.n_fock);
    let delta = spec.big_omega - frequency;
    let j_seed = spec.g * spec.g / delta;
    let eig = exchange_eigen(spec, idle, frequency)?;

    let k10 = space.computational(1, 0);
    let k01 = space.computational(0, 1);
    let weight = |col: usize| eig.vectors[(k10, col)].norm_sqr() + eig.vectors[(k01, col)].norm_sqr();
    let mut cols: Vec<usize> = (0..eig.values.len()).collect();
    cols.sort_by(|&a, &b| weight(b).total_cmp(&weight(a)));
    let heff = |r: usize, k: usize| {
        cols[..2]
            .iter()
            .map(|&col| eig.vectors[(r, col)] * eig.values[col] * eig.vectors[(k, col)].conj())
            .sum::<num_complex::Complex64>()
    };
    let j_spectral = heff(k10, k01).re;
    let e00 = eig.values[dominant(&eig, space.computational(0, 0))];
    let e_x = 0.5 * (heff(k10, k10).re + heff(k01, k01).re) - e00;
    let kappa = eig.values[dominant(&eig, space.computational(1, 1))] - e00 - 2.0 * e_x;
    if j_spectral == 0.0 {
        return Err(Error::Calibration("no exchange coupling in the spectrum".into()));
    }

    let t_sqiswap = half_transfer_time(&eig, k10, k01, FRAC_PI_4 / j_spectral.abs())?;
    Ok(ExchangeCalibration {
        frequency,
        j_seed,
        j_spectral,
        j: FRAC_PI_4 / t_sqiswap * j_spectral.signum(),
        t_sqiswap,
        e_x,
        kappa,
    })
}

/// `|<to| exp(-i H t) |from>|^2`.
pub(crate) fn transfer_probability(eig: &HermitianEigen, from: usize, to: usize, t: f64) -> f64 {
    let amp: num_complex::Complex64 = (0..eig.values.len())
        .map(|k| {
            eig.vectors[(to, k)]
                * num_complex::Complex64::from_polar(1.0, -eig.values[k] * t)
                * eig.vectors[(from, k)].conj()
        })
        .sum();
    amp.norm_sqr()
}

/// First crossing of 50% transfer, bracketed on a grid around `guess` and
/// refined by bisection.
fn half_transfer_time(eig: &HermitianEigen, from: usize, to: usize, guess: f64) -> Result<f64> {
    let p = |t: f64| transfer_probability(eig, from, to, t) - 0.5;
    let dt = guess / 16.0;
    let mut lo = 0.0;
    let mut hi = None;
    for step in 1..=64 {
        let t = step as f64 * dt;
        if p(t) >= 0.0 {
            hi = Some(t);
            break;
        }
        lo = t;
    }
    let mut hi = hi.ok_or_else(|| {
        Error::Calibration(format!(
            "no |10> -> |01> oscillation within {:.3e} s; coupling not dispersive or truncation too small",
            64.0 * dt
        ))
    })?;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if p(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Populations of the four computational states at time `t` of undriven
/// exchange, starting from computational state `from` (`|q0 q1>` index).
pub fn exchange_populations(spec: &DeviceSpec, cal: &ExchangeCalibration, from: usize, t: f64) -> Result<[f64; 4]> {
    let idle = DressedBasis::new(&device_hamiltonian_at(spec, spec.omega))?;
    let eig = exchange_eigen(spec, &idle, cal.frequency)?;
    let comp = DeviceSpace::new(spec.n_fock).computational_indices();
    let mut out = [0.0; 4];
    for (o, &k) in out.iter_mut().zip(&comp) {
        *o = transfer_probability(&eig, comp[from], k, t);
    }
    Ok(out)
}
