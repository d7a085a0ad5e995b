//! Pulse schedules: the physical control sequence applied to the device.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest drive amplitude, as a fraction of `|delta|`, for which the two
/// lowest resonator levels are treated as isolated.
pub const MAX_DRIVE_RATIO: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Envelope {
    Square,
    /// `sin^2(pi t / tau)`, which has half the area of a square pulse of the
    /// same peak.
    Hann,
}

impl Envelope {
    /// Pulse area per unit of peak amplitude and duration.
    pub fn area_factor(self) -> f64 {
        match self {
            Envelope::Square => 1.0,
            Envelope::Hann => 0.5,
        }
    }

    /// Number of piecewise-constant slices used to integrate the envelope.
    pub fn slices(self) -> usize {
        match self {
            Envelope::Square => 1,
            Envelope::Hann => HANN_SLICES,
        }
    }

    /// Envelope value at the midpoint of slice `m`.
    pub fn sample(self, m: usize) -> f64 {
        match self {
            Envelope::Square => 1.0,
            Envelope::Hann => {
                let x = std::f64::consts::PI * (m as f64 + 0.5) / HANN_SLICES as f64;
                x.sin().powi(2)
            }
        }
    }
}

pub const HANN_SLICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    /// Resonant drive of one resonator: `(A(t)/2)(e^{i phase} b+ + h.c.)` in
    /// the frame rotating at `carrier`, with the carrier following the
    /// drive-induced level shift. `amplitude` is the peak of `A(t)`.
    Drive {
        qubit: usize,
        amplitude: f64,
        carrier: f64,
        phase: f64,
        duration: f64,
        envelope: Envelope,
    },
    /// Both resonators tuned to `frequency` for `duration`.
    Exchange {
        duration: f64,
        frequency: f64,
    },
    Idle {
        duration: f64,
    },
    /// Frame update `exp(i angle n_q)`; takes no time.
    VirtualZ {
        qubit: usize,
        angle: f64,
    },
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match *self {
            Segment::Drive { duration, .. } | Segment::Exchange { duration, .. } | Segment::Idle { duration } => {
                duration
            }
            Segment::VirtualZ { .. } => 0.0,
        }
    }

    /// `integral A(t) dt` for drives, the rotation angle under the area
    /// theorem.
    pub fn area(&self) -> Option<f64> {
        match *self {
            Segment::Drive {
                amplitude,
                duration,
                envelope,
                ..
            } => Some(amplitude * duration * envelope.area_factor()),
            _ => None,
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Drive {
                qubit,
                amplitude,
                phase,
                duration,
                envelope,
                ..
            } => write!(
                f,
                "drive q{qubit} {envelope:?} A/2pi={:.4} MHz phase={phase:.4} {:.4} us",
                amplitude / std::f64::consts::TAU / 1e6,
                duration * 1e6
            ),
            Segment::Exchange { duration, frequency } => write!(
                f,
                "exchange at {:.4} MHz for {:.4} us",
                frequency / std::f64::consts::TAU / 1e6,
                duration * 1e6
            ),
            Segment::Idle { duration } => write!(f, "idle {:.4} us", duration * 1e6),
            Segment::VirtualZ { qubit, angle } => write!(f, "vz q{qubit} {angle:.6}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub segments: Vec<Segment>,
}

impl PulseSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, s: Segment) {
        self.segments.push(s);
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn drives(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| matches!(s, Segment::Drive { .. }))
    }

    pub fn exchanges(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| matches!(s, Segment::Exchange { .. }))
    }

    /// Checks durations and the two-level isolation bound
    /// `amplitude < 0.2 |anharm|`.
    pub fn validate(&self, anharm: f64) -> Result<()> {
        for s in &self.segments {
            let d = s.duration();
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::InvalidArgument(format!("segment duration {d} in `{s}`")));
            }
            match *s {
                Segment::Drive { qubit, amplitude, .. } if qubit > 1 || !amplitude.is_finite() => {
                    return Err(Error::InvalidArgument(format!("invalid drive `{s}`")));
                }
                Segment::Drive { amplitude, .. } => {
                    let ratio = amplitude.abs() / anharm.abs();
                    if ratio >= MAX_DRIVE_RATIO {
                        return Err(Error::InvalidArgument(format!(
                            "drive amplitude is {ratio:.3} |anharm|, above the two-level limit {MAX_DRIVE_RATIO}"
                        )));
                    }
                }
                Segment::VirtualZ { qubit, angle } if qubit > 1 || !angle.is_finite() => {
                    return Err(Error::InvalidArgument(format!("invalid frame update `{s}`")));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for PulseSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.segments {
            writeln!(f, "{s}")?;
        }
        write!(f, "total {:.4} us", self.duration() * 1e6)
    }
}
