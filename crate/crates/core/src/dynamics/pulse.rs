use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::DynamicsError;

/// One flat segment of a flux pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plateau {
    /// Qubit frequency on the plateau [rad/s].
    pub omega: f64,
    /// Plateau duration t_p [s].
    pub duration: f64,
}

/// Piecewise-flat qubit frequency trajectory starting and ending at `omega_idle`,
/// joined by raised-cosine edges of length `rise_time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSchedule {
    pub omega_idle: f64,
    pub rise_time: f64,
    pub plateaus: Vec<Plateau>,
}

pub const DEFAULT_RISE_TIME: f64 = 2e-9;

impl PulseSchedule {
    pub fn square(omega_idle: f64, omega_plateau: f64, duration: f64) -> Self {
        Self::ladder(
            omega_idle,
            &[Plateau {
                omega: omega_plateau,
                duration,
            }],
        )
    }

    pub fn ladder(omega_idle: f64, plateaus: &[Plateau]) -> Self {
        Self {
            omega_idle,
            rise_time: DEFAULT_RISE_TIME,
            plateaus: plateaus.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.rise_time >= 0.0) {
            return Err(DynamicsError::InvalidParameter(format!(
                "rise time must be ≥ 0, got {}",
                self.rise_time
            )));
        }
        if self.plateaus.is_empty() {
            return Err(DynamicsError::InvalidParameter(
                "pulse has no plateau".into(),
            ));
        }
        if self
            .plateaus
            .iter()
            .any(|p| !(p.duration >= 0.0) || !p.omega.is_finite())
        {
            return Err(DynamicsError::InvalidParameter(
                "plateau durations must be ≥ 0 and frequencies finite".into(),
            ));
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.plateaus.iter().map(|p| p.duration).sum::<f64>()
            + (self.plateaus.len() + 1) as f64 * self.rise_time
    }

    /// Qubit frequency at `t`.
    pub fn frequency(&self, t: f64) -> Result<f64, DynamicsError> {
        let total = self.duration();
        if !(0.0..=total).contains(&t) {
            return Err(DynamicsError::OutsideSchedule { t, total });
        }
        Ok(self.frequency_unchecked(t))
    }

    pub(crate) fn frequency_unchecked(&self, t: f64) -> f64 {
        let mut from = self.omega_idle;
        let mut t0 = 0.0;
        for p in &self.plateaus {
            if t < t0 + self.rise_time {
                return edge(from, p.omega, (t - t0) / self.rise_time);
            }
            t0 += self.rise_time;
            if t <= t0 + p.duration {
                return p.omega;
            }
            t0 += p.duration;
            from = p.omega;
        }
        if self.rise_time > 0.0 && t < t0 + self.rise_time {
            return edge(from, self.omega_idle, (t - t0) / self.rise_time);
        }
        self.omega_idle
    }

    /// Largest |ω(t) − ω_ref| over `[a, b]`, exact for this piecewise-monotone shape.
    pub(crate) fn max_detuning(&self, omega_ref: f64, a: f64, b: f64) -> f64 {
        let mut m = (self.frequency_unchecked(a) - omega_ref)
            .abs()
            .max((self.frequency_unchecked(b) - omega_ref).abs());
        let mut t = 0.0;
        for p in &self.plateaus {
            t += self.rise_time;
            if t > a && t < b {
                m = m.max((p.omega - omega_ref).abs());
            }
            t += p.duration;
            if t > a && t < b {
                m = m.max((p.omega - omega_ref).abs());
            }
        }
        m
    }
}

fn edge(from: f64, to: f64, x: f64) -> f64 {
    from + (to - from) * 0.5 * (1.0 - (PI * x).cos())
}
