//! Transmon coupled to a lossy dissipator mode: closed-form Purcell rate and
//! Lindblad time evolution under a flux pulse.
//!
//! Frame rotating at ω_d for both the transmon and the mode, so
//! `H/ħ = Δ(t)·b†b + (α/2)·b†b†bb + g(b†a + b a†)` with `Δ = ω_q − ω_d`.

mod evolve;
mod model;
mod pulse;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::readout::bose_occupation;

pub use evolve::{
    default_step, evolve_lindblad, EvolveOptions, Trajectory, TrajectoryPoint, MAX_STEP,
    POSITIVITY_TOL,
};
pub use model::{build_hamiltonian, DensityMatrix, LindbladModel, SparseOp, CUTOFF_GUARD};
pub use pulse::{Plateau, PulseSchedule};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("t = {t:e} s lies outside the schedule [0, {total:e}] s")]
    OutsideSchedule { t: f64, total: f64 },
    #[error(
        "density matrix lost positivity (min eigenvalue {min_eig:e} at t = {t:e} s); \
         reduce the step below {step:e} s"
    )]
    StepTooLarge { t: f64, min_eig: f64, step: f64 },
    #[error("Fock cutoff {cutoff} too small: top level holds {population:e} (> {CUTOFF_GUARD:e})")]
    CutoffTooSmall { cutoff: usize, population: f64 },
}

/// Physical parameters of one transmon and its dissipator. Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub omega_q_max: f64,
    /// Transmon anharmonicity, negative.
    pub anharmonicity: f64,
    pub g: f64,
    pub omega_d: f64,
    pub kappa_d: f64,
    /// Intrinsic relaxation time [s]; `None` disables it.
    pub t1_int: Option<f64>,
    /// Effective dissipator bath temperature [K].
    pub t_bath: f64,
    pub qubit_levels: usize,
    pub fock_cutoff: usize,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            omega_q_max: TAU * 4.86e9,
            anharmonicity: -TAU * 220e6,
            g: TAU * 10e6,
            omega_d: TAU * 4.37e9,
            kappa_d: TAU * 15e6,
            t1_int: Some(35e-6),
            t_bath: 0.049,
            qubit_levels: 2,
            fock_cutoff: 5,
        }
    }
}

impl SystemParams {
    /// Three-level transmon with the larger Fock cutoff used for |f⟩ protocols.
    pub fn three_level(self) -> Self {
        Self {
            qubit_levels: 3,
            fock_cutoff: self.fock_cutoff.max(7),
            ..self
        }
    }

    pub fn n_th(&self) -> f64 {
        bose_occupation(self.omega_d, self.t_bath)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |m: String| Err(DynamicsError::InvalidParameter(m));
        if !(self.anharmonicity < 0.0) {
            return bad(format!(
                "anharmonicity must be negative, got {}",
                self.anharmonicity
            ));
        }
        if !(self.kappa_d > 0.0) {
            return bad(format!("kappa_d must be positive, got {}", self.kappa_d));
        }
        if !(self.g > 0.0) {
            return bad(format!("g must be positive, got {}", self.g));
        }
        if !(self.omega_q_max > 0.0 && self.omega_d > 0.0) {
            return bad("frequencies must be positive".into());
        }
        if !(self.t_bath >= 0.0) {
            return bad(format!("t_bath must be ≥ 0, got {}", self.t_bath));
        }
        if let Some(t1) = self.t1_int {
            if !(t1 > 0.0) {
                return bad(format!("t1_int must be positive, got {t1}"));
            }
        }
        if !matches!(self.qubit_levels, 2 | 3) {
            return bad(format!(
                "qubit_levels must be 2 or 3, got {}",
                self.qubit_levels
            ));
        }
        if self.fock_cutoff < 3 {
            return bad(format!("fock_cutoff must be ≥ 3, got {}", self.fock_cutoff));
        }
        Ok(())
    }

    /// Plateau frequency that puts the `k−1 ↔ k` transition on the dissipator.
    pub fn resonant_plateau(&self, k: usize) -> f64 {
        self.omega_d - (k.saturating_sub(1)) as f64 * self.anharmonicity
    }
}

/// Purcell decay rate `½(κ − Re√(−16g² + (κ − 2iΔ)²))`, principal branch.
///
/// Evaluated as `8g²·Re(1/(z + √(z² − 16g²)))` with `z = κ − 2iΔ`, which avoids
/// cancellation far from resonance.
pub fn purcell_rate(kappa_d: f64, g: f64, delta: f64) -> f64 {
    let z = Complex64::new(kappa_d, -2.0 * delta);
    let root = (z * z - 16.0 * g * g).sqrt();
    8.0 * g * g * (z + root).inv().re
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxRate {
    pub saturated: bool,
    pub gamma_max: f64,
}

/// Whether `g ≥ κ/4`, and the peak rate over detuning (at Δ = 0).
pub fn max_rate_condition(kappa_d: f64, g: f64) -> MaxRate {
    MaxRate {
        saturated: g >= kappa_d / 4.0,
        gamma_max: purcell_rate(kappa_d, g, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const K: f64 = TAU * 15e6;
    const G: f64 = TAU * 10e6;

    #[test]
    fn no_coupling_no_decay() {
        for d in [0.0, 1e6, -3e9] {
            assert_eq!(purcell_rate(K, 0.0, d), 0.0);
        }
    }

    #[test]
    fn resonant_saturation() {
        assert_relative_eq!(purcell_rate(K, G, 0.0), K / 2.0, max_relative = 1e-12);
        assert_relative_eq!(1.0 / purcell_rate(K, G, 0.0), 21.22e-9, max_relative = 1e-3);
    }

    #[test]
    fn dispersive_limit() {
        let d = TAU * 500e6;
        let gamma = purcell_rate(K, G, d);
        let asym = K * G * G / (d * d + K * K / 4.0);
        assert_relative_eq!(gamma, asym, max_relative = 0.05);
        assert_relative_eq!(gamma / TAU, 6.0e3, max_relative = 0.01);
    }

    #[test]
    fn max_rate_boundary() {
        let at = max_rate_condition(K, K / 4.0);
        assert!(at.saturated);
        assert_relative_eq!(at.gamma_max, K / 2.0, max_relative = 1e-12);
        let below = max_rate_condition(K, K / 8.0);
        assert!(!below.saturated);
        assert!(below.gamma_max < K / 2.0);
        assert_relative_eq!(
            max_rate_condition(K, 1e12).gamma_max,
            K / 2.0,
            max_relative = 1e-9
        );
        // direct evaluation of the closed form on the overdamped side
        let g = K / 8.0;
        let direct = 0.5 * (K - (K * K - 16.0 * g * g).sqrt());
        assert_relative_eq!(
            max_rate_condition(K, g).gamma_max,
            direct,
            max_relative = 1e-12
        );
    }

    #[test]
    fn params_validation() {
        let p = SystemParams::default();
        p.validate().unwrap();
        assert!(SystemParams {
            anharmonicity: 1.0,
            ..p
        }
        .validate()
        .is_err());
        assert!(SystemParams {
            fock_cutoff: 2,
            ..p
        }
        .validate()
        .is_err());
        assert!(SystemParams {
            qubit_levels: 4,
            ..p
        }
        .validate()
        .is_err());
        assert_eq!(p.three_level().fock_cutoff, 7);
        assert_eq!(p.resonant_plateau(1), p.omega_d);
        assert_eq!(p.resonant_plateau(2), p.omega_d - p.anharmonicity);
    }
}
