use num_complex::Complex64;
use serde::Serialize;

use super::model::{DensityMatrix, LindbladModel, CUTOFF_GUARD};
use super::pulse::PulseSchedule;
use super::DynamicsError;

/// Upper bound on the RK4 step [s].
pub const MAX_STEP: f64 = 0.1e-9;
/// Most negative eigenvalue tolerated before the step is declared too large.
pub const POSITIVITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolveOptions {
    /// Extra cap on the step [s], applied after the default rule.
    pub max_step: Option<f64>,
    /// Diagonalise ρ at every sample and fail on negative eigenvalues.
    pub check_positivity: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            max_step: None,
            check_positivity: true,
        }
    }
}

/// `min(1/(50·max(g, κ, |Δ|)), 0.1 ns)`.
pub fn default_step(model: &LindbladModel, max_detuning: f64) -> f64 {
    let p = &model.params;
    let fastest = p.g.max(p.kappa_d).max(max_detuning);
    (1.0 / (50.0 * fastest)).min(MAX_STEP)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    /// Transmon level populations g, e[, f].
    pub populations: Vec<f64>,
    pub n_dissipator: f64,
    pub trace_err: f64,
    pub hermiticity_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub final_state: DensityMatrix,
    pub steps: usize,
    /// Smallest step taken [s].
    pub min_step: f64,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryPoint {
        self.points
            .last()
            .expect("trajectory has at least one point")
    }

    pub fn population(&self, level: usize) -> Vec<f64> {
        self.points.iter().map(|p| p.populations[level]).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }
}

fn record(t: f64, state: &DensityMatrix) -> TrajectoryPoint {
    TrajectoryPoint {
        t,
        populations: state.qubit_populations(),
        n_dissipator: state.dissipator_occupation(),
        trace_err: (state.trace() - 1.0).abs(),
        hermiticity_err: state.hermiticity_error(),
    }
}

/// Fixed-step RK4 integration of the master equation under `schedule`, sampled at `times`.
///
/// Each sample interval is split into equal steps no longer than [`default_step`]
/// for the largest detuning reached inside it.
pub fn evolve_lindblad(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    schedule: &PulseSchedule,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory, DynamicsError> {
    schedule.validate()?;
    let d = model.dim;
    if rho0.rho.nrows() != d || rho0.rho.ncols() != d {
        return Err(DynamicsError::InvalidParameter(format!(
            "initial state is {}×{}, model is {d}×{d}",
            rho0.rho.nrows(),
            rho0.rho.ncols()
        )));
    }
    let total = schedule.duration();
    if times.is_empty() || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DynamicsError::InvalidParameter(
            "sample times must be non-empty and strictly increasing".into(),
        ));
    }
    for &t in [times[0], times[times.len() - 1]].iter() {
        if !(0.0..=total * (1.0 + 1e-12)).contains(&t) {
            return Err(DynamicsError::OutsideSchedule { t, total });
        }
    }
    if let Some(h) = opts.max_step {
        if !(h > 0.0) {
            return Err(DynamicsError::InvalidParameter(format!(
                "max_step must be positive, got {h}"
            )));
        }
    }

    let omega_d = model.params.omega_d;
    let delta = |t: f64| schedule.frequency_unchecked(t) - omega_d;
    let mut y: Vec<Complex64> = rho0.rho.as_slice().to_vec();
    let n2 = d * d;
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![Complex64::default(); n2],
        vec![Complex64::default(); n2],
        vec![Complex64::default(); n2],
        vec![Complex64::default(); n2],
        vec![Complex64::default(); n2],
    );

    let mut points = Vec::with_capacity(times.len());
    let mut steps = 0;
    let mut min_step = f64::INFINITY;
    let mut t = 0.0;
    for &target in times {
        if target > t {
            let mut h = default_step(model, schedule.max_detuning(omega_d, t, target));
            if let Some(cap) = opts.max_step {
                h = h.min(cap);
            }
            let n = ((target - t) / h).ceil().max(1.0) as usize;
            let h = (target - t) / n as f64;
            min_step = min_step.min(h);
            let t_start = t;
            for i in 0..n {
                let ti = t_start + i as f64 * h;
                model.rhs(delta(ti), &y, &mut k1);
                for j in 0..n2 {
                    tmp[j] = y[j] + k1[j] * (0.5 * h);
                }
                let mid = delta(ti + 0.5 * h);
                model.rhs(mid, &tmp, &mut k2);
                for j in 0..n2 {
                    tmp[j] = y[j] + k2[j] * (0.5 * h);
                }
                model.rhs(mid, &tmp, &mut k3);
                for j in 0..n2 {
                    tmp[j] = y[j] + k3[j] * h;
                }
                model.rhs(delta(ti + h), &tmp, &mut k4);
                for j in 0..n2 {
                    y[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
                }
            }
            steps += n;
            t = target;
        }
        let state = rho0.with_data(&y);
        if opts.check_positivity {
            let min_eig = state.min_eigenvalue();
            if min_eig < -POSITIVITY_TOL {
                return Err(DynamicsError::StepTooLarge {
                    t,
                    min_eig,
                    step: min_step,
                });
            }
        }
        points.push(record(t, &state));
    }

    let final_state = rho0.with_data(&y);
    let top = final_state.fock_populations()[final_state.fock_cutoff - 1];
    if top > CUTOFF_GUARD {
        return Err(DynamicsError::CutoffTooSmall {
            cutoff: final_state.fock_cutoff,
            population: top,
        });
    }
    Ok(Trajectory {
        points,
        final_state,
        steps,
        min_step: if min_step.is_finite() { min_step } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SystemParams;
    use std::f64::consts::TAU;

    fn resonant(params: &SystemParams, duration: f64) -> PulseSchedule {
        PulseSchedule {
            omega_idle: params.omega_d,
            rise_time: 0.0,
            plateaus: vec![super::super::Plateau {
                omega: params.omega_d,
                duration,
            }],
        }
    }

    #[test]
    fn static_state_without_dynamics() {
        let params = SystemParams {
            g: 1e-30,
            kappa_d: 1e-30,
            t1_int: None,
            t_bath: 0.0,
            ..Default::default()
        };
        let model = LindbladModel::new(params).unwrap();
        let rho0 = DensityMatrix::product(&[0.3, 0.7], &params).unwrap();
        let tr = evolve_lindblad(
            &model,
            &rho0,
            &resonant(&params, 10e-9),
            &[0.0, 10e-9],
            &Default::default(),
        )
        .unwrap();
        assert!((&tr.final_state.rho - &rho0.rho).camax() < 1e-15);
    }

    #[test]
    fn intrinsic_decay_is_exponential() {
        let params = SystemParams {
            g: 1e-30,
            t1_int: Some(30e-6),
            t_bath: 0.0,
            ..Default::default()
        };
        let model = LindbladModel::new(params).unwrap();
        let rho0 = DensityMatrix::product(&[0.0, 1.0], &params).unwrap();
        let tr = evolve_lindblad(
            &model,
            &rho0,
            &resonant(&params, 3e-6),
            &[3e-6],
            &EvolveOptions {
                check_positivity: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((tr.last().populations[1] - (-0.1f64).exp()).abs() < 1e-4);
    }

    #[test]
    fn step_rule() {
        let model = LindbladModel::new(SystemParams::default()).unwrap();
        assert_eq!(default_step(&model, 0.0), MAX_STEP);
        let big = TAU * 490e6;
        assert!((default_step(&model, big) - 1.0 / (50.0 * big)).abs() < 1e-25);
    }

    #[test]
    fn rejects_bad_sampling() {
        let params = SystemParams::default();
        let model = LindbladModel::new(params).unwrap();
        let rho0 = DensityMatrix::product(&[1.0], &params).unwrap();
        let s = resonant(&params, 10e-9);
        let o = EvolveOptions::default();
        assert!(evolve_lindblad(&model, &rho0, &s, &[], &o).is_err());
        assert!(evolve_lindblad(&model, &rho0, &s, &[2e-9, 1e-9], &o).is_err());
        assert!(matches!(
            evolve_lindblad(&model, &rho0, &s, &[20e-9], &o),
            Err(DynamicsError::OutsideSchedule { .. })
        ));
    }
}
