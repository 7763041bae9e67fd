//! Reset experiments built from flux pulses and the open-system model.
//!
//! Every protocol prepares a diagonal transmon state, plays a schedule that
//! starts and ends at the idle frequency, and reports the populations after the
//! return edge, optionally pushed through the single-shot readout model.

mod fit;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    evolve_lindblad, purcell_rate, DensityMatrix, DynamicsError, EvolveOptions, LindbladModel,
    Plateau, PulseSchedule, SystemParams, Trajectory,
};
use crate::readout::{assignment_matrix, AssignmentMatrix, ReadoutError, ReadoutModel};

pub use fit::{analyze_damped, DampedFit};

/// Plateau time of the reset benchmarks [s].
pub const BENCHMARK_PLATEAU: f64 = 200e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResetError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Readout(#[from] ReadoutError),
    #[error("cell (frequency {freq_index}, t_p {tp_index}): {source}")]
    Cell {
        freq_index: usize,
        tp_index: usize,
        source: DynamicsError,
    },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    G,
    E,
    F,
}

impl InitialState {
    pub fn level(self) -> usize {
        match self {
            InitialState::G => 0,
            InitialState::E => 1,
            InitialState::F => 2,
        }
    }

    fn pure(self, levels: usize) -> Vec<f64> {
        let mut v = vec![0.0; levels];
        v[self.level()] = 1.0;
        v
    }
}

/// Populations (g, e, f) produced by each preparation sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preparation {
    pub g: [f64; 3],
    pub e: [f64; 3],
    pub f: [f64; 3],
}

impl Preparation {
    pub fn ideal() -> Self {
        Self {
            g: [1.0, 0.0, 0.0],
            e: [0.0, 1.0, 0.0],
            f: [0.0, 0.0, 1.0],
        }
    }

    /// Imperfect preparation matching the measured single-shot statistics:
    /// 0.34 % thermal e in the ground state, 92.56 % e with 0.76 % leakage to f,
    /// and the (0.335, 0, 0.658) g/e/f split normalised (66.3 % true f).
    pub fn calibrated() -> Self {
        let (fg, ff) = (0.335, 0.658);
        Self {
            g: [0.9966, 0.0034, 0.0],
            e: [1.0 - 0.9256 - 0.0076, 0.9256, 0.0076],
            f: [fg / (fg + ff), 0.0, ff / (fg + ff)],
        }
    }

    pub fn row(&self, s: InitialState) -> [f64; 3] {
        match s {
            InitialState::G => self.g,
            InitialState::E => self.e,
            InitialState::F => self.f,
        }
    }
}

/// Analytic two-level steady state `n̄/(1 + 2n̄)` at the dissipator temperature.
pub fn thermal_baseline(params: &SystemParams) -> f64 {
    let n = params.n_th();
    n / (1.0 + 2.0 * n)
}

fn model_for(params: &SystemParams, pops: &[f64]) -> SystemParams {
    if params.qubit_levels < 3 && pops.iter().skip(2).any(|p| *p > 0.0) {
        params.three_level()
    } else {
        *params
    }
}

/// Final transmon populations after `schedule` starting from diagonal `pops`.
pub fn run_schedule(
    params: &SystemParams,
    pops: &[f64],
    schedule: &PulseSchedule,
    opts: &EvolveOptions,
) -> Result<Vec<f64>, DynamicsError> {
    let p = model_for(params, pops);
    let model = LindbladModel::new(p)?;
    let nonzero = pops.iter().rposition(|x| *x > 0.0).map_or(1, |i| i + 1);
    let rho0 = DensityMatrix::product(&pops[..nonzero.max(1)], &p)?;
    let tr = evolve_lindblad(&model, &rho0, schedule, &[schedule.duration()], opts)?;
    Ok(tr.last().populations.clone())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub tp_ns: Vec<f64>,
    pub plateau_ghz: Vec<f64>,
    pub initial: InitialState,
    pub params: SystemParams,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ResetError> {
        let monotone = |v: &[f64]| !v.is_empty() && v.windows(2).all(|w| w[1] > w[0]);
        if !monotone(&self.tp_ns) || self.tp_ns[0] < 0.0 {
            return Err(ResetError::InvalidSweep(
                "t_p grid must be non-empty, increasing, ≥ 0".into(),
            ));
        }
        if !monotone(&self.plateau_ghz) || self.plateau_ghz[0] <= 0.0 {
            return Err(ResetError::InvalidSweep(
                "plateau grid must be non-empty, increasing, > 0".into(),
            ));
        }
        if self.initial.level()
            >= self
                .params
                .qubit_levels
                .max(if self.initial == InitialState::F {
                    3
                } else {
                    2
                })
        {
            return Err(ResetError::InvalidSweep(
                "initial state exceeds qubit levels".into(),
            ));
        }
        self.params.validate()?;
        Ok(())
    }
}

/// Excited population per (plateau frequency, t_p) cell; failed cells are NaN.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationMap {
    pub plateau_ghz: Vec<f64>,
    pub tp_ns: Vec<f64>,
    /// `p_e[i][j]` for frequency `i`, plateau time `j`.
    pub p_e: Vec<Vec<f64>>,
    pub failures: Vec<String>,
}

/// Every cell of `spec`, failed cells recorded instead of aborting.
pub fn reset_sweep_partial(spec: &SweepSpec) -> Result<PopulationMap, ResetError> {
    spec.validate()?;
    let levels = if spec.initial == InitialState::F {
        3
    } else {
        spec.params.qubit_levels
    };
    let params = if levels == 3 {
        spec.params.three_level()
    } else {
        spec.params
    };
    let init = spec.initial.pure(levels);
    let cells: Vec<(usize, usize)> = (0..spec.plateau_ghz.len())
        .flat_map(|i| (0..spec.tp_ns.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<f64, ResetError>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let s = PulseSchedule::square(
                params.omega_q_max,
                std::f64::consts::TAU * spec.plateau_ghz[i] * 1e9,
                spec.tp_ns[j] * 1e-9,
            );
            run_schedule(&params, &init, &s, &EvolveOptions::default())
                .map(|p| p[1])
                .map_err(|source| ResetError::Cell {
                    freq_index: i,
                    tp_index: j,
                    source,
                })
        })
        .collect();
    let mut p_e = vec![vec![f64::NAN; spec.tp_ns.len()]; spec.plateau_ghz.len()];
    let mut failures = Vec::new();
    for (&(i, j), r) in cells.iter().zip(results) {
        match r {
            Ok(v) => p_e[i][j] = v,
            Err(e) => failures.push(e.to_string()),
        }
    }
    Ok(PopulationMap {
        plateau_ghz: spec.plateau_ghz.clone(),
        tp_ns: spec.tp_ns.clone(),
        p_e,
        failures,
    })
}

/// Like [`reset_sweep_partial`] but fails on the first bad cell.
pub fn reset_sweep(spec: &SweepSpec) -> Result<PopulationMap, ResetError> {
    let map = reset_sweep_partial(spec)?;
    if let Some(f) = map.failures.first() {
        return Err(ResetError::InvalidSweep(f.clone()));
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Linecut {
    pub tp_ns: Vec<f64>,
    pub p_e: Vec<f64>,
    pub baseline: f64,
    pub fit: DampedFit,
    pub warning: Option<String>,
}

/// Excited population vs plateau time with the qubit resonant with the dissipator.
pub fn fringe_linecut(params: &SystemParams, tp_ns: &[f64]) -> Result<Linecut, ResetError> {
    let spec = SweepSpec {
        tp_ns: tp_ns.to_vec(),
        plateau_ghz: vec![params.omega_d / std::f64::consts::TAU / 1e9],
        initial: InitialState::E,
        params: *params,
    };
    let map = reset_sweep(&spec)?;
    let p_e = map.p_e.into_iter().next().expect("one frequency row");
    let baseline = thermal_baseline(params);
    let fit = analyze_damped(tp_ns, &p_e, baseline);
    let warning = if fit.envelope.is_none() {
        Some("damped-oscillation fit failed; raw trace only".to_string())
    } else if !fit.oscillating {
        Some("no oscillation detected: monotone decay".to_string())
    } else {
        None
    };
    Ok(Linecut {
        tp_ns: tp_ns.to_vec(),
        p_e,
        baseline,
        fit,
        warning,
    })
}

/// Qubit held at resonance from t = 0 (no edges), starting in |e⟩.
pub fn resonant_decay(
    params: &SystemParams,
    t_max: f64,
    samples: usize,
    opts: &EvolveOptions,
) -> Result<Trajectory, ResetError> {
    let model = LindbladModel::new(*params)?;
    let rho0 = DensityMatrix::product(&[0.0, 1.0], params)?;
    let s = PulseSchedule {
        omega_idle: params.omega_d,
        rise_time: 0.0,
        plateaus: vec![Plateau {
            omega: params.omega_d,
            duration: t_max,
        }],
    };
    let times: Vec<f64> = (0..=samples)
        .map(|k| t_max * k as f64 / samples as f64)
        .collect();
    Ok(evolve_lindblad(&model, &rho0, &s, &times, opts)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResetResult {
    pub protocol: String,
    /// Row labels of `before` / `after`.
    pub prepared: Vec<String>,
    /// True transmon populations per prepared state, before and after the reset.
    pub before: Vec<Vec<f64>>,
    pub after: Vec<Vec<f64>>,
    pub assigned_before: AssignmentMatrix,
    pub assigned_after: AssignmentMatrix,
    /// Analytic thermal steady state of the e level at the dissipator.
    pub steady_state_pe: f64,
    pub first_min_ns: Option<f64>,
    pub envelope_ns: Option<f64>,
    pub warnings: Vec<String>,
}

impl ResetResult {
    /// Assigned probability of `assigned` for prepared row `prepared`, after reset.
    pub fn measured(&self, prepared: InitialState, assigned: usize) -> f64 {
        let row = self
            .prepared
            .iter()
            .position(|l| l == label(prepared))
            .expect("prepared state present");
        self.assigned_after.get(row, assigned)
    }

    /// Fills the oscillation features from a line-cut.
    pub fn with_linecut(mut self, cut: &Linecut) -> Self {
        self.first_min_ns = cut.fit.first_min;
        self.envelope_ns = cut.fit.envelope;
        if let Some(w) = &cut.warning {
            self.warnings.push(w.clone());
        }
        self
    }
}

fn label(s: InitialState) -> &'static str {
    match s {
        InitialState::G => "g",
        InitialState::E => "e",
        InitialState::F => "f",
    }
}

/// Plays `stages` on each prepared state and measures before and after.
pub fn ladder_reset(
    protocol: &str,
    params: &SystemParams,
    stages: &[Plateau],
    states: &[InitialState],
    prep: &Preparation,
    readout: &ReadoutModel,
) -> Result<ResetResult, ResetError> {
    let schedule = PulseSchedule::ladder(params.omega_q_max, stages);
    schedule.validate()?;
    let before: Vec<Vec<f64>> = states.iter().map(|s| prep.row(*s).to_vec()).collect();
    let after = before
        .par_iter()
        .map(|pops| {
            let mut out = run_schedule(params, pops, &schedule, &EvolveOptions::default())?;
            out.resize(3, 0.0);
            Ok(out)
        })
        .collect::<Result<Vec<_>, DynamicsError>>()?;
    let model = readout.with_classes(readout.classes.min(3));
    let mut assigned_before = assignment_matrix(&before, &model)?;
    let mut assigned_after = assignment_matrix(
        &after,
        &ReadoutModel {
            seed: model.seed.wrapping_add(1),
            ..model.clone()
        },
    )?;
    let labels: Vec<String> = states.iter().map(|s| label(*s).to_string()).collect();
    assigned_before.prepared = labels.clone();
    assigned_after.prepared = labels.clone();
    Ok(ResetResult {
        protocol: protocol.to_string(),
        prepared: labels,
        before,
        after,
        assigned_before,
        assigned_after,
        steady_state_pe: thermal_baseline(params),
        first_min_ns: None,
        envelope_ns: None,
        warnings: Vec::new(),
    })
}

/// |e⟩→|g⟩ reset: one plateau at `plateau`, two-state discrimination.
pub fn benchmark_eg_reset(
    params: &SystemParams,
    plateau: f64,
    tp: f64,
    prep: &Preparation,
    readout: &ReadoutModel,
) -> Result<ResetResult, ResetError> {
    let mut r = ladder_reset(
        "eg",
        params,
        &[Plateau {
            omega: plateau,
            duration: tp,
        }],
        &[InitialState::G, InitialState::E],
        prep,
        &readout.with_classes(2),
    )?;
    if (plateau - params.omega_d).abs() > params.kappa_d {
        r.warnings.push(format!(
            "plateau is {:.1} MHz from the e–g resonance",
            (plateau - params.omega_d) / std::f64::consts::TAU / 1e6
        ));
    }
    Ok(r)
}

/// |f⟩→|e⟩ reset: one plateau with the e–f transition on the dissipator.
pub fn benchmark_fe_reset(
    params: &SystemParams,
    plateau: f64,
    tp: f64,
    prep: &Preparation,
    readout: &ReadoutModel,
) -> Result<ResetResult, ResetError> {
    let p3 = params.three_level();
    let mut r = ladder_reset(
        "fe",
        &p3,
        &[Plateau {
            omega: plateau,
            duration: tp,
        }],
        &[InitialState::G, InitialState::E, InitialState::F],
        prep,
        &readout.with_classes(3),
    )?;
    let mismatch = plateau + p3.anharmonicity - p3.omega_d;
    if mismatch.abs() > p3.kappa_d {
        r.warnings.push(format!(
            "plateau is {:.1} MHz from the e–f resonance",
            mismatch / std::f64::consts::TAU / 1e6
        ));
    }
    Ok(r)
}

/// f–e plateau then e–g plateau, each `tp` long, played as one piecewise pulse.
pub fn concatenated_reset(
    params: &SystemParams,
    tp: f64,
    prep: &Preparation,
    readout: &ReadoutModel,
) -> Result<ResetResult, ResetError> {
    let p3 = params.three_level();
    let stages = [
        Plateau {
            omega: p3.resonant_plateau(2),
            duration: tp,
        },
        Plateau {
            omega: p3.resonant_plateau(1),
            duration: tp,
        },
    ];
    ladder_reset(
        "fe+eg",
        &p3,
        &stages,
        &[InitialState::G, InitialState::E, InitialState::F],
        prep,
        &readout.with_classes(3),
    )
}

/// Γ over a (g, Δ) grid: `gamma[i][j]` for `g[i]`, `delta[j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaMap {
    pub kappa_d: f64,
    pub g: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma: Vec<Vec<f64>>,
}

impl GammaMap {
    /// Detuning of the largest Γ in row `i`.
    pub fn argmax_delta(&self, i: usize) -> f64 {
        let row = &self.gamma[i];
        let j = (0..row.len())
            .max_by(|&a, &b| {
                row[a]
                    .total_cmp(&row[b])
                    .then(self.delta[b].abs().total_cmp(&self.delta[a].abs()))
            })
            .expect("non-empty grid");
        self.delta[j]
    }
}

pub fn gamma_map(kappa_d: f64, g: &[f64], delta: &[f64]) -> GammaMap {
    GammaMap {
        kappa_d,
        g: g.to_vec(),
        delta: delta.to_vec(),
        gamma: g
            .iter()
            .map(|&gi| {
                delta
                    .iter()
                    .map(|&d| purcell_rate(kappa_d, gi, d))
                    .collect()
            })
            .collect(),
    }
}

/// Two transmons on one dissipator, each reset independently at its own plateau.
pub fn simultaneous_reset(
    params: &[SystemParams; 2],
    plateaus: [f64; 2],
    tp: f64,
) -> Result<[Vec<f64>; 2], ResetError> {
    let run = |k: usize| {
        let s = PulseSchedule::square(params[k].omega_q_max, plateaus[k], tp);
        run_schedule(&params[k], &[0.0, 1.0], &s, &EvolveOptions::default())
    };
    let (a, b) = rayon::join(|| run(0), || run(1));
    Ok([a?, b?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn cold() -> SystemParams {
        SystemParams {
            t_bath: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn preparations_are_normalised() {
        for p in [Preparation::ideal(), Preparation::calibrated()] {
            for s in [InitialState::G, InitialState::E, InitialState::F] {
                assert!((p.row(s).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn far_detuned_plateau_preserves_population() {
        let p = cold();
        let s = PulseSchedule::square(p.omega_q_max, p.omega_d + TAU * 500e6, 100e-9);
        let out = run_schedule(&p, &[0.0, 1.0], &s, &EvolveOptions::default()).unwrap();
        assert!(out[1] > 0.99, "{out:?}");
    }

    #[test]
    fn edges_alone_barely_move_population() {
        let p = cold();
        let s = PulseSchedule::square(p.omega_q_max, p.omega_d, 0.0);
        let out = run_schedule(&p, &[0.0, 1.0], &s, &EvolveOptions::default()).unwrap();
        assert!(out[1] > 0.98, "{out:?}");
    }

    #[test]
    fn sweep_shape_and_validation() {
        let spec = SweepSpec {
            tp_ns: vec![0.0, 10.0],
            plateau_ghz: vec![4.37, 4.6],
            initial: InitialState::E,
            params: cold(),
        };
        let m = reset_sweep(&spec).unwrap();
        assert_eq!(m.p_e.len(), 2);
        assert_eq!(m.p_e[0].len(), 2);
        assert!(m.p_e[0][1] < m.p_e[0][0]);
        let bad = SweepSpec {
            tp_ns: vec![],
            ..spec
        };
        assert!(reset_sweep(&bad).is_err());
    }

    #[test]
    fn gamma_map_peaks_on_resonance() {
        let k = TAU * 15e6;
        let g: Vec<f64> = [2e6, 3e6, 4e6, 10e6].iter().map(|x| TAU * x).collect();
        let d: Vec<f64> = (-20..=20).map(|j| TAU * 5e6 * j as f64).collect();
        let m = gamma_map(k, &g, &d);
        for i in 0..g.len() {
            assert_eq!(m.argmax_delta(i), 0.0);
        }
        assert!((m.gamma[2][20] / (k / 2.0) - 1.0).abs() < 1e-12);
        assert!(m.gamma[1][20] < k / 2.0);
    }

    #[test]
    fn fe_warning_on_mismatch() {
        let p = cold();
        let r = benchmark_fe_reset(
            &p,
            p.omega_d,
            10e-9,
            &Preparation::ideal(),
            &ReadoutModel {
                shots: 100,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.warnings.len(), 1);
    }
}
