//! Strict JSON run configuration. Human units throughout (GHz, MHz, mK, ns).

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qreset::dynamics::SystemParams;
use qreset::readout::{ReadoutModel, DEFAULT_SEPARATION_SIGMA};
use qreset::reset::{InitialState, Preparation};
use qreset::rf::LadderValues;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub device: DeviceConfig,
    #[serde(default)]
    pub system: SystemConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub readout: ReadoutConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            device: Default::default(),
            system: Default::default(),
            sweep: Default::default(),
            readout: Default::default(),
            output: Default::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcPair {
    pub inductance_nh: f64,
    pub capacitance_pf: f64,
}

impl LcPair {
    pub fn values(&self) -> LadderValues {
        LadderValues {
            inductance: self.inductance_nh * 1e-9,
            capacitance: self.capacitance_pf * 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceConfig {
    pub filter_order: usize,
    pub lowpass: LcPair,
    pub highpass: LcPair,
    pub lowpass_cutoff_ghz: f64,
    pub highpass_cutoff_ghz: f64,
    pub z0_ohm: f64,
    pub line_length_mm: f64,
    /// Fixed effective permittivity; when absent the line is calibrated so the
    /// full-wave mode sits at `mode_ghz`.
    pub eps_eff: Option<f64>,
    pub mode_ghz: f64,
    pub attenuation_np_per_m: f64,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            filter_order: 5,
            lowpass: LcPair {
                inductance_nh: 4.488,
                capacitance_pf: 1.809,
            },
            highpass: LcPair {
                inductance_nh: 0.660,
                capacitance_pf: 0.266,
            },
            lowpass_cutoff_ghz: 3.35,
            highpass_cutoff_ghz: 6.5,
            z0_ohm: 50.0,
            line_length_mm: 25.0,
            eps_eff: None,
            mode_ghz: 4.23,
            attenuation_np_per_m: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    pub qubit_max_ghz: f64,
    pub anharmonicity_mhz: f64,
    pub g_mhz: f64,
    pub dissipator_ghz: f64,
    pub kappa_mhz: f64,
    pub t1_int_us: Option<f64>,
    pub t_bath_mk: f64,
    pub qubit_levels: usize,
    pub fock_cutoff: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let p = SystemParams::default();
        Self {
            qubit_max_ghz: p.omega_q_max / TAU / 1e9,
            anharmonicity_mhz: p.anharmonicity / TAU / 1e6,
            g_mhz: p.g / TAU / 1e6,
            dissipator_ghz: p.omega_d / TAU / 1e9,
            kappa_mhz: p.kappa_d / TAU / 1e6,
            t1_int_us: p.t1_int.map(|t| t * 1e6),
            t_bath_mk: p.t_bath * 1e3,
            qubit_levels: p.qubit_levels,
            fock_cutoff: p.fock_cutoff,
        }
    }
}

impl SystemConfig {
    pub fn params(&self) -> SystemParams {
        SystemParams {
            omega_q_max: TAU * self.qubit_max_ghz * 1e9,
            anharmonicity: TAU * self.anharmonicity_mhz * 1e6,
            g: TAU * self.g_mhz * 1e6,
            omega_d: TAU * self.dissipator_ghz * 1e9,
            kappa_d: TAU * self.kappa_mhz * 1e6,
            t1_int: self.t1_int_us.map(|t| t * 1e-6),
            t_bath: self.t_bath_mk * 1e-3,
            qubit_levels: self.qubit_levels,
            fock_cutoff: self.fock_cutoff,
        }
    }
}

/// Inclusive `start..=stop` grid with spacing `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub const fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }

    fn check(&self, field: &str) -> Result<(), CliError> {
        if !(self.step > 0.0
            && self.stop >= self.start
            && self.start.is_finite()
            && self.stop.is_finite())
        {
            return Err(CliError::config(format!(
                "{field}: need start ≤ stop and step > 0, got {}..{} step {}",
                self.start, self.stop, self.step
            )));
        }
        if (self.stop - self.start) / self.step > 1e6 {
            return Err(CliError::config(format!("{field}: more than 1e6 points")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Eg,
    Fe,
    Concatenated,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// S-parameter band [GHz] and spacing [MHz].
    pub band_ghz: [f64; 2],
    pub step_mhz: f64,
    pub mode_band_ghz: [f64; 2],
    pub tp_ns: Range,
    pub plateau_ghz: Range,
    pub initial: InitialState,
    pub gamma_g_mhz: Vec<f64>,
    pub gamma_delta_mhz: Range,
    pub linecut_tp_ns: Range,
    pub reset_tp_ns: f64,
    pub protocol: Protocol,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            band_ghz: [1.0, 10.0],
            step_mhz: 5.0,
            mode_band_ghz: [3.5, 6.0],
            tp_ns: Range::new(0.0, 200.0, 5.0),
            plateau_ghz: Range::new(4.17, 4.57, 0.02),
            initial: InitialState::E,
            gamma_g_mhz: vec![1.0, 2.0, 3.0, 3.75, 4.0, 6.0, 10.0],
            gamma_delta_mhz: Range::new(-100.0, 100.0, 1.0),
            linecut_tp_ns: Range::new(0.0, 150.0, 0.5),
            reset_tp_ns: 200.0,
            protocol: Protocol::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreparationPreset {
    Calibrated,
    Ideal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutConfig {
    pub sigma: f64,
    /// Neighbouring centroid spacing in units of σ.
    pub separation_sigma: f64,
    pub shots: usize,
    pub seed: u64,
    pub preparation: PreparationPreset,
    /// Overrides `preparation` when present.
    pub custom_preparation: Option<Preparation>,
    /// Recorded for completeness; not simulated.
    pub resonator_kappa_mhz: f64,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            separation_sigma: DEFAULT_SEPARATION_SIGMA,
            shots: 100_000,
            seed: 0,
            preparation: PreparationPreset::Calibrated,
            custom_preparation: None,
            resonator_kappa_mhz: 3.0,
        }
    }
}

impl ReadoutConfig {
    pub fn model(&self) -> ReadoutModel {
        ReadoutModel {
            shots: self.shots,
            seed: self.seed,
            ..ReadoutModel::colinear(3, 3, self.sigma, self.separation_sigma)
        }
    }

    pub fn preparation(&self) -> Preparation {
        match (&self.custom_preparation, self.preparation) {
            (Some(p), _) => p.clone(),
            (None, PreparationPreset::Calibrated) => Preparation::calibrated(),
            (None, PreparationPreset::Ideal) => Preparation::ideal(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
    All,
}

impl Format {
    pub fn includes(self, other: Format) -> bool {
        self == Format::All || self == other
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            format: Format::All,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "{field} must be positive, got {v}"
        )))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let d = &self.device;
        if d.filter_order == 0 {
            return Err(CliError::config("device.filter_order must be ≥ 1".into()));
        }
        positive("device.lowpass.inductance_nh", d.lowpass.inductance_nh)?;
        positive("device.lowpass.capacitance_pf", d.lowpass.capacitance_pf)?;
        positive("device.highpass.inductance_nh", d.highpass.inductance_nh)?;
        positive("device.highpass.capacitance_pf", d.highpass.capacitance_pf)?;
        positive("device.lowpass_cutoff_ghz", d.lowpass_cutoff_ghz)?;
        positive("device.highpass_cutoff_ghz", d.highpass_cutoff_ghz)?;
        positive("device.z0_ohm", d.z0_ohm)?;
        positive("device.line_length_mm", d.line_length_mm)?;
        positive("device.mode_ghz", d.mode_ghz)?;
        if let Some(e) = d.eps_eff {
            positive("device.eps_eff", e)?;
        }
        if !(d.attenuation_np_per_m >= 0.0) {
            return Err(CliError::config(
                "device.attenuation_np_per_m must be ≥ 0".into(),
            ));
        }

        let s = &self.system;
        positive("system.qubit_max_ghz", s.qubit_max_ghz)?;
        positive("system.g_mhz", s.g_mhz)?;
        positive("system.dissipator_ghz", s.dissipator_ghz)?;
        positive("system.kappa_mhz", s.kappa_mhz)?;
        if let Some(t) = s.t1_int_us {
            positive("system.t1_int_us", t)?;
        }
        if !(s.t_bath_mk >= 0.0) {
            return Err(CliError::config("system.t_bath_mk must be ≥ 0".into()));
        }
        s.params()
            .validate()
            .map_err(|e| CliError::config(format!("system: {e}")))?;

        let w = &self.sweep;
        for (field, b) in [
            ("sweep.band_ghz", w.band_ghz),
            ("sweep.mode_band_ghz", w.mode_band_ghz),
        ] {
            if !(b[0] > 0.0 && b[1] > b[0] && b[1] <= 20.0) {
                return Err(CliError::config(format!(
                    "{field} must satisfy 0 < lo < hi ≤ 20, got {b:?}"
                )));
            }
        }
        positive("sweep.step_mhz", w.step_mhz)?;
        w.tp_ns.check("sweep.tp_ns")?;
        if w.tp_ns.start < 0.0 {
            return Err(CliError::config("sweep.tp_ns.start must be ≥ 0".into()));
        }
        w.plateau_ghz.check("sweep.plateau_ghz")?;
        positive("sweep.plateau_ghz.start", w.plateau_ghz.start)?;
        w.gamma_delta_mhz.check("sweep.gamma_delta_mhz")?;
        w.linecut_tp_ns.check("sweep.linecut_tp_ns")?;
        if w.linecut_tp_ns.start < 0.0 {
            return Err(CliError::config(
                "sweep.linecut_tp_ns.start must be ≥ 0".into(),
            ));
        }
        if w.gamma_g_mhz.is_empty() {
            return Err(CliError::config(
                "sweep.gamma_g_mhz must not be empty".into(),
            ));
        }
        for g in &w.gamma_g_mhz {
            positive("sweep.gamma_g_mhz[]", *g)?;
        }
        positive("sweep.reset_tp_ns", w.reset_tp_ns)?;

        let r = &self.readout;
        positive("readout.sigma", r.sigma)?;
        positive("readout.separation_sigma", r.separation_sigma)?;
        if r.shots == 0 {
            return Err(CliError::config("readout.shots must be ≥ 1".into()));
        }
        r.model()
            .validate()
            .map_err(|e| CliError::config(format!("readout: {e}")))?;
        if let Some(p) = &r.custom_preparation {
            for (label, row) in [("g", p.g), ("e", p.e), ("f", p.f)] {
                let sum: f64 = row.iter().sum();
                if row.iter().any(|x| !(*x >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                    return Err(CliError::config(format!(
                        "readout.custom_preparation.{label} must be a probability vector, got {row:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}
