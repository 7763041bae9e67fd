use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::{find_cutoff, to_db, Abcd, FrequencyGrid, NetworkChain, NetworkError, DEFAULT_Z_REF};

/// One diplexer branch, oriented from the common junction to its own port.
#[derive(Debug, Clone, PartialEq)]
pub enum Branch {
    /// No connection at the junction.
    Open,
    Filter(NetworkChain),
}

impl Branch {
    /// Admittance this branch presents at the junction, far port terminated in `z_ref`.
    fn junction_admittance(&self, omega: f64, z_ref: f64) -> Result<Complex64, NetworkError> {
        match self {
            Branch::Open => Ok(Complex64::new(0.0, 0.0)),
            Branch::Filter(chain) => Ok(1.0
                / chain
                    .cascade(omega)?
                    .input_impedance(Complex64::new(z_ref, 0.0))),
        }
    }
}

/// Three-port diplexer built from two branches joined at an ideal parallel junction.
#[derive(Debug, Clone, PartialEq)]
pub struct DiplexerSpec {
    pub lowpass: Branch,
    pub highpass: Branch,
    pub z_ref: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiplexerPath {
    CommonToLowpass,
    CommonToHighpass,
    LowpassToHighpass,
}

impl DiplexerSpec {
    pub fn new(lowpass: NetworkChain, highpass: NetworkChain) -> Self {
        Self {
            lowpass: Branch::Filter(lowpass),
            highpass: Branch::Filter(highpass),
            z_ref: DEFAULT_Z_REF,
        }
    }

    /// Transmission coefficient between two diplexer ports, third port terminated.
    pub fn transmission(&self, path: DiplexerPath, omega: f64) -> Result<Complex64, NetworkError> {
        let z = self.z_ref;
        let through = |chain: &Abcd| chain.to_s(z).map(|s| s.s21);
        match path {
            DiplexerPath::CommonToLowpass => match &self.lowpass {
                Branch::Open => Ok(Complex64::new(0.0, 0.0)),
                Branch::Filter(lp) => {
                    let y = self.highpass.junction_admittance(omega, z)?;
                    through(&(Abcd::shunt(y) * lp.cascade(omega)?))
                }
            },
            DiplexerPath::CommonToHighpass => match &self.highpass {
                Branch::Open => Ok(Complex64::new(0.0, 0.0)),
                Branch::Filter(hp) => {
                    let y = self.lowpass.junction_admittance(omega, z)?;
                    through(&(Abcd::shunt(y) * hp.cascade(omega)?))
                }
            },
            DiplexerPath::LowpassToHighpass => match (&self.lowpass, &self.highpass) {
                (Branch::Filter(lp), Branch::Filter(hp)) => {
                    // LP port → junction (loaded by the common port) → HP port
                    let m = lp.reversed().cascade(omega)?
                        * Abcd::shunt(Complex64::new(1.0 / z, 0.0))
                        * hp.cascade(omega)?;
                    through(&m)
                }
                _ => Ok(Complex64::new(0.0, 0.0)),
            },
        }
    }

    pub fn transmission_db(&self, path: DiplexerPath, freq_hz: f64) -> Result<f64, NetworkError> {
        self.transmission(path, TAU * freq_hz)
            .map(to_db)
            .map_err(|e| e.at_frequency(freq_hz))
    }

    /// Checks that the high-pass −3 dB point sits above the low-pass one.
    pub fn check_band_order(&self, search: (f64, f64)) -> Result<(f64, f64), NetworkError> {
        let (Branch::Filter(lp), Branch::Filter(hp)) = (&self.lowpass, &self.highpass) else {
            return Err(NetworkError::InvalidParameter(
                "band order needs both branches".into(),
            ));
        };
        let f_lp = find_cutoff(lp, -3.0, search)?;
        let f_hp = find_cutoff(hp, -3.0, search)?;
        if f_hp <= f_lp {
            return Err(NetworkError::InvalidParameter(format!(
                "inverted diplexer bands: high-pass {f_hp} Hz ≤ low-pass {f_lp} Hz"
            )));
        }
        Ok((f_lp, f_hp))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsolationReport {
    /// Largest cross-branch transmission over the band [dB].
    pub worst_db: f64,
    pub worst_freq_hz: f64,
    /// Smallest cross-branch transmission over the band [dB].
    pub best_db: f64,
    pub best_freq_hz: f64,
}

/// Worst-case LP-port → HP-port transmission over `grid`.
pub fn diplexer_isolation(
    spec: &DiplexerSpec,
    grid: &FrequencyGrid,
) -> Result<IsolationReport, NetworkError> {
    let mut report = IsolationReport {
        worst_db: f64::NEG_INFINITY,
        worst_freq_hz: grid.freqs()[0],
        best_db: f64::INFINITY,
        best_freq_hz: grid.freqs()[0],
    };
    for &f in grid.freqs() {
        let db = spec.transmission_db(DiplexerPath::LowpassToHighpass, f)?;
        if db > report.worst_db {
            report.worst_db = db;
            report.worst_freq_hz = f;
        }
        if db < report.best_db {
            report.best_db = db;
            report.best_freq_hz = f;
        }
    }
    Ok(report)
}
