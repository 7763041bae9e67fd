use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Abcd, NetworkError};

/// A lumped component, or a fixed immittance.
///
/// Time dependence is `e^{+iωt}`, so `Z_L = iωL` and `Z_C = 1/(iωC)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Component {
    /// Inductance in henry.
    Inductor { henry: f64 },
    /// Capacitance in farad.
    Capacitor { farad: f64 },
    /// Resistance in ohm.
    Resistor { ohm: f64 },
    /// Frequency-independent impedance in ohm.
    Impedance { ohm: Complex64 },
    /// Frequency-independent admittance in siemens.
    Admittance { siemens: Complex64 },
}

impl Component {
    pub fn impedance(&self, omega: f64) -> Complex64 {
        let i = Complex64::i();
        match *self {
            Component::Inductor { henry } => i * omega * henry,
            Component::Capacitor { farad } => 1.0 / (i * omega * farad),
            Component::Resistor { ohm } => Complex64::new(ohm, 0.0),
            Component::Impedance { ohm } => ohm,
            Component::Admittance { siemens } => 1.0 / siemens,
        }
    }

    pub fn admittance(&self, omega: f64) -> Complex64 {
        let i = Complex64::i();
        match *self {
            Component::Inductor { henry } => 1.0 / (i * omega * henry),
            Component::Capacitor { farad } => i * omega * farad,
            Component::Resistor { ohm } => Complex64::new(1.0 / ohm, 0.0),
            Component::Impedance { ohm } => 1.0 / ohm,
            Component::Admittance { siemens } => siemens,
        }
    }

    /// True for components that dissipate no power at real frequencies.
    pub fn is_lossless(&self) -> bool {
        match *self {
            Component::Inductor { .. } | Component::Capacitor { .. } => true,
            Component::Resistor { ohm } => ohm == 0.0,
            Component::Impedance { ohm } => ohm.re == 0.0,
            Component::Admittance { siemens } => siemens.re == 0.0,
        }
    }
}

/// Uniform TEM transmission line segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineParams {
    /// Characteristic impedance [Ω].
    pub z0: f64,
    /// Physical length [m].
    pub length: f64,
    /// Phase velocity [m/s].
    pub phase_velocity: f64,
    /// Attenuation constant [Np/m].
    pub attenuation: f64,
}

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

impl LineParams {
    /// Line with phase velocity `c/√ε_eff`.
    pub fn from_permittivity(z0: f64, length: f64, eps_eff: f64, attenuation: f64) -> Self {
        Self {
            z0,
            length,
            phase_velocity: SPEED_OF_LIGHT / eps_eff.sqrt(),
            attenuation,
        }
    }

    pub fn eps_eff(&self) -> f64 {
        (SPEED_OF_LIGHT / self.phase_velocity).powi(2)
    }

    /// Phase constant β = ω / v.
    pub fn beta(&self, omega: f64) -> f64 {
        omega / self.phase_velocity
    }

    /// Propagation constant γ = α + iβ.
    pub fn gamma(&self, omega: f64) -> Complex64 {
        Complex64::new(self.attenuation, self.beta(omega))
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        if !(self.z0 > 0.0 && self.z0.is_finite()) {
            return Err(NetworkError::InvalidParameter(format!(
                "line impedance must be positive, got {}",
                self.z0
            )));
        }
        if !(self.length >= 0.0 && self.length.is_finite()) {
            return Err(NetworkError::InvalidParameter(format!(
                "line length must be non-negative, got {}",
                self.length
            )));
        }
        if !(self.phase_velocity > 0.0 && self.phase_velocity.is_finite()) {
            return Err(NetworkError::InvalidParameter(format!(
                "phase velocity must be positive, got {}",
                self.phase_velocity
            )));
        }
        if !(self.attenuation >= 0.0 && self.attenuation.is_finite()) {
            return Err(NetworkError::InvalidParameter(format!(
                "attenuation must be non-negative, got {}",
                self.attenuation
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementKind {
    SeriesImpedance { component: Component },
    ShuntAdmittance { component: Component },
    TransmissionLine { line: LineParams },
}

/// One cascadable building block of a ladder or line chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPortElement {
    pub name: String,
    #[serde(flatten)]
    pub kind: ElementKind,
}

impl TwoPortElement {
    pub fn series(name: impl Into<String>, component: Component) -> Self {
        Self {
            name: name.into(),
            kind: ElementKind::SeriesImpedance { component },
        }
    }

    pub fn shunt(name: impl Into<String>, component: Component) -> Self {
        Self {
            name: name.into(),
            kind: ElementKind::ShuntAdmittance { component },
        }
    }

    pub fn line(name: impl Into<String>, line: LineParams) -> Self {
        Self {
            name: name.into(),
            kind: ElementKind::TransmissionLine { line },
        }
    }

    pub fn is_lossless(&self) -> bool {
        match &self.kind {
            ElementKind::SeriesImpedance { component }
            | ElementKind::ShuntAdmittance { component } => component.is_lossless(),
            ElementKind::TransmissionLine { line } => line.attenuation == 0.0,
        }
    }

    /// ABCD matrix at angular frequency `omega`.
    pub fn abcd(&self, omega: f64) -> Result<Abcd, NetworkError> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(NetworkError::InvalidParameter(format!(
                "angular frequency must be positive, got {omega}"
            )));
        }
        let non_finite = || NetworkError::NonFinite {
            element: self.name.clone(),
            omega,
        };
        match &self.kind {
            ElementKind::SeriesImpedance { component } => {
                let z = component.impedance(omega);
                if !z.is_finite() {
                    return Err(non_finite());
                }
                Ok(Abcd::series(z))
            }
            ElementKind::ShuntAdmittance { component } => {
                let y = component.admittance(omega);
                if !y.is_finite() {
                    return Err(non_finite());
                }
                Ok(Abcd::shunt(y))
            }
            ElementKind::TransmissionLine { line } => {
                line.validate()?;
                let gl = line.gamma(omega) * line.length;
                let (ch, sh) = (gl.cosh(), gl.sinh());
                if !(ch.is_finite() && sh.is_finite()) {
                    return Err(non_finite());
                }
                Ok(Abcd::new(ch, sh * line.z0, sh / line.z0, ch))
            }
        }
    }
}
