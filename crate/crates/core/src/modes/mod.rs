//! Standing-wave dissipator mode between two reflective low-pass filters.
//!
//! The line between the filters behaves as a Fabry–Perot cavity. Mode
//! frequencies are roots of the round-trip phase condition
//! `arg(Γ_L Γ_R e^{−2iβL}) ≡ 0 (mod 2π)`; the linewidth is extracted once from
//! the round-trip loss and once from a Lorentzian fit of |S21|² through the
//! whole LP–line–LP chain, which serves as an independent check.

mod lorentzian;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::rf::{
    sweep_s_params, Component, FrequencyGrid, LineParams, NetworkChain, NetworkError,
    TwoPortElement,
};

pub use lorentzian::{fit_lorentzian, LorentzianFit, POOR_FIT_THRESHOLD};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModeError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("singular boundary: Z_in + Z0 = 0 at ω = {omega:e} rad/s")]
    SingularBoundary { omega: f64 },
    #[error("lossless cavity: |Γ_L Γ_R| = 1 with zero attenuation (infinite Q)")]
    ZeroLoss,
    #[error("Lorentzian fit failed: {0}")]
    FitFailed(String),
    #[error("S11 = +1: suppression factor is 0/0 (open-circuit singularity)")]
    OpenCircuitSingularity,
    #[error("mirror leakage alone gives κ/2π = {leakage_hz:.3e} Hz, above the {target_hz:.3e} Hz target")]
    TargetBelowLeakage { leakage_hz: f64, target_hz: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Termination seen from inside the line at one end.
#[derive(Debug, Clone, PartialEq)]
pub enum CavityBoundary {
    /// A filter whose port 1 faces the outside world (terminated in its
    /// reference impedance) and port 2 faces the line.
    Filter(NetworkChain),
    /// A lumped load at the line end.
    Load(Component),
    /// Frequency-independent reflection coefficient.
    Reflection(Complex64),
}

impl CavityBoundary {
    pub fn short() -> Self {
        CavityBoundary::Reflection(Complex64::new(-1.0, 0.0))
    }

    /// Reflection coefficient Γ referenced to the line impedance `z_line`.
    pub fn reflection(&self, omega: f64, z_line: f64) -> Result<Complex64, ModeError> {
        let z_in = match self {
            CavityBoundary::Reflection(g) => return Ok(*g),
            CavityBoundary::Load(c) => c.impedance(omega),
            CavityBoundary::Filter(chain) => chain.reversed().input_impedance(omega)?,
        };
        let den = z_in + z_line;
        if den.norm() == 0.0 || !den.is_finite() {
            if z_in.is_infinite() || z_in.is_nan() {
                // open end
                return Ok(Complex64::new(1.0, 0.0));
            }
            return Err(ModeError::SingularBoundary { omega });
        }
        Ok((z_in - z_line) / den)
    }

    /// The two-port form of this boundary, if it has one.
    fn as_chain(&self) -> Option<&NetworkChain> {
        match self {
            CavityBoundary::Filter(c) => Some(c),
            _ => None,
        }
    }
}

/// Γ of `lp_filter` seen from its line-side port with the far port terminated.
pub fn boundary_reflection(
    lp_filter: &NetworkChain,
    omega: f64,
    z_line: f64,
) -> Result<Complex64, ModeError> {
    CavityBoundary::Filter(lp_filter.clone()).reflection(omega, z_line)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cavity {
    pub line: LineParams,
    pub left: CavityBoundary,
    pub right: CavityBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DissipatorMode {
    /// Mode angular frequency [rad/s].
    pub omega: f64,
    /// Energy decay rate [rad/s]; `None` for a lossless cavity.
    pub kappa: Option<f64>,
    /// Number of half wavelengths on the line (2 = full wavelength).
    pub half_waves: u32,
    /// Round-trip group delay including mirror dispersion [s].
    pub round_trip_time: f64,
}

impl DissipatorMode {
    pub fn freq_hz(&self) -> f64 {
        self.omega / TAU
    }

    pub fn is_full_wave(&self) -> bool {
        self.half_waves == 2
    }

    /// Free spectral range over linewidth.
    pub fn finesse(&self) -> Option<f64> {
        self.kappa.map(|k| TAU / self.round_trip_time / k)
    }
}

/// Uniform scan spacing of the root search [Hz].
pub const MODE_SCAN_STEP_HZ: f64 = 0.5e6;
/// Bracket width at which bisection stops [Hz].
pub const MODE_ROOT_TOL_HZ: f64 = 1e-2;
const DISPERSION_STEP_HZ: f64 = 1e3;

fn wrap(phase: f64) -> f64 {
    let mut p = phase.rem_euclid(TAU);
    if p > PI {
        p -= TAU;
    }
    p
}

impl Cavity {
    /// LP filter at both ends of `line`, mirror-symmetric.
    pub fn symmetric(line: LineParams, lp_filter: NetworkChain) -> Self {
        Self {
            line,
            left: CavityBoundary::Filter(lp_filter.clone()),
            right: CavityBoundary::Filter(lp_filter),
        }
    }

    pub fn mirror_product(&self, omega: f64) -> Result<Complex64, ModeError> {
        Ok(self.left.reflection(omega, self.line.z0)?
            * self.right.reflection(omega, self.line.z0)?)
    }

    /// `arg(Γ_L Γ_R e^{−2iβL})` wrapped to (−π, π].
    pub fn round_trip_phase(&self, omega: f64) -> Result<f64, ModeError> {
        let p = self.mirror_product(omega)?;
        Ok(wrap(
            p.arg() - 2.0 * self.line.beta(omega) * self.line.length,
        ))
    }

    /// d/dω of the unwrapped round-trip phase: `2L/v − d arg(Γ_L Γ_R)/dω`.
    pub fn round_trip_time(&self, omega: f64) -> Result<f64, ModeError> {
        let dw = TAU * DISPERSION_STEP_HZ;
        let hi = self.mirror_product(omega + dw)?;
        let lo = self.mirror_product(omega - dw)?;
        let mirror_delay = if hi.norm() > 0.0 && lo.norm() > 0.0 {
            (hi / lo).arg() / (2.0 * dw)
        } else {
            0.0
        };
        Ok(2.0 * self.line.length / self.line.phase_velocity - mirror_delay)
    }

    fn half_wave_count(&self, omega: f64) -> Result<u32, ModeError> {
        let phi = self.mirror_product(omega)?.arg();
        let m = ((2.0 * self.line.beta(omega) * self.line.length - phi) / TAU).round();
        Ok(m.max(0.0) as u32)
    }

    /// Two-port of the whole filter–line–filter structure (filter boundaries only).
    pub fn chain(&self) -> Result<NetworkChain, ModeError> {
        let (Some(l), Some(r)) = (self.left.as_chain(), self.right.as_chain()) else {
            return Err(ModeError::InvalidParameter(
                "through-chain needs filter boundaries at both ends".into(),
            ));
        };
        let mid =
            NetworkChain::new(vec![TwoPortElement::line("line", self.line)]).with_z_ref(l.z_ref);
        Ok(l.then(&mid).then(&r.reversed()))
    }

    /// Round-trip power survival `|Γ_L Γ_R|² e^{−4αL}`.
    pub fn round_trip_reflectance(&self, omega: f64) -> Result<f64, ModeError> {
        Ok(self.mirror_product(omega)?.norm_sqr()
            * (-4.0 * self.line.attenuation * self.line.length).exp())
    }
}

/// Modes in `band` (Hz): uniform scan plus bisection of the phase condition.
pub fn find_modes(cavity: &Cavity, band: (f64, f64)) -> Result<Vec<DissipatorMode>, ModeError> {
    cavity.line.validate()?;
    let (lo, hi) = band;
    if !(lo > 0.0 && hi > lo) {
        return Err(ModeError::InvalidParameter(format!("bad band {lo}:{hi}")));
    }
    let n = ((hi - lo) / MODE_SCAN_STEP_HZ).ceil() as usize;
    let theta = |f: f64| cavity.round_trip_phase(TAU * f);
    let mut modes = Vec::new();
    let mut fa = lo;
    let mut ta = theta(fa)?;
    for k in 1..=n {
        let fb = (lo + k as f64 * MODE_SCAN_STEP_HZ).min(hi);
        let tb = theta(fb)?;
        // a genuine root, not the ±π wrap
        if ta.signum() != tb.signum() && (ta - tb).abs() < PI {
            let f = bisect_phase(&theta, fa, fb, ta)?;
            let omega = TAU * f;
            let tau = cavity.round_trip_time(omega)?;
            let kappa = match kappa_round_trip(cavity.round_trip_reflectance(omega)?, tau) {
                Ok(k) => Some(k),
                Err(ModeError::ZeroLoss) => None,
                Err(e) => return Err(e),
            };
            modes.push(DissipatorMode {
                omega,
                kappa,
                half_waves: cavity.half_wave_count(omega)?,
                round_trip_time: tau,
            });
        }
        fa = fb;
        ta = tb;
    }
    Ok(modes)
}

fn bisect_phase<F>(theta: &F, mut a: f64, mut b: f64, mut ta: f64) -> Result<f64, ModeError>
where
    F: Fn(f64) -> Result<f64, ModeError>,
{
    while b - a > MODE_ROOT_TOL_HZ {
        let m = 0.5 * (a + b);
        let tm = theta(m)?;
        if tm == 0.0 {
            return Ok(m);
        }
        if tm.signum() == ta.signum() {
            a = m;
            ta = tm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// κ = −ln(R_rt) / τ_rt for round-trip power survival `reflectance`.
pub fn kappa_round_trip(reflectance: f64, round_trip_time: f64) -> Result<f64, ModeError> {
    if !(round_trip_time > 0.0) {
        return Err(ModeError::InvalidParameter(format!(
            "round-trip time must be positive, got {round_trip_time}"
        )));
    }
    if !(reflectance < 1.0 - 1e-15) {
        return Err(ModeError::ZeroLoss);
    }
    Ok(-reflectance.ln() / round_trip_time)
}

/// Linewidth of `mode` from mirror leakage and line attenuation.
pub fn linewidth_roundtrip(cavity: &Cavity, mode: &DissipatorMode) -> Result<f64, ModeError> {
    kappa_round_trip(
        cavity.round_trip_reflectance(mode.omega)?,
        cavity.round_trip_time(mode.omega)?,
    )
}

/// Attenuation α [Np/m] that brings the mode linewidth to `kappa_target` [rad/s].
pub fn required_attenuation(
    cavity: &Cavity,
    mode: &DissipatorMode,
    kappa_target: f64,
) -> Result<f64, ModeError> {
    let tau = cavity.round_trip_time(mode.omega)?;
    let leak = -cavity.mirror_product(mode.omega)?.norm_sqr().ln();
    let alpha = (kappa_target * tau - leak) / (4.0 * cavity.line.length);
    if alpha < 0.0 {
        return Err(ModeError::TargetBelowLeakage {
            leakage_hz: leak / tau / TAU,
            target_hz: kappa_target / TAU,
        });
    }
    Ok(alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinewidthEstimate {
    /// Fitted centre [rad/s].
    pub omega: f64,
    /// Fitted FWHM of |S21|² [rad/s].
    pub kappa: f64,
    pub fit: LorentzianFit,
}

impl LinewidthEstimate {
    pub fn warning(&self) -> Option<String> {
        self.fit.is_poor().then(|| {
            format!(
                "poor Lorentzian fit: relative rms residual {:.3e}",
                self.fit.relative_rms
            )
        })
    }
}

/// Lorentzian fit of |S21|² of `chain` over `grid`.
pub fn linewidth_lorentzian(
    chain: &NetworkChain,
    grid: &FrequencyGrid,
) -> Result<LinewidthEstimate, ModeError> {
    let sweep = sweep_s_params(chain, grid)?;
    let power: Vec<f64> = sweep.iter().map(|p| p.s.s21.norm_sqr()).collect();
    let fit = fit_lorentzian(grid.freqs(), &power)?;
    Ok(LinewidthEstimate {
        omega: TAU * fit.center_hz,
        kappa: TAU * fit.fwhm_hz,
        fit,
    })
}

/// Phase velocity placing the `half_waves` mode exactly at `omega`, for the given boundaries.
///
/// Mirror reflection does not depend on the line, so this is closed-form:
/// `2βL − arg(Γ_L Γ_R) = 2πm` with `β = ω/v`.
pub fn calibrate_phase_velocity(
    cavity: &Cavity,
    omega: f64,
    half_waves: u32,
) -> Result<f64, ModeError> {
    let phi = cavity.mirror_product(omega)?.arg();
    let beta = (TAU * half_waves as f64 + phi) / (2.0 * cavity.line.length);
    if !(beta > 0.0) {
        return Err(ModeError::InvalidParameter(format!(
            "no positive phase velocity for {half_waves} half waves"
        )));
    }
    Ok(omega / beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Suppression {
    pub linear: f64,
    pub db: f64,
}

/// Purcell suppression `(1 − |S11|²)/|1 − S11|²` of a matched filter.
pub fn purcell_suppression(s11: Complex64) -> Result<Suppression, ModeError> {
    if s11.norm() > 1.0 + 1e-12 {
        return Err(ModeError::InvalidParameter(format!(
            "|S11| = {} exceeds 1",
            s11.norm()
        )));
    }
    let den = (Complex64::new(1.0, 0.0) - s11).norm_sqr();
    if den == 0.0 {
        return Err(ModeError::OpenCircuitSingularity);
    }
    let linear = ((1.0 - s11.norm_sqr()) / den).max(0.0);
    Ok(Suppression {
        linear,
        db: 10.0 * linear.log10(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rf::{LadderTopology, LadderValues, DESIGN_C2, DESIGN_L2};
    use approx::assert_relative_eq;

    fn ideal_cavity(v: f64) -> Cavity {
        Cavity {
            line: LineParams {
                z0: 50.0,
                length: 0.025,
                phase_velocity: v,
                attenuation: 0.0,
            },
            left: CavityBoundary::short(),
            right: CavityBoundary::short(),
        }
    }

    #[test]
    fn matched_and_shorted_terminations() {
        let matched = CavityBoundary::Load(Component::Resistor { ohm: 50.0 });
        assert_eq!(matched.reflection(1e10, 50.0).unwrap().norm(), 0.0);
        let short = CavityBoundary::Load(Component::Resistor { ohm: 0.0 });
        assert_eq!(
            short.reflection(1e10, 50.0).unwrap(),
            Complex64::new(-1.0, 0.0)
        );
    }

    #[test]
    fn ideal_mirror_modes() {
        // f_n = n v / 2L: n = 1 → 2.115 GHz, n = 2 → 4.23 GHz
        let cav = ideal_cavity(1.0575e8);
        let modes = find_modes(&cav, (1e9, 5e9)).unwrap();
        assert_eq!(modes.len(), 2);
        assert!((modes[0].freq_hz() - 2.115e9).abs() < 1e5);
        assert_eq!(modes[0].half_waves, 1);
        assert!((modes[1].freq_hz() - 4.23e9).abs() < 1e5);
        assert!(modes[1].is_full_wave());
        assert!(modes[1].kappa.is_none());
        assert_relative_eq!(
            modes[1].round_trip_time,
            0.05 / 1.0575e8,
            max_relative = 1e-9
        );

        let above_cutoff = find_modes(&cav, (3.35e9, 5e9)).unwrap();
        assert_eq!(above_cutoff.len(), 1);
    }

    #[test]
    fn perfect_mirrors_have_zero_loss() {
        let cav = ideal_cavity(1.0575e8);
        let mode = find_modes(&cav, (4e9, 4.5e9)).unwrap()[0];
        assert!(matches!(
            linewidth_roundtrip(&cav, &mode),
            Err(ModeError::ZeroLoss)
        ));
    }

    #[test]
    fn leaky_mirror_linewidth_by_hand() {
        // −ln((1 − 1e-3)²)/0.473 ns / 2π ≈ 0.673 MHz
        let k = kappa_round_trip((1.0 - 1e-3f64).powi(2), 0.473e-9).unwrap();
        assert_relative_eq!(k / TAU, 0.6733e6, max_relative = 1e-3);
    }

    #[test]
    fn attenuation_inversion_round_trips() {
        let lp = LadderTopology::lowpass(5).build(&LadderValues {
            inductance: DESIGN_L2,
            capacitance: DESIGN_C2,
        });
        let mut cav = Cavity::symmetric(LineParams::from_permittivity(50.0, 0.025, 6.45, 0.0), lp);
        cav.line.phase_velocity = calibrate_phase_velocity(&cav, TAU * 4.23e9, 2).unwrap();
        let mode = find_modes(&cav, (4.0e9, 4.5e9)).unwrap()[0];
        let alpha = required_attenuation(&cav, &mode, TAU * 15e6).unwrap();
        cav.line.attenuation = alpha;
        assert_relative_eq!(
            linewidth_roundtrip(&cav, &mode).unwrap(),
            TAU * 15e6,
            max_relative = 1e-9
        );
    }

    #[test]
    fn suppression_limits() {
        let m = purcell_suppression(Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(m.linear, 1.0);
        assert_eq!(m.db, 0.0);
        let s = purcell_suppression(Complex64::new(-1.0, 0.0)).unwrap();
        assert_eq!(s.linear, 0.0);
        assert_eq!(s.db, f64::NEG_INFINITY);
        assert!(matches!(
            purcell_suppression(Complex64::new(1.0, 0.0)),
            Err(ModeError::OpenCircuitSingularity)
        ));
    }

    #[test]
    fn calibration_lands_mode() {
        let lp = LadderTopology::lowpass(5).build(&LadderValues {
            inductance: DESIGN_L2,
            capacitance: DESIGN_C2,
        });
        let mut cav = Cavity::symmetric(LineParams::from_permittivity(50.0, 0.025, 6.45, 0.0), lp);
        let w = TAU * 4.23e9;
        cav.line.phase_velocity = calibrate_phase_velocity(&cav, w, 2).unwrap();
        let modes = find_modes(&cav, (4.0e9, 4.5e9)).unwrap();
        assert_eq!(modes.len(), 1);
        assert!((modes[0].freq_hz() - 4.23e9).abs() < 1.0);
        assert_eq!(modes[0].half_waves, 2);
    }
}
