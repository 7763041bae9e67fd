use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{to_db, Abcd, NetworkError, SParams, TwoPortElement};

pub const DEFAULT_Z_REF: f64 = 50.0;

/// Upper frequency bound accepted by sweeps [Hz].
pub const MAX_SWEEP_FREQ_HZ: f64 = 20e9;

/// Ordered cascade of two-port elements, input port first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkChain {
    pub elements: Vec<TwoPortElement>,
    pub z_ref: f64,
}

impl NetworkChain {
    pub fn new(elements: Vec<TwoPortElement>) -> Self {
        Self {
            elements,
            z_ref: DEFAULT_Z_REF,
        }
    }

    pub fn with_z_ref(mut self, z_ref: f64) -> Self {
        self.z_ref = z_ref;
        self
    }

    /// Chain `self` followed by `other`.
    pub fn then(&self, other: &NetworkChain) -> NetworkChain {
        let mut elements = self.elements.clone();
        elements.extend(other.elements.iter().cloned());
        NetworkChain {
            elements,
            z_ref: self.z_ref,
        }
    }

    /// The same chain driven from its output port. Every element kind here is
    /// symmetric, so this is just the reversed element order.
    pub fn reversed(&self) -> NetworkChain {
        NetworkChain {
            elements: self.elements.iter().rev().cloned().collect(),
            z_ref: self.z_ref,
        }
    }

    pub fn is_lossless(&self) -> bool {
        self.elements.iter().all(TwoPortElement::is_lossless)
    }

    /// Ordered ABCD product at `omega`.
    pub fn cascade(&self, omega: f64) -> Result<Abcd, NetworkError> {
        let mut it = self.elements.iter();
        let first = it.next().ok_or(NetworkError::EmptyChain)?.abcd(omega)?;
        it.try_fold(first, |acc, el| Ok(acc * el.abcd(omega)?))
    }

    pub fn s_params(&self, omega: f64) -> Result<SParams, NetworkError> {
        self.cascade(omega)?
            .to_s(self.z_ref)
            .map_err(|e| e.at_frequency(omega / TAU))
    }

    /// Input impedance at port 1 with port 2 terminated in the reference impedance.
    pub fn input_impedance(&self, omega: f64) -> Result<Complex64, NetworkError> {
        Ok(self
            .cascade(omega)?
            .input_impedance(Complex64::new(self.z_ref, 0.0)))
    }

    pub fn s21_db(&self, freq_hz: f64) -> Result<f64, NetworkError> {
        Ok(self.s_params(TAU * freq_hz)?.s21_db())
    }
}

/// Monotone frequency grid in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    freqs: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(freqs: Vec<f64>) -> Result<Self, NetworkError> {
        if freqs.is_empty() {
            return Err(NetworkError::InvalidGrid("empty frequency grid".into()));
        }
        if freqs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NetworkError::InvalidGrid(
                "frequencies must be strictly increasing".into(),
            ));
        }
        let (lo, hi) = (freqs[0], freqs[freqs.len() - 1]);
        if !(lo > 0.0 && hi <= MAX_SWEEP_FREQ_HZ) {
            return Err(NetworkError::InvalidGrid(format!(
                "grid [{lo}, {hi}] Hz outside (0, 20 GHz]"
            )));
        }
        Ok(Self { freqs })
    }

    /// Linear grid from `start` to `stop` inclusive with spacing `step`.
    pub fn linear(start: f64, stop: f64, step: f64) -> Result<Self, NetworkError> {
        if !(step > 0.0) || !(stop >= start) {
            return Err(NetworkError::InvalidGrid(format!(
                "bad linear grid {start}:{stop} step {step}"
            )));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        Self::new((0..=n).map(|k| start + k as f64 * step).collect())
    }

    /// `n` evenly spaced points spanning `[start, stop]`.
    pub fn linspace(start: f64, stop: f64, n: usize) -> Result<Self, NetworkError> {
        if n < 2 {
            return Self::new(vec![start]);
        }
        let step = (stop - start) / (n - 1) as f64;
        Self::new((0..n).map(|k| start + k as f64 * step).collect())
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub freq_hz: f64,
    pub s: SParams,
}

impl SweepPoint {
    pub fn s21_db(&self) -> f64 {
        to_db(self.s.s21)
    }
}

/// S-parameters of `chain` at every grid frequency, in grid order.
pub fn sweep_s_params(
    chain: &NetworkChain,
    grid: &FrequencyGrid,
) -> Result<Vec<SweepPoint>, NetworkError> {
    grid.freqs()
        .par_iter()
        .map(|&f| {
            let s = chain.s_params(TAU * f).map_err(|e| e.at_frequency(f))?;
            Ok(SweepPoint { freq_hz: f, s })
        })
        .collect()
}

/// Absolute tolerance of the cutoff bisection [Hz].
pub const CUTOFF_TOL_HZ: f64 = 1e3;
const CUTOFF_SCAN_POINTS: usize = 400;

/// First frequency in `band` where |S21| crosses `target_db`.
pub fn find_cutoff(
    chain: &NetworkChain,
    target_db: f64,
    band: (f64, f64),
) -> Result<f64, NetworkError> {
    let (lo, hi) = band;
    if !(lo > 0.0 && hi > lo) {
        return Err(NetworkError::InvalidGrid(format!("bad band {lo}:{hi}")));
    }
    let h = |f: f64| chain.s21_db(f).map(|db| db - target_db);
    let step = (hi - lo) / CUTOFF_SCAN_POINTS as f64;
    let mut a = lo;
    let mut ha = h(a)?;
    for k in 1..=CUTOFF_SCAN_POINTS {
        let b = if k == CUTOFF_SCAN_POINTS {
            hi
        } else {
            lo + k as f64 * step
        };
        let hb = h(b)?;
        if ha == 0.0 {
            return Ok(a);
        }
        if ha.signum() != hb.signum() {
            return bisect(&h, a, b, ha);
        }
        a = b;
        ha = hb;
    }
    Err(NetworkError::NoCrossing {
        target_db,
        lo_hz: lo,
        hi_hz: hi,
        lo_db: chain.s21_db(lo)?,
        hi_db: chain.s21_db(hi)?,
    })
}

fn bisect<F>(h: &F, mut a: f64, mut b: f64, mut ha: f64) -> Result<f64, NetworkError>
where
    F: Fn(f64) -> Result<f64, NetworkError>,
{
    while b - a > CUTOFF_TOL_HZ {
        let m = 0.5 * (a + b);
        let hm = h(m)?;
        if hm == 0.0 {
            return Ok(m);
        }
        if hm.signum() == ha.signum() {
            a = m;
            ha = hm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rf::Component;

    fn res(ohm: f64) -> Component {
        Component::Resistor { ohm }
    }

    #[test]
    fn empty_chain_is_usage_error() {
        let chain = NetworkChain::new(vec![]);
        assert!(matches!(chain.cascade(1.0), Err(NetworkError::EmptyChain)));
    }

    #[test]
    fn singleton_product() {
        let el = TwoPortElement::shunt("C", Component::Capacitor { farad: 1e-12 });
        let chain = NetworkChain::new(vec![el.clone()]);
        let w = TAU * 3e9;
        assert_eq!(chain.cascade(w).unwrap(), el.abcd(w).unwrap());
    }

    #[test]
    fn series_then_shunt() {
        let chain = NetworkChain::new(vec![
            TwoPortElement::series("R", res(50.0)),
            TwoPortElement::shunt("G", res(50.0)),
        ]);
        let m = chain.cascade(1.0).unwrap();
        let c = |x: f64| Complex64::new(x, 0.0);
        assert!(m.max_abs_diff(&Abcd::new(c(2.0), c(50.0), c(0.02), c(1.0))) < 1e-15);
    }

    #[test]
    fn rc_lowpass_single_pole_cutoff() {
        // Shunt C between two 50 Ω ports sees the Thevenin resistance R = 25 Ω,
        // so the half-power point is the single-pole f_c = 1/(2πRC).
        let c = 1e-12;
        let chain = NetworkChain::new(vec![TwoPortElement::shunt(
            "C",
            Component::Capacitor { farad: c },
        )]);
        let target = -10.0 * 2f64.log10();
        let fc = find_cutoff(&chain, target, (1e8, 19e9)).unwrap();
        let oracle = 1.0 / (TAU * 25.0 * c);
        assert!((fc - oracle).abs() < 1e6, "{fc} vs {oracle}");
    }

    #[test]
    fn no_crossing_reports_endpoints() {
        let chain = NetworkChain::new(vec![TwoPortElement::series("R", res(1.0))]);
        match find_cutoff(&chain, -3.0, (1e9, 2e9)) {
            Err(NetworkError::NoCrossing { lo_db, hi_db, .. }) => {
                assert!(lo_db > -1.0 && hi_db > -1.0)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grid_validation() {
        assert!(FrequencyGrid::new(vec![]).is_err());
        assert!(FrequencyGrid::new(vec![2e9, 1e9]).is_err());
        assert!(FrequencyGrid::new(vec![0.0, 1e9]).is_err());
        assert!(FrequencyGrid::new(vec![1e9, 21e9]).is_err());
        let g = FrequencyGrid::linear(1e9, 10e9, 1e6).unwrap();
        assert_eq!(g.len(), 9001);
        assert_eq!(g.freqs()[9000], 10e9);
    }

    #[test]
    fn through_sweep() {
        let chain = NetworkChain::new(vec![TwoPortElement::series(
            "short",
            Component::Impedance {
                ohm: Complex64::new(0.0, 0.0),
            },
        )]);
        let grid = FrequencyGrid::linear(1e9, 2e9, 1e8).unwrap();
        for p in sweep_s_params(&chain, &grid).unwrap() {
            assert_eq!(p.s.s21, Complex64::new(1.0, 0.0));
        }
    }
}
