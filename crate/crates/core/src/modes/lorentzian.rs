use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use super::ModeError;

/// Least-squares fit of `A / (1 + ((f − f0)/(w/2))²) + B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzianFit {
    pub center_hz: f64,
    /// Full width at half maximum [Hz].
    pub fwhm_hz: f64,
    pub amplitude: f64,
    pub baseline: f64,
    /// RMS residual relative to the fitted amplitude.
    pub relative_rms: f64,
    pub iterations: usize,
}

/// Relative RMS above which a fit is reported as poor.
pub const POOR_FIT_THRESHOLD: f64 = 1e-2;

impl LorentzianFit {
    pub fn is_poor(&self) -> bool {
        !(self.relative_rms <= POOR_FIT_THRESHOLD)
    }

    pub fn eval(&self, f: f64) -> f64 {
        let u = (f - self.center_hz) / (0.5 * self.fwhm_hz);
        self.amplitude / (1.0 + u * u) + self.baseline
    }
}

const MAX_ITER: usize = 500;

/// Levenberg–Marquardt fit initialised from the peak sample and its half-maximum crossings.
pub fn fit_lorentzian(freqs: &[f64], y: &[f64]) -> Result<LorentzianFit, ModeError> {
    if freqs.len() != y.len() || freqs.len() < 5 {
        return Err(ModeError::FitFailed(format!(
            "need ≥ 5 matching samples, got {} / {}",
            freqs.len(),
            y.len()
        )));
    }
    let (ipk, &ypk) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let ymin = y.iter().copied().fold(f64::INFINITY, f64::min);
    let half = 0.5 * (ypk + ymin);
    let crossing = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = ipk;
        for i in range {
            if y[i] < half {
                let t = (y[prev] - half) / (y[prev] - y[i]);
                return Some(freqs[prev] + t * (freqs[i] - freqs[prev]));
            }
            prev = i;
        }
        None
    };
    let left = crossing(&mut (0..ipk).rev());
    let right = crossing(&mut (ipk + 1..y.len()));
    let width0 = match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (freqs[ipk] - l),
        (None, Some(r)) => 2.0 * (r - freqs[ipk]),
        (None, None) => {
            return Err(ModeError::FitFailed(
                "peak has no half-maximum crossing in the band".into(),
            ))
        }
    };
    if !(width0 > 0.0) {
        return Err(ModeError::FitFailed("degenerate peak width".into()));
    }

    // Normalised coordinates keep the normal equations well conditioned.
    let f_ref = freqs[ipk];
    let s = 0.5 * width0;
    let scale = ypk - ymin;
    if !(scale > 0.0) {
        return Err(ModeError::FitFailed("flat data".into()));
    }
    let xs: Vec<f64> = freqs.iter().map(|f| (f - f_ref) / s).collect();
    let ys: Vec<f64> = y.iter().map(|v| (v - ymin) / scale).collect();

    // p = [x0, half-width, amplitude, baseline]
    let mut p = Vector4::new(0.0, 1.0, 1.0, 0.0);
    let cost = |p: &Vector4<f64>| -> f64 {
        xs.iter()
            .zip(&ys)
            .map(|(x, yv)| {
                let u = (x - p[0]) / p[1];
                let r = yv - (p[2] / (1.0 + u * u) + p[3]);
                r * r
            })
            .sum()
    };
    let mut c = cost(&p);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    for it in 0..MAX_ITER {
        iterations = it + 1;
        let mut jtj = Matrix4::<f64>::zeros();
        let mut jtr = Vector4::<f64>::zeros();
        for (x, yv) in xs.iter().zip(&ys) {
            let u = (x - p[0]) / p[1];
            let d = 1.0 + u * u;
            let r = yv - (p[2] / d + p[3]);
            let j = Vector4::new(
                p[2] * 2.0 * u / (p[1] * d * d),
                p[2] * 2.0 * u * u / (p[1] * d * d),
                1.0 / d,
                1.0,
            );
            jtj += j * j.transpose();
            jtr += j * r;
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj;
            for k in 0..4 {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = a.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let ct = if trial[1] > 0.0 {
                cost(&trial)
            } else {
                f64::INFINITY
            };
            if ct < c {
                let done = (c - ct) <= 1e-15 * c.max(1e-300) || step.norm() < 1e-13;
                p = trial;
                c = ct;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                if done {
                    lambda = f64::INFINITY;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved || lambda.is_infinite() {
            break;
        }
    }

    let n = xs.len() as f64;
    let relative_rms = (c / n).sqrt() / p[2].abs().max(1e-300);
    Ok(LorentzianFit {
        center_hz: f_ref + p[0] * s,
        fwhm_hz: 2.0 * p[1] * s,
        amplitude: p[2] * scale,
        baseline: p[3] * scale + ymin,
        relative_rms,
        iterations,
    })
}
