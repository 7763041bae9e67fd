//! Boltzmann conversions and a Gaussian single-shot readout model.
//!
//! Each transmon state owns an IQ centroid; a shot draws a true state from the
//! populations, then an isotropic Gaussian point around that state's centroid,
//! and is assigned to the nearest of the first `classes` centroids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK / std::f64::consts::TAU;
pub const BOLTZMANN: f64 = 1.380_649e-23;

pub const STATE_LABELS: [&str; 3] = ["g", "e", "f"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReadoutError {
    #[error("p_e = {0} is not thermal (need 0 < p_e < 0.5)")]
    NonThermal(f64),
    #[error("invalid readout model: {0}")]
    InvalidModel(String),
    #[error("invalid populations: {0}")]
    InvalidPopulations(String),
}

/// Bose occupation `1/(e^{ħω/k_B T} − 1)`; zero at T = 0.
pub fn bose_occupation(omega: f64, t_bath: f64) -> f64 {
    if t_bath <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (BOLTZMANN * t_bath)).exp_m1()
}

/// Two-level excited population `r/(1 + r)`, `r = exp(−ħω/k_B T)`.
pub fn thermal_population(omega: f64, t_bath: f64) -> f64 {
    if t_bath <= 0.0 {
        return 0.0;
    }
    let r = (-HBAR * omega / (BOLTZMANN * t_bath)).exp();
    r / (1.0 + r)
}

/// Inverse of [`thermal_population`].
pub fn effective_temperature(omega: f64, p_e: f64) -> Result<f64, ReadoutError> {
    if p_e == 0.0 {
        return Ok(0.0);
    }
    if !(p_e > 0.0 && p_e < 0.5) {
        return Err(ReadoutError::NonThermal(p_e));
    }
    Ok(HBAR * omega / (BOLTZMANN * ((1.0 - p_e) / p_e).ln()))
}

/// Probability that a unit Gaussian exceeds `x`.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutModel {
    /// IQ centroid per physical state, indexed g, e, f, ...
    pub centroids: Vec<[f64; 2]>,
    pub sigma: f64,
    /// Number of states the discriminator distinguishes (the first `classes` centroids).
    pub classes: usize,
    pub shots: usize,
    pub seed: u64,
}

/// Centroid spacing in units of σ: `Q(d/2σ) ≈ 0.3 %`.
pub const DEFAULT_SEPARATION_SIGMA: f64 = 5.5;

impl Default for ReadoutModel {
    fn default() -> Self {
        Self::colinear(3, 3, 1.0, DEFAULT_SEPARATION_SIGMA)
    }
}

impl ReadoutModel {
    /// Centroids on the I axis at multiples of `separation·σ`.
    pub fn colinear(states: usize, classes: usize, sigma: f64, separation: f64) -> Self {
        Self {
            centroids: (0..states)
                .map(|k| [k as f64 * separation * sigma, 0.0])
                .collect(),
            sigma,
            classes,
            shots: 100_000,
            seed: 0,
        }
    }

    /// Same centroids, discriminating only the first `classes` states.
    pub fn with_classes(&self, classes: usize) -> Self {
        Self {
            classes,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ReadoutError> {
        let bad = |m: String| Err(ReadoutError::InvalidModel(m));
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be ≥ 0, got {}", self.sigma));
        }
        if self.classes < 2 || self.classes > self.centroids.len() {
            return bad(format!(
                "classes = {} with {} centroids",
                self.classes,
                self.centroids.len()
            ));
        }
        for (i, a) in self.centroids.iter().enumerate() {
            if !(a[0].is_finite() && a[1].is_finite()) {
                return bad(format!("centroid {i} is not finite"));
            }
            for b in &self.centroids[..i] {
                if a == b {
                    return bad(format!("centroid {i} duplicates an earlier one"));
                }
            }
        }
        Ok(())
    }

    /// Nearest of the first `classes` centroids; ties go to the lower index.
    pub fn classify_point(&self, p: [f64; 2]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, c) in self.centroids[..self.classes].iter().enumerate() {
            let d = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
            if d < best_d {
                best = k;
                best_d = d;
            }
        }
        best
    }

    /// Analytic misassignment between two adjacent centroids, `Q(d/2σ)`.
    pub fn pair_error(&self, a: usize, b: usize) -> f64 {
        let (ca, cb) = (self.centroids[a], self.centroids[b]);
        let d = ((ca[0] - cb[0]).powi(2) + (ca[1] - cb[1]).powi(2)).sqrt();
        gaussian_tail(d / (2.0 * self.sigma))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shot {
    pub iq: [f64; 2],
    pub true_state: usize,
}

fn check_populations(pops: &[f64], states: usize) -> Result<(), ReadoutError> {
    if pops.is_empty() || pops.len() > states {
        return Err(ReadoutError::InvalidPopulations(format!(
            "{} populations for {} centroids",
            pops.len(),
            states
        )));
    }
    if pops.iter().any(|p| !(*p >= 0.0)) {
        return Err(ReadoutError::InvalidPopulations(format!(
            "negative entry in {pops:?}"
        )));
    }
    let s: f64 = pops.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(ReadoutError::InvalidPopulations(format!("sum is {s}")));
    }
    Ok(())
}

/// Generator for stream `stream` of `seed`; sweep cells and matrix rows use their index.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw(pops: &[f64], model: &ReadoutModel, n: usize, rng: &mut ChaCha20Rng) -> Vec<Shot> {
    let noise = Normal::new(0.0, model.sigma).expect("σ validated");
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut state = pops.len() - 1;
            for (k, p) in pops.iter().enumerate() {
                acc += p;
                if u < acc {
                    state = k;
                    break;
                }
            }
            let c = model.centroids[state];
            Shot {
                iq: [c[0] + noise.sample(rng), c[1] + noise.sample(rng)],
                true_state: state,
            }
        })
        .collect()
}

/// `model.shots` seeded shots from `pops` (stream 0 of `model.seed`).
pub fn sample_shots(pops: &[f64], model: &ReadoutModel) -> Result<Vec<Shot>, ReadoutError> {
    model.validate()?;
    check_populations(pops, model.centroids.len())?;
    Ok(draw(
        pops,
        model,
        model.shots,
        &mut stream_rng(model.seed, 0),
    ))
}

pub fn classify(points: &[[f64; 2]], model: &ReadoutModel) -> Vec<usize> {
    points.iter().map(|p| model.classify_point(*p)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssignmentMatrix {
    pub prepared: Vec<String>,
    pub assigned: Vec<String>,
    /// `p[i][j]` = P(assigned j | prepared i).
    pub p: Vec<Vec<f64>>,
    pub shots: usize,
}

impl AssignmentMatrix {
    pub fn get(&self, prepared: usize, assigned: usize) -> f64 {
        self.p[prepared][assigned]
    }

    /// Largest |row sum − 1|.
    pub fn row_sum_error(&self) -> f64 {
        self.p
            .iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Monte-Carlo assignment matrix, row `i` sampled on stream `i`.
pub fn assignment_matrix(
    rows: &[Vec<f64>],
    model: &ReadoutModel,
) -> Result<AssignmentMatrix, ReadoutError> {
    model.validate()?;
    if model.shots == 0 {
        return Err(ReadoutError::InvalidModel("shots must be > 0".into()));
    }
    for r in rows {
        check_populations(r, model.centroids.len())?;
    }
    let p = rows
        .par_iter()
        .enumerate()
        .map(|(i, pops)| {
            let mut rng = stream_rng(model.seed, i as u64);
            let mut counts = vec![0usize; model.classes];
            for s in draw(pops, model, model.shots, &mut rng) {
                counts[model.classify_point(s.iq)] += 1;
            }
            counts
                .into_iter()
                .map(|c| c as f64 / model.shots as f64)
                .collect()
        })
        .collect();
    let label = |k: usize| {
        STATE_LABELS
            .get(k)
            .map_or(format!("s{k}"), |s| s.to_string())
    };
    Ok(AssignmentMatrix {
        prepared: (0..rows.len()).map(label).collect(),
        assigned: (0..model.classes).map(label).collect(),
        p,
        shots: model.shots,
    })
}
