use serde::Serialize;

/// Features of a (possibly) damped oscillation `p(t)` above a known baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DampedFit {
    /// Whether at least one genuine interior minimum was found.
    pub oscillating: bool,
    /// Time of the first interior minimum [same unit as t].
    pub first_min: Option<f64>,
    /// 1/rate of the exponential envelope [same unit as t].
    pub envelope: Option<f64>,
    /// Points used for the envelope regression.
    pub envelope_points: usize,
}

/// A dip or bump must exceed this fraction of the initial excess to count.
const FEATURE_FLOOR: f64 = 1e-3;
/// Samples closer to the baseline than this are ignored by the envelope fit.
const NOISE_FLOOR: f64 = 1e-7;

/// Vertex of the parabola through three equally spaced samples.
fn refine(t: &[f64], p: &[f64], i: usize) -> (f64, f64) {
    let (a, b, c) = (p[i - 1], p[i], p[i + 1]);
    let h = t[i + 1] - t[i];
    let den = a - 2.0 * b + c;
    if den == 0.0 {
        return (t[i], b);
    }
    let x = 0.5 * (a - c) / den;
    (t[i] + x * h, b - 0.25 * (a - c) * x)
}

fn extrema(t: &[f64], p: &[f64], maxima: bool) -> Vec<(f64, f64)> {
    (1..p.len().saturating_sub(1))
        .filter(|&i| {
            if maxima {
                p[i] > p[i - 1] && p[i] >= p[i + 1]
            } else {
                p[i] < p[i - 1] && p[i] <= p[i + 1]
            }
        })
        .map(|i| refine(t, p, i))
        .collect()
}

/// Least-squares slope of `ln y` against `t`.
fn log_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y.ln() - my);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Envelope and first minimum of `p` on a uniform grid `t`.
///
/// Oscillating traces use the local maxima of `p − baseline` for the envelope;
/// monotone traces use every sample above the noise floor.
pub fn analyze_damped(t: &[f64], p: &[f64], baseline: f64) -> DampedFit {
    let excess: Vec<f64> = p.iter().map(|v| v - baseline).collect();
    let scale = excess.iter().copied().fold(0.0, f64::max);
    let floor = FEATURE_FLOOR * scale;

    let maxima = extrema(t, &excess, true);
    let minima = extrema(t, &excess, false);
    // a minimum is genuine if the trace rises appreciably after it
    let first_min = minima
        .iter()
        .find(|&&(tm, vm)| maxima.iter().any(|&(tx, vx)| tx > tm && vx - vm > floor));

    let pts: Vec<(f64, f64)> = if first_min.is_some() {
        maxima
            .into_iter()
            .filter(|&(_, v)| v > NOISE_FLOOR)
            .collect()
    } else {
        t.iter()
            .zip(&excess)
            .skip(1)
            .filter(|&(_, &v)| v > NOISE_FLOOR)
            .map(|(&a, &b)| (a, b))
            .collect()
    };
    let slope = log_slope(&pts);
    DampedFit {
        oscillating: first_min.is_some(),
        first_min: first_min.map(|&(tm, _)| tm),
        envelope: slope.filter(|s| *s < 0.0).map(|s| -1.0 / s),
        envelope_points: pts.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_damped_cosine() {
        // e^{−t/20} cos²(πt/30): minima at 15, 45, ...
        let t: Vec<f64> = (0..=2000).map(|k| k as f64 * 0.1).collect();
        let p: Vec<f64> = t
            .iter()
            .map(|&x| (-x / 20.0f64).exp() * (std::f64::consts::PI * x / 30.0).cos().powi(2) + 0.01)
            .collect();
        let fit = analyze_damped(&t, &p, 0.01);
        assert!(fit.oscillating);
        assert!((fit.first_min.unwrap() - 15.0).abs() < 0.05);
        assert!((fit.envelope.unwrap() / 20.0 - 1.0).abs() < 0.02);
    }

    #[test]
    fn monotone_decay_flagged() {
        let t: Vec<f64> = (0..=200).map(|k| k as f64).collect();
        let p: Vec<f64> = t.iter().map(|&x| (-x / 30.0f64).exp()).collect();
        let fit = analyze_damped(&t, &p, 0.0);
        assert!(!fit.oscillating);
        assert!(fit.first_min.is_none());
        assert!((fit.envelope.unwrap() - 30.0).abs() < 1e-6);
    }

    #[test]
    fn flat_trace_has_no_envelope() {
        let t: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let fit = analyze_damped(&t, &[0.5; 10], 0.5);
        assert!(fit.envelope.is_none());
    }
}
