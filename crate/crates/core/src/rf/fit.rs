use serde::{Deserialize, Serialize};

use super::simplex::{nelder_mead, SimplexOptions};
use super::{Component, DiplexerSpec, NetworkChain, NetworkError, TwoPortElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    LowPass,
    HighPass,
}

/// Which element type sits at the ladder ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderForm {
    /// Series arm first (T).
    Tee,
    /// Shunt arm first (Pi).
    Pi,
}

/// Alternating series/shunt ladder with one inductance and one capacitance value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderTopology {
    pub response: Response,
    pub order: usize,
    pub form: LadderForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderValues {
    pub inductance: f64,
    pub capacitance: f64,
}

impl LadderValues {
    pub fn validate(&self) -> Result<(), NetworkError> {
        if !(self.inductance > 0.0 && self.capacitance > 0.0)
            || !(self.inductance.is_finite() && self.capacitance.is_finite())
        {
            return Err(NetworkError::InvalidParameter(format!(
                "ladder values must be positive: L = {}, C = {}",
                self.inductance, self.capacitance
            )));
        }
        Ok(())
    }
}

// Lumped design values of the on-chip diplexer.
pub const DESIGN_C1: f64 = 0.266e-12;
pub const DESIGN_L1: f64 = 0.660e-9;
pub const DESIGN_C2: f64 = 1.809e-12;
pub const DESIGN_L2: f64 = 4.488e-9;

pub const LOWPASS_CUTOFF_HZ: f64 = 3.35e9;
pub const HIGHPASS_CUTOFF_HZ: f64 = 6.50e9;

impl LadderTopology {
    pub const DEFAULT_ORDER: usize = 5;

    pub fn lowpass(order: usize) -> Self {
        Self {
            response: Response::LowPass,
            order,
            form: LadderForm::Tee,
        }
    }

    pub fn highpass(order: usize) -> Self {
        Self {
            response: Response::HighPass,
            order,
            form: LadderForm::Tee,
        }
    }

    pub fn build(&self, values: &LadderValues) -> NetworkChain {
        let l = Component::Inductor {
            henry: values.inductance,
        };
        let c = Component::Capacitor {
            farad: values.capacitance,
        };
        let (series, shunt, s_tag, p_tag) = match self.response {
            Response::LowPass => (l, c, "L", "C"),
            Response::HighPass => (c, l, "C", "L"),
        };
        let elements = (0..self.order)
            .map(|k| {
                let series_arm = (k % 2 == 0) == (self.form == LadderForm::Tee);
                if series_arm {
                    TwoPortElement::series(format!("{s_tag}{k}"), series)
                } else {
                    TwoPortElement::shunt(format!("{p_tag}{k}"), shunt)
                }
            })
            .collect();
        NetworkChain::new(elements)
    }
}

/// Low-pass and high-pass ladders with the design element values, no fitting.
pub fn design_diplexer(order: usize) -> DiplexerSpec {
    let lp = LadderTopology::lowpass(order).build(&LadderValues {
        inductance: DESIGN_L2,
        capacitance: DESIGN_C2,
    });
    let hp = LadderTopology::highpass(order).build(&LadderValues {
        inductance: DESIGN_L1,
        capacitance: DESIGN_C1,
    });
    DiplexerSpec::new(lp, hp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FitTarget {
    /// |S21| equals `level_db` at `freq_hz`.
    Cutoff { freq_hz: f64, level_db: f64 },
    /// |S21| at `freq_hz` is at least `rejection_db` below 0 dB (one-sided).
    Stopband { freq_hz: f64, rejection_db: f64 },
}

impl FitTarget {
    pub fn cutoff(freq_hz: f64) -> Self {
        FitTarget::Cutoff {
            freq_hz,
            level_db: -3.0,
        }
    }

    /// Residual in dB; zero when the target is met.
    pub fn residual(&self, chain: &NetworkChain) -> Result<f64, NetworkError> {
        match *self {
            FitTarget::Cutoff { freq_hz, level_db } => Ok(chain.s21_db(freq_hz)? - level_db),
            FitTarget::Stopband {
                freq_hz,
                rejection_db,
            } => Ok((chain.s21_db(freq_hz)? + rejection_db).max(0.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedTarget {
    pub target: FitTarget,
    pub weight: f64,
}

impl From<FitTarget> for WeightedTarget {
    fn from(target: FitTarget) -> Self {
        Self {
            target,
            weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub values: LadderValues,
    /// Per-target residuals [dB], same order as the targets.
    pub residuals: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Objective below which targets count as met.
pub const FIT_TOLERANCE: f64 = 1e-12;

/// Fits the two ladder values to `targets` by a simplex search over log(L), log(C).
pub fn fit_elements(
    topology: &LadderTopology,
    targets: &[WeightedTarget],
    initial: LadderValues,
) -> Result<FitResult, NetworkError> {
    if targets.is_empty() {
        return Err(NetworkError::InvalidParameter("no fit targets".into()));
    }
    initial.validate()?;
    let values_at = |x: &[f64]| LadderValues {
        inductance: initial.inductance * x[0].exp(),
        capacitance: initial.capacitance * x[1].exp(),
    };
    let objective = |x: &[f64]| -> f64 {
        let chain = topology.build(&values_at(x));
        targets
            .iter()
            .map(|t| match t.target.residual(&chain) {
                Ok(r) => t.weight * r * r,
                Err(_) => f64::INFINITY,
            })
            .sum()
    };

    let start = objective(&[0.0, 0.0]);
    let (x, iterations, converged) = if start < FIT_TOLERANCE {
        (vec![0.0, 0.0], 0, true)
    } else {
        let r = nelder_mead(
            objective,
            &[0.0, 0.0],
            &SimplexOptions {
                initial_step: 0.05,
                ..Default::default()
            },
        );
        let met = r.f < FIT_TOLERANCE;
        (r.x, r.iterations, r.converged || met)
    };

    let values = values_at(&x);
    let chain = topology.build(&values);
    let residuals = targets
        .iter()
        .map(|t| t.target.residual(&chain))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FitResult {
        values,
        objective: objective(&x),
        residuals,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rf::find_cutoff;

    #[test]
    fn tee_ladder_layout() {
        let chain = LadderTopology::lowpass(5).build(&LadderValues {
            inductance: 1e-9,
            capacitance: 1e-12,
        });
        let names: Vec<_> = chain.elements.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["L0", "C1", "L2", "C3", "L4"]);
    }

    #[test]
    fn already_met_needs_no_iterations() {
        let topo = LadderTopology::lowpass(5);
        let init = LadderValues {
            inductance: DESIGN_L2,
            capacitance: DESIGN_C2,
        };
        let fc = find_cutoff(&topo.build(&init), -3.0, (1e9, 6e9)).unwrap();
        // Bisection leaves ~1e-6 dB error; use the achieved level as the target.
        let level = topo.build(&init).s21_db(fc).unwrap();
        let r = fit_elements(
            &topo,
            &[FitTarget::Cutoff {
                freq_hz: fc,
                level_db: level,
            }
            .into()],
            init,
        )
        .unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.converged);
        assert!(r.residuals[0].abs() < 1e-9);
    }

    #[test]
    fn stopband_target_is_one_sided() {
        let chain = LadderTopology::lowpass(5).build(&LadderValues {
            inductance: DESIGN_L2,
            capacitance: DESIGN_C2,
        });
        let met = FitTarget::Stopband {
            freq_hz: 8e9,
            rejection_db: 20.0,
        };
        assert_eq!(met.residual(&chain).unwrap(), 0.0);
        let missed = FitTarget::Stopband {
            freq_hz: 2e9,
            rejection_db: 20.0,
        };
        assert!(missed.residual(&chain).unwrap() > 15.0);
    }

    #[test]
    fn rejects_empty_targets_and_bad_start() {
        let topo = LadderTopology::lowpass(3);
        let ok = LadderValues {
            inductance: 1e-9,
            capacitance: 1e-12,
        };
        assert!(fit_elements(&topo, &[], ok).is_err());
        let bad = LadderValues {
            inductance: -1e-9,
            capacitance: 1e-12,
        };
        assert!(fit_elements(&topo, &[FitTarget::cutoff(3e9).into()], bad).is_err());
    }
}
