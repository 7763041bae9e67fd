//! Frequency-domain two-port analysis of lumped LC ladders and transmission lines.
//!
//! Conventions: `e^{+iωt}` time dependence, real reference impedance (50 Ω by
//! default), every element reciprocal and symmetric.

mod abcd;
mod chain;
mod diplexer;
mod element;
mod fit;
pub mod simplex;

pub use abcd::{to_db, Abcd, SParams};
pub use chain::{
    find_cutoff, sweep_s_params, FrequencyGrid, NetworkChain, SweepPoint, CUTOFF_TOL_HZ,
    DEFAULT_Z_REF, MAX_SWEEP_FREQ_HZ,
};
pub use diplexer::{diplexer_isolation, Branch, DiplexerPath, DiplexerSpec, IsolationReport};
pub use element::{Component, ElementKind, LineParams, TwoPortElement, SPEED_OF_LIGHT};
pub use fit::{
    design_diplexer, fit_elements, FitResult, FitTarget, LadderForm, LadderTopology, LadderValues,
    Response, WeightedTarget, DESIGN_C1, DESIGN_C2, DESIGN_L1, DESIGN_L2, FIT_TOLERANCE,
    HIGHPASS_CUTOFF_HZ, LOWPASS_CUTOFF_HZ,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetworkError {
    #[error("element `{element}` is not finite at ω = {omega:e} rad/s")]
    NonFinite { element: String, omega: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("network chain has no elements")]
    EmptyChain,
    #[error("singular network (A + B/Z + CZ + D = 0)")]
    Singular,
    #[error("singular network at {freq_hz:e} Hz")]
    SingularAt { freq_hz: f64 },
    #[error(
        "|S21| does not cross {target_db} dB in [{lo_hz:e}, {hi_hz:e}] Hz \
         (endpoints {lo_db:.2} dB, {hi_db:.2} dB)"
    )]
    NoCrossing {
        target_db: f64,
        lo_hz: f64,
        hi_hz: f64,
        lo_db: f64,
        hi_db: f64,
    },
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
}

impl NetworkError {
    /// Tags a singular-network error with the frequency it occurred at.
    pub fn at_frequency(self, freq_hz: f64) -> Self {
        match self {
            NetworkError::Singular => NetworkError::SingularAt { freq_hz },
            other => other,
        }
    }
}
