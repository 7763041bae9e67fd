//! Simulation toolkit for a diplexer-based qubit reset architecture.
//!
//! * [`rf`] – ABCD/S-parameter analysis of the diplexer ladders and the
//!   LP–line–LP chain, plus element fitting to cutoff targets.
//! * [`modes`] – the standing-wave dissipator mode between the low-pass
//!   filters: location, linewidth, Purcell suppression.
//! * [`dynamics`] – Purcell rate and Lindblad evolution of a transmon coupled
//!   to that mode under flux pulses.
//! * [`reset`] – reset sweeps, fringe line-cuts and reset benchmarks.
//! * [`readout`] – Boltzmann conversions and Gaussian single-shot readout.

// `!(x > 0.0)` is used on purpose so NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod modes;
pub mod readout;
pub mod reset;
pub mod rf;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
