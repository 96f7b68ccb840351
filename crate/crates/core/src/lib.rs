//! Spectral efficiency, SNR per bit and user-density scaling for HARQ-based
//! random-access uplinks.
//!
//! Four schemes are covered: classical one-shot transmission, chase combining
//! over non-orthogonal (CC-NOMA) and orthogonal (CC-OMA) retransmissions, and
//! incremental redundancy over orthogonal retransmissions (IR-OMA). Each is
//! evaluated under sum-optimal decoding and under treating interference as
//! noise (TIN).
//!
//! - [`analytic`] holds the closed forms.
//! - [`asymptotics`] holds the Eb/N0 floors and limits.
//! - [`linklevel`] is a Monte-Carlo matched-filter simulator used as an
//!   independent check of the effective SINR expressions.
//! - [`sweep`] turns the closed forms into tradeoff curves.
//! - [`cli`] is the command-line front end.

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod linklevel;
pub mod params;
pub mod sweep;

pub use error::{Error, Result};
pub use params::{Metrics, Regime, Scheme, SchemeParams};
