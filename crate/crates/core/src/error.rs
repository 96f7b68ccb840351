use thiserror::Error;

use crate::params::{Regime, Scheme};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Every Eb/N0 expression is 0/0 at zero SNR; use the limits instead.
    #[error("degenerate rate: rho = 0 makes Eb/N0 undefined, use the rho -> 0 limits")]
    DegenerateRate,

    #[error("slot index t = {t} outside 1..={slots} (horizon {horizon})")]
    InvalidSlot { t: u32, slots: u32, horizon: u32 },

    #[error("non-positive effective interference denominator {value} in slot {t}")]
    NegativeDenominator { t: u32, value: f64 },

    #[error("no closed-form {what} for {scheme} under {regime}")]
    UnsupportedCombination {
        what: &'static str,
        scheme: Scheme,
        regime: Regime,
    },

    #[error("signature length m = {m} too small for {users} users (need m >= {required})")]
    DimensionTooSmall {
        m: usize,
        users: usize,
        required: usize,
    },

    #[error("desired user {user} is not active in slot {slot}")]
    DesiredInactive { user: usize, slot: usize },

    #[error("user index {user} out of range for {count} signatures")]
    UnknownUser { user: usize, count: usize },

    #[error("every grid point failed to evaluate; curve is empty")]
    EmptyCurve,

    #[error("curves were swept over different grids")]
    GridMismatch,

    #[error("configuration error: {0}")]
    Config(String),
}
