//! Shared parameter vector and result types.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decoding regime at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Joint decoding achieving the multiple-access sum capacity.
    SumOptimal,
    /// Single-user decoding treating interference as noise.
    Tin,
}

/// Retransmission scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// One shot per user, users split uniformly over the slots.
    Classical,
    /// Chase combining of non-orthogonal retransmissions.
    CcNoma,
    /// Chase combining of orthogonal retransmissions.
    CcOma,
    /// Incremental redundancy over orthogonal retransmissions.
    IrOma,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Classical,
        Scheme::CcNoma,
        Scheme::CcOma,
        Scheme::IrOma,
    ];
}

impl Regime {
    pub const ALL: [Regime; 2] = [Regime::SumOptimal, Regime::Tin];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Classical => "classical",
            Scheme::CcNoma => "cc-noma",
            Scheme::CcOma => "cc-oma",
            Scheme::IrOma => "ir-oma",
        })
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::SumOptimal => "sum",
            Regime::Tin => "tin",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "classical" => Ok(Scheme::Classical),
            "cc-noma" => Ok(Scheme::CcNoma),
            "cc-oma" => Ok(Scheme::CcOma),
            "ir-oma" => Ok(Scheme::IrOma),
            other => Err(Error::Config(format!(
                "unknown scheme `{other}` (expected classical|cc-noma|cc-oma|ir-oma)"
            ))),
        }
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sum" => Ok(Regime::SumOptimal),
            "tin" => Ok(Regime::Tin),
            other => Err(Error::Config(format!(
                "unknown regime `{other}` (expected sum|tin)"
            ))),
        }
    }
}

/// Full parameter vector shared by every closed form.
///
/// `users` is treated as a positive real so that `users / slots` needs no
/// divisibility; integer user counts are only enforced by the link-level
/// simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Per-user received SNR per attempt, linear.
    pub rho: f64,
    /// Number of transmission attempts per frame.
    pub slots: u32,
    /// Total number of users.
    pub users: f64,
    /// Magnitude of the pairwise signature inner product.
    pub eta: f64,
    /// Noise power per dimension, linear.
    pub sigma2: f64,
    /// Number of non-overlapping frequency bins.
    pub bins: u32,
    /// HARQ buffer size normalized by the packet length.
    pub c_buf: f64,
    /// Per-user payload in bits; only used by the density mapping.
    pub payload_bits: f64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            rho: 1.0,
            slots: 1,
            users: 1.0,
            eta: 1.0,
            sigma2: 1.0,
            bins: 1,
            c_buf: 10.0,
            payload_bits: 100.0,
        }
    }
}

impl SchemeParams {
    /// Parameters with the given SNR, slot count and user count; the rest
    /// take their defaults.
    pub fn new(rho: f64, slots: u32, users: f64) -> Self {
        Self {
            rho,
            slots,
            users,
            ..Self::default()
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_sigma2(mut self, sigma2: f64) -> Self {
        self.sigma2 = sigma2;
        self
    }

    pub fn with_bins(mut self, bins: u32) -> Self {
        self.bins = bins;
        self
    }

    pub fn with_c_buf(mut self, c_buf: f64) -> Self {
        self.c_buf = c_buf;
        self
    }

    pub fn with_payload_bits(mut self, payload_bits: f64) -> Self {
        self.payload_bits = payload_bits;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_users(mut self, users: f64) -> Self {
        self.users = users;
        self
    }

    pub fn with_slots(mut self, slots: u32) -> Self {
        self.slots = slots;
        self
    }

    /// Checks every field invariant. `rho = 0` passes here and is rejected
    /// by the evaluators with [`Error::DegenerateRate`].
    pub fn validate(&self) -> Result<()> {
        fn bad(name: &'static str, value: f64, reason: &'static str) -> Result<()> {
            Err(Error::InvalidParameter {
                name,
                value,
                reason,
            })
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return bad("rho", self.rho, "must be finite and non-negative");
        }
        if self.slots < 1 {
            return bad("T", self.slots as f64, "must be at least 1");
        }
        if !(self.users.is_finite() && self.users >= self.slots as f64) {
            return bad("J", self.users, "must be finite and at least T");
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return bad("eta", self.eta, "must lie in [0, 1]");
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return bad("sigma2", self.sigma2, "must be finite and positive");
        }
        if self.bins < 1 {
            return bad("B", self.bins as f64, "must be at least 1");
        }
        if !(self.c_buf > 0.0) {
            return bad("c_buf", self.c_buf, "must be positive");
        }
        if !(self.payload_bits > 0.0 && self.payload_bits.is_finite()) {
            return bad("L", self.payload_bits, "must be finite and positive");
        }
        Ok(())
    }

    pub(crate) fn validate_positive_rho(&self) -> Result<()> {
        self.validate()?;
        if self.rho == 0.0 {
            return Err(Error::DegenerateRate);
        }
        Ok(())
    }

    /// Total power spent by all users, `J * sigma2 * rho`.
    pub fn total_power(&self) -> f64 {
        self.users * self.sigma2 * self.rho
    }
}

/// One spectral-efficiency / SNR-per-bit operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Spectral efficiency in bits per real degree of freedom.
    pub se: f64,
    pub ebn0_linear: f64,
    pub ebn0_db: f64,
}

impl Metrics {
    pub fn new(se: f64, ebn0_linear: f64) -> Self {
        Self {
            se,
            ebn0_linear,
            ebn0_db: to_db(ebn0_linear),
        }
    }
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
