//! Eb/N0 floors and limiting values, all reported linear-first with a dB
//! companion.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::error::{Error, Result};
use crate::params::{to_db, Regime, Scheme, SchemeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitKind {
    /// Lower bound reached as the spectral efficiency goes to zero.
    FloorSeToZero,
    /// Limit as the per-user SNR goes to zero along a stated path.
    LimitRhoToZero,
    /// Limit as the HARQ buffer grows without bound.
    LimitCbufToInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitResult {
    pub value_linear: f64,
    pub value_db: f64,
    pub kind: LimitKind,
}

impl LimitResult {
    fn new(value_linear: f64, kind: LimitKind) -> Self {
        Self {
            value_linear,
            value_db: to_db(value_linear),
            kind,
        }
    }
}

/// Parameter path along which `rho -> 0` is taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoPath {
    /// `J = P_tot / (sigma2 rho)` grows as `rho` shrinks.
    FixedTotalPower(f64),
    /// `J` held at `params.users`.
    FixedUsers,
}

/// Eb/N0 lower bound as the spectral efficiency vanishes.
pub fn ebn0_floor(scheme: Scheme, regime: Regime, params: &SchemeParams) -> Result<LimitResult> {
    params.validate()?;
    let value = match (scheme, regime) {
        (Scheme::CcNoma, Regime::SumOptimal) => {
            let t = params.slots as f64;
            let excess = params.users / t - 1.0;
            let gain = t * (1.0 + params.eta * params.eta * excess * excess);
            LN_2 * params.users * params.sigma2 / gain
        }
        (Scheme::CcNoma, Regime::Tin) | (Scheme::CcOma, Regime::Tin) => LN_2 * params.sigma2,
        _ => {
            return Err(Error::UnsupportedCombination {
                what: "Eb/N0 floor",
                scheme,
                regime,
            })
        }
    };
    Ok(LimitResult::new(value, LimitKind::FloorSeToZero))
}

/// Eb/N0 as `rho -> 0` along `path`. Only the combinations with a stated
/// closed form are supported:
///
/// | scheme    | regime | path                    | value          |
/// |-----------|--------|-------------------------|----------------|
/// | CC-NOMA   | sum    | fixed total power       | `ln2 * P_tot`  |
/// | classical | TIN    | fixed total power, T=1  | `ln2 * P_tot`  |
/// | CC-NOMA   | TIN    | fixed users             | `ln2 * sigma2` |
/// | IR-OMA    | TIN    | fixed total power       | `ln2 * P_tot`  |
pub fn ebn0_rho_zero_limit(
    scheme: Scheme,
    regime: Regime,
    params: &SchemeParams,
    path: RhoPath,
) -> Result<LimitResult> {
    params.validate()?;
    let unsupported = Err(Error::UnsupportedCombination {
        what: "rho -> 0 limit",
        scheme,
        regime,
    });
    let value = match (scheme, regime, path) {
        (Scheme::CcNoma, Regime::SumOptimal, RhoPath::FixedTotalPower(p))
        | (Scheme::IrOma, Regime::Tin, RhoPath::FixedTotalPower(p)) => total_power(p)?,
        (Scheme::Classical, Regime::Tin, RhoPath::FixedTotalPower(p)) if params.slots == 1 => {
            total_power(p)?
        }
        (Scheme::CcNoma, Regime::Tin, RhoPath::FixedUsers) => params.sigma2,
        _ => return unsupported,
    };
    Ok(LimitResult::new(LN_2 * value, LimitKind::LimitRhoToZero))
}

fn total_power(p: f64) -> Result<f64> {
    if p > 0.0 && p.is_finite() {
        Ok(p)
    } else {
        Err(Error::InvalidParameter {
            name: "P_tot",
            value: p,
            reason: "must be finite and positive",
        })
    }
}

/// IR-OMA TIN Eb/N0 for an unbounded buffer: the classical TIN value at the
/// same `T`.
pub fn ebn0_cbuf_infinity_ir_tin(params: &SchemeParams) -> Result<LimitResult> {
    let classical = analytic::eval_classical(params, Regime::Tin)?;
    Ok(LimitResult::new(
        classical.ebn0_linear,
        LimitKind::LimitCbufToInfinity,
    ))
}
