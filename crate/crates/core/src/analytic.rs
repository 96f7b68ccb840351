//! Closed-form spectral efficiency and SNR per bit.
//!
//! All spectral efficiencies are per real degree of freedom. For IR-OMA the
//! per-frame sums over `T` slots are divided by `T` so that every scheme
//! shares one axis.
//!
//! Expressions are arranged so that at `T = 1` (and `B = 1`) the classical,
//! CC-OMA and IR-OMA evaluators perform the same floating-point operations
//! and agree bit for bit.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::params::{Metrics, Regime, Scheme, SchemeParams};

/// Quantization noise power of an IR refinement slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantNoise {
    pub value: f64,
    /// Set when the TIN expression went non-positive and was clamped to 0,
    /// i.e. the buffer is large enough that the refinement is lossless.
    pub clamped: bool,
}

pub fn total_power(params: &SchemeParams) -> f64 {
    params.total_power()
}

/// Dispatches to the evaluator of `scheme`.
pub fn evaluate(scheme: Scheme, regime: Regime, params: &SchemeParams) -> Result<Metrics> {
    match scheme {
        Scheme::Classical => eval_classical(params, regime),
        Scheme::CcNoma => eval_cc_noma(params, regime),
        Scheme::CcOma => eval_cc_oma(params, regime),
        Scheme::IrOma => eval_ir_oma(params, regime),
    }
}

fn slots_users(p: &SchemeParams) -> (f64, f64) {
    (p.slots as f64, p.users)
}

/// Classical scheme: `J/T` users per slot, no combining across slots.
pub fn eval_classical(params: &SchemeParams, regime: Regime) -> Result<Metrics> {
    params.validate_positive_rho()?;
    let (t, j) = slots_users(params);
    let (rho, s2) = (params.rho, params.sigma2);
    Ok(match regime {
        Regime::SumOptimal => {
            let rate = (1.0 + rho * j / t).log2();
            Metrics::new(0.5 * rate, j * s2 * rho * t / rate)
        }
        Regime::Tin => {
            let sinr = rho / (rho * (j / t - 1.0) + 1.0);
            let rate = (1.0 + sinr).log2();
            Metrics::new(j / (2.0 * t) * rate, t * s2 * rho / rate)
        }
    })
}

/// Effective SINR of CC-NOMA after MRC of `T` attempts.
pub fn cc_noma_sinr(params: &SchemeParams, regime: Regime) -> f64 {
    let (t, j) = slots_users(params);
    let (rho, eta) = (params.rho, params.eta);
    match regime {
        Regime::SumOptimal => {
            let excess = j / t - 1.0;
            rho * t * (1.0 + eta * eta * excess * excess)
        }
        Regime::Tin => {
            let excess = j - t;
            rho * t * t / (t + rho * eta * eta * excess * excess)
        }
    }
}

/// Effective SINR of CC-OMA after MRC of `T` attempts.
pub fn cc_oma_sinr(params: &SchemeParams, regime: Regime) -> f64 {
    let (t, j) = slots_users(params);
    let rho = params.rho;
    match regime {
        Regime::SumOptimal => rho * t * (1.0 + (j / t - 1.0) / t),
        Regime::Tin => rho * t / (1.0 + rho * (j / t - 1.0)),
    }
}

// Shared tail of the chase-combining evaluators.
fn chase_metrics(params: &SchemeParams, regime: Regime, sinr: f64) -> Metrics {
    let (t, j) = slots_users(params);
    let (rho, s2) = (params.rho, params.sigma2);
    let rate = (1.0 + sinr).log2();
    match regime {
        Regime::SumOptimal => Metrics::new(0.5 * rate, j * s2 * rho / rate),
        // J s2 rho / ((J/T) rate) reduced to T s2 rho / rate.
        Regime::Tin => Metrics::new(j / (2.0 * t) * rate, t * s2 * rho / rate),
    }
}

pub fn eval_cc_noma(params: &SchemeParams, regime: Regime) -> Result<Metrics> {
    params.validate_positive_rho()?;
    Ok(chase_metrics(params, regime, cc_noma_sinr(params, regime)))
}

pub fn eval_cc_oma(params: &SchemeParams, regime: Regime) -> Result<Metrics> {
    params.validate_positive_rho()?;
    Ok(chase_metrics(params, regime, cc_oma_sinr(params, regime)))
}

/// Quantization noise `sigma_q^2(t, horizon)` of IR slot `t`.
///
/// `horizon` only sets the rate exponent `2 C_buf / (horizon B)`; the Eb/N0
/// forms use `T - 1`, the SE statement uses `T`. The final slot `t = T` is
/// received unquantized and always returns 0.
pub fn ir_quant_noise(
    params: &SchemeParams,
    regime: Regime,
    t: u32,
    horizon: u32,
) -> Result<QuantNoise> {
    params.validate()?;
    let slots = params.slots;
    let horizon_ok = horizon >= 1 && (horizon == slots || horizon + 1 == slots);
    if t < 1 || t > slots || !horizon_ok {
        return Err(Error::InvalidSlot { t, slots, horizon });
    }
    if t == slots {
        return Ok(QuantNoise {
            value: 0.0,
            clamped: false,
        });
    }
    let b = params.bins as f64;
    let (rho, s2, j) = (params.rho, params.sigma2, params.users);
    let levels = (2.0 * params.c_buf / (horizon as f64 * b)).exp2() - 1.0;
    Ok(match regime {
        Regime::SumOptimal => QuantNoise {
            value: b * (j * rho / b + 1.0) * s2 / levels,
            clamped: false,
        },
        Regime::Tin => {
            let raw = b * (rho / b + 1.0) * s2 / levels - (j / horizon as f64 - 1.0) * rho * s2;
            if raw > 0.0 {
                QuantNoise {
                    value: raw,
                    clamped: false,
                }
            } else {
                QuantNoise {
                    value: 0.0,
                    clamped: true,
                }
            }
        }
    })
}

/// Per-slot rate `C_buf / horizon` implied by a quantization noise level,
/// from the rate-distortion relation between a received block and its
/// quantized copy. Inverse of [`ir_quant_noise`] while unclamped.
pub fn ir_buffer_rate(params: &SchemeParams, regime: Regime, horizon: u32, sigma_q2: f64) -> f64 {
    let b = params.bins as f64;
    let (rho, s2, j) = (params.rho, params.sigma2, params.users);
    let ratio = match regime {
        Regime::SumOptimal => (j * rho * s2 / b + s2) / (sigma_q2 / b),
        Regime::Tin => {
            (rho * s2 / b + s2) / ((j / horizon as f64 - 1.0) * rho * s2 / b + sigma_q2 / b)
        }
    };
    b / 2.0 * (1.0 + ratio).log2()
}

/// Buffer size at and above which the TIN refinement noise vanishes.
pub fn ir_tin_lossless_buffer(params: &SchemeParams, horizon: u32) -> f64 {
    let b = params.bins as f64;
    let (rho, s2) = (params.rho, params.sigma2);
    let interference = (params.users / horizon as f64 - 1.0) * rho * s2 / b;
    b * horizon as f64 / 2.0 * (1.0 + (rho * s2 / b + s2) / interference).log2()
}

/// Effective interference factor `zeta_t` of the TIN IR-OMA SNR per bit,
/// built from the unclamped quantization noise with exponent horizon `T - 1`.
/// The per-slot SINR is `(rho/B) / (rho zeta_t / B + 1)`.
pub fn ir_tin_zeta(params: &SchemeParams, t: u32) -> Result<f64> {
    params.validate_positive_rho()?;
    let slots = params.slots;
    if t < 1 || t > slots {
        return Err(Error::InvalidSlot {
            t,
            slots,
            horizon: slots.saturating_sub(1),
        });
    }
    let (tf, j) = slots_users(params);
    if t == slots {
        return Ok(j / tf - 1.0);
    }
    let b = params.bins as f64;
    let inv_levels = 1.0 / ((2.0 * params.c_buf / ((tf - 1.0) * b)).exp2() - 1.0);
    Ok((j / tf - j / (tf - 1.0) + inv_levels) + b / params.rho * inv_levels)
}

/// IR-OMA with quantized refinements held in a finite HARQ buffer.
pub fn eval_ir_oma(params: &SchemeParams, regime: Regime) -> Result<Metrics> {
    params.validate_positive_rho()?;
    let (t, j) = slots_users(params);
    let b = params.bins as f64;
    let (rho, s2) = (params.rho, params.sigma2);
    let horizon = params.slots.saturating_sub(1);

    let mut log_sum = 0.0;
    for slot in 1..=params.slots {
        let q = if slot == params.slots {
            0.0
        } else {
            ir_quant_noise(params, regime, slot, horizon)?.value
        };
        let denominator = match regime {
            Regime::SumOptimal => 1.0 + q / (b * s2),
            Regime::Tin => rho * (j / t - 1.0) / b + 1.0 + q / (b * s2),
        };
        if !(denominator > 0.0) {
            return Err(Error::NegativeDenominator {
                t: slot,
                value: denominator,
            });
        }
        let sinr = match regime {
            Regime::SumOptimal => rho * j / b / denominator,
            Regime::Tin => rho / b / denominator,
        };
        log_sum += (1.0 + sinr).log2();
    }

    let rate = b / t * log_sum;
    Ok(match regime {
        Regime::SumOptimal => Metrics::new(b / (2.0 * t) * log_sum, j * s2 * rho / rate),
        Regime::Tin => Metrics::new(j * b / (2.0 * t * t) * log_sum, t * s2 * rho / rate),
    })
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q_function`] for `0 < p < 1`.
pub fn q_inv(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "q_inv needs 0 < p < 1, got {p}");
    // Q^{-1}(p) = Phi^{-1}(1 - p) = -Phi^{-1}(p)
    let mut x = -acklam_probit(p);
    let density = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    for _ in 0..8 {
        let step = (q_function(x) - p) / density(x);
        x += step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

// Rational approximation of the standard normal quantile (Acklam), relative
// error about 1.2e-9; refined by Newton in `q_inv`.
fn acklam_probit(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

/// Normal approximation of the maximal rate at blocklength `n` and error
/// probability `epsilon`, floored at 0. `n = f64::INFINITY` gives capacity.
pub fn fbl_rate(sinr: f64, n: f64, epsilon: f64) -> Result<f64> {
    if !(sinr >= 0.0 && sinr.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "sinr",
            value: sinr,
            reason: "must be finite and non-negative",
        });
    }
    if !(n >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n,
            reason: "blocklength must be at least 1",
        });
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            reason: "must lie in (0, 0.5)",
        });
    }
    let capacity = 0.5 * sinr.ln_1p() / LN_2;
    let dispersion = 1.0 - 1.0 / ((1.0 + sinr) * (1.0 + sinr));
    let penalty = (dispersion / (2.0 * n)).sqrt() * q_inv(epsilon);
    Ok((capacity - penalty).max(0.0))
}
