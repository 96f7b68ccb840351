//! Link-level Monte-Carlo simulation of the chase-combining uplink.
//!
//! Users transmit one complex amplitude per slot spread by a unit-norm
//! signature of length `m`. The receiver combines the `T` received blocks by
//! MRC and applies a matched filter for the desired user, treating everything
//! else as noise. The empirical SINR is an oracle for the effective-SINR
//! closed forms in [`analytic_sinr`].
//!
//! Normalization: unit-norm signatures, per-attempt symbol energy
//! `|a|^2 = rho sigma2`, complex noise with variance `sigma2 / 2` per real
//! component. A matched filter then sees noise of variance `sigma2`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Scheme;

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Construction {
    /// `S_j = sqrt(1 - eta) e_j + sqrt(eta) u` over an orthonormal basis.
    EquiCorrelated { eta: f64 },
    /// I.i.d. complex Gaussian entries, normalized.
    RandomGaussian { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignatureSet {
    pub m: usize,
    pub signatures: Vec<Vec<Complex64>>,
    pub construction: Construction,
}

/// `<a, b> = sum conj(a_i) b_i`
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl SignatureSet {
    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    /// Root-mean-square magnitude of the off-diagonal inner products.
    pub fn rms_cross_correlation(&self) -> f64 {
        let n = self.signatures.len();
        let mut acc = 0.0;
        let mut pairs = 0usize;
        for a in 0..n {
            for b in a + 1..n {
                acc += inner(&self.signatures[a], &self.signatures[b]).norm_sqr();
                pairs += 1;
            }
        }
        if pairs == 0 {
            0.0
        } else {
            (acc / pairs as f64).sqrt()
        }
    }
}

pub fn make_equicorrelated_signatures(m: usize, users: usize, eta: f64) -> Result<SignatureSet> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
            reason: "equi-correlated construction needs 0 <= eta < 1",
        });
    }
    if m < users + 1 {
        return Err(Error::DimensionTooSmall {
            m,
            users,
            required: users + 1,
        });
    }
    let own = (1.0 - eta).sqrt();
    let common = eta.sqrt();
    let signatures = (0..users)
        .map(|j| {
            let mut s = vec![Complex64::new(0.0, 0.0); m];
            s[j] = Complex64::new(own, 0.0);
            s[users] = Complex64::new(common, 0.0);
            s
        })
        .collect();
    Ok(SignatureSet {
        m,
        signatures,
        construction: Construction::EquiCorrelated { eta },
    })
}

pub fn make_random_signatures(m: usize, users: usize, seed: u64) -> Result<SignatureSet> {
    if m < 1 {
        return Err(Error::DimensionTooSmall {
            m,
            users,
            required: 1,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signatures = (0..users)
        .map(|_| {
            let mut s: Vec<Complex64> = (0..m)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let norm = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            s.iter_mut().for_each(|z| *z /= norm);
            s
        })
        .collect();
    Ok(SignatureSet {
        m,
        signatures,
        construction: Construction::RandomGaussian { seed },
    })
}

/// One Monte-Carlo draw of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRealization {
    /// `amplitudes[t][j]`, zero for users inactive in slot `t`.
    pub amplitudes: Vec<Vec<Complex64>>,
    /// `noise[t]`: `m` samples of circularly-symmetric Gaussian noise.
    pub noise: Vec<Vec<Complex64>>,
    /// `received[t] = sum_j a_tj S_j + noise[t]`.
    pub received: Vec<Vec<Complex64>>,
    pub active: Vec<Vec<usize>>,
}

impl FrameRealization {
    /// Draws noise and forms the received blocks for the given amplitudes.
    pub fn draw<R: Rng + ?Sized>(
        sigs: &SignatureSet,
        amplitudes: Vec<Vec<Complex64>>,
        active: Vec<Vec<usize>>,
        sigma2: f64,
        rng: &mut R,
    ) -> Self {
        let scale = (sigma2 / 2.0).sqrt();
        let noise: Vec<Vec<Complex64>> = active
            .iter()
            .map(|_| {
                (0..sigs.m)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(re * scale, im * scale)
                    })
                    .collect()
            })
            .collect();
        let mut frame = Self {
            amplitudes,
            noise,
            received: Vec::new(),
            active,
        };
        frame.received = frame.superpose(sigs);
        frame
    }

    /// Rebuilds the received blocks from the stored components.
    pub fn superpose(&self, sigs: &SignatureSet) -> Vec<Vec<Complex64>> {
        self.active
            .iter()
            .enumerate()
            .map(|(t, users)| {
                let mut y = self.noise[t].clone();
                for &j in users {
                    let a = self.amplitudes[t][j];
                    for (yi, si) in y.iter_mut().zip(&sigs.signatures[j]) {
                        *yi += a * si;
                    }
                }
                y
            })
            .collect()
    }

    /// Matched-filter output of the MRC-combined blocks for `user`:
    /// `<S_user, sum_t conj(a_t,user) Y_t>`.
    pub fn combined_statistic(&self, sigs: &SignatureSet, user: usize) -> Complex64 {
        let s = &sigs.signatures[user];
        self.received
            .iter()
            .enumerate()
            .map(|(t, y)| self.amplitudes[t][user].conj() * inner(s, y))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinrEstimate {
    pub mean: f64,
    /// Normal-approximation 95% confidence half-width of `mean`.
    pub half_width_95: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Monte-Carlo run settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    pub workers: usize,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self {
            trials: 2000,
            seed: 0,
            workers: 1,
        }
    }
}

impl MonteCarlo {
    fn trial_rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }

    /// Runs `f` once per trial, each with its own RNG stream, and returns the
    /// outputs in trial order.
    fn run<F>(&self, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        Ok(pool.install(|| {
            (0..self.trials)
                .into_par_iter()
                .map(|trial| f(&mut self.trial_rng(trial)))
                .collect()
        }))
    }
}

/// Order-fixed pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Estimates the effective SINR seen by `desired` after MRC over
/// `active_per_slot.len()` slots and matched filtering.
///
/// All active users share the real amplitude `sqrt(rho sigma2)`. The signal
/// term is deterministic; the SINR estimate is its power over the mean
/// residual power, with the half-width from the delta method.
pub fn simulate_cc_noma_sinr(
    sigs: &SignatureSet,
    rho: f64,
    sigma2: f64,
    active_per_slot: &[Vec<usize>],
    desired: usize,
    mc: &MonteCarlo,
) -> Result<SinrEstimate> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "must be finite and positive",
        });
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "sigma2",
            value: sigma2,
            reason: "must be finite and positive",
        });
    }
    if mc.trials < 1 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
            reason: "need at least one trial",
        });
    }
    if active_per_slot.is_empty() {
        return Err(Error::InvalidParameter {
            name: "T",
            value: 0.0,
            reason: "need at least one slot",
        });
    }
    for users in active_per_slot {
        if let Some(&bad) = users.iter().find(|&&j| j >= sigs.len()) {
            return Err(Error::UnknownUser {
                user: bad,
                count: sigs.len(),
            });
        }
    }
    if let Some(slot) = active_per_slot
        .iter()
        .position(|users| !users.contains(&desired))
    {
        return Err(Error::DesiredInactive {
            user: desired,
            slot,
        });
    }

    let amplitude = Complex64::new((rho * sigma2).sqrt(), 0.0);
    let amplitudes: Vec<Vec<Complex64>> = active_per_slot
        .iter()
        .map(|users| {
            let mut row = vec![Complex64::new(0.0, 0.0); sigs.len()];
            users.iter().for_each(|&j| row[j] = amplitude);
            row
        })
        .collect();

    let signal = desired_signal(sigs, &amplitudes, desired);
    let residual_powers = mc.run(|rng| {
        let frame = FrameRealization::draw(
            sigs,
            amplitudes.clone(),
            active_per_slot.to_vec(),
            sigma2,
            rng,
        );
        (frame.combined_statistic(sigs, desired) - signal).norm_sqr()
    })?;

    let n = residual_powers.len() as f64;
    let mean_residual = pairwise_sum(&residual_powers) / n;
    let deviations: Vec<f64> = residual_powers
        .iter()
        .map(|p| (p - mean_residual) * (p - mean_residual))
        .collect();
    let variance = if residual_powers.len() > 1 {
        pairwise_sum(&deviations) / (n - 1.0)
    } else {
        0.0
    };
    let signal_power = signal.norm_sqr();
    let mean = signal_power / mean_residual;
    let half_width_95 =
        Z_95 * signal_power * (variance / n).sqrt() / (mean_residual * mean_residual);
    Ok(SinrEstimate {
        mean,
        half_width_95,
        trials: mc.trials,
        seed: mc.seed,
    })
}

/// Noise-free matched-filter output for `desired`:
/// `sum_t |a_t|^2 <S, S>`.
pub fn desired_signal(
    sigs: &SignatureSet,
    amplitudes: &[Vec<Complex64>],
    desired: usize,
) -> Complex64 {
    let s = &sigs.signatures[desired];
    let gain = inner(s, s);
    amplitudes
        .iter()
        .map(|row| row[desired].norm_sqr() * gain)
        .sum()
}

/// Effective SINR after MRC of `T = counts.len()` attempts with `counts[t]`
/// active users in slot `t` (desired user included).
pub fn analytic_sinr(scheme: Scheme, rho: f64, counts: &[usize], eta: f64) -> Result<f64> {
    if counts.is_empty() || counts.contains(&0) {
        return Err(Error::InvalidParameter {
            name: "J_t",
            value: 0.0,
            reason: "every slot needs at least the desired user",
        });
    }
    let t = counts.len() as f64;
    let interferers = counts.iter().sum::<usize>() as f64 - t;
    match scheme {
        Scheme::CcNoma => Ok(rho * t * t / (t + rho * eta * eta * interferers * interferers)),
        Scheme::CcOma => Ok(rho * t * t / (t + rho * interferers)),
        other => Err(Error::UnsupportedCombination {
            what: "link-level SINR",
            scheme: other,
            regime: crate::params::Regime::Tin,
        }),
    }
}

/// Amplitude-level check of the CC-OMA noise-plus-interference expansion.
///
/// `magnitudes[t]` lists `|a_tj|` for slot `t` with the desired user first.
/// Each trial draws i.i.d. QPSK phases for every amplitude, evaluates the
/// interference term `|sum_t sum_j' a_tj conj(a_tj')|^2` and adds the exact
/// noise expectation `sum_t |a_tj|^2 sigma2`. Returns the relative deviation
/// of the sample mean from
/// `sum_t sum_j' |a_tj|^2 |a_tj'|^2 + sum_t |a_tj|^2 sigma2`.
pub fn verify_cc_oma_noise_expansion(
    magnitudes: &[Vec<f64>],
    sigma2: f64,
    mc: &MonteCarlo,
) -> Result<f64> {
    if magnitudes.is_empty() || magnitudes.iter().any(|slot| slot.is_empty()) {
        return Err(Error::InvalidParameter {
            name: "J_t",
            value: 0.0,
            reason: "every slot needs at least the desired user",
        });
    }
    let noise_term: f64 = magnitudes
        .iter()
        .map(|slot| slot[0] * slot[0] * sigma2)
        .sum();
    let expected: f64 = magnitudes
        .iter()
        .map(|slot| {
            let own = slot[0] * slot[0];
            slot[1..].iter().map(|a| own * a * a).sum::<f64>()
        })
        .sum::<f64>()
        + noise_term;

    let qpsk = |rng: &mut ChaCha8Rng| match rng.random_range(0..4u8) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let samples = mc.run(|rng| {
        let mut cross = Complex64::new(0.0, 0.0);
        for slot in magnitudes {
            let own = slot[0] * qpsk(rng);
            for &mag in &slot[1..] {
                cross += own * (mag * qpsk(rng)).conj();
            }
        }
        cross.norm_sqr() + noise_term
    })?;
    let mean = pairwise_sum(&samples) / samples.len() as f64;
    Ok(((mean - expected) / expected).abs())
}
