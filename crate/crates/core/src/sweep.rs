//! Tradeoff curves built from the closed forms: SE vs Eb/N0 over an SNR
//! grid, and user density J/n vs Eb/N0 over a user-count grid.

use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::error::{Error, Result};
use crate::params::{Regime, Scheme, SchemeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    Rho,
    J,
}

impl SweepVar {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVar::Rho => "rho",
            SweepVar::J => "J",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x_ebn0_db: f64,
    pub ebn0_linear: f64,
    /// Bits/rdof on SE curves, users/rdof on density curves.
    pub y: f64,
    /// Value of the sweep variable (rho or J) that produced the point.
    pub sweep_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub scheme: Scheme,
    pub regime: Regime,
    pub params: SchemeParams,
    pub sweep_var: SweepVar,
    /// Ascending in `sweep_value`.
    pub points: Vec<CurvePoint>,
    /// Grid values dropped because the evaluator returned an error.
    pub skipped: usize,
}

/// `points` values spaced evenly in log10 between `min` and `max` inclusive.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min && points >= 2) {
        return Err(Error::Config(format!(
            "log grid needs 0 < min < max and at least 2 points, got [{min}, {max}] x {points}"
        )));
    }
    let (lo, hi) = (min.log10(), max.log10());
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => min,
            i if i == points - 1 => max,
            i => 10f64.powf(lo + step * i as f64),
        })
        .collect())
}

pub fn linear_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(max > min && points >= 2) {
        return Err(Error::Config(format!(
            "linear grid needs min < max and at least 2 points, got [{min}, {max}] x {points}"
        )));
    }
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                max
            } else {
                min + step * i as f64
            }
        })
        .collect())
}

fn check_ascending(grid: &[f64], positive: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyCurve);
    }
    if positive && grid.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Config(
            "grid values must be strictly positive".into(),
        ));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("grid must be strictly ascending".into()));
    }
    Ok(())
}

fn build(
    scheme: Scheme,
    regime: Regime,
    params: &SchemeParams,
    sweep_var: SweepVar,
    grid: &[f64],
    point: impl Fn(f64) -> Result<CurvePoint>,
) -> Result<Curve> {
    let mut points = Vec::with_capacity(grid.len());
    let mut skipped = 0;
    for &v in grid {
        match point(v) {
            Ok(p) if p.x_ebn0_db.is_finite() && p.y.is_finite() => points.push(p),
            Ok(_) | Err(_) => skipped += 1,
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyCurve);
    }
    Ok(Curve {
        scheme,
        regime,
        params: *params,
        sweep_var,
        points,
        skipped,
    })
}

/// SE vs Eb/N0 over an ascending grid of per-user SNRs.
pub fn se_curve(
    scheme: Scheme,
    regime: Regime,
    params: &SchemeParams,
    rho_grid: &[f64],
) -> Result<Curve> {
    check_ascending(rho_grid, true)?;
    build(scheme, regime, params, SweepVar::Rho, rho_grid, |rho| {
        let m = analytic::evaluate(scheme, regime, &params.with_rho(rho))?;
        Ok(CurvePoint {
            x_ebn0_db: m.ebn0_db,
            ebn0_linear: m.ebn0_linear,
            y: m.se,
            sweep_value: rho,
        })
    })
}

/// User density `J/n = SE / L` vs Eb/N0 over an ascending grid of user
/// counts at fixed `rho`, with `L = params.payload_bits`.
pub fn density_curve(
    scheme: Scheme,
    regime: Regime,
    params: &SchemeParams,
    j_grid: &[f64],
) -> Result<Curve> {
    params.validate()?;
    check_ascending(j_grid, true)?;
    if let Some(&j) = j_grid.iter().find(|&&j| j < params.slots as f64) {
        return Err(Error::InvalidParameter {
            name: "J",
            value: j,
            reason: "density grid values must be at least T",
        });
    }
    let payload = params.payload_bits;
    build(scheme, regime, params, SweepVar::J, j_grid, |j| {
        let m = analytic::evaluate(scheme, regime, &params.with_users(j))?;
        Ok(CurvePoint {
            x_ebn0_db: m.ebn0_db,
            ebn0_linear: m.ebn0_linear,
            y: m.se / payload,
            sweep_value: j,
        })
    })
}

/// Point with the smallest Eb/N0; ties go to the larger `y`.
pub fn min_ebn0(curve: &Curve) -> Result<CurvePoint> {
    curve
        .points
        .iter()
        .copied()
        .reduce(|best, p| {
            if p.x_ebn0_db < best.x_ebn0_db || (p.x_ebn0_db == best.x_ebn0_db && p.y > best.y) {
                p
            } else {
                best
            }
        })
        .ok_or(Error::EmptyCurve)
}

// Curve as a polyline in (x, y), sorted by x.
fn polyline(curve: &Curve) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.x_ebn0_db, p.y)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts
}

fn interpolate(line: &[(f64, f64)], x: f64) -> f64 {
    let i = line.partition_point(|p| p.0 < x);
    if i == 0 {
        return line[0].1;
    }
    if i == line.len() {
        return line[line.len() - 1].1;
    }
    let (x0, y0) = line[i - 1];
    let (x1, y1) = line[i];
    if x1 == x0 {
        y1
    } else {
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// Smallest Eb/N0 (dB) at which `y_a - y_b` changes sign, with both curves
/// read as piecewise-linear functions of Eb/N0 over their common x-range.
/// `None` when the difference never strictly changes sign.
pub fn find_crossing(a: &Curve, b: &Curve) -> Result<Option<f64>> {
    let same_grid = a.sweep_var == b.sweep_var
        && a.points.len() == b.points.len()
        && a.points
            .iter()
            .zip(&b.points)
            .all(|(p, q)| p.sweep_value == q.sweep_value);
    if !same_grid {
        return Err(Error::GridMismatch);
    }
    if a.points.is_empty() {
        return Ok(None);
    }
    let (la, lb) = (polyline(a), polyline(b));
    let lo = la[0].0.max(lb[0].0);
    let hi = la[la.len() - 1].0.min(lb[lb.len() - 1].0);
    if !(hi >= lo) {
        return Ok(None);
    }
    let mut xs: Vec<f64> = la
        .iter()
        .chain(&lb)
        .map(|p| p.0)
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let diff = |x: f64| interpolate(&la, x) - interpolate(&lb, x);
    // Last x with a non-zero difference and its sign.
    let mut last: Option<(f64, f64)> = None;
    for x in xs {
        let d = diff(x);
        if d == 0.0 {
            continue;
        }
        if let Some((x0, d0)) = last {
            if d0.signum() != d.signum() {
                return Ok(Some(x0 + (x - x0) * d0 / (d0 - d)));
            }
        }
        last = Some((x, d));
    }
    Ok(None)
}
