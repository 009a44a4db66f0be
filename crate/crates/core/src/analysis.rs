//! Power-law fits of the mean-square remainder and theorem verdicts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::meansquare::MeanSquareCurve;
use crate::params::RegionTag;

pub const MIN_FIT_POINTS: usize = 4;
pub const DEFAULT_SLACK: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub n_points: usize,
    pub log_corrected: bool,
}

/// Least squares of `log(|R| / (log T)?)` on `log T`, over points with `T > 1` and
/// `|R| > 10 quad_err`.
pub fn fit_points(t: &[f64], r: &[f64], quad_err: &[f64], divide_log: bool) -> Result<ExponentFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..t.len() {
        if t[k] > 1.0 && r[k].abs() > 10.0 * quad_err[k] && r[k] != 0.0 {
            let mut y = r[k].abs();
            if divide_log {
                y /= t[k].ln();
            }
            xs.push(t[k].ln());
            ys.push(y.ln());
        }
    }
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientSignal {
            usable: n,
            required: MIN_FIT_POINTS,
        });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientSignal {
            usable: 1,
            required: MIN_FIT_POINTS,
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(ExponentFit {
        slope,
        intercept,
        rms_residual: (ss / nf).sqrt(),
        n_points: n,
        log_corrected: divide_log,
    })
}

pub fn fit_exponent(curve: &MeanSquareCurve, divide_log: bool) -> Result<ExponentFit> {
    let t: Vec<f64> = curve.grid.iter().map(|r| r.t).collect();
    let r: Vec<f64> = curve.grid.iter().map(|r| r.r).collect();
    let e: Vec<f64> = curve.grid.iter().map(|r| r.quad_err).collect();
    fit_points(&t, &r, &e, divide_log)
}

/// Predicted remainder exponent and whether a `log T` factor accompanies it.
pub fn predicted_exponent(sigma: f64) -> Option<(f64, bool)> {
    if sigma > 2.0 {
        Some((0.0, false))
    } else if sigma > 1.75 {
        Some((0.5, false))
    } else if sigma > 1.5 {
        Some((4.0 - 2.0 * sigma, true))
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremVerdict {
    pub sigma: f64,
    pub region: RegionTag,
    pub predicted_exponent: f64,
    /// Fit of the remainder; always present in the power-law region, best effort otherwise.
    pub observed: Option<ExponentFit>,
    pub pass: bool,
    pub slack: f64,
    /// `max |R|` over the whole grid and over its first half (bounded-remainder region).
    pub max_abs_r: f64,
    pub first_half_max_abs_r: f64,
}

/// Theorem 1 region: passes when the remainder does not grow over the second half of
/// the grid. Theorem 2 region: passes when the fitted exponent is within `slack` of
/// the predicted one.
pub fn verdict(curve: &MeanSquareCurve, slack: f64) -> Result<TheoremVerdict> {
    let region = curve.region();
    let (predicted, divide_log) = match region {
        RegionTag::Theorem1 | RegionTag::Theorem2 => predicted_exponent(curve.sigma).unwrap(),
        _ => {
            return Err(Error::RegionError {
                operation: "verdict",
                sigma: curve.sigma,
                requirement: "sigma > 3/2",
            })
        }
    };
    let rows: Vec<_> = curve.grid.iter().filter(|r| r.t > 1.0).collect();
    if rows.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientSignal {
            usable: rows.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let half = rows.len().div_ceil(2);
    let max_all = rows.iter().map(|r| r.r.abs()).fold(0.0, f64::max);
    let max_first = rows[..half].iter().map(|r| r.r.abs()).fold(0.0, f64::max);

    let (observed, pass) = if region == RegionTag::Theorem1 {
        (
            fit_exponent(curve, false).ok(),
            max_all <= (1.0 + slack) * max_first,
        )
    } else {
        let fit = fit_exponent(curve, divide_log)?;
        (Some(fit), fit.slope <= predicted + slack)
    };
    Ok(TheoremVerdict {
        sigma: curve.sigma,
        region,
        predicted_exponent: predicted,
        observed,
        pass,
        slack,
        max_abs_r: max_all,
        first_half_max_abs_r: max_first,
    })
}

/// Serialized verdict document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictReport {
    pub sigma: f64,
    pub region: RegionTag,
    pub predicted_exponent: f64,
    pub slope: Option<f64>,
    pub rms_residual: Option<f64>,
    pub pass: bool,
    pub slack: f64,
    pub grid_size: usize,
    pub config_hash: String,
}

impl VerdictReport {
    pub fn new(v: &TheoremVerdict, grid_size: usize, config_hash: impl Into<String>) -> Self {
        Self {
            sigma: v.sigma,
            region: v.region,
            predicted_exponent: v.predicted_exponent,
            slope: v.observed.map(|f| f.slope),
            rms_residual: v.observed.map(|f| f.rms_residual),
            pass: v.pass,
            slack: v.slack,
            grid_size,
            config_hash: config_hash.into(),
        }
    }
}
