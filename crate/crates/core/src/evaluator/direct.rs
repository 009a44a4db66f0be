use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::{pow_neg_ln, require_sigma_above, rounding_allowance, EvalConfig, EvalResult, Method};
use crate::error::{Error, Result};
use crate::params::{BarnesParams, ComplexPoint, Tolerance};
use crate::sum::CompensatedComplex;

/// First `k` from which `(k+1)(alpha + mu k)^{-sigma}` is decreasing.
fn decreasing_from(sigma: f64, alpha: f64, mu: f64) -> u64 {
    let x = (alpha - sigma * mu) / ((sigma - 1.0) * mu);
    if x <= 0.0 {
        0
    } else {
        x.ceil() as u64
    }
}

fn integral_majorant(sigma: f64, alpha: f64, mu: f64, m: u64) -> f64 {
    let u0 = alpha + mu * m as f64;
    (u0.powf(2.0 - sigma) / (sigma - 2.0) + (mu - alpha) * u0.powf(1.0 - sigma) / (sigma - 1.0))
        / (mu * mu)
}

/// Upper bound for `sum_{m+n > M} |(alpha + v m + w n)^{-s}|`, using
/// `alpha + v m + w n >= alpha + min(v, w)(m + n)`. Requires `sigma > 2`.
pub fn tail_majorant(sigma: f64, params: &BarnesParams, m: u64) -> f64 {
    let (alpha, mu) = (params.alpha(), params.min_step());
    let k0 = decreasing_from(sigma, alpha, mu);
    if m >= k0 {
        return integral_majorant(sigma, alpha, mu, m);
    }
    let head: f64 = ((m + 1)..=k0)
        .map(|k| (k + 1) as f64 * (alpha + mu * k as f64).powf(-sigma))
        .sum();
    head + integral_majorant(sigma, alpha, mu, k0)
}

/// Reduced ratio `(p, q)` with `v/w = p/q`, when it fits in machine integers.
fn small_ratio(params: &BarnesParams) -> Option<(u64, u64)> {
    let (p, q) = params.ratio()?;
    Some((p.to_u64()?, q.to_u64()?))
}

/// Power evaluations needed for the triangle `m + n <= M`.
fn evaluation_count(params: &BarnesParams, m: u64) -> f64 {
    let mf = m as f64;
    let triangle = (mf + 1.0) * (mf + 2.0) / 2.0;
    match small_ratio(params) {
        Some((p, q)) => {
            let big = p.max(q) as f64;
            if big < mf / 2.0 {
                big * (mf + 1.0)
            } else {
                triangle
            }
        }
        None => triangle,
    }
}

/// Sum over the triangle `m + n <= M`, ascending `m` then ascending `n`.
///
/// For rational `v/w = p/q` the points `(m + q j, n - p j)` share one value, so each
/// class is visited once and weighted by its size inside the triangle.
fn triangle_sum(s: Complex64, params: &BarnesParams, m_cut: u64) -> (Complex64, f64) {
    let mut acc = CompensatedComplex::new();
    let mut abs_sum = 0.0;
    let alpha = params.alpha();
    if let Some((p, q)) = small_ratio(params) {
        if (p.max(q) as f64) < m_cut as f64 / 2.0 {
            // orient so the class step raises m + n: step (+big, -small)
            let (small, big, v_small_axis, v_big_axis) = if p <= q {
                (p, q, params.w(), params.v())
            } else {
                (q, p, params.v(), params.w())
            };
            for i in 0..big {
                let base_i = alpha + v_big_axis * i as f64;
                for k in 0..=(m_cut - i) {
                    let by_k = k / small;
                    let count = if big == small {
                        by_k
                    } else {
                        by_k.min((m_cut - i - k) / (big - small))
                    } + 1;
                    let lambda = base_i + v_small_axis * k as f64;
                    let term = pow_neg_ln(lambda.ln(), s) * count as f64;
                    abs_sum += term.norm();
                    acc.add(term);
                }
            }
            return (acc.value(), abs_sum);
        }
    }
    for m in 0..=m_cut {
        let base_m = alpha + params.v() * m as f64;
        for n in 0..=(m_cut - m) {
            let lambda = base_m + params.w() * n as f64;
            let term = pow_neg_ln(lambda.ln(), s);
            abs_sum += term.norm();
            acc.add(term);
        }
    }
    (acc.value(), abs_sum)
}

/// Fixed-order direct sum over `m + n <= M`; `error_bound` is the tail majorant.
pub fn direct_series_truncated(s: ComplexPoint, params: &BarnesParams, m_cut: u64) -> Result<EvalResult> {
    require_sigma_above(s, 2.0, "direct_series", "sigma > 2")?;
    let (value, abs_sum) = triangle_sum(s.to_complex(), params, m_cut);
    let mf = m_cut as f64;
    let ln_max = params.lambda(m_cut, m_cut).ln();
    Ok(EvalResult {
        value,
        error_bound: tail_majorant(s.sigma, params, m_cut) + rounding_allowance(abs_sum, s.t, ln_max),
        method: Method::DirectSeries,
        terms_used: ((mf + 1.0) * (mf + 2.0) / 2.0) as u64,
    })
}

pub fn direct_series(s: ComplexPoint, params: &BarnesParams, tol: Tolerance) -> Result<EvalResult> {
    direct_series_with(s, params, tol, &EvalConfig::default())
}

/// Direct sum with the triangle order chosen so the tail majorant is `<= tol.abs_tol`.
pub fn direct_series_with(
    s: ComplexPoint,
    params: &BarnesParams,
    tol: Tolerance,
    config: &EvalConfig,
) -> Result<EvalResult> {
    require_sigma_above(s, 2.0, "direct_series", "sigma > 2")?;
    // leave room for the rounding allowance added to the bound
    let target = 0.9 * tol.abs_tol;
    let sigma = s.sigma;
    let mut hi: u64 = 1;
    while tail_majorant(sigma, params, hi) > target {
        if hi > (1u64 << 50) {
            return Err(Error::BudgetExceeded {
                operation: "direct_series",
                needed: f64::INFINITY,
                cap: config.max_series_terms as f64,
            });
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    if tail_majorant(sigma, params, lo) <= target {
        hi = lo;
    } else {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if tail_majorant(sigma, params, mid) <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let needed = evaluation_count(params, hi);
    if needed > config.max_series_terms as f64 {
        return Err(Error::BudgetExceeded {
            operation: "direct_series",
            needed,
            cap: config.max_series_terms as f64,
        });
    }
    direct_series_truncated(s, params, hi)
}
