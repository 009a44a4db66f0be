use num_complex::Complex64;

use super::euler_maclaurin::BERNOULLI_OVER_FACTORIAL;
use super::{
    pole_guard, pow_neg_ln, require_sigma_above, rounding_allowance, EvalResult, Method, POLE_RADIUS,
};
use crate::error::{Error, Result};
use crate::params::{BarnesParams, ComplexPoint};
use crate::sum::{CompensatedComplex, CompensatedSum};

/// `|B_12| / 12!`
const B12_OVER_FACTORIAL: f64 = 691.0 / 1307674368000.0;

/// `|(s)_k|` for the rising factorial.
fn rising_abs(z: Complex64, k: u32) -> f64 {
    (0..k).map(|j| (z + j as f64).norm()).product()
}

/// `zeta(s, a) = sum_{n >= 0} (n + a)^{-s}`; see [`hurwitz_zeta_bounded`].
pub fn hurwitz_zeta(s: ComplexPoint, a: f64) -> Result<Complex64> {
    hurwitz_zeta_bounded(s, a).map(|(v, _)| v)
}

/// Hurwitz zeta by Euler–Maclaurin with corrections through `B_12`, shifted by
/// `K` terms so that `(|s| + 12) / (K + a) <= 1/2`. Returns the value and the
/// remainder bound `|B_12|/12! |(s)_12| X^{-sigma-11} / (sigma + 11)`, `X = K + a`.
pub fn hurwitz_zeta_bounded(s: ComplexPoint, a: f64) -> Result<(Complex64, f64)> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::DomainError(format!("Hurwitz parameter must be positive, got {a}")));
    }
    if !(s.sigma > -10.0) {
        return Err(Error::RegionError {
            operation: "hurwitz_zeta",
            sigma: s.sigma,
            requirement: "sigma > -10",
        });
    }
    let z = s.to_complex();
    if (z - 1.0).norm() < POLE_RADIUS {
        return Err(Error::PoleProximity {
            sigma: s.sigma,
            t: s.t,
            radius: POLE_RADIUS,
        });
    }
    Ok(hurwitz_unchecked(z, a))
}

pub(crate) fn hurwitz_unchecked(z: Complex64, a: f64) -> (Complex64, f64) {
    let k = (2.0 * (z.norm() + 12.0) - a).ceil().max(0.0) as u64;
    let mut acc = CompensatedComplex::new();
    let mut abs_sum = 0.0;
    for n in 0..k {
        let term = pow_neg_ln((n as f64 + a).ln(), z);
        abs_sum += term.norm();
        acc.add(term);
    }
    let x = k as f64 + a;
    let xs = pow_neg_ln(x.ln(), z);
    abs_sum += xs.norm() * (x / (z - 1.0).norm() + 1.0);
    acc.add(xs * x / (z - 1.0));
    acc.add(xs * 0.5);
    // (s)_{2j-1} X^{-s-2j+1}
    let mut term = xs * z / x;
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        acc.add(term * *c);
        let r = 2.0 * j as f64 + 1.0;
        term = term * (z + r) * (z + r + 1.0) / (x * x);
    }
    let sigma = z.re;
    let bound = B12_OVER_FACTORIAL * rising_abs(z, 12) * x.powf(-sigma - 11.0) / (sigma + 11.0)
        + rounding_allowance(abs_sum, z.im, x.ln().max(a.ln().abs()));
    (acc.value(), bound)
}

/// `w^{-s} sum_{m=0}^{M} zeta(s, (alpha + v m)/w)`; the omitted `m > M` tail is
/// bounded by an elementary integral majorant and folded into `error_bound`.
pub fn hurwitz_oracle(s: ComplexPoint, params: &BarnesParams, m_cut: u64) -> Result<EvalResult> {
    require_sigma_above(s, 2.0, "hurwitz_oracle", "sigma > 2")?;
    let z = s.to_complex();
    let sigma = s.sigma;
    let (alpha, v, w) = (params.alpha(), params.v(), params.w());
    let mut acc = CompensatedComplex::new();
    let mut err = CompensatedSum::new();
    let mut abs_sum = 0.0;
    for m in 0..=m_cut {
        let (val, bound) = hurwitz_unchecked(z, (alpha + v * m as f64) / w);
        abs_sum += val.norm();
        acc.add(val);
        err.add(bound);
    }
    err.add(rounding_allowance(abs_sum, z.im, w.ln()));
    let a_m = (alpha + v * m_cut as f64) / w;
    let tail = (w / v)
        * (a_m.powf(1.0 - sigma) / (sigma - 1.0)
            + a_m.powf(2.0 - sigma) / ((sigma - 1.0) * (sigma - 2.0)));
    let w_pow = pow_neg_ln(w.ln(), z);
    let scale = w.powf(-sigma);
    Ok(EvalResult {
        value: acc.value() * w_pow,
        error_bound: scale * (tail + err.value()),
        method: Method::HurwitzOracle,
        terms_used: m_cut + 1,
    })
}

/// `zeta_2` for `sigma > 1` from `M` Hurwitz values plus an Euler–Maclaurin
/// expansion of the remaining `m`-sum, whose terms are again Hurwitz values:
///
/// `sum_{m >= M} F(m) = (w/v) zeta(s-1, a_M)/(s-1) + F(M)/2
///   + sum_j B_{2j}/(2j)! (v/w)^{2j-1} (s)_{2j-1} zeta(s+2j-1, a_M)`
///
/// with `F(m) = zeta(s, a_m)`, `a_m = (alpha + v m)/w`.
pub fn hurwitz_reference(s: ComplexPoint, params: &BarnesParams, m_cut: u64) -> Result<EvalResult> {
    require_sigma_above(s, 1.0, "hurwitz_reference", "sigma > 1")?;
    pole_guard(s)?;
    let z = s.to_complex();
    let sigma = s.sigma;
    let (alpha, v, w) = (params.alpha(), params.v(), params.w());
    let ratio = v / w;
    let mut acc = CompensatedComplex::new();
    let mut err = CompensatedSum::new();
    let mut abs_sum = 0.0;
    for m in 0..m_cut {
        let (val, bound) = hurwitz_unchecked(z, (alpha + v * m as f64) / w);
        abs_sum += val.norm();
        acc.add(val);
        err.add(bound);
    }
    err.add(rounding_allowance(abs_sum, z.im, w.ln()));
    let a_m = (alpha + v * m_cut as f64) / w;
    let (h_minus, b0) = hurwitz_unchecked(z - 1.0, a_m);
    acc.add(h_minus / (z - 1.0) / ratio);
    err.add(b0 / ((z - 1.0).norm() * ratio));
    let (h0, b1) = hurwitz_unchecked(z, a_m);
    acc.add(h0 * 0.5);
    err.add(0.5 * b1);
    // (s)_{2j-1} (v/w)^{2j-1}
    let mut coeff = z * ratio;
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let order = 2.0 * j as f64 + 1.0;
        let (h, b) = hurwitz_unchecked(z + order, a_m);
        acc.add(h * coeff * *c);
        err.add(b * coeff.norm() * c.abs());
        coeff = coeff * (z + order) * (z + order + 1.0) * (ratio * ratio);
    }
    let (zeta_tail, _) = hurwitz_unchecked(Complex64::new(sigma + 11.0, 0.0), a_m);
    let remainder =
        B12_OVER_FACTORIAL * ratio.powi(11) * rising_abs(z, 12) * zeta_tail.re / (sigma + 11.0);
    err.add(remainder);
    let w_pow = pow_neg_ln(w.ln(), z);
    Ok(EvalResult {
        value: acc.value() * w_pow,
        error_bound: w.powf(-sigma) * err.value(),
        method: Method::HurwitzOracle,
        terms_used: m_cut + 8,
    })
}

/// [`hurwitz_reference`] with the smallest `M` for which `(v/w)(|s|+12)/a_M <= 1/2`.
pub fn hurwitz_reference_auto(s: ComplexPoint, params: &BarnesParams) -> Result<EvalResult> {
    let need = 2.0 * (s.to_complex().norm() + 12.0) - params.alpha() / params.v();
    hurwitz_reference(s, params, need.ceil().max(1.0) as u64)
}
