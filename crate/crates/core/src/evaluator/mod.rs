//! Evaluation of `zeta_2(s, alpha; v, w) = sum_{m,n >= 0} (alpha + v m + w n)^{-s}`.
//!
//! Four independent routes are provided: the direct triangle sum, the square sum with
//! the closed-form Euler–Maclaurin correction (at an integer cut or at a real height),
//! and a rearrangement into Hurwitz zeta values.

mod direct;
mod euler_maclaurin;
mod hurwitz;
mod lemma;

pub use direct::{direct_series, direct_series_truncated, direct_series_with, tail_majorant};
pub use euler_maclaurin::{
    em_row_sum, euler_maclaurin_eval, euler_maclaurin_eval_with, theorem3_eval, theorem3_eval_with,
    RowEnd,
};
pub use hurwitz::{
    hurwitz_oracle, hurwitz_reference, hurwitz_reference_auto, hurwitz_zeta, hurwitz_zeta_bounded,
};
pub use lemma::verify_exp_sum_lemma;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{BarnesParams, ComplexPoint};

pub const POLE_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    DirectSeries,
    EulerMaclaurin,
    Theorem3,
    HurwitzOracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::DirectSeries => "direct",
            Method::EulerMaclaurin => "em",
            Method::Theorem3 => "t3",
            Method::HurwitzOracle => "hurwitz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    pub error_bound: f64,
    pub method: Method,
    pub terms_used: u64,
}

/// Truncation settings: real height `x` with constant `c` for the height guard
/// `|t| <= 2 pi x / c`, and the integer cut `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPlan {
    pub x: f64,
    pub c: f64,
    pub n: u64,
}

impl TruncationPlan {
    pub fn new(x: f64, c: f64, n: u64) -> Result<Self> {
        if !(c > 1.0 && c.is_finite()) {
            return Err(Error::InvalidConfig(format!("C must exceed 1, got {c}")));
        }
        if !(x >= 1.0 && x.is_finite()) {
            return Err(Error::InvalidConfig(format!("x must be at least 1, got {x}")));
        }
        if n < 1 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        Ok(Self { x, c, n })
    }

    pub fn height_limit(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.x / self.c
    }
}

/// Calibration constants for reported bounds and the direct-series term budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalConfig {
    pub c_em: f64,
    pub c_t3: f64,
    pub max_series_terms: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            c_em: 10.0,
            c_t3: 10.0,
            max_series_terms: 20_000_000,
        }
    }
}

/// `base^{-s}` as `base^{-sigma} (cos(t log base) - i sin(t log base))`.
pub fn complex_power(base: f64, s: ComplexPoint) -> Result<Complex64> {
    if !(base > 0.0) || !base.is_finite() {
        return Err(Error::DomainError(format!("base must be positive, got {base}")));
    }
    Ok(pow_neg_ln(base.ln(), s.to_complex()))
}

/// `exp(-s L)` for `L = log base`.
#[inline]
pub(crate) fn pow_neg_ln(ln_b: f64, s: Complex64) -> Complex64 {
    let mag = (-s.re * ln_b).exp();
    let (sin, cos) = (s.im * ln_b).sin_cos();
    Complex64::new(mag * cos, -mag * sin)
}

/// `b^{e}` for real `b > 0`.
#[inline]
pub(crate) fn pow_real_base(b: f64, e: Complex64) -> Complex64 {
    pow_neg_ln(b.ln(), -e)
}

pub(crate) fn pole_guard(s: ComplexPoint) -> Result<()> {
    if s.pole_distance() < POLE_RADIUS {
        return Err(Error::PoleProximity {
            sigma: s.sigma,
            t: s.t,
            radius: POLE_RADIUS,
        });
    }
    Ok(())
}

pub(crate) fn require_sigma_above(
    s: ComplexPoint,
    bound: f64,
    operation: &'static str,
    requirement: &'static str,
) -> Result<()> {
    if s.sigma > bound {
        Ok(())
    } else {
        Err(Error::RegionError {
            operation,
            sigma: s.sigma,
            requirement,
        })
    }
}

/// `[(a+vx)^{2-s} + (a+wx)^{2-s} - (a+vx+wx)^{2-s}] / (v w (s-1)(s-2))`.
pub fn correction_term(s: ComplexPoint, params: &BarnesParams, x: f64) -> Complex64 {
    let z = s.to_complex();
    let e = Complex64::new(2.0, 0.0) - z;
    let (a, v, w) = (params.alpha(), params.v(), params.w());
    let num = pow_real_base(a + v * x, e) + pow_real_base(a + w * x, e)
        - pow_real_base(a + v * x + w * x, e);
    num / ((z - 1.0) * (z - 2.0) * (v * w))
}

/// Floating-point allowance for a compensated sum of terms `b^{-s}` with `|terms|`
/// summing to `abs_sum`: a few ulps per term plus the phase error of `t log b`.
pub(crate) fn rounding_allowance(abs_sum: f64, t: f64, ln_max: f64) -> f64 {
    (16.0 + t.abs() * ln_max.abs()) * f64::EPSILON * abs_sum
}

/// Calibrated truncation bound `c h^{1-sigma} min(v, w)^{-sigma}`.
pub(crate) fn scaled_bound(c: f64, h: f64, sigma: f64, params: &BarnesParams) -> f64 {
    c * h.powf(1.0 - sigma) * params.min_step().powf(-sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_power_examples() {
        let s = ComplexPoint::new(1.7, -3.0).unwrap();
        assert_eq!(complex_power(1.0, s).unwrap(), Complex64::new(1.0, 0.0));

        let z = complex_power(std::f64::consts::E, ComplexPoint::new(0.0, 1.0).unwrap()).unwrap();
        assert!((z - Complex64::new(1f64.cos(), -(1f64.sin()))).norm() < 1e-15);

        let q = complex_power(2.0, ComplexPoint::real(2.0).unwrap()).unwrap();
        assert!((q.re - 0.25).abs() < 1e-16 && q.im == 0.0);

        assert_eq!(complex_power(0.0, s).unwrap_err().kind(), "DomainError");
        assert_eq!(complex_power(-1.0, s).unwrap_err().kind(), "DomainError");
    }

    #[test]
    fn plan_validation() {
        assert!(TruncationPlan::new(10.0, 1.0, 5).is_err());
        assert!(TruncationPlan::new(0.5, 2.0, 5).is_err());
        assert!(TruncationPlan::new(1.0, 2.0, 0).is_err());
        let p = TruncationPlan::new(5.0, 2.0 * std::f64::consts::PI, 1).unwrap();
        assert!((p.height_limit() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn correction_is_real_on_real_axis() {
        let p = BarnesParams::integers(1, 2, 3).unwrap();
        let c = correction_term(ComplexPoint::real(2.5).unwrap(), &p, 7.0);
        assert_eq!(c.im, 0.0);
        // x^{-1/2} scale, hand-checked: (15^{-.5} + 22^{-.5} - 36^{-.5}) / (6 * 1.5 * 0.5)
        let want = (15f64.powf(-0.5) + 22f64.powf(-0.5) - 36f64.powf(-0.5)) / 4.5;
        assert!((c.re - want).abs() < 1e-15);
    }
}
