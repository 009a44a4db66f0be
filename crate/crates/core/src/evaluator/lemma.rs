use num_complex::Complex64;

use super::{pow_neg_ln, pow_real_base, POLE_RADIUS};
use crate::error::{Error, Result};
use crate::params::{BarnesParams, ComplexPoint};
use crate::sum::CompensatedComplex;

/// `|sum_{x < n <= N} (alpha + v m + w n)^{-s} - int_x^N (alpha + v m + w xi)^{-s} dxi|`
/// for fixed `m`, with the integral in closed form.
pub fn verify_exp_sum_lemma(
    s: ComplexPoint,
    params: &BarnesParams,
    m_fixed: u64,
    x: f64,
    n: u64,
    c: f64,
) -> Result<f64> {
    if !(s.sigma > 0.0) {
        return Err(Error::RegionError {
            operation: "verify_exp_sum_lemma",
            sigma: s.sigma,
            requirement: "sigma > 0",
        });
    }
    if !(c > 1.0) || !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidConfig(format!("need C > 1 and x >= 0 (C {c}, x {x})")));
    }
    let limit = 2.0 * std::f64::consts::PI * x / c;
    if s.t.abs() > limit {
        return Err(Error::HeightViolation { t: s.t, limit });
    }
    let nf = n as f64;
    if x > nf {
        return Err(Error::InvalidConfig(format!("x = {x} exceeds N = {n}")));
    }
    if x == nf {
        return Ok(0.0);
    }
    let z = s.to_complex();
    if (z - 1.0).norm() < POLE_RADIUS {
        return Err(Error::PoleProximity {
            sigma: s.sigma,
            t: s.t,
            radius: POLE_RADIUS,
        });
    }
    let beta = params.alpha() + params.v() * m_fixed as f64;
    let w = params.w();
    let mut acc = CompensatedComplex::new();
    let first = x.floor() as u64 + 1;
    for k in first..=n {
        acc.add(pow_neg_ln((beta + w * k as f64).ln(), z));
    }
    let e = Complex64::new(1.0, 0.0) - z;
    let integral = (pow_real_base(beta + w * nf, e) - pow_real_base(beta + w * x, e)) / (e * w);
    Ok((acc.value() - integral).norm())
}
