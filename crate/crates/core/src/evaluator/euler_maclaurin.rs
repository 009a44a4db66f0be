use num_complex::Complex64;

use super::{
    correction_term, pole_guard, pow_neg_ln, pow_real_base, require_sigma_above,
    rounding_allowance, scaled_bound, EvalConfig, EvalResult, Method, TruncationPlan,
};
use crate::error::{Error, Result};
use crate::params::{BarnesParams, ComplexPoint};
use crate::quadrature::GaussLegendre;
use crate::sum::CompensatedComplex;

/// `B_{2j} / (2j)!` for `j = 1..=6`.
pub(crate) const BERNOULLI_OVER_FACTORIAL: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
];

/// Upper end of a row sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowEnd {
    Finite(u64),
    Infinite,
}

const ROW_GL_ORDER: usize = 8;

/// `sum_{m=a+1}^{b} (alpha + v m + w n)^{-s}` via the first-order Euler–Maclaurin
/// identity, with the sawtooth integral done per unit interval.
pub fn em_row_sum(
    s: ComplexPoint,
    params: &BarnesParams,
    n_fixed: u64,
    a: u64,
    b: RowEnd,
) -> Result<Complex64> {
    if let RowEnd::Finite(b) = b {
        if a >= b {
            return Err(Error::EmptyRange { a, b });
        }
    } else {
        require_sigma_above(s, 1.0, "em_row_sum", "sigma > 1 for an infinite row")?;
    }
    let z = s.to_complex();
    let v = params.v();
    let beta = params.alpha() + params.w() * n_fixed as f64;
    let gl = GaussLegendre::new(ROW_GL_ORDER);

    let end = match b {
        RowEnd::Finite(b) => b,
        RowEnd::Infinite => {
            // start of the Bernoulli tail: v(|s|+12)/(beta + v K) <= 1/2
            let k = ((2.0 * v * (z.norm() + 12.0) - beta) / v).ceil().max(0.0) as u64;
            k.max(a)
        }
    };

    let mut total = CompensatedComplex::new();
    if end > a {
        total.add(finite_identity(z, v, beta, a, end, &gl)?);
    }
    if b == RowEnd::Infinite {
        total.add(bernoulli_tail(z, v, beta, end));
    }
    Ok(total.value())
}

fn phi(z: Complex64, v: f64, beta: f64, x: f64) -> Complex64 {
    pow_neg_ln((beta + v * x).ln(), z)
}

fn finite_identity(
    z: Complex64,
    v: f64,
    beta: f64,
    a: u64,
    b: u64,
    gl: &GaussLegendre,
) -> Result<Complex64> {
    let one_minus_s = Complex64::new(1.0, 0.0) - z;
    let lb = beta + v * b as f64;
    let la = beta + v * a as f64;
    let integral = (pow_real_base(lb, one_minus_s) - pow_real_base(la, one_minus_s)) / (one_minus_s * v);
    let half_jump = (phi(z, v, beta, b as f64) - phi(z, v, beta, a as f64)) * 0.5;

    let dphi_coeff = -z * v;
    let s_plus_one = z + 1.0;
    let mut saw = CompensatedComplex::new();
    for k in a..b {
        let kf = k as f64;
        let rate = v * (z.norm() + 1.0) / (beta + v * kf);
        let panels = ((4.0 * rate).ceil() as usize).max(1);
        let f = |x: f64| pow_neg_ln((beta + v * x).ln(), s_plus_one) * (x - kf - 0.5);
        let coarse = panel_integral(gl, kf, kf + 1.0, panels, &f);
        let fine = panel_integral(gl, kf, kf + 1.0, 2 * panels, &f);
        let scale = (beta + v * kf).powf(-z.re - 1.0);
        let target = 1e-13 * scale + 1e-300;
        let diff = (fine - coarse).norm();
        if diff > target {
            return Err(Error::QuadratureFailure {
                a: kf,
                b: kf + 1.0,
                estimate: diff,
                target,
            });
        }
        saw.add(fine);
    }
    Ok(integral + saw.value() * dphi_coeff + half_jump)
}

fn panel_integral<F: Fn(f64) -> Complex64>(
    gl: &GaussLegendre,
    a: f64,
    b: f64,
    panels: usize,
    f: &F,
) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (x, w) in gl.panel(lo, lo + h) {
            acc += f(x) * w;
        }
    }
    acc
}

/// `sum_{m > K} phi(m)` from the Euler–Maclaurin expansion at `K` through `B_12`.
fn bernoulli_tail(z: Complex64, v: f64, beta: f64, k: u64) -> Complex64 {
    let base = beta + v * k as f64;
    let p = pow_neg_ln(base.ln(), z);
    let integral = p * base / ((z - 1.0) * v);
    let mut acc = integral - p * 0.5;
    // phi^{(r)}(K) = (-v)^r (s)_r base^{-s-r}
    let mut deriv = p;
    let mut r = 0u32;
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let order = 2 * j as u32 + 1;
        while r < order {
            deriv = deriv * (z + r as f64) * (-v / base);
            r += 1;
        }
        acc -= deriv * *c;
    }
    acc
}

/// Square sum over `0 <= m, n <= N`, ascending `m` then `n`.
fn square_sum(z: Complex64, params: &BarnesParams, n_max: u64) -> (Complex64, f64) {
    let mut acc = CompensatedComplex::new();
    let mut abs_sum = 0.0;
    for m in 0..=n_max {
        let base_m = params.alpha() + params.v() * m as f64;
        for n in 0..=n_max {
            let lambda = base_m + params.w() * n as f64;
            let term = pow_neg_ln(lambda.ln(), z);
            abs_sum += term.norm();
            acc.add(term);
        }
    }
    let ln_max = params.lambda(n_max, n_max).ln();
    (acc.value(), rounding_allowance(abs_sum, z.im, ln_max))
}

pub fn euler_maclaurin_eval(s: ComplexPoint, params: &BarnesParams, n: u64) -> Result<EvalResult> {
    euler_maclaurin_eval_with(s, params, n, &EvalConfig::default())
}

/// Square sum to `N` plus the closed-form correction at `N`.
pub fn euler_maclaurin_eval_with(
    s: ComplexPoint,
    params: &BarnesParams,
    n: u64,
    config: &EvalConfig,
) -> Result<EvalResult> {
    require_sigma_above(s, 1.0, "euler_maclaurin_eval", "sigma > 1")?;
    pole_guard(s)?;
    if n < 1 {
        return Err(Error::InvalidConfig("N must be at least 1".into()));
    }
    let z = s.to_complex();
    let (sum, rounding) = square_sum(z, params, n);
    let value = sum + correction_term(s, params, n as f64);
    Ok(EvalResult {
        value,
        error_bound: scaled_bound(config.c_em, n as f64, s.sigma, params) + rounding,
        method: Method::EulerMaclaurin,
        terms_used: (n + 1) * (n + 1),
    })
}

pub fn theorem3_eval(s: ComplexPoint, params: &BarnesParams, plan: TruncationPlan) -> Result<EvalResult> {
    theorem3_eval_with(s, params, plan, &EvalConfig::default())
}

/// Square sum over `m, n <= x` plus the correction at the real height `x`, valid for
/// `|t| <= 2 pi x / C`.
pub fn theorem3_eval_with(
    s: ComplexPoint,
    params: &BarnesParams,
    plan: TruncationPlan,
    config: &EvalConfig,
) -> Result<EvalResult> {
    require_sigma_above(s, 1.0, "theorem3_eval", "sigma > 1")?;
    pole_guard(s)?;
    let limit = plan.height_limit();
    if s.t.abs() > limit {
        return Err(Error::HeightViolation { t: s.t, limit });
    }
    let floor = plan.x.floor() as u64;
    let z = s.to_complex();
    let (sum, rounding) = square_sum(z, params, floor);
    let value = sum + correction_term(s, params, plan.x);
    Ok(EvalResult {
        value,
        error_bound: scaled_bound(config.c_t3, plan.x, s.sigma, params) + rounding,
        method: Method::Theorem3,
        terms_used: (floor + 1) * (floor + 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn finite_row_reproduces_partial_sum() {
        let p = BarnesParams::integers(1, 1, 1).unwrap();
        let s = ComplexPoint::real(3.0).unwrap();
        let got = em_row_sum(s, &p, 0, 0, RowEnd::Finite(10)).unwrap();
        let want: f64 = (1..=10).map(|m| (1.0 + m as f64).powi(-3)).sum();
        assert!((got.re - want).abs() <= 1e-12 * want);
        assert!(got.im.abs() < 1e-15);
    }

    #[test]
    fn finite_row_complex_and_rational_steps() {
        let p = BarnesParams::from_ratios((5, 3), (1, 2), (3, 1)).unwrap();
        let s = ComplexPoint::new(1.4, 25.0).unwrap();
        let got = em_row_sum(s, &p, 4, 3, RowEnd::Finite(60)).unwrap();
        let z = s.to_complex();
        let want: Complex64 = (4..=60).map(|m| pow_neg_ln(p.lambda(m, 4).ln(), z)).sum();
        assert!((got - want).norm() <= 1e-12 * want.norm());
    }

    #[test]
    fn infinite_row_matches_brute_force_tail() {
        let p = BarnesParams::integers(1, 1, 1).unwrap();
        let s = ComplexPoint::real(2.5).unwrap();
        let n0 = 5;
        let got = em_row_sum(s, &p, 3, n0, RowEnd::Infinite).unwrap();
        // brute force to 10^6 plus the integral tail with its half-term correction
        let big = 1_000_000u64;
        let head: f64 = ((n0 + 1)..=big).rev().map(|m| (4.0 + m as f64).powf(-2.5)).sum();
        let end = 4.0 + big as f64;
        let tail = end.powf(-1.5) / 1.5 - 0.5 * end.powf(-2.5);
        let bound = 2.5 * end.powf(-3.5);
        assert!((got.re - (head + tail)).abs() < 1e-13 + bound, "{} vs {}", got.re, head + tail);
    }

    #[test]
    fn row_guards() {
        let p = BarnesParams::integers(1, 1, 1).unwrap();
        let s = ComplexPoint::real(2.0).unwrap();
        assert_eq!(
            em_row_sum(s, &p, 0, 4, RowEnd::Finite(4)).unwrap_err().kind(),
            "EmptyRange"
        );
        let s = ComplexPoint::real(1.0).unwrap();
        assert_eq!(
            em_row_sum(s, &p, 0, 0, RowEnd::Infinite).unwrap_err().kind(),
            "RegionError"
        );
    }

    #[test]
    fn em_recovers_zeta_two() {
        let p = BarnesParams::integers(1, 1, 1).unwrap();
        let r = euler_maclaurin_eval(ComplexPoint::real(3.0).unwrap(), &p, 100).unwrap();
        assert!((r.value.re - PI * PI / 6.0).abs() < 1e-3);
        assert!((r.value.re - PI * PI / 6.0).abs() <= r.error_bound);
    }

    #[test]
    fn pole_guard_fires() {
        let p = BarnesParams::integers(1, 1, 1).unwrap();
        let s = ComplexPoint::new(2.0, 1e-7).unwrap();
        assert_eq!(
            euler_maclaurin_eval(s, &p, 10).unwrap_err().kind(),
            "PoleProximity"
        );
    }

    #[test]
    fn theorem3_height_guard() {
        let p = BarnesParams::integers(1, 1, 1).unwrap();
        let plan = TruncationPlan::new(5.0, 2.0 * PI, 1).unwrap();
        let s = ComplexPoint::new(2.0, 10.0).unwrap();
        assert_eq!(theorem3_eval(s, &p, plan).unwrap_err().kind(), "HeightViolation");
    }

    #[test]
    fn theorem3_zeta_three_halves() {
        let p = BarnesParams::integers(1, 1, 1).unwrap();
        let plan = TruncationPlan::new(200.0, 2.0 * PI, 1).unwrap();
        let r = theorem3_eval(ComplexPoint::real(2.5).unwrap(), &p, plan).unwrap();
        let zeta_1_5 = 2.612_375_348_685_488;
        assert!((r.value.re - zeta_1_5).abs() <= r.error_bound);
    }
}
