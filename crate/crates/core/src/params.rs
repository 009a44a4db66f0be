//! Domain types shared by every module: the parameter triple `(alpha, v, w)`,
//! complex evaluation points, theorem regions and tolerances.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Region of the `sigma` axis and which theorem applies there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum RegionTag {
    /// `sigma > 2`: mean square is `c T + O(1)`.
    Theorem1,
    /// `3/2 < sigma <= 2`: power-law remainders.
    Theorem2,
    /// `1 < sigma <= 3/2`: only the truncation formula is available.
    Theorem3Strip,
    /// `sigma <= 1` (or non-finite input).
    OutOfScope,
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RegionTag::Theorem1 => "Theorem1",
            RegionTag::Theorem2 => "Theorem2",
            RegionTag::Theorem3Strip => "Theorem3Strip",
            RegionTag::OutOfScope => "OutOfScope",
        };
        f.write_str(name)
    }
}

/// Classifies `sigma` into its theorem region. Breakpoints are `1`, `3/2` and `2`,
/// each belonging to the region on its left.
pub fn classify_region(sigma: f64) -> RegionTag {
    if sigma > 2.0 {
        RegionTag::Theorem1
    } else if sigma > 1.5 {
        RegionTag::Theorem2
    } else if sigma > 1.0 {
        RegionTag::Theorem3Strip
    } else {
        // NaN falls through every comparison and lands here as well.
        RegionTag::OutOfScope
    }
}

/// A point `s = sigma + i t` with finite components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !sigma.is_finite() {
            return Err(Error::NonFinite("sigma"));
        }
        if !t.is_finite() {
            return Err(Error::NonFinite("t"));
        }
        Ok(Self { sigma, t })
    }

    pub fn real(sigma: f64) -> Result<Self> {
        Self::new(sigma, 0.0)
    }

    pub fn conj(self) -> Self {
        Self {
            sigma: self.sigma,
            t: -self.t,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }

    pub fn region(self) -> RegionTag {
        classify_region(self.sigma)
    }

    /// Distance to the nearer of the poles `s = 1`, `s = 2`.
    pub fn pole_distance(self) -> f64 {
        let s = self.to_complex();
        (s - 1.0).norm().min((s - 2.0).norm())
    }
}

/// Absolute and relative tolerance pair, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) || !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tolerances must be positive and finite (abs {abs_tol}, rel {rel_tol})"
            )));
        }
        Ok(Self { abs_tol, rel_tol })
    }

    pub fn abs(abs_tol: f64) -> Result<Self> {
        Self::new(abs_tol, Self::default().rel_tol)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
        }
    }
}

/// Closed vocabulary of irrational multipliers for `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IrrationalScale {
    Sqrt2,
    Sqrt3,
    Sqrt5,
    Golden,
    Pi,
    E,
}

impl IrrationalScale {
    pub const ALL: [IrrationalScale; 6] = [
        IrrationalScale::Sqrt2,
        IrrationalScale::Sqrt3,
        IrrationalScale::Sqrt5,
        IrrationalScale::Golden,
        IrrationalScale::Pi,
        IrrationalScale::E,
    ];

    pub fn value(self) -> f64 {
        match self {
            IrrationalScale::Sqrt2 => std::f64::consts::SQRT_2,
            IrrationalScale::Sqrt3 => 1.732_050_807_568_877_2,
            IrrationalScale::Sqrt5 => 2.236_067_977_499_79,
            IrrationalScale::Golden => 1.618_033_988_749_895,
            IrrationalScale::Pi => std::f64::consts::PI,
            IrrationalScale::E => std::f64::consts::E,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IrrationalScale::Sqrt2 => "sqrt2",
            IrrationalScale::Sqrt3 => "sqrt3",
            IrrationalScale::Sqrt5 => "sqrt5",
            IrrationalScale::Golden => "golden",
            IrrationalScale::Pi => "pi",
            IrrationalScale::E => "e",
        }
    }
}

impl FromStr for IrrationalScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| {
                Error::InvalidScale(format!(
                    "unknown scale '{s}' (expected one of sqrt2, sqrt3, sqrt5, golden, pi, e)"
                ))
            })
    }
}

/// Parses `"5/3"`, `"-2"`, `"0.125"` or `"1e-3"`-free decimals into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::InvalidConfig(format!("cannot parse '{text}' as a rational number"));
    if text.is_empty() {
        return Err(bad());
    }
    if text.contains('/') {
        let r = BigRational::from_str(text).map_err(|_| bad())?;
        return Ok(r);
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let mut r = BigRational::new(numer, denom);
    if negative {
        r = -r;
    }
    Ok(r)
}

/// Unvalidated parameter candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct RawParams {
    pub alpha: BigRational,
    pub v: BigRational,
    pub w: BigRational,
    pub ratio_irrational: bool,
    pub irrational_scale: Option<f64>,
}

impl RawParams {
    pub fn rational(alpha: BigRational, v: BigRational, w: BigRational) -> Self {
        Self {
            alpha,
            v,
            w,
            ratio_irrational: false,
            irrational_scale: None,
        }
    }

    pub fn irrational(alpha: BigRational, v: BigRational, w: BigRational, scale: f64) -> Self {
        Self {
            alpha,
            v,
            w,
            ratio_irrational: true,
            irrational_scale: Some(scale),
        }
    }
}

/// Validated parameters of `zeta_2(s, alpha; v, w)`.
///
/// `alpha`, `v` and `w` are held exactly. When the ratio is declared irrational the
/// effective `w` is `w * irrational_scale`; otherwise `v/w = p/q` in lowest terms.
#[derive(Debug, Clone, PartialEq)]
pub struct BarnesParams {
    alpha: BigRational,
    v: BigRational,
    w: BigRational,
    ratio_irrational: bool,
    irrational_scale: Option<f64>,
    ratio: Option<(BigInt, BigInt)>,
    alpha_f: f64,
    v_f: f64,
    w_f: f64,
}

fn check_positive(name: &'static str, x: &BigRational) -> Result<()> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter {
            name,
            value: x.to_string(),
        })
    }
}

fn rational_to_f64(x: &BigRational) -> Result<f64> {
    x.to_f64()
        .filter(|v| v.is_finite() && *v > 0.0)
        .ok_or_else(|| Error::RationalOverflow(format!("{x} has no finite positive f64 value")))
}

pub fn validate_params(raw: &RawParams) -> Result<BarnesParams> {
    check_positive("alpha", &raw.alpha)?;
    check_positive("v", &raw.v)?;
    check_positive("w", &raw.w)?;

    let scale = match (raw.ratio_irrational, raw.irrational_scale) {
        (false, None) => None,
        (false, Some(s)) => {
            return Err(Error::InvalidScale(format!(
                "scale {s} given but the ratio is not declared irrational"
            )))
        }
        (true, None) => {
            return Err(Error::InvalidScale(
                "irrational ratio declared without a scale".into(),
            ))
        }
        (true, Some(s)) if !(s.is_finite() && s > 0.0) => {
            return Err(Error::InvalidScale(format!("scale must be positive, got {s}")))
        }
        (true, Some(s)) => Some(s),
    };

    let ratio = if scale.is_none() {
        let q = &raw.v / &raw.w;
        Some((q.numer().clone(), q.denom().clone()))
    } else {
        None
    };

    let alpha_f = rational_to_f64(&raw.alpha)?;
    let v_f = rational_to_f64(&raw.v)?;
    let w_f = rational_to_f64(&raw.w)? * scale.unwrap_or(1.0);

    Ok(BarnesParams {
        alpha: raw.alpha.clone(),
        v: raw.v.clone(),
        w: raw.w.clone(),
        ratio_irrational: raw.ratio_irrational,
        irrational_scale: scale,
        ratio,
        alpha_f,
        v_f,
        w_f,
    })
}

impl BarnesParams {
    /// Convenience constructor for small integer ratios `alpha = an/ad` etc.
    pub fn from_ratios(alpha: (i64, i64), v: (i64, i64), w: (i64, i64)) -> Result<Self> {
        let r = |(n, d): (i64, i64)| -> Result<BigRational> {
            if d == 0 {
                return Err(Error::InvalidConfig("zero denominator".into()));
            }
            Ok(BigRational::new(n.into(), d.into()))
        };
        validate_params(&RawParams::rational(r(alpha)?, r(v)?, r(w)?))
    }

    pub fn integers(alpha: i64, v: i64, w: i64) -> Result<Self> {
        Self::from_ratios((alpha, 1), (v, 1), (w, 1))
    }

    /// `alpha`, `v` integers with `w_eff = w * scale` declared irrational.
    pub fn with_irrational_w(alpha: i64, v: i64, w: i64, scale: f64) -> Result<Self> {
        validate_params(&RawParams::irrational(
            BigRational::from_integer(alpha.into()),
            BigRational::from_integer(v.into()),
            BigRational::from_integer(w.into()),
            scale,
        ))
    }

    pub fn to_raw(&self) -> RawParams {
        RawParams {
            alpha: self.alpha.clone(),
            v: self.v.clone(),
            w: self.w.clone(),
            ratio_irrational: self.ratio_irrational,
            irrational_scale: self.irrational_scale,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_f
    }

    pub fn v(&self) -> f64 {
        self.v_f
    }

    /// Effective `w`, including the irrational scale when present.
    pub fn w(&self) -> f64 {
        self.w_f
    }

    pub fn alpha_exact(&self) -> &BigRational {
        &self.alpha
    }

    pub fn v_exact(&self) -> &BigRational {
        &self.v
    }

    /// The rational part of `w` (before any irrational scale).
    pub fn w_exact(&self) -> &BigRational {
        &self.w
    }

    pub fn ratio_irrational(&self) -> bool {
        self.ratio_irrational
    }

    pub fn irrational_scale(&self) -> Option<f64> {
        self.irrational_scale
    }

    /// `(p, q)` with `v/w = p/q` in lowest terms; `None` for irrational ratios.
    pub fn ratio(&self) -> Option<(&BigInt, &BigInt)> {
        self.ratio.as_ref().map(|(p, q)| (p, q))
    }

    pub fn min_step(&self) -> f64 {
        self.v_f.min(self.w_f)
    }

    /// `alpha + v m + w n` in floating point.
    pub fn lambda(&self, m: u64, n: u64) -> f64 {
        self.alpha_f + self.v_f * m as f64 + self.w_f * n as f64
    }

    /// Same parameters with `v` and `w` exchanged. Only defined for rational ratios,
    /// since the irrational scale is attached to `w`.
    pub fn swapped(&self) -> Option<Self> {
        if self.ratio_irrational {
            return None;
        }
        validate_params(&RawParams::rational(
            self.alpha.clone(),
            self.w.clone(),
            self.v.clone(),
        ))
        .ok()
    }

    /// `(c alpha, c v, c w)`, keeping any irrational scale on `w`.
    pub fn scaled(&self, c: &BigRational) -> Result<Self> {
        let mut raw = self.to_raw();
        raw.alpha = &raw.alpha * c;
        raw.v = &raw.v * c;
        raw.w = &raw.w * c;
        validate_params(&raw)
    }

    /// Integer representation of the lattice over the common denominator of
    /// `alpha`, `v`, `w`. `None` for irrational ratios.
    pub fn exact_lattice(&self) -> Result<Option<ExactLattice>> {
        if self.ratio_irrational {
            return Ok(None);
        }
        ExactLattice::new(&self.alpha, &self.v, &self.w).map(Some)
    }
}

impl fmt::Display for BarnesParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha={} v={} w={}", self.alpha, self.v, self.w)?;
        if let Some(s) = self.irrational_scale {
            write!(f, " irrational_scale={s:?}")?;
        }
        Ok(())
    }
}

/// Lattice values `alpha + v m + w n` scaled by the common denominator `denom`,
/// so that equality of values is equality of integer keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLattice {
    pub alpha: i128,
    pub v: i128,
    pub w: i128,
    pub denom: i128,
    /// `gcd(v, w)` of the scaled steps.
    pub gcd: i128,
}

impl ExactLattice {
    fn new(alpha: &BigRational, v: &BigRational, w: &BigRational) -> Result<Self> {
        let denom = alpha
            .denom()
            .lcm(v.denom())
            .lcm(w.denom());
        let scale = |x: &BigRational| -> Result<i128> {
            let scaled = x * BigRational::from_integer(denom.clone());
            debug_assert!(scaled.denom().is_one());
            scaled
                .to_integer()
                .to_i128()
                .ok_or_else(|| Error::RationalOverflow(format!("{x} scaled by {denom}")))
        };
        let a = scale(alpha)?;
        let vv = scale(v)?;
        let ww = scale(w)?;
        let d = denom
            .to_i128()
            .ok_or_else(|| Error::RationalOverflow(format!("denominator {denom}")))?;
        // keys up to ~2^100 stay exact; refuse anything that could approach i128 limits
        let limit = 1i128 << 80;
        if a > limit || vv > limit || ww > limit || d > limit {
            return Err(Error::RationalOverflow(format!(
                "scaled parameters too large (alpha {a}, v {vv}, w {ww}, denom {d})"
            )));
        }
        Ok(Self {
            alpha: a,
            v: vv,
            w: ww,
            denom: d,
            gcd: vv.gcd(&ww),
        })
    }

    pub fn key(&self, m: u64, n: u64) -> i128 {
        self.alpha + self.v * m as i128 + self.w * n as i128
    }

    /// Correctly rounded `key / denom`.
    pub fn value(&self, key: i128) -> f64 {
        if self.denom == 1 {
            return key as f64;
        }
        let r = BigRational::new(BigInt::from(key), BigInt::from(self.denom));
        // i128 -> f64 is exact below 2^53; above, fall back to the rational conversion
        if key.unsigned_abs() < (1u128 << 53) && self.denom < (1i128 << 53) {
            key as f64 / self.denom as f64
        } else {
            r.to_f64().unwrap_or(f64::INFINITY)
        }
    }

    /// Largest key whose floating-point value does not exceed `cutoff`.
    pub fn key_cutoff(&self, cutoff: f64) -> i128 {
        let mut k = (cutoff * self.denom as f64).floor() as i128;
        while self.value(k + 1) <= cutoff {
            k += 1;
        }
        while k >= self.alpha && self.value(k) > cutoff {
            k -= 1;
        }
        k
    }

    /// Reduced steps `(p, q) = (v, w) / gcd`.
    pub fn reduced_steps(&self) -> (i128, i128) {
        (self.v / self.gcd, self.w / self.gcd)
    }

    /// `v w denom / gcd`: the value-space period after which multiplicities grow by one.
    pub fn period_value(&self) -> f64 {
        let (p, q) = self.reduced_steps();
        (p as f64) * (q as f64) * (self.gcd as f64) / self.denom as f64
    }
}

impl From<&ExactLattice> for (i128, i128, i128) {
    fn from(l: &ExactLattice) -> Self {
        (l.alpha, l.v, l.w)
    }
}

#[allow(dead_code)]
fn _assert_zero_is_not_positive() {
    debug_assert!(!BigRational::zero().is_positive());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_boundaries() {
        assert_eq!(classify_region(2.5), RegionTag::Theorem1);
        assert_eq!(classify_region(2.0), RegionTag::Theorem2);
        assert_eq!(classify_region(1.75), RegionTag::Theorem2);
        assert_eq!(classify_region(1.5), RegionTag::Theorem3Strip);
        assert_eq!(classify_region(1.2), RegionTag::Theorem3Strip);
        assert_eq!(classify_region(1.0), RegionTag::OutOfScope);
        assert_eq!(classify_region(0.5), RegionTag::OutOfScope);
        assert_eq!(classify_region(f64::NAN), RegionTag::OutOfScope);
        assert_eq!(classify_region(2.0 + 1e-15), RegionTag::Theorem1);
        assert_eq!(classify_region(1.5 + 1e-15), RegionTag::Theorem2);
    }

    #[test]
    fn lowest_terms() {
        let p = BarnesParams::integers(1, 1, 1).unwrap();
        let (a, b) = p.ratio().unwrap();
        assert_eq!((a.to_i64(), b.to_i64()), (Some(1), Some(1)));

        let p = BarnesParams::integers(1, 2, 4).unwrap();
        let (a, b) = p.ratio().unwrap();
        assert_eq!((a.to_i64(), b.to_i64()), (Some(1), Some(2)));
    }

    #[test]
    fn rejects_non_positive() {
        let err = BarnesParams::integers(-1, 1, 1).unwrap_err();
        assert_eq!(err.kind(), "NonPositiveParameter");
        assert!(BarnesParams::integers(1, 0, 1).is_err());
        assert!(BarnesParams::integers(1, 1, -3).is_err());
    }

    #[test]
    fn rejects_bad_scale() {
        assert_eq!(
            BarnesParams::with_irrational_w(1, 1, 1, 0.0).unwrap_err().kind(),
            "InvalidScale"
        );
        assert_eq!(
            BarnesParams::with_irrational_w(1, 1, 1, -2.0).unwrap_err().kind(),
            "InvalidScale"
        );
        let mut raw = BarnesParams::integers(1, 1, 1).unwrap().to_raw();
        raw.irrational_scale = Some(2.0);
        assert_eq!(validate_params(&raw).unwrap_err().kind(), "InvalidScale");
        raw.ratio_irrational = true;
        raw.irrational_scale = None;
        assert_eq!(validate_params(&raw).unwrap_err().kind(), "InvalidScale");
    }

    #[test]
    fn irrational_effective_w() {
        let p = BarnesParams::with_irrational_w(1, 1, 3, std::f64::consts::SQRT_2).unwrap();
        assert!(p.ratio().is_none());
        assert!((p.w() - 3.0 * std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(p.exact_lattice().unwrap().is_none());
    }

    #[test]
    fn validate_is_idempotent() {
        for p in [
            BarnesParams::from_ratios((5, 3), (2, 1), (4, 6)).unwrap(),
            BarnesParams::with_irrational_w(2, 1, 3, 1.618).unwrap(),
        ] {
            let again = validate_params(&p.to_raw()).unwrap();
            assert_eq!(again, p);
        }
    }

    #[test]
    fn parses_rationals() {
        let r = |s: &str| parse_rational(s).unwrap();
        assert_eq!(r("5/3"), BigRational::new(5.into(), 3.into()));
        assert_eq!(r("0.125"), BigRational::new(1.into(), 8.into()));
        assert_eq!(r("-2"), BigRational::from_integer((-2).into()));
        assert_eq!(r("3."), BigRational::from_integer(3.into()));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1e-3").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn exact_lattice_keys() {
        let p = BarnesParams::from_ratios((5, 3), (1, 2), (3, 1)).unwrap();
        let l = p.exact_lattice().unwrap().unwrap();
        assert_eq!(l.denom, 6);
        assert_eq!((l.alpha, l.v, l.w), (10, 3, 18));
        assert_eq!(l.gcd, 3);
        assert_eq!(l.key(2, 1), 10 + 6 + 18);
        assert!((l.value(l.key(2, 1)) - (5.0 / 3.0 + 1.0 + 3.0)).abs() < 1e-15);
        let cut = l.key_cutoff(125.0 / 3.0);
        assert_eq!(cut, 250);
        assert_eq!(l.key_cutoff(4.5), 27);
    }

    #[test]
    fn complex_point_rejects_non_finite() {
        assert!(ComplexPoint::new(f64::NAN, 0.0).is_err());
        assert!(ComplexPoint::new(1.0, f64::INFINITY).is_err());
        let s = ComplexPoint::new(2.0, 3.0).unwrap();
        assert_eq!(s.conj().t, -3.0);
    }

    #[test]
    fn tolerance_defaults() {
        let t = Tolerance::default();
        assert_eq!((t.abs_tol, t.rel_tol), (1e-10, 1e-10));
        assert!(Tolerance::new(0.0, 1.0).is_err());
    }

    #[test]
    fn scale_vocabulary() {
        for k in IrrationalScale::ALL {
            assert_eq!(k.name().parse::<IrrationalScale>().unwrap(), k);
        }
        assert!((IrrationalScale::Sqrt3.value().powi(2) - 3.0).abs() < 1e-15);
        assert!((IrrationalScale::Sqrt5.value().powi(2) - 5.0).abs() < 1e-14);
        let g = IrrationalScale::Golden.value();
        assert!((g * g - g - 1.0).abs() < 1e-15);
        assert!("tau".parse::<IrrationalScale>().is_err());
    }
}
