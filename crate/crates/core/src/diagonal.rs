//! The diagonal series `sum_{lambda} r(lambda)^2 lambda^{-2 sigma}`, where `r(lambda)`
//! counts the lattice points `(m, n)` with `alpha + v m + w n = lambda`.
//!
//! For `v/w = p/q` in lowest terms the attainable values are `alpha + (g/D) c` with
//! `c = p m + q n`, and `r(c + p q) = r(c) + 1` with `r(c) in {0, 1}` for `c < p q`.
//! Each residue class mod `p q` is therefore a shifted Hurwitz series and the tail of
//! the diagonal has a closed form.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::{hurwitz_reference_auto, hurwitz_zeta_bounded};
use crate::params::{BarnesParams, ComplexPoint, ExactLattice, Tolerance};
use crate::sum::CompensatedSum;

const TABLE_CAP: usize = 10_000_000;
const CLASS_CAP: i128 = 1_000_000;
const COLLISION_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DiagonalMethod {
    IrrationalCollapse,
    RationalGrouped,
    BruteForce,
}

impl DiagonalMethod {
    pub fn name(self) -> &'static str {
        match self {
            DiagonalMethod::IrrationalCollapse => "irrational-collapse",
            DiagonalMethod::RationalGrouped => "rational-grouped",
            DiagonalMethod::BruteForce => "brute-force",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalValue {
    pub value: f64,
    pub sigma: f64,
    pub method: DiagonalMethod,
    pub tail_bound: f64,
}

/// Attainable values up to a cutoff with their multiplicities, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityTable {
    pub entries: Vec<(f64, u64)>,
    pub cutoff: f64,
}

impl MultiplicityTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_points(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// `sum r^2 lambda^{-2 sigma}` in ascending order.
    pub fn diagonal_sum(&self, sigma: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for &(lambda, r) in &self.entries {
            acc.add((r * r) as f64 * lambda.powf(-2.0 * sigma));
        }
        acc.value()
    }
}

fn check_budget(points: f64) -> Result<()> {
    if points > TABLE_CAP as f64 {
        return Err(Error::BudgetExceeded {
            operation: "build_multiplicity_table",
            needed: points,
            cap: TABLE_CAP as f64,
        });
    }
    Ok(())
}

/// Exact keys of all lattice points with key `<= key_cut`, sorted.
fn rational_keys(lat: &ExactLattice, key_cut: i128) -> Vec<i128> {
    let mut keys = Vec::new();
    let mut m_key = lat.alpha;
    while m_key <= key_cut {
        let mut k = m_key;
        while k <= key_cut {
            keys.push(k);
            k += lat.w;
        }
        m_key += lat.v;
    }
    keys.sort_unstable();
    keys
}

fn irrational_values(params: &BarnesParams, cutoff: f64) -> Vec<f64> {
    let mut values = Vec::new();
    let mut m = 0u64;
    while params.lambda(m, 0) <= cutoff {
        let mut n = 0u64;
        while params.lambda(m, n) <= cutoff {
            values.push(params.lambda(m, n));
            n += 1;
        }
        m += 1;
    }
    values.sort_by(f64::total_cmp);
    values
}

pub fn build_multiplicity_table(params: &BarnesParams, cutoff: f64) -> Result<MultiplicityTable> {
    let alpha = params.alpha();
    if !(cutoff >= alpha) {
        return Err(Error::CutoffTooSmall { cutoff, alpha });
    }
    let span = cutoff - alpha;
    check_budget((span / params.v() + 1.0) * (span / params.w() + 1.0) / 2.0 + span / params.min_step() + 1.0)?;

    let mut entries: Vec<(f64, u64)> = Vec::new();
    match params.exact_lattice()? {
        Some(lat) => {
            let keys = rational_keys(&lat, lat.key_cutoff(cutoff));
            let mut i = 0;
            while i < keys.len() {
                let mut j = i;
                while j < keys.len() && keys[j] == keys[i] {
                    j += 1;
                }
                entries.push((lat.value(keys[i]), (j - i) as u64));
                i = j;
            }
        }
        None => {
            let values = irrational_values(params, cutoff);
            for pair in values.windows(2) {
                if pair[1] - pair[0] <= COLLISION_REL * pair[1] {
                    return Err(Error::IrrationalCollision { lambda: pair[1] });
                }
            }
            entries.extend(values.into_iter().map(|l| (l, 1)));
        }
    }
    Ok(MultiplicityTable { entries, cutoff })
}

/// The diagonal restricted to `lambda <= cutoff`.
pub fn diagonal_truncated(sigma: f64, params: &BarnesParams, cutoff: f64) -> Result<f64> {
    Ok(build_multiplicity_table(params, cutoff)?.diagonal_sum(sigma))
}

/// Upper bound for the diagonal tail beyond `cutoff` from `r(lambda) <= 1 + (lambda - alpha)/L`,
/// `L` the value-space period. Rational ratios, `sigma > 3/2`.
pub fn rational_tail_majorant(sigma: f64, params: &BarnesParams, cutoff: f64) -> Result<f64> {
    let lat = params
        .exact_lattice()?
        .ok_or_else(|| Error::DomainError("tail majorant needs a rational ratio".into()))?;
    if !(sigma > 1.5) {
        return Err(Error::RegionError {
            operation: "rational_tail_majorant",
            sigma,
            requirement: "sigma > 3/2",
        });
    }
    let alpha = params.alpha();
    let step = lat.gcd as f64 / lat.denom as f64;
    let period = lat.period_value();
    let beta = period - alpha;
    let f = |u: f64| ((u + beta) / period).powi(2) * u.powf(-2.0 * sigma);
    // f decreases once u (sigma - 1) >= -sigma beta
    let mono = if beta < 0.0 { sigma * (-beta) / (sigma - 1.0) } else { 0.0 };
    let mut acc = 0.0;
    // attainable values lie on alpha + step * k
    let mut k = ((cutoff - alpha) / step).floor() + 1.0;
    let mut lambda = alpha + step * k;
    while lambda - step < mono {
        acc += f(lambda);
        k += 1.0;
        lambda = alpha + step * k;
    }
    let u0 = lambda - step;
    let e = 2.0 * sigma;
    let integral = (u0.powf(3.0 - e) / (e - 3.0)
        + 2.0 * beta * u0.powf(2.0 - e) / (e - 2.0)
        + beta * beta * u0.powf(1.0 - e) / (e - 1.0))
        / (period * period);
    Ok(acc + integral / step)
}

/// The tail is summed in closed form, so `tol` only documents the caller's target;
/// the reported `tail_bound` is the accumulated Hurwitz remainder and rounding.
pub fn diagonal_value(sigma: f64, params: &BarnesParams, _tol: Tolerance) -> Result<DiagonalValue> {
    if params.ratio_irrational() {
        if !(sigma > 1.0) {
            return Err(Error::RegionError {
                operation: "diagonal_value",
                sigma,
                requirement: "sigma > 1 for an irrational ratio",
            });
        }
        let r = hurwitz_reference_auto(ComplexPoint::real(2.0 * sigma)?, params)?;
        return Ok(DiagonalValue {
            value: r.value.re,
            sigma,
            method: DiagonalMethod::IrrationalCollapse,
            tail_bound: r.error_bound,
        });
    }
    if !(sigma > 1.5) {
        return Err(Error::RegionError {
            operation: "diagonal_value",
            sigma,
            requirement: "sigma > 3/2 for a rational ratio",
        });
    }
    let lat = params
        .exact_lattice()?
        .ok_or_else(|| Error::DomainError("rational lattice unavailable".into()))?;
    rational_diagonal(sigma, params, &lat)
}

fn rational_diagonal(
    sigma: f64,
    params: &BarnesParams,
    lat: &ExactLattice,
) -> Result<DiagonalValue> {
    let (p, q) = lat.reduced_steps();
    let classes = p * q;
    if classes > CLASS_CAP {
        return Err(Error::BudgetExceeded {
            operation: "diagonal_value",
            needed: classes as f64,
            cap: CLASS_CAP as f64,
        });
    }
    let period = lat.period_value();
    let cutoff = params.alpha() + 16.0 * period;
    let table = build_multiplicity_table(params, cutoff)?;
    let head = table.diagonal_sum(sigma);
    let key_cut = lat.key_cutoff(cutoff);

    let g = lat.gcd;
    let class_key_step = g * classes;
    let p_inv = if q == 1 { 0 } else { mod_inverse(p, q) };
    let e = 2.0 * sigma;
    let pts = |x: f64| ComplexPoint::real(x);
    let (s0, s1, s2) = (pts(e - 2.0)?, pts(e - 1.0)?, pts(e)?);
    let scale = period.powf(-e);

    let mut tail = CompensatedSum::new();
    let mut err = CompensatedSum::new();
    let mut magnitude = 0.0;
    for c0 in 0..classes {
        let m0 = (c0 % q) * p_inv % q;
        let r0 = if p * m0 <= c0 { 1.0 } else { 0.0 };
        let key0 = lat.alpha + g * c0;
        let j_c = if key0 > key_cut {
            0
        } else {
            (key_cut - key0) / class_key_step + 1
        };
        let a = key0 as f64 / class_key_step as f64;
        let d = r0 - a;
        let shifted = a + j_c as f64;
        let (h0, b0) = hurwitz_zeta_bounded(s0, shifted)?;
        let (h1, b1) = hurwitz_zeta_bounded(s1, shifted)?;
        let (h2, b2) = hurwitz_zeta_bounded(s2, shifted)?;
        let parts = [h0.re, 2.0 * d * h1.re, d * d * h2.re];
        for x in parts {
            tail.add(x * scale);
            magnitude += x.abs() * scale;
        }
        err.add(scale * (b0 + 2.0 * d.abs() * b1 + d * d * b2));
    }
    let value = head + tail.value();
    let rounding = 64.0 * f64::EPSILON * (magnitude + head);
    let tail_bound = err.value() + rounding;
    Ok(DiagonalValue {
        value,
        sigma,
        method: DiagonalMethod::RationalGrouped,
        tail_bound,
    })
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    let e = a.extended_gcd(&m);
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m)
}

/// Quadruple-sum oracle over `(m1, n1, m2, n2)` in `[0, box]^4` with equal exact values,
/// restricted to values `<= alpha + min(v, w) * box` so that every multiplicity is
/// complete. Pairs are summed as products of independently computed terms.
pub fn brute_force_diagonal(sigma: f64, params: &BarnesParams, box_size: u64) -> Result<f64> {
    if box_size > 2000 {
        return Err(Error::BudgetExceeded {
            operation: "brute_force_diagonal",
            needed: box_size as f64,
            cap: 2000.0,
        });
    }
    let limit = params.alpha() + params.min_step() * box_size as f64;
    let lat = params.exact_lattice()?;
    let mut points: Vec<(i128, f64)> = Vec::new();
    for m in 0..=box_size {
        for n in 0..=box_size {
            let lambda = params.lambda(m, n);
            match &lat {
                Some(l) => {
                    let key = l.key(m, n);
                    if key <= l.key_cutoff(limit) {
                        points.push((key, lambda));
                    }
                }
                None if lambda <= limit => points.push((points.len() as i128, lambda)),
                None => {}
            }
        }
    }
    points.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut acc = CompensatedSum::new();
    let mut i = 0;
    while i < points.len() {
        let mut j = i;
        while j < points.len() && points[j].0 == points[i].0 {
            j += 1;
        }
        for a in &points[i..j] {
            let ta = a.1.powf(-sigma);
            for b in &points[i..j] {
                acc.add(ta * b.1.powf(-sigma));
            }
        }
        i = j;
    }
    Ok(acc.value())
}
