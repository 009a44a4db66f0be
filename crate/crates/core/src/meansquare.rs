//! Mean square `I(T) = int_1^T |zeta_2(sigma + i t)|^2 dt` from the truncated sum
//! over `m, n <= t` (optionally with the closed-form correction at `x = t`).
//!
//! One lattice table is built for `x_max = T_max`. Every attainable value keeps a
//! profile of how many of its points lie in the box `max(m, n) <= B`, so evaluating
//! at any truncation `B <= x_max` only masks the table.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagonal::diagonal_value;
use crate::error::{Error, Result};
use crate::evaluator::correction_term;
use crate::params::{classify_region, BarnesParams, ComplexPoint, RegionTag, Tolerance};
use crate::quadrature::GaussLegendre;
use crate::sum::{CompensatedComplex, CompensatedSum};

pub const LATTICE_CAP: u64 = 10_000_000;
const PANEL_ORDER: usize = 6;
const COLLISION_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeTable {
    params: BarnesParams,
    sigma: f64,
    x_max: f64,
    box_limit: u64,
    pub lambda: Vec<f64>,
    pub mult: Vec<u64>,
    pub log_lambda: Vec<f64>,
    /// `mult * lambda^{-sigma}`
    pub lambda_pow: Vec<f64>,
    neg_pow: Vec<f64>,
    box_min: Vec<u64>,
    box_max: Vec<u64>,
    /// index into `cumulative` for values whose points span several boxes
    offset: Vec<usize>,
    /// `cumulative[offset + (B - box_min)]` = points with `max(m, n) <= B`, for `B < box_max`
    cumulative: Vec<u64>,
}

impl LatticeTable {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn params(&self) -> &BarnesParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Recomputes the power caches for another `sigma`.
    pub fn retag(&mut self, sigma: f64) {
        self.sigma = sigma;
        for i in 0..self.lambda.len() {
            self.neg_pow[i] = (-sigma * self.log_lambda[i]).exp();
            self.lambda_pow[i] = self.mult[i] as f64 * self.neg_pow[i];
        }
    }

    /// Number of the points of entry `i` inside the box `max(m, n) <= b`.
    pub fn count_within(&self, i: usize, b: u64) -> u64 {
        if b < self.box_min[i] {
            0
        } else if b >= self.box_max[i] {
            self.mult[i]
        } else {
            self.cumulative[self.offset[i] + (b - self.box_min[i]) as usize]
        }
    }
}

/// Points `(m, n)` in `[0, B]^2` as `(sort key, box)`. Rational ratios use exact keys.
fn collect_points(params: &BarnesParams, b: u64) -> Result<Vec<(i128, u64, f64)>> {
    let mut pts = Vec::with_capacity(((b + 1) * (b + 1)) as usize);
    match params.exact_lattice()? {
        Some(lat) => {
            for m in 0..=b {
                for n in 0..=b {
                    pts.push((lat.key(m, n), m.max(n), lat.value(lat.key(m, n))));
                }
            }
            pts.sort_unstable_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)));
        }
        None => {
            for m in 0..=b {
                for n in 0..=b {
                    pts.push((0, m.max(n), params.lambda(m, n)));
                }
            }
            pts.sort_unstable_by(|x, y| x.2.total_cmp(&y.2).then(x.1.cmp(&y.1)));
            for pair in pts.windows(2) {
                if pair[1].2 - pair[0].2 <= COLLISION_REL * pair[1].2 {
                    return Err(Error::IrrationalCollision { lambda: pair[1].2 });
                }
            }
            for (i, p) in pts.iter_mut().enumerate() {
                p.0 = i as i128;
            }
        }
    }
    Ok(pts)
}

pub fn build_lattice_table(params: &BarnesParams, x_max: f64, sigma: f64) -> Result<LatticeTable> {
    if !(x_max >= 0.0) || !x_max.is_finite() {
        return Err(Error::InvalidConfig(format!("x_max must be non-negative, got {x_max}")));
    }
    if !sigma.is_finite() {
        return Err(Error::NonFinite("sigma"));
    }
    let b = x_max.floor() as u64;
    let points = (b as f64 + 1.0).powi(2);
    if points > LATTICE_CAP as f64 {
        return Err(Error::BudgetExceeded {
            operation: "build_lattice_table",
            needed: points,
            cap: LATTICE_CAP as f64,
        });
    }
    let pts = collect_points(params, b)?;

    let mut table = LatticeTable {
        params: params.clone(),
        sigma,
        x_max,
        box_limit: b,
        lambda: Vec::new(),
        mult: Vec::new(),
        log_lambda: Vec::new(),
        lambda_pow: Vec::new(),
        neg_pow: Vec::new(),
        box_min: Vec::new(),
        box_max: Vec::new(),
        offset: Vec::new(),
        cumulative: Vec::new(),
    };
    let mut i = 0;
    while i < pts.len() {
        let mut j = i;
        while j < pts.len() && pts[j].0 == pts[i].0 {
            j += 1;
        }
        let group = &pts[i..j];
        let (lo, hi) = (group[0].1, group[group.len() - 1].1);
        table.offset.push(table.cumulative.len());
        if hi > lo {
            let mut k = 0;
            for bb in lo..hi {
                while k < group.len() && group[k].1 <= bb {
                    k += 1;
                }
                table.cumulative.push(k as u64);
            }
        }
        let lambda = group[0].2;
        table.lambda.push(lambda);
        table.mult.push(group.len() as u64);
        table.log_lambda.push(lambda.ln());
        table.box_min.push(lo);
        table.box_max.push(hi);
        i = j;
    }
    let n = table.lambda.len();
    table.neg_pow = vec![0.0; n];
    table.lambda_pow = vec![0.0; n];
    table.retag(sigma);
    Ok(table)
}

/// `sum mult lambda^{-sigma} e^{-i t log lambda}` over points with `m, n <= x_cut`,
/// ascending in `lambda`.
pub fn eval_truncated(table: &LatticeTable, sigma: f64, t: f64, x_cut: f64) -> Result<Complex64> {
    if sigma != table.sigma {
        return Err(Error::SigmaMismatch {
            table: table.sigma,
            requested: sigma,
        });
    }
    if !(x_cut >= 0.0) || x_cut > table.x_max {
        return Err(Error::InvalidConfig(format!(
            "x_cut {x_cut} outside the table range [0, {}]",
            table.x_max
        )));
    }
    if t.abs() > x_cut {
        return Err(Error::HeightViolation { t, limit: x_cut });
    }
    Ok(masked_sum(table, t, x_cut.floor() as u64))
}

fn masked_sum(table: &LatticeTable, t: f64, b: u64) -> Complex64 {
    let p = &table.params;
    let reach = p.alpha() + (p.v() + p.w()) * b as f64;
    let reach = reach * (1.0 + 1e-12);
    let mut acc = CompensatedComplex::new();
    for i in 0..table.lambda.len() {
        if table.lambda[i] > reach {
            break;
        }
        let weight = if b >= table.box_max[i] {
            table.lambda_pow[i]
        } else if b < table.box_min[i] {
            continue;
        } else {
            table.neg_pow[i] * table.count_within(i, b) as f64
        };
        let (sin, cos) = (t * table.log_lambda[i]).sin_cos();
        acc.add(Complex64::new(weight * cos, -weight * sin));
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IntegrandMode {
    TruncatedOnly,
    WithCorrection,
}

/// `|Sigma(sigma + i t)|^2` with truncation at `x = t`.
pub fn integrand(table: &LatticeTable, sigma: f64, t: f64, mode: IntegrandMode) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::InvalidConfig(format!("integrand needs t >= 1, got {t}")));
    }
    if !(sigma > 1.0) {
        return Err(Error::RegionError {
            operation: "integrand",
            sigma,
            requirement: "sigma > 1",
        });
    }
    let mut z = eval_truncated(table, sigma, t, t)?;
    if mode == IntegrandMode::WithCorrection {
        z += correction_term(ComplexPoint::new(sigma, t)?, &table.params, t);
    }
    Ok(z.norm_sqr())
}

fn integrand_unchecked(table: &LatticeTable, t: f64, mode: IntegrandMode) -> f64 {
    let mut z = masked_sum(table, t, t.floor() as u64);
    if mode == IntegrandMode::WithCorrection {
        let s = ComplexPoint {
            sigma: table.sigma,
            t,
        };
        z += correction_term(s, &table.params, t);
    }
    z.norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum HPolicy {
    /// `h = pi / (8 omega)` with `omega` the largest phase frequency.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadSettings {
    pub h_policy: HPolicy,
    /// Every `check_every`-th panel is recomputed with two half panels.
    pub check_every: usize,
    pub parallel: bool,
    pub mode: IntegrandMode,
    pub t_max_cap: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            h_policy: HPolicy::Auto,
            check_every: 20,
            parallel: true,
            mode: IntegrandMode::WithCorrection,
            t_max_cap: 500.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "I")]
    pub i: f64,
    pub quad_err: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CurveStats {
    pub panels: u64,
    pub checked_panels: u64,
    pub integrand_evals: u64,
    pub h: f64,
    pub table_entries: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanSquareCurve {
    pub sigma: f64,
    pub params: BarnesParams,
    pub grid: Vec<CurveRow>,
    pub leading_coeff: f64,
    pub stats: CurveStats,
}

impl MeanSquareCurve {
    pub fn region(&self) -> RegionTag {
        classify_region(self.sigma)
    }

    /// CSV with header `T,I,quad_err,R,leading_coeff`, round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("T,I,quad_err,R,leading_coeff\n");
        for row in &self.grid {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                row.t, row.i, row.quad_err, row.r, self.leading_coeff
            ));
        }
        out
    }
}

/// Highest phase frequency in `|Sigma|^2`: single phases `log lambda` and pairwise
/// differences `log(lambda_max / lambda_min)`.
pub fn auto_step(table: &LatticeTable) -> f64 {
    let first = table.lambda.first().copied().unwrap_or(1.0);
    let last = table.lambda.last().copied().unwrap_or(1.0);
    let omega = last.ln().abs().max((last / first).ln()).max(first.ln().abs()).max(1.0);
    std::f64::consts::PI / (8.0 * omega)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    checked: bool,
}

fn build_panels(grid: &[f64], h: f64, check_every: usize) -> (Vec<Panel>, Vec<usize>) {
    let t_max = *grid.last().unwrap();
    let mut breaks: Vec<f64> = vec![1.0];
    let mut k = 2.0;
    while k < t_max {
        breaks.push(k);
        k += 1.0;
    }
    breaks.extend(grid.iter().copied().filter(|&t| t > 1.0));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut panels = Vec::new();
    // number of panels lying at or below each grid point
    let mut ends = Vec::with_capacity(grid.len());
    let mut gi = 0;
    while gi < grid.len() && grid[gi] <= 1.0 {
        ends.push(0);
        gi += 1;
    }
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let count = ((b - a) / h).ceil().max(1.0) as usize;
        let step = (b - a) / count as f64;
        for j in 0..count {
            let lo = a + step * j as f64;
            let hi = if j + 1 == count { b } else { a + step * (j + 1) as f64 };
            let idx = panels.len();
            panels.push(Panel {
                a: lo,
                b: hi,
                checked: check_every > 0 && idx % check_every == 0,
            });
        }
        while gi < grid.len() && grid[gi] <= b {
            ends.push(panels.len());
            gi += 1;
        }
    }
    (panels, ends)
}

fn panel_value(
    table: &LatticeTable,
    gl: &GaussLegendre,
    panel: Panel,
    mode: IntegrandMode,
) -> (f64, Option<f64>) {
    let coarse = gl.integrate(panel.a, panel.b, |t| integrand_unchecked(table, t, mode));
    if !panel.checked {
        return (coarse, None);
    }
    let mid = 0.5 * (panel.a + panel.b);
    let fine = gl.integrate(panel.a, mid, |t| integrand_unchecked(table, t, mode))
        + gl.integrate(mid, panel.b, |t| integrand_unchecked(table, t, mode));
    (coarse, Some((fine - coarse).abs()))
}

pub fn mean_square_curve(
    sigma: f64,
    params: &BarnesParams,
    t_grid: &[f64],
    quad: &QuadSettings,
) -> Result<MeanSquareCurve> {
    match classify_region(sigma) {
        RegionTag::Theorem1 | RegionTag::Theorem2 => {}
        _ => {
            return Err(Error::RegionError {
                operation: "mean_square_curve",
                sigma,
                requirement: "sigma > 3/2",
            })
        }
    }
    if t_grid.is_empty() {
        return Err(Error::InvalidConfig("empty T grid".into()));
    }
    if t_grid.iter().any(|t| !(*t >= 1.0) || !t.is_finite()) {
        return Err(Error::InvalidConfig("T grid values must be finite and >= 1".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("T grid must be strictly ascending".into()));
    }
    let t_max = *t_grid.last().unwrap();
    if t_max > quad.t_max_cap {
        return Err(Error::BudgetExceeded {
            operation: "mean_square_curve",
            needed: t_max,
            cap: quad.t_max_cap,
        });
    }
    let leading = diagonal_value(sigma, params, Tolerance::default())?.value;
    let table = build_lattice_table(params, t_max, sigma)?;
    let h = match quad.h_policy {
        HPolicy::Auto => auto_step(&table),
        HPolicy::Fixed(h) if h > 0.0 && h.is_finite() => h,
        HPolicy::Fixed(h) => return Err(Error::InvalidConfig(format!("step must be positive, got {h}"))),
    };

    let (panels, ends) = build_panels(t_grid, h, quad.check_every);
    let gl = GaussLegendre::new(PANEL_ORDER);
    let values: Vec<(f64, Option<f64>)> = if quad.parallel {
        panels
            .par_iter()
            .map(|&p| panel_value(&table, &gl, p, quad.mode))
            .collect()
    } else {
        panels
            .iter()
            .map(|&p| panel_value(&table, &gl, p, quad.mode))
            .collect()
    };

    let mut grid = Vec::with_capacity(t_grid.len());
    let mut total = CompensatedSum::new();
    let mut check_sum = CompensatedSum::new();
    let mut checked = 0u64;
    let mut done = 0usize;
    for (&t, &end) in t_grid.iter().zip(&ends) {
        while done < end {
            let (v, diff) = values[done];
            total.add(v);
            if let Some(d) = diff {
                check_sum.add(d);
                checked += 1;
            }
            done += 1;
        }
        let i_val = total.value();
        let extrapolated = if checked > 0 {
            check_sum.value() * done as f64 / checked as f64
        } else {
            0.0
        };
        let quad_err = 4.0 * extrapolated + 1e-14 * i_val;
        grid.push(CurveRow {
            t,
            i: i_val,
            quad_err,
            r: i_val - leading * t,
        });
    }

    let checked_total = panels.iter().filter(|p| p.checked).count() as u64;
    Ok(MeanSquareCurve {
        sigma,
        params: params.clone(),
        grid,
        leading_coeff: leading,
        stats: CurveStats {
            panels: panels.len() as u64,
            checked_panels: checked_total,
            integrand_evals: (panels.len() as u64 + 2 * checked_total) * PANEL_ORDER as u64,
            h,
            table_entries: table.len() as u64,
        },
    })
}

/// `n` points geometrically spaced from `t_min` to `t_max` inclusive.
pub fn geometric_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min >= 1.0) || !(t_max >= t_min) || n == 0 {
        return Err(Error::InvalidConfig(format!(
            "geometric grid needs 1 <= T_min <= T_max and n >= 1 (got {t_min}, {t_max}, {n})"
        )));
    }
    if n == 1 || t_max == t_min {
        return Ok(vec![t_max]);
    }
    let ratio = (t_max / t_min).ln() / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|k| t_min * (ratio * k as f64).exp()).collect();
    g[n - 1] = t_max;
    g[0] = t_min;
    Ok(g)
}
