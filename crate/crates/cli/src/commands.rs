use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use barnes_zeta::analysis::{verdict, VerdictReport};
use barnes_zeta::diagonal::diagonal_value;
use barnes_zeta::evaluator::{
    direct_series_truncated, euler_maclaurin_eval, hurwitz_oracle, hurwitz_reference_auto, theorem3_eval,
    verify_exp_sum_lemma, EvalConfig, EvalResult, TruncationPlan,
};
use barnes_zeta::meansquare::{geometric_grid, mean_square_curve, HPolicy, IntegrandMode, MeanSquareCurve, QuadSettings};
use barnes_zeta::params::parse_rational;
use barnes_zeta::{validate_params, BarnesParams, ComplexPoint, IrrationalScale, RawParams, Tolerance};
use serde_json::json;

use crate::config::{parse_list, parse_range, Settings};
use crate::output::{fmt_f64, report_error, report_warning, sha256_hex, Emitter, ManifestInput};

#[derive(Debug, Clone, Copy)]
pub enum Name {
    Eval,
    Diagonal,
    Meansquare,
    Sweep,
    LemmaCheck,
}

impl Name {
    fn as_str(self) -> &'static str {
        match self {
            Name::Eval => "eval",
            Name::Diagonal => "diagonal",
            Name::Meansquare => "meansquare",
            Name::Sweep => "sweep",
            Name::LemmaCheck => "lemma-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean,
    ErrorRows,
}

struct Run {
    emitter: Emitter,
    counters: BTreeMap<String, u64>,
    errors: u64,
    truncated: bool,
}

impl Run {
    fn bump(&mut self, key: &str, by: u64) {
        *self.counters.entry(key.to_string()).or_insert(0) += by;
    }

    fn fail(&mut self, err: &barnes_zeta::Error, ctx: serde_json::Value) {
        self.errors += 1;
        report_error(err.kind(), &err.to_string(), ctx);
    }
}

pub fn run(name: Name, settings: &Settings) -> Result<Status> {
    let started = Instant::now();
    let params = params_from(settings)?;
    let out_dir = settings.get("out-dir").map(std::path::PathBuf::from);
    let mut run = Run {
        emitter: Emitter::new(out_dir)?,
        counters: BTreeMap::new(),
        errors: 0,
        truncated: false,
    };
    match name {
        Name::Eval => eval(settings, &params, &mut run)?,
        Name::Diagonal => diagonal(settings, &params, &mut run)?,
        Name::Meansquare => meansquare(settings, &params, &mut run)?,
        Name::Sweep => sweep(settings, &params, &mut run)?,
        Name::LemmaCheck => lemma_check(settings, &params, &mut run)?,
    }
    let cal = EvalConfig::default();
    let status = if run.errors == 0 { Status::Clean } else { Status::ErrorRows };
    let errors = run.errors;
    run.counters.insert("error_rows".into(), errors);
    run.emitter.finish(ManifestInput {
        command: name.as_str(),
        config: settings.map.clone(),
        config_hash: config_hash(settings),
        c_em: cal.c_em,
        c_t3: cal.c_t3,
        started,
        counters: run.counters,
        truncated: run.truncated,
    })?;
    Ok(status)
}

fn config_hash(settings: &Settings) -> String {
    sha256_hex(settings.canonical().as_bytes())
}

fn params_from(settings: &Settings) -> Result<BarnesParams> {
    let alpha = parse_rational(settings.require("alpha")?).context("--alpha")?;
    let v = parse_rational(settings.require("v")?).context("--v")?;
    let w = parse_rational(settings.require("w")?).context("--w")?;
    let raw = match settings.get("irrational-scale") {
        Some(name) => {
            let scale = IrrationalScale::from_str(name).context("--irrational-scale")?;
            RawParams::irrational(alpha, v, w, scale.value())
        }
        None => RawParams::rational(alpha, v, w),
    };
    Ok(validate_params(&raw)?)
}

fn sigma_list(settings: &Settings, primary: &str, alias: &str) -> Result<Vec<f64>> {
    let raw = settings
        .get(primary)
        .or_else(|| settings.get(alias))
        .with_context(|| format!("missing required setting --{primary}"))?;
    let list = parse_list(raw).with_context(|| format!("--{primary}"))?;
    if list.is_empty() {
        bail!("--{primary}: empty list");
    }
    Ok(list)
}

fn tolerance(settings: &Settings) -> Result<Tolerance> {
    let tol = settings.f64("tol")?;
    Tolerance::abs(tol).context("--tol")
}

const METHODS: [&str; 5] = ["direct", "em", "t3", "hurwitz", "reference"];

fn methods(settings: &Settings) -> Result<Vec<&'static str>> {
    let raw = settings.require("method")?;
    let mut out = Vec::new();
    for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            for m in METHODS {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
            continue;
        }
        match METHODS.iter().find(|m| **m == part) {
            Some(m) if !out.contains(m) => out.push(*m),
            Some(_) => {}
            None => bail!("--method: unknown method '{part}' (expected one of {}, all)", METHODS.join(", ")),
        }
    }
    if out.is_empty() {
        bail!("--method: empty");
    }
    Ok(out)
}

fn eval(settings: &Settings, params: &BarnesParams, run: &mut Run) -> Result<()> {
    let sigmas = sigma_list(settings, "sigma", "sigmas")?;
    let ts = match settings.get("t-range") {
        Some(r) => parse_range(r).context("--t-range")?,
        None if settings.get("t").is_some() => settings.f64_list("t")?,
        None => vec![0.0],
    };
    let methods = methods(settings)?;
    let n_em = settings.u64("N")?;
    let c = settings.f64("C")?;
    let x = settings.opt_f64("x")?.unwrap_or(500.0);
    let direct_order = settings.u64("direct-order")?;
    let hurwitz_m = settings.u64("hurwitz-m")?;

    let mut csv = String::from("sigma,t,method,re,im,error_bound,terms_used\n");
    for &sigma in &sigmas {
        for &t in &ts {
            for &method in &methods {
                let result = ComplexPoint::new(sigma, t).and_then(|s| match method {
                    "direct" => direct_series_truncated(s, params, direct_order),
                    "em" => euler_maclaurin_eval(s, params, n_em),
                    "t3" => TruncationPlan::new(x, c, 1).and_then(|plan| theorem3_eval(s, params, plan)),
                    "hurwitz" => hurwitz_oracle(s, params, hurwitz_m),
                    _ => hurwitz_reference_auto(s, params),
                });
                run.bump("evaluations", 1);
                match result {
                    Ok(EvalResult {
                        value,
                        error_bound,
                        terms_used,
                        ..
                    }) => {
                        run.bump("terms_summed", terms_used);
                        csv.push_str(&format!(
                            "{},{},{method},{},{},{},{terms_used}\n",
                            fmt_f64(sigma),
                            fmt_f64(t),
                            fmt_f64(value.re),
                            fmt_f64(value.im),
                            fmt_f64(error_bound)
                        ));
                    }
                    Err(e) => run.fail(&e, json!({ "sigma": sigma, "t": t, "method": method })),
                }
            }
        }
    }
    run.emitter.emit("eval.csv", &csv)
}

fn diagonal(settings: &Settings, params: &BarnesParams, run: &mut Run) -> Result<()> {
    let sigmas = sigma_list(settings, "sigma", "sigmas")?;
    let tol = tolerance(settings)?;
    let mut csv = String::from("sigma,value,method,tail_bound\n");
    for &sigma in &sigmas {
        run.bump("evaluations", 1);
        match diagonal_value(sigma, params, tol) {
            Ok(d) => csv.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(sigma),
                fmt_f64(d.value),
                d.method.name(),
                fmt_f64(d.tail_bound)
            )),
            Err(e) => run.fail(&e, json!({ "sigma": sigma })),
        }
    }
    run.emitter.emit("diagonal.csv", &csv)
}

struct CurvePlan {
    grid: Vec<f64>,
    truncated_at: Option<f64>,
    quad: QuadSettings,
    slack: f64,
}

fn curve_plan(settings: &Settings) -> Result<CurvePlan> {
    let t_max = settings.f64("Tmax")?;
    let n = settings.u64("T-grid")? as usize;
    let t_min = settings.f64("T-min")?;
    if !(t_max >= 1.0) {
        bail!("--Tmax must be >= 1");
    }
    if !(t_min >= 1.0) {
        bail!("--T-min must be >= 1");
    }
    if n == 0 {
        bail!("--T-grid must be >= 1");
    }
    let h_policy = match settings.require("h-policy")? {
        "auto" => HPolicy::Auto,
        raw => {
            let h: f64 = raw.parse().with_context(|| format!("--h-policy: expected 'auto' or a number, got '{raw}'"))?;
            if !(h > 0.0 && h.is_finite()) {
                bail!("--h-policy: step must be positive");
            }
            HPolicy::Fixed(h)
        }
    };
    let mode = match settings.require("mode")? {
        "with-correction" => IntegrandMode::WithCorrection,
        "truncated" => IntegrandMode::TruncatedOnly,
        other => bail!("--mode: expected 'with-correction' or 'truncated', got '{other}'"),
    };
    let slack = settings.f64("slack")?;
    if !(slack >= 0.0) {
        bail!("--slack must be non-negative");
    }
    let quad = QuadSettings {
        h_policy,
        mode,
        ..QuadSettings::default()
    };
    let mut grid = geometric_grid(t_min.min(t_max), t_max, n)?;
    grid.dedup();
    let mut truncated_at = None;
    if t_max > quad.t_max_cap {
        grid.retain(|&t| t <= quad.t_max_cap);
        if grid.last() != Some(&quad.t_max_cap) {
            grid.push(quad.t_max_cap);
        }
        truncated_at = Some(t_max);
    }
    Ok(CurvePlan {
        grid,
        truncated_at,
        quad,
        slack,
    })
}

/// Runs one curve and its verdict; returns the report when the verdict succeeds.
fn curve_and_verdict(
    sigma: f64,
    params: &BarnesParams,
    plan: &CurvePlan,
    hash: &str,
    run: &mut Run,
) -> (Option<MeanSquareCurve>, Option<VerdictReport>) {
    if let Some(needed) = plan.truncated_at {
        run.truncated = true;
        let e = barnes_zeta::Error::BudgetExceeded {
            operation: "mean_square_curve",
            needed,
            cap: plan.quad.t_max_cap,
        };
        run.fail(&e, json!({ "sigma": sigma, "partial_T_max": plan.quad.t_max_cap }));
    }
    let curve = match mean_square_curve(sigma, params, &plan.grid, &plan.quad) {
        Ok(c) => c,
        Err(e) => {
            run.fail(&e, json!({ "sigma": sigma }));
            return (None, None);
        }
    };
    run.bump("panels", curve.stats.panels);
    run.bump("checked_panels", curve.stats.checked_panels);
    run.bump("integrand_evals", curve.stats.integrand_evals);
    run.bump("lattice_entries", curve.stats.table_entries);
    let report = match verdict(&curve, plan.slack) {
        Ok(v) => Some(VerdictReport::new(&v, curve.grid.len(), hash)),
        Err(e) => {
            run.fail(&e, json!({ "sigma": sigma }));
            None
        }
    };
    (Some(curve), report)
}

fn single_sigma(settings: &Settings) -> Result<f64> {
    let list = sigma_list(settings, "sigma", "sigmas")?;
    if list.len() != 1 {
        bail!("--sigma: meansquare takes exactly one value (use sweep for several)");
    }
    Ok(list[0])
}

fn meansquare(settings: &Settings, params: &BarnesParams, run: &mut Run) -> Result<()> {
    let sigma = single_sigma(settings)?;
    let plan = curve_plan(settings)?;
    let hash = config_hash(settings);
    let (curve, report) = curve_and_verdict(sigma, params, &plan, &hash, run);
    if let Some(curve) = curve {
        run.emitter.emit("curve.csv", &curve.to_csv())?;
    }
    if let Some(report) = report {
        run.emitter.emit("verdict.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    Ok(())
}

fn sweep(settings: &Settings, params: &BarnesParams, run: &mut Run) -> Result<()> {
    let raw = sigma_list(settings, "sigmas", "sigma")?;
    let mut sigmas: Vec<f64> = Vec::with_capacity(raw.len());
    for s in raw {
        if sigmas.contains(&s) {
            report_warning("DuplicateSigma", &format!("sigma {s} listed more than once; ignoring repeat"), json!({ "sigma": s }));
        } else {
            sigmas.push(s);
        }
    }
    let plan = curve_plan(settings)?;
    let hash = config_hash(settings);
    let mut rows = Vec::with_capacity(sigmas.len());
    for &sigma in &sigmas {
        let (curve, report) = curve_and_verdict(sigma, params, &plan, &hash, run);
        if run.emitter.has_dir() {
            if let Some(curve) = &curve {
                run.emitter.emit(&format!("curve_sigma_{sigma}.csv"), &curve.to_csv())?;
            }
        }
        match report {
            Some(r) => rows.push(serde_json::to_value(&r)?),
            None => rows.push(json!({ "sigma": sigma, "pass": null, "error": true })),
        }
    }
    run.emitter.emit("verdicts.json", &(serde_json::to_string_pretty(&rows)? + "\n"))
}

fn lemma_check(settings: &Settings, params: &BarnesParams, run: &mut Run) -> Result<()> {
    let sigmas = sigma_list(settings, "sigma", "sigmas")?;
    let xs = match settings.get("x") {
        Some(raw) => parse_list(raw).context("--x")?,
        None => vec![10.0, 20.0, 40.0, 80.0],
    };
    let fixed_t = settings.opt_f64("t")?;
    let n = settings.u64("N")?;
    let c = settings.f64("C")?;
    let m = settings.u64("m")?;
    let mut csv = String::from("sigma,t,m,x,N,residual,scaled\n");
    for &sigma in &sigmas {
        for &x in &xs {
            let t = fixed_t.unwrap_or(2.0 * std::f64::consts::PI * x / c);
            run.bump("evaluations", 1);
            let res = ComplexPoint::new(sigma, t).and_then(|s| verify_exp_sum_lemma(s, params, m, x, n, c));
            match res {
                Ok(r) => {
                    let scaled = r * (m as f64 + x).powf(sigma);
                    csv.push_str(&format!(
                        "{},{},{m},{},{n},{},{}\n",
                        fmt_f64(sigma),
                        fmt_f64(t),
                        fmt_f64(x),
                        fmt_f64(r),
                        fmt_f64(scaled)
                    ));
                }
                Err(e) => run.fail(&e, json!({ "sigma": sigma, "t": t, "x": x, "m": m })),
            }
        }
    }
    run.emitter.emit("lemma.csv", &csv)
}
