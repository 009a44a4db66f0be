use std::path::Path;
use std::process::{Command, Output};

fn barnes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barnes"))
        .args(args)
        .output()
        .expect("spawn barnes")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eval_zeta_two_identity() {
    let o = barnes(&["eval", "--sigma", "3", "--t", "0", "--alpha", "1", "--v", "1", "--w", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("sigma,t,method,re,im,error_bound,terms_used\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    let re: f64 = rows[0][3].parse().unwrap();
    assert!((re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12, "{re}");
}

#[test]
fn eval_below_region_fails_with_json_error() {
    let o = barnes(&["eval", "--sigma", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_str(stderr(&o).lines().next().unwrap()).unwrap();
    assert_eq!(err["error"], "RegionError");
    assert_eq!(err["sigma"], 0.5);
}

#[test]
fn eval_methods_agree_within_summed_bounds() {
    let o = barnes(&["eval", "--sigma", "2.5", "--t", "10", "--method", "em,t3,reference"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    let parsed: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| (r[3].parse().unwrap(), r[4].parse().unwrap(), r[5].parse().unwrap()))
        .collect();
    for a in &parsed {
        for b in &parsed {
            let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
            assert!(d <= a.2 + b.2, "{a:?} {b:?}");
        }
    }
}

#[test]
fn invalid_parameters_are_usage_errors() {
    let o = barnes(&["eval", "--sigma", "3", "--alpha", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = barnes(&["eval", "--sigma", "3", "--method", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = barnes(&["diagonal", "--sigma", "2", "--irrational-scale", "tau"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn diagonal_values_and_guard() {
    let o = barnes(&["diagonal", "--sigma", "2", "--alpha", "1", "--v", "1", "--w", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    let v: f64 = rows[0][1].parse().unwrap();
    assert!((v - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);

    let o = barnes(&["diagonal", "--irrational-scale", "sqrt2", "--sigma", "1.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][2], "irrational-collapse");
    // sum over m, n >= 0 of (1 + m + n sqrt2)^{-3}, brute force with an integral tail
    let w = 2f64.sqrt();
    let mut oracle = 0.0;
    let cut = 3000u32;
    for m in 0..cut {
        for n in 0..cut {
            oracle += (1.0 + m as f64 + n as f64 * w).powi(-3);
        }
    }
    let got: f64 = rows[0][1].parse().unwrap();
    assert!((got - oracle).abs() < 1e-3 && got > oracle, "{got} {oracle}");

    let o = barnes(&["diagonal", "--sigma", "1.4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("\"RegionError\""));
}

#[test]
fn meansquare_writes_curve_verdict_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = barnes(&["meansquare", "--sigma", "2.5", "--Tmax", "100", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let verdict = read_json(&out.join("verdict.json"));
    assert_eq!(verdict["pass"], true);
    assert_eq!(verdict["region"], "Theorem1");
    let curve = std::fs::read_to_string(out.join("curve.csv")).unwrap();
    assert!(curve.starts_with("T,I,quad_err,R,leading_coeff\n"));
    assert_eq!(csv_rows(&curve).len(), 8);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["truncated"], false);
    assert_eq!(manifest["calibration"]["c_em"], 10.0);
    assert_eq!(manifest["config_hash"], verdict["config_hash"]);
    assert!(manifest["counters"]["panels"].as_u64().unwrap() > 0);
}

#[test]
fn meansquare_single_point_has_insufficient_signal() {
    let o = barnes(&["meansquare", "--sigma", "2.5", "--Tmax", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("\"InsufficientSignal\""));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn meansquare_over_budget_flushes_partial_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = barnes(&[
        "meansquare", "--sigma", "2.5", "--Tmax", "800", "--T-min", "300", "--T-grid", "5", "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("\"BudgetExceeded\""));
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["truncated"], true);
    let curve = std::fs::read_to_string(out.join("curve.csv")).unwrap();
    let last: f64 = csv_rows(&curve).last().unwrap()[0].parse().unwrap();
    assert_eq!(last, 500.0);
}

#[test]
fn sweep_dedupes_and_continues_past_failures() {
    let o = barnes(&["sweep", "--sigmas", "2.5,3,2.5,1.2", "--Tmax", "60"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("\"warning\":\"DuplicateSigma\""), "{err}");
    assert!(err.contains("\"RegionError\""), "{err}");
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["sigma"], 2.5);
    assert_eq!(rows[1]["sigma"], 3.0);
    assert_eq!(rows[2]["error"], true);
}

#[test]
fn sweep_empty_list_is_usage_error() {
    let o = barnes(&["sweep", "--sigmas", ""]);
    assert_eq!(o.status.code(), Some(2));
    let o = barnes(&["sweep", "--Tmax", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_reproduce_file_hashes() {
    let dir = tempfile::tempdir().unwrap();
    let mut hashes = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = barnes(&[
            "sweep", "--sigmas", "1.8,2.5", "--Tmax", "80", "--alpha", "1/2", "--w", "3/2", "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let manifest = read_json(&out.join("manifest.json"));
        for (file, hash) in manifest["files"].as_object().unwrap() {
            let bytes = std::fs::read(out.join(file)).unwrap();
            let mut h = sha2_hex(&bytes);
            assert_eq!(&h, hash.as_str().unwrap());
            h.insert_str(0, file);
            hashes.push(h);
        }
        hashes.push(manifest["config_hash"].as_str().unwrap().to_string());
    }
    let half = hashes.len() / 2;
    assert_eq!(hashes[..half], hashes[half..]);
}

fn sha2_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn config_file_then_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# diagonal settings\nsigma=2\nalpha = 2\n").unwrap();
    let o = barnes(&["diagonal", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: f64 = csv_rows(&stdout(&o))[0][1].parse().unwrap();
    // alpha = 2: lambda = j + 1 with multiplicity j, sum j^2 (j+1)^{-4} = zeta(2) - 2 zeta(3) + zeta(4)
    let zeta3 = 1.202_056_903_159_594_3;
    let expected = std::f64::consts::PI.powi(2) / 6.0 - 2.0 * zeta3 + std::f64::consts::PI.powi(4) / 90.0;
    assert!((v - expected).abs() < 1e-12, "{v} {expected}");

    let o = barnes(&["diagonal", "--config", cfg.to_str().unwrap(), "--alpha", "1"]);
    let v: f64 = csv_rows(&stdout(&o))[0][1].parse().unwrap();
    assert!((v - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12, "{v}");

    std::fs::write(&cfg, "sigma=2\nbogus=1\n").unwrap();
    let o = barnes(&["diagonal", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lemma_check_scaled_residual_stays_bounded() {
    let o = barnes(&["lemma-check", "--sigma", "1.5,2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 8);
    for chunk in rows.chunks(4) {
        let first: f64 = chunk[0][6].parse().unwrap();
        for r in chunk {
            let scaled: f64 = r[6].parse().unwrap();
            assert!(scaled <= 10.0 * first, "{scaled} vs {first}");
        }
    }
}
