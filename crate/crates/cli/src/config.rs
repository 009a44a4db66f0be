//! Flat `key=value` configuration merged as flags > file > defaults.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

pub const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "v",
    "w",
    "irrational-scale",
    "tol",
    "out-dir",
    "sigma",
    "sigmas",
    "t",
    "t-range",
    "method",
    "x",
    "C",
    "N",
    "direct-order",
    "hurwitz-m",
    "Tmax",
    "T-grid",
    "T-min",
    "h-policy",
    "slack",
    "mode",
    "m",
];

pub fn defaults() -> BTreeMap<String, String> {
    [
        ("alpha", "1"),
        ("v", "1"),
        ("w", "1"),
        ("tol", "1e-10"),
        ("method", "reference"),
        ("C", "6.283185307179586"),
        ("N", "1000"),
        ("direct-order", "2000"),
        ("hurwitz-m", "20000"),
        ("T-grid", "8"),
        ("T-min", "10"),
        ("h-policy", "auto"),
        ("slack", "0.25"),
        ("mode", "with-correction"),
        ("m", "0"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key=value", lineno + 1))?;
        let k = k.trim().trim_start_matches("--");
        if !KNOWN_KEYS.contains(&k) {
            bail!("config line {}: unknown key '{k}'", lineno + 1);
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Effective settings after precedence resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub map: BTreeMap<String, String>,
}

impl Settings {
    pub fn resolve(config_path: Option<&Path>, flags: Vec<(&'static str, Option<String>)>) -> Result<Self> {
        let mut map = defaults();
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            map.extend(parse_file(&text)?);
        }
        for (k, v) in flags {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        }
        Ok(Self { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| anyhow!("missing required setting --{key}"))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let raw = self.require(key)?;
        let v: f64 = raw
            .trim()
            .parse()
            .with_context(|| format!("--{key}: cannot parse '{raw}' as a number"))?;
        if !v.is_finite() {
            bail!("--{key}: value must be finite");
        }
        Ok(v)
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(_) => self.f64(key).map(Some),
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        let raw = self.require(key)?;
        raw.trim()
            .parse()
            .with_context(|| format!("--{key}: cannot parse '{raw}' as a non-negative integer"))
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.require(key)?;
        parse_list(raw).with_context(|| format!("--{key}"))
    }

    /// Canonical text used for hashing: every setting except output location.
    pub fn canonical(&self) -> String {
        self.map
            .iter()
            .filter(|(k, _)| k.as_str() != "out-dir")
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }
}

pub fn parse_list(raw: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: f64 = part
            .parse()
            .map_err(|_| anyhow!("cannot parse '{part}' as a number"))?;
        if !v.is_finite() {
            bail!("non-finite value '{part}'");
        }
        out.push(v);
    }
    Ok(out)
}

/// `a:b:n` inclusive linear range.
pub fn parse_range(raw: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        bail!("expected start:end:count, got '{raw}'");
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| anyhow!("bad range start"))?;
    let b: f64 = parts[1].trim().parse().map_err(|_| anyhow!("bad range end"))?;
    let n: usize = parts[2].trim().parse().map_err(|_| anyhow!("bad range count"))?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        bail!("range needs finite ends and a positive count");
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let dir = std::env::temp_dir().join(format!("barnes-cfg-{}", std::process::id()));
        std::fs::write(&dir, "# run\nalpha = 5/3\nN=50\n").unwrap();
        let s = Settings::resolve(Some(&dir), vec![("N", Some("70".into())), ("v", None)]).unwrap();
        assert_eq!(s.get("alpha"), Some("5/3"));
        assert_eq!(s.get("N"), Some("70"));
        assert_eq!(s.get("v"), Some("1"));
        std::fs::remove_file(dir).unwrap();
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(parse_file("bogus=1").is_err());
        assert!(parse_file("alpha").is_err());
        assert_eq!(parse_file("--Tmax=30").unwrap()["Tmax"], "30");
    }

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("1.6, 1.8,2.5").unwrap(), vec![1.6, 1.8, 2.5]);
        assert!(parse_list("").unwrap().is_empty());
        assert_eq!(parse_range("0:10:3").unwrap(), vec![0.0, 5.0, 10.0]);
        assert!(parse_range("0:10").is_err());
    }
}
