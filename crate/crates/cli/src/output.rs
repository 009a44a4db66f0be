//! File emission, content hashing and run manifests.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes named outputs to a directory, or to stdout when none is configured.
pub struct Emitter {
    dir: Option<PathBuf>,
    files: BTreeMap<String, String>,
}

impl Emitter {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Self {
            dir,
            files: BTreeMap::new(),
        })
    }

    pub fn emit(&mut self, name: &str, content: &str) -> Result<()> {
        self.files.insert(name.to_string(), sha256_hex(content.as_bytes()));
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(content.as_bytes())?;
                if !content.ends_with('\n') {
                    out.write_all(b"\n")?;
                }
                Ok(())
            }
        }
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    /// Writes `manifest.json` next to the emitted files (directory mode only).
    pub fn finish(self, manifest: ManifestInput) -> Result<()> {
        let Some(dir) = self.dir else {
            return Ok(());
        };
        let doc = Manifest {
            version: env!("CARGO_PKG_VERSION"),
            command: manifest.command,
            config: manifest.config,
            config_hash: manifest.config_hash,
            calibration: Calibration {
                c_em: manifest.c_em,
                c_t3: manifest.c_t3,
            },
            wall_clock_seconds: manifest.started.elapsed().as_secs_f64(),
            counters: manifest.counters,
            truncated: manifest.truncated,
            files: self.files,
        };
        let text = serde_json::to_string_pretty(&doc)? + "\n";
        std::fs::write(dir.join("manifest.json"), text)?;
        Ok(())
    }
}

pub struct ManifestInput {
    pub command: &'static str,
    pub config: BTreeMap<String, String>,
    pub config_hash: String,
    pub c_em: f64,
    pub c_t3: f64,
    pub started: Instant,
    pub counters: BTreeMap<String, u64>,
    pub truncated: bool,
}

#[derive(Serialize)]
struct Calibration {
    c_em: f64,
    c_t3: f64,
}

#[derive(Serialize)]
struct Manifest {
    version: &'static str,
    command: &'static str,
    config: BTreeMap<String, String>,
    config_hash: String,
    calibration: Calibration,
    wall_clock_seconds: f64,
    counters: BTreeMap<String, u64>,
    truncated: bool,
    files: BTreeMap<String, String>,
}

/// One machine-readable error object per line on stderr.
pub fn report_error(kind: &str, message: &str, context: serde_json::Value) {
    let mut obj = serde_json::json!({ "error": kind, "message": message });
    if let (Some(map), serde_json::Value::Object(extra)) = (obj.as_object_mut(), context) {
        map.extend(extra);
    }
    eprintln!("{obj}");
}

pub fn report_warning(kind: &str, message: &str, context: serde_json::Value) {
    let mut obj = serde_json::json!({ "warning": kind, "message": message });
    if let (Some(map), serde_json::Value::Object(extra)) = (obj.as_object_mut(), context) {
        map.extend(extra);
    }
    eprintln!("{obj}");
}

/// Round-trip float formatting used in every CSV.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn round_trip_format() {
        let x = 0.1 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
}
