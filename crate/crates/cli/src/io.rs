//! Deterministic file IO: raw float64 signal records with JSON sidecars,
//! CSV tables, and checksummed run manifests.
//!
//! All writes are atomic (write to a temporary file, then rename) and all
//! numeric formatting uses Rust's shortest-round-trip float representation,
//! so identical inputs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use tvmpf_core::signal::SampledSignal;

/// Sidecar describing a raw signal payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSidecar {
    pub sample_rate: f64,
    pub length: usize,
    pub t0: f64,
    /// "real" or "complex-interleaved"
    pub kind: String,
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("creating directory {}", parent.display()))?;
    }
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))?;
    Ok(())
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".json");
    path.with_file_name(name)
}

/// Writes the little-endian float64 payload plus its JSON sidecar.
pub fn write_signal(signal: &SampledSignal, path: &Path) -> Result<()> {
    let mut payload = Vec::with_capacity(signal.samples.len() * 8);
    for &x in &signal.samples {
        payload.extend_from_slice(&x.to_le_bytes());
    }
    write_atomic(path, &payload)?;
    let sidecar = SignalSidecar {
        sample_rate: signal.sample_rate,
        length: signal.samples.len(),
        t0: signal.t0,
        kind: "real".to_string(),
    };
    let json = serde_json::to_vec_pretty(&sidecar)?;
    write_atomic(&sidecar_path(path), &json)?;
    Ok(())
}

/// Reads a signal written by [`write_signal`]; the round-trip is bit-exact.
pub fn read_signal(path: &Path) -> Result<SampledSignal> {
    let sidecar_file = sidecar_path(path);
    let sidecar: SignalSidecar = serde_json::from_slice(
        &fs::read(&sidecar_file)
            .with_context(|| format!("reading sidecar {}", sidecar_file.display()))?,
    )
    .with_context(|| format!("malformed sidecar {}", sidecar_file.display()))?;
    if sidecar.kind != "real" {
        bail!(
            "unsupported signal kind {:?} in {} (only \"real\" records are readable)",
            sidecar.kind,
            sidecar_file.display()
        );
    }
    let payload =
        fs::read(path).with_context(|| format!("reading payload {}", path.display()))?;
    if payload.len() != sidecar.length * 8 {
        bail!(
            "payload {} holds {} bytes but the sidecar declares {} samples ({} bytes)",
            path.display(),
            payload.len(),
            sidecar.length,
            sidecar.length * 8
        );
    }
    let samples: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    SampledSignal::new(samples, sidecar.sample_rate, sidecar.t0)
        .map_err(|e| anyhow::anyhow!("invalid signal in {}: {e}", path.display()))
}

/// Writes a CSV table with a one-line header. Values are formatted with the
/// shortest round-trip representation; no field needs RFC-4180 quoting.
pub fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// One checksummed output file referenced by a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Snapshot of one CLI invocation: resolved configuration, metrics, and the
/// checksummed outputs it produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub metrics: serde_json::Value,
    pub outputs: Vec<OutputFile>,
    pub wall_clock_s: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            tool: "tvmpf".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            seeds: Vec::new(),
            metrics: serde_json::Value::Null,
            outputs: Vec::new(),
            wall_clock_s: 0.0,
        }
    }

    /// Records a file that already exists on disk, checksumming its content.
    pub fn record_output(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.outputs.push(OutputFile {
            path: path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &serde_json::to_vec_pretty(self)?)
    }
}

/// Re-reads every output named in a manifest and checks its checksum.
/// Returns the list of mismatched files (empty = verified).
pub fn verify_manifest(manifest_path: &Path) -> Result<Vec<String>> {
    let manifest: RunManifest = serde_json::from_slice(
        &fs::read(manifest_path)
            .with_context(|| format!("reading manifest {}", manifest_path.display()))?,
    )
    .context("malformed manifest")?;
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut failures = Vec::new();
    for output in &manifest.outputs {
        let path = dir.join(&output.path);
        match fs::read(&path) {
            Ok(bytes) => {
                if sha256_hex(&bytes) != output.sha256 || bytes.len() as u64 != output.bytes {
                    failures.push(format!("{}: checksum mismatch", output.path));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", output.path)),
        }
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tvmpf_core::waveforms::{synthesize, WaveformSpec};

    #[test]
    fn signal_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let spec = WaveformSpec::lfm(2.5e9, 3.7e9, 1e-6);
        let (sig, _) = synthesize(&spec, 16e9, 1e-6, 3).unwrap();
        let path = dir.path().join("sig.f64");
        write_signal(&sig, &path).unwrap();
        let back = read_signal(&path).unwrap();
        assert_eq!(sig.samples, back.samples);
        assert_eq!(sig.sample_rate, back.sample_rate);
        assert_eq!(sig.t0, back.t0);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let sig = SampledSignal::new(vec![1.0, 2.0, 3.0], 1e6, 0.0).unwrap();
        let path = dir.path().join("sig.f64");
        write_signal(&sig, &path).unwrap();
        let payload = fs::read(&path).unwrap();
        fs::write(&path, &payload[..16]).unwrap();
        let err = read_signal(&path).unwrap_err().to_string();
        assert!(err.contains("declares"), "{err}");
    }

    #[test]
    fn missing_sidecar_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("naked.f64");
        fs::write(&path, [0u8; 8]).unwrap();
        assert!(read_signal(&path).is_err());
    }

    #[test]
    fn manifest_verify_detects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let data_path = dir.path().join("table.csv");
        write_csv(&data_path, "a,b", vec!["1,2".to_string()].into_iter()).unwrap();
        let mut manifest = RunManifest::new("test", serde_json::json!({}));
        manifest.record_output(&data_path).unwrap();
        let manifest_path = dir.path().join("manifest.json");
        manifest.write(&manifest_path).unwrap();

        assert!(verify_manifest(&manifest_path).unwrap().is_empty());
        fs::write(&data_path, "a,b\n9,9\n").unwrap();
        let failures = verify_manifest(&manifest_path).unwrap();
        assert_eq!(failures.len(), 1);
    }

    #[test]
    fn identical_writes_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let spec = WaveformSpec::phase_coded(2.5e9, 40, 4e-7);
        let (sig, _) = synthesize(&spec, 16e9, 4e-7, 9).unwrap();
        let p1 = dir.path().join("a.f64");
        let p2 = dir.path().join("b.f64");
        write_signal(&sig, &p1).unwrap();
        write_signal(&sig, &p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        assert_eq!(
            fs::read(sidecar_path(&p1)).unwrap(),
            fs::read(sidecar_path(&p2)).unwrap()
        );
    }
}
