//! JSON run configuration: parsing, invariant validation with field-level
//! messages, and resolution of every default so nothing is applied silently.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use tvmpf_core::pipeline::ChainConfig;
use tvmpf_core::waveforms::{derive_control, NlfmProfile, WaveformShape, WaveformSpec};

/// Top-level config file: a waveform plus the chain parameters. Both
/// sections are optional; absent fields resolve to the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    #[serde(default = "default_waveform")]
    pub waveform: WaveformSpec,
    #[serde(default)]
    pub chain: ChainConfig,
}

fn default_waveform() -> WaveformSpec {
    WaveformSpec::lfm(2.5e9, 3.7e9, 4e-6)
}

impl Default for Config {
    fn default() -> Self {
        Self {
            waveform: default_waveform(),
            chain: ChainConfig::default(),
        }
    }
}

/// Built-in parameter sets for each waveform family.
pub fn default_spec_for_family(family: &str) -> Result<WaveformSpec> {
    Ok(match family {
        "lfm" => WaveformSpec::lfm(2.5e9, 3.7e9, 4e-6),
        "nlfm" => WaveformSpec::nlfm(2.5e9, 3.7e9, 4e-6, NlfmProfile::Quadratic),
        "dlfm" => WaveformSpec::dlfm(2.5e9, 3.7e9, 4e-6),
        "fh" => WaveformSpec::fh(vec![2.5e9, 2.8e9], 10e-9),
        "phase_coded" | "pc" => WaveformSpec::phase_coded(2.5e9, 400, 4e-6),
        other => bail!(
            "unknown waveform family {other:?} (expected lfm, nlfm, dlfm, fh, phase_coded)"
        ),
    })
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let bytes =
            fs::read(path).with_context(|| format!("reading config {}", path.display()))?;
        let config: Config = serde_json::from_slice(&bytes)
            .with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    /// Checks every invariant the run relies on, with messages naming the
    /// offending fields and values.
    pub fn validate(&self) -> Result<()> {
        let chain = &self.chain;
        if !(chain.sample_rate > 0.0) {
            bail!("chain.sample_rate must be > 0, got {}", chain.sample_rate);
        }
        if !(chain.duration > 0.0) {
            bail!("chain.duration must be > 0, got {}", chain.duration);
        }
        match &self.waveform.shape {
            WaveformShape::Lfm(p) => {
                if p.f_start >= p.f_stop {
                    bail!(
                        "waveform.f_start ({}) must be below waveform.f_stop ({})",
                        p.f_start,
                        p.f_stop
                    );
                }
            }
            WaveformShape::Nlfm { f_start, f_stop, .. } => {
                if f_start >= f_stop {
                    bail!(
                        "waveform.f_start ({}) must be below waveform.f_stop ({})",
                        f_start,
                        f_stop
                    );
                }
            }
            _ => {}
        }
        let (_, f_max) = self.waveform.frequency_range();
        if chain.sample_rate < 2.5 * f_max {
            bail!(
                "chain.sample_rate ({}) is below 2.5 x the highest waveform frequency ({})",
                chain.sample_rate,
                f_max
            );
        }
        chain
            .noise_band
            .check_electrical(chain.sample_rate)
            .map_err(|e| anyhow::anyhow!("chain.noise_band: {e}"))?;
        chain
            .bpf
            .band
            .check_electrical(chain.sample_rate)
            .map_err(|e| anyhow::anyhow!("chain.bpf.band: {e}"))?;
        if !(chain.mzm.mod_index > 0.0 && chain.mzm.mod_index < std::f64::consts::PI) {
            bail!(
                "chain.mzm.mod_index must lie in (0, pi), got {}",
                chain.mzm.mod_index
            );
        }
        if !(chain.pm.mod_index > 0.0) {
            bail!("chain.pm.mod_index must be > 0, got {}", chain.pm.mod_index);
        }
        if !(chain.sbs.bfs > 0.0) {
            bail!("chain.sbs.bfs must be > 0, got {}", chain.sbs.bfs);
        }
        if !(chain.sbs.target_bw3db > 0.0) {
            bail!(
                "chain.sbs.target_bw3db must be > 0, got {}",
                chain.sbs.target_bw3db
            );
        }
        if chain.sbs.spontaneous_level < 0.0 {
            bail!(
                "chain.sbs.spontaneous_level must be >= 0, got {}",
                chain.sbs.spontaneous_level
            );
        }
        // Control-path feasibility: the derived control must exist, fit the
        // sample rate, and the resolved OBPF band must be representable.
        let control = derive_control(&self.waveform, chain.sbs.bfs, chain.sideband_sign)
            .map_err(|e| anyhow::anyhow!("waveform/chain.sideband_sign: {e}"))?;
        let (_, ctrl_max) = control.frequency_range();
        if chain.sample_rate < 2.5 * ctrl_max {
            bail!(
                "chain.sample_rate ({}) is below 2.5 x the highest control frequency ({})",
                chain.sample_rate,
                ctrl_max
            );
        }
        chain
            .resolved_obpf(control.frequency_range())
            .map_err(|e| anyhow::anyhow!("chain.obpf: {e}"))?;
        Ok(())
    }

    /// The configuration with every default made concrete (notably the
    /// OBPF band), for echoing into stdout and manifests.
    pub fn resolved(&self) -> Result<Config> {
        let mut resolved = self.clone();
        let control =
            derive_control(&self.waveform, self.chain.sbs.bfs, self.chain.sideband_sign)?;
        resolved.chain.obpf = Some(self.chain.resolved_obpf(control.frequency_range())?);
        Ok(resolved)
    }
}
