//! End-to-end experiment orchestration: full chain runs against reference
//! paths, the behavioral track-and-filter oracle, stepped frequency-response
//! scans, and SNR sweeps.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::chain::{
    self, BpfSpec, MzmParams, ObpfSpec, PmParams, SbsParams,
};
use crate::error::{Error, Result};
use crate::metrics;
use crate::noise;
use crate::signal::{Band, OpticalEnvelope, SampledSignal};
use crate::spectral;
use crate::waveforms::{self, FrequencyTrack, SidebandSign, WaveformSpec};

/// Full configuration of one chain run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub sample_rate: f64,
    pub duration: f64,
    pub sideband_sign: SidebandSign,
    pub mzm: MzmParams,
    /// Explicit optical filter; when absent the band is derived from the
    /// control-signal frequency range with a 0.5 GHz margin.
    pub obpf: Option<ObpfSpec>,
    pub pm: PmParams,
    pub sbs: SbsParams,
    pub bpf: BpfSpec,
    pub noise_band: Band,
    /// Master seed: drives PRNG phase codes and derives the per-trial noise
    /// seeds.
    pub seed: u64,
    /// Control-vs-signal timing skew in seconds (positive delays the
    /// control). Alignment is exact by construction at zero.
    #[serde(default)]
    pub control_skew: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            sample_rate: 64e9,
            duration: 4e-6,
            sideband_sign: SidebandSign::Negative,
            mzm: MzmParams::default(),
            obpf: None,
            pm: PmParams::default(),
            sbs: SbsParams::default(),
            bpf: BpfSpec::default(),
            noise_band: Band {
                f_low: 2.4e9,
                f_high: 4.0e9,
            },
            seed: 1,
            control_skew: 0.0,
        }
    }
}

impl ChainConfig {
    /// Optical filter to use for a control signal spanning `(f_min, f_max)`.
    pub fn resolved_obpf(&self, control_range: (f64, f64)) -> Result<ObpfSpec> {
        if let Some(spec) = self.obpf {
            match self.sideband_sign {
                SidebandSign::Negative if spec.band.f_high >= 0.0 => {
                    return Err(Error::invalid(
                        "negative-sideband selection needs an OBPF band below 0 Hz".to_string(),
                    ))
                }
                SidebandSign::Positive if spec.band.f_low <= 0.0 => {
                    return Err(Error::invalid(
                        "positive-sideband selection needs an OBPF band above 0 Hz".to_string(),
                    ))
                }
                _ => {}
            }
            return Ok(spec);
        }
        let margin = 0.5e9;
        let (lo, hi) = control_range;
        let band = match self.sideband_sign {
            SidebandSign::Negative => Band::new(-(hi + margin), -(lo - margin))?,
            SidebandSign::Positive => Band::new(lo - margin, hi + margin)?,
        };
        band.check_optical(self.sample_rate)?;
        Ok(ObpfSpec {
            band,
            edge_width: 50e6,
        })
    }
}

/// Descriptors of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub family: String,
    pub snr_db: Option<f64>,
    pub trial: u64,
    pub waveform_seed: u64,
    pub noise_seed: Option<u64>,
}

/// Input/reference/filtered waveforms plus the per-run error metrics.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    /// Band-pass-filtered noisy input: the "before" waveform.
    pub noisy_input: SampledSignal,
    /// Noise-free signal through the full chain.
    pub reference: SampledSignal,
    /// Noisy signal through the full chain.
    pub filtered: SampledSignal,
    pub mse_before: f64,
    pub mse_after: f64,
    pub snr_target: Option<f64>,
    pub metadata: RunMetadata,
}

impl RunArtifacts {
    /// `10*log10(mse_before / mse_after)`.
    pub fn improvement_db(&self) -> Result<f64> {
        metrics::mse_improvement(self.mse_before, self.mse_after)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic per-purpose sub-seed derivation from the master seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream))
}

const NOISE_STREAM: u64 = 0x6E6F6973;
const SPONT_STREAM: u64 = 0x73706F6E;

/// Signal, control, and reference paths prepared once per configuration so
/// that repeated noisy trials only pay for their own chain run.
pub struct PreparedExperiment {
    pub spec: WaveformSpec,
    pub cfg: ChainConfig,
    pub signal: SampledSignal,
    pub track: FrequencyTrack,
    pub carrier: OpticalEnvelope,
    pub reference: SampledSignal,
    pub reference_direct: SampledSignal,
}

/// MZM + OBPF: turns the control record into the swept optical carrier.
pub fn control_carrier(
    control: &SampledSignal,
    obpf: &ObpfSpec,
    mzm: &MzmParams,
) -> Result<OpticalEnvelope> {
    let modulated = chain::mzm_csdsb(control, mzm)?;
    chain::obpf_select(&modulated, obpf)
}

/// PM + SBS + PD (+ optional electrical BPF) for one drive record.
fn detect(
    carrier: &OpticalEnvelope,
    drive: &SampledSignal,
    cfg: &ChainConfig,
    spont_seed: Option<u64>,
    apply_bpf: bool,
) -> Result<SampledSignal> {
    let modulated = chain::phase_modulate(carrier, drive, &cfg.pm)?;
    let amplified = chain::sbs_gain(&modulated, &cfg.sbs, 0.0, spont_seed)?;
    let detected = chain::photodetect(&amplified);
    if apply_bpf {
        chain::electrical_bpf(&detected, &cfg.bpf)
    } else {
        Ok(detected)
    }
}

pub fn prepare_experiment(spec: &WaveformSpec, cfg: &ChainConfig) -> Result<PreparedExperiment> {
    let (signal, track) = waveforms::synthesize(spec, cfg.sample_rate, cfg.duration, cfg.seed)?;
    let ctrl_spec = waveforms::derive_control(spec, cfg.sbs.bfs, cfg.sideband_sign)?;
    let (mut control, _) =
        waveforms::synthesize(&ctrl_spec, cfg.sample_rate, cfg.duration, cfg.seed)?;
    if cfg.control_skew != 0.0 {
        let shift = (cfg.control_skew * cfg.sample_rate).round() as i64;
        let n = control.samples.len() as i64;
        let shift = shift.rem_euclid(n) as usize;
        control.samples.rotate_right(shift);
    }
    let obpf = cfg.resolved_obpf(ctrl_spec.frequency_range())?;
    let carrier = control_carrier(&control, &obpf, &cfg.mzm)?;
    let reference = detect(&carrier, &signal, cfg, None, true)?;
    let reference_direct = chain::electrical_bpf(&signal, &cfg.bpf)?;
    Ok(PreparedExperiment {
        spec: spec.clone(),
        cfg: cfg.clone(),
        signal,
        track,
        carrier,
        reference,
        reference_direct,
    })
}

impl PreparedExperiment {
    /// One noisy trial: injects calibrated noise (none when `snr_db` is
    /// absent), runs the noisy chain, and scores both paths against their
    /// noise-free references.
    pub fn run_trial(&self, snr_db: Option<f64>, trial: u64) -> Result<RunArtifacts> {
        let cfg = &self.cfg;
        let noise_seed = snr_db
            .is_some()
            .then(|| derive_seed(cfg.seed, NOISE_STREAM ^ trial.wrapping_mul(0x10001)));
        let drive = match (snr_db, noise_seed) {
            (Some(snr), Some(seed)) => {
                let n = noise::calibrated_awgn(&self.signal, &cfg.noise_band, snr, seed)?;
                self.signal.add(&n)?
            }
            _ => self.signal.clone(),
        };
        let spont_seed = derive_seed(cfg.seed, SPONT_STREAM ^ trial.wrapping_mul(0x10001));
        let filtered = detect(&self.carrier, &drive, cfg, Some(spont_seed), true)?;
        let noisy_input = chain::electrical_bpf(&drive, &cfg.bpf)?;
        let mse_before = metrics::mse(&noisy_input, &self.reference_direct)?;
        let mse_after = metrics::mse(&filtered, &self.reference)?;
        Ok(RunArtifacts {
            noisy_input,
            reference: self.reference.clone(),
            filtered,
            mse_before,
            mse_after,
            snr_target: snr_db,
            metadata: RunMetadata {
                family: self.spec.family_name().to_string(),
                snr_db,
                trial,
                waveform_seed: cfg.seed,
                noise_seed,
            },
        })
    }
}

/// Synthesizes signal and control, injects calibrated in-band noise, runs
/// the physical chain on both the noisy and the noise-free drive, and scores
/// each path against its own noise-free reference.
pub fn run_experiment(
    spec: &WaveformSpec,
    snr_db: Option<f64>,
    cfg: &ChainConfig,
) -> Result<RunArtifacts> {
    prepare_experiment(spec, cfg)?.run_trial(snr_db, 0)
}

/// Idealized restatement of the tracking mechanism, used as a cross-check
/// oracle: de-chirp along the ground-truth track, apply the one-sided
/// Brillouin Lorentzian at baseband, re-chirp.
///
/// The physical chain detects the quadrature of its drive (phase modulation
/// beats the amplified sideband against the carrier at 90 degrees), so the
/// oracle returns the matching quadrature component of the re-chirped
/// analytic signal.
pub fn behavioral_filter(
    signal: &SampledSignal,
    track: &FrequencyTrack,
    sbs: &SbsParams,
) -> Result<SampledSignal> {
    let freqs = track.single()?;
    if freqs.len() != signal.len() {
        return Err(Error::Mismatch(format!(
            "track length {} vs signal length {}",
            freqs.len(),
            signal.len()
        )));
    }
    let n = signal.len();
    let fs = signal.sample_rate;
    let analytic = spectral::analytic_signal(&signal.samples);

    // Cumulative trapezoid of the track: phase of the de-chirp rotator.
    let mut phase = vec![0.0; n];
    let dt = 1.0 / fs;
    for i in 1..n {
        phase[i] = phase[i - 1] + PI * (freqs[i] + freqs[i - 1]) * dt;
    }
    let mut dechirped: Vec<Complex64> = (0..n)
        .map(|i| analytic[i] * Complex64::from_polar(1.0, -phase[i]))
        .collect();

    let g0 = (10f64.powf(sbs.peak_gain_db / 10.0)).ln();
    let linewidth = chain::calibrate_linewidth(sbs)?;
    spectral::fft_forward(&mut dechirped);
    for (k, z) in dechirped.iter_mut().enumerate() {
        let f = spectral::bin_frequency(k, n, fs);
        *z *= chain::lorentzian_response(f, g0, linewidth);
    }
    spectral::fft_inverse(&mut dechirped);

    let samples: Vec<f64> = (0..n)
        .map(|i| (dechirped[i] * Complex64::from_polar(1.0, phase[i])).im)
        .collect();
    SampledSignal::new(samples, fs, signal.t0)
}

/// One point of a stepped frequency-response scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponsePoint {
    pub probe_hz: f64,
    pub response_db: f64,
}

/// Emulates the network-analyzer measurement: the control is a fixed tone at
/// `f_ctrl`, each probe tone runs through MZM -> OBPF -> PM -> SBS -> PD
/// (the analyzer taps the detector directly, bypassing the electrical BPF),
/// and the output-to-input power ratio is read at the probe frequency.
pub fn measure_response(
    f_ctrl: f64,
    cfg: &ChainConfig,
    probe_freqs: &[f64],
) -> Result<Vec<ResponsePoint>> {
    if !(f_ctrl > 0.0) {
        return Err(Error::invalid(format!("f_ctrl must be > 0, got {f_ctrl}")));
    }
    let fs = cfg.sample_rate;
    let n = (cfg.duration * fs).round() as usize;
    if n == 0 {
        return Err(Error::Degenerate("empty record".to_string()));
    }
    for &p in probe_freqs {
        if !(p > 0.0) || p >= fs / 2.0 {
            return Err(Error::Nyquist(format!("probe {p} outside (0, {})", fs / 2.0)));
        }
    }
    let tone = |freq: f64| -> SampledSignal {
        let samples = (0..n)
            .map(|i| (2.0 * PI * freq * i as f64 / fs).cos())
            .collect();
        SampledSignal {
            samples,
            sample_rate: fs,
            t0: 0.0,
        }
    };
    let control = tone(f_ctrl);
    let obpf = cfg.resolved_obpf((f_ctrl, f_ctrl))?;
    let carrier = control_carrier(&control, &obpf, &cfg.mzm)?;

    let points: Result<Vec<ResponsePoint>> = probe_freqs
        .par_iter()
        .map(|&probe_hz| {
            let probe = tone(probe_hz);
            let out = detect(&carrier, &probe, cfg, None, false)?;
            let p_out = spectral::power_at_frequency(&out, probe_hz);
            let p_in = spectral::power_at_frequency(&probe, probe_hz);
            Ok(ResponsePoint {
                probe_hz,
                response_db: 10.0 * (p_out / p_in).log10(),
            })
        })
        .collect();
    points
}

/// Peak location (parabolic refinement) and -3 dB width (linear
/// interpolation of the crossings) of a measured response curve.
pub fn response_peak_and_width(points: &[ResponsePoint]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::Degenerate("need at least 3 response points".to_string()));
    }
    let k = points
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.response_db.total_cmp(&b.response_db))
        .map(|(i, _)| i)
        .unwrap();
    let mut f_peak = points[k].probe_hz;
    let peak_db = points[k].response_db;
    if k > 0 && k + 1 < points.len() {
        let (ym, y0, yp) = (
            points[k - 1].response_db,
            points[k].response_db,
            points[k + 1].response_db,
        );
        let denom = ym - 2.0 * y0 + yp;
        if denom.abs() > 1e-12 {
            let shift = 0.5 * (ym - yp) / denom;
            if shift.abs() <= 1.0 {
                f_peak += shift * (points[k + 1].probe_hz - points[k].probe_hz);
            }
        }
    }
    let target = peak_db - 3.0103;
    let crossing = |mut range: Box<dyn Iterator<Item = usize>>| -> Option<f64> {
        let mut prev: Option<usize> = None;
        for i in range.by_ref() {
            if let Some(j) = prev {
                let (a, b) = (&points[j], &points[i]);
                if (a.response_db - target) * (b.response_db - target) <= 0.0 {
                    let t = (target - a.response_db) / (b.response_db - a.response_db);
                    return Some(a.probe_hz + t * (b.probe_hz - a.probe_hz));
                }
            }
            prev = Some(i);
        }
        None
    };
    let left = crossing(Box::new((0..=k).rev()));
    let right = crossing(Box::new(k..points.len()));
    match (left, right) {
        (Some(l), Some(r)) => Ok((f_peak, r - l)),
        _ => Err(Error::Numerical(
            "response curve does not cross -3 dB on both sides".to_string(),
        )),
    }
}

/// One row of an SNR sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub mean_mse_before: f64,
    pub mean_mse_after: f64,
}

/// Runs `seeds_per_point` noisy trials per SNR and averages the MSEs.
/// Trials are independent jobs and execute in parallel; aggregation order is
/// fixed, so results do not depend on scheduling.
pub fn run_sweep(
    spec: &WaveformSpec,
    snr_list: &[f64],
    cfg: &ChainConfig,
    seeds_per_point: usize,
) -> Result<Vec<SweepRow>> {
    if snr_list.is_empty() || seeds_per_point == 0 {
        return Err(Error::Degenerate(
            "sweep needs at least one SNR and one seed".to_string(),
        ));
    }
    let prepared = prepare_experiment(spec, cfg)?;
    let mut order: Vec<f64> = snr_list.to_vec();
    order.sort_by(f64::total_cmp);

    let jobs: Vec<(usize, u64)> = (0..order.len())
        .flat_map(|i| (0..seeds_per_point as u64).map(move |t| (i, t)))
        .collect();
    let results: Result<Vec<(usize, f64, f64)>> = jobs
        .par_iter()
        .map(|&(i, t)| {
            let trial = (i as u64) * seeds_per_point as u64 + t;
            let run = prepared.run_trial(Some(order[i]), trial)?;
            Ok((i, run.mse_before, run.mse_after))
        })
        .collect();
    let results = results?;

    let mut rows: Vec<SweepRow> = order
        .iter()
        .map(|&snr_db| SweepRow {
            snr_db,
            mean_mse_before: 0.0,
            mean_mse_after: 0.0,
        })
        .collect();
    for (i, before, after) in results {
        rows[i].mean_mse_before += before / seeds_per_point as f64;
        rows[i].mean_mse_after += after / seeds_per_point as f64;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ChainConfig {
        // Quarter-length records keep unit tests quick; the full-scale runs
        // live in the integration suites.
        ChainConfig {
            duration: 1e-6,
            ..ChainConfig::default()
        }
    }

    #[test]
    fn run_experiment_is_deterministic() {
        let spec = WaveformSpec::lfm(2.5e9, 3.7e9, 1e-6);
        let cfg = small_cfg();
        let a = run_experiment(&spec, Some(3.0), &cfg).unwrap();
        let b = run_experiment(&spec, Some(3.0), &cfg).unwrap();
        assert_eq!(a.filtered.samples, b.filtered.samples);
        assert_eq!(a.noisy_input.samples, b.noisy_input.samples);
        assert_eq!(a.mse_before, b.mse_before);
        assert_eq!(a.mse_after, b.mse_after);
    }

    #[test]
    fn reference_is_noise_independent() {
        let spec = WaveformSpec::lfm(2.5e9, 3.7e9, 1e-6);
        let cfg = small_cfg();
        let prepared = prepare_experiment(&spec, &cfg).unwrap();
        let a = prepared.run_trial(Some(8.0), 0).unwrap();
        let b = prepared.run_trial(Some(-4.5), 7).unwrap();
        assert_eq!(a.reference.samples, b.reference.samples);
    }

    #[test]
    fn noise_free_run_has_zero_after_error() {
        let spec = WaveformSpec::lfm(2.5e9, 3.7e9, 1e-6);
        let cfg = small_cfg();
        let run = run_experiment(&spec, None, &cfg).unwrap();
        assert!(run.mse_after < 0.02, "mse_after {}", run.mse_after);
        assert!(run.mse_before < 1e-20);
    }

    #[test]
    fn noisy_run_improves_waveform() {
        let spec = WaveformSpec::lfm(2.5e9, 3.7e9, 1e-6);
        let cfg = small_cfg();
        let run = run_experiment(&spec, Some(3.0), &cfg).unwrap();
        assert!(
            run.mse_after < run.mse_before,
            "after {} vs before {}",
            run.mse_after,
            run.mse_before
        );
        assert!(run.improvement_db().unwrap() > 0.0);
    }

    #[test]
    fn behavioral_filter_stationary_tone_gain() {
        let fs = 64e9;
        let n = 65_536;
        let sbs = SbsParams::default();
        let freq = 2.5e9;
        let samples: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * freq * i as f64 / fs).cos())
            .collect();
        let sig = SampledSignal::new(samples, fs, 0.0).unwrap();
        let track = FrequencyTrack {
            components: vec![vec![freq; n]],
            transitions: vec![],
        };
        let out = behavioral_filter(&sig, &track, &sbs).unwrap();
        let gain = (out.mean_square() / sig.mean_square()).sqrt();
        let expected = 10f64.powf(sbs.peak_gain_db / 20.0);
        assert!(
            (gain - expected).abs() / expected < 0.01,
            "gain {gain}, expected {expected}"
        );
        let corr = metrics::normalized_peak_correlation(&out, &sig);
        assert!(corr > 0.999, "corr {corr}");
    }

    #[test]
    fn behavioral_filter_zero_signal() {
        let sig = SampledSignal::new(vec![0.0; 4096], 64e9, 0.0).unwrap();
        let track = FrequencyTrack {
            components: vec![vec![2.5e9; 4096]],
            transitions: vec![],
        };
        let out = behavioral_filter(&sig, &track, &SbsParams::default()).unwrap();
        assert!(out.samples.iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn behavioral_filter_rejects_multi_component() {
        let spec = WaveformSpec::dlfm(2.5e9, 3.7e9, 1e-6);
        let (sig, track) = waveforms::synthesize(&spec, 64e9, 1e-6, 0).unwrap();
        assert!(behavioral_filter(&sig, &track, &SbsParams::default()).is_err());
    }

    #[test]
    fn response_scan_peaks_at_mapped_center() {
        let cfg = ChainConfig {
            duration: 1e-6,
            ..ChainConfig::default()
        };
        let f_ctrl = 13.9e9;
        let center = chain::mpf_center_frequency(f_ctrl, cfg.sbs.bfs, cfg.sideband_sign);
        let probes: Vec<f64> = (-30..=30).map(|k| center + k as f64 * 1e6).collect();
        let points = measure_response(f_ctrl, &cfg, &probes).unwrap();
        let (peak, width) = response_peak_and_width(&points).unwrap();
        assert!((peak - center).abs() < 1e6, "peak {peak} vs {center}");
        assert!(
            (width - cfg.sbs.target_bw3db).abs() < 0.1 * cfg.sbs.target_bw3db,
            "width {width}"
        );
    }

    #[test]
    fn response_far_from_passband_is_deeply_suppressed() {
        let cfg = ChainConfig {
            duration: 1e-6,
            ..ChainConfig::default()
        };
        let f_ctrl = 13.9e9;
        let center = chain::mpf_center_frequency(f_ctrl, cfg.sbs.bfs, cfg.sideband_sign);
        let points = measure_response(f_ctrl, &cfg, &[center, center + 1.0e9]).unwrap();
        let drop = points[0].response_db - points[1].response_db;
        assert!(drop >= 30.0, "far-probe suppression only {drop:.1} dB");
    }

    #[test]
    fn control_skew_detunes_the_tracking_filter() {
        let spec = WaveformSpec::lfm(2.5e9, 3.7e9, 1e-6);
        let aligned = run_experiment(&spec, None, &small_cfg()).unwrap();
        // 100 ns of skew moves the passband ~30 MHz off the instantaneous
        // frequency (1.2 GHz/us chirp), more than the 22.5 MHz line.
        let skewed_cfg = ChainConfig {
            control_skew: 100e-9,
            ..small_cfg()
        };
        let skewed = run_experiment(&spec, None, &skewed_cfg).unwrap();
        let p_aligned = skewed_power(&aligned.filtered);
        let p_skewed = skewed_power(&skewed.filtered);
        assert!(
            p_skewed < 0.5 * p_aligned,
            "skewed output power {p_skewed} vs aligned {p_aligned}"
        );
    }

    fn skewed_power(sig: &SampledSignal) -> f64 {
        sig.mean_square()
    }

    #[test]
    fn explicit_obpf_must_match_sideband_sign() {
        let cfg = ChainConfig {
            obpf: Some(crate::chain::ObpfSpec {
                band: crate::signal::Band {
                    f_low: 10.0e9,
                    f_high: 20.0e9,
                },
                edge_width: 50e6,
            }),
            ..ChainConfig::default()
        };
        // Negative-sideband selection with a positive-offset band is invalid.
        assert!(cfg.resolved_obpf((13.3e9, 14.5e9)).is_err());
    }

    #[test]
    fn sweep_rows_ordered_and_monotone_before() {
        let spec = WaveformSpec::lfm(2.5e9, 3.7e9, 1e-6);
        let cfg = small_cfg();
        let rows = run_sweep(&spec, &[3.0, -6.0, 8.0], &cfg, 2).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].snr_db < rows[1].snr_db && rows[1].snr_db < rows[2].snr_db);
        assert!(rows[0].mean_mse_before > rows[1].mean_mse_before);
        assert!(rows[1].mean_mse_before > rows[2].mean_mse_before);
    }
}
