//! Waveform families, sample-domain synthesis with exact instantaneous-
//! frequency tracks, and derivation of the filter-controlling signal.
//!
//! Every family is synthesized as `A*cos(phi(t))` (a sum of two such terms
//! for the dual chirp) with the track computed from the analytic derivative
//! `f = phi'/(2*pi)`, never by numeric differentiation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

/// Which Mach-Zehnder sideband the optical band-pass filter keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum SidebandSign {
    Positive,
    Negative,
}

impl SidebandSign {
    pub fn value(self) -> i8 {
        match self {
            SidebandSign::Positive => 1,
            SidebandSign::Negative => -1,
        }
    }
}

impl TryFrom<i8> for SidebandSign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(SidebandSign::Positive),
            -1 => Ok(SidebandSign::Negative),
            other => Err(format!("sideband_sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<SidebandSign> for i8 {
    fn from(s: SidebandSign) -> i8 {
        s.value()
    }
}

/// Frequency law of a nonlinear chirp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NlfmProfile {
    /// f(t) = f_start + B*(t/T)^2
    Quadratic,
    /// f(t) = f_center + (B/2)*sin(pi*(2t/T - 1))
    Sinusoidal,
}

/// Phase behavior of a frequency hopper across dwells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FhPhaseMode {
    /// Each tone keeps its own running phase, as in AWG table playback.
    ContinuousPerTone,
    /// Phase restarts at zero on every dwell.
    Reset,
}

/// Linear chirp parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LfmParams {
    pub f_start: f64,
    pub f_stop: f64,
    pub period: f64,
}

/// Declarative description of one waveform family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WaveformShape {
    Lfm(LfmParams),
    Nlfm {
        f_start: f64,
        f_stop: f64,
        period: f64,
        profile: NlfmProfile,
    },
    Dlfm {
        up: LfmParams,
        down: LfmParams,
    },
    Fh {
        freqs: Vec<f64>,
        dwell: f64,
        phase_mode: FhPhaseMode,
    },
    PhaseCoded {
        carrier: f64,
        n_bits: usize,
        period: f64,
        /// Explicit bit sequence; when absent the code is drawn from the
        /// synthesis seed.
        code: Option<Vec<u8>>,
    },
}

/// Waveform family plus the common peak amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformSpec {
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(flatten)]
    pub shape: WaveformShape,
}

fn default_amplitude() -> f64 {
    1.0
}

/// Per-sample ground-truth instantaneous frequency, aligned 1:1 with the
/// synthesized record. Two components for the dual chirp, one otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTrack {
    pub components: Vec<Vec<f64>>,
    /// Sample indices of hop/bit/period transitions, for metrics that must
    /// skip discontinuities.
    pub transitions: Vec<usize>,
}

impl FrequencyTrack {
    pub fn single(&self) -> Result<&[f64]> {
        if self.components.len() != 1 {
            return Err(Error::invalid(format!(
                "expected a single-component track, got {} components",
                self.components.len()
            )));
        }
        Ok(&self.components[0])
    }

    pub fn min_frequency(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .fold(f64::INFINITY, |m, &f| m.min(f))
    }

    pub fn max_frequency(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .fold(0.0_f64, |m, &f| m.max(f))
    }
}

impl WaveformSpec {
    pub fn lfm(f_start: f64, f_stop: f64, period: f64) -> Self {
        Self {
            amplitude: 1.0,
            shape: WaveformShape::Lfm(LfmParams {
                f_start,
                f_stop,
                period,
            }),
        }
    }

    pub fn nlfm(f_start: f64, f_stop: f64, period: f64, profile: NlfmProfile) -> Self {
        Self {
            amplitude: 1.0,
            shape: WaveformShape::Nlfm {
                f_start,
                f_stop,
                period,
                profile,
            },
        }
    }

    /// Dual chirp: simultaneous up- and down-chirp across the same band.
    pub fn dlfm(f_low: f64, f_high: f64, period: f64) -> Self {
        Self {
            amplitude: 1.0,
            shape: WaveformShape::Dlfm {
                up: LfmParams {
                    f_start: f_low,
                    f_stop: f_high,
                    period,
                },
                down: LfmParams {
                    f_start: f_high,
                    f_stop: f_low,
                    period,
                },
            },
        }
    }

    pub fn fh(freqs: Vec<f64>, dwell: f64) -> Self {
        Self {
            amplitude: 1.0,
            shape: WaveformShape::Fh {
                freqs,
                dwell,
                phase_mode: FhPhaseMode::ContinuousPerTone,
            },
        }
    }

    pub fn phase_coded(carrier: f64, n_bits: usize, period: f64) -> Self {
        Self {
            amplitude: 1.0,
            shape: WaveformShape::PhaseCoded {
                carrier,
                n_bits,
                period,
                code: None,
            },
        }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn family_name(&self) -> &'static str {
        match self.shape {
            WaveformShape::Lfm(_) => "lfm",
            WaveformShape::Nlfm { .. } => "nlfm",
            WaveformShape::Dlfm { .. } => "dlfm",
            WaveformShape::Fh { .. } => "fh",
            WaveformShape::PhaseCoded { .. } => "phase_coded",
        }
    }

    /// Fundamental repetition period of the waveform.
    pub fn period(&self) -> f64 {
        match &self.shape {
            WaveformShape::Lfm(p) => p.period,
            WaveformShape::Nlfm { period, .. } => *period,
            WaveformShape::Dlfm { up, .. } => up.period,
            WaveformShape::Fh { freqs, dwell, .. } => dwell * freqs.len().max(1) as f64,
            WaveformShape::PhaseCoded { period, .. } => *period,
        }
    }

    /// Smallest and largest declared instantaneous frequency.
    pub fn frequency_range(&self) -> (f64, f64) {
        match &self.shape {
            WaveformShape::Lfm(p) => (p.f_start.min(p.f_stop), p.f_start.max(p.f_stop)),
            WaveformShape::Nlfm { f_start, f_stop, .. } => {
                (f_start.min(*f_stop), f_start.max(*f_stop))
            }
            WaveformShape::Dlfm { up, down } => (
                up.f_start.min(up.f_stop).min(down.f_start.min(down.f_stop)),
                up.f_start.max(up.f_stop).max(down.f_start.max(down.f_stop)),
            ),
            WaveformShape::Fh { freqs, .. } => freqs.iter().fold(
                (f64::INFINITY, 0.0_f64),
                |(lo, hi), &f| (lo.min(f), hi.max(f)),
            ),
            WaveformShape::PhaseCoded { carrier, .. } => (*carrier, *carrier),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0) || !self.amplitude.is_finite() {
            return Err(Error::invalid(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        let check_chirp = |f_start: f64, f_stop: f64, period: f64| -> Result<()> {
            if !(period > 0.0) {
                return Err(Error::invalid(format!("period must be > 0, got {period}")));
            }
            if !(f_start > 0.0) || !(f_stop > 0.0) {
                return Err(Error::invalid(format!(
                    "chirp frequencies must be > 0, got f_start={f_start}, f_stop={f_stop}"
                )));
            }
            if f_start == f_stop {
                return Err(Error::invalid(
                    "degenerate chirp: f_start equals f_stop".to_string(),
                ));
            }
            Ok(())
        };
        match &self.shape {
            WaveformShape::Lfm(p) => check_chirp(p.f_start, p.f_stop, p.period),
            WaveformShape::Nlfm {
                f_start,
                f_stop,
                period,
                ..
            } => check_chirp(*f_start, *f_stop, *period),
            WaveformShape::Dlfm { up, down } => {
                check_chirp(up.f_start, up.f_stop, up.period)?;
                check_chirp(down.f_start, down.f_stop, down.period)?;
                if up.period != down.period {
                    return Err(Error::invalid(format!(
                        "dual-chirp halves must share a period, got {} and {}",
                        up.period, down.period
                    )));
                }
                Ok(())
            }
            WaveformShape::Fh { freqs, dwell, .. } => {
                if freqs.is_empty() {
                    return Err(Error::invalid("FH frequency list is empty".to_string()));
                }
                if freqs.iter().any(|&f| !(f > 0.0)) {
                    return Err(Error::invalid("FH frequencies must be > 0".to_string()));
                }
                if !(*dwell > 0.0) {
                    return Err(Error::invalid(format!("dwell must be > 0, got {dwell}")));
                }
                Ok(())
            }
            WaveformShape::PhaseCoded {
                carrier,
                n_bits,
                period,
                code,
            } => {
                if !(*carrier > 0.0) {
                    return Err(Error::invalid(format!(
                        "carrier must be > 0, got {carrier}"
                    )));
                }
                if *n_bits == 0 {
                    return Err(Error::invalid("n_bits must be > 0".to_string()));
                }
                if !(*period > 0.0) {
                    return Err(Error::invalid(format!("period must be > 0, got {period}")));
                }
                if let Some(bits) = code {
                    if bits.len() != *n_bits {
                        return Err(Error::invalid(format!(
                            "explicit code has {} bits, spec declares {}",
                            bits.len(),
                            n_bits
                        )));
                    }
                    if bits.iter().any(|&b| b > 1) {
                        return Err(Error::invalid("code bits must be 0 or 1".to_string()));
                    }
                }
                Ok(())
            }
        }
    }
}

fn integer_ratio(num: f64, den: f64, what: &str) -> Result<usize> {
    let ratio = num / den;
    let rounded = ratio.round();
    if rounded < 0.5 || (ratio - rounded).abs() > 1e-9 * ratio.abs().max(1.0) {
        return Err(Error::invalid(format!(
            "{what}: {num} is not an integer multiple of {den}"
        )));
    }
    Ok(rounded as usize)
}

/// Resolves the phase-coded bit pattern: an explicit code wins, otherwise a
/// Bernoulli(1/2) sequence is drawn from `seed`.
pub fn resolve_code(code: &Option<Vec<u8>>, n_bits: usize, seed: u64) -> Vec<u8> {
    match code {
        Some(bits) => bits.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n_bits).map(|_| rng.gen::<bool>() as u8).collect()
        }
    }
}

/// Synthesizes one waveform record together with its exact frequency track.
///
/// `duration` must be an integer number of periods and the sample rate must
/// give at least 2.5 samples per cycle of the highest declared frequency.
/// The result is deterministic; `seed` only affects PRNG-drawn phase codes.
pub fn synthesize(
    spec: &WaveformSpec,
    sample_rate: f64,
    duration: f64,
    seed: u64,
) -> Result<(SampledSignal, FrequencyTrack)> {
    spec.validate()?;
    let (_, f_max) = spec.frequency_range();
    if sample_rate < 2.5 * f_max {
        return Err(Error::Nyquist(format!(
            "sample rate {sample_rate} < 2.5 x highest frequency {f_max}"
        )));
    }
    integer_ratio(duration, spec.period(), "duration")?;
    let n = integer_ratio(duration * sample_rate, 1.0, "sample count")?;
    let dt = 1.0 / sample_rate;
    let a = spec.amplitude;

    let mut samples = vec![0.0; n];
    let mut transitions: Vec<usize> = Vec::new();

    let track = match &spec.shape {
        WaveformShape::Lfm(p) => {
            let mut f = vec![0.0; n];
            fill_lfm(&mut samples, &mut f, p, a, sample_rate);
            mark_period_transitions(&mut transitions, p.period, sample_rate, n);
            FrequencyTrack {
                components: vec![f],
                transitions,
            }
        }
        WaveformShape::Nlfm {
            f_start,
            f_stop,
            period,
            profile,
        } => {
            let t_p = *period;
            let b = f_stop - f_start;
            let f_center = 0.5 * (f_start + f_stop);
            let mut f = vec![0.0; n];
            for i in 0..n {
                let t = i as f64 * dt;
                let tp = t.rem_euclid(t_p);
                let (phi, fi) = match profile {
                    NlfmProfile::Quadratic => {
                        let phi = 2.0 * PI * (f_start * tp + b * tp * tp * tp / (3.0 * t_p * t_p));
                        (phi, f_start + b * (tp / t_p) * (tp / t_p))
                    }
                    NlfmProfile::Sinusoidal => {
                        let arg = PI * (2.0 * tp / t_p - 1.0);
                        let phi =
                            2.0 * PI * f_center * tp - 0.5 * b.abs() * t_p * (arg.cos() + 1.0);
                        (phi, f_center + 0.5 * b.abs() * arg.sin())
                    }
                };
                samples[i] = a * phi.cos();
                f[i] = fi;
            }
            mark_period_transitions(&mut transitions, t_p, sample_rate, n);
            FrequencyTrack {
                components: vec![f],
                transitions,
            }
        }
        WaveformShape::Dlfm { up, down } => {
            let mut sum_up = vec![0.0; n];
            let mut f_up = vec![0.0; n];
            fill_lfm(&mut sum_up, &mut f_up, up, a, sample_rate);
            let mut sum_down = vec![0.0; n];
            let mut f_down = vec![0.0; n];
            fill_lfm(&mut sum_down, &mut f_down, down, a, sample_rate);
            for i in 0..n {
                samples[i] = sum_up[i] + sum_down[i];
            }
            mark_period_transitions(&mut transitions, up.period, sample_rate, n);
            FrequencyTrack {
                components: vec![f_up, f_down],
                transitions,
            }
        }
        WaveformShape::Fh {
            freqs,
            dwell,
            phase_mode,
        } => {
            let dwell_samples = integer_ratio(dwell * sample_rate, 1.0, "dwell sample count")?;
            let mut f = vec![0.0; n];
            for i in 0..n {
                let t = i as f64 * dt;
                let slot = i / dwell_samples;
                let tone = slot % freqs.len();
                let freq = freqs[tone];
                let phi = match phase_mode {
                    FhPhaseMode::ContinuousPerTone => 2.0 * PI * freq * t,
                    FhPhaseMode::Reset => {
                        2.0 * PI * freq * (t - slot as f64 * dwell_samples as f64 * dt)
                    }
                };
                samples[i] = a * phi.cos();
                f[i] = freq;
            }
            let mut s = dwell_samples;
            while s < n {
                transitions.push(s);
                s += dwell_samples;
            }
            FrequencyTrack {
                components: vec![f],
                transitions,
            }
        }
        WaveformShape::PhaseCoded {
            carrier,
            n_bits,
            period,
            code,
        } => {
            let period_samples = integer_ratio(*period * sample_rate, 1.0, "period samples")?;
            if period_samples % n_bits != 0 {
                return Err(Error::invalid(format!(
                    "{n_bits} bits do not divide {period_samples} samples per period"
                )));
            }
            let bit_samples = period_samples / n_bits;
            let bits = resolve_code(code, *n_bits, seed);
            let mut f = vec![0.0; n];
            for i in 0..n {
                let t = i as f64 * dt;
                let bit = (i % period_samples) / bit_samples;
                let phi = 2.0 * PI * carrier * t + PI * bits[bit] as f64;
                samples[i] = a * phi.cos();
                f[i] = *carrier;
            }
            let mut s = bit_samples;
            while s < n {
                transitions.push(s);
                s += bit_samples;
            }
            FrequencyTrack {
                components: vec![f],
                transitions,
            }
        }
    };

    Ok((SampledSignal::new(samples, sample_rate, 0.0)?, track))
}

fn fill_lfm(samples: &mut [f64], freq: &mut [f64], p: &LfmParams, amplitude: f64, fs: f64) {
    let rate = (p.f_stop - p.f_start) / p.period;
    let dt = 1.0 / fs;
    for i in 0..samples.len() {
        let t = i as f64 * dt;
        let tp = t.rem_euclid(p.period);
        let phi = 2.0 * PI * (p.f_start * tp + 0.5 * rate * tp * tp);
        samples[i] = amplitude * phi.cos();
        freq[i] = p.f_start + rate * tp;
    }
}

fn mark_period_transitions(transitions: &mut Vec<usize>, period: f64, fs: f64, n: usize) {
    let period_samples = (period * fs).round() as usize;
    if period_samples == 0 {
        return;
    }
    let mut s = period_samples;
    while s < n {
        transitions.push(s);
        s += period_samples;
    }
}

/// Builds the filter-controlling spec: every frequency `f` of the input is
/// replaced by the control frequency whose Brillouin-shifted passband lands
/// back on `f` (`bfs + f` for the negative sideband, `f - bfs` for the
/// positive one).
pub fn derive_control(
    spec: &WaveformSpec,
    bfs: f64,
    sideband_sign: SidebandSign,
) -> Result<WaveformSpec> {
    if !(bfs > 0.0) {
        return Err(Error::invalid(format!("bfs must be > 0, got {bfs}")));
    }
    let map = |f: f64| -> Result<f64> {
        let ctrl = match sideband_sign {
            SidebandSign::Negative => bfs + f,
            SidebandSign::Positive => f - bfs,
        };
        if !(ctrl > 0.0) {
            return Err(Error::invalid(format!(
                "control frequency {ctrl} for signal frequency {f} is not positive; \
                 the {sideband_sign:?} sideband cannot reach it with bfs = {bfs}"
            )));
        }
        Ok(ctrl)
    };
    let shape = match &spec.shape {
        WaveformShape::Lfm(p) => WaveformShape::Lfm(LfmParams {
            f_start: map(p.f_start)?,
            f_stop: map(p.f_stop)?,
            period: p.period,
        }),
        WaveformShape::Nlfm {
            f_start,
            f_stop,
            period,
            profile,
        } => WaveformShape::Nlfm {
            f_start: map(*f_start)?,
            f_stop: map(*f_stop)?,
            period: *period,
            profile: *profile,
        },
        WaveformShape::Dlfm { up, down } => WaveformShape::Dlfm {
            up: LfmParams {
                f_start: map(up.f_start)?,
                f_stop: map(up.f_stop)?,
                period: up.period,
            },
            down: LfmParams {
                f_start: map(down.f_start)?,
                f_stop: map(down.f_stop)?,
                period: down.period,
            },
        },
        WaveformShape::Fh {
            freqs,
            dwell,
            phase_mode,
        } => WaveformShape::Fh {
            freqs: freqs.iter().map(|&f| map(f)).collect::<Result<_>>()?,
            dwell: *dwell,
            phase_mode: *phase_mode,
        },
        WaveformShape::PhaseCoded {
            carrier,
            n_bits,
            period,
            code,
        } => WaveformShape::PhaseCoded {
            carrier: map(*carrier)?,
            n_bits: *n_bits,
            period: *period,
            code: code.clone(),
        },
    };
    Ok(WaveformSpec {
        amplitude: spec.amplitude,
        shape,
    })
}

/// RMS deviation (Hz) between the analytic track and the frequency estimated
/// from the record's unwrapped analytic-signal phase. Transition and edge
/// samples are excluded.
pub fn instantaneous_frequency_error(
    signal: &SampledSignal,
    track: &FrequencyTrack,
) -> Result<f64> {
    let reference = track.single()?;
    if reference.len() != signal.len() {
        return Err(Error::Mismatch(format!(
            "track length {} vs signal length {}",
            reference.len(),
            signal.len()
        )));
    }
    let n = signal.len();
    if n < 16 {
        return Err(Error::Degenerate("record too short".to_string()));
    }
    let analytic = crate::spectral::analytic_signal(&signal.samples);

    // Central-difference phase derivative, with wrap correction per step.
    let fs = signal.sample_rate;
    let mut excluded = vec![false; n];
    let edge = (n / 100).max(16);
    for i in 0..edge.min(n) {
        excluded[i] = true;
        excluded[n - 1 - i] = true;
    }
    let guard = 8;
    for &t in &track.transitions {
        let lo = t.saturating_sub(guard);
        let hi = (t + guard).min(n);
        for flag in excluded.iter_mut().take(hi).skip(lo) {
            *flag = true;
        }
    }

    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for i in 1..n - 1 {
        if excluded[i] || excluded[i - 1] || excluded[i + 1] {
            continue;
        }
        let d = (analytic[i + 1] * analytic[i - 1].conj()).arg();
        let f_est = d * fs / (4.0 * PI);
        let err = f_est - reference[i];
        sum_sq += err * err;
        count += 1;
    }
    if count == 0 {
        return Err(Error::Degenerate(
            "no usable samples after exclusions".to_string(),
        ));
    }
    Ok((sum_sq / count as f64).sqrt())
}
