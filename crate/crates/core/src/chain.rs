//! Complex-envelope models of the optical/electrical components: null-biased
//! Mach-Zehnder modulator, optical sideband filter, phase modulator,
//! Brillouin gain, square-law photodetector, and electrical band-pass filter.
//!
//! The pump is unmodulated, so under the undepleted small-signal regime the
//! Brillouin interaction is a time-invariant complex Lorentzian on the
//! optical spectrum and is applied once to the whole record. All time
//! variance of the microwave response comes from the control modulation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{Band, OpticalEnvelope, SampledSignal};
use crate::spectral;
use crate::waveforms::SidebandSign;

/// Null-biased Mach-Zehnder modulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MzmParams {
    /// Peak phase swing in radians per unit of the normalized drive.
    pub mod_index: f64,
}

impl Default for MzmParams {
    fn default() -> Self {
        Self { mod_index: 0.5 }
    }
}

/// Optical band-pass filter selecting one modulation sideband. The band is
/// expressed in offset frequencies relative to the laser line and may be
/// negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObpfSpec {
    pub band: Band,
    /// Raised-cosine transition width outside each band edge.
    pub edge_width: f64,
}

/// Brillouin gain parameters. The user-facing quantity is the effective
/// 3-dB bandwidth of the amplified response; the intrinsic linewidth is
/// derived from it through the gain-narrowing relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbsParams {
    /// Brillouin frequency shift (pump line to gain line), Hz.
    pub bfs: f64,
    /// Effective 3-dB power-gain bandwidth of the filter, Hz.
    pub target_bw3db: f64,
    /// On-resonance power gain, dB.
    pub peak_gain_db: f64,
    /// Amplifier-added (spontaneous-scattering) noise level, expressed as a
    /// field amplitude scale on the gained part of the line. Zero disables
    /// the mechanism and leaves the chain fully deterministic.
    #[serde(default)]
    pub spontaneous_level: f64,
}

impl Default for SbsParams {
    fn default() -> Self {
        Self {
            bfs: 10.8e9,
            target_bw3db: 22.5e6,
            peak_gain_db: 15.0,
            spontaneous_level: 0.0,
        }
    }
}

/// Phase modulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmParams {
    /// Radians per unit drive amplitude.
    pub mod_index: f64,
}

impl Default for PmParams {
    fn default() -> Self {
        Self { mod_index: 0.3 }
    }
}

/// Electrical band-pass filter after the photodetector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BpfSpec {
    pub band: Band,
    pub edge_width: f64,
}

impl Default for BpfSpec {
    fn default() -> Self {
        Self {
            band: Band {
                f_low: 2.4e9,
                f_high: 4.0e9,
            },
            edge_width: 50e6,
        }
    }
}

/// Carrier-suppressed double-sideband modulation: `E(t) = sin(m * c(t))`
/// with the drive normalized to unit peak. A null-biased MZM produces only
/// odd-order sidebands and no component at the laser line.
pub fn mzm_csdsb(drive: &SampledSignal, params: &MzmParams) -> Result<OpticalEnvelope> {
    if !(params.mod_index > 0.0 && params.mod_index < std::f64::consts::PI) {
        return Err(Error::invalid(format!(
            "MZM mod_index must lie in (0, pi), got {}",
            params.mod_index
        )));
    }
    let peak = drive.peak();
    let scale = if peak > 0.0 {
        params.mod_index / peak
    } else {
        0.0
    };
    let samples = drive
        .samples
        .iter()
        .map(|&c| Complex64::new((scale * c).sin(), 0.0))
        .collect();
    OpticalEnvelope::new(samples, drive.sample_rate)
}

/// Frequency-domain raised-cosine sideband selection.
pub fn obpf_select(field: &OpticalEnvelope, spec: &ObpfSpec) -> Result<OpticalEnvelope> {
    spec.band.check_optical(field.sample_rate)?;
    if spec.edge_width < 0.0 {
        return Err(Error::invalid("edge_width must be >= 0".to_string()));
    }
    let out = spectral::apply_transfer_complex(&field.samples, field.sample_rate, |f| {
        Complex64::new(spectral::raised_cosine_gain(f, &spec.band, spec.edge_width), 0.0)
    });
    OpticalEnvelope::new(out, field.sample_rate)
}

/// `E_out(t) = E_in(t) * exp(j m s(t))`; preserves per-sample magnitude.
pub fn phase_modulate(
    field: &OpticalEnvelope,
    drive: &SampledSignal,
    params: &PmParams,
) -> Result<OpticalEnvelope> {
    if !(params.mod_index > 0.0) {
        return Err(Error::invalid(format!(
            "PM mod_index must be > 0, got {}",
            params.mod_index
        )));
    }
    field.check_compatible_signal(drive)?;
    let m = params.mod_index;
    let samples = field
        .samples
        .iter()
        .zip(&drive.samples)
        .map(|(&e, &s)| e * Complex64::from_polar(1.0, m * s))
        .collect();
    OpticalEnvelope::new(samples, field.sample_rate)
}

fn peak_gain_nepers(peak_gain_db: f64) -> f64 {
    (10f64.powf(peak_gain_db / 10.0)).ln()
}

/// Complex Lorentzian field response at detuning `delta` from the line
/// center, for intrinsic linewidth `linewidth` and on-peak power gain `g0`
/// (nepers): `exp[(g0/2) / (1 + 2j delta / linewidth)]`.
pub fn lorentzian_response(delta: f64, g0: f64, linewidth: f64) -> Complex64 {
    let denom = Complex64::new(1.0, 2.0 * delta / linewidth);
    (Complex64::new(g0 / 2.0, 0.0) / denom).exp()
}

/// Solves for the intrinsic Brillouin linewidth such that the amplified
/// power response falls 3 dB below its peak at `target_bw3db/2` detuning.
/// Gain narrowing makes the intrinsic linewidth wider than the effective
/// bandwidth; below ~3.01 dB peak gain the response never falls 3 dB and no
/// bracket exists.
pub fn calibrate_linewidth(params: &SbsParams) -> Result<f64> {
    if !(params.target_bw3db > 0.0) {
        return Err(Error::invalid(format!(
            "target_bw3db must be > 0, got {}",
            params.target_bw3db
        )));
    }
    if !(params.peak_gain_db > 0.0) {
        return Err(Error::invalid(format!(
            "peak_gain_db must be > 0, got {}",
            params.peak_gain_db
        )));
    }
    let g0 = peak_gain_nepers(params.peak_gain_db);
    let ln2 = std::f64::consts::LN_2;
    if g0 <= ln2 {
        return Err(Error::Numerical(format!(
            "no -3 dB point exists for peak gain {} dB (needs > {:.4} dB)",
            params.peak_gain_db,
            10.0 * 2f64.log10()
        )));
    }
    let delta = params.target_bw3db / 2.0;
    // Power response at +delta minus (peak - 3 dB), in nepers of power.
    let objective = |linewidth: f64| -> f64 {
        let resp = lorentzian_response(delta, g0, linewidth);
        2.0 * resp.norm().ln() - (g0 - ln2)
    };
    let mut lo = params.target_bw3db * 1e-3;
    let mut hi = params.target_bw3db * 1e3;
    if objective(lo) > 0.0 || objective(hi) < 0.0 {
        return Err(Error::Numerical(
            "failed to bracket the linewidth root".to_string(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if objective(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo) / hi < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Applies the Brillouin gain line to the whole record: the field spectrum
/// is multiplied by the complex Lorentzian centered at `pump_offset - bfs`
/// (the Stokes line of the unmodulated pump).
///
/// When `params.spontaneous_level > 0` and a seed is supplied, amplifier-
/// added noise shaped by the gained part of the line is injected; with the
/// default level of zero the operation is fully deterministic.
pub fn sbs_gain(
    field: &OpticalEnvelope,
    params: &SbsParams,
    pump_offset: f64,
    spont_seed: Option<u64>,
) -> Result<OpticalEnvelope> {
    if !(params.bfs > 0.0) {
        return Err(Error::invalid(format!("bfs must be > 0, got {}", params.bfs)));
    }
    let f_line = pump_offset - params.bfs;
    let fs = field.sample_rate;
    if f_line <= -fs / 2.0 || f_line >= fs / 2.0 {
        return Err(Error::BandOutOfRange(format!(
            "gain line at {f_line} Hz lies outside (-{}, {})",
            fs / 2.0,
            fs / 2.0
        )));
    }
    if params.peak_gain_db == 0.0 {
        return Ok(field.clone());
    }
    let g0 = peak_gain_nepers(params.peak_gain_db);
    let linewidth = calibrate_linewidth(params)?;

    let n = field.len();
    let mut buf = field.samples.clone();
    spectral::fft_forward(&mut buf);

    let mut gains: Vec<Complex64> = Vec::with_capacity(n);
    for k in 0..n {
        let f = spectral::bin_frequency(k, n, fs);
        gains.push(lorentzian_response(f - f_line, g0, linewidth));
    }
    for (z, g) in buf.iter_mut().zip(&gains) {
        *z *= g;
    }

    if params.spontaneous_level > 0.0 {
        if let Some(seed) = spont_seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let amp = params.spontaneous_level * (n as f64).sqrt();
            for (z, g) in buf.iter_mut().zip(&gains) {
                let excess = (g.norm_sqr() - 1.0).max(0.0);
                if excess > 0.0 {
                    let w = Complex64::new(
                        StandardNormal.sample(&mut rng),
                        StandardNormal.sample(&mut rng),
                    ) * std::f64::consts::FRAC_1_SQRT_2;
                    *z += amp * excess.sqrt() * w;
                }
            }
        }
    }

    spectral::fft_inverse(&mut buf);
    OpticalEnvelope::new(buf, fs)
}

/// Square-law photodetection with unit responsivity: `y = |E|^2` with the
/// DC term removed.
pub fn photodetect(field: &OpticalEnvelope) -> SampledSignal {
    let mut samples: Vec<f64> = field.samples.iter().map(|z| z.norm_sqr()).collect();
    if !samples.is_empty() {
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        for x in &mut samples {
            *x -= mean;
        }
    }
    SampledSignal {
        samples,
        sample_rate: field.sample_rate,
        t0: 0.0,
    }
}

/// Zero-phase raised-cosine electrical band-pass filter.
pub fn electrical_bpf(signal: &SampledSignal, spec: &BpfSpec) -> Result<SampledSignal> {
    spec.band.check_electrical(signal.sample_rate)?;
    if spec.edge_width < 0.0 {
        return Err(Error::invalid("edge_width must be >= 0".to_string()));
    }
    let out = spectral::apply_mask_real(&signal.samples, signal.sample_rate, |f| {
        spectral::raised_cosine_gain(f, &spec.band, spec.edge_width)
    });
    SampledSignal::new(out, signal.sample_rate, signal.t0)
}

/// Passband center of the microwave filter for a given control frequency:
/// `|bfs - f_ctrl|` when the negative MZM sideband is selected and
/// `bfs + f_ctrl` when the positive one is.
pub fn mpf_center_frequency(f_ctrl: f64, bfs: f64, sideband_sign: SidebandSign) -> f64 {
    match sideband_sign {
        SidebandSign::Negative => (bfs - f_ctrl).abs(),
        SidebandSign::Positive => bfs + f_ctrl,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 64e9;

    /// Bessel function of the first kind by power series (test oracle).
    fn bessel_j(order: u32, x: f64) -> f64 {
        let mut sum = 0.0;
        let half = x / 2.0;
        for m in 0..30u32 {
            let mut term = 1.0;
            for i in 1..=m {
                term *= half / i as f64;
            }
            for i in 1..=(m + order) {
                term *= half / i as f64;
            }
            if m % 2 == 1 {
                term = -term;
            }
            sum += term;
        }
        sum
    }

    fn tone_drive(freq: f64, n: usize, amplitude: f64) -> SampledSignal {
        let samples = (0..n)
            .map(|i| amplitude * (2.0 * std::f64::consts::PI * freq * i as f64 / FS).cos())
            .collect();
        SampledSignal::new(samples, FS, 0.0).unwrap()
    }

    fn complex_tone(freq: f64, n: usize, amplitude: f64) -> OpticalEnvelope {
        let samples = (0..n)
            .map(|i| {
                Complex64::from_polar(amplitude, 2.0 * std::f64::consts::PI * freq * i as f64 / FS)
            })
            .collect();
        OpticalEnvelope::new(samples, FS).unwrap()
    }

    /// |X_k|/N at the bin nearest `freq` (signed frequency).
    fn line_amplitude(env: &OpticalEnvelope, freq: f64) -> f64 {
        let n = env.len();
        let mut buf = env.samples.clone();
        spectral::fft_forward(&mut buf);
        let step = env.sample_rate / n as f64;
        let k = ((freq / step).round() as isize).rem_euclid(n as isize) as usize;
        buf[k].norm() / n as f64
    }

    #[test]
    fn mzm_zero_drive_gives_zero_field() {
        let drive = SampledSignal::new(vec![0.0; 1024], FS, 0.0).unwrap();
        let field = mzm_csdsb(&drive, &MzmParams::default()).unwrap();
        assert!(field.samples.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn mzm_first_sideband_matches_bessel_oracle() {
        // sin(m cos w t) = 2 J1(m) cos(w t) - 2 J3(m) cos(3 w t) + ...
        let drive = tone_drive(1.0e9, 64_000, 1.0);
        let field = mzm_csdsb(&drive, &MzmParams { mod_index: 0.5 }).unwrap();
        let a1 = line_amplitude(&field, 1.0e9);
        let expected = bessel_j(1, 0.5);
        assert!(
            (a1 - expected).abs() / expected < 0.01,
            "got {a1}, expected {expected}"
        );
    }

    #[test]
    fn mzm_carrier_and_even_orders_suppressed() {
        let drive = tone_drive(1.0e9, 64_000, 1.0);
        let field = mzm_csdsb(&drive, &MzmParams { mod_index: 0.5 }).unwrap();
        let first = line_amplitude(&field, 1.0e9);
        let carrier = line_amplitude(&field, 0.0);
        let second = line_amplitude(&field, 2.0e9);
        assert!(20.0 * (carrier / first).log10() < -60.0);
        assert!(20.0 * (second / first).log10() < -60.0);
        // Third-order line is real and matches J3.
        let third = line_amplitude(&field, 3.0e9);
        let expected = bessel_j(3, 0.5);
        assert!((third - expected).abs() / expected < 0.01);
    }

    #[test]
    fn obpf_selects_single_sideband() {
        let drive = tone_drive(13.9e9, 64_000, 1.0);
        let field = mzm_csdsb(&drive, &MzmParams { mod_index: 0.5 }).unwrap();
        let spec = ObpfSpec {
            band: Band::new(10.0e9, 20.0e9).unwrap(),
            edge_width: 50e6,
        };
        let out = obpf_select(&field, &spec).unwrap();
        let kept = line_amplitude(&out, 13.9e9);
        let image = line_amplitude(&out, -13.9e9);
        assert!((kept - bessel_j(1, 0.5)).abs() / bessel_j(1, 0.5) < 0.01);
        assert!(20.0 * (image / kept).log10() < -80.0, "image {}", image / kept);
    }

    #[test]
    fn obpf_allpass_is_identity() {
        let field = complex_tone(3.0e9, 4096, 0.8);
        let spec = ObpfSpec {
            band: Band::new(-31.9e9, 31.9e9).unwrap(),
            edge_width: 0.0,
        };
        let out = obpf_select(&field, &spec).unwrap();
        for (a, b) in field.samples.iter().zip(&out.samples) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn obpf_rejects_band_outside_support() {
        let field = complex_tone(3.0e9, 4096, 1.0);
        let spec = ObpfSpec {
            band: Band::new(10.0e9, 12.0e9).unwrap(),
            edge_width: 0.0,
        };
        let out = obpf_select(&field, &spec).unwrap();
        assert!(out.mean_power() < 1e-8 * field.mean_power());
    }

    #[test]
    fn pm_zero_drive_is_identity_and_magnitude_preserved() {
        let field = complex_tone(-13.9e9, 4096, 0.7);
        let zero = SampledSignal::new(vec![0.0; 4096], FS, 0.0).unwrap();
        let out = phase_modulate(&field, &zero, &PmParams::default()).unwrap();
        assert_eq!(out.samples, field.samples);

        let drive = tone_drive(3.0e9, 4096, 1.0);
        let out = phase_modulate(&field, &drive, &PmParams { mod_index: 0.8 }).unwrap();
        for (a, b) in field.samples.iter().zip(&out.samples) {
            // Unit-modulus rotation preserves magnitude to the last ulp.
            assert!((a.norm() - b.norm()).abs() <= 1e-15 * a.norm());
        }
    }

    #[test]
    fn pm_sideband_ratio_matches_bessel_oracle() {
        // Carrier at DC, tone drive: sideband/carrier = J1(m)/J0(m).
        let n = 64_000;
        let carrier =
            OpticalEnvelope::new(vec![Complex64::new(1.0, 0.0); n], FS).unwrap();
        let drive = tone_drive(3.0e9, n, 1.0);
        let m = 0.3;
        let out = phase_modulate(&carrier, &drive, &PmParams { mod_index: m }).unwrap();
        let ratio = line_amplitude(&out, 3.0e9) / line_amplitude(&out, 0.0);
        let expected = bessel_j(1, m) / bessel_j(0, m);
        assert!(
            (ratio - expected).abs() / expected < 0.01,
            "got {ratio}, expected {expected}"
        );
    }

    #[test]
    fn linewidth_solution_matches_closed_form() {
        let params = SbsParams::default();
        let lw = calibrate_linewidth(&params).unwrap();
        let g0 = peak_gain_nepers(params.peak_gain_db);
        let expected =
            params.target_bw3db * ((g0 - std::f64::consts::LN_2) / std::f64::consts::LN_2).sqrt();
        assert!(
            (lw - expected).abs() / expected < 1e-6,
            "got {lw}, expected {expected}"
        );
        // Gain narrowing: intrinsic linewidth is wider than the target.
        assert!(lw > params.target_bw3db);
    }

    #[test]
    fn linewidth_forward_check_hits_minus_3db() {
        let params = SbsParams::default();
        let lw = calibrate_linewidth(&params).unwrap();
        let g0 = peak_gain_nepers(params.peak_gain_db);
        let peak_db = 10.0 * (lorentzian_response(0.0, g0, lw).norm_sqr()).log10();
        for sign in [-1.0, 1.0] {
            let resp = lorentzian_response(sign * params.target_bw3db / 2.0, g0, lw);
            let level_db = 10.0 * resp.norm_sqr().log10();
            assert!(
                (peak_db - level_db - 3.0103).abs() < 0.01,
                "at {sign}: {level_db} vs peak {peak_db}"
            );
        }
    }

    #[test]
    fn linewidth_rejects_pathological_parameters() {
        let mut params = SbsParams::default();
        params.target_bw3db = 0.0;
        assert!(calibrate_linewidth(&params).is_err());
        let mut params = SbsParams::default();
        params.peak_gain_db = 2.0; // below the 3.01 dB existence threshold
        assert!(calibrate_linewidth(&params).is_err());
    }

    #[test]
    fn sbs_gain_on_resonance_tone() {
        let params = SbsParams::default();
        let n = 256_000;
        let tone = complex_tone(-params.bfs, n, 1.0);
        let out = sbs_gain(&tone, &params, 0.0, None).unwrap();
        let gain_db = 10.0 * (out.mean_power() / tone.mean_power()).log10();
        assert!(
            (gain_db - params.peak_gain_db).abs() < 0.01,
            "gain {gain_db}"
        );
    }

    #[test]
    fn sbs_gain_half_bandwidth_is_3db_down() {
        let params = SbsParams::default();
        let n = 256_000;
        // 11.25 MHz = 45 bins at 250 kHz resolution.
        let tone = complex_tone(-params.bfs + params.target_bw3db / 2.0, n, 1.0);
        let out = sbs_gain(&tone, &params, 0.0, None).unwrap();
        let gain_db = 10.0 * (out.mean_power() / tone.mean_power()).log10();
        assert!(
            (gain_db - (params.peak_gain_db - 3.0103)).abs() < 0.05,
            "gain {gain_db}"
        );
    }

    #[test]
    fn sbs_gain_far_off_resonance_is_negligible() {
        let params = SbsParams::default();
        let n = 64_000;
        let tone = complex_tone(-params.bfs + 1.0e9, n, 1.0);
        let out = sbs_gain(&tone, &params, 0.0, None).unwrap();
        let gain_db = 10.0 * (out.mean_power() / tone.mean_power()).log10();
        assert!(gain_db.abs() < 0.1, "gain {gain_db}");
    }

    #[test]
    fn sbs_gain_is_linear_and_shift_invariant() {
        use rand::Rng;
        let params = SbsParams::default();
        let n = 8192;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mk = |rng: &mut ChaCha8Rng| {
            let samples: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            OpticalEnvelope::new(samples, FS).unwrap()
        };
        let x = mk(&mut rng);
        let y = mk(&mut rng);
        let combo_in = OpticalEnvelope::new(
            x.samples
                .iter()
                .zip(&y.samples)
                .map(|(a, b)| 0.3 * a + 0.7 * b)
                .collect(),
            FS,
        )
        .unwrap();
        let lhs = sbs_gain(&combo_in, &params, 0.0, None).unwrap();
        let gx = sbs_gain(&x, &params, 0.0, None).unwrap();
        let gy = sbs_gain(&y, &params, 0.0, None).unwrap();
        let scale: f64 = lhs.samples.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut err = 0.0;
        for i in 0..n {
            err += (lhs.samples[i] - (0.3 * gx.samples[i] + 0.7 * gy.samples[i])).norm_sqr();
        }
        assert!(err.sqrt() / scale < 1e-10, "linearity error {}", err.sqrt() / scale);

        // Circular shift commutes with the gain.
        let shift = 1234;
        let mut shifted = x.samples.clone();
        shifted.rotate_right(shift);
        let shifted_in = OpticalEnvelope::new(shifted, FS).unwrap();
        let out_shifted = sbs_gain(&shifted_in, &params, 0.0, None).unwrap();
        let mut expected = gx.samples.clone();
        expected.rotate_right(shift);
        let mut err = 0.0;
        for i in 0..n {
            err += (out_shifted.samples[i] - expected[i]).norm_sqr();
        }
        assert!(err.sqrt() / scale < 1e-10, "shift error {}", err.sqrt() / scale);
    }

    #[test]
    fn sbs_zero_gain_is_passthrough() {
        let mut params = SbsParams::default();
        params.peak_gain_db = 0.0;
        let tone = complex_tone(-10.8e9, 4096, 1.0);
        let out = sbs_gain(&tone, &params, 0.0, None).unwrap();
        assert_eq!(out.samples, tone.samples);
    }

    #[test]
    fn sbs_line_outside_nyquist_rejected() {
        let mut params = SbsParams::default();
        params.bfs = 40e9;
        let tone = complex_tone(-10.8e9, 4096, 1.0);
        assert!(sbs_gain(&tone, &params, 0.0, None).is_err());
    }

    #[test]
    fn spontaneous_noise_requires_level_and_seed() {
        let params = SbsParams::default();
        let tone = complex_tone(-10.8e9, 8192, 1.0);
        let a = sbs_gain(&tone, &params, 0.0, Some(1)).unwrap();
        let b = sbs_gain(&tone, &params, 0.0, None).unwrap();
        assert_eq!(a.samples, b.samples, "zero level must stay deterministic");

        let mut noisy_params = params;
        noisy_params.spontaneous_level = 1e-3;
        let c = sbs_gain(&tone, &noisy_params, 0.0, Some(1)).unwrap();
        let d = sbs_gain(&tone, &noisy_params, 0.0, Some(1)).unwrap();
        assert_eq!(c.samples, d.samples, "same seed must reproduce");
        assert_ne!(c.samples, b.samples);
    }

    #[test]
    fn photodetect_constant_field_is_zero() {
        let field = OpticalEnvelope::new(vec![Complex64::new(0.8, 0.3); 1000], FS).unwrap();
        let out = photodetect(&field);
        assert!(out.samples.iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn photodetect_two_tone_beat_oracle() {
        // Two lines a, b at f1, f2: beat tone at |f1-f2| with mean-square
        // power 2(ab)^2.
        let n = 64_000;
        let (a, b) = (0.9, 0.4);
        let f1 = -10.8e9;
        let f2 = -7.8e9;
        let samples: Vec<Complex64> = (0..n)
            .map(|i| {
                let t = i as f64 / FS;
                Complex64::from_polar(a, 2.0 * std::f64::consts::PI * f1 * t)
                    + Complex64::from_polar(b, 2.0 * std::f64::consts::PI * f2 * t)
            })
            .collect();
        let field = OpticalEnvelope::new(samples, FS).unwrap();
        let out = photodetect(&field);
        let p_beat = spectral::power_at_frequency(&out, (f1 - f2).abs());
        let expected = 2.0 * (a * b) * (a * b);
        assert!(
            (p_beat - expected).abs() / expected < 1e-6,
            "got {p_beat}, expected {expected}"
        );
        // Pre-DC-removal values are nonnegative by construction.
        let min = out
            .samples
            .iter()
            .fold(f64::INFINITY, |m, &x| m.min(x + field.mean_power()));
        assert!(min > -1e-12);
    }

    #[test]
    fn bpf_passes_in_band_and_rejects_out_of_band() {
        let spec = BpfSpec::default();
        let in_tone = tone_drive(3.0e9, 64_000, 1.0);
        let out = electrical_bpf(&in_tone, &spec).unwrap();
        let gain_db =
            10.0 * (out.mean_square() / in_tone.mean_square()).log10();
        assert!(gain_db.abs() < 0.1, "in-band gain {gain_db}");

        let out_tone = tone_drive(2.0e9, 64_000, 1.0);
        let rejected = electrical_bpf(&out_tone, &spec).unwrap();
        let att_db = 10.0 * (rejected.mean_square() / out_tone.mean_square()).log10();
        assert!(att_db < -60.0, "attenuation {att_db}");

        let zero = SampledSignal::new(vec![0.0; 1024], FS, 0.0).unwrap();
        let out = electrical_bpf(&zero, &spec).unwrap();
        assert!(out.samples.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn filters_idempotent_on_passband_content() {
        let spec = BpfSpec::default();
        let sig = tone_drive(3.0e9, 16_384, 1.0);
        let once = electrical_bpf(&sig, &spec).unwrap();
        let twice = electrical_bpf(&once, &spec).unwrap();
        let num: f64 = once
            .samples
            .iter()
            .zip(&twice.samples)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let den: f64 = once.samples.iter().map(|x| x * x).sum();
        assert!((num / den).sqrt() < 1e-10);

        // Integer-cycle tone: no leakage into the taper region, where a
        // raised-cosine mask is intentionally not idempotent.
        let field = complex_tone(-13.9e9, 64_000, 1.0);
        let ospec = ObpfSpec {
            band: Band::new(-16.8e9, -10.9e9).unwrap(),
            edge_width: 50e6,
        };
        let once = obpf_select(&field, &ospec).unwrap();
        let twice = obpf_select(&once, &ospec).unwrap();
        let num: f64 = once
            .samples
            .iter()
            .zip(&twice.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = once.samples.iter().map(|z| z.norm_sqr()).sum();
        assert!((num / den).sqrt() < 1e-10);
    }

    #[test]
    fn mpf_center_frequency_mapping() {
        let bfs = 10.8e9;
        assert_eq!(
            mpf_center_frequency(11.8e9, bfs, SidebandSign::Negative),
            1.0e9
        );
        assert_eq!(
            mpf_center_frequency(15.3e9, bfs, SidebandSign::Negative),
            4.5e9
        );
        assert_eq!(
            mpf_center_frequency(10.8e9, bfs, SidebandSign::Negative),
            0.0
        );
        assert_eq!(
            mpf_center_frequency(2.5e9, bfs, SidebandSign::Positive),
            13.3e9
        );
    }
}
