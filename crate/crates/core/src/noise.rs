//! Band-limited additive Gaussian white noise calibrated to a target
//! in-band SNR, plus the matching in-band power and SNR measurements.
//!
//! The in-band SNR convention follows the electrical band-pass filter: both
//! signal and noise power are integrated over the same band, and the noise
//! is band-limited with a brick-wall spectral mask so the calibration is
//! exact by construction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{Band, SampledSignal};
use crate::spectral;

/// Mean-square power of the signal component inside `band` (Parseval
/// integration over the full record).
pub fn inband_power(signal: &SampledSignal, band: &Band) -> Result<f64> {
    spectral::band_power(signal, band)
}

/// Generates a Gaussian noise record limited to `band` and scaled so that
/// `inband_power(signal) / inband_power(noise) = 10^(target_snr_db/10)`.
/// Deterministic for a given seed.
pub fn calibrated_awgn(
    signal: &SampledSignal,
    band: &Band,
    target_snr_db: f64,
    seed: u64,
) -> Result<SampledSignal> {
    band.check_electrical(signal.sample_rate)?;
    let p_signal = inband_power(signal, band)?;
    if p_signal <= 0.0 {
        return Err(Error::Degenerate(
            "signal has zero in-band power".to_string(),
        ));
    }
    let n = signal.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0))
        .collect();
    spectral::fft_forward(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        let f = spectral::bin_frequency(k, n, signal.sample_rate).abs();
        if !band.contains(f) {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    spectral::fft_inverse(&mut buf);
    let mut noise: Vec<f64> = buf.into_iter().map(|z| z.re).collect();

    let p_noise_raw = noise.iter().map(|x| x * x).sum::<f64>() / n as f64;
    if p_noise_raw <= 0.0 {
        return Err(Error::Degenerate("noise mask produced no power".to_string()));
    }
    let p_noise_target = p_signal / 10f64.powf(target_snr_db / 10.0);
    let scale = (p_noise_target / p_noise_raw).sqrt();
    for x in &mut noise {
        *x *= scale;
    }
    SampledSignal::new(noise, signal.sample_rate, signal.t0)
}

/// In-band SNR of `noisy` relative to `clean`:
/// `10*log10(inband_power(clean) / inband_power(noisy - clean))`.
/// Returns `f64::INFINITY` when the two records are identical.
pub fn measure_snr(clean: &SampledSignal, noisy: &SampledSignal, band: &Band) -> Result<f64> {
    clean.check_compatible(noisy)?;
    let p_clean = inband_power(clean, band)?;
    if p_clean <= 0.0 {
        return Err(Error::Degenerate("clean record has zero in-band power".to_string()));
    }
    let diff: Vec<f64> = noisy
        .samples
        .iter()
        .zip(&clean.samples)
        .map(|(a, b)| a - b)
        .collect();
    let diff_sig = SampledSignal::new(diff, clean.sample_rate, clean.t0)?;
    let p_noise = inband_power(&diff_sig, band)?;
    if p_noise <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (p_clean / p_noise).log10())
}
