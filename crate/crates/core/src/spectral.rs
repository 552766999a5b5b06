//! FFT plumbing shared by the filter chain and the metrics: cached planners,
//! analytic-signal construction, raised-cosine band masks, and band-power
//! integration.

use std::sync::Mutex;

use once_cell::sync::Lazy;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::Result;
use crate::signal::{Band, SampledSignal};

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.lock().unwrap().plan_fft_forward(n)
}

fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.lock().unwrap().plan_fft_inverse(n)
}

/// In-place forward DFT (unnormalized).
pub fn fft_forward(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    plan_forward(buf.len()).process(buf);
}

/// In-place inverse DFT including the 1/N normalization.
pub fn fft_inverse(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let n = buf.len();
    plan_inverse(n).process(buf);
    let scale = 1.0 / n as f64;
    for z in buf.iter_mut() {
        *z *= scale;
    }
}

/// Frequency of DFT bin `k` for an `n`-point transform at `sample_rate`,
/// mapped to (-fs/2, fs/2].
pub fn bin_frequency(k: usize, n: usize, sample_rate: f64) -> f64 {
    let k = k as isize;
    let n_i = n as isize;
    let idx = if k <= n_i / 2 { k } else { k - n_i };
    idx as f64 * sample_rate / n as f64
}

/// Spectrum of a real record (full two-sided, unnormalized).
pub fn spectrum_of_real(signal: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_forward(&mut buf);
    buf
}

/// Analytic signal via the frequency-domain Hilbert transform: the result's
/// real part equals the input and its spectrum is one-sided.
pub fn analytic_signal(signal: &[f64]) -> Vec<Complex64> {
    let n = signal.len();
    if n == 0 {
        return Vec::new();
    }
    let mut buf = spectrum_of_real(signal);
    let half = n / 2;
    for (k, z) in buf.iter_mut().enumerate() {
        if k == 0 || (n % 2 == 0 && k == half) {
            // DC and (even-length) Nyquist bins stay as-is.
        } else if k < half || (n % 2 == 1 && k == half) {
            *z *= 2.0;
        } else {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    fft_inverse(&mut buf);
    buf
}

/// Raised-cosine amplitude mask: unity inside `band`, cosine taper to zero
/// over `edge_width` outside each edge, zero beyond.
pub fn raised_cosine_gain(f: f64, band: &Band, edge_width: f64) -> f64 {
    if f >= band.f_low && f <= band.f_high {
        return 1.0;
    }
    if edge_width <= 0.0 {
        return 0.0;
    }
    let d = if f < band.f_low {
        band.f_low - f
    } else {
        f - band.f_high
    };
    if d >= edge_width {
        0.0
    } else {
        0.5 * (1.0 + (std::f64::consts::PI * d / edge_width).cos())
    }
}

/// Applies a complex transfer function `h(f)` to a complex envelope via one
/// forward/inverse transform pair.
pub fn apply_transfer_complex(
    samples: &[Complex64],
    sample_rate: f64,
    mut h: impl FnMut(f64) -> Complex64,
) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    fft_forward(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        *z *= h(bin_frequency(k, n, sample_rate));
    }
    fft_inverse(&mut buf);
    buf
}

/// Applies a real, symmetric amplitude mask `g(|f|)` to a real record
/// (zero-phase filtering). Returns the filtered real record.
pub fn apply_mask_real(
    samples: &[f64],
    sample_rate: f64,
    mut g: impl FnMut(f64) -> f64,
) -> Vec<f64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_forward(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        *z *= g(bin_frequency(k, n, sample_rate).abs());
    }
    fft_inverse(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Mean-square power of the signal component inside `band`, by Parseval
/// integration over the full record (both spectral half-planes).
pub fn band_power(signal: &SampledSignal, band: &Band) -> Result<f64> {
    band.check_electrical(signal.sample_rate)?;
    let n = signal.len();
    if n == 0 {
        return Ok(0.0);
    }
    let spec = spectrum_of_real(&signal.samples);
    let mut acc = 0.0;
    for (k, z) in spec.iter().enumerate() {
        let f = bin_frequency(k, n, signal.sample_rate).abs();
        if band.contains(f) {
            acc += z.norm_sqr();
        }
    }
    Ok(acc / (n as f64 * n as f64))
}

/// Power spectral sample |X_k|^2 / N^2 at the bin nearest `freq`.
pub fn power_at_frequency(signal: &SampledSignal, freq: f64) -> f64 {
    let n = signal.len();
    if n == 0 {
        return 0.0;
    }
    let spec = spectrum_of_real(&signal.samples);
    let step = signal.sample_rate / n as f64;
    let k = (freq / step).round() as usize % n;
    // Count the mirrored bin as well so a real tone of amplitude A reads A^2/2.
    let k_neg = if k == 0 { 0 } else { n - k };
    let mut p = spec[k].norm_sqr();
    if k_neg != k {
        p += spec[k_neg].norm_sqr();
    }
    p / (n as f64 * n as f64)
}
