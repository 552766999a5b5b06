//! Quantitative evaluation: normalized waveform MSE with lag/gain alignment,
//! short-time Fourier spectrograms, and binary phase recovery.

use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::signal::{Band, SampledSignal};
use crate::spectral;

/// Normalized mean-square error between `candidate` and `reference`.
///
/// The candidate is first aligned by the integer circular lag maximizing the
/// magnitude of the cross-correlation, then scaled by the least-squares gain
/// `alpha = <c,r>/<c,c>`; the result is `sum((alpha*c - r)^2) / sum(r^2)`.
/// Lengths may differ by up to 1% (the comparison is trimmed to the shorter
/// record after alignment).
pub fn mse(candidate: &SampledSignal, reference: &SampledSignal) -> Result<f64> {
    if candidate.sample_rate != reference.sample_rate {
        return Err(Error::Mismatch(format!(
            "sample rate {} vs {}",
            candidate.sample_rate, reference.sample_rate
        )));
    }
    let (lc, lr) = (candidate.len(), reference.len());
    let lmax = lc.max(lr);
    let lmin = lc.min(lr);
    if lmax == 0 || (lmax - lmin) as f64 > 0.01 * lmax as f64 {
        return Err(Error::Mismatch(format!(
            "record lengths {lc} and {lr} differ by more than 1%"
        )));
    }
    let ref_energy: f64 = reference.samples.iter().map(|x| x * x).sum();
    if ref_energy <= 0.0 {
        return Err(Error::Degenerate("reference has zero energy".to_string()));
    }

    // Circular cross-correlation via FFT on zero-padded records.
    let n = lmax;
    let mut a: Vec<Complex64> = candidate
        .samples
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(n)
        .collect();
    let mut b: Vec<Complex64> = reference
        .samples
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(n)
        .collect();
    spectral::fft_forward(&mut a);
    spectral::fft_forward(&mut b);
    // c[l] = sum_m candidate[m+l] * reference[m]
    for (za, zb) in a.iter_mut().zip(&b) {
        *za *= zb.conj();
    }
    spectral::fft_inverse(&mut a);
    let peak = a.iter().map(|z| z.re.abs()).fold(0.0_f64, f64::max);
    // Ties (periodic records) resolve to the smallest circular shift.
    let best_lag = a
        .iter()
        .enumerate()
        .filter(|(_, z)| z.re.abs() >= peak * (1.0 - 1e-12))
        .map(|(i, _)| i)
        .min_by_key(|&i| i.min(n - i))
        .unwrap_or(0);

    // Candidate sample that aligns with reference[i] is candidate[i + lag].
    let cand = &candidate.samples;
    let aligned = |i: usize| cand[(i + best_lag) % cand.len().max(1)];

    let mut cc = 0.0;
    let mut cr = 0.0;
    for i in 0..lmin {
        let c = aligned(i);
        cc += c * c;
        cr += c * reference.samples[i];
    }
    if cc <= 0.0 {
        return Ok(1.0);
    }
    let alpha = cr / cc;
    let mut err = 0.0;
    let mut rr = 0.0;
    for i in 0..lmin {
        let d = alpha * aligned(i) - reference.samples[i];
        err += d * d;
        rr += reference.samples[i] * reference.samples[i];
    }
    Ok(err / rr)
}

/// Summary statistic for sweep tables: `10*log10(mse_before / mse_after)`.
/// Returns `f64::INFINITY` when the filtered error vanished entirely.
pub fn mse_improvement(mse_before: f64, mse_after: f64) -> Result<f64> {
    if mse_before <= 0.0 {
        return Err(Error::Degenerate(format!(
            "mse_before must be > 0, got {mse_before}"
        )));
    }
    if mse_after <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (mse_before / mse_after).log10())
}

/// Short-time power spectrogram (Hann window, one-sided bins).
///
/// The per-frame bin powers are scaled so that their sum equals the windowed
/// frame energy (Parseval); `magnitudes_db` stores them in dB.
#[derive(Debug, Clone)]
pub struct Spectrogram {
    /// frame-major: magnitudes_db[frame][bin]
    pub magnitudes_db: Vec<Vec<f64>>,
    pub frame_times: Vec<f64>,
    pub bin_freqs: Vec<f64>,
    pub window_len: usize,
    pub hop: usize,
}

const DB_FLOOR: f64 = 1e-30;

pub fn spectrogram(signal: &SampledSignal, window_len: usize, hop: usize) -> Result<Spectrogram> {
    if window_len == 0 || window_len > signal.len() {
        return Err(Error::invalid(format!(
            "window_len {window_len} must be in [1, {}]",
            signal.len()
        )));
    }
    if hop == 0 {
        return Err(Error::invalid("hop must be >= 1".to_string()));
    }
    let n = window_len;
    let fs = signal.sample_rate;
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos()))
        .collect();
    let n_bins = n / 2 + 1;
    let bin_freqs: Vec<f64> = (0..n_bins).map(|k| k as f64 * fs / n as f64).collect();

    let mut magnitudes_db = Vec::new();
    let mut frame_times = Vec::new();
    let mut start = 0usize;
    while start + n <= signal.len() {
        let mut buf: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(signal.samples[start + i] * window[i], 0.0))
            .collect();
        spectral::fft_forward(&mut buf);
        let mut row = Vec::with_capacity(n_bins);
        for (k, freq) in bin_freqs.iter().enumerate() {
            let mut p = buf[k].norm_sqr();
            let mirror = (n - k) % n;
            if mirror != k {
                p += buf[mirror].norm_sqr();
            }
            let _ = freq;
            row.push(10.0 * (p / n as f64 + DB_FLOOR).log10());
        }
        magnitudes_db.push(row);
        frame_times.push(signal.t0 + (start as f64 + n as f64 / 2.0) / fs);
        start += hop;
    }
    Ok(Spectrogram {
        magnitudes_db,
        frame_times,
        bin_freqs,
        window_len,
        hop,
    })
}

impl Spectrogram {
    /// Restricts the stored bins to a display band.
    pub fn crop(&self, band: &Band) -> Spectrogram {
        let keep: Vec<usize> = self
            .bin_freqs
            .iter()
            .enumerate()
            .filter(|(_, f)| band.contains(**f))
            .map(|(k, _)| k)
            .collect();
        Spectrogram {
            magnitudes_db: self
                .magnitudes_db
                .iter()
                .map(|row| keep.iter().map(|&k| row[k]).collect())
                .collect(),
            frame_times: self.frame_times.clone(),
            bin_freqs: keep.iter().map(|&k| self.bin_freqs[k]).collect(),
            window_len: self.window_len,
            hop: self.hop,
        }
    }

    /// Per-frame ridge frequency: the peak bin refined by parabolic
    /// interpolation on the dB values, restricted to `band` when given.
    pub fn ridge(&self, band: Option<&Band>) -> Vec<f64> {
        let idx: Vec<usize> = self
            .bin_freqs
            .iter()
            .enumerate()
            .filter(|(_, f)| band.map_or(true, |b| b.contains(**f)))
            .map(|(k, _)| k)
            .collect();
        let df = if self.bin_freqs.len() > 1 {
            self.bin_freqs[1] - self.bin_freqs[0]
        } else {
            0.0
        };
        self.magnitudes_db
            .iter()
            .map(|row| {
                let &k_peak = idx
                    .iter()
                    .max_by(|&&a, &&b| row[a].total_cmp(&row[b]))
                    .unwrap_or(&0);
                let mut f = self.bin_freqs[k_peak];
                if k_peak > 0 && k_peak + 1 < row.len() {
                    let (ym, y0, yp) = (row[k_peak - 1], row[k_peak], row[k_peak + 1]);
                    let denom = ym - 2.0 * y0 + yp;
                    if denom.abs() > 1e-12 {
                        let shift = 0.5 * (ym - yp) / denom;
                        if shift.abs() <= 1.0 {
                            f += shift * df;
                        }
                    }
                }
                f
            })
            .collect()
    }
}

/// Coherent BPSK phase recovery: demodulates at `carrier`, reads the
/// instantaneous complex baseband at each bit center (oscilloscope-style
/// readout, no integration gain), and maps each phase to the nearer of
/// {0, pi} relative to the first bit.
///
/// Returns the per-bit phase relative to the first bit (radians in
/// (-pi, pi]) and the hard decisions (first bit pinned to 0).
pub fn recover_bpsk_phase(
    signal: &SampledSignal,
    carrier: f64,
    bit_duration: f64,
) -> Result<(Vec<f64>, Vec<u8>)> {
    let fs = signal.sample_rate;
    let bit_samples_f = bit_duration * fs;
    let bit_samples = bit_samples_f.round() as usize;
    if bit_samples == 0 || (bit_samples_f - bit_samples as f64).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "bit duration {bit_duration} is not an integer number of samples"
        )));
    }
    if signal.len() % bit_samples != 0 {
        return Err(Error::invalid(format!(
            "record length {} is not an integer number of {}-sample bits",
            signal.len(),
            bit_samples
        )));
    }
    let n_bits = signal.len() / bit_samples;
    if n_bits == 0 {
        return Err(Error::Degenerate("empty record".to_string()));
    }
    let analytic = spectral::analytic_signal(&signal.samples);
    let mut phases_abs = Vec::with_capacity(n_bits);
    for bit in 0..n_bits {
        let idx = bit * bit_samples + bit_samples / 2;
        let t = idx as f64 / fs;
        let baseband = analytic[idx] * Complex64::from_polar(1.0, -2.0 * PI * carrier * t);
        phases_abs.push(baseband.arg());
    }
    let reference = phases_abs[0];
    let mut phases = Vec::with_capacity(n_bits);
    let mut bits = Vec::with_capacity(n_bits);
    for &p in &phases_abs {
        let mut d = p - reference;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d <= -PI {
            d += 2.0 * PI;
        }
        phases.push(d);
        bits.push(u8::from(d.abs() > PI / 2.0));
    }
    Ok((phases, bits))
}

/// Bit errors between recovered decisions and a reference code, resolving
/// the global BPSK sign ambiguity (the smaller of the two Hamming distances).
pub fn bit_errors(decisions: &[u8], code: &[u8]) -> usize {
    let direct = decisions
        .iter()
        .zip(code)
        .filter(|(a, b)| a != b)
        .count();
    direct.min(code.len() - direct)
}

/// Max over circular lags of |<a_shifted, b>| / (|a| |b|), on records
/// zero-padded to a common length.
pub fn normalized_peak_correlation(a: &SampledSignal, b: &SampledSignal) -> f64 {
    let n = a.len().max(b.len());
    if n == 0 {
        return 0.0;
    }
    let pad = |s: &SampledSignal| -> Vec<Complex64> {
        s.samples
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
            .take(n)
            .collect()
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    spectral::fft_forward(&mut fa);
    spectral::fft_forward(&mut fb);
    for (za, zb) in fa.iter_mut().zip(&fb) {
        *za = za.conj() * *zb;
    }
    spectral::fft_inverse(&mut fa);
    let best = fa.iter().map(|z| z.re.abs()).fold(0.0_f64, f64::max);
    let na: f64 = a.samples.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.samples.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    best / (na * nb)
}
