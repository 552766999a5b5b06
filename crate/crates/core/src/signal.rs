//! Sampled-signal containers: real electrical waveforms, complex optical
//! envelopes, and frequency bands.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled real-valued electrical waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub samples: Vec<f64>,
    /// Sample rate in Hz.
    pub sample_rate: f64,
    /// Start time of the first sample in seconds.
    pub t0: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, sample_rate: f64, t0: f64) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::invalid(format!(
                "sample_rate must be positive and finite, got {sample_rate}"
            )));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("signal contains NaN or Inf"));
        }
        Ok(Self {
            samples,
            sample_rate,
            t0,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Record duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Mean-square value of the record.
    pub fn mean_square(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64
    }

    /// Largest absolute sample value.
    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
    }

    /// Sample-wise sum of two records of equal length and rate.
    pub fn add(&self, other: &SampledSignal) -> Result<SampledSignal> {
        self.check_compatible(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SampledSignal {
            samples,
            sample_rate: self.sample_rate,
            t0: self.t0,
        })
    }

    pub fn check_compatible(&self, other: &SampledSignal) -> Result<()> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::Mismatch(format!(
                "length {} vs {}",
                self.samples.len(),
                other.samples.len()
            )));
        }
        if self.sample_rate != other.sample_rate {
            return Err(Error::Mismatch(format!(
                "sample rate {} vs {}",
                self.sample_rate, other.sample_rate
            )));
        }
        Ok(())
    }
}

/// Uniformly sampled complex baseband envelope of the optical field,
/// referenced to the laser line.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalEnvelope {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
    /// Frequency of the envelope baseband origin relative to the laser line.
    pub carrier_offset: f64,
}

impl OpticalEnvelope {
    pub fn new(samples: Vec<Complex64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::invalid(format!(
                "sample_rate must be positive and finite, got {sample_rate}"
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("envelope contains NaN or Inf"));
        }
        Ok(Self {
            samples,
            sample_rate,
            carrier_offset: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of |E|^2 over the record.
    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    pub fn check_compatible_signal(&self, drive: &SampledSignal) -> Result<()> {
        if self.samples.len() != drive.samples.len() {
            return Err(Error::Mismatch(format!(
                "envelope length {} vs drive length {}",
                self.samples.len(),
                drive.samples.len()
            )));
        }
        if self.sample_rate != drive.sample_rate {
            return Err(Error::Mismatch(format!(
                "envelope rate {} vs drive rate {}",
                self.sample_rate, drive.sample_rate
            )));
        }
        Ok(())
    }
}

/// Frequency interval `[f_low, f_high]`. Electrical bands are positive;
/// optical offset bands may be negative (relative to the laser line).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub f_low: f64,
    pub f_high: f64,
}

impl Band {
    pub fn new(f_low: f64, f_high: f64) -> Result<Self> {
        if !(f_low < f_high) {
            return Err(Error::invalid(format!(
                "band requires f_low < f_high, got f_low={f_low}, f_high={f_high}"
            )));
        }
        Ok(Self { f_low, f_high })
    }

    pub fn width(&self) -> f64 {
        self.f_high - self.f_low
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.f_low && f <= self.f_high
    }

    /// Validates a positive electrical band against the Nyquist limit.
    pub fn check_electrical(&self, sample_rate: f64) -> Result<()> {
        if self.f_low <= 0.0 || self.f_high >= sample_rate / 2.0 {
            return Err(Error::BandOutOfRange(format!(
                "band [{}, {}] must lie inside (0, {})",
                self.f_low,
                self.f_high,
                sample_rate / 2.0
            )));
        }
        Ok(())
    }

    /// Validates an optical offset band against the two-sided envelope span.
    pub fn check_optical(&self, sample_rate: f64) -> Result<()> {
        if self.f_low <= -sample_rate / 2.0 || self.f_high >= sample_rate / 2.0 {
            return Err(Error::BandOutOfRange(format!(
                "band [{}, {}] must lie inside (-{}, {})",
                self.f_low,
                self.f_high,
                sample_rate / 2.0,
                sample_rate / 2.0
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonfinite_samples() {
        assert!(SampledSignal::new(vec![0.0, f64::NAN], 1.0, 0.0).is_err());
        assert!(SampledSignal::new(vec![0.0, 1.0], 1.0, 0.0).is_ok());
    }

    #[test]
    fn band_ordering_enforced() {
        assert!(Band::new(2.0e9, 1.0e9).is_err());
        let b = Band::new(2.4e9, 4.0e9).unwrap();
        assert_eq!(b.width(), 1.6e9);
        assert!(b.contains(3.0e9));
        assert!(!b.contains(4.1e9));
    }

    #[test]
    fn electrical_band_nyquist_check() {
        let b = Band::new(2.4e9, 4.0e9).unwrap();
        assert!(b.check_electrical(64e9).is_ok());
        assert!(b.check_electrical(7.0e9).is_err());
    }
}
