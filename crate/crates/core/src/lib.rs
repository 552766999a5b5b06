//! Simulation core for a stimulated-Brillouin-scattering time-varying
//! microwave photonic filter (TV-MPF).
//!
//! The library models the full electro-optic chain as complex-envelope
//! signal processing: a null-biased Mach-Zehnder modulator driven by a
//! filter-controlling signal, optical sideband selection, phase modulation
//! by the (noisy) signal to be filtered, narrowband Brillouin gain, square-law
//! photodetection, and an electrical band-pass filter. Because the pump is
//! unmodulated, the Brillouin gain is a time-invariant complex Lorentzian on
//! the optical spectrum; the time-varying microwave response emerges entirely
//! from the control-signal modulation.
//!
//! Modules:
//! - [`waveforms`]: chirp/hopping/phase-coded waveform synthesis with exact
//!   instantaneous-frequency tracks, and control-signal derivation.
//! - [`noise`]: band-limited AWGN calibrated to a target in-band SNR.
//! - [`chain`]: per-component optical/electrical models.
//! - [`pipeline`]: end-to-end experiment orchestration, frequency-response
//!   scans, and SNR sweeps.
//! - [`metrics`]: normalized waveform MSE, spectrograms, BPSK phase recovery.

pub mod chain;
pub mod error;
pub mod metrics;
pub mod noise;
pub mod pipeline;
pub mod signal;
pub mod spectral;
pub mod waveforms;

pub use chain::{BpfSpec, MzmParams, ObpfSpec, PmParams, SbsParams};
pub use error::{Error, Result};
pub use signal::{Band, OpticalEnvelope, SampledSignal};
pub use waveforms::{FrequencyTrack, SidebandSign, WaveformSpec};
