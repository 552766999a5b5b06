//! Command-line front end: maps each simulator experiment to a reproducible,
//! manifest-checksummed run.

mod config;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::Config;
use io::RunManifest;
use tvmpf_core::chain::mpf_center_frequency;
use tvmpf_core::metrics::{self, bit_errors, recover_bpsk_phase, spectrogram};
use tvmpf_core::pipeline::{
    measure_response, prepare_experiment, response_peak_and_width, run_sweep, RunArtifacts,
};
use tvmpf_core::signal::SampledSignal;
use tvmpf_core::waveforms::{resolve_code, synthesize, WaveformShape};

#[derive(Parser)]
#[command(
    name = "tvmpf",
    version,
    about = "Simulator for an SBS-based time-varying microwave photonic filter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON configuration file (defaults apply when omitted)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Waveform family override: lfm, nlfm, dlfm, fh, phase_coded
    #[arg(long)]
    waveform: Option<String>,
    /// Master seed override (drives phase codes and noise realizations)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: $TVMPF_OUT_DIR or ./out)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a waveform and write the record plus its frequency track.
    Gen {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Stepped frequency-response scan for a list of control tones.
    Response {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated control-tone frequencies in Hz
        #[arg(long, value_delimiter = ',', required = true)]
        ctrl: Vec<f64>,
        /// Probe span around the expected passband center, Hz
        #[arg(long, default_value_t = 30e6)]
        span: f64,
        /// Probe step, Hz
        #[arg(long, default_value_t = 1e6)]
        step: f64,
        /// Record length per probe, s (shorter than experiment records)
        #[arg(long, default_value_t = 2e-6)]
        duration: f64,
    },
    /// One noise-suppression experiment: waveforms, spectrograms, metrics.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// In-band SNR in dB, or "none" for a noise-free run
        #[arg(long, allow_hyphen_values = true)]
        snr: String,
        /// Spectrogram window length, samples
        #[arg(long, default_value_t = 512)]
        tfd_window: usize,
        /// Spectrogram hop, samples
        #[arg(long, default_value_t = 256)]
        tfd_hop: usize,
    },
    /// MSE-vs-SNR sweep averaged over noise seeds.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// SNR list: "start:step:stop" or comma-separated values, dB
        #[arg(long, allow_hyphen_values = true)]
        snr: String,
        #[arg(long, default_value_t = 5)]
        seeds_per_point: usize,
        /// Amplifier-added noise level override (hardware emulation)
        #[arg(long)]
        spont_level: Option<f64>,
    },
    /// BPSK phase-recovery report, before and after the filter.
    Demod {
        #[command(flatten)]
        common: CommonArgs,
        /// In-band SNR in dB, or "none"
        #[arg(long, default_value = "8", allow_hyphen_values = true)]
        snr: String,
        /// Demodulate an imported raw record instead of running the chain
        #[arg(long)]
        input: Option<PathBuf>,
        /// Carrier frequency for --input records, Hz
        #[arg(long)]
        carrier: Option<f64>,
        /// Bit duration for --input records, s
        #[arg(long)]
        bit_duration: Option<f64>,
    },
    /// Recompute the checksums recorded in a run manifest.
    Verify {
        /// Path to a manifest written by another subcommand
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Gen { common } => cmd_gen(&common),
        Command::Response {
            common,
            ctrl,
            span,
            step,
            duration,
        } => cmd_response(&common, &ctrl, span, step, duration),
        Command::Run {
            common,
            snr,
            tfd_window,
            tfd_hop,
        } => cmd_run(&common, &snr, tfd_window, tfd_hop),
        Command::Sweep {
            common,
            snr,
            seeds_per_point,
            spont_level,
        } => cmd_sweep(&common, &snr, seeds_per_point, spont_level),
        Command::Demod {
            common,
            snr,
            input,
            carrier,
            bit_duration,
        } => cmd_demod(&common, &snr, input.as_deref(), carrier, bit_duration),
        Command::Verify { manifest } => cmd_verify(&manifest),
    }
}

fn load_config(common: &CommonArgs) -> Result<Config> {
    let mut config = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(family) = &common.waveform {
        config.waveform = config::default_spec_for_family(family)?;
    }
    if let Some(seed) = common.seed {
        config.chain.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(common: &CommonArgs) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| std::env::var_os("TVMPF_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn echo_config(config: &Config) -> Result<serde_json::Value> {
    let resolved = config.resolved()?;
    let value = serde_json::to_value(&resolved)?;
    println!(
        "resolved configuration:\n{}",
        serde_json::to_string_pretty(&value)?
    );
    Ok(value)
}

fn parse_snr(text: &str) -> Result<Option<f64>> {
    if text.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    let v: f64 = text
        .parse()
        .with_context(|| format!("invalid --snr value {text:?} (expected dB or \"none\")"))?;
    Ok(Some(v))
}

/// "start:step:stop" (inclusive) or a comma-separated list.
fn parse_snr_list(text: &str) -> Result<Vec<f64>> {
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            bail!("invalid --snr range {text:?} (expected start:step:stop)");
        }
        let start: f64 = parts[0].parse().context("range start")?;
        let step: f64 = parts[1].parse().context("range step")?;
        let stop: f64 = parts[2].parse().context("range stop")?;
        if !(step > 0.0) || stop < start {
            bail!("invalid --snr range {text:?}: need step > 0 and stop >= start");
        }
        let n = ((stop - start) / step + 1.5).floor() as usize;
        return Ok((0..n)
            .map(|i| start + i as f64 * step)
            .filter(|v| *v <= stop + 1e-9)
            .collect());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid SNR value {s:?}"))
        })
        .collect()
}

fn write_spectrogram_csv(
    signal: &SampledSignal,
    window: usize,
    hop: usize,
    band: &tvmpf_core::signal::Band,
    path: &Path,
) -> Result<()> {
    let sg = spectrogram(signal, window, hop)
        .map_err(|e| anyhow::anyhow!("spectrogram: {e}"))?
        .crop(band);
    let mut header = String::from("time_s");
    for f in &sg.bin_freqs {
        header.push_str(&format!(",{f}"));
    }
    let rows = sg
        .frame_times
        .iter()
        .zip(&sg.magnitudes_db)
        .map(|(t, row)| {
            let mut line = format!("{t}");
            for db in row {
                line.push_str(&format!(",{db:.4}"));
            }
            line
        });
    io::write_csv(path, &header, rows)
}

fn cmd_gen(common: &CommonArgs) -> Result<()> {
    let started = Instant::now();
    let config = load_config(common)?;
    let echoed = echo_config(&config)?;
    let dir = out_dir(common);
    let chain = &config.chain;
    let (signal, track) = synthesize(
        &config.waveform,
        chain.sample_rate,
        chain.duration,
        chain.seed,
    )?;

    let family = config.waveform.family_name();
    let signal_path = dir.join(format!("{family}.f64"));
    io::write_signal(&signal, &signal_path)?;

    let track_path = dir.join(format!("{family}_track.csv"));
    let header = match track.components.len() {
        1 => "time_s,f_hz".to_string(),
        _ => "time_s,f_up_hz,f_down_hz".to_string(),
    };
    let fs = signal.sample_rate;
    let rows = (0..signal.len()).map(|i| {
        let mut line = format!("{}", i as f64 / fs);
        for component in &track.components {
            line.push_str(&format!(",{}", component[i]));
        }
        line
    });
    io::write_csv(&track_path, &header, rows)?;

    let mut manifest = RunManifest::new("gen", echoed);
    manifest.seeds = vec![chain.seed];
    manifest.metrics = serde_json::json!({
        "family": family,
        "samples": signal.len(),
        "sample_rate": signal.sample_rate,
    });
    manifest.record_output(&signal_path)?;
    manifest.record_output(&signal_path.with_file_name(format!("{family}.f64.json")))?;
    manifest.record_output(&track_path)?;
    manifest.wall_clock_s = started.elapsed().as_secs_f64();
    manifest.write(&dir.join("gen_manifest.json"))?;
    println!("wrote {} samples to {}", signal.len(), signal_path.display());
    Ok(())
}

fn cmd_response(
    common: &CommonArgs,
    ctrl: &[f64],
    span: f64,
    step: f64,
    duration: f64,
) -> Result<()> {
    let started = Instant::now();
    let mut config = load_config(common)?;
    config.chain.duration = duration;
    let echoed = echo_config(&config)?;
    let dir = out_dir(common);
    let chain = &config.chain;

    let mut curve_rows: Vec<String> = Vec::new();
    let mut summary_rows: Vec<String> = Vec::new();
    let mut summaries = Vec::new();
    for &f_ctrl in ctrl {
        let center = mpf_center_frequency(f_ctrl, chain.sbs.bfs, chain.sideband_sign);
        let n_steps = (span / step).round() as i64;
        let probes: Vec<f64> = (-n_steps..=n_steps)
            .map(|k| center + k as f64 * step)
            .filter(|f| *f > 0.0)
            .collect();
        let points = measure_response(f_ctrl, chain, &probes)?;
        for p in &points {
            curve_rows.push(format!("{f_ctrl},{},{:.6}", p.probe_hz, p.response_db));
        }
        let (peak_hz, bw3db_hz) = response_peak_and_width(&points)?;
        summary_rows.push(format!("{f_ctrl},{peak_hz},{bw3db_hz}"));
        summaries.push(serde_json::json!({
            "f_ctrl_hz": f_ctrl,
            "peak_hz": peak_hz,
            "bw3db_hz": bw3db_hz,
        }));
        println!(
            "ctrl {:>7.3} GHz -> peak {:.4} GHz, 3 dB width {:.2} MHz",
            f_ctrl / 1e9,
            peak_hz / 1e9,
            bw3db_hz / 1e6
        );
    }

    let curve_path = dir.join("response_curve.csv");
    io::write_csv(
        &curve_path,
        "f_ctrl_hz,probe_hz,response_db",
        curve_rows.into_iter(),
    )?;
    let summary_path = dir.join("response_summary.csv");
    io::write_csv(
        &summary_path,
        "f_ctrl_hz,peak_hz,bw3db_hz",
        summary_rows.into_iter(),
    )?;

    let mut manifest = RunManifest::new("response", echoed);
    manifest.seeds = vec![chain.seed];
    manifest.metrics = serde_json::json!({ "points": summaries });
    manifest.record_output(&curve_path)?;
    manifest.record_output(&summary_path)?;
    manifest.wall_clock_s = started.elapsed().as_secs_f64();
    manifest.write(&dir.join("response_manifest.json"))?;
    Ok(())
}

fn run_metrics_json(run: &RunArtifacts) -> serde_json::Value {
    serde_json::json!({
        "snr_db": run.snr_target,
        "mse_before": run.mse_before,
        "mse_after": run.mse_after,
        "improvement_db": run.improvement_db().ok(),
    })
}

fn cmd_run(common: &CommonArgs, snr: &str, tfd_window: usize, tfd_hop: usize) -> Result<()> {
    let started = Instant::now();
    let config = load_config(common)?;
    let echoed = echo_config(&config)?;
    let dir = out_dir(common);
    let snr_db = parse_snr(snr)?;

    let prepared = prepare_experiment(&config.waveform, &config.chain)?;
    let run = prepared.run_trial(snr_db, 0)?;

    let mut manifest = RunManifest::new("run", echoed);
    manifest.seeds = vec![config.chain.seed];
    manifest.metrics = run_metrics_json(&run);

    for (name, signal) in [
        ("noisy_input", &run.noisy_input),
        ("reference", &run.reference),
        ("filtered", &run.filtered),
    ] {
        let path = dir.join(format!("{name}.f64"));
        io::write_signal(signal, &path)?;
        manifest.record_output(&path)?;
        manifest.record_output(&path.with_file_name(format!("{name}.f64.json")))?;
    }
    for (name, signal) in [
        ("noisy_input_tfd", &run.noisy_input),
        ("filtered_tfd", &run.filtered),
    ] {
        let path = dir.join(format!("{name}.csv"));
        write_spectrogram_csv(signal, tfd_window, tfd_hop, &config.chain.bpf.band, &path)?;
        manifest.record_output(&path)?;
    }
    manifest.wall_clock_s = started.elapsed().as_secs_f64();
    manifest.write(&dir.join("run_manifest.json"))?;

    match run.improvement_db() {
        Ok(gain) => println!(
            "mse before {:.4} -> after {:.4} ({:+.2} dB)",
            run.mse_before, run.mse_after, gain
        ),
        Err(_) => println!(
            "mse before {:.4} -> after {:.4}",
            run.mse_before, run.mse_after
        ),
    }
    Ok(())
}

fn cmd_sweep(
    common: &CommonArgs,
    snr: &str,
    seeds_per_point: usize,
    spont_level: Option<f64>,
) -> Result<()> {
    let started = Instant::now();
    let mut config = load_config(common)?;
    if let Some(level) = spont_level {
        config.chain.sbs.spontaneous_level = level;
        config.validate()?;
    }
    let echoed = echo_config(&config)?;
    let dir = out_dir(common);
    let snr_list = parse_snr_list(snr)?;

    let rows = run_sweep(&config.waveform, &snr_list, &config.chain, seeds_per_point)?;

    // Crossover: first sign change of (before - after), linearly interpolated.
    let mut crossover = None;
    for pair in rows.windows(2) {
        let a = pair[0].mean_mse_before - pair[0].mean_mse_after;
        let b = pair[1].mean_mse_before - pair[1].mean_mse_after;
        if a > 0.0 && b <= 0.0 {
            let t = a / (a - b);
            crossover = Some(pair[0].snr_db + t * (pair[1].snr_db - pair[0].snr_db));
            break;
        }
    }

    let sweep_path = dir.join("sweep.csv");
    io::write_csv(
        &sweep_path,
        "snr_db,mean_mse_before,mean_mse_after,improvement_db",
        rows.iter().map(|r| {
            let gain = metrics::mse_improvement(r.mean_mse_before, r.mean_mse_after)
                .map(|g| format!("{g:.4}"))
                .unwrap_or_else(|_| "nan".to_string());
            format!(
                "{},{},{},{gain}",
                r.snr_db, r.mean_mse_before, r.mean_mse_after
            )
        }),
    )?;

    let mut manifest = RunManifest::new("sweep", echoed);
    manifest.seeds = (0..seeds_per_point as u64).collect();
    manifest.metrics = serde_json::json!({
        "rows": rows.len(),
        "seeds_per_point": seeds_per_point,
        "crossover_snr_db": crossover,
    });
    manifest.record_output(&sweep_path)?;
    manifest.wall_clock_s = started.elapsed().as_secs_f64();
    manifest.write(&dir.join("sweep_manifest.json"))?;

    println!("wrote {} rows to {}", rows.len(), sweep_path.display());
    match crossover {
        Some(snr) => println!("improvement crossover at {snr:.2} dB"),
        None => println!("no improvement crossover inside the swept range"),
    }
    Ok(())
}

fn cmd_demod(
    common: &CommonArgs,
    snr: &str,
    input: Option<&Path>,
    carrier: Option<f64>,
    bit_duration: Option<f64>,
) -> Result<()> {
    let started = Instant::now();
    let dir = out_dir(common);

    if let Some(input_path) = input {
        // Raw-binary import path: demodulate a stored record directly.
        let carrier = carrier.context("--carrier is required with --input")?;
        let bit_duration = bit_duration.context("--bit-duration is required with --input")?;
        let signal = io::read_signal(input_path)?;
        let (phases, bits) = recover_bpsk_phase(&signal, carrier, bit_duration)?;
        let report_path = dir.join("demod_report.csv");
        io::write_csv(
            &report_path,
            "bit,phase_rad,decision",
            phases
                .iter()
                .zip(&bits)
                .enumerate()
                .map(|(i, (p, b))| format!("{i},{p:.6},{b}")),
        )?;
        let mut manifest = RunManifest::new(
            "demod",
            serde_json::json!({
                "input": input_path.display().to_string(),
                "carrier": carrier,
                "bit_duration": bit_duration,
            }),
        );
        manifest.metrics = serde_json::json!({ "bits": bits.len() });
        manifest.record_output(&report_path)?;
        manifest.wall_clock_s = started.elapsed().as_secs_f64();
        manifest.write(&dir.join("demod_manifest.json"))?;
        println!("demodulated {} bits from {}", bits.len(), input_path.display());
        return Ok(());
    }

    let mut config = load_config(common)?;
    if common.waveform.is_none()
        && !matches!(config.waveform.shape, WaveformShape::PhaseCoded { .. })
    {
        config.waveform = config::default_spec_for_family("phase_coded")?;
        config.validate()?;
    }
    let echoed = echo_config(&config)?;
    let snr_db = parse_snr(snr)?;
    let (carrier, n_bits, period, code) = match &config.waveform.shape {
        WaveformShape::PhaseCoded {
            carrier,
            n_bits,
            period,
            code,
        } => (*carrier, *n_bits, *period, code.clone()),
        other => bail!(
            "demod needs a phase_coded waveform, got {:?}",
            other
        ),
    };
    let bit = period / n_bits as f64;
    let code = resolve_code(&code, n_bits, config.chain.seed);

    let prepared = prepare_experiment(&config.waveform, &config.chain)?;
    let run = prepared.run_trial(snr_db, 0)?;
    let (pre_phases, pre_bits) = recover_bpsk_phase(&run.noisy_input, carrier, bit)?;
    let (post_phases, post_bits) = recover_bpsk_phase(&run.filtered, carrier, bit)?;
    let pre_errors = bit_errors(&pre_bits, &code);
    let post_errors = bit_errors(&post_bits, &code);

    let report_path = dir.join("demod_report.csv");
    io::write_csv(
        &report_path,
        "bit,code,pre_phase_rad,pre_decision,post_phase_rad,post_decision",
        (0..code.len()).map(|i| {
            format!(
                "{i},{},{:.6},{},{:.6},{}",
                code[i], pre_phases[i], pre_bits[i], post_phases[i], post_bits[i]
            )
        }),
    )?;

    let mut manifest = RunManifest::new("demod", echoed);
    manifest.seeds = vec![config.chain.seed];
    manifest.metrics = serde_json::json!({
        "snr_db": snr_db,
        "bits": code.len(),
        "pre_bit_errors": pre_errors,
        "post_bit_errors": post_errors,
        "mse_before": run.mse_before,
        "mse_after": run.mse_after,
    });
    manifest.record_output(&report_path)?;
    manifest.wall_clock_s = started.elapsed().as_secs_f64();
    manifest.write(&dir.join("demod_manifest.json"))?;

    println!(
        "bit errors: {pre_errors}/{} before, {post_errors}/{} after",
        code.len(),
        code.len()
    );
    Ok(())
}

fn cmd_verify(manifest: &Path) -> Result<()> {
    let failures = io::verify_manifest(manifest)?;
    if failures.is_empty() {
        println!("manifest verified: all outputs match their checksums");
        Ok(())
    } else {
        for f in &failures {
            eprintln!("verify: {f}");
        }
        bail!("{} output(s) failed verification", failures.len());
    }
}
