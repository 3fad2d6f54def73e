//! `rcs` — compact-range RCS measurement chain.
//!
//! Subcommands mirror the processing stages: `sphere-rcs` (calibration
//! truth), `simulate` (synthetic chamber captures), `gate` (background
//! subtraction + range gating), `calibrate` (absolute RCS patterns), `fit`
//! (distribution selection), `plot-data` (polar plot export), and `process`
//! (the whole chain from one JSON config).

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use rcs_core::calibration::{build_calibration, pattern_from_scan};
use rcs_core::gating::{background_subtract, range_gate, to_frequency_domain, to_time_domain};
use rcs_core::io::{
    load_scene, read_pattern_csv, read_scan_csv, write_pattern_csv, write_scan_csv,
};
use rcs_core::mie::{
    classify_region, sphere_rcs_exact, sphere_rcs_optical, sphere_rcs_rayleigh, SphereSpec,
};
use rcs_core::pipeline::{run_pipeline, FitReport, PipelineConfig};
use rcs_core::scatter::{synth_background_scan, synth_scan};
use rcs_core::stats::{fit_models, ModelKind, RcsSamples};
use rcs_core::sweep::AzimuthScan;
use rcs_core::{to_dbsm, Error};

#[derive(Parser)]
#[command(
    name = "rcs",
    version,
    about = "Compact-range RCS measurement chain: simulate, gate, calibrate, fit"
)]
struct Cli {
    /// Pipeline config JSON (consumed by `process`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the seed from the scene or pipeline config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory from the pipeline config.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SphereModel {
    Exact,
    Rayleigh,
    Optical,
}

#[derive(Subcommand)]
enum Command {
    /// Theoretical RCS of a PEC sphere over a frequency grid (CSV).
    SphereRcs {
        /// Sphere radius in meters.
        #[arg(long)]
        radius: f64,
        /// First grid frequency in Hz.
        #[arg(long)]
        freq_start: f64,
        /// Last grid frequency in Hz.
        #[arg(long)]
        freq_stop: f64,
        /// Number of grid points.
        #[arg(long)]
        points: usize,
        /// Which model to evaluate.
        #[arg(long, value_enum, default_value = "exact")]
        model: SphereModel,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize an azimuth scan from a scene description.
    Simulate {
        /// Scene JSON (target, geometry, sweep, artifacts).
        #[arg(long)]
        scene: PathBuf,
        /// Output scan CSV.
        #[arg(long)]
        out: PathBuf,
        /// Also write the empty-chamber scan of the same scene.
        #[arg(long)]
        background_out: Option<PathBuf>,
    },
    /// Background-subtract and range-gate a scan.
    Gate {
        /// Input scan CSV.
        #[arg(long = "in")]
        input: PathBuf,
        /// Empty-chamber scan CSV on the same grids.
        #[arg(long)]
        background: PathBuf,
        /// Gate start, seconds of two-way delay.
        #[arg(long)]
        gate_start: f64,
        /// Gate stop, seconds of two-way delay.
        #[arg(long)]
        gate_stop: f64,
        /// Tukey taper fraction in [0, 1].
        #[arg(long)]
        alpha: f64,
        /// Zero-padding factor for the time-domain transform.
        #[arg(long, default_value_t = 8)]
        zero_pad: usize,
        /// Output gated scan CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a gated scan into an absolute RCS pattern using a gated
    /// sphere reference.
    Calibrate {
        /// Gated target scan CSV.
        #[arg(long)]
        scan: PathBuf,
        /// Gated sphere scan CSV.
        #[arg(long)]
        sphere: PathBuf,
        /// Sphere radius in meters.
        #[arg(long)]
        radius: f64,
        /// Band to average per angle, as `f1:f2` in Hz.
        #[arg(long)]
        band: String,
        /// Output pattern CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit candidate distributions to a pattern and rank by AIC.
    Fit {
        /// Pattern CSV.
        #[arg(long)]
        pattern: PathBuf,
        /// Comma-separated families (lognormal,rayleigh,gev).
        #[arg(long)]
        models: Option<String>,
        /// Output report JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the whole chain from a pipeline config JSON.
    Process,
    /// Export `angle_deg,rcs_dbsm` plot data from a pattern.
    PlotData {
        /// Pattern CSV.
        #[arg(long)]
        pattern: PathBuf,
        /// Output plot-data CSV.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::SphereRcs {
            radius,
            freq_start,
            freq_stop,
            points,
            model,
            out,
        } => sphere_rcs_cmd(radius, freq_start, freq_stop, points, model, out),
        Command::Simulate {
            scene,
            out,
            background_out,
        } => simulate_cmd(scene, out, background_out, cli.seed),
        Command::Gate {
            input,
            background,
            gate_start,
            gate_stop,
            alpha,
            zero_pad,
            out,
        } => gate_cmd(input, background, gate_start, gate_stop, alpha, zero_pad, out),
        Command::Calibrate {
            scan,
            sphere,
            radius,
            band,
            out,
        } => calibrate_cmd(scan, sphere, radius, &band, out),
        Command::Fit {
            pattern,
            models,
            out,
        } => fit_cmd(pattern, models.as_deref(), out),
        Command::Process => process_cmd(cli.config, cli.seed, cli.out_dir),
        Command::PlotData { pattern, out } => {
            let p = read_pattern_csv(&pattern)?;
            rcs_core::pipeline::emit_plot_data(&out, &p)?;
            Ok(())
        }
    }
}

fn sphere_rcs_cmd(
    radius: f64,
    freq_start: f64,
    freq_stop: f64,
    points: usize,
    model: SphereModel,
    out: Option<PathBuf>,
) -> Result<()> {
    let sphere = SphereSpec::new(radius)?;
    if points == 0 {
        bail!("--points must be at least 1");
    }
    if points > 1 && !(freq_stop > freq_start) {
        bail!("--freq-stop must exceed --freq-start when --points > 1");
    }

    let mut rows = String::from("freq_hz,rcs_m2,rcs_dbsm,region\n");
    for i in 0..points {
        let f = if points == 1 {
            freq_start
        } else {
            freq_start + (freq_stop - freq_start) * i as f64 / (points - 1) as f64
        };
        let sigma = match model {
            SphereModel::Exact => sphere_rcs_exact(&sphere, f)?,
            SphereModel::Rayleigh => sphere_rcs_rayleigh(&sphere, f)?,
            SphereModel::Optical => sphere_rcs_optical(&sphere),
        };
        let region = classify_region(&sphere, f)?;
        rows.push_str(&format!("{},{},{},{}\n", f, sigma, to_dbsm(sigma), region));
    }

    match out {
        Some(path) => std::fs::write(&path, rows)
            .with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(rows.as_bytes())?,
    }
    Ok(())
}

fn simulate_cmd(
    scene_path: PathBuf,
    out: PathBuf,
    background_out: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<()> {
    let mut scene = load_scene(&scene_path)
        .with_context(|| format!("loading scene {}", scene_path.display()))?;
    if let Some(seed) = seed {
        scene.artifacts.seed = seed;
    }
    let scan = synth_scan(&scene.target, &scene.geometry, &scene.sweep, &scene.artifacts)?;
    write_scan_csv(&out, &scan)?;
    eprintln!(
        "simulated '{}': {} angles x {} points -> {}",
        scene.target.name,
        scan.len(),
        scan.freqs_hz().len(),
        out.display()
    );
    if let Some(bg_path) = background_out {
        let bg = synth_background_scan(&scene.geometry, &scene.sweep, &scene.artifacts)?;
        write_scan_csv(&bg_path, &bg)?;
        eprintln!("background -> {}", bg_path.display());
    }
    Ok(())
}

fn gate_cmd(
    input: PathBuf,
    background: PathBuf,
    gate_start: f64,
    gate_stop: f64,
    alpha: f64,
    zero_pad: usize,
    out: PathBuf,
) -> Result<()> {
    let scan = read_scan_csv(&input)?;
    let bg = read_scan_csv(&background)?;
    if scan.angles_deg().len() != bg.angles_deg().len()
        || scan
            .angles_deg()
            .iter()
            .zip(bg.angles_deg())
            .any(|(a, b)| (a - b).abs() > 1e-9)
    {
        bail!(Error::Format(
            "scan and background cover different angles".into()
        ));
    }
    let n = scan.freqs_hz().len();
    let sweeps = scan
        .sweeps()
        .iter()
        .zip(bg.sweeps())
        .map(|(s, b)| {
            let sub = background_subtract(s, b)?;
            let profile = to_time_domain(&sub, zero_pad)?;
            let gated = range_gate(&profile, gate_start, gate_stop, alpha)?;
            to_frequency_domain(&gated, n)
        })
        .collect::<rcs_core::Result<Vec<_>>>()?;
    let gated_scan = AzimuthScan::new(scan.angles_deg().to_vec(), sweeps)?;
    write_scan_csv(&out, &gated_scan)?;
    eprintln!("gated {} angles -> {}", gated_scan.len(), out.display());
    Ok(())
}

fn parse_band(band: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = band.split(':').collect();
    if parts.len() != 2 {
        bail!("--band must be 'f1:f2' in Hz, got '{band}'");
    }
    let f1: f64 = parts[0].trim().parse().context("parsing band start")?;
    let f2: f64 = parts[1].trim().parse().context("parsing band stop")?;
    Ok((f1, f2))
}

fn calibrate_cmd(
    scan_path: PathBuf,
    sphere_path: PathBuf,
    radius: f64,
    band: &str,
    out: PathBuf,
) -> Result<()> {
    let scan = read_scan_csv(&scan_path)?;
    let sphere_scan = read_scan_csv(&sphere_path)?;
    let sphere = SphereSpec::new(radius)?;
    let reference = sphere_scan.mean_sweep();
    let cal = build_calibration(&reference, &sphere)?;
    if cal.region_warning() {
        eprintln!("warning: sphere is outside the optical region on part of the grid");
    }
    let band = parse_band(band)?;
    let pattern = pattern_from_scan(&scan, &cal, band)?;
    write_pattern_csv(&out, &pattern)?;
    eprintln!(
        "pattern over {}: {} angles -> {}",
        pattern.freq_label(),
        pattern.len(),
        out.display()
    );
    Ok(())
}

fn fit_cmd(pattern_path: PathBuf, models: Option<&str>, out: PathBuf) -> Result<()> {
    let pattern = read_pattern_csv(&pattern_path)?;
    let kinds: Vec<ModelKind> = match models {
        Some(list) => list
            .split(',')
            .map(|s| s.parse::<ModelKind>())
            .collect::<rcs_core::Result<Vec<_>>>()?,
        None => ModelKind::ALL.to_vec(),
    };
    let samples = RcsSamples::new(pattern.rcs_m2().to_vec())?;
    let ranking = fit_models(&samples, &kinds)?;
    let report = FitReport::from_ranking(&ranking, samples.len());
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
    println!("best model: {}", report.best);
    Ok(())
}

fn process_cmd(
    config_path: Option<PathBuf>,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
) -> Result<()> {
    let config_path =
        config_path.ok_or_else(|| anyhow::anyhow!("`process` needs --config <json>"))?;
    let mut config = PipelineConfig::load(&config_path)
        .with_context(|| format!("loading config {}", config_path.display()))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(dir) = out_dir {
        config.out_dir = dir;
    }
    let report = run_pipeline(&config)?;
    let stats = report
        .pattern_stats
        .as_ref()
        .expect("successful run carries pattern stats");
    println!(
        "processed {} angles over {}: mean {:.4} m^2 ({:.2} dBsm), best model {}",
        stats.n_angles,
        stats.band_label,
        stats.mean_m2,
        stats.mean_dbsm,
        report.fit.as_ref().map(|f| f.best.as_str()).unwrap_or("-")
    );
    println!("outputs in {}", config.out_dir.display());
    Ok(())
}
