//! The end-to-end processing chain behind one reproducible configuration.
//!
//! Stage order: background subtraction → inverse transform → range gate →
//! forward transform → sphere calibration → pattern extraction → averaging →
//! model selection. Subtraction runs before gating because complex
//! subtraction is exact only on ungated sweeps. Each stage either succeeds
//! and contributes a summary to the run report, or the report records it as
//! the failing stage and nothing later runs.
//!
//! Outputs (written only on full success): `pattern.csv`, `plot.csv`, and
//! `report.json` in the configured output directory. A failed run still
//! writes `report.json`, marked failed, so the failure is inspectable.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calibration::{
    apply_calibration, average_rcs, build_calibration, pattern_from_scan, CalibrationReference,
    RcsPattern,
};
use crate::error::{Error, Result};
use crate::gating::{background_subtract, range_gate, to_frequency_domain, to_time_domain};
use crate::io::{read_scan_csv, write_pattern_csv, write_plot_csv};
use crate::mie::SphereSpec;
use crate::stats::{fit_models, ModelKind, ModelRanking, RcsSamples};
use crate::sweep::AzimuthScan;
use crate::to_dbsm_floored;

/// Time gate applied to every range profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateConfig {
    /// Gate start, seconds of two-way delay.
    pub start_s: f64,
    /// Gate stop, seconds of two-way delay.
    pub stop_s: f64,
    /// Tukey taper fraction; 0 is rectangular.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Inverse-transform zero padding for gate-placement resolution.
    #[serde(default = "default_zero_pad")]
    pub zero_pad_factor: usize,
}

fn default_alpha() -> f64 {
    0.25
}
fn default_zero_pad() -> usize {
    8
}

/// Frequency band reduced to the per-angle pattern value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandConfig {
    pub start_hz: f64,
    pub stop_hz: f64,
}

fn default_models() -> Vec<ModelKind> {
    ModelKind::ALL.to_vec()
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Everything one `process` run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Target scan CSV (raw captures).
    pub scan: PathBuf,
    /// Empty-chamber scan CSV on the same angle and frequency grids.
    pub background: PathBuf,
    /// Calibration-sphere scan CSV on the same frequency grid.
    pub sphere_scan: PathBuf,
    /// Radius of the calibration sphere, meters.
    pub sphere_radius_m: f64,
    pub gate: GateConfig,
    pub band: BandConfig,
    #[serde(default = "default_models")]
    pub models: Vec<ModelKind>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Provenance: the seed of the run that produced the input scans.
    #[serde(default)]
    pub seed: u64,
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path.as_ref())?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// One executed stage with its headline numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub stage: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub freq_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate_energy_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_warning: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl StageSummary {
    fn named(stage: &str) -> Self {
        StageSummary {
            stage: stage.into(),
            angles: None,
            freq_points: None,
            gate_energy_ratio: None,
            region_warning: None,
            note: None,
        }
    }
}

/// Pattern-level statistics for the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternStats {
    pub n_angles: usize,
    pub band_label: String,
    pub mean_m2: f64,
    pub mean_dbsm: f64,
    pub min_m2: f64,
    pub max_m2: f64,
}

/// One candidate model in a fit report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub model: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loglik: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Distribution-fit results in report form: every candidate with parameters
/// and AIC, the winner, and the declaration that fitting happened on linear
/// m² values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub sample_count: usize,
    pub fitting_scale: String,
    pub best: String,
    pub models: Vec<ModelEntry>,
}

impl FitReport {
    pub fn from_ranking(ranking: &ModelRanking, sample_count: usize) -> Self {
        let mut models: Vec<ModelEntry> = ranking
            .results
            .iter()
            .map(|fit| ModelEntry {
                model: fit.model.kind().name().into(),
                status: "ok".into(),
                params: Some(
                    fit.model
                        .params()
                        .into_iter()
                        .map(|(k, v)| (k.to_string(), v))
                        .collect(),
                ),
                loglik: Some(fit.loglik),
                k: Some(fit.k),
                aic: Some(fit.aic),
                reason: None,
            })
            .collect();
        models.extend(ranking.skipped.iter().map(|s| ModelEntry {
            model: s.kind.name().into(),
            status: "skipped".into(),
            params: None,
            loglik: None,
            k: None,
            aic: None,
            reason: Some(s.reason.clone()),
        }));
        FitReport {
            sample_count,
            fitting_scale: "linear_m2".into(),
            best: ranking.best().model.kind().name().into(),
            models,
        }
    }
}

/// Output files written by a successful run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    pub pattern_csv: String,
    pub plot_csv: String,
    pub report_json: String,
}

/// Full record of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub seed: u64,
    pub sphere_radius_m: f64,
    pub gate: GateConfig,
    pub band: BandConfig,
    pub stages: Vec<StageSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern_stats: Option<PatternStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outputs: Option<OutputPaths>,
}

/// The documented stage order.
pub const STAGES: [&str; 8] = [
    "background_subtract",
    "to_time_domain",
    "range_gate",
    "to_frequency_domain",
    "calibration",
    "pattern",
    "average",
    "model_selection",
];

fn angles_match(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
}

struct ChainOutput {
    pattern: RcsPattern,
    stats: PatternStats,
    fit: FitReport,
    calibration: CalibrationReference,
}

fn run_stages(config: &PipelineConfig, stages: &mut Vec<StageSummary>) -> Result<ChainOutput> {
    // -- background_subtract: load all inputs, subtract the empty chamber --
    let stage = STAGES[0];
    let (target_sub, sphere_sub) = (|| -> Result<(AzimuthScan, AzimuthScan)> {
        let scan = read_scan_csv(&config.scan)?;
        let background = read_scan_csv(&config.background)?;
        let sphere = read_scan_csv(&config.sphere_scan)?;
        if !angles_match(scan.angles_deg(), background.angles_deg()) {
            return Err(Error::Format(
                "target scan and background scan cover different angles".into(),
            ));
        }
        let target_sweeps = scan
            .sweeps()
            .iter()
            .zip(background.sweeps())
            .map(|(s, b)| background_subtract(s, b))
            .collect::<Result<Vec<_>>>()?;
        let target_sub = AzimuthScan::new(scan.angles_deg().to_vec(), target_sweeps)?;

        // Sphere captures get the same treatment; when the sphere scan covers
        // different angles than the background, the background's complex mean
        // stands in (the empty chamber does not rotate).
        let sphere_sub = if angles_match(sphere.angles_deg(), background.angles_deg()) {
            let sweeps = sphere
                .sweeps()
                .iter()
                .zip(background.sweeps())
                .map(|(s, b)| background_subtract(s, b))
                .collect::<Result<Vec<_>>>()?;
            AzimuthScan::new(sphere.angles_deg().to_vec(), sweeps)?
        } else {
            let mean_bg = background.mean_sweep();
            sphere.map_sweeps(|_, s| background_subtract(s, &mean_bg))?
        };
        Ok((target_sub, sphere_sub))
    })()
    .map_err(|e| e.in_stage(stage))?;
    stages.push(StageSummary {
        angles: Some(target_sub.len()),
        freq_points: Some(target_sub.freqs_hz().len()),
        ..StageSummary::named(stage)
    });

    // -- to_time_domain --
    let stage = STAGES[1];
    let zpf = config.gate.zero_pad_factor;
    let to_profiles = |scan: &AzimuthScan| -> Result<Vec<crate::gating::TimeProfile>> {
        scan.sweeps().iter().map(|s| to_time_domain(s, zpf)).collect()
    };
    let (target_profiles, sphere_profiles) = (|| {
        Ok::<_, Error>((to_profiles(&target_sub)?, to_profiles(&sphere_sub)?))
    })()
    .map_err(|e| e.in_stage(stage))?;
    stages.push(StageSummary {
        angles: Some(target_profiles.len()),
        note: Some(format!("zero_pad_factor {zpf}")),
        ..StageSummary::named(stage)
    });

    // -- range_gate --
    let stage = STAGES[2];
    let gate = |profiles: &[crate::gating::TimeProfile]| -> Result<Vec<crate::gating::TimeProfile>> {
        profiles
            .iter()
            .map(|p| range_gate(p, config.gate.start_s, config.gate.stop_s, config.gate.alpha))
            .collect()
    };
    let (target_gated, sphere_gated) =
        (|| Ok::<_, Error>((gate(&target_profiles)?, gate(&sphere_profiles)?)))()
            .map_err(|e| e.in_stage(stage))?;
    let energy_before: f64 = target_profiles.iter().map(|p| p.energy()).sum();
    let energy_after: f64 = target_gated.iter().map(|p| p.energy()).sum();
    stages.push(StageSummary {
        angles: Some(target_gated.len()),
        gate_energy_ratio: Some(if energy_before > 0.0 {
            energy_after / energy_before
        } else {
            0.0
        }),
        ..StageSummary::named(stage)
    });

    // -- to_frequency_domain --
    let stage = STAGES[3];
    let n_points = target_sub.freqs_hz().len();
    let back = |profiles: &[crate::gating::TimeProfile],
                angles: &[f64]|
     -> Result<AzimuthScan> {
        let sweeps = profiles
            .iter()
            .map(|p| to_frequency_domain(p, n_points))
            .collect::<Result<Vec<_>>>()?;
        AzimuthScan::new(angles.to_vec(), sweeps)
    };
    let (target_scan, sphere_scan) = (|| {
        Ok::<_, Error>((
            back(&target_gated, target_sub.angles_deg())?,
            back(&sphere_gated, sphere_sub.angles_deg())?,
        ))
    })()
    .map_err(|e| e.in_stage(stage))?;
    stages.push(StageSummary {
        angles: Some(target_scan.len()),
        freq_points: Some(n_points),
        ..StageSummary::named(stage)
    });

    // -- calibration --
    let stage = STAGES[4];
    let calibration = (|| {
        let sphere = SphereSpec::new(config.sphere_radius_m)?;
        // One reference sweep: the sphere is rotation-invariant, so its gated
        // sweeps are coherently averaged across angles.
        let reference = sphere_scan.mean_sweep();
        build_calibration(&reference, &sphere)
    })()
    .map_err(|e| e.in_stage(stage))?;
    stages.push(StageSummary {
        freq_points: Some(calibration.factors().len()),
        region_warning: Some(calibration.region_warning()),
        ..StageSummary::named(stage)
    });

    // -- pattern --
    let stage = STAGES[5];
    let pattern = pattern_from_scan(
        &target_scan,
        &calibration,
        (config.band.start_hz, config.band.stop_hz),
    )
    .map_err(|e| e.in_stage(stage))?;
    stages.push(StageSummary {
        angles: Some(pattern.len()),
        note: Some(pattern.freq_label().to_string()),
        ..StageSummary::named(stage)
    });

    // -- average --
    let stage = STAGES[6];
    let (mean_m2, _) = average_rcs(&pattern);
    let stats = PatternStats {
        n_angles: pattern.len(),
        band_label: pattern.freq_label().to_string(),
        mean_m2,
        mean_dbsm: to_dbsm_floored(mean_m2),
        min_m2: pattern.rcs_m2().iter().cloned().fold(f64::INFINITY, f64::min),
        max_m2: pattern.rcs_m2().iter().cloned().fold(0.0, f64::max),
    };
    stages.push(StageSummary {
        angles: Some(pattern.len()),
        ..StageSummary::named(stage)
    });

    // -- model_selection --
    let stage = STAGES[7];
    let fit = (|| {
        let samples = RcsSamples::new(pattern.rcs_m2().to_vec())?;
        let ranking = fit_models(&samples, &config.models)?;
        Ok::<_, Error>(FitReport::from_ranking(&ranking, samples.len()))
    })()
    .map_err(|e| e.in_stage(stage))?;
    stages.push(StageSummary {
        note: Some(format!("best {}", fit.best)),
        ..StageSummary::named(stage)
    });

    Ok(ChainOutput {
        pattern,
        stats,
        fit,
        calibration,
    })
}

fn write_report(path: &Path, report: &RunReport) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Execute the full chain and write `pattern.csv`, `plot.csv`, and
/// `report.json` into the configured output directory.
///
/// On a stage failure the error is returned with the stage identity and a
/// report marked `failed` is still written; no pattern or plot files are
/// emitted.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunReport> {
    fs::create_dir_all(&config.out_dir)?;
    let report_path = config.out_dir.join("report.json");
    let pattern_path = config.out_dir.join("pattern.csv");
    let plot_path = config.out_dir.join("plot.csv");

    let base = RunReport {
        status: "ok".into(),
        failed_stage: None,
        error: None,
        seed: config.seed,
        sphere_radius_m: config.sphere_radius_m,
        gate: config.gate,
        band: config.band,
        stages: Vec::new(),
        pattern_stats: None,
        fit: None,
        outputs: None,
    };

    let mut stages = Vec::new();
    match run_stages(config, &mut stages) {
        Ok(chain) => {
            write_pattern_csv(&pattern_path, &chain.pattern)?;
            write_plot_csv(&plot_path, &chain.pattern)?;
            let report = RunReport {
                stages,
                pattern_stats: Some(chain.stats),
                fit: Some(chain.fit),
                outputs: Some(OutputPaths {
                    pattern_csv: pattern_path.display().to_string(),
                    plot_csv: plot_path.display().to_string(),
                    report_json: report_path.display().to_string(),
                }),
                ..base
            };
            write_report(&report_path, &report)?;
            let _ = chain.calibration; // consumed; factors already summarized
            Ok(report)
        }
        Err(err) => {
            let failed_stage = match &err {
                Error::Stage { stage, .. } => stage.to_string(),
                _ => "unknown".into(),
            };
            let report = RunReport {
                status: "failed".into(),
                failed_stage: Some(failed_stage),
                error: Some(err.to_string()),
                stages,
                ..base
            };
            write_report(&report_path, &report)?;
            Err(err)
        }
    }
}

/// Write plot data (`angle_deg,rcs_dbsm`, -60 dBsm floor) for a pattern.
pub fn emit_plot_data(path: impl AsRef<Path>, pattern: &RcsPattern) -> Result<()> {
    write_plot_csv(path, pattern)
}

/// Calibrated per-frequency RCS of one sweep — exposed for the per-stage CLI.
pub fn calibrate_sweep(
    sweep: &crate::sweep::FrequencySweep,
    cal: &CalibrationReference,
) -> Result<Vec<f64>> {
    apply_calibration(sweep, cal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_apply() {
        let json = r#"{
            "scan": "scan.csv",
            "background": "bg.csv",
            "sphere_scan": "sphere.csv",
            "sphere_radius_m": 0.1524,
            "gate": {"start_s": 1e-8, "stop_s": 2e-8},
            "band": {"start_hz": 24.9e9, "stop_hz": 25.1e9}
        }"#;
        let config: PipelineConfig = serde_json::from_str(json).unwrap();
        assert_eq!(config.gate.alpha, 0.25);
        assert_eq!(config.gate.zero_pad_factor, 8);
        assert_eq!(config.models, ModelKind::ALL.to_vec());
        assert_eq!(config.out_dir, PathBuf::from("out"));
        assert_eq!(config.seed, 0);
    }

    #[test]
    fn stage_list_is_the_documented_order() {
        assert_eq!(
            STAGES,
            [
                "background_subtract",
                "to_time_domain",
                "range_gate",
                "to_frequency_domain",
                "calibration",
                "pattern",
                "average",
                "model_selection",
            ]
        );
    }

    #[test]
    fn fit_report_lists_ok_then_skipped() {
        use crate::stats::{select_model, RcsSamples};
        // constant samples: only Rayleigh fits
        let samples = RcsSamples::new(vec![0.3; 12]).unwrap();
        let ranking = select_model(&samples).unwrap();
        let report = FitReport::from_ranking(&ranking, samples.len());
        assert_eq!(report.best, "rayleigh");
        assert_eq!(report.fitting_scale, "linear_m2");
        assert_eq!(report.sample_count, 12);
        assert_eq!(report.models.len(), 3);
        assert_eq!(report.models[0].status, "ok");
        assert!(report.models.iter().filter(|m| m.status == "skipped").count() == 2);
    }
}
