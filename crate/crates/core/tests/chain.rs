//! Cross-module chain tests: simulator → gating → calibration → pattern,
//! checked against analytic oracles, plus pipeline runs on real files.

use num_complex::Complex64;
use rcs_core::calibration::{build_calibration, pattern_from_scan};
use rcs_core::gating::{background_subtract, range_gate, to_frequency_domain, to_time_domain};
use rcs_core::io::{read_pattern_csv, write_scan_csv};
use rcs_core::mie::{sphere_rcs_exact, sphere_rcs_optical, SphereSpec};
use rcs_core::pipeline::{run_pipeline, BandConfig, GateConfig, PipelineConfig, STAGES};
use rcs_core::scatter::{
    coherent_rcs, synth_background_scan, synth_scan, ChamberArtifacts, ScanGeometry,
    ScatteringCenter, SweepConfig, TargetModel, Tone,
};
use rcs_core::sweep::{AzimuthScan, FrequencySweep};
use rcs_core::{to_dbsm, wavelength, SPEED_OF_LIGHT};

const FREQ_START: f64 = 24.5e9;
const FREQ_STOP: f64 = 25.5e9;
const N_POINTS: usize = 201;
const ZPF: usize = 8;

fn sweep_cfg() -> SweepConfig {
    SweepConfig {
        freq_start_hz: FREQ_START,
        freq_stop_hz: FREQ_STOP,
        n_points: N_POINTS,
    }
}

fn three_center_target() -> TargetModel {
    TargetModel::new(
        "three-center",
        vec![
            ScatteringCenter::new(0.09, 0.10, 0.00),
            ScatteringCenter::new(0.02, -0.06, 0.07),
            ScatteringCenter::new(0.01, 0.02, -0.11),
        ],
    )
    .unwrap()
}

fn chamber() -> ChamberArtifacts {
    ChamberArtifacts {
        leakage: Tone {
            amplitude: 0.5,
            delay_s: 0.0,
        },
        coupling: Tone {
            amplitude: 0.2,
            delay_s: 2e-9,
        },
        // behind the turntable: longer path than the target
        background_centers: vec![ScatteringCenter::new(0.04, -1.5, 0.3)],
        noise_std: 0.0,
        seed: 7,
    }
}

/// Gate bracketing the turntable return (two-way delay ≈ 12.2 ns).
fn gate() -> GateConfig {
    GateConfig {
        start_s: 9.5e-9,
        stop_s: 15e-9,
        alpha: 0.25,
        zero_pad_factor: ZPF,
    }
}

/// Sphere capture at the turntable: √σ_exact(f) with the two-way phase of the
/// antenna–axis path, so the return sits inside the gate.
fn phased_sphere_sweep(sphere: &SphereSpec, geometry: &ScanGeometry) -> FrequencySweep {
    let cfg = sweep_cfg();
    let samples: Vec<Complex64> = cfg
        .grid()
        .iter()
        .map(|&f| {
            let k = 2.0 * std::f64::consts::PI * f / SPEED_OF_LIGHT;
            let amp = sphere_rcs_exact(sphere, f).unwrap().sqrt();
            let phase = -2.0 * k * geometry.antenna_range_m;
            amp * Complex64::new(phase.cos(), phase.sin())
        })
        .collect();
    FrequencySweep::new(cfg.grid(), samples).unwrap()
}

/// Run one sweep through subtract → time → gate → freq.
fn process_sweep(
    sweep: &FrequencySweep,
    background: &FrequencySweep,
    g: &GateConfig,
) -> FrequencySweep {
    let sub = background_subtract(sweep, background).unwrap();
    let profile = to_time_domain(&sub, g.zero_pad_factor).unwrap();
    let gated = range_gate(&profile, g.start_s, g.stop_s, g.alpha).unwrap();
    to_frequency_domain(&gated, sweep.len()).unwrap()
}

#[test]
fn gated_calibrated_chain_recovers_coherent_rcs() {
    // Noise-free full chain with leakage, coupling, and clutter: the gated,
    // sphere-calibrated output must match the analytic coherent sum.
    let target = three_center_target();
    let geometry = ScanGeometry::default();
    let artifacts = chamber();
    let g = gate();
    let sphere = SphereSpec::new(0.1524).unwrap();

    let scan = synth_scan(&target, &geometry, &sweep_cfg(), &artifacts).unwrap();
    let background = synth_background_scan(&geometry, &sweep_cfg(), &artifacts).unwrap();

    // sphere capture processed through the same chain (clutter-free capture,
    // so subtract a zero background, then gate)
    let sphere_raw = phased_sphere_sweep(&sphere, &geometry);
    let zero_bg = sphere_raw
        .with_samples(vec![Complex64::new(0.0, 0.0); sphere_raw.len()])
        .unwrap();
    let sphere_gated = process_sweep(&sphere_raw, &zero_bg, &g);
    let cal = build_calibration(&sphere_gated, &sphere).unwrap();

    let gated_sweeps: Vec<FrequencySweep> = scan
        .sweeps()
        .iter()
        .zip(background.sweeps())
        .map(|(s, b)| process_sweep(s, b, &g))
        .collect();
    let gated_scan = AzimuthScan::new(scan.angles_deg().to_vec(), gated_sweeps).unwrap();

    // per-frequency comparison across the central band at every angle
    let band = (24.7e9, 25.3e9);
    let idx = gated_scan.sweeps()[0].band_indices(band.0, band.1);
    let mut sq_sum = 0.0;
    let mut count = 0usize;
    for (angle, sweep) in gated_scan.angles_deg().iter().zip(gated_scan.sweeps()) {
        let sigma = rcs_core::calibration::apply_calibration(sweep, &cal).unwrap();
        for &i in &idx {
            let f = sweep.freqs_hz()[i];
            let truth = coherent_rcs(&target, f, *angle, &geometry).unwrap();
            let err_db = to_dbsm(sigma[i]) - to_dbsm(truth);
            sq_sum += err_db * err_db;
            count += 1;
        }
    }
    let rms_db = (sq_sum / count as f64).sqrt();
    assert!(rms_db <= 0.5, "per-frequency RMS error {rms_db} dB");

    // band-averaged pattern against the band-averaged analytic oracle
    let pattern = pattern_from_scan(&gated_scan, &cal, band).unwrap();
    let mut sq_sum = 0.0;
    for (angle, rcs) in pattern.angles_deg().iter().zip(pattern.rcs_m2()) {
        let truth: f64 = idx
            .iter()
            .map(|&i| {
                coherent_rcs(&target, gated_scan.freqs_hz()[i], *angle, &geometry).unwrap()
            })
            .sum::<f64>()
            / idx.len() as f64;
        let err_db = to_dbsm(*rcs) - to_dbsm(truth);
        sq_sum += err_db * err_db;
    }
    let pattern_rms_db = (sq_sum / pattern.len() as f64).sqrt();
    assert!(pattern_rms_db <= 0.5, "pattern RMS error {pattern_rms_db} dB");
}

#[test]
fn pattern_peaks_where_centers_align_in_range() {
    // A millimeter-scale cluster keeps every pairwise range difference below
    // λ/2 across all angles, so the band-mean pattern has a single wide
    // maximum where the centers pull into range alignment — no narrow
    // mod-wavelength coincidence lobes. The pattern's maximum must land on
    // the angle a dense analytic search finds. The plane-wave monostatic
    // model is exactly 180°-periodic (cross terms are even in ΔR), so
    // agreement is checked modulo 180°.
    let target = TargetModel::new(
        "cluster",
        vec![
            ScatteringCenter::new(0.25, 0.002, 0.0),
            ScatteringCenter::new(0.25, 0.002, 0.0015),
            ScatteringCenter::new(0.04, -0.001, -0.002),
        ],
    )
    .unwrap();
    let geometry = ScanGeometry::default();
    let scan = synth_scan(&target, &geometry, &sweep_cfg(), &ChamberArtifacts::none()).unwrap();

    // identity calibration: reference power equals the sphere truth
    let sphere = SphereSpec::new(0.1524).unwrap();
    let cfg = sweep_cfg();
    let ideal: Vec<Complex64> = cfg
        .grid()
        .iter()
        .map(|&f| Complex64::new(sphere_rcs_exact(&sphere, f).unwrap().sqrt(), 0.0))
        .collect();
    let cal = build_calibration(&FrequencySweep::new(cfg.grid(), ideal).unwrap(), &sphere).unwrap();

    let band = (24.7e9, 25.3e9);
    let pattern = pattern_from_scan(&scan, &cal, band).unwrap();
    let (best_angle, best_val) = pattern
        .angles_deg()
        .iter()
        .zip(pattern.rcs_m2())
        .fold((0.0, 0.0), |acc, (&a, &r)| if r > acc.1 { (a, r) } else { acc });

    // dense analytic band-mean search at 0.25° resolution
    let idx = scan.sweeps()[0].band_indices(band.0, band.1);
    let freqs = scan.freqs_hz();
    let mut dense_best = (0.0, 0.0);
    for step in 0..1440 {
        let angle = step as f64 * 0.25;
        let mean: f64 = idx
            .iter()
            .map(|&i| coherent_rcs(&target, freqs[i], angle, &geometry).unwrap())
            .sum::<f64>()
            / idx.len() as f64;
        if mean > dense_best.1 {
            dense_best = (angle, mean);
        }
    }

    let half_turn_distance = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(180.0);
        d.min(180.0 - d)
    };
    assert!(
        half_turn_distance(best_angle, dense_best.0) <= 2.0,
        "pattern max at {best_angle}°, analytic max at {}°",
        dense_best.0
    );
    // the discrete sample cannot beat the dense peak
    assert!(best_val <= dense_best.1 * (1.0 + 1e-9));
    assert!(best_val >= dense_best.1 * 0.99, "{best_val} vs {}", dense_best.1);
}

// -- pipeline runs over real files --

struct SceneFiles {
    dir: tempfile::TempDir,
    config: PipelineConfig,
}

/// Write scan/background/sphere CSVs for a synthetic scene and assemble the
/// matching pipeline config.
fn stage_scene(
    target: &TargetModel,
    artifacts: &ChamberArtifacts,
    gate: GateConfig,
    band: BandConfig,
    sphere_rcs_m2: f64,
) -> SceneFiles {
    let dir = tempfile::tempdir().unwrap();
    let geometry = ScanGeometry::default();
    let cfg = sweep_cfg();

    let scan = synth_scan(target, &geometry, &cfg, artifacts).unwrap();
    let background = synth_background_scan(&geometry, &cfg, artifacts).unwrap();
    // the calibration sphere measured in the same chamber: a point return of
    // the sphere's plateau RCS at the turntable axis
    let sphere_target = TargetModel::new(
        "sphere",
        vec![ScatteringCenter::new(sphere_rcs_m2, 0.0, 0.0)],
    )
    .unwrap();
    let sphere_scan = synth_scan(&sphere_target, &geometry, &cfg, artifacts).unwrap();

    let scan_path = dir.path().join("scan.csv");
    let bg_path = dir.path().join("background.csv");
    let sphere_path = dir.path().join("sphere.csv");
    write_scan_csv(&scan_path, &scan).unwrap();
    write_scan_csv(&bg_path, &background).unwrap();
    write_scan_csv(&sphere_path, &sphere_scan).unwrap();

    let config = PipelineConfig {
        scan: scan_path,
        background: bg_path,
        sphere_scan: sphere_path,
        sphere_radius_m: 0.1524,
        gate,
        band,
        models: rcs_core::stats::ModelKind::ALL.to_vec(),
        out_dir: dir.path().join("out"),
        seed: 7,
    };
    SceneFiles { dir, config }
}

#[test]
fn pipeline_runs_and_reports_every_stage() {
    let mut artifacts = chamber();
    artifacts.noise_std = 0.005;
    let scene = stage_scene(
        &three_center_target(),
        &artifacts,
        gate(),
        BandConfig {
            start_hz: 24.7e9,
            stop_hz: 25.3e9,
        },
        sphere_rcs_optical(&SphereSpec::new(0.1524).unwrap()),
    );

    let report = run_pipeline(&scene.config).unwrap();
    assert_eq!(report.status, "ok");
    let executed: Vec<&str> = report.stages.iter().map(|s| s.stage.as_str()).collect();
    assert_eq!(executed, STAGES.to_vec());

    let stats = report.pattern_stats.as_ref().unwrap();
    assert_eq!(stats.n_angles, 180);
    assert!(stats.mean_m2 > 0.0);
    assert!(stats.min_m2 <= stats.mean_m2 && stats.mean_m2 <= stats.max_m2);

    let fit = report.fit.as_ref().unwrap();
    assert_eq!(fit.sample_count, 180);
    assert_eq!(fit.fitting_scale, "linear_m2");
    assert!(!fit.best.is_empty());

    // outputs exist and the pattern round-trips
    let out = scene.config.out_dir.clone();
    assert!(out.join("report.json").exists());
    assert!(out.join("plot.csv").exists());
    let pattern = read_pattern_csv(out.join("pattern.csv")).unwrap();
    assert_eq!(pattern.len(), 180);

    // gate keeps only a small share of the raw energy (leakage dominates raw)
    let gate_stage = &report.stages[2];
    let ratio = gate_stage.gate_energy_ratio.unwrap();
    assert!(ratio > 0.0 && ratio < 1.0, "gate energy ratio {ratio}");

    drop(scene.dir);
}

#[test]
fn pipeline_is_deterministic_byte_for_byte() {
    let mut artifacts = chamber();
    artifacts.noise_std = 0.005;
    let scene = stage_scene(
        &three_center_target(),
        &artifacts,
        gate(),
        BandConfig {
            start_hz: 24.7e9,
            stop_hz: 25.3e9,
        },
        0.0729,
    );

    run_pipeline(&scene.config).unwrap();
    let out = &scene.config.out_dir;
    let first: Vec<Vec<u8>> = ["report.json", "pattern.csv", "plot.csv"]
        .iter()
        .map(|f| std::fs::read(out.join(f)).unwrap())
        .collect();

    run_pipeline(&scene.config).unwrap();
    for (name, before) in ["report.json", "pattern.csv", "plot.csv"].iter().zip(&first) {
        let after = std::fs::read(out.join(name)).unwrap();
        assert_eq!(before, &after, "{name} changed between identical runs");
    }

    drop(scene.dir);
}

#[test]
fn pipeline_failure_stops_at_the_failing_stage() {
    let scene = stage_scene(
        &three_center_target(),
        &chamber(),
        gate(),
        BandConfig {
            start_hz: 24.7e9,
            stop_hz: 25.3e9,
        },
        0.0729,
    );
    let mut config = scene.config.clone();
    config.background = scene.dir.path().join("missing.csv");
    config.out_dir = scene.dir.path().join("out_fail");

    let err = run_pipeline(&config).unwrap_err();
    assert!(matches!(
        err,
        rcs_core::Error::Stage {
            stage: "background_subtract",
            ..
        }
    ));

    // failed report written, no pattern emitted
    let report_text = std::fs::read_to_string(config.out_dir.join("report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&report_text).unwrap();
    assert_eq!(report["status"], "failed");
    assert_eq!(report["failed_stage"], "background_subtract");
    assert!(!config.out_dir.join("pattern.csv").exists());
    assert!(!config.out_dir.join("plot.csv").exists());

    drop(scene.dir);
}

#[test]
fn all_pass_gate_with_self_calibration_matches_analytic_mean() {
    // No artifacts, no noise, a gate spanning the whole profile, and a
    // calibration built from the sphere's own truth: the pipeline must be
    // analytically transparent.
    let dir = tempfile::tempdir().unwrap();
    let geometry = ScanGeometry::default();
    let cfg = sweep_cfg();
    let target = three_center_target();
    let clean = ChamberArtifacts::none();

    let scan = synth_scan(&target, &geometry, &cfg, &clean).unwrap();
    let background = synth_background_scan(&geometry, &cfg, &clean).unwrap();
    let sphere = SphereSpec::new(0.1524).unwrap();
    let sphere_sweep = phased_sphere_sweep(&sphere, &geometry);
    let sphere_scan = AzimuthScan::new(vec![0.0], vec![sphere_sweep]).unwrap();

    let scan_path = dir.path().join("scan.csv");
    let bg_path = dir.path().join("background.csv");
    let sphere_path = dir.path().join("sphere.csv");
    write_scan_csv(&scan_path, &scan).unwrap();
    write_scan_csv(&bg_path, &background).unwrap();
    write_scan_csv(&sphere_path, &sphere_scan).unwrap();

    // all-pass gate: rectangular over the entire padded profile
    let dt = 1.0 / ((N_POINTS * ZPF) as f64 * scan.sweeps()[0].freq_step_hz());
    let max_t = (N_POINTS * ZPF - 1) as f64 * dt;
    let band = BandConfig {
        start_hz: FREQ_START,
        stop_hz: FREQ_STOP,
    };
    let config = PipelineConfig {
        scan: scan_path,
        background: bg_path,
        sphere_scan: sphere_path,
        sphere_radius_m: 0.1524,
        gate: GateConfig {
            start_s: 0.0,
            stop_s: max_t,
            alpha: 0.0,
            zero_pad_factor: ZPF,
        },
        band,
        models: rcs_core::stats::ModelKind::ALL.to_vec(),
        out_dir: dir.path().join("out"),
        seed: 0,
    };

    let report = run_pipeline(&config).unwrap();
    let stats = report.pattern_stats.unwrap();

    // analytic oracle: band mean of the coherent sum, averaged over angles
    let freqs = scan.freqs_hz();
    let mut total = 0.0;
    for &angle in scan.angles_deg() {
        let band_mean: f64 = freqs
            .iter()
            .map(|&f| coherent_rcs(&target, f, angle, &geometry).unwrap())
            .sum::<f64>()
            / freqs.len() as f64;
        total += band_mean;
    }
    let analytic_mean = total / scan.len() as f64;
    let diff_db = (stats.mean_dbsm - to_dbsm(analytic_mean)).abs();
    assert!(diff_db < 1e-6, "mean dBsm off by {diff_db} dB");

    drop(dir);
}

#[test]
fn wavelength_helper_matches_c_over_f() {
    assert!((wavelength(25e9) - SPEED_OF_LIGHT / 25e9).abs() < 1e-18);
}
