//! File interchange formats.
//!
//! CSV carries the measurement data with exact column contracts so files are
//! inspectable and diffable:
//!
//! - scan: `angle_deg,freq_hz,re,im`, rows sorted by (angle, freq)
//! - pattern: `angle_deg,rcs_m2,rcs_dbsm`
//! - plot data: `angle_deg,rcs_dbsm` (dBsm floored at -60)
//!
//! Floats are written in Rust's shortest round-trip form, so write → read is
//! value-exact. Scene and pipeline configs are JSON.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calibration::RcsPattern;
use crate::error::{Error, Result};
use crate::scatter::{ChamberArtifacts, ScanGeometry, SweepConfig, TargetModel};
use crate::sweep::{AzimuthScan, FrequencySweep};
use crate::to_dbsm_floored;

/// A complete synthetic-measurement description: what is on the turntable,
/// how it is scanned, and what the chamber adds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub target: TargetModel,
    #[serde(default)]
    pub geometry: ScanGeometry,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub artifacts: ChamberArtifacts,
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        self.target.validate()?;
        self.geometry.validate()?;
        self.sweep.validate()?;
        self.artifacts.validate()
    }
}

/// Load and validate a scene description from JSON.
pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    let file = File::open(path.as_ref())?;
    let scene: Scene = serde_json::from_reader(BufReader::new(file))?;
    scene.validate()?;
    Ok(scene)
}

/// Write a scan as `angle_deg,freq_hz,re,im` rows sorted by (angle, freq).
pub fn write_scan_csv(path: impl AsRef<Path>, scan: &AzimuthScan) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    writeln!(w, "angle_deg,freq_hz,re,im")?;
    for (angle, sweep) in scan.angles_deg().iter().zip(scan.sweeps()) {
        for (f, s) in sweep.freqs_hz().iter().zip(sweep.samples()) {
            writeln!(w, "{},{},{},{}", angle, f, s.re, s.im)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn parse_field(raw: &str, line_no: usize, what: &str) -> Result<f64> {
    raw.trim().parse::<f64>().map_err(|_| {
        Error::Format(format!("line {line_no}: cannot parse {what} from '{raw}'"))
    })
}

/// Read a scan written by [`write_scan_csv`]. Angles must appear in strictly
/// increasing blocks and every block must share one frequency grid.
pub fn read_scan_csv(path: impl AsRef<Path>) -> Result<AzimuthScan> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();

    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Format(format!("{}: empty file", path.display()))),
    };
    if header.trim() != "angle_deg,freq_hz,re,im" {
        return Err(Error::Format(format!(
            "{}: expected header 'angle_deg,freq_hz,re,im', got '{}'",
            path.display(),
            header.trim()
        )));
    }

    let mut angles: Vec<f64> = Vec::new();
    let mut sweeps: Vec<FrequencySweep> = Vec::new();
    let mut cur_angle: Option<f64> = None;
    let mut freqs: Vec<f64> = Vec::new();
    let mut samples: Vec<Complex64> = Vec::new();

    let mut flush_block = |angle: f64, freqs: &mut Vec<f64>, samples: &mut Vec<Complex64>| -> Result<()> {
        let sweep = FrequencySweep::new(std::mem::take(freqs), std::mem::take(samples))?;
        angles.push(angle);
        sweeps.push(sweep);
        Ok(())
    };

    for (idx, line) in lines {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Format(format!(
                "line {line_no}: expected 4 fields, got {}",
                fields.len()
            )));
        }
        let angle = parse_field(fields[0], line_no, "angle_deg")?;
        let freq = parse_field(fields[1], line_no, "freq_hz")?;
        let re = parse_field(fields[2], line_no, "re")?;
        let im = parse_field(fields[3], line_no, "im")?;

        match cur_angle {
            Some(a) if a == angle => {}
            Some(a) => {
                flush_block(a, &mut freqs, &mut samples)?;
                cur_angle = Some(angle);
            }
            None => cur_angle = Some(angle),
        }
        freqs.push(freq);
        samples.push(Complex64::new(re, im));
    }
    match cur_angle {
        Some(a) => flush_block(a, &mut freqs, &mut samples)?,
        None => {
            return Err(Error::Format(format!(
                "{}: no data rows",
                path.display()
            )))
        }
    }
    AzimuthScan::new(angles, sweeps)
}

/// Write a pattern as `angle_deg,rcs_m2,rcs_dbsm` (dBsm floored at -60).
pub fn write_pattern_csv(path: impl AsRef<Path>, pattern: &RcsPattern) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    writeln!(w, "angle_deg,rcs_m2,rcs_dbsm")?;
    for (angle, rcs) in pattern.angles_deg().iter().zip(pattern.rcs_m2()) {
        writeln!(w, "{},{},{}", angle, rcs, to_dbsm_floored(*rcs))?;
    }
    w.flush()?;
    Ok(())
}

/// Read a pattern written by [`write_pattern_csv`]. The linear m² column is
/// authoritative; the dBsm column is presentation only.
pub fn read_pattern_csv(path: impl AsRef<Path>) -> Result<RcsPattern> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();

    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Format(format!("{}: empty file", path.display()))),
    };
    if header.trim() != "angle_deg,rcs_m2,rcs_dbsm" {
        return Err(Error::Format(format!(
            "{}: expected header 'angle_deg,rcs_m2,rcs_dbsm', got '{}'",
            path.display(),
            header.trim()
        )));
    }

    let mut angles = Vec::new();
    let mut rcs = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Format(format!(
                "line {line_no}: expected 3 fields, got {}",
                fields.len()
            )));
        }
        angles.push(parse_field(fields[0], line_no, "angle_deg")?);
        rcs.push(parse_field(fields[1], line_no, "rcs_m2")?);
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "pattern".into());
    RcsPattern::new(angles, rcs, label)
}

/// Write plot data as `angle_deg,rcs_dbsm`, ascending angles, dBsm floored
/// at -60 so zero-RCS angles stay plottable.
pub fn write_plot_csv(path: impl AsRef<Path>, pattern: &RcsPattern) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    writeln!(w, "angle_deg,rcs_dbsm")?;
    for (angle, rcs) in pattern.angles_deg().iter().zip(pattern.rcs_m2()) {
        writeln!(w, "{},{}", angle, format_dbsm(*rcs))?;
    }
    w.flush()?;
    Ok(())
}

/// Floored dBsm rendered for plot files; keeps the exact -60.0 clamp visible.
fn format_dbsm(rcs_m2: f64) -> String {
    format!("{}", to_dbsm_floored(rcs_m2))
}
