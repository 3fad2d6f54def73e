//! Absolute RCS calibration against the PEC-sphere reference.
//!
//! A gated, background-subtracted sweep of the calibration sphere fixes the
//! per-frequency scale factor `C(f) = σ_exact(f) / |S_sphere(f)|²`, with the
//! sphere series as truth. Applying `C(f)·|S_target(f)|²` converts any target
//! sweep processed the same way into absolute m². Calibration is
//! magnitude-only: RCS is a power quantity, so phase is discarded, and any
//! frequency-flat complex system gain cancels exactly.

use crate::error::{Error, Result};
use crate::mie::{classify_region, sphere_rcs_exact, ScatteringRegion, SphereSpec};
use crate::sweep::{AzimuthScan, FrequencySweep};
use crate::to_dbsm;

/// Per-frequency calibration factors tied to a sphere and a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReference {
    factors: Vec<f64>,
    freqs_hz: Vec<f64>,
    sphere: SphereSpec,
    region_warning: bool,
}

impl CalibrationReference {
    /// C(f) per grid point, m² per |S|² unit.
    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn freqs_hz(&self) -> &[f64] {
        &self.freqs_hz
    }

    pub fn sphere(&self) -> &SphereSpec {
        &self.sphere
    }

    /// True when any grid frequency puts the sphere outside the optical
    /// region, where the plateau assumption behind sphere calibration is
    /// weakest.
    pub fn region_warning(&self) -> bool {
        self.region_warning
    }
}

/// Calibrated RCS versus azimuth angle at a stated frequency or band.
#[derive(Debug, Clone, PartialEq)]
pub struct RcsPattern {
    angles_deg: Vec<f64>,
    rcs_m2: Vec<f64>,
    freq_label: String,
}

impl RcsPattern {
    /// Build a pattern, validating that angles are strictly increasing within
    /// [0°, 360°) and every RCS value is non-negative and finite.
    pub fn new(angles_deg: Vec<f64>, rcs_m2: Vec<f64>, freq_label: impl Into<String>) -> Result<Self> {
        if angles_deg.is_empty() || angles_deg.len() != rcs_m2.len() {
            return Err(Error::Format(format!(
                "pattern needs matching non-empty angle/RCS lists, got {} and {}",
                angles_deg.len(),
                rcs_m2.len()
            )));
        }
        if angles_deg.iter().any(|&a| !(0.0..360.0).contains(&a)) {
            return Err(Error::Format("pattern angles must lie in [0, 360)".into()));
        }
        if angles_deg.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Format("pattern angles must be strictly increasing".into()));
        }
        if rcs_m2.iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
            return Err(Error::Format("pattern RCS values must be >= 0 and finite".into()));
        }
        Ok(RcsPattern {
            angles_deg,
            rcs_m2,
            freq_label: freq_label.into(),
        })
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn rcs_m2(&self) -> &[f64] {
        &self.rcs_m2
    }

    pub fn freq_label(&self) -> &str {
        &self.freq_label
    }

    pub fn len(&self) -> usize {
        self.rcs_m2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rcs_m2.is_empty()
    }
}

/// Build the per-frequency calibration from a gated, background-subtracted
/// sphere sweep. Flags (rather than fails) spheres outside the optical region.
pub fn build_calibration(
    sphere_sweep_gated: &FrequencySweep,
    sphere: &SphereSpec,
) -> Result<CalibrationReference> {
    let mut factors = Vec::with_capacity(sphere_sweep_gated.len());
    let mut region_warning = false;
    for (&f, s) in sphere_sweep_gated
        .freqs_hz()
        .iter()
        .zip(sphere_sweep_gated.samples())
    {
        let power = s.norm_sqr();
        if power == 0.0 {
            return Err(Error::DegenerateReference(format!(
                "sphere return is zero at {f} Hz"
            )));
        }
        if classify_region(sphere, f)? != ScatteringRegion::Optical {
            region_warning = true;
        }
        factors.push(sphere_rcs_exact(sphere, f)? / power);
    }
    Ok(CalibrationReference {
        factors,
        freqs_hz: sphere_sweep_gated.freqs_hz().to_vec(),
        sphere: *sphere,
        region_warning,
    })
}

fn check_grid(cal: &CalibrationReference, sweep: &FrequencySweep) -> Result<()> {
    let ok = cal.freqs_hz.len() == sweep.len()
        && cal
            .freqs_hz
            .iter()
            .zip(sweep.freqs_hz())
            .all(|(a, b)| (a - b).abs() <= crate::sweep::GRID_TOLERANCE * a.abs().max(1.0));
    if !ok {
        return Err(Error::Format(
            "sweep grid does not match the calibration grid".into(),
        ));
    }
    Ok(())
}

/// Calibrated per-frequency RCS `σ(f) = C(f)·|S(f)|²` in m².
pub fn apply_calibration(
    target_sweep_gated: &FrequencySweep,
    cal: &CalibrationReference,
) -> Result<Vec<f64>> {
    check_grid(cal, target_sweep_gated)?;
    Ok(target_sweep_gated
        .samples()
        .iter()
        .zip(&cal.factors)
        .map(|(s, c)| c * s.norm_sqr())
        .collect())
}

/// Calibrate a gated scan and reduce each angle to its band-mean RCS
/// (arithmetic mean in linear m² over grid points inside `band_hz`).
pub fn pattern_from_scan(
    scan_gated: &AzimuthScan,
    cal: &CalibrationReference,
    band_hz: (f64, f64),
) -> Result<RcsPattern> {
    let (band_start, band_stop) = band_hz;
    let idx = scan_gated.sweeps()[0].band_indices(band_start, band_stop);
    if idx.is_empty() {
        return Err(Error::Domain(format!(
            "band [{band_start}, {band_stop}] Hz contains no grid points"
        )));
    }
    let mut rcs = Vec::with_capacity(scan_gated.len());
    for sweep in scan_gated.sweeps() {
        let sigma = apply_calibration(sweep, cal)?;
        let mean = idx.iter().map(|&i| sigma[i]).sum::<f64>() / idx.len() as f64;
        rcs.push(mean);
    }
    let label = if idx.len() == 1 {
        format!("{:.4} GHz", scan_gated.freqs_hz()[idx[0]] / 1e9)
    } else {
        format!(
            "{:.4}-{:.4} GHz",
            scan_gated.freqs_hz()[idx[0]] / 1e9,
            scan_gated.freqs_hz()[*idx.last().unwrap()] / 1e9
        )
    };
    RcsPattern::new(scan_gated.angles_deg().to_vec(), rcs, label)
}

/// Arithmetic mean of a pattern in linear m², paired with its dBsm form.
pub fn average_rcs(pattern: &RcsPattern) -> (f64, f64) {
    let mean = pattern.rcs_m2.iter().sum::<f64>() / pattern.rcs_m2.len() as f64;
    (mean, to_dbsm(mean))
}
