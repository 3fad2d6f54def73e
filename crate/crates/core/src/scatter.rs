//! Coherent scattering-center targets and synthetic chamber sweeps.
//!
//! A complex target is modeled as point scatterers that add coherently: the
//! total RCS at one look angle and frequency is `|Σ √σ_i · e^{-j2kR_i}|²`,
//! with `R_i` the monostatic range of each (rotated) center. On top of the
//! target return, [`synth_sweep`] layers the artifacts a real compact-range
//! capture contains — transceiver leakage, antenna coupling, fixed chamber
//! background scatterers, and receiver noise — so the processing chain can be
//! exercised end to end against a known ground truth.
//!
//! The range model is plane-wave: the collimated beam makes `R_i` vary only
//! along the incidence axis, and no spherical-spreading amplitude factor is
//! applied. Scatterers are isotropic (σ_i fixed); all angle dependence comes
//! from geometry.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::{AzimuthScan, FrequencySweep};
use crate::SPEED_OF_LIGHT;

/// One isotropic point scatterer in the turntable plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringCenter {
    /// RCS σ_i in m².
    pub rcs_m2: f64,
    /// Position in the target-local frame, meters.
    pub x_m: f64,
    /// Position in the target-local frame, meters.
    pub y_m: f64,
}

impl ScatteringCenter {
    pub fn new(rcs_m2: f64, x_m: f64, y_m: f64) -> Self {
        ScatteringCenter { rcs_m2, x_m, y_m }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rcs_m2 >= 0.0) || !self.rcs_m2.is_finite() {
            return Err(Error::Domain(format!(
                "scattering-center RCS must be >= 0, got {}",
                self.rcs_m2
            )));
        }
        if !self.x_m.is_finite() || !self.y_m.is_finite() {
            return Err(Error::Domain("center position must be finite".into()));
        }
        Ok(())
    }
}

/// A synthetic target: a named set of scattering centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetModel {
    pub name: String,
    pub centers: Vec<ScatteringCenter>,
}

impl TargetModel {
    pub fn new(name: impl Into<String>, centers: Vec<ScatteringCenter>) -> Result<Self> {
        let model = TargetModel {
            name: name.into(),
            centers,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.centers.is_empty() {
            return Err(Error::Domain(format!(
                "target '{}' has no scattering centers",
                self.name
            )));
        }
        self.centers.iter().try_for_each(|c| c.validate())
    }
}

/// Turntable scan geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGeometry {
    /// Meters from the turntable axis to the effective phase reference.
    #[serde(default = "default_antenna_range")]
    pub antenna_range_m: f64,
    #[serde(default)]
    pub azimuth_start_deg: f64,
    #[serde(default = "default_azimuth_stop")]
    pub azimuth_stop_deg: f64,
    #[serde(default = "default_azimuth_step")]
    pub azimuth_step_deg: f64,
}

fn default_antenna_range() -> f64 {
    1.8288 // 6 feet
}
fn default_azimuth_stop() -> f64 {
    358.0
}
fn default_azimuth_step() -> f64 {
    2.0
}

impl Default for ScanGeometry {
    /// Full azimuth circle [0°, 360°) in 2° steps, antennas 6 feet out.
    fn default() -> Self {
        ScanGeometry {
            antenna_range_m: default_antenna_range(),
            azimuth_start_deg: 0.0,
            azimuth_stop_deg: default_azimuth_stop(),
            azimuth_step_deg: default_azimuth_step(),
        }
    }
}

impl ScanGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.antenna_range_m > 0.0) || !self.antenna_range_m.is_finite() {
            return Err(Error::Domain(format!(
                "antenna range must be positive, got {}",
                self.antenna_range_m
            )));
        }
        if !(self.azimuth_step_deg > 0.0) {
            return Err(Error::Domain(format!(
                "azimuth step must be positive, got {}",
                self.azimuth_step_deg
            )));
        }
        let span = self.azimuth_stop_deg - self.azimuth_start_deg;
        if span < 0.0 {
            return Err(Error::Domain("azimuth stop must be >= start".into()));
        }
        let steps = span / self.azimuth_step_deg;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::Domain(format!(
                "azimuth span {span}° is not an integer multiple of step {}°",
                self.azimuth_step_deg
            )));
        }
        Ok(())
    }

    /// The scan's look angles, `start..=stop` inclusive.
    pub fn angles_deg(&self) -> Vec<f64> {
        let steps =
            ((self.azimuth_stop_deg - self.azimuth_start_deg) / self.azimuth_step_deg).round()
                as usize;
        (0..=steps)
            .map(|i| self.azimuth_start_deg + i as f64 * self.azimuth_step_deg)
            .collect()
    }
}

/// A single direct-path tone: a fixed-amplitude return at a fixed two-way delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub amplitude: f64,
    pub delay_s: f64,
}

impl Tone {
    pub const OFF: Tone = Tone {
        amplitude: 0.0,
        delay_s: 0.0,
    };

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::Domain(format!(
                "{what} amplitude must be >= 0, got {}",
                self.amplitude
            )));
        }
        if !(self.delay_s >= 0.0) || !self.delay_s.is_finite() {
            return Err(Error::Domain(format!(
                "{what} delay must be >= 0, got {}",
                self.delay_s
            )));
        }
        Ok(())
    }
}

/// Non-target contributions to a captured sweep.
///
/// `noise_std` is the standard deviation of the circularly-symmetric complex
/// noise sample (E|n|² = noise_std²); each quadrature gets `noise_std/√2`.
/// Noise is seeded and each capture draws from a stream derived from the look
/// angle, so scans are reproducible and schedule-independent. Background
/// captures use a distinct stream: an empty-chamber measurement is an
/// independent observation, not a replay of the target capture's noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChamberArtifacts {
    #[serde(default = "tone_off")]
    pub leakage: Tone,
    #[serde(default = "tone_off")]
    pub coupling: Tone,
    #[serde(default)]
    pub background_centers: Vec<ScatteringCenter>,
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default)]
    pub seed: u64,
}

fn tone_off() -> Tone {
    Tone::OFF
}

impl Default for ChamberArtifacts {
    fn default() -> Self {
        ChamberArtifacts::none()
    }
}

impl ChamberArtifacts {
    /// No leakage, coupling, background, or noise.
    pub fn none() -> Self {
        ChamberArtifacts {
            leakage: Tone::OFF,
            coupling: Tone::OFF,
            background_centers: Vec::new(),
            noise_std: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.leakage.validate("leakage")?;
        self.coupling.validate("coupling")?;
        self.background_centers
            .iter()
            .try_for_each(|c| c.validate())?;
        if !(self.noise_std >= 0.0) || !self.noise_std.is_finite() {
            return Err(Error::Domain(format!(
                "noise_std must be >= 0, got {}",
                self.noise_std
            )));
        }
        Ok(())
    }
}

/// Uniform frequency grid for one sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub freq_start_hz: f64,
    pub freq_stop_hz: f64,
    pub n_points: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.freq_start_hz > 0.0) || !(self.freq_stop_hz > self.freq_start_hz) {
            return Err(Error::Domain(format!(
                "need freq_stop > freq_start > 0, got [{}, {}]",
                self.freq_start_hz, self.freq_stop_hz
            )));
        }
        if self.n_points < 2 {
            return Err(Error::Domain(format!(
                "a sweep needs at least 2 points, got {}",
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let step = (self.freq_stop_hz - self.freq_start_hz) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| self.freq_start_hz + i as f64 * step)
            .collect()
    }
}

/// Monostatic range of a center after rotating the target by `look_angle_deg`
/// about the turntable axis (plane-wave model: only the incidence-axis
/// component matters).
fn monostatic_range(center: &ScatteringCenter, look_angle_deg: f64, geometry: &ScanGeometry) -> f64 {
    let phi = look_angle_deg.rem_euclid(360.0).to_radians();
    let (sin_phi, cos_phi) = phi.sin_cos();
    let x_rot = center.x_m * cos_phi - center.y_m * sin_phi;
    geometry.antenna_range_m - x_rot
}

/// Coherent field sum Σ √σ_i · e^{-j2kR_i} for a set of centers.
fn coherent_field(
    centers: &[ScatteringCenter],
    freq_hz: f64,
    look_angle_deg: f64,
    geometry: &ScanGeometry,
) -> Complex64 {
    let k = 2.0 * std::f64::consts::PI * freq_hz / SPEED_OF_LIGHT;
    let mut field = Complex64::new(0.0, 0.0);
    for c in centers {
        let r = monostatic_range(c, look_angle_deg, geometry);
        let phase = -2.0 * k * r;
        field += c.rcs_m2.sqrt() * Complex64::new(phase.cos(), phase.sin());
    }
    field
}

/// Total coherent RCS of a target at one look angle and frequency, in m².
pub fn coherent_rcs(
    target: &TargetModel,
    freq_hz: f64,
    look_angle_deg: f64,
    geometry: &ScanGeometry,
) -> Result<f64> {
    target.validate()?;
    geometry.validate()?;
    if !(freq_hz > 0.0) || !freq_hz.is_finite() {
        return Err(Error::Domain(format!(
            "frequency must be positive, got {freq_hz}"
        )));
    }
    Ok(coherent_field(&target.centers, freq_hz, look_angle_deg, geometry).norm_sqr())
}

/// Capture kind. A target capture sees everything; an empty-chamber capture
/// sees only the chamber reflections and noise — leakage and coupling are
/// direct-path terms the range gate is responsible for, so background
/// subtraction must not be what removes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Capture {
    Target,
    Background,
}

fn noise_stream(look_angle_deg: f64, capture: Capture) -> u64 {
    let bits = look_angle_deg.rem_euclid(360.0).to_bits();
    match capture {
        Capture::Target => bits,
        Capture::Background => bits ^ 0x9e37_79b9_7f4a_7c15,
    }
}

fn synth_sweep_inner(
    target: Option<&TargetModel>,
    look_angle_deg: f64,
    geometry: &ScanGeometry,
    sweep: &SweepConfig,
    artifacts: &ChamberArtifacts,
    capture: Capture,
) -> Result<FrequencySweep> {
    geometry.validate()?;
    sweep.validate()?;
    artifacts.validate()?;
    if let Some(t) = target {
        t.validate()?;
    }

    let freqs = sweep.grid();
    let mut samples = Vec::with_capacity(freqs.len());
    let mut rng = (artifacts.noise_std > 0.0).then(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(artifacts.seed);
        rng.set_stream(noise_stream(look_angle_deg, capture));
        let per_quadrature = artifacts.noise_std / std::f64::consts::SQRT_2;
        (rng, Normal::new(0.0, per_quadrature).expect("validated std"))
    });

    for &f in &freqs {
        let mut s = Complex64::new(0.0, 0.0);
        if let Some(t) = target {
            s += coherent_field(&t.centers, f, look_angle_deg, geometry);
        }
        if capture == Capture::Target {
            for tone in [&artifacts.leakage, &artifacts.coupling] {
                if tone.amplitude > 0.0 {
                    let phase = -2.0 * std::f64::consts::PI * f * tone.delay_s;
                    s += tone.amplitude * Complex64::new(phase.cos(), phase.sin());
                }
            }
        }
        if !artifacts.background_centers.is_empty() {
            // Chamber-fixed clutter: same form as the target but never rotated.
            s += coherent_field(&artifacts.background_centers, f, 0.0, geometry);
        }
        if let Some((rng, normal)) = rng.as_mut() {
            s += Complex64::new(normal.sample(rng), normal.sample(rng));
        }
        samples.push(s);
    }
    FrequencySweep::new(freqs, samples)
}

/// Synthesize the sweep a VNA would capture at one look angle: target return
/// plus leakage, coupling, background, and seeded noise.
pub fn synth_sweep(
    target: &TargetModel,
    look_angle_deg: f64,
    geometry: &ScanGeometry,
    sweep: &SweepConfig,
    artifacts: &ChamberArtifacts,
) -> Result<FrequencySweep> {
    synth_sweep_inner(
        Some(target),
        look_angle_deg,
        geometry,
        sweep,
        artifacts,
        Capture::Target,
    )
}

/// Synthesize a full azimuth scan: one [`synth_sweep`] per look angle.
pub fn synth_scan(
    target: &TargetModel,
    geometry: &ScanGeometry,
    sweep: &SweepConfig,
    artifacts: &ChamberArtifacts,
) -> Result<AzimuthScan> {
    geometry.validate()?;
    let angles = geometry.angles_deg();
    let sweeps = angles
        .iter()
        .map(|&a| synth_sweep_inner(Some(target), a, geometry, sweep, artifacts, Capture::Target))
        .collect::<Result<Vec<_>>>()?;
    AzimuthScan::new(angles, sweeps)
}

/// Synthesize the empty-chamber scan of the same scene: the chamber's fixed
/// reflections and an independent noise realization. Leakage and coupling are
/// direct-path terms, not chamber reflections; they remain in the target
/// capture for the range gate to remove.
pub fn synth_background_scan(
    geometry: &ScanGeometry,
    sweep: &SweepConfig,
    artifacts: &ChamberArtifacts,
) -> Result<AzimuthScan> {
    geometry.validate()?;
    let angles = geometry.angles_deg();
    let sweeps = angles
        .iter()
        .map(|&a| synth_sweep_inner(None, a, geometry, sweep, artifacts, Capture::Background))
        .collect::<Result<Vec<_>>>()?;
    AzimuthScan::new(angles, sweeps)
}
