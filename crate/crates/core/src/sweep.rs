//! Frequency-domain sweep records: the unit of data captured per look angle,
//! and the azimuth scan that collects them.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for frequency-grid uniformity and grid equality checks.
pub const GRID_TOLERANCE: f64 = 1e-9;

/// Complex transfer-function samples over a uniform frequency grid
/// (one azimuth look).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySweep {
    freqs_hz: Vec<f64>,
    samples: Vec<Complex64>,
}

impl FrequencySweep {
    /// Build a sweep, validating that the grid is strictly increasing and
    /// uniform to [`GRID_TOLERANCE`] relative, and that lengths match.
    pub fn new(freqs_hz: Vec<f64>, samples: Vec<Complex64>) -> Result<Self> {
        if freqs_hz.len() != samples.len() {
            return Err(Error::Format(format!(
                "frequency grid has {} points but {} samples",
                freqs_hz.len(),
                samples.len()
            )));
        }
        if freqs_hz.len() < 2 {
            return Err(Error::Format(
                "a sweep needs at least 2 frequency points".into(),
            ));
        }
        if !(freqs_hz[0] > 0.0) {
            return Err(Error::Format(format!(
                "frequencies must be positive, first is {}",
                freqs_hz[0]
            )));
        }
        let step = (freqs_hz[freqs_hz.len() - 1] - freqs_hz[0]) / (freqs_hz.len() - 1) as f64;
        if !(step > 0.0) {
            return Err(Error::Format("frequency grid must be increasing".into()));
        }
        for w in freqs_hz.windows(2) {
            let d = w[1] - w[0];
            if !(d > 0.0) || (d - step).abs() > GRID_TOLERANCE * step.abs() {
                return Err(Error::Format(format!(
                    "frequency grid is not uniform: step {} vs nominal {}",
                    d, step
                )));
            }
        }
        Ok(FrequencySweep { freqs_hz, samples })
    }

    /// Uniform grid from a start frequency and step.
    pub fn from_grid(freq_start_hz: f64, freq_step_hz: f64, samples: Vec<Complex64>) -> Result<Self> {
        let freqs = (0..samples.len())
            .map(|i| freq_start_hz + i as f64 * freq_step_hz)
            .collect();
        FrequencySweep::new(freqs, samples)
    }

    pub fn freqs_hz(&self) -> &[f64] {
        &self.freqs_hz
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Nominal grid step in Hz.
    pub fn freq_step_hz(&self) -> f64 {
        (self.freqs_hz[self.freqs_hz.len() - 1] - self.freqs_hz[0])
            / (self.freqs_hz.len() - 1) as f64
    }

    /// True when the two sweeps share the same grid to [`GRID_TOLERANCE`] relative.
    pub fn grids_match(&self, other: &FrequencySweep) -> bool {
        self.len() == other.len()
            && self
                .freqs_hz
                .iter()
                .zip(&other.freqs_hz)
                .all(|(a, b)| (a - b).abs() <= GRID_TOLERANCE * a.abs().max(1.0))
    }

    /// Sum of |S(f)|² over the grid.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    /// Same grid, new samples.
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        FrequencySweep::new(self.freqs_hz.clone(), samples)
    }

    /// Indices of grid points inside the inclusive band `[start_hz, stop_hz]`.
    pub fn band_indices(&self, start_hz: f64, stop_hz: f64) -> Vec<usize> {
        let eps = GRID_TOLERANCE * self.freq_step_hz().abs().max(1.0);
        self.freqs_hz
            .iter()
            .enumerate()
            .filter(|(_, &f)| f >= start_hz - eps && f <= stop_hz + eps)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Ordered collection of sweeps indexed by azimuth angle.
#[derive(Debug, Clone, PartialEq)]
pub struct AzimuthScan {
    angles_deg: Vec<f64>,
    sweeps: Vec<FrequencySweep>,
}

impl AzimuthScan {
    /// Build a scan, validating strictly increasing angles, one sweep per
    /// angle, and grid agreement across sweeps.
    pub fn new(angles_deg: Vec<f64>, sweeps: Vec<FrequencySweep>) -> Result<Self> {
        if angles_deg.len() != sweeps.len() {
            return Err(Error::Format(format!(
                "{} angles but {} sweeps",
                angles_deg.len(),
                sweeps.len()
            )));
        }
        if sweeps.is_empty() {
            return Err(Error::Format("a scan needs at least one sweep".into()));
        }
        if angles_deg.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Format("angles must be strictly increasing".into()));
        }
        let first = &sweeps[0];
        if sweeps.iter().skip(1).any(|s| !first.grids_match(s)) {
            return Err(Error::Format(
                "all sweeps in a scan must share one frequency grid".into(),
            ));
        }
        Ok(AzimuthScan { angles_deg, sweeps })
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn sweeps(&self) -> &[FrequencySweep] {
        &self.sweeps
    }

    pub fn len(&self) -> usize {
        self.sweeps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sweeps.is_empty()
    }

    /// Shared frequency grid of every sweep in the scan.
    pub fn freqs_hz(&self) -> &[f64] {
        self.sweeps[0].freqs_hz()
    }

    /// Apply an operation sweep-by-sweep, keeping the angle grid.
    pub fn map_sweeps<F>(&self, mut f: F) -> Result<AzimuthScan>
    where
        F: FnMut(f64, &FrequencySweep) -> Result<FrequencySweep>,
    {
        let sweeps = self
            .angles_deg
            .iter()
            .zip(&self.sweeps)
            .map(|(&a, s)| f(a, s))
            .collect::<Result<Vec<_>>>()?;
        AzimuthScan::new(self.angles_deg.clone(), sweeps)
    }

    /// Per-frequency complex mean over all angles.
    ///
    /// Used to collapse a rotationally symmetric reference target (the
    /// calibration sphere) into a single sweep; coherent averaging also
    /// suppresses uncorrelated per-angle noise.
    pub fn mean_sweep(&self) -> FrequencySweep {
        let n = self.sweeps.len() as f64;
        let len = self.sweeps[0].len();
        let mut acc = vec![Complex64::new(0.0, 0.0); len];
        for sweep in &self.sweeps {
            for (a, s) in acc.iter_mut().zip(sweep.samples()) {
                *a += s;
            }
        }
        for a in &mut acc {
            *a /= n;
        }
        self.sweeps[0]
            .with_samples(acc)
            .expect("same grid and length")
    }
}
