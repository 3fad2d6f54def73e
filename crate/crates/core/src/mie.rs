//! Exact and approximate monostatic RCS of a perfectly-electrically-conducting
//! (PEC) sphere, the calibration truth reference for the measurement chain.
//!
//! The exact value is the classical series
//!
//! ```text
//! σ = (λ²/4π) · | Σ_{n=1}^{N} (-1)^n (2n+1) / (Ĥ_n'(ka) · Ĥ_n(ka)) |²
//! ```
//!
//! where `Ĥ_n(x) = x·h_n⁽²⁾(x)` is the Riccati–Hankel function of the second
//! kind and `ka = 2πa/λ` the size parameter. The series is truncated at the
//! Wiscombe cutoff `N = ⌈ka + 4·(ka)^{1/3} + 2⌉`, which is convergent for all
//! sphere sizes of interest here.
//!
//! Two closed-form approximations cover the asymptotic regimes: the Rayleigh
//! formula `(9λ²/4π)(ka)⁶` for electrically small spheres and the optical
//! plateau `πa²` for large ones. [`classify_region`] reports which regime a
//! given sphere/frequency pair falls in.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{wavelength, Result as CrateResult};

/// Geometry of a PEC calibration sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSpec {
    radius_m: f64,
}

impl SphereSpec {
    /// A sphere of the given radius in meters. The radius must be positive and finite.
    pub fn new(radius_m: f64) -> Result<Self> {
        if !(radius_m > 0.0) || !radius_m.is_finite() {
            return Err(Error::Domain(format!(
                "sphere radius must be positive and finite, got {radius_m}"
            )));
        }
        Ok(SphereSpec { radius_m })
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    /// Size parameter ka = 2πa/λ at the given frequency.
    pub fn size_parameter(&self, freq_hz: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.radius_m / wavelength(freq_hz)
    }
}

/// Size-vs-wavelength scattering regime of a sphere.
///
/// Boundaries: Rayleigh iff `ka ≤ 0.5`, optical iff `a > 2λ`, Mie otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScatteringRegion {
    Rayleigh,
    Mie,
    Optical,
}

impl std::fmt::Display for ScatteringRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ScatteringRegion::Rayleigh => "rayleigh",
            ScatteringRegion::Mie => "mie",
            ScatteringRegion::Optical => "optical",
        };
        f.write_str(name)
    }
}

fn check_freq(freq_hz: f64) -> Result<()> {
    if !(freq_hz > 0.0) || !freq_hz.is_finite() {
        return Err(Error::Domain(format!(
            "frequency must be positive and finite, got {freq_hz}"
        )));
    }
    Ok(())
}

/// Riccati–Hankel functions of the second kind, `Ĥ_n(x) = x·h_n⁽²⁾(x)`, and
/// their first derivatives for orders `n = 1..=n_max`.
///
/// Computed by upward recurrence from the closed forms
/// `Ĥ_0(x) = i·e^{-ix}` and `Ĥ_1(x) = (i/x - 1)·e^{-ix}`, with
/// `Ĥ_{n+1} = ((2n+1)/x)·Ĥ_n - Ĥ_{n-1}` and `Ĥ_n' = Ĥ_{n-1} - (n/x)·Ĥ_n`.
/// Upward recurrence is stable here because the Neumann component of the
/// second-kind function is the dominant solution of the recurrence.
pub fn riccati_hankel2_sequence(x: f64, n_max: usize) -> Result<Vec<(Complex64, Complex64)>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Riccati-Hankel argument must be positive and finite, got {x}"
        )));
    }
    if n_max < 1 {
        return Err(Error::Domain(format!("n_max must be >= 1, got {n_max}")));
    }

    // e^{-ix} = cos x - i sin x
    let exp_mix = Complex64::new(x.cos(), -x.sin());
    let h0 = Complex64::i() * exp_mix;
    let h1 = (Complex64::new(-1.0, 1.0 / x)) * exp_mix;

    let mut out = Vec::with_capacity(n_max);
    let mut prev = h0;
    let mut cur = h1;
    for n in 1..=n_max {
        let deriv = prev - (n as f64 / x) * cur;
        out.push((cur, deriv));
        let next = ((2 * n + 1) as f64 / x) * cur - prev;
        prev = cur;
        cur = next;
    }
    Ok(out)
}

/// Wiscombe series-truncation order for size parameter `ka`.
fn wiscombe_cutoff(ka: f64) -> usize {
    let n = (ka + 4.0 * ka.cbrt() + 2.0).ceil() as usize;
    n.max(1)
}

fn rcs_exact_with_terms(sphere: &SphereSpec, freq_hz: f64, n_terms: usize) -> f64 {
    let lambda = wavelength(freq_hz);
    let ka = sphere.size_parameter(freq_hz);
    // Precondition checks guarantee ka > 0, so the sequence call cannot fail.
    let hankel = riccati_hankel2_sequence(ka, n_terms).expect("validated arguments");

    let mut sum = Complex64::new(0.0, 0.0);
    for (idx, (h, dh)) in hankel.iter().enumerate() {
        let n = idx + 1;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (2 * n + 1) as f64 / (dh * h);
    }
    lambda * lambda / (4.0 * std::f64::consts::PI) * sum.norm_sqr()
}

/// Exact monostatic RCS of a PEC sphere in m², from the Riccati–Hankel series
/// truncated at the Wiscombe cutoff.
pub fn sphere_rcs_exact(sphere: &SphereSpec, freq_hz: f64) -> CrateResult<f64> {
    check_freq(freq_hz)?;
    let ka = sphere.size_parameter(freq_hz);
    Ok(rcs_exact_with_terms(sphere, freq_hz, wiscombe_cutoff(ka)))
}

/// Rayleigh-region approximation `(9λ²/4π)(ka)⁶` in m².
///
/// Returned regardless of regime; callers consult [`classify_region`] for
/// validity.
pub fn sphere_rcs_rayleigh(sphere: &SphereSpec, freq_hz: f64) -> CrateResult<f64> {
    check_freq(freq_hz)?;
    let lambda = wavelength(freq_hz);
    let ka = sphere.size_parameter(freq_hz);
    Ok(9.0 * lambda * lambda / (4.0 * std::f64::consts::PI) * ka.powi(6))
}

/// Optical-region plateau `πa²` in m²; frequency-independent.
pub fn sphere_rcs_optical(sphere: &SphereSpec) -> f64 {
    std::f64::consts::PI * sphere.radius_m * sphere.radius_m
}

/// Scattering regime of the sphere at the given frequency.
pub fn classify_region(sphere: &SphereSpec, freq_hz: f64) -> CrateResult<ScatteringRegion> {
    check_freq(freq_hz)?;
    let lambda = wavelength(freq_hz);
    let ka = sphere.size_parameter(freq_hz);
    Ok(if ka <= 0.5 {
        ScatteringRegion::Rayleigh
    } else if sphere.radius_m > 2.0 * lambda {
        ScatteringRegion::Optical
    } else {
        ScatteringRegion::Mie
    })
}
