//! Compact-range radar-cross-section (RCS) measurement chain.
//!
//! Implements the full processing path used for calibrated monostatic RCS
//! measurements in a compact-range anechoic chamber, plus a coherent
//! scattering-center simulator that stands in for the chamber hardware:
//!
//! - [`mie`] — exact and approximate RCS of a PEC calibration sphere.
//! - [`scatter`] — coherent point-scatterer targets and synthetic VNA sweeps
//!   with chamber artifacts (leakage, coupling, background, noise).
//! - [`gating`] — software range gating: inverse DFT to a range profile,
//!   Tukey-window gate, forward DFT back, and background subtraction.
//! - [`calibration`] — absolute RCS via the sphere reference, azimuth
//!   patterns, and linear-domain averaging.
//! - [`stats`] — maximum-likelihood fits of candidate RCS distributions
//!   (log-normal, Rayleigh, generalized extreme value) ranked by AIC.
//! - [`pipeline`] — the end-to-end chain behind one reproducible config.
//!
//! All RCS values are computed and stored in linear m²; dBsm is a
//! presentation conversion only (see [`to_dbsm`]).

pub mod calibration;
pub mod error;
pub mod gating;
pub mod io;
pub mod mie;
pub mod pipeline;
pub mod scatter;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Convert an RCS in m² to dBsm.
pub fn to_dbsm(rcs_m2: f64) -> f64 {
    10.0 * rcs_m2.log10()
}

/// Convert dBsm to an RCS in m².
pub fn from_dbsm(dbsm: f64) -> f64 {
    10.0_f64.powf(dbsm / 10.0)
}

/// RCS floor applied wherever a dBsm value must stay finite (σ = 1e-6 m² = -60 dBsm).
pub const DBSM_FLOOR_M2: f64 = 1e-6;

/// dBsm conversion with the -60 dBsm floor, used for emitted plot data and reports.
pub fn to_dbsm_floored(rcs_m2: f64) -> f64 {
    to_dbsm(rcs_m2.max(DBSM_FLOOR_M2))
}

/// Wavelength in meters for a frequency in Hz.
pub fn wavelength(freq_hz: f64) -> f64 {
    SPEED_OF_LIGHT / freq_hz
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbsm_round_trip() {
        for &sigma in &[1e-6, 0.0364, 0.1087, 1.0, 42.0] {
            let db = to_dbsm(sigma);
            assert!((from_dbsm(db) - sigma).abs() / sigma < 1e-12);
        }
        assert_eq!(to_dbsm(1.0), 0.0);
    }

    #[test]
    fn dbsm_floor_clamps_at_minus_60() {
        assert_eq!(to_dbsm_floored(0.0), -60.0);
        assert_eq!(to_dbsm_floored(1e-9), -60.0);
        assert!((to_dbsm_floored(1.0) - 0.0).abs() < 1e-12);
    }
}
