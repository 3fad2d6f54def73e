//! Software range gating.
//!
//! A captured sweep is taken to the time domain with an inverse DFT (zero
//! padded for gate-placement resolution), multiplied by a Tukey gate that
//! brackets the target return, and transformed back. Unwanted responses at
//! other delays — transceiver leakage, antenna coupling, chamber clutter —
//! fall outside the gate and are rejected. Complex background subtraction is
//! the companion cleanup and is exact only before gating, so the default
//! processing order is subtract first, then gate.
//!
//! Transform convention: the inverse DFT carries the 1/N normalization, the
//! forward DFT none, so `to_frequency_domain ∘ to_time_domain` is the
//! identity. With frequency step Δf and padded length N = n·zero_pad_factor,
//! the time grid starts at 0 with step Δt = 1/(N·Δf); gate edges are
//! two-way delays in seconds (τ = 2R/c, see [`range_to_delay`]).

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::sweep::FrequencySweep;
use crate::SPEED_OF_LIGHT;

/// Frequency-grid metadata carried through the time domain so the original
/// sweep grid can be reconstructed.
#[derive(Debug, Clone, Copy, PartialEq)]
struct GridMeta {
    freq_start_hz: f64,
    freq_step_hz: f64,
    original_len: usize,
    zero_pad_factor: usize,
}

/// Complex range profile: the time-domain counterpart of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile {
    times_s: Vec<f64>,
    samples: Vec<Complex64>,
    meta: GridMeta,
}

impl TimeProfile {
    pub fn times_s(&self) -> &[f64] {
        &self.times_s
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

    pub fn time_step_s(&self) -> f64 {
        self.times_s[1] - self.times_s[0]
    }

    pub fn max_time_s(&self) -> f64 {
        *self.times_s.last().expect("profiles are never empty")
    }

    /// Length of the sweep this profile was computed from.
    pub fn original_len(&self) -> usize {
        self.meta.original_len
    }

    /// Sum of |x(t)|² over the grid.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    /// Time and magnitude of the strongest return; a gate-placement aid.
    pub fn peak(&self) -> (f64, f64) {
        let (idx, mag) = self
            .samples
            .iter()
            .map(|s| s.norm())
            .enumerate()
            .fold((0, 0.0), |best, (i, m)| if m > best.1 { (i, m) } else { best });
        (self.times_s[idx], mag)
    }
}

/// Two-way delay in seconds of a one-way range in meters: τ = 2R/c.
pub fn range_to_delay(range_m: f64) -> f64 {
    2.0 * range_m / SPEED_OF_LIGHT
}

/// Inverse-transform a sweep into a range profile, zero padded to
/// `n_points · zero_pad_factor` samples.
pub fn to_time_domain(sweep: &FrequencySweep, zero_pad_factor: usize) -> Result<TimeProfile> {
    to_time_domain_tapered(sweep, zero_pad_factor, None)
}

/// [`to_time_domain`] with an optional Tukey pre-taper applied across the
/// sweep before transforming (off by default in the processing chain).
pub fn to_time_domain_tapered(
    sweep: &FrequencySweep,
    zero_pad_factor: usize,
    pre_taper_alpha: Option<f64>,
) -> Result<TimeProfile> {
    if zero_pad_factor < 1 {
        return Err(Error::Domain("zero_pad_factor must be >= 1".into()));
    }
    let n = sweep.len();
    let padded = n * zero_pad_factor;

    let mut buf: Vec<Complex64> = sweep.samples().to_vec();
    if let Some(alpha) = pre_taper_alpha {
        let w = tukey_window(n, alpha)?;
        for (s, &wi) in buf.iter_mut().zip(&w) {
            *s *= wi;
        }
    }
    buf.resize(padded, Complex64::new(0.0, 0.0));

    FftPlanner::new().plan_fft_inverse(padded).process(&mut buf);
    let scale = 1.0 / padded as f64;
    for s in &mut buf {
        *s *= scale;
    }

    let dt = 1.0 / (padded as f64 * sweep.freq_step_hz());
    let times = (0..padded).map(|i| i as f64 * dt).collect();
    Ok(TimeProfile {
        times_s: times,
        samples: buf,
        meta: GridMeta {
            freq_start_hz: sweep.freqs_hz()[0],
            freq_step_hz: sweep.freq_step_hz(),
            original_len: n,
            zero_pad_factor,
        },
    })
}

/// Tapered-cosine (Tukey) weights: a flat middle of relative width `1 - alpha`
/// with cosine tapers of total relative width `alpha`. `alpha = 0` is the
/// rectangular window, `alpha = 1` the Hann window.
pub fn tukey_window(length: usize, alpha: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "Tukey alpha must be in [0, 1], got {alpha}"
        )));
    }
    if length == 0 {
        return Err(Error::Domain("window length must be >= 1".into()));
    }
    if length == 1 {
        return Ok(vec![1.0]);
    }
    if alpha == 0.0 {
        return Ok(vec![1.0; length]);
    }
    let denom = (length - 1) as f64;
    let w = (0..length)
        .map(|i| {
            let x = i as f64 / denom;
            if x < alpha / 2.0 {
                0.5 * (1.0 + (2.0 * std::f64::consts::PI / alpha * (x - alpha / 2.0)).cos())
            } else if x <= 1.0 - alpha / 2.0 {
                1.0
            } else {
                0.5 * (1.0 + (2.0 * std::f64::consts::PI / alpha * (x - 1.0 + alpha / 2.0)).cos())
            }
        })
        .collect();
    Ok(w)
}

/// Gate a range profile: samples inside `[gate_start_s, gate_stop_s]` are
/// weighted by a Tukey window spanning the gate, everything outside is zeroed.
pub fn range_gate(
    profile: &TimeProfile,
    gate_start_s: f64,
    gate_stop_s: f64,
    alpha: f64,
) -> Result<TimeProfile> {
    let eps = profile.time_step_s() * 1e-9;
    if !(gate_start_s >= -eps) || !(gate_stop_s > gate_start_s) {
        return Err(Error::Domain(format!(
            "need 0 <= gate_start < gate_stop, got [{gate_start_s}, {gate_stop_s}]"
        )));
    }
    if gate_stop_s > profile.max_time_s() + eps {
        return Err(Error::Domain(format!(
            "gate_stop {gate_stop_s} s exceeds profile extent {} s",
            profile.max_time_s()
        )));
    }

    let inside: Vec<usize> = profile
        .times_s
        .iter()
        .enumerate()
        .filter(|(_, &t)| t >= gate_start_s - eps && t <= gate_stop_s + eps)
        .map(|(i, _)| i)
        .collect();

    let mut samples = vec![Complex64::new(0.0, 0.0); profile.len()];
    if !inside.is_empty() {
        let w = tukey_window(inside.len(), alpha)?;
        for (&i, &wi) in inside.iter().zip(&w) {
            samples[i] = profile.samples[i] * wi;
        }
    }
    Ok(TimeProfile {
        times_s: profile.times_s.clone(),
        samples,
        meta: profile.meta,
    })
}

/// Forward-transform a (gated) profile back to the frequency domain,
/// truncated to the original sweep length; the grid is rebuilt from the
/// metadata recorded by [`to_time_domain`].
pub fn to_frequency_domain(profile: &TimeProfile, original_length: usize) -> Result<FrequencySweep> {
    if original_length != profile.meta.original_len {
        return Err(Error::Format(format!(
            "requested length {original_length} does not match the profile's source sweep length {}",
            profile.meta.original_len
        )));
    }
    if original_length > profile.len() {
        return Err(Error::Format(format!(
            "requested length {original_length} exceeds profile length {}",
            profile.len()
        )));
    }

    let mut buf = profile.samples.clone();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf.truncate(original_length);
    FrequencySweep::from_grid(profile.meta.freq_start_hz, profile.meta.freq_step_hz, buf)
}

/// Complex subtraction of an empty-chamber capture from a target capture.
pub fn background_subtract(
    sweep: &FrequencySweep,
    background: &FrequencySweep,
) -> Result<FrequencySweep> {
    if !sweep.grids_match(background) {
        return Err(Error::Format(
            "sweep and background frequency grids differ".into(),
        ));
    }
    let samples = sweep
        .samples()
        .iter()
        .zip(background.samples())
        .map(|(a, b)| a - b)
        .collect();
    sweep.with_samples(samples)
}
