//! Maximum-likelihood fits of candidate RCS amplitude distributions and
//! AIC-based model ranking.
//!
//! Three families are fitted to linear-m² RCS samples: log-normal and
//! Rayleigh by their closed-form MLEs, and the generalized extreme value
//! (GEV) family by derivative-free simplex descent on the negative
//! log-likelihood. Candidates are ranked by the Akaike information criterion
//! `AIC = -2·loglik + 2K`; the model with the smallest AIC wins.
//!
//! Fitting happens on linear m² values, never dBsm: positive support is what
//! all three families share. Reports must state this scale.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant, used by the Gumbel moment initializer.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this |shape| the GEV log-likelihood switches to its Gumbel limit.
const GUMBEL_SHAPE_EPS: f64 = 1e-9;

/// Positive, finite RCS samples in linear m².
#[derive(Debug, Clone, PartialEq)]
pub struct RcsSamples {
    values: Vec<f64>,
}

impl RcsSamples {
    /// Validates N ≥ 2 and every value positive and finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 samples, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain(format!(
                "RCS samples must be positive and finite, found {bad}"
            )));
        }
        Ok(RcsSamples { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Candidate distribution families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    LogNormal,
    Rayleigh,
    Gev,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::LogNormal, ModelKind::Rayleigh, ModelKind::Gev];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::LogNormal => "lognormal",
            ModelKind::Rayleigh => "rayleigh",
            ModelKind::Gev => "gev",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lognormal" | "log-normal" => Ok(ModelKind::LogNormal),
            "rayleigh" => Ok(ModelKind::Rayleigh),
            "gev" => Ok(ModelKind::Gev),
            other => Err(Error::Format(format!("unknown model '{other}'"))),
        }
    }
}

/// A fitted distribution with its maximum-likelihood parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    /// ln x ~ Normal(mu, s²); s > 0.
    LogNormal { mu: f64, s: f64 },
    /// f(x) = (x/b²)·exp(-x²/2b²); b > 0.
    Rayleigh { b: f64 },
    /// Shape ξ, location μ, scale σ > 0.
    Gev { shape: f64, location: f64, scale: f64 },
}

impl FittedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            FittedModel::LogNormal { .. } => ModelKind::LogNormal,
            FittedModel::Rayleigh { .. } => ModelKind::Rayleigh,
            FittedModel::Gev { .. } => ModelKind::Gev,
        }
    }

    /// Named parameters, for reports.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            FittedModel::LogNormal { mu, s } => vec![("mu", mu), ("s", s)],
            FittedModel::Rayleigh { b } => vec![("b", b)],
            FittedModel::Gev {
                shape,
                location,
                scale,
            } => vec![("shape", shape), ("location", location), ("scale", scale)],
        }
    }
}

/// Result of one maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: FittedModel,
    /// Log-likelihood at the fitted parameters.
    pub loglik: f64,
    /// Number of estimated parameters.
    pub k: usize,
    pub aic: f64,
}

/// Akaike information criterion: `-2·loglik + 2K`.
pub fn aic(loglik: f64, k: usize) -> f64 {
    debug_assert!(k >= 1);
    -2.0 * loglik + 2.0 * k as f64
}

fn finish(model: FittedModel, loglik: f64, k: usize) -> FitResult {
    FitResult {
        model,
        loglik,
        k,
        aic: aic(loglik, k),
    }
}

fn lognormal_loglik(values: &[f64], mu: f64, s: f64) -> f64 {
    let ln_norm = s.ln() + 0.5 * (2.0 * std::f64::consts::PI).ln();
    values
        .iter()
        .map(|&x| {
            let z = (x.ln() - mu) / s;
            -x.ln() - ln_norm - 0.5 * z * z
        })
        .sum()
}

/// Closed-form log-normal MLE: `mu = mean(ln x)`, `s² = mean((ln x - mu)²)`
/// (the 1/N maximum-likelihood variance, not the 1/(N-1) unbiased one).
pub fn fit_lognormal(samples: &RcsSamples) -> Result<FitResult> {
    let logs: Vec<f64> = samples.values().iter().map(|x| x.ln()).collect();
    let n = logs.len() as f64;
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu) * (l - mu)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(Error::DegenerateFit(
            "log-variance is zero (all samples equal); log-normal fit is degenerate".into(),
        ));
    }
    let s = var.sqrt();
    let loglik = lognormal_loglik(samples.values(), mu, s);
    Ok(finish(FittedModel::LogNormal { mu, s }, loglik, 2))
}

fn rayleigh_loglik(values: &[f64], b: f64) -> f64 {
    let b2 = b * b;
    values
        .iter()
        .map(|&x| x.ln() - b2.ln() - x * x / (2.0 * b2))
        .sum()
}

/// Closed-form Rayleigh MLE: `b = sqrt(Σx²/2N)`.
pub fn fit_rayleigh(samples: &RcsSamples) -> Result<FitResult> {
    let n = samples.len() as f64;
    let b = (samples.values().iter().map(|x| x * x).sum::<f64>() / (2.0 * n)).sqrt();
    let loglik = rayleigh_loglik(samples.values(), b);
    Ok(finish(FittedModel::Rayleigh { b }, loglik, 1))
}

/// GEV log-likelihood; -inf when the parameters are infeasible for any sample
/// (support constraint `1 + ξ(x-μ)/σ > 0`) or the scale is non-positive.
fn gev_loglik(values: &[f64], shape: f64, location: f64, scale: f64) -> f64 {
    if !(scale > 0.0) {
        return f64::NEG_INFINITY;
    }
    let mut total = 0.0;
    if shape.abs() < GUMBEL_SHAPE_EPS {
        // Gumbel limit of the family
        for &x in values {
            let z = (x - location) / scale;
            total += -scale.ln() - z - (-z).exp();
        }
    } else {
        for &x in values {
            let s = 1.0 + shape * (x - location) / scale;
            if !(s > 0.0) {
                return f64::NEG_INFINITY;
            }
            let log_s = s.ln();
            total += -scale.ln() - (1.0 + 1.0 / shape) * log_s - (-log_s / shape).exp();
        }
    }
    total
}

/// Outcome of a simplex minimization.
struct SimplexFit {
    x: Vec<f64>,
    fx: f64,
    iterations: usize,
    converged: bool,
}

/// Standard Nelder–Mead on an objective that may return +inf for infeasible
/// points. Stops when the spread of simplex objective values drops below
/// `tol` or after `max_iter` iterations.
fn nelder_mead<F>(objective: F, x0: &[f64], max_iter: usize, tol: f64) -> SimplexFit
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += if v[i] != 0.0 { 0.05 * v[i] } else { 0.00025 };
        simplex.push(v);
    }
    let mut fvals: Vec<f64> = simplex.iter().map(|v| objective(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // order best..worst
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| fvals[a].partial_cmp(&fvals[b]).unwrap_or(std::cmp::Ordering::Equal));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let refvals: Vec<f64> = order.iter().map(|&i| fvals[i]).collect();
        simplex = reordered;
        fvals = refvals;

        if fvals[dim].is_finite() && (fvals[dim] - fvals[0]).abs() < tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = (0..dim)
            .map(|j| centroid[j] + alpha * (centroid[j] - worst[j]))
            .collect();
        let f_reflect = objective(&reflect);

        if f_reflect < fvals[0] {
            let expand: Vec<f64> = (0..dim)
                .map(|j| centroid[j] + gamma * (centroid[j] - worst[j]))
                .collect();
            let f_expand = objective(&expand);
            if f_expand < f_reflect {
                simplex[dim] = expand;
                fvals[dim] = f_expand;
            } else {
                simplex[dim] = reflect;
                fvals[dim] = f_reflect;
            }
        } else if f_reflect < fvals[dim - 1] {
            simplex[dim] = reflect;
            fvals[dim] = f_reflect;
        } else {
            let (contract, f_contract) = if f_reflect < fvals[dim] {
                let c: Vec<f64> = (0..dim)
                    .map(|j| centroid[j] + rho * (reflect[j] - centroid[j]))
                    .collect();
                let fc = objective(&c);
                (c, fc)
            } else {
                let c: Vec<f64> = (0..dim)
                    .map(|j| centroid[j] - rho * (centroid[j] - worst[j]))
                    .collect();
                let fc = objective(&c);
                (c, fc)
            };
            if f_contract < fvals[dim].min(f_reflect) {
                simplex[dim] = contract;
                fvals[dim] = f_contract;
            } else {
                for i in 1..=dim {
                    for j in 0..dim {
                        simplex[i][j] = simplex[0][j] + sigma * (simplex[i][j] - simplex[0][j]);
                    }
                    fvals[i] = objective(&simplex[i]);
                }
            }
        }
    }

    let best = fvals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap_or(0);
    SimplexFit {
        x: simplex[best].clone(),
        fx: fvals[best],
        iterations,
        converged,
    }
}

/// Numeric GEV MLE by Nelder–Mead on the negative log-likelihood.
///
/// Initialization is the Gumbel method-of-moments (σ₀ = sd·√6/π,
/// μ₀ = mean − γ·σ₀) with shape ξ₀ = 0.1; if that start is infeasible the
/// shape falls back to the always-feasible Gumbel limit. Convergence:
/// objective spread < 1e-10 within 500·K iterations, else a fit-failure
/// error carrying the best iterate.
pub fn fit_gev(samples: &RcsSamples) -> Result<FitResult> {
    const K: usize = 3;
    if samples.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "GEV fit needs at least 10 samples, got {}",
            samples.len()
        )));
    }
    let values = samples.values();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    if var <= 0.0 {
        // degenerate data: the GEV likelihood is unbounded as scale → 0
        return Err(Error::DegenerateFit(
            "sample variance is zero (all samples equal); GEV fit is degenerate".into(),
        ));
    }
    let sd = var.sqrt();

    let scale0 = sd * 6.0_f64.sqrt() / std::f64::consts::PI;
    let loc0 = mean - EULER_GAMMA * scale0;
    let mut x0 = vec![0.1, loc0, scale0];
    if !gev_loglik(values, x0[0], x0[1], x0[2]).is_finite() {
        x0[0] = 0.0; // Gumbel limit is feasible for any data
    }
    let init_loglik = gev_loglik(values, x0[0], x0[1], x0[2]);

    let objective = |p: &[f64]| -gev_loglik(values, p[0], p[1], p[2]);
    let fit = nelder_mead(objective, &x0, 500 * K, 1e-10);

    let loglik = -fit.fx;
    if !fit.converged {
        return Err(Error::FitFailure {
            iterations: fit.iterations,
            params: fit.x,
            loglik,
        });
    }
    debug_assert!(loglik >= init_loglik - 1e-9, "simplex must not ascend");
    Ok(finish(
        FittedModel::Gev {
            shape: fit.x[0],
            location: fit.x[1],
            scale: fit.x[2],
        },
        loglik,
        K,
    ))
}

/// A fit that was skipped during model selection, with the reason.
#[derive(Debug, Clone)]
pub struct SkippedFit {
    pub kind: ModelKind,
    pub reason: String,
}

/// Fit results sorted ascending by AIC (ties: smaller K, then model name).
#[derive(Debug, Clone)]
pub struct ModelRanking {
    pub results: Vec<FitResult>,
    pub skipped: Vec<SkippedFit>,
}

impl ModelRanking {
    /// The minimum-AIC model.
    pub fn best(&self) -> &FitResult {
        &self.results[0]
    }
}

/// Fit the requested families and rank by AIC. Families whose fit errors are
/// recorded as skipped; if every fit fails the whole selection errors.
pub fn fit_models(samples: &RcsSamples, kinds: &[ModelKind]) -> Result<ModelRanking> {
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    for kind in kinds {
        let outcome = match kind {
            ModelKind::LogNormal => fit_lognormal(samples),
            ModelKind::Rayleigh => fit_rayleigh(samples),
            ModelKind::Gev => fit_gev(samples),
        };
        match outcome {
            Ok(fit) => results.push(fit),
            Err(err) => skipped.push(SkippedFit {
                kind: *kind,
                reason: err.to_string(),
            }),
        }
    }
    if results.is_empty() {
        return Err(Error::NoModel(format!(
            "all {} candidate fits failed",
            kinds.len()
        )));
    }
    results.sort_by(|a, b| {
        a.aic
            .partial_cmp(&b.aic)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.k.cmp(&b.k))
            .then(a.model.kind().name().cmp(b.model.kind().name()))
    });
    Ok(ModelRanking { results, skipped })
}

/// Fit all three candidate families and rank by AIC.
pub fn select_model(samples: &RcsSamples) -> Result<ModelRanking> {
    fit_models(samples, &ModelKind::ALL)
}
