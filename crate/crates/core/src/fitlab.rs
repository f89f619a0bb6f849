//! Histograms and least-squares fits: truncated power law for normalized
//! speeds, log-log power law for degree/clustering pairs, and the sigmoid
//! criterion for the inverse mean clustering over time.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("histogram needs at least 2 bins and one value")]
    EmptyHistogram,
    #[error("logarithmic binning needs strictly positive values, found {0}")]
    NonPositive(f64),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("need at least {needed} data points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("samples must lie in [0, 1], found {0}")]
    OutOfUnitInterval(f64),
    #[error("initial guess {0:?} lies outside the bounds")]
    GuessOutOfBounds(Vec<f64>),
    #[error("Jacobian column {0} vanishes; parameter has no effect on the residual")]
    SingularJacobian(usize),
    #[error("model undefined at the data: {0}")]
    Domain(String),
    #[error("every point of the series was dropped (mean clustering zero everywhere)")]
    AllPointsDropped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    Linear,
    Logarithmic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// Arithmetic midpoints (linear) or geometric midpoints (logarithmic).
    pub centers: Vec<f64>,
    pub counts: Vec<usize>,
    pub densities: Vec<f64>,
}

impl Histogram {
    pub fn width(&self, k: usize) -> f64 {
        self.edges[k + 1] - self.edges[k]
    }
}

/// Density histogram over `[min, max]` of the values, normalized so that
/// `sum(density * width) = 1`.
pub fn histogram(values: &[f64], bins: usize, binning: Binning) -> Result<Histogram, FitError> {
    if bins < 2 || values.is_empty() {
        return Err(FitError::EmptyHistogram);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(FitError::NonFinite);
    }
    let (mut lo, mut hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let log = binning == Binning::Logarithmic;
    if log && lo <= 0.0 {
        return Err(FitError::NonPositive(lo));
    }
    if lo == hi {
        if log {
            lo *= 0.5;
            hi *= 2.0;
        } else {
            lo -= 0.5;
            hi += 0.5;
        }
    }
    let map = |v: f64| if log { v.ln() } else { v };
    let (a, b) = (map(lo), map(hi));
    let step = (b - a) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|k| match k {
            0 => lo,
            k if k == bins => hi,
            k => {
                let e = a + step * k as f64;
                if log {
                    e.exp()
                } else {
                    e
                }
            }
        })
        .collect();
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = (((map(v) - a) / step).floor().max(0.0) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let total = values.len() as f64;
    let centers = (0..bins)
        .map(|k| if log { (edges[k] * edges[k + 1]).sqrt() } else { 0.5 * (edges[k] + edges[k + 1]) })
        .collect();
    let densities = (0..bins).map(|k| counts[k] as f64 / (total * (edges[k + 1] - edges[k]))).collect();
    Ok(Histogram { edges, centers, counts, densities })
}

/// Box constraints; use infinities for free parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn free(n: usize) -> Self {
        Self { lower: vec![f64::NEG_INFINITY; n], upper: vec![f64::INFINITY; n] }
    }

    fn project(&self, p: &mut [f64]) {
        for (k, v) in p.iter_mut().enumerate() {
            *v = v.clamp(self.lower[k], self.upper[k]);
        }
    }

    fn contains(&self, p: &[f64]) -> bool {
        p.iter().enumerate().all(|(k, &v)| v >= self.lower[k] && v <= self.upper[k])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlsOptions {
    pub max_iterations: usize,
    /// Stop once `|dp| <= step_tolerance * (|p| + step_tolerance)`.
    pub step_tolerance: f64,
}

impl Default for NlsOptions {
    fn default() -> Self {
        Self { max_iterations: 500, step_tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlsResult {
    pub params: Vec<f64>,
    /// Euclidean norm of the (weighted) residual vector.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub at_bound: Vec<bool>,
}

fn residuals<F: Fn(f64, &[f64]) -> f64>(model: &F, x: &[f64], y: &[f64], w: Option<&[f64]>, p: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(y)
        .enumerate()
        .map(|(i, (&xi, &yi))| (model(xi, p) - yi) * w.map_or(1.0, |w| w[i]))
        .collect()
}

fn sum_sq(r: &[f64]) -> f64 {
    let s: f64 = r.iter().map(|v| v * v).sum();
    if s.is_finite() {
        s
    } else {
        f64::INFINITY
    }
}

/// Damped Gauss-Newton (Levenberg-Marquardt with Marquardt's diagonal
/// scaling) with a finite-difference Jacobian. Trial points are projected
/// onto the bounds.
pub fn nls_fit<F: Fn(f64, &[f64]) -> f64>(
    model: F,
    x: &[f64],
    y: &[f64],
    weights: Option<&[f64]>,
    initial: &[f64],
    bounds: Option<&Bounds>,
    options: NlsOptions,
) -> Result<NlsResult, FitError> {
    let np = initial.len();
    let m = x.len();
    if m < np || y.len() != m || weights.is_some_and(|w| w.len() != m) {
        return Err(FitError::TooFewPoints { needed: np, got: m.min(y.len()) });
    }
    let free = Bounds::free(np);
    let bounds = bounds.unwrap_or(&free);
    if !bounds.contains(initial) {
        return Err(FitError::GuessOutOfBounds(initial.to_vec()));
    }
    let mut p = initial.to_vec();
    let mut r = residuals(&model, x, y, weights, &p);
    let mut cost = sum_sq(&r);
    if !cost.is_finite() {
        return Err(FitError::Domain(format!("residual not finite at the initial guess {p:?}")));
    }
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    'outer: while iterations < options.max_iterations {
        iterations += 1;
        let mut jac = DMatrix::<f64>::zeros(m, np);
        for j in 0..np {
            let h = 6e-6 * p[j].abs().max(1e-3);
            let (mut lo, mut hi) = (p.clone(), p.clone());
            lo[j] = (p[j] - h).max(bounds.lower[j]);
            hi[j] = (p[j] + h).min(bounds.upper[j]);
            let r_lo = residuals(&model, x, y, weights, &lo);
            let r_hi = residuals(&model, x, y, weights, &hi);
            let span = hi[j] - lo[j];
            for i in 0..m {
                jac[(i, j)] = (r_hi[i] - r_lo[i]) / span;
            }
        }
        if jac.iter().any(|v| !v.is_finite()) {
            return Err(FitError::Domain(format!("Jacobian not finite at {p:?}")));
        }
        let mut a = jac.transpose() * &jac;
        for j in 0..np {
            if a[(j, j)] == 0.0 {
                if iterations == 1 {
                    return Err(FitError::SingularJacobian(j));
                }
                // degenerate direction reached during the fit: hold the parameter
                a[(j, j)] = 1.0;
            }
        }
        let g = jac.transpose() * DVector::from_column_slice(&r);
        loop {
            let mut damped = a.clone();
            for j in 0..np {
                damped[(j, j)] += lambda * a[(j, j)];
            }
            let step = match damped.cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    lambda *= 10.0;
                    if lambda > 1e16 {
                        break 'outer;
                    }
                    continue;
                }
            };
            let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            bounds.project(&mut trial);
            let dp: f64 = trial.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let pn: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            let small = dp <= options.step_tolerance * (pn + options.step_tolerance);
            let r_trial = residuals(&model, x, y, weights, &trial);
            let c_trial = sum_sq(&r_trial);
            // quadratic model reduction; below rounding the cost cannot rank the trial
            let predicted = -2.0 * g.dot(&step) - (step.transpose() * &a * &step)[(0, 0)];
            let noise = 4.0 * f64::EPSILON * cost;
            if c_trial < cost || (c_trial <= cost + noise && predicted.abs() <= noise) {
                p = trial;
                r = r_trial;
                cost = c_trial;
                lambda = (lambda * 0.1).max(1e-12);
                if small {
                    converged = true;
                    break 'outer;
                }
                continue 'outer;
            }
            if cost == 0.0 {
                converged = true;
                break 'outer;
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                // no descent left at working precision
                converged = true;
                break 'outer;
            }
        }
    }
    let at_bound = p
        .iter()
        .enumerate()
        .map(|(k, &v)| v == bounds.lower[k] || v == bounds.upper[k])
        .collect();
    Ok(NlsResult { params: p, residual_norm: cost.sqrt(), iterations, converged, at_bound })
}

pub const TPL_BINS: usize = 30;
pub const TPL_MIN_SAMPLES: usize = 100;
pub const TPL_INITIAL: (f64, f64, f64) = (0.05, 1.5, 0.85);

/// Density `A (v + v0)^(-beta) exp(-v / kappa)` fitted to normalized speeds.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPowerLawFit {
    pub v0: f64,
    pub beta: f64,
    pub kappa: f64,
    pub amplitude: f64,
    /// In log-density units, weighted by the square root of the bin counts.
    pub residual_norm: f64,
    pub converged: bool,
    pub samples_used: usize,
    pub zeros_dropped: usize,
    pub bins_used: usize,
}

/// Histograms the positive samples on 30 logarithmic bins (empty bins are
/// dropped) and fits `ln N(v)` with a free amplitude. Exact zeros cannot be
/// log-binned and are excluded. Bins are weighted by the square root of their
/// counts, the inverse standard error of a log-count.
pub fn fit_truncated_power_law(samples: &[f64]) -> Result<TruncatedPowerLawFit, FitError> {
    if let Some(&bad) = samples.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(FitError::OutOfUnitInterval(bad));
    }
    let positive: Vec<f64> = samples.iter().copied().filter(|&v| v > 0.0).collect();
    if positive.len() < TPL_MIN_SAMPLES {
        return Err(FitError::TooFewPoints { needed: TPL_MIN_SAMPLES, got: positive.len() });
    }
    let h = histogram(&positive, TPL_BINS, Binning::Logarithmic)?;
    let keep: Vec<usize> = (0..TPL_BINS).filter(|&k| h.counts[k] > 0).collect();
    let x: Vec<f64> = keep.iter().map(|&k| h.centers[k]).collect();
    let y: Vec<f64> = keep.iter().map(|&k| h.densities[k].ln()).collect();
    let w: Vec<f64> = keep.iter().map(|&k| (h.counts[k] as f64).sqrt()).collect();
    if x.len() < 5 {
        return Err(FitError::TooFewPoints { needed: 5, got: x.len() });
    }
    let model = |v: f64, p: &[f64]| p[0] - p[2] * (v + p[1]).ln() - v / p[3];
    let (v0, beta, kappa) = TPL_INITIAL;
    // best amplitude for the initial shape
    let ln_a = x.iter().zip(&y).map(|(&v, &ly)| ly + beta * (v + v0).ln() + v / kappa).sum::<f64>() / x.len() as f64;
    let bounds = Bounds {
        lower: vec![f64::NEG_INFINITY, 0.0, -10.0, 1e-3],
        upper: vec![f64::INFINITY, 10.0, 10.0, 1e3],
    };
    let r = nls_fit(model, &x, &y, Some(&w), &[ln_a, v0, beta, kappa], Some(&bounds), NlsOptions::default())?;
    Ok(TruncatedPowerLawFit {
        v0: r.params[1],
        beta: r.params[2],
        kappa: r.params[3],
        amplitude: r.params[0].exp(),
        residual_norm: r.residual_norm,
        converged: r.converged,
        samples_used: positive.len(),
        zeros_dropped: samples.len() - positive.len(),
        bins_used: x.len(),
    })
}

/// Rejection sampler on `[0, 1]` for the truncated power law with
/// `beta >= 0`: proposals from the truncated exponential, accepted with
/// probability `((v + v0) / v0)^(-beta)`.
pub fn sample_truncated_power_law<R: Rng>(n: usize, v0: f64, beta: f64, kappa: f64, rng: &mut R) -> Vec<f64> {
    assert!(v0 > 0.0 && beta >= 0.0 && kappa > 0.0, "sampler needs v0 > 0, beta >= 0, kappa > 0");
    let mass = -(-1.0 / kappa).exp_m1();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u: f64 = rng.random();
        let v = (-kappa * (-u * mass).ln_1p()).min(1.0);
        let accept = ((v + v0) / v0).powf(-beta);
        if rng.random::<f64>() < accept {
            out.push(v);
        }
    }
    out
}

/// `c = a k^b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub amplitude: f64,
    pub exponent: f64,
    /// Norm of the residual of `ln c`.
    pub residual_norm: f64,
    pub points: usize,
}

/// Ordinary least squares on `(ln k, ln c)` over pairs with `k >= 2` and `c > 0`.
pub fn fit_kc_power_law(pairs: &[(f64, f64)]) -> Result<PowerLawFit, FitError> {
    let pts: Vec<(f64, f64)> =
        pairs.iter().filter(|(k, c)| *k >= 2.0 && *c > 0.0).map(|&(k, c)| (k.ln(), c.ln())).collect();
    let n = pts.len();
    let distinct = pts.iter().any(|p| p.0 != pts.first().map_or(0.0, |q| q.0));
    if n < 3 || !distinct {
        return Err(FitError::TooFewPoints { needed: 3, got: n });
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rn = pts.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum::<f64>().sqrt();
    Ok(PowerLawFit { amplitude: a.exp(), exponent: b, residual_norm: rn, points: n })
}

/// `scale * (1 + exp(-beta (1 + ln t / (1 + delta ln t))))`.
pub fn sigmoid_model(t: f64, scale: f64, beta: f64, delta: f64) -> f64 {
    let lt = t.ln();
    let den = 1.0 + delta * lt;
    if den.abs() < 1e-12 {
        return f64::NAN;
    }
    scale * (1.0 + (-beta * (1.0 + lt / den)).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmoidFit {
    pub scale: f64,
    pub beta: f64,
    pub delta: f64,
    pub residual_norm: f64,
    pub converged: bool,
    /// Residual norm of the best constant model, for comparison.
    pub constant_residual_norm: f64,
}

const SIGMOID_MAX_ITERATIONS: usize = 20_000;

const SIGMOID_STARTS: [(f64, f64); 8] =
    [(1.0, 0.0), (4.0, 0.0), (1.0, 0.25), (4.0, 0.25), (1.0, -0.25), (4.0, -0.25), (1.0, 1.0), (0.25, 0.0)];

/// Multi-start fit of the sigmoid family; the start with the smallest
/// residual wins. Starts that violate `1 + delta ln t != 0` are skipped.
pub fn fit_sigmoid_inverse_clustering(series: &[(f64, f64)]) -> Result<SigmoidFit, FitError> {
    if series.len() < 4 {
        return Err(FitError::TooFewPoints { needed: 4, got: series.len() });
    }
    if let Some(&(t, _)) = series.iter().find(|(t, y)| !(*t > 0.0) || !y.is_finite() || !t.is_finite()) {
        return Err(FitError::Domain(format!("time {t} must be positive and values finite")));
    }
    let t: Vec<f64> = series.iter().map(|p| p.0).collect();
    let y: Vec<f64> = series.iter().map(|p| p.1).collect();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let constant_residual_norm = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>().sqrt();
    let model = |t: f64, p: &[f64]| sigmoid_model(t, p[0], p[1], p[2]);
    let bounds = Bounds { lower: vec![f64::NEG_INFINITY, -50.0, -10.0], upper: vec![f64::INFINITY, 50.0, 10.0] };

    let mut best: Option<NlsResult> = None;
    let mut last_err = None;
    for &(beta, delta) in &SIGMOID_STARTS {
        let g: Vec<f64> = t.iter().map(|&ti| sigmoid_model(ti, 1.0, beta, delta)).collect();
        if g.iter().any(|v| !v.is_finite()) {
            last_err = Some(FitError::Domain(format!("1 + delta ln t vanishes for delta = {delta}")));
            continue;
        }
        let scale = g.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / g.iter().map(|a| a * a).sum::<f64>();
        // the valley is long and curved when the series spans decades
        let options = NlsOptions { max_iterations: SIGMOID_MAX_ITERATIONS, ..NlsOptions::default() };
        match nls_fit(model, &t, &y, None, &[scale, beta, delta], Some(&bounds), options) {
            Ok(r) => {
                let better = best.as_ref().is_none_or(|b| {
                    r.residual_norm < b.residual_norm || (r.residual_norm == b.residual_norm && r.converged && !b.converged)
                });
                if better {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let r = best.ok_or_else(|| last_err.unwrap_or(FitError::Domain("no admissible start".into())))?;
    Ok(SigmoidFit {
        scale: r.params[0],
        beta: r.params[1],
        delta: r.params[2],
        residual_norm: r.residual_norm,
        converged: r.converged,
        constant_residual_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseClusteringMode {
    /// `1 / C` with `C` the mean clustering coefficient.
    #[default]
    ReciprocalOfMean,
    /// Mean of `1 / c_i` over nodes with `c_i > 0`.
    MeanOfReciprocal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseClusteringSeries {
    pub points: Vec<(f64, f64)>,
    /// Times whose point was undefined (zero clustering).
    pub dropped: Vec<f64>,
}

/// Builds the `(t, <1/c>)` series from per-node clustering coefficients at
/// each time.
pub fn inverse_mean_clustering_series(
    clustering: &[(f64, Vec<f64>)],
    mode: InverseClusteringMode,
) -> Result<InverseClusteringSeries, FitError> {
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for (t, c) in clustering {
        let value = match mode {
            InverseClusteringMode::ReciprocalOfMean => {
                let mean = if c.is_empty() { 0.0 } else { c.iter().sum::<f64>() / c.len() as f64 };
                (mean > 0.0).then(|| 1.0 / mean)
            }
            InverseClusteringMode::MeanOfReciprocal => {
                let inv: Vec<f64> = c.iter().filter(|&&v| v > 0.0).map(|v| 1.0 / v).collect();
                (!inv.is_empty()).then(|| inv.iter().sum::<f64>() / inv.len() as f64)
            }
        };
        match value {
            Some(v) => points.push((*t, v)),
            None => dropped.push(*t),
        }
    }
    if points.is_empty() {
        return Err(FitError::AllPointsDropped);
    }
    Ok(InverseClusteringSeries { points, dropped })
}

pub const FITS_CSV_HEADER: &str = "family,parameters,residual_norm,converged,samples";

impl TruncatedPowerLawFit {
    pub const FAMILY: &'static str = "truncated_power_law";

    pub fn csv_row(&self) -> String {
        format!(
            "{},v0={:.16e};beta={:.16e};kappa={:.16e};amplitude={:.16e};bins={};zeros_dropped={},{:.16e},{},{}",
            Self::FAMILY,
            self.v0,
            self.beta,
            self.kappa,
            self.amplitude,
            self.bins_used,
            self.zeros_dropped,
            self.residual_norm,
            self.converged,
            self.samples_used
        )
    }
}

impl PowerLawFit {
    pub const FAMILY: &'static str = "kc_power_law";

    pub fn csv_row(&self) -> String {
        format!(
            "{},a={:.16e};b={:.16e},{:.16e},true,{}",
            Self::FAMILY,
            self.amplitude,
            self.exponent,
            self.residual_norm,
            self.points
        )
    }
}

impl SigmoidFit {
    pub const FAMILY: &'static str = "sigmoid_inverse_clustering";

    pub fn csv_row(&self, points: usize) -> String {
        format!(
            "{},scale={:.16e};beta={:.16e};delta={:.16e};constant_residual={:.16e},{:.16e},{},{}",
            Self::FAMILY,
            self.scale,
            self.beta,
            self.delta,
            self.constant_residual_norm,
            self.residual_norm,
            self.converged,
            points
        )
    }
}

/// Row recording a fit that could not be performed.
pub fn failed_fit_row(family: &str, error: &FitError) -> String {
    let msg: String = error.to_string().chars().map(|c| if c == ',' || c == '\n' { ';' } else { c }).collect();
    format!("{family},error={msg},NaN,false,0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::UndirectedGraph;
    use crate::graphmetrics::{summarize, GraphSummary};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn uniform_histogram_is_flat() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let v: Vec<f64> = (0..1_000_000).map(|_| rng.random::<f64>()).collect();
        let h = histogram(&v, 10, Binning::Linear).unwrap();
        assert!(h.densities.iter().all(|d| (d - 1.0).abs() < 0.02), "{:?}", h.densities);
    }

    #[test]
    fn single_value_fills_one_bin() {
        let h = histogram(&[0.3; 7], 5, Binning::Linear).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.counts.iter().sum::<usize>(), 7);
    }

    #[test]
    fn log_bins_reject_nonpositive() {
        assert_eq!(histogram(&[1.0, 0.0], 4, Binning::Logarithmic), Err(FitError::NonPositive(0.0)));
    }

    proptest! {
        #[test]
        fn histogram_is_normalized(v in prop::collection::vec(1e-6f64..1e3, 1..300), bins in 2usize..40, log in any::<bool>()) {
            let h = histogram(&v, bins, if log { Binning::Logarithmic } else { Binning::Linear }).unwrap();
            let mass: f64 = (0..bins).map(|k| h.densities[k] * h.width(k)).sum();
            prop_assert!((mass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_data_with_true_guess_is_a_fixed_point() {
        let x: Vec<f64> = (1..20).map(|k| k as f64 * 0.1).collect();
        let model = |x: f64, p: &[f64]| p[0] * (-p[1] * x).exp();
        let y: Vec<f64> = x.iter().map(|&v| model(v, &[2.0, 0.7])).collect();
        let r = nls_fit(model, &x, &y, None, &[2.0, 0.7], None, NlsOptions::default()).unwrap();
        assert_eq!(r.params, vec![2.0, 0.7]);
        assert_eq!(r.residual_norm, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn linear_slope_matches_normal_equations() {
        let x = [0.5, 1.0, 2.0, 3.5, 4.0];
        let y = [1.1, 2.3, 3.9, 7.2, 8.1];
        let closed = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / x.iter().map(|a| a * a).sum::<f64>();
        let r = nls_fit(|x, p| p[0] * x, &x, &y, None, &[1.0], None, NlsOptions::default()).unwrap();
        assert!((r.params[0] - closed).abs() < 1e-12, "{} vs {closed}", r.params[0]);
        let exact: Vec<f64> = x.iter().map(|v| 3.25 * v).collect();
        let r = nls_fit(|x, p| p[0] * x, &x, &exact, None, &[1.0], None, NlsOptions::default()).unwrap();
        assert!((r.params[0] - 3.25).abs() < 1e-12);
    }

    #[test]
    fn active_bound_is_flagged() {
        let x: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 5.0 * v).collect();
        let b = Bounds { lower: vec![0.0], upper: vec![3.0] };
        let r = nls_fit(|x, p| p[0] * x, &x, &y, None, &[1.0], Some(&b), NlsOptions::default()).unwrap();
        assert_eq!(r.params, vec![3.0]);
        assert_eq!(r.at_bound, vec![true]);
    }

    #[test]
    fn unused_parameter_is_singular() {
        let x = [1.0, 2.0, 3.0];
        let r = nls_fit(|x, p| p[0] * x, &x, &[1.0, 2.0, 3.0], None, &[1.0, 4.0], None, NlsOptions::default());
        assert_eq!(r, Err(FitError::SingularJacobian(1)));
    }

    #[test]
    fn truncated_power_law_recovery() {
        let mut ok = 0;
        for seed in 0..10 {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let v = sample_truncated_power_law(100_000, 0.05, 1.5, 0.85, &mut rng);
            let f = fit_truncated_power_law(&v).unwrap();
            if (f.beta - 1.5).abs() <= 0.2 && (f.kappa - 0.85).abs() <= 0.2 {
                ok += 1;
            }
        }
        assert!(ok >= 9, "{ok}/10 seeds recovered");
    }

    #[test]
    fn pure_exponential_has_zero_exponent() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let v = sample_truncated_power_law(100_000, 0.05, 0.0, 0.85, &mut rng);
        let f = fit_truncated_power_law(&v).unwrap();
        assert!(f.beta.abs() <= 0.1, "{f:?}");
    }

    #[test]
    fn truncated_power_law_input_checks() {
        assert!(matches!(fit_truncated_power_law(&[0.5; 10]), Err(FitError::TooFewPoints { .. })));
        assert_eq!(fit_truncated_power_law(&[1.5]), Err(FitError::OutOfUnitInterval(1.5)));
    }

    #[test]
    fn kc_generator_recovered() {
        let pairs: Vec<(f64, f64)> = (2..60).map(|k| (k as f64, 2.61 * (k as f64).powf(-0.32))).collect();
        let f = fit_kc_power_law(&pairs).unwrap();
        assert!((f.amplitude - 2.61).abs() < 1e-10);
        assert!((f.exponent + 0.32).abs() < 1e-10);
        let flat: Vec<(f64, f64)> = (2..10).map(|k| (k as f64, 0.4)).collect();
        assert!(fit_kc_power_law(&flat).unwrap().exponent.abs() < 1e-12);
    }

    #[test]
    fn kc_regression_matches_normal_equations() {
        let pairs = [(2.0, 0.9), (3.0, 0.7), (5.0, 0.66), (8.0, 0.41), (13.0, 0.45), (1.0, 0.2), (4.0, 0.0)];
        let f = fit_kc_power_law(&pairs).unwrap();
        let used: Vec<_> = pairs.iter().filter(|p| p.0 >= 2.0 && p.1 > 0.0).collect();
        let a = DMatrix::from_fn(used.len(), 2, |i, j| if j == 0 { 1.0 } else { used[i].0.ln() });
        let b = DVector::from_iterator(used.len(), used.iter().map(|p| p.1.ln()));
        let sol = (a.transpose() * &a).try_inverse().unwrap() * a.transpose() * b;
        assert!((f.amplitude.ln() - sol[0]).abs() < 1e-12);
        assert!((f.exponent - sol[1]).abs() < 1e-12);
        assert_eq!(f.points, 5);
    }

    #[test]
    fn sigmoid_self_consistency() {
        let t: Vec<f64> = (0..12).map(|k| 0.3 + 0.25 * k as f64).collect();
        let series: Vec<(f64, f64)> = t.iter().map(|&t| (t, sigmoid_model(t, 1.0, 2.0, 0.5))).collect();
        let f = fit_sigmoid_inverse_clustering(&series).unwrap();
        assert!((f.beta - 2.0).abs() < 1e-6, "{f:?}");
        assert!((f.delta - 0.5).abs() < 1e-6, "{f:?}");
        assert!((f.scale - 1.0).abs() < 1e-6, "{f:?}");
    }

    #[test]
    fn sigmoid_recovers_series_spanning_decades() {
        let series: Vec<(f64, f64)> = (1..=10).map(|i| 0.1 * i as f64).map(|t| (t, sigmoid_model(t, 1.2, 1.8, 0.3))).collect();
        let f = fit_sigmoid_inverse_clustering(&series).unwrap();
        assert!((f.scale - 1.2).abs() < 1e-6 && (f.beta - 1.8).abs() < 1e-6 && (f.delta - 0.3).abs() < 1e-6, "{f:?}");
    }

    #[test]
    fn flat_series_fits_flat() {
        let series: Vec<(f64, f64)> = (1..10).map(|k| (k as f64 * 0.1, sigmoid_model(k as f64 * 0.1, 1.5, 0.0, 0.3))).collect();
        let f = fit_sigmoid_inverse_clustering(&series).unwrap();
        let fitted: Vec<f64> = series.iter().map(|p| sigmoid_model(p.0, f.scale, f.beta, f.delta)).collect();
        assert!(fitted.iter().all(|v| (v - 3.0).abs() < 1e-8), "{fitted:?}");
    }

    #[test]
    fn sigmoid_rejects_nonpositive_time() {
        let s = [(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (3.0, 1.0)];
        assert!(matches!(fit_sigmoid_inverse_clustering(&s), Err(FitError::Domain(_))));
    }

    #[test]
    fn inverse_clustering_examples() {
        let nodes = |s: GraphSummary| s.node_metrics.iter().map(|m| m.clustering).collect::<Vec<_>>();
        let complete = |n: usize| nodes(summarize(&UndirectedGraph::from_fn(n, |_, _| true)));
        let half = nodes(summarize(&UndirectedGraph::from_fn(20, |i, j| {
            let d = j - i;
            d.min(20 - d) <= 2
        })));
        let s = inverse_mean_clustering_series(&[(0.1, half.clone()), (0.2, complete(4))], InverseClusteringMode::ReciprocalOfMean)
            .unwrap();
        assert_eq!(s.points, vec![(0.1, 2.0), (0.2, 1.0)]);
        let ks: Vec<_> = (3..8).map(|n| (n as f64, complete(n))).collect();
        let s = inverse_mean_clustering_series(&ks, InverseClusteringMode::MeanOfReciprocal).unwrap();
        assert!(s.points.iter().all(|p| p.1 == 1.0));
        let empty = nodes(summarize(&UndirectedGraph::empty(5)));
        let s = inverse_mean_clustering_series(&[(0.1, empty.clone()), (0.2, half)], InverseClusteringMode::ReciprocalOfMean)
            .unwrap();
        assert_eq!(s.dropped, vec![0.1]);
        assert_eq!(
            inverse_mean_clustering_series(&[(0.1, empty)], InverseClusteringMode::ReciprocalOfMean),
            Err(FitError::AllPointsDropped)
        );
    }
}
