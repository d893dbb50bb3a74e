//! Log-log regressions and the finite-time transport-exponent surrogates.

use super::evolve::TransportRun;
use super::TransportError;
use crate::estimate::tail_window;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Two-sided 95% confidence interval for the slope.
    pub slope_ci95: (f64, f64),
    pub points: usize,
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    assert!(n >= 2, "a line needs two points");
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (slope_stderr, slope_ci95) = if n > 2 {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        let se = (rss / (nf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, nf - 2.0).map(|d| d.inverse_cdf(0.975)).unwrap_or(f64::INFINITY);
        (se, (slope - t * se, slope + t * se))
    } else {
        (f64::NAN, (f64::NEG_INFINITY, f64::INFINITY))
    };
    LinearFit { slope, intercept, slope_stderr, slope_ci95, points: n }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// `α` counts as finite-`S` while the fitted `S(α)` stays below this.
    pub upper_threshold: f64,
    /// `α` counts as `S(α) = 0` while the fitted `S(α)` stays below this.
    pub lower_threshold: f64,
    pub min_decades: f64,
    /// Override for the data-driven probability noise floor.
    pub noise_floor: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { upper_threshold: 10.0, lower_threshold: 0.1, min_decades: 3.0, noise_floor: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphaFit {
    pub alpha: f64,
    /// `P(T^α − 2, T)` per time.
    pub outside: Vec<f64>,
    /// Some `P` fell below the noise floor, read as `S(α) = ∞`.
    pub below_floor: bool,
    /// Regression of `ln P` on `ln T`; `None` when below the floor.
    pub fit: Option<LinearFit>,
    /// `−slope`, the regression estimate of `S(α)`.
    pub s_fit: f64,
    /// `max −ln P / ln T` over the tail of the time grid (`S⁻` surrogate).
    pub s_minus: f64,
    /// `min −ln P / ln T` over the tail of the time grid (`S⁺` surrogate).
    pub s_plus: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentFit {
    pub options: FitOptions,
    pub noise_floor: f64,
    pub t_window: (f64, f64),
    pub alphas: Vec<AlphaFit>,
    pub alpha_u: f64,
    /// `α̂_u` hit the top of the grid without `S` blowing up.
    pub alpha_u_saturated: bool,
    pub alpha_l: f64,
}

/// Smallest probability distinguishable from rounding noise in `run`.
pub fn noise_floor(run: &TransportRun) -> f64 {
    let negative = run
        .a
        .iter()
        .map(|a| a.iter().filter(|v| **v < 0.0).map(|v| -v).sum::<f64>())
        .fold(0.0, f64::max);
    let defect = run.unitarity_defects.iter().copied().fold(0.0, f64::max);
    (10.0 * negative).max(10.0 * defect).max(1e-13)
}

pub fn exponent_fit(run: &TransportRun, alpha_grid: &[f64], opts: FitOptions) -> Result<ExponentFit, TransportError> {
    let t_min = run.times.iter().copied().fold(f64::INFINITY, f64::min);
    let t_max = run.times.iter().copied().fold(0.0, f64::max);
    let decades = (t_max / t_min).log10();
    if run.times.len() < 2 || !(decades >= opts.min_decades) {
        return Err(TransportError::InsufficientDecades { decades, required: opts.min_decades });
    }
    let floor = opts.noise_floor.unwrap_or_else(|| noise_floor(run));
    let ln_t: Vec<f64> = run.times.iter().map(|t| t.ln()).collect();
    let (w0, w1) = tail_window(run.times.len());

    let mut alphas = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        let outside: Vec<f64> =
            run.times.iter().enumerate().map(|(i, t)| run.outside(i, t.powf(alpha) - 2.0)).collect();
        let below_floor = outside.iter().any(|p| *p < floor);
        let ratios: Vec<f64> = outside
            .iter()
            .zip(&ln_t)
            .map(|(p, lt)| if *p < floor { f64::INFINITY } else { -p.ln() / lt })
            .collect();
        let tail = &ratios[w0 - 1..w1];
        let s_minus = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s_plus = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let (fit, s_fit) = if below_floor {
            (None, f64::INFINITY)
        } else {
            let ys: Vec<f64> = outside.iter().map(|p| p.ln()).collect();
            let f = linear_fit(&ln_t, &ys);
            (Some(f), -f.slope)
        };
        alphas.push(AlphaFit { alpha, outside, below_floor, fit, s_fit, s_minus, s_plus });
    }

    let first_infinite = alphas.iter().position(|a| !(a.s_fit < opts.upper_threshold));
    let (alpha_u, alpha_u_saturated) = match first_infinite {
        Some(0) => (0.0, false),
        Some(i) => (alphas[i - 1].alpha, false),
        None => (alphas.last().map_or(0.0, |a| a.alpha), true),
    };
    let alpha_l = match alphas.iter().position(|a| !(a.s_fit < opts.lower_threshold)) {
        Some(0) => 0.0,
        Some(i) => alphas[i - 1].alpha,
        None => alphas.last().map_or(0.0, |a| a.alpha),
    };
    Ok(ExponentFit { options: opts, noise_floor: floor, t_window: (t_min, t_max), alphas, alpha_u, alpha_u_saturated, alpha_l })
}

/// Uniform grid `0, step, 2 step, …, max`.
pub fn alpha_grid(max: f64, step: f64) -> Vec<f64> {
    let n = (max / step).round() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}
