//! Transfer-matrix upper bound for the outside probabilities: choice of the
//! scales `k(T)`, `N(T)` and the energy integrals of the inverse
//! squared transfer-matrix norms at `E + i/T`.

use super::fit::{linear_fit, LinearFit};
use super::TransportError;
use crate::cf::{convergents, ContinuedFraction};
use crate::spectrum::{gamma_v, GammaMode};
use crate::trace::{escape_level, level_matrices, traces, Mat2, DEFAULT_DELTA};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtOptions {
    pub grid_points: usize,
    /// Refine the grid so its spacing is at most `1/(points_per_width · T)`,
    /// the width of the features the integrand develops at offset `1/T`.
    pub auto_resolution: bool,
    pub points_per_width: f64,
    pub max_grid_points: usize,
    pub d_delta: f64,
    pub delta: f64,
    pub mode: GammaMode,
    /// Target decay exponent `m` in the comparison `T³ I` vs `T^{−m}`.
    pub decay_m: f64,
    /// Deepest level `k + ⌊√k⌋` the evaluation may reach.
    pub max_level: usize,
}

impl Default for DtOptions {
    fn default() -> Self {
        Self {
            grid_points: 2048,
            auto_resolution: false,
            points_per_width: 4.0,
            max_grid_points: 1 << 23,
            d_delta: 1.0,
            delta: DEFAULT_DELTA,
            mode: GammaMode::General,
            decay_m: 1.0,
            max_level: 200,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleChoice {
    pub t: f64,
    pub gamma: f64,
    /// Smallest `k ≥ 1` with `T ≤ q_k^γ / d_δ`.
    pub k: usize,
    pub n_level: usize,
    /// `N(T) = q_{k + ⌊√k⌋}` in decimal.
    pub n_t: String,
    pub ln_n_t: f64,
    /// `q_{k−1}^γ / d_δ ≤ T ≤ q_k^γ / d_δ`.
    pub sandwich_ok: bool,
}

fn isqrt(k: usize) -> usize {
    let mut r = (k as f64).sqrt() as usize;
    while r * r > k {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= k {
        r += 1;
    }
    r
}

/// Largest level available to a scale choice (precious prefixes regrow).
fn prefix_for(cf: &ContinuedFraction, levels: usize) -> Option<ContinuedFraction> {
    if levels <= cf.len() {
        Some(cf.clone())
    } else {
        cf.extended(levels)
    }
}

pub fn scale_for_time(cf: &ContinuedFraction, gamma: f64, t: f64, opts: &DtOptions) -> Result<ScaleChoice, TransportError> {
    let cap = opts.max_level;
    let work = prefix_for(cf, cap).unwrap_or_else(|| cf.clone());
    let avail = work.len().min(cap);
    let q = convergents(&work);
    let ln_t = (t * opts.d_delta).ln();
    let largest = |q: &crate::cf::ConvergentTable| {
        let kmax = (1..=avail).rev().find(|k| k + isqrt(*k) <= avail).unwrap_or(0);
        (gamma * q.ln_q(kmax as isize)).exp() / opts.d_delta
    };
    let Some(k) = (1..=avail).find(|&k| gamma * q.ln_q(k as isize) >= ln_t) else {
        return Err(TransportError::ScaleOverflow { t, needed_level: avail + 1, largest_feasible_t: largest(&q) });
    };
    let n_level = k + isqrt(k);
    if n_level > avail {
        return Err(TransportError::ScaleOverflow { t, needed_level: n_level, largest_feasible_t: largest(&q) });
    }
    let lower = gamma * q.ln_q(k as isize - 1);
    let upper = gamma * q.ln_q(k as isize);
    Ok(ScaleChoice {
        t,
        gamma,
        k,
        n_level,
        n_t: q.q(n_level as isize).to_string(),
        ln_n_t: q.ln_q(n_level as isize),
        sandwich_ok: lower <= ln_t && ln_t <= upper,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DtBoundEvaluation {
    pub scale: ScaleChoice,
    pub coupling: f64,
    /// `K = V + 3`; the grid covers `[−K, K]`.
    pub k_energy: f64,
    pub grid_points: usize,
    /// `(max_{q_j ≤ N} ‖F(q_j, E + i/T)‖²)^{-1}` on the grid.
    #[serde(skip)]
    pub integrand_right: Vec<f64>,
    #[serde(skip)]
    pub integrand_left: Vec<f64>,
    pub right_integral: f64,
    pub left_integral: f64,
    pub t3_right: f64,
    pub t3_left: f64,
    /// `T^{−m}`.
    pub target: f64,
    /// Fraction of grid energies whose orbit at `E + i/T` escapes by level `N`.
    pub escaped_fraction: f64,
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]))
}

pub fn dt_upper_bound_integral(
    cf: &ContinuedFraction,
    coupling: f64,
    t: f64,
    opts: &DtOptions,
) -> Result<DtBoundEvaluation, TransportError> {
    let gamma = gamma_v(cf, coupling, opts.mode)?.gamma;
    let scale = scale_for_time(cf, gamma, t, opts)?;
    let work = prefix_for(cf, scale.n_level).expect("scale_for_time checked the prefix");
    let k_energy = coupling + 3.0;
    let mut points = opts.grid_points;
    if opts.auto_resolution {
        let need = (2.0 * k_energy * t * opts.points_per_width).ceil() as usize + 1;
        points = points.max(need);
    }
    if points > opts.max_grid_points {
        return Err(TransportError::GridBudget { t, points, max: opts.max_grid_points });
    }
    let h = 2.0 * k_energy / (points - 1) as f64;
    let site_one = if work.a(1) == 1 { coupling } else { 0.0 };
    let eta = 1.0 / t;
    let n_level = scale.n_level;
    let delta = opts.delta;

    let samples: Vec<(f64, f64, bool)> = (0..points)
        .into_par_iter()
        .map(|i| {
            let z = Complex64::new(-k_energy + i as f64 * h, eta);
            let lm = level_matrices(&work, coupling, z, n_level);
            let first_r = Mat2::transfer(z, site_one).spectral_norm().ln();
            let first_l = Mat2::transfer_inverse(z, 0.0).spectral_norm().ln();
            let max_r = lm.right.iter().map(|m| m.log_norm()).fold(first_r, f64::max);
            let max_l = lm.left.iter().map(|m| m.log_norm()).fold(first_l, f64::max);
            let escaped = escape_level(&traces(&work, coupling, z, n_level), delta).is_some();
            ((-2.0 * max_r).exp(), (-2.0 * max_l).exp(), escaped)
        })
        .collect();
    let integrand_right: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let integrand_left: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let escaped_fraction = samples.iter().filter(|s| s.2).count() as f64 / points as f64;
    let right_integral = trapezoid(&integrand_right, h);
    let left_integral = trapezoid(&integrand_left, h);
    let t3 = t.powi(3);
    Ok(DtBoundEvaluation {
        scale,
        coupling,
        k_energy,
        grid_points: points,
        right_integral,
        left_integral,
        t3_right: t3 * right_integral,
        t3_left: t3 * left_integral,
        target: t.powf(-opts.decay_m),
        escaped_fraction,
        integrand_right,
        integrand_left,
    })
}

/// Slope of `ln(T³ I_right)` against `ln T`.
pub fn dt_decay_slope(evals: &[DtBoundEvaluation]) -> LinearFit {
    let xs: Vec<f64> = evals.iter().map(|e| e.scale.t.ln()).collect();
    let ys: Vec<f64> = evals.iter().map(|e| e.t3_right.ln()).collect();
    linear_fit(&xs, &ys)
}
