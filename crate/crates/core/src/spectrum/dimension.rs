//! Box-counting lower bounds, the older Hausdorff-type bound, and the
//! scaling exponent `γ(V)` used by the transport bounds.

use super::counting::{counting_ratio, counting_recursion};
use super::{Interval, SpectrumError, MIN_COUPLING};
use crate::cf::{frequency_stats, ContinuedFraction};
use crate::estimate::{liminf_surrogate, limsup_surrogate, TailEstimate};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

fn check_coupling(v: f64) -> Result<(), SpectrumError> {
    if v > MIN_COUPLING {
        Ok(())
    } else {
        Err(SpectrumError::CouplingTooSmall(v))
    }
}

/// `½ ln 2 / (C + ln(V + 5))`.
pub fn closed_form_box_bound(c: f64, coupling: f64) -> f64 {
    0.5 * LN_2 / (c + (coupling + 5.0).ln())
}

/// `max{ ln 2 / (10 ln 2 − 3 ln t_2), (ln M − ln 3) / (ln M − ln(t_2/3)) }`
/// with `t_2 = 1/(4(V+8))`.
pub fn old_bound(m: f64, coupling: f64) -> f64 {
    let t2 = 1.0 / (4.0 * (coupling + 8.0));
    let first = LN_2 / (10.0 * LN_2 - 3.0 * t2.ln());
    let second = (m.ln() - 3f64.ln()) / (m.ln() - (t2 / 3.0).ln());
    first.max(second)
}

/// `3 E[ln(a + 2)]` under the Gauss–Kuzmin distribution, the value of `C`
/// for Lebesgue-almost every frequency.
pub fn gauss_kuzmin_c() -> f64 {
    const N: u64 = 1_000_000;
    let mut s = 0.0;
    for a in (1..=N).rev() {
        let af = a as f64;
        s += (af + 2.0).ln() * (1.0 / (af * (af + 2.0))).ln_1p() / LN_2;
    }
    // Tail Σ_{a>N} ln(a)/(a² ln 2) ≈ (ln N + 1)/(N ln 2).
    let nf = N as f64;
    s += (nf.ln() + 1.0) / (nf * LN_2);
    3.0 * s
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimensionReport {
    pub coupling: f64,
    pub levels: usize,
    pub c: TailEstimate,
    pub closed_form_bound: f64,
    /// `ln(½(n_II + n_III)) / (−ln ε_k)` for `k = 1..=levels`.
    pub counting_ratios: Vec<f64>,
    pub counting_ratio: TailEstimate,
    pub counting_ratio_limsup: TailEstimate,
    pub m: TailEstimate,
    pub old_bound: f64,
}

pub fn box_dimension_lower_bound(cf: &ContinuedFraction, coupling: f64) -> Result<DimensionReport, SpectrumError> {
    check_coupling(coupling)?;
    let stats = frequency_stats(cf);
    let c = stats.c_limsup();
    let m = stats.m_liminf();
    let states = counting_recursion(cf, coupling, cf.len());
    let counting_ratios: Vec<f64> = states[1..].iter().map(counting_ratio).collect();
    Ok(DimensionReport {
        coupling,
        levels: cf.len(),
        closed_form_bound: closed_form_box_bound(c.value, coupling),
        counting_ratio: liminf_surrogate(&counting_ratios),
        counting_ratio_limsup: limsup_surrogate(&counting_ratios),
        counting_ratios,
        c,
        old_bound: old_bound(m.value, coupling),
        m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorBounds {
    pub new_bound: f64,
    pub old_bound: f64,
    pub c: f64,
    pub m: f64,
    pub t2: f64,
}

pub fn prior_bound_from_constants(c: f64, m: f64, coupling: f64) -> PriorBounds {
    PriorBounds {
        new_bound: closed_form_box_bound(c, coupling),
        old_bound: old_bound(m, coupling),
        c,
        m,
        t2: 1.0 / (4.0 * (coupling + 8.0)),
    }
}

pub fn prior_bound_comparison(cf: &ContinuedFraction, coupling: f64) -> Result<PriorBounds, SpectrumError> {
    check_coupling(coupling)?;
    let stats = frequency_stats(cf);
    Ok(prior_bound_from_constants(stats.c_limsup().value, stats.m_liminf().value, coupling))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaMode {
    General,
    /// Every `a_k ≥ 2`, which halves the exponent's denominator.
    NoOnes,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub mode: GammaMode,
    pub gamma: f64,
    pub inv_gamma: f64,
    /// The growth-rate estimate `D` entering the exponent.
    pub d: TailEstimate,
}

/// `γ(V) ≈ −ln c_1 / (2 D)` (general) or `−ln c_1 / D` (no ones), with
/// `c_1 = 3/(V−8)` and `D` the liminf of `ln q_k / k`.
pub fn gamma_v(cf: &ContinuedFraction, coupling: f64, mode: GammaMode) -> Result<GammaEstimate, SpectrumError> {
    check_coupling(coupling)?;
    if mode == GammaMode::NoOnes {
        if let Some(pos) = cf.quotients().iter().position(|&a| a == 1) {
            return Err(SpectrumError::ModeMismatch { position: pos + 1 });
        }
    }
    let d = frequency_stats(cf).d_liminf();
    let ln_inv_c1 = ((coupling - 8.0) / 3.0).ln();
    let divisor = match mode {
        GammaMode::General => 2.0,
        GammaMode::NoOnes => 1.0,
    };
    let gamma = ln_inv_c1 / (divisor * d.value);
    Ok(GammaEstimate { mode, gamma, inv_gamma: 1.0 / gamma, d })
}

/// Number of mesh cells `[jε, (j+1)ε)` meeting the union of `bands`.
pub fn box_count(bands: &[Interval], eps: f64) -> u128 {
    let mut cells: Vec<(i128, i128)> =
        bands.iter().map(|b| ((b.lo / eps).floor() as i128, (b.hi / eps).floor() as i128)).collect();
    cells.sort_unstable();
    let mut total = 0u128;
    let mut current: Option<(i128, i128)> = None;
    for (lo, hi) in cells {
        current = match current {
            Some((clo, chi)) if lo <= chi => Some((clo, chi.max(hi))),
            Some((clo, chi)) => {
                total += (chi - clo + 1) as u128;
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((clo, chi)) = current {
        total += (chi - clo + 1) as u128;
    }
    total
}
