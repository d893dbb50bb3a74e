//! Closed-form transport-exponent bounds.

use super::TransportError;
use crate::cf::{frequency_stats, ContinuedFraction, DensityVerdict, Origin, LEVY_KHINTCHIN_D};
use crate::estimate::TailEstimate;
use crate::spectrum::{closed_form_box_bound, MIN_COUPLING};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosedFormBounds {
    pub coupling: f64,
    /// `ln((V − 8)/3)`.
    pub log_scale: f64,
    pub d: TailEstimate,
    /// `2D / ln((V−8)/3)`.
    pub upper: f64,
    /// `D / ln((V−8)/3)`, valid when no partial quotient equals 1.
    pub upper_no_ones: Option<f64>,
    /// `2 D_K / ln((V−8)/3)`, the value for Lebesgue-almost every frequency.
    pub khintchin_reference: f64,
    /// `ln(a + ω) / ln((V−8)/3)` for precious frequencies with `a ≥ 2`.
    pub precious: Option<f64>,
    /// The sharpest upper bound that applies to this frequency.
    pub best_upper: f64,
    pub c: TailEstimate,
    /// `½ ln 2 / (C + ln(V+5))`.
    pub lower: f64,
    pub lower_applicable: bool,
    pub density: DensityVerdict,
}

pub fn closed_form_bounds(cf: &ContinuedFraction, coupling: f64) -> Result<ClosedFormBounds, TransportError> {
    if !(coupling > MIN_COUPLING) {
        return Err(TransportError::Hypothesis(format!("coupling V = {coupling} must exceed {MIN_COUPLING}")));
    }
    let stats = frequency_stats(cf);
    let log_scale = ((coupling - 8.0) / 3.0).ln();
    let d = stats.d_limsup();
    let upper = 2.0 * d.value / log_scale;
    let upper_no_ones = (!cf.has_unit_quotient()).then(|| d.value / log_scale);
    let precious = match cf.origin() {
        Origin::Precious(a) if a >= 2 => Some(crate::cf::precious_growth_rate(a) / log_scale),
        _ => None,
    };
    let best_upper = [Some(upper), upper_no_ones, precious].into_iter().flatten().fold(f64::INFINITY, f64::min);
    let c = stats.c_limsup();
    let density = stats.bounded_density();
    Ok(ClosedFormBounds {
        coupling,
        log_scale,
        upper,
        upper_no_ones,
        khintchin_reference: 2.0 * LEVY_KHINTCHIN_D / log_scale,
        precious,
        best_upper,
        lower: closed_form_box_bound(c.value, coupling),
        lower_applicable: density.bounded,
        c,
        d,
        density,
    })
}
