//! Band-length bounds from products of 3×3 transition matrices along index
//! words, and the derived Koebe radii.

use super::label::RaymondType;
use super::{SpectrumError, MIN_COUPLING};
use crate::cf::ContinuedFraction;
use serde::{Deserialize, Serialize};

/// Log-domain entries of `P_n` and `Q_n`; `None` marks a forbidden transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthBoundMatrices {
    pub a: u64,
    pub c1: f64,
    pub c2: f64,
    pub ln_p: [[Option<f64>; 3]; 3],
    pub ln_q: [[Option<f64>; 3]; 3],
}

impl LengthBoundMatrices {
    pub fn new(a: u64, coupling: f64) -> Self {
        let c1 = 3.0 / (coupling - 8.0);
        let c2 = 1.0 / (coupling + 5.0);
        let af = a as f64;
        let template = |to_ii: f64, rest: f64| {
            [[None, Some(to_ii), None], [Some(rest), None, Some(rest)], [Some(rest), None, Some(rest)]]
        };
        Self {
            a,
            c1,
            c2,
            ln_p: template((af - 1.0) * c1.ln(), c1.ln() - af.ln()),
            ln_q: template((af - 1.0) * c2.ln(), c2.ln() - 3.0 * (af + 2.0).ln()),
        }
    }

    pub fn p(&self, i: RaymondType, j: RaymondType) -> f64 {
        self.ln_p[i.index()][j.index()].map_or(0.0, f64::exp)
    }

    pub fn q(&self, i: RaymondType, j: RaymondType) -> f64 {
        self.ln_q[i.index()][j.index()].map_or(0.0, f64::exp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthBounds {
    /// `4 L_τ(Q)`.
    pub lower: f64,
    /// `4 L_τ(P)`.
    pub upper: f64,
    pub ln_lower: f64,
    pub ln_upper: f64,
}

fn check_coupling(v: f64) -> Result<(), SpectrumError> {
    if v > MIN_COUPLING {
        Ok(())
    } else {
        Err(SpectrumError::CouplingTooSmall(v))
    }
}

/// `(4 L_τ(Q), 4 L_τ(P))` for the index word `τ = i_0 … i_k`, step `j` using
/// the matrices built from `a_j`.
pub fn length_bounds(index: &[RaymondType], cf: &ContinuedFraction, coupling: f64) -> Result<LengthBounds, SpectrumError> {
    check_coupling(coupling)?;
    let (mut lp, mut lq) = (4f64.ln(), 4f64.ln());
    for (j, w) in index.windows(2).enumerate() {
        let m = LengthBoundMatrices::new(cf.a(j + 1), coupling);
        let (i0, i1) = (w[0].index(), w[1].index());
        match (m.ln_p[i0][i1], m.ln_q[i0][i1]) {
            (Some(p), Some(q)) => {
                lp += p;
                lq += q;
            }
            _ => return Err(SpectrumError::ForbiddenTransition { step: j + 1, from: w[0], to: w[1] }),
        }
    }
    Ok(LengthBounds { lower: lq.exp(), upper: lp.exp(), ln_lower: lq, ln_upper: lp })
}

/// `r_k = c_δ inf_τ L_τ(Q)` and `R_k = d_δ sup_τ L_τ(P)` over admissible
/// words of length `k + 1` starting at a level-0 type (I or III).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KoebeRadii {
    pub c_delta: f64,
    pub d_delta: f64,
    /// `ln r_k` for `k = 0..=levels`.
    pub ln_r: Vec<f64>,
    /// `ln R_k` for `k = 0..=levels`.
    pub ln_big_r: Vec<f64>,
}

pub fn koebe_radii(cf: &ContinuedFraction, coupling: f64, levels: usize, c_delta: f64, d_delta: f64) -> Result<KoebeRadii, SpectrumError> {
    check_coupling(coupling)?;
    let levels = levels.min(cf.len());
    let start = [Some(0.0), None, Some(0.0)];
    let (mut lo, mut hi) = (start, start);
    let mut ln_r = Vec::with_capacity(levels + 1);
    let mut ln_big_r = Vec::with_capacity(levels + 1);
    let extreme = |v: &[Option<f64>; 3], pick: fn(f64, f64) -> f64| v.iter().flatten().copied().reduce(pick).unwrap();
    ln_r.push(c_delta.ln() + extreme(&lo, f64::min));
    ln_big_r.push(d_delta.ln() + extreme(&hi, f64::max));
    for j in 1..=levels {
        let m = LengthBoundMatrices::new(cf.a(j), coupling);
        let step = |cur: &[Option<f64>; 3], mat: &[[Option<f64>; 3]; 3], pick: fn(f64, f64) -> f64| {
            let mut out = [None; 3];
            for (to, slot) in out.iter_mut().enumerate() {
                *slot = (0..3)
                    .filter_map(|from| Some(cur[from]? + mat[from][to]?))
                    .reduce(pick);
            }
            out
        };
        lo = step(&lo, &m.ln_q, f64::min);
        hi = step(&hi, &m.ln_p, f64::max);
        ln_r.push(c_delta.ln() + extreme(&lo, f64::min));
        ln_big_r.push(d_delta.ln() + extreme(&hi, f64::max));
    }
    Ok(KoebeRadii { c_delta, d_delta, ln_r, ln_big_r })
}
