//! Periodic-approximant band spectra, their Raymond labeling, band-length
//! bounds, the counting recursion and the derived dimension estimates.

pub mod counting;
pub mod dimension;
pub mod label;
pub mod liu_wen;
pub mod report;
pub mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use counting::{counting_recursion, CountingChecks, CountingState};
pub use dimension::{
    box_count, box_dimension_lower_bound, closed_form_box_bound, gamma_v, gauss_kuzmin_c, old_bound,
    prior_bound_comparison, prior_bound_from_constants, DimensionReport,
    GammaEstimate, GammaMode, PriorBounds,
};
pub use label::{label_bands, Band, LabeledLevel, LabeledSpectrum, RaymondType};
pub use liu_wen::{koebe_radii, length_bounds, KoebeRadii, LengthBoundMatrices, LengthBounds};
pub use search::{band_edges, band_hierarchy, BandHierarchy, BandSpectrum, SearchOptions, TraceSelector};

/// Couplings at or below this value are outside the band-length and
/// dimension estimates.
pub const MIN_COUPLING: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains_interval(&self, o: &Interval, tol: f64) -> bool {
        o.lo >= self.lo - tol && o.hi <= self.hi + tol
    }

    pub fn intersects(&self, o: &Interval) -> bool {
        self.lo.max(o.lo) <= self.hi.min(o.hi)
    }

    pub fn intersection(&self, o: &Interval) -> Option<Interval> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then(|| Interval::new(lo, hi))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("coupling V = {0} is not above {MIN_COUPLING}")]
    CouplingTooSmall(f64),
    #[error("level {level}: q_k = {q} exceeds the cap {cap}")]
    CapExceeded { level: usize, q: String, cap: u64 },
    #[error("level {level} exceeds the continued-fraction prefix of length {available}")]
    LevelBeyondPrefix { level: usize, available: usize },
    #[error("level {level}, {selector:?}: found {found} bands, expected {expected}")]
    CountMismatch { level: usize, selector: TraceSelector, expected: u64, found: usize },
    #[error("labeling inconsistency at level {level}: {detail}")]
    LabelingInconsistency { level: usize, detail: String },
    #[error("no-ones mode needs every a_k >= 2, but a_{position} = 1")]
    ModeMismatch { position: usize },
    #[error("forbidden transition {from:?} -> {to:?} at step {step} of an index word")]
    ForbiddenTransition { step: usize, from: RaymondType, to: RaymondType },
}

/// Sorted, pairwise intersections of two sorted disjoint interval lists.
pub fn intersect_sorted(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        if let Some(x) = a[i].intersection(&b[j]) {
            out.push(x);
        }
        if a[i].hi < b[j].hi {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}
