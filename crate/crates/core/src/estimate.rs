//! Finite-prefix stand-ins for `limsup` and `liminf`.
//!
//! Every surrogate is the running extremum over the last `⌈n/2⌉` entries of
//! a per-level sequence, and it always carries the window it was taken over.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateSource {
    /// Known in closed form (periodic expansions).
    Exact,
    /// Extremum over the tail window of a finite prefix.
    TailWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub value: f64,
    pub source: EstimateSource,
    /// First and last level (1-based, inclusive) of the window; `None` for
    /// exact values.
    pub window: Option<(usize, usize)>,
}

impl TailEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, source: EstimateSource::Exact, window: None }
    }
}

/// 1-based inclusive bounds of the last `⌈n/2⌉` levels.
pub fn tail_window(n: usize) -> (usize, usize) {
    assert!(n >= 1, "empty sequence has no tail window");
    (n - n.div_ceil(2) + 1, n)
}

fn extremum(values: &[f64], pick: fn(f64, f64) -> f64) -> TailEstimate {
    let (start, end) = tail_window(values.len());
    let value = values[start - 1..end]
        .iter()
        .copied()
        .filter(|v| !v.is_nan())
        .reduce(pick)
        .unwrap_or(f64::NAN);
    TailEstimate { value, source: EstimateSource::TailWindow, window: Some((start, end)) }
}

pub fn limsup_surrogate(values: &[f64]) -> TailEstimate {
    extremum(values, f64::max)
}

pub fn liminf_surrogate(values: &[f64]) -> TailEstimate {
    extremum(values, f64::min)
}
