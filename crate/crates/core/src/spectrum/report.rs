//! CSV and JSON renderings of band lists and dimension reports.

use super::dimension::DimensionReport;
use super::label::LabeledSpectrum;
use super::search::BandSpectrum;
use crate::io::{num, Csv};
use serde::Serialize;

pub fn band_spectrum_csv(s: &BandSpectrum) -> String {
    let mut csv = Csv::new(&["level", "selector", "lo", "hi"]);
    let sel = match s.selector {
        super::TraceSelector::X => "x",
        super::TraceSelector::Z => "z",
    };
    for b in &s.bands {
        csv.row(&[s.level.to_string(), sel.into(), num(b.lo), num(b.hi)]);
    }
    csv.finish()
}

/// Columns `level, lo, hi, type, index_word`.
pub fn labeled_bands_csv(l: &LabeledSpectrum) -> String {
    let mut csv = Csv::new(&["level", "lo", "hi", "type", "index_word"]);
    for lv in &l.levels {
        for b in &lv.bands {
            csv.row(&[lv.level.to_string(), num(b.interval.lo), num(b.interval.hi), b.kind.to_string(), b.index_word()]);
        }
    }
    csv.finish()
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionSummary {
    pub closed_form_bound: f64,
    pub counting_ratio: f64,
    pub counting_ratio_limsup: f64,
    pub old_bound: f64,
    pub window: Option<(usize, usize)>,
}

impl From<&DimensionReport> for DimensionSummary {
    fn from(r: &DimensionReport) -> Self {
        Self {
            closed_form_bound: r.closed_form_bound,
            counting_ratio: r.counting_ratio.value,
            counting_ratio_limsup: r.counting_ratio_limsup.value,
            old_bound: r.old_bound,
            window: r.counting_ratio.window,
        }
    }
}
