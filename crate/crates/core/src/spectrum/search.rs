//! Locating the bands `{E : |x_k(E)| ≤ 2}` and `{E : |z_k(E)| ≤ 2}`.
//!
//! Level `k` is searched only near the bands of level `k − 1`: the `x_k`
//! bands lie in the union of the `x_{k−1}` and `z_{k−1}` bands, and the
//! `z_k` bands in the union of the `x_k` and `x_{k−1}` bands. Each search
//! region is sampled on Chebyshev–Lobatto nodes, local extrema of the samples
//! are polished by golden-section search so that the trace is monotone
//! between consecutive samples, and every `±2` crossing is bisected. The
//! number of bands of a degree-`d` trace polynomial is known, which gives a
//! certificate for the result.

use super::{Interval, SpectrumError};
use crate::cf::{convergents, ContinuedFraction, ConvergentTable};
use crate::trace::real_traces_at;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceSelector {
    /// `x_k = t_{k+1,0}`, with `q_k` bands.
    X,
    /// `z_k = t_{k,1}`, with `q_k + q_{k−1}` bands.
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Largest `q_k` a search may be asked for.
    pub max_q: u64,
    /// Minimum Chebyshev nodes per search region.
    pub min_nodes: usize,
    /// Relative padding added on both sides of each search region.
    pub padding: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { max_q: 1000, min_nodes: 64, padding: 0.25 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandSpectrum {
    pub level: usize,
    pub selector: TraceSelector,
    pub bands: Vec<Interval>,
}

/// `x_k` and `z_k` band lists for `k = 0..=depth`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandHierarchy {
    pub coupling: f64,
    pub quotients: Vec<u64>,
    pub x: Vec<Vec<Interval>>,
    pub z: Vec<Vec<Interval>>,
}

impl BandHierarchy {
    pub fn depth(&self) -> usize {
        self.x.len() - 1
    }

    pub fn spectrum(&self, level: usize, selector: TraceSelector) -> BandSpectrum {
        let bands = match selector {
            TraceSelector::X => self.x[level].clone(),
            TraceSelector::Z => self.z[level].clone(),
        };
        BandSpectrum { level, selector, bands }
    }
}

pub fn expected_count(q: &ConvergentTable, level: usize, selector: TraceSelector) -> u64 {
    let k = level as isize;
    let qk = q.q_u64(k).expect("capped levels fit in 64 bits");
    match selector {
        TraceSelector::X => qk,
        TraceSelector::Z => qk + q.q_u64(k - 1).expect("capped levels fit in 64 bits"),
    }
}

/// Bands of `x_k` and `z_k` for every level up to `depth`.
pub fn band_hierarchy(
    cf: &ContinuedFraction,
    coupling: f64,
    depth: usize,
    opts: &SearchOptions,
) -> Result<BandHierarchy, SpectrumError> {
    if depth > cf.len() {
        return Err(SpectrumError::LevelBeyondPrefix { level: depth, available: cf.len() });
    }
    let q = convergents(cf);
    if q.q_u64(depth as isize).is_none_or(|v| v > opts.max_q) {
        return Err(SpectrumError::CapExceeded {
            level: depth,
            q: q.q(depth as isize).to_string(),
            cap: opts.max_q,
        });
    }
    let mut x = vec![vec![Interval::new(-2.0, 2.0)]];
    let mut z = vec![vec![Interval::new(coupling - 2.0, coupling + 2.0)]];
    for k in 1..=depth {
        let regions_x = merged_regions(&[&x[k - 1], &z[k - 1]], opts.padding);
        let xk = search_level(cf, coupling, k, TraceSelector::X, &regions_x, &q, opts)?;
        let regions_z = merged_regions(&[&xk, &x[k - 1]], opts.padding);
        let zk = search_level(cf, coupling, k, TraceSelector::Z, &regions_z, &q, opts)?;
        x.push(xk);
        z.push(zk);
    }
    Ok(BandHierarchy { coupling, quotients: cf.quotients()[..depth].to_vec(), x, z })
}

/// Bands of one trace polynomial at one level.
pub fn band_edges(
    cf: &ContinuedFraction,
    coupling: f64,
    level: usize,
    selector: TraceSelector,
    opts: &SearchOptions,
) -> Result<BandSpectrum, SpectrumError> {
    Ok(band_hierarchy(cf, coupling, level, opts)?.spectrum(level, selector))
}

fn merged_regions(lists: &[&[Interval]], padding: f64) -> Vec<Interval> {
    let mut all: Vec<Interval> = lists
        .iter()
        .flat_map(|l| l.iter())
        .map(|b| {
            let pad = padding * b.width() + 1e-12;
            Interval::new(b.lo - pad, b.hi + pad)
        })
        .collect();
    all.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(all.len());
    for r in all {
        match out.last_mut() {
            Some(last) if r.lo <= last.hi => last.hi = last.hi.max(r.hi),
            _ => out.push(r),
        }
    }
    out
}

fn search_level(
    cf: &ContinuedFraction,
    coupling: f64,
    k: usize,
    selector: TraceSelector,
    regions: &[Interval],
    q: &ConvergentTable,
    opts: &SearchOptions,
) -> Result<Vec<Interval>, SpectrumError> {
    let f = |e: f64| {
        let (x, z) = real_traces_at(cf, coupling, e, k);
        match selector {
            TraceSelector::X => x,
            TraceSelector::Z => z,
        }
    };
    let expected = expected_count(q, k, selector);
    let a = cf.a(k) as usize;
    let base = opts.min_nodes.max(8 * (a + 2));
    let mut found = 0;
    for refine in [1, 10] {
        let nodes = base * refine;
        let per_region: Vec<Vec<Interval>> =
            regions.par_iter().map(|r| bands_in_region(&f, *r, nodes)).collect();
        let mut bands: Vec<Interval> = per_region.into_iter().flatten().collect();
        bands.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let bands = merge_touching(bands);
        found = bands.len();
        if found as u64 == expected {
            return Ok(bands);
        }
    }
    Err(SpectrumError::CountMismatch { level: k, selector, expected, found })
}

fn merge_touching(bands: Vec<Interval>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::with_capacity(bands.len());
    for b in bands {
        match out.last_mut() {
            Some(last) if b.lo <= last.hi => last.hi = last.hi.max(b.hi),
            _ => out.push(b),
        }
    }
    out
}

/// All maximal intervals in (a neighbourhood of) `region` with `|f| ≤ 2`.
pub(crate) fn bands_in_region<F: Fn(f64) -> f64>(f: &F, region: Interval, nodes: usize) -> Vec<Interval> {
    let mut r = region;
    // A band reaching the region boundary continues outside; widen and retry.
    for _ in 0..8 {
        let bands = scan(f, r, nodes);
        let touches_lo = bands.first().is_some_and(|b| b.lo <= r.lo);
        let touches_hi = bands.last().is_some_and(|b| b.hi >= r.hi);
        if !touches_lo && !touches_hi {
            return refine_hidden_gaps(f, bands, nodes);
        }
        let w = r.width();
        r = Interval::new(if touches_lo { r.lo - w } else { r.lo }, if touches_hi { r.hi + w } else { r.hi });
    }
    refine_hidden_gaps(f, scan(f, r, nodes), nodes)
}

/// Inside a genuine band the trace runs monotonically between `−2` and `2`;
/// equal signs at both edges mean at least one gap was stepped over.
fn refine_hidden_gaps<F: Fn(f64) -> f64>(f: &F, bands: Vec<Interval>, nodes: usize) -> Vec<Interval> {
    let mut out = Vec::with_capacity(bands.len());
    for b in bands {
        let same_sign = f(b.lo).signum() == f(b.hi).signum();
        if same_sign && b.width() > 0.0 {
            let inner = scan(f, b, nodes.max(64));
            if inner.len() > 1 {
                out.extend(inner);
                continue;
            }
        }
        out.push(b);
    }
    out
}

fn scan<F: Fn(f64) -> f64>(f: &F, r: Interval, nodes: usize) -> Vec<Interval> {
    let n = nodes.max(2);
    let c = r.mid();
    let h = 0.5 * r.width();
    let mut pts: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let e = if i == 0 {
                r.lo
            } else if i == n {
                r.hi
            } else {
                c - h * (std::f64::consts::PI * i as f64 / n as f64).cos()
            };
            (e, f(e))
        })
        .collect();

    // Polish every sampled local extremum so f is monotone between samples.
    let mut extra = Vec::new();
    for i in 1..pts.len() - 1 {
        let (d0, d1) = (pts[i].1 - pts[i - 1].1, pts[i + 1].1 - pts[i].1);
        if d0 * d1 < 0.0 {
            let peak = d0 > 0.0;
            extra.push(golden_extremum(f, pts[i - 1].0, pts[i + 1].0, peak));
        }
    }
    if !extra.is_empty() {
        pts.extend(extra);
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
    }

    let mut bands: Vec<Interval> = Vec::new();
    for w in pts.windows(2) {
        let ((e0, f0), (e1, f1)) = (w[0], w[1]);
        let Some(piece) = monotone_piece(f, e0, f0, e1, f1) else { continue };
        match bands.last_mut() {
            Some(last) if last.hi >= piece.lo => last.hi = piece.hi,
            _ => bands.push(piece),
        }
    }
    bands
}

/// The part of `[e0, e1]` where `|f| ≤ 2`, assuming `f` monotone there.
fn monotone_piece<F: Fn(f64) -> f64>(f: &F, e0: f64, f0: f64, e1: f64, f1: f64) -> Option<Interval> {
    let inside = |v: f64| v.abs() <= 2.0;
    if (f0 > 2.0 && f1 > 2.0) || (f0 < -2.0 && f1 < -2.0) || f0.is_nan() || f1.is_nan() {
        return None;
    }
    let lo = if inside(f0) {
        e0
    } else {
        let level = if f0 > 2.0 { 2.0 } else { -2.0 };
        bisect(f, e0, e1, level)
    };
    let hi = if inside(f1) {
        e1
    } else {
        let level = if f1 > 2.0 { 2.0 } else { -2.0 };
        bisect(f, lo, e1, level)
    };
    (lo <= hi).then(|| Interval::new(lo, hi))
}

/// Point where `f − level` changes sign in `[a, b]`, to a few ulp.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, level: f64) -> f64 {
    let mut ga = f(a) - level;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol = 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        if b - a <= tol || m <= a || m >= b {
            break;
        }
        let gm = f(m) - level;
        if gm == 0.0 {
            return m;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn golden_extremum<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, peak: bool) -> (f64, f64) {
    let s = if peak { -1.0 } else { 1.0 };
    let g = |e: f64| s * f(e);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    let e = 0.5 * (a + b);
    (e, f(e))
}
