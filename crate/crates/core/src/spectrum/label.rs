//! Raymond types of bands across consecutive levels.
//!
//! At level `k` the labeled bands are the `z_k` bands lying inside `x_{k−1}`
//! bands (type I) and all `x_k` bands (type II when they sit in an
//! `x_{k−1}` gap, type III when they sit inside an `x_{k−1}` band). Types are
//! assigned from containment in the parent level only, and the per-parent
//! child counts are then checked against the combinatorial rules.

use super::search::BandHierarchy;
use super::{Interval, SpectrumError};
use crate::cf::ContinuedFraction;
use crate::trace::{general_trace, real_trace_triple};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Containment slack, well above the bisection accuracy of the edges.
pub const CONTAINMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RaymondType {
    I,
    II,
    III,
}

impl RaymondType {
    pub const ALL: [RaymondType; 3] = [RaymondType::I, RaymondType::II, RaymondType::III];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RaymondType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RaymondType::I => "I",
            RaymondType::II => "II",
            RaymondType::III => "III",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub interval: Interval,
    pub level: usize,
    pub kind: RaymondType,
    /// Types of the ancestors at levels `0..=level`, the last one being `kind`.
    pub index: Vec<RaymondType>,
    /// Position of the parent in the previous level's band list.
    pub parent: Option<usize>,
}

impl Band {
    pub fn index_word(&self) -> String {
        self.index.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("-")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledLevel {
    pub level: usize,
    /// Sorted by position; pairwise disjoint.
    pub bands: Vec<Band>,
}

impl LabeledLevel {
    pub fn count(&self, kind: RaymondType) -> usize {
        self.bands.iter().filter(|b| b.kind == kind).count()
    }

    pub fn count_at_least(&self, kind: RaymondType, eps: f64) -> usize {
        self.bands.iter().filter(|b| b.kind == kind && b.interval.width() >= eps).count()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledSpectrum {
    pub coupling: f64,
    pub quotients: Vec<u64>,
    pub levels: Vec<LabeledLevel>,
}

fn inconsistency(level: usize, detail: String) -> SpectrumError {
    SpectrumError::LabelingInconsistency { level, detail }
}

/// Indices of `children` grouped by the parent that contains them, or an
/// error naming a child no parent contains.
fn group_by_parent(parents: &[Interval], children: &[Interval]) -> Result<Vec<Vec<usize>>, usize> {
    let mut groups = vec![Vec::new(); parents.len()];
    for (ci, c) in children.iter().enumerate() {
        let m = c.mid();
        let pos = parents.partition_point(|p| p.lo <= m);
        match pos.checked_sub(1) {
            Some(pi) if parents[pi].contains_interval(c, CONTAINMENT_TOL) => groups[pi].push(ci),
            _ => return Err(ci),
        }
    }
    Ok(groups)
}

/// `t_{k+1,−1} = t_{k, a_{k+1} − 1}` at `e`.
fn t_minus_one(cf: &ContinuedFraction, coupling: f64, k: usize, e: f64) -> f64 {
    let (xp, x, z) = real_trace_triple(cf, coupling, e, k);
    general_trace(cf.a(k + 1) - 1, xp, x, z)
}

fn trace_band_contains(t: impl Fn(f64) -> f64, b: &Interval) -> bool {
    (0..=8).all(|i| {
        let e = b.lo + b.width() * i as f64 / 8.0;
        t(e).abs() <= 2.0 + 1e-6
    })
}

pub fn label_bands(h: &BandHierarchy) -> Result<LabeledSpectrum, SpectrumError> {
    let cf = ContinuedFraction::from_quotients(h.quotients.clone()).map_err(|e| inconsistency(0, e.to_string()))?;
    let v = h.coupling;
    let mut level0 = vec![
        Band { interval: h.x[0][0], level: 0, kind: RaymondType::III, index: vec![RaymondType::III], parent: None },
        Band { interval: h.z[0][0], level: 0, kind: RaymondType::I, index: vec![RaymondType::I], parent: None },
    ];
    level0.sort_by(|a, b| a.interval.lo.total_cmp(&b.interval.lo));
    let mut levels = vec![LabeledLevel { level: 0, bands: level0 }];

    for k in 0..h.depth() {
        let a = h.quotients[k] as usize;
        let parents = &levels[k].bands;
        let parent_iv: Vec<Interval> = parents.iter().map(|b| b.interval).collect();
        let xs = &h.x[k + 1];
        let x_groups = group_by_parent(&parent_iv, xs).map_err(|ci| {
            inconsistency(k + 1, format!("x_{} band {:?} lies in no level-{k} band", k + 1, xs[ci]))
        })?;
        // z_{k+1} bands inside x_k bands are the new type I bands.
        let zs: Vec<Interval> =
            h.z[k + 1].iter().copied().filter(|zb| h.x[k].iter().any(|xb| xb.contains_interval(zb, CONTAINMENT_TOL))).collect();
        let z_groups = group_by_parent(&parent_iv, &zs).map_err(|ci| {
            inconsistency(k + 1, format!("z_{} band {:?} lies in no level-{k} band", k + 1, zs[ci]))
        })?;

        let mut next = Vec::with_capacity(xs.len() + zs.len());
        for (pi, parent) in parents.iter().enumerate() {
            let mut kids: Vec<(Interval, RaymondType)> = Vec::new();
            match parent.kind {
                RaymondType::I => {
                    if x_groups[pi].len() != 1 || !z_groups[pi].is_empty() {
                        return Err(inconsistency(
                            k + 1,
                            format!(
                                "type I band {:?} holds {} x-bands and {} z-bands instead of one type II band",
                                parent.interval,
                                x_groups[pi].len(),
                                z_groups[pi].len()
                            ),
                        ));
                    }
                    kids.push((xs[x_groups[pi][0]], RaymondType::II));
                }
                RaymondType::II | RaymondType::III => {
                    let (want_i, want_iii) = if parent.kind == RaymondType::II { (a + 1, a) } else { (a, a - 1) };
                    if z_groups[pi].len() != want_i || x_groups[pi].len() != want_iii {
                        return Err(inconsistency(
                            k + 1,
                            format!(
                                "type {} band {:?} holds {} type I and {} type III bands, expected {want_i} and {want_iii}",
                                parent.kind,
                                parent.interval,
                                z_groups[pi].len(),
                                x_groups[pi].len()
                            ),
                        ));
                    }
                    kids.extend(z_groups[pi].iter().map(|&i| (zs[i], RaymondType::I)));
                    kids.extend(x_groups[pi].iter().map(|&i| (xs[i], RaymondType::III)));
                    kids.sort_by(|a, b| a.0.lo.total_cmp(&b.0.lo));
                    let alternates = kids.iter().enumerate().all(|(j, (_, t))| {
                        *t == if j % 2 == 0 { RaymondType::I } else { RaymondType::III }
                    });
                    if !alternates {
                        return Err(inconsistency(
                            k + 1,
                            format!("children of {:?} do not alternate I/III", parent.interval),
                        ));
                    }
                }
            }
            for (iv, kind) in kids {
                let mut index = parent.index.clone();
                index.push(kind);
                next.push(Band { interval: iv, level: k + 1, kind, index, parent: Some(pi) });
            }
        }
        next.sort_by(|a, b| a.interval.lo.total_cmp(&b.interval.lo));
        if next.windows(2).any(|w| w[0].interval.hi >= w[1].interval.lo) {
            return Err(inconsistency(k + 1, "labeled bands overlap".into()));
        }
        check_definitions(&cf, v, k + 1, &next, h)?;
        levels.push(LabeledLevel { level: k + 1, bands: next });
    }
    Ok(LabeledSpectrum { coupling: v, quotients: h.quotients.clone(), levels })
}

/// The defining gap conditions of each type at level `k`.
fn check_definitions(
    cf: &ContinuedFraction,
    v: f64,
    k: usize,
    bands: &[Band],
    h: &BandHierarchy,
) -> Result<(), SpectrumError> {
    let disjoint_from = |b: &Interval, list: &[Interval]| !list.iter().any(|o| o.intersects(b));
    for b in bands {
        let ok = match b.kind {
            RaymondType::I => disjoint_from(&b.interval, &h.x[k]),
            RaymondType::III => disjoint_from(&b.interval, &h.z[k]),
            RaymondType::II => {
                disjoint_from(&b.interval, &h.x[k - 1])
                    && trace_band_contains(|e| t_minus_one(cf, v, k - 1, e), &b.interval)
            }
        };
        if !ok {
            return Err(inconsistency(k, format!("type {} band {:?} violates its defining gap condition", b.kind, b.interval)));
        }
    }
    Ok(())
}
