//! Structural checks on the band hierarchy at `V = 24`.

use sturm_core::cf::ContinuedFraction;
use sturm_core::spectrum::label::CONTAINMENT_TOL;
use sturm_core::spectrum::{band_hierarchy, intersect_sorted, label_bands, BandHierarchy, Interval, RaymondType, SearchOptions};

const V: f64 = 24.0;
const DEPTH: usize = 6;

fn hierarchies() -> Vec<(&'static str, BandHierarchy)> {
    let opts = SearchOptions::default();
    vec![
        ("golden", band_hierarchy(&ContinuedFraction::golden(10).unwrap(), V, DEPTH, &opts).unwrap()),
        ("silver", band_hierarchy(&ContinuedFraction::silver(10).unwrap(), V, DEPTH, &opts).unwrap()),
    ]
}

fn covered(b: &Interval, lists: &[&[Interval]]) -> bool {
    lists.iter().any(|l| l.iter().any(|o| o.contains_interval(b, CONTAINMENT_TOL)))
}

#[test]
fn next_level_bands_nest_in_previous_levels() {
    for (name, h) in hierarchies() {
        for k in 0..DEPTH {
            for b in &h.x[k + 1] {
                assert!(covered(b, &[&h.x[k], &h.z[k]]), "{name}: x_{} band {b:?} escapes x_{k} ∪ z_{k}", k + 1);
            }
            for b in &h.z[k + 1] {
                assert!(covered(b, &[&h.x[k + 1], &h.x[k]]), "{name}: z_{} band {b:?} escapes x_{} ∪ x_{k}", k + 1, k + 1);
            }
        }
    }
}

#[test]
fn three_consecutive_traces_never_all_small() {
    for (name, h) in hierarchies() {
        for k in 1..=DEPTH {
            let pair = intersect_sorted(&h.x[k], &h.z[k]);
            let triple = intersect_sorted(&pair, &h.x[k - 1]);
            assert!(triple.is_empty(), "{name}: x_{k} ∩ z_{k} ∩ x_{} = {triple:?}", k - 1);
        }
    }
}

#[test]
fn band_lists_are_sorted_and_disjoint() {
    for (name, h) in hierarchies() {
        for list in h.x.iter().chain(h.z.iter()) {
            assert!(list.iter().all(|b| b.lo < b.hi), "{name}: empty band");
            assert!(list.windows(2).all(|w| w[0].hi < w[1].lo), "{name}: overlapping bands");
        }
    }
}

fn children_counts(h: &BandHierarchy, k: usize, parent_kind: RaymondType) -> Vec<(usize, usize)> {
    let l = label_bands(h).unwrap();
    let parents = &l.levels[k].bands;
    (0..parents.len())
        .filter(|&pi| parents[pi].kind == parent_kind)
        .map(|pi| {
            let kids: Vec<_> = l.levels[k + 1].bands.iter().filter(|b| b.parent == Some(pi)).collect();
            let n_i = kids.iter().filter(|b| b.kind == RaymondType::I).count();
            let n_iii = kids.iter().filter(|b| b.kind == RaymondType::III).count();
            assert_eq!(n_i + n_iii, kids.len());
            (n_i, n_iii)
        })
        .collect()
}

#[test]
fn fibonacci_type_iii_bands_hold_one_type_i_child() {
    let (_, h) = hierarchies().remove(0);
    let counts = children_counts(&h, 2, RaymondType::III);
    assert!(!counts.is_empty());
    assert!(counts.iter().all(|&c| c == (1, 0)), "{counts:?}");
}

#[test]
fn silver_type_ii_bands_hold_three_type_i_and_two_type_iii() {
    let (_, h) = hierarchies().remove(1);
    let counts = children_counts(&h, 2, RaymondType::II);
    assert!(!counts.is_empty());
    assert!(counts.iter().all(|&c| c == (3, 2)), "{counts:?}");
}
