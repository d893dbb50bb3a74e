//! Abel time averages `a(n, T)` of the wave packet started at `δ_1`.
//!
//! With eigenpairs `(E_j, ψ_j)` and `w_j(n) = ψ_j(1) ψ_j(n)`,
//! `a(n, T) = Σ_{j,l} w_j(n) w_l(n) / (1 + (T(E_j − E_l)/2)²)`.

use super::fit::{linear_fit, LinearFit};
use super::lattice::{Eigensystem, LatticeHamiltonian};
use super::TransportError;
use crate::io::{num, Csv};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Total weight `Σ ψ_j(1)²` that may be dropped from negligible eigenvectors.
pub const PRUNED_WEIGHT: f64 = 1e-14;

pub const UNITARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum HorizonPolicy {
    /// Require `L ≥ 3 max T + 10`, so a ballistic front cannot reach the ends.
    Ballistic,
    /// Accept any `L`, but fail if more than `max_mass` of the averaged
    /// probability sits within `width` sites of either end.
    BoundaryMass { max_mass: f64, width: usize },
    /// No guard (oracle comparisons on tiny lattices).
    Unchecked,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportRun {
    pub l: usize,
    pub times: Vec<f64>,
    pub horizon: HorizonPolicy,
    /// `a[t][n + L] = a(n, T_t)`.
    #[serde(skip)]
    pub a: Vec<Vec<f64>>,
    /// `Σ_n n² a(n, T)`.
    pub moments: Vec<f64>,
    /// `|Σ_n a(n, T) − 1|`.
    pub unitarity_defects: Vec<f64>,
    /// Most negative `a(n, T)` (rounding noise), per time.
    pub min_a: Vec<f64>,
    /// Mass within the guard width of either boundary, per time.
    pub boundary_mass: Vec<f64>,
    /// Eigenvectors kept after dropping negligible overlaps with `δ_1`.
    pub kept_eigenvectors: usize,
    pub moment_fit: Option<LinearFit>,
    pub warnings: Vec<String>,
}

impl TransportRun {
    pub fn sites(&self) -> usize {
        2 * self.l + 1
    }

    pub fn a_at(&self, t: usize, n: i64) -> f64 {
        self.a[t][(n + self.l as i64) as usize]
    }

    /// `P(N, T) = Σ_{|n| > N} a(n, T)`; every site counts when `N < 0`.
    pub fn outside(&self, t: usize, n_cut: f64) -> f64 {
        if n_cut < 0.0 {
            return 1.0;
        }
        let l = self.l as i64;
        self.a[t]
            .iter()
            .enumerate()
            .filter(|(i, _)| ((*i as i64 - l).abs() as f64) > n_cut)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn outside_right(&self, t: usize, n_cut: f64) -> f64 {
        let l = self.l as i64;
        self.a[t].iter().enumerate().filter(|(i, _)| (*i as i64 - l) as f64 > n_cut).map(|(_, v)| v).sum()
    }

    pub fn outside_left(&self, t: usize, n_cut: f64) -> f64 {
        let l = self.l as i64;
        self.a[t].iter().enumerate().filter(|(i, _)| ((*i as i64 - l) as f64) < -n_cut).map(|(_, v)| v).sum()
    }

    /// `P(N, T)` for `N = 0..=L` (non-increasing in `N`).
    pub fn outside_curve(&self, t: usize) -> Vec<f64> {
        let l = self.l;
        let a = &self.a[t];
        let mut out = vec![0.0; l + 1];
        let mut acc = 0.0;
        for n in (1..=l).rev() {
            acc += a[l + n] + a[l - n];
            out[n - 1] = acc;
        }
        out[l] = 0.0;
        out
    }

    pub fn a_csv(&self) -> String {
        let mut csv = Csv::new(&["n", "T", "a"]);
        for (ti, t) in self.times.iter().enumerate() {
            for (i, v) in self.a[ti].iter().enumerate() {
                csv.row(&[(i as i64 - self.l as i64).to_string(), num(*t), num(*v)]);
            }
        }
        csv.finish()
    }

    pub fn p_csv(&self) -> String {
        let mut csv = Csv::new(&["N", "T", "P"]);
        for (ti, t) in self.times.iter().enumerate() {
            for (n, p) in self.outside_curve(ti).iter().enumerate() {
                csv.row(&[n.to_string(), num(*t), num(*p)]);
            }
        }
        csv.finish()
    }

    pub fn moment_csv(&self) -> String {
        let mut csv = Csv::new(&["T", "moment"]);
        for (t, m) in self.times.iter().zip(&self.moments) {
            csv.row(&[num(*t), num(*m)]);
        }
        csv.finish()
    }
}

fn check_horizon(l: usize, times: &[f64], policy: &HorizonPolicy) -> Result<(), TransportError> {
    if let HorizonPolicy::Ballistic = policy {
        let t_max = times.iter().copied().fold(0.0, f64::max);
        let need = (3.0 * t_max + 10.0).ceil() as usize;
        if l < need {
            return Err(TransportError::HorizonViolated { l, needed: need, t_max });
        }
    }
    Ok(())
}

/// Time averages on the given lattice at each `T` in `times`.
pub fn evolve_and_average(
    h: &LatticeHamiltonian,
    times: &[f64],
    horizon: HorizonPolicy,
) -> Result<TransportRun, TransportError> {
    if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(TransportError::BadTimes);
    }
    check_horizon(h.l, times, &horizon)?;
    let es = h.eigen()?;
    average_from_eigensystem(h, &es, times, horizon)
}

pub fn average_from_eigensystem(
    h: &LatticeHamiltonian,
    es: &Eigensystem,
    times: &[f64],
    horizon: HorizonPolicy,
) -> Result<TransportRun, TransportError> {
    let n = h.sites();
    let start = h.index(1);
    // Keep eigenvectors by decreasing overlap with δ_1 until the rest is negligible.
    let mut order: Vec<usize> = (0..n).collect();
    let overlap = |j: usize| es.vector(j)[start].powi(2);
    order.sort_by(|&a, &b| overlap(a).total_cmp(&overlap(b)));
    let mut dropped = 0.0;
    let mut cut = 0;
    while cut < n && dropped + overlap(order[cut]) <= PRUNED_WEIGHT {
        dropped += overlap(order[cut]);
        cut += 1;
    }
    let mut kept: Vec<usize> = order[cut..].to_vec();
    kept.sort_unstable();
    let m = kept.len();
    let energies: Vec<f64> = kept.iter().map(|&j| es.values[j]).collect();
    let w = DMatrix::from_fn(n, m, |i, c| {
        let v = es.vector(kept[c]);
        v[start] * v[i]
    });

    let mut a_all = Vec::with_capacity(times.len());
    let mut moments = Vec::with_capacity(times.len());
    let mut defects = Vec::with_capacity(times.len());
    let mut min_a = Vec::with_capacity(times.len());
    let mut boundary = Vec::with_capacity(times.len());
    let guard = match horizon {
        HorizonPolicy::BoundaryMass { width, .. } => width,
        _ => (h.l / 20).max(1),
    };
    for &t in times {
        let k = DMatrix::from_fn(m, m, |i, j| {
            let x = 0.5 * t * (energies[i] - energies[j]);
            1.0 / (1.0 + x * x)
        });
        let prod = &w * &k;
        let mut a = vec![0.0; n];
        for c in 0..m {
            for ((ai, p), wv) in a.iter_mut().zip(prod.column(c).iter()).zip(w.column(c).iter()) {
                *ai += p * wv;
            }
        }
        let total: f64 = a.iter().sum();
        let moment: f64 = a.iter().enumerate().map(|(i, v)| (h.site(i) as f64).powi(2) * v).sum();
        let edge: f64 = a[..guard.min(n)].iter().chain(&a[n.saturating_sub(guard)..]).sum();
        defects.push((total - 1.0).abs());
        moments.push(moment);
        min_a.push(a.iter().copied().fold(f64::INFINITY, f64::min));
        boundary.push(edge);
        a_all.push(a);
    }

    let mut warnings = Vec::new();
    if let Some(worst) = defects.iter().copied().reduce(f64::max) {
        if worst > UNITARITY_TOL {
            return Err(TransportError::Unitarity { defect: worst });
        }
    }
    if let HorizonPolicy::BoundaryMass { max_mass, width } = horizon {
        if let Some((ti, &mass)) = boundary.iter().enumerate().find(|(_, m)| **m > max_mass) {
            return Err(TransportError::BoundaryMass { t: times[ti], mass, width, max_mass });
        }
    }
    if cut > 0 {
        warnings.push(format!("dropped {cut} eigenvectors with total weight {dropped:.3e} at the start site"));
    }
    let moment_fit = (times.len() >= 2).then(|| {
        let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
        let ys: Vec<f64> = moments.iter().map(|m| m.ln()).collect();
        linear_fit(&xs, &ys)
    });
    Ok(TransportRun {
        l: h.l,
        times: times.to_vec(),
        horizon,
        a: a_all,
        moments,
        unitarity_defects: defects,
        min_a,
        boundary_mass: boundary,
        kept_eigenvectors: m,
        moment_fit,
        warnings,
    })
}
