//! Sturmian lattice against its periodic approximant on a window where the
//! two potentials coincide site by site.

use super::evolve::{evolve_and_average, HorizonPolicy, TransportRun};
use super::fit::{linear_fit, LinearFit};
use super::lattice::LatticeHamiltonian;
use super::TransportError;
use crate::cf::{convergents, ContinuedFraction};
use crate::trace::potential::{standard_word_at, SturmianPotential};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallisticOptions {
    pub approximant_level: usize,
    pub l: usize,
    pub times: Vec<f64>,
    pub horizon: HorizonPolicy,
}

impl Default for BallisticOptions {
    fn default() -> Self {
        let times = (0..8).map(|i| 10.0 * 23f64.powf(i as f64 / 7.0)).collect();
        Self { approximant_level: 3, l: 700, times, horizon: HorizonPolicy::Ballistic }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallisticDemo {
    pub quotients: Vec<u64>,
    pub coupling: f64,
    pub approximant_level: usize,
    pub period: usize,
    /// `W_{n+1}` equals the length-`q_{n+1}` prefix of `W_n W_n W_n ⋯`.
    pub word_prefix_agreement: bool,
    /// Largest `M` with equal potentials on `[−M, M]`, capped by the prefix.
    pub agreement_window: usize,
    pub l: usize,
    pub sturmian: TransportRun,
    pub periodic: TransportRun,
    pub beta_sturmian: LinearFit,
    pub beta_periodic: LinearFit,
    pub beta_difference: f64,
}

/// Compares `W_{n+1}` with the periodic repetition of `W_n`.
pub fn approximant_prefix_agreement(cf: &ContinuedFraction, level: usize) -> bool {
    if level + 1 > cf.len() {
        return false;
    }
    let w = standard_word_at(cf, level);
    let next = standard_word_at(cf, level + 1);
    next.iter().enumerate().all(|(i, &c)| c == w[i % w.len()])
}

fn right_agreement(a: &SturmianPotential, b: &SturmianPotential) -> usize {
    let cap = a.sites_available().min(b.sites_available());
    (1..=cap).take_while(|&n| a.letter(n as i64).ok() == b.letter(n as i64).ok()).count()
}

fn moment_exponent(run: &TransportRun) -> LinearFit {
    let xs: Vec<f64> = run.times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = run.moments.iter().map(|m| m.ln()).collect();
    linear_fit(&xs, &ys)
}

pub fn ballistic_demo(cf: &ContinuedFraction, coupling: f64, opts: &BallisticOptions) -> Result<BallisticDemo, TransportError> {
    let n = opts.approximant_level;
    let q = convergents(cf);
    let period = q.q_usize(n as isize);
    let letters = q.q_u64(cf.len() as isize).map_or(usize::MAX, |v| v as usize);
    let sturm = SturmianPotential::new(cf, coupling, opts.l.min(letters))?;
    let periodic = SturmianPotential::periodic(cf, coupling, n)?;
    let agreement_window = right_agreement(&sturm, &periodic);
    if opts.l > agreement_window {
        return Err(TransportError::WindowViolated { l: opts.l, window: agreement_window });
    }
    let hs = LatticeHamiltonian::from_potential(&sturm, opts.l)?;
    let hp = LatticeHamiltonian::from_potential(&periodic, opts.l)?;
    let sturmian = evolve_and_average(&hs, &opts.times, opts.horizon)?;
    let periodic = evolve_and_average(&hp, &opts.times, opts.horizon)?;
    let beta_sturmian = moment_exponent(&sturmian);
    let beta_periodic = moment_exponent(&periodic);
    Ok(BallisticDemo {
        quotients: cf.quotients().to_vec(),
        coupling,
        approximant_level: n,
        period,
        word_prefix_agreement: approximant_prefix_agreement(cf, n),
        agreement_window,
        l: opts.l,
        beta_difference: (beta_sturmian.slope - beta_periodic.slope).abs(),
        sturmian,
        periodic,
        beta_sturmian,
        beta_periodic,
    })
}
