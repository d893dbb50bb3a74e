//! Continued fractions of the rotation number and the number-theoretic
//! statistics consumed by the spectral and dynamical bounds.
//!
//! A frequency `β = [0; a_1, a_2, ...]` is always handled through a finite
//! prefix of partial quotients. Convergent denominators grow exponentially,
//! so [`ConvergentTable`] switches to big integers once a denominator no
//! longer fits in 63 bits.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimate::{TailEstimate, liminf_surrogate, limsup_surrogate};

/// `π² / (12 ln 2)`, the almost-sure value of `lim (ln q_k)/k`.
pub const LEVY_KHINTCHIN_D: f64 = PI * PI / (12.0 * std::f64::consts::LN_2);

/// Khintchin's constant, the almost-sure limit of `(a_1 ⋯ a_k)^{1/k}`.
pub const KHINTCHIN_CONSTANT: f64 = 2.685_452_001_065_306;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CfError {
    #[error("value {0} is outside the open unit interval")]
    OutOfRange(f64),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("partial quotients must be >= 1 (got {value} at position {position})")]
    NonPositiveQuotient { position: usize, value: u64 },
    #[error("empty partial-quotient list")]
    Empty,
    #[error("rational input detected: expansion terminates after {} quotients", prefix.len())]
    RationalInput { prefix: Vec<u64> },
    #[error("floating precision exhausted: only {} quotients are reliable", valid.len())]
    PrecisionExhausted { valid: Vec<u64> },
    #[error("integer overflow at level {level}")]
    Overflow { level: usize },
}

/// How a continued-fraction prefix was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    ExplicitList,
    RealNumberApproximation,
    Generator,
    /// `[0; a, a, a, ...]`; the growth rate of `q_k` is known in closed form.
    Precious(u64),
}

/// A finite prefix `[a_1, ..., a_n]` of the expansion `β = [0; a_1, a_2, ...]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    quotients: Vec<u64>,
    origin: Origin,
}

impl ContinuedFraction {
    pub fn new(quotients: Vec<u64>, origin: Origin) -> Result<Self, CfError> {
        if quotients.is_empty() {
            return Err(CfError::Empty);
        }
        if let Some((position, &value)) = quotients.iter().enumerate().find(|(_, a)| **a == 0) {
            return Err(CfError::NonPositiveQuotient { position: position + 1, value });
        }
        Ok(Self { quotients, origin })
    }

    pub fn from_quotients(quotients: Vec<u64>) -> Result<Self, CfError> {
        Self::new(quotients, Origin::ExplicitList)
    }

    /// `[0; a, a, ...]` truncated to `depth` quotients.
    pub fn precious(a: u64, depth: usize) -> Result<Self, CfError> {
        if depth == 0 {
            return Err(CfError::ZeroDepth);
        }
        Self::new(vec![a; depth], Origin::Precious(a))
    }

    pub fn golden(depth: usize) -> Result<Self, CfError> {
        Self::precious(1, depth)
    }

    pub fn silver(depth: usize) -> Result<Self, CfError> {
        Self::precious(2, depth)
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// `a_k` with the usual 1-based index.
    pub fn a(&self, k: usize) -> u64 {
        self.quotients[k - 1]
    }

    pub fn has_unit_quotient(&self) -> bool {
        self.quotients.contains(&1)
    }

    /// Value of the finite expansion `[0; a_1, ..., a_n]`.
    pub fn value(&self) -> f64 {
        self.quotients.iter().rev().fold(0.0, |acc, &a| 1.0 / (a as f64 + acc))
    }

    /// A precious prefix regrown to `n` quotients; `None` for any other
    /// origin, whose tail is unknown.
    pub fn extended(&self, n: usize) -> Option<Self> {
        match self.origin {
            Origin::Precious(a) => Self::precious(a, n.max(self.len())).ok(),
            _ if n <= self.len() => Some(self.clone()),
            _ => None,
        }
    }

    /// A copy keeping only the first `n` quotients.
    pub fn truncated(&self, n: usize) -> Result<Self, CfError> {
        Self::new(self.quotients[..n.min(self.len())].to_vec(), self.origin)
    }
}

/// Expand `x ∈ (0, 1)` into its first `depth` partial quotients.
///
/// The Euclidean step is run in double precision while a running bound on
/// the accumulated rounding error is propagated. A quotient is emitted only
/// when the error interval around `1/r` does not straddle an integer; a
/// remainder indistinguishable from zero means the input is rational at
/// this precision.
pub fn cf_expand(x: f64, depth: usize) -> Result<ContinuedFraction, CfError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(CfError::OutOfRange(x));
    }
    if depth == 0 {
        return Err(CfError::ZeroDepth);
    }
    let eps = f64::EPSILON;
    let mut quotients = Vec::with_capacity(depth);
    let mut r = x;
    // Half an ulp of the input itself.
    let mut err = x * eps * 0.5;
    while quotients.len() < depth {
        let inv = 1.0 / r;
        let inv_err = err / (r * (r - err).max(f64::MIN_POSITIVE)) + inv * eps;
        let a = inv.floor();
        if !a.is_finite() || a >= 9.0e15 {
            return Err(CfError::PrecisionExhausted { valid: quotients });
        }
        // Exact: inv and floor(inv) share the exponent range.
        let frac = inv - a;
        if frac <= inv_err || 1.0 - frac <= inv_err {
            // Remainder within the error bar of an integer. Pure rounding
            // noise means the input terminates; anything larger means the
            // digits have run out.
            let rounding_only = inv_err <= 64.0 * eps * inv.max(1.0) && err <= 64.0 * eps;
            if !rounding_only {
                return Err(CfError::PrecisionExhausted { valid: quotients });
            }
            quotients.push(if frac <= inv_err { a as u64 } else { a as u64 + 1 });
            return Err(CfError::RationalInput { prefix: quotients });
        }
        quotients.push(a as u64);
        r = frac;
        err = inv_err;
    }
    ContinuedFraction::new(quotients, Origin::RealNumberApproximation)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Machine { p: Vec<u64>, q: Vec<u64> },
    Big { p: Vec<BigUint>, q: Vec<BigUint> },
}

/// Convergents `p_k / q_k` for `k = -1, 0, ..., n`.
///
/// Seeds are `p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1`, extended by
/// `p_{k+1} = a_{k+1} p_k + p_{k-1}` (same for `q`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentTable {
    repr: Repr,
}

const MACHINE_LIMIT: u64 = (1u64 << 63) - 1;

/// Convergents in 63-bit arithmetic; fails with [`CfError::Overflow`] at the
/// first level whose numerator or denominator does not fit.
pub fn convergents_checked(cf: &ContinuedFraction) -> Result<ConvergentTable, CfError> {
    let n = cf.len();
    let mut p = Vec::with_capacity(n + 2);
    let mut q = Vec::with_capacity(n + 2);
    p.extend([1u64, 0]);
    q.extend([0u64, 1]);
    for (i, &a) in cf.quotients().iter().enumerate() {
        let step = |prev: u64, prev2: u64| {
            a.checked_mul(prev)
                .and_then(|v| v.checked_add(prev2))
                .filter(|v| *v <= MACHINE_LIMIT)
        };
        let pk = step(p[i + 1], p[i]).ok_or(CfError::Overflow { level: i + 1 })?;
        let qk = step(q[i + 1], q[i]).ok_or(CfError::Overflow { level: i + 1 })?;
        p.push(pk);
        q.push(qk);
    }
    Ok(ConvergentTable { repr: Repr::Machine { p, q } })
}

/// Convergents, falling back to big integers past 63 bits.
pub fn convergents(cf: &ContinuedFraction) -> ConvergentTable {
    match convergents_checked(cf) {
        Ok(table) => table,
        Err(_) => {
            let mut p: Vec<BigUint> = vec![BigUint::one(), BigUint::zero()];
            let mut q: Vec<BigUint> = vec![BigUint::zero(), BigUint::one()];
            for (i, &a) in cf.quotients().iter().enumerate() {
                let pk = &p[i + 1] * a + &p[i];
                let qk = &q[i + 1] * a + &q[i];
                p.push(pk);
                q.push(qk);
            }
            ConvergentTable { repr: Repr::Big { p, q } }
        }
    }
}

impl ConvergentTable {
    /// Highest stored level `n`.
    pub fn levels(&self) -> usize {
        match &self.repr {
            Repr::Machine { q, .. } => q.len() - 2,
            Repr::Big { q, .. } => q.len() - 2,
        }
    }

    pub fn is_big(&self) -> bool {
        matches!(self.repr, Repr::Big { .. })
    }

    fn slot(&self, k: isize) -> usize {
        assert!(k >= -1 && k <= self.levels() as isize, "convergent index {k} out of range");
        (k + 1) as usize
    }

    pub fn p(&self, k: isize) -> BigUint {
        let i = self.slot(k);
        match &self.repr {
            Repr::Machine { p, .. } => BigUint::from(p[i]),
            Repr::Big { p, .. } => p[i].clone(),
        }
    }

    pub fn q(&self, k: isize) -> BigUint {
        let i = self.slot(k);
        match &self.repr {
            Repr::Machine { q, .. } => BigUint::from(q[i]),
            Repr::Big { q, .. } => q[i].clone(),
        }
    }

    pub fn q_u64(&self, k: isize) -> Option<u64> {
        let i = self.slot(k);
        match &self.repr {
            Repr::Machine { q, .. } => Some(q[i]),
            Repr::Big { q, .. } => q[i].to_u64(),
        }
    }

    /// `q_k` as a site count; panics if it does not fit in `usize`.
    pub fn q_usize(&self, k: isize) -> usize {
        self.q_u64(k)
            .and_then(|v| usize::try_from(v).ok())
            .unwrap_or_else(|| panic!("q_{k} exceeds the address space"))
    }

    pub fn q_f64(&self, k: isize) -> f64 {
        let i = self.slot(k);
        match &self.repr {
            Repr::Machine { q, .. } => q[i] as f64,
            Repr::Big { q, .. } => q[i].to_f64().unwrap_or(f64::INFINITY),
        }
    }

    /// `ln q_k`, exact to double precision even for big denominators.
    pub fn ln_q(&self, k: isize) -> f64 {
        let i = self.slot(k);
        match &self.repr {
            Repr::Machine { q, .. } => (q[i] as f64).ln(),
            Repr::Big { q, .. } => ln_biguint(&q[i]),
        }
    }

    /// All `q_k` for `k = -1..=n` as decimal strings.
    pub fn q_strings(&self) -> Vec<String> {
        (-1..=self.levels() as isize).map(|k| self.q(k).to_string()).collect()
    }

    pub fn p_strings(&self) -> Vec<String> {
        (-1..=self.levels() as isize).map(|k| self.p(k).to_string()).collect()
    }
}

pub(crate) fn ln_biguint(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Per-level statistics of a prefix, indexed by level `n = 1..=len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyStats {
    /// `ln q_n / n`.
    pub d: Vec<f64>,
    /// `(3/n) Σ_{j≤n} ln(a_j + 2)`.
    pub c: Vec<f64>,
    /// `(a_1 ⋯ a_n)^{1/n}`.
    pub m: Vec<f64>,
    /// `(1/n) Σ_{j≤n} a_j`.
    pub density: Vec<f64>,
    /// `ln(q_n / q_{n-1})`, the convergent-ratio estimate of the growth rate.
    pub ratio_growth: Vec<f64>,
    /// `G_k` for `k = -1..=n` (`G_{-1} = G_0 = 1`, `G_k = G_{k-1} + a_k G_{k-2}`).
    #[serde(skip)]
    pub g: Vec<BigUint>,
    #[serde(skip)]
    origin: Option<Origin>,
}

/// Verdict of the finite-prefix bounded-density heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityVerdict {
    pub bounded: bool,
    /// Density at the end of the prefix divided by the density at the
    /// start of the tail window.
    pub tail_growth: f64,
    pub window_start: usize,
    pub window_end: usize,
}

/// Tail growth factor above which the partial-quotient average is treated
/// as diverging.
pub const DENSITY_GROWTH_LIMIT: f64 = 4.0;

pub fn frequency_stats(cf: &ContinuedFraction) -> FrequencyStats {
    let table = convergents(cf);
    let n = cf.len();
    let mut d = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let mut m = Vec::with_capacity(n);
    let mut density = Vec::with_capacity(n);
    let mut ratio_growth = Vec::with_capacity(n);
    let mut g: Vec<BigUint> = vec![BigUint::one(), BigUint::one()];

    let mut sum_ln_a2 = 0.0;
    let mut sum_ln_a = 0.0;
    let mut sum_a = 0.0;
    for k in 1..=n {
        let a = cf.a(k);
        let af = a as f64;
        sum_ln_a2 += (af + 2.0).ln();
        sum_ln_a += af.ln();
        sum_a += af;
        let kf = k as f64;
        d.push(table.ln_q(k as isize) / kf);
        c.push(3.0 * sum_ln_a2 / kf);
        m.push((sum_ln_a / kf).exp());
        density.push(sum_a / kf);
        ratio_growth.push(table.ln_q(k as isize) - table.ln_q(k as isize - 1));
        let gk = &g[k] + &g[k - 1] * a;
        g.push(gk);
    }
    FrequencyStats { d, c, m, density, ratio_growth, g, origin: Some(cf.origin()) }
}

impl FrequencyStats {
    pub fn levels(&self) -> usize {
        self.d.len()
    }

    /// `G_k` for `k >= -1`.
    pub fn g(&self, k: isize) -> &BigUint {
        &self.g[(k + 1) as usize]
    }

    pub fn g_f64(&self, k: isize) -> f64 {
        self.g(k).to_f64().unwrap_or(f64::INFINITY)
    }

    /// Exact `D = ln((a + √(a²+4))/2)` when the prefix comes from a precious
    /// number, `None` otherwise.
    pub fn exact_d(&self) -> Option<f64> {
        match self.origin {
            Some(Origin::Precious(a)) => Some(precious_growth_rate(a)),
            _ => None,
        }
    }

    /// Finite-prefix estimate of `D = limsup ln q_k / k`.
    pub fn d_limsup(&self) -> TailEstimate {
        self.exact_d()
            .map(TailEstimate::exact)
            .unwrap_or_else(|| limsup_surrogate(&self.d))
    }

    pub fn d_liminf(&self) -> TailEstimate {
        self.exact_d()
            .map(TailEstimate::exact)
            .unwrap_or_else(|| liminf_surrogate(&self.d))
    }

    /// Finite-prefix estimate of `C = limsup C_k`.
    pub fn c_limsup(&self) -> TailEstimate {
        match self.origin {
            Some(Origin::Precious(a)) => TailEstimate::exact(3.0 * (a as f64 + 2.0).ln()),
            _ => limsup_surrogate(&self.c),
        }
    }

    /// Finite-prefix estimate of `M = liminf (a_1⋯a_k)^{1/k}`.
    pub fn m_liminf(&self) -> TailEstimate {
        match self.origin {
            Some(Origin::Precious(a)) => TailEstimate::exact(a as f64),
            _ => liminf_surrogate(&self.m),
        }
    }

    /// Whether `(1/n) Σ a_j` looks bounded on this prefix.
    ///
    /// Precious prefixes are bounded by definition. Otherwise the density
    /// over the last `⌈n/2⌉` levels must not grow by more than
    /// [`DENSITY_GROWTH_LIMIT`].
    pub fn bounded_density(&self) -> DensityVerdict {
        let n = self.levels();
        let window_start = n - n.div_ceil(2) + 1;
        let first = self.density[window_start - 1];
        let last = self.density[n - 1];
        let tail_growth = last / first;
        let bounded = match self.origin {
            Some(Origin::Precious(_)) => true,
            _ => tail_growth.is_finite() && tail_growth <= DENSITY_GROWTH_LIMIT,
        };
        DensityVerdict { bounded, tail_growth, window_start, window_end: n }
    }
}

/// `ln(a + ω)` with `ω = [0; a, a, ...]`, i.e. `ln((a + √(a²+4))/2)`.
pub fn precious_growth_rate(a: u64) -> f64 {
    let af = a as f64;
    ((af + (af * af + 4.0).sqrt()) / 2.0).ln()
}

/// Growth policy for the pathological frequency: `a_1 = first`,
/// `a_{n+1} = max(q_n^exponent, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthPolicy {
    pub first: u64,
    pub exponent: u32,
}

impl Default for GrowthPolicy {
    fn default() -> Self {
        Self { first: 1, exponent: 2 }
    }
}

/// Prefix of a frequency whose quotients grow super-geometrically, so that
/// `ln q_n / n` diverges.
pub fn pathological_generator(
    policy: GrowthPolicy,
    levels: usize,
) -> Result<ContinuedFraction, CfError> {
    if levels == 0 {
        return Err(CfError::ZeroDepth);
    }
    if policy.first == 0 {
        return Err(CfError::NonPositiveQuotient { position: 1, value: 0 });
    }
    let mut quotients = vec![policy.first];
    let (mut q_prev, mut q) = (1u64, policy.first);
    while quotients.len() < levels {
        let level = quotients.len() + 1;
        let a = q
            .checked_pow(policy.exponent)
            .ok_or(CfError::Overflow { level })?
            .max(1);
        let q_next = a
            .checked_mul(q)
            .and_then(|v| v.checked_add(q_prev))
            .filter(|v| *v <= MACHINE_LIMIT)
            .ok_or(CfError::Overflow { level })?;
        quotients.push(a);
        q_prev = q;
        q = q_next;
    }
    ContinuedFraction::new(quotients, Origin::Generator)
}
