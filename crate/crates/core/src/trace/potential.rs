//! The two-sided Sturmian potential `V(n) = (⌊(n+1)β⌋ − ⌊nβ⌋)·V` and its
//! periodic approximants.
//!
//! Right of the origin the letters are read off the standard words
//! `W_0 = 0`, `W_1 = 0^{a_1−1}1`, `W_{k+1} = W_k^{a_{k+1}} W_{k−1}`, site `n`
//! being letter `n − 1` of the limiting word. The floor formula forces the
//! left half line: `V(0) = 0`, `V(−1) = V` and `V(−m) = V(m − 1)` for `m ≥ 2`.

use crate::cf::{convergents, ContinuedFraction};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("coupling must be finite and non-negative, got {0}")]
    BadCoupling(f64),
    #[error("site {site} is beyond the {available} letters fixed by the continued-fraction prefix")]
    OutOfRange { site: i64, available: usize },
    #[error("the prefix determines only {available} letters, {requested} requested")]
    PrefixTooShort { requested: usize, available: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PotentialKind {
    Sturmian,
    /// `V_per(n) = W_level[(n − 1) mod q_level]` on the right, mirrored like
    /// the Sturmian case on the left.
    Periodic { level: usize, period: usize },
}

#[derive(Debug, Clone)]
pub struct SturmianPotential {
    cf: ContinuedFraction,
    coupling: f64,
    kind: PotentialKind,
    /// Right half-line letters `w[n − 1]`; for the periodic kind, one period.
    letters: Vec<u8>,
}

/// Standard words `W_0..` until one reaches `min_len` letters or the prefix
/// runs out. The last word is returned together with its level.
pub fn standard_word(cf: &ContinuedFraction, min_len: usize) -> (usize, Vec<u8>) {
    let mut prev: Vec<u8> = vec![0];
    if cf.is_empty() {
        return (0, prev);
    }
    let mut cur: Vec<u8> = vec![0; cf.a(1) as usize - 1];
    cur.push(1);
    let mut level = 1;
    while cur.len() < min_len && level < cf.len() {
        let a = cf.a(level + 1) as usize;
        let mut next = Vec::with_capacity(cur.len() * a + prev.len());
        for _ in 0..a {
            next.extend_from_slice(&cur);
        }
        next.extend_from_slice(&prev);
        prev = std::mem::replace(&mut cur, next);
        level += 1;
    }
    (level, cur)
}

/// Standard word `W_level` in full.
pub fn standard_word_at(cf: &ContinuedFraction, level: usize) -> Vec<u8> {
    if level == 0 {
        return vec![0];
    }
    let cf = cf.truncated(level).expect("non-empty prefix");
    standard_word(&cf, usize::MAX).1
}

impl SturmianPotential {
    /// Potential whose letters are known at least on `-sites..=sites`.
    ///
    /// Precious prefixes are regrown on demand; other prefixes must already
    /// be long enough.
    pub fn new(cf: &ContinuedFraction, coupling: f64, sites: usize) -> Result<Self, PotentialError> {
        check_coupling(coupling)?;
        let mut cf = cf.clone();
        let needed = sites.max(1);
        loop {
            let (_, word) = standard_word(&cf, needed);
            if word.len() >= needed {
                return Ok(Self { cf, coupling, kind: PotentialKind::Sturmian, letters: word });
            }
            let q = convergents(&cf);
            let available = q.q_usize(cf.len() as isize);
            match cf.extended(cf.len() + 4) {
                Some(longer) if longer.len() > cf.len() => cf = longer,
                _ => return Err(PotentialError::PrefixTooShort { requested: needed, available }),
            }
        }
    }

    /// Periodic approximant built from `W_level`.
    pub fn periodic(cf: &ContinuedFraction, coupling: f64, level: usize) -> Result<Self, PotentialError> {
        check_coupling(coupling)?;
        if level > cf.len() {
            return Err(PotentialError::PrefixTooShort { requested: level, available: cf.len() });
        }
        let letters = standard_word_at(cf, level);
        let period = letters.len();
        Ok(Self { cf: cf.clone(), coupling, kind: PotentialKind::Periodic { level, period }, letters })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn continued_fraction(&self) -> &ContinuedFraction {
        &self.cf
    }

    /// Largest `N` such that every site in `-N..=N` is determined.
    pub fn sites_available(&self) -> usize {
        match self.kind {
            PotentialKind::Sturmian => self.letters.len(),
            PotentialKind::Periodic { .. } => usize::MAX,
        }
    }

    fn right_letter(&self, n: usize) -> Option<u8> {
        match self.kind {
            PotentialKind::Sturmian => self.letters.get(n - 1).copied(),
            PotentialKind::Periodic { period, .. } => Some(self.letters[(n - 1) % period]),
        }
    }

    /// The 0/1 letter at site `n`.
    pub fn letter(&self, n: i64) -> Result<u8, PotentialError> {
        let out = |site| PotentialError::OutOfRange { site, available: self.sites_available() };
        match n {
            0 => Ok(0),
            -1 => Ok(1),
            n if n > 0 => self.right_letter(n as usize).ok_or_else(|| out(n)),
            n => self.right_letter((-n - 1) as usize).ok_or_else(|| out(n)),
        }
    }

    pub fn value(&self, n: i64) -> Result<f64, PotentialError> {
        Ok(self.letter(n)? as f64 * self.coupling)
    }

    /// `V(lo), ..., V(hi)`.
    pub fn values(&self, lo: i64, hi: i64) -> Result<Vec<f64>, PotentialError> {
        (lo..=hi).map(|n| self.value(n)).collect()
    }
}

fn check_coupling(v: f64) -> Result<(), PotentialError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(PotentialError::BadCoupling(v))
    }
}
