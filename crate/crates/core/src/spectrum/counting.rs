//! The counting recursion for long bands by type, with the inequalities it
//! is claimed to satisfy evaluated level by level.

use crate::cf::{ln_biguint, ContinuedFraction};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingState {
    pub level: usize,
    #[serde(with = "big_string")]
    pub n_i: BigUint,
    #[serde(with = "big_string")]
    pub n_ii: BigUint,
    #[serde(with = "big_string")]
    pub n_iii: BigUint,
    /// `ln ε_k = ln 4 − Σ_{j≤k} (ln(V+5) + 3 ln(a_j+2))`.
    pub ln_epsilon: f64,
    pub checks: CountingChecks,
}

/// Each claimed property at one level, as literally stated and in the
/// weakened forms that survive the seed levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingChecks {
    pub ii_or_iii_nonzero: bool,
    pub i_nonzero: bool,
    /// `n_I > n_III`.
    pub i_exceeds_iii: bool,
    /// `n_I ≥ n_III`.
    pub i_at_least_iii: bool,
    /// `n_II + n_III > 2^{⌊k/2⌋}`.
    pub growth_strict: bool,
    /// `n_II + n_III ≥ 2^{⌊k/2⌋}`.
    pub growth_weak: bool,
}

impl CountingChecks {
    pub fn literal_ok(&self) -> bool {
        self.ii_or_iii_nonzero && self.i_nonzero && self.i_exceeds_iii && self.growth_strict
    }

    pub fn weak_ok(&self) -> bool {
        self.ii_or_iii_nonzero && self.i_nonzero && self.i_at_least_iii && self.growth_weak
    }
}

impl CountingState {
    pub fn long_band_total(&self) -> BigUint {
        &self.n_ii + &self.n_iii
    }

    pub fn long_band_total_f64(&self) -> f64 {
        self.long_band_total().to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn epsilon(&self) -> f64 {
        self.ln_epsilon.exp()
    }
}

fn checks(level: usize, n_i: &BigUint, n_ii: &BigUint, n_iii: &BigUint) -> CountingChecks {
    let sum = n_ii + n_iii;
    let pow = BigUint::one() << (level / 2);
    CountingChecks {
        ii_or_iii_nonzero: !n_ii.is_zero() || !n_iii.is_zero(),
        i_nonzero: !n_i.is_zero(),
        i_exceeds_iii: n_i > n_iii,
        i_at_least_iii: n_i >= n_iii,
        growth_strict: sum > pow,
        growth_weak: sum >= pow,
    }
}

/// States for `k = 0..=levels` from the seeds `(1, 0, 1)`.
pub fn counting_recursion(cf: &ContinuedFraction, coupling: f64, levels: usize) -> Vec<CountingState> {
    let levels = levels.min(cf.len());
    let (mut n_i, mut n_ii, mut n_iii) = (BigUint::one(), BigUint::zero(), BigUint::one());
    let mut ln_eps = 4f64.ln();
    let ln_v5 = (coupling + 5.0).ln();
    let mut out = Vec::with_capacity(levels + 1);
    out.push(CountingState {
        level: 0,
        checks: checks(0, &n_i, &n_ii, &n_iii),
        n_i: n_i.clone(),
        n_ii: n_ii.clone(),
        n_iii: n_iii.clone(),
        ln_epsilon: ln_eps,
    });
    for k in 1..=levels {
        let a = cf.a(k);
        let ab = BigUint::from(a);
        let next_i = &ab * &n_ii + &n_ii + &ab * &n_iii;
        let next_ii = if a <= 2 { n_i.clone() } else { BigUint::zero() };
        let next_iii = &ab * &n_ii + (&ab - 1u32) * &n_iii;
        n_i = next_i;
        n_ii = next_ii;
        n_iii = next_iii;
        ln_eps -= ln_v5 + 3.0 * ((a as f64) + 2.0).ln();
        out.push(CountingState {
            level: k,
            checks: checks(k, &n_i, &n_ii, &n_iii),
            n_i: n_i.clone(),
            n_ii: n_ii.clone(),
            n_iii: n_iii.clone(),
            ln_epsilon: ln_eps,
        });
    }
    out
}

/// `ln(½ (n_II + n_III)) / (−ln ε_k)`.
pub fn counting_ratio(s: &CountingState) -> f64 {
    (ln_biguint(&s.long_band_total()) - std::f64::consts::LN_2) / (-s.ln_epsilon)
}

mod big_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(s: &CountingState) -> (u64, u64, u64) {
        let f = |b: &BigUint| b.to_string().parse().unwrap();
        (f(&s.n_i), f(&s.n_ii), f(&s.n_iii))
    }

    #[test]
    fn fibonacci_sequence() {
        let cf = ContinuedFraction::golden(6).unwrap();
        let s = counting_recursion(&cf, 24.0, 6);
        let got: Vec<_> = s.iter().map(triple).collect();
        assert_eq!(got, vec![(1, 0, 1), (1, 1, 0), (2, 1, 1), (3, 2, 1), (5, 3, 2), (8, 5, 3), (13, 8, 5)]);
    }

    #[test]
    fn seeds_break_the_strict_forms() {
        let cf = ContinuedFraction::golden(6).unwrap();
        let s = counting_recursion(&cf, 24.0, 6);
        assert!(!s[0].checks.i_exceeds_iii);
        assert!(!s[0].checks.growth_strict);
        assert!(s.iter().all(|x| x.checks.weak_ok()));
        assert!(s[3..].iter().all(|x| x.checks.literal_ok()));
    }

    #[test]
    fn large_quotients_never_produce_type_ii() {
        let cf = ContinuedFraction::from_quotients(vec![3, 4, 7, 3, 10, 5]).unwrap();
        let s = counting_recursion(&cf, 24.0, 6);
        assert!(s[1..].iter().all(|x| x.n_ii.is_zero()));
    }

    #[test]
    fn epsilon_is_exact_sum() {
        let cf = ContinuedFraction::from_quotients(vec![1, 2, 3]).unwrap();
        let s = counting_recursion(&cf, 24.0, 3);
        let want = 4f64.ln() - 3.0 * 29f64.ln() - 3.0 * (3f64.ln() + 4f64.ln() + 5f64.ln());
        assert!((s[3].ln_epsilon - want).abs() < 1e-12);
        assert!(s.windows(2).all(|w| w[1].ln_epsilon < w[0].ln_epsilon));
    }
}
