//! Property tests for invariants that must hold on every input.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use sturm_core::cf::{cf_expand, convergents, frequency_stats, CfError, ContinuedFraction};
use sturm_core::spectrum::{counting_recursion, koebe_radii};
use sturm_core::trace::mat2::Mat2;
use sturm_core::trace::potential::SturmianPotential;
use sturm_core::trace::{level_matrices, traces, transfer_product};
use sturm_core::transport::{evolve_and_average, HorizonPolicy, LatticeHamiltonian};

fn quotients(max_a: u64, len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1..=max_a, len)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn convergent_table_invariants(q in quotients(50, 1..=80)) {
        let cf = ContinuedFraction::from_quotients(q.clone()).unwrap();
        let t = convergents(&cf);
        for k in 0..q.len() as isize {
            let a = BigUint::from(q[k as usize]);
            prop_assert_eq!(t.q(k + 1), &a * t.q(k) + t.q(k - 1));
            prop_assert_eq!(t.p(k + 1), &a * t.p(k) + t.p(k - 1));
        }
        for k in 0..=q.len() as isize {
            let det = BigInt::from(t.p(k)) * BigInt::from(t.q(k - 1)) - BigInt::from(t.p(k - 1)) * BigInt::from(t.q(k));
            let sign = if k % 2 == 0 { -1 } else { 1 };
            prop_assert_eq!(det, BigInt::from(sign));
            prop_assert_eq!(t.p(k).gcd(&t.q(k)), BigUint::from(1u8));
            if k >= 1 && k + 1 <= q.len() as isize {
                prop_assert!(t.q(k + 1) > t.q(k));
            }
        }
    }

    #[test]
    fn g_sequence_is_sandwiched(q in quotients(20, 1..=60)) {
        let cf = ContinuedFraction::from_quotients(q.clone()).unwrap();
        let t = convergents(&cf);
        let s = frequency_stats(&cf);
        let (mut f_prev, mut f) = (BigUint::from(1u8), BigUint::from(1u8));
        for k in 1..=q.len() as isize {
            let next = &f + &f_prev;
            f_prev = std::mem::replace(&mut f, next);
            prop_assert!(s.g(k) >= &f_prev);
            prop_assert!(s.g(k) <= &(t.q(k) + t.q(k - 1)));
        }
    }

    #[test]
    fn expansion_reconstructs_input(x in 0.001f64..0.999, depth in 1usize..14) {
        let prefix = match cf_expand(x, depth) {
            Ok(cf) => cf.quotients().to_vec(),
            Err(CfError::PrecisionExhausted { valid }) | Err(CfError::RationalInput { prefix: valid }) => valid,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assume!(!prefix.is_empty());
        let cf = ContinuedFraction::from_quotients(prefix).unwrap();
        let t = convergents(&cf);
        let n = cf.len() as isize;
        let q = t.q_f64(n);
        let value = t.p(n).to_f64().unwrap() / q;
        prop_assert!((value - x).abs() <= 1.0 / (q * q) + 4.0 * f64::EPSILON, "x = {x}, value = {value}, q = {q}");
    }

    #[test]
    fn word_matches_floor_formula(q in quotients(5, 12..=12)) {
        let cf = ContinuedFraction::from_quotients(q).unwrap();
        let t = convergents(&cf);
        let (p, qq) = (t.p(12), t.q(12));
        let floor = |n: u64| BigUint::from(n) * &p / &qq;
        let pot = SturmianPotential::new(&cf, 1.0, t.q_usize(10)).unwrap();
        for n in 1..=t.q_u64(10).unwrap() {
            let want = floor(n + 1) - floor(n);
            prop_assert_eq!(BigUint::from(pot.letter(n as i64).unwrap()), want, "site {}", n);
        }
    }

    #[test]
    fn real_energy_gives_real_traces(e in -30.0f64..30.0, v in 0.0f64..60.0) {
        let cf = ContinuedFraction::golden(20).unwrap();
        let tr = traces(&cf, v, Complex64::new(e, 0.0), 20);
        let stop = tr.overflow_at.unwrap_or(usize::MAX);
        for k in 0..=20usize.min(stop.saturating_sub(1)) {
            prop_assert!(tr.x(k as isize).im.abs() < 1e-12 && tr.z(k).im.abs() < 1e-12);
        }
    }

    #[test]
    fn level_recursion_matches_products(re in -5.0f64..30.0, im in 0.0f64..1.0, q in quotients(3, 8..=8)) {
        let cf = ContinuedFraction::from_quotients(q).unwrap();
        let z = Complex64::new(re, im);
        let lm = level_matrices(&cf, 24.0, z, 8);
        let t = convergents(&cf);
        let pot = SturmianPotential::new(&cf, 24.0, t.q_usize(8)).unwrap();
        for k in 1..=8 {
            let direct = transfer_product(&pot, t.q_u64(k as isize).unwrap() as i64, z).unwrap();
            let fast = lm.right[k - 1].to_mat();
            let scale = direct.max_abs().max(1.0);
            let diff = [direct.a - fast.a, direct.b - fast.b, direct.c - fast.c, direct.d - fast.d]
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            prop_assert!(diff <= 1e-8 * scale, "k = {}", k);
        }
    }

    #[test]
    fn norm_dominates_half_trace(a in -50.0f64..50.0, b in -50.0f64..50.0, c in -50.0f64..50.0, d in -50.0f64..50.0) {
        let m = Mat2::real(a, b, c, d);
        prop_assert!(m.spectral_norm() >= 0.5 * m.trace().norm() * (1.0 - 1e-12));
    }

    #[test]
    fn epsilon_is_exact_and_decreasing(q in quotients(30, 1..=40), v in 21.0f64..200.0) {
        let cf = ContinuedFraction::from_quotients(q.clone()).unwrap();
        let states = counting_recursion(&cf, v, q.len());
        let mut want = 4f64.ln();
        for (k, s) in states.iter().enumerate() {
            if k > 0 {
                want -= (v + 5.0).ln() + 3.0 * (q[k - 1] as f64 + 2.0).ln();
                prop_assert!(s.ln_epsilon < states[k - 1].ln_epsilon);
            }
            prop_assert!((s.ln_epsilon - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn koebe_radii_are_ordered(q in quotients(10, 1..=30), v in 21.0f64..200.0) {
        let cf = ContinuedFraction::from_quotients(q).unwrap();
        let r = koebe_radii(&cf, v, cf.len(), 1.0, 1.0).unwrap();
        for (lo, hi) in r.ln_r.iter().zip(&r.ln_big_r) {
            prop_assert!(lo <= hi);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn averages_are_probabilities(diag in prop::collection::vec(0.0f64..30.0, 41), t in 0.1f64..20.0) {
        let h = LatticeHamiltonian::new(20, diag);
        let run = evolve_and_average(&h, &[t], HorizonPolicy::Unchecked).unwrap();
        prop_assert!(run.unitarity_defects[0] <= 1e-8);
        prop_assert!(run.min_a[0] >= -1e-12);
        let curve = run.outside_curve(0);
        prop_assert!(curve[0] <= 1.0 + 1e-12);
        for w in curve.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }
}
