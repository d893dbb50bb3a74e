//! Chebyshev polynomials of the second kind, `S_{l+1}(x) = x S_l(x) − S_{l−1}(x)`
//! with `S_{-1} = 0` and `S_0 = 1`.

use num_traits::Num;

/// Orders above this are evaluated by repeated squaring of the companion
/// matrix instead of the three-term recursion.
pub const RECURSION_LIMIT: i64 = 4096;

/// `S_l(x)` for `l >= -1`.
pub fn chebyshev_s<T: Num + Copy>(l: i64, x: T) -> T {
    assert!(l >= -1, "S_l is only defined here for l >= -1 (got {l})");
    chebyshev_triplet(l, x).2
}

/// `(S_{l-2}(x), S_{l-1}(x), S_l(x))` for `l >= -1`, with `S_{-2} = -1`.
pub(crate) fn chebyshev_triplet<T: Num + Copy>(l: i64, x: T) -> (T, T, T) {
    let one = T::one();
    let zero = T::zero();
    if l == -1 {
        // S_{-1} = x S_{-2} - S_{-3} gives S_{-3} = -x.
        return (zero - x, zero - one, zero);
    }
    if l <= RECURSION_LIMIT {
        let (mut s2, mut s1, mut s0) = (zero - one, zero, one);
        for _ in 0..l {
            let next = x * s0 - s1;
            s2 = s1;
            s1 = s0;
            s0 = next;
        }
        return (s2, s1, s0);
    }
    // [[x, -1], [1, 0]]^l = [[S_l, -S_{l-1}], [S_{l-1}, -S_{l-2}]].
    let m = power([x, zero - one, one, zero], l as u64);
    (zero - m[3], m[2], m[0])
}

fn mul<T: Num + Copy>(a: [T; 4], b: [T; 4]) -> [T; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn power<T: Num + Copy>(mut base: [T; 4], mut exp: u64) -> [T; 4] {
    let mut acc = [T::one(), T::zero(), T::zero(), T::one()];
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn seeds_and_small_orders() {
        assert_eq!(chebyshev_s(-1, 3.7), 0.0);
        assert_eq!(chebyshev_s(0, 3.7), 1.0);
        assert_eq!(chebyshev_s(1, 3.7), 3.7);
        assert_eq!(chebyshev_s(2, 3.0), 8.0);
    }

    #[test]
    fn value_at_two_is_l_plus_one() {
        for l in -1..40 {
            assert_eq!(chebyshev_s(l, 2.0), (l + 1) as f64);
        }
        assert_eq!(chebyshev_s(5, 2.0), 6.0);
    }

    #[test]
    fn triplet_is_consistent() {
        let x = Complex64::new(0.3, -1.2);
        for l in 0..20 {
            let (s2, s1, s0) = chebyshev_triplet(l, x);
            assert!((s0 - (x * s1 - s2)).norm() < 1e-12);
            if l >= 1 {
                assert!((s1 - chebyshev_s(l - 1, x)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn squaring_matches_recursion() {
        // 2cos θ gives S_l = sin((l+1)θ)/sin θ, bounded, so both routes are stable.
        let theta = 0.731_f64;
        let x = 2.0 * theta.cos();
        for l in [RECURSION_LIMIT + 1, RECURSION_LIMIT + 2, 9_999, 123_456] {
            let exact = ((l + 1) as f64 * theta).sin() / theta.sin();
            let (_, s1, s0) = chebyshev_triplet(l, x);
            assert!((s0 - exact).abs() < 1e-8, "l = {l}: {s0} vs {exact}");
            let prev = (l as f64 * theta).sin() / theta.sin();
            assert!((s1 - prev).abs() < 1e-8);
        }
    }
}
