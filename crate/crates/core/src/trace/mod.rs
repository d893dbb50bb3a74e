//! Transfer matrices, the trace map and its escape criterion.

pub mod chebyshev;
pub mod mat2;
pub mod potential;

use crate::cf::{ContinuedFraction, FrequencyStats};
use chebyshev::chebyshev_triplet;
pub use mat2::Mat2;
use num_complex::Complex64;
use num_traits::Num;
pub use potential::{PotentialError, PotentialKind, SturmianPotential};
use serde::{Deserialize, Serialize};

/// Orbits are cut once a trace exceeds this modulus.
pub const TRACE_OVERFLOW: f64 = 1e300;

pub const DEFAULT_DELTA: f64 = 0.1;

/// Scalars the trace map can run over.
pub trait TraceScalar: Num + Copy + Send + Sync {
    fn modulus(self) -> f64;
    fn from_real(x: f64) -> Self;
}

impl TraceScalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_real(x: f64) -> Self {
        x
    }
}

impl TraceScalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

/// One step `(x_{k−1}, x_k, z_k) ↦ (x_k, x_{k+1}, z_{k+1})` with quotient `a = a_{k+1}`.
pub fn trace_step<T: TraceScalar>(a: u64, x_prev: T, x: T, z: T) -> (T, T, T) {
    let (s_am2, s_am1, s_a) = chebyshev_triplet(a as i64, x);
    let x_next = z * s_am1 - x_prev * s_am2;
    let z_next = z * s_a - x_prev * s_am1;
    (x, x_next, z_next)
}

/// `t_{k,p} = S_{p−1}(x_k) z_k − S_{p−2}(x_k) x_{k−1}` for `p >= 0`.
pub fn general_trace<T: TraceScalar>(p: u64, x_prev: T, x: T, z: T) -> T {
    if p == 0 {
        return x_prev;
    }
    let (_, s_pm2, s_pm1) = chebyshev_triplet(p as i64 - 1, x);
    z * s_pm1 - x_prev * s_pm2
}

/// `x_{−1}..=x_n` and `z_0..=z_n` at energy `e`, stopping early on overflow.
#[derive(Debug, Clone)]
pub struct Traces<T> {
    /// `x[k + 1] = x_k`.
    pub x: Vec<T>,
    /// `z[k] = z_k`.
    pub z: Vec<T>,
    /// First level whose trace left `[−TRACE_OVERFLOW, TRACE_OVERFLOW]`.
    pub overflow_at: Option<usize>,
}

impl<T: TraceScalar> Traces<T> {
    /// Deepest level computed.
    pub fn depth(&self) -> usize {
        self.z.len() - 1
    }

    pub fn x(&self, k: isize) -> T {
        self.x[(k + 1) as usize]
    }

    pub fn z(&self, k: usize) -> T {
        self.z[k]
    }
}

pub fn traces<T: TraceScalar>(cf: &ContinuedFraction, coupling: f64, e: T, levels: usize) -> Traces<T> {
    let levels = levels.min(cf.len());
    let mut x = Vec::with_capacity(levels + 2);
    let mut z = Vec::with_capacity(levels + 1);
    x.push(T::from_real(2.0));
    x.push(e);
    z.push(e - T::from_real(coupling));
    let mut overflow_at = None;
    for k in 0..levels {
        let (_, xn, zn) = trace_step(cf.a(k + 1), x[k], x[k + 1], z[k]);
        x.push(xn);
        z.push(zn);
        let big = |v: T| !(v.modulus() <= TRACE_OVERFLOW);
        if big(xn) || big(zn) {
            overflow_at = Some(k + 1);
            break;
        }
    }
    Traces { x, z, overflow_at }
}

/// `(x_k(e), z_k(e))` for real `e`; `k = 0` is allowed.
pub fn real_traces_at(cf: &ContinuedFraction, coupling: f64, e: f64, k: usize) -> (f64, f64) {
    let (_, x, z) = real_trace_triple(cf, coupling, e, k);
    (x, z)
}

/// `(x_{k−1}(e), x_k(e), z_k(e))` for real `e`.
pub fn real_trace_triple(cf: &ContinuedFraction, coupling: f64, e: f64, k: usize) -> (f64, f64, f64) {
    let (mut xp, mut x, mut z) = (2.0, e, e - coupling);
    for j in 0..k {
        (xp, x, z) = trace_step(cf.a(j + 1), xp, x, z);
    }
    (xp, x, z)
}

/// A 2×2 matrix stored as `exp(log_scale) · m` with `max |m_ij| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMat2 {
    pub m: Mat2,
    pub log_scale: f64,
}

impl ScaledMat2 {
    pub fn new(m: Mat2) -> Self {
        Self { m, log_scale: 0.0 }.normalized()
    }

    fn normalized(mut self) -> Self {
        let s = self.m.max_abs();
        if s > 0.0 && s.is_finite() {
            self.m = self.m.scale(1.0 / s);
            self.log_scale += s.ln();
        }
        self
    }

    pub fn mul(&self, o: &ScaledMat2) -> ScaledMat2 {
        ScaledMat2 { m: self.m * o.m, log_scale: self.log_scale + o.log_scale }.normalized()
    }

    pub fn pow(&self, mut exp: u64) -> ScaledMat2 {
        let mut base = *self;
        let mut acc = ScaledMat2::new(Mat2::IDENTITY);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    pub fn log_norm(&self) -> f64 {
        self.log_scale + self.m.spectral_norm().ln()
    }

    pub fn to_mat(&self) -> Mat2 {
        self.m.scale(self.log_scale.exp())
    }
}

/// Site-by-site transfer matrix `F(n)`, mapping `(ψ(1), ψ(0))` to
/// `(ψ(n+1), ψ(n))`. For `n < 0` this is `T(n+1)^{−1} ⋯ T(0)^{−1}`.
pub fn transfer_product(pot: &SturmianPotential, n: i64, z: Complex64) -> Result<Mat2, PotentialError> {
    let mut f = Mat2::IDENTITY;
    if n >= 0 {
        for m in 1..=n {
            f = Mat2::transfer(z, pot.value(m)?) * f;
        }
    } else {
        for m in (n + 1..=0).rev() {
            f = Mat2::transfer_inverse(z, pot.value(m)?) * f;
        }
    }
    Ok(f)
}

/// `log ‖F(j)‖` for `j = 1..=n` (or `j = −1..=−n` when `n < 0`), with
/// rescaling so that no intermediate overflows.
pub fn transfer_log_norms(pot: &SturmianPotential, n: i64, z: Complex64) -> Result<Vec<f64>, PotentialError> {
    let mut f = ScaledMat2::new(Mat2::IDENTITY);
    let mut out = Vec::with_capacity(n.unsigned_abs() as usize);
    if n >= 0 {
        for m in 1..=n {
            f = ScaledMat2::new(Mat2::transfer(z, pot.value(m)?)).mul(&f);
            out.push(f.log_norm());
        }
    } else {
        for m in (n + 1..=0).rev() {
            f = ScaledMat2::new(Mat2::transfer_inverse(z, pot.value(m)?)).mul(&f);
            out.push(f.log_norm());
        }
    }
    Ok(out)
}

/// Last two letters of the standard words, tracked through the recursion.
#[derive(Debug, Clone, Copy)]
struct WordTail {
    len_ge_2: bool,
    second_last: u8,
    last: u8,
}

/// `F(q_k, z)` and `F(−q_k, z)` for `k = 1..=levels`, from the level
/// recursion `M_{k+1} = M_{k−1} M_k^{a_{k+1}}`; the cost is independent of `q_k`.
#[derive(Debug, Clone)]
pub struct LevelMatrices {
    /// `right[k − 1] = F(q_k)`.
    pub right: Vec<ScaledMat2>,
    /// `left[k − 1] = F(−q_k)`.
    pub left: Vec<ScaledMat2>,
}

pub fn level_matrices(cf: &ContinuedFraction, coupling: f64, z: Complex64, levels: usize) -> LevelMatrices {
    let levels = levels.min(cf.len());
    let t = |letter: u8| Mat2::transfer(z, letter as f64 * coupling);
    let tinv = |letter: u8| ScaledMat2::new(Mat2::transfer_inverse(z, letter as f64 * coupling));
    let head = ScaledMat2::new(t(1) * t(0));
    let swap = Mat2::real(0.0, 1.0, 1.0, 0.0);

    let mut m_prev = ScaledMat2::new(Mat2::real(1.0, -coupling, 0.0, 1.0));
    let mut m_cur = ScaledMat2::new(t(0));
    let mut tail_prev = WordTail { len_ge_2: false, second_last: 0, last: 0 };
    let mut tail_cur = tail_prev;
    let mut right = Vec::with_capacity(levels);
    let mut left = Vec::with_capacity(levels);
    for k in 0..levels {
        let a = cf.a(k + 1);
        let next = m_prev.mul(&m_cur.pow(a));
        let tail_next = if k == 0 {
            WordTail { len_ge_2: a >= 2, second_last: 0, last: 1 }
        } else {
            WordTail {
                len_ge_2: true,
                second_last: if tail_prev.len_ge_2 { tail_prev.second_last } else { tail_cur.last },
                last: tail_prev.last,
            }
        };
        m_prev = m_cur;
        m_cur = next;
        tail_prev = tail_cur;
        tail_cur = tail_next;

        right.push(m_cur);
        // F(−q) = P T(u_last) ⋯ T(u_first) P with u = 0 1 w_0 ⋯ w_{q−3}.
        let inner = if tail_cur.len_ge_2 {
            tinv(tail_cur.second_last).mul(&tinv(tail_cur.last)).mul(&m_cur).mul(&head)
        } else {
            ScaledMat2::new(t(0))
        };
        let sw = ScaledMat2::new(swap);
        left.push(sw.mul(&inner).mul(&sw));
    }
    LevelMatrices { right, left }
}

/// `λ(δ) = sqrt(12(1+δ)² + 8(1+δ)³ + 4)`.
pub fn lambda(delta: f64) -> f64 {
    let d = 1.0 + delta;
    (12.0 * d * d + 8.0 * d * d * d + 4.0).sqrt()
}

/// Coupling threshold above which the Koebe-distortion estimates are valid.
pub fn koebe_threshold(delta: f64) -> f64 {
    lambda(2.0 * delta).max(20.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceOrbit {
    pub energy: Complex64,
    pub coupling: f64,
    pub delta: f64,
    /// `x[k + 1] = x_k` for `k = −1..=depth`.
    pub x: Vec<Complex64>,
    /// `z[k] = z_k` for `k = 0..=depth`.
    pub z: Vec<Complex64>,
    /// Escape level `N`, if reached before the end of the orbit.
    pub escape: Option<usize>,
    pub overflow_at: Option<usize>,
}

impl TraceOrbit {
    pub fn depth(&self) -> usize {
        self.z.len() - 1
    }
}

/// First `N >= 0` with `|x_{N−1}| ≤ 2+δ` and both `|x_N|`, `|z_N|` > `2+δ`.
pub fn escape_level<T: TraceScalar>(tr: &Traces<T>, delta: f64) -> Option<usize> {
    let b = 2.0 + delta;
    (0..=tr.depth()).find(|&n| {
        tr.x(n as isize - 1).modulus() <= b && tr.x(n as isize).modulus() > b && tr.z(n).modulus() > b
    })
}

pub fn trace_orbit(cf: &ContinuedFraction, coupling: f64, energy: Complex64, delta: f64, levels: usize) -> TraceOrbit {
    let tr = traces(cf, coupling, energy, levels);
    let escape = escape_level(&tr, delta);
    TraceOrbit { energy, coupling, delta, escape, overflow_at: tr.overflow_at, x: tr.x, z: tr.z }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EscapeReport {
    pub escape: Option<usize>,
    pub levels_checked: usize,
    /// Levels after escape where `|x_{k+1}| ≥ |z_k| ≥ e^{c G_{k−N}} + 1`
    /// failed, `c = ln(1 + δ)`.
    pub violations: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Escape level of `E + iε` together with a check of the super-exponential
/// growth that must follow it.
pub fn escape_for_imaginary_offset(
    cf: &ContinuedFraction,
    stats: &FrequencyStats,
    coupling: f64,
    e: f64,
    eps: f64,
    delta: f64,
) -> EscapeReport {
    let mut warnings = Vec::new();
    if coupling <= 20.0 {
        warnings.push(format!("coupling {coupling} <= 20: escape estimates are not guaranteed"));
    }
    let orbit = trace_orbit(cf, coupling, Complex64::new(e, eps), delta, cf.len());
    let c = (1.0 + delta).ln();
    let mut violations = Vec::new();
    let mut levels_checked = 0;
    if let Some(n) = orbit.escape {
        for k in n..orbit.depth() {
            let zk = orbit.z[k].norm();
            let xk1 = orbit.x[k + 2].norm();
            if !(zk.is_finite() && xk1.is_finite() && zk <= TRACE_OVERFLOW && xk1 <= TRACE_OVERFLOW) {
                break;
            }
            levels_checked += 1;
            let g = stats.g_f64((k - n) as isize);
            // Compare logs so large G does not overflow; tolerate rounding.
            let lhs = (zk - 1.0).max(0.0).ln();
            let ok_growth = lhs >= c * g - 1e-9 * (1.0 + c * g);
            let ok_order = xk1 >= zk * (1.0 - 1e-12);
            if !(ok_growth && ok_order) {
                violations.push(k);
            }
        }
    }
    EscapeReport { escape: orbit.escape, levels_checked, violations, warnings }
}

/// Escape levels `N(ε)` along a decreasing sequence of offsets; for an energy
/// in the spectrum these should be non-decreasing as `ε → 0`.
pub fn escape_monotonicity(cf: &ContinuedFraction, coupling: f64, e: f64, eps: &[f64], delta: f64) -> Vec<Option<usize>> {
    eps.iter()
        .map(|&ep| trace_orbit(cf, coupling, Complex64::new(e, ep), delta, cf.len()).escape)
        .collect()
}
