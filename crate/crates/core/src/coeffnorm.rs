//! The scale-dependent coefficient norm `N_R(P) = 2^{s0}` and the structural
//! checks built on it (convexity in the scale, rational lower bound,
//! multiplicativity).
//!
//! `s0` is the least integer `s` such that either `s ≤ 0` and
//! `Σ_α ‖λ_α‖ R^α ≤ 2^s`, or `s ≥ 1` and some integer `1 ≤ Q ≤ 2^s` has
//! `Σ_α ‖Qλ_α‖ R^α ≤ 2^s`. The search is exhaustive over `Q`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::FracMul;
use crate::polycore::{Coeff, MultiIndex, Poly, RatPoly, ScaleVec};

/// Relative slack for floating comparisons against `2^s`; ties count as `≤`.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Largest `s` the witness search will try before giving up.
pub const DEFAULT_MAX_S: u32 = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffNormResult {
    /// `N = 2^{s0}`; `None` when every `λ_α` is an integer, so `N = 0`.
    pub s0: Option<i64>,
    /// Smallest `Q ≤ 2^{s0}` attaining the bound; present iff `s0 ≥ 1`.
    #[serde(rename = "witness_Q")]
    pub witness_q: Option<u64>,
    /// `Σ_α ‖Qλ_α‖ R^α` at the witness (`Q = 1` when there is none).
    pub residual: f64,
}

impl CoeffNormResult {
    /// `N` as a number (0 for the degenerate case).
    pub fn value(&self) -> f64 {
        match self.s0 {
            Some(s) => 2f64.powi(s as i32),
            None => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.s0.is_none()
    }
}

/// Evaluates `Σ_α ‖Qλ_α‖ R^α`, exactly when coefficients are rational and
/// radii integral, in floating point otherwise.
enum Residuals {
    Float(Vec<(FracMul, f64)>),
    /// Terms `(a, b, w·L/b)` for `λ = a/b`, values are numerators over `L`.
    Exact { terms: Vec<(i128, i128, i128)>, lcm: i128 },
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
enum Val {
    F(f64),
    X(i128),
}

impl Residuals {
    fn new<C: Coeff>(p: &Poly<C>, r: &ScaleVec) -> Result<Self> {
        if let Some(exact) = Self::try_exact(p, r) {
            return Ok(exact);
        }
        Ok(Residuals::Float(
            p.terms()
                .map(|(a, c)| (FracMul::new(c.to_f64()), r.weight(a)))
                .collect(),
        ))
    }

    fn try_exact<C: Coeff>(p: &Poly<C>, r: &ScaleVec) -> Option<Self> {
        let radii = r.integer_radii()?;
        let mut lcm: i128 = 1;
        let mut raw = Vec::new();
        for (a, c) in p.terms() {
            let q = c.as_rational()?;
            let w = exact_weight(a, &radii)?;
            let (num, den) = (*q.numer() as i128, *q.denom() as i128);
            lcm = lcm.lcm(&den);
            raw.push((num, den, w));
        }
        let mut terms = Vec::with_capacity(raw.len());
        for (num, den, w) in raw {
            terms.push((num, den, w.checked_mul(lcm / den)?));
        }
        // Keep headroom so sums and comparisons with 2^s·L cannot overflow.
        let total: i128 = terms.iter().try_fold(0i128, |acc, t| acc.checked_add(t.1.checked_mul(t.2)?))?;
        total.checked_mul(1 << 34)?;
        lcm.checked_mul(1 << 64)?;
        Some(Residuals::Exact { terms, lcm })
    }

    fn sigma(&self, q: u64) -> Val {
        match self {
            Residuals::Float(terms) => {
                let mut acc = 0.0;
                for (fm, w) in terms {
                    let f = fm.apply(q as i128);
                    acc += f.min(1.0 - f) * w;
                }
                Val::F(acc)
            }
            Residuals::Exact { terms, .. } => {
                let mut acc: i128 = 0;
                for &(a, b, wl) in terms {
                    let m = (a * q as i128).rem_euclid(b);
                    acc += m.min(b - m) * wl;
                }
                Val::X(acc)
            }
        }
    }

    /// `value ≤ 2^s`.
    fn le_pow2(&self, v: Val, s: i64) -> bool {
        match (self, v) {
            (_, Val::F(x)) => x <= 2f64.powi(s as i32) * (1.0 + BOUNDARY_TOL),
            (Residuals::Exact { lcm, .. }, Val::X(n)) => {
                if s >= 0 {
                    n <= lcm << s
                } else if -s >= 100 {
                    n == 0
                } else {
                    n.checked_mul(1i128 << (-s)).is_some_and(|m| m <= *lcm)
                }
            }
            (Residuals::Float(_), Val::X(_)) => unreachable!("float residuals yield float values"),
        }
    }

    fn to_f64(&self, v: Val) -> f64 {
        match (self, v) {
            (_, Val::F(x)) => x,
            (Residuals::Exact { lcm, .. }, Val::X(n)) => n as f64 / *lcm as f64,
            (Residuals::Float(_), Val::X(n)) => n as f64,
        }
    }

    fn is_zero(&self, v: Val) -> bool {
        match v {
            Val::F(x) => x == 0.0,
            Val::X(n) => n == 0,
        }
    }
}

fn exact_weight(alpha: &MultiIndex, radii: &[u64]) -> Option<i128> {
    let mut acc: i128 = 1;
    for (&e, &r) in alpha.exps().iter().zip(radii) {
        for _ in 0..e {
            acc = acc.checked_mul(r as i128)?;
        }
    }
    Some(acc)
}

fn min_val(a: Val, b: Val) -> Val {
    if b < a { b } else { a }
}

fn check_dims<C: Coeff>(p: &Poly<C>, r: &ScaleVec) -> Result<()> {
    if p.dim() != r.dim() {
        return Err(Error::Dimension { expected: p.dim(), got: r.dim() });
    }
    Ok(())
}

/// `Σ_α ‖Qλ_α‖ R^α` in floating point (used by tests and reports).
pub fn residual_at<C: Coeff>(p: &Poly<C>, r: &ScaleVec, q: u64) -> Result<f64> {
    check_dims(p, r)?;
    let res = Residuals::new(p, r)?;
    Ok(res.to_f64(res.sigma(q)))
}

/// Smallest `Q ≤ 2^s` with `Σ_α ‖Qλ_α‖ R^α ≤ 2^s`, scanning every `Q`.
pub fn witness_at_level<C: Coeff>(p: &Poly<C>, r: &ScaleVec, s: u32) -> Result<Option<u64>> {
    check_dims(p, r)?;
    let res = Residuals::new(p, r)?;
    Ok((1..=1u64 << s).find(|&q| res.le_pow2(res.sigma(q), s as i64)))
}

/// `N_R(P)` with the default search cap.
pub fn coeff_norm<C: Coeff>(p: &Poly<C>, r: &ScaleVec) -> Result<CoeffNormResult> {
    coeff_norm_capped(p, r, DEFAULT_MAX_S)
}

/// `N_R(P)`, failing with a budget error if `s0` would exceed `max_s`.
pub fn coeff_norm_capped<C: Coeff>(p: &Poly<C>, r: &ScaleVec, max_s: u32) -> Result<CoeffNormResult> {
    check_dims(p, r)?;
    let res = Residuals::new(p, r)?;
    let sigma0 = res.sigma(1);
    if res.is_zero(sigma0) {
        return Ok(CoeffNormResult { s0: None, witness_q: None, residual: 0.0 });
    }
    if res.le_pow2(sigma0, 0) {
        let x = res.to_f64(sigma0);
        let mut s = x.log2().ceil() as i64;
        while res.le_pow2(sigma0, s - 1) {
            s -= 1;
        }
        while !res.le_pow2(sigma0, s) {
            s += 1;
        }
        return Ok(CoeffNormResult { s0: Some(s.min(0)), witness_q: None, residual: x });
    }
    // Running minimum of the residual over the range already scanned; the
    // smallest witness is located by a rescan only once the minimum qualifies.
    let mut best = sigma0;
    for s in 1..=max_s {
        let hi = 1u64 << s;
        let lo = (hi >> 1) + 1;
        let fresh = if hi - lo >= 4096 {
            (lo..=hi).into_par_iter().map(|q| res.sigma(q)).reduce_with(min_val)
        } else {
            (lo..=hi).map(|q| res.sigma(q)).reduce(min_val)
        };
        best = fresh.map_or(best, |f| min_val(best, f));
        if res.le_pow2(best, s as i64) {
            let q = if hi >= 4096 {
                (1..=hi).into_par_iter().find_first(|&q| res.le_pow2(res.sigma(q), s as i64))
            } else {
                (1..=hi).find(|&q| res.le_pow2(res.sigma(q), s as i64))
            }
            .expect("the minimum is attained in range");
            return Ok(CoeffNormResult { s0: Some(s as i64), witness_q: Some(q), residual: res.to_f64(res.sigma(q)) });
        }
    }
    Err(Error::budget(format!(
        "coefficient norm exceeds 2^{max_s}; raise the search cap"
    )))
}

/// `Σ_α R^α`, the trivial upper bound for `N_R(P)` over the index set of `P`.
pub fn trivial_bound<C: Coeff>(p: &Poly<C>, r: &ScaleVec) -> f64 {
    p.terms().map(|(a, _)| r.weight(a)).fold(0.0, |acc, w| acc + w)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    /// `(k, s0)` for `R = 2^k` on every axis; `None` marks `N = 0`.
    pub levels: Vec<(u32, Option<i64>)>,
    pub violations: Vec<String>,
    pub pass: bool,
}

/// Check that each level set `{k : N_{2^k}(P) = 2^s}` is an interval for
/// `s ≥ 1` and has at most one element for `s ≤ 0`.
pub fn check_convexity<C: Coeff>(p: &Poly<C>, k_max: u32) -> Result<ConvexityReport> {
    if p.is_zero() {
        return Err(Error::domain("convexity check needs a nonzero polynomial"));
    }
    let mut levels = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let r = ScaleVec::uniform(p.dim(), 2f64.powi(k as i32))?;
        levels.push((k, coeff_norm(p, &r)?.s0));
    }
    let mut violations = Vec::new();
    let mut seen: Vec<i64> = levels.iter().filter_map(|l| l.1).collect();
    seen.sort_unstable();
    seen.dedup();
    for s in seen {
        let ks: Vec<u32> = levels.iter().filter(|l| l.1 == Some(s)).map(|l| l.0).collect();
        if s <= 0 && ks.len() > 1 {
            violations.push(format!("level s={s} hit at k={ks:?}, expected at most once"));
        }
        if s >= 1 && ks.windows(2).any(|w| w[1] != w[0] + 1) {
            violations.push(format!("level s={s} hit at non-consecutive k={ks:?}"));
        }
    }
    Ok(ConvexityReport { pass: violations.is_empty(), levels, violations })
}

/// Constant in the rational lower bound `N ≥ c·Q^δ`.
pub const RATIONAL_LOWER_BOUND_C: f64 = 0.25;

#[derive(Debug, Clone, Serialize)]
pub struct RationalLowerBound {
    pub n_value: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// For `λ_α = A_α/Q` reduced and `R_i ≥ Q^{1+δ}`, check `N_R(P) ≥ c·Q^δ`.
pub fn check_rational_lower_bound(
    numerators: &[(MultiIndex, i64)],
    q: i64,
    delta: f64,
    r: &ScaleVec,
    c: f64,
) -> Result<RationalLowerBound> {
    if q < 1 {
        return Err(Error::domain("denominator must be positive"));
    }
    if numerators.iter().all(|(_, a)| *a == 0) {
        return Err(Error::precondition("numerators are all zero, so A/Q is not reduced"));
    }
    let g = numerators.iter().fold(q, |g, (_, a)| g.gcd(a));
    if g != 1 {
        return Err(Error::precondition(format!("gcd of numerators and Q is {g}, not reduced")));
    }
    let need = (q as f64).powf(1.0 + delta);
    if r.radii().iter().any(|&ri| ri < need) {
        return Err(Error::precondition(format!("radii must be at least Q^(1+delta) = {need}")));
    }
    let d = numerators.iter().map(|(a, _)| a.degree()).max().unwrap_or(2).max(2);
    let dim = r.dim();
    let p = RatPoly::restricted(
        dim,
        d,
        numerators
            .iter()
            .map(|(a, n)| (a.clone(), num_rational::Rational64::new(*n, q))),
    )?;
    let n_value = coeff_norm(&p, r)?.value();
    let bound = c * (q as f64).powf(delta);
    Ok(RationalLowerBound { n_value, bound, ratio: n_value / bound, pass: n_value >= bound })
}

#[derive(Debug, Clone, Serialize)]
pub struct Multiplicativity {
    pub lhs: f64,
    pub n_kp: f64,
    pub factor: f64,
    /// `2^{⌈log₂ k⌉}·N(kP)` as written.
    pub rhs_literal: f64,
    /// `2^{⌈log₂ k⌉}·max(N(kP), 1)` for `k ≥ 2`, the form that is checked.
    pub rhs: f64,
    pub literal_holds: bool,
    pub pass: bool,
}

/// Compare `N_R(P)` with `2^{⌈log₂ k⌉}·N_R(kP)`.
///
/// When `kP` has integer coefficients `N_R(kP) = 0` while `N_R(P)` may be
/// large, so the right side is floored at `N_R(kP) ≥ 1` for `k ≥ 2`.
/// `literal_holds` reports the unfloored comparison.
pub fn check_multiplicativity<C: Coeff>(p: &Poly<C>, k: i64, r: &ScaleVec) -> Result<Multiplicativity> {
    if k < 1 {
        return Err(Error::domain("k must be at least 1"));
    }
    let lhs = coeff_norm(p, r)?.value();
    let n_kp = coeff_norm(&p.scale_int(k)?, r)?.value();
    let factor = 2f64.powi((k as f64).log2().ceil() as i32);
    let rhs_literal = factor * n_kp;
    let rhs = if k == 1 { n_kp } else { factor * n_kp.max(1.0) };
    Ok(Multiplicativity {
        lhs,
        n_kp,
        factor,
        rhs_literal,
        rhs,
        literal_holds: lhs <= rhs_literal,
        pass: lhs <= rhs,
    })
}

#[cfg(test)]
mod tests {
    use num_rational::Rational64;

    use super::*;
    use crate::polycore::RealPoly;

    fn r1(r: f64) -> ScaleVec {
        ScaleVec::uniform(1, r).unwrap()
    }

    #[test]
    fn half_at_radius_four() {
        let p = RealPoly::univariate(2, &[(2, 0.5)]).unwrap();
        let n = coeff_norm(&p, &r1(4.0)).unwrap();
        assert_eq!(n.s0, Some(1));
        assert_eq!(n.witness_q, Some(2));
        assert_eq!(n.residual, 0.0);
    }

    #[test]
    fn third_at_radius_nine() {
        let p = RatPoly::univariate(2, &[(2, Rational64::new(1, 3))]).unwrap();
        let n = coeff_norm(&p, &r1(9.0)).unwrap();
        assert_eq!((n.s0, n.witness_q), (Some(2), Some(3)));
        let f = coeff_norm(&p.to_real(), &r1(9.0)).unwrap();
        assert_eq!((f.s0, f.witness_q), (Some(2), Some(3)));
    }

    #[test]
    fn zero_and_integer_polynomials() {
        let z = RealPoly::zero(1, 2);
        assert!(coeff_norm(&z, &r1(5.0)).unwrap().is_zero());
        let int = RealPoly::univariate(2, &[(2, 3.0)]).unwrap();
        assert!(coeff_norm(&int, &r1(5.0)).unwrap().is_zero());
    }

    #[test]
    fn small_norm_branch() {
        // 0.01·R² = 0.16 → s0 = ⌈log₂ 0.16⌉ = -2
        let p = RealPoly::univariate(2, &[(2, 0.01)]).unwrap();
        let n = coeff_norm(&p, &r1(4.0)).unwrap();
        assert_eq!(n.s0, Some(-2));
        assert!(n.witness_q.is_none());
        // exactly on a power of two: 1/4 · 2² = 1 → s0 = 0
        let e = RatPoly::univariate(2, &[(2, Rational64::new(1, 4))]).unwrap();
        assert_eq!(coeff_norm(&e, &r1(2.0)).unwrap().s0, Some(0));
        assert_eq!(coeff_norm(&e.to_real(), &r1(2.0)).unwrap().s0, Some(0));
    }

    #[test]
    fn convexity_examples() {
        let third = RatPoly::univariate(2, &[(2, Rational64::new(1, 3))]).unwrap();
        assert!(check_convexity(&third, 8).unwrap().pass);
        let half = RealPoly::univariate(2, &[(2, 0.5)]).unwrap();
        assert!(check_convexity(&half, 8).unwrap().pass);
        let pi = RealPoly::univariate(2, &[(2, std::f64::consts::PI.fract())]).unwrap();
        assert!(check_convexity(&pi, 12).unwrap().pass);
    }

    #[test]
    fn rational_lower_bound_examples() {
        let a = vec![(MultiIndex::new(vec![2]), 1)];
        let res = check_rational_lower_bound(&a, 5, 0.5, &r1(12.0), RATIONAL_LOWER_BOUND_C).unwrap();
        assert!(res.pass);
        let res = check_rational_lower_bound(&a, 3, 1.0, &r1(9.0), RATIONAL_LOWER_BOUND_C).unwrap();
        assert_eq!(res.n_value, 4.0);
        assert!(res.pass);
        let zero = vec![(MultiIndex::new(vec![2]), 0)];
        assert!(check_rational_lower_bound(&zero, 5, 0.5, &r1(12.0), 0.25).is_err());
        let unreduced = vec![(MultiIndex::new(vec![2]), 2)];
        assert!(check_rational_lower_bound(&unreduced, 4, 0.5, &r1(12.0), 0.25).is_err());
        assert!(check_rational_lower_bound(&a, 5, 0.5, &r1(10.0), 0.25).is_err());
    }

    #[test]
    fn multiplicativity_examples() {
        let quarter = RatPoly::univariate(2, &[(2, Rational64::new(1, 4))]).unwrap();
        let m = check_multiplicativity(&quarter, 2, &r1(8.0)).unwrap();
        assert_eq!((m.lhs, m.n_kp, m.rhs), (4.0, 2.0, 4.0));
        assert!(m.pass && m.literal_holds);
        let one = check_multiplicativity(&quarter, 1, &r1(8.0)).unwrap();
        assert_eq!(one.lhs, one.rhs);
        // 4P has integer coefficients: N(4P) = 0 and only the floored form holds
        let four = check_multiplicativity(&quarter, 4, &r1(8.0)).unwrap();
        assert_eq!(four.n_kp, 0.0);
        assert!(four.pass && !four.literal_holds);
    }

    #[test]
    fn witness_scan_agrees_with_search() {
        let p = RealPoly::univariate(3, &[(2, 0.123), (3, 0.071)]).unwrap();
        let r = r1(16.0);
        let n = coeff_norm(&p, &r).unwrap();
        let s0 = n.s0.unwrap();
        assert!(s0 >= 1);
        for s in 1..s0 {
            assert_eq!(witness_at_level(&p, &r, s as u32).unwrap(), None);
        }
        assert_eq!(witness_at_level(&p, &r, s0 as u32).unwrap(), n.witness_q);
        assert!(n.value() <= trivial_bound(&p, &r));
    }
}
