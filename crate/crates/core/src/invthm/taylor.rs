//! Taylor shift along a progression of step `Q`: when every `‖Qλ_α‖` is at most
//! `Δ·N⃗^{−α}`, the phase barely moves on `t₀ + Q·[M⃗]`.

use serde::Serialize;

use super::inverse::TorusMul;
use crate::error::{Error, Result};
use crate::polycore::{torus_norm, Coeff, Poly};

/// Largest number of shifts `l ∈ [M⃗]` enumerated.
pub const DEFAULT_SHIFT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, Serialize)]
pub struct TaylorReport {
    /// `max_l ‖P(t₀+lQ) − P(t₀)‖_𝕋`.
    pub max_deviation: f64,
    /// `C·Δ·(Σ M_i/N_i)·Q^{d−1}`.
    pub bound: f64,
    pub constant: f64,
    /// `max_α ‖Qλ_α‖·N⃗^α`, at most `Δ`.
    pub max_defect: f64,
    pub shifts: u64,
    pub pass: bool,
    /// The bound is at least `1/2`, so it holds for any phase.
    pub vacuous: bool,
}

/// Enumerates `l ∈ [M₁] × … × [M_D]` and compares the torus deviation with
/// `C·Δ·(Σ M_i/N_i)·Q^{d−1}`.
#[allow(clippy::too_many_arguments)]
pub fn taylor_shift_check<C: Coeff>(
    p: &Poly<C>,
    q: u64,
    delta_cap: f64,
    t0: &[i64],
    m: &[u64],
    n: &[u64],
    constant: f64,
) -> Result<TaylorReport> {
    let dim = p.dim();
    for len in [t0.len(), m.len(), n.len()] {
        if len != dim {
            return Err(Error::Dimension { expected: dim, got: len });
        }
    }
    if q == 0 || !(delta_cap >= 0.0) {
        return Err(Error::domain("need Q >= 1 and Delta >= 0"));
    }
    for i in 0..dim {
        if m[i] == 0 || m[i] > n[i] {
            return Err(Error::domain(format!("axis {i}: need 1 <= M_i <= N_i")));
        }
    }
    let shifts: u64 = m.iter().product();
    if shifts > DEFAULT_SHIFT_BUDGET {
        return Err(Error::budget(format!("{shifts} shifts exceed the budget {DEFAULT_SHIFT_BUDGET}")));
    }
    let ambient: Vec<f64> = n.iter().map(|&x| x as f64).collect();
    let mut max_defect = 0.0f64;
    for (a, c) in p.terms().filter(|(a, _)| a.degree() > 0) {
        let defect = TorusMul::new(c).at(q as i128) * a.weight(&ambient);
        if defect > delta_cap * (1.0 + 1e-9) + 1e-15 {
            return Err(Error::precondition(format!(
                "coefficient of {a}: ||Q lambda|| N^alpha = {defect:.6e} exceeds Delta = {delta_cap}"
            )));
        }
        max_defect = max_defect.max(defect);
    }
    let base = p.phase_at(t0)?;
    let mut point = vec![0i64; dim];
    let mut max_deviation = 0.0f64;
    for idx in 0..shifts {
        let mut rest = idx;
        for i in 0..dim {
            let l = (rest % m[i]) as i64 + 1;
            rest /= m[i];
            point[i] = t0[i] + l * q as i64;
        }
        max_deviation = max_deviation.max(torus_norm(p.phase_at(&point)? - base)?);
    }
    let mu: f64 = m.iter().zip(n).map(|(&a, &b)| a as f64 / b as f64).sum();
    let d = p.degree().max(1);
    let bound = constant * delta_cap * mu * (q as f64).powi(d as i32 - 1);
    Ok(TaylorReport {
        max_deviation,
        bound,
        constant,
        max_defect,
        shifts,
        pass: max_deviation <= bound * (1.0 + 1e-9) + 1e-12,
        vacuous: bound >= 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{MultiIndex, RatPoly, RealPoly};
    use num_rational::Rational64;

    #[test]
    fn exact_divisibility_has_zero_deviation() {
        let p: RatPoly = Poly::restricted(1, 2, [(MultiIndex::new(vec![2]), Rational64::new(3, 5))]).unwrap();
        let r = taylor_shift_check(&p, 5, 0.0, &[7], &[20], &[1000], 8.0).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn near_rational_within_bound() {
        let p: RealPoly = Poly::restricted(1, 2, [(MultiIndex::new(vec![2]), 1.0 / 7.0 + 1e-9)]).unwrap();
        let n = 10_000u64;
        let delta = 7e-9 * (n * n) as f64 * 1.01;
        let r = taylor_shift_check(&p, 7, delta, &[123], &[100], &[n], 8.0).unwrap();
        assert!(r.pass && !r.vacuous, "{r:?}");
        assert!(r.max_deviation > 0.0);
    }

    #[test]
    fn full_box_is_vacuous() {
        let p: RealPoly = Poly::restricted(1, 2, [(MultiIndex::new(vec![2]), 1.0 / 3.0 + 1e-7)]).unwrap();
        let r = taylor_shift_check(&p, 3, 3e-7 * 1e6 * 1.01, &[1], &[1000], &[1000], 8.0).unwrap();
        assert!(r.vacuous && r.pass);
    }

    #[test]
    fn violated_hypothesis_names_alpha() {
        let p: RealPoly = Poly::restricted(1, 2, [(MultiIndex::new(vec![2]), 0.3)]).unwrap();
        let err = taylor_shift_check(&p, 7, 1.0, &[1], &[10], &[1000], 8.0).unwrap_err();
        assert!(matches!(&err, Error::Precondition(m) if m.contains("(2)")), "{err}");
    }
}
