//! Inverse-theorem verifier: a large normalized sum over a progression forces
//! either a small box or a common small denominator for all coefficients.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::{exp_sum, Amplitude, Progression};
use crate::numeric::FracMul;
use crate::polycore::{Coeff, MultiIndex, Poly};

/// Default exponent `C_max` in `δ^{−C_max}`.
pub const DEFAULT_C_MAX: f64 = 6.0;

/// Default cap on the exhaustive denominator search.
pub const DEFAULT_MAX_Q: u64 = 1_000_000;

/// `q·λ mod 1` prepared once per coefficient.
#[derive(Debug, Clone, Copy)]
pub(crate) enum TorusMul {
    Real(FracMul),
    Exact { num: i128, den: i128 },
}

impl TorusMul {
    pub(crate) fn new<C: Coeff>(c: &C) -> Self {
        match c.as_rational() {
            Some(r) => TorusMul::Exact { num: *r.numer() as i128, den: *r.denom() as i128 },
            None => TorusMul::Real(FracMul::new(c.to_f64())),
        }
    }

    /// `‖q·λ‖_𝕋`.
    pub(crate) fn at(&self, q: i128) -> f64 {
        let f = match *self {
            TorusMul::Real(ref m) => m.apply(q),
            TorusMul::Exact { num, den } => match num.checked_mul(q) {
                Some(p) => p.rem_euclid(den) as f64 / den as f64,
                None => return f64::NAN,
            },
        };
        f.min(1.0 - f)
    }
}

/// `δ^{−C}`.
pub fn delta_power_bound(delta: f64, c: f64) -> f64 {
    (1.0 / delta).powf(c)
}

pub(crate) fn floor_bound(x: f64) -> u64 {
    let f = (x * (1.0 + 1e-12)).floor();
    if f >= u64::MAX as f64 {
        u64::MAX
    } else {
        f.max(0.0) as u64
    }
}

/// Per-coefficient defect `‖Qλ_α‖·N⃗^α`.
#[derive(Debug, Clone, Serialize)]
pub struct Defect {
    pub alpha: String,
    pub value: f64,
}

/// `Q` with `Q ≤ δ^{−C}` and every defect `≤ δ^{−C}`.
#[derive(Debug, Clone, Serialize)]
pub struct InverseCertificate {
    pub q: u64,
    pub defects: Vec<Defect>,
    pub max_defect: f64,
    /// Smallest exponent with `Q ≤ δ^{−C}` and `max_defect ≤ δ^{−C}`.
    pub c_used: f64,
    pub c_max: f64,
    /// Re-substitution of the stated inequalities.
    pub verified: bool,
    /// The small-box alternative also held; the certificate is preferred.
    pub small_box_also: bool,
}

/// Search exhausted without meeting the bound; signals `C_max` too small at
/// this scale.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub best_q: u64,
    pub best_max_defect: f64,
    pub searched_up_to: u64,
    pub bound: f64,
    pub c_max: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum InverseOutcome {
    /// Some `N_i ≤ δ^{−C_max}` and no certificate was found.
    SmallBox { axis: usize, n: u64, bound: f64 },
    Certificate(InverseCertificate),
    Counterexample(CounterexampleReport),
}

/// Options for [`inverse_verify_with`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InverseOptions {
    pub c_max: f64,
    /// Hard cap on the denominator search on top of `δ^{−C_max}`.
    pub max_q: u64,
    /// Certify only the coefficients of the top degree.
    pub top_degree_only: bool,
}

impl Default for InverseOptions {
    fn default() -> Self {
        InverseOptions { c_max: DEFAULT_C_MAX, max_q: DEFAULT_MAX_Q, top_degree_only: false }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseReport {
    pub delta: f64,
    pub sum_abs: f64,
    pub bound: f64,
    pub searched_up_to: u64,
    /// The search stopped at `max_q` before reaching `δ^{−C_max}`.
    pub capped: bool,
    pub outcome: InverseOutcome,
}

/// Best `Q` for a list of `(α, λ_α)` against weights `N⃗^α`: minimizes the
/// maximal defect over `1..=q_max`, ties to the smaller `Q`.
pub fn best_denominator<C: Coeff>(terms: &[(MultiIndex, C)], ambient: &[f64], q_max: u64) -> (u64, Vec<Defect>, f64) {
    let prepared: Vec<(TorusMul, f64)> = terms
        .iter()
        .map(|(a, c)| (TorusMul::new(c), a.weight(ambient)))
        .collect();
    let mut best = (1u64, f64::INFINITY);
    for q in 1..=q_max.max(1) {
        let mut worst = 0.0f64;
        for (m, w) in &prepared {
            worst = worst.max(m.at(q as i128) * w);
            if worst >= best.1 {
                break;
            }
        }
        if worst < best.1 {
            best = (q, worst);
            if worst == 0.0 {
                break;
            }
        }
    }
    let defects = terms_defects(terms, ambient, best.0);
    let max = defects.iter().map(|d| d.value).fold(0.0, f64::max);
    (best.0, defects, max)
}

/// `‖Qλ_α‖·N⃗^α` for every listed term.
pub fn terms_defects<C: Coeff>(terms: &[(MultiIndex, C)], ambient: &[f64], q: u64) -> Vec<Defect> {
    terms
        .iter()
        .map(|(a, c)| Defect { alpha: a.to_string(), value: TorusMul::new(c).at(q as i128) * a.weight(ambient) })
        .collect()
}

/// Nonconstant terms of `P`.
pub fn nonconstant_terms<C: Coeff>(p: &Poly<C>) -> Vec<(MultiIndex, C)> {
    p.terms().filter(|(a, _)| a.degree() > 0).map(|(a, c)| (a.clone(), c.clone())).collect()
}

/// [`inverse_verify_with`] using the default search cap.
pub fn inverse_verify<C: Coeff>(p: &Poly<C>, prog: &Progression, delta: f64, c_max: f64) -> Result<InverseReport> {
    inverse_verify_with(p, prog, delta, &InverseOptions { c_max, ..InverseOptions::default() })
}

/// Checks `|(1/|N⃗|) Σ_{n∈prog} e(P(n))| ≥ δ` and `σ_i ≤ δ^{−1}`, then searches
/// `Q ≤ δ^{−C_max}` exhaustively. A certificate is preferred over the
/// small-box alternative when both apply.
pub fn inverse_verify_with<C: Coeff>(
    p: &Poly<C>,
    prog: &Progression,
    delta: f64,
    opts: &InverseOptions,
) -> Result<InverseReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(opts.c_max > 0.0) {
        return Err(Error::domain("C_max must be positive"));
    }
    for (i, ax) in prog.axes().iter().enumerate() {
        if ax.gap as f64 > 1.0 / delta * (1.0 + 1e-12) {
            return Err(Error::precondition(format!("axis {i}: gap {} exceeds 1/delta", ax.gap)));
        }
    }
    let sum = exp_sum(p, 1, prog, &Amplitude::one())?;
    if sum.abs < delta {
        return Err(Error::precondition(format!("|sum| = {:.6e} is below delta = {delta}", sum.abs)));
    }
    let bound = delta_power_bound(delta, opts.c_max);
    let full = floor_bound(bound).max(1);
    let searched = full.min(opts.max_q.max(1));
    let ambient: Vec<f64> = prog.ambient().iter().map(|&n| n as f64).collect();
    let mut terms = nonconstant_terms(p);
    if opts.top_degree_only {
        let top = p.degree();
        terms.retain(|(a, _)| a.degree() == top);
    }
    let (q, defects, max_defect) = best_denominator(&terms, &ambient, searched);
    let small = prog.ambient().iter().enumerate().find(|(_, &n)| n as f64 <= bound * (1.0 + 1e-12));
    let tol = bound * (1.0 + 1e-12);
    let outcome = if max_defect <= tol && q as f64 <= tol {
        let log_inv = (1.0 / delta).ln();
        let c_used = ((q as f64).ln().max(max_defect.max(1e-300).ln()) / log_inv).max(0.0);
        let verified = verify_certificate(&terms, &ambient, q, bound);
        InverseOutcome::Certificate(InverseCertificate {
            q,
            defects,
            max_defect,
            c_used,
            c_max: opts.c_max,
            verified,
            small_box_also: small.is_some(),
        })
    } else if let Some((axis, &n)) = small {
        InverseOutcome::SmallBox { axis, n, bound }
    } else {
        InverseOutcome::Counterexample(CounterexampleReport {
            best_q: q,
            best_max_defect: max_defect,
            searched_up_to: searched,
            bound,
            c_max: opts.c_max,
            note: "no denominator met the bound: constants too small at this scale, not a disproof".into(),
        })
    };
    Ok(InverseReport { delta, sum_abs: sum.abs, bound, searched_up_to: searched, capped: searched < full, outcome })
}

/// Recomputes every defect from scratch and checks both inequalities.
pub fn verify_certificate<C: Coeff>(terms: &[(MultiIndex, C)], ambient: &[f64], q: u64, bound: f64) -> bool {
    let tol = bound * (1.0 + 1e-12);
    q as f64 <= tol && terms_defects(terms, ambient, q).iter().all(|d| d.value <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{RatPoly, RealPoly};
    use num_rational::Rational64;

    fn quad<C: Coeff>(c: C) -> Poly<C> {
        Poly::restricted(1, 2, [(MultiIndex::new(vec![2]), c)]).unwrap()
    }

    #[test]
    fn exact_rational_returns_denominator() {
        let p: RatPoly = quad(Rational64::new(2, 7));
        let prog = Progression::full_box(&[10_000]).unwrap();
        let rep = inverse_verify(&p, &prog, 0.1, 6.0).unwrap();
        match rep.outcome {
            InverseOutcome::Certificate(c) => {
                assert_eq!(c.q, 7);
                assert_eq!(c.max_defect, 0.0);
                assert!(c.verified && c.small_box_also);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn near_rational_defect_matches_arithmetic() {
        let eps = 3e-9;
        let p: RealPoly = quad(1.0 / 3.0 + eps);
        let prog = Progression::full_box(&[10_000]).unwrap();
        let rep = inverse_verify(&p, &prog, 0.1, 6.0).unwrap();
        let InverseOutcome::Certificate(c) = rep.outcome else { panic!() };
        assert_eq!(c.q, 3);
        assert!((c.max_defect - 3.0 * eps * 1e8).abs() < 1e-6, "{}", c.max_defect);
    }

    #[test]
    fn small_sum_rejected() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let p: RealPoly = quad(golden);
        let prog = Progression::full_box(&[10_000]).unwrap();
        assert!(matches!(inverse_verify(&p, &prog, 0.1, 6.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn small_c_max_gives_counterexample_or_small_box() {
        let p: RealPoly = quad(1.0 / 7.0 + 1e-6);
        let prog = Progression::full_box(&[1000]).unwrap();
        let rep = inverse_verify(&p, &prog, 0.1, 0.5).unwrap();
        assert!(matches!(rep.outcome, InverseOutcome::Counterexample(_)), "{:?}", rep.outcome);
    }
}
