//! Condensation: many `n ≤ N` with `‖nα₀‖ ≤ ε` force one small `q` with
//! `‖qα₀‖` of order `ε·q/(δN)`.

use serde::Serialize;

use super::inverse::TorusMul;
use crate::error::{Error, Result};
use crate::polycore::Coeff;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CondenseOutcome {
    /// Smallest `q ≤ ⌈1/δ⌉` with `‖qα₀‖ ≤ C·ε·q/(δN)`.
    Found { q: u64, defect: f64, bound: f64 },
    /// No `q` met the bound; the minimizer of `‖qα₀‖/q` is reported.
    NotFound { best_q: u64, best_defect: f64, best_bound: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct CondenseReport {
    pub n: u64,
    pub set_size: usize,
    pub eps: f64,
    pub delta: f64,
    pub constant: f64,
    pub q_max: u64,
    /// Minimizer of `‖qα₀‖/q` over `q ≤ q_max`, ties to the smaller `q`.
    pub argmin_q: u64,
    pub outcome: CondenseOutcome,
}

impl CondenseReport {
    pub fn found_q(&self) -> Option<u64> {
        match self.outcome {
            CondenseOutcome::Found { q, .. } => Some(q),
            CondenseOutcome::NotFound { .. } => None,
        }
    }
}

/// Verifies `H ⊂ [N]`, `|H| ≥ δN` and `‖hα₀‖ ≤ ε` on `H`, then searches
/// `q = 1, …, ⌈1/δ⌉`.
pub fn condense<C: Coeff>(alpha0: &C, set: &[u64], n: u64, eps: f64, delta: f64, constant: f64) -> Result<CondenseReport> {
    if !(delta > 0.0 && delta <= 1.0) || !(eps >= 0.0) || n == 0 {
        return Err(Error::domain("need 0 < delta <= 1, eps >= 0 and N >= 1"));
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() {
        return Err(Error::precondition("H contains repeated elements"));
    }
    if let Some(&h) = sorted.iter().find(|&&h| h == 0 || h > n) {
        return Err(Error::precondition(format!("{h} is outside [1, {n}]")));
    }
    if (sorted.len() as f64) < delta * n as f64 * (1.0 - 1e-12) {
        return Err(Error::precondition(format!("|H| = {} is below delta*N = {}", sorted.len(), delta * n as f64)));
    }
    let m = TorusMul::new(alpha0);
    let tol = eps * (1.0 + 1e-9) + 1e-15;
    if let Some(&h) = sorted.iter().find(|&&h| m.at(h as i128) > tol) {
        return Err(Error::precondition(format!(
            "||{h} alpha0|| = {:.6e} exceeds eps = {eps}",
            m.at(h as i128)
        )));
    }
    let q_max = (1.0 / delta - 1e-9).ceil().max(1.0) as u64;
    let scale = constant * eps / (delta * n as f64);
    let mut argmin = (1u64, f64::INFINITY);
    let mut found = None;
    for q in 1..=q_max {
        let defect = m.at(q as i128);
        if defect / (q as f64) < argmin.1 {
            argmin = (q, defect / q as f64);
        }
        if found.is_none() && defect <= scale * q as f64 * (1.0 + 1e-12) {
            found = Some(CondenseOutcome::Found { q, defect, bound: scale * q as f64 });
        }
    }
    let outcome = found.unwrap_or_else(|| {
        let q = argmin.0;
        CondenseOutcome::NotFound { best_q: q, best_defect: m.at(q as i128), best_bound: scale * q as f64 }
    });
    Ok(CondenseReport {
        n,
        set_size: sorted.len(),
        eps,
        delta,
        constant,
        q_max,
        argmin_q: argmin.0,
        outcome,
    })
}
