//! Classification of `(x, k)` pairs into stationary, oscillatory and error
//! pieces according to the coefficient norm `N_{2^k}(P_{λ(x)})`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coeffnorm::coeff_norm_capped;
use crate::error::{Error, Result};
use crate::polycore::{RealPoly, ScaleVec};

/// Default `A₀`.
pub const DEFAULT_A0: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum PieceClass {
    /// `N ≤ 1`.
    Stationary,
    /// `1 < N = 2^s ≤ k^{A₀}`, assigned to `𝒜_s`.
    Oscillatory { s: i64 },
    /// `N > k^{A₀}`, assigned to `ℰ_k`. `s` is `None` when it exceeds the
    /// search cap, which is itself above `k^{A₀}`.
    Error { s: Option<i64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitRow {
    pub x: usize,
    pub k: u32,
    pub s0: Option<i64>,
    pub class: PieceClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitReport {
    pub k_max: u32,
    pub a0: f64,
    /// Levels above `2^cap` are not resolved.
    pub cap: u32,
    pub rows: Vec<SplitRow>,
    pub stationary: usize,
    pub oscillatory: usize,
    pub error: usize,
    /// Every pair carries exactly one class.
    pub partition_ok: bool,
    /// `{k : N_{2^k} = 2^s}` is an interval for every resolved `s`.
    pub intervals_ok: bool,
    /// Each level `s ≤ 0` occurs for at most one `k`.
    pub nonpositive_once_ok: bool,
}

/// Classifies every `(x, k)` with `k = 1..=k_max` for the tabulated
/// polynomials `λ(x)` at scale `R = 2^k`.
pub fn split_as_ek(table: &[RealPoly], k_max: u32, a0: f64) -> Result<SplitReport> {
    if k_max == 0 || k_max > 40 {
        return Err(Error::domain(format!("k_max must lie in 1..=40, got {k_max}")));
    }
    if !(a0 > 0.0) {
        return Err(Error::domain("A0 must be positive"));
    }
    let cap = (a0 * (k_max as f64).log2()).ceil().max(1.0) as u32;
    let mut rows = Vec::with_capacity(table.len() * k_max as usize);
    let mut intervals_ok = true;
    let mut nonpositive_once_ok = true;
    for (x, p) in table.iter().enumerate() {
        let mut seen: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
        for k in 1..=k_max {
            let r = ScaleVec::uniform(p.dim(), 2f64.powi(k as i32))?;
            let (s0, resolved) = match coeff_norm_capped(p, &r, cap) {
                Ok(n) => (n.s0, true),
                Err(Error::Budget(_)) => (None, false),
                Err(e) => return Err(e),
            };
            let threshold = (k as f64).powf(a0);
            let class = match (resolved, s0) {
                (false, _) => PieceClass::Error { s: None },
                (true, None) => PieceClass::Stationary,
                (true, Some(s)) if s <= 0 => PieceClass::Stationary,
                (true, Some(s)) if 2f64.powi(s as i32) <= threshold => PieceClass::Oscillatory { s },
                (true, Some(s)) => PieceClass::Error { s: Some(s) },
            };
            if let Some(s) = s0.filter(|_| resolved) {
                seen.entry(s).or_default().push(k);
            }
            rows.push(SplitRow { x, k, s0: if resolved { s0 } else { None }, class });
        }
        for (s, ks) in &seen {
            if ks.windows(2).any(|w| w[1] != w[0] + 1) {
                intervals_ok = false;
            }
            if *s <= 0 && ks.len() > 1 {
                nonpositive_once_ok = false;
            }
        }
    }
    let count = |f: fn(&PieceClass) -> bool| rows.iter().filter(|r| f(&r.class)).count();
    let stationary = count(|c| matches!(c, PieceClass::Stationary));
    let oscillatory = count(|c| matches!(c, PieceClass::Oscillatory { .. }));
    let error = count(|c| matches!(c, PieceClass::Error { .. }));
    Ok(SplitReport {
        k_max,
        a0,
        cap,
        partition_ok: stationary + oscillatory + error == table.len() * k_max as usize,
        rows,
        stationary,
        oscillatory,
        error,
        intervals_ok,
        nonpositive_once_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::MultiIndex;

    fn quad(c: f64) -> RealPoly {
        RealPoly::restricted(1, 2, [(MultiIndex::new(vec![2]), c)]).unwrap()
    }

    #[test]
    fn small_denominator_stays_stationary_then_jumps() {
        let rep = split_as_ek(&[quad(1e-7)], 12, DEFAULT_A0).unwrap();
        let classes: Vec<_> = rep.rows.iter().map(|r| r.class).collect();
        assert!(classes[..8].iter().all(|c| *c == PieceClass::Stationary));
        assert!(rep.intervals_ok && rep.nonpositive_once_ok && rep.partition_ok);
    }

    #[test]
    fn badly_approximable_enters_error_class_early() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let rep = split_as_ek(&[quad(golden)], 12, 1.0).unwrap();
        let first_error = rep.rows.iter().position(|r| matches!(r.class, PieceClass::Error { .. }));
        assert!(first_error.is_some_and(|i| i < 4), "{:?}", rep.rows);
        assert!(rep.intervals_ok);
    }
}
