//! Partition of a progression into sub-progressions with gap multiplied by
//! `K` and lengths at most a fraction of the original, plus a remainder.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::{Axis, Progression};

/// Largest number of pieces a rescaling may produce.
pub const DEFAULT_PIECE_BUDGET: usize = 1 << 20;

/// Largest progression verified element by element.
pub const DEFAULT_VERIFY_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, Serialize)]
pub struct RescaleReport {
    pub k: u64,
    pub target: f64,
    /// Run length per axis, `⌊target·L_i⌋`.
    pub run_lengths: Vec<u64>,
    pub pieces: Vec<Progression>,
    /// Disjoint products covering everything outside the pieces.
    pub remainder: Vec<Progression>,
    pub remainder_len: u64,
    pub remainder_fraction: f64,
    pub max_remainder: f64,
    pub within_bound: bool,
    /// Pieces shrink by `target` and their gaps grow by at least `1/target`.
    pub is_delta_rescaling: bool,
}

struct AxisSplit {
    runs: Vec<Axis>,
    /// Union of the runs of each residue class, one progression per class.
    covered: Vec<Axis>,
    leftover: Vec<Axis>,
}

fn split_axis(ax: &Axis, k: u64, m: u64) -> AxisSplit {
    let gap = ax.gap * k as i64;
    let mut out = AxisSplit { runs: Vec::new(), covered: Vec::new(), leftover: Vec::new() };
    for r in 0..k.min(ax.count) {
        let c = (ax.count - r).div_ceil(k);
        let full = c / m;
        let start = ax.start + ax.gap * r as i64;
        for u in 0..full {
            out.runs.push(Axis { start: start + gap * (u * m) as i64, gap, count: m });
        }
        if full > 0 {
            out.covered.push(Axis { start, gap, count: full * m });
        }
        if !c.is_multiple_of(m) {
            out.leftover.push(Axis { start: start + gap * (full * m) as i64, gap, count: c % m });
        }
    }
    out
}

fn product(factors: &[Vec<Axis>], ambient: &[u64], budget: usize) -> Result<Vec<Progression>> {
    let total = factors.iter().try_fold(1usize, |acc, f| acc.checked_mul(f.len()));
    match total {
        Some(t) if t <= budget => {}
        _ => return Err(Error::budget(format!("rescaling produces more than {budget} pieces"))),
    }
    let mut out: Vec<Vec<Axis>> = vec![Vec::new()];
    for f in factors {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                f.iter().map(move |a| {
                    let mut v = prefix.clone();
                    v.push(*a);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(|axes| Progression::new(axes, ambient.to_vec())).collect()
}

/// Splits each axis into residue classes mod `K` (gap `σ_i·K`), cuts every
/// class into runs of `⌊target·L_i⌋` elements, and keeps the products of runs
/// as pieces. Everything else is the remainder.
pub fn rescale(prog: &Progression, k: u64, target: f64, max_remainder: f64) -> Result<RescaleReport> {
    if k == 0 {
        return Err(Error::domain("gap multiplier K must be at least 1"));
    }
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::domain(format!("target must lie in (0, 1], got {target}")));
    }
    let mut splits = Vec::with_capacity(prog.dim());
    let mut run_lengths = Vec::with_capacity(prog.dim());
    for (i, ax) in prog.axes().iter().enumerate() {
        let m = (target * ax.count as f64 * (1.0 + 1e-12)).floor() as u64;
        if m < 1 {
            return Err(Error::domain(format!(
                "axis {i}: target * length = {} is below 1",
                target * ax.count as f64
            )));
        }
        run_lengths.push(m);
        splits.push(split_axis(ax, k, m));
    }
    let ambient = prog.ambient();
    let runs: Vec<Vec<Axis>> = splits.iter().map(|s| s.runs.clone()).collect();
    let pieces = if runs.iter().any(|r| r.is_empty()) { Vec::new() } else { product(&runs, ambient, DEFAULT_PIECE_BUDGET)? };
    let mut remainder = Vec::new();
    for i in 0..prog.dim() {
        if splits[i].leftover.is_empty() || splits[..i].iter().any(|s| s.covered.is_empty()) {
            continue;
        }
        let mut factors: Vec<Vec<Axis>> = splits[..i].iter().map(|s| s.covered.clone()).collect();
        factors.push(splits[i].leftover.clone());
        factors.extend(prog.axes()[i + 1..].iter().map(|a| vec![*a]));
        remainder.extend(product(&factors, ambient, DEFAULT_PIECE_BUDGET)?);
    }
    let remainder_len: u64 = remainder.iter().map(|p| p.len()).sum();
    let remainder_fraction = remainder_len as f64 / prog.len() as f64;
    let is_delta_rescaling = k as f64 * target >= 1.0 - 1e-12;
    Ok(RescaleReport {
        k,
        target,
        run_lengths,
        pieces,
        remainder,
        remainder_len,
        remainder_fraction,
        max_remainder,
        within_bound: remainder_fraction <= max_remainder,
        is_delta_rescaling,
    })
}

fn points(p: &Progression, out: &mut Vec<Vec<i64>>) {
    let mut n = vec![0i64; p.dim()];
    for idx in 0..p.len() {
        p.point(idx, &mut n);
        out.push(n.clone());
    }
}

/// Element-by-element check that pieces and remainder partition `prog`:
/// the sorted multiset of their points equals the points of `prog`.
pub fn verify_partition(prog: &Progression, report: &RescaleReport) -> Result<bool> {
    if prog.len() > DEFAULT_VERIFY_BUDGET {
        return Err(Error::budget(format!("{} points exceed the verification budget", prog.len())));
    }
    let mut want = Vec::with_capacity(prog.len() as usize);
    points(prog, &mut want);
    let mut got = Vec::with_capacity(want.len());
    for p in report.pieces.iter().chain(&report.remainder) {
        if got.len() as u64 + p.len() > prog.len() {
            return Ok(false);
        }
        points(p, &mut got);
    }
    want.sort_unstable();
    got.sort_unstable();
    Ok(want == got)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_partition() {
        let prog = Progression::full_box(&[50]).unwrap();
        let rep = rescale(&prog, 1, 1.0, 0.0).unwrap();
        assert_eq!(rep.pieces, vec![prog.clone()]);
        assert_eq!(rep.remainder_len, 0);
        assert!(verify_partition(&prog, &rep).unwrap() && rep.is_delta_rescaling);
    }

    #[test]
    fn one_dimensional_classes() {
        let prog = Progression::full_box(&[100]).unwrap();
        let rep = rescale(&prog, 3, 0.1, 0.2).unwrap();
        assert_eq!(rep.run_lengths, vec![10]);
        // Classes of sizes 34, 33, 33 give 3 runs each and leftovers 4, 3, 3.
        assert_eq!(rep.pieces.len(), 9);
        assert_eq!(rep.remainder_len, 10);
        assert!(rep.pieces.iter().all(|p| p.axes()[0].gap == 3 && p.len() == 10));
        assert!(verify_partition(&prog, &rep).unwrap());
    }

    #[test]
    fn two_dimensional_product() {
        let prog = Progression::new(
            vec![Axis { start: 2, gap: 2, count: 23 }, Axis { start: 1, gap: 3, count: 17 }],
            vec![60, 60],
        )
        .unwrap();
        let rep = rescale(&prog, 2, 0.25, 1.0).unwrap();
        assert!(verify_partition(&prog, &rep).unwrap());
        assert!(rep.pieces.iter().all(|p| p.axes()[0].gap == 4 && p.axes()[1].gap == 6));
    }

    #[test]
    fn infeasible_target() {
        let prog = Progression::full_box(&[5]).unwrap();
        assert!(rescale(&prog, 1, 0.1, 1.0).is_err());
    }
}
