//! The glued approximation `L_{j,λ}` to `m_{j,λ}` and its major-arc error.

use num_complex::Complex64;
use num_integer::Integer;
use rand::Rng;
use serde::Serialize;

use super::gauss::{gauss_sum, RationalPoint};
use super::multiplier::{centred, in_phi_window, multiplier_m, multiplier_phi, offset_beta, offset_poly, DEFAULT_PHI_NODES};
use crate::carleson::DyadicKernelFamily;
use crate::error::{Error, Result};
use crate::numeric::{fit_line, max_of, median, ComplexSum};
use crate::polycore::{Coeff, IndexSet, RealPoly};
use crate::sampling::rng_for;

/// Default `ρ` in the `χ_s` window `2^{−2^{10ρs}}`.
pub const DEFAULT_RHO: f64 = 0.1;
/// Default `ε₀`.
pub const DEFAULT_EPS0: f64 = 1.0 / 1024.0;
/// Largest `s` for which `{A/Q : Q ∼ 2^s}` is enumerated.
pub const DEFAULT_S_CAP: u32 = 6;

/// Knobs of the approximation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MajorParams {
    pub a0: f64,
    pub rho: f64,
    pub eps0: f64,
    pub s_cap: u32,
}

impl Default for MajorParams {
    fn default() -> Self {
        MajorParams { a0: crate::carleson::DEFAULT_A0, rho: DEFAULT_RHO, eps0: DEFAULT_EPS0, s_cap: DEFAULT_S_CAP }
    }
}

/// One-dimensional profile: 1 on `u ≤ 1`, 0 on `u ≥ 10`, a degree-7
/// smoothstep in between.
pub fn chi_profile(u: f64) -> f64 {
    if u <= 1.0 {
        1.0
    } else if u >= 10.0 {
        0.0
    } else {
        let t = (u - 1.0) / 9.0;
        let t4 = t * t * t * t;
        1.0 - t4 * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t)
    }
}

/// Window half-width `2^{−2^{10ρs}}`.
pub fn chi_width(s: u32, rho: f64) -> f64 {
    2f64.powf(-(2f64.powf(10.0 * rho * s as f64)))
}

/// `χ_s(β) = Π_i profile(|β_i| / w_s)`.
pub fn chi_s(s: u32, rho: f64, beta: &[f64]) -> f64 {
    let w = chi_width(s, rho);
    beta.iter()
        .map(|&b| {
            let b = b.abs();
            if b <= w {
                1.0
            } else if b >= 10.0 * w {
                0.0
            } else {
                chi_profile(b / w)
            }
        })
        .product()
}

/// One summand of `L_{j,λ}(β)`.
#[derive(Debug, Clone, Serialize)]
pub struct LTerm {
    pub s: u32,
    pub point: RationalPoint,
    pub gauss: Complex64,
    pub gauss_zero: bool,
    pub phi: Complex64,
    pub chi: f64,
    pub value: Complex64,
}

/// Value of `L_{j,λ}(β)` with its nonzero contributions.
#[derive(Debug, Clone, Serialize)]
pub struct LReport {
    pub value: Complex64,
    /// Terms inside both windows with a nonzero Gauss sum.
    pub terms: Vec<LTerm>,
    /// Largest `s` summed.
    pub s_top: u32,
    /// `j^{A₀}` exceeds `2^{s_cap}`, so some levels were not enumerated.
    pub truncated: bool,
}

impl LReport {
    pub fn contributing(&self) -> usize {
        self.terms.len()
    }
}

/// Integers `A` with `|x − A/Q|` (mod 1) at most `w`, as residues mod `Q`.
fn residues_near(x: f64, q: u64, w: f64) -> Vec<i64> {
    if w >= 0.5 {
        return (0..q as i64).collect();
    }
    let lo = ((x - w) * q as f64).ceil() as i64;
    let hi = ((x + w) * q as f64).floor() as i64;
    let mut out: Vec<i64> = (lo..=hi)
        .map(|a| a.rem_euclid(q as i64))
        .filter(|&a| centred(x - a as f64 / q as f64).abs() <= w)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn cartesian(lists: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for l in lists {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for prefix in &out {
            for &v in l {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// `L_{j,λ}(β) = Σ_{s: 2^s ≤ j^{A₀}} Σ_{A/Q: Q∼2^s} Σ_B S(A/Q,B/Q) Φ*_{j,λ−A/Q}(β−B/Q) χ_s(β−B/Q)`,
/// enumerating only reduced `A/Q` and only terms inside both windows.
pub fn assemble_l(
    family: &DyadicKernelFamily,
    j: u32,
    lambda: &RealPoly,
    beta: &[f64],
    params: &MajorParams,
) -> Result<LReport> {
    let dim = family.dim();
    if lambda.dim() != dim || beta.len() != dim {
        return Err(Error::Dimension { expected: dim, got: beta.len() });
    }
    let d = lambda.degree_bound();
    let set = IndexSet::new(d, dim);
    let jp = (j as f64).powf(params.a0);
    let s_full = jp.log2().floor().max(0.0) as u32;
    let s_top = s_full.min(params.s_cap);
    let lam: Vec<f64> = set.members().iter().map(|a| lambda.coeff(a).map_or(0.0, |c| c.to_f64())).collect();
    let windows: Vec<f64> = set.members().iter().map(|a| jp * 2f64.powi(-((j * a.degree()) as i32))).collect();
    let mut acc = ComplexSum::new();
    let mut terms = Vec::new();
    for s in 0..=s_top {
        let (q_lo, q_hi) = if s == 0 { (1, 1) } else { ((1u64 << (s - 1)) + 1, 1u64 << s) };
        let w_chi = 10.0 * chi_width(s, params.rho);
        for q in q_lo..=q_hi {
            let a_lists: Vec<Vec<i64>> = lam.iter().zip(&windows).map(|(&l, &w)| residues_near(l, q, w)).collect();
            if a_lists.iter().any(|l| l.is_empty()) {
                continue;
            }
            let b_lists: Vec<Vec<i64>> = beta.iter().map(|&b| residues_near(b, q, w_chi)).collect();
            if b_lists.iter().any(|l| l.is_empty()) {
                continue;
            }
            let b_all = cartesian(&b_lists);
            for a in cartesian(&a_lists) {
                if a.iter().fold(q as i64, |g, &v| g.gcd(&v)) != 1 {
                    continue;
                }
                for b in &b_all {
                    let point = RationalPoint::new(d, dim, q, a.clone(), b.clone())?;
                    let nu = offset_poly(lambda, &point)?;
                    if !in_phi_window(j, &nu, params.a0) {
                        continue;
                    }
                    let eta = offset_beta(beta, &point);
                    let chi = chi_s(s, params.rho, &eta);
                    if chi == 0.0 {
                        continue;
                    }
                    let g = gauss_sum(&point)?;
                    if g.exact_zero {
                        continue;
                    }
                    let phi = multiplier_phi(family, j, &nu, &eta, DEFAULT_PHI_NODES)?.value;
                    let value = g.value * phi * chi;
                    acc.add(value);
                    terms.push(LTerm { s, point, gauss: g.value, gauss_zero: g.exact_zero, phi, chi, value });
                }
            }
        }
    }
    Ok(LReport { value: acc.value(), terms, s_top, truncated: s_full > params.s_cap })
}

/// Parameters of the major-arc error sweep on the line.
#[derive(Debug, Clone, Serialize)]
pub struct MajorSweepParams {
    pub d: u32,
    pub j_values: Vec<u32>,
    pub samples: usize,
    /// Denominators of the sampled centres are drawn from `1..=q_max`.
    pub q_max: u64,
    pub major: MajorParams,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MajorRow {
    pub j: u32,
    pub samples: usize,
    pub max_error: f64,
    pub median_error: f64,
    pub max_m: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MajorSweep {
    pub params: MajorSweepParams,
    pub rows: Vec<MajorRow>,
    /// `−slope` of `log₂(max error)` against `j`.
    pub rate: Option<f64>,
    /// `rate / ε₀`, the constant `c₀` in `2^{−c₀ε₀j}`.
    pub c0: Option<f64>,
    /// Number of `j` whose max error does not exceed that of the previous
    /// `j` (the first `j` counts when it is at least the second).
    pub monotone_count: usize,
}

/// Draws `λ = A/Q + ε` with `|ε_α| ≤ 2^{−j|α|}` and `β = B/Q + η` with
/// `|η_i| ≤ 2^{(ε₀−1)j}`, then measures `max |m_{j,λ}(β) − L_{j,λ}(β)|`.
pub fn major_arc_sweep(family: &DyadicKernelFamily, params: &MajorSweepParams) -> Result<MajorSweep> {
    let dim = family.dim();
    let set = IndexSet::new(params.d, dim);
    let mut rows = Vec::new();
    for (ji, &j) in params.j_values.iter().enumerate() {
        if j > family.j_max() {
            return Err(Error::domain(format!("scale {j} exceeds the family's j_max {}", family.j_max())));
        }
        let mut rng = rng_for(params.seed, ji as u64);
        let mut errors = Vec::with_capacity(params.samples);
        let mut max_m: f64 = 0.0;
        for _ in 0..params.samples {
            let q = rng.gen_range(1..=params.q_max.max(1));
            let a: Vec<i64> = loop {
                let a: Vec<i64> = (0..set.len()).map(|_| rng.gen_range(0..q as i64)).collect();
                if a.iter().fold(q as i64, |g, &v| g.gcd(&v)) == 1 {
                    break a;
                }
            };
            let terms = set.members().iter().zip(&a).map(|(alpha, &av)| {
                let eps = rng.gen_range(-1.0..1.0) * 2f64.powi(-((j * alpha.degree()) as i32));
                (alpha.clone(), (av as f64 / q as f64 + eps).rem_euclid(1.0))
            });
            let lambda = RealPoly::restricted(dim, params.d, terms.collect::<Vec<_>>())?;
            let spread = 2f64.powf((params.major.eps0 - 1.0) * j as f64);
            let beta: Vec<f64> = (0..dim)
                .map(|_| (rng.gen_range(0..q) as f64 / q as f64 + rng.gen_range(-1.0..1.0) * spread).rem_euclid(1.0))
                .collect();
            let m = multiplier_m(family, j, &lambda, &beta)?;
            let l = assemble_l(family, j, &lambda, &beta, &params.major)?;
            max_m = max_m.max(m.norm());
            errors.push((m - l.value).norm());
        }
        rows.push(MajorRow { j, samples: errors.len(), max_error: max_of(&errors), median_error: median(&errors), max_m });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        rows.iter().filter(|r| r.max_error > 0.0).map(|r| (r.j as f64, r.max_error.log2())).unzip();
    let rate = fit_line(&xs, &ys).map(|(slope, _)| -slope);
    let mut monotone_count = 0;
    for i in 0..rows.len() {
        let ok = if i == 0 {
            rows.len() > 1 && rows[0].max_error >= rows[1].max_error
        } else {
            rows[i].max_error <= rows[i - 1].max_error
        };
        monotone_count += usize::from(ok);
    }
    Ok(MajorSweep { params: params.clone(), rows, c0: rate.map(|r| r / params.major.eps0), rate, monotone_count })
}
