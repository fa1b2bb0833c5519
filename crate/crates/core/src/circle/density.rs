//! Diagonal `TT*` kernel averages `Q^{−D} Σ_r e(−P_{A/Q}(v+r) + P_{A′/Q}(r))`
//! and the density of their large values.

use serde::Serialize;

use super::gauss::{RationalPoint, ResidueTable};
use crate::coeffnorm::coeff_norm;
use crate::error::{Error, Result};
use crate::numeric::{unit_phase, ComplexSum};
use crate::polycore::ScaleVec;

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub q: u64,
    pub threshold: f64,
    /// `|average(v)|` for every `v ∈ [0,Q)^D`, axis 0 slowest.
    pub magnitudes: Vec<f64>,
    pub max: f64,
    /// `#{v : |average(v)| > threshold} / Q^D`.
    pub density: f64,
    /// Largest value outside the exceptional set.
    pub max_off: f64,
    /// `s` with `Q ∼ 2^s`.
    pub s: u32,
    /// `log₂ N_Q(P_{A/Q})`; `None` when the norm is zero.
    pub norm_level: Option<i64>,
    /// `N_Q(P_{A/Q}) ≥ 2^{s−1}`.
    pub hypothesis_holds: bool,
}

/// Exact per-`v` averages for two numerator tuples over the same `Q`.
/// The `B` parts of both points are ignored.
pub fn kernel_k0_density(a: &RationalPoint, a2: &RationalPoint, threshold: f64) -> Result<DensityReport> {
    if a.q != a2.q || a.d != a2.d || a.dim != a2.dim {
        return Err(Error::domain("both points need the same Q, d and D"));
    }
    let q = a.q;
    let table = ResidueTable::new(a.d, a.dim, q)?;
    let points = table.points();
    if (points as u128).pow(2) > super::gauss::DEFAULT_RESIDUE_BUDGET as u128 {
        return Err(Error::budget("Q^{2D} exceeds the residue budget"));
    }
    let pa = table.poly_residues(&a.a);
    let pb = table.poly_residues(&a2.a);
    let dim = a.dim;
    let qu = q as usize;
    let mut v = vec![0usize; dim];
    let mut r = vec![0usize; dim];
    let mut magnitudes = Vec::with_capacity(points);
    for vi in 0..points {
        unravel(vi, qu, &mut v);
        let mut hist = vec![0i64; qu];
        for ri in 0..points {
            unravel(ri, qu, &mut r);
            let mut idx = 0usize;
            for k in 0..dim {
                idx = idx * qu + (v[k] + r[k]) % qu;
            }
            // e(−P_A(v+r) + P_{A′}(r)) = ζ^{P_A(v+r) − P_{A′}(r)}
            hist[((pa[idx] + q - pb[ri]) % q) as usize] += 1;
        }
        let mut acc = ComplexSum::new();
        for (k, &c) in hist.iter().enumerate() {
            if c != 0 {
                acc.add(unit_phase(-(k as f64) / q as f64) * c as f64);
            }
        }
        magnitudes.push(acc.value().norm() / points as f64);
    }
    let max = magnitudes.iter().copied().fold(0.0, f64::max);
    let exceptional = magnitudes.iter().filter(|&&m| m > threshold).count();
    let max_off = magnitudes.iter().copied().filter(|&m| m <= threshold).fold(0.0, f64::max);
    let s = if q <= 1 { 0 } else { 64 - (q - 1).leading_zeros() };
    let norm = coeff_norm(&a.poly()?, &ScaleVec::uniform(dim, q as f64)?)?;
    let hypothesis_holds = norm.s0.is_some_and(|s0| s0 >= s as i64 - 1);
    Ok(DensityReport {
        q,
        threshold,
        max,
        density: exceptional as f64 / points as f64,
        max_off,
        s,
        norm_level: norm.s0,
        hypothesis_holds,
        magnitudes,
    })
}

fn unravel(mut idx: usize, q: usize, out: &mut [usize]) {
    for k in (0..out.len()).rev() {
        out[k] = idx % q;
        idx /= q;
    }
}
