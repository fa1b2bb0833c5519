//! Van der Corput differencing: the squared average of `e(F)` against the
//! Fejér-weighted averages of the differenced phases.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::fejer;
use crate::numeric::{unit_phase, CompensatedSum, ComplexSum};

/// Both sides of the differencing inequality for one phase sequence.
#[derive(Debug, Clone, Serialize)]
pub struct VdcReport {
    pub len: usize,
    pub h: usize,
    /// `|(1/|I|) Σ_{n∈I} e(F(n))|²`.
    pub lhs_sq: f64,
    /// `Σ_k μ_H(k)·|(1/|I|) Σ_{n∈I∩(I−k)} e(F(n+k) − F(n))| + (H/|I|)²`.
    pub rhs: f64,
    /// `lhs_sq / rhs`.
    pub ratio: f64,
}

/// Evaluates both sides literally for phases `F(n) mod 1` given on `I`.
/// `H = 0` uses the point mass at `k = 0`, the limit of `μ_H` as `H ↓ 1`.
pub fn vdc_difference(phases: &[f64], h: usize) -> Result<VdcReport> {
    let len = phases.len();
    if len == 0 {
        return Err(Error::domain("empty interval"));
    }
    if h > len {
        return Err(Error::domain(format!("H = {h} exceeds |I| = {len}")));
    }
    let l = len as f64;
    let z: Vec<Complex64> = phases.iter().map(|&f| unit_phase(f)).collect();
    let mut total = ComplexSum::new();
    for &w in &z {
        total.add(w);
    }
    let lhs_sq = (total.value() / l).norm_sqr();
    let scale = h.max(1);
    let mut rhs = CompensatedSum::new();
    for k in 0..scale {
        // the k and −k averages are conjugate, so they share one magnitude
        let mut acc = ComplexSum::new();
        for n in 0..len - k {
            acc.add(z[n + k] * z[n].conj());
        }
        let w = fejer(scale as f64, k as f64)? * if k == 0 { 1.0 } else { 2.0 };
        rhs.add(w * (acc.value() / l).norm());
    }
    rhs.add((h as f64 / l).powi(2));
    let rhs = rhs.value();
    Ok(VdcReport { len, h, lhs_sq, rhs, ratio: if rhs > 0.0 { lhs_sq / rhs } else { 0.0 } })
}

/// `(|I| + H − 1)/|I|`, the constant in the sharp form of the inequality.
pub fn vdc_analytic_constant(len: usize, h: usize) -> f64 {
    (len + h.max(1) - 1) as f64 / len as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_phase_ratio_near_one() {
        let r = vdc_difference(&vec![0.25; 256], 16).unwrap();
        assert!((r.lhs_sq - 1.0).abs() < 1e-12);
        assert!((r.ratio - 1.0).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn alternating_phase_is_exactly_zero() {
        let phases: Vec<f64> = (0..512).map(|n| (n % 2) as f64 * 0.5).collect();
        let r = vdc_difference(&phases, 8).unwrap();
        assert_eq!(r.lhs_sq, 0.0);
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn zero_h_reduces_to_trivial_bound() {
        let phases: Vec<f64> = (0..100).map(|n| (n as f64 * 0.377).fract()).collect();
        let r = vdc_difference(&phases, 0).unwrap();
        assert!((r.rhs - 1.0).abs() < 1e-12);
        assert!(r.ratio <= 1.0);
    }
}
