use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::progression::{Amplitude, Progression};
use crate::error::{Error, Result};
use crate::numeric::{unit_phase, wrap01, ComplexSum};
use crate::polycore::{Coeff, Poly};

/// Default number of contiguous blocks a sum is split into. Results depend on
/// this number, never on the worker count.
pub const DEFAULT_PARTITIONS: usize = 16;

/// Fejér weight `(1/K)(1 − |s|/K)₊`.
pub fn fejer(k: f64, s: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::domain(format!("Fejér scale must be positive, got {k}")));
    }
    Ok((1.0 / k) * (1.0 - s.abs() / k).max(0.0))
}

/// Constant `c` with `𝟙{‖β‖ ≤ 1/B} ≤ c·Σ_k μ_K(k) e(kβ)` for `K = ⌊B/2⌋`.
pub const FEJER_MAJORANT_CONST: f64 = std::f64::consts::PI * std::f64::consts::PI / 4.0;

/// `c·Σ_k μ_K(k) e(kβ)` with `K = ⌊B/2⌋`; real and nonnegative, and at least 1
/// wherever `‖β‖ ≤ 1/B`.
pub fn fejer_majorant(b: u64, beta: f64) -> Result<f64> {
    if b < 2 {
        return Err(Error::domain("majorant needs B >= 2"));
    }
    let k = (b / 2) as i64;
    let mut acc = 0.0;
    for s in -(k - 1)..k {
        acc += fejer(k as f64, s as f64)? * unit_phase(s as f64 * beta).re;
    }
    Ok(FEJER_MAJORANT_CONST * acc)
}

/// Normalized exponential sum with bookkeeping for reproducibility.
#[derive(Debug, Clone, Serialize)]
pub struct SumReport {
    pub value: Complex64,
    pub abs: f64,
    pub n_terms: u64,
    pub normalization: f64,
    /// Traversal order: linear index with axis 0 slowest, blocks summed in order.
    pub order: &'static str,
    pub partitions: usize,
}

/// `k·P(n) mod 1`, each monomial reduced exactly before summing.
#[inline]
pub fn scaled_phase<C: Coeff>(p: &Poly<C>, k: i64, n: &[i64]) -> Result<f64> {
    let mut acc = 0.0;
    for (a, c) in p.terms() {
        let m = a
            .monomial_int(n)
            .and_then(|m| m.checked_mul(k as i128))
            .ok_or_else(|| Error::Overflow(format!("monomial {a} at {n:?}")))?;
        acc += c.frac_mul(m);
    }
    Ok(wrap01(acc))
}

/// `(1/|N|) Σ_{n∈prog} e(k·P(n)) φ(n)` with the ambient-box normalization.
pub fn exp_sum<C: Coeff>(p: &Poly<C>, k: i64, prog: &Progression, amp: &Amplitude) -> Result<SumReport> {
    exp_sum_with(p, k, prog, amp, prog.ambient_volume(), DEFAULT_PARTITIONS)
}

/// As [`exp_sum`] with an explicit normalization and block count.
pub fn exp_sum_with<C: Coeff>(
    p: &Poly<C>,
    k: i64,
    prog: &Progression,
    amp: &Amplitude,
    normalization: f64,
    partitions: usize,
) -> Result<SumReport> {
    if p.dim() != prog.dim() {
        return Err(Error::Dimension { expected: p.dim(), got: prog.dim() });
    }
    let total = prog.len();
    let parts = partitions.max(1) as u64;
    let block = total.div_ceil(parts).max(1);
    let blocks: Vec<Result<ComplexSum>> = (0..parts)
        .into_par_iter()
        .map(|b| {
            let lo = (b * block).min(total);
            let hi = ((b + 1) * block).min(total);
            let mut acc = ComplexSum::new();
            let mut n = vec![0i64; prog.dim()];
            for idx in lo..hi {
                prog.point(idx, &mut n);
                let ph = scaled_phase(p, k, &n)?;
                acc.add(unit_phase(ph) * amp.at(&n));
            }
            Ok(acc)
        })
        .collect();
    let mut acc = ComplexSum::new();
    for b in blocks {
        acc.merge(&b?);
    }
    let value = acc.value() / normalization;
    Ok(SumReport {
        value,
        abs: value.norm(),
        n_terms: total,
        normalization,
        order: "lex-axis0-slowest",
        partitions: parts as usize,
    })
}

/// `(1/|N|) Σ_{n∈prog} φ(n)`.
pub fn amplitude_mean(prog: &Progression, amp: &Amplitude) -> f64 {
    let mut acc = crate::numeric::CompensatedSum::new();
    let mut n = vec![0i64; prog.dim()];
    for idx in 0..prog.len() {
        prog.point(idx, &mut n);
        acc.add(amp.at(&n));
    }
    acc.value() / prog.ambient_volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::RealPoly;

    fn direct(lam: f64, n: i64) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for m in 1..=n {
            let x = lam * (m * m) as f64;
            z += Complex64::from_polar(1.0, std::f64::consts::TAU * x);
        }
        z / n as f64
    }

    #[test]
    fn fejer_examples() {
        assert_eq!(fejer(4.0, 0.0).unwrap(), 0.25);
        assert_eq!(fejer(4.0, 2.0).unwrap(), 0.125);
        assert_eq!(fejer(4.0, 5.0).unwrap(), 0.0);
        assert!(fejer(0.0, 1.0).is_err());
        for k in 1..=64 {
            let total: f64 = (-k..=k).map(|s| fejer(k as f64, s as f64).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12, "K={k}");
        }
    }

    #[test]
    fn majorant_dominates_indicator() {
        for b in [2u64, 3, 10, 100, 1000] {
            for i in 0..1000 {
                let beta = -0.5 + i as f64 / 1000.0;
                let m = fejer_majorant(b, beta).unwrap();
                assert!(m >= -1e-12);
                if beta.abs() <= 1.0 / b as f64 {
                    assert!(m >= 1.0 - 1e-12, "B={b} beta={beta} m={m}");
                }
            }
        }
    }

    #[test]
    fn zero_phase_full_box() {
        let p = RealPoly::zero(1, 2);
        let prog = Progression::full_box(&[37]).unwrap();
        let r = exp_sum(&p, 1, &prog, &Amplitude::one()).unwrap();
        assert_eq!(r.value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn alternating_sum_vanishes() {
        let p = RealPoly::univariate(2, &[(2, 0.5)]).unwrap();
        let prog = Progression::full_box(&[64]).unwrap();
        let r = exp_sum(&p, 1, &prog, &Amplitude::one()).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn quarter_matches_direct_sum() {
        let p = RealPoly::univariate(2, &[(2, 0.25)]).unwrap();
        let prog = Progression::full_box(&[8]).unwrap();
        let r = exp_sum(&p, 1, &prog, &Amplitude::one()).unwrap();
        // n² mod 4 is 1,0,1,0,… so e(n²/4) = i, 1, i, 1, …
        assert_eq!(r.value, Complex64::new(0.5, 0.5));
        assert!((r.value - direct(0.25, 8)).norm() < 1e-12);
        let q = RealPoly::univariate(2, &[(2, 0.137)]).unwrap();
        let prog = Progression::full_box(&[500]).unwrap();
        let r = exp_sum(&q, 1, &prog, &Amplitude::one()).unwrap();
        assert!((r.value - direct(0.137, 500)).norm() < 1e-10);
    }

    #[test]
    fn partition_count_is_recorded() {
        let p = RealPoly::univariate(3, &[(2, 0.3), (3, 0.01)]).unwrap();
        let prog = Progression::full_box(&[1000]).unwrap();
        let a = exp_sum_with(&p, 1, &prog, &Amplitude::one(), 1000.0, 1).unwrap();
        let b = exp_sum_with(&p, 1, &prog, &Amplitude::one(), 1000.0, 7).unwrap();
        assert_eq!(b.partitions, 7);
        assert!((a.value - b.value).norm() < 1e-13);
    }
}
