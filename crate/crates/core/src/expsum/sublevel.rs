use serde::Serialize;

use super::sum::scaled_phase;
use crate::coeffnorm::coeff_norm;
use crate::error::{Error, Result};
use crate::polycore::{Coeff, Poly, ScaleVec};

/// Largest number of lattice points a sublevel count may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 26;

#[derive(Debug, Clone, Serialize)]
pub struct SmallNormSublevel {
    pub count: u64,
    pub n_value: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LargeNormSublevel {
    pub count: u64,
    pub n_value: f64,
    /// `count / R^D`.
    pub density: f64,
    /// `−log_R(count / R^D)`.
    pub kappa0: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Count `v ∈ [−R, R]^D` with `min_{1≤q≤q_max} ‖q·P(v)‖ ≤ threshold`.
pub fn count_sublevel<C: Coeff>(
    p: &Poly<C>,
    radius: u64,
    q_max: u64,
    threshold: f64,
    budget: u64,
) -> Result<u64> {
    let dim = p.dim();
    let side = 2 * radius + 1;
    let points = (side as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if points > budget as u128 {
        return Err(Error::budget(format!(
            "{points} lattice points exceed the enumeration budget {budget}; use a smaller radius"
        )));
    }
    let tol = threshold * (1.0 + 1e-12) + 1e-15;
    let mut v = vec![0i64; dim];
    let mut count = 0;
    for idx in 0..points as u64 {
        let mut rest = idx;
        for x in v.iter_mut() {
            *x = (rest % side) as i64 - radius as i64;
            rest /= side;
        }
        for q in 1..=q_max as i64 {
            let f = scaled_phase(p, q, &v)?;
            if f.min(1.0 - f) <= tol {
                count += 1;
                break;
            }
        }
    }
    Ok(count)
}

fn norm_at_radius<C: Coeff>(p: &Poly<C>, radius: u64) -> Result<f64> {
    let r = ScaleVec::uniform(p.dim(), radius as f64)?;
    Ok(coeff_norm(p, &r)?.value())
}

/// Count for the small-norm regime against `R^D·A·(N^{−θ} + B^{−θ} + R^{−θ})`.
pub fn sublevel_small_norm<C: Coeff>(
    p: &Poly<C>,
    radius: u64,
    a: u64,
    b: f64,
    theta: f64,
    budget: u64,
) -> Result<SmallNormSublevel> {
    if b < 100.0 {
        return Err(Error::precondition(format!("B = {b} must be at least 100")));
    }
    if a < 1 || radius < 1 {
        return Err(Error::precondition("A and R must be at least 1"));
    }
    let n_value = norm_at_radius(p, radius)?;
    if n_value < 2.0 {
        return Err(Error::precondition(format!("N_R(P) = {n_value} must be at least 2")));
    }
    if a as f64 > n_value.powf(theta) * (1.0 + 1e-12) {
        return Err(Error::precondition(format!(
            "A = {a} exceeds N_R(P)^theta = {}",
            n_value.powf(theta)
        )));
    }
    let count = count_sublevel(p, radius, a, 1.0 / b, budget)?;
    let rf = radius as f64;
    let rhs = rf.powi(p.dim() as i32)
        * a as f64
        * (n_value.powf(-theta) + b.powf(-theta) + rf.powf(-theta));
    Ok(SmallNormSublevel { count, n_value, rhs, ratio: count as f64 / rhs })
}

/// Count for the large-norm regime: `q ≤ R^κ`, threshold `R^{κ−1}`, with
/// reference `R^D·R^κ·(R^{−θη} + R^{−θ})`.
pub fn sublevel_large_norm<C: Coeff>(
    p: &Poly<C>,
    radius: u64,
    kappa: f64,
    eta: f64,
    theta: f64,
    budget: u64,
) -> Result<LargeNormSublevel> {
    if radius < 2 {
        return Err(Error::precondition("R must be at least 2"));
    }
    if !(kappa >= 0.0 && kappa < eta && eta > 0.0) {
        return Err(Error::precondition(format!("need 0 <= kappa < eta, got kappa={kappa}, eta={eta}")));
    }
    let rf = radius as f64;
    let n_value = norm_at_radius(p, radius)?;
    if n_value < rf.powf(eta) {
        return Err(Error::precondition(format!(
            "N_R(P) = {n_value} is below R^eta = {}",
            rf.powf(eta)
        )));
    }
    let q_max = (rf.powf(kappa) * (1.0 + 1e-12)).floor().max(1.0) as u64;
    let count = count_sublevel(p, radius, q_max, rf.powf(kappa - 1.0), budget)?;
    let vol = rf.powi(p.dim() as i32);
    let density = count as f64 / vol;
    let rhs = vol * rf.powf(kappa) * (rf.powf(-theta * eta) + rf.powf(-theta));
    Ok(LargeNormSublevel {
        count,
        n_value,
        density,
        kappa0: -density.ln() / rf.ln(),
        rhs,
        ratio: count as f64 / rhs,
    })
}

#[cfg(test)]
mod tests {
    use num_rational::Rational64;

    use super::*;
    use crate::polycore::{RatPoly, RealPoly};

    #[test]
    fn third_counts_multiples_of_three() {
        let p = RatPoly::univariate(2, &[(2, Rational64::new(1, 3))]).unwrap();
        let r = sublevel_small_norm(&p, 8, 1, 100.0, 0.25, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(r.count, 5);
        assert_eq!(r.n_value, 4.0);
        let f = sublevel_small_norm(&p.to_real(), 8, 1, 100.0, 0.25, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(f.count, 5);
    }

    #[test]
    fn preconditions() {
        let z = RealPoly::zero(1, 2);
        assert!(matches!(sublevel_small_norm(&z, 8, 1, 100.0, 0.25, 1 << 20), Err(Error::Precondition(_))));
        let p = RealPoly::univariate(2, &[(2, 0.3)]).unwrap();
        assert!(sublevel_small_norm(&p, 8, 1, 50.0, 0.25, 1 << 20).is_err());
        let half = RealPoly::univariate(2, &[(2, 0.5)]).unwrap();
        assert!(matches!(
            sublevel_large_norm(&half, 1024, 0.05, 0.5, 0.25, 1 << 20),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(count_sublevel(&p, 1 << 20, 1, 0.1, 1000), Err(Error::Budget(_))));
    }

    #[test]
    fn large_norm_golden() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let p = RealPoly::univariate(2, &[(2, g)]).unwrap();
        let r = sublevel_large_norm(&p, 1024, 0.05, 0.5, 0.25, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!(r.kappa0 > 0.0, "{r:?}");
        let zero_kappa = sublevel_large_norm(&p, 1024, 0.0, 0.5, 0.25, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!(zero_kappa.count >= 1);
    }
}
