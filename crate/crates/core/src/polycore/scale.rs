use serde::{Deserialize, Serialize};

use super::coeff::Coeff;
use super::multiindex::MultiIndex;
use super::poly::Poly;
use crate::error::{Error, Result};

/// Per-axis radii `R = (R₁, …, R_D)`, each `≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScaleVec {
    radii: Vec<f64>,
}

impl ScaleVec {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::domain("scale vector must have at least one axis"));
        }
        if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r >= 1.0)) {
            return Err(Error::domain(format!("radius {r} must be finite and >= 1")));
        }
        Ok(ScaleVec { radii })
    }

    /// The same radius on every axis.
    pub fn uniform(dim: usize, r: f64) -> Result<Self> {
        Self::new(vec![r; dim])
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn dim(&self) -> usize {
        self.radii.len()
    }

    /// `R^α`.
    pub fn weight(&self, alpha: &MultiIndex) -> f64 {
        alpha.weight(&self.radii)
    }

    /// `|R| = Π R_i`.
    pub fn volume(&self) -> f64 {
        self.radii.iter().product()
    }

    /// Radii as integers when every radius is integral.
    pub fn integer_radii(&self) -> Option<Vec<u64>> {
        self.radii
            .iter()
            .map(|r| (r.fract() == 0.0 && *r < 9.0e15).then_some(*r as u64))
            .collect()
    }
}

/// One dyadic level set: all `j` with `2^{l−1} ≤ ‖P(2^j·)‖ < 2^l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSet {
    pub level: i64,
    pub scales: Vec<u32>,
}

/// Values of `‖P(2^j·)‖` for `j = 0..=j_max` grouped into dyadic levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleProfile {
    pub values: Vec<(u32, f64)>,
    /// Largest `j ≤ j_max` with value `≤ 1`; `None` if already above 1 at `j = 0`
    /// or the polynomial is zero.
    pub j_lambda: Option<u32>,
    pub level_sets: Vec<LevelSet>,
    /// The polynomial was zero, so every value is 0 and `j_lambda` is undefined.
    pub zero: bool,
}

impl<C: Coeff> Poly<C> {
    pub fn dyadic_scale_profile(&self, j_max: u32) -> Result<ScaleProfile> {
        if j_max < 1 {
            return Err(Error::domain("j_max must be at least 1"));
        }
        let values: Vec<(u32, f64)> = (0..=j_max)
            .map(|j| (j, self.euclid_coeff_norm(2f64.powi(j as i32))))
            .collect();
        if self.is_zero() {
            return Ok(ScaleProfile { values, j_lambda: None, level_sets: Vec::new(), zero: true });
        }
        let j_lambda = values.iter().filter(|(_, v)| *v <= 1.0).map(|(j, _)| *j).max();
        let mut level_sets: Vec<LevelSet> = Vec::new();
        for &(j, v) in &values {
            let level = v.log2().floor() as i64 + 1;
            match level_sets.iter_mut().find(|ls| ls.level == level) {
                Some(ls) => ls.scales.push(j),
                None => level_sets.push(LevelSet { level, scales: vec![j] }),
            }
        }
        Ok(ScaleProfile { values, j_lambda, level_sets, zero: false })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::RealPoly;

    #[test]
    fn scale_vec_validation() {
        assert!(ScaleVec::new(vec![0.5]).is_err());
        assert!(ScaleVec::new(vec![]).is_err());
        let r = ScaleVec::new(vec![2.0, 3.0]).unwrap();
        assert_eq!(r.volume(), 6.0);
        assert_eq!(r.weight(&MultiIndex::new(vec![2, 1])), 12.0);
        assert_eq!(r.integer_radii(), Some(vec![2, 3]));
    }

    #[test]
    fn single_monomial_profile() {
        let p = RealPoly::univariate(2, &[(2, 1.0)]).unwrap();
        let prof = p.dyadic_scale_profile(6).unwrap();
        for (j, v) in &prof.values {
            assert_eq!(*v, 4f64.powi(*j as i32));
        }
        assert!(prof.level_sets.iter().all(|ls| ls.scales.len() == 1));
        assert_eq!(prof.j_lambda, Some(0));
    }

    #[test]
    fn j_lambda_example() {
        let p = RealPoly::univariate(2, &[(2, 2f64.powi(-10))]).unwrap();
        assert_eq!(p.dyadic_scale_profile(12).unwrap().j_lambda, Some(5));
        let big = RealPoly::univariate(2, &[(2, 3.0)]).unwrap();
        assert_eq!(big.dyadic_scale_profile(3).unwrap().j_lambda, None);
    }

    #[test]
    fn zero_profile_is_flagged() {
        let prof = RealPoly::zero(1, 2).dyadic_scale_profile(4).unwrap();
        assert!(prof.zero && prof.j_lambda.is_none());
        assert!(prof.values.iter().all(|(_, v)| *v == 0.0));
    }
}
