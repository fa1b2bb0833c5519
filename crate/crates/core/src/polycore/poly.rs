use std::collections::BTreeMap;

use num_rational::Rational64;

use super::coeff::Coeff;
use super::multiindex::{binomial, MultiIndex};
use crate::error::{Error, Result};
use crate::numeric::{wrap01, CompensatedSum};

/// Sparse polynomial `Σ λ_α x^α` in `D` variables.
///
/// A *restricted* polynomial has every stored exponent in `2 ≤ |α| ≤ d`
/// (no constant or linear part). Shift differences produce unrestricted ones.
/// Terms are kept in graded-lex order and zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<C: Coeff = f64> {
    dim: usize,
    d: u32,
    restricted: bool,
    terms: BTreeMap<MultiIndex, C>,
}

pub type RealPoly = Poly<f64>;
pub type RatPoly = Poly<Rational64>;

impl<C: Coeff> Poly<C> {
    /// The zero polynomial of the restricted class with degree bound `d`.
    pub fn zero(dim: usize, d: u32) -> Self {
        Poly { dim, d, restricted: true, terms: BTreeMap::new() }
    }

    /// Restricted polynomial; every exponent must satisfy `2 ≤ |α| ≤ d`.
    pub fn restricted(dim: usize, d: u32, terms: impl IntoIterator<Item = (MultiIndex, C)>) -> Result<Self> {
        let mut p = Self::zero(dim, d);
        for (a, c) in terms {
            if a.dim() != dim {
                return Err(Error::Dimension { expected: dim, got: a.dim() });
            }
            let deg = a.degree();
            if !(2..=d).contains(&deg) {
                return Err(Error::domain(format!(
                    "exponent {a} has degree {deg}, outside 2..={d}"
                )));
            }
            p.add_term(a, c)?;
        }
        Ok(p)
    }

    /// Polynomial with arbitrary exponents (constant and linear terms allowed).
    pub fn general(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, C)>) -> Result<Self> {
        let mut p = Poly { dim, d: 0, restricted: false, terms: BTreeMap::new() };
        for (a, c) in terms {
            if a.dim() != dim {
                return Err(Error::Dimension { expected: dim, got: a.dim() });
            }
            p.d = p.d.max(a.degree());
            p.add_term(a, c)?;
        }
        Ok(p)
    }

    /// One-variable shorthand: `Σ c_k x^k` from `(k, c_k)` pairs.
    pub fn univariate(d: u32, terms: &[(u32, C)]) -> Result<Self> {
        Self::restricted(1, d, terms.iter().map(|(k, c)| (MultiIndex::new(vec![*k]), c.clone())))
    }

    fn add_term(&mut self, a: MultiIndex, c: C) -> Result<()> {
        let sum = match self.terms.get(&a) {
            Some(old) => old
                .checked_add(&c)
                .ok_or_else(|| Error::Overflow(format!("coefficient of {a}")))?,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&a);
        } else {
            self.terms.insert(a, sum);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Degree bound `d` of the class this polynomial lives in.
    pub fn degree_bound(&self) -> u32 {
        self.d
    }

    /// Actual total degree (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Option<&C> {
        self.terms.get(alpha)
    }

    /// `k·P`.
    pub fn scale_int(&self, k: i64) -> Result<Self> {
        let mut out = Poly { terms: BTreeMap::new(), ..self.clone() };
        for (a, c) in &self.terms {
            let v = c
                .checked_mul_int(k as i128)
                .ok_or_else(|| Error::Overflow(format!("{k} times coefficient of {a}")))?;
            out.add_term(a.clone(), v)?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.neg())).collect(),
            ..self.clone()
        }
    }

    /// The same polynomial with `f64` coefficients.
    pub fn to_real(&self) -> RealPoly {
        Poly {
            dim: self.dim,
            d: self.d,
            restricted: self.restricted,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.to_f64())).collect(),
        }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::Dimension { expected: self.dim, got });
        }
        Ok(())
    }

    /// `P(x)` at a real point, summed in term order with compensation.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        let mut acc = CompensatedSum::new();
        for (a, c) in &self.terms {
            acc.add(c.to_f64() * a.monomial(x));
        }
        Ok(acc.value())
    }

    /// `P(n)` at an integer point.
    pub fn eval_int(&self, n: &[i64]) -> Result<f64> {
        self.check_dim(n.len())?;
        let mut acc = CompensatedSum::new();
        for (a, c) in &self.terms {
            let m = a
                .monomial_int(n)
                .ok_or_else(|| Error::Overflow(format!("monomial {a} at {n:?}")))?;
            acc.add(c.to_f64() * m as f64);
        }
        Ok(acc.value())
    }

    /// `P(n) mod 1` in `[0, 1)`, each term reduced exactly before summing.
    pub fn phase_at(&self, n: &[i64]) -> Result<f64> {
        self.check_dim(n.len())?;
        let mut acc = 0.0;
        for (a, c) in &self.terms {
            let m = a
                .monomial_int(n)
                .ok_or_else(|| Error::Overflow(format!("monomial {a} at {n:?}")))?;
            acc += c.frac_mul(m);
        }
        Ok(wrap01(acc))
    }

    /// `Σ_{α≠0} |λ_α| t^{|α|}`.
    pub fn euclid_coeff_norm(&self, t: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (a, c) in &self.terms {
            let deg = a.degree();
            if deg > 0 {
                acc.add(c.to_f64().abs() * t.powi(deg as i32));
            }
        }
        acc.value()
    }

    /// `n ↦ P(n + h·e_axis) − P(n)` by binomial expansion (axis is 0-based).
    pub fn shift_difference(&self, h: i64, axis: usize) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::domain(format!("axis {axis} out of range for D = {}", self.dim)));
        }
        let mut out: Poly<C> = Poly { dim: self.dim, d: 0, restricted: false, terms: BTreeMap::new() };
        for (a, c) in &self.terms {
            let top = a.exps()[axis];
            for k in 0..top {
                let b = binomial(top, k) as i128;
                let hp = (h as i128)
                    .checked_pow(top - k)
                    .and_then(|p| p.checked_mul(b))
                    .ok_or_else(|| Error::Overflow("binomial expansion".into()))?;
                let v = c
                    .checked_mul_int(hp)
                    .ok_or_else(|| Error::Overflow(format!("coefficient of {a}")))?;
                let mut e = a.exps().to_vec();
                e[axis] = k;
                let beta = MultiIndex::new(e);
                out.d = out.d.max(beta.degree());
                out.add_term(beta, v)?;
            }
        }
        Ok(out)
    }

    /// Drop the constant and linear parts, giving a member of the restricted class.
    pub fn restrict(&self, d: u32) -> Self {
        Poly {
            dim: self.dim,
            d,
            restricted: true,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| (2..=d).contains(&a.degree()))
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }
}

impl RatPoly {
    /// Common denominator of all coefficients (1 for the zero polynomial).
    pub fn common_denominator(&self) -> i64 {
        self.terms
            .values()
            .fold(1i64, |acc, c| num_integer::lcm(acc, *c.denom()))
    }
}

/// `min_n |x − n|`, in `[0, 1/2]`.
pub fn torus_norm(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("torus norm of non-finite value {x}")));
    }
    Ok((x - x.round()).abs())
}
