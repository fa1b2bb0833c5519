use std::fmt::Debug;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::{wrap01, FracMul};

/// A coefficient as written in JSON or inline syntax.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoeffLiteral {
    Real(f64),
    Ratio(i64, i64),
}

/// Coefficient arithmetic needed by polynomials: real (`f64`) or exact
/// rational (`Rational64`).
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    fn checked_add(&self, other: &Self) -> Option<Self>;
    fn checked_mul_int(&self, k: i128) -> Option<Self>;
    fn neg(&self) -> Self;
    /// Fractional part of `self·m`, in `[0, 1)`.
    fn frac_mul(&self, m: i128) -> f64;
    fn from_literal(lit: CoeffLiteral) -> Result<Self>;
    fn to_literal(&self) -> CoeffLiteral;
    /// `Some(self)` as an exact rational when the mode is exact.
    fn as_rational(&self) -> Option<Rational64>;

    /// `‖q·self‖_𝕋`.
    fn torus_mul(&self, q: i128) -> f64 {
        let f = self.frac_mul(q);
        f.min(1.0 - f)
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn checked_mul_int(&self, k: i128) -> Option<Self> {
        Some(self * k as f64)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn frac_mul(&self, m: i128) -> f64 {
        FracMul::new(*self).apply(m)
    }
    fn from_literal(lit: CoeffLiteral) -> Result<Self> {
        match lit {
            CoeffLiteral::Real(x) if x.is_finite() => Ok(x),
            CoeffLiteral::Real(x) => Err(Error::Parse(format!("non-finite coefficient {x}"))),
            CoeffLiteral::Ratio(_, 0) => Err(Error::Parse("zero denominator".into())),
            CoeffLiteral::Ratio(n, d) => Ok(n as f64 / d as f64),
        }
    }
    fn to_literal(&self) -> CoeffLiteral {
        CoeffLiteral::Real(*self)
    }
    fn as_rational(&self) -> Option<Rational64> {
        None
    }
}

impl Coeff for Rational64 {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        num_traits::CheckedAdd::checked_add(self, other)
    }
    fn checked_mul_int(&self, k: i128) -> Option<Self> {
        let k = i64::try_from(k).ok()?;
        num_traits::CheckedMul::checked_mul(self, &Rational64::from_integer(k))
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn frac_mul(&self, m: i128) -> f64 {
        let num = *self.numer() as i128;
        let den = *self.denom() as i128;
        match num.checked_mul(m) {
            Some(p) => p.rem_euclid(den) as f64 / den as f64,
            None => wrap01(Coeff::to_f64(self) * m as f64),
        }
    }
    fn from_literal(lit: CoeffLiteral) -> Result<Self> {
        match lit {
            CoeffLiteral::Ratio(_, 0) => Err(Error::Parse("zero denominator".into())),
            CoeffLiteral::Ratio(n, d) => Ok(Rational64::new(n, d)),
            CoeffLiteral::Real(x) if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 => {
                Ok(Rational64::from_integer(x as i64))
            }
            CoeffLiteral::Real(x) => Err(Error::Parse(format!(
                "coefficient {x} is not an exact rational; use num/den"
            ))),
        }
    }
    fn to_literal(&self) -> CoeffLiteral {
        CoeffLiteral::Ratio(*self.numer(), *self.denom())
    }
    fn as_rational(&self) -> Option<Rational64> {
        Some(*self)
    }
}

/// Exact `‖x‖_𝕋` for a rational, as a rational in `[0, 1/2]`.
pub fn torus_norm_exact(x: Rational64) -> Rational64 {
    let num = *x.numer() as i128;
    let den = *x.denom() as i128;
    let r = num.rem_euclid(den);
    let m = r.min(den - r);
    Rational64::new(m as i64, den as i64)
}
