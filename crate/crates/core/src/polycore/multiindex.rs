use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector `(α₁, …, α_D)`.
///
/// Ordering is graded lexicographic: total degree first, then the exponent
/// vectors compared lexicographically. This is the fixed term order used by
/// every sum in the crate. The componentwise partial order is [`MultiIndex::le`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex(exps)
    }

    /// The coordinate vector `e_axis` in dimension `dim`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = vec![0; dim];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise order: `self ≤ other` iff every exponent is ≤.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `x^α` over the integers, `None` on overflow.
    pub fn monomial_int(&self, x: &[i64]) -> Option<i128> {
        let mut acc: i128 = 1;
        for (&a, &xi) in self.0.iter().zip(x) {
            for _ in 0..a {
                acc = acc.checked_mul(xi as i128)?;
            }
        }
        Some(acc)
    }

    /// `x^α` in floating point.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }

    /// `R^α = Π R_i^{α_i}`.
    pub fn weight(&self, radii: &[f64]) -> f64 {
        self.monomial(radii)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// All exponents `α` in dimension `D` with `2 ≤ |α| ≤ d`, in term order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    d: u32,
    dim: usize,
    members: Vec<MultiIndex>,
}

impl IndexSet {
    pub fn new(d: u32, dim: usize) -> Self {
        let mut members = Vec::new();
        if dim > 0 {
            for deg in 2..=d {
                let mut cur = vec![0u32; dim];
                compositions(deg, 0, &mut cur, &mut members);
            }
        }
        members.sort();
        IndexSet { d, dim, members }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, alpha: &MultiIndex) -> bool {
        alpha.dim() == self.dim && (2..=self.d).contains(&alpha.degree())
    }
}

fn compositions(left: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in 0..=left {
        cur[pos] = a;
        compositions(left - a, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

pub(crate) fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_set_sizes() {
        assert_eq!(IndexSet::new(2, 1).len(), 1);
        assert_eq!(IndexSet::new(3, 1).len(), 2);
        assert_eq!(IndexSet::new(2, 2).len(), 3);
        assert_eq!(IndexSet::new(3, 2).len(), 7);
        for d in 1..6 {
            for dim in 1..4 {
                let g = IndexSet::new(d, dim);
                // all monomials of degree ≤ d minus the constant and linear ones
                let expected = binomial(dim as u32 + d, dim as u32) as usize - 1 - dim;
                assert_eq!(g.len(), expected);
                assert!(g.members().iter().all(|a| g.contains(a)));
            }
        }
    }

    #[test]
    fn graded_lex_order() {
        let a = MultiIndex::new(vec![0, 2]);
        let b = MultiIndex::new(vec![2, 0]);
        let c = MultiIndex::new(vec![0, 3]);
        assert!(a < b && b < c);
        assert!(MultiIndex::new(vec![1, 1]).le(&MultiIndex::new(vec![2, 1])));
        assert!(!MultiIndex::new(vec![1, 2]).le(&MultiIndex::new(vec![2, 1])));
    }

    #[test]
    fn monomials() {
        let a = MultiIndex::new(vec![2, 1]);
        assert_eq!(a.monomial_int(&[3, -2]), Some(-18));
        assert_eq!(a.monomial(&[3.0, -2.0]), -18.0);
        assert_eq!(MultiIndex::new(vec![100]).monomial_int(&[4]), None);
    }
}
