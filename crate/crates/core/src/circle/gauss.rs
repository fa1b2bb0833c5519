//! Complete Gauss sums with exact residue arithmetic.
//!
//! Every sum here has the form `Q^{−D} Σ h[k] ζ^k` with `ζ = e(−1/Q)` and an
//! integer histogram `h` over `Z/Q`. Such a sum is exactly zero iff the
//! cyclotomic polynomial `Φ_Q` divides `Σ h[k] z^k`, which is decided by
//! integer polynomial division.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{unit_phase, ComplexSum};
use crate::polycore::{IndexSet, MultiIndex, RatPoly};

/// Largest residue box `Q^D` (or `Q^{2D}` for double sums) enumerated.
pub const DEFAULT_RESIDUE_BUDGET: u64 = 1 << 26;

/// Coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic(n: u64) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().expect("cache lock").get(&n) {
        return c.clone();
    }
    // z^n − 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = divide_monic(&num, &cyclotomic(d));
        }
    }
    let out = Arc::new(num);
    cache.lock().expect("cache lock").insert(n, out.clone());
    out
}

/// Exact quotient by a monic divisor; the remainder must vanish.
fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quo = vec![0i64; num.len() - dd];
    for i in (dd..num.len()).rev() {
        let c = rem[i];
        if c != 0 {
            quo[i - dd] = c;
            for (t, &dc) in den.iter().enumerate() {
                rem[i - dd + t] -= c * dc;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quo
}

/// True iff `Σ h[k] ζ^k = 0` for a primitive `Q`-th root of unity `ζ`.
pub fn vanishes_at_root(q: u64, hist: &[i64]) -> bool {
    let phi = cyclotomic(q);
    let deg = phi.len() - 1;
    let mut rem = hist.to_vec();
    for i in (deg..rem.len()).rev() {
        let c = rem[i];
        if c != 0 {
            for (t, &pc) in phi.iter().enumerate() {
                rem[i - deg + t] -= c * pc;
            }
        }
    }
    rem[..deg.min(rem.len())].iter().all(|&c| c == 0)
}

/// `Σ h[k] e(−k/Q)`, compensated.
fn histogram_value(q: u64, hist: &[i64]) -> Complex64 {
    let mut acc = ComplexSum::new();
    for (k, &c) in hist.iter().enumerate() {
        if c != 0 {
            acc.add(unit_phase(-(k as f64) / q as f64) * c as f64);
        }
    }
    acc.value()
}

/// `(A/Q, B/Q)` with numerators aligned to the members of `Γ_{d,D}` and kept
/// as canonical residues in `[0, Q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPoint {
    pub d: u32,
    pub dim: usize,
    pub q: u64,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

impl RationalPoint {
    pub fn new(d: u32, dim: usize, q: u64, a: Vec<i64>, b: Vec<i64>) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("denominator must be positive"));
        }
        if q > i64::MAX as u64 / 4 {
            return Err(Error::Overflow(format!("denominator {q} too large")));
        }
        let set = IndexSet::new(d, dim);
        if a.len() != set.len() {
            return Err(Error::Dimension { expected: set.len(), got: a.len() });
        }
        if b.len() != dim {
            return Err(Error::Dimension { expected: dim, got: b.len() });
        }
        let qi = q as i64;
        Ok(RationalPoint {
            d,
            dim,
            q,
            a: a.into_iter().map(|v| v.rem_euclid(qi)).collect(),
            b: b.into_iter().map(|v| v.rem_euclid(qi)).collect(),
        })
    }

    /// Univariate quadratic `A/Q·m²` with `β = B/Q`.
    pub fn quadratic(q: u64, a: i64, b: i64) -> Result<Self> {
        RationalPoint::new(2, 1, q, vec![a], vec![b])
    }

    /// Exponents in the order of [`RationalPoint::a`].
    pub fn exponents(&self) -> Vec<MultiIndex> {
        IndexSet::new(self.d, self.dim).members().to_vec()
    }

    /// `gcd({A_α} ∪ {Q})`.
    pub fn gcd_a(&self) -> u64 {
        self.a.iter().fold(self.q as i64, |g, &v| g.gcd(&v)) as u64
    }

    /// `gcd({A_α} ∪ {B_i} ∪ {Q})`.
    pub fn gcd_ab(&self) -> u64 {
        self.b.iter().fold(self.gcd_a() as i64, |g, &v| g.gcd(&v)) as u64
    }

    /// `P_{A/Q}` as an exact rational polynomial.
    pub fn poly(&self) -> Result<RatPoly> {
        let terms = self
            .exponents()
            .into_iter()
            .zip(&self.a)
            .filter(|(_, &a)| a != 0)
            .map(|(e, &a)| (e, Rational64::new(a, self.q as i64)))
            .collect::<Vec<_>>();
        RatPoly::restricted(self.dim, self.d, terms)
    }

    fn table(&self) -> Result<ResidueTable> {
        ResidueTable::new(self.d, self.dim, self.q)
    }
}

/// Residues `r^α mod Q` for every `α ∈ Γ` and `r ∈ [0, Q)^D`, axis 0 slowest.
#[derive(Debug, Clone)]
pub struct ResidueTable {
    q: u64,
    dim: usize,
    points: usize,
    mono: Vec<Vec<u64>>,
}

impl ResidueTable {
    pub fn new(d: u32, dim: usize, q: u64) -> Result<Self> {
        let points = (q as u128).pow(dim as u32);
        if points > DEFAULT_RESIDUE_BUDGET as u128 {
            return Err(Error::budget(format!("Q^D = {points} residues exceed budget")));
        }
        let points = points as usize;
        let set = IndexSet::new(d, dim);
        let mut mono = Vec::with_capacity(set.len());
        let mut r = vec![0u64; dim];
        for alpha in set.members() {
            let mut col = Vec::with_capacity(points);
            for idx in 0..points {
                unravel(idx, q, &mut r);
                let mut v = 1u64 % q;
                for (&ri, &e) in r.iter().zip(alpha.exps()) {
                    for _ in 0..e {
                        v = ((v as u128 * ri as u128) % q as u128) as u64;
                    }
                }
                col.push(v);
            }
            mono.push(col);
        }
        Ok(ResidueTable { q, dim, points, mono })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// `P_A(r) mod Q` for every `r`.
    pub fn poly_residues(&self, a: &[i64]) -> Vec<u64> {
        let q = self.q as u128;
        let mut out = vec![0u64; self.points];
        for (col, &av) in self.mono.iter().zip(a) {
            let av = av.rem_euclid(self.q as i64) as u128;
            if av == 0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(col) {
                *o = ((*o as u128 + av * m as u128) % q) as u64;
            }
        }
        out
    }

    /// `B·r mod Q` for every `r`.
    pub fn linear_residues(&self, b: &[i64]) -> Vec<u64> {
        let mut r = vec![0u64; self.dim];
        (0..self.points)
            .map(|idx| {
                unravel(idx, self.q, &mut r);
                let mut v: u128 = 0;
                for (&ri, &bi) in r.iter().zip(b) {
                    v += ri as u128 * bi.rem_euclid(self.q as i64) as u128;
                }
                (v % self.q as u128) as u64
            })
            .collect()
    }
}

fn unravel(mut idx: usize, q: u64, out: &mut [u64]) {
    for k in (0..out.len()).rev() {
        out[k] = (idx as u64) % q;
        idx /= q as usize;
    }
}

/// A complete Gauss sum with its exact zero flag.
#[derive(Debug, Clone, Serialize)]
pub struct GaussSum {
    pub value: Complex64,
    pub abs: f64,
    /// Decided exactly; when set, `value` is exactly zero.
    pub exact_zero: bool,
}

fn gauss_from_residues(q: u64, points: usize, base: &[u64], lin: &[u64]) -> GaussSum {
    let mut hist = vec![0i64; q as usize];
    for (&p, &l) in base.iter().zip(lin) {
        hist[((p + l) % q) as usize] += 1;
    }
    let exact_zero = vanishes_at_root(q, &hist);
    let value = if exact_zero { Complex64::new(0.0, 0.0) } else { histogram_value(q, &hist) / points as f64 };
    GaussSum { value, abs: value.norm(), exact_zero }
}

/// `S(A/Q, B/Q) = Q^{−D} Σ_{r ∈ [0,Q)^D} e(−P_{A/Q}(r) − (B/Q)·r)`.
pub fn gauss_sum(p: &RationalPoint) -> Result<GaussSum> {
    let t = p.table()?;
    Ok(gauss_from_residues(p.q, t.points(), &t.poly_residues(&p.a), &t.linear_residues(&p.b)))
}

/// Result of [`check_vanishing`].
#[derive(Debug, Clone, Serialize)]
pub struct VanishingCheck {
    pub sum: GaussSum,
    /// `gcd({A_α}, Q) > 1`.
    pub should_vanish: bool,
    pub pass: bool,
}

/// For `gcd(A ∪ B, Q) = 1`: when `gcd(A, Q) > 1` the sum must be exactly zero.
pub fn check_vanishing(p: &RationalPoint) -> Result<VanishingCheck> {
    if p.gcd_ab() != 1 {
        return Err(Error::precondition(format!("gcd(A, B, Q) = {} is not 1", p.gcd_ab())));
    }
    let sum = gauss_sum(p)?;
    let should_vanish = p.gcd_a() > 1;
    Ok(VanishingCheck { pass: !should_vanish || sum.exact_zero, sum, should_vanish })
}

/// Result of [`recovery_identity`].
#[derive(Debug, Clone, Serialize)]
pub struct RecoveryCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_diff: f64,
    /// `lhs = rhs` decided exactly.
    pub exact: bool,
}

/// `Σ_B S(A/Q, B/Q) e((B/Q)·n)` against `e(−P_{A/Q}(n))`. The `B` part of
/// `p` is ignored.
pub fn recovery_identity(p: &RationalPoint, n: &[i64]) -> Result<RecoveryCheck> {
    if n.len() != p.dim {
        return Err(Error::Dimension { expected: p.dim, got: n.len() });
    }
    let t = p.table()?;
    let q = p.q;
    let qi = q as i64;
    if (t.points() as u128).pow(2) > DEFAULT_RESIDUE_BUDGET as u128 {
        return Err(Error::budget("Q^{2D} exceeds the residue budget"));
    }
    let base = t.poly_residues(&p.a);
    let mut b = vec![0i64; p.dim];
    let mut bu = vec![0u64; p.dim];
    let mut lhs = ComplexSum::new();
    let mut hist = vec![0i64; q as usize];
    for bidx in 0..t.points() {
        unravel(bidx, q, &mut bu);
        for i in 0..p.dim {
            b[i] = bu[i] as i64;
        }
        let lin = t.linear_residues(&b);
        let s = gauss_from_residues(q, t.points(), &base, &lin);
        // e(B·n/Q) = ζ^{−B·n}
        let bn = b.iter().zip(n).map(|(&x, &y)| (x as i128 * y as i128).rem_euclid(q as i128)).sum::<i128>() % q as i128;
        lhs.add(s.value * unit_phase(bn as f64 / q as f64));
        for (&pv, &l) in base.iter().zip(&lin) {
            let k = (pv as i128 + l as i128 - bn).rem_euclid(q as i128);
            hist[k as usize] += 1;
        }
    }
    let n_res: Vec<i64> = n.iter().map(|v| v.rem_euclid(qi)).collect();
    let mut idx = 0usize;
    for &v in &n_res {
        idx = idx * q as usize + v as usize;
    }
    let k0 = base[idx];
    hist[k0 as usize] -= t.points() as i64;
    let exact = vanishes_at_root(q, &hist);
    let rhs = unit_phase(-(k0 as f64) / q as f64);
    let lhs = lhs.value();
    Ok(RecoveryCheck { lhs, rhs, abs_diff: (lhs - rhs).norm(), exact })
}

/// Result of [`orthogonality`].
#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityCheck {
    /// Floating value of `Q^{−D} Σ_B e((B/Q)·x)`.
    pub value: Complex64,
    /// `𝟙{Q | x}`.
    pub expected: u8,
    /// The sum equals `expected` exactly.
    pub exact: bool,
}

/// `Q^{−D} Σ_{B ∈ [0,Q)^D} e((B/Q)·x)`.
pub fn orthogonality(q: u64, x: &[i64]) -> Result<OrthogonalityCheck> {
    if q == 0 {
        return Err(Error::domain("denominator must be positive"));
    }
    let dim = x.len();
    let points = (q as u128).pow(dim as u32);
    if points > DEFAULT_RESIDUE_BUDGET as u128 {
        return Err(Error::budget(format!("Q^D = {points} exceeds budget")));
    }
    let mut hist = vec![0i64; q as usize];
    let mut bu = vec![0u64; dim];
    for idx in 0..points as usize {
        unravel(idx, q, &mut bu);
        let k = bu.iter().zip(x).map(|(&b, &v)| b as i128 * v as i128).sum::<i128>();
        // e(k/Q) = ζ^{−k}
        hist[(-k).rem_euclid(q as i128) as usize] += 1;
    }
    let value = histogram_value(q, &hist) / points as f64;
    let expected = u8::from(x.iter().all(|v| v.rem_euclid(q as i64) == 0));
    hist[0] -= expected as i64 * points as i64;
    Ok(OrthogonalityCheck { value, expected, exact: vanishes_at_root(q, &hist) })
}

/// Bounds for the exhaustive vanishing sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepBudget {
    /// Stop after this many `(A, B)` pairs.
    pub max_pairs: Option<u64>,
    /// Stop at this instant.
    pub deadline: Option<Instant>,
}

/// Coverage of the vanishing sweep for one `(D, d)`.
#[derive(Debug, Clone, Serialize)]
pub struct VanishingCoverage {
    pub dim: usize,
    pub d: u32,
    pub q_max: u64,
    /// Number of `(A, B)` pairs the sweep has to visit.
    pub expected_pairs: f64,
    pub checked_pairs: u64,
    pub failures: u64,
    pub first_failure: Option<RationalPoint>,
    pub complete: bool,
    /// Largest `Q` fully covered.
    pub q_done: u64,
}

fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut m = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            m = -m;
        }
        p += 1;
    }
    if n > 1 {
        m = -m;
    }
    m
}

/// Number of pairs with `gcd(A, Q) > 1` and `gcd(A ∪ B, Q) = 1`.
pub fn expected_vanishing_pairs(dim: usize, d: u32, q: u64) -> f64 {
    let g = IndexSet::new(d, dim).len() as i32;
    let mut total = 0.0;
    for v in 2..=q {
        if !q.is_multiple_of(v) {
            continue;
        }
        // #A with gcd(A, Q) = v
        let mut na = 0.0;
        for w in (v..=q).step_by(v as usize) {
            if q.is_multiple_of(w) {
                na += mobius(w / v) as f64 * ((q / w) as f64).powi(g);
            }
        }
        // #B with gcd(B, v) = 1
        let mut nb = (q as f64).powi(dim as i32);
        let mut rest = v;
        let mut p = 2;
        while rest > 1 {
            if rest % p == 0 {
                nb *= 1.0 - (p as f64).powi(-(dim as i32));
                while rest % p == 0 {
                    rest /= p;
                }
            }
            p += 1;
        }
        total += na * nb;
    }
    total
}

/// Checks every `(A, B)` with `Q ≤ q_max`, `gcd(A, Q) > 1` and
/// `gcd(A ∪ B, Q) = 1` for exact vanishing, in increasing `Q`, stopping at
/// the budget.
pub fn vanishing_sweep(dim: usize, d: u32, q_max: u64, budget: SweepBudget) -> Result<VanishingCoverage> {
    let g = IndexSet::new(d, dim).len();
    let expected_pairs = (1..=q_max).map(|q| expected_vanishing_pairs(dim, d, q)).sum();
    let mut cov = VanishingCoverage {
        dim,
        d,
        q_max,
        expected_pairs,
        checked_pairs: 0,
        failures: 0,
        first_failure: None,
        complete: false,
        q_done: 0,
    };
    let out_of_budget = |checked: u64| {
        budget.max_pairs.is_some_and(|m| checked >= m) || budget.deadline.is_some_and(|t| Instant::now() >= t)
    };
    for q in 1..=q_max {
        let t = ResidueTable::new(d, dim, q)?;
        let n_a = (q as u128).pow(g as u32);
        if n_a > usize::MAX as u128 {
            return Err(Error::budget("numerator tuples overflow"));
        }
        let lins: Vec<(Vec<i64>, Vec<u64>)> = (0..t.points())
            .map(|idx| {
                let mut bu = vec![0u64; dim];
                unravel(idx, q, &mut bu);
                let b: Vec<i64> = bu.iter().map(|&v| v as i64).collect();
                let lin = t.linear_residues(&b);
                (b, lin)
            })
            .collect();
        let chunk = 4096u128;
        let mut start = 0u128;
        while start < n_a {
            if out_of_budget(cov.checked_pairs) {
                return Ok(cov);
            }
            let end = (start + chunk).min(n_a);
            let (checked, fails, first) = (start..end)
                .into_par_iter()
                .map(|ai| {
                    let mut a = vec![0u64; g];
                    unravel(ai as usize, q, &mut a);
                    let a: Vec<i64> = a.into_iter().map(|v| v as i64).collect();
                    let ga = a.iter().fold(q as i64, |acc, &v| acc.gcd(&v));
                    if ga == 1 {
                        return (0u64, 0u64, None);
                    }
                    let base = t.poly_residues(&a);
                    let mut checked = 0;
                    let mut fails = 0;
                    let mut first = None;
                    for (b, lin) in &lins {
                        if b.iter().fold(ga, |acc, &v| acc.gcd(&v)) != 1 {
                            continue;
                        }
                        checked += 1;
                        if !gauss_from_residues(q, t.points(), &base, lin).exact_zero {
                            fails += 1;
                            if first.is_none() {
                                first = Some((a.clone(), b.clone()));
                            }
                        }
                    }
                    (checked, fails, first)
                })
                .reduce(|| (0, 0, None), |x, y| (x.0 + y.0, x.1 + y.1, x.2.or(y.2)));
            cov.checked_pairs += checked;
            cov.failures += fails;
            if cov.first_failure.is_none() {
                if let Some((a, b)) = first {
                    cov.first_failure = Some(RationalPoint::new(d, dim, q, a, b)?);
                }
            }
            start = end;
        }
        cov.q_done = q;
    }
    cov.complete = true;
    Ok(cov)
}
