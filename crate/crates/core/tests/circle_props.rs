//! Exact identities for complete Gauss sums and the uniqueness of the
//! contributing rational in the major-arc approximation.

use num_complex::Complex64;
use num_integer::Integer;
use oscsum::carleson::{build_psi, KernelSpec};
use oscsum::circle::{
    assemble_l, check_vanishing, gauss_sum, orthogonality, recovery_identity, vanishing_sweep, MajorParams,
    RationalPoint, SweepBudget,
};
use oscsum::numeric::unit_phase;
use oscsum::polycore::{IndexSet, MultiIndex, RealPoly};
use oscsum::sampling::rng_for;
use rand::Rng;

/// `Q^{−D} Σ_r e(−P_{A/Q}(r) − B·r/Q)` by direct floating summation.
fn direct_gauss(p: &RationalPoint) -> Complex64 {
    let set = IndexSet::new(p.d, p.dim);
    let q = p.q as i64;
    let total = (p.q as usize).pow(p.dim as u32);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut r = vec![0i64; p.dim];
    for idx in 0..total {
        let mut rest = idx;
        for i in (0..p.dim).rev() {
            r[i] = (rest % p.q as usize) as i64;
            rest /= p.q as usize;
        }
        let mut k: i128 = 0;
        for (a, &num) in set.members().iter().zip(&p.a) {
            k += num as i128 * a.monomial_int(&r).unwrap();
        }
        for (b, &ri) in p.b.iter().zip(&r) {
            k += *b as i128 * ri as i128;
        }
        acc += unit_phase(-((k.rem_euclid(q as i128)) as f64) / q as f64);
    }
    acc / total as f64
}

fn random_point<R: Rng>(rng: &mut R) -> RationalPoint {
    let dim = rng.gen_range(1..=2usize);
    let d = rng.gen_range(2..=3u32);
    let q = if dim == 1 { rng.gen_range(1..=40) } else { rng.gen_range(1..=15) };
    let g = IndexSet::new(d, dim).len();
    let a = (0..g).map(|_| rng.gen_range(-100..100)).collect();
    let b = (0..dim).map(|_| rng.gen_range(-100..100)).collect();
    RationalPoint::new(d, dim, q, a, b).unwrap()
}

#[test]
fn gauss_sum_bounded_periodic_and_matches_direct_sum() {
    let mut rng = rng_for(31, 0);
    for _ in 0..500 {
        let p = random_point(&mut rng);
        let s = gauss_sum(&p).unwrap();
        assert!(s.abs <= 1.0 + 1e-12, "{p:?}: {}", s.abs);
        assert!((s.value - direct_gauss(&p)).norm() < 1e-10, "{p:?}");
        let qi = p.q as i64;
        let axis = rng.gen_range(0..p.a.len());
        let mut a = p.a.clone();
        a[axis] += qi * rng.gen_range(-3..=3);
        let mut b = p.b.clone();
        b[0] -= qi;
        let moved = RationalPoint::new(p.d, p.dim, p.q, a, b).unwrap();
        let t = gauss_sum(&moved).unwrap();
        assert_eq!(t.value, s.value);
        assert_eq!(t.exact_zero, s.exact_zero);
    }
}

#[test]
fn vanishing_exhaustive_on_the_line() {
    for d in [2, 3] {
        let cov = vanishing_sweep(1, d, 20, SweepBudget { max_pairs: None, deadline: None }).unwrap();
        assert!(cov.complete && cov.failures == 0, "{cov:?}");
        assert_eq!(cov.checked_pairs as f64, cov.expected_pairs);
    }
}

#[test]
fn vanishing_exhaustive_in_the_plane_for_small_moduli() {
    for (d, q_max) in [(2, 10), (3, 4)] {
        let cov = vanishing_sweep(2, d, q_max, SweepBudget { max_pairs: None, deadline: None }).unwrap();
        assert!(cov.complete && cov.failures == 0, "{cov:?}");
        assert_eq!(cov.checked_pairs as f64, cov.expected_pairs);
    }
}

#[test]
fn vanishing_check_requires_reduced_pair() {
    let p = RationalPoint::quadratic(4, 2, 2).unwrap();
    assert!(check_vanishing(&p).is_err());
    let p = RationalPoint::quadratic(4, 2, 1).unwrap();
    let v = check_vanishing(&p).unwrap();
    assert!(v.should_vanish && v.pass && v.sum.exact_zero);
}

#[test]
fn recovery_identity_exhaustive() {
    for q in 1..=12u64 {
        for a in 0..q as i64 {
            let p = RationalPoint::quadratic(q, a, 0).unwrap();
            for n in -20..=20 {
                let r = recovery_identity(&p, &[n]).unwrap();
                assert!(r.exact, "Q = {q}, A = {a}, n = {n}");
                assert!(r.abs_diff < 1e-10);
            }
        }
    }
}

#[test]
fn orthogonality_exact() {
    for q in 1..=64u64 {
        for x in -150..=150i64 {
            let o = orthogonality(q, &[x]).unwrap();
            assert!(o.exact, "Q = {q}, x = {x}");
            assert_eq!(o.expected, u8::from(x % q as i64 == 0));
        }
    }
    for q in 1..=16u64 {
        for x in -20..=20i64 {
            for y in [-17i64, -16, -1, 0, 3, 16, 32] {
                assert!(orthogonality(q, &[x, y]).unwrap().exact, "Q = {q}, x = ({x}, {y})");
            }
        }
    }
}

#[test]
fn at_most_one_rational_contributes() {
    let fam = build_psi(KernelSpec::Hilbert, 14).unwrap();
    let params = MajorParams { a0: 1.0, rho: 0.5, ..MajorParams::default() };
    let mut rng = rng_for(32, 0);
    let mut nonempty = 0;
    for case in 0..1000 {
        let j = rng.gen_range(12..=14u32);
        // Half the draws sit next to a rational with small denominator, where
        // the windows are nonempty; the rest are uniform.
        let (lambda, beta) = if case % 2 == 0 {
            let q = rng.gen_range(1..=8u64);
            let a = rng.gen_range(0..q) as f64 / q as f64;
            let b = rng.gen_range(0..q) as f64 / q as f64;
            let jp = j as f64;
            let dl = rng.gen_range(-1.0..1.0) * 2.0 * jp * 2f64.powi(-2 * j as i32);
            let db = rng.gen_range(-1.0..1.0) * 2f64.powi(-rng.gen_range(1..40));
            ((a + dl).rem_euclid(1.0), (b + db).rem_euclid(1.0))
        } else {
            (rng.gen::<f64>(), rng.gen::<f64>())
        };
        let p = RealPoly::restricted(1, 2, [(MultiIndex::new(vec![2]), lambda)]).unwrap();
        let rep = assemble_l(&fam, j, &p, &[beta], &params).unwrap();
        assert!(rep.contributing() <= 1, "j = {j}, lambda = {lambda}, beta = {beta}: {:?}", rep.terms);
        if rep.contributing() == 1 {
            nonempty += 1;
            let t = &rep.terms[0];
            assert_eq!(t.point.q.gcd(&(t.point.a[0] as u64)), 1);
        }
    }
    assert!(nonempty >= 50, "only {nonempty} cases had a contributing rational");
}
