//! Property tests for the coefficient norm: minimality of the level, the
//! trivial bound, convexity in the scale and exact/floating agreement.

use num_rational::Rational64;
use oscsum::coeffnorm::{check_convexity, coeff_norm, trivial_bound, witness_at_level};
use oscsum::polycore::{torus_norm, IndexSet, RatPoly, RealPoly, ScaleVec};
use oscsum::sampling::{multiscale_poly, rng_for, uniform_poly};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::Rng;

/// `Σ_α ‖Qλ_α‖ R^α` from scratch: plain products and the torus norm.
fn brute_residual(p: &RealPoly, r: &ScaleVec, q: u64) -> f64 {
    p.terms().map(|(a, c)| torus_norm(c * q as f64).unwrap() * r.weight(a)).sum()
}

fn random_shape<R: Rng>(rng: &mut R) -> (u32, usize) {
    (rng.gen_range(2..=3), rng.gen_range(1..=2))
}

/// Fixed seed and no persistence, so every run explores the same cases.
fn fixed_config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(0x05c5_0001), failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(fixed_config(150))]

    #[test]
    fn level_is_minimal(seed in 0u64..1_000_000, k in 1i32..=7) {
        let mut rng = rng_for(seed, 2);
        let (d, dim) = random_shape(&mut rng);
        let p = multiscale_poly(&mut rng, d, dim, 7);
        let r = ScaleVec::uniform(dim, 2f64.powi(k)).unwrap();
        let n = coeff_norm(&p, &r).unwrap();
        let Some(s0) = n.s0 else { return Ok(()) };
        if s0 >= 1 {
            let q = n.witness_q.unwrap();
            prop_assert!(q <= 1 << s0);
            prop_assert!(brute_residual(&p, &r, q) <= 2f64.powi(s0 as i32) * (1.0 + 1e-9));
            for s in 1..s0 {
                prop_assert_eq!(witness_at_level(&p, &r, s as u32).unwrap(), None);
                let level = 2f64.powi(s as i32);
                for q in 1..=1u64 << s {
                    prop_assert!(brute_residual(&p, &r, q) > level * (1.0 - 1e-9), "s = {s}, Q = {q}");
                }
            }
            prop_assert!(brute_residual(&p, &r, 1) > 1.0 - 1e-9);
        } else {
            let x = brute_residual(&p, &r, 1);
            let level = 2f64.powi(s0 as i32);
            prop_assert!(x <= level * (1.0 + 1e-9) && x > level / 2.0 * (1.0 - 1e-9));
        }
    }

    #[test]
    fn convexity_on_multiscale_polynomials(seed in 0u64..1_000_000) {
        let mut rng = rng_for(seed, 3);
        let (d, dim) = random_shape(&mut rng);
        let p = multiscale_poly(&mut rng, d, dim, 12);
        let rep = check_convexity(&p, 12).unwrap();
        prop_assert!(rep.pass, "{:?}", rep.violations);
    }

    #[test]
    fn exact_and_floating_modes_agree(
        seed in 0u64..1_000_000,
        q in 1i64..=64,
        k in 0i32..=6,
    ) {
        let mut rng = rng_for(seed, 4);
        let (d, dim) = random_shape(&mut rng);
        let set = IndexSet::new(d, dim);
        let exact = RatPoly::restricted(
            dim,
            d,
            set.members().iter().map(|a| (a.clone(), Rational64::new(rng.gen_range(0..3 * q), q))),
        )
        .unwrap();
        let r = ScaleVec::uniform(dim, 2f64.powi(k)).unwrap();
        let a = coeff_norm(&exact, &r).unwrap();
        let b = coeff_norm(&exact.to_real(), &r).unwrap();
        prop_assert_eq!(a.s0, b.s0);
        prop_assert_eq!(a.witness_q, b.witness_q);
        // floating products `Q·λ` carry relative error near 1e-15, amplified by `R^α`
        prop_assert!((a.residual - b.residual).abs() <= 1e-12 * trivial_bound(&exact, &r));
    }
}

#[test]
fn trivial_bound_on_random_polynomials() {
    let mut rng = rng_for(5, 0);
    for i in 0..1000 {
        let (d, dim) = random_shape(&mut rng);
        let p = uniform_poly(&mut rng, d, dim);
        let k_cap = if d == 3 && dim == 2 { 4 } else { 6 };
        let radii: Vec<f64> = (0..dim).map(|_| 2f64.powi(rng.gen_range(0..=k_cap))).collect();
        let r = ScaleVec::new(radii).unwrap();
        let n = coeff_norm(&p, &r).unwrap();
        assert!(n.value() <= trivial_bound(&p, &r), "case {i}: {n:?}");
    }
}

#[test]
fn norm_is_monotone_in_the_radius() {
    let mut rng = rng_for(6, 0);
    for _ in 0..200 {
        let (d, dim) = random_shape(&mut rng);
        let p = multiscale_poly(&mut rng, d, dim, 8);
        let mut last = 0.0;
        for k in 0..=8 {
            let v = coeff_norm(&p, &ScaleVec::uniform(dim, 2f64.powi(k)).unwrap()).unwrap().value();
            assert!(v >= last, "{v} < {last}");
            last = v;
        }
    }
}
