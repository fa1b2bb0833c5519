//! Property tests for normalized exponential sums and the Fejér majorant.

use oscsum::expsum::{exp_sum, fejer_majorant, verify_sum_decay, Amplitude, DecayParams};
use oscsum::polycore::{torus_norm, IndexSet, MultiIndex, RealPoly};
use oscsum::sampling::{random_progression, rng_for, uniform_poly};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::Rng;

/// Fixed seed and no persistence, so every run explores the same cases.
fn fixed_config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(0x05c5_0003), failure_persistence: None, ..ProptestConfig::default() }
}

fn ambient_for(dim: usize) -> Vec<u64> {
    if dim == 1 {
        vec![4000]
    } else {
        vec![60, 45]
    }
}

/// Coefficients on the grid `2^{−40}ℤ`, so adding an integer is exact.
fn dyadic_poly<R: Rng>(rng: &mut R, d: u32, dim: usize) -> RealPoly {
    let g = IndexSet::new(d, dim);
    let scale = 2f64.powi(-40);
    RealPoly::restricted(dim, d, g.members().iter().map(|a| (a.clone(), rng.gen_range(0..1i64 << 40) as f64 * scale)))
        .unwrap()
}

proptest! {
    #![proptest_config(fixed_config(100))]

    #[test]
    fn triangle_bound(seed in 0u64..1_000_000, d in 2u32..=3, dim in 1usize..=2, c in 0.05f64..1.0) {
        let mut rng = rng_for(seed, 1);
        let ambient = ambient_for(dim);
        let p = uniform_poly(&mut rng, d, dim);
        let prog = random_progression(&mut rng, &ambient, 5);
        for amp in [Amplitude::one(), Amplitude::tent(&ambient, c)] {
            let sup = if matches!(amp, Amplitude::Constant(_)) { 1.0 } else { c };
            let rep = exp_sum(&p, 1, &prog, &amp).unwrap();
            prop_assert!(rep.abs <= rep.n_terms as f64 / prog.ambient_volume() * sup * (1.0 + 1e-12));
        }
    }

    #[test]
    fn integer_valued_shift_leaves_sum_unchanged(
        seed in 0u64..1_000_000,
        d in 2u32..=3,
        dim in 1usize..=2,
        k in -3i64..=3,
    ) {
        let mut rng = rng_for(seed, 2);
        let ambient = ambient_for(dim);
        let p = dyadic_poly(&mut rng, d, dim);
        let shifted = RealPoly::restricted(
            dim,
            d,
            p.terms().map(|(a, c)| (a.clone(), c + rng.gen_range(-50..=50) as f64)),
        )
        .unwrap();
        let prog = random_progression(&mut rng, &ambient, 3);
        let k = if k == 0 { 1 } else { k };
        let a = exp_sum(&p, k, &prog, &Amplitude::one()).unwrap().value;
        let b = exp_sum(&shifted, k, &prog, &Amplitude::one()).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn negation_conjugates(seed in 0u64..1_000_000, d in 2u32..=3, dim in 1usize..=2) {
        let mut rng = rng_for(seed, 3);
        let ambient = ambient_for(dim);
        let p = uniform_poly(&mut rng, d, dim);
        let prog = random_progression(&mut rng, &ambient, 4);
        let amp = Amplitude::tent(&ambient, 0.5);
        let a = exp_sum(&p, 1, &prog, &amp).unwrap().value;
        let b = exp_sum(&p.neg(), 1, &prog, &amp).unwrap().value;
        prop_assert!((a.conj() - b).norm() <= 1e-12);
    }
}

#[test]
fn fejer_majorant_dominates_indicator() {
    for b in [2u64, 3, 4, 7, 10, 16, 33, 64, 100, 257] {
        let mut hits = 0;
        for i in 0..1000 {
            let beta = i as f64 / 1000.0;
            let m = fejer_majorant(b, beta).unwrap();
            assert!(m >= -1e-12, "B = {b}, beta = {beta}: {m}");
            if torus_norm(beta).unwrap() <= 1.0 / b as f64 {
                hits += 1;
                assert!(m >= 1.0 - 1e-12, "B = {b}, beta = {beta}: {m}");
            }
        }
        assert!(hits > 0);
    }
}

#[test]
fn single_monomial_sum_is_exact_for_integer_coefficient() {
    let p = RealPoly::restricted(1, 2, [(MultiIndex::new(vec![2]), 3.0)]).unwrap();
    let prog = random_progression(&mut rng_for(4, 0), &[500], 3);
    let rep = exp_sum(&p, 1, &prog, &Amplitude::one()).unwrap();
    assert!((rep.value.re - prog.len() as f64 / 500.0).abs() < 1e-12);
}

#[test]
fn fitted_decay_exponent_stable_under_doubling_trials() {
    let base = DecayParams {
        d: 2,
        dim: 1,
        radius: 1 << 10,
        s_values: (1..=9).collect(),
        trials: 30,
        k: 1,
        theta: 0.25,
        budget: 100_000,
        seed: 21,
    };
    let a = verify_sum_decay(&base).unwrap();
    let b = verify_sum_decay(&DecayParams { trials: 60, ..base }).unwrap();
    let (ta, tb) = (a.theta_hat.unwrap(), b.theta_hat.unwrap());
    assert!(ta > 0.0, "{ta}");
    assert!((tb - ta).abs() <= 0.2 * ta, "theta_hat {ta} at 30 trials, {tb} at 60");
}
