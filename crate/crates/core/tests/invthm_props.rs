//! Properties of the inverse-theorem pipeline: self-checking certificates,
//! exact denominators, the differencing inequality, exact partitions,
//! condensation and the Taylor shift.

use num_rational::Rational64;
use oscsum::calibration::{vdc_suite, C_VDC, CALIBRATION_SEED};
use oscsum::expsum::{Axis, Progression};
use oscsum::invthm::{
    condense, inverse_verify, rescale, taylor_shift_check, vdc_difference, verify_partition, InverseOutcome,
};
use oscsum::numeric::fit_line;
use oscsum::polycore::{torus_norm, MultiIndex, Poly, RatPoly, RealPoly};
use oscsum::sampling::rng_for;
use oscsum::Error;
use rand::Rng;

fn quad_cubic<C: oscsum::polycore::Coeff>(c2: C, c3: Option<C>) -> Poly<C> {
    let mut terms = vec![(MultiIndex::new(vec![2]), c2)];
    let d = if let Some(c) = c3 {
        terms.push((MultiIndex::new(vec![3]), c));
        3
    } else {
        2
    };
    Poly::restricted(1, d, terms).unwrap()
}

#[test]
fn certificates_survive_resubstitution() {
    let mut rng = rng_for(51, 0);
    let n = 10_000u64;
    let prog = Progression::full_box(&[n]).unwrap();
    let mut certified = 0;
    for _ in 0..60 {
        let q = rng.gen_range(1..=9u64);
        let a = rng.gen_range(0..q) as f64 / q as f64;
        let eps = rng.gen_range(-1.0..1.0) * 10f64.powf(rng.gen_range(-12.0..-8.0));
        let p = quad_cubic(a + eps, None);
        let rep = match inverse_verify(&p, &prog, 0.1, 6.0) {
            Ok(r) => r,
            Err(Error::Precondition(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        if let InverseOutcome::Certificate(c) = rep.outcome {
            certified += 1;
            assert!(c.verified);
            assert!(c.q as f64 <= rep.bound);
            let own = torus_norm(c.q as f64 * (a + eps)).unwrap() * (n as f64).powi(2);
            assert!(own <= rep.bound * (1.0 + 1e-9), "defect {own} over bound {}", rep.bound);
            assert!((own - c.max_defect).abs() <= 1e-6 * (1.0 + own));
        }
    }
    assert!(certified >= 30, "{certified}");
}

#[test]
fn exact_rationals_return_their_denominator() {
    let mut rng = rng_for(52, 0);
    let prog = Progression::full_box(&[10_000]).unwrap();
    let mut checked = 0;
    for _ in 0..80 {
        let q2 = rng.gen_range(1..=12i64);
        let q3 = rng.gen_range(1..=6i64);
        let p: RatPoly = quad_cubic(
            Rational64::new(rng.gen_range(0..q2), q2),
            rng.gen_bool(0.5).then(|| Rational64::new(rng.gen_range(0..q3), q3)),
        );
        let truth = p.common_denominator() as u64;
        let rep = match inverse_verify(&p, &prog, 0.1, 6.0) {
            Ok(r) => r,
            Err(Error::Precondition(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let InverseOutcome::Certificate(c) = rep.outcome else { panic!("{:?}", rep.outcome) };
        assert_eq!(c.q, truth, "{}", p.to_json());
        assert_eq!(c.max_defect, 0.0);
        checked += 1;
    }
    assert!(checked >= 40, "{checked}");
}

#[test]
fn vdc_ratio_within_frozen_constant() {
    let suite = vdc_suite(1000, CALIBRATION_SEED).unwrap();
    assert!(suite.max_ratio <= C_VDC, "{} > {C_VDC}", suite.max_ratio);
    let alternating: Vec<f64> = (1..=1000).map(|n| (n % 2) as f64 * 0.5).collect();
    for h in [1, 2, 8, 64] {
        assert_eq!(vdc_difference(&alternating, h).unwrap().lhs_sq, 0.0);
    }
}

#[test]
fn rescale_is_an_exact_partition() {
    let mut rng = rng_for(53, 0);
    for _ in 0..200 {
        let dim = rng.gen_range(1..=2usize);
        let axes: Vec<Axis> = (0..dim)
            .map(|_| Axis {
                start: rng.gen_range(1..20),
                gap: rng.gen_range(1..5),
                count: if dim == 1 { rng.gen_range(10..400) } else { rng.gen_range(10..60) },
            })
            .collect();
        let ambient = axes.iter().map(|a| (a.start + a.gap * (a.count as i64 - 1)) as u64 + 3).collect();
        let prog = Progression::new(axes, ambient).unwrap();
        let k = rng.gen_range(1..=6u64);
        let target = rng.gen_range(0.1..=1.0);
        let rep = rescale(&prog, k, target, 1.0).unwrap();
        assert!(verify_partition(&prog, &rep).unwrap(), "{prog:?} K = {k} target = {target}");
        let covered: u64 = rep.pieces.iter().map(|p| p.len()).sum::<u64>() + rep.remainder_len;
        assert_eq!(covered, prog.len());
    }
}

#[test]
fn condense_recovers_exact_denominator() {
    let mut rng = rng_for(54, 0);
    for _ in 0..300 {
        let q = rng.gen_range(1..=20i64);
        let mut a = rng.gen_range(0..q);
        while num_integer::gcd(a, q) != 1 {
            a = rng.gen_range(0..q);
        }
        let alpha = Rational64::new(a, q);
        let n = rng.gen_range(200..=5000u64);
        let set: Vec<u64> = (1..=n).filter(|h| h % q as u64 == 0).collect();
        let delta = set.len() as f64 / n as f64;
        for eps in [0.0, 1e-12] {
            let rep = condense(&alpha, &set, n, eps, delta, 1.0).unwrap();
            assert_eq!(rep.found_q(), Some(q as u64), "alpha = {alpha}, N = {n}");
            match rep.outcome {
                oscsum::invthm::CondenseOutcome::Found { defect, .. } => assert_eq!(defect, 0.0),
                other => panic!("{other:?}"),
            }
        }
    }
}

#[test]
fn taylor_deviation_is_linear_in_delta() {
    let n = 10_000u64;
    let q = 7u64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for e in 0..=8 {
        let eps = 1e-13 * 10f64.powf(e as f64 * 0.5);
        let p: RealPoly = quad_cubic(3.0 / 7.0 + eps, None);
        // the cap sits 1% above the nominal defect `Q·ε·N²`; the measured
        // defect is what the deviation is regressed on
        let cap = q as f64 * eps * (n * n) as f64 * 1.01;
        let rep = taylor_shift_check(&p, q, cap, &[4321], &[200], &[n], 1.0).unwrap();
        assert!(rep.max_deviation > 0.0 && rep.max_deviation < 0.25);
        xs.push(rep.max_defect.ln());
        ys.push(rep.max_deviation.ln());
    }
    let (slope, _) = fit_line(&xs, &ys).unwrap();
    assert!((slope - 1.0).abs() <= 0.2, "slope {slope}");
}
