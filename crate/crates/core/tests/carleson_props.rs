//! Structural properties of the grid Carleson operator, the TT* kernel, the
//! Schur sums and the stationary/oscillatory/error split.

use oscsum::carleson::{
    autocorrelation_l1, build_psi, carleson_apply, gram_schur, refinement_stability, split_as_ek, ttstar_kernel,
    ApplyParams, Grid, KernelSpec, Linearizer, DEFAULT_A0,
};
use oscsum::polycore::RealPoly;
use oscsum::sampling::{multiscale_poly, rng_for, uniform_poly};
use rand::Rng;

fn random_grid<R: Rng>(rng: &mut R, extents: Vec<usize>, margin: usize) -> Grid {
    let mut g = Grid::zeros(extents.clone()).unwrap();
    let mut x = vec![0i64; extents.len()];
    for idx in 0..g.len() {
        g.point(idx, &mut x);
        let inside = x.iter().zip(&extents).all(|(&v, &e)| v as usize >= margin && (v as usize) + margin < e);
        if inside {
            g.data[idx] = rng.gen_range(-1.0..1.0);
        }
    }
    g
}

#[test]
fn grid_refinement_is_monotone() {
    let mut rng = rng_for(41, 0);
    let fam = build_psi(KernelSpec::Hilbert, 4).unwrap();
    let inputs: Vec<Grid> = (0..4).map(|_| random_grid(&mut rng, vec![96], 0)).collect();
    let rep = refinement_stability(&fam, 2, 2, &inputs).unwrap();
    assert!(rep.monotone, "{rep:?}");
    let fam2 = build_psi(KernelSpec::Riesz { dim: 2 }, 2).unwrap();
    let inputs: Vec<Grid> = (0..2).map(|_| random_grid(&mut rng, vec![12, 12], 0)).collect();
    assert!(refinement_stability(&fam2, 2, 1, &inputs).unwrap().monotone);
}

#[test]
fn translation_commutes_on_interior_points() {
    let mut rng = rng_for(42, 0);
    let fam = build_psi(KernelSpec::Hilbert, 4).unwrap();
    let params = ApplyParams::uniform(2, 1, 2);
    let n = 120usize;
    for t in [1usize, 5, 17] {
        // f lives on [30, 70), its translate on [30 + t, 70 + t)
        let mut f = Grid::zeros(vec![n]).unwrap();
        for x in 30..70 {
            f.data[x] = rng.gen_range(-1.0..1.0);
        }
        let mut g = Grid::zeros(vec![n]).unwrap();
        for x in 30..70 {
            g.data[x + t] = f.data[x];
        }
        let a = carleson_apply(&f, &fam, &params).unwrap().values;
        let b = carleson_apply(&g, &fam, &params).unwrap().values;
        for x in 0..n - t {
            assert_eq!(a.data[x], b.data[x + t], "t = {t}, x = {x}");
        }
    }
}

#[test]
fn ttstar_swap_conjugates() {
    let mut rng = rng_for(43, 0);
    let fam = build_psi(KernelSpec::Hilbert, 5).unwrap();
    let n = 48usize;
    let lam = Linearizer::new(vec![n], (0..n).map(|_| uniform_poly(&mut rng, 3, 1)).collect()).unwrap();
    let mu = Linearizer::new(vec![n], (0..n).map(|_| uniform_poly(&mut rng, 3, 1)).collect()).unwrap();
    for _ in 0..300 {
        let x = rng.gen_range(0..n as i64);
        let y = rng.gen_range(0..n as i64);
        let k = rng.gen_range(1..=5);
        let r = rng.gen_range(1..=5);
        let a = ttstar_kernel(&fam, &[x], &[y], &lam, &mu, k, r).unwrap();
        let b = ttstar_kernel(&fam, &[y], &[x], &mu, &lam, r, k).unwrap();
        assert!((a - b.conj()).norm() <= 1e-12, "x = {x}, n = {y}: {a} vs {b}");
    }
    let fam2 = build_psi(KernelSpec::Riesz { dim: 2 }, 3).unwrap();
    let ext = vec![10usize, 10];
    let lam = Linearizer::new(ext.clone(), (0..100).map(|_| uniform_poly(&mut rng, 2, 2)).collect()).unwrap();
    let mu = Linearizer::new(ext, (0..100).map(|_| uniform_poly(&mut rng, 2, 2)).collect()).unwrap();
    for _ in 0..100 {
        let x = [rng.gen_range(0..10), rng.gen_range(0..10)];
        let y = [rng.gen_range(0..10), rng.gen_range(0..10)];
        let a = ttstar_kernel(&fam2, &x, &y, &lam, &mu, 3, 2).unwrap();
        let b = ttstar_kernel(&fam2, &y, &x, &mu, &lam, 2, 3).unwrap();
        assert!((a - b.conj()).norm() <= 1e-12);
    }
}

#[test]
fn split_is_partition_with_interval_levels() {
    let mut rng = rng_for(44, 0);
    for a0 in [1.0, 2.0, DEFAULT_A0] {
        let table: Vec<RealPoly> = (0..60)
            .map(|i| if i % 3 == 0 { uniform_poly(&mut rng, 2, 1) } else { multiscale_poly(&mut rng, 2, 1, 12) })
            .collect();
        let rep = split_as_ek(&table, 12, a0).unwrap();
        assert!(rep.partition_ok && rep.intervals_ok && rep.nonpositive_once_ok, "A0 = {a0}");
        assert_eq!(rep.rows.len(), 60 * 12);
    }
}

#[test]
fn zero_modulation_schur_is_autocorrelation_norm() {
    for k in 1..=6u32 {
        let fam = build_psi(KernelSpec::Hilbert, k).unwrap();
        let half = fam.table(k).unwrap().half_width() as usize;
        let lin = Linearizer::constant(vec![8 * half + 8], RealPoly::zero(1, 2)).unwrap();
        let rep = gram_schur(&fam, &lin, k).unwrap();
        let l1 = autocorrelation_l1(&fam, k).unwrap();
        assert!((rep.row_sup - l1).abs() <= 1e-10, "k = {k}: {} vs {l1}", rep.row_sup);
    }
    let fam = build_psi(KernelSpec::LogOscillating, 4).unwrap();
    let half = fam.table(4).unwrap().half_width() as usize;
    let lin = Linearizer::constant(vec![8 * half + 8], RealPoly::zero(1, 2)).unwrap();
    let rep = gram_schur(&fam, &lin, 4).unwrap();
    assert!((rep.row_sup - autocorrelation_l1(&fam, 4).unwrap()).abs() <= 1e-10);
}
