//! Seeded random sources and samplers for polynomials at a prescribed
//! coefficient-norm level.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffnorm::coeff_norm_capped;
use crate::error::Error;
use crate::expsum::{Axis, Progression};
use crate::polycore::{IndexSet, MultiIndex, RealPoly, ScaleVec};

/// Independent deterministic stream `stream` under `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Polynomial in `Γ_{d,D}` with independent uniform coefficients in `[0, 1)`.
pub fn uniform_poly<R: Rng>(rng: &mut R, d: u32, dim: usize) -> RealPoly {
    let g = IndexSet::new(d, dim);
    RealPoly::restricted(dim, d, g.members().iter().map(|a| (a.clone(), rng.gen::<f64>())))
        .expect("index set members are admissible")
}

/// One draw from the mixture proposal aimed at `N_R(P) = 2^s`.
///
/// With probability 1/5 the coefficients are uniform. Otherwise they are
/// `a_α/Q + ε_α` with `Q ≤ 2^s` and `|ε_α| R^α` of order `2^s/(Q|Γ|)`
/// (for `s ≤ 0`, just `ε_α` of order `2^s/|Γ|`).
pub fn propose_at_level<R: Rng>(rng: &mut R, d: u32, r: &ScaleVec, s: i64) -> RealPoly {
    let dim = r.dim();
    if rng.gen_bool(0.2) {
        return uniform_poly(rng, d, dim);
    }
    let g = IndexSet::new(d, dim);
    let m = g.len() as f64;
    let level = 2f64.powi(s as i32);
    let q: u64 = if s >= 1 { rng.gen_range(1..=1u64 << s) } else { 1 };
    let spread = 2f64.powf(rng.gen_range(-1.5..1.0));
    let terms: Vec<(MultiIndex, f64)> = g
        .members()
        .iter()
        .map(|a| {
            let num = if q > 1 { rng.gen_range(0..q) } else { 0 };
            let eps = rng.gen_range(-1.0..1.0) * spread * level / (q as f64 * r.weight(a) * m);
            (a.clone(), (num as f64 / q as f64 + eps).rem_euclid(1.0))
        })
        .collect();
    RealPoly::restricted(dim, d, terms).expect("index set members are admissible")
}

/// Rejection sampler for `N_R(P) = 2^s`. Returns the polynomial (if one was
/// accepted within `budget` draws) and the number of draws used.
pub fn sample_at_level<R: Rng>(
    rng: &mut R,
    d: u32,
    r: &ScaleVec,
    s: i64,
    budget: u64,
) -> (Option<RealPoly>, u64) {
    let cap = s.max(0) as u32;
    for draw in 1..=budget {
        let p = propose_at_level(rng, d, r, s);
        match coeff_norm_capped(&p, r, cap) {
            Ok(n) if n.s0 == Some(s) => return (Some(p), draw),
            Ok(_) | Err(Error::Budget(_)) => continue,
            Err(_) => continue,
        }
    }
    (None, budget)
}

/// Random polynomial whose coefficient norm stays below `2^{k_max+11}` at
/// every scale `R ≤ 2^{k_max}`, with level changes spread over `0..=k_max`.
///
/// Coefficients are `a_α/q + ε_α` with `q` log-uniform in `1..=256` and
/// `|ε_α| = 2^{−e_α}`, `e_α` uniform in `[k_max(|α|−1), k_max|α| + 8]`
/// (`ε_α = 0` with probability 1/5), redrawn if zero. For `d = 2, D = 1` a quarter of the
/// draws are uniform instead, whose norm is at most about `2^{k_max+1}`.
pub fn multiscale_poly<R: Rng>(rng: &mut R, d: u32, dim: usize, k_max: u32) -> RealPoly {
    if d == 2 && dim == 1 && rng.gen_bool(0.25) {
        return uniform_poly(rng, d, dim);
    }
    let g = IndexSet::new(d, dim);
    loop {
        let p = multiscale_draw(rng, &g, d, dim, k_max);
        if !p.is_zero() {
            return p;
        }
    }
}

fn multiscale_draw<R: Rng>(rng: &mut R, g: &IndexSet, d: u32, dim: usize, k_max: u32) -> RealPoly {
    let q = 2f64.powf(rng.gen_range(0.0..8.0)).round().max(1.0) as u64;
    let k = k_max as f64;
    let terms: Vec<(MultiIndex, f64)> = g
        .members()
        .iter()
        .map(|a| {
            let num = rng.gen_range(0..q) as f64;
            let deg = a.degree() as f64;
            let eps = if rng.gen_bool(0.2) {
                0.0
            } else {
                let e = rng.gen_range(k * (deg - 1.0)..=k * deg + 8.0);
                if rng.gen_bool(0.5) { 2f64.powf(-e) } else { -(2f64.powf(-e)) }
            };
            (a.clone(), (num / q as f64 + eps).rem_euclid(1.0))
        })
        .collect();
    RealPoly::restricted(dim, d, terms).expect("index set members are admissible")
}

/// A random sub-progression of `[N₁] × … × [N_D]` with gaps in `1..=max_gap`
/// and at least half the admissible length.
pub fn random_progression<R: Rng>(rng: &mut R, ambient: &[u64], max_gap: i64) -> Progression {
    let axes = ambient
        .iter()
        .map(|&n| {
            let gap = rng.gen_range(1..=max_gap.max(1)).min(n.max(1) as i64);
            let max_count = ((n as i64 - 1) / gap + 1) as u64;
            let count = rng.gen_range(max_count.div_ceil(2)..=max_count);
            let span = (count as i64 - 1) * gap;
            let start = rng.gen_range(1..=(n as i64 - span));
            Axis { start, gap, count }
        })
        .collect();
    Progression::new(axes, ambient.to_vec()).expect("sampled progression fits its box")
}
