//! Calibrate-then-freeze constants. Each suite below was run once with the
//! default seed; the largest observed ratio is recorded here, and later runs
//! assert their ratios stay within twice the recorded value.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::{continuous_sublevel, oscillatory_integral, sublevel_large_norm, sublevel_small_norm};
use crate::invthm::{condense, taylor_shift_check, vdc_difference};
use crate::numeric::wrap01;
use crate::polycore::{IndexSet, MultiIndex, RealPoly, ScaleVec};
use crate::sampling::{rng_for, sample_at_level, uniform_poly};

/// Seed used for the recorded calibration run.
pub const CALIBRATION_SEED: u64 = 20_240_601;

/// Default `θ` in the sublevel right-hand sides.
pub const DEFAULT_THETA: f64 = 0.25;

/// Default `η` for the large-norm sublevel regime.
pub const DEFAULT_ETA: f64 = 0.5;

/// Multiplier between the recorded maximum and the asserted limit.
pub const FREEZE_FACTOR: f64 = 2.0;

pub const SUBLEVEL_SMALL_RECORDED: f64 = 0.33;
pub const SUBLEVEL_LARGE_RECORDED: f64 = 0.16;
pub const VDC_RECORDED: f64 = 1.03;
pub const TAYLOR_RECORDED: f64 = 2.79;
pub const CONDENSE_RECORDED: f64 = 1.0;
pub const OSC_INTEGRAL_RECORDED: f64 = 1.35;
pub const CONTINUOUS_SUBLEVEL_RECORDED: f64 = 1.48;

/// `C_vdc`.
pub const C_VDC: f64 = FREEZE_FACTOR * VDC_RECORDED;
/// Constant in the Taylor-shift bound.
pub const TAYLOR_CONSTANT: f64 = FREEZE_FACTOR * TAYLOR_RECORDED;
/// Constant in the condensation bound.
pub const CONDENSE_CONSTANT: f64 = FREEZE_FACTOR * CONDENSE_RECORDED;
pub const SUBLEVEL_SMALL_CONSTANT: f64 = FREEZE_FACTOR * SUBLEVEL_SMALL_RECORDED;
pub const SUBLEVEL_LARGE_CONSTANT: f64 = FREEZE_FACTOR * SUBLEVEL_LARGE_RECORDED;
pub const OSC_INTEGRAL_CONSTANT: f64 = FREEZE_FACTOR * OSC_INTEGRAL_RECORDED;
pub const CONTINUOUS_SUBLEVEL_CONSTANT: f64 = FREEZE_FACTOR * CONTINUOUS_SUBLEVEL_RECORDED;

/// Outcome of one calibration suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_ratio: f64,
    pub recorded: f64,
    pub limit: f64,
    pub pass: bool,
    /// Suite-specific extra statistics.
    pub extra: Vec<(String, f64)>,
}

impl SuiteResult {
    fn new(name: &'static str, ratios: &[f64], recorded: f64, extra: Vec<(String, f64)>) -> Self {
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        let limit = FREEZE_FACTOR * recorded;
        SuiteResult { name, cases: ratios.len(), max_ratio, recorded, limit, pass: max_ratio <= limit, extra }
    }
}

/// Small-norm sublevel counts, `D = 1`, `R ≤ 2^12`, against
/// `R·A·(N^{−θ} + B^{−θ} + R^{−θ})`.
pub fn sublevel_small_suite(cases: usize, seed: u64) -> Result<SuiteResult> {
    let mut rng = rng_for(seed, 1);
    let mut ratios = Vec::with_capacity(cases);
    while ratios.len() < cases {
        let k = rng.gen_range(8..=12u32);
        let radius = 1u64 << k;
        let d = rng.gen_range(2..=3u32);
        let r = ScaleVec::uniform(1, radius as f64)?;
        let s = rng.gen_range(1..=k as i64);
        let (Some(p), _) = sample_at_level(&mut rng, d, &r, s, 20_000) else { continue };
        let a_max = (2f64.powi(s as i32).powf(DEFAULT_THETA) * (1.0 + 1e-12)).floor().max(1.0) as u64;
        let a = rng.gen_range(1..=a_max);
        let b = 2f64.powf(rng.gen_range(100f64.log2()..=12.0));
        match sublevel_small_norm(&p, radius, a, b, DEFAULT_THETA, 1 << 26) {
            Ok(rep) => ratios.push(rep.ratio),
            Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(SuiteResult::new("sublevel_small_norm", &ratios, SUBLEVEL_SMALL_RECORDED, Vec::new()))
}

/// Large-norm sublevel counts, `D = 1`, `R ≤ 2^12`, `N ≥ R^η`, with the
/// pooled exponent `κ̂₀ = Σ x y / Σ x²` for `x = ln R`, `y = −ln(count/R)`.
pub fn sublevel_large_suite(cases: usize, seed: u64) -> Result<SuiteResult> {
    let mut rng = rng_for(seed, 2);
    let mut ratios = Vec::with_capacity(cases);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    let mut kappa_min = f64::INFINITY;
    let mut empty = 0usize;
    while ratios.len() < cases {
        let k = rng.gen_range(8..=12u32);
        let radius = 1u64 << k;
        let d = rng.gen_range(2..=3u32);
        let r = ScaleVec::uniform(1, radius as f64)?;
        let s_min = (DEFAULT_ETA * k as f64).ceil() as i64;
        let s = rng.gen_range(s_min..=k as i64);
        let (Some(p), _) = sample_at_level(&mut rng, d, &r, s, 20_000) else { continue };
        let kappa = [0.0, 0.05, 0.1, 0.2][rng.gen_range(0..4)];
        match sublevel_large_norm(&p, radius, kappa, DEFAULT_ETA, DEFAULT_THETA, 1 << 26) {
            Ok(rep) => {
                ratios.push(rep.ratio);
                if rep.count == 0 {
                    empty += 1;
                } else {
                    let x = (radius as f64).ln();
                    sxy += x * rep.kappa0 * x;
                    sxx += x * x;
                    kappa_min = kappa_min.min(rep.kappa0);
                }
            }
            Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let kappa_hat = if sxx > 0.0 { sxy / sxx } else { f64::INFINITY };
    Ok(SuiteResult::new(
        "sublevel_large_norm",
        &ratios,
        SUBLEVEL_LARGE_RECORDED,
        vec![("kappa0_fit".into(), kappa_hat), ("kappa0_min".into(), kappa_min), ("empty_cases".into(), empty as f64)],
    ))
}

/// Differencing ratios over constant, linear, quadratic and random cubic
/// phases on intervals of length 16 to 4096.
pub fn vdc_suite(cases: usize, seed: u64) -> Result<SuiteResult> {
    let mut rng = rng_for(seed, 3);
    let mut ratios = Vec::with_capacity(cases);
    for i in 0..cases {
        let len = 1usize << rng.gen_range(4..=12);
        let h = rng.gen_range(0..=len.min(256));
        let c: [f64; 4] = match i % 4 {
            0 => [rng.gen(), 0.0, 0.0, 0.0],
            1 => [rng.gen(), rng.gen(), 0.0, 0.0],
            2 => [rng.gen(), rng.gen(), rng.gen(), 0.0],
            _ => [rng.gen(), rng.gen(), rng.gen(), rng.gen()],
        };
        let phases: Vec<f64> = (1..=len as i128)
            .map(|n| {
                let mut acc = 0.0;
                for (e, &ce) in c.iter().enumerate() {
                    acc += crate::numeric::frac_mul(ce, n.pow(e as u32));
                }
                wrap01(acc)
            })
            .collect();
        ratios.push(vdc_difference(&phases, h)?.ratio);
    }
    Ok(SuiteResult::new("vdc", &ratios, VDC_RECORDED, Vec::new()))
}

/// Taylor-shift ratios `deviation / (Δ·Σ M_i/N_i·Q^{d−1})` for near-rational
/// coefficients, `D ∈ {1, 2}`, `d ∈ {2, 3}`.
pub fn taylor_suite(cases: usize, seed: u64) -> Result<SuiteResult> {
    let mut rng = rng_for(seed, 4);
    let mut ratios = Vec::with_capacity(cases);
    while ratios.len() < cases {
        let dim = rng.gen_range(1..=2usize);
        let d = rng.gen_range(2..=3u32);
        let q = rng.gen_range(1..=20u64);
        let n: Vec<u64> = (0..dim).map(|_| if dim == 1 { rng.gen_range(500..=4000) } else { rng.gen_range(60..=300) }).collect();
        let nf: Vec<f64> = n.iter().map(|&x| x as f64).collect();
        let delta = 10f64.powf(rng.gen_range(-4.0..-1.0));
        let g = IndexSet::new(d, dim);
        let terms: Vec<(MultiIndex, f64)> = g
            .members()
            .iter()
            .map(|a| {
                let num = rng.gen_range(0..q) as f64;
                let u = rng.gen_range(-1.0..1.0);
                (a.clone(), num / q as f64 + u * delta / (q as f64 * a.weight(&nf)))
            })
            .collect();
        let p = RealPoly::restricted(dim, d, terms)?;
        let defect = p
            .terms()
            .map(|(a, c)| {
                let f = crate::numeric::frac_mul(*c, q as i128);
                f.min(1.0 - f) * a.weight(&nf)
            })
            .fold(0.0, f64::max);
        if defect == 0.0 {
            continue;
        }
        let m: Vec<u64> = n.iter().map(|&x| rng.gen_range(1..=(x / 10).max(1)).min(if dim == 2 { 30 } else { 3000 })).collect();
        let t0: Vec<i64> = n.iter().map(|&x| rng.gen_range(1..=x as i64)).collect();
        let rep = taylor_shift_check(&p, q, defect * (1.0 + 1e-9), &t0, &m, &n, 1.0)?;
        ratios.push(rep.max_deviation / rep.bound);
    }
    Ok(SuiteResult::new("taylor_shift", &ratios, TAYLOR_RECORDED, Vec::new()))
}

/// Condensation ratios `min_{q ≤ ⌈1/δ⌉} ‖qα₀‖·δN/(εq)` with `H` the full
/// sublevel set `{n ≤ N : ‖nα₀‖ ≤ ε}` and `ε ≤ δ/8`.
pub fn condense_suite(cases: usize, seed: u64) -> Result<SuiteResult> {
    let mut rng = rng_for(seed, 5);
    let mut ratios = Vec::with_capacity(cases);
    while ratios.len() < cases {
        let n = rng.gen_range(200..=5000u64);
        let q0 = rng.gen_range(1..=12u64);
        let alpha0: f64 = if rng.gen_bool(0.8) {
            rng.gen_range(0..q0) as f64 / q0 as f64 + rng.gen_range(-1.0..1.0) * 10f64.powf(rng.gen_range(-9.0..-3.0))
        } else {
            rng.gen()
        };
        let eps = 10f64.powf(rng.gen_range(-7.0..-2.0));
        let set: Vec<u64> = (1..=n)
            .filter(|&h| {
                let f = crate::numeric::frac_mul(alpha0, h as i128);
                f.min(1.0 - f) <= eps
            })
            .collect();
        let delta = set.len() as f64 / n as f64;
        if set.len() < 2 || delta < 8.0 * eps {
            continue;
        }
        let rep = condense(&alpha0, &set, n, eps, delta, 1.0)?;
        // smallest constant for which some q ≤ ⌈1/δ⌉ meets the bound
        let best = (1..=rep.q_max)
            .map(|q| {
                let f = crate::numeric::frac_mul(alpha0, q as i128);
                f.min(1.0 - f) * delta * n as f64 / (eps * q as f64)
            })
            .fold(f64::INFINITY, f64::min);
        ratios.push(best);
    }
    Ok(SuiteResult::new("condense", &ratios, CONDENSE_RECORDED, Vec::new()))
}

/// `|∫ e(P)| / (1 + ‖P‖)^{−1/d}` for random polynomials with norms up to 200.
pub fn oscillatory_integral_suite(cases: usize, seed: u64) -> Result<SuiteResult> {
    let mut rng = rng_for(seed, 6);
    let mut ratios = Vec::with_capacity(cases);
    for _ in 0..cases {
        let dim = rng.gen_range(1..=2usize);
        let d = rng.gen_range(2..=3u32);
        let scale = 10f64.powf(rng.gen_range(0.0..if dim == 1 { 2.3 } else { 1.3 }));
        let base = uniform_poly(&mut rng, d, dim);
        let p = RealPoly::restricted(dim, d, base.terms().map(|(a, c)| (a.clone(), (c - 0.5) * 2.0 * scale)))?;
        ratios.push(oscillatory_integral(&p, 1.0, 1 << 27)?.ratio);
    }
    Ok(SuiteResult::new("oscillatory_integral", &ratios, OSC_INTEGRAL_RECORDED, Vec::new()))
}

/// `|{|P| ≤ ε}| / (ε/‖P‖)^{1/d}` by grid counting, `D = 1`.
pub fn continuous_sublevel_suite(cases: usize, seed: u64) -> Result<SuiteResult> {
    let mut rng = rng_for(seed, 7);
    let mut ratios = Vec::with_capacity(cases);
    for _ in 0..cases {
        let d = rng.gen_range(2..=3u32);
        let mut terms: Vec<(MultiIndex, f64)> = (1..=d).map(|e| (MultiIndex::new(vec![e]), rng.gen_range(-4.0..4.0))).collect();
        if rng.gen_bool(0.5) {
            terms.push((MultiIndex::new(vec![0]), rng.gen_range(-1.0..1.0)));
        }
        let p = RealPoly::general(1, terms)?;
        let eps = 10f64.powf(rng.gen_range(-4.0..0.0));
        ratios.push(continuous_sublevel(&p, eps, 1.0, 4096)?.ratio);
    }
    Ok(SuiteResult::new("continuous_sublevel", &ratios, CONTINUOUS_SUBLEVEL_RECORDED, Vec::new()))
}

/// Every suite at its standard size.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub seed: u64,
    pub freeze_factor: f64,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

pub fn calibrate_all(seed: u64) -> Result<CalibrationReport> {
    let suites = vec![
        sublevel_small_suite(100, seed)?,
        sublevel_large_suite(100, seed)?,
        vdc_suite(1000, seed)?,
        taylor_suite(200, seed)?,
        condense_suite(200, seed)?,
        oscillatory_integral_suite(50, seed)?,
        continuous_sublevel_suite(50, seed)?,
    ];
    let pass = suites.iter().all(|s| s.pass);
    Ok(CalibrationReport { seed, freeze_factor: FREEZE_FACTOR, suites, pass })
}
