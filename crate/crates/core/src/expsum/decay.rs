use rand::Rng;
use serde::Serialize;

use super::progression::{Amplitude, Progression};
use super::sum::{amplitude_mean, exp_sum};
use crate::coeffnorm::coeff_norm;
use crate::error::{Error, Result};
use crate::numeric::{fit_line, max_of, median};
use crate::polycore::{Coeff, IndexSet, MultiIndex, Poly, RealPoly, ScaleVec};
use crate::sampling::{random_progression, rng_for, sample_at_level};

/// Parameters of a decay sweep.
#[derive(Debug, Clone, Serialize)]
pub struct DecayParams {
    pub d: u32,
    pub dim: usize,
    pub radius: u64,
    pub s_values: Vec<i64>,
    pub trials: usize,
    pub k: i64,
    /// Exponent used in the reference bound `(|k|/2^s)^θ + Σ R_i^{−θ}`.
    pub theta: f64,
    /// Proposal draws allowed per accepted sample.
    pub budget: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub d: u32,
    #[serde(rename = "D")]
    pub dim: usize,
    pub s: i64,
    pub r: u64,
    pub k: i64,
    pub trials: usize,
    pub draws: u64,
    pub median_abs: Option<f64>,
    pub max_abs: Option<f64>,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    /// Fitted `θ̂` from `log max|sum|` against `−s·log 2` over populated `s ≥ 1`.
    pub theta_hat: Option<f64>,
    /// Standard error of the fitted slope.
    pub theta_se: Option<f64>,
    /// Max of `max_abs` over width-2 bins of `s`, in increasing `s`.
    pub binned_max: Vec<(i64, f64)>,
    pub bin_inversions: usize,
}

/// Reference bound `(|k|/2^s)^θ + Σ R_i^{−θ}`.
pub fn decay_bound(k: i64, s: i64, radii: &[f64], theta: f64) -> f64 {
    (k.unsigned_abs() as f64 / 2f64.powi(s as i32)).powf(theta)
        + radii.iter().map(|r| r.powf(-theta)).sum::<f64>()
}

/// Sample polynomials with `N_R(P) = 2^s` for each `s`, sum `e(k·P)` over the
/// full box, and fit the decay exponent.
pub fn verify_sum_decay(params: &DecayParams) -> Result<DecayTable> {
    if params.trials == 0 {
        return Err(Error::domain("trials must be positive"));
    }
    let r = ScaleVec::uniform(params.dim, params.radius as f64)?;
    let prog = Progression::full_box(&vec![params.radius; params.dim])?;
    let amp = Amplitude::one();
    let mut rows = Vec::new();
    for (cell, &s) in params.s_values.iter().enumerate() {
        let mut rng = rng_for(params.seed, cell as u64);
        let mut values = Vec::with_capacity(params.trials);
        let mut draws = 0;
        for _ in 0..params.trials {
            let (p, used) = sample_at_level(&mut rng, params.d, &r, s, params.budget);
            draws += used;
            let Some(p) = p else { break };
            values.push(exp_sum(&p, params.k, &prog, &amp)?.abs);
        }
        let populated = !values.is_empty();
        let max_abs = populated.then(|| max_of(&values));
        let bound = (s >= 1).then(|| decay_bound(params.k, s, r.radii(), params.theta));
        rows.push(DecayRow {
            d: params.d,
            dim: params.dim,
            s,
            r: params.radius,
            k: params.k,
            trials: values.len(),
            draws,
            median_abs: populated.then(|| median(&values)),
            max_abs,
            bound,
            ratio: max_abs.zip(bound).map(|(m, b)| m / b),
        });
    }
    Ok(summarize(rows))
}

fn summarize(rows: Vec<DecayRow>) -> DecayTable {
    let fit_rows: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.s >= 1)
        .filter_map(|r| r.max_abs.filter(|m| *m > 0.0).map(|m| (-(r.s as f64) * 2f64.ln(), m.ln())))
        .collect();
    let xs: Vec<f64> = fit_rows.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = fit_rows.iter().map(|p| p.1).collect();
    let (theta_hat, theta_se) = match fit_line(&xs, &ys) {
        Some((slope, icpt)) => (Some(slope), slope_se(&xs, &ys, slope, icpt)),
        None => (None, None),
    };
    let mut binned_max: Vec<(i64, f64)> = Vec::new();
    for row in rows.iter().filter(|r| r.s >= 1) {
        let Some(m) = row.max_abs else { continue };
        let bin = (row.s - 1).div_euclid(2);
        match binned_max.iter_mut().find(|b| b.0 == bin) {
            Some(b) => b.1 = b.1.max(m),
            None => binned_max.push((bin, m)),
        }
    }
    binned_max.sort_by_key(|b| b.0);
    let bin_inversions = binned_max.windows(2).filter(|w| w[1].1 > w[0].1).count();
    DecayTable { rows, theta_hat, theta_se, binned_max, bin_inversions }
}

fn slope_se(xs: &[f64], ys: &[f64], slope: f64, icpt: f64) -> Option<f64> {
    let n = xs.len();
    if n < 3 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - icpt).powi(2)).sum();
    Some((sse / (n - 2) as f64 / sxx).sqrt())
}

/// One instance of the small-norm comparison.
#[derive(Debug, Clone, Serialize)]
pub struct SmallNormCase {
    pub s: i64,
    pub deviation: f64,
    /// `deviation / 2^s`.
    pub ratio: f64,
}

/// `|sum − mean(φ)|` against `N_R(kP) = 2^s ≤ 1`, with `R` the progression's box.
pub fn small_norm_deviation<C: Coeff>(
    p: &Poly<C>,
    k: i64,
    prog: &Progression,
    amp: &Amplitude,
) -> Result<SmallNormCase> {
    let r = ScaleVec::new(prog.ambient().iter().map(|&n| n as f64).collect())?;
    let n = coeff_norm(&p.scale_int(k)?, &r)?;
    let s = match n.s0 {
        Some(s) if s <= 0 => s,
        Some(s) => {
            return Err(Error::precondition(format!("N(kP) = 2^{s} exceeds 1")));
        }
        None => {
            // kP has integer coefficients: the sum equals the mean exactly
            let sum = exp_sum(p, k, prog, amp)?;
            let dev = (sum.value - amplitude_mean(prog, amp)).norm();
            return Ok(SmallNormCase { s: i64::MIN, deviation: dev, ratio: 0.0 });
        }
    };
    let sum = exp_sum(p, k, prog, amp)?;
    let deviation = (sum.value - amplitude_mean(prog, amp)).norm();
    Ok(SmallNormCase { s, deviation, ratio: deviation / 2f64.powi(s as i32) })
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallNormSuite {
    pub cases: usize,
    pub max_ratio: f64,
    pub worst: Option<SmallNormCase>,
}

/// Random instances of the small-norm comparison: `P = (P' + J)/k` with
/// `N_R(P') = 2^s ≤ 1` and `J` integral, random sub-progressions of `[R]^D`,
/// constant or tent amplitudes.
pub fn small_norm_suite(d: u32, dim: usize, radius: u64, cases: usize, seed: u64) -> Result<SmallNormSuite> {
    let r = ScaleVec::uniform(dim, radius as f64)?;
    let ambient = vec![radius; dim];
    let g = IndexSet::new(d, dim);
    let mut rng = rng_for(seed, 0);
    let mut max_ratio = 0.0f64;
    let mut worst = None;
    let mut done = 0;
    while done < cases {
        let s = rng.gen_range(-8i64..=0);
        let (base, _) = sample_at_level(&mut rng, d, &r, s, 10_000);
        let Some(base) = base else { continue };
        let k = rng.gen_range(1i64..=4);
        let terms: Vec<(MultiIndex, f64)> = g
            .members()
            .iter()
            .map(|a| {
                let lam = base.coeff(a).copied().unwrap_or(0.0);
                let shift = rng.gen_range(-3i64..=3) as f64;
                (a.clone(), (lam + shift) / k as f64)
            })
            .collect();
        let p = RealPoly::restricted(dim, d, terms)?;
        let prog = if rng.gen_bool(0.5) {
            Progression::full_box(&ambient)?
        } else {
            random_progression(&mut rng, &ambient, 4)
        };
        let amp = if rng.gen_bool(0.5) {
            Amplitude::one()
        } else {
            Amplitude::tent(&ambient, 1.0 / (1.0 + dim as f64 / 2.0))
        };
        let case = match small_norm_deviation(&p, k, &prog, &amp) {
            Ok(c) => c,
            // rounding in (λ+J)/k can push N(kP) across a level; redraw
            Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        };
        if case.ratio > max_ratio {
            max_ratio = case.ratio;
            worst = Some(case);
        }
        done += 1;
    }
    Ok(SmallNormSuite { cases, max_ratio, worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formula() {
        let b = decay_bound(1, 4, &[16.0], 0.25);
        assert!((b - (0.5 + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn small_sweep_decays() {
        let params = DecayParams {
            d: 2,
            dim: 1,
            radius: 1 << 10,
            s_values: (1..=9).collect(),
            trials: 10,
            k: 1,
            theta: 0.25,
            budget: 20_000,
            seed: 11,
        };
        let t = verify_sum_decay(&params).unwrap();
        assert!(t.rows.iter().all(|r| r.trials == 10));
        assert!(t.theta_hat.unwrap() > 0.05, "{:?}", t.theta_hat);
    }

    #[test]
    fn second_clause_small_suite() {
        let suite = small_norm_suite(2, 1, 256, 50, 3).unwrap();
        assert!(suite.max_ratio <= 4.0, "{:?}", suite.worst);
    }
}
