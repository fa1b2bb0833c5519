//! One pass of the inductive argument as computation: difference along the
//! last axis, certify each difference, pigeon-hole the denominators, and
//! condense to a denominator for the top-degree coefficients.

use std::collections::BTreeMap;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::condense::{condense, CondenseOutcome};
use super::inverse::{
    delta_power_bound, inverse_verify_with, terms_defects, Defect, InverseOptions, InverseOutcome, DEFAULT_C_MAX,
    DEFAULT_MAX_Q,
};
use crate::error::{Error, Result};
use crate::expsum::{exp_sum, fejer, Amplitude, Axis, Progression};
use crate::polycore::{Coeff, MultiIndex, Poly};

pub const STAGE_VDC: &str = "van_der_corput";
pub const STAGE_INVERSE: &str = "inverse_theorem";
pub const STAGE_PIGEONHOLE: &str = "pigeonhole";
pub const STAGE_CONDENSE: &str = "condensation";

/// Largest progression the demonstration accepts.
pub const DEFAULT_DEMO_POINTS: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InductionParams {
    pub c_max: f64,
    pub max_q: u64,
    /// Differencing range `K = ⌊c·δ·L_D⌋`.
    pub k_fraction: f64,
    /// `h` survives when its differenced sum is at least `τ·δ²`.
    pub tau: f64,
    pub condense_constant: f64,
    /// Smallest admissible size of `H` and `H′`.
    pub min_set: usize,
}

impl Default for InductionParams {
    fn default() -> Self {
        InductionParams {
            c_max: DEFAULT_C_MAX,
            max_q: DEFAULT_MAX_Q,
            k_fraction: 0.125,
            tau: 0.5,
            condense_constant: crate::calibration::CONDENSE_CONSTANT,
            min_set: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTrace {
    pub name: &'static str,
    pub input_size: usize,
    pub output_size: usize,
    pub constants: BTreeMap<String, f64>,
    pub ok: bool,
    pub note: String,
}

/// Analysis of one difference `n ↦ P(n + hσ_D e_D) − P(n)`.
#[derive(Debug, Clone, Serialize)]
pub struct DifferenceRecord {
    pub h: u64,
    pub sum_abs: f64,
    pub selected: bool,
    pub q: Option<u64>,
    pub max_defect: Option<f64>,
    pub outcome: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FinalCertificate {
    pub q: u64,
    pub defects: Vec<Defect>,
    pub max_defect: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InductionTrace {
    pub dim: usize,
    pub degree: u32,
    pub delta: f64,
    pub params: InductionParams,
    /// Differencing axis (0-based, the last one).
    pub axis: usize,
    /// `P` was split into the part free of the last variable and the rest.
    pub split: bool,
    pub top_alphas: Vec<String>,
    pub sum_abs: f64,
    pub stages: Vec<StageTrace>,
    pub differences: Vec<DifferenceRecord>,
    pub complete: bool,
    pub failed_stage: Option<&'static str>,
    pub certificate: Option<FinalCertificate>,
}

fn stage(name: &'static str, input: usize, output: usize, constants: &[(&str, f64)], ok: bool, note: String) -> StageTrace {
    StageTrace {
        name,
        input_size: input,
        output_size: output,
        constants: constants.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        ok,
        note,
    }
}

impl InductionTrace {
    fn fail(mut self, name: &'static str) -> Self {
        self.complete = false;
        self.failed_stage = Some(name);
        self
    }
}

/// Runs the pipeline on `P` over `prog` (`D ≤ 2`, `d ≤ 3`) and returns the
/// trace. Per-`h` analyses run in parallel; records are merged in `h` order.
pub fn induction_demo<C: Coeff>(
    p: &Poly<C>,
    prog: &Progression,
    delta: f64,
    params: &InductionParams,
) -> Result<InductionTrace> {
    let dim = p.dim();
    let degree = p.degree();
    if dim != prog.dim() {
        return Err(Error::Dimension { expected: dim, got: prog.dim() });
    }
    if dim > 2 || !(2..=3).contains(&degree) {
        return Err(Error::domain(format!("demo supports D <= 2 and 2 <= d <= 3, got D={dim}, d={degree}")));
    }
    if prog.len() > DEFAULT_DEMO_POINTS {
        return Err(Error::budget(format!("{} points exceed the demo budget", prog.len())));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("delta must lie in (0, 1)"));
    }
    let sum = exp_sum(p, 1, prog, &Amplitude::one())?;
    if sum.abs < delta {
        return Err(Error::precondition(format!("|sum| = {:.6e} is below delta = {delta}", sum.abs)));
    }
    let axis = dim - 1;
    let top: Vec<(MultiIndex, C)> = p
        .terms()
        .filter(|(a, _)| a.degree() == degree && a.exps()[axis] > 0)
        .map(|(a, c)| (a.clone(), c.clone()))
        .collect();
    let mut trace = InductionTrace {
        dim,
        degree,
        delta,
        params: *params,
        axis,
        split: dim > 1,
        top_alphas: top.iter().map(|(a, _)| a.to_string()).collect(),
        sum_abs: sum.abs,
        stages: Vec::new(),
        differences: Vec::new(),
        complete: true,
        failed_stage: None,
        certificate: None,
    };
    if top.is_empty() {
        trace.stages.push(stage(STAGE_VDC, 0, 0, &[], false, "no top-degree term involves the last variable".into()));
        return Ok(trace.fail(STAGE_VDC));
    }

    // Differencing along the last axis.
    let ax = prog.axes()[axis];
    let k = (params.k_fraction * delta * ax.count as f64).floor() as u64;
    if k < 1 || k >= ax.count {
        trace.stages.push(stage(STAGE_VDC, ax.count as usize, 0, &[("K", k as f64)], false, "differencing range K is degenerate".into()));
        return Ok(trace.fail(STAGE_VDC));
    }
    let shortened = |h: u64| -> Result<Progression> {
        let mut axes: Vec<Axis> = prog.axes().to_vec();
        axes[axis].count -= h;
        Progression::new(axes, prog.ambient().to_vec())
    };
    let diffs: Vec<Result<(Poly<C>, Progression, f64)>> = (1..=k)
        .into_par_iter()
        .map(|h| {
            let q = p.shift_difference(h as i64 * ax.gap, axis)?;
            let sub = shortened(h)?;
            let s = exp_sum(&q, 1, &sub, &Amplitude::one())?.abs;
            Ok((q, sub, s))
        })
        .collect();
    let diffs = diffs.into_iter().collect::<Result<Vec<_>>>()?;
    let threshold = params.tau * delta * delta;
    let zero_term = prog.len() as f64 / prog.ambient_volume();
    let mut rhs = fejer(k as f64, 0.0)? * zero_term;
    for (i, (_, _, s)) in diffs.iter().enumerate() {
        rhs += 2.0 * fejer(k as f64, (i + 1) as f64)? * s;
    }
    let selected: Vec<u64> = (1..=k).filter(|&h| diffs[h as usize - 1].2 >= threshold).collect();
    let vdc_ok = selected.len() >= params.min_set;
    trace.stages.push(stage(
        STAGE_VDC,
        k as usize,
        selected.len(),
        &[("K", k as f64), ("threshold", threshold), ("lhs_sq", sum.abs * sum.abs), ("fejer_average", rhs)],
        vdc_ok,
        format!("{} of {k} shifts keep |sum| >= tau*delta^2", selected.len()),
    ));
    trace.differences = diffs
        .iter()
        .enumerate()
        .map(|(i, (_, _, s))| DifferenceRecord {
            h: i as u64 + 1,
            sum_abs: *s,
            selected: *s >= threshold,
            q: None,
            max_defect: None,
            outcome: None,
        })
        .collect();
    if !vdc_ok {
        return Ok(trace.fail(STAGE_VDC));
    }

    // Inverse theorem on each selected difference, top degree only.
    let opts = InverseOptions { c_max: params.c_max, max_q: params.max_q, top_degree_only: true };
    let reports: Vec<Result<_>> = selected
        .par_iter()
        .map(|&h| {
            let (q, sub, _) = &diffs[h as usize - 1];
            inverse_verify_with(q, sub, threshold, &opts)
        })
        .collect();
    let mut certified: Vec<(u64, u64)> = Vec::new();
    let mut capped = false;
    for (&h, rep) in selected.iter().zip(reports) {
        let rep = rep?;
        capped |= rep.capped;
        let rec = &mut trace.differences[h as usize - 1];
        match rep.outcome {
            InverseOutcome::Certificate(c) => {
                rec.q = Some(c.q);
                rec.max_defect = Some(c.max_defect);
                rec.outcome = Some("certificate");
                certified.push((h, c.q));
            }
            InverseOutcome::SmallBox { .. } => rec.outcome = Some("small_box"),
            InverseOutcome::Counterexample(c) => {
                rec.q = Some(c.best_q);
                rec.max_defect = Some(c.best_max_defect);
                rec.outcome = Some("counterexample");
            }
        }
    }
    let inv_ok = certified.len() >= params.min_set;
    trace.stages.push(stage(
        STAGE_INVERSE,
        selected.len(),
        certified.len(),
        &[
            ("delta_h", threshold),
            ("C_max", params.c_max),
            ("bound", delta_power_bound(threshold, params.c_max)),
            ("max_q", params.max_q as f64),
        ],
        inv_ok,
        if capped { "search capped at max_q".into() } else { String::new() },
    ));
    if !inv_ok {
        return Ok(trace.fail(STAGE_INVERSE));
    }

    // Largest bucket of equal denominators, ties to the smaller one.
    let mut buckets: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &(h, q) in &certified {
        buckets.entry(q).or_default().push(h);
    }
    let (q_common, h_prime) = buckets
        .iter()
        .fold(None::<(u64, &Vec<u64>)>, |best, (q, hs)| match best {
            Some((_, b)) if b.len() >= hs.len() => best,
            _ => Some((*q, hs)),
        })
        .map(|(q, hs)| (q, hs.clone()))
        .ok_or_else(|| Error::Internal("no certified shift".into()))?;
    let pig_ok = h_prime.len() >= params.min_set;
    trace.stages.push(stage(
        STAGE_PIGEONHOLE,
        certified.len(),
        h_prime.len(),
        &[("q", q_common as f64), ("buckets", buckets.len() as f64)],
        pig_ok,
        String::new(),
    ));
    if !pig_ok {
        return Ok(trace.fail(STAGE_PIGEONHOLE));
    }

    // Condensation on α₀ = Q·σ_D·λ_α with Q = q·lcm(α_D).
    let lcm_ad = top.iter().fold(1u64, |acc, (a, _)| acc.lcm(&(a.exps()[axis] as u64)));
    let big_q = q_common * lcm_ad;
    let mult = big_q as i128 * ax.gap as i128;
    let delta_c = h_prime.len() as f64 / k as f64;
    let mut q0 = 1u64;
    let mut consts: Vec<(String, f64)> = vec![("Q".into(), big_q as f64), ("delta_c".into(), delta_c)];
    for (a, c) in &top {
        let alpha0 = c.checked_mul_int(mult).ok_or_else(|| Error::Overflow(format!("Q sigma lambda for {a}")))?;
        let m = super::inverse::TorusMul::new(&alpha0);
        let eps = h_prime.iter().map(|&h| m.at(h as i128)).fold(0.0, f64::max);
        let rep = condense(&alpha0, &h_prime, k, eps, delta_c, params.condense_constant)?;
        consts.push((format!("eps{a}"), eps));
        match rep.outcome {
            CondenseOutcome::Found { q, .. } => {
                consts.push((format!("q0{a}"), q as f64));
                q0 = q0.lcm(&q);
            }
            CondenseOutcome::NotFound { best_q, .. } => {
                consts.push((format!("best_q{a}"), best_q as f64));
                let refs: Vec<(&str, f64)> = consts.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                trace.stages.push(stage(STAGE_CONDENSE, h_prime.len(), 0, &refs, false, format!("no q for {a}")));
                return Ok(trace.fail(STAGE_CONDENSE));
            }
        }
    }
    let final_q = q0 * big_q * ax.gap as u64;
    let ambient: Vec<f64> = prog.ambient().iter().map(|&n| n as f64).collect();
    let defects = terms_defects(&top, &ambient, final_q);
    let max_defect = defects.iter().map(|d| d.value).fold(0.0, f64::max);
    let bound = delta_power_bound(delta, params.c_max);
    let holds = final_q as f64 <= bound && max_defect <= bound;
    consts.push(("final_q".into(), final_q as f64));
    let refs: Vec<(&str, f64)> = consts.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    trace.stages.push(stage(
        STAGE_CONDENSE,
        h_prime.len(),
        1,
        &refs,
        holds,
        if holds { String::new() } else { "final denominator misses delta^-C_max".into() },
    ));
    trace.certificate = Some(FinalCertificate { q: final_q, defects, max_defect, bound, holds });
    if !holds {
        return Ok(trace.fail(STAGE_CONDENSE));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{RatPoly, RealPoly};
    use num_rational::Rational64;

    #[test]
    fn denominator_five_divides_final_q() {
        let prog = Progression::full_box(&[10_000]).unwrap();
        let p: RealPoly = Poly::restricted(1, 2, [(MultiIndex::new(vec![2]), 2.0 / 5.0)]).unwrap();
        let t = induction_demo(&p, &prog, 0.1, &InductionParams::default()).unwrap();
        assert!(t.complete, "{t:#?}");
        let q = t.certificate.unwrap().q;
        assert_eq!(q % 5, 0);
        let names: Vec<_> = t.stages.iter().map(|s| s.name).collect();
        assert_eq!(names, [STAGE_VDC, STAGE_INVERSE, STAGE_PIGEONHOLE, STAGE_CONDENSE]);

        let r: RatPoly = Poly::restricted(1, 2, [(MultiIndex::new(vec![2]), Rational64::new(2, 5))]).unwrap();
        let t = induction_demo(&r, &prog, 0.1, &InductionParams::default()).unwrap();
        assert!(t.complete);
        assert_eq!(t.certificate.unwrap().max_defect, 0.0);
    }

    #[test]
    fn two_dimensional_cubic() {
        let prog = Progression::full_box(&[120, 120]).unwrap();
        let p: RatPoly = Poly::restricted(
            2,
            3,
            [
                (MultiIndex::new(vec![1, 2]), Rational64::new(1, 5)),
                (MultiIndex::new(vec![0, 3]), Rational64::new(2, 5)),
                (MultiIndex::new(vec![2, 0]), Rational64::new(1, 3)),
            ],
        )
        .unwrap();
        let t = induction_demo(&p, &prog, 0.1, &InductionParams { k_fraction: 0.5, ..Default::default() }).unwrap();
        assert!(t.split);
        assert!(t.complete, "{t:#?}");
        assert_eq!(t.certificate.unwrap().q % 5, 0);
    }

    #[test]
    fn small_sum_rejected() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let prog = Progression::full_box(&[10_000]).unwrap();
        let p: RealPoly = Poly::restricted(1, 2, [(MultiIndex::new(vec![2]), golden)]).unwrap();
        assert!(matches!(induction_demo(&p, &prog, 0.1, &InductionParams::default()), Err(Error::Precondition(_))));
    }
}
