//! `coeffnorm`, `expsum` and `sublevel`.

use clap::{Args, Subcommand};
use oscsum::coeffnorm::{check_convexity, coeff_norm_capped, trivial_bound};
use oscsum::expsum::{
    amplitude_mean, continuous_sublevel, count_sublevel, exp_sum, oscillatory_integral, small_norm_suite,
    sublevel_large_norm, sublevel_small_norm, verify_sum_decay, Amplitude, DecayParams,
};
use oscsum::polycore::ScaleVec;
use serde::Serialize;
use serde_json::json;

use super::{to_value, with_poly, Outcome, PolyArgs, ProgressionArgs};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::parse::{int_list_arg, real_arg, real_list_arg, IntList, RealList};

#[derive(Args, Debug, Serialize)]
pub struct CoeffnormArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    /// Radii R_i, one value for all axes or one per axis
    #[arg(long = "R", value_parser = real_list_arg)]
    pub r: RealList,
    /// Also check that level sets in k are intervals for R = 2^k, k = 0..=K
    #[arg(long, value_name = "K")]
    pub convexity: Option<u32>,
}

fn scale_vec(r: &RealList, dim: usize) -> CliResult<ScaleVec> {
    let radii = match r.0.len() {
        1 => vec![r.0[0]; dim],
        n if n == dim => r.0.clone(),
        n => return Err(CliError::Usage(format!("--R needs 1 or {dim} values, got {n}"))),
    };
    Ok(ScaleVec::new(radii)?)
}

pub fn coeffnorm(a: &CoeffnormArgs, cfg: &RunConfig) -> CliResult<Outcome> {
    let poly = a.poly.load()?;
    let max_s = u32::try_from(cfg.max_s).unwrap_or(u32::MAX);
    let mut result = with_poly!(&poly, p => {
        let r = scale_vec(&a.r, p.dim())?;
        let n = coeff_norm_capped(p, &r, max_s)?;
        let mut v = to_value(&n)?;
        v["status"] = json!(if n.is_zero() { "zero" } else { "finite" });
        v["value"] = json!(n.value());
        v["trivial_bound"] = json!(trivial_bound(p, &r));
        v["radii"] = json!(r.radii());
        if let Some(k) = a.convexity {
            v["convexity"] = if p.is_zero() { json!(null) } else { to_value(check_convexity(p, k)?)? };
        }
        v
    });
    if result["convexity"].is_null() {
        if let Some(m) = result.as_object_mut() {
            m.remove("convexity");
        }
    }
    Ok(Outcome::new(result)?.with_input("poly_normalized", poly.to_json_value()))
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ExpsumMode {
    /// One normalized sum (1/|box|) Σ_{n∈P} φ(n) e(P(kn))
    Sum(SumArgs),
    /// Decay of |sum| against N_R(kP) = 2^s over sampled level sets
    Decay(DecayArgs),
    /// |sum − mean(φ)| against 2^s on random small-norm instances
    SmallNorm(SmallNormArgs),
}

impl ExpsumMode {
    pub fn name(&self) -> &'static str {
        match self {
            ExpsumMode::Sum(_) => "sum",
            ExpsumMode::Decay(_) => "decay",
            ExpsumMode::SmallNorm(_) => "small-norm",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SumArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    #[command(flatten)]
    pub prog: ProgressionArgs,
    /// Integer dilation k in P(kn)
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub k: i64,
    /// Use the tent amplitude c·Π(1 − n_i/(2N_i)) instead of φ ≡ 1
    #[arg(long, value_parser = real_arg)]
    pub tent: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct DecayArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long = "D", default_value_t = 1)]
    pub dim: usize,
    /// Radius R on every axis (also the box side)
    #[arg(long = "R")]
    pub r: u64,
    /// Levels s, as a list or range such as 1..9
    #[arg(long, value_parser = int_list_arg)]
    pub s: IntList,
    /// Samples per level
    #[arg(long, default_value_t = 30)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub k: i64,
}

#[derive(Args, Debug, Serialize)]
pub struct SmallNormArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long = "D", default_value_t = 1)]
    pub dim: usize,
    #[arg(long = "R")]
    pub r: u64,
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
}

pub fn expsum(mode: &ExpsumMode, cfg: &RunConfig) -> CliResult<Outcome> {
    match mode {
        ExpsumMode::Sum(a) => {
            let poly = a.poly.load()?;
            let prog = a.prog.build()?;
            let amp = match a.tent {
                Some(c) => Amplitude::tent(prog.ambient(), c),
                None => Amplitude::one(),
            };
            let rep = with_poly!(&poly, p => exp_sum(p, a.k, &prog, &amp)?);
            let mut v = to_value(&rep)?;
            v["amplitude"] = json!(amp.name());
            v["amplitude_mean"] = json!(amplitude_mean(&prog, &amp));
            Ok(Outcome::new(v)?.with_input("poly_normalized", poly.to_json_value()).with_input("progression", to_value(&prog)?))
        }
        ExpsumMode::Decay(a) => {
            let params = DecayParams {
                d: a.d,
                dim: a.dim,
                radius: a.r,
                s_values: a.s.0.clone(),
                trials: a.trials,
                k: a.k,
                theta: cfg.theta,
                budget: cfg.draw_budget,
                seed: cfg.seed,
            };
            Outcome::new(verify_sum_decay(&params)?)
        }
        ExpsumMode::SmallNorm(a) => Outcome::new(small_norm_suite(a.d, a.dim, a.r, a.cases, cfg.seed)?),
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SublevelMode {
    /// #{v ∈ [−R, R]^D : min_{q ≤ Q} ‖q·P(v)‖ ≤ threshold}
    Count(CountArgs),
    /// Small-norm sublevel bound with parameters A and B
    Small(SmallArgs),
    /// Large-norm sublevel density and the exponent κ₀
    Large(LargeArgs),
    /// |∫_{[0,1]^D} e(P(t)) dt| against the decay in the Euclidean norm
    Integral(IntegralArgs),
    /// Measure of {t ∈ [0,1]^D : |P(t)| ≤ ε}
    Continuous(ContinuousArgs),
}

impl SublevelMode {
    pub fn name(&self) -> &'static str {
        match self {
            SublevelMode::Count(_) => "count",
            SublevelMode::Small(_) => "small",
            SublevelMode::Large(_) => "large",
            SublevelMode::Integral(_) => "integral",
            SublevelMode::Continuous(_) => "continuous",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    #[arg(long = "R")]
    pub r: u64,
    /// Largest denominator q
    #[arg(long = "Q", default_value_t = 1)]
    pub q_max: u64,
    #[arg(long, value_parser = real_arg)]
    pub threshold: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SmallArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    #[arg(long = "R")]
    pub r: u64,
    /// Denominator range A (at most R^θ)
    #[arg(long = "A")]
    pub a: u64,
    /// Threshold parameter B (at least 100)
    #[arg(long = "B", value_parser = real_arg)]
    pub b: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct LargeArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    #[arg(long = "R")]
    pub r: u64,
    /// Threshold exponent κ
    #[arg(long, value_parser = real_arg)]
    pub kappa: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct IntegralArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    /// Constant of the bound (default: the frozen calibration constant)
    #[arg(long, value_parser = real_arg)]
    pub c: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct ContinuousArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    #[arg(long, value_parser = real_arg)]
    pub eps: f64,
    /// Constant of the bound (default: the frozen calibration constant)
    #[arg(long, value_parser = real_arg)]
    pub c: Option<f64>,
    /// Cells per axis (at least 1024)
    #[arg(long, default_value_t = 4096)]
    pub resolution: usize,
}

pub fn sublevel(mode: &SublevelMode, cfg: &RunConfig) -> CliResult<Outcome> {
    let (poly_args, result) = match mode {
        SublevelMode::Count(a) => {
            let poly = a.poly.load()?;
            let count = with_poly!(&poly, p => count_sublevel(p, a.r, a.q_max, a.threshold, cfg.enumeration_budget)?);
            let points = (2 * a.r + 1) as f64;
            let total = points.powi(with_poly!(&poly, p => p.dim()) as i32);
            (poly, json!({ "count": count, "points": total, "density": count as f64 / total }))
        }
        SublevelMode::Small(a) => {
            let poly = a.poly.load()?;
            let rep = with_poly!(&poly, p => sublevel_small_norm(p, a.r, a.a, a.b, cfg.theta, cfg.enumeration_budget)?);
            let mut v = to_value(&rep)?;
            v["constant"] = json!(cfg.sublevel_small_constant);
            v["pass"] = json!(rep.ratio <= cfg.sublevel_small_constant);
            (poly, v)
        }
        SublevelMode::Large(a) => {
            let poly = a.poly.load()?;
            let rep = with_poly!(&poly, p => sublevel_large_norm(p, a.r, a.kappa, cfg.eta, cfg.theta, cfg.enumeration_budget)?);
            let mut v = to_value(&rep)?;
            v["constant"] = json!(cfg.sublevel_large_constant);
            v["pass"] = json!(rep.ratio <= cfg.sublevel_large_constant);
            (poly, v)
        }
        SublevelMode::Integral(a) => {
            let poly = a.poly.load()?;
            let c = a.c.unwrap_or(cfg.osc_integral_constant);
            let rep = with_poly!(&poly, p => oscillatory_integral(p, c, cfg.quadrature_nodes)?);
            (poly, to_value(rep)?)
        }
        SublevelMode::Continuous(a) => {
            let poly = a.poly.load()?;
            let c = a.c.unwrap_or(cfg.continuous_sublevel_constant);
            let rep = with_poly!(&poly, p => continuous_sublevel(p, a.eps, c, a.resolution)?);
            (poly, to_value(rep)?)
        }
    };
    Ok(Outcome::new(result)?.with_input("poly_normalized", poly_args.to_json_value()))
}
