//! `invtest`, `vdc`, `condense`, `rescale` and `calibrate`.

use std::path::PathBuf;

use clap::Args;
use num_rational::Rational64;
use oscsum::calibration as cal;
use oscsum::invthm::{
    condense as condense_run, induction_demo, inverse_verify_with, rescale as rescale_run, vdc_analytic_constant,
    vdc_difference, verify_partition, InductionParams, InverseOptions,
};
use oscsum::polycore::{parse_literal, CoeffLiteral};
use serde::Serialize;
use serde_json::json;

use super::{to_value, with_poly, Outcome, PolyArgs, ProgressionArgs};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::parse::{int_list_arg, real_arg, IntList};

#[derive(Args, Debug, Serialize)]
pub struct InvtestArgs {
    #[command(flatten)]
    pub poly: PolyArgs,
    #[command(flatten)]
    pub prog: ProgressionArgs,
    /// Lower bound δ on |sum| assumed by the theorem
    #[arg(long, value_parser = real_arg)]
    pub delta: f64,
    /// Exponent C_max in δ^{−C_max} (overrides the config key c_max)
    #[arg(long = "Cmax", value_parser = real_arg)]
    pub c_max: Option<f64>,
    /// Certify only the top-degree coefficients
    #[arg(long)]
    pub top_degree_only: bool,
    /// Trace one inductive step (differencing, certificates, pigeonhole, condensation)
    #[arg(long)]
    pub demo: bool,
}

pub fn invtest(a: &InvtestArgs, cfg: &RunConfig) -> CliResult<Outcome> {
    let poly = a.poly.load()?;
    let prog = a.prog.build()?;
    let result = if a.demo {
        let params = InductionParams {
            c_max: cfg.c_max,
            max_q: cfg.max_q,
            condense_constant: cfg.condense_constant,
            ..InductionParams::default()
        };
        with_poly!(&poly, p => to_value(induction_demo(p, &prog, a.delta, &params)?)?)
    } else {
        let opts = InverseOptions { c_max: cfg.c_max, max_q: cfg.max_q, top_degree_only: a.top_degree_only };
        with_poly!(&poly, p => to_value(inverse_verify_with(p, &prog, a.delta, &opts)?)?)
    };
    Ok(Outcome::new(result)?
        .with_input("poly_normalized", poly.to_json_value())
        .with_input("progression", to_value(&prog)?))
}

#[derive(Args, Debug, Serialize)]
pub struct VdcArgs {
    /// Phases F(n) = P(n) mod 1 for n = 1..=N
    #[arg(long, conflicts_with_all = ["phases_file", "suite"], requires = "n")]
    pub poly: Option<String>,
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// File of phases, whitespace- or comma-separated
    #[arg(long, conflicts_with = "suite")]
    pub phases_file: Option<PathBuf>,
    /// Run the randomized suite with this many cases instead
    #[arg(long)]
    pub suite: Option<usize>,
    /// Differencing ranges H
    #[arg(long, value_parser = int_list_arg, default_value = "1,2,4,8")]
    pub h: IntList,
}

/// Largest phase sequence accepted.
const MAX_PHASES: u64 = 1 << 24;

pub fn vdc(a: &VdcArgs, cfg: &RunConfig) -> CliResult<Outcome> {
    if let Some(cases) = a.suite {
        let s = cal::vdc_suite(cases, cfg.seed)?;
        let mut v = to_value(&s)?;
        v["config_limit"] = json!(cfg.c_vdc);
        v["within_config_limit"] = json!(s.max_ratio <= cfg.c_vdc);
        return Outcome::new(v);
    }
    let phases: Vec<f64> = match (&a.poly, &a.phases_file) {
        (Some(text), _) => {
            let n = a.n.ok_or_else(|| CliError::Usage("--N is required with --poly".into()))?;
            if n == 0 || n > MAX_PHASES {
                return Err(CliError::Usage(format!("--N must lie in 1..={MAX_PHASES}")));
            }
            let p = PolyArgs { poly: Some(text.clone()), poly_file: None, exact: false }.load()?;
            with_poly!(&p, p => {
                if p.dim() != 1 {
                    return Err(CliError::Usage("phases need a polynomial in one variable".into()));
                }
                (1..=n as i64).map(|i| p.phase_at(&[i])).collect::<Result<Vec<_>, _>>()?
            })
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            text.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().map_err(|_| CliError::Usage(format!("bad phase `{t}`"))))
                .collect::<CliResult<Vec<_>>>()?
        }
        (None, None) => return Err(CliError::Usage("give --poly with --N, --phases-file or --suite".into())),
    };
    let mut rows = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for &h in &a.h.0 {
        let h = usize::try_from(h).map_err(|_| CliError::Usage(format!("H must be nonnegative, got {h}")))?;
        let r = vdc_difference(&phases, h)?;
        max_ratio = max_ratio.max(r.ratio);
        let mut v = to_value(&r)?;
        v["sharp_constant"] = json!(vdc_analytic_constant(phases.len(), h));
        rows.push(v);
    }
    Outcome::new(json!({
        "rows": rows,
        "max_ratio": max_ratio,
        "config_limit": cfg.c_vdc,
        "within_config_limit": max_ratio <= cfg.c_vdc,
    }))
}

#[derive(Args, Debug, Serialize)]
pub struct CondenseArgs {
    /// Frequency α₀: `num/den` is kept exact, a decimal is a float
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: String,
    #[arg(long = "N")]
    pub n: u64,
    /// Explicit set H ⊂ [1, N]
    #[arg(long, value_parser = int_list_arg, conflicts_with = "multiples_of")]
    pub set: Option<IntList>,
    /// H = multiples of this integer in [1, N]
    #[arg(long)]
    pub multiples_of: Option<u64>,
    /// Bound ε on ‖hα₀‖ over H
    #[arg(long, value_parser = real_arg)]
    pub eps: f64,
    /// Density δ with |H| ≥ δN (default |H|/N)
    #[arg(long, value_parser = real_arg)]
    pub delta: Option<f64>,
}

pub fn condense(a: &CondenseArgs, cfg: &RunConfig) -> CliResult<Outcome> {
    let set: Vec<u64> = match (&a.set, a.multiples_of) {
        (Some(s), _) => s.as_u64("set").map_err(CliError::Usage)?,
        (None, Some(q)) if q >= 1 => (1..=a.n).filter(|h| h % q == 0).collect(),
        _ => return Err(CliError::Usage("give --set or --multiples-of (at least 1)".into())),
    };
    let delta = a.delta.unwrap_or(set.len() as f64 / a.n.max(1) as f64);
    let rep = match parse_literal(&a.alpha)? {
        CoeffLiteral::Ratio(num, den) if den != 0 => {
            condense_run(&Rational64::new(num, den), &set, a.n, a.eps, delta, cfg.condense_constant)?
        }
        CoeffLiteral::Ratio(..) => return Err(CliError::Usage("zero denominator in --alpha".into())),
        CoeffLiteral::Real(x) => condense_run(&x, &set, a.n, a.eps, delta, cfg.condense_constant)?,
    };
    Outcome::new(rep)
}

#[derive(Args, Debug, Serialize)]
pub struct RescaleArgs {
    #[command(flatten)]
    pub prog: ProgressionArgs,
    /// Modulus K the pieces are adapted to
    #[arg(long = "K")]
    pub k: u64,
    /// Target fraction δ of each axis length
    #[arg(long, value_parser = real_arg)]
    pub target: f64,
    /// Largest admissible remainder fraction
    #[arg(long, value_parser = real_arg, default_value = "1")]
    pub max_remainder: f64,
}

pub fn rescale(a: &RescaleArgs) -> CliResult<Outcome> {
    let prog = a.prog.build()?;
    let rep = rescale_run(&prog, a.k, a.target, a.max_remainder)?;
    let exact = verify_partition(&prog, &rep)?;
    let mut v = to_value(&rep)?;
    v["partition_exact"] = json!(exact);
    Ok(Outcome::new(v)?.with_input("progression", to_value(&prog)?))
}

#[derive(Args, Debug, Serialize)]
pub struct CalibrateArgs {
    /// Run one suite: sublevel_small_norm, sublevel_large_norm, vdc, taylor_shift,
    /// condense, oscillatory_integral or continuous_sublevel
    #[arg(long)]
    pub suite: Option<String>,
    /// Cases for a single suite (default: its standard size)
    #[arg(long, requires = "suite")]
    pub cases: Option<usize>,
}

fn config_limit(name: &str, cfg: &RunConfig) -> Option<f64> {
    Some(match name {
        "sublevel_small_norm" => cfg.sublevel_small_constant,
        "sublevel_large_norm" => cfg.sublevel_large_constant,
        "vdc" => cfg.c_vdc,
        "taylor_shift" => cfg.taylor_constant,
        "condense" => cfg.condense_constant,
        "oscillatory_integral" => cfg.osc_integral_constant,
        "continuous_sublevel" => cfg.continuous_sublevel_constant,
        _ => return None,
    })
}

fn annotate(s: &cal::SuiteResult, cfg: &RunConfig) -> CliResult<serde_json::Value> {
    let mut v = to_value(s)?;
    let limit = config_limit(s.name, cfg);
    v["config_limit"] = json!(limit);
    v["within_config_limit"] = json!(limit.is_some_and(|l| s.max_ratio <= l));
    Ok(v)
}

pub fn calibrate(a: &CalibrateArgs, cfg: &RunConfig) -> CliResult<Outcome> {
    let seed = cfg.seed;
    if let Some(name) = &a.suite {
        let (default_cases, run): (usize, fn(usize, u64) -> oscsum::Result<cal::SuiteResult>) = match name.as_str() {
            "sublevel_small_norm" => (100, cal::sublevel_small_suite),
            "sublevel_large_norm" => (100, cal::sublevel_large_suite),
            "vdc" => (1000, cal::vdc_suite),
            "taylor_shift" => (200, cal::taylor_suite),
            "condense" => (200, cal::condense_suite),
            "oscillatory_integral" => (50, cal::oscillatory_integral_suite),
            "continuous_sublevel" => (50, cal::continuous_sublevel_suite),
            other => return Err(CliError::Usage(format!("unknown suite `{other}`"))),
        };
        let s = run(a.cases.unwrap_or(default_cases), seed)?;
        return Outcome::new(annotate(&s, cfg)?);
    }
    let rep = cal::calibrate_all(seed)?;
    let suites = rep.suites.iter().map(|s| annotate(s, cfg)).collect::<CliResult<Vec<_>>>()?;
    Outcome::new(json!({
        "seed": rep.seed,
        "freeze_factor": rep.freeze_factor,
        "pass": rep.pass,
        "suites": suites,
    }))
}
