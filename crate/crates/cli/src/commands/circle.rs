//! `gauss`, `recovery` and `multiplier`.

use clap::{Args, Subcommand};
use oscsum::circle::{
    assemble_l, check_vanishing, gauss_sum, kernel_k0_density, major_arc_sweep, multiplier_m, multiplier_phi,
    orthogonality, recovery_identity, riemann_check, vanishing_sweep, MajorSweepParams, RationalPoint, SweepBudget,
};
use oscsum::polycore::IndexSet;
use oscsum::Error;
use serde::Serialize;
use serde_json::json;

use super::{expect_len, to_value, FamilyArgs, Outcome, PolyArgs};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::parse::{int_list_arg, real_arg, real_list_arg, IntList, RealList};

/// `A/Q, B/Q` given on the command line.
#[derive(Args, Debug, Serialize)]
pub struct PointArgs {
    #[arg(long = "Q")]
    pub q: Option<u64>,
    /// Numerators A_α, one per member of Γ_{d,D} in graded order
    #[arg(long = "A", value_parser = int_list_arg, allow_negative_numbers = true)]
    pub a: Option<IntList>,
    /// Numerators B_i, one per axis (default 0)
    #[arg(long = "B", value_parser = int_list_arg, allow_negative_numbers = true)]
    pub b: Option<IntList>,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long = "D", default_value_t = 1)]
    pub dim: usize,
}

impl PointArgs {
    pub fn build(&self) -> CliResult<RationalPoint> {
        let q = self.q.ok_or_else(|| CliError::Usage("--Q is required".into()))?;
        let a = self.a.as_ref().ok_or_else(|| CliError::Usage("--A is required".into()))?.0.clone();
        let b = self.b.as_ref().map(|b| b.0.clone()).unwrap_or_else(|| vec![0; self.dim]);
        expect_len(&a, IndexSet::new(self.d, self.dim).len(), "A")?;
        expect_len(&b, self.dim, "B")?;
        Ok(RationalPoint::new(self.d, self.dim, q, a, b)?)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct GaussArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Also check the vanishing criterion at this point
    #[arg(long)]
    pub check_vanishing: bool,
    /// Instead of one point, sweep every Q up to this bound for the vanishing criterion
    #[arg(long, value_name = "QMAX", conflicts_with_all = ["q", "a", "b", "check_vanishing"])]
    pub sweep: Option<u64>,
    /// Stop the sweep after this many (A, B) pairs
    #[arg(long, requires = "sweep")]
    pub max_pairs: Option<u64>,
}

pub fn gauss(a: &GaussArgs, _cfg: &RunConfig) -> CliResult<Outcome> {
    if let Some(q_max) = a.sweep {
        let cov = vanishing_sweep(
            a.point.dim,
            a.point.d,
            q_max,
            SweepBudget { max_pairs: a.max_pairs, deadline: None },
        )?;
        return Outcome::new(cov);
    }
    let p = a.point.build()?;
    let s = gauss_sum(&p)?;
    let mut v = to_value(&s)?;
    if a.check_vanishing {
        v["vanishing"] = to_value(check_vanishing(&p)?)?;
    }
    Ok(Outcome::new(v)?.with_input("point", to_value(&p)?))
}

#[derive(Args, Debug, Serialize)]
pub struct RecoveryArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Single evaluation point n (one value per axis); default: all of [−n_max, n_max]^D
    #[arg(long, value_parser = int_list_arg, allow_negative_numbers = true)]
    pub n: Option<IntList>,
    #[arg(long, default_value_t = 20)]
    pub n_max: i64,
    /// Check every Q up to this bound and every A mod Q instead of one point
    #[arg(long, value_name = "QMAX", conflicts_with_all = ["q", "a", "b", "n"])]
    pub sweep: Option<u64>,
    /// Check orthogonality of additive characters mod Q at the evaluation points instead
    #[arg(long, conflicts_with = "sweep")]
    pub orthogonality: bool,
}

fn range_points(dim: usize, n_max: i64) -> Vec<Vec<i64>> {
    let side = (2 * n_max + 1) as usize;
    let total = side.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            let mut v = vec![0i64; dim];
            for x in v.iter_mut().rev() {
                *x = (idx % side) as i64 - n_max;
                idx /= side;
            }
            v
        })
        .collect()
}

#[derive(Debug, Default, Serialize)]
struct RecoveryTally {
    checked: u64,
    exact: u64,
    max_abs_diff: f64,
    first_failure: Option<serde_json::Value>,
}

/// Largest number of identity evaluations one invocation may run.
const RECOVERY_BUDGET: u64 = 1 << 24;

pub fn recovery(a: &RecoveryArgs) -> CliResult<Outcome> {
    if a.n_max < 0 {
        return Err(CliError::Usage("--n-max must be nonnegative".into()));
    }
    let (d, dim) = (a.point.d, a.point.dim);
    let points = match &a.n {
        Some(n) => {
            expect_len(&n.0, dim, "n")?;
            vec![n.0.clone()]
        }
        None => {
            let side = (2 * a.n_max + 1) as u64;
            if side.checked_pow(dim as u32).is_none_or(|t| t > RECOVERY_BUDGET) {
                return Err(Error::Budget(format!("[−{0}, {0}]^{dim} is too many points", a.n_max)).into());
            }
            range_points(dim, a.n_max)
        }
    };
    let mut tally = RecoveryTally::default();
    let mut record = |p: &RationalPoint, n: &[i64]| -> CliResult<()> {
        let r = recovery_identity(p, n)?;
        tally.checked += 1;
        if r.exact {
            tally.exact += 1;
        } else if tally.first_failure.is_none() {
            tally.first_failure = Some(json!({ "point": p, "n": n, "check": r }));
        }
        tally.max_abs_diff = tally.max_abs_diff.max(r.abs_diff);
        Ok(())
    };
    if let Some(q_max) = a.sweep {
        let g = IndexSet::new(d, dim).len() as u32;
        let mut work: u64 = 0;
        for q in 1..=q_max {
            work = q
                .checked_pow(g)
                .and_then(|t| t.checked_mul(points.len() as u64))
                .and_then(|t| t.checked_add(work))
                .filter(|&t| t <= RECOVERY_BUDGET)
                .ok_or_else(|| CliError::from(Error::Budget(format!("sweep up to Q = {q_max} is too large"))))?;
        }
        for q in 1..=q_max {
            let total = q.pow(g);
            for idx in 0..total {
                let mut rest = idx;
                let mut nums = vec![0i64; g as usize];
                for x in nums.iter_mut().rev() {
                    *x = (rest % q) as i64;
                    rest /= q;
                }
                let p = RationalPoint::new(d, dim, q, nums, vec![0; dim])?;
                for n in &points {
                    record(&p, n)?;
                }
            }
        }
        let pass = tally.exact == tally.checked;
        let mut v = to_value(&tally)?;
        v["pass"] = json!(pass);
        return Outcome::new(v);
    }
    if a.orthogonality {
        let q = a.point.q.ok_or_else(|| CliError::Usage("--Q is required".into()))?;
        let rows = points.iter().map(|n| orthogonality(q, n)).collect::<Result<Vec<_>, _>>()?;
        let exact = rows.iter().filter(|r| r.exact).count();
        return Outcome::new(json!({ "checked": rows.len(), "exact": exact, "pass": exact == rows.len(), "rows": rows }));
    }
    let p = a.point.build()?;
    if points.len() == 1 {
        return Ok(Outcome::new(recovery_identity(&p, &points[0])?)?.with_input("point", to_value(&p)?));
    }
    for n in &points {
        record(&p, n)?;
    }
    let pass = tally.exact == tally.checked;
    let mut v = to_value(&tally)?;
    v["pass"] = json!(pass);
    Ok(Outcome::new(v)?.with_input("point", to_value(&p)?))
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum MultiplierMode {
    /// m_{j,λ}(β) = Σ_n e(−λ(n) − β·n) ψ_j(n)
    M(EvalArgs),
    /// Φ_{j,ν}(β) by quadrature
    Phi(EvalArgs),
    /// L_{j,λ}(β) assembled from Gauss sums, next to m_{j,λ}(β)
    L(EvalArgs),
    /// m_{j,λ}(β) against S(A/Q,B/Q)·Φ_{j,λ−A/Q}(β−B/Q)
    Riemann(RiemannArgs),
    /// max |m − L| over sampled major-arc points for each j
    Sweep(SweepArgs),
    /// Exceptional-set density of the diagonal kernel average
    Density(DensityArgs),
}

impl MultiplierMode {
    pub fn name(&self) -> &'static str {
        match self {
            MultiplierMode::M(_) => "m",
            MultiplierMode::Phi(_) => "phi",
            MultiplierMode::L(_) => "l",
            MultiplierMode::Riemann(_) => "riemann",
            MultiplierMode::Sweep(_) => "sweep",
            MultiplierMode::Density(_) => "density",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub poly: PolyArgs,
    /// Scale j of the kernel piece
    #[arg(long)]
    pub j: u32,
    /// Frequency β, one value per axis
    #[arg(long, value_parser = real_list_arg, allow_negative_numbers = true)]
    pub beta: RealList,
}

#[derive(Args, Debug, Serialize)]
pub struct RiemannArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    #[arg(long = "Q")]
    pub q: u64,
    #[arg(long = "A", value_parser = int_list_arg, allow_negative_numbers = true)]
    pub a: IntList,
    #[arg(long = "B", value_parser = int_list_arg, allow_negative_numbers = true)]
    pub b: Option<IntList>,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Scales j, as a list or range such as 6..12
    #[arg(long, value_parser = int_list_arg, default_value = "6..12")]
    pub j: IntList,
    /// Sampled points per j
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Denominators of the sampled centres lie in 1..=q_max
    #[arg(long, default_value_t = 4)]
    pub q_max: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[arg(long = "Q")]
    pub q: u64,
    #[arg(long = "A", value_parser = int_list_arg, allow_negative_numbers = true)]
    pub a: IntList,
    /// Second numerator tuple A'
    #[arg(long = "A2", value_parser = int_list_arg, allow_negative_numbers = true)]
    pub a2: IntList,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long = "D", default_value_t = 1)]
    pub dim: usize,
    #[arg(long, value_parser = real_arg)]
    pub threshold: f64,
}

pub fn multiplier(mode: &MultiplierMode, cfg: &RunConfig) -> CliResult<Outcome> {
    match mode {
        MultiplierMode::M(e) | MultiplierMode::Phi(e) | MultiplierMode::L(e) => {
            let fam = e.family.build(e.j.max(1), cfg)?;
            let poly = e.poly.load()?;
            let lambda = poly.to_real();
            let beta = &e.beta.0;
            let result = match mode {
                MultiplierMode::M(_) => {
                    let m = multiplier_m(&fam, e.j, &lambda, beta)?;
                    json!({ "value": m, "abs": m.norm() })
                }
                MultiplierMode::Phi(_) => {
                    let phi = multiplier_phi(&fam, e.j, &lambda, beta, cfg.node_budget())?;
                    let mut v = to_value(phi)?;
                    v["abs"] = json!(phi.value.norm());
                    v
                }
                _ => {
                    let l = assemble_l(&fam, e.j, &lambda, beta, &cfg.major_params())?;
                    let m = multiplier_m(&fam, e.j, &lambda, beta)?;
                    let mut v = to_value(&l)?;
                    v["m"] = json!(m);
                    v["error"] = json!((m - l.value).norm());
                    v
                }
            };
            Ok(Outcome::new(result)?.with_input("poly_normalized", poly.to_json_value()))
        }
        MultiplierMode::Riemann(r) => {
            let e = &r.eval;
            let fam = e.family.build(e.j.max(1), cfg)?;
            let poly = e.poly.load()?;
            let lambda = poly.to_real();
            let dim = lambda.dim();
            let b = r.b.as_ref().map(|b| b.0.clone()).unwrap_or_else(|| vec![0; dim]);
            let point = RationalPoint::new(lambda.degree_bound(), dim, r.q, r.a.0.clone(), b)?;
            let rep = riemann_check(&fam, e.j, &lambda, &e.beta.0, &point)?;
            Ok(Outcome::new(rep)?
                .with_input("poly_normalized", poly.to_json_value())
                .with_input("point", to_value(&point)?))
        }
        MultiplierMode::Sweep(s) => {
            let j_values = s
                .j
                .0
                .iter()
                .map(|&j| u32::try_from(j).ok().filter(|&j| j >= 1))
                .collect::<Option<Vec<u32>>>()
                .ok_or_else(|| CliError::Usage("--j values must be positive".into()))?;
            let j_max = j_values.iter().copied().max().unwrap_or(1);
            let fam = s.family.build(j_max, cfg)?;
            let params = MajorSweepParams {
                d: s.d,
                j_values,
                samples: s.samples,
                q_max: s.q_max,
                major: cfg.major_params(),
                seed: cfg.seed,
            };
            Outcome::new(major_arc_sweep(&fam, &params)?)
        }
        MultiplierMode::Density(a) => {
            let g = IndexSet::new(a.d, a.dim).len();
            expect_len(&a.a.0, g, "A")?;
            expect_len(&a.a2.0, g, "A2")?;
            let p1 = RationalPoint::new(a.d, a.dim, a.q, a.a.0.clone(), vec![0; a.dim])?;
            let p2 = RationalPoint::new(a.d, a.dim, a.q, a.a2.0.clone(), vec![0; a.dim])?;
            Outcome::new(kernel_k0_density(&p1, &p2, a.threshold)?)
        }
    }
}
