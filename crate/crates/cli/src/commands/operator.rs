//! `carleson` and `schur`.

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use oscsum::carleson::{
    autocorrelation_l1, carleson_apply, delta_response, error_norm_sweep, gram_schur_with_budget, refinement_stability,
    schur_sweep, split_as_ek, ApplyParams, ErrorNormParams, Grid, LambdaGrid, Linearizer, SchurSweepParams,
};
use oscsum::polycore::RealPoly;
use oscsum::sampling::{multiscale_poly, rng_for, uniform_poly};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::{to_value, FamilyArgs, Outcome};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::parse::{int_list_arg, IntList};

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum CarlesonMode {
    /// Apply the grid operator to one input
    Apply(ApplyArgs),
    /// ℓ² ratios at modulation refinement G and 2G on random inputs
    Refine(RefineArgs),
    /// Dyadic pieces ψ_j with their certificates
    Family(FamilyOnlyArgs),
}

impl CarlesonMode {
    pub fn name(&self) -> &'static str {
        match self {
            CarlesonMode::Apply(_) => "apply",
            CarlesonMode::Refine(_) => "refine",
            CarlesonMode::Family(_) => "family",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyOnlyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Number of dyadic pieces
    #[arg(long, default_value_t = 4)]
    pub j_max: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct ApplyArgs {
    #[command(flatten)]
    pub family: FamilyOnlyArgs,
    /// Degree bound of the modulating polynomials
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Modulation grid refinement G
    #[arg(long = "G", default_value_t = 2)]
    pub g: u64,
    /// Allowed truncation scales (default: all of 1..=j_max)
    #[arg(long, value_parser = int_list_arg)]
    pub truncations: Option<IntList>,
    /// Input grid: JSON {"extents":[..],"data":[..]} or binary (little-endian
    /// u64 D, D u64 extents, then f64 values with axis 0 slowest)
    #[arg(long, conflicts_with = "extents")]
    pub input: Option<PathBuf>,
    /// Box extents for a generated input
    #[arg(long, value_parser = int_list_arg, required_unless_present = "input")]
    pub extents: Option<IntList>,
    /// Point mass at this position instead of a random input
    #[arg(long, value_parser = int_list_arg, requires = "extents")]
    pub delta_at: Option<IntList>,
}

#[derive(Args, Debug, Serialize)]
pub struct RefineArgs {
    #[command(flatten)]
    pub family: FamilyOnlyArgs,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long = "G", default_value_t = 2)]
    pub g: u64,
    #[arg(long, value_parser = int_list_arg)]
    pub extents: IntList,
    /// Number of random inputs
    #[arg(long, default_value_t = 4)]
    pub inputs: usize,
}

fn extents_of(list: &IntList) -> CliResult<Vec<usize>> {
    Ok(list.as_u64("extents").map_err(CliError::Usage)?.into_iter().map(|v| v as usize).collect())
}

/// Uniform values in `[−1, 1)` on a box.
fn random_grid<R: Rng>(rng: &mut R, extents: Vec<usize>) -> CliResult<Grid> {
    let mut g = Grid::zeros(extents)?;
    for v in g.data.iter_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    Ok(g)
}

fn read_u64(bytes: &[u8], at: &mut usize) -> CliResult<u64> {
    let chunk = bytes.get(*at..*at + 8).ok_or_else(|| CliError::Usage("binary grid is truncated".into()))?;
    *at += 8;
    Ok(u64::from_le_bytes(chunk.try_into().expect("8-byte slice")))
}

/// Reads a grid file in JSON or the binary layout.
pub fn read_grid(path: &Path) -> CliResult<Grid> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    if first == Some(&b'{') {
        let g: Grid = serde_json::from_slice(&bytes).map_err(|e| CliError::Usage(format!("grid JSON: {e}")))?;
        return Grid::new(g.extents, g.data).map_err(|e| CliError::Usage(e.to_string()));
    }
    let mut at = 0;
    let dim = read_u64(&bytes, &mut at)?;
    if dim == 0 || dim > 8 {
        return Err(CliError::Usage(format!("binary grid dimension {dim} outside 1..=8")));
    }
    let extents = (0..dim).map(|_| read_u64(&bytes, &mut at).map(|e| e as usize)).collect::<CliResult<Vec<_>>>()?;
    let rest = &bytes[at..];
    if rest.len() % 8 != 0 {
        return Err(CliError::Usage("binary grid data is not a whole number of f64 values".into()));
    }
    let data = rest.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    Grid::new(extents, data).map_err(|e| CliError::Usage(e.to_string()))
}

fn truncations(list: &Option<IntList>) -> CliResult<Option<Vec<u32>>> {
    list.as_ref()
        .map(|l| {
            l.0.iter()
                .map(|&v| u32::try_from(v).map_err(|_| CliError::Usage(format!("bad truncation {v}"))))
                .collect()
        })
        .transpose()
}

pub fn carleson(mode: &CarlesonMode, cfg: &RunConfig) -> CliResult<Outcome> {
    match mode {
        CarlesonMode::Family(a) => Outcome::new(a.family.build(a.j_max, cfg)?.report()),
        CarlesonMode::Apply(a) => {
            let fam = a.family.family.build(a.family.j_max, cfg)?;
            let truncs = truncations(&a.truncations)?;
            let params = ApplyParams {
                grid: LambdaGrid::Uniform { d: a.d, dim: fam.dim(), refinement: a.g },
                truncations: truncs.clone(),
                tap_budget: cfg.tap_budget(),
            };
            let (f, at) = match (&a.input, &a.extents, &a.delta_at) {
                (Some(path), _, _) => (read_grid(path)?, None),
                (None, Some(ext), Some(at)) => {
                    let at = extents_of(at)?;
                    (Grid::delta(extents_of(ext)?, &at)?, Some(at))
                }
                (None, Some(ext), None) => (random_grid(&mut rng_for(cfg.seed, 0), extents_of(ext)?)?, None),
                (None, None, _) => return Err(CliError::Usage("--input or --extents is required".into())),
            };
            let rep = carleson_apply(&f, &fam, &params)?;
            let mut v = to_value(&rep)?;
            if let Some(at) = at {
                // compare against the closed form max_k |Σ_{k'≤k} ψ_k'(x − at)|
                let mut x = vec![0i64; f.dim()];
                let mut worst: f64 = 0.0;
                for idx in 0..f.len() {
                    rep.values.point(idx, &mut x);
                    let u: Vec<i64> = x.iter().zip(&at).map(|(&xi, &ai)| xi - ai as i64).collect();
                    worst = worst.max((rep.values.data[idx] - delta_response(&fam, &u, &truncs)?).abs());
                }
                v["closed_form_max_abs_diff"] = json!(worst);
            }
            Outcome::new(v)
        }
        CarlesonMode::Refine(a) => {
            let fam = a.family.family.build(a.family.j_max, cfg)?;
            let extents = extents_of(&a.extents)?;
            let mut rng = rng_for(cfg.seed, 0);
            let inputs = (0..a.inputs).map(|_| random_grid(&mut rng, extents.clone())).collect::<CliResult<Vec<_>>>()?;
            Outcome::new(refinement_stability(&fam, a.d, a.g, &inputs)?)
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SchurMode {
    /// Row and column Schur sums of the TT* kernel over level-set linearizers
    Sweep(SchurArgs),
    /// Unmodulated Gram kernel against the ℓ¹ norm of the autocorrelation
    Zero(ZeroArgs),
    /// Classify random scale tables into stationary, oscillatory and error pieces
    Split(SplitArgs),
    /// Single-scale operator norms over level-set pools
    Error(ErrorArgs),
}

impl SchurMode {
    pub fn name(&self) -> &'static str {
        match self {
            SchurMode::Sweep(_) => "sweep",
            SchurMode::Zero(_) => "zero",
            SchurMode::Split(_) => "split",
            SchurMode::Error(_) => "error",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SchurArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Scale k of the kernel piece; linearizers are sampled at R = 2^k
    #[arg(long, default_value_t = 8)]
    pub k: u32,
    #[arg(long, default_value_t = 512)]
    pub box_len: usize,
    #[arg(long, value_parser = int_list_arg, default_value = "2..10", allow_negative_numbers = true)]
    pub s: IntList,
    #[arg(long, default_value_t = 2)]
    pub trials: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ZeroArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 4)]
    pub k: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct SplitArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long = "D", default_value_t = 1)]
    pub dim: usize,
    /// Largest scale k
    #[arg(long, default_value_t = 12)]
    pub k_max: u32,
    /// Number of random polynomials in the table
    #[arg(long, default_value_t = 60)]
    pub count: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ErrorArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, default_value_t = 6)]
    pub k: u32,
    #[arg(long, value_parser = int_list_arg, default_value = "1..6", allow_negative_numbers = true)]
    pub s: IntList,
    #[arg(long, default_value_t = 256)]
    pub box_len: usize,
    /// Level-set polynomials per pool
    #[arg(long, default_value_t = 8)]
    pub pool: usize,
    #[arg(long, default_value_t = 4)]
    pub trials: usize,
}

pub fn schur(mode: &SchurMode, cfg: &RunConfig) -> CliResult<Outcome> {
    match mode {
        SchurMode::Sweep(a) => {
            let fam = a.family.build(a.k.max(1), cfg)?;
            let params = SchurSweepParams {
                d: a.d,
                k: a.k,
                box_len: a.box_len,
                s_values: a.s.0.clone(),
                trials: a.trials,
                draw_budget: cfg.draw_budget,
                seed: cfg.seed,
            };
            Outcome::new(schur_sweep(&fam, &params)?)
        }
        SchurMode::Zero(a) => {
            let fam = a.family.build(a.k.max(1), cfg)?;
            let half = fam.table(a.k)?.half_width() as usize;
            let extents = vec![8 * half + 8; fam.dim()];
            let lin = Linearizer::constant(extents, RealPoly::zero(fam.dim(), 2))?;
            let rep = gram_schur_with_budget(&fam, &lin, a.k, cfg.tap_budget())?;
            let l1 = autocorrelation_l1(&fam, a.k)?;
            let mut v = to_value(&rep)?;
            v["autocorrelation_l1"] = json!(l1);
            v["abs_diff"] = json!((rep.row_sup - l1).abs());
            Outcome::new(v)
        }
        SchurMode::Split(a) => {
            let mut rng = rng_for(cfg.seed, 0);
            let table: Vec<RealPoly> = (0..a.count)
                .map(|i| if i % 3 == 0 { uniform_poly(&mut rng, a.d, a.dim) } else { multiscale_poly(&mut rng, a.d, a.dim, a.k_max) })
                .collect();
            Outcome::new(split_as_ek(&table, a.k_max, cfg.a0)?)
        }
        SchurMode::Error(a) => {
            let fam = a.family.build(a.k.max(1), cfg)?;
            let params = ErrorNormParams {
                d: a.d,
                k: a.k,
                a0: cfg.a0,
                box_len: a.box_len,
                pool: a.pool,
                trials: a.trials,
                draw_budget: cfg.draw_budget,
                seed: cfg.seed,
            };
            Outcome::new(error_norm_sweep(&fam, &a.s.0, &params)?)
        }
    }
}
