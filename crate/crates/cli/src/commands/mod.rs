//! Subcommands and the argument groups they share.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use oscsum::carleson::{build_psi_with_budget, DyadicKernelFamily, KernelSpec};
use oscsum::expsum::{Axis, Progression};
use oscsum::polycore::{RatPoly, RealPoly};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::parse::{int_list_arg, IntList};

pub mod analysis;
pub mod circle;
pub mod inverse;
pub mod operator;

/// Result of one command: extra input fields (normalized polynomials and
/// the like) and the result proper.
pub struct Outcome {
    pub input: Map<String, Value>,
    pub result: Value,
}

impl Outcome {
    pub fn new(result: impl Serialize) -> CliResult<Self> {
        Ok(Outcome { input: Map::new(), result: to_value(result)? })
    }

    pub fn with_input(mut self, key: &str, value: Value) -> Self {
        self.input.insert(key.into(), value);
        self
    }
}

pub fn to_value(v: impl Serialize) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Output(e.to_string()))
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Scale-dependent coefficient norm N_R(P) with its witness denominator
    Coeffnorm(analysis::CoeffnormArgs),
    /// Normalized exponential sums and their decay in the coefficient norm
    Expsum {
        #[command(subcommand)]
        #[serde(flatten)]
        mode: analysis::ExpsumMode,
    },
    /// Sublevel counts, oscillatory integrals and continuous sublevel sets
    Sublevel {
        #[command(subcommand)]
        #[serde(flatten)]
        mode: analysis::SublevelMode,
    },
    /// Complete Gauss sums S(A/Q, B/Q) and the vanishing sweep
    Gauss(circle::GaussArgs),
    /// Recovery of e(P(n)) from Gauss sums, and orthogonality of characters
    Recovery(circle::RecoveryArgs),
    /// Multipliers m, Phi and L, and the major-arc error sweep
    Multiplier {
        #[command(subcommand)]
        #[serde(flatten)]
        mode: circle::MultiplierMode,
    },
    /// Grid supremum of the maximally modulated singular integral
    Carleson {
        #[command(subcommand)]
        #[serde(flatten)]
        mode: operator::CarlesonMode,
    },
    /// TT* kernel Schur sums and the stationary/oscillatory/error split
    Schur {
        #[command(subcommand)]
        #[serde(flatten)]
        mode: operator::SchurMode,
    },
    /// Inverse-theorem verifier: certificate or counterexample
    Invtest(inverse::InvtestArgs),
    /// Van der Corput differencing inequality on a phase sequence
    Vdc(inverse::VdcArgs),
    /// Condensation of a set of small differences to one denominator
    Condense(inverse::CondenseArgs),
    /// Partition of a progression into rescaled sub-progressions
    Rescale(inverse::RescaleArgs),
    /// Re-run the calibration suites against the frozen constants
    Calibrate(inverse::CalibrateArgs),
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Coeffnorm(_) => "coeffnorm".into(),
            Command::Expsum { mode } => format!("expsum {}", mode.name()),
            Command::Sublevel { mode } => format!("sublevel {}", mode.name()),
            Command::Gauss(_) => "gauss".into(),
            Command::Recovery(_) => "recovery".into(),
            Command::Multiplier { mode } => format!("multiplier {}", mode.name()),
            Command::Carleson { mode } => format!("carleson {}", mode.name()),
            Command::Schur { mode } => format!("schur {}", mode.name()),
            Command::Invtest(_) => "invtest".into(),
            Command::Vdc(_) => "vdc".into(),
            Command::Condense(_) => "condense".into(),
            Command::Rescale(_) => "rescale".into(),
            Command::Calibrate(_) => "calibrate".into(),
        }
    }

    /// Applies command flags that shadow configuration keys.
    pub fn adjust_config(&self, cfg: &mut RunConfig) {
        if let Command::Invtest(a) = self {
            if let Some(c) = a.c_max {
                cfg.c_max = c;
            }
        }
    }

    pub fn run(&self, cfg: &RunConfig) -> CliResult<Outcome> {
        match self {
            Command::Coeffnorm(a) => analysis::coeffnorm(a, cfg),
            Command::Expsum { mode } => analysis::expsum(mode, cfg),
            Command::Sublevel { mode } => analysis::sublevel(mode, cfg),
            Command::Gauss(a) => circle::gauss(a, cfg),
            Command::Recovery(a) => circle::recovery(a),
            Command::Multiplier { mode } => circle::multiplier(mode, cfg),
            Command::Carleson { mode } => operator::carleson(mode, cfg),
            Command::Schur { mode } => operator::schur(mode, cfg),
            Command::Invtest(a) => inverse::invtest(a, cfg),
            Command::Vdc(a) => inverse::vdc(a, cfg),
            Command::Condense(a) => inverse::condense(a, cfg),
            Command::Rescale(a) => inverse::rescale(a),
            Command::Calibrate(a) => inverse::calibrate(a, cfg),
        }
    }
}

/// A polynomial in floating or exact rational mode.
pub enum AnyPoly {
    Real(RealPoly),
    Exact(RatPoly),
}

impl AnyPoly {
    pub fn to_json_value(&self) -> Value {
        match self {
            AnyPoly::Real(p) => p.to_json_value(),
            AnyPoly::Exact(p) => p.to_json_value(),
        }
    }

    pub fn to_real(&self) -> RealPoly {
        match self {
            AnyPoly::Real(p) => p.clone(),
            AnyPoly::Exact(p) => p.to_real(),
        }
    }
}

/// Runs `$body` with `$p` bound to the polynomial in either mode.
macro_rules! with_poly {
    ($poly:expr, $p:ident => $body:expr) => {
        match $poly {
            $crate::commands::AnyPoly::Real($p) => $body,
            $crate::commands::AnyPoly::Exact($p) => $body,
        }
    };
}
pub(crate) use with_poly;

#[derive(Args, Debug, Serialize)]
pub struct PolyArgs {
    /// Polynomial, inline `{(2):1/3, (1,1):0.5}` or JSON `{"d":..,"D":..,"terms":[..]}`
    #[arg(long, required_unless_present = "poly_file", conflicts_with = "poly_file")]
    pub poly: Option<String>,
    /// File holding the polynomial in either form
    #[arg(long)]
    pub poly_file: Option<PathBuf>,
    /// Keep coefficients as exact rationals (every literal must be `num/den` or an integer)
    #[arg(long)]
    pub exact: bool,
}

impl PolyArgs {
    pub fn load(&self) -> CliResult<AnyPoly> {
        let text = match (&self.poly, &self.poly_file) {
            (Some(t), _) => t.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?,
            (None, None) => return Err(CliError::Usage("a polynomial is required".into())),
        };
        Ok(if self.exact { AnyPoly::Exact(RatPoly::parse(&text)?) } else { AnyPoly::Real(RealPoly::parse(&text)?) })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ProgressionArgs {
    /// Box sides N_i; the progression lives in [1, N_1] x ... x [1, N_D]
    #[arg(long = "N", value_parser = int_list_arg)]
    pub n: IntList,
    /// First element per axis (default 1)
    #[arg(long, value_parser = int_list_arg)]
    pub start: Option<IntList>,
    /// Common difference per axis (default 1)
    #[arg(long, value_parser = int_list_arg)]
    pub gap: Option<IntList>,
    /// Length per axis (default: as long as fits in the box)
    #[arg(long, value_parser = int_list_arg)]
    pub count: Option<IntList>,
}

fn per_axis(list: &Option<IntList>, dim: usize, default: i64, what: &str) -> CliResult<Vec<i64>> {
    match list {
        None => Ok(vec![default; dim]),
        Some(l) if l.0.len() == dim => Ok(l.0.clone()),
        Some(l) if l.0.len() == 1 => Ok(vec![l.0[0]; dim]),
        Some(l) => Err(CliError::Usage(format!("--{what} needs 1 or {dim} values, got {}", l.0.len()))),
    }
}

impl ProgressionArgs {
    pub fn build(&self) -> CliResult<Progression> {
        let ambient = self.n.as_u64("N").map_err(CliError::Usage)?;
        let dim = ambient.len();
        let starts = per_axis(&self.start, dim, 1, "start")?;
        let gaps = per_axis(&self.gap, dim, 1, "gap")?;
        let mut axes = Vec::with_capacity(dim);
        for i in 0..dim {
            let count = match &self.count {
                None => {
                    if gaps[i] < 1 || starts[i] < 1 || starts[i] as u64 > ambient[i] {
                        return Err(CliError::Usage(format!("axis {i}: start and gap must lie inside the box")));
                    }
                    (ambient[i] - starts[i] as u64) / gaps[i] as u64 + 1
                }
                Some(_) => {
                    let c = per_axis(&self.count, dim, 0, "count")?[i];
                    u64::try_from(c).map_err(|_| CliError::Usage(format!("axis {i}: negative count")))?
                }
            };
            axes.push(Axis { start: starts[i], gap: gaps[i], count });
        }
        Ok(Progression::new(axes, ambient)?)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    /// Base kernel: hilbert, riesz or logosc
    #[arg(long, default_value = "hilbert")]
    pub kernel: String,
    /// Ambient dimension of the kernel
    #[arg(long = "D", default_value_t = 1)]
    pub dim: usize,
}

impl FamilyArgs {
    pub fn build(&self, j_max: u32, cfg: &RunConfig) -> CliResult<DyadicKernelFamily> {
        let spec = KernelSpec::from_name(&self.kernel, self.dim)?;
        Ok(build_psi_with_budget(spec, j_max, cfg.lattice_budget())?)
    }
}

/// Checks that a list argument has the expected length.
pub fn expect_len<T>(v: &[T], n: usize, what: &str) -> CliResult<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{what} needs {n} values, got {}", v.len())))
    }
}
