//! Run configuration: frozen defaults, a flat `key = value` file and
//! per-key overrides from the command line.

use std::fmt;
use std::path::Path;

use oscsum::calibration as cal;
use oscsum::circle::DEFAULT_PHI_NODES;
use oscsum::coeffnorm::{DEFAULT_MAX_S, RATIONAL_LOWER_BOUND_C};
use oscsum::expsum::DEFAULT_ENUMERATION_BUDGET;
use oscsum::invthm::{DEFAULT_C_MAX, DEFAULT_MAX_Q};
use serde::Serialize;

use crate::error::CliError;
use crate::parse::parse_real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// Everything a command may read besides its own arguments. Embedded in
/// every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub theta: f64,
    pub eta: f64,
    pub a0: f64,
    pub rho: f64,
    pub eps0: f64,
    pub s_cap: u32,
    pub c_max: f64,
    pub c_vdc: f64,
    pub taylor_constant: f64,
    pub condense_constant: f64,
    pub sublevel_small_constant: f64,
    pub sublevel_large_constant: f64,
    pub osc_integral_constant: f64,
    pub continuous_sublevel_constant: f64,
    pub rational_lower_bound_constant: f64,
    pub max_lattice_points: u64,
    pub max_q: u64,
    pub quadrature_nodes: u64,
    pub max_s: u64,
    pub draw_budget: u64,
    pub enumeration_budget: u64,
    pub tap_budget: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: cal::CALIBRATION_SEED,
            theta: cal::DEFAULT_THETA,
            eta: cal::DEFAULT_ETA,
            a0: oscsum::carleson::DEFAULT_A0,
            rho: oscsum::circle::DEFAULT_RHO,
            eps0: oscsum::circle::DEFAULT_EPS0,
            s_cap: oscsum::circle::DEFAULT_S_CAP,
            c_max: DEFAULT_C_MAX,
            c_vdc: cal::C_VDC,
            taylor_constant: cal::TAYLOR_CONSTANT,
            condense_constant: cal::CONDENSE_CONSTANT,
            sublevel_small_constant: cal::SUBLEVEL_SMALL_CONSTANT,
            sublevel_large_constant: cal::SUBLEVEL_LARGE_CONSTANT,
            osc_integral_constant: cal::OSC_INTEGRAL_CONSTANT,
            continuous_sublevel_constant: cal::CONTINUOUS_SUBLEVEL_CONSTANT,
            rational_lower_bound_constant: RATIONAL_LOWER_BOUND_C,
            max_lattice_points: oscsum::carleson::DEFAULT_LATTICE_BUDGET as u64,
            max_q: DEFAULT_MAX_Q,
            quadrature_nodes: DEFAULT_PHI_NODES as u64,
            max_s: DEFAULT_MAX_S as u64,
            draw_budget: 100_000,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            tap_budget: oscsum::carleson::DEFAULT_TAP_BUDGET as u64,
            format: Format::Json,
        }
    }
}

fn positive_real(key: &str, value: &str) -> Result<f64, CliError> {
    let x = parse_real(value).map_err(|e| CliError::Usage(format!("{key}: {e}")))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("{key} must be a positive finite number, got {value}")))
    }
}

fn unit_open(key: &str, value: &str) -> Result<f64, CliError> {
    let x = positive_real(key, value)?;
    if x < 1.0 {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("{key} must lie in (0, 1), got {value}")))
    }
}

fn positive_int(key: &str, value: &str) -> Result<u64, CliError> {
    match value.trim().parse::<u64>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(CliError::Usage(format!("{key} must be a positive integer, got {value}"))),
    }
}

impl RunConfig {
    /// Sets one key; unknown keys and invalid values are usage errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "seed" => {
                self.seed = value.parse().map_err(|_| CliError::Usage(format!("seed must be an integer, got {value}")))?
            }
            "theta" => {
                let t = positive_real(key, value)?;
                if t > 1.0 {
                    return Err(CliError::Usage(format!("theta must lie in (0, 1], got {value}")));
                }
                self.theta = t;
            }
            "eta" => self.eta = unit_open(key, value)?,
            "a0" => self.a0 = positive_real(key, value)?,
            "rho" => self.rho = unit_open(key, value)?,
            "eps0" => self.eps0 = unit_open(key, value)?,
            "s_cap" => self.s_cap = positive_int(key, value)?.min(30) as u32,
            "c_max" => self.c_max = positive_real(key, value)?,
            "c_vdc" => self.c_vdc = positive_real(key, value)?,
            "taylor_constant" => self.taylor_constant = positive_real(key, value)?,
            "condense_constant" => self.condense_constant = positive_real(key, value)?,
            "sublevel_small_constant" => self.sublevel_small_constant = positive_real(key, value)?,
            "sublevel_large_constant" => self.sublevel_large_constant = positive_real(key, value)?,
            "osc_integral_constant" => self.osc_integral_constant = positive_real(key, value)?,
            "continuous_sublevel_constant" => self.continuous_sublevel_constant = positive_real(key, value)?,
            "rational_lower_bound_constant" => self.rational_lower_bound_constant = positive_real(key, value)?,
            "max_lattice_points" => self.max_lattice_points = positive_int(key, value)?,
            "max_q" => self.max_q = positive_int(key, value)?,
            "quadrature_nodes" => self.quadrature_nodes = positive_int(key, value)?,
            "max_s" => {
                let s = positive_int(key, value)?;
                if s > 62 {
                    return Err(CliError::Usage(format!("max_s must be at most 62, got {value}")));
                }
                self.max_s = s;
            }
            "draw_budget" => self.draw_budget = positive_int(key, value)?,
            "enumeration_budget" => self.enumeration_budget = positive_int(key, value)?,
            "tap_budget" => self.tap_budget = positive_int(key, value)?,
            "format" => {
                self.format = match value {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    other => return Err(CliError::Usage(format!("format must be json or csv, got {other}"))),
                }
            }
            other => return Err(CliError::Usage(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `KEY=VALUE` assignment.
    pub fn assign(&mut self, pair: &str) -> Result<(), CliError> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected KEY=VALUE, got `{pair}`")))?;
        self.set(k.trim(), v)
    }

    /// Applies a flat file of `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.assign(line).map_err(|e| CliError::Usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn major_params(&self) -> oscsum::circle::MajorParams {
        oscsum::circle::MajorParams { a0: self.a0, rho: self.rho, eps0: self.eps0, s_cap: self.s_cap }
    }

    pub fn lattice_budget(&self) -> usize {
        usize::try_from(self.max_lattice_points).unwrap_or(usize::MAX)
    }

    pub fn node_budget(&self) -> usize {
        usize::try_from(self.quadrature_nodes).unwrap_or(usize::MAX)
    }

    pub fn tap_budget(&self) -> usize {
        usize::try_from(self.tap_budget).unwrap_or(usize::MAX)
    }
}
