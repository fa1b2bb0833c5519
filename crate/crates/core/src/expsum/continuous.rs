use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{composite_gl, gl_panel_order, unit_phase, ComplexSum};
use crate::polycore::{Coeff, Poly};

/// Largest number of quadrature nodes (all axes together) an integral may use.
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 27;

#[derive(Debug, Clone, Serialize)]
pub struct OscillatoryIntegral {
    pub value: Complex64,
    pub abs: f64,
    pub euclid_norm: f64,
    pub nodes_per_axis: usize,
    /// `(1 + ‖P‖)^{−1/d}`.
    pub decay: f64,
    pub bound: f64,
    pub ratio: f64,
}

fn check_low_dim<C: Coeff>(p: &Poly<C>) -> Result<()> {
    if p.dim() == 0 || p.dim() > 2 {
        return Err(Error::domain(format!("only D = 1 or 2 supported, got {}", p.dim())));
    }
    Ok(())
}

/// `∫_{[0,1]^D} e(P(t)) dt` by tensor Gauss–Legendre with at least
/// `64(1 + ‖P‖)` nodes per axis, compared with `c·(1 + ‖P‖)^{−1/d}`.
pub fn oscillatory_integral<C: Coeff>(p: &Poly<C>, c: f64, node_budget: u64) -> Result<OscillatoryIntegral> {
    check_low_dim(p)?;
    let norm = p.euclid_coeff_norm(1.0);
    let want = (64.0 * (1.0 + norm)).ceil() as usize;
    let panels = want.div_ceil(gl_panel_order()).max(1);
    let rule = composite_gl(0.0, 1.0, panels);
    let per_axis = rule.len();
    let total = (per_axis as u128).pow(p.dim() as u32);
    if total > node_budget as u128 {
        return Err(Error::budget(format!(
            "{total} quadrature nodes exceed the budget {node_budget}"
        )));
    }
    let mut acc = ComplexSum::new();
    if p.dim() == 1 {
        for &(x, w) in &rule {
            acc.add(unit_phase(p.eval(&[x])?) * w);
        }
    } else {
        for &(x, wx) in &rule {
            let mut row = ComplexSum::new();
            for &(y, wy) in &rule {
                row.add(unit_phase(p.eval(&[x, y])?) * wy);
            }
            acc.add(row.value() * wx);
        }
    }
    let value = acc.value();
    let d = p.degree_bound().max(p.degree()).max(1) as f64;
    let decay = (1.0 + norm).powf(-1.0 / d);
    Ok(OscillatoryIntegral {
        value,
        abs: value.norm(),
        euclid_norm: norm,
        nodes_per_axis: per_axis,
        decay,
        bound: c * decay,
        ratio: value.norm() / decay,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuousSublevel {
    pub measure: f64,
    pub resolution: usize,
    /// `(ε/‖P‖)^{1/d}`.
    pub scale: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Grid-midpoint measure of `{t ∈ [0,1]^D : |P(t)| ≤ ε}` against
/// `c·(ε/‖P‖)^{1/d}`; `resolution` cells per axis (at least 1024).
pub fn continuous_sublevel<C: Coeff>(p: &Poly<C>, eps: f64, c: f64, resolution: usize) -> Result<ContinuousSublevel> {
    check_low_dim(p)?;
    let norm = p.euclid_coeff_norm(1.0);
    if norm <= 0.0 {
        return Err(Error::domain("sublevel measure needs a nonconstant polynomial"));
    }
    if !(eps > 0.0) {
        return Err(Error::domain("epsilon must be positive"));
    }
    let m = resolution.max(1024);
    let h = 1.0 / m as f64;
    let mut hits: u64 = 0;
    if p.dim() == 1 {
        for i in 0..m {
            if p.eval(&[(i as f64 + 0.5) * h])?.abs() <= eps {
                hits += 1;
            }
        }
    } else {
        for i in 0..m {
            let x = (i as f64 + 0.5) * h;
            for j in 0..m {
                if p.eval(&[x, (j as f64 + 0.5) * h])?.abs() <= eps {
                    hits += 1;
                }
            }
        }
    }
    let measure = hits as f64 / (m as f64).powi(p.dim() as i32);
    let d = p.degree().max(1) as f64;
    let scale = (eps / norm).powf(1.0 / d);
    Ok(ContinuousSublevel { measure, resolution: m, scale, bound: c * scale, ratio: measure / scale })
}
