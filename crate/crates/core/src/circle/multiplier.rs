//! The discrete multipliers `m_{j,λ}` and their continuous models `Φ_{j,ν}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::gauss::{gauss_sum, RationalPoint};
use crate::carleson::DyadicKernelFamily;
use crate::error::{Error, Result};
use crate::numeric::{composite_gl, frac_mul, unit_phase, ComplexSum};
use crate::polycore::{Coeff, RealPoly};

/// Default cap on quadrature nodes for one `Φ` evaluation.
pub const DEFAULT_PHI_NODES: usize = 1 << 24;

/// Centred representative of `x mod 1` in `[−1/2, 1/2)`.
pub fn centred(x: f64) -> f64 {
    let r = x - x.round();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// `m_{j,λ}(β) = Σ_m ψ_j(m) e(−P_λ(m) − β·m)`.
pub fn multiplier_m(family: &DyadicKernelFamily, j: u32, lambda: &RealPoly, beta: &[f64]) -> Result<Complex64> {
    let dim = family.dim();
    if lambda.dim() != dim || beta.len() != dim {
        return Err(Error::Dimension { expected: dim, got: if lambda.dim() != dim { lambda.dim() } else { beta.len() } });
    }
    let mut acc = ComplexSum::new();
    for (u, v) in family.table(j)?.support() {
        let mut phase = lambda.phase_at(u)?;
        for (&b, &m) in beta.iter().zip(u) {
            phase += frac_mul(b, m as i128);
        }
        acc.add(unit_phase(-phase) * *v);
    }
    Ok(acc.value())
}

/// Total phase variation scale `Σ_α |ν_α| 2^{j|α|} + Σ_i |β_i| 2^j`.
pub fn phase_scale(j: u32, nu: &RealPoly, beta: &[f64]) -> f64 {
    let t = 2f64.powi(j as i32);
    nu.euclid_coeff_norm(t) + beta.iter().map(|b| b.abs() * t).sum::<f64>()
}

/// `Φ_{j,ν}(β)` with the node count used.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiValue {
    pub value: Complex64,
    pub nodes: usize,
}

/// `Φ_{j,ν}(β) = ∫ e(−P_ν(t) − β·t) ψ_j(t) dt` by composite Gauss–Legendre
/// in the radius (and the periodic trapezoid rule in angle when `D = 2`),
/// with panel counts proportional to `1 + phase_scale`.
pub fn multiplier_phi(
    family: &DyadicKernelFamily,
    j: u32,
    nu: &RealPoly,
    beta: &[f64],
    node_budget: usize,
) -> Result<PhiValue> {
    let dim = family.dim();
    if nu.dim() != dim || beta.len() != dim {
        return Err(Error::Dimension { expected: dim, got: beta.len() });
    }
    let w = phase_scale(j, nu, beta);
    let panels = (2.0 * (1.0 + w)).ceil() as usize + 2;
    let a = 2f64.powi(j as i32 - 2);
    let mid = 2f64.powi(j as i32 - 1);
    let b = 2f64.powi(j as i32);
    let integrand = |t: &[f64]| -> Result<Complex64> {
        let psi = family.psi(j, t)?;
        if psi == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut phase = nu.eval(t)?;
        for (&bi, &ti) in beta.iter().zip(t) {
            phase += bi * ti;
        }
        Ok(unit_phase(-phase) * psi)
    };
    let mut acc = ComplexSum::new();
    let mut nodes = 0usize;
    match dim {
        1 => {
            for (lo, hi) in [(-b, -mid), (-mid, -a), (a, mid), (mid, b)] {
                let rule = composite_gl(lo, hi, panels);
                nodes += rule.len();
                if nodes > node_budget {
                    return Err(Error::budget(format!("Φ quadrature needs more than {node_budget} nodes")));
                }
                for (t, wt) in rule {
                    acc.add(integrand(&[t])? * wt);
                }
            }
        }
        2 => {
            let angles = (16.0 * (1.0 + w)).ceil() as usize + 32;
            let radial: Vec<(f64, f64)> = [(a, mid), (mid, b)].iter().flat_map(|&(lo, hi)| composite_gl(lo, hi, panels)).collect();
            nodes = radial.len().saturating_mul(angles);
            if nodes > node_budget {
                return Err(Error::budget(format!("Φ quadrature needs {nodes} nodes, budget {node_budget}")));
            }
            let dtheta = 2.0 * PI / angles as f64;
            for k in 0..angles {
                let (s, c) = (k as f64 * dtheta).sin_cos();
                for &(r, wr) in &radial {
                    acc.add(integrand(&[r * c, r * s])? * (wr * r * dtheta));
                }
            }
        }
        _ => return Err(Error::domain(format!("Φ quadrature supports D <= 2, got {dim}"))),
    }
    Ok(PhiValue { value: acc.value(), nodes })
}

/// `|ν_α| ≤ j^{A₀} 2^{−j|α|}` for every `α`.
pub fn in_phi_window(j: u32, nu: &RealPoly, a0: f64) -> bool {
    let jp = (j as f64).powf(a0);
    nu.terms().all(|(alpha, c)| c.to_f64().abs() <= jp * 2f64.powi(-((j * alpha.degree()) as i32)))
}

/// `Φ*_{j,ν}(β)`: `Φ_{j,ν}(β)` inside the window, exactly zero outside.
pub fn multiplier_phi_star(
    family: &DyadicKernelFamily,
    j: u32,
    nu: &RealPoly,
    beta: &[f64],
    a0: f64,
    node_budget: usize,
) -> Result<PhiValue> {
    if !in_phi_window(j, nu, a0) {
        return Ok(PhiValue { value: Complex64::new(0.0, 0.0), nodes: 0 });
    }
    multiplier_phi(family, j, nu, beta, node_budget)
}

/// `λ − A/Q` with each coefficient centred mod 1.
pub fn offset_poly(lambda: &RealPoly, point: &RationalPoint) -> Result<RealPoly> {
    if lambda.dim() != point.dim {
        return Err(Error::Dimension { expected: point.dim, got: lambda.dim() });
    }
    let terms = point.exponents().into_iter().zip(&point.a).map(|(alpha, &a)| {
        let l = lambda.coeff(&alpha).copied().unwrap_or(0.0);
        (alpha, centred(l - a as f64 / point.q as f64))
    });
    RealPoly::restricted(point.dim, point.d, terms)
}

/// `β − B/Q` centred mod 1.
pub fn offset_beta(beta: &[f64], point: &RationalPoint) -> Vec<f64> {
    beta.iter().zip(&point.b).map(|(&x, &b)| centred(x - b as f64 / point.q as f64)).collect()
}

/// Comparison of `m_{j,λ}(β)` with `S(A/Q,B/Q)·Φ_{j,λ−A/Q}(β−B/Q)`.
#[derive(Debug, Clone, Serialize)]
pub struct RiemannCheck {
    pub m: Complex64,
    pub approx: Complex64,
    pub diff: f64,
    /// Smallest `δ ≥ 2^{−j}` meeting the hypotheses.
    pub delta: f64,
    /// `diff / (Q δ)`.
    pub ratio: f64,
}

pub fn riemann_check(
    family: &DyadicKernelFamily,
    j: u32,
    lambda: &RealPoly,
    beta: &[f64],
    point: &RationalPoint,
) -> Result<RiemannCheck> {
    if point.d != lambda.degree_bound() {
        return Err(Error::domain("rational point and polynomial have different degree bounds"));
    }
    let nu = offset_poly(lambda, point)?;
    let eta = offset_beta(beta, point);
    let mut delta = 2f64.powi(-(j as i32));
    for (alpha, c) in nu.terms() {
        delta = delta.max(c.abs() * 2f64.powi((j * (alpha.degree() - 1)) as i32));
    }
    for e in &eta {
        delta = delta.max(e.abs());
    }
    let m = multiplier_m(family, j, lambda, beta)?;
    let s = gauss_sum(point)?;
    let phi = multiplier_phi(family, j, &nu, &eta, DEFAULT_PHI_NODES)?;
    let approx = s.value * phi.value;
    let diff = (m - approx).norm();
    Ok(RiemannCheck { m, approx, diff, delta, ratio: diff / (point.q as f64 * delta) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleson::{build_psi, KernelSpec};
    use crate::polycore::MultiIndex;

    fn quad(c: f64) -> RealPoly {
        RealPoly::restricted(1, 2, [(MultiIndex::new(vec![2]), c)]).unwrap()
    }

    #[test]
    fn zero_phase_multiplier_is_lattice_mean() {
        let fam = build_psi(KernelSpec::Hilbert, 6).unwrap();
        let m = multiplier_m(&fam, 6, &RealPoly::zero(1, 2), &[0.0]).unwrap();
        assert_eq!(m.norm(), fam.certificate(6).unwrap().lattice_mean.abs());
        let phi = multiplier_phi(&fam, 6, &RealPoly::zero(1, 2), &[0.0], DEFAULT_PHI_NODES).unwrap();
        assert!(phi.value.norm() < 1e-12);
    }

    #[test]
    fn multiplier_periodic_and_conjugate() {
        let fam = build_psi(KernelSpec::Hilbert, 5).unwrap();
        let a = multiplier_m(&fam, 5, &quad(0.3), &[0.2]).unwrap();
        let b = multiplier_m(&fam, 5, &quad(0.3), &[1.2]).unwrap();
        assert!((a - b).norm() < 1e-12);
        let c = multiplier_m(&fam, 5, &quad(-0.3), &[-0.2]).unwrap();
        assert!((a - c.conj()).norm() < 1e-12);
    }

    #[test]
    fn phi_star_cutoff() {
        let fam = build_psi(KernelSpec::Hilbert, 5).unwrap();
        let v = multiplier_phi_star(&fam, 5, &quad(0.4), &[0.0], 1.0, DEFAULT_PHI_NODES).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn riemann_approximation_small_offsets() {
        let fam = build_psi(KernelSpec::Hilbert, 9).unwrap();
        let point = RationalPoint::quadratic(3, 1, 1).unwrap();
        let lambda = quad(1.0 / 3.0 + 0.7 * 2f64.powi(-18));
        let rc = riemann_check(&fam, 9, &lambda, &[1.0 / 3.0 + 0.4 / 512.0], &point).unwrap();
        assert!(rc.ratio < 1.0, "{rc:?}");
        assert!(rc.m.norm() > 10.0 * rc.diff, "{rc:?}");
    }
}
