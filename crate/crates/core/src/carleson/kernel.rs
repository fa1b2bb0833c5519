//! Calderón–Zygmund kernels and their mean-zero dyadic pieces `ψ_j`.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{composite_gl, gl_panel_order, CompensatedSum};

/// Relative slack allowed when a sampled certificate is compared with its
/// declared bound.
const CERT_SLACK: f64 = 1e-9;

/// Upper limit on the number of dense lattice cells held by one family.
pub const DEFAULT_LATTICE_BUDGET: usize = 1 << 24;

/// A user supplied kernel with its declared CZ constant.
#[derive(Clone)]
pub struct CustomKernel {
    pub name: String,
    pub dim: usize,
    pub f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub declared_cz: f64,
}

/// Base kernel of the singular integral.
#[derive(Clone)]
pub enum KernelSpec {
    /// `1/x` on the line, scaled to unit CZ norm.
    Hilbert,
    /// `x₁/|x|^{D+1}`, scaled to unit CZ norm.
    Riesz { dim: usize },
    /// Even kernel `cos(π log₂|x|)/|x|` on the line, scaled to unit CZ norm.
    /// Its dyadic pieces need a nonzero mean correction.
    LogOscillating,
    Custom(CustomKernel),
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KernelSpec({})", self.name())
    }
}

impl KernelSpec {
    /// Parses `hilbert`, `riesz` (dimension taken from `dim`) or `logosc`.
    pub fn from_name(name: &str, dim: usize) -> Result<Self> {
        match name {
            "hilbert" if dim == 1 => Ok(KernelSpec::Hilbert),
            "hilbert" => Err(Error::Dimension { expected: 1, got: dim }),
            "riesz" => Ok(KernelSpec::Riesz { dim }),
            "logosc" if dim == 1 => Ok(KernelSpec::LogOscillating),
            "logosc" => Err(Error::Dimension { expected: 1, got: dim }),
            other => Err(Error::Parse(format!("unknown kernel `{other}`"))),
        }
    }

    /// Built-in kernel for a dimension: Hilbert on the line, Riesz above.
    pub fn default_for(dim: usize) -> Self {
        if dim == 1 {
            KernelSpec::Hilbert
        } else {
            KernelSpec::Riesz { dim }
        }
    }

    pub fn name(&self) -> String {
        match self {
            KernelSpec::Hilbert => "hilbert".into(),
            KernelSpec::Riesz { dim } => format!("riesz{dim}"),
            KernelSpec::LogOscillating => "logosc".into(),
            KernelSpec::Custom(c) => c.name.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            KernelSpec::Hilbert | KernelSpec::LogOscillating => 1,
            KernelSpec::Riesz { dim } => *dim,
            KernelSpec::Custom(c) => c.dim,
        }
    }

    /// Bound the sampled CZ norm must respect.
    pub fn declared_cz(&self) -> f64 {
        match self {
            KernelSpec::Custom(c) => c.declared_cz,
            _ => 1.0,
        }
    }

    /// True when `K(−x) = −K(x)` holds by construction.
    pub fn is_odd(&self) -> bool {
        matches!(self, KernelSpec::Hilbert | KernelSpec::Riesz { .. })
    }

    fn scale(&self) -> f64 {
        match self {
            // size 1 + gradient 1, annulus integrals vanish
            KernelSpec::Hilbert => 0.5,
            // size 1 + gradient D
            KernelSpec::Riesz { dim } => 1.0 / (1.0 + *dim as f64),
            // size 1 + gradient √(1 + (π/ln2)²) + annulus 4ln2/π
            KernelSpec::LogOscillating => {
                let g = (1.0 + (PI / LN_2).powi(2)).sqrt();
                1.0 / (1.0 + g + 4.0 * LN_2 / PI)
            }
            KernelSpec::Custom(_) => 1.0,
        }
    }

    /// `K(x)`; zero at the origin.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return 0.0;
        }
        match self {
            KernelSpec::Hilbert => self.scale() / x[0],
            KernelSpec::Riesz { dim } => {
                let r = r2.sqrt();
                self.scale() * x[0] / r.powi(*dim as i32 + 1)
            }
            KernelSpec::LogOscillating => {
                let r = r2.sqrt();
                self.scale() * (PI * r.log2()).cos() / r
            }
            KernelSpec::Custom(c) => (c.f)(x),
        }
    }
}

/// Radial cutoff: 1 on `r ≤ 1/2`, 0 on `r ≥ 1`, cubic smoothstep between.
pub fn eta(r: f64) -> f64 {
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let u = 2.0 * (r - 0.5);
        1.0 - u * u * (3.0 - 2.0 * u)
    }
}

/// Quadrature over directions of the unit sphere in `R^D` for `D ≤ 3`,
/// listed in antipodal pairs. Weights sum to the surface measure.
fn sphere_rule(dim: usize) -> Result<Vec<([f64; 3], f64)>> {
    let mut out = Vec::new();
    match dim {
        1 => {
            out.push(([1.0, 0.0, 0.0], 1.0));
            out.push(([-1.0, 0.0, 0.0], 1.0));
        }
        2 => {
            let m = 64;
            let w = PI / m as f64;
            for i in 0..m {
                let t = PI * i as f64 / m as f64;
                let (s, c) = t.sin_cos();
                out.push(([c, s, 0.0], w));
                out.push(([-c, -s, 0.0], w));
            }
        }
        3 => {
            let m = 32;
            for (z, wz) in composite_gl(-1.0, 1.0, 1) {
                if z <= 0.0 {
                    continue;
                }
                let rho = (1.0 - z * z).sqrt();
                for i in 0..m {
                    let t = 2.0 * PI * i as f64 / m as f64;
                    let (s, c) = t.sin_cos();
                    let w = wz * 2.0 * PI / m as f64;
                    out.push(([rho * c, rho * s, z], w));
                    out.push(([-rho * c, -rho * s, -z], w));
                }
            }
        }
        _ => return Err(Error::domain(format!("kernel certificates support D <= 3, got {dim}"))),
    }
    Ok(out)
}

/// `Σ_ω w_ω F(rω)`, antipodal pairs added first so odd integrands cancel exactly.
fn sphere_sum(rule: &[([f64; 3], f64)], dim: usize, r: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
    let mut acc = CompensatedSum::new();
    let mut x = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    for pair in rule.chunks(2) {
        for i in 0..dim {
            x[i] = r * pair[0].0[i];
            y[i] = r * pair[1].0[i];
        }
        acc.add(pair[0].1 * (f(&x) + f(&y)));
    }
    acc.value()
}

/// Gradient by central differences with relative step.
fn gradient_norm(f: &impl Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let h = 1e-6 * r.max(1e-300);
    let mut p = x.to_vec();
    let mut g2 = 0.0;
    for i in 0..x.len() {
        p[i] = x[i] + h;
        let fp = f(&p);
        p[i] = x[i] - h;
        let fm = f(&p);
        p[i] = x[i];
        let g = (fp - fm) / (2.0 * h);
        g2 += g * g;
    }
    g2.sqrt()
}

/// Sampled CZ constants of a kernel over a radius range.
#[derive(Debug, Clone, Serialize)]
pub struct CzCertificate {
    /// `sup |x|^D |K(x)|`.
    pub size: f64,
    /// `sup |x|^{D+1} |∇K(x)|`.
    pub gradient: f64,
    /// `sup_{r<R} |∫_{r≤|x|≤R} K|`.
    pub annulus: f64,
    pub total: f64,
    pub declared: f64,
    pub r_min: f64,
    pub r_max: f64,
}

/// Samples the CZ norm of `spec` on `r_min ≤ |x| ≤ r_max`.
pub fn cz_certificate(spec: &KernelSpec, r_min: f64, r_max: f64) -> Result<CzCertificate> {
    let dim = spec.dim();
    let rule = sphere_rule(dim)?;
    let f = |x: &[f64]| spec.eval(x);
    let steps_per_octave = 32;
    let lo = r_min.log2();
    let n = ((r_max.log2() - lo) * steps_per_octave as f64).ceil().max(1.0) as usize;
    let radii: Vec<f64> = (0..=n).map(|i| 2f64.powf(lo + i as f64 / steps_per_octave as f64)).collect();
    let mut size: f64 = 0.0;
    let mut gradient: f64 = 0.0;
    let mut x = vec![0.0; dim];
    for &r in &radii {
        for (w, _) in &rule {
            for i in 0..dim {
                x[i] = r * w[i];
            }
            size = size.max(r.powi(dim as i32) * f(&x).abs());
            gradient = gradient.max(r.powi(dim as i32 + 1) * gradient_norm(&f, &x));
        }
    }
    let mut cum = CompensatedSum::new();
    let (mut hi, mut low) = (0.0f64, 0.0f64);
    for pair in radii.windows(2) {
        for (r, w) in composite_gl(pair[0], pair[1], 1) {
            cum.add(w * r.powi(dim as i32 - 1) * sphere_sum(&rule, dim, r, f));
        }
        hi = hi.max(cum.value());
        low = low.min(cum.value());
    }
    let annulus = hi - low;
    Ok(CzCertificate {
        size,
        gradient,
        annulus,
        total: size + gradient + annulus,
        declared: spec.declared_cz(),
        r_min,
        r_max,
    })
}

/// Sampled bounds for one dyadic piece.
#[derive(Debug, Clone, Serialize)]
pub struct PieceCertificate {
    pub j: u32,
    pub inner: f64,
    pub outer: f64,
    /// `∫K·(η(·/2^j) − η(·/2^{j−1}))` before correction.
    pub raw_mean: f64,
    /// Mass of the correction bump that was subtracted.
    pub correction: f64,
    /// `∫ψ_j` after correction, by the same quadrature.
    pub mean: f64,
    /// Lattice sum `Σ_m ψ_j(m)`.
    pub lattice_mean: f64,
    pub sup: f64,
    pub grad_sup: f64,
    /// `sup|ψ_j|·2^{Dj} + sup|∇ψ_j|·2^{D(j+1)}`.
    pub constant: f64,
}

/// Values of `ψ_j` on the integer points of `[−2^j, 2^j]^D`.
#[derive(Debug, Clone)]
pub struct LatticeTable {
    half: i64,
    side: usize,
    dense: Vec<f64>,
    support: Vec<(Vec<i64>, f64)>,
}

impl LatticeTable {
    pub fn half_width(&self) -> i64 {
        self.half
    }

    /// `ψ_j(u)`, zero outside the table.
    pub fn get(&self, u: &[i64]) -> f64 {
        let mut idx = 0usize;
        for &c in u {
            if c.abs() > self.half {
                return 0.0;
            }
            idx = idx * self.side + (c + self.half) as usize;
        }
        self.dense[idx]
    }

    /// Nonzero entries in lexicographic order of the offset.
    pub fn support(&self) -> &[(Vec<i64>, f64)] {
        &self.support
    }
}

#[derive(Debug, Clone)]
struct Piece {
    cert: PieceCertificate,
    /// Coefficient multiplying the unnormalised bump profile.
    bump_coeff: f64,
    table: LatticeTable,
}

/// The pieces `ψ_1, …, ψ_{j_max}` of a kernel with their certificates.
#[derive(Debug, Clone)]
pub struct DyadicKernelFamily {
    spec: KernelSpec,
    j_max: u32,
    cz: CzCertificate,
    pieces: Vec<Piece>,
}

/// Summary of a family suitable for reports.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub kernel: String,
    pub dim: usize,
    pub j_max: u32,
    pub cz: CzCertificate,
    pub psi_constant: f64,
    pub pieces: Vec<PieceCertificate>,
}

fn bump(r: f64, a: f64, b: f64) -> f64 {
    if r <= a || r >= b {
        0.0
    } else {
        (PI * (r - a) / (b - a)).sin().powi(2)
    }
}

fn window(j: u32, r: f64) -> f64 {
    eta(r / 2f64.powi(j as i32)) - eta(r / 2f64.powi(j as i32 - 1))
}

/// Radial integral `∫_a^b r^{D−1} g(r) dr` split at the cutoff breakpoint.
fn radial_integral(dim: usize, a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mid = 0.5 * b;
    let mut acc = CompensatedSum::new();
    for (lo, hi) in [(a, mid), (mid, b)] {
        for (r, w) in composite_gl(lo, hi, 64) {
            acc.add(w * r.powi(dim as i32 - 1) * g(r));
        }
    }
    acc.value()
}

/// Builds `ψ_j = K·(η(|x|/2^j) − η(|x|/2^{j−1})) − c_j g_j` for
/// `j = 1..=j_max`, where `g_j` is a unit-mass `C¹` bump on the same annulus.
pub fn build_psi(spec: KernelSpec, j_max: u32) -> Result<DyadicKernelFamily> {
    build_psi_with_budget(spec, j_max, DEFAULT_LATTICE_BUDGET)
}

/// As [`build_psi`] with an explicit budget on dense lattice cells.
pub fn build_psi_with_budget(spec: KernelSpec, j_max: u32, budget: usize) -> Result<DyadicKernelFamily> {
    let dim = spec.dim();
    if dim == 0 {
        return Err(Error::domain("kernel dimension must be positive"));
    }
    if j_max == 0 || j_max > 30 {
        return Err(Error::domain(format!("j_max must lie in 1..=30, got {j_max}")));
    }
    let mut cells = 0usize;
    for j in 1..=j_max {
        let side = (2usize << j) + 1;
        cells = side
            .checked_pow(dim as u32)
            .and_then(|c| cells.checked_add(c))
            .ok_or_else(|| Error::budget("lattice table size overflows"))?;
    }
    if cells > budget {
        return Err(Error::budget(format!("lattice tables need {cells} cells, budget {budget}")));
    }
    let cz = cz_certificate(&spec, 0.25, 2f64.powi(j_max as i32 + 1))?;
    if cz.total > cz.declared * (1.0 + CERT_SLACK) {
        return Err(Error::precondition(format!(
            "sampled CZ norm {} exceeds declared bound {}",
            cz.total, cz.declared
        )));
    }
    let rule = sphere_rule(dim)?;
    let mut pieces = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max {
        pieces.push(build_piece(&spec, &rule, j)?);
    }
    Ok(DyadicKernelFamily { spec, j_max, cz, pieces })
}

fn build_piece(spec: &KernelSpec, rule: &[([f64; 3], f64)], j: u32) -> Result<Piece> {
    let dim = spec.dim();
    let a = 2f64.powi(j as i32 - 2);
    let b = 2f64.powi(j as i32);
    let raw_mean = radial_integral(dim, a, b, |r| window(j, r) * sphere_sum(rule, dim, r, |x| spec.eval(x)));
    let area: f64 = rule.iter().map(|(_, w)| w).sum();
    let bump_mass = area * radial_integral(dim, a, b, |r| bump(r, a, b));
    let bump_coeff = if raw_mean == 0.0 { 0.0 } else { raw_mean / bump_mass };
    let psi = |x: &[f64]| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r <= a || r >= b {
            return 0.0;
        }
        spec.eval(x) * window(j, r) - bump_coeff * bump(r, a, b)
    };
    let mean = radial_integral(dim, a, b, |r| sphere_sum(rule, dim, r, psi));

    // dense sampling of the annulus for the sup and gradient bounds
    let radial_samples = 16 * gl_panel_order();
    let mut sup: f64 = 0.0;
    let mut grad_sup: f64 = 0.0;
    let mut x = vec![0.0; dim];
    for i in 0..=radial_samples {
        let r = a + (b - a) * i as f64 / radial_samples as f64;
        for (w, _) in rule {
            for k in 0..dim {
                x[k] = r * w[k];
            }
            sup = sup.max(psi(&x).abs());
            grad_sup = grad_sup.max(gradient_norm(&psi, &x));
        }
    }
    let constant = sup * 2f64.powi((dim as u32 * j) as i32) + grad_sup * 2f64.powi((dim as u32 * (j + 1)) as i32);

    let half = 1i64 << j;
    let side = (2 * half + 1) as usize;
    let mut dense = vec![0.0; side.pow(dim as u32)];
    let mut support = Vec::new();
    let mut lattice_mean = CompensatedSum::new();
    let mut u = vec![0i64; dim];
    let mut xf = vec![0.0; dim];
    for (idx, slot) in dense.iter_mut().enumerate() {
        let mut rest = idx;
        for k in (0..dim).rev() {
            u[k] = (rest % side) as i64 - half;
            rest /= side;
        }
        for k in 0..dim {
            xf[k] = u[k] as f64;
        }
        let v = psi(&xf);
        if v != 0.0 {
            *slot = v;
            support.push((u.clone(), v));
            lattice_mean.add(v);
        }
    }
    Ok(Piece {
        cert: PieceCertificate {
            j,
            inner: a,
            outer: b,
            raw_mean,
            correction: bump_coeff * bump_mass,
            mean,
            lattice_mean: lattice_mean.value(),
            sup,
            grad_sup,
            constant,
        },
        bump_coeff,
        table: LatticeTable { half, side, dense, support },
    })
}

impl DyadicKernelFamily {
    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn cz_certificate(&self) -> &CzCertificate {
        &self.cz
    }

    fn piece(&self, j: u32) -> Result<&Piece> {
        if j == 0 || j > self.j_max {
            return Err(Error::domain(format!("piece index {j} outside 1..={}", self.j_max)));
        }
        Ok(&self.pieces[j as usize - 1])
    }

    pub fn certificate(&self, j: u32) -> Result<&PieceCertificate> {
        Ok(&self.piece(j)?.cert)
    }

    /// Largest recorded `sup|ψ_j|·2^{Dj} + sup|∇ψ_j|·2^{D(j+1)}`.
    pub fn psi_constant(&self) -> f64 {
        self.pieces.iter().map(|p| p.cert.constant).fold(0.0, f64::max)
    }

    /// `K(x)`.
    pub fn kernel(&self, x: &[f64]) -> f64 {
        self.spec.eval(x)
    }

    /// `ψ_j(x)` at a real point.
    pub fn psi(&self, j: u32, x: &[f64]) -> Result<f64> {
        let p = self.piece(j)?;
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (a, b) = (p.cert.inner, p.cert.outer);
        if r <= a || r >= b {
            return Ok(0.0);
        }
        Ok(self.spec.eval(x) * window(j, r) - p.bump_coeff * bump(r, a, b))
    }

    /// Lattice table of `ψ_j`.
    pub fn table(&self, j: u32) -> Result<&LatticeTable> {
        Ok(&self.piece(j)?.table)
    }

    /// `Σ_{j=1}^{j_max} ψ_j(x)`.
    pub fn sum_pieces(&self, x: &[f64]) -> f64 {
        let mut acc = CompensatedSum::new();
        for j in 1..=self.j_max {
            acc.add(self.psi(j, x).unwrap_or(0.0));
        }
        acc.value()
    }

    /// Radii `1 ≤ |x| ≤ 2^{j_max−1}` on which the pieces of a mean-zero
    /// kernel add up to `K`.
    pub fn reconstruction_range(&self) -> (f64, f64) {
        (1.0, 2f64.powi(self.j_max as i32 - 1))
    }

    pub fn report(&self) -> FamilyReport {
        FamilyReport {
            kernel: self.spec.name(),
            dim: self.dim(),
            j_max: self.j_max,
            cz: self.cz.clone(),
            psi_constant: self.psi_constant(),
            pieces: self.pieces.iter().map(|p| p.cert.clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_is_c1_cutoff() {
        assert_eq!(eta(0.3), 1.0);
        assert_eq!(eta(1.2), 0.0);
        assert!((eta(0.75) - 0.5).abs() < 1e-15);
        let h = 1e-7;
        assert!(((eta(0.5 + h) - eta(0.5)) / h).abs() < 1e-5);
        assert!(((eta(1.0) - eta(1.0 - h)) / h).abs() < 1e-5);
    }

    #[test]
    fn builtin_kernels_are_normalized() {
        for spec in [KernelSpec::Hilbert, KernelSpec::Riesz { dim: 2 }, KernelSpec::LogOscillating] {
            let c = cz_certificate(&spec, 0.25, 64.0).unwrap();
            assert!(c.total <= 1.0 + 1e-9, "{} {:?}", spec.name(), c);
            assert!(c.total > 0.4, "{} {:?}", spec.name(), c);
        }
    }

    #[test]
    fn hilbert_pieces_are_odd_and_mean_zero() {
        let fam = build_psi(KernelSpec::Hilbert, 6).unwrap();
        for j in 1..=6 {
            let c = fam.certificate(j).unwrap();
            assert_eq!(c.raw_mean, 0.0);
            assert_eq!(c.correction, 0.0);
            assert_eq!(c.lattice_mean, 0.0);
            let x = 0.7 * 2f64.powi(j as i32 - 1);
            assert_eq!(fam.psi(j, &[x]).unwrap(), -fam.psi(j, &[-x]).unwrap());
        }
        for m in 1..=32 {
            let x = m as f64;
            assert!((fam.sum_pieces(&[x]) - fam.kernel(&[x])).abs() < 1e-12);
        }
    }

    #[test]
    fn riesz_pieces_vanish_in_mean() {
        let fam = build_psi(KernelSpec::Riesz { dim: 2 }, 4).unwrap();
        for j in 1..=4 {
            assert_eq!(fam.certificate(j).unwrap().raw_mean, 0.0);
        }
        assert!((fam.sum_pieces(&[3.0, 4.0]) - fam.kernel(&[3.0, 4.0])).abs() < 1e-12);
    }

    #[test]
    fn log_oscillating_needs_and_gets_correction() {
        let fam = build_psi(KernelSpec::LogOscillating, 6).unwrap();
        let annulus = fam.cz_certificate().annulus;
        for j in 1..=6 {
            let c = fam.certificate(j).unwrap();
            assert!(c.raw_mean.abs() > 1e-6, "{c:?}");
            assert!(c.raw_mean.abs() <= annulus + 1e-12);
            assert!(c.mean.abs() < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn custom_kernel_over_declared_bound_is_rejected() {
        let spec = KernelSpec::Custom(CustomKernel {
            name: "big".into(),
            dim: 1,
            f: Arc::new(|x| 3.0 / x[0]),
            declared_cz: 1.0,
        });
        assert!(matches!(build_psi(spec, 3), Err(Error::Precondition(_))));
    }
}
