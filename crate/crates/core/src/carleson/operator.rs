//! The maximally modulated, maximally truncated discrete operator on a
//! finite box, with the modulation supremum taken over a finite grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::DyadicKernelFamily;
use crate::error::{Error, Result};
use crate::numeric::{unit_phase, CompensatedSum};
use crate::polycore::{IndexSet, MultiIndex, RealPoly};

/// Label attached to every grid supremum.
pub const GRID_LABEL: &str = "grid lower bound of the supremum";

/// Default refinement factor of the modulation grid.
pub const DEFAULT_REFINEMENT: u64 = 4;

/// Default cap on stored modulated taps (grid size times kernel support).
pub const DEFAULT_TAP_BUDGET: usize = 1 << 26;

/// Real function on the box `[0, n₁) × … × [0, n_D)`, row-major with axis 0
/// slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub extents: Vec<usize>,
    pub data: Vec<f64>,
}

impl Grid {
    pub fn new(extents: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if extents.is_empty() || extents.contains(&0) {
            return Err(Error::domain("grid extents must be positive"));
        }
        let len = extents.iter().try_fold(1usize, |acc, &e| acc.checked_mul(e));
        if len != Some(data.len()) {
            return Err(Error::domain(format!("grid of extents {extents:?} needs {len:?} values, got {}", data.len())));
        }
        Ok(Grid { extents, data })
    }

    pub fn zeros(extents: Vec<usize>) -> Result<Self> {
        let len = extents.iter().product();
        Grid::new(extents, vec![0.0; len])
    }

    /// Indicator of a single point.
    pub fn delta(extents: Vec<usize>, at: &[usize]) -> Result<Self> {
        let mut g = Grid::zeros(extents)?;
        let idx = g.index(&at.iter().map(|&v| v as i64).collect::<Vec<_>>()).ok_or_else(|| Error::domain("delta outside the box"))?;
        g.data[idx] = 1.0;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Linear index of a point, `None` outside the box.
    pub fn index(&self, x: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for (&c, &n) in x.iter().zip(&self.extents) {
            if c < 0 || c as usize >= n {
                return None;
            }
            idx = idx * n + c as usize;
        }
        Some(idx)
    }

    /// Coordinates of a linear index.
    pub fn point(&self, mut idx: usize, out: &mut [i64]) {
        for k in (0..self.extents.len()).rev() {
            out[k] = (idx % self.extents[k]) as i64;
            idx /= self.extents[k];
        }
    }

    pub fn l2_norm(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for v in &self.data {
            acc.add(v * v);
        }
        acc.value().sqrt()
    }
}

/// Finite set of modulations over which the supremum is taken.
#[derive(Debug, Clone)]
pub enum LambdaGrid {
    /// `λ_α ∈ {i/(G·2^{k₀|α|})}` for every `α ∈ Γ_{d,D}`, with `k₀ = j_max`.
    Uniform { d: u32, dim: usize, refinement: u64 },
    /// An explicit list of polynomials.
    Explicit(Vec<RealPoly>),
}

impl LambdaGrid {
    /// Number of grid points for a family with top scale `j_max`.
    pub fn size(&self, j_max: u32) -> Result<usize> {
        match self {
            LambdaGrid::Explicit(v) => Ok(v.len()),
            LambdaGrid::Uniform { d, dim, refinement } => {
                let mut total = 1usize;
                for a in IndexSet::new(*d, *dim).members() {
                    total = total
                        .checked_mul(axis_count(*refinement, j_max, a)?)
                        .ok_or_else(|| Error::budget("modulation grid size overflows"))?;
                }
                Ok(total)
            }
        }
    }

    /// The grid polynomials in lexicographic order of their coordinate indices.
    pub fn polys(&self, j_max: u32) -> Result<Vec<RealPoly>> {
        match self {
            LambdaGrid::Explicit(v) => Ok(v.clone()),
            LambdaGrid::Uniform { d, dim, refinement } => {
                let set = IndexSet::new(*d, *dim);
                let members = set.members().to_vec();
                let counts = members
                    .iter()
                    .map(|a| axis_count(*refinement, j_max, a))
                    .collect::<Result<Vec<_>>>()?;
                let total = self.size(j_max)?;
                let mut out = Vec::with_capacity(total);
                let mut digits = vec![0usize; members.len()];
                for _ in 0..total {
                    let terms = members
                        .iter()
                        .zip(&digits)
                        .zip(&counts)
                        .map(|((a, &i), &n)| (a.clone(), i as f64 / n as f64));
                    out.push(RealPoly::restricted(*dim, *d, terms)?);
                    for k in (0..digits.len()).rev() {
                        digits[k] += 1;
                        if digits[k] < counts[k] {
                            break;
                        }
                        digits[k] = 0;
                    }
                }
                Ok(out)
            }
        }
    }
}

fn axis_count(refinement: u64, j_max: u32, a: &MultiIndex) -> Result<usize> {
    if refinement == 0 {
        return Err(Error::domain("grid refinement must be positive"));
    }
    let shift = j_max as u64 * a.degree() as u64;
    if shift >= 40 {
        return Err(Error::budget(format!("grid axis for {a} needs 2^{shift} points")));
    }
    Ok((refinement << shift) as usize)
}

/// Options for [`carleson_apply`].
#[derive(Debug, Clone)]
pub struct ApplyParams {
    pub grid: LambdaGrid,
    /// Allowed truncation scales `k₀`; `None` means all of `1..=j_max`.
    pub truncations: Option<Vec<u32>>,
    pub tap_budget: usize,
}

impl ApplyParams {
    pub fn uniform(d: u32, dim: usize, refinement: u64) -> Self {
        ApplyParams {
            grid: LambdaGrid::Uniform { d, dim, refinement },
            truncations: None,
            tap_budget: DEFAULT_TAP_BUDGET,
        }
    }
}

/// Result of [`carleson_apply`].
#[derive(Debug, Clone, Serialize)]
pub struct ApplyReport {
    pub label: &'static str,
    pub values: Grid,
    pub grid_points: usize,
    pub truncations: Vec<u32>,
    pub input_l2: f64,
    pub output_l2: f64,
    /// `‖output‖₂ / ‖f‖₂`, zero when `f ≡ 0`.
    pub ratio: f64,
}

fn truncation_mask(family: &DyadicKernelFamily, t: &Option<Vec<u32>>) -> Result<Vec<bool>> {
    let j_max = family.j_max();
    let mut mask = vec![t.is_none(); j_max as usize + 1];
    mask[0] = false;
    if let Some(list) = t {
        if list.is_empty() {
            return Err(Error::domain("truncation set is empty"));
        }
        for &k in list {
            if k == 0 || k > j_max {
                return Err(Error::domain(format!("truncation {k} outside 1..={j_max}")));
            }
            mask[k as usize] = true;
        }
    }
    Ok(mask)
}

/// Modulated taps `ψ_k(u)e(P(u))` grouped by scale.
struct Taps {
    offsets: Vec<Vec<i64>>,
    /// `starts[k]..starts[k+1]` indexes scale `k + 1`.
    starts: Vec<usize>,
}

fn build_offsets(family: &DyadicKernelFamily) -> Result<(Taps, Vec<f64>)> {
    let mut offsets = Vec::new();
    let mut values = Vec::new();
    let mut starts = vec![0];
    for k in 1..=family.j_max() {
        for (u, v) in family.table(k)?.support() {
            offsets.push(u.clone());
            values.push(*v);
        }
        starts.push(offsets.len());
    }
    Ok((Taps { offsets, starts }, values))
}

/// `x ↦ max_{λ ∈ grid} max_{k₀} |Σ_{k≤k₀} Σ_m ψ_k(m) e(P_λ(m)) f(x−m)|`.
///
/// The result is a lower bound for the supremum over all modulations.
pub fn carleson_apply(f: &Grid, family: &DyadicKernelFamily, params: &ApplyParams) -> Result<ApplyReport> {
    let dim = family.dim();
    if f.dim() != dim {
        return Err(Error::Dimension { expected: dim, got: f.dim() });
    }
    let mask = truncation_mask(family, &params.truncations)?;
    let n_lambda = params.grid.size(family.j_max())?;
    if n_lambda == 0 {
        return Err(Error::domain("modulation grid is empty"));
    }
    let (taps, psi) = build_offsets(family)?;
    let per = psi.len();
    if n_lambda.saturating_mul(per) > params.tap_budget {
        return Err(Error::budget(format!(
            "{n_lambda} grid points times {per} taps exceeds budget {}",
            params.tap_budget
        )));
    }
    let polys = params.grid.polys(family.j_max())?;
    for p in &polys {
        if p.dim() != dim {
            return Err(Error::Dimension { expected: dim, got: p.dim() });
        }
    }
    let mut weights = Vec::with_capacity(n_lambda * per);
    for p in &polys {
        for (u, v) in taps.offsets.iter().zip(&psi) {
            weights.push(unit_phase(p.phase_at(u)?) * *v);
        }
    }

    let values: Vec<f64> = (0..f.len())
        .into_par_iter()
        .map(|xi| {
            let mut x = vec![0i64; dim];
            f.point(xi, &mut x);
            // gather f(x − u) once per point
            let mut local = vec![0.0; per];
            let mut any = false;
            let mut y = vec![0i64; dim];
            for (t, u) in taps.offsets.iter().enumerate() {
                for i in 0..dim {
                    y[i] = x[i] - u[i];
                }
                if let Some(idx) = f.index(&y) {
                    local[t] = f.data[idx];
                    any |= local[t] != 0.0;
                }
            }
            if !any {
                return 0.0;
            }
            let mut best: f64 = 0.0;
            for l in 0..n_lambda {
                let w = &weights[l * per..(l + 1) * per];
                let mut partial = Complex64::new(0.0, 0.0);
                for k in 1..taps.starts.len() {
                    for t in taps.starts[k - 1]..taps.starts[k] {
                        if local[t] != 0.0 {
                            partial += w[t] * local[t];
                        }
                    }
                    if mask[k] {
                        best = best.max(partial.norm());
                    }
                }
            }
            best
        })
        .collect();
    let out = Grid::new(f.extents.clone(), values)?;
    let input_l2 = f.l2_norm();
    let output_l2 = out.l2_norm();
    Ok(ApplyReport {
        label: GRID_LABEL,
        grid_points: n_lambda,
        truncations: (1..=family.j_max()).filter(|&k| mask[k as usize]).collect(),
        ratio: if input_l2 > 0.0 { output_l2 / input_l2 } else { 0.0 },
        input_l2,
        output_l2,
        values: out,
    })
}

/// Closed form of the operator on a point mass: `max_{k₀} |Σ_{k≤k₀} ψ_k(u)|`.
pub fn delta_response(family: &DyadicKernelFamily, u: &[i64], truncations: &Option<Vec<u32>>) -> Result<f64> {
    let mask = truncation_mask(family, truncations)?;
    let mut partial = 0.0;
    let mut best: f64 = 0.0;
    for k in 1..=family.j_max() {
        partial += family.table(k)?.get(u);
        if mask[k as usize] {
            best = best.max(partial.abs());
        }
    }
    Ok(best)
}

/// Outcome of comparing the operator at refinement `G` and `2G` on random inputs.
#[derive(Debug, Clone, Serialize)]
pub struct RefinementReport {
    pub refinement: u64,
    pub ratios_coarse: Vec<f64>,
    pub ratios_fine: Vec<f64>,
    /// `max (fine/coarse − 1)` over inputs.
    pub max_relative_change: f64,
    /// Every fine output dominates the coarse output pointwise.
    pub monotone: bool,
}

/// `ℓ²` ratios of the grid operator on the given inputs at refinement `G`
/// and `2G`.
pub fn refinement_stability(
    family: &DyadicKernelFamily,
    d: u32,
    refinement: u64,
    inputs: &[Grid],
) -> Result<RefinementReport> {
    let coarse = ApplyParams::uniform(d, family.dim(), refinement);
    let fine = ApplyParams::uniform(d, family.dim(), 2 * refinement);
    let mut ratios_coarse = Vec::new();
    let mut ratios_fine = Vec::new();
    let mut monotone = true;
    let mut change: f64 = 0.0;
    for f in inputs {
        let a = carleson_apply(f, family, &coarse)?;
        let b = carleson_apply(f, family, &fine)?;
        monotone &= a.values.data.iter().zip(&b.values.data).all(|(x, y)| y >= x);
        if a.ratio > 0.0 {
            change = change.max(b.ratio / a.ratio - 1.0);
        }
        ratios_coarse.push(a.ratio);
        ratios_fine.push(b.ratio);
    }
    Ok(RefinementReport { refinement, ratios_coarse, ratios_fine, max_relative_change: change, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleson::kernel::{build_psi, KernelSpec};

    #[test]
    fn zero_input_gives_zero() {
        let fam = build_psi(KernelSpec::Hilbert, 3).unwrap();
        let f = Grid::zeros(vec![40]).unwrap();
        let out = carleson_apply(&f, &fam, &ApplyParams::uniform(2, 1, 2)).unwrap();
        assert!(out.values.data.iter().all(|&v| v == 0.0));
        assert_eq!(out.label, GRID_LABEL);
    }

    #[test]
    fn delta_input_matches_closed_form() {
        let fam = build_psi(KernelSpec::Hilbert, 4).unwrap();
        let f = Grid::delta(vec![64], &[30]).unwrap();
        let out = carleson_apply(&f, &fam, &ApplyParams::uniform(2, 1, 2)).unwrap();
        for x in 0..64i64 {
            let want = delta_response(&fam, &[x - 30], &None).unwrap();
            assert!((out.values.data[x as usize] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_grid_counts() {
        let g = LambdaGrid::Uniform { d: 2, dim: 1, refinement: 4 };
        assert_eq!(g.size(3).unwrap(), 4 * 64);
        let polys = g.polys(3).unwrap();
        assert_eq!(polys[1].coeff(&MultiIndex::new(vec![2])), Some(&(1.0 / 256.0)));
    }
}
