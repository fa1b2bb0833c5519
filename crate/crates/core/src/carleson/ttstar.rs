//! `TT*` kernels of single-scale modulated operators, Schur-test row sums,
//! and empirical norms of the single-scale supremum operator.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::kernel::DyadicKernelFamily;
use super::operator::Grid;
use crate::error::{Error, Result};
use crate::numeric::{fit_line, max_of, unit_phase, CompensatedSum};
use crate::polycore::{RealPoly, ScaleVec};
use crate::sampling::{rng_for, sample_at_level};

/// Default cap on the dense `|𝒦|` matrix size.
pub const DEFAULT_MATRIX_BUDGET: usize = 1 << 26;

/// Tabulated choice of polynomial `x ↦ P_{λ(x)}` on a box.
#[derive(Debug, Clone)]
pub struct Linearizer {
    extents: Vec<usize>,
    polys: Vec<RealPoly>,
}

impl Linearizer {
    pub fn new(extents: Vec<usize>, polys: Vec<RealPoly>) -> Result<Self> {
        let len: usize = extents.iter().product();
        if len != polys.len() || len == 0 {
            return Err(Error::domain(format!("linearizer needs {len} polynomials, got {}", polys.len())));
        }
        let dim = extents.len();
        let d = polys[0].degree_bound();
        for p in &polys {
            if p.dim() != dim {
                return Err(Error::Dimension { expected: dim, got: p.dim() });
            }
            if p.degree_bound() != d {
                return Err(Error::domain("linearizer polynomials must share one degree bound"));
            }
        }
        Ok(Linearizer { extents, polys })
    }

    /// The same polynomial at every point.
    pub fn constant(extents: Vec<usize>, p: RealPoly) -> Result<Self> {
        let len = extents.iter().product();
        Linearizer::new(extents, vec![p; len])
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    fn grid(&self) -> Grid {
        Grid { extents: self.extents.clone(), data: vec![0.0; self.polys.len()] }
    }

    /// Polynomial attached to a box point.
    pub fn at(&self, x: &[i64]) -> Result<&RealPoly> {
        let idx = self.grid().index(x).ok_or_else(|| Error::domain(format!("{x:?} outside the linearizer box")))?;
        Ok(&self.polys[idx])
    }

    pub fn polys(&self) -> &[RealPoly] {
        &self.polys
    }
}

/// Draws an independent level-set polynomial `N_{2^k}(P) = 2^s` for every
/// box point. Returns `None` if the sampler exhausts `budget` draws at some point.
pub fn sample_linearizer<R: Rng>(
    rng: &mut R,
    d: u32,
    extents: Vec<usize>,
    k: u32,
    s: i64,
    budget: u64,
) -> Result<Option<Linearizer>> {
    let dim = extents.len();
    let r = ScaleVec::uniform(dim, 2f64.powi(k as i32))?;
    let len: usize = extents.iter().product();
    let mut polys = Vec::with_capacity(len);
    for _ in 0..len {
        match sample_at_level(rng, d, &r, s, budget).0 {
            Some(p) => polys.push(p),
            None => return Ok(None),
        }
    }
    Linearizer::new(extents, polys).map(Some)
}

/// `𝒦(x,n) = Σ_m e(P_{λ(x)}(x−m) − P_{μ(n)}(n−m)) ψ_k(x−m) ψ_r(n−m)`.
pub fn ttstar_kernel(
    family: &DyadicKernelFamily,
    x: &[i64],
    n: &[i64],
    lambda: &Linearizer,
    mu: &Linearizer,
    k: u32,
    r: u32,
) -> Result<Complex64> {
    let dim = family.dim();
    if x.len() != dim || n.len() != dim {
        return Err(Error::Dimension { expected: dim, got: x.len().min(n.len()) });
    }
    let p = lambda.at(x)?;
    let q = mu.at(n)?;
    let tr = family.table(r)?;
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut v = vec![0i64; dim];
    for (u, a) in family.table(k)?.support() {
        // m = x − u, so n − m = n − x + u
        for i in 0..dim {
            v[i] = n[i] - x[i] + u[i];
        }
        let b = tr.get(&v);
        if b == 0.0 {
            continue;
        }
        let z = unit_phase(p.phase_at(u)? - q.phase_at(&v)?) * (a * b);
        re.add(z.re);
        im.add(z.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Schur-test summary of a kernel on a finite box.
#[derive(Debug, Clone, Serialize)]
pub struct SchurReport {
    /// `sup_x Σ_n |𝒦(x,n)|`.
    pub row_sup: f64,
    /// `sup_n Σ_x |𝒦(x,n)|`.
    pub col_sup: f64,
    /// `√(row_sup · col_sup)`, an upper bound for the operator norm.
    pub norm_bound: f64,
}

/// Row and column absolute sums of a kernel given by index on `0..size`.
pub fn schur_rows<F>(size: usize, kernel: F) -> Result<SchurReport>
where
    F: Fn(usize, usize) -> Result<Complex64> + Sync,
{
    let rows: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|x| (0..size).map(|n| kernel(x, n).map(|z| z.norm())).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(schur_from_abs(&rows))
}

fn schur_from_abs(rows: &[Vec<f64>]) -> SchurReport {
    let size = rows.len();
    let mut row_sup: f64 = 0.0;
    let mut cols = vec![CompensatedSum::new(); size];
    for row in rows {
        let mut acc = CompensatedSum::new();
        for (n, &v) in row.iter().enumerate() {
            acc.add(v);
            cols[n].add(v);
        }
        row_sup = row_sup.max(acc.value());
    }
    let col_sup = cols.iter().map(|c| c.value()).fold(0.0, f64::max);
    SchurReport { row_sup, col_sup, norm_bound: (row_sup * col_sup).sqrt() }
}

/// Schur sums of the Gram kernel `𝒦(x,n)` with `μ = λ` and `r = k`, every
/// pair of box points included.
pub fn gram_schur(family: &DyadicKernelFamily, lin: &Linearizer, k: u32) -> Result<SchurReport> {
    gram_schur_with_budget(family, lin, k, DEFAULT_MATRIX_BUDGET)
}

pub fn gram_schur_with_budget(
    family: &DyadicKernelFamily,
    lin: &Linearizer,
    k: u32,
    budget: usize,
) -> Result<SchurReport> {
    let dim = family.dim();
    if lin.extents().len() != dim {
        return Err(Error::Dimension { expected: dim, got: lin.extents().len() });
    }
    let size = lin.len();
    if size.saturating_mul(size) > budget {
        return Err(Error::budget(format!("{size}² kernel entries exceed budget {budget}")));
    }
    let table = family.table(k)?;
    let support = table.support();
    let half = table.half_width();
    let side = (2 * half + 1) as usize;
    // dense offset → support position
    let mut slot = vec![usize::MAX; side.pow(dim as u32)];
    let dense_index = |u: &[i64]| -> Option<usize> {
        let mut idx = 0usize;
        for &c in u {
            if c.abs() > half {
                return None;
            }
            idx = idx * side + (c + half) as usize;
        }
        Some(idx)
    };
    for (pos, (u, _)) in support.iter().enumerate() {
        slot[dense_index(u).expect("support lies in its table")] = pos;
    }
    let grid = lin.grid();
    // a_x(u) = e(P_{λ(x)}(u)) ψ_k(u)
    let vectors: Vec<Vec<Complex64>> = lin
        .polys()
        .par_iter()
        .map(|p| support.iter().map(|(u, v)| Ok(unit_phase(p.phase_at(u)?) * *v)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let reach = 2 * half;
    let rows: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|xi| {
            let mut x = vec![0i64; dim];
            let mut n = vec![0i64; dim];
            let mut w = vec![0i64; dim];
            grid.point(xi, &mut x);
            let ax = &vectors[xi];
            let mut row = vec![0.0; size];
            for (ni, out) in row.iter_mut().enumerate() {
                grid.point(ni, &mut n);
                if x.iter().zip(&n).any(|(a, b)| (a - b).abs() >= reach) {
                    continue;
                }
                let an = &vectors[ni];
                let mut re = CompensatedSum::new();
                let mut im = CompensatedSum::new();
                for (pos, (u, _)) in support.iter().enumerate() {
                    for i in 0..dim {
                        w[i] = n[i] - x[i] + u[i];
                    }
                    let Some(di) = dense_index(&w) else { continue };
                    let q = slot[di];
                    if q == usize::MAX {
                        continue;
                    }
                    let z = ax[pos] * an[q].conj();
                    re.add(z.re);
                    im.add(z.im);
                }
                *out = Complex64::new(re.value(), im.value()).norm();
            }
            row
        })
        .collect();
    Ok(schur_from_abs(&rows))
}

/// `ℓ¹` norm of the autocorrelation `v ↦ Σ_u ψ_k(u)ψ_k(u+v)`.
pub fn autocorrelation_l1(family: &DyadicKernelFamily, k: u32) -> Result<f64> {
    let table = family.table(k)?;
    let dim = family.dim();
    let reach = 2 * table.half_width();
    let side = (2 * reach + 1) as usize;
    let mut total = CompensatedSum::new();
    let mut v = vec![0i64; dim];
    let mut w = vec![0i64; dim];
    for idx in 0..side.pow(dim as u32) {
        let mut rest = idx;
        for i in (0..dim).rev() {
            v[i] = (rest % side) as i64 - reach;
            rest /= side;
        }
        let mut acc = CompensatedSum::new();
        for (u, a) in table.support() {
            for i in 0..dim {
                w[i] = u[i] + v[i];
            }
            acc.add(a * table.get(&w));
        }
        total.add(acc.value().abs());
    }
    Ok(total.value())
}

/// Parameters of the Schur sweep over coefficient-norm levels.
#[derive(Debug, Clone, Serialize)]
pub struct SchurSweepParams {
    pub d: u32,
    pub k: u32,
    pub box_len: usize,
    pub s_values: Vec<i64>,
    pub trials: usize,
    pub draw_budget: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchurLevel {
    pub s: i64,
    pub trials_run: usize,
    /// Level set too thin for the sampler at this `s`.
    pub thin: bool,
    pub row_sup: Option<f64>,
    pub col_sup: Option<f64>,
    pub norm_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchurSweep {
    pub params: SchurSweepParams,
    pub levels: Vec<SchurLevel>,
    /// `c₀` in `sup_x Σ_n |𝒦| ≈ C·2^{−c₀ s}`, by least squares on `log₂`.
    pub c0: Option<f64>,
    pub col_sup_max: f64,
    pub col_sup_min: f64,
}

/// Gram-kernel Schur sums on the line for i.i.d. level-set linearizers,
/// one row per `s`. Each `(s, trial)` uses its own random stream.
pub fn schur_sweep(family: &DyadicKernelFamily, params: &SchurSweepParams) -> Result<SchurSweep> {
    if family.dim() != 1 {
        return Err(Error::Dimension { expected: 1, got: family.dim() });
    }
    let mut levels = Vec::new();
    for (si, &s) in params.s_values.iter().enumerate() {
        let mut row: f64 = 0.0;
        let mut col: f64 = 0.0;
        let mut run = 0;
        let mut thin = false;
        for t in 0..params.trials {
            let mut rng = rng_for(params.seed, (si * params.trials.max(1) + t) as u64);
            match sample_linearizer(&mut rng, params.d, vec![params.box_len], params.k, s, params.draw_budget)? {
                Some(lin) => {
                    let rep = gram_schur(family, &lin, params.k)?;
                    row = row.max(rep.row_sup);
                    col = col.max(rep.col_sup);
                    run += 1;
                }
                None => {
                    thin = true;
                    break;
                }
            }
        }
        let got = run > 0;
        levels.push(SchurLevel {
            s,
            trials_run: run,
            thin,
            row_sup: got.then_some(row),
            col_sup: got.then_some(col),
            norm_bound: got.then_some((row * col).sqrt()),
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = levels
        .iter()
        .filter_map(|l| l.row_sup.filter(|&v| v > 0.0).map(|v| (l.s as f64, v.log2())))
        .unzip();
    let c0 = fit_line(&xs, &ys).map(|(slope, _)| -slope);
    let cols: Vec<f64> = levels.iter().filter_map(|l| l.col_sup).collect();
    Ok(SchurSweep {
        params: params.clone(),
        c0,
        col_sup_max: max_of(&cols),
        col_sup_min: cols.iter().copied().fold(f64::INFINITY, f64::min),
        levels,
    })
}

/// `x ↦ max_{P ∈ pool} |Σ_u ψ_k(u) e(P(u)) f(x−u)|`.
pub fn single_scale_sup(f: &Grid, family: &DyadicKernelFamily, k: u32, pool: &[RealPoly]) -> Result<Grid> {
    let dim = family.dim();
    if f.dim() != dim {
        return Err(Error::Dimension { expected: dim, got: f.dim() });
    }
    let support = family.table(k)?.support();
    let mut weights = Vec::with_capacity(pool.len() * support.len());
    for p in pool {
        for (u, v) in support {
            weights.push(unit_phase(p.phase_at(u)?) * *v);
        }
    }
    let per = support.len();
    let values = (0..f.len())
        .into_par_iter()
        .map(|xi| {
            let mut x = vec![0i64; dim];
            let mut y = vec![0i64; dim];
            f.point(xi, &mut x);
            let local: Vec<f64> = support
                .iter()
                .map(|(u, _)| {
                    for i in 0..dim {
                        y[i] = x[i] - u[i];
                    }
                    f.index(&y).map_or(0.0, |idx| f.data[idx])
                })
                .collect();
            let mut best: f64 = 0.0;
            for l in 0..pool.len() {
                let w = &weights[l * per..(l + 1) * per];
                let mut acc = Complex64::new(0.0, 0.0);
                for (wt, &v) in w.iter().zip(&local) {
                    acc += wt * v;
                }
                best = best.max(acc.norm());
            }
            best
        })
        .collect();
    Grid::new(f.extents.clone(), values)
}

/// Parameters of the empirical single-scale norm estimate.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorNormParams {
    pub d: u32,
    pub k: u32,
    pub a0: f64,
    pub box_len: usize,
    pub pool: usize,
    pub trials: usize,
    pub draw_budget: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorNormRow {
    pub s: i64,
    /// `2^s ≥ k^{A₀}`: the level belongs to the error class at scale `k`.
    pub error_class: bool,
    pub pool_size: usize,
    pub thin: bool,
    pub ratios: Vec<f64>,
    pub max_ratio: Option<f64>,
}

/// `‖sup_{P∈pool} |T_P f|‖₂/‖f‖₂` over random `±1` inputs, where the pool is
/// drawn from `{P : N_{2^k}(P) = 2^s}`.
pub fn error_op_norm(family: &DyadicKernelFamily, s: i64, params: &ErrorNormParams) -> Result<ErrorNormRow> {
    if family.dim() != 1 {
        return Err(Error::Dimension { expected: 1, got: family.dim() });
    }
    let r = ScaleVec::uniform(1, 2f64.powi(params.k as i32))?;
    let mut rng = rng_for(params.seed, s.rem_euclid(1 << 20) as u64);
    let mut pool = Vec::with_capacity(params.pool);
    for _ in 0..params.pool {
        if let Some(p) = sample_at_level(&mut rng, params.d, &r, s, params.draw_budget).0 {
            pool.push(p);
        }
    }
    let error_class = 2f64.powi(s as i32) >= (params.k as f64).powf(params.a0);
    if pool.is_empty() {
        return Ok(ErrorNormRow { s, error_class, pool_size: 0, thin: true, ratios: vec![], max_ratio: None });
    }
    let mut ratios = Vec::with_capacity(params.trials);
    for _ in 0..params.trials {
        let data = (0..params.box_len).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        let f = Grid::new(vec![params.box_len], data)?;
        let out = single_scale_sup(&f, family, params.k, &pool)?;
        ratios.push(out.l2_norm() / f.l2_norm());
    }
    Ok(ErrorNormRow {
        s,
        error_class,
        pool_size: pool.len(),
        thin: pool.len() < params.pool,
        max_ratio: Some(max_of(&ratios)),
        ratios,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorNormSweep {
    pub params: ErrorNormParams,
    pub rows: Vec<ErrorNormRow>,
    /// Slope of `log₂(max ratio)` against `s`; negative means decay.
    pub slope: Option<f64>,
}

pub fn error_norm_sweep(family: &DyadicKernelFamily, s_values: &[i64], params: &ErrorNormParams) -> Result<ErrorNormSweep> {
    let rows = s_values.iter().map(|&s| error_op_norm(family, s, params)).collect::<Result<Vec<_>>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.max_ratio.filter(|&v| v > 0.0).map(|v| (r.s as f64, v.log2())))
        .unzip();
    Ok(ErrorNormSweep { params: params.clone(), slope: fit_line(&xs, &ys).map(|(a, _)| a), rows })
}
