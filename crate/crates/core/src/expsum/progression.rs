use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// One axis `{a, a+σ, …, a+(L−1)σ}` of a progression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Axis {
    pub start: i64,
    pub gap: i64,
    pub count: u64,
}

/// Product progression `P₁ × … × P_D` inside the box `[N₁] × … × [N_D]`,
/// where `[N] = {1, …, N}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Progression {
    axes: Vec<Axis>,
    ambient: Vec<u64>,
}

impl Progression {
    pub fn new(axes: Vec<Axis>, ambient: Vec<u64>) -> Result<Self> {
        if axes.len() != ambient.len() {
            return Err(Error::Dimension { expected: ambient.len(), got: axes.len() });
        }
        if axes.is_empty() {
            return Err(Error::domain("progression needs at least one axis"));
        }
        for (i, (ax, &n)) in axes.iter().zip(&ambient).enumerate() {
            if ax.gap < 1 {
                return Err(Error::domain(format!("axis {i}: gap must be at least 1")));
            }
            if ax.count == 0 {
                return Err(Error::domain(format!("axis {i}: empty progression")));
            }
            let last = ax.start as i128 + (ax.count as i128 - 1) * ax.gap as i128;
            if ax.start < 1 || last > n as i128 {
                return Err(Error::domain(format!(
                    "axis {i}: elements {}..={last} leave the box [1, {n}]",
                    ax.start
                )));
            }
        }
        Ok(Progression { axes, ambient })
    }

    /// The whole box `[N₁] × … × [N_D]`.
    pub fn full_box(ambient: &[u64]) -> Result<Self> {
        Self::new(
            ambient.iter().map(|&n| Axis { start: 1, gap: 1, count: n }).collect(),
            ambient.to_vec(),
        )
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn ambient(&self) -> &[u64] {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Number of elements `Π L_i`.
    pub fn len(&self) -> u64 {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|N| = Π N_i`.
    pub fn ambient_volume(&self) -> f64 {
        self.ambient.iter().map(|&n| n as f64).product()
    }

    /// Element with linear index `idx`, axis 0 varying slowest.
    pub fn point(&self, mut idx: u64, out: &mut [i64]) {
        for i in (0..self.axes.len()).rev() {
            let ax = &self.axes[i];
            let t = idx % ax.count;
            idx /= ax.count;
            out[i] = ax.start + t as i64 * ax.gap;
        }
    }
}

type AmpFn = Arc<dyn Fn(&[i64]) -> f64 + Send + Sync>;

/// Amplitude `φ` on a progression: a constant or an arbitrary real function.
#[derive(Clone)]
pub enum Amplitude {
    Constant(f64),
    Function { name: String, f: AmpFn },
}

impl fmt::Debug for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Amplitude::Constant(c) => write!(f, "Constant({c})"),
            Amplitude::Function { name, .. } => write!(f, "Function({name})"),
        }
    }
}

impl Amplitude {
    pub fn one() -> Self {
        Amplitude::Constant(1.0)
    }

    pub fn function(name: impl Into<String>, f: impl Fn(&[i64]) -> f64 + Send + Sync + 'static) -> Self {
        Amplitude::Function { name: name.into(), f: Arc::new(f) }
    }

    /// `φ(n) = c·Π_i (1 − n_i/(2N_i))`, a slowly varying weight whose
    /// regularity certificate is at most `c·(1 + D/2)`.
    pub fn tent(ambient: &[u64], c: f64) -> Self {
        let ns: Vec<f64> = ambient.iter().map(|&n| n as f64).collect();
        Amplitude::function("tent", move |n: &[i64]| {
            c * n.iter().zip(&ns).map(|(&x, &big)| 1.0 - x as f64 / (2.0 * big)).product::<f64>()
        })
    }

    #[inline]
    pub fn at(&self, n: &[i64]) -> f64 {
        match self {
            Amplitude::Constant(c) => *c,
            Amplitude::Function { f, .. } => f(n),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Amplitude::Constant(c) => format!("constant({c})"),
            Amplitude::Function { name, .. } => name.clone(),
        }
    }

    /// `sup|φ| + Σ_j N_j·sup|φ − φ(· − e_j)|` over the progression, the
    /// differences taken where both points lie in the progression's box.
    pub fn certificate(&self, prog: &Progression) -> f64 {
        let dim = prog.dim();
        let mut sup = 0.0f64;
        let mut lips = vec![0.0f64; dim];
        let mut n = vec![0i64; dim];
        let mut m = vec![0i64; dim];
        for idx in 0..prog.len() {
            prog.point(idx, &mut n);
            let v = self.at(&n);
            sup = sup.max(v.abs());
            for j in 0..dim {
                m.copy_from_slice(&n);
                m[j] -= 1;
                if m[j] >= 1 {
                    lips[j] = lips[j].max((v - self.at(&m)).abs());
                }
            }
        }
        sup + lips
            .iter()
            .zip(prog.ambient())
            .map(|(l, &r)| l * r as f64)
            .sum::<f64>()
    }

    pub fn is_normalized(&self, prog: &Progression) -> bool {
        self.certificate(prog) <= 1.0 + 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn progression_bounds() {
        assert!(Progression::new(vec![Axis { start: 1, gap: 3, count: 4 }], vec![10]).is_ok());
        assert!(Progression::new(vec![Axis { start: 1, gap: 3, count: 5 }], vec![10]).is_err());
        assert!(Progression::new(vec![Axis { start: 0, gap: 1, count: 2 }], vec![10]).is_err());
        assert!(Progression::new(vec![Axis { start: 2, gap: 0, count: 2 }], vec![10]).is_err());
    }

    #[test]
    fn point_enumeration_is_lexicographic() {
        let p = Progression::full_box(&[2, 3]).unwrap();
        let mut n = [0i64; 2];
        let pts: Vec<[i64; 2]> = (0..p.len())
            .map(|i| {
                p.point(i, &mut n);
                n
            })
            .collect();
        assert_eq!(pts, vec![[1, 1], [1, 2], [1, 3], [2, 1], [2, 2], [2, 3]]);
    }

    #[test]
    fn certificates() {
        let p = Progression::full_box(&[100]).unwrap();
        assert_eq!(Amplitude::one().certificate(&p), 1.0);
        let t = Amplitude::tent(&[100], 2.0 / 3.0);
        let c = t.certificate(&p);
        assert!(c <= 1.0 && c > 0.9, "{c}");
    }
}
