//! Floating-point utilities shared by the sum kernels: exact phase reduction,
//! the unit-circle map `e(x) = exp(2πix)`, compensated accumulation, composite
//! Gauss–Legendre quadrature and small least-squares fits.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

/// `e(x) = exp(2πi x)` after reducing `x` mod 1.
///
/// The reduction goes through quarter turns, so `e(0)`, `e(1/4)`, `e(1/2)` and
/// `e(3/4)` are exactly `1`, `i`, `-1`, `-i`.
pub fn unit_phase(x: f64) -> Complex64 {
    let t = x.rem_euclid(1.0);
    let quarter = (t * 4.0).floor();
    let r = t - quarter * 0.25;
    let (s, c) = if r == 0.0 { (0.0, 1.0) } else { (TAU * r).sin_cos() };
    match quarter as i64 {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// Fractional part of `lambda * m`, in `[0, 1)`.
///
/// See [`FracMul`]; this is the one-shot form.
pub fn frac_mul(lambda: f64, m: i128) -> f64 {
    FracMul::new(lambda).apply(m)
}

/// Precomputed exact reduction of `m ↦ lambda·m mod 1`.
///
/// `lambda` is decomposed as `M·2^-k` with integer mantissa `M`, so the
/// residue of `M·m` modulo `2^k` is computed exactly in 128-bit integers and
/// the only rounding is the final conversion to `f64`.
#[derive(Debug, Clone, Copy)]
pub struct FracMul {
    lambda: f64,
    mantissa: i128,
    shift: u32,
}

impl FracMul {
    pub fn new(lambda: f64) -> Self {
        if lambda == 0.0 || !lambda.is_finite() {
            return FracMul { lambda: 0.0, mantissa: 0, shift: 0 };
        }
        let bits = lambda.to_bits();
        let sign: i128 = if bits >> 63 == 0 { 1 } else { -1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac_bits = (bits & ((1u64 << 52) - 1)) as i128;
        let (mut mantissa, mut exp) = if exp_bits == 0 {
            (frac_bits, -1074)
        } else {
            (frac_bits | (1i128 << 52), exp_bits - 1075)
        };
        while exp < 0 && mantissa & 1 == 0 {
            mantissa >>= 1;
            exp += 1;
        }
        if exp >= 0 {
            // integer-valued: every multiple is an integer
            return FracMul { lambda, mantissa: 0, shift: 0 };
        }
        FracMul { lambda, mantissa: sign * mantissa, shift: (-exp) as u32 }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn apply(&self, m: i128) -> f64 {
        if self.mantissa == 0 || m == 0 {
            return 0.0;
        }
        if self.shift < 126 {
            if let Some(prod) = self.mantissa.checked_mul(m) {
                let modulus = 1i128 << self.shift;
                let r = prod & (modulus - 1);
                let v = r as f64 / modulus as f64;
                return if v >= 1.0 { 0.0 } else { v };
            }
        }
        // Out of exact range: the product is tiny or the integer is huge.
        wrap01(self.lambda * m as f64)
    }
}

/// Reduce to `[0, 1)`.
pub fn wrap01(x: f64) -> f64 {
    let v = x.rem_euclid(1.0);
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

const GL_ORDER: usize = 16;

fn gl_pairs() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(GL_ORDER)
            .expect("fixed quadrature order is valid")
            .into_node_weight_pairs()
    })
}

/// Nodes per panel of the composite Gauss–Legendre rule.
pub fn gl_panel_order() -> usize {
    GL_ORDER
}

/// Composite Gauss–Legendre nodes and weights on `[a, b]` with `panels`
/// equal panels.
pub fn composite_gl(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let pairs = gl_pairs();
    let mut out = Vec::with_capacity(panels * pairs.len());
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for &(x, w) in pairs {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Integrate a complex integrand over `[a, b]` with the composite rule.
pub fn integrate_complex<F>(a: f64, b: f64, panels: usize, mut f: F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    let mut acc = ComplexSum::new();
    for (x, w) in composite_gl(a, b, panels) {
        acc.add(f(x) * w);
    }
    acc.value()
}

/// Least-squares line `y = slope·x + intercept`; returns `(slope, intercept)`.
/// Needs at least two distinct abscissae.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(unit_phase(0.0), Complex64::new(1.0, 0.0));
        assert_eq!(unit_phase(0.25), Complex64::new(0.0, 1.0));
        assert_eq!(unit_phase(0.5), Complex64::new(-1.0, 0.0));
        assert_eq!(unit_phase(0.75), Complex64::new(0.0, -1.0));
        assert_eq!(unit_phase(-3.5), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn unit_phase_matches_libm() {
        for i in 0..1000 {
            let x = -3.0 + i as f64 * 0.00731;
            let z = unit_phase(x);
            let (s, c) = (TAU * x).sin_cos();
            assert!((z.re - c).abs() < 1e-12 && (z.im - s).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn frac_mul_exact_cases() {
        assert_eq!(frac_mul(0.5, 3), 0.5);
        assert_eq!(frac_mul(0.25, -1), 0.75);
        assert_eq!(frac_mul(3.0, 7), 0.0);
        // 2^-40 * 2^41 is an integer
        assert_eq!(frac_mul(2f64.powi(-40), 1i128 << 41), 0.0);
        let lam = 0.1f64;
        let m: i128 = 1 << 60;
        // 0.1 is not exact; the residue is that of the stored double
        let v = frac_mul(lam, m);
        assert!((0.0..1.0).contains(&v));
    }

    #[test]
    fn frac_mul_agrees_with_naive_on_small_inputs() {
        for k in 1..500i128 {
            let lam = 0.318_309_886_183_790_7;
            let naive = (lam * k as f64).rem_euclid(1.0);
            assert!((frac_mul(lam, k) - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-13).abs() < 1e-25);
    }

    #[test]
    fn composite_gl_integrates_polynomials() {
        let v = integrate_complex(0.0, 2.0, 3, |x| Complex64::new(x.powi(5), 0.0));
        assert!((v.re - 64.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (m, b) = fit_line(&xs, &ys).unwrap();
        assert!((m - 2.5).abs() < 1e-12 && (b + 1.0).abs() < 1e-12);
    }
}
