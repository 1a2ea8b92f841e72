//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    /// Integral of |f|, used for relative tolerances.
    pub abs_integral: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl QuadSettings {
    pub fn relative(rel_tol: f64) -> Self {
        QuadSettings {
            rel_tol,
            abs_tol: 0.0,
            max_intervals: 2000,
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kron * half;
    let abs = abs * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kron - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * abs;
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    Piece {
        a,
        b,
        value,
        error,
        abs,
    }
}

/// Integrates `f` over `[a, b]`, splitting first at any `breakpoints` that
/// fall strictly inside. `b < a` is allowed and flips the sign.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    settings: &QuadSettings,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            abs_integral: 0.0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    inner.sort_by(f64::total_cmp);
    edges.extend(inner);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod(&f, w[0], w[1]));
        }
    }
    let totals = |heap: &BinaryHeap<Piece>| {
        heap.iter().fold((0.0, 0.0, 0.0), |(v, e, s), p| {
            (v + p.value, e + p.error, s + p.abs)
        })
    };
    loop {
        let (value, error, abs) = totals(&heap);
        if !value.is_finite() {
            return Err(Error::Quadrature {
                estimate: value,
                error,
            });
        }
        let target = settings.abs_tol.max(settings.rel_tol * abs);
        if error <= target {
            return Ok(QuadResult {
                value: sign * value,
                error,
                abs_integral: abs,
            });
        }
        if heap.len() >= settings.max_intervals {
            return Err(Error::Quadrature {
                estimate: sign * value,
                error,
            });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Quadrature {
                estimate: sign * value,
                error,
            });
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, &[], &QuadSettings::relative(1e-12))
            .unwrap();
        assert!((r.value - (81.0 / 4.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn narrow_lorentzian() {
        let w = 1e-4;
        let f = |x: f64| w / (w * w + (x - 0.3) * (x - 0.3));
        let exact = (0.7f64 / w).atan() + (0.3f64 / w).atan();
        let r = integrate(f, 0.0, 1.0, &[], &QuadSettings::relative(1e-12)).unwrap();
        assert!((r.value - exact).abs() < 1e-10 * exact, "{} vs {exact}", r.value);
        assert!(r.error < 1e-11 * exact);
        let with_break = integrate(f, 0.0, 1.0, &[0.3], &QuadSettings::relative(1e-12)).unwrap();
        assert!((with_break.value - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let s = QuadSettings::relative(1e-12);
        let fwd = integrate(f64::exp, 0.0, 1.0, &[], &s).unwrap();
        let back = integrate(f64::exp, 1.0, 0.0, &[], &s).unwrap();
        assert_eq!(fwd.value, -back.value);
        assert!((fwd.value - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn singular_integrand_fails() {
        let s = QuadSettings {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_intervals: 50,
        };
        let err = integrate(|x: f64| 1.0 / x.abs().sqrt().powi(3), -1.0, 1.0, &[], &s);
        assert!(matches!(err, Err(Error::Quadrature { .. })));
    }
}
