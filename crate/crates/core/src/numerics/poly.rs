//! Real roots of polynomials up to degree three.
//!
//! The cubic case brackets one root in each monotone piece between the
//! critical points, so the root count never hinges on the sign of a
//! cancellation-prone discriminant. The trigonometric / Cardano closed form
//! only supplies starting points for the safeguarded Newton iteration.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// A real root and how many closed-form roots collapsed onto it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: u8,
}

/// Coefficients `[c0, c1, c2, c3]` of `c0 + c1 x + c2 x^2 + c3 x^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic(pub [f64; 4]);

impl Cubic {
    pub fn eval(&self, x: f64) -> f64 {
        let [c0, c1, c2, c3] = self.0;
        ((c3 * x + c2) * x + c1) * x + c0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let [_, c1, c2, c3] = self.0;
        (3.0 * c3 * x + 2.0 * c2) * x + c1
    }

    /// Scale against which a residual at `x` is judged.
    pub fn residual_scale(&self, x: f64) -> f64 {
        let m = self.0.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        m * x.abs().max(1.0).powi(3)
    }

    /// Real roots in ascending order. Roots closer than `merge_rel` (relative)
    /// are reported once with multiplicity 2 or 3.
    pub fn real_roots(&self, tol: f64, merge_rel: f64) -> Result<Vec<RealRoot>> {
        let [c0, c1, c2, c3] = self.0;
        if self.0.iter().all(|c| *c == 0.0) {
            return Err(Error::DegeneratePolynomial);
        }
        let mut raw = if c3 != 0.0 {
            if c0 == 0.0 {
                let mut r: Vec<f64> = quadratic_roots(c1, c2, c3)
                    .into_iter()
                    .map(|x| self.polish(x))
                    .collect();
                r.push(0.0);
                r
            } else {
                self.bracketed_roots()
            }
        } else if c2 != 0.0 {
            quadratic_roots(c0, c1, c2)
        } else if c1 != 0.0 {
            vec![-c0 / c1]
        } else {
            Vec::new()
        };
        for r in &raw {
            let residual = self.eval(*r).abs();
            if !(residual <= tol * self.residual_scale(*r)) {
                return Err(Error::Convergence {
                    best: *r,
                    residual,
                });
            }
        }
        raw.sort_by(f64::total_cmp);

        let mut out: Vec<RealRoot> = Vec::with_capacity(raw.len());
        for r in raw {
            match out.last_mut() {
                Some(last) if (r - last.value).abs() <= merge_rel * r.abs().max(last.value.abs()) => {
                    let k = f64::from(last.multiplicity);
                    last.value = (last.value * k + r) / (k + 1.0);
                    last.multiplicity += 1;
                }
                _ => out.push(RealRoot {
                    value: r,
                    multiplicity: 1,
                }),
            }
        }
        Ok(out)
    }

    /// Critical points inside the Cauchy bound, framed by the bound itself.
    fn monotone_edges(&self) -> Vec<f64> {
        let [c0, c1, c2, c3] = self.0;
        let bound = 1.0
            + [c0, c1, c2]
                .iter()
                .map(|c| (c / c3).abs())
                .fold(0.0, f64::max);
        let mut crit = quadratic_roots(c1, 2.0 * c2, 3.0 * c3);
        crit.sort_by(f64::total_cmp);
        let mut edges = vec![-bound];
        edges.extend(crit.into_iter().filter(|c| c.abs() < bound));
        edges.push(bound);
        edges
    }

    /// Roots of a true cubic, one per sign change between consecutive
    /// critical points. A critical point where the cubic vanishes is a
    /// repeated root and is listed twice.
    fn bracketed_roots(&self) -> Vec<f64> {
        let edges = self.monotone_edges();
        let values: Vec<f64> = edges.iter().map(|x| self.eval(*x)).collect();
        let [c0, c1, c2, c3] = self.0;
        let guesses = cubic_estimates(c0, c1, c2, c3);
        let mut roots = Vec::new();
        for k in 1..edges.len() - 1 {
            if values[k] == 0.0 {
                roots.extend([edges[k], edges[k]]);
            }
        }
        for k in 0..edges.len() - 1 {
            let (a, b) = (edges[k], edges[k + 1]);
            let (fa, fb) = (values[k], values[k + 1]);
            if fa == 0.0 || fb == 0.0 || (fa < 0.0) == (fb < 0.0) {
                continue;
            }
            let x0 = guesses
                .iter()
                .copied()
                .find(|g| *g > a && *g < b)
                .unwrap_or(0.5 * (a + b));
            roots.push(self.refine(a, b, x0));
        }
        roots
    }

    /// Safeguarded Newton inside the monotone piece containing `x0`.
    fn polish(&self, x0: f64) -> f64 {
        let edges = self.monotone_edges();
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            if x0 >= a && x0 <= b {
                let (fa, fb) = (self.eval(a), self.eval(b));
                if fa == 0.0 {
                    return a;
                }
                if fb == 0.0 {
                    return b;
                }
                if (fa < 0.0) != (fb < 0.0) {
                    return self.refine(a, b, x0);
                }
                break;
            }
        }
        self.newton_best(x0)
    }

    /// Newton with bisection fallback on a sign-changing `[lo, hi]`.
    fn refine(&self, mut lo: f64, mut hi: f64, x0: f64) -> f64 {
        let rising = self.eval(lo) < 0.0;
        let mut x = x0.clamp(lo, hi);
        for _ in 0..200 {
            let fx = self.eval(x);
            if fx == 0.0 {
                return x;
            }
            if (fx < 0.0) == rising {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.derivative(x);
            let newton = x - fx / d;
            let next = if d != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if next == x || hi - lo <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                return next;
            }
            x = next;
        }
        x
    }

    fn newton_best(&self, x0: f64) -> f64 {
        let mut best = (x0, self.eval(x0).abs());
        let mut x = x0;
        for _ in 0..50 {
            let d = self.derivative(x);
            if d == 0.0 {
                break;
            }
            x -= self.eval(x) / d;
            let r = self.eval(x).abs();
            if !r.is_finite() {
                break;
            }
            if r < best.1 {
                best = (x, r);
            }
        }
        best.0
    }
}

/// Real roots of `c0 + c1 x + c2 x^2` with `c2 != 0`, cancellation-free.
fn quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    if c2 == 0.0 {
        return if c1 != 0.0 { vec![-c0 / c1] } else { Vec::new() };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-c1 / (2.0 * c2)];
    }
    let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
    if q == 0.0 {
        // c1 == 0 and c0 == 0
        return vec![0.0, 0.0];
    }
    vec![q / c2, c0 / q]
}

/// Closed-form estimates of the real roots of a cubic with `c3 != 0`.
fn cubic_estimates(c0: f64, c1: f64, c2: f64, c3: f64) -> Vec<f64> {
    let b = c2 / c3;
    let c = c1 / c3;
    let d = c0 / c3;
    let shift = b / 3.0;
    // depressed cubic t^3 + p t + q, x = t - b/3
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    if disc > 0.0 {
        let s = disc.sqrt();
        let u = (-half_q - half_q.signum() * s).cbrt();
        let t = if u != 0.0 { u - third_p / u } else { 0.0 };
        vec![t - shift]
    } else if p == 0.0 {
        vec![-shift]
    } else {
        let m = 2.0 * (-third_p).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - TAU * f64::from(k) / 3.0).cos() - shift)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(c: Cubic) -> Vec<f64> {
        c.real_roots(1e-12, 1e-8)
            .unwrap()
            .into_iter()
            .map(|r| r.value)
            .collect()
    }

    #[test]
    fn three_distinct_roots() {
        // (x - 1)(x - 2)(x - 3)
        let r = values(Cubic([-6.0, 11.0, -6.0, 1.0]));
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14, "{r:?}");
        }
    }

    #[test]
    fn one_real_root() {
        let r = values(Cubic([-5.0, 0.0, 0.0, 1.0]));
        assert_eq!(r.len(), 1);
        assert!((r[0] - 5f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn double_root_is_merged() {
        // (x + 1)^2 (x - 2)
        let r = Cubic([-2.0, -3.0, 0.0, 1.0]).real_roots(1e-12, 1e-8).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].value + 1.0).abs() < 1e-7);
        assert!((r[1].value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_constant_term_gives_exact_zero() {
        let r = values(Cubic([0.0, 101.0, -20.0, 1.0]));
        assert_eq!(r, vec![0.0]);
    }

    #[test]
    fn lower_degrees() {
        assert_eq!(values(Cubic([-4.0, 2.0, 0.0, 0.0])), vec![2.0]);
        let r = values(Cubic([-4.0, 0.0, 1.0, 0.0]));
        assert_eq!(r, vec![-2.0, 2.0]);
        assert!(values(Cubic([1.0, 0.0, 0.0, 0.0])).is_empty());
        assert!(matches!(
            Cubic([0.0; 4]).real_roots(1e-12, 1e-8),
            Err(Error::DegeneratePolynomial)
        ));
    }

    #[test]
    fn badly_scaled_coefficients() {
        // Coefficients of the size met with laboratory parameters.
        let (r1, r2, r3) = (6.8e-4, 1.25e-2, 1.9e-2);
        let a = 4.1e16;
        let c = Cubic([
            -a * r1 * r2 * r3,
            a * (r1 * r2 + r1 * r3 + r2 * r3),
            -a * (r1 + r2 + r3),
            a,
        ]);
        let r = values(c);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([r1, r2, r3]) {
            assert!((got - want).abs() < 1e-12 * want, "{got} vs {want}");
        }
    }
}
