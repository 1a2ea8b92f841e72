//! Explicit Runge-Kutta integrators for small fixed-size systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];
}

impl<const N: usize, F> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N] {
        self(t, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Classical fixed-step fourth order.
    #[default]
    Rk4,
    /// Dormand-Prince 5(4) with local error control.
    Rk45,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::Rk45 => "rk45-adaptive",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "rk45" | "rk45-adaptive" => Ok(Method::Rk45),
            other => Err(Error::Config(format!(
                "unknown method `{other}` (expected rk4 or rk45)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSettings {
    pub method: Method,
    /// Fixed step (rk4) or initial step (rk45).
    pub dt: f64,
    /// Spacing of stored samples.
    pub stride: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for StepSettings {
    fn default() -> Self {
        StepSettings {
            method: Method::Rk4,
            dt: std::f64::consts::TAU / 1000.0,
            stride: std::f64::consts::TAU / 50.0,
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    /// Accepted steps.
    pub steps: usize,
    /// Step actually used by the fixed-step method, or the last accepted
    /// adaptive step.
    pub step: f64,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

pub fn rk4_step<const N: usize, S: OdeSystem<N> + ?Sized>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let k1 = sys.rhs(t, y);
    let k2 = sys.rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = sys.rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = sys.rhs(t + h, &axpy(y, h, &k3));
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

// Dormand-Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One Dormand-Prince step; returns the fifth-order solution and the
/// embedded error estimate.
pub fn dopri5_step<const N: usize, S: OdeSystem<N> + ?Sized>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N]) {
    let k1 = sys.rhs(t, y);
    let y2: [f64; N] = std::array::from_fn(|i| y[i] + h * A21 * k1[i]);
    let k2 = sys.rhs(t + C2 * h, &y2);
    let y3: [f64; N] = std::array::from_fn(|i| y[i] + h * (A31 * k1[i] + A32 * k2[i]));
    let k3 = sys.rhs(t + C3 * h, &y3);
    let y4: [f64; N] =
        std::array::from_fn(|i| y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]));
    let k4 = sys.rhs(t + C4 * h, &y4);
    let y5: [f64; N] = std::array::from_fn(|i| {
        y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
    });
    let k5 = sys.rhs(t + C5 * h, &y5);
    let y6: [f64; N] = std::array::from_fn(|i| {
        y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
    });
    let k6 = sys.rhs(t + h, &y6);
    let out: [f64; N] = std::array::from_fn(|i| {
        y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
    });
    let k7 = sys.rhs(t + h, &out);
    let err: [f64; N] = std::array::from_fn(|i| {
        h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
    });
    (out, err)
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Integrates from `t0` to `t_end`, storing samples every `stride` plus the
/// final state.
pub fn solve<const N: usize, S: OdeSystem<N> + ?Sized>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    settings: &StepSettings,
) -> Result<Solution<N>> {
    if !(settings.dt > 0.0 && settings.dt.is_finite()) {
        return Err(Error::Config(format!("dt must be positive, got {}", settings.dt)));
    }
    if !(t_end > t0) {
        return Err(Error::Config(format!(
            "t_end must exceed the start time, got {t_end}"
        )));
    }
    if !(settings.stride > 0.0) {
        return Err(Error::Config(format!(
            "stride must be positive, got {}",
            settings.stride
        )));
    }
    if !all_finite(&y0) {
        return Err(Error::Divergence {
            t: t0,
            last_finite: Vec::new(),
        });
    }
    match settings.method {
        Method::Rk4 => solve_fixed(sys, t0, y0, t_end, settings),
        Method::Rk45 => solve_adaptive(sys, t0, y0, t_end, settings),
    }
}

fn solve_fixed<const N: usize, S: OdeSystem<N> + ?Sized>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    settings: &StepSettings,
) -> Result<Solution<N>> {
    let span = t_end - t0;
    let steps = ((span / settings.dt) - 1e-9).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let every = ((settings.stride / h).round() as usize).max(1);

    let mut times = vec![t0];
    let mut states = vec![y0];
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let next = rk4_step(sys, t, &y, h);
        if !all_finite(&next) {
            return Err(Error::Divergence {
                t,
                last_finite: y.to_vec(),
            });
        }
        y = next;
        if (i + 1) % every == 0 || i + 1 == steps {
            times.push(t0 + (i + 1) as f64 * h);
            states.push(y);
        }
    }
    Ok(Solution {
        times,
        states,
        steps,
        step: h,
    })
}

fn solve_adaptive<const N: usize, S: OdeSystem<N> + ?Sized>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    settings: &StepSettings,
) -> Result<Solution<N>> {
    let mut times = vec![t0];
    let mut states = vec![y0];
    let mut t = t0;
    let mut y = y0;
    let mut h = settings.dt.min(t_end - t0);
    let mut sample = 1usize;
    let mut accepted = 0usize;
    let mut last_h = h;
    let mut attempts = 0usize;

    while t < t_end {
        let target = (t0 + sample as f64 * settings.stride).min(t_end);
        let h_try = h.min(target - t);
        let h_min = 1e-14 * t.abs().max(settings.stride);
        if h_try < h_min && target - t > h_min {
            return Err(Error::Stiffness { t, h: h_try });
        }
        attempts += 1;
        if attempts > settings.max_steps {
            return Err(Error::Stiffness { t, h: h_try });
        }

        let (next, err) = dopri5_step(sys, t, &y, h_try);
        let norm = if all_finite(&next) && all_finite(&err) {
            let sum: f64 = (0..N)
                .map(|i| {
                    let scale = settings.atol + settings.rtol * y[i].abs().max(next[i].abs());
                    (err[i] / scale).powi(2)
                })
                .sum();
            (sum / N as f64).sqrt()
        } else {
            f64::INFINITY
        };

        if norm <= 1.0 {
            t = if h_try == target - t { target } else { t + h_try };
            y = next;
            accepted += 1;
            last_h = h_try;
            if t >= target {
                times.push(t);
                states.push(y);
                sample += 1;
            }
            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            // keep the unclipped step when the clip was only for sampling
            h = h.max(h_try) * factor;
        } else if norm.is_finite() {
            h = h_try * (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
        } else {
            if h_try <= h_min {
                return Err(Error::Divergence {
                    t,
                    last_finite: y.to_vec(),
                });
            }
            h = 0.1 * h_try;
        }
    }
    Ok(Solution {
        times,
        states,
        steps: accepted,
        step: last_h,
    })
}
