//! Steady states of the photon number and the positions they imply.
//!
//! Substituting the steady mirror and condensate positions into the
//! adiabatic photon number gives the self-consistency condition
//!
//! ```text
//! f(n) = n [kappa^2 + (delta + s B n)^2] - eta^2 - C n^2 = 0
//! ```
//!
//! with `B`, `C` from [`DerivedCoefficients`] and `s` the sign convention.

use nalgebra::{Complex, Matrix4, Schur};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::poly::{Cubic, RealRoot};
use crate::params::{Axis, DerivedCoefficients, SystemParams};

/// Roots closer than this (relative) are reported as one multiple root.
pub const MERGE_REL: f64 = 1e-8;

/// Eigenvalue real parts within `STABILITY_EPS * omega_m` of zero count as
/// marginal.
pub const STABILITY_EPS: f64 = 1e-6;

/// `a3 n^3 + a2 n^2 + a1 n + a0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonCubic {
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl PhotonCubic {
    pub fn as_cubic(&self) -> Cubic {
        Cubic([self.a0, self.a1, self.a2, self.a3])
    }

    pub fn eval(&self, n: f64) -> f64 {
        self.as_cubic().eval(n)
    }

    pub fn derivative(&self, n: f64) -> f64 {
        self.as_cubic().derivative(n)
    }
}

pub fn build_cubic(params: &SystemParams) -> Result<PhotonCubic> {
    let d = params.derived()?;
    let s = params.sign_convention.sign();
    Ok(PhotonCubic {
        a3: d.b_shift * d.b_shift,
        a2: 2.0 * s * params.delta * d.b_shift - d.c_gain,
        a1: params.kappa * params.kappa + params.delta * params.delta,
        a0: -params.eta * params.eta,
    })
}

/// `f(n)` evaluated in factored form, independent of [`build_cubic`].
pub fn factored_residual(params: &SystemParams, n: f64) -> Result<f64> {
    let d = params.derived()?;
    let detuning = params.delta + params.sign_convention.sign() * d.b_shift * n;
    Ok(n * (params.kappa * params.kappa + detuning * detuning)
        - params.eta * params.eta
        - d.c_gain * n * n)
}

/// Non-negative real roots in ascending order.
pub fn solve_cubic(cubic: &PhotonCubic, tol: f64) -> Result<Vec<RealRoot>> {
    let roots = cubic.as_cubic().real_roots(tol, MERGE_REL)?;
    Ok(roots
        .into_iter()
        .filter(|r| r.value >= 0.0)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyBranch {
    pub n_s: f64,
    pub q_s: f64,
    pub Q_s: f64,
    pub P_s: f64,
    pub stability: Stability,
    /// `|f(n_s)|`.
    pub residual: f64,
    pub multiplicity: u8,
}

impl SteadyBranch {
    #[allow(non_snake_case)]
    pub fn from_root(root: RealRoot, cubic: &PhotonCubic, d: &DerivedCoefficients, params: &SystemParams) -> Self {
        let n = root.value;
        let Q_s = -d.qq_per_photon * n;
        let mut branch = SteadyBranch {
            n_s: n,
            q_s: d.q_per_photon * n,
            Q_s,
            P_s: if params.gamma_sm == 0.0 { 0.0 } else { params.gamma_sm / params.omega_bec() * Q_s },
            stability: Stability::Marginal,
            residual: cubic.eval(n).abs(),
            multiplicity: root.multiplicity,
        };
        branch.stability = classify_stability(&branch, cubic, params);
        branch
    }
}

pub fn steady_state_at(params: &SystemParams, tol: f64) -> Result<Vec<SteadyBranch>> {
    params.validate()?;
    let cubic = build_cubic(params)?;
    let d = params.derived()?;
    Ok(solve_cubic(&cubic, tol)?
        .into_iter()
        .map(|r| SteadyBranch::from_root(r, &cubic, &d, params))
        .collect())
}

/// Branch with the largest photon number.
pub fn upper_branch(params: &SystemParams, tol: f64) -> Result<SteadyBranch> {
    steady_state_at(params, tol)?
        .pop()
        .ok_or(Error::Convergence {
            best: f64::NAN,
            residual: f64::NAN,
        })
}

/// Stability of a branch: the linearized criterion when any damping is
/// present, the slope criterion otherwise. Multiple roots are marginal.
pub fn classify_stability(branch: &SteadyBranch, cubic: &PhotonCubic, params: &SystemParams) -> Stability {
    if branch.multiplicity > 1 {
        return Stability::Marginal;
    }
    if params.gamma_m == 0.0 && params.gamma_sm == 0.0 {
        slope_stability(cubic, branch.n_s)
    } else {
        linearized_stability(branch, params)
    }
}

/// A falling `f` marks the saddle between two outer branches. Without
/// damping nothing else can be asymptotically stable.
pub fn slope_stability(cubic: &PhotonCubic, n: f64) -> Stability {
    let slope = cubic.derivative(n);
    let scale = (3.0 * cubic.a3 * n * n).abs() + (2.0 * cubic.a2 * n).abs() + cubic.a1.abs();
    if slope < -1e-12 * scale {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

/// Jacobian `[[dFq/dq, dFq/dQ], [dFQ/dq, dFQ/dQ]]` of the adiabatic forces.
#[allow(non_snake_case)]
pub fn force_jacobian(params: &SystemParams, q: f64, Q: f64) -> [[f64; 2]; 2] {
    let s = params.sign_convention.sign();
    let d = params.detuning_at(q, Q);
    let den = params.kappa * params.kappa + d * d;
    let num = params.eta * params.eta + params.eta_eff * params.eta_eff * Q * Q;
    let dn_dq = -num * 2.0 * d * s * params.xi / (den * den);
    let dn_dQ = 2.0 * params.eta_eff * params.eta_eff * Q / den
        + num * 2.0 * d * s * params.xi_sm / (den * den);
    let om = params.omega_m;
    let big = params.omega_bec();
    [
        [-om * om + om * params.xi * dn_dq, om * params.xi * dn_dQ],
        [-big * params.xi_sm * dn_dq, -big * big - big * params.xi_sm * dn_dQ],
    ]
}

/// Eigenvalues (rad/s) of the damped adiabatic system linearized at `(q, Q)`.
#[allow(non_snake_case)]
pub fn linearized_eigenvalues(params: &SystemParams, q: f64, Q: f64) -> Vec<(f64, f64)> {
    let j = force_jacobian(params, q, Q);
    let om = params.omega_m;
    let w = om * om;
    // time in units of 1/omega_m, velocities scaled by omega_m
    let k = [[j[0][0] / w, j[0][1] / w], [j[1][0] / w, j[1][1] / w]];
    let (g1, g2) = (params.gamma_m / om, params.gamma_sm / om);
    let scaled = if g1 == 0.0 && g2 == 0.0 {
        undamped_eigenvalues(k)
    } else {
        let a = Matrix4::new(
            0.0, 1.0, 0.0, 0.0,
            k[0][0], -g1, k[0][1], 0.0,
            0.0, 0.0, 0.0, 1.0,
            k[1][0], 0.0, k[1][1], -g2,
        );
        match Schur::try_new(a, f64::EPSILON, 10_000) {
            Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
            None => quartic_roots([
                k[0][0] * k[1][1] - k[0][1] * k[1][0],
                -g1 * k[1][1] - g2 * k[0][0],
                g1 * g2 - k[0][0] - k[1][1],
                g1 + g2,
            ]),
        }
    };
    scaled.iter().map(|z| (z.re * om, z.im * om)).collect()
}

/// Without damping the eigenvalues are the square roots of those of `k`.
fn undamped_eigenvalues(k: [[f64; 2]; 2]) -> Vec<Complex<f64>> {
    let tr = k[0][0] + k[1][1];
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    let root = Complex::new(tr * tr - 4.0 * det, 0.0).sqrt();
    let mut out = Vec::with_capacity(4);
    for mu in [(tr + root) * 0.5, (tr - root) * 0.5] {
        let l = mu.sqrt();
        out.extend([l, -l]);
    }
    out
}

/// Roots of the monic quartic `x^4 + c[3] x^3 + c[2] x^2 + c[1] x + c[0]`
/// by Durand-Kerner iteration.
fn quartic_roots(c: [f64; 4]) -> Vec<Complex<f64>> {
    let p = |x: Complex<f64>| (((x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
    let radius = 1.0 + c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let seed = Complex::new(0.4, 0.9) * radius;
    let mut z: Vec<Complex<f64>> = (0..4).map(|i| seed.powu(i as u32 + 1) / radius.powi(i)).collect();
    for _ in 0..1000 {
        let mut moved: f64 = 0.0;
        for i in 0..4 {
            let mut den = Complex::new(1.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    den *= z[i] - zj;
                }
            }
            let step = p(z[i]) / den;
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

pub fn linearized_stability(branch: &SteadyBranch, params: &SystemParams) -> Stability {
    let eps = STABILITY_EPS * params.omega_m;
    let eig = linearized_eigenvalues(params, branch.q_s, branch.Q_s);
    if eig.iter().any(|(re, _)| *re > eps) {
        Stability::Unstable
    } else if eig.iter().all(|(re, _)| *re < -eps) {
        Stability::Stable
    } else {
        Stability::Marginal
    }
}

/// A swept parameter with grid values given as multiples of kappa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub axis: Axis,
    pub ratios: Vec<f64>,
}

impl AxisGrid {
    pub fn new(axis: Axis, ratios: Vec<f64>) -> Self {
        AxisGrid { axis, ratios }
    }

    /// `count` evenly spaced ratios from `start` to `end` inclusive.
    pub fn linspace(axis: Axis, start: f64, end: f64, count: usize) -> Self {
        let ratios = match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
                .collect(),
        };
        AxisGrid { axis, ratios }
    }

    fn check(&self) -> Result<()> {
        if self.ratios.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "{} grid needs at least 2 points, got {}",
                self.axis,
                self.ratios.len()
            )));
        }
        if self.ratios.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidGrid(format!("{} grid has non-finite values", self.axis)));
        }
        let up = self.ratios.windows(2).all(|w| w[1] > w[0]);
        let down = self.ratios.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::InvalidGrid(format!(
                "{} grid must be strictly monotonic",
                self.axis
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Axis ratios in the order of [`SweepResult::axes`].
    pub coords: Vec<f64>,
    /// Branches ascending in `n_s`, or the solver error message.
    pub branches: std::result::Result<Vec<SteadyBranch>, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub ratio: f64,
    pub n_s: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axes: Vec<AxisGrid>,
    /// Row-major over the axes (last axis fastest).
    pub points: Vec<SweepPoint>,
    pub up: Option<Vec<TracePoint>>,
    pub down: Option<Vec<TracePoint>>,
}

fn point(params: &SystemParams, grids: &[&AxisGrid], coords: Vec<f64>, tol: f64) -> SweepPoint {
    let mut p = *params;
    for (g, r) in grids.iter().zip(&coords) {
        p = p.with_ratio(g.axis, *r);
    }
    SweepPoint {
        coords,
        branches: steady_state_at(&p, tol).map_err(|e| e.to_string()),
    }
}

pub fn sweep_1d(params: &SystemParams, grid: &AxisGrid, tol: f64) -> Result<SweepResult> {
    params.validate()?;
    grid.check()?;
    let points: Vec<SweepPoint> = grid
        .ratios
        .par_iter()
        .map(|r| point(params, &[grid], vec![*r], tol))
        .collect();
    let (up, down) = hysteresis(grid, &points);
    Ok(SweepResult {
        axes: vec![grid.clone()],
        points,
        up: Some(up),
        down: Some(down),
    })
}

pub fn sweep_2d(params: &SystemParams, first: &AxisGrid, second: &AxisGrid, tol: f64) -> Result<SweepResult> {
    params.validate()?;
    first.check()?;
    second.check()?;
    if first.axis == second.axis {
        return Err(Error::InvalidGrid(format!("both axes are {}", first.axis)));
    }
    let cols = second.ratios.len();
    let points: Vec<SweepPoint> = (0..first.ratios.len() * cols)
        .into_par_iter()
        .map(|k| {
            let coords = vec![first.ratios[k / cols], second.ratios[k % cols]];
            point(params, &[first, second], coords, tol)
        })
        .collect();
    Ok(SweepResult {
        axes: vec![first.clone(), second.clone()],
        points,
        up: None,
        down: None,
    })
}

/// Quasi-static traces: `up` walks the axis in ascending order starting on
/// the lowest branch, `down` walks it in descending order starting on the
/// highest. Each step keeps the non-unstable branch nearest in `n_s`.
fn hysteresis(grid: &AxisGrid, points: &[SweepPoint]) -> (Vec<TracePoint>, Vec<TracePoint>) {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| grid.ratios[a].total_cmp(&grid.ratios[b]));
    let walk = |indices: &mut dyn Iterator<Item = usize>, direction: Direction| {
        let mut prev: Option<f64> = None;
        let mut out = Vec::new();
        for i in indices {
            let Ok(branches) = &points[i].branches else {
                continue;
            };
            let mut candidates: Vec<f64> = branches
                .iter()
                .filter(|b| b.stability != Stability::Unstable)
                .map(|b| b.n_s)
                .collect();
            if candidates.is_empty() {
                candidates = branches.iter().map(|b| b.n_s).collect();
            }
            let pick = match prev {
                None => match direction {
                    Direction::Up => candidates.first().copied(),
                    Direction::Down => candidates.last().copied(),
                },
                Some(p) => candidates
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - p).abs().total_cmp(&(b - p).abs())),
            };
            if let Some(n) = pick {
                prev = Some(n);
                out.push(TracePoint {
                    ratio: grid.ratios[i],
                    n_s: n,
                    direction,
                });
            }
        }
        out
    };
    let up = walk(&mut order.iter().copied(), Direction::Up);
    let down = walk(&mut order.iter().rev().copied(), Direction::Down);
    (up, down)
}

/// Interval of an axis (in multiples of kappa) over which three steady
/// states coexist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lower: f64,
    pub upper: f64,
}

impl Window {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Number of non-negative roots counted with multiplicity.
fn root_count(params: &SystemParams, tol: f64) -> Result<u32> {
    let cubic = build_cubic(params)?;
    Ok(solve_cubic(&cubic, tol)?
        .iter()
        .map(|r| u32::from(r.multiplicity))
        .sum())
}

/// Default scan used by [`multistable_windows`]: zero plus 50 points per
/// decade from 1e-6 to 1e6.
pub fn log_scan_grid() -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend((0..=600).map(|k| 10f64.powf(-6.0 + k as f64 / 50.0)));
    g
}

/// Locates every interval of `scan` (ratios, ascending) on which the cubic
/// has three non-negative roots and refines each edge by bisection on the
/// root count.
pub fn multistable_windows(params: &SystemParams, axis: Axis, scan: &[f64], tol: f64) -> Result<Vec<Window>> {
    params.validate()?;
    let inside = |r: f64| -> Result<bool> { Ok(root_count(&params.with_ratio(axis, r), tol)? >= 3) };
    let flags: Vec<bool> = scan
        .par_iter()
        .map(|r| inside(*r))
        .collect::<Result<_>>()?;
    let edge = |mut a: f64, mut b: f64, a_inside: bool| -> Result<f64> {
        // a and b differ in status; keep the inside end in the result
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a.min(b) || m >= a.max(b) {
                break;
            }
            if inside(m)? == a_inside {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(a)
    };
    let mut windows = Vec::new();
    let mut start: Option<f64> = None;
    for i in 0..scan.len() {
        match (flags[i], start) {
            (true, None) => {
                start = Some(if i == 0 { scan[0] } else { edge(scan[i], scan[i - 1], true)? });
            }
            (false, Some(lo)) => {
                windows.push(Window {
                    lower: lo,
                    upper: edge(scan[i - 1], scan[i], true)?,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(lo) = start {
        windows.push(Window {
            lower: lo,
            upper: *scan.last().expect("non-empty scan"),
        });
    }
    Ok(windows)
}

/// The pump (`eta`) window over the default log scan, or `None`.
pub fn bistable_window(params: &SystemParams, tol: f64) -> Result<Option<Window>> {
    let w = multistable_windows(params, Axis::Eta, &log_scan_grid(), tol)?;
    Ok(match (w.first(), w.last()) {
        (Some(a), Some(b)) => Some(Window {
            lower: a.lower,
            upper: b.upper,
        }),
        _ => None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationWindow {
    pub eta_eff_over_kappa: f64,
    pub window: Option<Window>,
}

impl SaturationWindow {
    pub fn width(&self) -> f64 {
        self.window.map_or(0.0, |w| w.width())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturationScan {
    /// One pump sweep per transverse drive.
    pub sweeps: Vec<(f64, SweepResult)>,
    pub windows: Vec<SaturationWindow>,
}

/// Pump sweeps and bistable windows for a list of transverse drives.
pub fn saturation_scan(params: &SystemParams, eta_grid: &AxisGrid, eta_eff_ratios: &[f64], tol: f64) -> Result<SaturationScan> {
    if eta_grid.axis != Axis::Eta {
        return Err(Error::InvalidGrid("saturation scan sweeps eta".into()));
    }
    let mut sweeps = Vec::with_capacity(eta_eff_ratios.len());
    let mut windows = Vec::with_capacity(eta_eff_ratios.len());
    for &ee in eta_eff_ratios {
        let p = params.with_ratio(Axis::EtaEff, ee);
        sweeps.push((ee, sweep_1d(&p, eta_grid, tol)?));
        windows.push(SaturationWindow {
            eta_eff_over_kappa: ee,
            window: bistable_window(&p, tol)?,
        });
    }
    Ok(SaturationScan { sweeps, windows })
}
