//! Effective potential of the adiabatic model and its critical points.
//!
//! The radiation forces are not a gradient field in general, so the
//! potential is defined by a fixed path from the origin: along `q` at
//! `Q = 0`, then along `Q` at fixed `q`. This makes `-dV/dQ = F_Q`
//! everywhere and `-dV/dq = F_q` on the line `Q = 0`.

use nalgebra::{Matrix2, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::adiabatic_force;
use crate::error::{Error, Result};
use crate::numerics::quad::{integrate, QuadResult, QuadSettings};
use crate::params::SystemParams;
use crate::steady_state::steady_state_at;

pub const PATH: &str = "(0,0)->(q,0)->(q,Q)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialOptions {
    /// Relative tolerance of the adaptive quadrature.
    pub quad_tol: f64,
    /// Report the printed form, which is the negative of the potential whose
    /// gradient gives the forces.
    pub paper_literal_signs: bool,
}

impl Default for PotentialOptions {
    fn default() -> Self {
        PotentialOptions {
            quad_tol: 1e-10,
            paper_literal_signs: false,
        }
    }
}

fn quad(tol: f64) -> QuadSettings {
    QuadSettings {
        rel_tol: tol,
        abs_tol: 0.0,
        max_intervals: 4000,
    }
}

/// `int_0^q omega_m xi n(s, 0) ds` in closed form.
pub fn radiation_work_q(params: &SystemParams, q: f64) -> f64 {
    let s = params.sign_convention.sign();
    let k = params.kappa;
    let a = params.detuning_at(q, 0.0) / k;
    let b = params.delta / k;
    s * params.omega_m * params.eta * params.eta / k * (s * params.xi * q / k).atan2(1.0 + a * b)
}

/// Condensate position at which the field is resonant for mirror position `q`.
fn resonance(params: &SystemParams, q: f64) -> f64 {
    let s = params.sign_convention.sign();
    (s * params.delta + params.xi * q) / params.xi_sm
}

/// `int_a^b (-4 omega_r xi_sm) n(q, s) ds`.
#[allow(non_snake_case)]
fn radiation_work_Q(params: &SystemParams, q: f64, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if params.xi_sm == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            abs_integral: 0.0,
        });
    }
    let scale = -params.omega_bec() * params.xi_sm;
    let r = integrate(
        |s| params.adiabatic_photons(q, s),
        a,
        b,
        &[resonance(params, q)],
        &quad(tol),
    )?;
    Ok(QuadResult {
        value: scale * r.value,
        error: scale.abs() * r.error,
        abs_integral: scale.abs() * r.abs_integral,
    })
}

fn harmonic(params: &SystemParams, q: f64, big_q: f64) -> f64 {
    let om = params.omega_m;
    let big = params.omega_bec();
    0.5 * om * om * q * q + 0.5 * big * big * big_q * big_q
}

/// `V(q, Q)` with the quadrature error bound of the `Q` leg.
#[allow(non_snake_case)]
pub fn effective_potential_with_error(q: f64, Q: f64, params: &SystemParams, options: &PotentialOptions) -> Result<(f64, f64)> {
    let leg = radiation_work_Q(params, q, 0.0, Q, options.quad_tol)?;
    let v = harmonic(params, q, Q) - radiation_work_q(params, q) - leg.value;
    Ok((if options.paper_literal_signs { -v } else { v }, leg.error))
}

#[allow(non_snake_case)]
pub fn effective_potential(q: f64, Q: f64, params: &SystemParams, options: &PotentialOptions) -> Result<f64> {
    Ok(effective_potential_with_error(q, Q, params, options)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialGrid {
    pub q: Vec<f64>,
    #[serde(rename = "Q")]
    pub big_q: Vec<f64>,
    /// `values[i * big_q.len() + j] = V(q[i], Q[j])`.
    pub values: Vec<f64>,
    pub path: String,
    pub options: PotentialOptions,
    /// True when the requested ranges were enlarged to contain every
    /// steady state.
    pub widened: bool,
}

impl PotentialGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.big_q.len() + j]
    }

    pub fn q_span(&self) -> f64 {
        self.q[self.q.len() - 1] - self.q[0]
    }

    #[allow(non_snake_case)]
    pub fn Q_span(&self) -> f64 {
        self.big_q[self.big_q.len() - 1] - self.big_q[0]
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Enlarges `range` by 5% of its span past any point outside it.
fn widen(range: (f64, f64), points: impl Iterator<Item = f64>) -> ((f64, f64), bool) {
    let (mut lo, mut hi) = range;
    let margin = 0.05 * (hi - lo);
    let mut changed = false;
    for x in points {
        if x < lo {
            lo = x - margin;
            changed = true;
        }
        if x > hi {
            hi = x + margin;
            changed = true;
        }
    }
    ((lo, hi), changed)
}

/// `V` on a `resolution.0 x resolution.1` grid. Each column of fixed `q`
/// integrates the `Q` leg cumulatively outward from `Q = 0`.
#[allow(non_snake_case)]
pub fn potential_grid(
    params: &SystemParams,
    q_range: (f64, f64),
    Q_range: (f64, f64),
    resolution: (usize, usize),
    tol: f64,
    options: &PotentialOptions,
) -> Result<PotentialGrid> {
    params.validate()?;
    for (name, (lo, hi), n) in [("q", q_range, resolution.0), ("Q", Q_range, resolution.1)] {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidGrid(format!("{name} range must satisfy lo < hi, got ({lo}, {hi})")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("{name} resolution must be at least 2, got {n}")));
        }
    }
    let branches = steady_state_at(params, tol)?;
    let (q_range, wq) = widen(q_range, branches.iter().map(|b| b.q_s));
    let (Q_range, wQ) = widen(Q_range, branches.iter().map(|b| b.Q_s));
    let qs = linspace(q_range.0, q_range.1, resolution.0);
    let bqs = linspace(Q_range.0, Q_range.1, resolution.1);

    let columns: Vec<Vec<f64>> = qs
        .par_iter()
        .map(|&q| column(params, q, &bqs, options))
        .collect::<Result<_>>()?;
    Ok(PotentialGrid {
        q: qs,
        big_q: bqs,
        values: columns.concat(),
        path: PATH.to_string(),
        options: *options,
        widened: wq || wQ,
    })
}

fn column(params: &SystemParams, q: f64, bqs: &[f64], options: &PotentialOptions) -> Result<Vec<f64>> {
    let base = -radiation_work_q(params, q);
    let mut leg = vec![0.0; bqs.len()];
    // positive side ascending, negative side descending, each from zero
    let split = bqs.partition_point(|x| *x < 0.0);
    let mut acc = 0.0;
    let mut prev = 0.0;
    for j in split..bqs.len() {
        acc += radiation_work_Q(params, q, prev, bqs[j], options.quad_tol)?.value;
        prev = bqs[j];
        leg[j] = acc;
    }
    acc = 0.0;
    prev = 0.0;
    for j in (0..split).rev() {
        acc += radiation_work_Q(params, q, prev, bqs[j], options.quad_tol)?.value;
        prev = bqs[j];
        leg[j] = acc;
    }
    let sign = if options.paper_literal_signs { -1.0 } else { 1.0 };
    Ok(bqs
        .iter()
        .zip(&leg)
        .map(|(&bq, w)| sign * (harmonic(params, q, bq) + base - w))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriticalKind {
    Minimum,
    Saddle,
    Maximum,
    Degenerate,
}

impl CriticalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CriticalKind::Minimum => "minimum",
            CriticalKind::Saddle => "saddle",
            CriticalKind::Maximum => "maximum",
            CriticalKind::Degenerate => "degenerate",
        }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub q: f64,
    pub Q: f64,
    pub value: f64,
    pub kind: CriticalKind,
    /// Eigenvalues, ascending, of the frequency-weighted Hessian (equal to
    /// the identity at the undriven origin).
    pub hessian_eigenvalues: [f64; 2],
}

/// Smallest weighted-Hessian eigenvalue magnitude treated as nonzero.
pub const DEGENERATE_EIG: f64 = 1e-4;

/// Central-difference Jacobian of the forces with steps `h`.
#[allow(non_snake_case)]
fn fd_jacobian(params: &SystemParams, q: f64, Q: f64, h: (f64, f64)) -> Matrix2<f64> {
    let (fqp, fQp) = adiabatic_force(q + h.0, Q, params);
    let (fqm, fQm) = adiabatic_force(q - h.0, Q, params);
    let (gqp, gQp) = adiabatic_force(q, Q + h.1, params);
    let (gqm, gQm) = adiabatic_force(q, Q - h.1, params);
    Matrix2::new(
        (fqp - fqm) / (2.0 * h.0),
        (gqp - gqm) / (2.0 * h.1),
        (fQp - fQm) / (2.0 * h.0),
        (gQp - gQm) / (2.0 * h.1),
    )
}

/// Weighted Hessian `W^-1/2 (-diag(1/omega_m, 1/4omega_r) J) W^-1/2` with
/// `W = diag(omega_m, 4 omega_r)`, symmetrized.
pub fn weighted_hessian(params: &SystemParams, jac: &Matrix2<f64>) -> Matrix2<f64> {
    let w = [params.omega_m, params.omega_bec()];
    let m = Matrix2::from_fn(|i, j| -jac[(i, j)] / (w[i] * (w[i] * w[j]).sqrt()));
    (m + m.transpose()) * 0.5
}

pub fn classify(eigs: [f64; 2]) -> CriticalKind {
    if eigs[0].abs().min(eigs[1].abs()) < DEGENERATE_EIG {
        CriticalKind::Degenerate
    } else if eigs[0] > 0.0 {
        CriticalKind::Minimum
    } else if eigs[1] < 0.0 {
        CriticalKind::Maximum
    } else {
        CriticalKind::Saddle
    }
}

/// Scaled force residual and its Jacobian in scaled coordinates.
struct Scaled<'a> {
    params: &'a SystemParams,
    span: (f64, f64),
}

impl Scaled<'_> {
    fn residual(&self, u: [f64; 2]) -> [f64; 2] {
        let (fq, fbig) = adiabatic_force(u[0] * self.span.0, u[1] * self.span.1, self.params);
        let om = self.params.omega_m;
        let big = self.params.omega_bec();
        [fq / (om * om * self.span.0), fbig / (big * big * self.span.1)]
    }

    fn newton(&self, start: [f64; 2], tol: f64) -> Option<[f64; 2]> {
        let norm = |r: [f64; 2]| r[0].hypot(r[1]);
        let h = 1e-6;
        let mut u = start;
        let mut r = self.residual(u);
        for _ in 0..100 {
            if norm(r) <= tol {
                return Some(u);
            }
            let mut jac = Matrix2::zeros();
            for k in 0..2 {
                let mut up = u;
                let mut dn = u;
                up[k] += h;
                dn[k] -= h;
                let (rp, rm) = (self.residual(up), self.residual(dn));
                for i in 0..2 {
                    jac[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
                }
            }
            let step = jac.lu().solve(&nalgebra::Vector2::new(-r[0], -r[1]))?;
            let mut lambda = 1.0;
            loop {
                let trial = [u[0] + lambda * step[0], u[1] + lambda * step[1]];
                let rt = self.residual(trial);
                if norm(rt) < norm(r) || lambda < 1e-10 {
                    let moved = lambda * step[0].hypot(step[1]);
                    u = trial;
                    r = rt;
                    if moved < 1e-15 && norm(r) <= tol.sqrt() {
                        return Some(u);
                    }
                    break;
                }
                lambda *= 0.5;
            }
        }
        (norm(r) <= tol).then_some(u)
    }
}

/// Critical points of the force field inside the grid ranges.
///
/// Seeds: every cell whose corners show a sign change in both force
/// components, and every interior node where the scaled force magnitude is
/// a local minimum (this catches nearly tangent zero curves). Each seed is
/// refined by damped Newton; results closer than `1e-5` of the range span
/// are merged.
pub fn find_critical_points(grid: &PotentialGrid, params: &SystemParams, tol: f64) -> Result<Vec<CriticalPoint>> {
    params.validate()?;
    let (nq, nb) = (grid.q.len(), grid.big_q.len());
    let span = (grid.q_span(), grid.Q_span());
    let scaled = Scaled { params, span };
    let residual_at = |i: usize, j: usize| scaled.residual([grid.q[i] / span.0, grid.big_q[j] / span.1]);
    let res: Vec<[f64; 2]> = (0..nq * nb)
        .into_par_iter()
        .map(|k| residual_at(k / nb, k % nb))
        .collect();
    let at = |i: usize, j: usize| res[i * nb + j];

    let mut seeds: Vec<[f64; 2]> = Vec::new();
    for i in 0..nq - 1 {
        for j in 0..nb - 1 {
            let corners = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            let changes = |k: usize| {
                let lo = corners.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min);
                let hi = corners.iter().map(|c| c[k]).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if changes(0) && changes(1) {
                seeds.push([
                    0.5 * (grid.q[i] + grid.q[i + 1]) / span.0,
                    0.5 * (grid.big_q[j] + grid.big_q[j + 1]) / span.1,
                ]);
            }
        }
    }
    let mag = |i: usize, j: usize| {
        let r = at(i, j);
        r[0].hypot(r[1])
    };
    for i in 1..nq - 1 {
        for j in 1..nb - 1 {
            let m = mag(i, j);
            let is_min = (i - 1..=i + 1)
                .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                .all(|(a, b)| (a, b) == (i, j) || mag(a, b) > m);
            if is_min {
                seeds.push([grid.q[i] / span.0, grid.big_q[j] / span.1]);
            }
        }
    }

    let found: Vec<[f64; 2]> = seeds
        .par_iter()
        .filter_map(|s| scaled.newton(*s, tol))
        .map(|u| [u[0] * span.0, u[1] * span.1])
        .collect();

    let inside = |p: &[f64; 2]| {
        let slack = (1e-5 * span.0, 1e-5 * span.1);
        p[0] >= grid.q[0] - slack.0
            && p[0] <= grid.q[nq - 1] + slack.0
            && p[1] >= grid.big_q[0] - slack.1
            && p[1] <= grid.big_q[nb - 1] + slack.1
    };
    let mut unique: Vec<[f64; 2]> = Vec::new();
    for p in found.into_iter().filter(inside) {
        let dup = unique
            .iter()
            .any(|u| (u[0] - p[0]).abs() <= 1e-5 * span.0 && (u[1] - p[1]).abs() <= 1e-5 * span.1);
        if !dup {
            unique.push(p);
        }
    }
    unique.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));

    unique
        .into_iter()
        .map(|[q, big_q]| {
            let jac = fd_jacobian(params, q, big_q, (1e-6 * span.0, 1e-6 * span.1));
            let eig = SymmetricEigen::new(weighted_hessian(params, &jac)).eigenvalues;
            let mut e = [eig[0], eig[1]];
            e.sort_by(f64::total_cmp);
            Ok(CriticalPoint {
                q,
                Q: big_q,
                value: effective_potential(q, big_q, params, &grid.options)?,
                kind: classify(e),
                hessian_eigenvalues: e,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VsPoint {
    pub n: f64,
    pub v_s: f64,
    /// Accumulated quadrature error bound.
    pub error: f64,
}

/// Potential along the steady-state line as a function of photon number,
/// integrated cumulatively from `n = 0`.
pub fn v_s_of_n(params: &SystemParams, n_grid: &[f64], quad_tol: f64) -> Result<Vec<VsPoint>> {
    params.validate()?;
    if n_grid.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
        return Err(Error::InvalidGrid("photon numbers must be finite and non-negative".into()));
    }
    if n_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid("photon-number grid must be ascending".into()));
    }
    let d = params.derived()?;
    let f = params.bec_factor();
    let (k, delta) = (params.kappa, params.delta);
    let mirror = params.xi * params.xi / params.omega_m;
    let bec = params.xi_sm * d.qq_per_photon;
    let numerator = |m: f64| {
        let t = params.eta_eff * d.qq_per_photon * m;
        params.eta * params.eta - t * t
    };
    let w1 = params.xi * params.xi;
    let w2 = params.xi_sm * params.xi_sm / f;
    let integrand = |m: f64| {
        let d1 = delta + (mirror + bec) * m;
        let d2 = delta + (mirror - bec) * m;
        let num = numerator(m);
        w1 * num / (k * k + d1 * d1) + w2 * num / (k * k + d2 * d2)
    };
    let mut breaks = Vec::new();
    for slope in [mirror + bec, mirror - bec] {
        if slope != 0.0 {
            breaks.push(-delta / slope);
        }
    }
    let settings = quad(quad_tol);
    let (mut acc, mut err, mut prev) = (0.0, 0.0, 0.0);
    let big = params.omega_bec();
    let mut out = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let r = integrate(integrand, prev, n, &breaks, &settings)?;
        acc += r.value;
        err += r.error;
        prev = n;
        let xn = params.xi * n;
        let sn = params.xi_sm * n;
        let closed = -params.omega_m * xn * xn / 2.0 + big * sn * sn / (2.0 * f * f);
        out.push(VsPoint {
            n,
            v_s: closed + acc,
            error: err,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{preset, Axis, PAPER_PRESET};

    fn fig4() -> SystemParams {
        preset(PAPER_PRESET)
            .unwrap()
            .params
            .with_ratio(Axis::Eta, 10.0)
            .with_ratio(Axis::EtaEff, 0.8)
    }

    #[test]
    fn anchored_at_origin() {
        let o = PotentialOptions::default();
        assert_eq!(effective_potential(0.0, 0.0, &fig4(), &o).unwrap(), 0.0);
    }

    #[test]
    fn harmonic_limit() {
        let mut p = fig4();
        p.eta = 0.0;
        p.eta_eff = 0.0;
        let o = PotentialOptions::default();
        let v = effective_potential(1e-3, -0.2, &p, &o).unwrap();
        let want = 0.5 * (p.omega_m * 1e-3).powi(2) + 0.5 * (p.omega_bec() * 0.2).powi(2);
        assert!((v - want).abs() < 1e-12 * want);
    }

    #[test]
    fn literal_signs_negate() {
        let p = fig4();
        let o = PotentialOptions::default();
        let lit = PotentialOptions { paper_literal_signs: true, ..o };
        let v = effective_potential(4e-4, -0.5, &p, &o).unwrap();
        assert_eq!(effective_potential(4e-4, -0.5, &p, &lit).unwrap(), -v);
    }

    #[test]
    fn q_leg_matches_quadrature() {
        let p = fig4();
        for q in [-1e-4, 3e-4, 8e-4, 2e-3] {
            let num = integrate(
                |s| p.omega_m * p.xi * p.adiabatic_photons(s, 0.0),
                0.0,
                q,
                &[],
                &QuadSettings::relative(1e-13),
            )
            .unwrap();
            let closed = radiation_work_q(&p, q);
            assert!((closed - num.value).abs() < 1e-10 * num.value.abs(), "{closed} vs {}", num.value);
        }
    }

    #[test]
    fn grid_columns_match_pointwise() {
        let p = fig4();
        let o = PotentialOptions::default();
        let g = potential_grid(&p, (-1e-4, 1e-3), (-1.0, 0.1), (7, 9), 1e-12, &o).unwrap();
        assert!(!g.widened);
        for i in 0..7 {
            for j in 0..9 {
                let v = effective_potential(g.q[i], g.big_q[j], &p, &o).unwrap();
                assert!((g.value(i, j) - v).abs() <= 1e-8 * v.abs().max(1.0));
            }
        }
    }

    #[test]
    fn small_ranges_are_widened() {
        let p = fig4();
        let g = potential_grid(&p, (0.0, 1e-4), (-0.1, 0.0), (5, 5), 1e-12, &PotentialOptions::default()).unwrap();
        assert!(g.widened);
        assert!(g.big_q[0] < -0.85 && g.q[4] > 7e-4);
    }

    #[test]
    fn vs_starts_at_zero() {
        let v = v_s_of_n(&fig4(), &[0.0, 1e-3, 1e-2], 1e-10).unwrap();
        assert_eq!(v[0].v_s, 0.0);
        assert!(v_s_of_n(&fig4(), &[1.0, 0.5], 1e-10).is_err());
    }
}
