//! Reference computations used by the acceptance suite.
//!
//! Everything here is written from the model equations directly and does not
//! call into the solver, so agreement between the two is meaningful.

use optomech::params::SystemParams;

/// `(B, C)` recomputed from the raw fields.
pub fn shift_and_gain(p: &SystemParams) -> (f64, f64) {
    let big = 4.0 * p.omega_r;
    let factor = 1.0 - p.gamma_sm / big;
    let b = p.xi * p.xi / p.omega_m + p.xi_sm * p.xi_sm / (big * factor);
    let c = (p.eta_eff * p.xi_sm / (big * factor)).powi(2);
    (b, c)
}

/// Self-consistency residual in factored form.
pub fn photon_residual(p: &SystemParams, n: f64) -> f64 {
    let (b, c) = shift_and_gain(p);
    let s = p.sign_convention.sign();
    let d = p.delta + s * b * n;
    n * (p.kappa * p.kappa + d * d) - p.eta * p.eta - c * n * n
}

/// Fujiwara bound on the magnitude of any root of the photon cubic.
pub fn root_bound(p: &SystemParams) -> f64 {
    let (b, c) = shift_and_gain(p);
    let s = p.sign_convention.sign();
    let a3 = b * b;
    let a2 = 2.0 * s * p.delta * b - c;
    let a1 = p.kappa * p.kappa + p.delta * p.delta;
    let a0 = -p.eta * p.eta;
    if a3 == 0.0 {
        return 2.0 * (a0 / a1).abs();
    }
    2.0 * (a2 / a3)
        .abs()
        .max((a1 / a3).abs().sqrt())
        .max((a0 / (2.0 * a3)).abs().cbrt())
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Non-negative roots by sign-change scan on `points` nodes spread evenly
/// over `[0, bound]` plus a logarithmic set near zero, each refined by
/// bisection. Exact zeros are reported as roots.
pub fn scan_roots(p: &SystemParams, points: usize) -> Vec<f64> {
    let f = |n: f64| photon_residual(p, n);
    let top = root_bound(p) * 1.01;
    let mut nodes: Vec<f64> = (0..=points).map(|i| top * i as f64 / points as f64).collect();
    let first = top / points as f64;
    nodes.extend((1..400).map(|k| first * 10f64.powf(-(k as f64) / 20.0)));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let mut roots: Vec<f64> = Vec::new();
    let mut prev = (nodes[0], f(nodes[0]));
    if prev.1 == 0.0 {
        roots.push(prev.0);
    }
    for &x in &nodes[1..] {
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if prev.1 != 0.0 && (fx < 0.0) != (prev.1 < 0.0) {
            roots.push(bisect(&f, prev.0, x));
        }
        prev = (x, fx);
    }
    // round-off can flip the sign more than once next to a root
    let mut out: Vec<f64> = Vec::new();
    for r in roots {
        match out.last() {
            Some(last) if (r - last).abs() <= 1e-9 * r.abs().max(last.abs()) => {}
            _ => out.push(r),
        }
    }
    out
}

/// The pump window `[lower, upper]` (in multiples of kappa) with three
/// steady states, from the turning points of `g(n) = n Den(n) - C n^2`.
pub fn eta_window(p: &SystemParams) -> Option<(f64, f64)> {
    let (b, c) = shift_and_gain(p);
    let s = p.sign_convention.sign();
    let g = |n: f64| {
        let d = p.delta + s * b * n;
        n * (p.kappa * p.kappa + d * d) - c * n * n
    };
    // g'(n) = 3 B^2 n^2 + 2 (2 s delta B - C) n + kappa^2 + delta^2
    let qa = 3.0 * b * b;
    let qb = 2.0 * (2.0 * s * p.delta * b - c);
    let qc = p.kappa * p.kappa + p.delta * p.delta;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let n1 = (-qb - root) / (2.0 * qa);
    let n2 = (-qb + root) / (2.0 * qa);
    if n2 <= 0.0 {
        return None;
    }
    let upper = g(n1.max(0.0));
    if upper <= 0.0 {
        return None;
    }
    Some((g(n2).max(0.0).sqrt() / p.kappa, upper.sqrt() / p.kappa))
}

/// Adiabatic forces written out from the equations of motion.
#[allow(non_snake_case)]
pub fn forces(p: &SystemParams, q: f64, Q: f64) -> (f64, f64) {
    let s = p.sign_convention.sign();
    let d = p.delta + s * (p.xi * q - p.xi_sm * Q);
    let n = (p.eta * p.eta + p.eta_eff * p.eta_eff * Q * Q) / (p.kappa * p.kappa + d * d);
    let big = 4.0 * p.omega_r;
    (
        -p.omega_m * p.omega_m * q + p.omega_m * p.xi * n,
        -big * big * Q - big * p.xi_sm * n,
    )
}

/// Energy of the mirror with the condensate held at `Q`.
#[allow(non_snake_case)]
pub fn frozen_energy(p: &SystemParams, Q: f64, q: f64, q_dot: f64) -> f64 {
    let s = p.sign_convention.sign();
    let num = p.eta * p.eta + p.eta_eff * p.eta_eff * Q * Q;
    let d = |x: f64| p.delta + s * (p.xi * x - p.xi_sm * Q);
    // int_0^q num / (kappa^2 + d(x)^2) dx
    let work = num / (p.kappa * s * p.xi) * ((d(q) / p.kappa).atan() - (d(0.0) / p.kappa).atan());
    0.5 * q_dot * q_dot + 0.5 * p.omega_m * p.omega_m * q * q - p.omega_m * p.xi * work
}

/// Ridders' extrapolated central difference; returns `(derivative, error)`.
pub fn ridders(f: &dyn Fn(f64) -> f64, x: f64, h0: f64) -> (f64, f64) {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const N: usize = 10;
    let mut a = [[0.0f64; N]; N];
    let mut h = h0;
    a[0][0] = (f(x + h) - f(x - h)) / (2.0 * h);
    let mut best = (a[0][0], f64::INFINITY);
    for i in 1..N {
        h /= CON;
        a[0][i] = (f(x + h) - f(x - h)) / (2.0 * h);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let err = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if err <= best.1 {
                best = (a[j][i], err);
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * best.1 {
            break;
        }
    }
    best
}
