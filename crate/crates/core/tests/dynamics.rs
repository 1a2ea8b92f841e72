use std::f64::consts::TAU;

use optomech::dynamics::*;
use optomech::numerics::ode::{Method, StepSettings};
use optomech::params::{preset, Axis, SignConvention, SystemParams, PAPER_PRESET};
use optomech::steady_state::{steady_state_at, Stability};
use optomech::Error;

fn normalized() -> SystemParams {
    SystemParams {
        eta: 0.0,
        eta_eff: 0.0,
        kappa: 1.0,
        delta: 0.0,
        omega_m: 1.0,
        omega_r: 0.25,
        xi: 1.0,
        xi_sm: 0.0,
        gamma_m: 0.0,
        gamma_sm: 0.0,
        sign_convention: SignConvention::Dynamics,
    }
}

fn rk4(dt: f64) -> StepSettings {
    StepSettings { method: Method::Rk4, dt, stride: 10.0 * dt, ..StepSettings::default() }
}

#[test]
fn force_signs_at_origin() {
    let mut p = preset(PAPER_PRESET).unwrap().params.with_ratio(Axis::Eta, 3.0);
    p.eta_eff = 0.0;
    let (fq, fbig) = adiabatic_force(0.0, 0.0, &p);
    let n = p.eta * p.eta / (p.kappa * p.kappa + p.delta * p.delta);
    assert!((fq - p.omega_m * p.xi * n).abs() <= 1e-14 * fq.abs());
    assert!((fbig + p.omega_bec() * p.xi_sm * n).abs() <= 1e-14 * fbig.abs());
    assert!(fq > 0.0 && fbig < 0.0);
}

#[test]
fn harmonic_limit_matches_cosine_for_both_methods() {
    let start = MechState { q: 1.0, ..MechState::origin() };
    let adaptive = StepSettings { method: Method::Rk45, rtol: 1e-10, atol: 1e-12, ..StepSettings::default() };
    for settings in [rk4(TAU / 1000.0), adaptive] {
        let t = integrate_adiabatic(start, &normalized(), 10.0 * TAU, &settings, AdiabaticOptions::default()).unwrap();
        assert!(t.times.len() > 100);
        for (time, s) in t.times.iter().zip(&t.mech) {
            assert!((s.q - time.cos()).abs() < 1e-6, "{settings:?} at {time}");
        }
    }
}

#[test]
fn rk4_error_is_fourth_order_over_three_steps() {
    let start = MechState { q: 1.0, ..MechState::origin() };
    let err = |dt: f64| {
        let t = integrate_adiabatic(start, &normalized(), 10.0 * TAU, &rk4(dt), AdiabaticOptions::default()).unwrap();
        let (time, s) = (t.times.last().unwrap(), t.mech.last().unwrap());
        (s.q - time.cos()).abs()
    };
    let e = [err(TAU / 100.0), err(TAU / 200.0), err(TAU / 400.0)];
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        assert!((8.0..=32.0).contains(&ratio), "{e:?}");
    }
}

#[test]
fn full_model_momentum_matches_position_rate() {
    let mut p = normalized();
    p.eta = 2.0;
    p.eta_eff = 0.5;
    p.delta = 1.0;
    p.xi = 0.3;
    p.xi_sm = 0.2;
    let t = integrate_full(FullState::default(), &p, 20.0, &rk4(1e-3), None).unwrap();
    let full = t.full.as_ref().unwrap();
    for (m, s) in t.mech.iter().zip(full) {
        assert_eq!(m.q_dot / p.omega_m, s.p);
        assert_eq!(m.q, s.q);
    }
    for (n, s) in t.photon_number.iter().zip(full) {
        assert_eq!(*n, s.photon_number());
    }
}

#[test]
fn stable_fixed_point_is_kept_by_full_model() {
    let mut p = normalized();
    p.kappa = 5.0;
    p.eta = 4.0;
    p.eta_eff = 0.5;
    p.delta = 1.0;
    p.xi = 0.3;
    p.xi_sm = 0.2;
    p.gamma_m = 0.05;
    p.sign_convention = SignConvention::Steady;
    let branches = steady_state_at(&p, 1e-12).unwrap();
    let b = branches.iter().find(|b| b.stability == Stability::Stable).expect("a stable branch");
    // P from Q' = 4 omega_r P - gamma_sm Q = 0 with gamma_sm = 0
    let start = FullState::with_adiabatic_field(&p, 0.0, b.q_s, 0.0, b.Q_s);
    assert!((start.photon_number() - b.n_s).abs() < 1e-12 * b.n_s);
    let settings = StepSettings { method: Method::Rk45, rtol: 1e-12, atol: 1e-14, stride: 10.0, ..StepSettings::default() };
    let t = integrate_full(start, &p, 1000.0 * TAU, &settings, None).unwrap();
    for s in t.full.as_ref().unwrap() {
        let d = [s.c_re - start.c_re, s.c_im - start.c_im, s.p, s.q - start.q, s.P, s.Q - start.Q];
        assert!(d.iter().all(|x| x.abs() < 1e-6), "{d:?}");
    }
}

#[test]
fn photon_number_follows_adiabatic_formula_for_fast_cavity() {
    let p = SystemParams {
        eta: 100.0,
        eta_eff: 20.0,
        kappa: 100.0,
        delta: 50.0,
        xi: 5.0,
        xi_sm: 3.0,
        sign_convention: SignConvention::Steady,
        ..normalized()
    };
    let settings = StepSettings { method: Method::Rk45, stride: 0.01, rtol: 1e-11, atol: 1e-14, ..StepSettings::default() };
    let t = integrate_full(FullState::default(), &p, 20.0, &settings, None).unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for (time, s) in t.times.iter().zip(t.full.as_ref().unwrap()) {
        if *time > 5.0 * p.omega_m / p.kappa {
            let a = p.adiabatic_photons(s.q, s.Q);
            num += (s.photon_number() - a).powi(2);
            den += a * a;
        }
    }
    assert!((num / den).sqrt() < 0.01);
}

#[test]
fn blow_up_reports_last_finite_sample() {
    let bad = |t: f64, _y: &[f64; 4]| if t > 1.0 { [f64::NAN; 4] } else { [0.0; 4] };
    let err = integrate_adiabatic(
        MechState { q: 1.0, ..MechState::origin() },
        &normalized(),
        5.0,
        &rk4(0.01),
        AdiabaticOptions { freeze_bec: false, forcing: Some(&bad) },
    )
    .unwrap_err();
    match err {
        Error::Divergence { t, .. } => assert!(t > 0.9 && t < 1.2, "{t}"),
        other => panic!("{other}"),
    }
}

#[test]
fn rejects_invalid_params() {
    let mut p = normalized();
    p.kappa = 0.0;
    assert!(integrate_adiabatic(MechState::origin(), &p, 1.0, &rk4(0.01), AdiabaticOptions::default()).is_err());
    assert!(integrate_full(FullState::default(), &p, 1.0, &rk4(0.01), None).is_err());
}

#[test]
fn preset_mirror_oscillation_is_bounded() {
    let p = SystemParams {
        eta: optomech::cli::dynamics_default_eta(),
        delta: optomech::cli::dynamics_default_delta(),
        sign_convention: SignConvention::Dynamics,
        ..preset(PAPER_PRESET).unwrap().params
    };
    let t = integrate_adiabatic(MechState::origin(), &p, 100.0, &StepSettings::default(), AdiabaticOptions::default())
        .unwrap();
    let amp = t.max_abs_q();
    assert!(amp > 0.0 && amp.is_finite());
    // every period reaches a comparable extent
    let period = (TAU / (t.times[1] - t.times[0])).round() as usize;
    for chunk in t.mech.chunks(period).filter(|c| c.len() == period) {
        let m = chunk.iter().fold(0.0f64, |a, s| a.max(s.q.abs()));
        assert!(m > 0.5 * amp, "{m} vs {amp}");
    }
}
