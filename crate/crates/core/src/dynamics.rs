//! Mean-field equations of motion.
//!
//! Time is measured in units of `1/omega_m`: every trajectory uses
//! `tau = omega_m t`. Velocities are kept as physical `dq/dt`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ode::{self, Method, StepSettings};
use crate::params::SystemParams;

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MechState {
    pub q: f64,
    pub q_dot: f64,
    pub Q: f64,
    pub Q_dot: f64,
}

impl MechState {
    pub fn origin() -> Self {
        MechState::default()
    }

    fn to_array(self) -> [f64; 4] {
        [self.q, self.q_dot, self.Q, self.Q_dot]
    }

    fn from_array(y: &[f64; 4]) -> Self {
        MechState {
            q: y[0],
            q_dot: y[1],
            Q: y[2],
            Q_dot: y[3],
        }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FullState {
    pub c_re: f64,
    pub c_im: f64,
    pub p: f64,
    pub q: f64,
    pub P: f64,
    pub Q: f64,
}

impl FullState {
    pub fn photon_number(&self) -> f64 {
        self.c_re * self.c_re + self.c_im * self.c_im
    }

    fn to_array(self) -> [f64; 6] {
        [self.c_re, self.c_im, self.p, self.q, self.P, self.Q]
    }

    fn from_array(y: &[f64; 6]) -> Self {
        FullState {
            c_re: y[0],
            c_im: y[1],
            p: y[2],
            q: y[3],
            P: y[4],
            Q: y[5],
        }
    }

    /// The field's stationary value at the given mechanical positions.
    #[allow(non_snake_case)]
    pub fn with_adiabatic_field(params: &SystemParams, p: f64, q: f64, P: f64, Q: f64) -> Self {
        let theta = field_phase(params, q, Q);
        // c = (eta + i eta_eff Q) / (kappa - i theta)
        let den = params.kappa * params.kappa + theta * theta;
        let (a, b) = (params.eta, params.eta_eff * Q);
        FullState {
            c_re: (a * params.kappa - b * theta) / den,
            c_im: (b * params.kappa + a * theta) / den,
            p,
            q,
            P,
            Q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Adiabatic,
    Full,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adiabatic" => Ok(Model::Adiabatic),
            "full" => Ok(Model::Full),
            other => Err(Error::Config(format!(
                "unknown model `{other}` (expected adiabatic or full)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub model: Model,
    pub method: Method,
    /// Fixed step, or the last accepted adaptive step, in units of `1/omega_m`.
    pub step: f64,
    pub steps: usize,
    /// `omega_m t`.
    pub times: Vec<f64>,
    pub mech: Vec<MechState>,
    /// Full states, for the 6D model only.
    pub full: Option<Vec<FullState>>,
    /// Adiabatic photon number, or `|c|^2` for the 6D model.
    pub photon_number: Vec<f64>,
}

impl Trajectory {
    pub fn max_abs_q(&self) -> f64 {
        self.mech.iter().fold(0.0, |m, s| m.max(s.q.abs()))
    }

    #[allow(non_snake_case)]
    pub fn max_abs_Q(&self) -> f64 {
        self.mech.iter().fold(0.0, |m, s| m.max(s.Q.abs()))
    }
}

/// Restoring plus radiation-pressure forces `(F_q, F_Q)` of the adiabatic
/// model, without damping.
#[allow(non_snake_case)]
pub fn adiabatic_force(q: f64, Q: f64, params: &SystemParams) -> (f64, f64) {
    let n = params.adiabatic_photons(q, Q);
    let om = params.omega_m;
    let big = params.omega_bec();
    (
        -om * om * q + om * params.xi * n,
        -big * big * Q - big * params.xi_sm * n,
    )
}

/// Phase rate of the cavity field, `s * detuning`.
#[allow(non_snake_case)]
fn field_phase(params: &SystemParams, q: f64, Q: f64) -> f64 {
    params.sign_convention.sign() * params.detuning_at(q, Q)
}

/// Extra generalized force added to the physical-time right-hand side.
pub type Forcing<'a, const N: usize> = &'a (dyn Fn(f64, &[f64; N]) -> [f64; N] + Sync);

#[derive(Clone, Copy, Default)]
pub struct AdiabaticOptions<'a> {
    /// Pin the condensate at its initial position.
    pub freeze_bec: bool,
    /// Added to `(q', q'', Q', Q'')`; time argument is `omega_m t`.
    pub forcing: Option<Forcing<'a, 4>>,
}

pub fn integrate_adiabatic(
    initial: MechState,
    params: &SystemParams,
    t_end: f64,
    settings: &StepSettings,
    options: AdiabaticOptions<'_>,
) -> Result<Trajectory> {
    params.validate()?;
    let om = params.omega_m;
    let rhs = |t: f64, y: &[f64; 4]| -> [f64; 4] {
        let (fq, fbig) = adiabatic_force(y[0], y[2], params);
        let mut d = [
            y[1],
            fq - params.gamma_m * y[1],
            y[3],
            fbig - params.gamma_sm * y[3],
        ];
        if options.freeze_bec {
            d[2] = 0.0;
            d[3] = 0.0;
        }
        if let Some(f) = options.forcing {
            let extra = f(t, y);
            for i in 0..4 {
                d[i] += extra[i];
            }
        }
        d.map(|v| v / om)
    };
    let mut y0 = initial.to_array();
    if options.freeze_bec {
        y0[3] = 0.0;
    }
    let sol = ode::solve(&rhs, 0.0, y0, t_end, settings)?;
    let mech: Vec<MechState> = sol.states.iter().map(MechState::from_array).collect();
    let photon_number = mech.iter().map(|m| params.adiabatic_photons(m.q, m.Q)).collect();
    Ok(Trajectory {
        model: Model::Adiabatic,
        method: settings.method,
        step: sol.step,
        steps: sol.steps,
        times: sol.times,
        mech,
        full: None,
        photon_number,
    })
}

/// Right-hand side of the 6D model in physical time.
pub fn full_rhs(params: &SystemParams, y: &[f64; 6]) -> [f64; 6] {
    let [x, v, p, q, pp, qq] = *y;
    let theta = field_phase(params, q, qq);
    let k = params.kappa;
    let n = x * x + v * v;
    let big = params.omega_bec();
    [
        -k * x - theta * v + params.eta,
        theta * x - k * v + params.eta_eff * qq,
        -params.omega_m * q + params.xi * n - params.gamma_m * p,
        params.omega_m * p,
        -big * qq - params.xi_sm * n - params.gamma_sm * pp,
        big * pp - params.gamma_sm * qq,
    ]
}

pub fn integrate_full(
    initial: FullState,
    params: &SystemParams,
    t_end: f64,
    settings: &StepSettings,
    forcing: Option<Forcing<'_, 6>>,
) -> Result<Trajectory> {
    params.validate()?;
    let om = params.omega_m;
    let rhs = |t: f64, y: &[f64; 6]| -> [f64; 6] {
        let mut d = full_rhs(params, y);
        if let Some(f) = forcing {
            let extra = f(t, y);
            for i in 0..6 {
                d[i] += extra[i];
            }
        }
        d.map(|v| v / om)
    };
    let sol = ode::solve(&rhs, 0.0, initial.to_array(), t_end, settings)?;
    let full: Vec<FullState> = sol.states.iter().map(FullState::from_array).collect();
    let big = params.omega_bec();
    let mech = full
        .iter()
        .map(|s| MechState {
            q: s.q,
            q_dot: om * s.p,
            Q: s.Q,
            Q_dot: big * s.P - params.gamma_sm * s.Q,
        })
        .collect();
    let photon_number = full.iter().map(FullState::photon_number).collect();
    Ok(Trajectory {
        model: Model::Full,
        method: settings.method,
        step: sol.step,
        steps: sol.steps,
        times: sol.times,
        mech,
        full: Some(full),
        photon_number,
    })
}
