//! Physical parameters of the hybrid cavity and the coefficients derived
//! from them.
//!
//! All frequencies, couplings and rates are stored as angular frequencies in
//! rad/s. Positions and photon numbers are dimensionless.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Name of the built-in laboratory parameter set.
pub const PAPER_PRESET: &str = "paper-2015";

/// Sign of the mechanical shift inside the cavity detuning.
///
/// The detuning seen by the field is `delta + s * (xi * q - xi_sm * Q)` with
/// `s = -1` for [`SignConvention::Steady`] and `s = +1` for
/// [`SignConvention::Dynamics`]. The choice is applied uniformly to the
/// steady-state cubic, the equations of motion and the potential, so fixed
/// points of the dynamics are always roots of the cubic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    #[default]
    Steady,
    Dynamics,
}

impl SignConvention {
    pub fn sign(self) -> f64 {
        match self {
            SignConvention::Steady => -1.0,
            SignConvention::Dynamics => 1.0,
        }
    }
}

impl FromStr for SignConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "steady" => Ok(SignConvention::Steady),
            "dynamics" => Ok(SignConvention::Dynamics),
            other => Err(Error::Config(format!(
                "unknown sign_convention `{other}` (expected `steady` or `dynamics`)"
            ))),
        }
    }
}

/// Parameters that may be swept or overridden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Eta,
    EtaEff,
    Delta,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Eta => "eta",
            Axis::EtaEff => "eta_eff",
            Axis::Delta => "delta",
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(Axis::Eta),
            "eta-eff" | "eta_eff" => Ok(Axis::EtaEff),
            "delta" => Ok(Axis::Delta),
            other => Err(Error::Config(format!(
                "unknown axis `{other}` (expected eta, eta-eff or delta)"
            ))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Pump coupling.
    pub eta: f64,
    /// Effective transverse coupling, `sqrt(n) * eta_perp`.
    pub eta_eff: f64,
    /// Cavity decay rate.
    pub kappa: f64,
    /// Effective cavity detuning.
    pub delta: f64,
    /// Mirror frequency.
    pub omega_m: f64,
    /// Atomic recoil frequency; the condensate side mode oscillates at `4 omega_r`.
    pub omega_r: f64,
    /// Mirror-field coupling.
    pub xi: f64,
    /// Condensate-field coupling.
    pub xi_sm: f64,
    /// Mirror damping.
    pub gamma_m: f64,
    /// Condensate damping.
    pub gamma_sm: f64,
    #[serde(default)]
    pub sign_convention: SignConvention,
}

impl SystemParams {
    /// Checks every field invariant and names the first offending field.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eta", self.eta),
            ("eta_eff", self.eta_eff),
            ("kappa", self.kappa),
            ("delta", self.delta),
            ("omega_m", self.omega_m),
            ("omega_r", self.omega_r),
            ("xi", self.xi),
            ("xi_sm", self.xi_sm),
            ("gamma_m", self.gamma_m),
            ("gamma_sm", self.gamma_sm),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::param(name, format!("must be finite, got {value}")));
            }
        }
        for (name, value) in [
            ("kappa", self.kappa),
            ("omega_m", self.omega_m),
            ("omega_r", self.omega_r),
        ] {
            if value <= 0.0 {
                return Err(Error::param(name, format!("must be positive, got {value}")));
            }
        }
        for (name, value) in [
            ("eta", self.eta),
            ("eta_eff", self.eta_eff),
            ("xi", self.xi),
            ("xi_sm", self.xi_sm),
            ("gamma_m", self.gamma_m),
            ("gamma_sm", self.gamma_sm),
        ] {
            if value < 0.0 {
                return Err(Error::param(
                    name,
                    format!("must be non-negative, got {value}"),
                ));
            }
        }
        if self.bec_factor() == 0.0 {
            return Err(Error::SingularDamping);
        }
        Ok(())
    }

    /// Condensate side-mode frequency `4 omega_r`.
    pub fn omega_bec(&self) -> f64 {
        4.0 * self.omega_r
    }

    /// `1 - gamma_sm / (4 omega_r)`, the damping factor of the condensate
    /// steady position.
    pub fn bec_factor(&self) -> f64 {
        1.0 - self.gamma_sm / self.omega_bec()
    }

    pub fn derived(&self) -> Result<DerivedCoefficients> {
        derived(self)
    }

    /// Detuning seen by the field at mirror position `q` and condensate
    /// position `bec`.
    pub fn detuning_at(&self, q: f64, bec: f64) -> f64 {
        self.delta + self.sign_convention.sign() * (self.xi * q - self.xi_sm * bec)
    }

    /// Instantaneous photon number of the adiabatically eliminated field.
    pub fn adiabatic_photons(&self, q: f64, bec: f64) -> f64 {
        let d = self.detuning_at(q, bec);
        (self.eta * self.eta + self.eta_eff * self.eta_eff * bec * bec)
            / (self.kappa * self.kappa + d * d)
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Eta => self.eta,
            Axis::EtaEff => self.eta_eff,
            Axis::Delta => self.delta,
        }
    }

    /// Copy with one sweepable field replaced (absolute value, rad/s).
    pub fn with(&self, axis: Axis, value: f64) -> Self {
        let mut p = *self;
        match axis {
            Axis::Eta => p.eta = value,
            Axis::EtaEff => p.eta_eff = value,
            Axis::Delta => p.delta = value,
        }
        p
    }

    /// Copy with one sweepable field set to `ratio * kappa`.
    pub fn with_ratio(&self, axis: Axis, ratio: f64) -> Self {
        self.with(axis, ratio * self.kappa)
    }
}

/// Per-photon coefficients of the steady-state equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedCoefficients {
    /// Net detuning pull per photon, `xi^2/omega_m + xi_sm^2 / (4 omega_r f)`.
    pub b_shift: f64,
    /// Transverse scattering gain, `(eta_eff * qq_per_photon)^2`.
    pub c_gain: f64,
    /// Mirror displacement per photon, `xi / omega_m`.
    pub q_per_photon: f64,
    /// Magnitude of the condensate displacement per photon, `xi_sm / (4 omega_r f)`.
    pub qq_per_photon: f64,
}

/// Groups the steady-state prefactors; `f = 1 - gamma_sm / (4 omega_r)`.
pub fn derived(params: &SystemParams) -> Result<DerivedCoefficients> {
    let factor = params.bec_factor();
    if factor == 0.0 {
        return Err(Error::SingularDamping);
    }
    let q_per_photon = params.xi / params.omega_m;
    let qq_per_photon = params.xi_sm / (params.omega_bec() * factor);
    let b_shift = params.xi * q_per_photon + params.xi_sm * qq_per_photon;
    let transverse = params.eta_eff * qq_per_photon;
    Ok(DerivedCoefficients {
        b_shift,
        c_gain: transverse * transverse,
        q_per_photon,
        qq_per_photon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    /// Angular frequency in rad/s, no conversion.
    #[serde(rename = "rad/s")]
    RadPerSecond,
    #[serde(rename = "Hz")]
    Hz,
    #[serde(rename = "kHz")]
    KHz,
    #[serde(rename = "MHz")]
    MHz,
    #[serde(rename = "2pi*Hz")]
    TwoPiHz,
    #[serde(rename = "2pi*kHz")]
    TwoPiKHz,
    #[serde(rename = "2pi*MHz")]
    TwoPiMHz,
}

impl Unit {
    /// Multiplier to rad/s. Plain `Hz`/`kHz`/`MHz` are taken as angular
    /// magnitudes without a factor 2 pi.
    pub fn to_rad_per_s(self) -> f64 {
        match self {
            Unit::RadPerSecond | Unit::Hz => 1.0,
            Unit::KHz => 1e3,
            Unit::MHz => 1e6,
            Unit::TwoPiHz => TAU,
            Unit::TwoPiKHz => TAU * 1e3,
            Unit::TwoPiMHz => TAU * 1e6,
        }
    }
}

/// A number with a frequency unit, e.g. `1.3 x 2pi kHz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub const fn new(value: f64, unit: Unit) -> Self {
        Quantity { value, unit }
    }

    pub fn rad_per_s(self) -> f64 {
        self.value * self.unit.to_rad_per_s()
    }

    /// Display form `X x 2pi <unit>` with the unit picked by magnitude.
    pub fn display_two_pi(rad_per_s: f64) -> Self {
        let cycles = rad_per_s.abs() / TAU;
        let unit = if cycles >= 1e6 {
            Unit::TwoPiMHz
        } else if cycles >= 1e3 {
            Unit::TwoPiKHz
        } else {
            Unit::TwoPiHz
        };
        Quantity {
            value: rad_per_s / unit.to_rad_per_s(),
            unit,
        }
    }
}

/// Laboratory quantities from which a parameter set is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentalInputs {
    pub n_atoms: f64,
    /// Vacuum Rabi frequency U0.
    pub u0: Quantity,
    /// Cavity length, m.
    pub cavity_length: f64,
    /// Pump wavelength, m.
    pub wavelength: f64,
    /// Pump power, W.
    pub input_power: f64,
    pub omega_c: Quantity,
    pub omega_p: Quantity,
    pub kappa: Quantity,
    pub omega_r: Quantity,
    pub omega_m: Quantity,
    pub xi: Quantity,
    pub xi_sm: Quantity,
    pub delta: Quantity,
    pub eta_eff: Quantity,
    pub gamma_m: Quantity,
    pub gamma_sm: Quantity,
    /// Editorial notes about how printed values were read.
    pub notes: Vec<String>,
}

impl ExperimentalInputs {
    pub fn paper_2015() -> Self {
        use Unit::*;
        ExperimentalInputs {
            n_atoms: 2.3e4,
            u0: Quantity::new(3.1, TwoPiMHz),
            cavity_length: 1.25e-4,
            wavelength: 780e-9,
            input_power: 0.0164e-3,
            omega_c: Quantity::new(15.3e14, TwoPiHz),
            omega_p: Quantity::new(3.8e14, TwoPiHz),
            kappa: Quantity::new(1.3, TwoPiKHz),
            omega_r: Quantity::new(3.8, TwoPiKHz),
            omega_m: Quantity::new(15.2, TwoPiMHz),
            xi: Quantity::new(3.8, MHz),
            xi_sm: Quantity::new(4.4, MHz),
            delta: Quantity::new(0.52, TwoPiMHz),
            eta_eff: Quantity::new(0.0, RadPerSecond),
            gamma_m: Quantity::new(0.0, RadPerSecond),
            gamma_sm: Quantity::new(0.0, RadPerSecond),
            notes: vec![
                "atom number printed as `2.3x4`; read as 2.3e4".into(),
                "cavity length printed without unit; read as 1.25e-4 m".into(),
                "xi and xi_sm printed in MHz without 2pi; used as rad/s magnitudes".into(),
                "mechanical and condensate damping not given; set to 0".into(),
                "eta derived from the pump power as sqrt(P kappa / (hbar omega_p))".into(),
            ],
        }
    }
}

/// Converts laboratory inputs to a parameter set in rad/s.
///
/// The pump coupling follows `|eta| = sqrt(P kappa / (hbar omega_p))`. The
/// atom number, U0, cavity length, wavelength and field frequencies are
/// validated but not otherwise consumed.
pub fn derive_from_experiment(raw: &ExperimentalInputs) -> Result<SystemParams> {
    let positive = [
        ("n_atoms", raw.n_atoms),
        ("u0", raw.u0.rad_per_s()),
        ("cavity_length", raw.cavity_length),
        ("wavelength", raw.wavelength),
        ("input_power", raw.input_power),
        ("omega_c", raw.omega_c.rad_per_s()),
        ("omega_p", raw.omega_p.rad_per_s()),
        ("kappa", raw.kappa.rad_per_s()),
        ("omega_r", raw.omega_r.rad_per_s()),
        ("omega_m", raw.omega_m.rad_per_s()),
        ("xi", raw.xi.rad_per_s()),
        ("xi_sm", raw.xi_sm.rad_per_s()),
        ("delta", raw.delta.rad_per_s().abs()),
    ];
    for (name, value) in positive {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::param(name, format!("must be positive, got {value}")));
        }
    }
    let kappa = raw.kappa.rad_per_s();
    let eta = (raw.input_power * kappa / (HBAR * raw.omega_p.rad_per_s())).sqrt();
    let params = SystemParams {
        eta,
        eta_eff: raw.eta_eff.rad_per_s(),
        kappa,
        delta: raw.delta.rad_per_s(),
        omega_m: raw.omega_m.rad_per_s(),
        omega_r: raw.omega_r.rad_per_s(),
        xi: raw.xi.rad_per_s(),
        xi_sm: raw.xi_sm.rad_per_s(),
        gamma_m: raw.gamma_m.rad_per_s(),
        gamma_sm: raw.gamma_sm.rad_per_s(),
        sign_convention: SignConvention::Steady,
    };
    params.validate()?;
    Ok(params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub inputs: ExperimentalInputs,
    pub params: SystemParams,
}

pub fn preset_names() -> &'static [&'static str] {
    &[PAPER_PRESET]
}

pub fn preset(name: &str) -> Result<Preset> {
    match name {
        PAPER_PRESET => {
            let inputs = ExperimentalInputs::paper_2015();
            let params = derive_from_experiment(&inputs)?;
            Ok(Preset {
                name: PAPER_PRESET,
                inputs,
                params,
            })
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// A config value: either a bare number in rad/s or `{value, unit}`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum ConfigQuantity {
    Plain(f64),
    WithUnit { value: f64, unit: Unit },
}

impl ConfigQuantity {
    fn rad_per_s(self) -> f64 {
        match self {
            ConfigQuantity::Plain(v) => v,
            ConfigQuantity::WithUnit { value, unit } => Quantity::new(value, unit).rad_per_s(),
        }
    }
}

const FIELD_NAMES: [&str; 10] = [
    "eta", "eta_eff", "kappa", "delta", "omega_m", "omega_r", "xi", "xi_sm", "gamma_m", "gamma_sm",
];

/// Parses a JSON parameter file.
///
/// Recognised top-level keys are the [`SystemParams`] field names, an
/// optional `preset` naming the base set, and `sign_convention`. Without a
/// preset every field must be present.
pub fn params_from_json(text: &str) -> Result<SystemParams> {
    let map: BTreeMap<String, serde_json::Value> =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;

    let base = match map.get("preset") {
        Some(serde_json::Value::String(name)) => Some(preset(name)?.params),
        Some(other) => {
            return Err(Error::Config(format!(
                "`preset` must be a string, got {other}"
            )))
        }
        None => None,
    };

    let mut values: BTreeMap<&str, f64> = BTreeMap::new();
    let mut convention = base.map(|p| p.sign_convention).unwrap_or_default();
    for (key, value) in &map {
        match key.as_str() {
            "preset" => {}
            "sign_convention" => {
                let s = value.as_str().ok_or_else(|| {
                    Error::Config("`sign_convention` must be a string".to_string())
                })?;
                convention = s.parse()?;
            }
            k => {
                let Some(&field) = FIELD_NAMES.iter().find(|f| **f == k) else {
                    return Err(Error::Config(format!("unknown key `{k}`")));
                };
                let q: ConfigQuantity = serde_json::from_value(value.clone()).map_err(|_| {
                    Error::Config(format!(
                        "`{k}` must be a number or an object {{value, unit}} with a known unit"
                    ))
                })?;
                values.insert(field, q.rad_per_s());
            }
        }
    }

    let pick = |name: &str, fallback: Option<f64>| -> Result<f64> {
        values
            .get(name)
            .copied()
            .or(fallback)
            .ok_or_else(|| Error::Config(format!("missing `{name}` (and no preset given)")))
    };
    let params = SystemParams {
        eta: pick("eta", base.map(|p| p.eta))?,
        eta_eff: pick("eta_eff", base.map(|p| p.eta_eff).or(Some(0.0)))?,
        kappa: pick("kappa", base.map(|p| p.kappa))?,
        delta: pick("delta", base.map(|p| p.delta))?,
        omega_m: pick("omega_m", base.map(|p| p.omega_m))?,
        omega_r: pick("omega_r", base.map(|p| p.omega_r))?,
        xi: pick("xi", base.map(|p| p.xi))?,
        xi_sm: pick("xi_sm", base.map(|p| p.xi_sm))?,
        gamma_m: pick("gamma_m", base.map(|p| p.gamma_m).or(Some(0.0)))?,
        gamma_sm: pick("gamma_sm", base.map(|p| p.gamma_sm).or(Some(0.0)))?,
        sign_convention: convention,
    };
    params.validate()?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper() -> SystemParams {
        preset(PAPER_PRESET).unwrap().params
    }

    #[test]
    fn paper_preset_unit_conversion() {
        let p = paper();
        assert!((p.kappa - 8168.14).abs() < 0.01, "kappa = {}", p.kappa);
        assert!((p.omega_m - 9.5504e7).abs() / 9.5504e7 < 1e-5);
        assert_eq!(p.xi, 3.8e6);
        assert_eq!(p.xi_sm, 4.4e6);
        assert_eq!(p.gamma_m, 0.0);
        assert_eq!(p.gamma_sm, 0.0);
    }

    #[test]
    fn dark_cavity_is_valid() {
        let p = SystemParams {
            eta: 0.0,
            eta_eff: 0.0,
            ..paper()
        };
        assert!(p.validate().is_ok());
    }

    #[test]
    fn non_positive_frequency_names_field() {
        let mut raw = ExperimentalInputs::paper_2015();
        raw.omega_m = Quantity::new(0.0, Unit::TwoPiMHz);
        let err = derive_from_experiment(&raw).unwrap_err();
        assert!(err.to_string().contains("omega_m"), "{err}");

        let mut raw = ExperimentalInputs::paper_2015();
        raw.cavity_length = -1.0;
        let err = derive_from_experiment(&raw).unwrap_err();
        assert!(err.to_string().contains("cavity_length"), "{err}");
    }

    #[test]
    fn decoupled_condensate() {
        let p = SystemParams {
            xi_sm: 0.0,
            eta_eff: 1e5,
            ..paper()
        };
        let d = p.derived().unwrap();
        assert_eq!(d.c_gain, 0.0);
        assert_eq!(d.qq_per_photon, 0.0);
        assert_eq!(d.b_shift, p.xi * p.xi / p.omega_m);
    }

    #[test]
    fn qq_per_photon_matches_direct_prefactor() {
        let p = SystemParams {
            xi_sm: 4.4e6,
            omega_r: 2.388e4,
            gamma_sm: 0.0,
            ..paper()
        };
        let d = p.derived().unwrap();
        // Independent evaluation of the condensate prefactor with f = 1.
        let direct = 4.4e6 / (4.0 * 2.388e4 * (1.0 - 0.0 / (4.0 * 2.388e4)));
        assert!((d.qq_per_photon - direct).abs() < 1e-12 * direct);
        assert!((d.qq_per_photon - 46.06).abs() < 0.005);
    }

    #[test]
    fn no_transverse_drive_means_no_gain() {
        let p = SystemParams {
            eta_eff: 0.0,
            gamma_sm: 100.0,
            ..paper()
        };
        assert_eq!(p.derived().unwrap().c_gain, 0.0);
    }

    #[test]
    fn singular_factor_is_rejected() {
        let base = paper();
        let p = SystemParams {
            gamma_sm: base.omega_bec(),
            ..base
        };
        assert!(matches!(p.derived(), Err(Error::SingularDamping)));
        assert!(matches!(p.validate(), Err(Error::SingularDamping)));
    }

    #[test]
    fn derived_is_pure() {
        let p = SystemParams {
            eta_eff: 123.456,
            gamma_sm: 17.0,
            ..paper()
        };
        let a = p.derived().unwrap();
        let b = p.derived().unwrap();
        assert_eq!(a.b_shift.to_bits(), b.b_shift.to_bits());
        assert_eq!(a.c_gain.to_bits(), b.c_gain.to_bits());
    }

    #[test]
    fn c_gain_is_quadratic_in_eta_eff() {
        for eta_eff in [1.0, 3.3, 6535.0, 1.234e7] {
            let p = SystemParams {
                eta_eff,
                ..paper()
            };
            let doubled = SystemParams {
                eta_eff: 2.0 * eta_eff,
                ..p
            };
            assert_eq!(
                doubled.derived().unwrap().c_gain,
                4.0 * p.derived().unwrap().c_gain
            );
        }
    }

    #[test]
    fn preset_round_trips_through_display_form() {
        let p = paper();
        for v in [p.kappa, p.delta, p.omega_m, p.omega_r, p.xi, p.xi_sm, p.eta] {
            let shown = Quantity::display_two_pi(v);
            let back = shown.rad_per_s();
            assert!((back - v).abs() <= 1e-12 * v.abs(), "{v} -> {shown:?} -> {back}");
        }
        let kappa = Quantity::display_two_pi(p.kappa);
        assert_eq!(kappa.unit, Unit::TwoPiKHz);
        assert!((kappa.value - 1.3).abs() < 1e-12);
    }

    #[test]
    fn unknown_preset_is_named() {
        let err = preset("nope").unwrap_err();
        assert!(err.to_string().contains("nope"));
    }

    #[test]
    fn config_with_units_and_preset_override() {
        let text = r#"{
            "preset": "paper-2015",
            "eta": {"value": 2.0, "unit": "2pi*kHz"},
            "gamma_m": 10.0,
            "sign_convention": "dynamics"
        }"#;
        let p = params_from_json(text).unwrap();
        assert!((p.eta - 2.0 * TAU * 1e3).abs() < 1e-9);
        assert_eq!(p.gamma_m, 10.0);
        assert_eq!(p.kappa, paper().kappa);
        assert_eq!(p.sign_convention, SignConvention::Dynamics);
    }

    #[test]
    fn config_without_preset_needs_all_fields() {
        let err = params_from_json(r#"{"eta": 1.0}"#).unwrap_err();
        assert!(err.to_string().contains("missing"), "{err}");
        let full = r#"{"eta": 5, "kappa": 1, "delta": 10, "omega_m": 1,
                       "omega_r": 0.25, "xi": 0.5, "xi_sm": 0.5}"#;
        let p = params_from_json(full).unwrap();
        assert_eq!(p.eta_eff, 0.0);
        assert_eq!(p.sign_convention, SignConvention::Steady);
    }

    #[test]
    fn config_rejects_unknown_keys_and_units() {
        assert!(params_from_json(r#"{"preset": "paper-2015", "foo": 1}"#).is_err());
        let err = params_from_json(r#"{"preset": "paper-2015", "eta": {"value": 1, "unit": "GHz"}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("eta"));
        let err = params_from_json(r#"{"preset": "paper-2015", "kappa": -1}"#).unwrap_err();
        assert!(err.to_string().contains("kappa"));
    }
}
