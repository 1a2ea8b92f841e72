//! Command-line front end: parameter resolution, run manifests and CSV
//! output.
//!
//! Every run writes `manifest.json` into the output directory. The manifest
//! holds the resolved parameters and all command options, so `replay
//! --manifest` regenerates the same files byte for byte.

pub mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate_adiabatic, integrate_full, AdiabaticOptions, FullState, MechState, Model, Trajectory};
use crate::error::{Error, Result};
use crate::numerics::ode::{Method, StepSettings};
use crate::params::{self, Axis, DerivedCoefficients, Quantity, SignConvention, SystemParams, Unit};
use crate::potential::{self, PotentialOptions};
use crate::steady_state::{self, AxisGrid, SteadyBranch, SweepResult};
use output::{fmt_f64, sha256_hex, write_csv};

pub const TOOL: &str = "optomech";

#[derive(Parser, Debug)]
#[command(name = "optomech", version, about = "Steady states, dynamics and effective potentials of a BEC-loaded optomechanical cavity")]
pub struct Cli {
    /// Built-in parameter set (default paper-2015 when no --config is given).
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// JSON parameter file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Worker threads for sweeps and grids.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Relative residual tolerance of the cubic solver.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    /// Overrides the parameter set's sign convention (steady | dynamics).
    /// Time-domain runs use `dynamics` unless this is given.
    #[arg(long, global = true)]
    pub sign_convention: Option<SignConvention>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    #[command(flatten)]
    Run(RunCommand),
    /// List built-in parameter sets.
    Presets,
    /// Re-run the command recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "options", rename_all = "kebab-case")]
pub enum RunCommand {
    /// Steady-state branches at one parameter point.
    Steady(SteadyOptions),
    /// Branches along a 1D or 2D grid, with hysteresis traces.
    Sweep(SweepOptions),
    /// Time evolution from a given start.
    Dynamics(DynamicsOptions),
    /// Potential surface, critical points and the photon-number potential.
    Potential(PotentialCmdOptions),
    /// Critical points of the potential only.
    CriticalPoints(PotentialCmdOptions),
}

/// Drive and detuning overrides, as multiples of kappa.
#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    #[arg(long)]
    pub eta_over_kappa: Option<f64>,
    #[arg(long)]
    pub eta_eff_over_kappa: Option<f64>,
    #[arg(long)]
    pub delta_over_kappa: Option<f64>,
}

impl Overrides {
    fn apply(&self, p: &SystemParams) -> SystemParams {
        let mut p = *p;
        for (axis, v) in [
            (Axis::Eta, self.eta_over_kappa),
            (Axis::EtaEff, self.eta_eff_over_kappa),
            (Axis::Delta, self.delta_over_kappa),
        ] {
            if let Some(r) = v {
                p = p.with_ratio(axis, r);
            }
        }
        p
    }
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SteadyOptions {
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Swept parameter: eta, eta-eff or delta.
    #[arg(long, default_value = "eta")]
    pub axis: Axis,
    /// First grid value (multiple of kappa); `from > to` sweeps downward.
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Logarithmic spacing.
    #[arg(long)]
    pub log: bool,
    /// Optional second axis for a 2D sweep.
    #[arg(long)]
    pub axis2: Option<Axis>,
    #[arg(long)]
    pub from2: Option<f64>,
    #[arg(long)]
    pub to2: Option<f64>,
    #[arg(long)]
    pub points2: Option<usize>,
    #[arg(long)]
    pub eta_over_kappa: Option<f64>,
    /// One sweep per listed value, e.g. `0,200,400`.
    #[arg(long, value_delimiter = ',')]
    pub eta_eff_over_kappa: Vec<f64>,
    #[arg(long)]
    pub delta_over_kappa: Option<f64>,
}

#[allow(non_snake_case)]
#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsOptions {
    /// Pump, multiple of kappa (default 18.4 x 2pi MHz).
    #[arg(long)]
    pub eta_over_kappa: Option<f64>,
    #[arg(long)]
    pub eta_eff_over_kappa: Option<f64>,
    /// Detuning, multiple of kappa (default 0.52 x 2pi MHz).
    #[arg(long)]
    pub delta_over_kappa: Option<f64>,
    /// adiabatic (4D) or full (6D).
    #[arg(long, default_value = "adiabatic")]
    pub model: Model,
    /// rk4 or rk45.
    #[arg(long, default_value = "rk4")]
    pub method: Method,
    /// End time in units of omega_m t.
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    /// Step in units of omega_m t (default 2pi/1000).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Sample spacing in units of omega_m t (default 2pi/50).
    #[arg(long)]
    pub stride: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    #[arg(long = "q0", default_value_t = 0.0)]
    pub q0: f64,
    #[arg(long = "q-dot0", default_value_t = 0.0)]
    pub q_dot0: f64,
    #[arg(long = "Q0", default_value_t = 0.0)]
    pub Q0: f64,
    #[arg(long = "Q-dot0", default_value_t = 0.0)]
    pub Q_dot0: f64,
    /// Pin the condensate at Q0 (adiabatic model only).
    #[arg(long)]
    pub freeze_bec: bool,
}

#[allow(non_snake_case)]
#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialCmdOptions {
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long, default_value_t = -1e-4, allow_hyphen_values = true)]
    pub q_min: f64,
    #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
    pub q_max: f64,
    #[arg(long = "Q-min", default_value_t = -1.0, allow_hyphen_values = true)]
    pub Q_min: f64,
    #[arg(long = "Q-max", default_value_t = 0.1, allow_hyphen_values = true)]
    pub Q_max: f64,
    #[arg(long, default_value_t = 101)]
    pub nq: usize,
    #[arg(long = "nQ", default_value_t = 101)]
    pub nQ: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
    /// Newton tolerance on the scaled force residual.
    #[arg(long, default_value_t = 1e-13)]
    pub newton_tol: f64,
    /// Report the potential with the printed (negated) signs.
    #[arg(long)]
    pub paper_literal_signs: bool,
    /// Upper photon number of the V_s table (default 1.5 x largest steady state).
    #[arg(long)]
    pub n_max: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub run: RunCommand,
    pub tol: f64,
    /// `preset:<name>` or `config`.
    pub params_source: String,
    /// Hash of the config file contents, when one was used.
    pub input_sha256: Option<String>,
    pub base_params: SystemParams,
    pub effective_params: SystemParams,
    pub derived: DerivedCoefficients,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Exit status for an error: 3 for numerical failures, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = cli.jobs {
            if j == 0 {
                return Err(Error::Config("--jobs must be at least 1".into()));
            }
            b = b.num_threads(j);
        }
        b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?
    };
    match &cli.command {
        Command::Presets => {
            print!("{}", presets_listing()?);
            Ok(())
        }
        Command::Replay { manifest } => {
            let text = fs::read_to_string(manifest)?;
            let m: Manifest = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("invalid manifest: {e}")))?;
            if m.tool != TOOL {
                return Err(Error::Config(format!("manifest was written by `{}`", m.tool)));
            }
            pool.install(|| execute(&m, &cli.out_dir))
        }
        Command::Run(cmd) => {
            let m = build_manifest(&cli, cmd)?;
            pool.install(|| execute(&m, &cli.out_dir))
        }
    }
}

fn presets_listing() -> Result<String> {
    let mut s = String::new();
    for name in params::preset_names() {
        let p = params::preset(name)?;
        s.push_str(&format!("{name}\n"));
        let v = serde_json::to_value(p.params).expect("params serialize");
        if let serde_json::Value::Object(map) = v {
            for (k, val) in map {
                match val.as_f64() {
                    Some(x) => {
                        let d = Quantity::display_two_pi(x);
                        let unit = serde_json::to_value(d.unit).expect("unit serializes");
                        s.push_str(&format!(
                            "  {k:<16} {:>24} rad/s  ({} x {})\n",
                            fmt_f64(x),
                            fmt_f64(d.value),
                            unit.as_str().unwrap_or("")
                        ));
                    }
                    None => s.push_str(&format!("  {k:<16} {val}\n")),
                }
            }
        }
        for note in &p.inputs.notes {
            s.push_str(&format!("  note: {note}\n"));
        }
    }
    Ok(s)
}

fn resolve_params(cli: &Cli) -> Result<(String, Option<String>, SystemParams)> {
    let (source, hash, mut p) = match (&cli.preset, &cli.config) {
        (Some(_), Some(_)) => {
            return Err(Error::Config("give either --preset or --config, not both".into()))
        }
        (_, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            let p = params::params_from_json(&text)?;
            ("config".to_string(), Some(sha256_hex(text.as_bytes())), p)
        }
        (name, None) => {
            let name = name.as_deref().unwrap_or(params::PAPER_PRESET);
            let preset = params::preset(name)?;
            (format!("preset:{name}"), None, preset.params)
        }
    };
    if let Some(c) = cli.sign_convention {
        p.sign_convention = c;
    }
    p.validate()?;
    Ok((source, hash, p))
}

fn build_manifest(cli: &Cli, cmd: &RunCommand) -> Result<Manifest> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Error::Config(format!("--tol must be positive, got {}", cli.tol)));
    }
    let (params_source, input_sha256, base) = resolve_params(cli)?;
    let mut effective = effective_params(cmd, &base);
    if matches!(cmd, RunCommand::Dynamics(_)) && cli.sign_convention.is_none() {
        effective.sign_convention = SignConvention::Dynamics;
    }
    effective.validate()?;
    Ok(Manifest {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        run: cmd.clone(),
        tol: cli.tol,
        params_source,
        input_sha256,
        base_params: base,
        effective_params: effective,
        derived: effective.derived()?,
    })
}

/// Pump of the time-domain runs, 18.4 x 2pi MHz.
pub fn dynamics_default_eta() -> f64 {
    Quantity::new(18.4, Unit::TwoPiMHz).rad_per_s()
}

/// Detuning of the time-domain runs, 0.52 x 2pi MHz.
pub fn dynamics_default_delta() -> f64 {
    Quantity::new(0.52, Unit::TwoPiMHz).rad_per_s()
}

fn effective_params(cmd: &RunCommand, base: &SystemParams) -> SystemParams {
    match cmd {
        RunCommand::Steady(o) => o.overrides.apply(base),
        RunCommand::Sweep(o) => Overrides {
            eta_over_kappa: o.eta_over_kappa,
            eta_eff_over_kappa: None,
            delta_over_kappa: o.delta_over_kappa,
        }
        .apply(base),
        RunCommand::Dynamics(o) => {
            let mut p = *base;
            p.eta = dynamics_default_eta();
            p.delta = dynamics_default_delta();
            Overrides {
                eta_over_kappa: o.eta_over_kappa,
                eta_eff_over_kappa: o.eta_eff_over_kappa,
                delta_over_kappa: o.delta_over_kappa,
            }
            .apply(&p)
        }
        RunCommand::Potential(o) | RunCommand::CriticalPoints(o) => o.overrides.apply(base),
    }
}

/// Runs the manifest's command and writes its outputs plus `manifest.json`.
pub fn execute(m: &Manifest, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let json = m.to_json();
    let hash = sha256_hex(json.as_bytes());
    match &m.run {
        RunCommand::Steady(_) => cmd_steady(m, out_dir, &hash)?,
        RunCommand::Sweep(o) => cmd_sweep(m, o, out_dir, &hash)?,
        RunCommand::Dynamics(o) => cmd_dynamics(m, o, out_dir, &hash)?,
        RunCommand::Potential(o) => cmd_potential(m, o, out_dir, &hash, true)?,
        RunCommand::CriticalPoints(o) => cmd_potential(m, o, out_dir, &hash, false)?,
    }
    fs::write(out_dir.join("manifest.json"), json)?;
    Ok(())
}

const BRANCH_HEADER: [&str; 10] = [
    "eta_over_kappa",
    "eta_eff_over_kappa",
    "delta_over_kappa",
    "branch",
    "n_s",
    "q_s",
    "Q_s",
    "P_s",
    "stability",
    "residual",
];

fn ratios(p: &SystemParams) -> [f64; 3] {
    [p.eta / p.kappa, p.eta_eff / p.kappa, p.delta / p.kappa]
}

fn branch_rows(r: [f64; 3], outcome: &std::result::Result<Vec<SteadyBranch>, String>, rows: &mut Vec<Vec<String>>) {
    let lead = r.iter().map(|x| fmt_f64(*x));
    match outcome {
        Ok(branches) => {
            for (i, b) in branches.iter().enumerate() {
                let mut row: Vec<String> = lead.clone().collect();
                row.push(i.to_string());
                row.extend([b.n_s, b.q_s, b.Q_s, b.P_s].map(fmt_f64));
                row.push(b.stability.as_str().to_string());
                row.push(fmt_f64(b.residual));
                rows.push(row);
            }
        }
        Err(msg) => {
            eprintln!("warning: point {:?} failed: {msg}", r);
            let mut row: Vec<String> = lead.collect();
            row.extend(std::iter::repeat_n(String::new(), 5));
            row.push("error".into());
            row.push(String::new());
            rows.push(row);
        }
    }
}

fn cmd_steady(m: &Manifest, out: &Path, hash: &str) -> Result<()> {
    let p = m.effective_params;
    let branches = steady_state::steady_state_at(&p, m.tol)?;
    let mut rows = Vec::new();
    branch_rows(ratios(&p), &Ok(branches), &mut rows);
    write_csv(&out.join("steady_branches.csv"), hash, &BRANCH_HEADER, &rows)
}

fn grid(axis: Axis, from: f64, to: f64, points: usize, log: bool) -> Result<AxisGrid> {
    if log {
        if !(from > 0.0 && to > 0.0) {
            return Err(Error::InvalidGrid("log grid needs positive end points".into()));
        }
        let g = AxisGrid::linspace(axis, from.ln(), to.ln(), points);
        let n = g.ratios.len();
        let ratios = g
            .ratios
            .iter()
            .enumerate()
            .map(|(i, x)| if i == 0 { from } else if i + 1 == n { to } else { x.exp() })
            .collect();
        Ok(AxisGrid::new(axis, ratios))
    } else {
        Ok(AxisGrid::linspace(axis, from, to, points))
    }
}

fn cmd_sweep(m: &Manifest, o: &SweepOptions, out: &Path, hash: &str) -> Result<()> {
    let base = m.effective_params;
    let first = grid(o.axis, o.from, o.to, o.points, o.log)?;
    let second = match o.axis2 {
        None => None,
        Some(axis) => {
            let (Some(from), Some(to)) = (o.from2, o.to2) else {
                return Err(Error::Config("--axis2 needs --from2 and --to2".into()));
            };
            Some(grid(axis, from, to, o.points2.unwrap_or(o.points), o.log)?)
        }
    };
    let swept_eta_eff = o.axis == Axis::EtaEff || o.axis2 == Some(Axis::EtaEff);
    if swept_eta_eff && !o.eta_eff_over_kappa.is_empty() {
        return Err(Error::Config(
            "--eta-eff-over-kappa cannot be combined with an eta-eff axis".into(),
        ));
    }
    let families: Vec<Option<f64>> = if o.eta_eff_over_kappa.is_empty() {
        vec![None]
    } else {
        o.eta_eff_over_kappa.iter().map(|x| Some(*x)).collect()
    };

    let mut branch_out = Vec::new();
    let mut trace_out = Vec::new();
    let mut window_out = Vec::new();
    for fam in families {
        let p = match fam {
            Some(r) => base.with_ratio(Axis::EtaEff, r),
            None => base,
        };
        let result: SweepResult = match &second {
            None => steady_state::sweep_1d(&p, &first, m.tol)?,
            Some(g2) => steady_state::sweep_2d(&p, &first, g2, m.tol)?,
        };
        for pt in &result.points {
            let mut r = ratios(&p);
            for (g, c) in result.axes.iter().zip(&pt.coords) {
                r[axis_index(g.axis)] = *c;
            }
            branch_rows(r, &pt.branches, &mut branch_out);
        }
        let family = fmt_f64(p.eta_eff / p.kappa);
        for trace in [&result.up, &result.down].into_iter().flatten() {
            for t in trace {
                trace_out.push(vec![
                    family.clone(),
                    fmt_f64(t.ratio),
                    fmt_f64(t.n_s),
                    t.direction.as_str().to_string(),
                ]);
            }
        }
        if second.is_none() && o.axis == Axis::Eta {
            let w = steady_state::bistable_window(&p, m.tol)?;
            window_out.push(match w {
                Some(w) => vec![family, fmt_f64(w.lower), fmt_f64(w.upper), fmt_f64(w.width())],
                None => vec![family, String::new(), String::new(), "0".into()],
            });
        }
    }
    write_csv(&out.join("sweep_branches.csv"), hash, &BRANCH_HEADER, &branch_out)?;
    if second.is_none() {
        let axis_col = format!("{}_over_kappa", o.axis.name());
        write_csv(
            &out.join("sweep_hysteresis.csv"),
            hash,
            &["eta_eff_over_kappa", &axis_col, "n_s", "direction"],
            &trace_out,
        )?;
    }
    if !window_out.is_empty() {
        write_csv(
            &out.join("saturation_windows.csv"),
            hash,
            &["eta_eff_over_kappa", "eta_lower_over_kappa", "eta_upper_over_kappa", "width"],
            &window_out,
        )?;
    }
    Ok(())
}

fn axis_index(axis: Axis) -> usize {
    match axis {
        Axis::Eta => 0,
        Axis::EtaEff => 1,
        Axis::Delta => 2,
    }
}

fn cmd_dynamics(m: &Manifest, o: &DynamicsOptions, out: &Path, hash: &str) -> Result<()> {
    let p = m.effective_params;
    let defaults = StepSettings::default();
    let settings = StepSettings {
        method: o.method,
        dt: o.dt.unwrap_or(defaults.dt),
        stride: o.stride.unwrap_or(defaults.stride),
        rtol: o.rtol,
        atol: o.atol,
        max_steps: defaults.max_steps,
    };
    let traj: Trajectory = match o.model {
        Model::Adiabatic => integrate_adiabatic(
            MechState {
                q: o.q0,
                q_dot: o.q_dot0,
                Q: o.Q0,
                Q_dot: o.Q_dot0,
            },
            &p,
            o.t_end,
            &settings,
            AdiabaticOptions {
                freeze_bec: o.freeze_bec,
                forcing: None,
            },
        )?,
        Model::Full => {
            if o.freeze_bec {
                return Err(Error::Config("--freeze-bec applies to the adiabatic model only".into()));
            }
            // velocities map to momenta through q' = omega_m p, Q' = 4 omega_r P - gamma_sm Q
            let big = p.omega_bec();
            let start = FullState::with_adiabatic_field(
                &p,
                o.q_dot0 / p.omega_m,
                o.q0,
                (o.Q_dot0 + p.gamma_sm * o.Q0) / big,
                o.Q0,
            );
            integrate_full(start, &p, o.t_end, &settings, None)?
        }
    };
    let rows: Vec<Vec<String>> = traj
        .times
        .iter()
        .zip(&traj.mech)
        .zip(&traj.photon_number)
        .map(|((t, s), n)| [*t, s.q, s.q_dot, s.Q, s.Q_dot, *n].map(fmt_f64).to_vec())
        .collect();
    write_csv(
        &out.join("trajectory.csv"),
        hash,
        &["t", "q", "q_dot", "Q", "Q_dot", "photon_number"],
        &rows,
    )?;
    let sidecar = serde_json::json!({
        "manifest_sha256": hash,
        "model": traj.model,
        "integrator": traj.method.name(),
        "dt": settings.dt,
        "stride": settings.stride,
        "step": traj.step,
        "steps": traj.steps,
        "samples": traj.times.len(),
        "max_abs_q": traj.max_abs_q(),
        "max_abs_Q": traj.max_abs_Q(),
    });
    let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    text.push('\n');
    fs::write(out.join("trajectory.json"), text)?;
    Ok(())
}

fn cmd_potential(m: &Manifest, o: &PotentialCmdOptions, out: &Path, hash: &str, full: bool) -> Result<()> {
    let p = m.effective_params;
    if !(o.quad_tol > 0.0 && o.newton_tol > 0.0) {
        return Err(Error::Config("tolerances must be positive".into()));
    }
    let opts = PotentialOptions {
        quad_tol: o.quad_tol,
        paper_literal_signs: o.paper_literal_signs,
    };
    let g = potential::potential_grid(&p, (o.q_min, o.q_max), (o.Q_min, o.Q_max), (o.nq, o.nQ), m.tol, &opts)?;
    if g.widened {
        eprintln!("note: ranges widened to contain every steady state");
    }
    let crit = potential::find_critical_points(&g, &p, o.newton_tol)?;
    let rows: Vec<Vec<String>> = crit
        .iter()
        .map(|c| {
            vec![
                fmt_f64(c.q),
                fmt_f64(c.Q),
                fmt_f64(c.value),
                c.kind.as_str().to_string(),
                fmt_f64(c.hessian_eigenvalues[0]),
                fmt_f64(c.hessian_eigenvalues[1]),
            ]
        })
        .collect();
    write_csv(
        &out.join("critical_points.csv"),
        hash,
        &["q", "Q", "V", "class", "hess_eig1", "hess_eig2"],
        &rows,
    )?;
    if !full {
        return Ok(());
    }
    let mut rows = Vec::with_capacity(g.values.len());
    for (i, q) in g.q.iter().enumerate() {
        for (j, bq) in g.big_q.iter().enumerate() {
            rows.push(vec![fmt_f64(*q), fmt_f64(*bq), fmt_f64(g.value(i, j))]);
        }
    }
    write_csv(&out.join("potential_grid.csv"), hash, &["q", "Q", "V"], &rows)?;

    let n_max = match o.n_max {
        Some(n) => n,
        None => {
            let top = steady_state::steady_state_at(&p, m.tol)?
                .last()
                .map_or(0.0, |b| b.n_s);
            if top > 0.0 {
                1.5 * top
            } else {
                1.0
            }
        }
    };
    if o.n_points < 2 {
        return Err(Error::InvalidGrid("--n-points must be at least 2".into()));
    }
    let ns: Vec<f64> = (0..o.n_points)
        .map(|i| n_max * i as f64 / (o.n_points - 1) as f64)
        .collect();
    let vs = potential::v_s_of_n(&p, &ns, o.quad_tol)?;
    let rows: Vec<Vec<String>> = vs
        .iter()
        .map(|v| vec![fmt_f64(v.n), fmt_f64(v.v_s), fmt_f64(v.error)])
        .collect();
    write_csv(&out.join("potential_vs.csv"), hash, &["n", "V_s", "err_bound"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn manifest_round_trips() {
        let cli = Cli::try_parse_from(["optomech", "steady", "--eta-over-kappa", "10"]).unwrap();
        let Command::Run(cmd) = &cli.command else { panic!() };
        let m = build_manifest(&cli, cmd).unwrap();
        assert_eq!(m.params_source, "preset:paper-2015");
        let back: Manifest = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), m.to_json());
    }

    #[test]
    fn dynamics_defaults() {
        let cli = Cli::try_parse_from(["optomech", "dynamics"]).unwrap();
        let Command::Run(cmd) = &cli.command else { panic!() };
        let m = build_manifest(&cli, cmd).unwrap();
        assert!((m.effective_params.eta - 18.4 * TAU * 1e6).abs() < 1e-6);
        assert!((m.effective_params.delta - 0.52 * TAU * 1e6).abs() < 1e-9);
    }

    #[test]
    fn both_sources_rejected() {
        let cli = Cli::try_parse_from(["optomech", "--preset", "paper-2015", "--config", "x.json", "steady"]).unwrap();
        let Command::Run(cmd) = &cli.command else { panic!() };
        let e = build_manifest(&cli, cmd).unwrap_err();
        assert_eq!(exit_code(&e), 2);
    }
}
