//! Command-line front end. Each subcommand resolves its configuration from
//! defaults, an optional JSON file and command-line flags (flags win), then
//! writes CSV or JSON with the resolved configuration embedded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::cpcheck;
use crate::decoherence::{integrate_master_equation, semigroup_matrix, EvolutionParams, Sample, Trajectory};
use crate::error::Error;
use crate::linalg::{c, MatrixJson};
use crate::output::{Cell, Table};
use crate::pairspace::PairBasis;
use crate::qnd::{curve_table, step_cutoff_exploration, theta_grid, Cutoff, SpectralModel};
use crate::scattering::{trajectory as scatter_trajectory, CollisionConfig, Spin, Statistics, TauModel};
use crate::states::{witness_state, random_density, DensityJson, DensityOperator, RandomKind, StateSampler};
use crate::symmap::{entropy_trajectory, extended_trajectory, BuiltinSchedule, MapReport, Schedule};
use crate::verify::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Environment variable capping the worker count of parallel subcommands.
pub const THREADS_ENV: &str = "SYMFLOW_THREADS";

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "symflow", version, about = "Environment-induced symmetrization of two identical particles")]
struct Cli {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the seeded invariant suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Apply the semigroup channel over a grid of tau.
    EvolveSemigroup(SemigroupArgs),
    /// Integrate the exchange master equation with RK4.
    EvolveMaster(MasterArgs),
    /// Tabulate the QND decoherence exponent.
    Qnd(QndArgs),
    /// Evolve a state under a symmetrization schedule.
    Symmap(SymmapArgs),
    /// Collision probabilities with and without the environment.
    Scatter(ScatterArgs),
    /// Positive-but-not-two-positive certificate, or a scan of it.
    Cpcheck(CpcheckArgs),
    /// Run one CSV-producing subcommand over a list of parameter values.
    Sweep(SweepArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::EvolveSemigroup(_) => "evolve-semigroup",
            Command::EvolveMaster(_) => "evolve-master",
            Command::Qnd(_) => "qnd",
            Command::Symmap(_) => "symmap",
            Command::Scatter(_) => "scatter",
            Command::Cpcheck(_) => "cpcheck",
            Command::Sweep(_) => "sweep",
        }
    }

    fn overrides(&self) -> Vec<(&'static str, Value)> {
        match self {
            Command::Verify(a) => a.overrides(),
            Command::EvolveSemigroup(a) => a.overrides(),
            Command::EvolveMaster(a) => a.overrides(),
            Command::Qnd(a) => a.overrides(),
            Command::Symmap(a) => a.overrides(),
            Command::Scatter(a) => a.overrides(),
            Command::Cpcheck(a) => a.overrides(),
            Command::Sweep(a) => a.overrides(),
        }
    }
}

macro_rules! flags {
    ($self:ident; $($field:ident => $key:literal),* $(,)?) => {{
        let mut v: Vec<(&'static str, Value)> = Vec::new();
        $(
            if let Some(x) = &$self.$field {
                v.push(($key, serde_json::to_value(x).expect("flag values serialize")));
            }
        )*
        v
    }};
}

#[derive(Debug, Default, Args)]
struct VerifyArgs {
    #[arg(long, allow_negative_numbers = true)]
    d: Option<i64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl VerifyArgs {
    fn overrides(&self) -> Vec<(&'static str, Value)> {
        flags!(self; d => "d", seed => "seed")
    }
}

#[derive(Debug, Default, Args)]
struct StateArgs {
    #[arg(long, allow_negative_numbers = true)]
    d: Option<i64>,
    #[arg(long)]
    seed: Option<u64>,
    /// generic, state_symmetric, state_antisymmetric, perfectly_asymmetric or paos
    #[arg(long)]
    kind: Option<String>,
    /// Initial state as density JSON; replaces the random draw.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Product-basis elements to tabulate, as i,j pairs.
    #[arg(long = "element", value_parser = parse_pair)]
    elements: Option<Vec<[usize; 2]>>,
}

fn parse_pair(s: &str) -> std::result::Result<[usize; 2], String> {
    let (i, j) = s.split_once(',').ok_or_else(|| format!("expected i,j, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok([p(i)?, p(j)?])
}

fn parse_complex(s: &str) -> std::result::Result<[f64; 2], String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok([p(re)?, p(im)?])
}

impl StateArgs {
    fn overrides(&self) -> Vec<(&'static str, Value)> {
        flags!(self; d => "d", seed => "seed", kind => "kind", state => "state", elements => "elements")
    }
}

#[derive(Debug, Default, Args)]
struct SemigroupArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

impl SemigroupArgs {
    fn overrides(&self) -> Vec<(&'static str, Value)> {
        let mut v = self.state.overrides();
        v.extend(flags!(self; tau_max => "tau_max", samples => "samples"));
        v
    }
}

#[derive(Debug, Default, Args)]
struct MasterArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    sample_every: Option<usize>,
    /// Two-particle Hamiltonian as matrix JSON.
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
}

impl MasterArgs {
    fn overrides(&self) -> Vec<(&'static str, Value)> {
        let mut v = self.state.overrides();
        v.extend(flags!(self; gamma => "gamma", dt => "dt", t_max => "t_max",
            sample_every => "sample_every", hamiltonian => "hamiltonian"));
        v
    }
}

#[derive(Debug, Default, Args)]
struct QndArgs {
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    theta_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// exponential or step
    #[arg(long)]
    cutoff: Option<String>,
}

impl QndArgs {
    fn overrides(&self) -> Vec<(&'static str, Value)> {
        flags!(self; g => "g", b => "b", theta_max => "theta_max", samples => "samples", cutoff => "cutoff")
    }
}

#[derive(Debug, Default, Args)]
struct SymmapArgs {
    #[arg(long, allow_negative_numbers = true)]
    d: Option<i64>,
    #[arg(long)]
    seed: Option<u64>,
    /// paos_equal_purity, paos, perfectly_asymmetric, generic, state_symmetric,
    /// state_antisymmetric or witness
    #[arg(long)]
    input: Option<String>,
    /// to_antisymmetric, to_symmetric, identity or perpendicular
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Use the trace-preserving extension valid for any input with |m| <= 1/2.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    extended: Option<bool>,
}

impl SymmapArgs {
    fn overrides(&self) -> Vec<(&'static str, Value)> {
        flags!(self; d => "d", seed => "seed", input => "input", schedule => "schedule", kappa => "kappa",
            t_max => "t_max", samples => "samples", extended => "extended")
    }
}

#[derive(Debug, Default, Args)]
struct ScatterArgs {
    #[arg(long)]
    spin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<i32>,
    /// F(n) as re,im
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    f_n: Option<[f64; 2]>,
    /// F(-n) as re,im
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    f_minus_n: Option<[f64; 2]>,
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Linear decoherence time, tau = rate * t.
    #[arg(long)]
    tau_rate: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

impl ScatterArgs {
    fn overrides(&self) -> Vec<(&'static str, Value)> {
        let mut v = flags!(self; spin => "spin_s", epsilon => "epsilon", f_n => "f_n", f_minus_n => "f_minus_n",
            schedule => "schedule", kappa => "kappa", t_max => "t_max", samples => "samples");
        if let Some(rate) = self.tau_rate {
            v.push(("tau", serde_json::json!({"kind": "linear", "rate": rate})));
        }
        v
    }
}

#[derive(Debug, Default, Args)]
struct CpcheckArgs {
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    /// Scan a grid instead of certifying one point.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    scan: Option<bool>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    delta_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    m_grid: Option<Vec<f64>>,
}

impl CpcheckArgs {
    fn overrides(&self) -> Vec<(&'static str, Value)> {
        flags!(self; delta => "delta", m => "m", scan => "scan", delta_grid => "delta_grid", m_grid => "m_grid")
    }
}

#[derive(Debug, Default, Args)]
struct SweepArgs {
    /// evolve-semigroup, evolve-master, qnd, symmap, scatter or cpcheck
    #[arg(long)]
    target: Option<String>,
    /// Name of the target configuration key to vary.
    #[arg(long)]
    param: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
}

impl SweepArgs {
    fn overrides(&self) -> Vec<(&'static str, Value)> {
        flags!(self; target => "target", param => "param", values => "values")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub d: i64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { d: 2, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemigroupConfig {
    pub d: i64,
    pub seed: u64,
    pub kind: RandomKind,
    pub state: Option<PathBuf>,
    pub elements: Vec<[usize; 2]>,
    pub tau_max: f64,
    pub samples: usize,
}

impl Default for SemigroupConfig {
    fn default() -> Self {
        Self {
            d: 2,
            seed: 0,
            kind: RandomKind::Generic,
            state: None,
            elements: Vec::new(),
            tau_max: 3.0,
            samples: 31,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MasterConfig {
    pub d: i64,
    pub seed: u64,
    pub kind: RandomKind,
    pub state: Option<PathBuf>,
    pub elements: Vec<[usize; 2]>,
    pub gamma: f64,
    pub dt: f64,
    pub t_max: f64,
    pub sample_every: usize,
    pub hamiltonian: Option<PathBuf>,
}

impl Default for MasterConfig {
    fn default() -> Self {
        Self {
            d: 2,
            seed: 0,
            kind: RandomKind::Generic,
            state: None,
            elements: Vec::new(),
            gamma: 0.5,
            dt: 0.01,
            t_max: 2.0,
            sample_every: 10,
            hamiltonian: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QndConfig {
    pub g: f64,
    pub b: f64,
    pub theta_max: f64,
    pub samples: usize,
    pub cutoff: Cutoff,
}

impl Default for QndConfig {
    fn default() -> Self {
        Self {
            g: 1.0,
            b: 10.0,
            theta_max: 20.0,
            samples: 50,
            cutoff: Cutoff::Exponential,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapInput {
    PaosEqualPurity,
    Paos,
    PerfectlyAsymmetric,
    Generic,
    StateSymmetric,
    StateAntisymmetric,
    /// The 4×4 operator-symmetric, perfectly asymmetric witness state (`d = 2`).
    Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymmapConfig {
    pub d: i64,
    pub seed: u64,
    pub input: MapInput,
    pub schedule: BuiltinSchedule,
    pub kappa: f64,
    pub t_max: f64,
    pub samples: usize,
    pub extended: bool,
}

impl Default for SymmapConfig {
    fn default() -> Self {
        Self {
            d: 2,
            seed: 0,
            input: MapInput::PaosEqualPurity,
            schedule: BuiltinSchedule::ToAntisymmetric,
            kappa: 1.0,
            t_max: 8.0,
            samples: 33,
            extended: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatterConfig {
    pub spin_s: Spin,
    pub epsilon: Statistics,
    pub f_n: [f64; 2],
    pub f_minus_n: [f64; 2],
    pub schedule: BuiltinSchedule,
    pub kappa: f64,
    pub tau: TauModel,
    pub t_max: f64,
    pub samples: usize,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self {
            spin_s: Spin::new(0.5).expect("1/2 is a valid spin"),
            epsilon: Statistics::Boson,
            f_n: [0.6, 0.2],
            f_minus_n: [0.3, -0.4],
            schedule: BuiltinSchedule::ToSymmetric,
            kappa: 1.0,
            tau: TauModel::default(),
            t_max: 8.0,
            samples: 33,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CpcheckConfig {
    pub delta: f64,
    pub m: f64,
    pub scan: bool,
    pub delta_grid: Vec<f64>,
    pub m_grid: Vec<f64>,
}

impl Default for CpcheckConfig {
    fn default() -> Self {
        Self {
            delta: 0.4,
            m: -0.5,
            scan: false,
            delta_grid: (1..=9).map(|k| 0.05 * k as f64).collect(),
            m_grid: (0..=10).map(|k| -0.5 + 0.1 * k as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub target: String,
    pub param: String,
    pub values: Vec<f64>,
    /// Configuration of the target; `param` is overwritten per run.
    pub base: Map<String, Value>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            target: "qnd".into(),
            param: "b".into(),
            values: vec![5.0, 10.0, 20.0],
            base: Map::new(),
        }
    }
}

#[derive(Debug, Serialize)]
struct Provenance<'a> {
    subcommand: &'a str,
    version: &'a str,
    config: &'a Value,
    overrides: &'a [String],
}

struct Resolved<C> {
    config: C,
    value: Value,
    overrides: Vec<String>,
}

fn resolve<C: DeserializeOwned + Serialize>(
    file: Option<Map<String, Value>>,
    flags: Vec<(&'static str, Value)>,
) -> CliResult<Resolved<C>> {
    let mut obj = file.unwrap_or_default();
    let mut overrides = Vec::new();
    for (k, v) in flags {
        obj.insert(k.to_string(), v);
        overrides.push(k.to_string());
    }
    let config: C = serde_json::from_value(Value::Object(obj)).map_err(|e| invalid(format!("config: {e}")))?;
    let value = serde_json::to_value(&config).expect("configs serialize");
    Ok(Resolved {
        config,
        value,
        overrides,
    })
}

fn load_config_file(path: &Path) -> CliResult<(Option<String>, Map<String, Value>)> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(invalid("config must be a JSON object"));
    };
    let sub = match map.remove("subcommand") {
        None => None,
        Some(Value::String(s)) => Some(s),
        Some(_) => return Err(invalid("config: `subcommand` must be a string")),
    };
    Ok((sub, map))
}

fn basis_from(d: i64) -> CliResult<PairBasis> {
    PairBasis::try_from_signed(d).map_err(|e| invalid(format!("invalid `d`: {e}")))
}

fn check_positive(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("invalid `{name}`: must be finite and > 0, got {v}")))
    }
}

fn check_samples(n: usize) -> CliResult<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(invalid(format!("invalid `samples`: need at least 2, got {n}")))
    }
}

fn linspace(max: f64, samples: usize) -> Vec<f64> {
    (0..samples).map(|k| max * k as f64 / (samples - 1) as f64).collect()
}

fn initial_state(
    basis: PairBasis,
    seed: u64,
    kind: RandomKind,
    state: &Option<PathBuf>,
) -> CliResult<DensityOperator> {
    let Some(path) = state else {
        return Ok(random_density(seed, basis, kind));
    };
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read state {}: {e}", path.display())))?;
    let json: DensityJson = serde_json::from_str(&text).map_err(|e| invalid(format!("state {}: {e}", path.display())))?;
    if json.d != basis.d() {
        return Err(invalid(format!("invalid `d`: state file has d = {}, config has d = {}", json.d, basis.d())));
    }
    Ok(DensityOperator::from_json(&json)?)
}

fn check_elements(basis: PairBasis, elements: &[[usize; 2]]) -> CliResult<Vec<(usize, usize)>> {
    elements
        .iter()
        .map(|&[i, j]| {
            if i < basis.dim() && j < basis.dim() {
                Ok((i, j))
            } else {
                Err(invalid(format!("invalid `elements`: ({i}, {j}) is outside 0..{}", basis.dim())))
            }
        })
        .collect()
}

pub fn semigroup_table(cfg: &SemigroupConfig) -> CliResult<Table> {
    let basis = basis_from(cfg.d)?;
    if !cfg.tau_max.is_finite() || cfg.tau_max < 0.0 {
        return Err(invalid(format!("invalid `tau_max`: must be finite and >= 0, got {}", cfg.tau_max)));
    }
    check_samples(cfg.samples)?;
    let elements = check_elements(basis, &cfg.elements)?;
    let rho = initial_state(basis, cfg.seed, cfg.kind, &cfg.state)?;
    let mut samples = Vec::with_capacity(cfg.samples);
    for tau in linspace(cfg.tau_max, cfg.samples) {
        let m = semigroup_matrix(basis, rho.matrix(), tau);
        let state = DensityOperator::new_unchecked(basis, m);
        samples.push(Sample {
            t: tau,
            trace: state.trace(),
            symmetricity: state.symmetricity()?,
            min_eigenvalue: state.min_eigenvalue(),
            hermiticity: state.matrix().hermiticity_deviation(),
            state,
        });
    }
    let mut table = Trajectory { samples }.to_table(&elements);
    table.columns[0] = "tau".into();
    Ok(table)
}

pub fn master_table(cfg: &MasterConfig) -> CliResult<Table> {
    let basis = basis_from(cfg.d)?;
    let elements = check_elements(basis, &cfg.elements)?;
    let rho = initial_state(basis, cfg.seed, cfg.kind, &cfg.state)?;
    let mut params = EvolutionParams::new(cfg.gamma, cfg.dt, cfg.t_max).with_sample_every(cfg.sample_every);
    if let Some(path) = &cfg.hamiltonian {
        let text = fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read hamiltonian {}: {e}", path.display())))?;
        let json: MatrixJson =
            serde_json::from_str(&text).map_err(|e| invalid(format!("hamiltonian {}: {e}", path.display())))?;
        if json.d != basis.d() {
            return Err(invalid(format!("invalid `hamiltonian`: d = {} but config has d = {}", json.d, basis.d())));
        }
        params = params.with_hamiltonian(&json.to_matrix()?);
    }
    let traj = integrate_master_equation(&rho, &params)?;
    Ok(traj.to_table(&elements))
}

pub fn qnd_table(cfg: &QndConfig) -> CliResult<Table> {
    check_positive("theta_max", cfg.theta_max)?;
    if cfg.samples == 0 {
        return Err(invalid("invalid `samples`: must be >= 1"));
    }
    let model = SpectralModel::new(cfg.g, cfg.b, cfg.cutoff)?;
    let thetas = theta_grid(cfg.theta_max, cfg.samples);
    match cfg.cutoff {
        Cutoff::Exponential => Ok(curve_table(&model, &thetas)?),
        Cutoff::Step => {
            let mut table = Table::new(["theta", "I_step", "error_estimate"]);
            for theta in thetas {
                let ex = step_cutoff_exploration(&model, theta)?;
                for w in &ex.warnings {
                    eprintln!("warning: theta = {theta}: {w}");
                }
                table.push(vec![Cell::from(theta), ex.value.into(), ex.error.into()]);
            }
            Ok(table)
        }
    }
}

fn map_input(cfg: &SymmapConfig, basis: PairBasis) -> CliResult<DensityOperator> {
    let mut sampler = StateSampler::new(basis, cfg.seed);
    Ok(match cfg.input {
        MapInput::PaosEqualPurity => sampler.paos_equal_purity().0,
        MapInput::Paos => sampler.draw(RandomKind::Paos),
        MapInput::PerfectlyAsymmetric => sampler.draw(RandomKind::PerfectlyAsymmetric),
        MapInput::Generic => sampler.draw(RandomKind::Generic),
        MapInput::StateSymmetric => sampler.draw(RandomKind::StateSymmetric),
        MapInput::StateAntisymmetric => sampler.draw(RandomKind::StateAntisymmetric),
        MapInput::Witness => {
            if basis.d() != 2 {
                return Err(invalid("invalid `input`: the witness state needs d = 2"));
            }
            witness_state()
        }
    })
}

pub fn symmap_report(cfg: &SymmapConfig) -> CliResult<MapReport> {
    let basis = basis_from(cfg.d)?;
    if !cfg.t_max.is_finite() || cfg.t_max < 0.0 {
        return Err(invalid(format!("invalid `t_max`: must be finite and >= 0, got {}", cfg.t_max)));
    }
    check_samples(cfg.samples)?;
    let sched = Schedule::builtin(cfg.schedule, cfg.kappa)?;
    if let Err(e) = sched.check_constraints(&[]) {
        eprintln!("warning: schedule `{}`: {e}", cfg.schedule);
    }
    let sigma = map_input(cfg, basis)?;
    let times = linspace(cfg.t_max, cfg.samples);
    let report = if cfg.extended {
        extended_trajectory(&sigma, &sched, &times)?
    } else {
        entropy_trajectory(&sigma, &sched, &times)?
    };
    Ok(report)
}

fn symmap_table(cfg: &SymmapConfig) -> CliResult<Table> {
    let report = symmap_report(cfg)?;
    if !report.all_positive {
        return Err(CliError::Numerical("positivity certificate failed: mapped state has a negative eigenvalue".into()));
    }
    Ok(report.to_table())
}

pub fn scatter_table(cfg: &ScatterConfig) -> CliResult<Table> {
    check_samples(cfg.samples)?;
    if !cfg.t_max.is_finite() || cfg.t_max < 0.0 {
        return Err(invalid(format!("invalid `t_max`: must be finite and >= 0, got {}", cfg.t_max)));
    }
    let collision = CollisionConfig::new(
        cfg.spin_s,
        cfg.epsilon,
        c(cfg.f_n[0], cfg.f_n[1]),
        c(cfg.f_minus_n[0], cfg.f_minus_n[1]),
        Schedule::builtin(cfg.schedule, cfg.kappa)?,
        cfg.tau,
    )?;
    Ok(scatter_trajectory(&collision, &linspace(cfg.t_max, cfg.samples))?)
}

pub fn cpcheck_scan_table(cfg: &CpcheckConfig) -> CliResult<Table> {
    let cells = cpcheck::scan(&cfg.delta_grid, &cfg.m_grid)?;
    Ok(cpcheck::scan_table(&cells))
}

/// Reads `SYMFLOW_THREADS`; `None` leaves rayon's default.
fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(invalid(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
        },
    }
}

fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn target_table(target: &str, cfg: Value) -> CliResult<Table> {
    fn parse<C: DeserializeOwned>(v: Value) -> CliResult<C> {
        serde_json::from_value(v).map_err(|e| invalid(format!("sweep base: {e}")))
    }
    match target {
        "evolve-semigroup" => semigroup_table(&parse(cfg)?),
        "evolve-master" => master_table(&parse(cfg)?),
        "qnd" => qnd_table(&parse(cfg)?),
        "symmap" => symmap_table(&parse(cfg)?),
        "scatter" => scatter_table(&parse(cfg)?),
        "cpcheck" => cpcheck_scan_table(&parse(cfg)?),
        other => Err(invalid(format!(
            "invalid `target`: `{other}` is not one of evolve-semigroup, evolve-master, qnd, symmap, scatter, cpcheck"
        ))),
    }
}

fn number(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        Value::from(v as i64)
    } else {
        Value::from(v)
    }
}

/// Runs the target once per value in parallel and concatenates the tables
/// in value order, prefixing each row with the swept value.
pub fn sweep_table(cfg: &SweepConfig) -> CliResult<Table> {
    if cfg.values.is_empty() {
        return Err(invalid("invalid `values`: need at least one value"));
    }
    if cfg.param.is_empty() {
        return Err(invalid("invalid `param`: must name a key of the target configuration"));
    }
    let runs: Vec<CliResult<Table>> = with_pool(|| {
        cfg.values
            .par_iter()
            .map(|&v| {
                let mut base = cfg.base.clone();
                base.insert(cfg.param.clone(), number(v));
                target_table(&cfg.target, Value::Object(base))
            })
            .collect()
    })?;
    let mut merged: Option<Table> = None;
    for (run, &v) in runs.into_iter().zip(&cfg.values) {
        let t = run?;
        let mut columns = vec![format!("sweep_{}", cfg.param)];
        columns.extend(t.columns.iter().cloned());
        let mut prefixed = Table::new(columns);
        for row in t.rows {
            let mut r = vec![Cell::from(v)];
            r.extend(row);
            prefixed.push(r);
        }
        match &mut merged {
            None => merged = Some(prefixed),
            Some(m) => m.extend(prefixed),
        }
    }
    Ok(merged.expect("at least one value"))
}

enum Output {
    Csv(Table),
    Json(Value),
}

struct Outcome {
    output: Output,
    /// Reported after the output is written.
    failure: Option<CliError>,
}

impl Outcome {
    fn ok(output: Output) -> Self {
        Self { output, failure: None }
    }
}

fn execute(sub: &str, file: Option<Map<String, Value>>, flags: Vec<(&'static str, Value)>) -> CliResult<(Outcome, Value, Vec<String>)> {
    macro_rules! resolved {
        ($ty:ty) => {{
            let r: Resolved<$ty> = resolve(file, flags)?;
            (r.config, r.value, r.overrides)
        }};
    }
    let (outcome, value, overrides) = match sub {
        "verify" => {
            let (cfg, value, ov) = resolved!(VerifyConfig);
            let basis = basis_from(cfg.d)?;
            let report = run_suite(basis.d(), cfg.seed)?;
            for c in &report.checks {
                eprintln!(
                    "{} {:<32} residual {:.3e} (tol {:.0e})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.residual,
                    c.tolerance
                );
            }
            let failure = (!report.all_pass()).then(|| {
                let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
                CliError::Numerical(format!("invariant checks failed: {}", names.join(", ")))
            });
            let json = serde_json::to_value(&report).expect("report serializes");
            (Outcome { output: Output::Json(json), failure }, value, ov)
        }
        "evolve-semigroup" => {
            let (cfg, value, ov) = resolved!(SemigroupConfig);
            (Outcome::ok(Output::Csv(semigroup_table(&cfg)?)), value, ov)
        }
        "evolve-master" => {
            let (cfg, value, ov) = resolved!(MasterConfig);
            (Outcome::ok(Output::Csv(master_table(&cfg)?)), value, ov)
        }
        "qnd" => {
            let (cfg, value, ov) = resolved!(QndConfig);
            (Outcome::ok(Output::Csv(qnd_table(&cfg)?)), value, ov)
        }
        "symmap" => {
            let (cfg, value, ov) = resolved!(SymmapConfig);
            let report = symmap_report(&cfg)?;
            let failure = (!report.all_positive).then(|| {
                CliError::Numerical("positivity certificate failed: mapped state has a negative eigenvalue".into())
            });
            (Outcome { output: Output::Csv(report.to_table()), failure }, value, ov)
        }
        "scatter" => {
            let (cfg, value, ov) = resolved!(ScatterConfig);
            (Outcome::ok(Output::Csv(scatter_table(&cfg)?)), value, ov)
        }
        "cpcheck" => {
            let (cfg, value, ov) = resolved!(CpcheckConfig);
            let out = if cfg.scan {
                Output::Csv(with_pool(|| cpcheck_scan_table(&cfg))??)
            } else {
                let cert = cpcheck::certify(&cpcheck::build_witness(cfg.delta, cfg.m)?)?;
                Output::Json(serde_json::to_value(&cert).expect("certificate serializes"))
            };
            (Outcome::ok(out), value, ov)
        }
        "sweep" => {
            let (cfg, value, ov) = resolved!(SweepConfig);
            (Outcome::ok(Output::Csv(sweep_table(&cfg)?)), value, ov)
        }
        other => return Err(invalid(format!("unknown subcommand `{other}`"))),
    };
    Ok((outcome, value, overrides))
}

fn write_output(out: &Option<PathBuf>, output: &Output, prov: &Provenance) -> CliResult<()> {
    let bytes = match output {
        Output::Csv(table) => table.to_csv_string(Some(prov)).into_bytes(),
        Output::Json(value) => {
            let mut value = value.clone();
            if let Value::Object(map) = &mut value {
                map.insert("provenance".into(), serde_json::to_value(prov).expect("provenance serializes"));
            }
            let mut s = serde_json::to_string_pretty(&value).expect("json serializes");
            s.push('\n');
            s.into_bytes()
        }
    };
    match out {
        Some(path) if path.as_os_str() != "-" => fs::write(path, bytes)
            .map_err(|e| invalid(format!("cannot write {}: {e}", path.display()))),
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn run_parsed(cli: Cli) -> CliResult<()> {
    let (file_sub, file) = match &cli.config {
        Some(path) => {
            let (sub, map) = load_config_file(path)?;
            (sub, Some(map))
        }
        None => (None, None),
    };
    let (sub, flags) = match (&cli.command, &file_sub) {
        (Some(cmd), Some(fs)) if fs != cmd.name() => {
            return Err(invalid(format!(
                "config file is for `{fs}` but the command line asks for `{}`",
                cmd.name()
            )));
        }
        (Some(cmd), _) => (cmd.name().to_string(), cmd.overrides()),
        (None, Some(fs)) => (fs.clone(), Vec::new()),
        (None, None) => return Err(invalid("no subcommand given; see `symflow --help`")),
    };
    let (outcome, value, overrides) = execute(&sub, file, flags)?;
    let prov = Provenance {
        subcommand: &sub,
        version: env!("CARGO_PKG_VERSION"),
        config: &value,
        overrides: &overrides,
    };
    write_output(&cli.out, &outcome.output, &prov)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_keys() {
        let map: Map<String, Value> = serde_json::from_str(r#"{"d": 3}"#).unwrap();
        let r: Resolved<VerifyConfig> = resolve(Some(map), vec![]).unwrap();
        assert_eq!(r.config, VerifyConfig { d: 3, seed: 0 });
    }

    #[test]
    fn unknown_key_is_named() {
        let map: Map<String, Value> = serde_json::from_str(r#"{"dd": 3}"#).unwrap();
        let err = resolve::<VerifyConfig>(Some(map), vec![]).err().unwrap();
        assert!(err.message().contains("dd"));
    }

    #[test]
    fn flags_override_file() {
        let map: Map<String, Value> = serde_json::from_str(r#"{"d": 3, "seed": 4}"#).unwrap();
        let r: Resolved<VerifyConfig> = resolve(Some(map), vec![("seed", Value::from(9))]).unwrap();
        assert_eq!(r.config.seed, 9);
        assert_eq!(r.overrides, vec!["seed".to_string()]);
    }

    #[test]
    fn negative_dimension_names_d() {
        let err = basis_from(-2).err().unwrap();
        assert_eq!(err.code(), EXIT_VALIDATION);
        assert!(err.message().contains("`d`"));
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_pair("1, 2").unwrap(), [1, 2]);
        assert!(parse_pair("1").is_err());
        assert_eq!(parse_complex("-0.5,0.25").unwrap(), [-0.5, 0.25]);
        assert_eq!(parse_complex("2").unwrap(), [2.0, 0.0]);
    }

    #[test]
    fn sweep_integer_params() {
        assert_eq!(number(3.0), Value::from(3));
        assert_eq!(number(0.5), Value::from(0.5));
    }

    #[test]
    fn sweep_merges_in_value_order() {
        let cfg = SweepConfig {
            target: "qnd".into(),
            param: "b".into(),
            values: vec![20.0, 5.0],
            base: serde_json::from_str(r#"{"samples": 2, "theta_max": 2.0}"#).unwrap(),
        };
        let t = sweep_table(&cfg).unwrap();
        assert_eq!(t.columns[0], "sweep_b");
        assert_eq!(t.column("sweep_b").unwrap(), vec![20.0, 20.0, 5.0, 5.0]);
    }

    #[test]
    fn semigroup_table_shape() {
        let cfg = SemigroupConfig {
            elements: vec![[0, 1]],
            samples: 4,
            ..SemigroupConfig::default()
        };
        let t = semigroup_table(&cfg).unwrap();
        assert_eq!(t.columns, ["tau", "trace", "symmetricity", "min_eigenvalue", "re_0_1", "im_0_1"]);
        assert_eq!(t.rows.len(), 4);
        let bad = SemigroupConfig {
            elements: vec![[0, 99]],
            ..SemigroupConfig::default()
        };
        assert!(semigroup_table(&bad).is_err());
    }

    #[test]
    fn extended_symmap_certificate_failure_is_numerical() {
        // m = −tanh²(κt) reaches −½ at κt ≈ 0.88, so keep t_max below that
        let cfg = SymmapConfig {
            input: MapInput::Generic,
            extended: true,
            t_max: 0.8,
            samples: 5,
            ..SymmapConfig::default()
        };
        let report = symmap_report(&cfg).unwrap();
        assert!(report.max_trace_drift < 1e-12);
        let strict = SymmapConfig {
            input: MapInput::Generic,
            ..SymmapConfig::default()
        };
        assert_eq!(symmap_report(&strict).err().unwrap().code(), EXIT_VALIDATION);
    }
}
