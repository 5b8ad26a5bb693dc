//! Batch front end: a JSON experiment config in, CSV and JSON artifacts out.
//!
//! A config file has the form
//!
//! ```json
//! { "seed": 7, "timing": false, "params": { "k_max": 64, "grid": 10000 } }
//! ```
//!
//! with optional `command`, `threads` and `out` keys; unknown keys are
//! rejected at every level. Command-line flags override the file. Every run
//! writes `resolved_config.json` (all defaults filled in) next to its
//! outputs, and every output carries the SHA-256 of the resolved command,
//! seed, timing flag and parameters. Thread count and output directory are
//! not hashed since they never change results.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::circle::{CircleValue, Clock, Direction, PhaseIndex};
use crate::constructions::{
    pointwise_sample, staircase_energy, staircase_recovery, SampleSource, StaircaseSpec,
};
use crate::continuum::{
    jump_energy_direct, jump_energy_sliced, limit_energy_en, partition_from_json,
};
use crate::error::Error;
use crate::experiments::{
    run_gamma_sandwich, run_lemma_sweep, run_oblique_raster, run_prefactor_limit, ConvergenceTable,
};
use crate::lattice::io::{field_from_json, SpinFieldRecord};
use crate::lattice::{discrete_energy, LatticeDomain, Shape, SpinField};
use crate::rng::derive_seed;
use crate::solvers::{
    anneal_glauber, anneal_kawasaki, bond_lower_bound_energy, cell_formula_estimate,
    counts_from_fractions, enumerate_min, enumerate_min_with_counts, random_with_counts,
    AnnealSchedule, CellMethod, CellProblemSpec, MAX_SEARCH_BITS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Lemma,
    Sandwich,
    Prefactor,
    Raster,
    Cell,
    Volume,
    Dirichlet,
    Recover,
    Energy,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Lemma => "lemma",
            Command::Sandwich => "sandwich",
            Command::Prefactor => "prefactor",
            Command::Raster => "raster",
            Command::Cell => "cell",
            Command::Volume => "volume",
            Command::Dirichlet => "dirichlet",
            Command::Recover => "recover",
            Command::Energy => "energy",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "clocklat",
    version,
    about = "N-clock lattice energies, limit functionals and solvers"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON experiment config.
    #[arg(long)]
    pub config: PathBuf,
    /// Global seed; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory; overrides the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Structured failure reported on stderr as JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub field: Option<String>,
    pub details: Option<Value>,
}

impl CliError {
    fn config(field: Option<&str>, message: impl Into<String>) -> Self {
        CliError {
            kind: "config".into(),
            message: message.into(),
            field: field.map(str::to_string),
            details: None,
        }
    }

    fn from_json(e: serde_json::Error) -> Self {
        let msg = e.to_string();
        let (kind, field) = if let Some(f) = backticked(&msg, "unknown field `") {
            ("unknown-field", Some(f))
        } else if let Some(f) = backticked(&msg, "missing field `") {
            ("missing-field", Some(f))
        } else if let Some(f) = backticked(&msg, "unknown variant `") {
            ("unknown-variant", Some(f))
        } else {
            ("json", None)
        };
        CliError {
            kind: kind.into(),
            message: msg,
            field,
            details: None,
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self.kind.as_str() {
            "search-too-large" => 3,
            "io" => 4,
            "invalid-parameter" | "config" | "unknown-field" | "missing-field"
            | "unknown-variant" | "json" => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind, "message": self.message });
        if let Some(f) = &self.field {
            v["field"] = json!(f);
        }
        if let Some(d) = &self.details {
            v["details"] = d.clone();
        }
        v
    }
}

fn backticked(msg: &str, prefix: &str) -> Option<String> {
    let start = msg.find(prefix)? + prefix.len();
    let len = msg[start..].find('`')?;
    Some(msg[start..start + len].to_string())
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let field = match &e {
            Error::InvalidParameter { name, .. } => Some(name.clone()),
            _ => None,
        };
        let details = match &e {
            Error::SearchTooLarge {
                free_sites,
                states,
                bits,
                limit,
            } => Some(
                json!({ "free_sites": free_sites, "states": states, "bits": bits, "limit": limit }),
            ),
            _ => None,
        };
        CliError {
            kind: e.kind().into(),
            message: e.to_string(),
            field,
            details,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A direction given as a vector; integer vectors keep their lattice form.
fn direction(v: &[f64]) -> crate::error::Result<Direction> {
    if v.iter().all(|x| x.fract() == 0.0 && x.abs() < 1e15) {
        Direction::rational(&v.iter().map(|&x| x as i64).collect::<Vec<_>>())
    } else {
        Direction::new(v)
    }
}

fn phase(k: u32, n: u32, name: &str) -> crate::error::Result<PhaseIndex> {
    PhaseIndex::new(k, n).map_err(|_| Error::param(name, format!("must be < N = {n}")))
}

fn fits_enumeration(free: usize, n: u32) -> bool {
    free as f64 * (n as f64).log2() <= MAX_SEARCH_BITS as f64 + 1e-9
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    /// Enumerate when the search space fits, anneal otherwise.
    #[default]
    Auto,
    Enumerate,
    Anneal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaParams {
    pub k_max: u32,
    pub grid: usize,
}

impl Default for LemmaParams {
    fn default() -> Self {
        LemmaParams {
            k_max: 64,
            grid: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SandwichParams {
    pub s: u32,
    pub r: u32,
    pub nu: Vec<f64>,
    #[serde(rename = "N")]
    pub n: u32,
    pub ladder: Vec<f64>,
    /// Used on rows too large to enumerate; its seed is derived from the global seed.
    pub schedule: AnnealSchedule,
}

impl Default for SandwichParams {
    fn default() -> Self {
        SandwichParams {
            s: 1,
            r: 0,
            nu: vec![0.0, 1.0],
            n: 2,
            ladder: vec![0.125, 0.0625, 0.03125],
            schedule: AnnealSchedule::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrefactorParams {
    pub ladder: Vec<u32>,
}

impl Default for PrefactorParams {
    fn default() -> Self {
        PrefactorParams {
            ladder: (3..=13).map(|p| 1u32 << p).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RasterParams {
    pub nu: Vec<f64>,
    /// Angle of the value on the positive side.
    pub s: f64,
    pub r: f64,
    pub lambdas: Vec<f64>,
}

impl Default for RasterParams {
    fn default() -> Self {
        RasterParams {
            nu: vec![1.0, 1.0],
            s: PI,
            r: 0.0,
            lambdas: vec![1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CellParams {
    pub s: u32,
    pub r: u32,
    pub nu: Vec<f64>,
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub method: CellMethod,
}

impl Default for CellParams {
    fn default() -> Self {
        CellParams {
            s: 1,
            r: 0,
            nu: vec![0.0, 1.0],
            eps: 0.125,
            n: 2,
            method: CellMethod::Enumerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VolumeParams {
    pub extent: Vec<usize>,
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: u32,
    /// Target fraction of sites in each phase.
    pub fractions: Vec<f64>,
    pub periodic: Vec<bool>,
    pub method: SolveMethod,
    pub schedule: AnnealSchedule,
}

impl Default for VolumeParams {
    fn default() -> Self {
        VolumeParams {
            extent: vec![4, 4],
            eps: 0.25,
            n: 2,
            fractions: vec![0.5, 0.5],
            periodic: Vec::new(),
            method: SolveMethod::Auto,
            schedule: AnnealSchedule::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DirichletParams {
    /// Grid-partition file with the boundary datum, relative to the config file.
    pub datum: PathBuf,
    #[serde(rename = "N")]
    pub n: u32,
    /// Lattice spacing; defaults to half the partition cell size.
    pub eps: Option<f64>,
    /// Width of the frozen boundary layer; defaults to `2ε`.
    pub layer: Option<f64>,
    pub method: SolveMethod,
    pub schedule: AnnealSchedule,
}

impl Default for DirichletParams {
    fn default() -> Self {
        DirichletParams {
            datum: PathBuf::new(),
            n: 2,
            eps: None,
            layer: None,
            method: SolveMethod::Auto,
            schedule: AnnealSchedule::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainParams {
    /// `Q_ν` for the staircase direction.
    Cube,
    Grid {
        origin: Vec<i64>,
        extent: Vec<usize>,
        #[serde(default)]
        periodic: Vec<bool>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StaircaseParams {
    #[serde(rename = "N")]
    pub n: u32,
    /// Target phase; defaults to 1 when `steps` is absent.
    pub s: Option<u32>,
    pub r: u32,
    /// Signed number of `θ_N` rotations instead of `s`.
    pub steps: Option<i64>,
    pub nu: Vec<f64>,
    pub eps: f64,
    pub domain: DomainParams,
    pub layer: Option<f64>,
}

impl Default for StaircaseParams {
    fn default() -> Self {
        StaircaseParams {
            n: 4,
            s: None,
            r: 0,
            steps: None,
            nu: vec![0.0, 1.0],
            eps: 0.125,
            domain: DomainParams::Cube,
            layer: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointwiseParams {
    /// Grid-partition file, relative to the config file.
    pub partition: PathBuf,
    #[serde(rename = "N")]
    pub n: u32,
    /// Defaults to half the partition cell size.
    pub eps: Option<f64>,
}

impl Default for PointwiseParams {
    fn default() -> Self {
        PointwiseParams {
            partition: PathBuf::new(),
            n: 2,
            eps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "kebab-case")]
pub enum RecoverParams {
    Staircase(StaircaseParams),
    Pointwise(PointwiseParams),
}

impl Default for RecoverParams {
    fn default() -> Self {
        RecoverParams::Staircase(StaircaseParams::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyParams {
    /// Spin-field or grid-partition file, relative to the config file.
    pub input: PathBuf,
    /// Clock size for `E_N` of a partition input.
    #[serde(rename = "N")]
    pub n: Option<u32>,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            input: PathBuf::new(),
            n: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Lemma(LemmaParams),
    Sandwich(SandwichParams),
    Prefactor(PrefactorParams),
    Raster(RasterParams),
    Cell(CellParams),
    Volume(VolumeParams),
    Dirichlet(DirichletParams),
    Recover(RecoverParams),
    Energy(EnergyParams),
}

fn typed<T: DeserializeOwned + Default>(v: Option<Value>) -> CliResult<T> {
    match v {
        None => Ok(T::default()),
        Some(v) => serde_json::from_value(v).map_err(CliError::from_json),
    }
}

impl Params {
    fn parse(command: Command, v: Option<Value>) -> CliResult<Self> {
        Ok(match command {
            Command::Lemma => Params::Lemma(typed(v)?),
            Command::Sandwich => Params::Sandwich(typed(v)?),
            Command::Prefactor => Params::Prefactor(typed(v)?),
            Command::Raster => Params::Raster(typed(v)?),
            Command::Cell => Params::Cell(typed(v)?),
            Command::Volume => Params::Volume(typed(v)?),
            Command::Dirichlet => Params::Dirichlet(typed(v)?),
            Command::Recover => Params::Recover(typed(v)?),
            Command::Energy => Params::Energy(typed(v)?),
        })
    }

    fn validate(&self) -> crate::error::Result<()> {
        let eps_ok = |eps: f64| {
            if eps > 0.0 && eps.is_finite() {
                Ok(())
            } else {
                Err(Error::param("eps", format!("must be positive, got {eps}")))
            }
        };
        match self {
            Params::Lemma(p) => {
                if p.k_max == 0 {
                    return Err(Error::param("k_max", "must be >= 1"));
                }
                if p.grid < 2 {
                    return Err(Error::param("grid", "must be >= 2"));
                }
            }
            Params::Sandwich(p) => {
                if p.ladder.is_empty() {
                    return Err(Error::param("ladder", "must not be empty"));
                }
                for &eps in &p.ladder {
                    CellProblemSpec {
                        s: PhaseIndex(p.s),
                        r: PhaseIndex(p.r),
                        nu: direction(&p.nu)?,
                        eps,
                        n: p.n,
                        method: CellMethod::Anneal(p.schedule.clone()),
                    }
                    .validate()?;
                }
            }
            Params::Prefactor(p) => {
                if p.ladder.is_empty() {
                    return Err(Error::param("ladder", "must not be empty"));
                }
                for &n in &p.ladder {
                    Clock::new(n)?;
                }
            }
            Params::Raster(p) => {
                let nu = direction(&p.nu)?;
                if nu.dim() != 2 {
                    return Err(Error::param("nu", "raster interfaces are planar (d = 2)"));
                }
                if p.lambdas.is_empty() {
                    return Err(Error::param("lambdas", "must not be empty"));
                }
            }
            Params::Cell(p) => {
                CellProblemSpec {
                    s: PhaseIndex(p.s),
                    r: PhaseIndex(p.r),
                    nu: direction(&p.nu)?,
                    eps: p.eps,
                    n: p.n,
                    method: p.method.clone(),
                }
                .validate()?;
            }
            Params::Volume(p) => {
                Clock::new(p.n)?;
                eps_ok(p.eps)?;
                if p.fractions.len() != p.n as usize {
                    return Err(Error::param(
                        "fractions",
                        format!("need N = {} entries", p.n),
                    ));
                }
                p.schedule.validate()?;
            }
            Params::Dirichlet(p) => {
                Clock::new(p.n)?;
                if p.datum.as_os_str().is_empty() {
                    return Err(Error::param("datum", "a grid-partition file is required"));
                }
                if let Some(e) = p.eps {
                    eps_ok(e)?;
                }
                p.schedule.validate()?;
            }
            Params::Recover(RecoverParams::Staircase(p)) => {
                Clock::new(p.n)?;
                eps_ok(p.eps)?;
                if p.s.is_some() && p.steps.is_some() {
                    return Err(Error::param("steps", "give either s or steps, not both"));
                }
                direction(&p.nu)?;
            }
            Params::Recover(RecoverParams::Pointwise(p)) => {
                Clock::new(p.n)?;
                if p.partition.as_os_str().is_empty() {
                    return Err(Error::param(
                        "partition",
                        "a grid-partition file is required",
                    ));
                }
            }
            Params::Energy(p) => {
                if p.input.as_os_str().is_empty() {
                    return Err(Error::param("input", "an input file is required"));
                }
                if let Some(n) = p.n {
                    Clock::new(n)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    command: Option<Command>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    threads: Option<usize>,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    timing: bool,
    #[serde(default)]
    params: Option<Value>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub params: Params,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: PathBuf,
    /// Write measured wall times into CSV tables (otherwise 0).
    pub timing: bool,
    /// Directory against which relative input paths are resolved.
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    /// The hashed part of the resolved config.
    pub fn hashed(&self) -> Value {
        json!({
            "command": self.command,
            "seed": self.seed,
            "timing": self.timing,
            "params": self.params,
        })
    }

    /// SHA-256 (hex) of the canonical JSON of [`Self::hashed`].
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.hashed()).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn resolved(&self) -> Value {
        let mut v = self.hashed();
        v["threads"] = json!(self.threads);
        v["out"] = json!(self.out);
        v["config_sha256"] = json!(self.hash());
        v
    }

    fn input_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

/// Reads and validates a config. `command` (from the command line) must
/// agree with the file's `command` key when both are present.
pub fn parse_config(path: &Path, command: Option<Command>) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError {
        kind: "io".into(),
        message: format!("cannot read config {}: {e}", path.display()),
        field: None,
        details: None,
    })?;
    parse_config_str(&text, command, path.parent().unwrap_or(Path::new(".")))
}

pub fn parse_config_str(
    text: &str,
    command: Option<Command>,
    base_dir: &Path,
) -> CliResult<ExperimentConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(CliError::from_json)?;
    let command = match (command, raw.command) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::config(
                Some("command"),
                format!(
                    "config is for `{}` but `{}` was requested",
                    b.name(),
                    a.name()
                ),
            ))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(CliError::config(Some("command"), "no command given")),
    };
    if raw.threads == Some(0) {
        return Err(CliError::config(Some("threads"), "must be >= 1"));
    }
    let params = Params::parse(command, raw.params)?;
    params.validate()?;
    Ok(ExperimentConfig {
        command,
        params,
        seed: raw.seed.unwrap_or(0),
        threads: raw.threads,
        out: raw.out.unwrap_or_else(|| PathBuf::from("clocklat-out")),
        timing: raw.timing,
        base_dir: base_dir.to_path_buf(),
    })
}

/// Collects the files written by a run.
struct Output<'a> {
    dir: &'a Path,
    hash: String,
    written: Vec<PathBuf>,
}

impl Output<'_> {
    fn json(&mut self, name: &str, mut v: Value) -> CliResult<()> {
        if let Value::Object(m) = &mut v {
            m.insert("config_sha256".into(), json!(self.hash));
        }
        let path = self.dir.join(name);
        fs::write(
            &path,
            serde_json::to_string_pretty(&v).map_err(Error::from)? + "\n",
        )?;
        self.written.push(path);
        Ok(())
    }

    fn field(&mut self, name: &str, field: &SpinField) -> CliResult<()> {
        let mut rec = SpinFieldRecord::from_field(field);
        rec.config_sha256 = Some(self.hash.clone());
        let path = self.dir.join(name);
        fs::write(
            &path,
            serde_json::to_string(&rec).map_err(Error::from)? + "\n",
        )?;
        self.written.push(path);
        Ok(())
    }

    fn table(&mut self, name: &str, table: &ConvergenceTable, timing: bool) -> CliResult<()> {
        let path = self.dir.join(name);
        let csv = table.to_csv(
            &[("table", &table.name), ("config-sha256", &self.hash)],
            timing,
        );
        fs::write(&path, csv)?;
        self.written.push(path);
        Ok(())
    }
}

fn table_summary(table: &ConvergenceTable) -> Value {
    json!({
        "table": table.name,
        "rows": table.rows.len(),
        "rate": table.rate,
        "sandwich_violations": table.sandwich_violations(1e-12),
        "analytic_constant": table.analytic_is_constant(),
    })
}

fn schedule_for(schedule: &AnnealSchedule, seed: u64, component: &str) -> AnnealSchedule {
    AnnealSchedule {
        seed: derive_seed(seed, component),
        ..schedule.clone()
    }
}

fn read_partition(path: &Path) -> CliResult<crate::continuum::GridPartitionField> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::from(Error::InvalidInput(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })?;
    Ok(partition_from_json(&text)?)
}

fn partition_domain(
    p: &crate::continuum::GridPartitionField,
    eps: f64,
) -> crate::error::Result<LatticeDomain> {
    let lower: Vec<f64> = p.origin().iter().map(|&o| o as f64 * p.lambda()).collect();
    let upper: Vec<f64> = p
        .origin()
        .iter()
        .zip(p.extent())
        .map(|(&o, &e)| (o + e as i64) as f64 * p.lambda())
        .collect();
    LatticeDomain::new(eps, Shape::Box { lower, upper }, vec![false; p.dim()])
}

/// Minimizes over the free sites of `field`, by enumeration or annealing.
fn minimize(
    field: &SpinField,
    method: SolveMethod,
    schedule: &AnnealSchedule,
) -> CliResult<(f64, SpinField, &'static str)> {
    let enumerate = match method {
        SolveMethod::Enumerate => true,
        SolveMethod::Anneal => false,
        SolveMethod::Auto => fits_enumeration(field.free_sites().len(), field.n()),
    };
    if enumerate {
        let r = enumerate_min(field)?;
        Ok((r.energy, r.argmin, "enumerate"))
    } else {
        let r = anneal_glauber(field, schedule)?;
        Ok((r.energy, r.field, "anneal"))
    }
}

/// Runs the experiment and returns the written files.
pub fn dispatch(cfg: &ExperimentConfig) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(&cfg.out)?;
    let mut out = Output {
        dir: &cfg.out,
        hash: cfg.hash(),
        written: Vec::new(),
    };
    out.json("resolved_config.json", cfg.resolved())?;
    let seed = cfg.seed;
    match &cfg.params {
        Params::Lemma(p) => {
            let report = run_lemma_sweep(p.k_max, p.grid)?;
            let mut v = serde_json::to_value(&report).map_err(Error::from)?;
            v["equality_at_k2_half_pi"] = json!(report.has_k2_equality());
            out.json("lemma_report.json", v)?;
        }
        Params::Sandwich(p) => {
            let nu = direction(&p.nu)?;
            let schedule = schedule_for(&p.schedule, seed, "sandwich");
            let mut methods = Vec::new();
            for &eps in &p.ladder {
                let spec = CellProblemSpec {
                    s: PhaseIndex(p.s),
                    r: PhaseIndex(p.r),
                    nu: nu.clone(),
                    eps,
                    n: p.n,
                    method: CellMethod::Enumerate,
                };
                let free = spec.constrained_field()?.free_sites().len();
                methods.push(if fits_enumeration(free, p.n) {
                    CellMethod::Enumerate
                } else {
                    CellMethod::Anneal(schedule.clone())
                });
            }
            let table = run_gamma_sandwich(
                PhaseIndex(p.s),
                PhaseIndex(p.r),
                &nu,
                p.n,
                &p.ladder,
                &methods,
            )?;
            out.table("sandwich.csv", &table, cfg.timing)?;
            let mut v = table_summary(&table);
            v["methods"] = json!(p
                .ladder
                .iter()
                .zip(&methods)
                .map(|(e, m)| json!({"eps": e, "method": m.name()}))
                .collect::<Vec<_>>());
            out.json("sandwich_summary.json", v)?;
        }
        Params::Prefactor(p) => {
            let study = run_prefactor_limit(&p.ladder)?;
            out.table("prefactor.csv", &study.table, cfg.timing)?;
            let mut v = table_summary(&study.table);
            v["monotone"] = json!(study.monotone);
            out.json("prefactor_summary.json", v)?;
        }
        Params::Raster(p) => {
            let nu = direction(&p.nu)?;
            let table = run_oblique_raster(
                &nu,
                CircleValue::new(p.s),
                CircleValue::new(p.r),
                &p.lambdas,
            )?;
            out.table("raster.csv", &table, cfg.timing)?;
            out.json("raster_summary.json", table_summary(&table))?;
        }
        Params::Cell(p) => {
            let method = match &p.method {
                CellMethod::Anneal(s) => CellMethod::Anneal(schedule_for(s, seed, "cell")),
                m => m.clone(),
            };
            let est = cell_formula_estimate(&CellProblemSpec {
                s: phase(p.s, p.n, "s")?,
                r: phase(p.r, p.n, "r")?,
                nu: direction(&p.nu)?,
                eps: p.eps,
                n: p.n,
                method: method.clone(),
            })?;
            out.field("cell_field.json", &est.field)?;
            let (chains, sweeps) = match &method {
                CellMethod::Anneal(s) => (json!(s.chains), json!(s.sweeps)),
                _ => (Value::Null, Value::Null),
            };
            out.json(
                "cell_result.json",
                json!({
                    "method": est.method,
                    "energy": est.estimate,
                    "bounds": { "lower": est.lower, "upper": est.upper, "analytic": est.analytic },
                    "upper_bound_only": est.layered,
                    "free_sites": est.free_sites,
                    "seed": seed,
                    "chains": chains,
                    "sweeps": sweeps,
                    "field": "cell_field.json",
                }),
            )?;
        }
        Params::Volume(p) => {
            let d = p.extent.len();
            let dom = Arc::new(LatticeDomain::grid(
                p.eps,
                &vec![0; d],
                &p.extent,
                &p.periodic,
            )?);
            let counts = counts_from_fractions(&p.fractions, dom.num_sites())?;
            let base = SpinField::constant(dom.clone(), p.n, PhaseIndex(0))?;
            let start = random_with_counts(&base, &counts, derive_seed(seed, "volume-start"))?;
            let schedule = schedule_for(&p.schedule, seed, "volume");
            let enumerate = match p.method {
                SolveMethod::Enumerate => true,
                SolveMethod::Anneal => false,
                SolveMethod::Auto => fits_enumeration(dom.num_sites(), p.n),
            };
            let (energy, field, method, extra) = if enumerate {
                let r = enumerate_min_with_counts(&start, &counts)?;
                (
                    r.energy,
                    r.argmin,
                    "enumerate",
                    json!({ "feasible": r.feasible }),
                )
            } else {
                let r = anneal_kawasaki(&start, &counts, &schedule)?;
                (
                    r.energy,
                    r.field,
                    "anneal",
                    json!({ "chains": schedule.chains, "sweeps": schedule.sweeps, "best_chain": r.chain }),
                )
            };
            out.field("volume_field.json", &field)?;
            out.json(
                "volume_result.json",
                json!({
                    "method": method,
                    "energy": energy,
                    "counts": counts,
                    "seed": seed,
                    "solver": extra,
                    "field": "volume_field.json",
                }),
            )?;
        }
        Params::Dirichlet(p) => {
            let datum = read_partition(&cfg.input_path(&p.datum))?;
            let mut warnings = Vec::new();
            let jump = datum.interface_area();
            if jump > 0.0 {
                let w = format!("datum jumps inside the domain (interface area {jump}); the energy is still well defined");
                log::warn!("{w}");
                warnings.push(w);
            }
            let eps = p.eps.unwrap_or(datum.lambda() / 2.0);
            let dom = Arc::new(partition_domain(&datum, eps)?);
            let mut field = pointwise_sample(SampleSource::Partition(&datum), p.n, dom.clone())?;
            let layer = dom.boundary_layer(p.layer.unwrap_or(2.0 * eps));
            field.set_frozen(layer)?;
            let (energy, argmin, method) = minimize(
                &field,
                p.method,
                &schedule_for(&p.schedule, seed, "dirichlet"),
            )?;
            out.field("dirichlet_field.json", &argmin)?;
            out.json(
                "dirichlet_result.json",
                json!({
                    "method": method,
                    "energy": energy,
                    "lower": bond_lower_bound_energy(&argmin, None),
                    "datum_energy": discrete_energy(&field, None).scaled,
                    "free_sites": field.free_sites().len(),
                    "seed": seed,
                    "warnings": warnings,
                    "field": "dirichlet_field.json",
                }),
            )?;
        }
        Params::Recover(RecoverParams::Staircase(p)) => {
            let nu = direction(&p.nu)?;
            let dom = Arc::new(match &p.domain {
                DomainParams::Cube => LatticeDomain::unit_cube(p.eps, &nu)?,
                DomainParams::Grid {
                    origin,
                    extent,
                    periodic,
                } => LatticeDomain::grid(p.eps, origin, extent, periodic)?,
            });
            let spec = match p.steps {
                Some(steps) => {
                    StaircaseSpec::with_winding(dom, p.n, phase(p.r, p.n, "r")?, steps, nu)?
                }
                None => StaircaseSpec::new(
                    dom,
                    p.n,
                    phase(p.s.unwrap_or(1), p.n, "s")?,
                    phase(p.r, p.n, "r")?,
                    nu,
                )?,
            }
            .layer_width(p.layer);
            let field = staircase_recovery(&spec)?;
            let e = staircase_energy(&spec)?;
            out.field("recover_field.json", &field)?;
            out.json(
                "recover_report.json",
                json!({
                    "construction": "staircase",
                    "energy": e.total.scaled,
                    "raw_energy": e.total.raw,
                    "interior": e.interior,
                    "boundary": e.boundary,
                    "steps": spec.steps(),
                    "orientation": spec.orientation(),
                    "field": "recover_field.json",
                }),
            )?;
        }
        Params::Recover(RecoverParams::Pointwise(p)) => {
            let part = read_partition(&cfg.input_path(&p.partition))?;
            let eps = p.eps.unwrap_or(part.lambda() / 2.0);
            let dom = Arc::new(partition_domain(&part, eps)?);
            let field = pointwise_sample(SampleSource::Partition(&part), p.n, dom)?;
            out.field("recover_field.json", &field)?;
            out.json(
                "recover_report.json",
                json!({
                    "construction": "pointwise",
                    "energy": discrete_energy(&field, None).scaled,
                    "limit_energy": limit_energy_en(&part.to_sn(p.n)?, p.n)?,
                    "field": "recover_field.json",
                }),
            )?;
        }
        Params::Energy(p) => {
            let path = cfg.input_path(&p.input);
            let text = fs::read_to_string(&path).map_err(|e| {
                CliError::from(Error::InvalidInput(format!(
                    "cannot read {}: {e}",
                    path.display()
                )))
            })?;
            let report = match field_from_json(&text) {
                Ok(field) => {
                    let e = discrete_energy(&field, None);
                    json!({
                        "kind": "spin-field",
                        "N": field.n(),
                        "energy": e.scaled,
                        "raw_energy": e.raw,
                        "bonds": e.bond_count,
                        "bond_lower_bound": bond_lower_bound_energy(&field, None),
                    })
                }
                Err(spin_err) => {
                    let part = partition_from_json(&text).map_err(|e| {
                        CliError::from(Error::InvalidInput(format!(
                            "neither a spin field ({spin_err}) nor a grid partition ({e})"
                        )))
                    })?;
                    let n = p.n.or_else(|| part.clock().map(Clock::n));
                    let en = match n {
                        Some(n) => json!(limit_energy_en(&part.to_sn(n)?, n)?),
                        None => Value::Null,
                    };
                    json!({
                        "kind": "grid-partition",
                        "jump_energy": jump_energy_direct(&part),
                        "jump_energy_sliced": jump_energy_sliced(&part),
                        "interface_area": part.interface_area(),
                        "N": n,
                        "limit_energy_en": en,
                    })
                }
            };
            out.json("energy_report.json", report)?;
        }
    }
    Ok(out.written)
}

/// Parses, applies overrides, sets up the thread pool and dispatches.
pub fn run(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let mut cfg = parse_config(&cli.config, Some(cli.command))?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::config(Some("threads"), "must be >= 1"));
        }
        cfg.threads = Some(t);
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    match cfg.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::config(Some("threads"), e.to_string()))?;
            pool.install(|| dispatch(&cfg))
        }
        None => dispatch(&cfg),
    }
}

/// Entry point of the binary; returns the exit status.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, cmd: Command) -> CliResult<ExperimentConfig> {
        parse_config_str(text, Some(cmd), Path::new("."))
    }

    #[test]
    fn lemma_defaults() {
        let c = parse("{}", Command::Lemma).unwrap();
        assert_eq!(
            c.params,
            Params::Lemma(LemmaParams {
                k_max: 64,
                grid: 10_000
            })
        );
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn rejects_small_n() {
        let e = parse(r#"{"params": {"N": 1}}"#, Command::Cell).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("N"));
        assert!(e.message.contains(">= 2"));
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn rejects_unknown_keys() {
        let e = parse(r#"{"params": {"k_max": 3, "bogus": 1}}"#, Command::Lemma).unwrap_err();
        assert_eq!(e.kind, "unknown-field");
        assert_eq!(e.field.as_deref(), Some("bogus"));
        let e = parse(r#"{"sed": 3}"#, Command::Lemma).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("sed"));
        let e = parse(
            r#"{"params": {"method": {"method": "anneal", "sweep": 3}}}"#,
            Command::Cell,
        )
        .unwrap_err();
        assert_eq!(e.field.as_deref(), Some("sweep"));
    }

    #[test]
    fn cell_eps_range() {
        let e = parse(r#"{"params": {"eps": 0.25}}"#, Command::Cell).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("eps"));
    }

    #[test]
    fn command_mismatch() {
        let e = parse(r#"{"command": "cell"}"#, Command::Lemma).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("command"));
        assert!(parse_config_str("{}", None, Path::new(".")).is_err());
        assert!(parse_config_str(r#"{"command": "prefactor"}"#, None, Path::new(".")).is_ok());
    }

    #[test]
    fn hash_ignores_threads_and_out() {
        let a = parse(r#"{"threads": 2, "out": "a"}"#, Command::Lemma).unwrap();
        let b = parse(r#"{"threads": 5, "out": "b"}"#, Command::Lemma).unwrap();
        let c = parse(r#"{"seed": 1}"#, Command::Lemma).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn recover_variants() {
        let c = parse(
            r#"{"params": {"construction": "staircase", "N": 6, "steps": -2}}"#,
            Command::Recover,
        )
        .unwrap();
        assert!(matches!(
            c.params,
            Params::Recover(RecoverParams::Staircase(StaircaseParams {
                steps: Some(-2),
                ..
            }))
        ));
        let e = parse(
            r#"{"params": {"construction": "staircase", "s": 1, "steps": 2}}"#,
            Command::Recover,
        )
        .unwrap_err();
        assert_eq!(e.field.as_deref(), Some("steps"));
        let e = parse(
            r#"{"params": {"construction": "pointwise"}}"#,
            Command::Recover,
        )
        .unwrap_err();
        assert_eq!(e.field.as_deref(), Some("partition"));
    }

    #[test]
    fn size_report_in_error() {
        let e: CliError = Error::SearchTooLarge {
            free_sites: 30,
            states: 2,
            bits: 30.0,
            limit: 26,
        }
        .into();
        assert_eq!(e.exit_code(), 3);
        assert_eq!(e.to_json()["details"]["free_sites"], 30);
    }
}
