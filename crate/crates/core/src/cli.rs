//! Command-line front end.
//!
//! Settings come from flags and optionally from a `key = value` file given
//! with `--config`; flags win. Tables go to standard output unless
//! `--output` names a file. A relative `--output` is resolved against
//! `$HARQ_SCALING_OUTPUT_DIR` when that variable is set.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analytic;
use crate::asymptotics::{self, LimitResult, RhoPath};
use crate::error::{Error, Result};
use crate::linklevel::{self, MonteCarlo};
use crate::params::{Metrics, Regime, Scheme, SchemeParams};
use crate::sweep::{self, Curve};

pub const OUTPUT_DIR_ENV: &str = "HARQ_SCALING_OUTPUT_DIR";
pub const CSV_HEADER: &str = "sweep_var,rho_or_J,ebn0_db,ebn0_linear,se_or_density";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// One (SE, Eb/N0) point.
    Point,
    /// SE vs Eb/N0 over a grid of rho.
    Curve,
    /// User density vs Eb/N0 over a grid of J.
    Density,
    /// Eb/N0 floors and limits that apply at the given parameters.
    Limits,
    /// Monte-Carlo check of the CC-NOMA effective SINR.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Log,
    Linear,
}

#[derive(Debug, Parser, Default)]
#[command(
    name = "harq-scaling",
    version,
    about = "SE / Eb/N0 / user-density scaling of HARQ random-access uplinks"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// classical | cc-noma | cc-oma | ir-oma
    #[arg(long)]
    pub scheme: Option<String>,
    /// sum | tin
    #[arg(long)]
    pub regime: Option<String>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Transmission attempts per frame.
    #[arg(long = "T")]
    pub slots: Option<u32>,
    /// Total users.
    #[arg(long = "J")]
    pub users: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Frequency bins.
    #[arg(long = "B")]
    pub bins: Option<u32>,
    #[arg(long = "c-buf")]
    pub c_buf: Option<f64>,
    /// Payload bits per user.
    #[arg(long = "L")]
    pub payload_bits: Option<f64>,
    #[arg(long)]
    pub min: Option<f64>,
    #[arg(long)]
    pub max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub scale: Option<Scale>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long = "users-per-slot")]
    pub users_per_slot: Option<usize>,
    /// Signature length.
    #[arg(long)]
    pub m: Option<usize>,
    /// Relative tolerance for `validate`.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: Scale,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self.scale {
            Scale::Log => sweep::log_grid(self.min, self.max, self.points),
            Scale::Linear => sweep::linear_grid(self.min, self.max, self.points),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub scheme: Scheme,
    pub regime: Regime,
    pub params: SchemeParams,
    pub grid: GridSpec,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    pub users_per_slot: usize,
    pub m: usize,
    pub tolerance: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parses `key = value` lines. `#` starts a comment; `-` in keys reads as `_`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("line {}: expected `key = value`", lineno + 1)))?;
        map.insert(key.trim().replace('-', "_"), value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config_err(format!("cannot parse `{key}` value `{value}`")))
}

impl Args {
    /// Fills unset fields from a config file's key/value map.
    pub fn merge_file(&mut self, file: &BTreeMap<String, String>) -> Result<()> {
        macro_rules! fill {
            ($field:ident, $value:expr, $key:expr) => {
                if self.$field.is_none() {
                    self.$field = Some(parse_value($key, $value)?);
                }
            };
        }
        for (key, value) in file {
            let v = value.as_str();
            match key.as_str() {
                "command" => {
                    if self.command.is_none() {
                        self.command = Some(
                            Command::from_str(v, true)
                                .map_err(|_| config_err(format!("unknown command `{v}`")))?,
                        );
                    }
                }
                "scheme" => fill!(scheme, v, key),
                "regime" => fill!(regime, v, key),
                "rho" => fill!(rho, v, key),
                "T" => fill!(slots, v, key),
                "J" => fill!(users, v, key),
                "eta" => fill!(eta, v, key),
                "sigma2" => fill!(sigma2, v, key),
                "B" => fill!(bins, v, key),
                "c_buf" => fill!(c_buf, v, key),
                "L" => fill!(payload_bits, v, key),
                "min" => fill!(min, v, key),
                "max" => fill!(max, v, key),
                "points" => fill!(points, v, key),
                "scale" => {
                    if self.scale.is_none() {
                        self.scale = Some(
                            Scale::from_str(v, true)
                                .map_err(|_| config_err(format!("unknown scale `{v}`")))?,
                        );
                    }
                }
                "trials" => fill!(trials, v, key),
                "seed" => fill!(seed, v, key),
                "workers" => fill!(workers, v, key),
                "users_per_slot" => fill!(users_per_slot, v, key),
                "m" => fill!(m, v, key),
                "tolerance" => fill!(tolerance, v, key),
                "output" => fill!(output, v, key),
                "format" => {
                    if self.format.is_none() {
                        self.format = Some(
                            Format::from_str(v, true)
                                .map_err(|_| config_err(format!("unknown format `{v}`")))?,
                        );
                    }
                }
                other => return Err(config_err(format!("unknown config key `{other}`"))),
            }
        }
        Ok(())
    }

    /// Reads `--config` if given, then applies defaults and validates.
    pub fn resolve(mut self) -> Result<RunConfig> {
        if let Some(path) = self.config.clone() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
            self.merge_file(&parse_config_file(&text)?)?;
        }
        let command = self
            .command
            .ok_or_else(|| config_err("missing command (point|curve|density|limits|validate)"))?;
        let scheme = match &self.scheme {
            Some(s) => s.parse()?,
            None if command == Command::Validate => Scheme::CcNoma,
            None => return Err(config_err("missing --scheme")),
        };
        let regime = match &self.regime {
            Some(r) => r.parse()?,
            None if command == Command::Validate => Regime::Tin,
            None => return Err(config_err("missing --regime")),
        };

        let defaults = SchemeParams::default();
        let slots = self.slots.unwrap_or(defaults.slots);
        let params = SchemeParams {
            rho: self.rho.unwrap_or(defaults.rho),
            slots,
            users: self.users.unwrap_or(slots as f64),
            // The simulator needs eta < 1.
            eta: match (self.eta, command) {
                (Some(eta), _) => eta,
                (None, Command::Validate) => 0.1,
                (None, _) => defaults.eta,
            },
            sigma2: self.sigma2.unwrap_or(defaults.sigma2),
            bins: self.bins.unwrap_or(defaults.bins),
            c_buf: self.c_buf.unwrap_or(defaults.c_buf),
            payload_bits: self.payload_bits.unwrap_or(defaults.payload_bits),
        };
        if command != Command::Validate {
            params.validate()?;
        }

        let (default_min, default_max) = match command {
            Command::Density => (slots as f64, (100.0f64).max(10.0 * slots as f64)),
            _ => (1e-3, 1e2),
        };
        let grid = GridSpec {
            min: self.min.unwrap_or(default_min),
            max: self.max.unwrap_or(default_max),
            points: self.points.unwrap_or(60),
            scale: self.scale.unwrap_or(Scale::Log),
        };
        if matches!(command, Command::Curve | Command::Density) {
            if !(grid.min < grid.max) {
                return Err(config_err(format!(
                    "grid min {} must be below max {}",
                    grid.min, grid.max
                )));
            }
            if grid.points < 2 {
                return Err(config_err("curves need at least 2 grid points"));
            }
        }

        let tolerance = self.tolerance.unwrap_or(0.05);
        if !(tolerance > 0.0) {
            return Err(config_err("tolerance must be positive"));
        }
        Ok(RunConfig {
            command,
            scheme,
            regime,
            params,
            grid,
            trials: self.trials.unwrap_or(2000),
            seed: self.seed.unwrap_or(0),
            workers: self.workers.unwrap_or(1),
            users_per_slot: self.users_per_slot.unwrap_or(5),
            m: self.m.unwrap_or(64),
            tolerance,
            output: self.output,
            format: self.format.unwrap_or(Format::Csv),
        })
    }
}

/// Rendered result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    /// False only when `validate` misses its tolerance.
    pub passed: bool,
    /// Grid points dropped while building a curve.
    pub skipped: usize,
}

pub fn run(config: &RunConfig) -> Result<Report> {
    match config.command {
        Command::Point => run_point(config),
        Command::Curve => {
            let grid = config.grid.values()?;
            let curve = sweep::se_curve(config.scheme, config.regime, &config.params, &grid)?;
            Ok(curve_report(&curve, config.format))
        }
        Command::Density => {
            let grid = config.grid.values()?;
            let curve = sweep::density_curve(config.scheme, config.regime, &config.params, &grid)?;
            Ok(curve_report(&curve, config.format))
        }
        Command::Limits => run_limits(config),
        Command::Validate => run_validate(config),
    }
}

fn meta(config: &RunConfig) -> serde_json::Value {
    json!({
        "scheme": config.scheme,
        "regime": config.regime,
        "params": config.params,
        "tool_version": env!("CARGO_PKG_VERSION"),
    })
}

fn run_point(config: &RunConfig) -> Result<Report> {
    let m: Metrics = analytic::evaluate(config.scheme, config.regime, &config.params)?;
    let body = match config.format {
        Format::Csv => format!(
            "scheme,regime,rho,T,J,se,ebn0_linear,ebn0_db\n{},{},{},{},{},{},{},{}\n",
            config.scheme,
            config.regime,
            config.params.rho,
            config.params.slots,
            config.params.users,
            m.se,
            m.ebn0_linear,
            m.ebn0_db
        ),
        Format::Json => to_json(&json!({ "meta": meta(config), "metrics": m })),
    };
    Ok(Report {
        body,
        passed: true,
        skipped: 0,
    })
}

fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn curve_to_csv(curve: &Curve) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let var = curve.sweep_var.as_str();
    for p in &curve.points {
        let _ = writeln!(
            out,
            "{var},{},{},{},{}",
            p.sweep_value, p.x_ebn0_db, p.ebn0_linear, p.y
        );
    }
    out
}

pub fn curve_to_json(curve: &Curve) -> String {
    to_json(&json!({
        "meta": {
            "scheme": curve.scheme,
            "regime": curve.regime,
            "params": curve.params,
            "sweep_var": curve.sweep_var,
            "skipped": curve.skipped,
            "tool_version": env!("CARGO_PKG_VERSION"),
        },
        "points": curve.points,
    }))
}

fn curve_report(curve: &Curve, format: Format) -> Report {
    let body = match format {
        Format::Csv => curve_to_csv(curve),
        Format::Json => curve_to_json(curve),
    };
    Report {
        body,
        passed: true,
        skipped: curve.skipped,
    }
}

#[derive(Debug, Clone, Serialize)]
struct LimitRecord {
    name: &'static str,
    #[serde(flatten)]
    limit: LimitResult,
}

/// Every floor or limit with a closed form at these parameters.
pub fn applicable_limits(
    scheme: Scheme,
    regime: Regime,
    params: &SchemeParams,
) -> Vec<(&'static str, LimitResult)> {
    let mut out = Vec::new();
    if let Ok(l) = asymptotics::ebn0_floor(scheme, regime, params) {
        out.push(("floor", l));
    }
    let ptot = params.total_power();
    if ptot > 0.0 {
        if let Ok(l) =
            asymptotics::ebn0_rho_zero_limit(scheme, regime, params, RhoPath::FixedTotalPower(ptot))
        {
            out.push(("rho_to_zero_fixed_total_power", l));
        }
    }
    if let Ok(l) = asymptotics::ebn0_rho_zero_limit(scheme, regime, params, RhoPath::FixedUsers) {
        out.push(("rho_to_zero_fixed_users", l));
    }
    if (scheme, regime) == (Scheme::IrOma, Regime::Tin) {
        if let Ok(l) = asymptotics::ebn0_cbuf_infinity_ir_tin(params) {
            out.push(("c_buf_to_infinity", l));
        }
    }
    out
}

fn run_limits(config: &RunConfig) -> Result<Report> {
    let limits = applicable_limits(config.scheme, config.regime, &config.params);
    if limits.is_empty() {
        return Err(Error::UnsupportedCombination {
            what: "floor or limit",
            scheme: config.scheme,
            regime: config.regime,
        });
    }
    let body = match config.format {
        Format::Csv => {
            let mut out = String::from("name,kind,scheme,regime,value_linear,value_db\n");
            for (name, l) in &limits {
                let kind = serde_json::to_value(l.kind).expect("enum serializes");
                let _ = writeln!(
                    out,
                    "{name},{},{},{},{},{}",
                    kind.as_str().unwrap_or_default(),
                    config.scheme,
                    config.regime,
                    l.value_linear,
                    l.value_db
                );
            }
            out
        }
        Format::Json => {
            let records: Vec<LimitRecord> = limits
                .into_iter()
                .map(|(name, limit)| LimitRecord { name, limit })
                .collect();
            to_json(&json!({ "meta": meta(config), "limits": records }))
        }
    };
    Ok(Report {
        body,
        passed: true,
        skipped: 0,
    })
}

/// Outcome of a `validate` run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Validation {
    pub estimate: f64,
    pub half_width_95: f64,
    pub analytic: f64,
    pub relative_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn validate(config: &RunConfig) -> Result<Validation> {
    let p = &config.params;
    let slots = p.slots as usize;
    if slots < 1 {
        return Err(Error::InvalidParameter {
            name: "T",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let per_slot = config.users_per_slot;
    if per_slot < 1 {
        return Err(Error::InvalidParameter {
            name: "users_per_slot",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let sigs = linklevel::make_equicorrelated_signatures(config.m, per_slot, p.eta)?;
    let active: Vec<Vec<usize>> = vec![(0..per_slot).collect(); slots];
    let mc = MonteCarlo {
        trials: config.trials,
        seed: config.seed,
        workers: config.workers,
    };
    let est = linklevel::simulate_cc_noma_sinr(&sigs, p.rho, p.sigma2, &active, 0, &mc)?;
    let analytic = linklevel::analytic_sinr(Scheme::CcNoma, p.rho, &vec![per_slot; slots], p.eta)?;
    let relative_error = ((est.mean - analytic) / analytic).abs();
    Ok(Validation {
        estimate: est.mean,
        half_width_95: est.half_width_95,
        analytic,
        relative_error,
        tolerance: config.tolerance,
        passed: relative_error <= config.tolerance,
    })
}

fn run_validate(config: &RunConfig) -> Result<Report> {
    let v = validate(config)?;
    let verdict = if v.passed { "PASS" } else { "FAIL" };
    let p = &config.params;
    let body = match config.format {
        Format::Csv => format!(
            "eta,T,users_per_slot,rho,sigma2,m,trials,seed,estimate,half_width_95,analytic,relative_error,tolerance,verdict\n\
             {},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            p.eta,
            p.slots,
            config.users_per_slot,
            p.rho,
            p.sigma2,
            config.m,
            config.trials,
            config.seed,
            v.estimate,
            v.half_width_95,
            v.analytic,
            v.relative_error,
            v.tolerance,
            verdict
        ),
        Format::Json => to_json(&json!({
            "meta": {
                "eta": p.eta,
                "T": p.slots,
                "users_per_slot": config.users_per_slot,
                "rho": p.rho,
                "sigma2": p.sigma2,
                "m": config.m,
                "trials": config.trials,
                "seed": config.seed,
                "tool_version": env!("CARGO_PKG_VERSION"),
            },
            "result": v,
            "verdict": verdict,
        })),
    };
    Ok(Report {
        body,
        passed: v.passed,
        skipped: 0,
    })
}

/// Where `--output` lands after applying the output-directory variable.
pub fn output_path(requested: &Path, env_dir: Option<&Path>) -> PathBuf {
    match env_dir {
        Some(dir) if requested.is_relative() => dir.join(requested),
        _ => requested.to_path_buf(),
    }
}

/// Writes the report to the configured destination.
pub fn emit(config: &RunConfig, report: &Report) -> Result<()> {
    match &config.output {
        None => {
            print!("{}", report.body);
            Ok(())
        }
        Some(path) => {
            let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
            let path = output_path(path, env_dir.as_deref());
            std::fs::write(&path, &report.body)
                .map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))
        }
    }
}
