//! `eavesdrop` command-line frontend.
//!
//! Exit codes: 0 success, 1 Monte-Carlo validation failure, 2 usage or
//! parameter error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::closed_form::{solve_optimal, ClosedFormSolution};
use crate::error::Error;
use crate::experiments::{
    db_grid, format_cell, sweep_gain, sweep_q, GainRow, QRow, Scheme, SweepTable, TableRow,
};
use crate::params::{canonical, db_to_linear, ParamsBuilder, PowerDb, SystemParams};
use crate::validation::{run_validation, ValidationConfig, ValidationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "eavesdrop", version, about = "Optimal jamming power for proactive eavesdropping over Rayleigh fading")]
pub struct Cli {
    #[command(flatten)]
    pub params: ParamArgs,

    #[command(flatten)]
    pub output: OutputArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Scenario overrides. Unset flags keep the reference scenario.
#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Suspicious transmit power, linear
    #[arg(long = "p", global = true, conflicts_with = "p_db")]
    pub p: Option<f64>,
    /// Suspicious transmit power in dB [default: 20]
    #[arg(long = "p-db", global = true, allow_negative_numbers = true)]
    pub p_db: Option<f64>,
    /// Maximum jamming power, linear
    #[arg(long = "qmax", global = true, conflicts_with = "qmax_db")]
    pub qmax: Option<f64>,
    /// Maximum jamming power in dB [default: 30]
    #[arg(long = "qmax-db", global = true, allow_negative_numbers = true)]
    pub qmax_db: Option<f64>,
    /// Target outage probability at the suspicious receiver [default: 0.05]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Fading rate of the suspicious link [default: 1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda0: Option<f64>,
    /// Fading rate of the eavesdropping link [default: 10]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda1: Option<f64>,
    /// Fading rate of the jamming link [default: 10]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda2: Option<f64>,
    /// Noise power at the suspicious receiver [default: 1]
    #[arg(long = "sigma0-sq", global = true, allow_negative_numbers = true)]
    pub sigma0_sq: Option<f64>,
    /// Noise power at the monitor [default: 1]
    #[arg(long = "sigma1-sq", global = true, allow_negative_numbers = true)]
    pub sigma1_sq: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format (solve defaults to json, sweeps to csv, mc-validate to a text table)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Monte-Carlo sample count
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Number of swept grid points
    #[arg(long, global = true)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form optimal rate and jamming power
    Solve,
    /// Rate, non-outage probability and average eavesdropping rate versus jamming power
    SweepQ {
        #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
        from_db: f64,
        #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
        to_db: f64,
        /// Omit the Q = 0 row
        #[arg(long)]
        no_zero: bool,
    },
    /// Average eavesdropping rate of each scheme versus eavesdropping/jamming gain
    SweepGain {
        #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
        from_db: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        to_db: f64,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SchemeArg::Optimal, SchemeArg::Passive, SchemeArg::Constant])]
        schemes: Vec<SchemeArg>,
    },
    /// Check every closed form against Monte Carlo at randomized operating points
    McValidate {
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, hide = true, default_value_t = 0.0, allow_negative_numbers = true)]
        perturb_closed_form: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Optimal,
    Passive,
    Constant,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Optimal => Scheme::Optimal,
            SchemeArg::Passive => Scheme::Passive,
            SchemeArg::Constant => Scheme::ConstantPower,
        }
    }
}

/// Usage-level failure: reported on one line, exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn flag_for(field: &str) -> &'static str {
    match field {
        "p_tx" => "--p/--p-db",
        "sigma0_sq" => "--sigma0-sq",
        "sigma1_sq" => "--sigma1-sq",
        "lambda0" => "--lambda0",
        "lambda1" => "--lambda1",
        "lambda2" => "--lambda2",
        "delta" => "--delta",
        "q_max" => "--qmax/--qmax-db",
        _ => "<unknown>",
    }
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<SystemParams<f64>, Error> {
        let db = |v: f64| db_to_linear(PowerDb(v)).get();
        let b = ParamsBuilder {
            p_tx: self.p.or(self.p_db.map(db)).unwrap_or(canonical::P_TX),
            sigma0_sq: self.sigma0_sq.unwrap_or(canonical::SIGMA0_SQ),
            sigma1_sq: self.sigma1_sq.unwrap_or(canonical::SIGMA1_SQ),
            lambda0: self.lambda0.unwrap_or(canonical::LAMBDA0),
            lambda1: self.lambda1.unwrap_or(canonical::LAMBDA1),
            lambda2: self.lambda2.unwrap_or(canonical::LAMBDA2),
            delta: self.delta.unwrap_or(canonical::DELTA),
            q_max: self.qmax.or(self.qmax_db.map(db)).unwrap_or(canonical::Q_MAX),
        };
        b.build()
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> anyhow::Result<i32> {
    let params = cli.params.resolve().map_err(|e| match e {
        Error::InvalidParam { field, value, constraint } => {
            Usage(format!("{}: invalid value {value} ({field} must satisfy {constraint})", flag_for(field)))
        }
        other => Usage(other.to_string()),
    })?;
    let out = &cli.output;

    let (text, code) = match &cli.command {
        Command::Solve => {
            let s = solve_optimal(&params);
            let text = match out.format.unwrap_or(Format::Json) {
                Format::Json => format!("{}\n", Value::Object(solution_json(&params, &s))),
                Format::Csv => solution_csv(&params, &s),
            };
            (text, EXIT_OK)
        }
        Command::SweepQ { from_db, to_db, no_zero } => {
            let n = out.grid.unwrap_or(200);
            check_range(*from_db, *to_db, n)?;
            let mut grid = if *no_zero { Vec::new() } else { vec![0.0] };
            grid.extend(db_grid(*from_db, *to_db, n));
            let table = sweep_q(&params, &grid).map_err(|e| Usage(e.to_string()))?;
            (render_table(&table, out.format), EXIT_OK)
        }
        Command::SweepGain { from_db, to_db, schemes } => {
            let n = out.grid.unwrap_or(101);
            check_range(*from_db, *to_db, n)?;
            let schemes: Vec<Scheme> = schemes.iter().copied().map(Scheme::from).collect();
            let table = sweep_gain(&params, &db_grid(*from_db, *to_db, n), &schemes)
                .map_err(|e| Usage(e.to_string()))?;
            (render_table(&table, out.format), EXIT_OK)
        }
        Command::McValidate { points, perturb_closed_form } => {
            if out.samples == 0 {
                return Err(Usage("--samples: must be >= 1".into()).into());
            }
            if out.samples < 10_000 {
                writeln!(stderr, "warning: --samples {} is below 10000; bands will be wide", out.samples)?;
            }
            let cfg = ValidationConfig {
                n_samples: out.samples,
                seed: out.seed,
                points: *points,
                perturbation: *perturb_closed_form,
            };
            let report = run_validation(&params, &cfg)?;
            let code = if report.all_pass() { EXIT_OK } else { EXIT_VALIDATION_FAILED };
            (render_report(&report, out.format), code)
        }
    };

    match &out.out {
        Some(path) => std::fs::write(path, text.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(code)
}

fn check_range(from_db: f64, to_db: f64, n: usize) -> Result<(), Usage> {
    if n < 2 {
        return Err(Usage(format!("--grid: need at least 2 points, got {n}")));
    }
    if !(from_db.is_finite() && to_db.is_finite() && from_db < to_db) {
        return Err(Usage(format!("--from-db/--to-db: need finite from < to, got {from_db} .. {to_db}")));
    }
    Ok(())
}

fn db_or_null(v: f64) -> Value {
    if v > 0.0 {
        json!(10.0 * v.log10())
    } else {
        Value::Null
    }
}

fn solution_json(params: &SystemParams<f64>, s: &ClosedFormSolution<f64>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("regime".into(), json!(s.regime.as_str()));
    m.insert("r_star".into(), json!(s.r_star.get()));
    m.insert("r_opt".into(), json!(s.r_opt.get()));
    m.insert("q_opt".into(), json!(s.q_opt.get()));
    m.insert("q_opt_db".into(), db_or_null(s.q_opt.get()));
    m.insert("r_zero_jam".into(), json!(s.r_zero_jam.get()));
    m.insert("r_max_jam".into(), json!(s.r_max_jam.get()));
    m.insert("avg_rate_opt".into(), json!(s.avg_rate_opt.get()));
    m.insert("p_tx".into(), json!(params.p_tx()));
    m.insert("p_tx_db".into(), db_or_null(params.p_tx()));
    m.insert("q_max".into(), json!(params.q_max()));
    m.insert("q_max_db".into(), db_or_null(params.q_max()));
    m.insert("delta".into(), json!(params.delta()));
    m.insert("lambda0".into(), json!(params.lambda0()));
    m.insert("lambda1".into(), json!(params.lambda1()));
    m.insert("lambda2".into(), json!(params.lambda2()));
    m.insert("sigma0_sq".into(), json!(params.sigma0_sq()));
    m.insert("sigma1_sq".into(), json!(params.sigma1_sq()));
    m
}

fn solution_csv(params: &SystemParams<f64>, s: &ClosedFormSolution<f64>) -> String {
    let m = solution_json(params, s);
    let header: Vec<&str> = m.keys().map(String::as_str).collect();
    let cells: Vec<String> = m
        .values()
        .map(|v| match v {
            Value::Number(n) => format_cell(n.as_f64()),
            Value::String(s) => s.clone(),
            _ => String::new(),
        })
        .collect();
    format!("{}\n{}\n", header.join(","), cells.join(","))
}

trait Renderable {
    fn csv(&self) -> String;
    fn json(&self) -> Value;
}

fn rows_json<R: TableRow<f64>>(rows: &[R]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| {
                let obj: Map<String, Value> = R::HEADER
                    .iter()
                    .zip(row.cells())
                    .map(|(k, v)| (k.to_string(), v.map_or(Value::Null, |v| json!(v))))
                    .collect();
                Value::Object(obj)
            })
            .collect(),
    )
}

impl Renderable for SweepTable<QRow<f64>> {
    fn csv(&self) -> String {
        self.to_csv()
    }
    fn json(&self) -> Value {
        rows_json(&self.rows)
    }
}

impl Renderable for SweepTable<GainRow<f64>> {
    fn csv(&self) -> String {
        self.to_csv()
    }
    fn json(&self) -> Value {
        rows_json(&self.rows)
    }
}

fn render_table(t: &impl Renderable, format: Option<Format>) -> String {
    match format.unwrap_or(Format::Csv) {
        Format::Csv => t.csv(),
        Format::Json => format!("{}\n", t.json()),
    }
}

const REPORT_HEADER: [&str; 10] = [
    "quantity", "point", "r", "q", "closed_form", "mc_mean", "std_error", "band", "pass", "seed",
];

fn render_report(report: &ValidationReport, format: Option<Format>) -> String {
    let point = |p: Option<usize>| p.map_or("optimum".to_string(), |i| i.to_string());
    match format {
        Some(Format::Csv) => {
            let mut s = REPORT_HEADER.join(",") + "\n";
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.quantity.as_str(),
                    point(r.at.point),
                    format_cell(Some(r.at.r)),
                    format_cell(Some(r.at.q)),
                    format_cell(Some(r.closed_form)),
                    format_cell(Some(r.mc_mean)),
                    format_cell(Some(r.std_error)),
                    format_cell(Some(r.band)),
                    r.pass,
                    report.seed,
                );
            }
            s
        }
        Some(Format::Json) => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "quantity": r.quantity.as_str(),
                        "point": point(r.at.point),
                        "r": r.at.r,
                        "q": r.at.q,
                        "closed_form": r.closed_form,
                        "mc_mean": r.mc_mean,
                        "std_error": r.std_error,
                        "band": r.band,
                        "pass": r.pass,
                    })
                })
                .collect();
            format!(
                "{}\n",
                json!({
                    "n_samples": report.n_samples,
                    "seed": report.seed,
                    "all_pass": report.all_pass(),
                    "rows": rows,
                })
            )
        }
        None => {
            let mut s = format!(
                "{:<20} {:>7} {:>10} {:>11} {:>12} {:>12} {:>11} {:>5}\n",
                "quantity", "point", "r", "q", "closed_form", "mc_mean", "std_error", "4σ"
            );
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "{:<20} {:>7} {:>10.6} {:>11.4e} {:>12.8} {:>12.8} {:>11.3e} {:>5}",
                    r.quantity.as_str(),
                    point(r.at.point),
                    r.at.r,
                    r.at.q,
                    r.closed_form,
                    r.mc_mean,
                    r.std_error,
                    if r.pass { "pass" } else { "FAIL" },
                );
            }
            let failed = report.rows.iter().filter(|r| !r.pass).count();
            let _ = writeln!(
                s,
                "{} checks, {} failed (n = {}, seed = {})",
                report.rows.len(),
                failed,
                report.n_samples,
                report.seed
            );
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["eavesdrop"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn db_and_linear_flags() {
        let cli = Cli::try_parse_from(["eavesdrop", "solve", "--p-db", "30", "--qmax", "5"]).unwrap();
        let p = cli.params.resolve().unwrap();
        assert_eq!(p.p_tx(), 1000.0);
        assert_eq!(p.q_max(), 5.0);
        assert!(Cli::try_parse_from(["eavesdrop", "solve", "--p", "3", "--p-db", "3"]).is_err());
    }

    #[test]
    fn invalid_param_names_flag() {
        let (code, out, err) = call(&["solve", "--lambda2", "-4"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.is_empty());
        assert_eq!(err.lines().count(), 1);
        assert!(err.contains("--lambda2"), "{err}");
        let (code, _, err) = call(&["--qmax", "0", "solve"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--qmax"), "{err}");
    }

    #[test]
    fn bad_grid_flags() {
        assert_eq!(call(&["sweep-q", "--grid", "1"]).0, EXIT_USAGE);
        assert_eq!(call(&["sweep-gain", "--from-db", "3", "--to-db", "1"]).0, EXIT_USAGE);
        assert_eq!(call(&["sweep-gain", "--schemes", "bogus"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    }

    #[test]
    fn solve_csv_has_one_row() {
        let (code, out, _) = call(&["solve", "--format", "csv"]);
        assert_eq!(code, 0);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("regime,r_star,r_opt,q_opt"));
        assert!(lines[1].starts_with("Interior,"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("sweep-gain"));
    }
}
