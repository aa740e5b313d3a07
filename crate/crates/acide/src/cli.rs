//! Command-line front end.
//!
//! ```text
//! acide <optimize|admit|plan|simulate|sweep> [flags]
//!
//!   --input PATH       configuration document (default: stdin)
//!   --output PATH      result file (default: stdout)
//!   --seed N           override the sweep seed
//!   --topology mesh|star   exchange pattern for `simulate` (default: mesh)
//!   --paper-display    floor CSV output to kbps/ms presentation
//!   --format csv|json  output format (default: csv)
//! ```
//!
//! Exit codes: 0 success, 2 parse/unit/usage error, 3 infeasible,
//! 4 no feasible cluster, 1 I/O failure. Failures print one JSON line to
//! stderr: `{"error":{"kind":...,"detail":...}}`.

use crate::admission::{admit_max_peers, AdmissionError};
use crate::config::{parse_config, ConfigError, ParsedConfig};
use crate::dynamic::{run_stream, DynamicError, PeerListSnapshot};
use crate::model::{Cluster, Topology};
use crate::optimizer::{minimize_bandwidth, OptimizerError};
use crate::report::{
    admit_csv, admit_json, optimize_csv, optimize_json, plan_csv, plan_json, simulate_csv,
    simulate_json, sweep_csv, sweep_json, DisplayMode, OutputFormat,
};
use crate::scenario::{sweep, sweep_fixed_average, ScenarioSpec, SweepResultRow};
use crate::schedule::simulate;
use serde_json::json;
use std::fmt;
use std::fs;
use std::io::Read;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NO_FEASIBLE_CLUSTER: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Optimize,
    Admit,
    Plan,
    Simulate,
    Sweep,
}

/// Parsed invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub seed: Option<u64>,
    pub topology: Topology,
    pub display: DisplayMode,
    pub format: OutputFormat,
}

const USAGE: &str = "usage: acide <optimize|admit|plan|simulate|sweep> \
[--input PATH] [--output PATH] [--seed N] [--topology mesh|star] \
[--paper-display] [--format csv|json]";

/// Parse argv (without the program name).
pub fn parse_args(args: &[String]) -> Result<RunConfig, CliError> {
    let mut iter = args.iter();
    let subcommand = match iter.next().map(String::as_str) {
        Some("optimize") => Subcommand::Optimize,
        Some("admit") => Subcommand::Admit,
        Some("plan") => Subcommand::Plan,
        Some("simulate") => Subcommand::Simulate,
        Some("sweep") => Subcommand::Sweep,
        Some(other) => return Err(CliError::usage(format!("unknown subcommand `{other}`"))),
        None => return Err(CliError::usage("missing subcommand")),
    };
    let mut config = RunConfig {
        subcommand,
        input_path: None,
        output_path: None,
        seed: None,
        topology: Topology::Mesh,
        display: DisplayMode::Raw,
        format: OutputFormat::Csv,
    };
    while let Some(flag) = iter.next() {
        match flag.as_str() {
            "--input" => {
                let v = iter
                    .next()
                    .ok_or_else(|| CliError::usage("--input needs a path"))?;
                config.input_path = Some(PathBuf::from(v));
            }
            "--output" => {
                let v = iter
                    .next()
                    .ok_or_else(|| CliError::usage("--output needs a path"))?;
                config.output_path = Some(PathBuf::from(v));
            }
            "--seed" => {
                let v = iter
                    .next()
                    .ok_or_else(|| CliError::usage("--seed needs a value"))?;
                config.seed = Some(
                    v.parse()
                        .map_err(|_| CliError::usage(format!("bad seed `{v}`")))?,
                );
            }
            "--topology" => {
                let v = iter
                    .next()
                    .ok_or_else(|| CliError::usage("--topology needs mesh or star"))?;
                config.topology = match v.as_str() {
                    "mesh" => Topology::Mesh,
                    "star" => Topology::Star,
                    other => return Err(CliError::usage(format!("unknown topology `{other}`"))),
                };
            }
            "--paper-display" => config.display = DisplayMode::Paper,
            "--format" => {
                let v = iter
                    .next()
                    .ok_or_else(|| CliError::usage("--format needs csv or json"))?;
                config.format = match v.as_str() {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    other => return Err(CliError::usage(format!("unknown format `{other}`"))),
                };
            }
            other => return Err(CliError::usage(format!("unknown flag `{other}`"))),
        }
    }
    Ok(config)
}

/// Run an invocation end to end; returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    let run_config = match parse_args(args) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match execute(&run_config) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(&e),
    }
}

fn fail(error: &CliError) -> i32 {
    let record = json!({
        "error": {
            "kind": error.kind,
            "detail": error.detail,
        }
    });
    eprintln!("{}", record);
    if error.kind == "USAGE" {
        eprintln!("{}", USAGE);
    }
    error.exit_code
}

fn execute(run_config: &RunConfig) -> Result<(), CliError> {
    let text = read_input(run_config)?;
    let parsed = parse_config(&text).map_err(CliError::from_config)?;

    let output = match run_config.subcommand {
        Subcommand::Optimize => run_optimize(&parsed, run_config)?,
        Subcommand::Admit => run_admit(&parsed, run_config)?,
        Subcommand::Plan => run_plan(&parsed, run_config)?,
        Subcommand::Simulate => run_simulate(&parsed, run_config)?,
        Subcommand::Sweep => run_sweep(&parsed, run_config)?,
    };

    write_output(run_config, &output.text)?;
    match output.exit {
        EXIT_OK => Ok(()),
        code => Err(CliError {
            kind: output.failure_kind,
            detail: output.failure_detail,
            exit_code: code,
        }),
    }
}

struct Emitted {
    text: String,
    exit: i32,
    failure_kind: &'static str,
    failure_detail: String,
}

impl Emitted {
    fn ok(text: String) -> Self {
        Self {
            text,
            exit: EXIT_OK,
            failure_kind: "",
            failure_detail: String::new(),
        }
    }
}

fn cluster_from(parsed: &ParsedConfig) -> Result<Cluster, CliError> {
    let stream = parsed
        .stream
        .ok_or_else(|| CliError::config("missing [stream] section"))?;
    if parsed.peers.is_empty() {
        return Err(CliError::config("missing [peers] section"));
    }
    Cluster::new(parsed.peers.clone(), stream).map_err(|e| CliError::config(e.to_string()))
}

fn run_optimize(parsed: &ParsedConfig, rc: &RunConfig) -> Result<Emitted, CliError> {
    let cluster = cluster_from(parsed)?;
    let alloc = minimize_bandwidth(&cluster).map_err(CliError::from_optimizer)?;
    let text = match rc.format {
        OutputFormat::Csv => optimize_csv(&cluster, &alloc, rc.display),
        OutputFormat::Json => pretty(optimize_json(&cluster, &alloc)),
    };
    Ok(Emitted::ok(text))
}

fn run_admit(parsed: &ParsedConfig, rc: &RunConfig) -> Result<Emitted, CliError> {
    let cluster = cluster_from(parsed)?;
    let reserved = parsed
        .reserved_bw_bps
        .ok_or_else(|| CliError::config("missing [admission] BW"))?;
    let result = admit_max_peers(&cluster.peers, &cluster.stream, reserved)
        .map_err(CliError::from_admission)?;
    let text = match rc.format {
        OutputFormat::Csv => admit_csv(&cluster.peers, &result, rc.display),
        OutputFormat::Json => pretty(admit_json(&cluster.peers, &result)),
    };
    Ok(Emitted::ok(text))
}

fn run_plan(parsed: &ParsedConfig, rc: &RunConfig) -> Result<Emitted, CliError> {
    let cluster = cluster_from(parsed)?;
    let churn = parsed
        .churn
        .as_ref()
        .ok_or_else(|| CliError::config("missing [churn] section"))?;
    let initial = PeerListSnapshot::new(1, cluster.peers.clone())
        .map_err(|e| CliError::config(e.to_string()))?;
    let plan = run_stream(&initial, &churn.events, &cluster.stream, churn.packages)
        .map_err(CliError::from_dynamic)?;
    let text = match rc.format {
        OutputFormat::Csv => plan_csv(&plan, &cluster.stream, rc.display),
        OutputFormat::Json => pretty(plan_json(&plan)),
    };
    // A halted stream still emits the completed packages, then reports the
    // infeasible one through the exit code.
    match &plan.halted {
        None => Ok(Emitted::ok(text)),
        Some((package, detail)) => Ok(Emitted {
            text,
            exit: EXIT_INFEASIBLE,
            failure_kind: "INFEASIBLE",
            failure_detail: format!("package {}: {}", package, detail),
        }),
    }
}

fn run_simulate(parsed: &ParsedConfig, rc: &RunConfig) -> Result<Emitted, CliError> {
    let cluster = cluster_from(parsed)?;
    let alloc = minimize_bandwidth(&cluster).map_err(CliError::from_optimizer)?;
    let report = simulate(&cluster, &alloc.block_bits, &alloc.peer_bw_bps, rc.topology)
        .map_err(|e| CliError::config(e.to_string()))?;
    let text = match rc.format {
        OutputFormat::Csv => simulate_csv(
            &cluster,
            &alloc.block_bits,
            &alloc.peer_bw_bps,
            &report,
            rc.display,
        ),
        OutputFormat::Json => pretty(simulate_json(
            &cluster,
            &alloc.block_bits,
            &alloc.peer_bw_bps,
            &report,
        )),
    };
    Ok(Emitted::ok(text))
}

fn run_sweep(parsed: &ParsedConfig, rc: &RunConfig) -> Result<Emitted, CliError> {
    let stream = parsed
        .stream
        .ok_or_else(|| CliError::config("missing [stream] section"))?;
    let sweep_config = parsed
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("missing [sweep] section"))?;
    let seed = rc.seed.unwrap_or(sweep_config.seed);

    let specs: Vec<ScenarioSpec> = sweep_config
        .random
        .iter()
        .enumerate()
        .map(|(i, row)| ScenarioSpec {
            n: row.n,
            upload_range_bps: row.upload_range_bps,
            download_range_bps: row.download_range_bps,
            stream,
            // Stable per-row seeds derived from the run seed.
            seed: seed.wrapping_add(i as u64),
        })
        .collect();

    let mut rows: Vec<SweepResultRow> =
        sweep(&specs, &sweep_config.ratios_bps).map_err(|e| CliError::config(e.to_string()))?;
    rows.extend(sweep_fixed_average(
        &sweep_config.fixed,
        &stream,
        &sweep_config.ratios_bps,
    ));

    let text = match rc.format {
        OutputFormat::Csv => sweep_csv(&rows, rc.display),
        OutputFormat::Json => pretty(sweep_json(&rows)),
    };
    Ok(Emitted::ok(text))
}

fn pretty(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("value trees always serialize");
    s.push('\n');
    s
}

fn read_input(rc: &RunConfig) -> Result<String, CliError> {
    match &rc.input_path {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::io(format!("{path:?}: {e}"))),
        None => {
            let mut buffer = String::new();
            std::io::stdin()
                .read_to_string(&mut buffer)
                .map_err(|e| CliError::io(format!("stdin: {e}")))?;
            Ok(buffer)
        }
    }
}

fn write_output(rc: &RunConfig, text: &str) -> Result<(), CliError> {
    match &rc.output_path {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(format!("{path:?}: {e}"))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: &'static str,
    pub detail: String,
    pub exit_code: i32,
}

impl CliError {
    fn usage(detail: impl Into<String>) -> Self {
        Self {
            kind: "USAGE",
            detail: detail.into(),
            exit_code: EXIT_PARSE,
        }
    }

    fn config(detail: impl Into<String>) -> Self {
        Self {
            kind: "PARSE_ERROR",
            detail: detail.into(),
            exit_code: EXIT_PARSE,
        }
    }

    fn io(detail: impl Into<String>) -> Self {
        Self {
            kind: "IO_ERROR",
            detail: detail.into(),
            exit_code: EXIT_IO,
        }
    }

    fn from_config(e: ConfigError) -> Self {
        Self {
            kind: match e.kind() {
                "UNIT_ERROR" => "UNIT_ERROR",
                _ => "PARSE_ERROR",
            },
            detail: e.to_string(),
            exit_code: EXIT_PARSE,
        }
    }

    fn from_optimizer(e: OptimizerError) -> Self {
        let kind = match &e {
            OptimizerError::Infeasible { .. } => "INFEASIBLE",
            OptimizerError::AssumptionsViolated(_) => "ASSUMPTIONS_VIOLATED",
            _ => "OPTIMIZER_ERROR",
        };
        Self {
            kind,
            detail: e.to_string(),
            exit_code: EXIT_INFEASIBLE,
        }
    }

    fn from_admission(e: AdmissionError) -> Self {
        match &e {
            AdmissionError::NoFeasibleCluster { .. } => Self {
                kind: "NO_FEASIBLE_CLUSTER",
                detail: e.to_string(),
                exit_code: EXIT_NO_FEASIBLE_CLUSTER,
            },
            AdmissionError::Optimizer(inner) => Self::from_optimizer(inner.clone()),
            _ => Self::config(e.to_string()),
        }
    }

    fn from_dynamic(e: DynamicError) -> Self {
        match &e {
            DynamicError::Optimizer(inner) => Self::from_optimizer(inner.clone()),
            _ => Self::config(e.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)
    }
}

impl std::error::Error for CliError {}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_flags() {
        let rc = parse_args(&args(&[
            "simulate",
            "--input",
            "cluster.conf",
            "--topology",
            "star",
            "--paper-display",
            "--format",
            "json",
            "--seed",
            "7",
        ]))
        .unwrap();
        assert_eq!(rc.subcommand, Subcommand::Simulate);
        assert_eq!(rc.input_path, Some(PathBuf::from("cluster.conf")));
        assert_eq!(rc.topology, Topology::Star);
        assert_eq!(rc.display, DisplayMode::Paper);
        assert_eq!(rc.format, OutputFormat::Json);
        assert_eq!(rc.seed, Some(7));
    }

    #[test]
    fn rejects_unknown_input() {
        assert!(parse_args(&args(&["conquer"])).is_err());
        assert!(parse_args(&args(&[])).is_err());
        assert!(parse_args(&args(&["optimize", "--bogus"])).is_err());
        assert!(parse_args(&args(&["optimize", "--topology", "ring"])).is_err());
    }
}
