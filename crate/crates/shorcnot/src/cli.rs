//! Argument parsing and command dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use shorcnot_core::cost::{self, CostFormulaId};
use shorcnot_core::shor::{self, Evaluation, FactorOptions};

use crate::qasm;
use crate::registry::{CircuitKind, CircuitSpec};
use crate::report::{self, CircuitSummary, EstimateReport, FactorReport, VerifyOutput};

/// Verification domains above this size need `--sample`.
pub const MAX_EXHAUSTIVE_POINTS: u128 = 1 << 20;

#[derive(Debug, Parser)]
#[command(
    name = "shorcnot",
    version,
    about = "CNOT-count models and reversible circuits for Shor's algorithm"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct CircuitArgs {
    /// Circuit family, e.g. `adder`, `mod-add`, `montgomery-full`, `modexp`.
    #[arg(long, value_parser = parse_kind)]
    pub circuit: CircuitKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub modulus: Option<u64>,
    /// Classical constant for the constant adders and comparator.
    #[arg(long)]
    pub constant: Option<u64>,
    /// Exponentiation base (`modexp`, `lookup`).
    #[arg(long)]
    pub base: Option<u64>,
    /// Window size (`modexp`, `lookup`).
    #[arg(long)]
    pub window: Option<usize>,
}

impl CircuitArgs {
    fn spec(&self) -> CircuitSpec {
        CircuitSpec {
            kind: self.circuit,
            n: self.n,
            modulus: self.modulus,
            constant: self.constant,
            base: self.base,
            window: self.window,
        }
    }
}

fn parse_kind(s: &str) -> Result<CircuitKind, String> {
    s.parse()
}

fn parse_primitive(s: &str) -> Result<CostFormulaId, String> {
    CostFormulaId::parse(s).ok_or_else(|| format!("unknown primitive `{s}`"))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a circuit and summarize it (text format prints OpenQASM).
    Build(CircuitArgs),
    /// Model and measured CNOT counts for one primitive, or a full cost
    /// report when no primitive is given.
    Count {
        #[arg(long, value_parser = parse_primitive)]
        primitive: Option<CostFormulaId>,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = cost::DEFAULT_T_CNOT)]
        t_cnot: f64,
        #[arg(long, default_value_t = 1.0)]
        coding_factor: f64,
    },
    /// Check a circuit against its reference oracle.
    Verify {
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Check this many random points instead of the full domain.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Window size minimizing the exponentiation count.
    OptimizeWindow {
        #[arg(long)]
        n: u64,
    },
    /// Wall-clock estimate of one run.
    Estimate {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = cost::DEFAULT_T_CNOT)]
        t_cnot: f64,
        #[arg(long, default_value_t = 1.0)]
        coding_factor: f64,
    },
    /// Fit the optimal-window count against n³/log₂n.
    Fit {
        #[arg(long, value_delimiter = ',', default_values_t = [256u64, 512, 1024, 2048, 4096, 8192])]
        n_values: Vec<u64>,
    },
    /// Emulate Shor's algorithm on a small modulus.
    Factor {
        #[arg(long)]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Measurement samples per order-finding run.
        #[arg(long, default_value_t = 1)]
        shots: usize,
        #[arg(long, default_value_t = 50)]
        max_attempts: usize,
        /// Window size of the exponentiation circuit (default: optimal).
        #[arg(long)]
        window: Option<usize>,
        /// Redraw bases that share a factor with the modulus instead of
        /// returning that factor, so every attempt runs order finding.
        #[arg(long)]
        no_gcd_shortcut: bool,
    },
    /// Write a circuit as OpenQASM 2.0.
    Export(CircuitArgs),
}

/// Failure classes with their exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Io = 1,
    Validation = 2,
    Verification = 3,
}

impl Failure {
    fn as_str(self) -> &'static str {
        match self {
            Self::Io => "io",
            Self::Validation => "validation",
            Self::Verification => "verification",
        }
    }
}

#[derive(Debug)]
pub struct CommandError {
    pub kind: Failure,
    pub message: String,
}

impl CommandError {
    fn validation(e: impl ToString) -> Self {
        Self {
            kind: Failure::Validation,
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind as i32
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind.as_str(), "message": self.message } })
            .to_string()
    }
}

impl From<shorcnot_core::Error> for CommandError {
    fn from(e: shorcnot_core::Error) -> Self {
        Self::validation(e)
    }
}

/// What a command produced, before formatting.
enum Output {
    Json(serde_json::Value),
    Text(String),
    /// Written, but the command still failed.
    Failed(serde_json::Value, CommandError),
}

/// Fails when a count is too large for a JSON number.
fn json<T: Serialize>(v: &T) -> Result<Output, CommandError> {
    serde_json::to_value(v)
        .map(Output::Json)
        .map_err(|e| CommandError::validation(format!("result not representable as JSON: {e}")))
}

fn execute(cli: &Cli) -> Result<Output, CommandError> {
    Ok(match &cli.command {
        Command::Build(args) => {
            let spec = args.spec();
            let c = spec.build()?;
            match cli.format {
                Format::Text => Output::Text(qasm::to_qasm(&c)),
                Format::Json => {
                    let model = spec
                        .kind
                        .formula()
                        .map(|id| cost::primitive_cnot_count(id, spec.n as u64));
                    json(&CircuitSummary::new(spec.kind.as_str(), spec.n, &c, model))?
                }
            }
        }
        Command::Export(args) => Output::Text(qasm::to_qasm(&args.spec().build()?)),
        Command::Count {
            primitive,
            n,
            t_cnot,
            coding_factor,
        } => match primitive {
            Some(id) => {
                let entry = report::primitive_entry(*id, *n as usize)?;
                json(&serde_json::json!({
                    "primitive": id.as_str(),
                    "n": n,
                    "model": entry.model,
                    "measured": entry.measured,
                    "measured_raw": entry.measured_raw,
                }))?
            }
            None => json(&report::cost_report(*n, *t_cnot, *coding_factor)?)?,
        },
        Command::Verify {
            circuit,
            sample,
            seed,
        } => {
            let spec = circuit.spec();
            let size = spec.domain_size()?;
            if sample.is_none() && size > MAX_EXHAUSTIVE_POINTS {
                return Err(CommandError::validation(format!(
                    "domain has {size} points (limit {MAX_EXHAUSTIVE_POINTS}); pass --sample K"
                )));
            }
            let c = spec.build()?;
            let r = spec.verify(&c, *sample, *seed)?;
            let out = VerifyOutput::new(&spec, sample.is_none(), r);
            let value = serde_json::to_value(&out).map_err(CommandError::validation)?;
            if out.passed {
                Output::Json(value)
            } else {
                let err = CommandError {
                    kind: Failure::Verification,
                    message: format!("{} failed its oracle", spec.kind),
                };
                Output::Failed(value, err)
            }
        }
        Command::OptimizeWindow { n } => json(&report::optimize_report(*n)?)?,
        Command::Estimate {
            n,
            t_cnot,
            coding_factor,
        } => {
            let runtime = cost::runtime_estimate(*n, *t_cnot, *coding_factor)?;
            json(&EstimateReport {
                n: *n,
                runtime: runtime.into(),
                lower_bound_cnots: cost::lower_bound_count(*n)?,
            })?
        }
        Command::Fit { n_values } => json(&report::fit_report(n_values)?)?,
        Command::Factor {
            modulus,
            seed,
            shots,
            max_attempts,
            window,
            no_gcd_shortcut,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let opts = FactorOptions {
                max_attempts: *max_attempts,
                shots: *shots,
                evaluation: Evaluation::Circuit { window: *window },
                gcd_shortcut: !no_gcd_shortcut,
            };
            let outcome = shor::factor(*modulus, &opts, &mut rng)?;
            json(&FactorReport::from(&outcome))?
        }
    })
}

fn render(value: &serde_json::Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Text => text_lines(value, ""),
    }
}

/// Flattens a JSON value into `path = value` lines.
fn text_lines(v: &serde_json::Value, prefix: &str) -> String {
    use serde_json::Value;
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().map(|(k, v)| text_lines(v, &join(k))).collect(),
        Value::Array(a) if a.iter().any(|x| x.is_object()) => a
            .iter()
            .enumerate()
            .map(|(i, v)| text_lines(v, &join(&i.to_string())))
            .collect(),
        other => format!("{prefix} = {other}\n"),
    }
}

/// Runs one parsed command, writing its output to `--out` or `stdout`.
/// Returns the process exit status.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> i32 {
    let (body, failure) = match execute(cli) {
        Ok(Output::Json(v)) => (render(&v, cli.format), None),
        Ok(Output::Text(t)) => (t, None),
        Ok(Output::Failed(v, e)) => (render(&v, cli.format), Some(e)),
        Err(e) => {
            let _ = writeln!(stdout, "{}", e.to_json());
            return e.exit_code();
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &body),
        None => stdout.write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        let e = CommandError {
            kind: Failure::Io,
            message: e.to_string(),
        };
        let _ = writeln!(stdout, "{}", e.to_json());
        return e.exit_code();
    }
    match failure {
        Some(e) => {
            let _ = writeln!(stdout, "{}", e.to_json());
            e.exit_code()
        }
        None => 0,
    }
}
