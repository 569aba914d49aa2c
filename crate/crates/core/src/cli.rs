//! The `qir` command line. [`run`] holds the whole program so that it can be
//! driven from tests; the binary only forwards the process arguments.
//!
//! Exit codes: 0 success, 1 semantic failure (unsupported profile, transform
//! or runtime error), 2 parse failure, 3 I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::circuit::{circuit_from_base_qir, circuit_to_base_qir, export_openqasm2, import_openqasm2_with_warnings};
use crate::frontend::{parse_module, print_module, validate_profile, ParseError, Profile, QirModule};
use crate::runtime::{interpret, RuntimeOptions};
use crate::transforms::{lower_to_base_with_cap, unroll_and_fold, DEFAULT_ITERATION_CAP};

#[derive(Debug, Parser)]
#[command(name = "qir", version, about = "Validate, transform, transpile and run QIR programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Qir,
    Qasm2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    QirBase,
    Qasm2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, clap::Args)]
struct Input {
    /// Program file (`.ll` for QIR, `.qasm` for OpenQASM 2).
    path: PathBuf,
    /// Override the format implied by the file extension.
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report the profile a program fits and why it misses stricter ones.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Convert to base-profile QIR or to OpenQASM 2.
    Transpile {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long, default_value_t = DEFAULT_ITERATION_CAP)]
        iteration_cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unroll loops and fold constants, printing the residual QIR.
    Unroll {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_ITERATION_CAP)]
        iteration_cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the program and report measurement counts.
    Run {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(1..))]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        #[arg(long, default_value_t = 26)]
        max_qubits: usize,
        /// Instructions per shot before the run is aborted.
        #[arg(long, default_value_t = 10_000_000)]
        step_limit: u64,
        /// Include every shot's bitstring.
        #[arg(long)]
        memory: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Semantic(String),
    Parse(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Semantic(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

fn semantic(e: impl std::fmt::Display) -> Failure {
    Failure::Semantic(e.to_string())
}

enum Program {
    Qir(QirModule),
    Qasm(crate::circuit::QuantumCircuit),
}

impl Program {
    fn into_module(self) -> QirModule {
        match self {
            Program::Qir(m) => m,
            Program::Qasm(c) => circuit_to_base_qir(&c),
        }
    }
}

fn load(input: &Input, stderr: &mut dyn Write) -> Result<Program, Failure> {
    let text = std::fs::read_to_string(&input.path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", input.path.display())))?;
    let format = input.input_format.unwrap_or_else(|| detect(&input.path));
    let parse_failure = |e: ParseError| Failure::Parse(format!("{}: {e}", input.path.display()));
    match format {
        InputFormat::Qir => parse_module(&text).map(Program::Qir).map_err(parse_failure),
        InputFormat::Qasm2 => {
            let (c, warnings) = import_openqasm2_with_warnings(&text).map_err(parse_failure)?;
            for w in warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            Ok(Program::Qasm(c))
        }
    }
}

fn detect(path: &Path) -> InputFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("qasm") => InputFormat::Qasm2,
        _ => InputFormat::Qir,
    }
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Validate { input } => {
            let module = load(&input, stderr)?.into_module();
            let report = validate_profile(&module);
            let mut text = format!("{}\n", report.profile);
            for v in &report.violations {
                text.push_str(&format!("violation: {v}\n"));
            }
            if report.profile == Profile::AdaptiveSubset {
                for v in &report.base_violations {
                    text.push_str(&format!("not base: {v}\n"));
                }
            }
            for w in &report.warnings {
                text.push_str(&format!("warning: {w}\n"));
            }
            emit(&text, None, stdout)?;
            if report.profile == Profile::Unsupported {
                return Err(Failure::Semantic("module uses constructs outside the supported subset".into()));
            }
            Ok(())
        }
        Command::Transpile { input, to, iteration_cap, out } => {
            let text = match (load(&input, stderr)?, to) {
                (Program::Qasm(c), Target::Qasm2) => export_openqasm2(&c),
                (Program::Qasm(c), Target::QirBase) => print_module(&circuit_to_base_qir(&c)),
                (Program::Qir(m), target) => {
                    let base = if validate_profile(&m).profile == Profile::Base {
                        m
                    } else {
                        lower_to_base_with_cap(&m, iteration_cap).map_err(semantic)?
                    };
                    match target {
                        Target::QirBase => print_module(&base),
                        Target::Qasm2 => {
                            let c = circuit_from_base_qir(&base).map_err(|e| semantic(format!("ConversionError: {e}")))?;
                            export_openqasm2(&c)
                        }
                    }
                }
            };
            emit(&text, out.as_deref(), stdout)
        }
        Command::Unroll { input, iteration_cap, out } => {
            let module = load(&input, stderr)?.into_module();
            let unrolled = unroll_and_fold(&module, iteration_cap).map_err(semantic)?;
            emit(&print_module(&unrolled), out.as_deref(), stdout)
        }
        Command::Run { input, shots, seed, format, max_qubits, step_limit, memory, out } => {
            let module = load(&input, stderr)?.into_module();
            let options = RuntimeOptions { max_qubits, step_limit };
            let result = interpret(&module, shots, seed, &options).map_err(semantic)?;
            let mut text = match format {
                OutputFormat::Json => result.to_json(memory),
                OutputFormat::Text => result.to_text(memory),
            };
            if !text.ends_with('\n') {
                text.push('\n');
            }
            emit(&text, out.as_deref(), stdout)
        }
    }
}

/// Runs the command line given by `args` (including the program name) and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(f) => {
            let (Failure::Semantic(msg) | Failure::Parse(msg) | Failure::Io(msg)) = &f;
            let what = match f {
                Failure::Semantic(_) => "error",
                Failure::Parse(_) => "parse error",
                Failure::Io(_) => "I/O error",
            };
            let _ = writeln!(stderr, "{what}: {msg}");
            f.code()
        }
    }
}
