//! The `agentcheck` command line.
//!
//! Exit codes: `0` verdict true or model valid, `1` verdict false, `2` input
//! error (unreadable file, parse or validation failure, unknown name, no
//! capable checker), `3` internal error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use agentcheck_core::checkers::VerificationResult;
use agentcheck_core::kernel::{
    classify_formula, classify_model, verify_document, Method, Registry, SelectionPolicy,
    VerifyError, VerifyOptions,
};
use agentcheck_core::logics::parse_formula;
use agentcheck_core::models::{export_dot, parse_model_text, ModelDocument, ModelError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Top-level keys of `check --json` output, in order.
pub const CHECK_JSON_KEYS: [&str; 12] = [
    "model_class",
    "logic_class",
    "formula",
    "overall",
    "per_initial",
    "satisfaction_set",
    "satisfying_states",
    "method",
    "checker",
    "trace",
    "witness",
    "elapsed_ms",
];

/// Keys of the `trace` object in `check --json` output.
pub const TRACE_JSON_KEYS: [&str; 7] = [
    "model_class",
    "logic_class",
    "state_count",
    "preferred_method",
    "used_method",
    "fallback_applied",
    "note",
];

#[derive(Debug, Parser)]
#[command(name = "agentcheck", version, about = "Model checking of CTL and ATL properties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify a formula against a model.
    Check(CheckArgs),
    /// Parse and validate a model.
    Validate {
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the model class and, with a formula, its logic class.
    Classify {
        model: PathBuf,
        #[arg(long)]
        formula: Option<String>,
    },
    /// Export the model as a DOT graph.
    Graph {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Explicit,
    Auto,
}

#[derive(Debug, Args)]
struct CheckArgs {
    model: PathBuf,
    #[arg(long, conflicts_with = "formula_file", required_unless_present = "formula_file")]
    formula: Option<String>,
    #[arg(long, value_name = "PATH")]
    formula_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    #[arg(long)]
    json: bool,
    #[arg(long, value_name = "N", default_value_t = SelectionPolicy::DEFAULT_EXPLICIT_MAX)]
    explicit_max: usize,
    #[arg(long, value_name = "N", default_value_t = SelectionPolicy::DEFAULT_IMPLICIT_MAX)]
    implicit_max: usize,
}

/// A failure with its exit code, reported on the diagnostic stream.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_INTERNAL };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::internal(format!("write failed: {e}"))
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<ModelDocument, Failure> {
    parse_model_text(&read(path)?)
        .map_err(|e| Failure::input(format!("{}: {}", path.display(), model_error_text(&e))))
}

fn model_error_text(e: &ModelError) -> String {
    match e {
        ModelError::Validation(errs) => {
            let mut s = String::from("invalid model");
            for v in errs.iter() {
                s.push_str(&format!("\n  [{}] {v}", v.invariant()));
            }
            s
        }
        other => other.to_string(),
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_TRUE };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Check(args) => check(&args, out),
        Command::Validate { model, json } => validate(&model, json, out),
        Command::Classify { model, formula } => classify(&model, formula.as_deref(), out),
        Command::Graph { model, out: path } => graph(&model, path.as_deref(), out),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn check(args: &CheckArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let policy = SelectionPolicy::new(args.explicit_max, args.implicit_max)
        .map_err(|e| Failure::input(e.to_string()))?;
    let formula_text = match (&args.formula, &args.formula_file) {
        (Some(f), _) => f.clone(),
        (None, Some(path)) => read(path)?,
        (None, None) => return Err(Failure::input("a formula is required")),
    };
    let doc = load_model(&args.model)?;
    let formula = parse_formula(formula_text.trim()).map_err(|e| Failure::from(VerifyError::from(e)))?;
    let options = VerifyOptions {
        policy,
        method: (args.method == MethodArg::Explicit).then_some(Method::Explicit),
    };
    let result = verify_document(&Registry::standard(), &doc, &formula, &options)?;
    if args.json {
        let value = serde_json::to_value(&result).map_err(|e| Failure::internal(e.to_string()))?;
        writeln!(out, "{value}")?;
    } else {
        write_human(&result, out)?;
    }
    Ok(if result.overall { EXIT_TRUE } else { EXIT_FALSE })
}

fn write_human(r: &VerificationResult, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{}", r.overall)?;
    for (state, v) in &r.per_initial {
        writeln!(out, "  {state}: {v}")?;
    }
    writeln!(out, "formula: {} ({})", r.formula, r.logic_class)?;
    writeln!(out, "satisfied in: {{{}}}", r.satisfying_states.join(", "))?;
    writeln!(out, "method: {} via {}", r.method, r.checker)?;
    if !r.trace.note.is_empty() {
        writeln!(out, "note: {}", r.trace.note)?;
    }
    if let Some(w) = &r.witness {
        writeln!(out, "strategy for {{{}}}:", w.coalition.join(", "))?;
        for c in w.choices.iter().filter(|c| c.certified) {
            writeln!(out, "  {}: ({})", c.state, c.actions.join(","))?;
        }
    }
    writeln!(out, "elapsed: {:.3} ms", r.elapsed.as_secs_f64() * 1000.0)
}

fn validate(path: &Path, json: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = read(path)?;
    match parse_model_text(&text) {
        Ok(doc) => {
            if json {
                let v = json!({
                    "valid": true,
                    "model_class": doc.model_class(),
                    "states": doc.state_count(),
                    "agents": doc.agents(),
                });
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "OK")?;
            }
            Ok(EXIT_TRUE)
        }
        Err(e) if json => {
            writeln!(out, "{}", model_error_json(&e))?;
            Ok(EXIT_INPUT)
        }
        Err(e) => Err(Failure::input(format!("{}: {}", path.display(), model_error_text(&e)))),
    }
}

fn model_error_json(e: &ModelError) -> Value {
    let mut v = json!({ "valid": false, "code": e.code(), "message": e.to_string() });
    match e {
        ModelError::Parse { line, column, .. } => {
            v["line"] = json!(line);
            v["column"] = json!(column);
        }
        ModelError::Validation(errs) => {
            v["violations"] = json!(errs.0);
        }
        _ => {}
    }
    v
}

fn classify(path: &Path, formula: Option<&str>, out: &mut dyn Write) -> Result<i32, Failure> {
    let doc = load_model(path)?;
    let model = classify_model(&doc);
    match formula {
        Some(text) => {
            let f = parse_formula(text).map_err(|e| Failure::from(VerifyError::from(e)))?;
            writeln!(out, "model: {model}, logic: {}", classify_formula(&f))?;
        }
        None => writeln!(out, "model: {model}")?,
    }
    Ok(EXIT_TRUE)
}

fn graph(path: &Path, target: Option<&Path>, out: &mut dyn Write) -> Result<i32, Failure> {
    let dot = export_dot(&load_model(path)?);
    match target {
        Some(p) => fs::write(p, dot)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display())))?,
        None => out.write_all(dot.as_bytes())?,
    }
    Ok(EXIT_TRUE)
}
