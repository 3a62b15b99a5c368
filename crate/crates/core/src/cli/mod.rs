//! The `cframe` command line.
//!
//! Exit codes: 0 success, 1 input error (unreadable or invalid spec, a
//! family that is not a frame, a failed verification check), 2 numerical
//! failure.

mod json;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::controlled::{self, ControlledFrame, Mode};
use crate::error::{Error, Result};
use crate::frame::{self, SampledFrame};
use crate::framespec::{load_spec_path, materialize, write_spec, FrameSpec};
use crate::linalg::{fmt_sig, Field, Operator};
use json::{matrix, num};

#[derive(Debug, Parser)]
#[command(name = "cframe", version, about = "Analyze controlled frames described by spec files")]
struct Cli {
    /// Emit a single JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Require a real quadratic form for controlled frames (default).
    #[arg(long, global = true, conflicts_with = "lenient")]
    strict: bool,
    /// Classify controlled operators by their Hermitian part only.
    #[arg(long, global = true)]
    lenient: bool,
    /// Threshold for residual checks in reports; library tolerances are unaffected.
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Frame operator, bounds and classification (controlled if V is declared).
    Analyze { spec: PathBuf },
    /// Emit the canonical (or controlled) dual as a spec document.
    Dual {
        spec: PathBuf,
        /// Emit S^{-1/2} F instead.
        #[arg(long)]
        parseval: bool,
    },
    /// Same as `dual --parseval`.
    Parsevalize { spec: PathBuf },
    /// Print the weighted V-Gramian.
    Gramian {
        spec: PathBuf,
        /// Also report max |G^2 - G|.
        #[arg(long)]
        check_projection: bool,
    },
    /// Run every applicable identity check and report PASS/FAIL/SKIP.
    Verify { spec: PathBuf },
}

struct Options {
    json: bool,
    mode: Mode,
    tol: Option<f64>,
}

/// Runs the command line with `args` (including the program name) and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Some(t) = cli.tol {
        if !(t > 0.0) || !t.is_finite() {
            let _ = writeln!(err, "error: --tol must be a positive number");
            return 1;
        }
    }
    let opts = Options {
        json: cli.json,
        mode: if cli.lenient { Mode::Lenient } else { Mode::Strict },
        tol: cli.tol,
    };
    let result = match &cli.command {
        Command::Analyze { spec } => analyze(spec, &opts, out),
        Command::Dual { spec, parseval } => dual(spec, *parseval, &opts, out),
        Command::Parsevalize { spec } => dual(spec, true, &opts, out),
        Command::Gramian { spec, check_projection } => gramian(spec, *check_projection, &opts, out),
        Command::Verify { spec } => verify::run(spec, &opts, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_input_error() {
                1
            } else {
                2
            }
        }
    }
}

struct Loaded {
    spec: FrameSpec,
    frame: SampledFrame,
    controller: Option<Operator>,
    field: Field,
}

fn load(path: &PathBuf) -> Result<Loaded> {
    let spec = load_spec_path(path)?;
    let (frame, controller) = materialize(&spec)?;
    let field = controller.as_ref().map_or(frame.field(), |v| frame.field().join(v.field())).join(spec.field);
    Ok(Loaded { spec, frame, controller, field })
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn emit_json(out: &mut dyn Write, value: &Value) -> Result<i32> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}").map_err(io)?;
    Ok(0)
}

fn analyze(path: &PathBuf, opts: &Options, out: &mut dyn Write) -> Result<i32> {
    let l = load(path)?;
    let fa = frame::analyze(&l.frame)?;
    let identity = Operator::identity(l.frame.dim());
    let v = l.controller.clone().unwrap_or(identity);
    let commutes = v.commutes_with(&fa.frame_operator);
    let ca = match &l.controller {
        Some(v) => Some(controlled::controlled_analyze(&ControlledFrame::new(l.frame.clone(), v.clone())?, opts.mode)?),
        None => None,
    };

    if opts.json {
        let mut m = Map::new();
        m.insert("label".into(), l.spec.label.clone().map_or(Value::Null, Value::String));
        m.insert("dimension".into(), json!(l.frame.dim()));
        m.insert("field".into(), json!(l.field.to_string()));
        m.insert("nodes".into(), json!(l.frame.len()));
        m.insert("mode".into(), json!(opts.mode));
        m.insert("frame_operator".into(), matrix(&fa.frame_operator, l.field));
        m.insert("frame_lower_bound".into(), num(fa.lower_bound));
        m.insert("frame_upper_bound".into(), num(fa.upper_bound));
        m.insert("frame_classification".into(), json!(fa.classification.name()));
        m.insert("commutes_with_S".into(), json!(commutes));
        match &ca {
            Some(ca) => {
                m.insert("controller".into(), matrix(&v, l.field));
                m.insert("controlled_operator".into(), matrix(&ca.controlled_operator, l.field));
                m.insert("lower_bound".into(), num(ca.lower_bound));
                m.insert("upper_bound".into(), num(ca.upper_bound));
                m.insert("condition".into(), num(condition(ca.lower_bound, ca.upper_bound)));
                m.insert("classification".into(), json!(ca.classification.name()));
                m.insert("alpha".into(), ca.classification.alpha().map_or(Value::Null, num));
                m.insert("quadratic_form_real".into(), json!(ca.quadratic_form_real));
                m.insert("skew_norm".into(), num(ca.skew_norm));
            }
            None => {
                m.insert("controller".into(), Value::Null);
                m.insert("controlled_operator".into(), Value::Null);
                m.insert("lower_bound".into(), num(fa.lower_bound));
                m.insert("upper_bound".into(), num(fa.upper_bound));
                m.insert("condition".into(), num(fa.condition));
                m.insert("classification".into(), json!(fa.classification.name()));
                let alpha = match fa.classification {
                    frame::FrameClass::Tight(a) => num(a),
                    frame::FrameClass::Parseval => num(1.0),
                    _ => Value::Null,
                };
                m.insert("alpha".into(), alpha);
            }
        }
        return emit_json(out, &Value::Object(m));
    }

    let mut s = String::new();
    if let Some(label) = &l.spec.label {
        s += &format!("label: {label}\n");
    }
    s += &format!("dimension: {} ({}), nodes: {}\n", l.frame.dim(), l.field, l.frame.len());
    s += &format!("frame operator S_F:\n{}", fa.frame_operator);
    s += &format!("lower bound A: {}\n", fmt_sig(fa.lower_bound, 6));
    s += &format!("upper bound B: {}\n", fmt_sig(fa.upper_bound, 6));
    s += &format!("condition B/A: {}\n", fmt_sig(fa.condition, 6));
    s += &format!("classification: {}\n", fa.classification);
    if let Some(ca) = &ca {
        let mode = match opts.mode {
            Mode::Strict => "strict",
            Mode::Lenient => "lenient",
        };
        s += &format!("controller V:\n{v}");
        s += &format!("controlled operator S_VF:\n{}", ca.controlled_operator);
        s += &format!("controlled lower bound: {}\n", fmt_sig(ca.lower_bound, 6));
        s += &format!("controlled upper bound: {}\n", fmt_sig(ca.upper_bound, 6));
        s += &format!("quadratic form real: {}\n", yes_no(ca.quadratic_form_real));
        s += &format!("controlled classification ({mode}): {}\n", ca.classification);
    }
    s += &format!("V commutes with S_F: {}\n", yes_no(commutes));
    out.write_all(s.as_bytes()).map_err(io)?;
    Ok(0)
}

fn condition(lower: f64, upper: f64) -> f64 {
    if lower > 0.0 {
        upper / lower
    } else {
        f64::INFINITY
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn dual(path: &PathBuf, parseval: bool, opts: &Options, out: &mut dyn Write) -> Result<i32> {
    let l = load(path)?;
    let base = l.spec.label.clone().unwrap_or_else(|| "frame".to_string());
    let (g, kind) = if parseval {
        (frame::parsevalize(&l.frame)?, "parseval")
    } else {
        match &l.controller {
            Some(v) => (controlled::controlled_dual(&ControlledFrame::new(l.frame.clone(), v.clone())?, opts.mode)?, "controlled_dual"),
            None => (frame::canonical_dual(&l.frame)?, "canonical_dual"),
        }
    };
    let document = write_spec(&g, None, Some(&format!("{kind} of {base}")));
    if opts.json {
        return emit_json(out, &json!({ "kind": kind, "document": document }));
    }
    out.write_all(document.as_bytes()).map_err(io)?;
    Ok(0)
}

fn gramian(path: &PathBuf, check_projection: bool, opts: &Options, out: &mut dyn Write) -> Result<i32> {
    let l = load(path)?;
    let v = l.controller.clone().unwrap_or_else(|| Operator::identity(l.frame.dim()));
    let g = controlled::gramian(&ControlledFrame::new(l.frame.clone(), v)?);
    let defect = check_projection.then(|| (&g * &g).max_abs_diff(&g));
    if opts.json {
        let mut m = Map::new();
        m.insert("gramian".into(), matrix(&g, l.field.join(g.field())));
        if let Some(d) = defect {
            m.insert("projection_defect".into(), num(d));
        }
        return emit_json(out, &Value::Object(m));
    }
    let mut s = format!("V-Gramian ({}x{}):\n{g}", g.dim(), g.dim());
    if let Some(d) = defect {
        s += &format!("max |G^2 - G|: {}\n", fmt_sig(d, 6));
    }
    out.write_all(s.as_bytes()).map_err(io)?;
    Ok(0)
}
