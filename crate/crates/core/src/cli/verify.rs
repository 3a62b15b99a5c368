//! `cframe verify`: every identity whose hypotheses hold for the loaded
//! frame, with SKIP reasons for the rest.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use super::json::num;
use super::{emit_json, io, load, Options};
use crate::controlled::{self, ControlledAnalysis, ControlledClass, ControlledFrame, Mode};
use crate::error::{Error, Result};
use crate::frame::{self, FrameAnalysis};
use crate::linalg::{basis_vector, classify, fmt_sig, hermitian_eig, norm_sq, operator_power, Operator, OperatorClass};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone)]
struct Check {
    name: &'static str,
    status: Status,
    residual: Option<f64>,
    threshold: Option<f64>,
    detail: String,
}

impl Check {
    fn skip(name: &'static str, reason: impl Into<String>) -> Check {
        Check { name, status: Status::Skip, residual: None, threshold: None, detail: reason.into() }
    }

    /// PASS iff `residual <= threshold`.
    fn bounded(name: &'static str, residual: f64, threshold: f64, detail: impl Into<String>) -> Check {
        let status = if residual <= threshold { Status::Pass } else { Status::Fail };
        Check { name, status, residual: Some(residual), threshold: Some(threshold), detail: detail.into() }
    }

    fn with(name: &'static str, ok: bool, detail: impl Into<String>) -> Check {
        let status = if ok { Status::Pass } else { Status::Fail };
        Check { name, status, residual: None, threshold: None, detail: detail.into() }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "status": self.status,
            "residual": self.residual.map_or(Value::Null, num),
            "threshold": self.threshold.map_or(Value::Null, num),
            "detail": self.detail,
        })
    }
}

struct Context {
    cf: ControlledFrame,
    declared: bool,
    fa: FrameAnalysis,
    ca: ControlledAnalysis,
    vclass: OperatorClass,
    commutes: bool,
    tol: Option<f64>,
    mode: Mode,
}

impl Context {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn is_frame(&self) -> bool {
        self.fa.classification.is_frame()
    }

    fn v(&self) -> &Operator {
        self.cf.controller()
    }

    fn s(&self) -> &Operator {
        &self.fa.frame_operator
    }

    /// Orthogonal projection onto the eigenvectors of the lower half of the
    /// spectrum of a self-adjoint `V`; it commutes with `V`.
    fn spectral_projection(&self) -> Result<Operator> {
        let eig = hermitian_eig(self.v())?;
        let n = eig.dim();
        let keep = n.div_ceil(2);
        let mut p = Operator::zeros(n);
        for k in 0..keep {
            let q = eig.vector(k);
            p = &p + &Operator::outer(&q, &q);
        }
        Ok(p.hermitian_part())
    }
}

/// Runs a check, turning input-type errors into a FAIL and letting
/// numerical failures propagate.
fn guarded(name: &'static str, f: impl FnOnce() -> Result<Check>) -> Result<Check> {
    match f() {
        Ok(c) => Ok(c),
        Err(e) if e.is_input_error() => Ok(Check::with(name, false, format!("error: {e}"))),
        Err(e) => Err(e),
    }
}

pub(super) fn run(path: &PathBuf, opts: &Options, out: &mut dyn Write) -> Result<i32> {
    let l = load(path)?;
    let declared = l.controller.is_some();
    let v = l.controller.clone().unwrap_or_else(|| Operator::identity(l.frame.dim()));
    let cf = ControlledFrame::new(l.frame.clone(), v.clone())?;
    let fa = frame::analyze(&l.frame)?;
    let ca = controlled::controlled_analyze(&cf, opts.mode)?;
    let ctx = Context {
        commutes: v.commutes_with(&fa.frame_operator),
        vclass: classify(&v)?,
        cf,
        declared,
        fa,
        ca,
        tol: opts.tol,
        mode: opts.mode,
    };

    let checks = vec![
        guarded("frame_bounds", || Ok(frame_bounds(&ctx)))?,
        guarded("bessel_bound", || Ok(bessel_bound(&ctx)))?,
        guarded("dual_reconstruction", || dual_reconstruction(&ctx))?,
        guarded("parsevalize", || parsevalize(&ctx))?,
        guarded("factorization", || Ok(factorization(&ctx)))?,
        guarded("controlled_frame", || Ok(controlled_frame(&ctx)))?,
        guarded("duality_symmetry", || Ok(duality_symmetry(&ctx)))?,
        guarded("trace_identity", || trace_identity(&ctx))?,
        guarded("trace_identity_tight_controller", || trace_identity_tight(&ctx))?,
        guarded("trace_bound", || trace_bound(&ctx))?,
        guarded("transfer", || transfer(&ctx))?,
        guarded("projection", || projection(&ctx))?,
        guarded("tight_controller", || tight_controller(&ctx))?,
        guarded("tightness_converse", || tightness_converse(&ctx))?,
        guarded("distance_decomposition", || distance_decomposition(&ctx))?,
        guarded("gramian_unitary", || gramian_unitary(&ctx))?,
        guarded("gramian_non_unitary", || Ok(gramian_non_unitary(&ctx)))?,
        guarded("controlled_dual_equivalence", || controlled_dual_equivalence(&ctx))?,
        guarded("positivity_from_normality", || positivity_from_normality(&ctx))?,
    ];

    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    let (passed, failed, skipped) = (count(Status::Pass), count(Status::Fail), count(Status::Skip));
    let classification = if declared { ctx.ca.classification.name() } else { ctx.fa.classification.name() };
    let code = if failed == 0 { 0 } else { 1 };

    if opts.json {
        let report = json!({
            "label": l.spec.label,
            "mode": opts.mode,
            "controller_declared": declared,
            "classification": classification,
            "commutes_with_S": ctx.commutes,
            "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "passed": passed,
            "failed": failed,
            "skipped": skipped,
        });
        emit_json(out, &report)?;
        return Ok(code);
    }

    let mode = match opts.mode {
        Mode::Strict => "strict",
        Mode::Lenient => "lenient",
    };
    let mut s = String::new();
    if let Some(label) = &l.spec.label {
        s += &format!("verify: {label}\n");
    }
    s += &format!("classification: {classification} ({mode})\n");
    s += &format!("V commutes with S_F: {}\n", if ctx.commutes { "yes" } else { "no" });
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        let mut line = format!("{}  {:<width$}", c.status.label(), c.name);
        if let (Some(r), Some(t)) = (c.residual, c.threshold) {
            line += &format!("  residual {} (<= {})", fmt_sig(r, 6), fmt_sig(t, 6));
        }
        if !c.detail.is_empty() {
            line += &format!("  {}", c.detail);
        }
        s += line.trim_end();
        s.push('\n');
    }
    s += &format!("summary: {passed} passed, {failed} failed, {skipped} skipped\n");
    out.write_all(s.as_bytes()).map_err(io)?;
    Ok(code)
}

fn frame_bounds(ctx: &Context) -> Check {
    let fa = &ctx.fa;
    let detail = format!(
        "A = {}, B = {} ({})",
        fmt_sig(fa.lower_bound, 6),
        fmt_sig(fa.upper_bound, 6),
        fa.classification
    );
    if ctx.is_frame() {
        Check::with("frame_bounds", true, detail)
    } else {
        Check::with("frame_bounds", false, format!("{detail}; lower bound is not positive"))
    }
}

fn bessel_bound(ctx: &Context) -> Check {
    let energy = ctx.cf.frame().energy();
    let excess = ctx.fa.upper_bound - energy;
    Check::bounded(
        "bessel_bound",
        excess.max(0.0),
        ctx.tol(tol::TRACE_TOL) * energy.max(1.0),
        format!("B = {} <= sum w |F|^2 = {}", fmt_sig(ctx.fa.upper_bound, 6), fmt_sig(energy, 6)),
    )
}

fn dual_reconstruction(ctx: &Context) -> Result<Check> {
    if !ctx.is_frame() {
        return Ok(Check::skip("dual_reconstruction", "not a frame"));
    }
    let f = ctx.cf.frame();
    let dual = frame::canonical_dual(f)?;
    let mut worst: f64 = 0.0;
    for k in 0..f.dim() {
        let e = basis_vector(f.dim(), k);
        let back = frame::reconstruct(f, &dual, &e)?;
        worst = worst.max(norm_sq(&(back - &e)).sqrt());
    }
    Ok(Check::bounded("dual_reconstruction", worst, ctx.tol(tol::RECON_TOL), "f = sum w <f, S^-1 F> F on a basis"))
}

fn parsevalize(ctx: &Context) -> Result<Check> {
    if !ctx.is_frame() {
        return Ok(Check::skip("parsevalize", "not a frame"));
    }
    let p = frame::parsevalize(ctx.cf.frame())?;
    let defect = frame::frame_operator(&p).max_abs_diff(&Operator::identity(p.dim()));
    Ok(Check::bounded("parsevalize", defect, ctx.tol(tol::TIGHT_TOL), "S^-1/2 F has frame operator I"))
}

fn factorization(ctx: &Context) -> Check {
    let vs = ctx.v() * ctx.s();
    let defect = ctx.ca.controlled_operator.max_abs_diff(&vs);
    let rel = defect / vs.max_norm().max(f64::MIN_POSITIVE);
    Check::bounded("factorization", rel, ctx.tol(1e-10), "S_VF = V S_F (relative)")
}

fn controlled_frame(ctx: &Context) -> Check {
    if !ctx.declared {
        return Check::skip("controlled_frame", "no controller declared");
    }
    let ca = &ctx.ca;
    let detail = format!(
        "{}; Hermitian part spectrum in [{}, {}]{}",
        ca.classification,
        fmt_sig(ca.lower_bound, 6),
        fmt_sig(ca.upper_bound, 6),
        if ca.quadratic_form_real { String::new() } else { format!("; form not real (skew {})", fmt_sig(ca.skew_norm, 6)) }
    );
    Check::with("controlled_frame", ca.classification.is_controlled_frame(), detail)
}

fn duality_symmetry(ctx: &Context) -> Check {
    let gap = controlled::duality_symmetry_gap(&ctx.cf);
    let detail = format!("max |V S_F - S_F V*| = {}", fmt_sig(gap, 6));
    if !(ctx.vclass.self_adjoint && ctx.commutes) {
        let why = if ctx.commutes { "V is not self-adjoint" } else { "V does not commute with S_F" };
        let mut c = Check::skip("duality_symmetry", format!("{why}; {detail}"));
        c.residual = Some(gap);
        return c;
    }
    let threshold = ctx.tol(tol::COMMUTE_TOL) * ctx.v().max_norm() * ctx.s().max_norm();
    Check::bounded("duality_symmetry", gap, threshold, detail)
}

fn trace_identity(ctx: &Context) -> Result<Check> {
    if ctx.ca.classification != ControlledClass::Parseval {
        return Ok(Check::skip("trace_identity", format!("not Parseval controlled ({})", ctx.ca.classification)));
    }
    let t = controlled::trace_identity_check(&ctx.cf)?;
    Ok(Check::bounded(
        "trace_identity",
        t.residual,
        ctx.tol(tol::TRACE_TOL),
        format!("sum w <V F, F> = {} vs N = {}", fmt_sig(t.lhs, 10), t.expected),
    ))
}

fn trace_identity_tight(ctx: &Context) -> Result<Check> {
    if !ctx.is_frame() {
        return Ok(Check::skip("trace_identity_tight_controller", "not a frame"));
    }
    let v = controlled::tight_controller(ctx.cf.frame(), 1.0)?;
    let cf = ControlledFrame::new(ctx.cf.frame().clone(), v)?;
    let t = controlled::trace_identity_check(&cf)?;
    Ok(Check::bounded(
        "trace_identity_tight_controller",
        t.residual,
        ctx.tol(tol::TRACE_TOL),
        format!("V = S_F^-1: sum w <V F, F> = {} vs N = {}", fmt_sig(t.lhs, 10), t.expected),
    ))
}

fn trace_bound(ctx: &Context) -> Result<Check> {
    if !(ctx.vclass.self_adjoint && ctx.vclass.positive_semidefinite) {
        return Ok(Check::skip("trace_bound", "V is not self-adjoint positive"));
    }
    let b = controlled::trace_bound_check(&ctx.cf)?;
    let slack = tol::TRACE_TOL * b.rhs.abs().max(1.0);
    Ok(Check::bounded(
        "trace_bound",
        (b.lhs - b.rhs).max(0.0),
        ctx.tol(slack),
        format!("tr S_VF = {} <= tr V sum w |F|^2 = {}", fmt_sig(b.lhs, 6), fmt_sig(b.rhs, 6)),
    ))
}

fn transfer(ctx: &Context) -> Result<Check> {
    if !ctx.is_frame() {
        return Ok(Check::skip("transfer", "not a frame"));
    }
    if !ctx.commutes {
        return Ok(Check::skip("transfer", "V does not commute with S_F, so no L = S_F^p commutes with V"));
    }
    let s_vf = &ctx.ca.controlled_operator;
    let mut worst: f64 = 0.0;
    for beta in [-1.0, 0.0, 1.0, 2.0, 3.0] {
        let l = operator_power(ctx.s(), (beta - 1.0) / 2.0)?;
        let moved = controlled::transfer(&ctx.cf, &l)?;
        let expect = &(&l * s_vf) * &l.adjoint();
        let got = controlled::controlled_operator(&moved);
        worst = worst.max(got.max_abs_diff(&expect) / expect.max_norm().max(f64::MIN_POSITIVE));
    }
    Ok(Check::bounded(
        "transfer",
        worst,
        ctx.tol(tol::TRANSFER_TOL),
        "S_{V,LF} = L S_VF L* for L = S_F^((b-1)/2), b in {-1,0,1,2,3} (relative)",
    ))
}

fn projection(ctx: &Context) -> Result<Check> {
    if !ctx.ca.classification.is_controlled_frame() {
        return Ok(Check::skip("projection", format!("not a controlled frame ({})", ctx.ca.classification)));
    }
    if !ctx.vclass.self_adjoint {
        return Ok(Check::skip("projection", "V is not self-adjoint"));
    }
    let u = ctx.spectral_projection()?;
    let p = controlled::project(&ctx.cf, &u, ctx.mode)?;
    let Some(r) = p.restricted else {
        return Ok(Check::skip("projection", "range of U is trivial"));
    };
    let mut detail = format!("rank {} restriction is {}", p.basis.len(), r.classification);
    if ctx.ca.classification == ControlledClass::Parseval {
        let defect = r.operator.max_abs_diff(&Operator::identity(r.operator.dim()));
        detail += "; Parseval input";
        return Ok(Check::bounded("projection", defect, ctx.tol(tol::PROJ_TOL), detail));
    }
    Ok(Check::with("projection", r.classification.is_controlled_frame(), detail))
}

fn tight_controller(ctx: &Context) -> Result<Check> {
    if !ctx.is_frame() {
        return Ok(Check::skip("tight_controller", "not a frame"));
    }
    let alpha = 2.0;
    let v = controlled::tight_controller(ctx.cf.frame(), alpha)?;
    let a = controlled::controlled_analyze(&ControlledFrame::new(ctx.cf.frame().clone(), v)?, Mode::Strict)?;
    let residual = (a.lower_bound - alpha).abs().max((a.upper_bound - alpha).abs());
    let mut c = Check::bounded(
        "tight_controller",
        residual,
        ctx.tol(tol::TIGHT_TOL),
        format!("V = 2 S_F^-1 gives {}", a.classification),
    );
    if !matches!(a.classification, ControlledClass::Tight(_)) {
        c.status = Status::Fail;
    }
    Ok(c)
}

fn tightness_converse(ctx: &Context) -> Result<Check> {
    let Some(alpha) = ctx.ca.classification.alpha() else {
        return Ok(Check::skip("tightness_converse", format!("not tight ({})", ctx.ca.classification)));
    };
    let expect = controlled::tight_controller(ctx.cf.frame(), alpha)?;
    let diff = ctx.v().max_abs_diff(&expect);
    Ok(Check::bounded(
        "tightness_converse",
        diff,
        ctx.tol(1e-7) * expect.max_norm().max(1.0),
        format!("tight({}) forces V = alpha S_F^-1", fmt_sig(alpha, 6)),
    ))
}

fn distance_decomposition(ctx: &Context) -> Result<Check> {
    if !ctx.is_frame() {
        return Ok(Check::skip("distance_decomposition", "not a frame"));
    }
    if !(ctx.vclass.self_adjoint && ctx.vclass.positive_semidefinite) {
        return Ok(Check::skip("distance_decomposition", "V is not self-adjoint positive"));
    }
    if !ctx.commutes {
        return Ok(Check::skip("distance_decomposition", "V does not commute with S_F"));
    }
    let f = ctx.cf.frame();
    let g = frame::parsevalize(f)?;
    let d = frame::parseval_distance_decomposition(f, &g, ctx.v())?;
    let rel = d.residual.abs() / (1.0 + d.lhs);
    let mut c = Check::bounded(
        "distance_decomposition",
        rel,
        ctx.tol(tol::DECOMP_TOL),
        format!(
            "G = S^-1/2 F: lhs {} = {} + {}",
            fmt_sig(d.lhs, 8),
            fmt_sig(d.term1, 8),
            fmt_sig(d.term2, 8)
        ),
    );
    if d.lhs < d.term1 - 1e-9 {
        c.status = Status::Fail;
        c.detail += "; lhs < term1";
    }
    Ok(c)
}

fn gramian_unitary(ctx: &Context) -> Result<Check> {
    let n = ctx.cf.dim();
    let (t, what) = if ctx.vclass.self_adjoint {
        let p = ctx.spectral_projection()?;
        (&Operator::identity(n) - &p.scale(2.0), "reflection I - 2P commuting with V")
    } else {
        (Operator::scalar(n, -1.0), "T = -I")
    };
    let g = controlled::gramian(&ctx.cf);
    let diff = controlled::gramian_difference(&ctx.cf, &t);
    Ok(Check::bounded(
        "gramian_unitary",
        diff,
        ctx.tol(tol::GRAM_TOL) * g.max_norm().max(1.0),
        format!("{what} leaves the V-Gramian unchanged"),
    ))
}

fn gramian_non_unitary(ctx: &Context) -> Check {
    let g = controlled::gramian(&ctx.cf);
    if g.max_norm() == 0.0 {
        return Check::skip("gramian_non_unitary", "V-Gramian vanishes");
    }
    let diff = controlled::gramian_difference(&ctx.cf, &Operator::scalar(ctx.cf.dim(), 2.0));
    Check::with(
        "gramian_non_unitary",
        diff > 1e-4 * g.max_norm(),
        format!("T = 2I changes the V-Gramian by {}", fmt_sig(diff, 6)),
    )
}

fn controlled_dual_equivalence(ctx: &Context) -> Result<Check> {
    if !ctx.ca.classification.is_controlled_frame() {
        return Ok(Check::skip("controlled_dual_equivalence", format!("not a controlled frame ({})", ctx.ca.classification)));
    }
    let f = ctx.cf.frame();
    let dual = controlled::controlled_dual(&ctx.cf, ctx.mode)?;
    let e = controlled::frame_equivalent(&dual, f)?;
    let expect = &ctx.ca.controlled_operator.inverse()? * ctx.v();
    let Some(p) = e.p else {
        return Ok(Check::with(
            "controlled_dual_equivalence",
            false,
            format!("S_VF^-1 V F is not a fit of F (residual {})", fmt_sig(e.residual, 6)),
        ));
    };
    let diff = p.max_abs_diff(&expect);
    Ok(Check::bounded(
        "controlled_dual_equivalence",
        diff,
        ctx.tol(tol::EQUIV_TOL) * expect.max_norm().max(1.0),
        "S_VF^-1 V F = P F with P = S_VF^-1 V",
    ))
}

fn positivity_from_normality(ctx: &Context) -> Result<Check> {
    const NAME: &str = "positivity_from_normality";
    if !ctx.ca.classification.is_controlled_frame() {
        return Ok(Check::skip(NAME, format!("not a controlled frame ({})", ctx.ca.classification)));
    }
    let r = match controlled::positivity_from_normality(&ctx.cf) {
        Ok(r) => r,
        Err(e @ (Error::NotNormal { .. } | Error::NotCommuting { .. })) => return Ok(Check::skip(NAME, e.to_string())),
        Err(e) => return Err(e),
    };
    let mut c = Check::bounded(
        NAME,
        r.reconstruction_error,
        ctx.tol(tol::RECON_TOL) * ctx.v().max_norm().max(1.0),
        format!("V recovered on the common eigenbasis; positive: {}", if r.positive { "yes" } else { "no" }),
    );
    if !r.positive {
        c.status = Status::Fail;
    }
    Ok(c)
}
