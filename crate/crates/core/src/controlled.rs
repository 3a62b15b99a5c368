//! `V`-controlled frames.
//!
//! The controlled frame operator is `S_VF f = Σ w_i ⟨f, F_i⟩ V F_i`, which
//! always factors as `V S_F`. Its quadratic form `⟨S_VF f, f⟩` need not be
//! real when `V` does not commute with `S_F`; [`Mode`] selects how such
//! forms are classified.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{self, classify_bounds, frame_operator, weighted_outer_sum, FrameClass, SampledFrame};
use crate::linalg::{self, classify, hermitian_eig, inner, norm_sq, operator_power, Operator, Scalar, Vector};
use crate::tol;

/// Classification mode for controlled operators that are not self-adjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// The form must be real for every `f` (i.e. `S_VF` self-adjoint) and
    /// positive definite.
    #[default]
    Strict,
    /// Only the Hermitian part is classified; a nonzero skew part is
    /// reported but tolerated.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum ControlledClass {
    ControlledFrame,
    ControlledBessel,
    Tight(f64),
    Parseval,
    Indefinite,
}

impl ControlledClass {
    /// Frame, tight or Parseval: `S_VF` is invertible with a positive form.
    pub fn is_controlled_frame(self) -> bool {
        matches!(
            self,
            ControlledClass::ControlledFrame | ControlledClass::Tight(_) | ControlledClass::Parseval
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ControlledClass::ControlledFrame => "controlled_frame",
            ControlledClass::ControlledBessel => "controlled_bessel",
            ControlledClass::Tight(_) => "tight",
            ControlledClass::Parseval => "parseval",
            ControlledClass::Indefinite => "indefinite",
        }
    }

    /// The tightness constant `α` (1 for Parseval).
    pub fn alpha(self) -> Option<f64> {
        match self {
            ControlledClass::Tight(a) => Some(a),
            ControlledClass::Parseval => Some(1.0),
            _ => None,
        }
    }
}

impl std::fmt::Display for ControlledClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ControlledClass::Tight(alpha) => write!(f, "tight({})", linalg::fmt_sig(*alpha, 6)),
            other => f.write_str(other.name()),
        }
    }
}

/// A sampled frame together with an invertible controller `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlledFrame {
    frame: SampledFrame,
    controller: Operator,
}

impl ControlledFrame {
    pub fn new(frame: SampledFrame, controller: Operator) -> Result<Self> {
        if controller.dim() != frame.dim() {
            return Err(Error::DimMismatch { expected: frame.dim(), found: controller.dim() });
        }
        let sigma = controller.singular_values()?;
        let sigma_min = sigma.first().copied().unwrap_or(0.0);
        if !(sigma_min > tol::singular_tol(controller.max_norm())) {
            return Err(Error::Singular { sigma_min });
        }
        Ok(ControlledFrame { frame, controller })
    }

    pub fn frame(&self) -> &SampledFrame {
        &self.frame
    }

    pub fn controller(&self) -> &Operator {
        &self.controller
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// The family `V F_ς`.
    pub fn controlled_samples(&self) -> SampledFrame {
        self.frame.map(&self.controller)
    }
}

/// `Σ w_i (V F_i) F_i*`.
pub fn controlled_operator(cf: &ControlledFrame) -> Operator {
    let vf = cf.controlled_samples();
    let terms = cf
        .frame
        .weighted()
        .zip(vf.samples())
        .map(|((w, f), g)| (w, g, f));
    weighted_outer_sum(terms, cf.dim())
}

/// Bounds and classification of a controlled frame.
#[derive(Debug, Clone)]
pub struct ControlledAnalysis {
    pub controlled_operator: Operator,
    /// `⟨S_VF f, f⟩` is real for all `f` (skew part below `hermitian_tol`).
    pub quadratic_form_real: bool,
    /// `max |(S_VF − S_VF*)/2|`
    pub skew_norm: f64,
    /// Extreme eigenvalues of the Hermitian part of `S_VF`.
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub classification: ControlledClass,
    pub commutes_with_s: bool,
}

/// Bounds of the form `Re⟨M f, f⟩` together with its classification.
#[derive(Debug, Clone, Copy)]
pub struct FormBounds {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub form_real: bool,
    pub skew_norm: f64,
    pub classification: ControlledClass,
}

pub fn classify_form(m: &Operator, mode: Mode) -> Result<FormBounds> {
    let scale = m.max_norm();
    let skew_norm = m.skew_part().max_norm();
    let form_real = skew_norm <= tol::hermitian_tol(scale);
    let eig = hermitian_eig(&m.hermitian_part())?;
    let (lower, upper) = (eig.min(), eig.max());
    let classification = if (mode == Mode::Strict && !form_real) || lower < -tol::psd_tol(scale) {
        ControlledClass::Indefinite
    } else {
        match classify_bounds(lower, upper) {
            FrameClass::BesselOnly => ControlledClass::ControlledBessel,
            FrameClass::Frame => ControlledClass::ControlledFrame,
            FrameClass::Tight(a) => ControlledClass::Tight(a),
            FrameClass::Parseval => ControlledClass::Parseval,
        }
    };
    Ok(FormBounds { lower_bound: lower, upper_bound: upper, form_real, skew_norm, classification })
}

pub fn controlled_analyze(cf: &ControlledFrame, mode: Mode) -> Result<ControlledAnalysis> {
    let s_vf = controlled_operator(cf);
    let form = classify_form(&s_vf, mode)?;
    let s_f = frame_operator(&cf.frame);
    Ok(ControlledAnalysis {
        controlled_operator: s_vf,
        quadratic_form_real: form.form_real,
        skew_norm: form.skew_norm,
        lower_bound: form.lower_bound,
        upper_bound: form.upper_bound,
        classification: form.classification,
        commutes_with_s: cf.controller.commutes_with(&s_f),
    })
}

fn require_frame(f: &SampledFrame) -> Result<frame::FrameAnalysis> {
    let a = frame::analyze(f)?;
    if !a.classification.is_frame() {
        return Err(Error::NotAFrame { lower: a.lower_bound, upper: a.upper_bound });
    }
    Ok(a)
}

fn require_parseval(cf: &ControlledFrame) -> Result<ControlledAnalysis> {
    let a = controlled_analyze(cf, Mode::Strict)?;
    if a.classification != ControlledClass::Parseval {
        let defect = a.controlled_operator.max_abs_diff(&Operator::identity(cf.dim()));
        return Err(Error::NotParsevalControlled { defect });
    }
    Ok(a)
}

/// Builds `V = Q diag(α) Q*` on the eigenbasis `Q` of `S_F`; `alphas[k]`
/// pairs with the `k`-th smallest eigenvalue of `S_F`.
pub fn controlled_from_spectrum(f: &SampledFrame, alphas: &[f64]) -> Result<ControlledFrame> {
    if alphas.len() != f.dim() {
        return Err(Error::DimMismatch { expected: f.dim(), found: alphas.len() });
    }
    if let Some((index, &value)) = alphas.iter().enumerate().find(|(_, &a)| !(a > 0.0)) {
        return Err(Error::NonpositiveAlpha { index, value });
    }
    let a = require_frame(f)?;
    let eig = hermitian_eig(&a.frame_operator)?;
    let spectrum: Vec<Scalar> = alphas.iter().map(|&a| Scalar::new(a, 0.0)).collect();
    let v = eig.with_spectrum(&spectrum).hermitian_part();
    ControlledFrame::new(f.clone(), v)
}

/// The controlled dual `S_VF⁻¹ V F_ς`.
pub fn controlled_dual(cf: &ControlledFrame, mode: Mode) -> Result<SampledFrame> {
    let a = controlled_analyze(cf, mode)?;
    if !a.classification.is_controlled_frame() {
        return Err(Error::NotControlledFrame { classification: a.classification.to_string() });
    }
    let p = &a.controlled_operator.inverse()? * &cf.controller;
    Ok(cf.frame.map(&p))
}

/// Weight-symmetrized `V`-Gramian: `G_ij = √w_i √w_j ⟨V F_j, F_i⟩`.
pub fn gramian(cf: &ControlledFrame) -> Operator {
    gramian_of(&cf.frame, &cf.controller)
}

fn gramian_of(f: &SampledFrame, v: &Operator) -> Operator {
    let m = f.len();
    let roots: Vec<f64> = f.space().weights().iter().map(|w| w.sqrt()).collect();
    let vf: Vec<Vector> = f.samples().iter().map(|x| v.apply(x)).collect();
    let mut g = nalgebra::DMatrix::<Scalar>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            g[(i, j)] = inner(&vf[j], &f.samples()[i]) * (roots[i] * roots[j]);
        }
    }
    Operator::from_matrix(g)
}

/// `‖gramian(T F, V) − gramian(F, V)‖_max`.
pub fn gramian_difference(cf: &ControlledFrame, t: &Operator) -> f64 {
    gramian_of(&cf.frame.map(t), &cf.controller).max_abs_diff(&gramian(cf))
}

/// Whether mapping the frame by `T` leaves the `V`-Gramian unchanged. `T`
/// must commute with `V` unless `force` is set.
pub fn gramian_preserved_by(cf: &ControlledFrame, t: &Operator, force: bool) -> Result<bool> {
    if t.dim() != cf.dim() {
        return Err(Error::DimMismatch { expected: cf.dim(), found: t.dim() });
    }
    if !force && !t.commutes_with(&cf.controller) {
        return Err(Error::NotCommuting { what: "T and V", defect: t.commutator_norm(&cf.controller) });
    }
    let scale = gramian(cf).max_norm().max(1.0);
    Ok(gramian_difference(cf, t) <= tol::GRAM_TOL * scale)
}

/// The family `L F_ς` under the same controller; its controlled operator is
/// `L S_VF L*`.
pub fn transfer(cf: &ControlledFrame, l: &Operator) -> Result<ControlledFrame> {
    if l.dim() != cf.dim() {
        return Err(Error::DimMismatch { expected: cf.dim(), found: l.dim() });
    }
    let class = classify(l)?;
    if !class.self_adjoint || !class.positive_definite {
        let lambda_min = if class.self_adjoint { hermitian_eig(l)?.min() } else { f64::NAN };
        return Err(Error::NotPositive { lambda_min });
    }
    if !l.commutes_with(&cf.controller) {
        return Err(Error::NotCommuting { what: "L and V", defect: l.commutator_norm(&cf.controller) });
    }
    ControlledFrame::new(cf.frame.map(l), cf.controller.clone())
}

/// Analysis of a controlled operator restricted to a subspace.
#[derive(Debug, Clone)]
pub struct RestrictedAnalysis {
    /// `Q_E* S Q_E` in an orthonormal basis of the subspace.
    pub operator: Operator,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub classification: ControlledClass,
}

/// A controlled frame mapped by an orthogonal projection onto `E`.
#[derive(Debug, Clone)]
pub struct ProjectedFrame {
    pub controlled: ControlledFrame,
    /// Orthonormal basis of `E = range(U)`.
    pub basis: Vec<Vector>,
    /// `None` when `E` is trivial; the bounds are then vacuous.
    pub restricted: Option<RestrictedAnalysis>,
}

impl ProjectedFrame {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.basis.is_empty()
    }
}

pub fn project(cf: &ControlledFrame, u: &Operator, mode: Mode) -> Result<ProjectedFrame> {
    if u.dim() != cf.dim() {
        return Err(Error::DimMismatch { expected: cf.dim(), found: u.dim() });
    }
    let defect = u.self_adjoint_defect().max((u * u).max_abs_diff(u));
    if defect > tol::PROJ_TOL {
        return Err(Error::NotAProjection { defect });
    }
    if !u.commutes_with(&cf.controller) {
        return Err(Error::NotCommuting { what: "U and V", defect: u.commutator_norm(&cf.controller) });
    }
    let projected = ControlledFrame::new(cf.frame.map(u), cf.controller.clone())?;
    let eig = hermitian_eig(&u.hermitian_part())?;
    let basis: Vec<Vector> = (0..eig.dim())
        .filter(|&k| eig.eigenvalues[k] > 0.5)
        .map(|k| eig.vector(k))
        .collect();
    let restricted = if basis.is_empty() {
        None
    } else {
        let s = controlled_operator(&projected);
        let k = basis.len();
        let mut r = nalgebra::DMatrix::<Scalar>::zeros(k, k);
        for (i, bi) in basis.iter().enumerate() {
            for (j, bj) in basis.iter().enumerate() {
                r[(i, j)] = inner(&s.apply(bj), bi);
            }
        }
        let operator = Operator::from_matrix(r);
        let form = classify_form(&operator, mode)?;
        Some(RestrictedAnalysis {
            operator,
            lower_bound: form.lower_bound,
            upper_bound: form.upper_bound,
            classification: form.classification,
        })
    };
    Ok(ProjectedFrame { controlled: projected, basis, restricted })
}

/// `V = α S_F⁻¹`, the unique controller making `F` an `α`-tight controlled frame.
pub fn tight_controller(f: &SampledFrame, alpha: f64) -> Result<Operator> {
    if !(alpha > 0.0) {
        return Err(Error::NonpositiveAlpha { index: 0, value: alpha });
    }
    let a = require_frame(f)?;
    Ok(operator_power(&a.frame_operator, -1.0)?.scale(alpha))
}

/// An `α`-tight `V`-controlled frame is a Parseval `α⁻¹V`-controlled frame.
pub fn parseval_from_tight(cf: &ControlledFrame, mode: Mode) -> Result<ControlledFrame> {
    let a = controlled_analyze(cf, mode)?;
    match a.classification.alpha() {
        Some(alpha) => ControlledFrame::new(cf.frame.clone(), cf.controller.scale(1.0 / alpha)),
        None => Err(Error::NotControlledFrame { classification: a.classification.to_string() }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceIdentity {
    /// `Re Σ w_i ⟨V F_i, F_i⟩`
    pub lhs: f64,
    pub expected: usize,
    /// `|Σ w_i ⟨V F_i, F_i⟩ − N|`
    pub residual: f64,
}

/// `Σ w_i ⟨V F_i, F_i⟩ = N` for Parseval controlled frames.
pub fn trace_identity_check(cf: &ControlledFrame) -> Result<TraceIdentity> {
    require_parseval(cf)?;
    let sum = weighted_form(cf, |vf| vf.clone());
    let n = cf.dim();
    Ok(TraceIdentity { lhs: sum.re, expected: n, residual: (sum - Scalar::new(n as f64, 0.0)).norm() })
}

fn weighted_form<F: Fn(&Vector) -> Vector>(cf: &ControlledFrame, post: F) -> Scalar {
    cf.frame
        .weighted()
        .map(|(w, f)| inner(&post(&cf.controller.apply(f)), f) * w)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceBound {
    /// `tr(S_VF)`
    pub lhs: f64,
    /// `tr(V) · Σ w_i ‖F_i‖²`
    pub rhs: f64,
    pub holds: bool,
}

/// `tr(S_VF) ≤ tr(V) Σ w_i ‖F_i‖²` for self-adjoint positive `V`.
pub fn trace_bound_check(cf: &ControlledFrame) -> Result<TraceBound> {
    let v = &cf.controller;
    let class = classify(v)?;
    if !class.self_adjoint {
        return Err(Error::NotSelfAdjoint { defect: v.self_adjoint_defect() });
    }
    if !class.positive_semidefinite {
        return Err(Error::NotPositive { lambda_min: hermitian_eig(v)?.min() });
    }
    let lhs = controlled_operator(cf).trace().re;
    let rhs = v.trace().re * cf.frame.energy();
    Ok(TraceBound { lhs, rhs, holds: lhs <= rhs + tol::TRACE_TOL * rhs.abs().max(1.0) })
}

/// `tr(G) = Σ w_i ⟨G V F_i, F_i⟩` for Parseval controlled frames.
pub fn trace_of_operator_via_frame(cf: &ControlledFrame, g: &Operator) -> Result<Scalar> {
    if g.dim() != cf.dim() {
        return Err(Error::DimMismatch { expected: cf.dim(), found: g.dim() });
    }
    require_parseval(cf)?;
    Ok(weighted_form(cf, |vf| g.apply(vf)))
}

#[derive(Debug, Clone)]
pub struct Equivalence {
    pub equivalent: bool,
    /// The fitted `P` with `F_ς ≈ P G_ς`, when the fit is exact and invertible.
    pub p: Option<Operator>,
    /// `max_i ‖F_i − P G_i‖`
    pub residual: f64,
}

/// Fits `P = (Σ w_i F_i G_i*) S_G⁻¹` and tests `F_ς = P G_ς`.
pub fn frame_equivalent(f: &SampledFrame, g: &SampledFrame) -> Result<Equivalence> {
    if f.space() != g.space() {
        return Err(Error::SpaceMismatch);
    }
    if f.dim() != g.dim() {
        return Err(Error::DimMismatch { expected: f.dim(), found: g.dim() });
    }
    let ga = require_frame(g)?;
    let cross = weighted_outer_sum(
        f.weighted().zip(g.samples()).map(|((w, fi), gi)| (w, fi, gi)),
        f.dim(),
    );
    let p = &cross * &operator_power(&ga.frame_operator, -1.0)?;
    let residual = f
        .samples()
        .iter()
        .zip(g.samples())
        .map(|(fi, gi)| norm_sq(&(fi - p.apply(gi))).sqrt())
        .fold(0.0, f64::max);
    let scale = f.samples().iter().map(|x| norm_sq(x).sqrt()).fold(0.0, f64::max);
    let equivalent = residual <= tol::EQUIV_TOL * scale && p.is_invertible()?;
    Ok(Equivalence { equivalent, p: equivalent.then_some(p), residual })
}

#[derive(Debug, Clone)]
pub struct NormalityReconstruction {
    /// `Σ_k (α_k / β_k) e_k e_k*` on the common eigenbasis.
    pub reconstructed: Operator,
    /// `α_k / β_k` per common eigenvector, ordered by the tie-broken basis.
    pub ratios: Vec<Scalar>,
    pub positive: bool,
    /// `max |reconstructed − V|`
    pub reconstruction_error: f64,
}

/// Recovers `V` from a normal `S_VF` commuting with `V` via the common
/// eigenbasis of `S_VF` and `S_F`, and reports whether `V` is positive.
pub fn positivity_from_normality(cf: &ControlledFrame) -> Result<NormalityReconstruction> {
    let v = &cf.controller;
    let s_vf = controlled_operator(cf);
    let fa = require_frame(&cf.frame)?;
    let s_f = &fa.frame_operator;

    let scale = s_vf.max_norm();
    let adj = s_vf.adjoint();
    let normal_defect = (&s_vf * &adj).max_abs_diff(&(&adj * &s_vf));
    if normal_defect > tol::NORMAL_TOL * scale.powi(2).max(1.0) {
        return Err(Error::NotNormal { defect: normal_defect });
    }
    if !v.commutes_with(&s_vf) {
        return Err(Error::NotCommuting { what: "V and S_VF", defect: v.commutator_norm(&s_vf) });
    }
    if !s_vf.commutes_with(s_f) {
        return Err(Error::NotCommuting { what: "S_VF and S_F", defect: s_vf.commutator_norm(s_f) });
    }

    // The Hermitian and skew parts of a normal S_VF commute with each other
    // and with S_F, so a generic combination diagonalizes all three.
    let eps = if scale > 0.0 { 1e-4 * s_f.max_norm() / scale } else { 0.0 };
    let skew_as_hermitian = s_vf.skew_part().scale_complex(Scalar::new(0.0, 1.0));
    let mix = &(s_f + &s_vf.hermitian_part().scale(eps)) + &skew_as_hermitian.scale(0.618 * eps);
    let eig = hermitian_eig(&mix.hermitian_part())?;

    let n = cf.dim();
    let mut ratios = Vec::with_capacity(n);
    let mut residual: f64 = 0.0;
    for k in 0..n {
        let q = eig.vector(k);
        let beta = inner(&s_f.apply(&q), &q).re;
        let alpha = inner(&s_vf.apply(&q), &q);
        residual = residual
            .max(norm_sq(&(s_f.apply(&q) - q.map(|z| z * beta))).sqrt())
            .max(norm_sq(&(s_vf.apply(&q) - q.map(|z| z * alpha))).sqrt());
        ratios.push(alpha / beta);
    }
    let limit = tol::EIG_TOL * s_f.max_norm().max(scale).max(1.0);
    if residual > limit {
        return Err(Error::EigenbasisMismatch { residual });
    }
    let reconstructed = eig.with_spectrum(&ratios);
    let positive = ratios
        .iter()
        .all(|r| r.re > 0.0 && r.im.abs() <= tol::hermitian_tol(r.norm()));
    Ok(NormalityReconstruction {
        reconstruction_error: reconstructed.max_abs_diff(v),
        reconstructed,
        ratios,
        positive,
    })
}

/// `‖V S_F − S_F V*‖_max`: the gap between `Σ w ⟨f,F⟩ V F` and
/// `Σ w ⟨f, V F⟩ F` as operators.
pub fn duality_symmetry_gap(cf: &ControlledFrame) -> f64 {
    let s_f = frame_operator(&cf.frame);
    let v = &cf.controller;
    (v * &s_f).max_abs_diff(&(&s_f * &v.adjoint()))
}

/// `V⁻¹ S_VF`, which equals `S_F`.
pub fn frame_operator_from_controlled(cf: &ControlledFrame) -> Result<Operator> {
    Ok(&cf.controller.inverse()? * &controlled_operator(cf))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEstimates {
    /// `A ‖V^{1/2}‖⁻²`, a lower frame bound for `F`.
    pub lower: f64,
    /// `B ‖V^{-1/2}‖²`, an upper frame bound for `F`.
    pub upper: f64,
}

/// Uncontrolled bounds implied by controlled bounds `A, B` for self-adjoint
/// positive `V` commuting with `S_F`.
pub fn bound_estimates(cf: &ControlledFrame, mode: Mode) -> Result<BoundEstimates> {
    let v = &cf.controller;
    let veig = hermitian_eig(v)?;
    if veig.min() <= tol::psd_tol(v.max_norm()) {
        return Err(Error::NotPositive { lambda_min: veig.min() });
    }
    let s_f = frame_operator(&cf.frame);
    if !v.commutes_with(&s_f) {
        return Err(Error::NotCommuting { what: "V and S_F", defect: v.commutator_norm(&s_f) });
    }
    let a = controlled_analyze(cf, mode)?;
    Ok(BoundEstimates { lower: a.lower_bound / veig.max(), upper: a.upper_bound / veig.min() })
}
