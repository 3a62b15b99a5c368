//! Sampled continuous frames and the uncontrolled theory.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, inner, norm_sq, operator_power, Field, Operator, Scalar, Vector};
use crate::measure::MeasureSpace;
use crate::tol;

/// A family `F: 𝔄 → H^N` sampled at the nodes of a measure space.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFrame {
    space: MeasureSpace,
    dim: usize,
    samples: Vec<Vector>,
}

impl SampledFrame {
    pub fn new(space: MeasureSpace, dim: usize, samples: Vec<Vector>) -> Result<Self> {
        if samples.len() != space.len() {
            return Err(Error::LengthMismatch { left: space.len(), right: samples.len() });
        }
        if dim == 0 {
            return Err(Error::DimMismatch { expected: 1, found: 0 });
        }
        if let Some(bad) = samples.iter().find(|v| v.len() != dim) {
            return Err(Error::DimMismatch { expected: dim, found: bad.len() });
        }
        Ok(SampledFrame { space, dim, samples })
    }

    /// Samples `f(ς_i)` for a closure over the nodes.
    pub fn from_fn<F: Fn(f64) -> Vector>(space: MeasureSpace, dim: usize, f: F) -> Result<Self> {
        let samples = space.nodes().iter().map(|&s| f(s)).collect();
        Self::new(space, dim, samples)
    }

    /// Real samples, one row per node.
    pub fn from_real_rows<R: AsRef<[f64]>>(space: MeasureSpace, rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let samples = rows.iter().map(|r| linalg::real_vector(r.as_ref())).collect();
        Self::new(space, dim, samples)
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[Vector] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn field(&self) -> Field {
        self.samples
            .iter()
            .map(linalg::vector_field)
            .fold(Field::Real, Field::join)
    }

    /// `(w_i, F_{ς_i})` pairs in node order.
    pub fn weighted(&self) -> impl Iterator<Item = (f64, &Vector)> + '_ {
        self.space.weights().iter().copied().zip(&self.samples)
    }

    /// The family `L F_ς`.
    pub fn map(&self, l: &Operator) -> SampledFrame {
        assert_eq!(l.dim(), self.dim, "operator dimension must match the frame");
        SampledFrame {
            space: self.space.clone(),
            dim: self.dim,
            samples: self.samples.iter().map(|f| l.apply(f)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> SampledFrame {
        SampledFrame {
            space: self.space.clone(),
            dim: self.dim,
            samples: self.samples.iter().map(|f| f.map(|z| z * c)).collect(),
        }
    }

    /// `Σ w_i ‖F_i‖²`, the Bessel bound from Cauchy–Schwarz.
    pub fn energy(&self) -> f64 {
        self.weighted().map(|(w, f)| w * norm_sq(f)).sum()
    }

    /// `max_i ‖F_i − G_i‖`.
    pub fn max_sample_distance(&self, other: &SampledFrame) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| norm_sq(&(a - b)).sqrt())
            .fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &SampledFrame) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        if self.dim != other.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }
}

/// An element of `L²(𝔄, μ)` represented by its node values.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFunction {
    space: MeasureSpace,
    values: Vec<Scalar>,
}

impl CoefficientFunction {
    pub fn new(space: MeasureSpace, values: Vec<Scalar>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch { left: space.len(), right: values.len() });
        }
        Ok(CoefficientFunction { space, values })
    }

    pub fn from_fn<F: Fn(f64) -> Scalar>(space: MeasureSpace, f: F) -> Self {
        let values = space.nodes().iter().map(|&s| f(s)).collect();
        CoefficientFunction { space, values }
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// `Σ w_i |c_i|²`.
    pub fn norm_sq(&self) -> f64 {
        self.space.weights().iter().zip(&self.values).map(|(w, c)| w * c.norm_sqr()).sum()
    }

    /// `⟨c, d⟩_μ = Σ w_i c_i conj(d_i)`.
    pub fn inner(&self, other: &CoefficientFunction) -> Scalar {
        self.space
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(&w, (c, d))| c * d.conj() * w)
            .sum()
    }
}

/// Analysis operator: `ς_i ↦ ⟨f, F_{ς_i}⟩`.
pub fn analysis(frame: &SampledFrame, f: &Vector) -> Result<CoefficientFunction> {
    if f.len() != frame.dim {
        return Err(Error::DimMismatch { expected: frame.dim, found: f.len() });
    }
    Ok(CoefficientFunction {
        space: frame.space.clone(),
        values: frame.samples.iter().map(|s| inner(f, s)).collect(),
    })
}

/// Synthesis operator: `c ↦ Σ w_i c_i F_{ς_i}`.
pub fn synthesis(frame: &SampledFrame, c: &CoefficientFunction) -> Result<Vector> {
    if frame.space != c.space {
        return Err(Error::SpaceMismatch);
    }
    let mut out = Vector::zeros(frame.dim);
    for ((w, f), &ci) in frame.weighted().zip(&c.values) {
        out.axpy(ci * w, f, Scalar::new(1.0, 0.0));
    }
    Ok(out)
}

/// `S_F = Σ w_i F_i F_i*`. The upper triangle is accumulated and mirrored,
/// so the result is exactly Hermitian with a real diagonal.
pub fn frame_operator(frame: &SampledFrame) -> Operator {
    let n = frame.dim;
    let mut m = nalgebra::DMatrix::<Scalar>::zeros(n, n);
    for (w, f) in frame.weighted() {
        for j in 0..n {
            let fj = f[j] * w;
            m[(j, j)].re += w * f[j].norm_sqr();
            for k in j + 1..n {
                m[(j, k)] += fj * f[k].conj();
            }
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            m[(k, j)] = m[(j, k)].conj();
        }
    }
    Operator::from_matrix(m)
}

/// `Σ w_i a_i b_i*` in fixed node order.
pub(crate) fn weighted_outer_sum<'a, I>(terms: I, dim: usize) -> Operator
where
    I: Iterator<Item = (f64, &'a Vector, &'a Vector)>,
{
    let mut m = nalgebra::DMatrix::<Scalar>::zeros(dim, dim);
    for (w, a, b) in terms {
        for j in 0..dim {
            let aj = a[j] * w;
            for k in 0..dim {
                m[(j, k)] += aj * b[k].conj();
            }
        }
    }
    Operator::from_matrix(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum FrameClass {
    Frame,
    BesselOnly,
    Tight(f64),
    Parseval,
}

impl FrameClass {
    pub fn is_frame(self) -> bool {
        !matches!(self, FrameClass::BesselOnly)
    }

    pub fn name(self) -> &'static str {
        match self {
            FrameClass::Frame => "frame",
            FrameClass::BesselOnly => "bessel_only",
            FrameClass::Tight(_) => "tight",
            FrameClass::Parseval => "parseval",
        }
    }
}

impl std::fmt::Display for FrameClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FrameClass::Tight(alpha) => write!(f, "tight({})", linalg::fmt_sig(*alpha, 6)),
            other => f.write_str(other.name()),
        }
    }
}

/// Optimal bounds and classification of a sampled frame.
#[derive(Debug, Clone)]
pub struct FrameAnalysis {
    pub frame_operator: Operator,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub classification: FrameClass,
    /// `B / A`; infinite when `A ≤ 0`.
    pub condition: f64,
}

pub(crate) fn classify_bounds(lower: f64, upper: f64) -> FrameClass {
    if !(lower > tol::FRAME_TOL * upper) || upper <= 0.0 {
        FrameClass::BesselOnly
    } else if upper - lower <= tol::TIGHT_TOL * upper {
        let alpha = 0.5 * (lower + upper);
        if (lower - 1.0).abs() <= tol::TIGHT_TOL && (upper - 1.0).abs() <= tol::TIGHT_TOL {
            FrameClass::Parseval
        } else {
            FrameClass::Tight(alpha)
        }
    } else {
        FrameClass::Frame
    }
}

pub fn analyze(frame: &SampledFrame) -> Result<FrameAnalysis> {
    let s = frame_operator(frame);
    let eig = hermitian_eig(&s)?;
    let (lower, upper) = (eig.min(), eig.max());
    Ok(FrameAnalysis {
        classification: classify_bounds(lower, upper),
        condition: if lower > 0.0 { upper / lower } else { f64::INFINITY },
        frame_operator: s,
        lower_bound: lower,
        upper_bound: upper,
    })
}

fn require_frame(frame: &SampledFrame) -> Result<FrameAnalysis> {
    let a = analyze(frame)?;
    if !a.classification.is_frame() {
        return Err(Error::NotAFrame { lower: a.lower_bound, upper: a.upper_bound });
    }
    Ok(a)
}

/// Canonical dual `S_F⁻¹ F_ς`.
pub fn canonical_dual(frame: &SampledFrame) -> Result<SampledFrame> {
    let a = require_frame(frame)?;
    let inv = operator_power(&a.frame_operator, -1.0)?;
    Ok(frame.map(&inv))
}

/// Canonical Parseval frame `S_F^{-1/2} F_ς`.
pub fn parsevalize(frame: &SampledFrame) -> Result<SampledFrame> {
    let a = require_frame(frame)?;
    let root = operator_power(&a.frame_operator, -0.5)?;
    Ok(frame.map(&root))
}

/// `Σ w_i ⟨f, G_i⟩ F_i`, the reconstruction operator of a pair of families
/// applied to `f`.
pub fn reconstruct(frame: &SampledFrame, dual: &SampledFrame, f: &Vector) -> Result<Vector> {
    let coeffs = analysis(dual, f)?;
    let coeffs = CoefficientFunction::new(frame.space.clone(), coeffs.values)?;
    synthesis(frame, &coeffs)
}

/// The three integrals of the distance decomposition for a frame `F` and a
/// Parseval family `G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceDecomposition {
    /// `Σ w_i ‖V(G_i − F_i)‖²`
    pub lhs: f64,
    /// `Σ w_i ‖V S^{-1/2} F_i − V F_i‖²`
    pub term1: f64,
    /// `Σ w_i ‖V(S^{1/4} G_i − S^{-1/4} F_i)‖²`
    pub term2: f64,
    /// `lhs − term1 − term2`
    pub residual: f64,
    /// `max_i ‖G_i − V S^{-1/2} F_i‖`
    pub equality_gap: f64,
}

/// Decomposes `∫‖V(G − F)‖²` for a frame `F` with operator `S`.
///
/// `G` must be Parseval, either plainly (`S_G = I`) or `V`-controlled
/// (`V S_G = I`). The identity is exact for plain Parseval `G` and `V`
/// commuting with `S`; for other inputs the residual is reported as is.
pub fn parseval_distance_decomposition(
    f: &SampledFrame,
    g: &SampledFrame,
    v: &Operator,
) -> Result<DistanceDecomposition> {
    f.check_compatible(g)?;
    if v.dim() != f.dim {
        return Err(Error::DimMismatch { expected: f.dim, found: v.dim() });
    }
    let fa = require_frame(f)?;
    let sg = frame_operator(g);
    let id = Operator::identity(f.dim);
    let plain = sg.max_abs_diff(&id);
    let controlled = (v * &sg).max_abs_diff(&id);
    if plain > tol::TIGHT_TOL && controlled > tol::TIGHT_TOL {
        return Err(Error::NotParsevalControlled { defect: plain.min(controlled) });
    }

    let s = &fa.frame_operator;
    let s_inv_half = operator_power(s, -0.5)?;
    let s_quarter = operator_power(s, 0.25)?;
    let s_inv_quarter = operator_power(s, -0.25)?;
    let v_s_inv_half = v * &s_inv_half;

    let mut lhs = 0.0;
    let mut term1 = 0.0;
    let mut term2 = 0.0;
    let mut equality_gap: f64 = 0.0;
    for ((w, fi), gi) in f.weighted().zip(&g.samples) {
        lhs += w * norm_sq(&v.apply(&(gi - fi)));
        let canon = v_s_inv_half.apply(fi);
        term1 += w * norm_sq(&(&canon - v.apply(fi)));
        let diff = s_quarter.apply(gi) - s_inv_quarter.apply(fi);
        term2 += w * norm_sq(&v.apply(&diff));
        equality_gap = equality_gap.max(norm_sq(&(gi - &canon)).sqrt());
    }
    Ok(DistanceDecomposition { lhs, term1, term2, residual: lhs - term1 - term2, equality_gap })
}
