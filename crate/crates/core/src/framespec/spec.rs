use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::doc::{parse_document, Entry, Section, Value};
use super::expr::{evaluate, parse_expr, Expr};
use crate::error::{Error, Result};
use crate::frame::SampledFrame;
use crate::linalg::{Field, Operator, Scalar, Vector};
use crate::measure::{self, Descriptor, MeasureSpace, Rule};

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureDecl {
    Interval { a: f64, b: f64, rule: Rule, order: usize },
    Discrete { points: Vec<f64>, masses: Vec<f64> },
}

impl MeasureDecl {
    pub fn node_count(&self) -> usize {
        match self {
            MeasureDecl::Interval { order, .. } => *order,
            MeasureDecl::Discrete { points, .. } => points.len(),
        }
    }

    pub fn build(&self) -> Result<MeasureSpace> {
        match self {
            MeasureDecl::Interval { a, b, rule: Rule::Gauss, order } => measure::gauss_legendre(*a, *b, *order),
            MeasureDecl::Interval { a, b, rule: Rule::Uniform, order } => measure::uniform(*a, *b, *order),
            MeasureDecl::Discrete { points, masses } => measure::discrete(points, masses),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// One expression per coordinate.
    Components(Vec<Expr>),
    /// One row per node.
    Samples(Vec<Vec<Scalar>>),
}

/// A validated frame specification document.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    pub dim: usize,
    pub field: Field,
    pub label: Option<String>,
    pub measure: MeasureDecl,
    pub family: Family,
    pub controller: Option<Operator>,
}

pub fn load_spec_path(path: impl AsRef<Path>) -> Result<FrameSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_spec(&text)
}

pub fn load_spec(text: &str) -> Result<FrameSpec> {
    let sections = parse_document(text)?;
    for s in &sections {
        if !matches!(s.name.as_str(), "frame" | "measure" | "controller") {
            return Err(invalid(&s.name, "unknown section"));
        }
    }
    let find = |name: &str| sections.iter().find(|s| s.name == name);

    let frame = Keys::new(find("frame").ok_or_else(|| invalid("frame", "missing section"))?,
        &["dim", "field", "label", "components", "samples"])?;
    let dim = frame.required("dim").and_then(|e| as_count(&frame.path("dim"), &e.value))?;
    if dim == 0 {
        return Err(invalid("frame.dim", "must be at least 1"));
    }
    let field = match frame.get("field") {
        None => Field::Real,
        Some(e) => match word(&e.value).as_deref() {
            Some("real") => Field::Real,
            Some("complex") => Field::Complex,
            _ => return Err(invalid("frame.field", "expected `real` or `complex`")),
        },
    };
    let label = match frame.get("label") {
        None => None,
        Some(Entry { value: Value::Str(s), .. }) => Some(s.clone()),
        Some(_) => return Err(invalid("frame.label", "expected a quoted string")),
    };

    let measure = load_measure(&Keys::new(
        find("measure").ok_or_else(|| invalid("measure", "missing section"))?,
        &["kind", "interval", "order", "points", "masses"],
    )?)?;

    let family = match (frame.get("components"), frame.get("samples")) {
        (Some(_), Some(_)) => return Err(invalid("frame", "give either `components` or `samples`, not both")),
        (None, None) => return Err(invalid("frame", "missing `components` or `samples`")),
        (Some(e), None) => {
            let Value::Array(items) = &e.value else {
                return Err(invalid("frame.components", "expected an array of expression strings"));
            };
            if items.len() != dim {
                return Err(invalid("frame.components", &format!("{} expressions for dim = {dim}", items.len())));
            }
            let exprs = items
                .iter()
                .enumerate()
                .map(|(i, item)| match item {
                    Value::Str(text) => parse_expr(text).map_err(|err| invalid(&format!("frame.components[{i}]"), &err.to_string())),
                    Value::Num(x) => Ok(literal(*x)),
                    _ => Err(invalid(&format!("frame.components[{i}]"), "expected an expression string")),
                })
                .collect::<Result<Vec<_>>>()?;
            Family::Components(exprs)
        }
        (None, Some(e)) => {
            let rows = as_matrix("frame.samples", &e.value, field)?;
            if rows.len() != measure.node_count() {
                return Err(invalid(
                    "frame.samples",
                    &format!("{} rows for a measure with {} nodes", rows.len(), measure.node_count()),
                ));
            }
            if let Some(i) = rows.iter().position(|r| r.len() != dim) {
                return Err(invalid("frame.samples", &format!("row {i} has {} entries for dim = {dim}", rows[i].len())));
            }
            Family::Samples(rows)
        }
    };

    let controller = match find("controller") {
        None => None,
        Some(section) => {
            let keys = Keys::new(section, &["V"])?;
            let rows = as_matrix("controller.V", &keys.required("V")?.value, field)?;
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(invalid("controller.V", &format!("must be {dim}x{dim}")));
            }
            Some(Operator::from_rows(&rows))
        }
    };

    Ok(FrameSpec { dim, field, label, measure, family, controller })
}

/// Builds the measure, evaluates every component at every node, and returns
/// the frame with the declared controller.
pub fn materialize(spec: &FrameSpec) -> Result<(SampledFrame, Option<Operator>)> {
    let space = spec.measure.build()?;
    let samples = match &spec.family {
        Family::Samples(rows) => rows.iter().map(|r| Vector::from_row_slice(r)).collect(),
        Family::Components(exprs) => {
            let mut samples = Vec::with_capacity(space.len());
            for &s in space.nodes() {
                let mut v = Vector::zeros(spec.dim);
                for (component, e) in exprs.iter().enumerate() {
                    let x = evaluate(e, s).map_err(|source| Error::Evaluation { component, node: s, source: Box::new(source) })?;
                    v[component] = Scalar::new(x, 0.0);
                }
                samples.push(v);
            }
            samples
        }
    };
    let frame = SampledFrame::new(space, spec.dim, samples)?;
    Ok((frame, spec.controller.clone()))
}

/// Writes an explicit-samples document that [`load_spec`] reads back to the
/// same frame and controller.
pub fn write_spec(frame: &SampledFrame, controller: Option<&Operator>, label: Option<&str>) -> String {
    let field = controller.map_or(frame.field(), |v| frame.field().join(v.field()));
    let mut out = String::new();
    out.push_str("[frame]\n");
    let _ = writeln!(out, "dim = {}", frame.dim());
    let _ = writeln!(out, "field = {field}");
    if let Some(label) = label {
        let escaped = label.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n").replace('\t', "\\t");
        let _ = writeln!(out, "label = \"{escaped}\"");
    }
    out.push_str("samples = [\n");
    for v in frame.samples() {
        let _ = writeln!(out, "  {},", row(v.iter(), field));
    }
    out.push_str("]\n\n[measure]\n");
    let space = frame.space();
    match space.descriptor() {
        Descriptor::Interval { a, b, rule, order } => {
            let _ = writeln!(out, "kind = {}\ninterval = [{a:?}, {b:?}]\norder = {order}", rule.name());
        }
        Descriptor::Explicit => {
            let _ = writeln!(out, "kind = discrete\npoints = {}\nmasses = {}", floats(space.nodes()), floats(space.weights()));
        }
    }
    if let Some(v) = controller {
        out.push_str("\n[controller]\nV = [\n");
        for i in 0..v.dim() {
            let _ = writeln!(out, "  {},", row(v.matrix().row(i).iter(), field));
        }
        out.push_str("]\n");
    }
    out
}

fn floats(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

fn row<'a>(entries: impl Iterator<Item = &'a Scalar>, field: Field) -> String {
    let items: Vec<String> = entries
        .map(|z| match field {
            Field::Real => format!("{:?}", z.re),
            Field::Complex => format!("[{:?}, {:?}]", z.re, z.im),
        })
        .collect();
    format!("[{}]", items.join(", "))
}

fn literal(x: f64) -> Expr {
    if x < 0.0 {
        Expr::negate(Expr::Num(-x))
    } else {
        Expr::Num(x)
    }
}

fn invalid(field: &str, reason: &str) -> Error {
    Error::Validation { field: field.to_string(), reason: reason.to_string() }
}

struct Keys<'a> {
    section: &'a str,
    entries: BTreeMap<&'a str, &'a Entry>,
}

impl<'a> Keys<'a> {
    fn new(section: &'a Section, allowed: &[&str]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for e in &section.entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(invalid(&format!("{}.{}", section.name, e.key), "unknown key"));
            }
            entries.insert(e.key.as_str(), e);
        }
        Ok(Keys { section: &section.name, entries })
    }

    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.section)
    }

    fn get(&self, key: &str) -> Option<&'a Entry> {
        self.entries.get(key).copied()
    }

    fn required(&self, key: &str) -> Result<&'a Entry> {
        self.get(key).ok_or_else(|| invalid(&self.path(key), "missing"))
    }
}

fn word(v: &Value) -> Option<String> {
    match v {
        Value::Ident(s) | Value::Str(s) => Some(s.clone()),
        _ => None,
    }
}

fn as_count(path: &str, v: &Value) -> Result<usize> {
    match v {
        Value::Num(x) if x.fract() == 0.0 && *x >= 0.0 && *x <= u32::MAX as f64 => Ok(*x as usize),
        _ => Err(invalid(path, "expected a nonnegative integer")),
    }
}

fn as_floats(path: &str, v: &Value) -> Result<Vec<f64>> {
    match v {
        Value::Array(items) => items
            .iter()
            .map(|x| match x {
                Value::Num(x) => Ok(*x),
                other => Err(invalid(path, &format!("expected numbers, found {}", other.describe()))),
            })
            .collect(),
        _ => Err(invalid(path, "expected an array of numbers")),
    }
}

fn as_scalar(path: &str, v: &Value, field: Field) -> Result<Scalar> {
    let z = match v {
        Value::Num(x) => Scalar::new(*x, 0.0),
        Value::Array(pair) => match pair.as_slice() {
            [Value::Num(re), Value::Num(im)] => Scalar::new(*re, *im),
            _ => return Err(invalid(path, "complex entries are written [re, im]")),
        },
        other => return Err(invalid(path, &format!("expected a number, found {}", other.describe()))),
    };
    if field == Field::Real && z.im != 0.0 {
        return Err(invalid(path, "nonzero imaginary part with field = real"));
    }
    Ok(z)
}

fn as_matrix(path: &str, v: &Value, field: Field) -> Result<Vec<Vec<Scalar>>> {
    let Value::Array(rows) = v else {
        return Err(invalid(path, "expected an array of rows"));
    };
    rows.iter()
        .map(|r| match r {
            Value::Array(items) => items.iter().map(|x| as_scalar(path, x, field)).collect(),
            _ => Err(invalid(path, "each row must be an array")),
        })
        .collect()
}

fn load_measure(keys: &Keys<'_>) -> Result<MeasureDecl> {
    let kind = word(&keys.required("kind")?.value).unwrap_or_default();
    let rule = match kind.as_str() {
        "gauss" => Some(Rule::Gauss),
        "uniform" => Some(Rule::Uniform),
        "discrete" => None,
        _ => return Err(invalid("measure.kind", "expected `gauss`, `uniform` or `discrete`")),
    };
    let forbid = |names: &[&str]| {
        for name in names {
            if keys.get(name).is_some() {
                return Err(invalid(&keys.path(name), &format!("not allowed with kind = {kind}")));
            }
        }
        Ok(())
    };
    match rule {
        Some(rule) => {
            forbid(&["points", "masses"])?;
            let interval = as_floats("measure.interval", &keys.required("interval")?.value)?;
            let [a, b] = interval[..] else {
                return Err(invalid("measure.interval", "expected [a, b]"));
            };
            if !(a < b) {
                return Err(invalid("measure.interval", "need a < b"));
            }
            let order = as_count("measure.order", &keys.required("order")?.value)?;
            if order == 0 {
                return Err(invalid("measure.order", "must be at least 1"));
            }
            Ok(MeasureDecl::Interval { a, b, rule, order })
        }
        None => {
            forbid(&["interval", "order"])?;
            let points = as_floats("measure.points", &keys.required("points")?.value)?;
            let masses = as_floats("measure.masses", &keys.required("masses")?.value)?;
            if points.is_empty() {
                return Err(invalid("measure.points", "at least one point is required"));
            }
            if points.len() != masses.len() {
                return Err(invalid("measure.masses", &format!("{} masses for {} points", masses.len(), points.len())));
            }
            if let Some(i) = masses.iter().position(|&m| !(m > 0.0)) {
                return Err(invalid("measure.masses", &format!("mass {} at index {i} is not strictly positive", masses[i])));
            }
            Ok(MeasureDecl::Discrete { points, masses })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{analyze, frame_operator, FrameClass};

    const MOMENT: &str = "[frame]\ndim = 2\nfield = real            # real | complex\nlabel = \"moment\"\ncomponents = [\"1\", \"s\"]\n[measure]\nkind = gauss\ninterval = [0.0, 1.0]\norder = 8\n";

    fn field_of(err: Result<FrameSpec>) -> String {
        match err {
            Err(Error::Validation { field, .. }) => field,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn moment_document_loads_and_materializes() {
        let spec = load_spec(MOMENT).unwrap();
        assert_eq!(spec.dim, 2);
        assert_eq!(spec.label.as_deref(), Some("moment"));
        assert!(matches!(&spec.family, Family::Components(e) if e.len() == 2));
        let (f, v) = materialize(&spec).unwrap();
        assert!(v.is_none());
        let expect = Operator::from_real_rows(&[[1.0, 0.5], [0.5, 1.0 / 3.0]]);
        assert!(frame_operator(&f).max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn order_two_nodes_are_closed_form() {
        let spec = load_spec(&MOMENT.replace("order = 8", "order = 2")).unwrap();
        let (f, _) = materialize(&spec).unwrap();
        let d = 0.5 / 3f64.sqrt();
        for (sample, node) in f.samples().iter().zip([0.5 - d, 0.5 + d]) {
            assert_eq!(sample[0], Scalar::new(1.0, 0.0));
            assert!((sample[1].re - node).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_zero_frame_is_bessel_only() {
        let spec = load_spec(&MOMENT.replace("[\"1\", \"s\"]", "[\"0\", \"0\"]")).unwrap();
        let (f, _) = materialize(&spec).unwrap();
        assert_eq!(analyze(&f).unwrap().classification, FrameClass::BesselOnly);
    }

    #[test]
    fn explicit_samples_pass_through() {
        let doc = "[frame]\ndim = 2\nfield = complex\nsamples = [[1, [0, 2]], [-0.5, 3]]\n[measure]\nkind = discrete\npoints = [0, 1]\nmasses = [0.5, 2]\n[controller]\nV = [[1, 0], [0, [2, -1]]]\n";
        let spec = load_spec(doc).unwrap();
        let (f, v) = materialize(&spec).unwrap();
        assert_eq!(f.samples()[0][1], Scalar::new(0.0, 2.0));
        assert_eq!(f.samples()[1][0], Scalar::new(-0.5, 0.0));
        assert_eq!(f.space().weights(), &[0.5, 2.0]);
        assert_eq!(v.unwrap().get(1, 1), Scalar::new(2.0, -1.0));
    }

    #[test]
    fn validation_errors() {
        let discrete = "[frame]\ndim = 1\nsamples = [[1]]\n[measure]\nkind = discrete\npoints = [0]\nmasses = [-1]\n";
        assert_eq!(field_of(load_spec(discrete)), "measure.masses");
        assert_eq!(field_of(load_spec(&MOMENT.replace("[\"1\", \"s\"]", "[\"1\", \"s\", \"s^2\"]"))), "frame.components");
        assert_eq!(field_of(load_spec(&format!("{MOMENT}extra = 1\n"))), "measure.extra");
        assert_eq!(field_of(load_spec(&format!("{MOMENT}[other]\n"))), "other");
        assert_eq!(field_of(load_spec(&MOMENT.replace("dim = 2", "dim = 2.5"))), "frame.dim");
        assert_eq!(field_of(load_spec(&MOMENT.replace("dim = 2", "dim = 0"))), "frame.dim");
        assert_eq!(field_of(load_spec(&MOMENT.replace("field = real", "field = quaternion"))), "frame.field");
        assert_eq!(field_of(load_spec(&MOMENT.replace("kind = gauss", "kind = simpson"))), "measure.kind");
        assert_eq!(field_of(load_spec(&MOMENT.replace("[0.0, 1.0]", "[1.0, 0.0]"))), "measure.interval");
        assert_eq!(field_of(load_spec(&MOMENT.replace("order = 8", "order = 0"))), "measure.order");
        assert_eq!(field_of(load_spec(&MOMENT.replace("\"s\"]", "\"t\"]"))), "frame.components[1]");
        assert_eq!(field_of(load_spec(&format!("{MOMENT}[controller]\nV = [[1, 0]]\n"))), "controller.V");
        assert_eq!(field_of(load_spec(&format!("{MOMENT}[controller]\nV = [[1, [0, 1]], [0, 1]]\n"))), "controller.V");
        assert_eq!(field_of(load_spec(&MOMENT.replace("components = [\"1\", \"s\"]", "components = [\"1\", \"s\"]\nsamples = [[1, 2]]"))), "frame");
        assert_eq!(field_of(load_spec(&MOMENT.replace("components = [\"1\", \"s\"]", "samples = [[1, 2]]"))), "frame.samples");
        assert_eq!(field_of(load_spec(&MOMENT.replace("interval = [0.0, 1.0]", "points = [0.0, 1.0]"))), "measure.points");
        assert_eq!(field_of(load_spec("[measure]\nkind = gauss\n")), "frame");
    }

    #[test]
    fn parse_errors_have_lines() {
        assert!(matches!(load_spec("[frame]\ndim = 2\nfield = = real\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn evaluation_errors_name_the_node() {
        let spec = load_spec(&MOMENT.replace("\"s\"]", "\"1/(s - 0.5)\"]").replace("order = 8", "order = 3")).unwrap();
        match materialize(&spec) {
            Err(Error::Evaluation { component: 1, node, source }) => {
                assert_eq!(node, 0.5);
                assert!(matches!(*source, Error::DivisionByZero { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn written_documents_round_trip() {
        let (f, _) = materialize(&load_spec(MOMENT).unwrap()).unwrap();
        let v = Operator::from_real_rows(&[[1.0, 1.0], [-1.0, 1.0]]).scale(1.0 / 3.0);
        let text = write_spec(&f, Some(&v), Some("moment \"copy\""));
        let spec = load_spec(&text).unwrap();
        assert_eq!(spec.label.as_deref(), Some("moment \"copy\""));
        let (g, w) = materialize(&spec).unwrap();
        assert_eq!(g, f);
        assert_eq!(w.unwrap(), v);

        let doc = "[frame]\ndim = 2\nfield = complex\nsamples = [[1, [0, 2]], [-0.1, 3e-300]]\n[measure]\nkind = discrete\npoints = [0.1, 1]\nmasses = [0.3, 2]\n";
        let (h, _) = materialize(&load_spec(doc).unwrap()).unwrap();
        let (h2, _) = materialize(&load_spec(&write_spec(&h, None, None)).unwrap()).unwrap();
        assert_eq!(h, h2);
    }
}
