//! Finite discretizations of the parameter measure space.
//!
//! Every integral over the parameter domain is replaced by a weighted sum
//! over nodes. Frame identities then hold exactly for the sampled family;
//! quadrature error only enters when comparing against the continuous one.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Quadrature,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Gauss,
    Uniform,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Gauss => "gauss",
            Rule::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Descriptor {
    Interval { a: f64, b: f64, rule: Rule, order: usize },
    Explicit,
}

/// Nodes and strictly positive weights standing in for `(𝔄, μ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureSpace {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: MeasureKind,
    descriptor: Descriptor,
}

impl MeasureSpace {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn descriptor(&self) -> Descriptor {
        self.descriptor
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ w_i f(ς_i)`, summed in node order.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre rule with `order` nodes on `[a, b]`.
pub fn gauss_legendre(a: f64, b: f64, order: usize) -> Result<MeasureSpace> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::BadInterval { a, b });
    }
    if order == 0 {
        return Err(Error::BadOrder);
    }
    let (xs, ws) = legendre_nodes(order)?;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(MeasureSpace {
        nodes: xs.iter().map(|x| mid + half * x).collect(),
        weights: ws.iter().map(|w| half * w).collect(),
        kind: MeasureKind::Quadrature,
        descriptor: Descriptor::Interval { a, b, rule: Rule::Gauss, order },
    })
}

/// Legendre `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Ascending nodes and weights on `[-1, 1]`, mirrored so the rule is
/// exactly symmetric.
fn legendre_nodes(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { sweeps: NEWTON_MAX_ITER });
        }
        if n % 2 == 1 && i == m - 1 {
            x = 0.0;
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    Ok((xs, ws))
}

/// Composite midpoint rule with `m` equal cells.
pub fn uniform(a: f64, b: f64, m: usize) -> Result<MeasureSpace> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::BadInterval { a, b });
    }
    if m == 0 {
        return Err(Error::BadOrder);
    }
    let h = (b - a) / m as f64;
    Ok(MeasureSpace {
        nodes: (0..m).map(|i| a + (i as f64 + 0.5) * h).collect(),
        weights: vec![h; m],
        kind: MeasureKind::Quadrature,
        descriptor: Descriptor::Interval { a, b, rule: Rule::Uniform, order: m },
    })
}

/// Point masses; integration is the exact finite sum.
pub fn discrete(points: &[f64], masses: &[f64]) -> Result<MeasureSpace> {
    if points.len() != masses.len() {
        return Err(Error::LengthMismatch { left: points.len(), right: masses.len() });
    }
    if points.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    if let Some((index, &mass)) = masses.iter().enumerate().find(|(_, &m)| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::NonpositiveMass { index, mass });
    }
    Ok(MeasureSpace {
        nodes: points.to_vec(),
        weights: masses.to_vec(),
        kind: MeasureKind::Discrete,
        descriptor: Descriptor::Explicit,
    })
}

/// Counting measure on the points `0, 1, …, m−1`.
pub fn counting(m: usize) -> Result<MeasureSpace> {
    let points: Vec<f64> = (0..m).map(|i| i as f64).collect();
    discrete(&points, &vec![1.0; m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::QUAD_TOL;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn two_point_gauss_integrates_square() {
        let q = gauss_legendre(0.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(q.integrate(|s| s * s), 1.0 / 3.0, epsilon = 1e-15);
        // closed-form nodes 1/2 ± 1/(2√3)
        let d = 0.5 / 3f64.sqrt();
        assert_abs_diff_eq!(q.nodes()[0], 0.5 - d, epsilon = 1e-15);
        assert_abs_diff_eq!(q.nodes()[1], 0.5 + d, epsilon = 1e-15);
    }

    #[test]
    fn constants_integrate_to_length() {
        for k in 1..40 {
            let q = gauss_legendre(0.0, 1.0, k).unwrap();
            assert_abs_diff_eq!(q.integrate(|_| 1.0), 1.0, epsilon = QUAD_TOL);
            assert!(q.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(q.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn one_point_rule_is_midpoint() {
        let q = gauss_legendre(-1.0, 1.0, 1).unwrap();
        assert_eq!(q.nodes(), &[0.0]);
        assert_abs_diff_eq!(q.weights()[0], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn gauss_rejects_bad_interval() {
        assert!(matches!(gauss_legendre(1.0, 1.0, 3), Err(Error::BadInterval { .. })));
        assert!(matches!(gauss_legendre(2.0, 1.0, 3), Err(Error::BadInterval { .. })));
        assert!(matches!(gauss_legendre(0.0, 1.0, 0), Err(Error::BadOrder)));
    }

    #[test]
    fn monomials_exact_up_to_degree() {
        let (a, b) = (-0.5, 2.0);
        for q in 1..=20 {
            let rule = gauss_legendre(a, b, q).unwrap();
            for d in 0..=(2 * q - 1) as i32 {
                let exact = (b.powi(d + 1) - a.powi(d + 1)) / (d + 1) as f64;
                let got = rule.integrate(|s| s.powi(d));
                assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1.0), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn uniform_examples() {
        let q = uniform(0.0, 1.0, 1).unwrap();
        assert_eq!(q.nodes(), &[0.5]);
        assert_eq!(q.weights(), &[1.0]);
        for m in [1, 2, 7, 100] {
            assert_abs_diff_eq!(uniform(0.0, 1.0, m).unwrap().integrate(|s| s), 0.5, epsilon = 1e-14);
        }
        let fine = uniform(0.0, 1.0, 1000).unwrap();
        assert_abs_diff_eq!(fine.integrate(|s| s * s), 1.0 / 3.0, epsilon = 1e-6);
        assert!(matches!(uniform(1.0, 0.0, 3), Err(Error::BadInterval { .. })));
    }

    #[test]
    fn discrete_examples() {
        let c = discrete(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(c.integrate(|_| 1.0), 3.0);
        let single = discrete(&[0.0], &[2.0]).unwrap();
        assert_eq!(single.integrate(|_| 5.0), 10.0);
        let weighted = discrete(&[0.0, 1.0], &[0.25, 0.75]).unwrap();
        assert_eq!(weighted.integrate(|s| s), 0.75);
    }

    #[test]
    fn discrete_errors() {
        assert!(matches!(discrete(&[0.0], &[-1.0]), Err(Error::NonpositiveMass { index: 0, .. })));
        assert!(matches!(discrete(&[0.0, 1.0], &[1.0, 0.0]), Err(Error::NonpositiveMass { index: 1, .. })));
        assert!(matches!(discrete(&[0.0, 1.0], &[1.0]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(discrete(&[], &[]), Err(Error::EmptyMeasure)));
    }

    proptest! {
        #[test]
        fn integration_is_linear_and_monotone(
            k in 1usize..30,
            a in -3.0f64..3.0,
            c1 in -2.0f64..2.0,
            c2 in -2.0f64..2.0,
        ) {
            let q = gauss_legendre(0.0, 1.0, k).unwrap();
            let f = |s: f64| (a * s).sin();
            let g = |s: f64| s.exp();
            let combo = q.integrate(|s| c1 * f(s) + c2 * g(s));
            let split = c1 * q.integrate(f) + c2 * q.integrate(g);
            prop_assert!((combo - split).abs() <= 1e-13);
            prop_assert!(q.integrate(|s| (a * s).powi(2)) >= 0.0);
        }
    }
}
