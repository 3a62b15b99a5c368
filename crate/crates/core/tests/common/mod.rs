#![allow(dead_code)]

use std::io::Write;

use cframe::frame::{analyze, SampledFrame};
use cframe::linalg::{hermitian_eig, Operator, Scalar, Vector};
use cframe::measure::{discrete, gauss_legendre};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Prints one result line outside the test harness' output capture, then
/// fails the test if `ok` is false.
pub fn report(criterion: u32, name: &str, ok: bool, detail: &str) {
    let line = format!("\ncriterion {criterion:02} {}: {name}: {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "{}", line.trim_end());
}

fn entry(rng: &mut TestRng, complex: bool) -> Scalar {
    let re = rng.random_range(-1.0..1.0);
    let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
    Scalar::new(re, im)
}

pub fn random_matrix(rng: &mut TestRng, n: usize, complex: bool) -> DMatrix<Scalar> {
    DMatrix::from_fn(n, n, |_, _| entry(rng, complex))
}

/// A frame on a discrete measure with condition number at most `max_cond`.
pub fn random_discrete_frame(rng: &mut TestRng, n: usize, complex: bool, max_cond: f64) -> SampledFrame {
    loop {
        let m = n + rng.random_range(1..=n + 4);
        let points: Vec<f64> = (0..m).map(|i| i as f64 + rng.random_range(0.0..0.5)).collect();
        let masses: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..2.0)).collect();
        let samples: Vec<Vector> = (0..m).map(|_| Vector::from_fn(n, |_, _| entry(rng, complex))).collect();
        let frame = SampledFrame::new(discrete(&points, &masses).unwrap(), n, samples).unwrap();
        if analyze(&frame).unwrap().condition <= max_cond {
            return frame;
        }
    }
}

/// Legendre polynomials `P_0..=P_deg` at `s`.
fn legendre(deg: usize, s: f64) -> Vec<f64> {
    let mut p = vec![1.0, s];
    for k in 1..deg {
        let next = ((2 * k + 1) as f64 * s * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
        p.push(next);
    }
    p.truncate(deg + 1);
    p
}

/// A frame `F(s) = Σ_k c_k P_k(s)` sampled on a Gauss–Legendre rule, with
/// condition number at most `max_cond`.
pub fn random_quadrature_frame(rng: &mut TestRng, n: usize, max_cond: f64) -> SampledFrame {
    loop {
        let order = n + rng.random_range(2..=8);
        let space = gauss_legendre(-1.0, 1.0, order).unwrap();
        let coeffs: Vec<Vec<f64>> = (0..n).map(|_| (0..n + 1).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let frame = SampledFrame::from_fn(space, n, |s| {
            let p = legendre(n, s);
            Vector::from_fn(n, |i, _| Scalar::new(coeffs[i].iter().zip(&p).map(|(c, b)| c * b).sum(), 0.0))
        })
        .unwrap();
        if analyze(&frame).unwrap().condition <= max_cond {
            return frame;
        }
    }
}

/// Alternates discrete real, discrete complex and quadrature frames.
pub fn random_frame(rng: &mut TestRng, k: usize, n: usize) -> SampledFrame {
    match k % 3 {
        0 => random_discrete_frame(rng, n, false, 100.0),
        1 => random_discrete_frame(rng, n, true, 100.0),
        _ => random_quadrature_frame(rng, n, 100.0),
    }
}

/// Haar-ish unitary from the QR factor of a random matrix.
pub fn random_unitary(rng: &mut TestRng, n: usize, complex: bool) -> DMatrix<Scalar> {
    loop {
        let a = random_matrix(rng, n, complex);
        if a.clone().try_inverse().is_some() {
            return a.qr().q();
        }
    }
}

/// `Q diag(d) Q*`, made exactly Hermitian.
pub fn conjugate_diag(q: &DMatrix<Scalar>, d: &[f64]) -> Operator {
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d.len(), d.iter().map(|&x| Scalar::new(x, 0.0))));
    Operator::from_matrix(q * diag * q.adjoint()).hermitian_part()
}

pub fn random_positive(rng: &mut TestRng, n: usize, complex: bool) -> Operator {
    let q = random_unitary(rng, n, complex);
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..5.0)).collect();
    conjugate_diag(&q, &d)
}

pub fn random_invertible(rng: &mut TestRng, n: usize, complex: bool) -> Operator {
    let u = random_unitary(rng, n, complex);
    let w = random_unitary(rng, n, complex);
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..3.0)).collect();
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, d.iter().map(|&x| Scalar::new(x, 0.0))));
    Operator::from_matrix(u * diag * w)
}

/// Orthonormal eigenvectors of `S_F` as columns.
pub fn frame_eigenbasis(s: &Operator) -> DMatrix<Scalar> {
    hermitian_eig(s).unwrap().eigenvectors.into_matrix()
}

/// Block-diagonal structure in the basis `q`: block sizes summing to `n`.
pub fn random_blocks(rng: &mut TestRng, n: usize) -> Vec<usize> {
    let mut blocks = Vec::new();
    let mut left = n;
    while left > 0 {
        let b = rng.random_range(1..=left.min(3));
        blocks.push(b);
        left -= b;
    }
    blocks
}

/// `Q (⊕ X_b) Q*` where each block `X_b` comes from `block`.
pub fn block_operator<F>(q: &DMatrix<Scalar>, blocks: &[usize], mut block: F) -> Operator
where
    F: FnMut(usize, usize) -> DMatrix<Scalar>,
{
    let n = q.nrows();
    let mut d = DMatrix::<Scalar>::zeros(n, n);
    let mut at = 0;
    for (k, &b) in blocks.iter().enumerate() {
        d.view_mut((at, at), (b, b)).copy_from(&block(k, b));
        at += b;
    }
    Operator::from_matrix(q * d * q.adjoint())
}

/// Oracle frame operator `Φ W Φ*` by dense matrix products.
pub fn oracle_frame_operator(f: &SampledFrame) -> Operator {
    let phi = synthesis_matrix(f, None);
    Operator::from_matrix(&phi * phi.adjoint())
}

/// `Φ = [√w_i G_i]` (columns), `G = F` unless given.
pub fn synthesis_matrix(f: &SampledFrame, g: Option<&SampledFrame>) -> DMatrix<Scalar> {
    let src = g.unwrap_or(f);
    let n = f.dim();
    let mut phi = DMatrix::<Scalar>::zeros(n, f.len());
    for (j, (w, x)) in f.space().weights().iter().zip(src.samples()).enumerate() {
        phi.set_column(j, &x.map(|z| z * w.sqrt()));
    }
    phi
}

/// Eigenvalues of a Hermitian matrix by nalgebra, ascending.
pub fn oracle_eigenvalues(m: &Operator) -> Vec<f64> {
    let mut ev: Vec<f64> = m.hermitian_part().into_matrix().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn max_abs(m: &DMatrix<Scalar>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
