//! Dense linear algebra on `H^N` over real or complex scalars.
//!
//! Everything is stored as complex; an operator or vector is tagged
//! [`Field::Real`] exactly when every imaginary part is zero. The Hermitian
//! eigensolver is a cyclic Jacobi iteration whose rotations stay real on real
//! input, so real problems never pick up spurious imaginary parts.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tol;

pub type Scalar = Complex64;
pub type Vector = DVector<Scalar>;

const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn of_slice(xs: &[Scalar]) -> Field {
        if xs.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        }
    }

    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => f.write_str("real"),
            Field::Complex => f.write_str("complex"),
        }
    }
}

pub fn real_vector(xs: &[f64]) -> Vector {
    DVector::from_iterator(xs.len(), xs.iter().map(|&x| Scalar::new(x, 0.0)))
}

pub fn vector_field(v: &Vector) -> Field {
    Field::of_slice(v.as_slice())
}

/// `⟨a, b⟩ = Σ a_k conj(b_k)`, linear in the first slot.
pub fn inner(a: &Vector, b: &Vector) -> Scalar {
    b.dotc(a)
}

pub fn norm_sq(v: &Vector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn basis_vector(n: usize, k: usize) -> Vector {
    let mut e = Vector::zeros(n);
    e[k] = Scalar::new(1.0, 0.0);
    e
}

/// A linear operator on `H^N`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<Scalar>,
}

impl Operator {
    pub fn from_matrix(mat: DMatrix<Scalar>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operator matrix must be square");
        Operator { mat }
    }

    pub fn identity(n: usize) -> Self {
        Operator { mat: DMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        Operator { mat: DMatrix::zeros(n, n) }
    }

    pub fn scalar(n: usize, c: f64) -> Self {
        Self::identity(n).scale(c)
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut mat = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), n, "operator rows must be square");
            for (j, &x) in row.iter().enumerate() {
                mat[(i, j)] = Scalar::new(x, 0.0);
            }
        }
        Operator { mat }
    }

    pub fn from_rows<R: AsRef<[Scalar]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut mat = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), n, "operator rows must be square");
            for (j, &x) in row.iter().enumerate() {
                mat[(i, j)] = x;
            }
        }
        Operator { mat }
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let n = d.len();
        let mut mat = DMatrix::zeros(n, n);
        for (k, &x) in d.iter().enumerate() {
            mat[(k, k)] = Scalar::new(x, 0.0);
        }
        Operator { mat }
    }

    /// Rank-one operator `u v*`.
    pub fn outer(u: &Vector, v: &Vector) -> Self {
        Operator { mat: u * v.adjoint() }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Scalar> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Scalar> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.mat[(i, j)]
    }

    pub fn field(&self) -> Field {
        Field::of_slice(self.mat.as_slice())
    }

    pub fn adjoint(&self) -> Operator {
        Operator { mat: self.mat.adjoint() }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.mat * v
    }

    pub fn scale(&self, c: f64) -> Operator {
        Operator { mat: self.mat.map(|z| z * c) }
    }

    pub fn scale_complex(&self, c: Scalar) -> Operator {
        Operator { mat: self.mat.map(|z| z * c) }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_part(&self) -> Operator {
        Operator { mat: (&self.mat + self.mat.adjoint()) * Scalar::new(0.5, 0.0) }
    }

    pub fn skew_part(&self) -> Operator {
        Operator { mat: (&self.mat - self.mat.adjoint()) * Scalar::new(0.5, 0.0) }
    }

    /// `max |M - M*|`.
    pub fn self_adjoint_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint_defect() <= tol::hermitian_tol(self.max_norm())
    }

    /// `‖AB − BA‖_max`.
    pub fn commutator_norm(&self, other: &Operator) -> f64 {
        (self * other).max_abs_diff(&(other * self))
    }

    /// Commutation within `COMMUTE_TOL` scaled by the operands' max-norms.
    pub fn commutes_with(&self, other: &Operator) -> bool {
        self.commutator_norm(other) <= tol::COMMUTE_TOL * self.max_norm() * other.max_norm()
    }

    pub fn trace(&self) -> Scalar {
        self.mat.diagonal().iter().sum()
    }

    /// Singular values in ascending order, read off the Hermitian dilation
    /// `[[0, M], [M*, 0]]` whose spectrum is `±σ_k`.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut big = DMatrix::zeros(2 * n, 2 * n);
        big.view_mut((0, n), (n, n)).copy_from(&self.mat);
        big.view_mut((n, 0), (n, n)).copy_from(&self.mat.adjoint());
        let eig = hermitian_eig(&Operator { mat: big })?;
        Ok(eig.eigenvalues[n..].iter().map(|s| s.max(0.0)).collect())
    }

    /// Spectral norm.
    pub fn op_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.last().copied().unwrap_or(0.0))
    }

    pub fn is_invertible(&self) -> Result<bool> {
        let sigma_min = self.singular_values()?.first().copied().unwrap_or(0.0);
        Ok(sigma_min > tol::singular_tol(self.max_norm()))
    }

    /// General inverse by LU with partial pivoting.
    pub fn inverse(&self) -> Result<Operator> {
        let scale = self.max_norm();
        let inv = self
            .mat
            .clone()
            .try_inverse()
            .filter(|m| m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        match inv {
            Some(mat) if scale > 0.0 => Ok(Operator { mat }),
            _ => Err(Error::Singular { sigma_min: 0.0 }),
        }
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator { mat: &self.mat * &rhs.mat }
    }
}

impl<'a> Mul<&'a Vector> for &'a Operator {
    type Output = Vector;
    fn mul(self, rhs: &'a Vector) -> Vector {
        &self.mat * rhs
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        Operator { mat: &self.mat + &rhs.mat }
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        Operator { mat: &self.mat - &rhs.mat }
    }
}

/// Spectral decomposition of a self-adjoint operator.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: Operator,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> Vector {
        self.eigenvectors.matrix().column(k).into_owned()
    }

    /// `Q diag(f(λ)) Q*`.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Operator {
        let q = self.eigenvectors.matrix();
        let mut scaled = q.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let fk = f(lambda);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= fk);
        }
        Operator::from_matrix(scaled * q.adjoint())
    }

    /// `Q diag(d) Q*` for arbitrary (possibly complex) diagonal values.
    pub fn with_spectrum(&self, d: &[Scalar]) -> Operator {
        assert_eq!(d.len(), self.dim());
        let q = self.eigenvectors.matrix();
        let mut scaled = q.clone();
        for (k, &dk) in d.iter().enumerate() {
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= dk);
        }
        Operator::from_matrix(scaled * q.adjoint())
    }

    pub fn reconstruct(&self) -> Operator {
        self.map(|x| x)
    }
}

/// Eigendecomposition of a self-adjoint operator by cyclic Jacobi.
///
/// Eigenvalues come back ascending; each eigenvector's first component with
/// modulus above `1e-10` is rotated to be positive real. Ties keep the order
/// the sweep produced, which is a fixed function of the input.
pub fn hermitian_eig(m: &Operator) -> Result<EigenDecomposition> {
    let defect = m.self_adjoint_defect();
    if defect > tol::hermitian_tol(m.max_norm()) {
        return Err(Error::NotSelfAdjoint { defect });
    }
    let n = m.dim();
    let mut a = m.hermitian_part().into_matrix();
    for k in 0..n {
        a[(k, k)].im = 0.0;
    }
    let mut v: DMatrix<Scalar> = DMatrix::identity(n, n);
    jacobi_sweeps(&mut a, &mut v)?;

    let diag: Vec<f64> = (0..n).map(|k| a[(k, k)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let mut q = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).into_owned();
        if let Some(lead) = col.iter().find(|z| z.norm() > 1e-10).copied() {
            let phase = lead.conj() / lead.norm();
            if phase != Scalar::new(1.0, 0.0) {
                col.iter_mut().for_each(|z| *z *= phase);
            }
        }
        q.set_column(dst, &col);
    }
    Ok(EigenDecomposition {
        eigenvalues: order.iter().map(|&k| diag[k]).collect(),
        eigenvectors: Operator::from_matrix(q),
    })
}

fn off_diagonal_norm(a: &DMatrix<Scalar>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi_sweeps(a: &mut DMatrix<Scalar>, v: &mut DMatrix<Scalar>) -> Result<()> {
    let n = a.nrows();
    let total = a.norm();
    if n < 2 || total == 0.0 {
        return Ok(());
    }
    let target = 1e-2 * f64::EPSILON * total;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a) <= target {
            return Ok(());
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(a, v, p, q);
            }
        }
    }
    if off_diagonal_norm(a) <= target {
        Ok(())
    } else {
        Err(Error::NoConvergence { sweeps: MAX_SWEEPS })
    }
}

/// One Jacobi rotation annihilating `a[p][q]`. The rotation is
/// `G = Φ R` with `Φ` a phase on coordinate `q` that makes `a[p][q]` real and
/// `R` the classical real plane rotation.
fn rotate(a: &mut DMatrix<Scalar>, v: &mut DMatrix<Scalar>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq.norm() == 0.0 {
        return;
    }
    let (phase, r) = if apq.im == 0.0 {
        (Scalar::new(1.0, 0.0), apq.re)
    } else {
        (apq / apq.norm(), apq.norm())
    };
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph = phase.conj();
    let n = a.nrows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ph * s;
        a[(k, q)] = akp * s + akq * ph * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = Scalar::new(0.0, 0.0);
    a[(q, p)] = Scalar::new(0.0, 0.0);
    a[(p, p)] = Scalar::new(app - t * r, 0.0);
    a[(q, q)] = Scalar::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ph * s;
        v[(k, q)] = vkp * s + vkq * ph * c;
    }
}

/// `M^β` for self-adjoint `M` via its spectral decomposition.
///
/// Nonnegative integer powers are defined for every self-adjoint `M`; any
/// other exponent needs `M` positive definite.
pub fn operator_power(m: &Operator, beta: f64) -> Result<Operator> {
    let eig = hermitian_eig(m)?;
    if beta == 0.0 {
        return Ok(Operator::identity(m.dim()));
    }
    if beta == 1.0 {
        return Ok(m.clone());
    }
    let integral = beta >= 0.0 && beta.fract() == 0.0 && beta <= i32::MAX as f64;
    if integral {
        let k = beta as i32;
        return Ok(eig.map(|x| x.powi(k)));
    }
    if eig.min() <= tol::psd_tol(m.max_norm()) {
        return Err(Error::NotPositive { lambda_min: eig.min() });
    }
    Ok(eig.map(|x| x.powf(beta)))
}

/// Structural flags of an operator, each decided with its named tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OperatorClass {
    pub self_adjoint: bool,
    pub positive_semidefinite: bool,
    pub positive_definite: bool,
    pub invertible: bool,
    pub normal: bool,
    pub unitary: bool,
}

pub fn classify(m: &Operator) -> Result<OperatorClass> {
    let scale = m.max_norm();
    let self_adjoint = m.self_adjoint_defect() <= tol::hermitian_tol(scale);
    let (psd, pd) = if self_adjoint {
        let eig = hermitian_eig(m)?;
        let psd_tol = tol::psd_tol(scale);
        (eig.min() >= -psd_tol, eig.min() > psd_tol)
    } else {
        (false, false)
    };
    let invertible = m.is_invertible()?;
    let adj = m.adjoint();
    let mm_star = m * &adj;
    let m_star_m = &adj * m;
    let normal = mm_star.max_abs_diff(&m_star_m) <= tol::NORMAL_TOL * scale.powi(2).max(1.0);
    let unitary = m_star_m.max_abs_diff(&Operator::identity(m.dim())) <= tol::NORMAL_TOL;
    Ok(OperatorClass {
        self_adjoint,
        positive_semidefinite: psd,
        positive_definite: pd,
        invertible,
        normal,
        unitary,
    })
}

pub fn trace(m: &Operator) -> Scalar {
    m.trace()
}

/// Format with `sig` significant digits, switching to exponent form outside
/// `[1e-4, 1e6)`.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{:.*e}", sig - 1, x);
        match s.split_once('e') {
            Some((mant, e)) if mant.contains('.') => {
                format!("{}e{}", mant.trim_end_matches('0').trim_end_matches('.'), e)
            }
            _ => s,
        }
    }
}

pub fn fmt_scalar(z: Scalar, sig: usize) -> String {
    if z.im == 0.0 {
        fmt_sig(z.re, sig)
    } else if z.im < 0.0 {
        format!("{}-{}i", fmt_sig(z.re, sig), fmt_sig(-z.im, sig))
    } else {
        format!("{}+{}i", fmt_sig(z.re, sig), fmt_sig(z.im, sig))
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        let cells: Vec<Vec<String>> = (0..n)
            .map(|i| (0..n).map(|j| fmt_scalar(self.mat[(i, j)], 6)).collect())
            .collect();
        let width = cells.iter().flatten().map(|s| s.len()).max().unwrap_or(1);
        for row in &cells {
            write!(f, "  [")?;
            for (j, cell) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{cell:>width$}")?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Scalar {
        Scalar::new(re, im)
    }

    fn moment() -> Operator {
        Operator::from_real_rows(&[[1.0, 0.5], [0.5, 1.0 / 3.0]])
    }

    fn check_decomposition(m: &Operator, eig: &EigenDecomposition) {
        let n = m.dim();
        let q = &eig.eigenvectors;
        let gram = &q.adjoint() * q;
        assert!(gram.max_abs_diff(&Operator::identity(n)) <= tol::EIG_TOL);
        let scale = m.max_norm().max(1.0);
        for k in 0..n {
            let u = eig.vector(k);
            let resid = m.apply(&u) - u.map(|z| z * eig.eigenvalues[k]);
            assert!(resid.iter().all(|z| z.norm() <= tol::EIG_TOL * scale));
        }
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        assert!(eig.reconstruct().max_abs_diff(m) <= tol::EIG_TOL * scale);
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = hermitian_eig(&Operator::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
        check_decomposition(&Operator::identity(2), &eig);
    }

    #[test]
    fn moment_matrix_eigenvalues_match_closed_form() {
        // trace 4/3, det 1/12: λ = (4 ± √13)/6
        let eig = hermitian_eig(&moment()).unwrap();
        let r = 13f64.sqrt();
        assert_abs_diff_eq!(eig.eigenvalues[0], (4.0 - r) / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.eigenvalues[1], (4.0 + r) / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.eigenvalues[0], 0.06574, epsilon = 1e-5);
        assert_abs_diff_eq!(eig.eigenvalues[1], 1.26759, epsilon = 1e-5);
        check_decomposition(&moment(), &eig);
    }

    #[test]
    fn moment_eigenvalues_are_roots_of_characteristic_polynomial() {
        // bisection on p(x) = x^2 - (4/3)x + 1/12, independent of the eigensolver
        let p = |x: f64| x * x - 4.0 / 3.0 * x + 1.0 / 12.0;
        let bisect = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if p(lo) * p(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let eig = hermitian_eig(&moment()).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[0], bisect(0.0, 0.5), epsilon = 1e-13);
        assert_abs_diff_eq!(eig.eigenvalues[1], bisect(0.5, 2.0), epsilon = 1e-13);
    }

    #[test]
    fn diagonal_eigenvalues_sorted_with_permuted_basis() {
        let m = Operator::diag_real(&[3.0, 1.0, 2.0]);
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
        let expect = Operator::from_real_rows(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        assert_eq!(eig.eigenvectors, expect);
    }

    #[test]
    fn complex_hermitian_eigen() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let m = Operator::from_rows(&[[c(2.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(2.0, 0.0)]]);
        let eig = hermitian_eig(&m).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.eigenvalues[1], 3.0, epsilon = 1e-14);
        check_decomposition(&m, &eig);
        for k in 0..2 {
            let lead = eig.vector(k)[0];
            assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
        }
    }

    #[test]
    fn real_input_stays_real() {
        let m = Operator::from_real_rows(&[[4.0, -1.0, 0.5], [-1.0, 3.0, 2.0], [0.5, 2.0, -1.0]]);
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.eigenvectors.field(), Field::Real);
        check_decomposition(&m, &eig);
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let m = Operator::from_real_rows(&[[1.0, 1.0], [-1.0, 1.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn deterministic_output() {
        let m = Operator::from_real_rows(&[[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]);
        let a = hermitian_eig(&m).unwrap();
        let b = hermitian_eig(&m).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
        check_decomposition(&m, &a);
    }

    #[test]
    fn power_examples() {
        let i2 = Operator::identity(2);
        assert!(operator_power(&i2, 0.5).unwrap().max_abs_diff(&i2) < 1e-15);
        let d = operator_power(&Operator::diag_real(&[4.0, 9.0]), 0.5).unwrap();
        assert!(d.max_abs_diff(&Operator::diag_real(&[2.0, 3.0])) < 1e-14);
        let inv = operator_power(&moment(), -1.0).unwrap();
        let expect = Operator::from_real_rows(&[[4.0, -6.0], [-6.0, 12.0]]);
        assert!(inv.max_abs_diff(&expect) < 1e-12);
        assert!((&moment() * &inv).max_abs_diff(&i2) < 1e-12);
    }

    #[test]
    fn power_zero_and_one() {
        let m = moment();
        assert_eq!(operator_power(&m, 0.0).unwrap(), Operator::identity(2));
        assert_eq!(operator_power(&m, 1.0).unwrap(), m);
        let half = operator_power(&m, 0.5).unwrap();
        assert!((&half * &half).max_abs_diff(&m) <= tol::POWER_TOL);
    }

    #[test]
    fn fractional_power_of_indefinite_fails() {
        let m = Operator::diag_real(&[1.0, -1.0]);
        assert!(matches!(operator_power(&m, 0.5), Err(Error::NotPositive { .. })));
        assert!(matches!(operator_power(&m, -1.0), Err(Error::NotPositive { .. })));
        let sq = operator_power(&m, 2.0).unwrap();
        assert!(sq.max_abs_diff(&Operator::identity(2)) < 1e-15);
    }

    #[test]
    fn classify_examples() {
        let id = classify(&Operator::identity(3)).unwrap();
        assert!(id.self_adjoint && id.positive_semidefinite && id.positive_definite);
        assert!(id.invertible && id.normal && id.unitary);

        let v = classify(&Operator::from_real_rows(&[[1.0, 1.0], [-1.0, 1.0]])).unwrap();
        assert!(!v.self_adjoint && v.invertible && v.normal);
        assert!(!v.positive_semidefinite && !v.unitary);

        let nil = classify(&Operator::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]])).unwrap();
        assert!(!nil.invertible && !nil.normal);
    }

    #[test]
    fn singular_values_of_rotation_scaled() {
        let m = Operator::from_real_rows(&[[1.0, 1.0], [-1.0, 1.0]]);
        let s = m.singular_values().unwrap();
        assert_abs_diff_eq!(s[0], 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn trace_examples() {
        assert_eq!(trace(&Operator::identity(4)), c(4.0, 0.0));
        assert_abs_diff_eq!(trace(&moment()).re, 4.0 / 3.0, epsilon = 1e-15);
        let theta: f64 = 0.3;
        let q = Operator::from_real_rows(&[[theta.cos(), -theta.sin()], [theta.sin(), theta.cos()]]);
        let m = Operator::from_real_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let conj = &(&q.adjoint() * &m) * &q;
        assert!((trace(&conj) - trace(&m)).norm() <= tol::EIG_TOL);
    }

    #[test]
    fn trace_equals_eigenvalue_sum() {
        let eig = hermitian_eig(&moment()).unwrap();
        let sum: f64 = eig.eigenvalues.iter().sum();
        assert!((sum - trace(&moment()).re).abs() <= tol::EIG_TOL);
    }

    #[test]
    fn fmt_sig_examples() {
        assert_eq!(fmt_sig(0.0657414893, 6), "0.0657415");
        assert_eq!(fmt_sig(1.267591844, 6), "1.26759");
        assert_eq!(fmt_sig(4.0, 6), "4");
        assert_eq!(fmt_sig(-6.0, 6), "-6");
        assert_eq!(fmt_sig(1.5e-9, 6), "1.5e-9");
        assert_eq!(fmt_sig(2.5e7, 6), "2.5e7");
    }

    fn arb_hermitian(max_n: usize) -> impl Strategy<Value = Operator> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), n * n).prop_map(move |xs| {
                let raw = DMatrix::from_iterator(n, n, xs.into_iter().map(|(r, i)| c(r, i)));
                Operator::from_matrix(raw).hermitian_part()
            })
        })
    }

    fn arb_pd(max_n: usize) -> impl Strategy<Value = Operator> {
        arb_hermitian(max_n).prop_map(|h| {
            let n = h.dim();
            let sq = &h * &h;
            &sq + &Operator::scalar(n, 0.5)
        })
    }

    fn arb_square(n: usize) -> impl Strategy<Value = Operator> {
        proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n).prop_map(move |xs| {
            Operator::from_matrix(DMatrix::from_iterator(n, n, xs.into_iter().map(|(r, i)| c(r, i))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eig_reconstructs(m in arb_hermitian(8)) {
            let eig = hermitian_eig(&m).unwrap();
            check_decomposition(&m, &eig);
        }

        #[test]
        fn eig_agrees_with_nalgebra(m in arb_hermitian(8)) {
            let ours = hermitian_eig(&m).unwrap();
            let mut theirs: Vec<f64> = m.matrix().clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for (a, b) in ours.eigenvalues.iter().zip(&theirs) {
                prop_assert!((a - b).abs() <= 1e-10 * m.max_norm().max(1.0));
            }
        }

        #[test]
        fn powers_add(m in arb_pd(6)) {
            let exps = [-1.0, -0.5, -0.25, 0.25, 0.5, 1.0];
            for &a in &exps {
                for &b in &exps {
                    let lhs = &operator_power(&m, a).unwrap() * &operator_power(&m, b).unwrap();
                    let rhs = operator_power(&m, a + b).unwrap();
                    let scale = rhs.max_norm().max(1.0);
                    prop_assert!(lhs.max_abs_diff(&rhs) <= tol::POWER_TOL * scale);
                }
            }
        }

        #[test]
        fn trace_is_cyclic((a, b) in (2usize..6).prop_flat_map(|n| (arb_square(n), arb_square(n)))) {
            let ab = trace(&(&a * &b));
            let ba = trace(&(&b * &a));
            prop_assert!((ab - ba).norm() <= tol::EIG_TOL);
        }

        #[test]
        fn trace_of_positive_product_is_bounded((a, b) in (2usize..6).prop_flat_map(|n| (arb_square(n), arb_square(n)))) {
            let l1 = &a * &a.adjoint();
            let l2 = &b * &b.adjoint();
            let t = trace(&(&l1 * &l2));
            prop_assert!(t.im.abs() <= tol::EIG_TOL * l1.max_norm() * l2.max_norm() * 10.0);
            prop_assert!(t.re >= -tol::EIG_TOL);
            prop_assert!(t.re <= trace(&l1).re * trace(&l2).re + tol::EIG_TOL);
        }
    }
}
