//! Dense complex linear algebra in the fixed canonical basis.
//!
//! The canonical basis is real (`e_μ* = e_μ`), so the involution `f ↦ f*` is
//! componentwise complex conjugation and `Ā` is entrywise conjugation. All
//! the heavier factorizations (SVD, Hermitian eigensystems, Schur, LU) are
//! delegated to `nalgebra`.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexVector = DVector<C64>;
pub type ComplexMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative guard used by [`log_sqrt_det_inv`] and [`inverse`].
pub const SINGULARITY_GUARD: f64 = 1e-12;

/// A complex number held as its logarithm.
///
/// Used as the carrier for determinant powers and state amplitudes, which
/// overflow quickly when multiplied out directly.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LogComplex {
    pub re: f64,
    pub im: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// Principal logarithm of `z`.
    pub fn ln(z: C64) -> Self {
        let l = z.ln();
        Self { re: l.re, im: l.im }
    }

    pub fn from_c64(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }

    pub fn as_c64(self) -> C64 {
        C64::new(self.re, self.im)
    }

    pub fn exp(self) -> C64 {
        self.as_c64().exp()
    }

    pub fn modulus(self) -> f64 {
        self.re.exp()
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }
}

impl std::ops::Add for LogComplex {
    type Output = LogComplex;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl std::ops::AddAssign for LogComplex {
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl std::ops::Add<C64> for LogComplex {
    type Output = LogComplex;
    fn add(self, rhs: C64) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl std::ops::Sub for LogComplex {
    type Output = LogComplex;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl std::ops::Neg for LogComplex {
    type Output = LogComplex;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

pub fn from_real_diagonal(diag: &[f64]) -> ComplexMatrix {
    let mut m = zeros(diag.len(), diag.len());
    for (i, &x) in diag.iter().enumerate() {
        m[(i, i)] = c(x, 0.0);
    }
    m
}

/// `f ↦ f*`, componentwise conjugation in the canonical basis.
pub fn involution(v: &ComplexVector) -> ComplexVector {
    v.map(|z| z.conj())
}

pub fn mat_conj(a: &ComplexMatrix) -> ComplexMatrix {
    a.map(|z| z.conj())
}

pub fn mat_transpose(a: &ComplexMatrix) -> ComplexMatrix {
    a.transpose()
}

pub fn mat_adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Sesquilinear inner product `(u|v) = Σ conj(u_i) v_i`.
pub fn sesquilinear(u: &ComplexVector, v: &ComplexVector) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Bilinear pairing `⟨u|v⟩ = (u*|v) = Σ u_i v_i`.
pub fn bilinear(u: &ComplexVector, v: &ComplexVector) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
}

pub fn vec_norm(v: &ComplexVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite_matrix(a: &ComplexMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_finite_vector(v: &ComplexVector) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn require_square(a: &ComplexMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Frobenius norm `sqrt(tr A⁺A)`.
pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖A − Aᵀ‖_HS`.
pub fn symmetry_residual(a: &ComplexMatrix) -> f64 {
    hs_norm(&(a - a.transpose()))
}

/// `‖A⁺A − I‖_HS`.
pub fn unitarity_residual(a: &ComplexMatrix) -> f64 {
    hs_norm(&(a.adjoint() * a - identity(a.ncols())))
}

/// Eigenvalues of a general square complex matrix (diagonal of the complex
/// Schur form).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    require_square(m)?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let (_, t) = Schur::new(m.clone()).unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Eigen-decomposition `H = Q diag(λ) Q⁺` of a Hermitian matrix.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    require_square(h)?;
    let herm = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

/// `g(H)` for Hermitian `H` and a real scalar function `g`.
pub fn hermitian_function(h: &ComplexMatrix, g: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let (vals, q) = hermitian_eigen(h)?;
    let mut scaled = q.clone();
    for (j, &l) in vals.iter().enumerate() {
        let gj = g(l);
        scaled.column_mut(j).scale_mut(gj);
    }
    Ok(scaled * q.adjoint())
}

/// Matrix inverse via partial-pivoted LU, rejecting numerically singular
/// input.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::SingularMatrix(0.0))?;
    let cond = hs_norm(m) * hs_norm(&inv);
    if !cond.is_finite() || cond * SINGULARITY_GUARD > 1.0 {
        return Err(Error::SingularMatrix(1.0 / cond));
    }
    Ok(inv)
}

/// `L` with `exp(L) = (det M)^{-1/2}`.
///
/// Branch: the principal logarithms of the eigenvalues of `M` are summed and
/// the sum is multiplied by `-1/2`. Rejects `M` whose smallest eigenvalue
/// modulus is below `1e-12·‖M‖`.
pub fn log_sqrt_det_inv(m: &ComplexMatrix) -> Result<LogComplex> {
    require_square(m)?;
    let eig = eigenvalues(m)?;
    let scale = operator_norm(m);
    let min_mod = eig.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !eig.is_empty() && min_mod < SINGULARITY_GUARD * scale {
        return Err(Error::SingularMatrix(min_mod));
    }
    let sum = eig
        .iter()
        .fold(LogComplex::ZERO, |acc, &z| acc + LogComplex::ln(z));
    Ok(sum.scale(-0.5))
}

/// `log det H` for a Hermitian positive definite matrix.
pub fn log_det_hermitian_pd(h: &ComplexMatrix) -> Result<f64> {
    let (vals, _) = hermitian_eigen(h)?;
    let scale = vals.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let mut acc = 0.0;
    for l in vals {
        if l <= SINGULARITY_GUARD * scale {
            return Err(Error::SingularMatrix(l));
        }
        acc += l.ln();
    }
    Ok(acc)
}

/// Takagi factors `A = F · diag(α) · Fᵀ` of a complex symmetric matrix.
#[derive(Debug, Clone)]
pub struct Takagi {
    pub f: ComplexMatrix,
    pub alphas: Vec<f64>,
}

impl Takagi {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut fs = self.f.clone();
        for (j, &a) in self.alphas.iter().enumerate() {
            fs.column_mut(j).scale_mut(a);
        }
        fs * self.f.transpose()
    }
}

/// Takagi factorization of a transposition-symmetric matrix.
///
/// With the SVD `A = W Σ Vh`, the unitary `Y = Vh·W̄` commutes with `Σ` and is
/// symmetric on every block of equal nonzero singular values. Taking a
/// primary square root `S` of `Y` gives `F = W·S`.
pub fn takagi(a: &ComplexMatrix, tol: f64) -> Result<Takagi> {
    require_square(a)?;
    let n = a.nrows();
    let sym = symmetry_residual(a);
    if sym > tol {
        return Err(Error::NotSymmetric(sym));
    }
    if n == 0 {
        return Ok(Takagi {
            f: a.clone(),
            alphas: Vec::new(),
        });
    }
    let a_sym = (a + a.transpose()).scale(0.5);
    let svd = a_sym.svd(true, true);
    let w = svd.u.expect("left singular vectors requested");
    let vh = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let w = ComplexMatrix::from_fn(n, n, |r, k| w[(r, order[k])]);
    let vh = ComplexMatrix::from_fn(n, n, |k, col| vh[(order[k], col)]);
    let alphas: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();

    let y = &vh * mat_conj(&w);
    let s = unitary_sqrt(&y)?;
    Ok(Takagi { f: w * s, alphas })
}

/// Principal-type square root of a (numerically) unitary matrix, with the
/// branch cut placed in the widest gap between eigenvalue angles.
fn unitary_sqrt(y: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = y.nrows();
    let (q, t) = Schur::new(y.clone()).unpack();
    let angles: Vec<f64> = (0..n).map(|i| t[(i, i)].arg()).collect();

    let mut sorted = angles.clone();
    sorted.sort_by(f64::total_cmp);
    let tau = std::f64::consts::TAU;
    let mut cut = std::f64::consts::PI;
    let mut widest = -1.0;
    for k in 0..n {
        let lo = sorted[k];
        let hi = if k + 1 < n {
            sorted[k + 1]
        } else {
            sorted[0] + tau
        };
        if hi - lo > widest {
            widest = hi - lo;
            cut = 0.5 * (lo + hi);
        }
    }

    let mut d = zeros(n, n);
    for (i, &theta) in angles.iter().enumerate() {
        // unwrap into (cut - 2π, cut]
        let mut th = theta;
        while th > cut {
            th -= tau;
        }
        while th <= cut - tau {
            th += tau;
        }
        d[(i, i)] = C64::from_polar(t[(i, i)].norm().sqrt(), 0.5 * th);
    }
    Ok(&q * d * q.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn involution_conjugates() {
        let v = ComplexVector::from_vec(vec![c(1.0, 2.0)]);
        assert_eq!(involution(&v)[0], c(1.0, -2.0));
        let r = ComplexVector::from_vec(vec![c(3.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(involution(&r), r);
    }

    #[test]
    fn one_by_one_conventions() {
        let a = ComplexMatrix::from_element(1, 1, I);
        assert_eq!(mat_conj(&a)[(0, 0)], -I);
        assert_eq!(mat_transpose(&a)[(0, 0)], I);
        assert_eq!(mat_adjoint(&a)[(0, 0)], -I);
        let id = identity(3);
        assert_eq!(mat_conj(&id), id);
        assert_eq!(mat_transpose(&id), id);
        assert_eq!(mat_adjoint(&id), id);
    }

    #[test]
    fn norms_on_simple_matrices() {
        assert_eq!(operator_norm(&zeros(3, 3)), 0.0);
        let d = from_real_diagonal(&[0.3, -0.7]);
        assert!(approx(operator_norm(&d), 0.7, 1e-14));
        assert!(approx(hs_norm(&identity(3)), 3f64.sqrt(), 1e-15));
        let m = ComplexMatrix::from_row_slice(2, 2, &[ONE, I, ZERO, ZERO]);
        assert!(approx(hs_norm(&m), 2f64.sqrt(), 1e-15));
    }

    #[test]
    fn takagi_zero_and_diagonal() {
        let t = takagi(&zeros(3, 3), 1e-12).unwrap();
        assert!(t.alphas.iter().all(|&a| a == 0.0));
        assert!(unitarity_residual(&t.f) < 1e-12);

        let a = from_real_diagonal(&[0.5, 0.2]);
        let t = takagi(&a, 1e-12).unwrap();
        assert!(approx(t.alphas[0], 0.5, 1e-14));
        assert!(approx(t.alphas[1], 0.2, 1e-14));
        // F is diagonal up to phases
        assert!(t.f[(0, 1)].norm() < 1e-12 && t.f[(1, 0)].norm() < 1e-12);
        assert!(approx(t.f[(0, 0)].norm(), 1.0, 1e-12));
        assert!(hs_norm(&(t.reconstruct() - a)) < 1e-12);
    }

    #[test]
    fn takagi_rejects_nonsymmetric() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(takagi(&a, 1e-10), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn takagi_degenerate_and_negative_real() {
        // repeated singular values and a sign flip exercise the sqrt branch
        let a = from_real_diagonal(&[-0.4, 0.4, 0.4, -1.0]);
        let t = takagi(&a, 1e-12).unwrap();
        assert!(hs_norm(&(t.reconstruct() - &a)) < 1e-12);
        assert!(unitarity_residual(&t.f) < 1e-12);
    }

    #[test]
    fn log_sqrt_det_inv_scalar_cases() {
        assert_eq!(log_sqrt_det_inv(&identity(3)).unwrap().exp(), ONE);
        let l = log_sqrt_det_inv(&from_real_diagonal(&[0.75])).unwrap();
        assert!((l.exp() - c(1.154_700_538_379_251_5, 0.0)).norm() < 1e-12);
        let l = log_sqrt_det_inv(&from_real_diagonal(&[4.0, 0.25])).unwrap();
        assert!((l.exp() - ONE).norm() < 1e-14);
    }

    #[test]
    fn log_sqrt_det_inv_rejects_singular() {
        let m = from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            log_sqrt_det_inv(&m),
            Err(Error::SingularMatrix(_))
        ));
    }

    #[test]
    fn inverse_rejects_singular() {
        let m = ComplexMatrix::from_element(2, 2, ONE);
        assert!(inverse(&m).is_err());
        assert!(inverse(&zeros(2, 3)).is_err());
    }

    #[test]
    fn hermitian_function_inverse_sqrt() {
        let h = from_real_diagonal(&[4.0, 0.25]);
        let r = hermitian_function(&h, |x| x.powf(-0.5)).unwrap();
        assert!(approx(r[(0, 0)].re, 0.5, 1e-14));
        assert!(approx(r[(1, 1)].re, 2.0, 1e-14));
    }

    #[test]
    fn log_complex_arithmetic() {
        let a = LogComplex::new(0.5, 1.0);
        let b = LogComplex::new(-0.25, 2.0);
        assert!(((a + b).exp() - a.exp() * b.exp()).norm() < 1e-14);
        assert!(((-a).exp() * a.exp() - ONE).norm() < 1e-14);
        assert!((a.scale(2.0).exp() - a.exp() * a.exp()).norm() < 1e-14);
    }
}
