//! The symplectic group `Sp(H)` of real-linear maps `f ↦ Uf + Vf*`.
//!
//! At finite dimension every `V` is Hilbert-Schmidt, so `Sp₂(H) = Sp(H)` and
//! that condition is not checked.

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, hs_norm, identity, inverse, involution, mat_conj, operator_norm, sesquilinear,
    ComplexMatrix, ComplexVector,
};

/// Default relative tolerance for constraint validation.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A validated pair `(U, V)` with `UU⁺ − VV⁺ = I`, `UVᵀ = VUᵀ` and the
/// equivalent column conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticElement {
    u: ComplexMatrix,
    v: ComplexMatrix,
    residual: f64,
}

/// Absolute residuals of the constraint family and its consequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintReport {
    /// `‖UU⁺ − VV⁺ − I‖`
    pub row_norm: f64,
    /// `‖UVᵀ − VUᵀ‖`
    pub row_sym: f64,
    /// `‖U⁺U − VᵀV̄ − I‖`
    pub col_norm: f64,
    /// `‖UᵀV̄ − V⁺U‖`
    pub col_sym: f64,
    /// `‖U⁻¹V − Vᵀ(U⁻¹)ᵀ‖`
    pub left_quotient_sym: f64,
    /// `‖V̄U⁻¹ − (U⁻¹)ᵀV⁺‖`
    pub right_quotient_sym: f64,
    /// `‖I − (U⁻¹V)(U⁻¹V)⁺ − (U⁺U)⁻¹‖`
    pub left_defect: f64,
    /// `‖I − (V̄U⁻¹)⁺(V̄U⁻¹) − (UU⁺)⁻¹‖`
    pub right_defect: f64,
    /// `|‖U⁻¹V‖² − (1 − ‖U‖⁻²)|` and the same for `V̄U⁻¹`, whichever is larger
    pub quotient_norm: f64,
}

impl ConstraintReport {
    pub fn max(&self) -> f64 {
        [
            self.row_norm,
            self.row_sym,
            self.col_norm,
            self.col_sym,
            self.left_quotient_sym,
            self.right_quotient_sym,
            self.left_defect,
            self.right_defect,
            self.quotient_norm,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn relative_residual(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    let d = u.nrows();
    let id = identity(d);
    let nu = operator_norm(u);
    let nv = operator_norm(v);
    let quad = 1.0 + nu * nu;
    let cross = 1.0 + nu * nv;
    let r8a = hs_norm(&(u * u.adjoint() - v * v.adjoint() - &id)) / quad;
    let r8b = hs_norm(&(u * v.transpose() - v * u.transpose())) / cross;
    let r9a = hs_norm(&(u.adjoint() * u - v.transpose() * mat_conj(v) - &id)) / quad;
    let r9b = hs_norm(&(u.transpose() * mat_conj(v) - v.adjoint() * u)) / cross;
    [r8a, r8b, r9a, r9b].into_iter().fold(0.0, f64::max)
}

/// Validates `(U, V)` against the symplectic constraints.
pub fn make_symplectic(u: ComplexMatrix, v: ComplexMatrix, tol: f64) -> Result<SymplecticElement> {
    if u.nrows() != u.ncols() {
        return Err(Error::NotSquare {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    if v.shape() != u.shape() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            found: v.nrows(),
        });
    }
    if !linalg::is_finite_matrix(&u) || !linalg::is_finite_matrix(&v) {
        return Err(Error::NonFinite);
    }
    let residual = relative_residual(&u, &v);
    if residual.is_nan() || residual > tol {
        return Err(Error::ConstraintViolation(residual));
    }
    Ok(SymplecticElement { u, v, residual })
}

impl SymplecticElement {
    pub fn identity(d: usize) -> Self {
        Self {
            u: identity(d),
            v: linalg::zeros(d, d),
            residual: 0.0,
        }
    }

    /// `R(K, 0)` for unitary `K`.
    pub fn from_unitary(k: &ComplexMatrix, tol: f64) -> Result<Self> {
        if k.nrows() != k.ncols() {
            return Err(Error::NotSquare {
                rows: k.nrows(),
                cols: k.ncols(),
            });
        }
        let r = linalg::unitarity_residual(k);
        if r > tol {
            return Err(Error::NotUnitary(r));
        }
        let d = k.nrows();
        make_symplectic(k.clone(), linalg::zeros(d, d), tol)
    }

    /// `R(cosh A, sinh A)` for real symmetric `A`.
    pub fn squeeze(a: &ComplexMatrix, tol: f64) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::NotSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        let imag = a.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let sym = linalg::symmetry_residual(a);
        if imag > tol || sym > tol * (1.0 + hs_norm(a)) {
            return Err(Error::NotRealSymmetric(imag.max(sym)));
        }
        let real = a.map(|z| c(z.re, 0.0));
        let u = linalg::hermitian_function(&real, f64::cosh)?;
        let v = linalg::hermitian_function(&real, f64::sinh)?;
        // the eigenvectors of a real symmetric matrix may carry phases; the
        // results are real in exact arithmetic
        let u = u.map(|z| c(z.re, 0.0));
        let v = v.map(|z| c(z.re, 0.0));
        make_symplectic(u, v, tol.max(DEFAULT_TOL))
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    /// Largest relative constraint residual recorded at validation.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn into_parts(self) -> (ComplexMatrix, ComplexMatrix) {
        (self.u, self.v)
    }

    /// `R⁻¹ = R(U⁺, −Vᵀ)`.
    pub fn inverse(&self) -> Self {
        Self {
            u: self.u.adjoint(),
            v: -self.v.transpose(),
            residual: self.residual,
        }
    }

    /// `Rf = Uf + Vf*`.
    pub fn apply(&self, f: &ComplexVector) -> Result<ComplexVector> {
        check_dim(self.dim(), f.len())?;
        Ok(&self.u * f + &self.v * involution(f))
    }

    /// `det|U| = det (I + VV⁺)^{1/2}`, returned as its (real) logarithm.
    pub fn log_det_abs_u(&self) -> Result<f64> {
        let m = identity(self.dim()) + &self.v * self.v.adjoint();
        Ok(0.5 * linalg::log_det_hermitian_pd(&m)?)
    }

    pub fn constraint_report(&self) -> Result<ConstraintReport> {
        let (u, v) = (&self.u, &self.v);
        let id = identity(self.dim());
        let u_inv = inverse(u)?;
        let left = &u_inv * v;
        let right = mat_conj(v) * &u_inv;
        let nu = operator_norm(u);
        let expected = 1.0 - 1.0 / (nu * nu);
        let ql = operator_norm(&left);
        let qr = operator_norm(&right);
        Ok(ConstraintReport {
            row_norm: hs_norm(&(u * u.adjoint() - v * v.adjoint() - &id)),
            row_sym: hs_norm(&(u * v.transpose() - v * u.transpose())),
            col_norm: hs_norm(&(u.adjoint() * u - v.transpose() * mat_conj(v) - &id)),
            col_sym: hs_norm(&(u.transpose() * mat_conj(v) - v.adjoint() * u)),
            left_quotient_sym: hs_norm(&(&left - v.transpose() * u_inv.transpose())),
            right_quotient_sym: hs_norm(&(&right - u_inv.transpose() * v.adjoint())),
            left_defect: hs_norm(&(&id - &left * left.adjoint() - inverse(&(u.adjoint() * u))?)),
            right_defect: hs_norm(&(&id - right.adjoint() * &right - inverse(&(u * u.adjoint()))?)),
            quotient_norm: (ql * ql - expected).abs().max((qr * qr - expected).abs()),
        })
    }

    /// Largest entrywise deviation from another element.
    pub fn distance(&self, other: &Self) -> f64 {
        let du = (&self.u - &other.u)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let dv = (&self.v - &other.v)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        du.max(dv)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// `R₂R₁ = R(U₂U₁ + V₂V̄₁, U₂V₁ + V₂Ū₁)`, revalidated.
pub fn compose(r2: &SymplecticElement, r1: &SymplecticElement) -> Result<SymplecticElement> {
    compose_with_tol(r2, r1, DEFAULT_TOL)
}

pub fn compose_with_tol(
    r2: &SymplecticElement,
    r1: &SymplecticElement,
    tol: f64,
) -> Result<SymplecticElement> {
    check_dim(r2.dim(), r1.dim())?;
    let u = &r2.u * &r1.u + &r2.v * mat_conj(&r1.v);
    let v = &r2.u * &r1.v + &r2.v * mat_conj(&r1.u);
    make_symplectic(u, v, tol)
}

/// `ω(f, g) = Im (f|g)`.
pub fn symplectic_form(f: &ComplexVector, g: &ComplexVector) -> Result<f64> {
    check_dim(f.len(), g.len())?;
    Ok(sesquilinear(f, g).im)
}

/// `R = K₁ · R(cosh A, sinh A) · K₂` with unitary `K₁, K₂` and real
/// symmetric `A`.
#[derive(Debug, Clone)]
pub struct PolarFactors {
    pub k1: ComplexMatrix,
    pub a: ComplexMatrix,
    pub k2: ComplexMatrix,
}

impl PolarFactors {
    pub fn recompose(&self, tol: f64) -> Result<SymplecticElement> {
        let k1 = SymplecticElement::from_unitary(&self.k1, tol)?;
        let k2 = SymplecticElement::from_unitary(&self.k2, tol)?;
        let d = SymplecticElement::squeeze(&self.a, tol)?;
        compose_with_tol(&k1, &compose_with_tol(&d, &k2, tol)?, tol)
    }

    /// Squeeze parameters (eigenvalues of `A`), descending.
    pub fn squeeze_parameters(&self) -> Vec<f64> {
        (0..self.a.nrows()).map(|i| self.a[(i, i)].re).collect()
    }
}

/// Polar (Bloch–Messiah) factorization.
///
/// `U⁻¹V` is symmetric with norm below one; its Takagi factors
/// `U⁻¹V = F diag(t) Fᵀ` give `A = diag(artanh t)`, `K₂ = F⁺` and
/// `K₁ = U F cosh(A)⁻¹`.
pub fn polar_factorize(r: &SymplecticElement, tol: f64) -> Result<PolarFactors> {
    let u_inv = inverse(r.u())?;
    let q = &u_inv * r.v();
    let q = (&q + q.transpose()).scale(0.5);
    let tk = linalg::takagi(&q, tol.max(1e-8) * (1.0 + hs_norm(&q)))?;
    let params: Vec<f64> = tk
        .alphas
        .iter()
        .map(|&t| if t >= 1.0 { f64::INFINITY } else { t.atanh() })
        .collect();
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::FactorizationFailure(f64::INFINITY));
    }
    let a = linalg::from_real_diagonal(&params);
    let inv_cosh: Vec<f64> = params.iter().map(|p| 1.0 / p.cosh()).collect();
    let k1 = r.u() * &tk.f * linalg::from_real_diagonal(&inv_cosh);
    let k2 = tk.f.adjoint();
    // K₁ is unitary only up to rounding; project it back.
    let k1 = nearest_unitary(&k1);
    let factors = PolarFactors { k1, a, k2 };
    let rec = factors
        .recompose(tol.max(DEFAULT_TOL))
        .map_err(|_| Error::FactorizationFailure(f64::INFINITY))?;
    let residual = rec.distance(r);
    if residual > tol {
        return Err(Error::FactorizationFailure(residual));
    }
    Ok(factors)
}

fn nearest_unitary(m: &ComplexMatrix) -> ComplexMatrix {
    let svd = m.clone().svd(true, true);
    svd.u.expect("requested") * svd.v_t.expect("requested")
}

/// `R₂(t) = R₁ · exp(−i·diag(m)·t) · R₁⁻¹` evaluated in closed form:
/// `R(U₁U₀(t)U₁⁺ − V₁U₀(−t)V₁⁺, −U₁U₀(t)V₁ᵀ + V₁U₀(−t)U₁ᵀ)`.
pub fn conjugated_free_field(
    r1: &SymplecticElement,
    spectrum: &[f64],
    t: f64,
) -> Result<SymplecticElement> {
    check_dim(r1.dim(), spectrum.len())?;
    if spectrum.iter().any(|m| !m.is_finite()) || !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let (u1, v1) = (r1.u(), r1.v());
    let fwd = free_evolution(spectrum, t);
    let bwd = free_evolution(spectrum, -t);
    let u = u1 * &fwd * u1.adjoint() - v1 * &bwd * v1.adjoint();
    let v = -(u1 * &fwd * v1.transpose()) + v1 * &bwd * u1.transpose();
    make_symplectic(u, v, DEFAULT_TOL)
}

/// `U₀(t) = exp(−i·diag(m)·t)`.
pub fn free_evolution(spectrum: &[f64], t: f64) -> ComplexMatrix {
    let mut m = linalg::zeros(spectrum.len(), spectrum.len());
    for (i, &w) in spectrum.iter().enumerate() {
        m[(i, i)] = num_complex::Complex64::from_polar(1.0, -w * t);
    }
    m
}
