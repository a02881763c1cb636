//! The Siegel unit disc of symmetric matrices with operator norm below one,
//! and the Möbius action of the symplectic group on it.

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_function, hs_norm, identity, inverse, mat_conj, operator_norm,
    symmetry_residual, ComplexMatrix,
};
use crate::symplectic::{make_symplectic, SymplecticElement, DEFAULT_TOL};

/// Points with `‖Z‖ ≥ 1 − DISC_MARGIN` are rejected.
pub const DISC_MARGIN: f64 = 1e-9;

/// Agreement required between the two closed forms of the Möbius map,
/// relative to `max(1, ‖U‖²)`.
pub const MOEBIUS_AGREEMENT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    z: ComplexMatrix,
    op_norm: f64,
}

impl SiegelPoint {
    /// Validates with the default symmetry tolerance and disc margin.
    pub fn new(z: ComplexMatrix) -> Result<Self> {
        make_point(z, DEFAULT_TOL)
    }

    pub fn origin(d: usize) -> Self {
        Self {
            z: linalg::zeros(d, d),
            op_norm: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.z.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.z
    }

    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.z
    }
}

/// Validated Siegel point; the stored matrix is the symmetric part of `z`.
pub fn make_point(z: ComplexMatrix, tol: f64) -> Result<SiegelPoint> {
    make_point_with_margin(z, tol, DISC_MARGIN)
}

pub fn make_point_with_margin(z: ComplexMatrix, tol: f64, margin: f64) -> Result<SiegelPoint> {
    if z.nrows() != z.ncols() {
        return Err(Error::NotSquare {
            rows: z.nrows(),
            cols: z.ncols(),
        });
    }
    if !linalg::is_finite_matrix(&z) {
        return Err(Error::NonFinite);
    }
    let sym = symmetry_residual(&z);
    if sym > tol * (1.0 + hs_norm(&z)) {
        return Err(Error::NotSymmetric(sym));
    }
    let z = (&z + z.transpose()).scale(0.5);
    let op_norm = operator_norm(&z);
    if op_norm >= 1.0 - margin {
        return Err(Error::NotInDisc(op_norm));
    }
    Ok(SiegelPoint { z, op_norm })
}

/// Both closed forms of `ζ(R; Z)` before validation:
/// `(UZ + V)(Ū + V̄Z)⁻¹` and `(U⁺ + ZV⁺)⁻¹(Vᵀ + ZUᵀ)`.
pub fn moebius_forms(
    r: &SymplecticElement,
    z: &SiegelPoint,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if r.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: r.dim(),
            found: z.dim(),
        });
    }
    let (u, v, zm) = (r.u(), r.v(), z.matrix());
    let first = (u * zm + v) * inverse(&(mat_conj(u) + mat_conj(v) * zm))?;
    let second = inverse(&(u.adjoint() + zm * v.adjoint()))? * (v.transpose() + zm * u.transpose());
    Ok((first, second))
}

/// `ζ(R; Z)`. Both closed forms are evaluated and must agree.
pub fn moebius(r: &SymplecticElement, z: &SiegelPoint) -> Result<SiegelPoint> {
    let (first, second) = moebius_forms(r, z)?;
    let nu = operator_norm(r.u());
    let gap = hs_norm(&(&first - &second));
    if gap > MOEBIUS_AGREEMENT * nu.max(1.0).powi(2) {
        return Err(Error::InternalInconsistency(format!(
            "Möbius forms disagree by {gap:.3e}"
        )));
    }
    make_point(second, DEFAULT_TOL.max(1e-10 * nu * nu))
}

/// The element `R(U, UZ)` with `U = (I − ZZ⁺)^{-1/2}`, which maps the origin
/// to `Z`.
pub fn transport_from_origin(z: &SiegelPoint) -> Result<SymplecticElement> {
    let d = z.dim();
    let zm = z.matrix();
    let h = identity(d) - zm * zm.adjoint();
    let u = hermitian_function(&h, |x| 1.0 / x.sqrt())?;
    let v = &u * zm;
    make_symplectic(u, v, DEFAULT_TOL)
}
