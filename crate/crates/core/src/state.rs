//! Ultracoherent states `exp(logAmp) · Φ(Z, f)` with `Φ(Z, f) = exp Ω(Z) ∨ exp f`.

use crate::error::{Error, Result};
use crate::linalg::{
    bilinear, hs_norm, identity, inverse, involution, log_sqrt_det_inv, mat_adjoint, sesquilinear,
    vec_norm, ComplexMatrix, ComplexVector, LogComplex, C64, I,
};
use crate::siegel::{transport_from_origin, SiegelPoint};
use crate::symplectic::{symplectic_form, SymplecticElement};

#[derive(Debug, Clone, PartialEq)]
pub struct UltracoherentState {
    z: SiegelPoint,
    f: ComplexVector,
    log_amp: LogComplex,
}

impl UltracoherentState {
    pub fn new(z: SiegelPoint, f: ComplexVector, log_amp: LogComplex) -> Result<Self> {
        if z.dim() != f.len() {
            return Err(Error::DimensionMismatch {
                expected: z.dim(),
                found: f.len(),
            });
        }
        if !crate::linalg::is_finite_vector(&f) || !log_amp.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { z, f, log_amp })
    }

    pub fn vacuum(d: usize) -> Self {
        Self {
            z: SiegelPoint::origin(d),
            f: ComplexVector::zeros(d),
            log_amp: LogComplex::ZERO,
        }
    }

    /// Normalized exponential vector `e^{−‖f‖²/2} exp f`.
    pub fn coherent(f: ComplexVector) -> Self {
        let n = vec_norm(&f);
        Self {
            z: SiegelPoint::origin(f.len()),
            f,
            log_amp: LogComplex::new(-0.5 * n * n, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn z(&self) -> &SiegelPoint {
        &self.z
    }

    pub fn f(&self) -> &ComplexVector {
        &self.f
    }

    pub fn log_amp(&self) -> LogComplex {
        self.log_amp
    }

    pub fn amplitude(&self) -> C64 {
        self.log_amp.exp()
    }

    /// Multiplies the state by `exp(factor)`.
    pub fn scaled(mut self, factor: LogComplex) -> Self {
        self.log_amp += factor;
        self
    }

    pub fn into_parts(self) -> (SiegelPoint, ComplexVector, LogComplex) {
        (self.z, self.f, self.log_amp)
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Operators entering the inner product of `Φ(A, ·)` and `Φ(B, ·)`.
#[derive(Debug, Clone)]
pub struct OverlapKernel {
    /// `B(I − A⁺B)⁻¹`
    pub c: ComplexMatrix,
    /// `A⁺(I − BA⁺)⁻¹`
    pub d: ComplexMatrix,
    /// `log det(I − A⁺B)^{-1/2}`
    pub log_det_factor: LogComplex,
    /// `(I − BA⁺)⁻¹`
    pub cross_op: ComplexMatrix,
}

impl OverlapKernel {
    pub fn new(a: &SiegelPoint, b: &SiegelPoint) -> Result<Self> {
        check_dim(a.dim(), b.dim())?;
        let n = a.dim();
        let (a, b) = (a.matrix(), b.matrix());
        let a_adj = mat_adjoint(a);
        let m = identity(n) - &a_adj * b;
        let m_inv = inverse(&m)?;
        let cross_op = inverse(&(identity(n) - b * &a_adj))?;
        Ok(Self {
            c: b * &m_inv,
            d: &a_adj * &cross_op,
            log_det_factor: log_sqrt_det_inv(&m)?,
            cross_op,
        })
    }

    /// The alternative forms `(I − BA⁺)⁻¹B` and `(I − A⁺B)⁻¹A⁺`.
    pub fn second_forms(
        a: &SiegelPoint,
        b: &SiegelPoint,
    ) -> Result<(ComplexMatrix, ComplexMatrix)> {
        check_dim(a.dim(), b.dim())?;
        let n = a.dim();
        let (a, b) = (a.matrix(), b.matrix());
        let a_adj = mat_adjoint(a);
        let c = inverse(&(identity(n) - b * &a_adj))? * b;
        let d = inverse(&(identity(n) - &a_adj * b))? * &a_adj;
        Ok((c, d))
    }

    /// Logarithm of `(Φ(A, f) | Φ(B, g))`.
    pub fn log_pairing(&self, f: &ComplexVector, g: &ComplexVector) -> LogComplex {
        let fs = involution(f);
        let e = 0.5 * bilinear(&fs, &(&self.c * &fs))
            + bilinear(&fs, &(&self.cross_op * g))
            + 0.5 * bilinear(g, &(&self.d * g));
        self.log_det_factor + e
    }
}

/// Logarithm of `(x | y)`.
pub fn log_overlap(x: &UltracoherentState, y: &UltracoherentState) -> Result<LogComplex> {
    check_dim(x.dim(), y.dim())?;
    let kernel = OverlapKernel::new(&x.z, &y.z)?;
    Ok(x.log_amp.conj() + y.log_amp + kernel.log_pairing(&x.f, &y.f))
}

/// `(x | y)`, antilinear in `x`.
pub fn overlap(x: &UltracoherentState, y: &UltracoherentState) -> Result<C64> {
    Ok(log_overlap(x, y)?.exp())
}

pub fn norm(x: &UltracoherentState) -> f64 {
    let l = log_overlap(x, x).expect("disc points give an invertible kernel");
    let sq = l.exp();
    debug_assert!(sq.im.abs() <= 1e-10 * sq.re.abs().max(1e-300) || sq.im.abs() < 1e-12);
    sq.re.max(0.0).sqrt()
}

/// `‖x‖` from the closed form `det(I − A⁺A)^{-1/4} exp(½ Re (h|f))` with `h`
/// the displacement that moves `x` to a centered state.
pub fn norm_closed_form(x: &UltracoherentState) -> Result<f64> {
    let n = x.dim();
    let a = x.z.matrix();
    let a_adj = mat_adjoint(a);
    let log_det = log_sqrt_det_inv(&(identity(n) - &a_adj * a))?;
    let h = displacement_to_origin(x)?;
    let log_sq = log_det.re + sesquilinear(&h, &x.f).re + 2.0 * x.log_amp.re;
    Ok((0.5 * log_sq).exp())
}

/// `(exp z | x) = amp · exp(½⟨z*|Zz*⟩ + ⟨z*|f⟩)`.
pub fn bargmann_eval(x: &UltracoherentState, z: &ComplexVector) -> Result<C64> {
    check_dim(x.dim(), z.len())?;
    let zs = involution(z);
    let e = 0.5 * bilinear(&zs, &(x.z.matrix() * &zs)) + bilinear(&zs, &x.f);
    Ok((x.log_amp + e).exp())
}

/// `W(h) x`.
pub fn weyl_apply(h: &ComplexVector, x: &UltracoherentState) -> Result<UltracoherentState> {
    check_dim(x.dim(), h.len())?;
    let hs = involution(h);
    let zh = x.z.matrix() * &hs;
    let nh = vec_norm(h);
    let quad = 0.5 * bilinear(&hs, &(&zh - x.f.scale(2.0)));
    let log_amp = x.log_amp + (C64::new(-0.5 * nh * nh, 0.0) + quad);
    Ok(UltracoherentState {
        z: x.z.clone(),
        f: &x.f + h - zh,
        log_amp,
    })
}

/// `e^{−iω(f, g)}`, the phase in `W(f)W(g) = e^{−iω(f,g)} W(f + g)`.
pub fn weyl_phase(f: &ComplexVector, g: &ComplexVector) -> Result<C64> {
    Ok((-I * symplectic_form(f, g)?).exp())
}

/// The solution `h` of `h − Zh* = f`.
pub fn displacement_to_origin(x: &UltracoherentState) -> Result<ComplexVector> {
    let n = x.dim();
    let a = x.z.matrix();
    let a_adj = mat_adjoint(a);
    let p = inverse(&(identity(n) - a * &a_adj))?;
    let q = inverse(&(identity(n) - &a_adj * a))?;
    Ok(p * &x.f + a * (q * involution(&x.f)))
}

/// Writes `x = residualAmp · W(h) T(R) vacuum` with `R` the transport of the
/// origin to `Z_x`.
pub fn factor_displaced_squeezed(
    x: &UltracoherentState,
) -> Result<(ComplexVector, SymplecticElement, C64)> {
    let r = transport_from_origin(&x.z)?;
    let h = displacement_to_origin(x)?;
    let hs = involution(&h);
    let nh = vec_norm(&h);
    let weyl_log = -0.5 * nh * nh + 0.5 * bilinear(&hs, &(x.z.matrix() * &hs));
    let log_t = -0.5 * r.log_det_abs_u()?;
    let residual = x.log_amp - (LogComplex::new(log_t, 0.0) + weyl_log);
    Ok((h, r, residual.exp()))
}

/// Largest of `‖Z₁ − Z₂‖`, `‖f₁ − f₂‖` and the relative amplitude mismatch.
pub fn state_residual(x: &UltracoherentState, y: &UltracoherentState) -> f64 {
    if x.dim() != y.dim() {
        return f64::INFINITY;
    }
    let dz = hs_norm(&(x.z.matrix() - y.z.matrix()));
    let df = vec_norm(&(&x.f - &y.f));
    let (ax, ay) = (x.amplitude(), y.amplitude());
    let scale = ax.norm().max(ay.norm());
    let da = if scale == 0.0 {
        0.0
    } else {
        (ax - ay).norm() / scale
    };
    dz.max(df).max(da)
}

pub fn states_equal(x: &UltracoherentState, y: &UltracoherentState, tol: f64) -> bool {
    state_residual(x, y) <= tol
}

/// `|(x|y)| / (‖x‖‖y‖)`.
pub fn fidelity(x: &UltracoherentState, y: &UltracoherentState) -> Result<f64> {
    let l = log_overlap(x, y)?;
    let lx = log_overlap(x, x)?.re;
    let ly = log_overlap(y, y)?.re;
    Ok((l.re - 0.5 * (lx + ly)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, from_real_diagonal};

    fn v(xs: &[C64]) -> ComplexVector {
        ComplexVector::from_column_slice(xs)
    }

    #[test]
    fn vacuum_and_coherent() {
        assert!((norm(&UltracoherentState::vacuum(3)) - 1.0).abs() < 1e-15);
        let f = v(&[c(0.3, -1.2), c(0.7, 0.1)]);
        assert!((norm(&UltracoherentState::coherent(f)) - 1.0).abs() < 1e-13);
        assert_eq!(
            UltracoherentState::coherent(ComplexVector::zeros(2)),
            UltracoherentState::vacuum(2)
        );
    }

    #[test]
    fn coherent_overlap() {
        let f = v(&[c(1.0, 0.0)]);
        let x = UltracoherentState::coherent(f.clone());
        assert!((overlap(&x, &x).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let g = v(&[c(0.2, 0.5)]);
        let y = UltracoherentState::coherent(g.clone());
        let expected =
            (sesquilinear(&f, &g) - 0.5 * f.norm_squared() - 0.5 * g.norm_squared()).exp();
        assert!((overlap(&x, &y).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn scalar_squeezed_norm() {
        let z = SiegelPoint::new(from_real_diagonal(&[0.5])).unwrap();
        let x = UltracoherentState::new(z, ComplexVector::zeros(1), LogComplex::ZERO).unwrap();
        assert!((norm(&x) - 1.074_569_931_823_254_3).abs() < 1e-12);
        assert!((norm_closed_form(&x).unwrap() - norm(&x)).abs() < 1e-12);
    }

    #[test]
    fn displacement_scalar() {
        let z = SiegelPoint::new(from_real_diagonal(&[0.5])).unwrap();
        let x = UltracoherentState::new(z, v(&[c(1.0, 0.0)]), LogComplex::ZERO).unwrap();
        let h = displacement_to_origin(&x).unwrap();
        assert!((h[0] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn weyl_on_vacuum_is_coherent() {
        let h = v(&[c(0.4, 0.9), c(-1.1, 0.2)]);
        let out = weyl_apply(&h, &UltracoherentState::vacuum(2)).unwrap();
        assert!(state_residual(&out, &UltracoherentState::coherent(h)) < 1e-15);
    }

    #[test]
    fn weyl_phase_values() {
        let f = v(&[c(1.0, 0.0)]);
        let g = v(&[c(0.0, 1.0)]);
        assert!((weyl_phase(&f, &g).unwrap() - c(1.0_f64.cos(), -1.0_f64.sin())).norm() < 1e-15);
        assert_eq!(weyl_phase(&f, &f).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn bargmann_vacuum_and_coherent() {
        let z = v(&[c(0.3, 0.4), c(-2.0, 1.0)]);
        let vac = UltracoherentState::vacuum(2);
        assert_eq!(bargmann_eval(&vac, &z).unwrap(), c(1.0, 0.0));
        let f = v(&[c(0.5, 0.1), c(0.0, -0.3)]);
        let x = UltracoherentState::coherent(f.clone());
        let expected = (sesquilinear(&z, &f) - 0.5 * f.norm_squared()).exp();
        assert!((bargmann_eval(&x, &z).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn factor_vacuum_and_coherent() {
        let (h, r, amp) = factor_displaced_squeezed(&UltracoherentState::vacuum(2)).unwrap();
        assert_eq!(h, ComplexVector::zeros(2));
        assert!(r.distance(&SymplecticElement::identity(2)) < 1e-15);
        assert!((amp - c(1.0, 0.0)).norm() < 1e-15);

        let f = v(&[c(0.5, 0.1), c(0.0, -0.3)]);
        let (h, r, amp) =
            factor_displaced_squeezed(&UltracoherentState::coherent(f.clone())).unwrap();
        assert!(vec_norm(&(h - f)) < 1e-15);
        assert!(r.distance(&SymplecticElement::identity(2)) < 1e-15);
        assert!((amp - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn dimension_errors() {
        let x = UltracoherentState::vacuum(2);
        let y = UltracoherentState::vacuum(3);
        assert!(matches!(
            overlap(&x, &y),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(weyl_apply(&ComplexVector::zeros(1), &x).is_err());
        assert!(UltracoherentState::new(
            SiegelPoint::origin(2),
            ComplexVector::zeros(1),
            LogComplex::ZERO
        )
        .is_err());
    }
}
