//! The unitary ray representation `R ↦ T(R)` on ultracoherent states.

use crate::error::{Error, Result};
use crate::linalg::{
    bilinear, identity, inverse, log_sqrt_det_inv, ComplexVector, LogComplex, C64,
};
use crate::siegel::{make_point, moebius};
use crate::state::{state_residual, weyl_apply, UltracoherentState};
use crate::symplectic::{compose, SymplecticElement, DEFAULT_TOL};

/// `|χ|` may deviate from one by at most this before it is reported as an
/// internal inconsistency.
pub const MULTIPLIER_GUARD: f64 = 1e-8;

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `T(R) exp f`.
pub fn act_on_exponential(r: &SymplecticElement, f: &ComplexVector) -> Result<UltracoherentState> {
    check_dim(r.dim(), f.len())?;
    let u_adj_inv = inverse(&r.u().adjoint())?;
    let z = make_point(
        &u_adj_inv * r.v().transpose(),
        DEFAULT_TOL.max(1e-12 * r.u().norm_squared()),
    )?;
    let vec = &u_adj_inv * f;
    let quad = bilinear(f, &(r.v().adjoint() * &vec));
    let log_amp = LogComplex::new(-0.5 * r.log_det_abs_u()?, 0.0) + (-0.5 * quad);
    UltracoherentState::new(z, vec, log_amp)
}

/// `T(R) x`.
pub fn act(r: &SymplecticElement, x: &UltracoherentState) -> Result<UltracoherentState> {
    check_dim(r.dim(), x.dim())?;
    let (u, v) = (r.u(), r.v());
    let zm = x.z().matrix();
    let v_adj = v.adjoint();
    let p_inv = inverse(&(u.adjoint() + zm * &v_adj))?;
    let u_adj_inv = inverse(&u.adjoint())?;
    let z_new = moebius(r, x.z())?;
    let vec = &p_inv * x.f();
    let det_term = log_sqrt_det_inv(&(identity(r.dim()) + zm * &v_adj * &u_adj_inv))?;
    let quad = bilinear(x.f(), &(&v_adj * &vec));
    let log_amp =
        x.log_amp() + LogComplex::new(-0.5 * r.log_det_abs_u()?, 0.0) + det_term + (-0.5 * quad);
    UltracoherentState::new(z_new, vec, log_amp)
}

/// `T(R)⁺ x = T(R⁻¹) x`.
pub fn adjoint_act(r: &SymplecticElement, x: &UltracoherentState) -> Result<UltracoherentState> {
    act(&r.inverse(), x)
}

/// `χ(R₂, R₁)` in `T(R₂)T(R₁) = χ(R₂, R₁) T(R₂R₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multiplier {
    log: LogComplex,
}

impl Multiplier {
    pub fn value(&self) -> C64 {
        self.log.exp()
    }

    /// Logarithm of the value; the real part is zero up to rounding.
    pub fn log(&self) -> LogComplex {
        self.log
    }
}

pub fn multiplier(r2: &SymplecticElement, r1: &SymplecticElement) -> Result<Multiplier> {
    let r3 = compose(r2, r1)?;
    multiplier_with_product(r2, r1, &r3)
}

/// Multiplier for an already computed product `r3 = r2 ∘ r1`.
pub fn multiplier_with_product(
    r2: &SymplecticElement,
    r1: &SymplecticElement,
    r3: &SymplecticElement,
) -> Result<Multiplier> {
    check_dim(r2.dim(), r1.dim())?;
    check_dim(r2.dim(), r3.dim())?;
    let u1 = inverse(&r1.u().adjoint())?;
    let u2 = inverse(&r2.u().adjoint())?;
    let m = u1 * r3.u().adjoint() * u2;
    let moduli = 0.5 * (r3.log_det_abs_u()? - r1.log_det_abs_u()? - r2.log_det_abs_u()?);
    let log = LogComplex::new(moduli, 0.0) + log_sqrt_det_inv(&m)?;
    if log.re.abs() > MULTIPLIER_GUARD {
        return Err(Error::InternalInconsistency(format!(
            "multiplier modulus deviates from one by {:.3e}",
            log.re
        )));
    }
    Ok(Multiplier { log })
}

/// State residual between `T(R₂)T(R₁)x` and `χ(R₂,R₁) T(R₂R₁)x`.
pub fn check_composition(
    r2: &SymplecticElement,
    r1: &SymplecticElement,
    x: &UltracoherentState,
) -> Result<f64> {
    let r3 = compose(r2, r1)?;
    let chi = multiplier_with_product(r2, r1, &r3)?;
    let lhs = act(r2, &act(r1, x)?)?;
    let rhs = act(&r3, x)?.scaled(chi.log());
    Ok(state_residual(&lhs, &rhs))
}

/// State residual between `T(R)W(h)x` and `W(Rh)T(R)x`.
pub fn check_intertwining(
    r: &SymplecticElement,
    h: &ComplexVector,
    x: &UltracoherentState,
) -> Result<f64> {
    let lhs = act(r, &weyl_apply(h, x)?)?;
    let rhs = weyl_apply(&r.apply(h)?, &act(r, x)?)?;
    Ok(state_residual(&lhs, &rhs))
}
