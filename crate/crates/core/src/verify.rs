//! Seeded property and oracle checks grouped into suites.
//!
//! Every check has a nominal threshold. Thresholds of residual checks are
//! multiplied by `tol / 1e-9`, so the default tolerance reproduces the
//! nominal values; structural checks (disc membership, bound ratios) are not
//! scaled.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::circuit::{compile_steps, lower, no_files, parse, pretty_print, run, run_sequential};
use crate::error::{Error, Result};
use crate::fock::{
    alpha_norm, annihilate, create, cutoff_for, exp_omega, inner, represent_state,
    symmetric_product, FockBasis, FockTensor,
};
use crate::linalg::{
    bilinear, c, from_real_diagonal, hermitian_eigen, hs_norm, identity, inverse, log_sqrt_det_inv,
    operator_norm, sesquilinear, takagi, vec_norm, ComplexMatrix, LogComplex, C64,
};
use crate::random::{
    gaussian_matrix, gaussian_vector, random_circuit, random_siegel, random_state,
    random_symplectic, random_unitary, random_vector, seeded, Rng64,
};
use crate::representation::{
    act, act_on_exponential, adjoint_act, check_composition, check_intertwining, multiplier,
};
use crate::siegel::{moebius, moebius_forms, transport_from_origin, SiegelPoint};
use crate::state::{
    factor_displaced_squeezed, fidelity, norm, norm_closed_form, overlap, state_residual,
    weyl_apply, weyl_phase, OverlapKernel, UltracoherentState,
};
use crate::symplectic::{
    compose, conjugated_free_field, free_evolution, polar_factorize, symplectic_form,
    SymplecticElement,
};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Symplectic,
    Siegel,
    Overlap,
    Representation,
    Oracle,
    Dsl,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Symplectic,
        Suite::Siegel,
        Suite::Overlap,
        Suite::Representation,
        Suite::Oracle,
        Suite::Dsl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Symplectic => "symplectic",
            Suite::Siegel => "siegel",
            Suite::Overlap => "overlap",
            Suite::Representation => "representation",
            Suite::Oracle => "oracle",
            Suite::Dsl => "dsl",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(Suite::All)
            .chain(Suite::EACH)
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 100,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub trials: usize,
    pub worst: f64,
    pub threshold: f64,
    pub passed: bool,
    pub error: Option<String>,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {}/{} trials={} worst={:.3e} threshold={:.3e}",
            self.suite, self.name, self.trials, self.worst, self.threshold
        )?;
        if let Some(e) = &self.error {
            write!(f, " error: {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        write!(
            f,
            "{} checks, {} failed (seed {}, trials {}, tol {:e})",
            self.checks.len(),
            self.failures(),
            self.seed,
            self.trials,
            self.tol
        )
    }
}

struct Ctx {
    suite: Suite,
    rng: Rng64,
    scale: f64,
    trials: usize,
    checks: Vec<CheckResult>,
}

impl Ctx {
    /// Runs `trials` samples of `f`, which returns a residual to compare
    /// against `nominal`.
    fn check<F>(&mut self, name: &str, nominal: f64, scaled: bool, trials: usize, mut f: F)
    where
        F: FnMut(&mut Rng64) -> Result<f64>,
    {
        let threshold = if scaled {
            nominal * self.scale
        } else {
            nominal
        };
        let mut worst = 0.0f64;
        let mut error = None;
        for _ in 0..trials {
            match f(&mut self.rng) {
                Ok(r) if r.is_nan() => {
                    error = Some("residual is NaN".to_string());
                    break;
                }
                Ok(r) => worst = worst.max(r),
                Err(e) => {
                    error = Some(e.to_string());
                    break;
                }
            }
        }
        self.checks.push(CheckResult {
            suite: self.suite.name().to_string(),
            name: name.to_string(),
            trials,
            worst,
            threshold,
            passed: error.is_none() && worst <= threshold,
            error,
        });
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Report {
    let suites: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    let mut checks = Vec::new();
    for (k, s) in Suite::EACH.iter().enumerate() {
        if !suites.contains(s) {
            continue;
        }
        let mut ctx = Ctx {
            suite: *s,
            rng: seeded(
                cfg.seed
                    .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64 + 1)),
            ),
            scale: cfg.tol / DEFAULT_TOL,
            trials: cfg.trials.max(1),
            checks: Vec::new(),
        };
        match s {
            Suite::Symplectic => symplectic_suite(&mut ctx),
            Suite::Siegel => siegel_suite(&mut ctx),
            Suite::Overlap => overlap_suite(&mut ctx),
            Suite::Representation => representation_suite(&mut ctx),
            Suite::Oracle => oracle_suite(&mut ctx),
            Suite::Dsl => dsl_suite(&mut ctx),
            Suite::All => unreachable!(),
        }
        checks.extend(ctx.checks);
    }
    Report {
        seed: cfg.seed,
        trials: cfg.trials,
        tol: cfg.tol,
        checks,
    }
}

fn symplectic_suite(ctx: &mut Ctx) {
    let t = ctx.trials;
    ctx.check("constraints", 1e-10, true, 2 * t, |rng| {
        let d = rng.random_range(1..=6);
        Ok(random_symplectic(rng, d, 1.5).constraint_report()?.max())
    });
    ctx.check("group_law", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=6);
        let a = random_symplectic(rng, d, 1.5);
        let b = random_symplectic(rng, d, 1.5);
        let cc = random_symplectic(rng, d, 1.5);
        let id = SymplecticElement::identity(d);
        let inv = compose(&a, &a.inverse())?.distance(&id);
        let left = compose(&compose(&a, &b)?, &cc)?;
        let right = compose(&a, &compose(&b, &cc)?)?;
        let scale = 1.0 + operator_norm(left.u()).powi(2);
        let f = gaussian_vector(rng, d);
        let action = vec_norm(&(compose(&a, &b)?.apply(&f)? - a.apply(&b.apply(&f)?)?));
        Ok(inv.max(left.distance(&right) / scale).max(action / scale))
    });
    ctx.check("form_preserved", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=6);
        let r = random_symplectic(rng, d, 1.5);
        let f = gaussian_vector(rng, d);
        let g = gaussian_vector(rng, d);
        let before = symplectic_form(&f, &g)?;
        let after = symplectic_form(&r.apply(&f)?, &r.apply(&g)?)?;
        Ok((before - after).abs() / (1.0 + vec_norm(&f) * vec_norm(&g)))
    });
    ctx.check("takagi", 1e-10, true, 2 * t, |rng| {
        let d = rng.random_range(1..=8);
        let g = gaussian_matrix(rng, d, d);
        let a = (&g + g.transpose()).scale(0.5);
        let tk = takagi(&a, 1e-10 * (1.0 + hs_norm(&a)))?;
        Ok(hs_norm(&(&a - tk.reconstruct())) / (1.0 + hs_norm(&a)))
    });
    ctx.check("polar", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=6);
        let r = random_symplectic(rng, d, 1.5);
        Ok(polar_factorize(&r, 1e-9)?.recompose(1e-9)?.distance(&r))
    });
    ctx.check("free_field", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=6);
        let r1 = random_symplectic(rng, d, 1.5);
        let m: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..3.0)).collect();
        let time = rng.random_range(-5.0..5.0);
        let direct = conjugated_free_field(&r1, &m, time)?;
        let u0 = SymplecticElement::from_unitary(&free_evolution(&m, time), 1e-12)?;
        let composed = compose(&r1, &compose(&u0, &r1.inverse())?)?;
        Ok(direct.distance(&composed))
    });
}

fn siegel_suite(ctx: &mut Ctx) {
    let t = ctx.trials;
    ctx.check("cocycle", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=5);
        let r1 = random_symplectic(rng, d, 1.5);
        let r2 = random_symplectic(rng, d, 1.5);
        let z = random_siegel(rng, d, 0.9);
        let lhs = moebius(&compose(&r2, &r1)?, &z)?;
        let rhs = moebius(&r2, &moebius(&r1, &z)?)?;
        Ok(hs_norm(&(lhs.matrix() - rhs.matrix())))
    });
    ctx.check("forms_agree", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=5);
        let r = random_symplectic(rng, d, 1.5);
        let z = random_siegel(rng, d, 0.9);
        let (a, b) = moebius_forms(&r, &z)?;
        Ok(hs_norm(&(&a - &b)).max(hs_norm(&(&b - b.transpose()))))
    });
    ctx.check("transport", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=5);
        let z = random_siegel(rng, d, 0.95);
        let r = transport_from_origin(&z)?;
        Ok(hs_norm(
            &(moebius(&r, &SiegelPoint::origin(d))?.matrix() - z.matrix()),
        ))
    });
    ctx.check(
        "disc_preserved",
        1.0 - crate::siegel::DISC_MARGIN,
        false,
        t,
        |rng| {
            let d = rng.random_range(1..=5);
            let r = random_symplectic(rng, d, 1.5);
            let z = random_siegel(rng, d, 0.95);
            Ok(moebius(&r, &z)?.op_norm())
        },
    );
}

fn overlap_suite(ctx: &mut Ctx) {
    let t = ctx.trials;
    ctx.check("hermitian", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let x = random_state(rng, d, 0.8, 1.5);
        let y = random_state(rng, d, 0.8, 1.5);
        Ok(rel(overlap(&x, &y)?, overlap(&y, &x)?.conj()))
    });
    ctx.check("exponential_reduction", 1e-12, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let f = random_vector(rng, d, 1.5);
        let g = random_vector(rng, d, 1.5);
        let x = UltracoherentState::new(SiegelPoint::origin(d), f.clone(), LogComplex::ZERO)?;
        let y = UltracoherentState::new(SiegelPoint::origin(d), g.clone(), LogComplex::ZERO)?;
        Ok(rel(overlap(&x, &y)?, sesquilinear(&f, &g).exp()))
    });
    ctx.check("kernel_forms", 1e-12, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let a = random_siegel(rng, d, 0.9);
        let b = random_siegel(rng, d, 0.9);
        let k = OverlapKernel::new(&a, &b)?;
        let (c2, d2) = OverlapKernel::second_forms(&a, &b)?;
        Ok((hs_norm(&(&k.c - c2)) / (1.0 + hs_norm(&k.c)))
            .max(hs_norm(&(&k.d - d2)) / (1.0 + hs_norm(&k.d))))
    });
    ctx.check("squeezed_special_case", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let a = random_siegel(rng, d, 0.8);
        let y = random_state(rng, d, 0.8, 1.5);
        let x = UltracoherentState::new(a.clone(), y.f().scale(0.0), LogComplex::ZERO)?;
        let y = UltracoherentState::new(y.z().clone(), y.f().clone(), LogComplex::ZERO)?;
        let m = identity(d) - a.matrix().adjoint() * y.z().matrix();
        let e = 0.5 * bilinear(y.f(), &(inverse(&m)? * a.matrix().adjoint() * y.f()));
        let expected = (log_sqrt_det_inv(&m)? + e).exp();
        Ok(rel(overlap(&x, &y)?, expected))
    });
    ctx.check("norm_dual_routes", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=5);
        let x = random_state(rng, d, 0.9, 2.0);
        let (a, b) = (norm(&x), norm_closed_form(&x)?);
        let ov = overlap(&x, &x)?;
        Ok(((a - b).abs() / a.max(1.0)).max(ov.im.abs() / ov.re))
    });
    ctx.check("gram_positive", 1e-8, false, t.div_ceil(5), |rng| {
        let d = rng.random_range(1..=3);
        let states: Vec<_> = (0..6).map(|_| random_state(rng, d, 0.6, 1.0)).collect();
        let mut g = ComplexMatrix::zeros(6, 6);
        for i in 0..6 {
            for j in 0..6 {
                g[(i, j)] = overlap(&states[i], &states[j])?;
            }
        }
        let (ev, _) = hermitian_eigen(&g)?;
        Ok(-ev.iter().cloned().fold(f64::INFINITY, f64::min))
    });
    ctx.check("weyl_unitarity", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let x = random_state(rng, d, 0.8, 1.0);
        let y = random_state(rng, d, 0.8, 1.0);
        let h = random_vector(rng, d, 1.5);
        Ok(rel(
            overlap(&weyl_apply(&h, &x)?, &weyl_apply(&h, &y)?)?,
            overlap(&x, &y)?,
        ))
    });
    ctx.check("weyl_relations", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let x = random_state(rng, d, 0.8, 1.0);
        let f = random_vector(rng, d, 1.5);
        let g = random_vector(rng, d, 1.5);
        let lhs = weyl_apply(&f, &weyl_apply(&g, &x)?)?;
        let rhs = weyl_apply(&(&f + &g), &x)?.scaled(LogComplex::ln(weyl_phase(&f, &g)?));
        Ok(state_residual(&lhs, &rhs))
    });
    ctx.check("weyl_inverse", 1e-12, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let x = random_state(rng, d, 0.8, 1.0);
        let h = random_vector(rng, d, 1.5);
        Ok(state_residual(
            &weyl_apply(&(-&h), &weyl_apply(&h, &x)?)?,
            &x,
        ))
    });
    ctx.check("displaced_squeezed_factorization", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let x = random_state(rng, d, 0.9, 1.5);
        let (h, r, amp) = factor_displaced_squeezed(&x)?;
        let rebuilt =
            weyl_apply(&h, &act(&r, &UltracoherentState::vacuum(d))?)?.scaled(LogComplex::ln(amp));
        Ok(1.0 - fidelity(&rebuilt, &x)?)
    });
}

fn representation_suite(ctx: &mut Ctx) {
    let t = ctx.trials;
    ctx.check("exponential_unitarity", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let r = random_symplectic(rng, d, 1.5);
        let f = random_vector(rng, d, 1.5);
        let g = random_vector(rng, d, 1.5);
        let lhs = overlap(&act_on_exponential(&r, &f)?, &act_on_exponential(&r, &g)?)?;
        Ok(rel(lhs, sesquilinear(&f, &g).exp()))
    });
    ctx.check("norm_preserved", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let r = random_symplectic(rng, d, 1.5);
        let x = random_state(rng, d, 0.7, 1.0);
        Ok((norm(&act(&r, &x)?) - norm(&x)).abs() / norm(&x))
    });
    ctx.check("ray_composition", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let r1 = random_symplectic(rng, d, 1.5);
        let r2 = random_symplectic(rng, d, 1.5);
        let x = random_state(rng, d, 0.7, 1.0);
        check_composition(&r2, &r1, &x)
    });
    ctx.check("multiplier_modulus", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let r1 = random_symplectic(rng, d, 1.5);
        let r2 = random_symplectic(rng, d, 1.5);
        let chi = multiplier(&r2, &r1)?.value();
        let inv = multiplier(&r1, &r1.inverse())?.value();
        Ok((chi.norm() - 1.0).abs().max((inv - c(1.0, 0.0)).norm()))
    });
    ctx.check("intertwining", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let r = random_symplectic(rng, d, 1.5);
        let h = random_vector(rng, d, 1.5);
        let x = random_state(rng, d, 0.7, 1.0);
        check_intertwining(&r, &h, &x)
    });
    ctx.check("adjoint", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let r = random_symplectic(rng, d, 1.5);
        let x = random_state(rng, d, 0.7, 1.0);
        let y = random_state(rng, d, 0.7, 1.0);
        let lhs = overlap(&adjoint_act(&r, &y)?, &x)?;
        Ok(rel(lhs, overlap(&y, &act(&r, &x)?)?))
    });
    ctx.check("unitary_covariance", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let k = SymplecticElement::from_unitary(&random_unitary(rng, d), 1e-10)?;
        let r = random_symplectic(rng, d, 1.5);
        let x = random_state(rng, d, 0.7, 1.0);
        let lhs = act(&compose(&k, &compose(&r, &k.inverse())?)?, &x)?;
        let rhs = act(&k, &act(&r, &act(&k.inverse(), &x)?)?)?;
        Ok(state_residual(&lhs, &rhs))
    });
    ctx.check("composed_quadratic_form", 1e-10, true, t, |rng| {
        let d = rng.random_range(1..=4);
        let r1 = random_symplectic(rng, d, 1.5);
        let r2 = random_symplectic(rng, d, 1.5);
        let r3 = compose(&r2, &r1)?;
        let f = random_vector(rng, d, 1.0);
        let with_f = act(&r2, &act_on_exponential(&r1, &f)?)?;
        let without = act(&r2, &act_on_exponential(&r1, &f.scale(0.0))?)?;
        let alpha = (without.log_amp() - with_f.log_amp()).as_c64() * 2.0;
        let expected = bilinear(&f, &(r3.v().adjoint() * inverse(&r3.u().adjoint())? * &f));
        Ok((alpha - expected).norm() / (1.0 + expected.norm()))
    });
}

fn oracle_suite(ctx: &mut Ctx) {
    let t = ctx.trials;
    ctx.check("master_overlap", 1e-6, true, t.min(50), |rng| {
        let d = rng.random_range(1..=3);
        let x = random_state(rng, d, 0.6, 1.0);
        let y = random_state(rng, d, 0.6, 1.0);
        let n = oracle_cutoff(&x)?.max(oracle_cutoff(&y)?);
        let b = FockBasis::shared(d, n)?;
        let oracle = inner(&represent_state(&x, &b)?, &represent_state(&y, &b)?)?;
        Ok(rel(oracle, overlap(&x, &y)?))
    });
    ctx.check("determinant_closed_form", 1e-10, true, 1, |_| {
        let a = from_real_diagonal(&[0.5]);
        let closed = log_sqrt_det_inv(&(identity(1) - a.adjoint() * &a))?.exp();
        Ok((closed - c(0.75f64.powf(-0.5), 0.0)).norm())
    });
    ctx.check("determinant_series", 1e-8, true, 1, |_| {
        let a = from_real_diagonal(&[0.5]);
        let b = FockBasis::shared(1, 40)?;
        Ok((exp_omega(&a, &b)?.norm().powi(2) - 0.75f64.powf(-0.5)).abs())
    });
    ctx.check("ccr", 1e-10, true, t.div_ceil(10), |rng| {
        let d = rng.random_range(1..=2);
        let b = FockBasis::shared(d, 8)?;
        let f = gaussian_vector(rng, d);
        let g = gaussian_vector(rng, d);
        let fs = f.map(|z| z.conj());
        let gs = g.map(|z| z.conj());
        let x = create(&f, &b)?.sub(&annihilate(&fs, &b)?)?;
        let y = create(&g, &b)?.sub(&annihilate(&gs, &b)?)?;
        let expected = c(0.0, -2.0 * symplectic_form(&f, &g)?);
        let comm = annihilate(&f, &b)?.commutator(&create(&g, &b)?)?;
        Ok(x.commutator(&y)?
            .deviation_from_scalar(expected, 7)
            .max(comm.deviation_from_scalar(bilinear(&f, &g), 7)))
    });
    ctx.check("product_norm_bound", 1.0 + 1e-12, false, 5 * t, |rng| {
        let d = rng.random_range(1..=3);
        let (m, n) = (rng.random_range(0..=6), rng.random_range(0..=6));
        let b = FockBasis::shared(d, 12)?;
        let f = random_homogeneous(rng, &b, m)?;
        let g = random_homogeneous(rng, &b, n)?;
        let binom: f64 = (1..=n).map(|k| (m + k) as f64 / k as f64).product();
        Ok(symmetric_product(&f, &g)?.norm() / (binom.sqrt() * f.norm() * g.norm()))
    });
    ctx.check("alpha_product_bound", 1.0 + 1e-12, false, 5 * t, |rng| {
        let d = rng.random_range(1..=2);
        let b = FockBasis::shared(d, 8)?;
        let f = random_tensor(rng, &b)?;
        let g = random_tensor(rng, &b)?;
        let alpha = rng.random_range(0.05..0.5);
        let beta = rng.random_range(0.05..0.5);
        let gamma = rng.random_range(alpha + beta..=1.0);
        let ratio: f64 = (alpha + beta) / gamma;
        let constant = (1.0 - ratio * ratio).powf(-0.5);
        let lhs = alpha_norm(&symmetric_product(&f, &g)?, gamma)?;
        Ok(lhs / (constant * alpha_norm(&f, alpha)? * alpha_norm(&g, beta)?))
    });
}

fn oracle_cutoff(x: &UltracoherentState) -> Result<usize> {
    cutoff_for(x, 1e-8, 8, 240)?
        .ok_or_else(|| Error::InternalInconsistency("no cutoff reaches the tail target".into()))
}

fn random_homogeneous(
    rng: &mut Rng64,
    b: &std::sync::Arc<FockBasis>,
    degree: usize,
) -> Result<FockTensor> {
    let mut coeffs = vec![c(0.0, 0.0); b.len()];
    for i in b.degree_range(degree) {
        coeffs[i] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    FockTensor::from_coeffs(b, coeffs)
}

fn random_tensor(rng: &mut Rng64, b: &std::sync::Arc<FockBasis>) -> Result<FockTensor> {
    let coeffs = (0..b.len())
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    FockTensor::from_coeffs(b, coeffs)
}

fn dsl_suite(ctx: &mut Ctx) {
    let t = ctx.trials;
    ctx.check("compiled_vs_sequential", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=3);
        let gates = random_circuit(rng, d, 8);
        let steps = lower(&gates, d, no_files)?;
        let compiled = run(&compile_steps(&steps, d)?)?;
        Ok(state_residual(&compiled, &run_sequential(&steps, d)?))
    });
    ctx.check("run_normalized", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=3);
        let gates = random_circuit(rng, d, 8);
        let x = run(&compile_steps(&lower(&gates, d, no_files)?, d)?)?;
        Ok((norm(&x) - 1.0).abs())
    });
    ctx.check("parser_round_trip", 0.0, false, t, |rng| {
        let d = rng.random_range(1..=3);
        let gates = random_circuit(rng, d, 8);
        Ok(if parse(&pretty_print(&gates))? == gates {
            0.0
        } else {
            1.0
        })
    });
    ctx.check("inverse_circuit", 1e-9, true, t, |rng| {
        let d = rng.random_range(1..=3);
        let mut gates = random_circuit(rng, d, 8);
        let inverse: Vec<_> = gates.iter().rev().filter_map(|g| g.inverse()).collect();
        gates.extend(inverse);
        let x = run(&compile_steps(&lower(&gates, d, no_files)?, d)?)?;
        Ok(1.0 - fidelity(&x, &UltracoherentState::vacuum(d))?)
    });
}
