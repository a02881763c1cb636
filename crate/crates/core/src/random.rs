//! Seeded random ensembles used by the verification suites and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::Gate;
use crate::linalg::{c, operator_norm, ComplexMatrix, ComplexVector, LogComplex};
use crate::siegel::SiegelPoint;
use crate::state::UltracoherentState;
use crate::symplectic::{compose, SymplecticElement};

pub type Rng64 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, d: usize) -> ComplexVector {
    ComplexVector::from_fn(d, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Vector with norm drawn uniformly from `[0, max_norm]`.
pub fn random_vector<R: Rng>(rng: &mut R, d: usize, max_norm: f64) -> ComplexVector {
    let g = gaussian_vector(rng, d);
    let n = g.norm();
    if n == 0.0 {
        return g;
    }
    let target = rng.random_range(0.0..=max_norm);
    g.scale(target / n)
}

/// Haar-distributed unitary (QR of a complex Gaussian matrix with the
/// diagonal phase fix).
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> ComplexMatrix {
    let (mut q, r) = gaussian_matrix(rng, d, d).qr().unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let phase = rjj / rjj.norm();
            for i in 0..d {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Real symmetric matrix with operator norm drawn uniformly from
/// `[0, max_norm]`.
pub fn random_real_symmetric<R: Rng>(rng: &mut R, d: usize, max_norm: f64) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), 0.0));
    let s = (&g + g.transpose()).scale(0.5);
    let n = operator_norm(&s);
    if n == 0.0 {
        return s;
    }
    let target = rng.random_range(0.0..=max_norm);
    s.scale(target / n)
}

/// `K₁ · squeeze(A) · K₂` with Haar unitaries and `‖A‖ ≤ max_squeeze`.
pub fn random_symplectic<R: Rng>(rng: &mut R, d: usize, max_squeeze: f64) -> SymplecticElement {
    let k1 = SymplecticElement::from_unitary(&random_unitary(rng, d), 1e-10)
        .expect("QR factor is unitary");
    let k2 = SymplecticElement::from_unitary(&random_unitary(rng, d), 1e-10)
        .expect("QR factor is unitary");
    let a = random_real_symmetric(rng, d, max_squeeze);
    let s = SymplecticElement::squeeze(&a, 1e-12).expect("real symmetric input");
    compose(&k1, &compose(&s, &k2).expect("valid")).expect("valid")
}

/// Complex symmetric matrix with operator norm drawn uniformly from
/// `[0, max_norm]`.
pub fn random_symmetric<R: Rng>(rng: &mut R, d: usize, max_norm: f64) -> ComplexMatrix {
    let g = gaussian_matrix(rng, d, d);
    let s = (&g + g.transpose()).scale(0.5);
    let n = operator_norm(&s);
    if n == 0.0 {
        return s;
    }
    let target = rng.random_range(0.0..=max_norm);
    s.scale(target / n)
}

pub fn random_siegel<R: Rng>(rng: &mut R, d: usize, max_norm: f64) -> SiegelPoint {
    SiegelPoint::new(random_symmetric(rng, d, max_norm)).expect("norm below one")
}

/// Ultracoherent state with `‖Z‖ ≤ max_z`, `‖f‖ ≤ max_f` and a random
/// amplitude of modulus in `[0.5, 2]`.
pub fn random_state<R: Rng>(rng: &mut R, d: usize, max_z: f64, max_f: f64) -> UltracoherentState {
    let z = random_siegel(rng, d, max_z);
    let f = random_vector(rng, d, max_f);
    let amp = LogComplex::new(
        rng.random_range(-0.7..0.7),
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
    );
    UltracoherentState::new(z, f, amp).expect("dimensions agree")
}

/// Random gate list over `dim` modes with between one and `max_gates` gates.
pub fn random_circuit<R: Rng>(rng: &mut R, dim: usize, max_gates: usize) -> Vec<Gate> {
    use std::f64::consts::PI;
    let n = rng.random_range(1..=max_gates);
    (0..n)
        .map(|_| {
            let mode = rng.random_range(0..dim);
            let kind = if dim > 1 {
                rng.random_range(0..4)
            } else {
                rng.random_range(0..3)
            };
            match kind {
                0 => Gate::Displace {
                    mode,
                    amplitude: c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                },
                1 => Gate::Squeeze {
                    mode,
                    r: rng.random_range(-1.0..1.0),
                    phi: rng.random_range(-PI..PI),
                },
                2 => Gate::Rotate {
                    mode,
                    theta: rng.random_range(-PI..PI),
                },
                _ => {
                    let other = (mode + rng.random_range(1..dim)) % dim;
                    Gate::Beamsplitter {
                        mode1: mode,
                        mode2: other,
                        theta: rng.random_range(-PI..PI),
                        phi: rng.random_range(-PI..PI),
                    }
                }
            }
        })
        .collect()
}
