//! Truncated bosonic Fock space over `C^d` in the occupation basis.
//!
//! The basis vector `E_m` is the symmetric product `e_1^{∨m_1} ∨ … ∨ e_d^{∨m_d}`
//! and has squared norm `m! = Π m_μ!`. Tensors keep every total degree up to
//! the cutoff `N`; products silently drop higher degrees.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{
    c, hs_norm, identity, symmetry_residual, ComplexMatrix, ComplexVector, C64, ONE, ZERO,
};
use crate::siegel::make_point_with_margin;
use crate::state::{log_overlap, UltracoherentState};

/// Largest mixed-radix lookup table, `(N + 1)^d`, that a basis may allocate.
pub const MAX_LOOKUP: usize = 1 << 24;

/// Largest basis on which dense operators are built.
pub const MAX_OPERATOR_BASIS: usize = 4096;

#[derive(Debug)]
pub struct FockBasis {
    dim: usize,
    cutoff: usize,
    indices: Vec<Vec<u16>>,
    degree: Vec<usize>,
    degree_start: Vec<usize>,
    code: Vec<u32>,
    lookup: Vec<u32>,
    weight: Vec<f64>,
}

impl FockBasis {
    pub fn new(dim: usize, cutoff: usize) -> Result<Self> {
        let too_large = Error::BasisTooLarge { dim, cutoff };
        let radix = cutoff + 1;
        let table = (0..dim).try_fold(1usize, |acc, _| acc.checked_mul(radix));
        let table = match table {
            Some(t) if t <= MAX_LOOKUP && dim > 0 => t,
            _ => return Err(too_large),
        };
        let mut factorial = vec![1.0f64; radix];
        for k in 1..radix {
            factorial[k] = factorial[k - 1] * k as f64;
        }
        let mut indices = Vec::new();
        let mut degree = Vec::new();
        let mut degree_start = Vec::with_capacity(cutoff + 2);
        for n in 0..=cutoff {
            degree_start.push(indices.len());
            let mut m = vec![0u16; dim];
            compositions(n, 0, &mut m, &mut |m| {
                indices.push(m.to_vec());
                degree.push(n);
            });
        }
        degree_start.push(indices.len());
        let mut lookup = vec![u32::MAX; table];
        let mut code = Vec::with_capacity(indices.len());
        let mut weight = Vec::with_capacity(indices.len());
        for (i, m) in indices.iter().enumerate() {
            let k = encode(m, radix);
            lookup[k] = i as u32;
            code.push(k as u32);
            weight.push(m.iter().map(|&x| factorial[x as usize]).product());
        }
        Ok(Self {
            dim,
            cutoff,
            indices,
            degree,
            degree_start,
            code,
            lookup,
            weight,
        })
    }

    /// Shared basis for `(dim, cutoff)`, built once per process.
    pub fn shared(dim: usize, cutoff: usize) -> Result<Arc<FockBasis>> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<FockBasis>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(b) = cache.lock().expect("cache lock").get(&(dim, cutoff)) {
            return Ok(Arc::clone(b));
        }
        let b = Arc::new(FockBasis::new(dim, cutoff)?);
        cache
            .lock()
            .expect("cache lock")
            .insert((dim, cutoff), Arc::clone(&b));
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn multi_index(&self, i: usize) -> &[u16] {
        &self.indices[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degree[i]
    }

    /// `‖E_m‖² = m!`.
    pub fn weight(&self, i: usize) -> f64 {
        self.weight[i]
    }

    /// Index range of the homogeneous component of degree `n`.
    pub fn degree_range(&self, n: usize) -> std::ops::Range<usize> {
        self.degree_start[n]..self.degree_start[n + 1]
    }

    pub fn index_of(&self, m: &[u16]) -> Option<usize> {
        if m.len() != self.dim || m.iter().map(|&x| x as usize).sum::<usize>() > self.cutoff {
            return None;
        }
        Some(self.lookup[encode(m, self.cutoff + 1)] as usize)
    }

    fn sum_index(&self, i: usize, j: usize) -> usize {
        self.lookup[(self.code[i] + self.code[j]) as usize] as usize
    }

    /// Index of `m + e_μ`, if its degree is kept.
    fn raise(&self, i: usize, mu: usize) -> Option<usize> {
        if self.degree[i] >= self.cutoff {
            return None;
        }
        let step = (self.cutoff + 1).pow(mu as u32) as u32;
        Some(self.lookup[(self.code[i] + step) as usize] as usize)
    }

    /// Index of `m − e_μ`, if `m_μ > 0`.
    fn lower(&self, i: usize, mu: usize) -> Option<usize> {
        if self.indices[i][mu] == 0 {
            return None;
        }
        let step = (self.cutoff + 1).pow(mu as u32) as u32;
        Some(self.lookup[(self.code[i] - step) as usize] as usize)
    }
}

fn encode(m: &[u16], radix: usize) -> usize {
    m.iter()
        .rev()
        .fold(0usize, |acc, &x| acc * radix + x as usize)
}

fn compositions(n: usize, pos: usize, m: &mut Vec<u16>, emit: &mut impl FnMut(&[u16])) {
    if pos + 1 == m.len() {
        m[pos] = n as u16;
        emit(m);
        return;
    }
    for k in (0..=n).rev() {
        m[pos] = k as u16;
        compositions(n - k, pos + 1, m, emit);
    }
}

fn same_basis(a: &Arc<FockBasis>, b: &Arc<FockBasis>) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    if a.cutoff != b.cutoff {
        return Err(Error::DimensionMismatch {
            expected: a.cutoff,
            found: b.cutoff,
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct FockTensor {
    basis: Arc<FockBasis>,
    coeffs: Vec<C64>,
}

impl FockTensor {
    pub fn zero(basis: &Arc<FockBasis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            coeffs: vec![ZERO; basis.len()],
        }
    }

    pub fn vacuum(basis: &Arc<FockBasis>) -> Self {
        let mut t = Self::zero(basis);
        t.coeffs[0] = ONE;
        t
    }

    pub fn from_coeffs(basis: &Arc<FockBasis>, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            basis: Arc::clone(basis),
            coeffs,
        })
    }

    /// The basis vector `E_m`.
    pub fn basis_vector(basis: &Arc<FockBasis>, m: &[u16]) -> Result<Self> {
        let i = basis
            .index_of(m)
            .ok_or_else(|| Error::Input(format!("multi-index {m:?} not in basis")))?;
        let mut t = Self::zero(basis);
        t.coeffs[i] = ONE;
        Ok(t)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    pub fn cutoff(&self) -> usize {
        self.basis.cutoff
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: &[u16]) -> Option<C64> {
        self.basis.index_of(m).map(|i| self.coeffs[i])
    }

    pub fn scale(mut self, s: C64) -> Self {
        self.coeffs.iter_mut().for_each(|x| *x *= s);
        self
    }

    pub fn add(&self, other: &FockTensor) -> Result<FockTensor> {
        same_basis(&self.basis, &other.basis)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            basis: Arc::clone(&self.basis),
            coeffs,
        })
    }

    pub fn sub(&self, other: &FockTensor) -> Result<FockTensor> {
        self.add(&other.clone().scale(-ONE))
    }

    /// The homogeneous component of degree `n`.
    pub fn component(&self, n: usize) -> FockTensor {
        let mut t = Self::zero(&self.basis);
        if n <= self.basis.cutoff {
            let r = self.basis.degree_range(n);
            t.coeffs[r.clone()].copy_from_slice(&self.coeffs[r]);
        }
        t
    }

    /// `‖F_n‖²` for `n = 0..=N`.
    pub fn degree_norms_sq(&self) -> Vec<f64> {
        (0..=self.basis.cutoff)
            .map(|n| {
                self.basis
                    .degree_range(n)
                    .map(|i| self.basis.weight[i] * self.coeffs[i].norm_sqr())
                    .sum()
            })
            .collect()
    }

    pub fn norm(&self) -> f64 {
        self.degree_norms_sq().iter().sum::<f64>().sqrt()
    }

    fn nonzero(&self) -> Vec<(usize, C64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(|(i, z)| (i, *z))
            .collect()
    }

    /// Debug dump `{"dim", "cutoff", "entries": [[multi-index, [re, im]], …]}`
    /// listing the nonzero coefficients.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .nonzero()
            .into_iter()
            .map(|(i, z)| json!([self.basis.indices[i], [z.re, z.im]]))
            .collect();
        json!({"dim": self.dim(), "cutoff": self.cutoff(), "entries": entries})
    }
}

/// `F ∨ G`, truncated at the cutoff.
pub fn symmetric_product(f: &FockTensor, g: &FockTensor) -> Result<FockTensor> {
    same_basis(&f.basis, &g.basis)?;
    let b = &f.basis;
    let nz_g = g.nonzero();
    let mut out = vec![ZERO; b.len()];
    for (i, a) in f.nonzero() {
        let room = b.cutoff - b.degree[i];
        for &(j, x) in &nz_g {
            if b.degree[j] > room {
                break;
            }
            out[b.sum_index(i, j)] += a * x;
        }
    }
    Ok(FockTensor {
        basis: Arc::clone(b),
        coeffs: out,
    })
}

/// `(F | G) = Σ m! conj(c_m) d_m`.
pub fn inner(f: &FockTensor, g: &FockTensor) -> Result<C64> {
    same_basis(&f.basis, &g.basis)?;
    Ok(f.coeffs
        .iter()
        .zip(&g.coeffs)
        .zip(&f.basis.weight)
        .map(|((a, b), w)| a.conj() * b * *w)
        .sum())
}

/// `exp f` with coefficients `Π f_μ^{m_μ} / m_μ!`.
pub fn exp_vector(f: &ComplexVector, basis: &Arc<FockBasis>) -> Result<FockTensor> {
    if f.len() != basis.dim {
        return Err(Error::DimensionMismatch {
            expected: basis.dim,
            found: f.len(),
        });
    }
    let n = basis.cutoff;
    let powers: Vec<Vec<C64>> = f
        .iter()
        .map(|&z| {
            let mut p = vec![ONE; n + 1];
            for k in 1..=n {
                p[k] = p[k - 1] * z / k as f64;
            }
            p
        })
        .collect();
    let coeffs = basis
        .indices
        .iter()
        .map(|m| {
            m.iter()
                .enumerate()
                .map(|(mu, &k)| powers[mu][k as usize])
                .product()
        })
        .collect();
    FockTensor::from_coeffs(basis, coeffs)
}

/// `Ω(A) = ½ Σ A_{μν} e_μ ∨ e_ν`.
pub fn omega_tensor(a: &ComplexMatrix, basis: &Arc<FockBasis>) -> Result<FockTensor> {
    let d = basis.dim;
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: a.nrows(),
        });
    }
    let sym = symmetry_residual(a);
    if sym > 1e-12 * (1.0 + hs_norm(a)) {
        return Err(Error::NotSymmetric(sym));
    }
    let mut t = FockTensor::zero(basis);
    if basis.cutoff < 2 {
        return Ok(t);
    }
    for mu in 0..d {
        for nu in mu..d {
            let mut m = vec![0u16; d];
            m[mu] += 1;
            m[nu] += 1;
            let i = basis.index_of(&m).expect("degree two is kept");
            t.coeffs[i] = if mu == nu {
                0.5 * a[(mu, mu)]
            } else {
                0.5 * (a[(mu, nu)] + a[(nu, mu)])
            };
        }
    }
    Ok(t)
}

/// `exp Ω(A) = Σ_{n ≤ N/2} Ω(A)^{∨n} / n!`.
pub fn exp_omega(a: &ComplexMatrix, basis: &Arc<FockBasis>) -> Result<FockTensor> {
    make_point_with_margin(a.clone(), 1e-12, 0.0)?;
    let omega = omega_tensor(a, basis)?;
    let mut total = FockTensor::vacuum(basis);
    let mut term = FockTensor::vacuum(basis);
    for n in 1..=basis.cutoff / 2 {
        term = symmetric_product(&term, &omega)?.scale(c(1.0 / n as f64, 0.0));
        for (t, x) in total.coeffs.iter_mut().zip(&term.coeffs) {
            *t += x;
        }
    }
    Ok(total)
}

/// `exp(logAmp) · exp Ω(Z) ∨ exp f`, truncated at the cutoff.
pub fn represent_state(x: &UltracoherentState, basis: &Arc<FockBasis>) -> Result<FockTensor> {
    if x.dim() != basis.dim {
        return Err(Error::DimensionMismatch {
            expected: basis.dim,
            found: x.dim(),
        });
    }
    let mut t = exp_omega(x.z().matrix(), basis)?;
    for mu in 0..basis.dim {
        if x.f()[mu] == ZERO {
            continue;
        }
        let mut single = ComplexVector::zeros(basis.dim);
        single[mu] = x.f()[mu];
        t = symmetric_product(&t, &exp_vector(&single, basis)?)?;
    }
    Ok(t.scale(x.amplitude()))
}

/// `‖F‖_(α) = (Σ_n α^{−2n} ‖F_n‖²)^{1/2}`.
pub fn alpha_norm(f: &FockTensor, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let s: f64 = f
        .degree_norms_sq()
        .iter()
        .enumerate()
        .map(|(n, w)| w * alpha.powi(-2 * n as i32))
        .sum();
    Ok(s.sqrt())
}

/// Upper bound on `Σ_{n > N} ‖x_n‖²`, the squared norm of the degrees a
/// cutoff-`N` representation drops.
///
/// For `α² ∈ (‖Z‖, 1)` the dropped mass is at most
/// `α^{2(N+1)} ‖x‖²_(α)`, and `‖x‖_(α) = ‖exp(logAmp) Φ(Z/α², f/α)‖`.
pub fn tail_bound(x: &UltracoherentState, cutoff: usize) -> Result<f64> {
    let zn = x.z().op_norm();
    if zn >= 1.0 {
        return Err(Error::NotInDisc(zn));
    }
    if zn == 0.0 && x.f().iter().all(|z| *z == ZERO) {
        return Ok(0.0);
    }
    let log_bound = |s: f64| -> f64 {
        let scaled_z = x.z().matrix().scale(1.0 / s);
        let scaled_f = x.f().scale(1.0 / s.sqrt());
        let Ok(z) = make_point_with_margin(scaled_z, 1e-9, 0.0) else {
            return f64::INFINITY;
        };
        let y = UltracoherentState::new(z, scaled_f, x.log_amp()).expect("dimensions agree");
        match log_overlap(&y, &y) {
            Ok(l) => (cutoff as f64 + 1.0) * s.ln() + l.re,
            Err(_) => f64::INFINITY,
        }
    };
    let lo = zn;
    let grid = 400;
    let mut best = f64::INFINITY;
    let mut best_s = 1.0;
    for k in 1..grid {
        let s = lo + (1.0 - lo) * k as f64 / grid as f64;
        let v = log_bound(s);
        if v < best {
            best = v;
            best_s = s;
        }
    }
    let step = (1.0 - lo) / grid as f64;
    let (mut a, mut b) = (
        (best_s - step).max(lo + 1e-3 * step),
        (best_s + step).min(1.0),
    );
    for _ in 0..60 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if log_bound(m1) < log_bound(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    Ok(best.min(log_bound(0.5 * (a + b))).exp())
}

/// Smallest cutoff (rounded up to a multiple of `step`) whose tail bound is
/// below `target`, or `None` if none is found up to `max_cutoff`.
pub fn cutoff_for(
    x: &UltracoherentState,
    target: f64,
    step: usize,
    max_cutoff: usize,
) -> Result<Option<usize>> {
    let mut n = step;
    while n <= max_cutoff {
        if tail_bound(x, n)? <= target {
            return Ok(Some(n));
        }
        n += step;
    }
    Ok(None)
}

/// Dense operator on the occupation basis.
#[derive(Debug, Clone)]
pub struct FockOperator {
    basis: Arc<FockBasis>,
    matrix: ComplexMatrix,
}

impl FockOperator {
    fn check_size(basis: &Arc<FockBasis>) -> Result<()> {
        if basis.len() > MAX_OPERATOR_BASIS {
            return Err(Error::BasisTooLarge {
                dim: basis.dim,
                cutoff: basis.cutoff,
            });
        }
        Ok(())
    }

    pub fn identity(basis: &Arc<FockBasis>) -> Result<Self> {
        Self::check_size(basis)?;
        Ok(Self {
            basis: Arc::clone(basis),
            matrix: identity(basis.len()),
        })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, t: &FockTensor) -> Result<FockTensor> {
        same_basis(&self.basis, &t.basis)?;
        let v = &self.matrix * ComplexVector::from_column_slice(&t.coeffs);
        FockTensor::from_coeffs(&self.basis, v.iter().copied().collect())
    }

    pub fn compose(&self, other: &FockOperator) -> Result<FockOperator> {
        same_basis(&self.basis, &other.basis)?;
        Ok(Self {
            basis: Arc::clone(&self.basis),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn add(&self, other: &FockOperator) -> Result<FockOperator> {
        same_basis(&self.basis, &other.basis)?;
        Ok(Self {
            basis: Arc::clone(&self.basis),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &FockOperator) -> Result<FockOperator> {
        same_basis(&self.basis, &other.basis)?;
        Ok(Self {
            basis: Arc::clone(&self.basis),
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn scale(&self, s: C64) -> FockOperator {
        Self {
            basis: Arc::clone(&self.basis),
            matrix: self.matrix.map(|z| z * s),
        }
    }

    pub fn commutator(&self, other: &FockOperator) -> Result<FockOperator> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Largest entry of `self − s·I` over the columns of degree at most
    /// `max_degree`.
    pub fn deviation_from_scalar(&self, s: C64, max_degree: usize) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.basis.len() {
            if self.basis.degree[j] > max_degree {
                continue;
            }
            for i in 0..self.basis.len() {
                let expected = if i == j { s } else { ZERO };
                worst = worst.max((self.matrix[(i, j)] - expected).norm());
            }
        }
        worst
    }
}

/// `a⁺(f) F = f ∨ F`.
pub fn create(f: &ComplexVector, basis: &Arc<FockBasis>) -> Result<FockOperator> {
    FockOperator::check_size(basis)?;
    check_vec(f, basis)?;
    let mut m = ComplexMatrix::zeros(basis.len(), basis.len());
    for j in 0..basis.len() {
        for mu in 0..basis.dim {
            if let Some(i) = basis.raise(j, mu) {
                m[(i, j)] += f[mu];
            }
        }
    }
    Ok(FockOperator {
        basis: Arc::clone(basis),
        matrix: m,
    })
}

/// `a(f)`, bilinear in `f`, with `a(f) exp g = ⟨f|g⟩ exp g`.
pub fn annihilate(f: &ComplexVector, basis: &Arc<FockBasis>) -> Result<FockOperator> {
    FockOperator::check_size(basis)?;
    check_vec(f, basis)?;
    let mut m = ComplexMatrix::zeros(basis.len(), basis.len());
    for j in 0..basis.len() {
        for mu in 0..basis.dim {
            if let Some(i) = basis.lower(j, mu) {
                m[(i, j)] += f[mu] * basis.indices[j][mu] as f64;
            }
        }
    }
    Ok(FockOperator {
        basis: Arc::clone(basis),
        matrix: m,
    })
}

fn check_vec(f: &ComplexVector, basis: &FockBasis) -> Result<()> {
    if f.len() != basis.dim {
        return Err(Error::DimensionMismatch {
            expected: basis.dim,
            found: f.len(),
        });
    }
    Ok(())
}

/// `Γ(B)`, the second quantization with `Γ(B) exp f = exp(Bf)`.
pub fn gamma(b: &ComplexMatrix, basis: &Arc<FockBasis>) -> Result<FockOperator> {
    FockOperator::check_size(basis)?;
    let d = basis.dim;
    if b.nrows() != d || b.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: b.nrows(),
        });
    }
    let n = basis.len();
    let mut m = ComplexMatrix::zeros(n, n);
    m[(0, 0)] = ONE;
    for j in 1..n {
        let mu = basis.indices[j]
            .iter()
            .position(|&k| k > 0)
            .expect("nonzero degree");
        let prev = basis.lower(j, mu).expect("m_μ > 0");
        for i in 0..n {
            let x = m[(i, prev)];
            if x == ZERO {
                continue;
            }
            for nu in 0..d {
                if let Some(k) = basis.raise(i, nu) {
                    m[(k, j)] += b[(nu, mu)] * x;
                }
            }
        }
    }
    Ok(FockOperator {
        basis: Arc::clone(basis),
        matrix: m,
    })
}

/// `W(h) = exp(a⁺(h) − a(h*))` on the cutoff space.
pub fn weyl(h: &ComplexVector, basis: &Arc<FockBasis>) -> Result<FockOperator> {
    let gen = create(h, basis)?.sub(&annihilate(&h.map(|z| z.conj()), basis)?)?;
    Ok(FockOperator {
        basis: Arc::clone(basis),
        matrix: expm(&gen.matrix),
    })
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(0.5f64.powi(s));
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=20 {
        term = &term * &scaled / c(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}
