//! JSON exchange formats.
//!
//! Complex numbers are `[re, im]`; matrices are
//! `{"rows", "cols", "data": [[[re, im], …], …]}` in row-major order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, is_finite_matrix, ComplexMatrix, ComplexVector, LogComplex, Takagi, C64};
use crate::siegel::{make_point, SiegelPoint};
use crate::state::UltracoherentState;
use crate::symplectic::{make_symplectic, SymplecticElement};

pub type ComplexJson = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<ComplexJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticJson {
    pub dim: usize,
    #[serde(rename = "U")]
    pub u: MatrixJson,
    #[serde(rename = "V")]
    pub v: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiegelJson {
    pub dim: usize,
    #[serde(rename = "Z")]
    pub z: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    #[serde(rename = "Z")]
    pub z: MatrixJson,
    pub f: Vec<ComplexJson>,
    pub log_amp: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TakagiJson {
    #[serde(rename = "F")]
    pub f: MatrixJson,
    pub alphas: Vec<f64>,
}

fn cplx(z: ComplexJson) -> Result<C64> {
    if !(z[0].is_finite() && z[1].is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(c(z[0], z[1]))
}

pub fn complex_to_json(z: C64) -> ComplexJson {
    [z.re, z.im]
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    MatrixJson {
        rows: m.nrows(),
        cols: m.ncols(),
        data: (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect())
            .collect(),
    }
}

pub fn matrix_from_json(m: &MatrixJson) -> Result<ComplexMatrix> {
    if m.data.len() != m.rows {
        return Err(Error::Input(format!(
            "matrix declares {} rows but has {}",
            m.rows,
            m.data.len()
        )));
    }
    if let Some(row) = m.data.iter().find(|r| r.len() != m.cols) {
        return Err(Error::Input(format!(
            "matrix declares {} columns but a row has {}",
            m.cols,
            row.len()
        )));
    }
    let mut out = ComplexMatrix::zeros(m.rows, m.cols);
    for (i, row) in m.data.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            out[(i, j)] = cplx(*z)?;
        }
    }
    debug_assert!(is_finite_matrix(&out));
    Ok(out)
}

pub fn vector_to_json(v: &ComplexVector) -> Vec<ComplexJson> {
    v.iter().map(|z| complex_to_json(*z)).collect()
}

pub fn vector_from_json(v: &[ComplexJson]) -> Result<ComplexVector> {
    let entries = v.iter().map(|z| cplx(*z)).collect::<Result<Vec<_>>>()?;
    Ok(ComplexVector::from_vec(entries))
}

fn square(m: &ComplexMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if m.nrows() != dim {
                m.nrows()
            } else {
                m.ncols()
            },
        });
    }
    Ok(())
}

pub fn symplectic_to_json(r: &SymplecticElement) -> SymplecticJson {
    SymplecticJson {
        dim: r.dim(),
        u: matrix_to_json(r.u()),
        v: matrix_to_json(r.v()),
    }
}

pub fn symplectic_from_json(j: &SymplecticJson, tol: f64) -> Result<SymplecticElement> {
    let u = matrix_from_json(&j.u)?;
    let v = matrix_from_json(&j.v)?;
    square(&u, j.dim)?;
    square(&v, j.dim)?;
    make_symplectic(u, v, tol)
}

pub fn siegel_to_json(z: &SiegelPoint) -> SiegelJson {
    SiegelJson {
        dim: z.dim(),
        z: matrix_to_json(z.matrix()),
    }
}

pub fn siegel_from_json(j: &SiegelJson, tol: f64) -> Result<SiegelPoint> {
    let z = matrix_from_json(&j.z)?;
    square(&z, j.dim)?;
    make_point(z, tol)
}

pub fn state_to_json(x: &UltracoherentState) -> StateJson {
    StateJson {
        dim: x.dim(),
        z: matrix_to_json(x.z().matrix()),
        f: vector_to_json(x.f()),
        log_amp: [x.log_amp().re, x.log_amp().im],
    }
}

pub fn state_from_json(j: &StateJson, tol: f64) -> Result<UltracoherentState> {
    let z = matrix_from_json(&j.z)?;
    square(&z, j.dim)?;
    let f = vector_from_json(&j.f)?;
    if f.len() != j.dim {
        return Err(Error::DimensionMismatch {
            expected: j.dim,
            found: f.len(),
        });
    }
    let a = cplx(j.log_amp)?;
    UltracoherentState::new(make_point(z, tol)?, f, LogComplex::new(a.re, a.im))
}

pub fn takagi_to_json(t: &Takagi) -> TakagiJson {
    TakagiJson {
        f: matrix_to_json(&t.f),
        alphas: t.alphas.clone(),
    }
}
