//! Coefficient system derived from a table: technical coefficients A,
//! global Leontief inverse B, and value-added coefficients v.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::icio::IcioTable;

/// Above this order the inverse is built by per-column iterative solves
/// instead of one dense LU factorization.
const DENSE_LIMIT: usize = 5000;

#[derive(Debug, Error)]
pub enum LeontiefError {
    #[error("system is not productive (spectral radius >= 1 or singular)")]
    NonProductive,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero gross output at producer {0}")]
    ZeroOutput(usize),
}

/// The coefficient system of one table.
#[derive(Debug, Clone)]
pub struct LeontiefSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub v: DVector<f64>,
}

impl LeontiefSystem {
    pub fn from_table(table: &IcioTable) -> Result<Self, LeontiefError> {
        let a = technical_coefficients(table);
        let b = leontief_inverse(&a)?;
        let v = va_coefficients(table);
        Ok(LeontiefSystem { a, b, v })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }
}

/// A[i,j] = Z[i,j] / x[j]; columns of zero-output producers are zero.
pub fn technical_coefficients(table: &IcioTable) -> DMatrix<f64> {
    let n = table.n();
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        let xj = table.x()[j];
        if xj > 0.0 {
            for i in 0..n {
                a[(i, j)] = table.z()[(i, j)] / xj;
            }
        }
    }
    a
}

/// v[i] = va[i] / x[i]; zero where output is zero.
pub fn va_coefficients(table: &IcioTable) -> DVector<f64> {
    let n = table.n();
    DVector::from_fn(n, |i, _| {
        let xi = table.x()[i];
        if xi > 0.0 {
            table.va()[i] / xi
        } else {
            0.0
        }
    })
}

/// Advisory spectral-radius estimate: 50 power iterations on |A|.
fn spectral_radius_estimate(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut lambda = 0.0;
    for _ in 0..50 {
        let w = a * &v;
        let norm = w.norm();
        if norm < 1e-300 {
            return 0.0;
        }
        let next = norm;
        v = w / norm;
        if (next - lambda).abs() < 1e-6 * next.max(1.0) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda
}

/// B = (I - A)^-1, checked productive. Dense LU for small systems;
/// column-wise Neumann iteration above `DENSE_LIMIT`.
pub fn leontief_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>, LeontiefError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LeontiefError::DimensionMismatch(format!(
            "A is {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    // Advisory precheck; the solver's own singularity is authoritative.
    if spectral_radius_estimate(a) >= 1.0 + 1e-9 {
        return Err(LeontiefError::NonProductive);
    }
    let b = if n <= DENSE_LIMIT {
        let i_minus_a = DMatrix::identity(n, n) - a;
        let lu = i_minus_a.lu();
        lu.solve(&DMatrix::identity(n, n))
            .ok_or(LeontiefError::NonProductive)?
    } else {
        neumann_inverse(a)?
    };
    // Productive systems have a nonnegative inverse with unit-or-larger
    // diagonal; a violation means the radius check missed divergence.
    for j in 0..n {
        if b[(j, j)] < 1.0 - 1e-9 {
            return Err(LeontiefError::NonProductive);
        }
        for i in 0..n {
            if b[(i, j)] < -1e-9 || !b[(i, j)].is_finite() {
                return Err(LeontiefError::NonProductive);
            }
        }
    }
    Ok(b)
}

fn neumann_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>, LeontiefError> {
    let n = a.nrows();
    let mut b = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut col = DVector::zeros(n);
        col[j] = 1.0;
        let mut term = col.clone();
        for _ in 0..10_000 {
            term = a * &term;
            let norm = term.amax();
            col += &term;
            if norm < 1e-14 {
                break;
            }
            if !norm.is_finite() || norm > 1e12 {
                return Err(LeontiefError::NonProductive);
            }
        }
        b.set_column(j, &col);
    }
    Ok(b)
}
