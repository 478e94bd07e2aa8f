//! Dense complex matrices and the handful of linear-algebra kernels the
//! correlator computations need.
//!
//! Storage is row-major. Products and the Hermitian eigenproblem are
//! delegated to `faer`; eigenvalues of general (non-normal) matrices come
//! from the Hessenberg/QR solver in [`eigen`].

mod eigen;

use std::f64::consts::PI;
use std::ops::Range;

use faer::linalg::matmul::matmul as faer_matmul;
use faer::{Accum, MatMut, MatRef, Par, Side};

use crate::error::{Error, Result};
use crate::otoc::ProjectorRange;
use crate::C64;

pub use eigen::{complex_eigenvalues, complex_eigenvalues_with, EigenOptions};

/// Largest exponent accepted by [`matrix_power`].
pub const MAX_POWER: usize = 10_000;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ComplexMatrix({}x{})", self.rows, self.cols)?;
        if self.rows * self.cols <= 16 {
            f.debug_list().entries(self.data.chunks(self.cols)).finish()?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    /// Wraps a row-major buffer. Rejects empty shapes, a wrong buffer
    /// length and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "buffer of length {} for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at ({}, {})",
                k / cols,
                k % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty shape {rows}x{cols}");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub(crate) fn view(&self) -> MatRef<'_, C64> {
        MatRef::from_row_major_slice(&self.data, self.rows, self.cols)
    }

    pub(crate) fn view_mut(&mut self) -> MatMut<'_, C64> {
        MatMut::from_row_major_slice_mut(&mut self.data, self.rows, self.cols)
    }

    pub(crate) fn from_faer(m: MatRef<'_, C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Result<C64> {
        self.require_square()?;
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.require_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max |(U^dagger U - I)_ij|`.
    pub fn unitarity_defect(&self) -> Result<f64> {
        self.require_square()?;
        let gram = matmul_adjoint_left(self, self)?;
        gram.max_abs_diff(&Self::identity(self.rows))
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> Result<f64> {
        self.require_square()?;
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        Ok(worst)
    }

    /// Copy of the block with the given row and column index ranges.
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Result<Self> {
        if rows.start >= rows.end || cols.start >= cols.end || rows.end > self.rows || cols.end > self.cols {
            return Err(Error::DimensionMismatch(format!(
                "block [{rows:?}]x[{cols:?}] outside {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(Self::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows.start + i, cols.start + j)
        }))
    }

    /// Copy of the columns with the given indices (in order).
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::invalid("no columns selected"));
        }
        if let Some(&c) = columns.iter().find(|&&c| c >= self.cols) {
            return Err(Error::DimensionMismatch(format!(
                "column {c} outside {} columns",
                self.cols
            )));
        }
        Ok(Self::from_fn(self.rows, columns.len(), |i, j| self.get(i, columns[j])))
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows == other.rows && self.cols == other.cols {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )))
        }
    }
}

/// Half-shifted unitary DFT, `G[m][k] = exp(-2 pi i (m+1/2)(k+1/2) / n) / sqrt(n)`.
pub fn dft_shifted(n: usize) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::invalid(format!("DFT size must be at least 2, got {n}")));
    }
    let norm = 1.0 / (n as f64).sqrt();
    // (m+1/2)(k+1/2) = ((2m+1)(2k+1))/4; reduce the integer product mod 4n so
    // the phase argument stays in [0, 2 pi) at large n.
    let period = 4 * n as u128;
    Ok(ComplexMatrix::from_fn(n, n, |m, k| {
        let prod = ((2 * m + 1) as u128 * (2 * k + 1) as u128) % period;
        let angle = -2.0 * PI * prod as f64 / period as f64;
        C64::from_polar(norm, angle)
    }))
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    faer_matmul(
        out.view_mut(),
        Accum::Replace,
        a.view(),
        b.view(),
        C64::new(1.0, 0.0),
        Par::Seq,
    );
    Ok(out)
}

/// `a^dagger b` without materializing the adjoint.
pub fn matmul_adjoint_left(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply ({}x{})^dagger by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = ComplexMatrix::zeros(a.cols, b.cols);
    faer_matmul(
        out.view_mut(),
        Accum::Replace,
        a.view().adjoint(),
        b.view(),
        C64::new(1.0, 0.0),
        Par::Seq,
    );
    Ok(out)
}

/// `u^t` by repeated left multiplication.
pub fn matrix_power(u: &ComplexMatrix, t: usize) -> Result<ComplexMatrix> {
    u.require_square()?;
    if t > MAX_POWER {
        return Err(Error::invalid(format!("exponent {t} exceeds {MAX_POWER}")));
    }
    let mut acc = ComplexMatrix::identity(u.rows);
    for _ in 0..t {
        acc = matmul(u, &acc)?;
    }
    Ok(acc)
}

/// The `J x J` block `P u P` for the projector range.
pub fn truncate(u: &ComplexMatrix, range: &ProjectorRange) -> Result<ComplexMatrix> {
    u.require_square()?;
    if range.dimension() != u.rows {
        return Err(Error::DimensionMismatch(format!(
            "projector on dimension {} applied to {}x{} matrix",
            range.dimension(),
            u.rows,
            u.cols
        )));
    }
    u.submatrix(range.indices(), range.indices())
}

/// `sum |m_ij|^2`.
pub fn frobenius_norm_sq(m: &ComplexMatrix) -> f64 {
    m.data.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigenvalues of the Hermitian matrix `h`, ascending.
pub(crate) fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    h.require_square()?;
    h.view()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NotConverged {
            iterations: 0,
            remaining: h.rows,
        })
}

/// Squared singular values of `m` (eigenvalues of `m^dagger m`), descending.
///
/// Round-off can push zero eigenvalues of the positive semidefinite Gram
/// matrix slightly negative; those are reported as zero.
pub fn singular_values_squared(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let gram = matmul_adjoint_left(m, m)?;
    let mut mu = hermitian_eigenvalues(&gram)?;
    mu.reverse();
    for x in &mut mu {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    Ok(mu)
}
