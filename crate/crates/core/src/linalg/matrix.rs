//! Dense complex matrices stored row-major.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::LinalgError;

pub type C64 = Complex64;

/// Dense `rows × cols` complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Fails if the length does not match.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::BadLength {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    /// Kronecker product: block `(i, j)` of the result is `self[i, j] * other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ComplexMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let s = self[(i, j)];
                if s == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    let orow = (i * other.rows + k) * cols + j * other.cols;
                    for l in 0..other.cols {
                        out.data[orow + l] = s * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::shape("matmul", self, other));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            let orow = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        self.zip_with("add", other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        self.zip_with("sub", other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        op: &'static str,
        other: &ComplexMatrix,
        f: impl Fn(C64, C64) -> C64,
    ) -> Result<ComplexMatrix, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::shape(op, self, other));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// In-place `self += alpha * other`.
    pub fn axpy(&mut self, alpha: C64, other: &ComplexMatrix) -> Result<(), LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::shape("axpy", self, other));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Result<C64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                op: "trace",
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `Tr(self · rho)` without forming the product.
    pub fn expectation(&self, rho: &ComplexMatrix) -> Result<C64, LinalgError> {
        if self.cols != rho.rows || self.rows != rho.cols {
            return Err(LinalgError::shape("expectation", self, rho));
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * rho[(k, i)];
            }
        }
        Ok(acc)
    }

    /// Commutator `self·other − other·self`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Frobenius norm of `self − self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Replaces the matrix by its Hermitian part `(M + M†)/2`.
    pub fn symmetrize(&mut self) {
        let n = self.rows;
        for i in 0..n {
            let d = self[(i, i)];
            self[(i, i)] = C64::new(d.re, 0.0);
            for j in (i + 1)..n {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Compressed-row square operator for repeated products against dense
/// matrices. Built from a dense matrix by dropping exact zeros.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOperator {
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        assert!(m.is_square(), "sparse operators are square");
        let n = m.rows();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// `out += alpha · (self · x)`, with `x` and `out` row-major `n × n`.
    pub fn left_mul_acc(&self, alpha: C64, x: &[C64], out: &mut [C64]) {
        let n = self.n;
        for i in 0..n {
            let orow = &mut out[i * n..(i + 1) * n];
            for (k, v) in self.row(i) {
                let coef = alpha * v;
                let xrow = &x[k * n..(k + 1) * n];
                for (o, xv) in orow.iter_mut().zip(xrow) {
                    *o += coef * xv;
                }
            }
        }
    }

    /// `out += alpha · (x · self†)`.
    pub fn right_mul_dagger_acc(&self, alpha: C64, x: &[C64], out: &mut [C64]) {
        let n = self.n;
        // (x S†)_{ij} = Σ_k x_ik conj(S_jk)
        for j in 0..n {
            for (k, v) in self.row(j) {
                let coef = alpha * v.conj();
                for i in 0..n {
                    out[i * n + j] += coef * x[i * n + k];
                }
            }
        }
    }

    /// `out += alpha · (self · x · self†)`.
    pub fn sandwich_acc(&self, alpha: C64, x: &[C64], out: &mut [C64]) {
        let n = self.n;
        for i in 0..n {
            for (k, a) in self.row(i) {
                let ai = alpha * a;
                for j in 0..n {
                    for (l, b) in self.row(j) {
                        out[i * n + j] += ai * x[k * n + l] * b.conj();
                    }
                }
            }
        }
    }
}
