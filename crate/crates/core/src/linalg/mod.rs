//! Dense complex linear algebra, an adaptive Runge–Kutta integrator, a
//! restarted GMRES solver and a Schur-based Lyapunov-type solver.
//!
//! Nothing in here knows about physics.

mod krylov;
mod matrix;
mod ode;
mod sylvester;

pub use krylov::{gmres, GmresOptions, GmresOutcome};
pub use matrix::{ComplexMatrix, SparseOperator, C64};
pub use ode::{OdeIntegrator, OdeOptions, OdeStats};
pub use sylvester::SchurSylvester;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("{op}: shape mismatch {lhs_rows}x{lhs_cols} vs {rhs_rows}x{rhs_cols}")]
    Shape {
        op: &'static str,
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },
    #[error("{op}: matrix is {rows}x{cols}, expected square")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("expected {expected} entries, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("step size underflow at t = {t:.6e} (h = {h:.3e}); problem may be stiff")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t:.6e}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("non-finite state at t = {t:.6e}")]
    NonFinite { t: f64 },
    #[error("invalid integrator input: {0}")]
    InvalidInput(String),
    #[error("singular linear system ({0})")]
    Singular(&'static str),
}

impl LinalgError {
    pub(crate) fn shape(op: &'static str, a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        LinalgError::Shape {
            op,
            lhs_rows: a.rows(),
            lhs_cols: a.cols(),
            rhs_rows: b.rows(),
            rhs_cols: b.cols(),
        }
    }
}

/// Solves the dense system `a · x = b` by Gaussian elimination with partial
/// pivoting. Intended for the small (≤ 10) systems in the analytic layer.
pub fn solve_dense(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>, LinalgError> {
    let n = a.rows();
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            op: "solve_dense",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if b.len() != n {
        return Err(LinalgError::BadLength {
            expected: n,
            got: b.len(),
        });
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))
            .unwrap_or(col);
        if m[(pivot, col)].norm() <= 1e-300 * scale {
            return Err(LinalgError::Singular("zero pivot"));
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m[(col, k)];
                m[(col, k)] = m[(pivot, k)];
                m[(pivot, k)] = tmp;
            }
            x.swap(col, pivot);
        }
        let p = m[(col, col)];
        for row in (col + 1)..n {
            let f = m[(row, col)] / p;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let v = m[(col, k)];
                m[(row, k)] -= f * v;
            }
            let xv = x[col];
            x[row] -= f * xv;
        }
    }
    for row in (0..n).rev() {
        let mut acc = x[row];
        for k in (row + 1)..n {
            acc -= m[(row, k)] * x[k];
        }
        x[row] = acc / m[(row, row)];
    }
    Ok(x)
}
