//! Solver for `A Y + Y A† = X` via a complex Schur factorization of `A`
//! (Bartels–Stewart). Used as the preconditioner of the Liouvillian
//! stationary solve: `A` carries the coherent and anti-commutator parts
//! and the solve is exact up to the jump terms.

use nalgebra::{DMatrix, Schur};

use super::{ComplexMatrix, LinalgError, C64};

#[derive(Clone, Debug)]
pub struct SchurSylvester {
    n: usize,
    q: ComplexMatrix,
    q_dag: ComplexMatrix,
    t: ComplexMatrix,
    guard: f64,
}

impl SchurSylvester {
    pub fn new(a: &ComplexMatrix) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare {
                op: "schur",
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let m = DMatrix::from_row_slice(n, n, a.as_slice());
        let schur = Schur::try_new(m, 1e-15, 10_000).ok_or(LinalgError::Singular("schur iteration did not converge"))?;
        let (q, t) = schur.unpack();
        let to_cm = |d: &DMatrix<C64>| ComplexMatrix::from_fn(n, n, |i, j| d[(i, j)]);
        let q = to_cm(&q);
        let mut t = to_cm(&t);
        // Discard round-off below the diagonal.
        for i in 0..n {
            for j in 0..i {
                t[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        let guard = 1e-13 * a.max_abs().max(1.0);
        Ok(Self {
            n,
            q_dag: q.dagger(),
            q,
            t,
            guard,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Schur vectors and triangular factor, `A = Q T Q†`.
    pub fn factors(&self) -> (&ComplexMatrix, &ComplexMatrix) {
        (&self.q, &self.t)
    }

    /// Writes the solution `Y` of `A Y + Y A† = X` (both row-major `n × n`).
    pub fn solve(&self, x: &[C64], out: &mut [C64]) {
        let n = self.n;
        let xm = ComplexMatrix::from_vec(n, n, x.to_vec()).expect("square input");
        let xt = self.q_dag.matmul(&xm).and_then(|m| m.matmul(&self.q)).expect("conforming");
        let t = &self.t;
        let mut y = ComplexMatrix::zeros(n, n);
        let mut row = vec![C64::new(0.0, 0.0); n];
        for i in (0..n).rev() {
            row.copy_from_slice(&xt.as_slice()[i * n..(i + 1) * n]);
            for k in (i + 1)..n {
                let tik = t[(i, k)];
                if tik == C64::new(0.0, 0.0) {
                    continue;
                }
                let yrow = &y.as_slice()[k * n..(k + 1) * n];
                for (r, yv) in row.iter_mut().zip(yrow) {
                    *r -= tik * yv;
                }
            }
            let tii = t[(i, i)];
            for j in (0..n).rev() {
                let mut acc = row[j];
                for k in (j + 1)..n {
                    acc -= y[(i, k)] * t[(j, k)].conj();
                }
                let mut den = tii + t[(j, j)].conj();
                if den.norm() < self.guard {
                    den = C64::new(self.guard, 0.0);
                }
                y[(i, j)] = acc / den;
            }
        }
        let back = self.q.matmul(&y).and_then(|m| m.matmul(&self.q_dag)).expect("conforming");
        out.copy_from_slice(back.as_slice());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schur_factors_reconstruct_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = ComplexMatrix::from_fn(12, 12, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let s = SchurSylvester::new(&a).unwrap();
        let (q, t) = s.factors();
        let rebuilt = q.matmul(t).unwrap().matmul(&q.dagger()).unwrap();
        assert!(rebuilt.sub(&a).unwrap().frobenius_norm() < 1e-11);
    }

    #[test]
    fn solves_lyapunov_type_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10;
        // Stable, non-normal A.
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            let base = C64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-2.0..2.0));
            if i == j {
                base - C64::new(1.5, 0.0)
            } else {
                base * 0.3
            }
        });
        let x = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let s = SchurSylvester::new(&a).unwrap();
        let mut y = vec![C64::new(0.0, 0.0); n * n];
        s.solve(x.as_slice(), &mut y);
        let y = ComplexMatrix::from_vec(n, n, y).unwrap();
        let lhs = a.matmul(&y).unwrap().add(&y.matmul(&a.dagger()).unwrap()).unwrap();
        assert!(lhs.sub(&x).unwrap().frobenius_norm() < 1e-10);
    }
}
