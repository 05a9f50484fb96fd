//! Restarted GMRES with right preconditioning.

use super::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct GmresOptions {
    /// Stop when `‖b − A x‖ ≤ rel_tol · ‖b‖`.
    pub rel_tol: f64,
    pub restart: usize,
    pub max_iterations: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            restart: 60,
            max_iterations: 600,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub x: Vec<C64>,
    /// True relative residual `‖b − A x‖ / ‖b‖` of the returned iterate.
    pub relative_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(u: &[C64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Solves `A x = b` where `apply_a(v, out)` writes `A v` and
/// `apply_prec(v, out)` writes `M v` with `M ≈ A⁻¹`.
pub fn gmres<A, P>(mut apply_a: A, mut apply_prec: P, b: &[C64], x0: Option<&[C64]>, opts: &GmresOptions) -> GmresOutcome
where
    A: FnMut(&[C64], &mut [C64]),
    P: FnMut(&[C64], &mut [C64]),
{
    let n = b.len();
    let zero = C64::new(0.0, 0.0);
    let mut x = x0.map_or_else(|| vec![zero; n], <[C64]>::to_vec);
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return GmresOutcome {
            x: vec![zero; n],
            relative_residual: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let m = opts.restart.max(1);
    let mut work = vec![zero; n];
    let mut z = vec![zero; n];
    let mut r = vec![zero; n];
    let mut iterations = 0;

    let residual = |x: &[C64], r: &mut [C64], work: &mut [C64], apply_a: &mut A| {
        apply_a(x, work);
        for i in 0..n {
            r[i] = b[i] - work[i];
        }
        norm(r)
    };

    let mut r_norm = residual(&x, &mut r, &mut work, &mut apply_a);
    while r_norm > opts.rel_tol * b_norm && iterations < opts.max_iterations {
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / r_norm).collect());
        let mut hess = vec![vec![zero; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![zero; m];
        let mut g = vec![zero; m + 1];
        g[0] = C64::new(r_norm, 0.0);
        let mut k = 0;
        while k < m && iterations < opts.max_iterations {
            apply_prec(&basis[k], &mut z);
            let mut w = vec![zero; n];
            apply_a(&z, &mut w);
            for (i, v) in basis.iter().enumerate() {
                let h = dot(v, &w);
                hess[i][k] = h;
                for (wj, vj) in w.iter_mut().zip(v) {
                    *wj -= h * vj;
                }
            }
            let h_next = norm(&w);
            hess[k + 1][k] = C64::new(h_next, 0.0);
            for i in 0..k {
                let (a, bb) = (hess[i][k], hess[i + 1][k]);
                hess[i][k] = cs[i] * a + sn[i] * bb;
                hess[i + 1][k] = -sn[i].conj() * a + cs[i] * bb;
            }
            let (a, bb) = (hess[k][k], hess[k + 1][k]);
            let rr = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if rr == 0.0 {
                cs[k] = 1.0;
                sn[k] = zero;
            } else if a.norm() == 0.0 {
                cs[k] = 0.0;
                sn[k] = bb.conj() / rr;
            } else {
                cs[k] = a.norm() / rr;
                sn[k] = (a / a.norm()) * bb.conj() / rr;
            }
            hess[k][k] = cs[k] * a + sn[k] * bb;
            hess[k + 1][k] = zero;
            g[k + 1] = -sn[k].conj() * g[k];
            g[k] *= cs[k];
            iterations += 1;
            k += 1;
            let breakdown = h_next <= 1e-300;
            if !breakdown {
                basis.push(w.iter().map(|v| v / h_next).collect());
            }
            if g[k].norm() <= opts.rel_tol * b_norm || breakdown {
                break;
            }
        }
        // Back-substitute the k×k triangular system.
        let mut y = vec![zero; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in (i + 1)..k {
                acc -= hess[i][j] * y[j];
            }
            y[i] = if hess[i][i].norm() > 0.0 { acc / hess[i][i] } else { zero };
        }
        let mut update = vec![zero; n];
        for (yi, v) in y.iter().zip(&basis) {
            for (u, vj) in update.iter_mut().zip(v) {
                *u += yi * vj;
            }
        }
        apply_prec(&update, &mut z);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
        let prev = r_norm;
        r_norm = residual(&x, &mut r, &mut work, &mut apply_a);
        if k == 0 || (r_norm >= prev && iterations >= opts.max_iterations) {
            break;
        }
    }
    GmresOutcome {
        relative_residual: r_norm / b_norm,
        converged: r_norm <= opts.rel_tol * b_norm,
        x,
        iterations,
    }
}
