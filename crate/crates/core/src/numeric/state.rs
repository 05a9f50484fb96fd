use num_complex::Complex64;

use crate::linalg::ComplexMatrix;
use crate::model::TruncationSpec;

/// Density operator on the truncated cavity1 ⊗ cavity2 ⊗ mechanics space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub matrix: ComplexMatrix,
    pub dims: TruncationSpec,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: TruncationSpec) -> Self {
        assert_eq!(matrix.shape(), (dims.dimension(), dims.dimension()), "density matrix shape");
        Self { matrix, dims }
    }

    pub fn vacuum(dims: TruncationSpec) -> Self {
        Self::fock(dims, 0, 0, 0)
    }

    /// Projector onto `|n1, n2, nm⟩`.
    pub fn fock(dims: TruncationSpec, n1: usize, n2: usize, nm: usize) -> Self {
        let n = dims.dimension();
        let mut m = ComplexMatrix::zeros(n, n);
        let k = dims.index(n1, n2, nm);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self { matrix: m, dims }
    }

    /// Coherent state `|α⟩` in cavity 1 (renormalized after truncation),
    /// vacuum elsewhere.
    pub fn coherent_cavity1(dims: TruncationSpec, alpha: Complex64) -> Self {
        let d1 = dims.n1_max + 1;
        let mut amp = vec![Complex64::new(0.0, 0.0); d1];
        let mut term = Complex64::new(1.0, 0.0);
        for (k, a) in amp.iter_mut().enumerate() {
            if k > 0 {
                term *= alpha / (k as f64).sqrt();
            }
            *a = term;
        }
        let norm = amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let n = dims.dimension();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, ai) in amp.iter().enumerate() {
            for (j, aj) in amp.iter().enumerate() {
                m[(dims.index(i, 0, 0), dims.index(j, 0, 0))] = ai * aj.conj() / (norm * norm);
            }
        }
        Self { matrix: m, dims }
    }

    pub fn dimension(&self) -> usize {
        self.dims.dimension()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dimension()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// Lower bound on the smallest eigenvalue from Gershgorin discs of the
    /// Hermitian part. Negative values flag a state that is not positive.
    pub fn min_eig_bound(&self) -> f64 {
        let n = self.dimension();
        (0..n)
            .map(|i| {
                let off: f64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (0.5 * (self.matrix[(i, j)] + self.matrix[(j, i)].conj())).norm())
                    .sum();
                self.matrix[(i, i)].re - off
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Mean occupations `(⟨n₁⟩, ⟨n₂⟩, ⟨n_m⟩)` from the diagonal.
    pub fn occupations(&self) -> (f64, f64, f64) {
        let mut acc = (0.0, 0.0, 0.0);
        for i in 0..self.dimension() {
            let (a, b, c) = self.dims.occupations(i);
            let p = self.matrix[(i, i)].re;
            acc.0 += a as f64 * p;
            acc.1 += b as f64 * p;
            acc.2 += c as f64 * p;
        }
        acc
    }

    /// Population of the highest Fock level of each mode; a truncation
    /// diagnostic.
    pub fn top_level_populations(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        let maxes = [self.dims.n1_max, self.dims.n2_max, self.dims.nm_max];
        for i in 0..self.dimension() {
            let (a, b, c) = self.dims.occupations(i);
            let p = self.matrix[(i, i)].re;
            for (k, n) in [a, b, c].into_iter().enumerate() {
                if n == maxes[k] {
                    out[k] += p;
                }
            }
        }
        out
    }

    /// Partial trace down to cavity 1.
    pub fn cavity1_reduced(&self) -> ComplexMatrix {
        let d1 = self.dims.n1_max + 1;
        let d2 = self.dims.n2_max + 1;
        let dm = self.dims.nm_max + 1;
        ComplexMatrix::from_fn(d1, d1, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d2 {
                for m in 0..dm {
                    acc += self.matrix[(self.dims.index(i, k, m), self.dims.index(j, k, m))];
                }
            }
            acc
        })
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_and_fock() {
        let dims = TruncationSpec::default();
        let v = DensityMatrix::vacuum(dims);
        assert_eq!(v.trace(), Complex64::new(1.0, 0.0));
        assert_eq!(v.occupations(), (0.0, 0.0, 0.0));
        let f = DensityMatrix::fock(dims, 2, 1, 3);
        assert_eq!(f.occupations(), (2.0, 1.0, 3.0));
        assert_eq!(f.min_eig_bound(), 0.0);
    }

    #[test]
    fn coherent_state_is_normalized_and_pure() {
        let dims = TruncationSpec::new(5, 2, 2);
        let rho = DensityMatrix::coherent_cavity1(dims, Complex64::new(0.2, 0.1));
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        let r = rho.cavity1_reduced();
        let r2 = r.matmul(&r).unwrap();
        assert!(r2.sub(&r).unwrap().frobenius_norm() < 1e-14);
        assert!((rho.occupations().0 - 0.05).abs() < 1e-6);
    }
}
