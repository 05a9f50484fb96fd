use num_complex::Complex64;

use super::TruncationSpec;
use crate::linalg::ComplexMatrix;

/// Truncated annihilation operator on `0..=n_max`: `a|n⟩ = √n |n−1⟩`.
pub fn build_annihilation(n_max: usize) -> ComplexMatrix {
    let d = n_max + 1;
    let mut a = ComplexMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Mode operators embedded in cavity1 ⊗ cavity2 ⊗ mechanics.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub a1: ComplexMatrix,
    pub a2: ComplexMatrix,
    pub b: ComplexMatrix,
    pub identity: ComplexMatrix,
    pub dims: TruncationSpec,
}

impl OperatorSet {
    pub fn new(dims: TruncationSpec) -> Self {
        let [d1, d2, dm] = dims.dims();
        let (i1, i2, im) = (
            ComplexMatrix::identity(d1),
            ComplexMatrix::identity(d2),
            ComplexMatrix::identity(dm),
        );
        let a1 = build_annihilation(dims.n1_max).kron(&i2).kron(&im);
        let a2 = i1.kron(&build_annihilation(dims.n2_max)).kron(&im);
        let b = i1.kron(&i2).kron(&build_annihilation(dims.nm_max));
        Self {
            a1,
            a2,
            b,
            identity: ComplexMatrix::identity(dims.dimension()),
            dims,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dims.dimension()
    }

    /// Diagonal of a function of the occupation numbers, as a vector.
    pub fn occupation_diagonal(&self, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
        (0..self.dimension())
            .map(|i| {
                let (n1, n2, nm) = self.dims.occupations(i);
                f(n1 as f64, n2 as f64, nm as f64)
            })
            .collect()
    }
}

pub fn build_operator_set(trunc: TruncationSpec) -> OperatorSet {
    OperatorSet::new(trunc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn small_annihilators() {
        assert_eq!(
            build_annihilation(1),
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])
        );
        let a = build_annihilation(2);
        assert_eq!(a[(0, 1)], c(1.0));
        assert_eq!(a[(1, 2)], c(2f64.sqrt()));
        assert_eq!(a[(0, 2)], c(0.0));
    }

    #[test]
    fn number_operator_diagonal() {
        let a = build_annihilation(5);
        let n = a.dagger().matmul(&a).unwrap();
        for k in 0..6 {
            assert!((n[(k, k)] - c(k as f64)).norm() < 1e-15);
        }
    }

    #[test]
    fn commutator_is_identity_except_top_level() {
        let a = build_annihilation(4);
        let comm = a.commutator(&a.dagger()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i != j {
                    0.0
                } else if i == 4 {
                    -4.0
                } else {
                    1.0
                };
                assert!((comm[(i, j)] - c(expect)).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn embedded_modes_commute_exactly() {
        let ops = OperatorSet::new(TruncationSpec::new(2, 3, 2));
        assert_eq!(ops.dimension(), 3 * 4 * 3);
        let pairs = [(&ops.a1, &ops.a2), (&ops.a1, &ops.b), (&ops.a2, &ops.b)];
        for (x, y) in pairs {
            assert_eq!(x.matmul(y).unwrap(), y.matmul(x).unwrap());
            assert_eq!(x.matmul(&y.dagger()).unwrap(), y.dagger().matmul(x).unwrap());
        }
    }

    #[test]
    fn fock_action_on_embedded_cavity_one() {
        let dims = TruncationSpec::default();
        let ops = OperatorSet::new(dims);
        let bra = dims.index(1, 0, 0);
        let ket = dims.index(2, 0, 0);
        assert!((ops.a1[(bra, ket)] - c(2f64.sqrt())).norm() < 1e-15);
    }
}
