use num_complex::Complex64;

use super::{build_annihilation, OperatorSet, SystemParams};
use crate::linalg::ComplexMatrix;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.matmul(b).expect("operators share one space")
}

fn acc(target: &mut ComplexMatrix, coef: Complex64, term: &ComplexMatrix) {
    target.axpy(coef, term).expect("operators share one space");
}

/// Rotating-frame Hamiltonian
/// `H1 = Δ₁a₁†a₁ + Δ₂a₂†a₂ + ω_m b†b + J(a₁†a₂ + a₁a₂†) − g a₁†a₁(b† + b) + E a₁† + E* a₁`.
pub fn build_h1(p: &SystemParams, ops: &OperatorSet) -> ComplexMatrix {
    let (a1, a2, b) = (&ops.a1, &ops.a2, &ops.b);
    let (a1d, a2d, bd) = (a1.dagger(), a2.dagger(), b.dagger());
    let n1 = mul(&a1d, a1);
    let n2 = mul(&a2d, a2);
    let nb = mul(&bd, b);
    let hop = mul(&a1d, a2).add(&mul(a1, &a2d)).expect("same space");
    let position = bd.add(b).expect("same space");

    let mut h = ComplexMatrix::zeros(ops.dimension(), ops.dimension());
    acc(&mut h, c(p.delta1), &n1);
    acc(&mut h, c(p.delta2), &n2);
    acc(&mut h, c(p.omega_m), &nb);
    acc(&mut h, c(p.tunneling), &hop);
    acc(&mut h, c(-p.g), &mul(&n1, &position));
    acc(&mut h, p.drive, &a1d);
    acc(&mut h, p.drive.conj(), a1);
    h
}

/// Which two-mode reduced model to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReducedVariant {
    /// Kerr-type optical model with the mechanics eliminated.
    Hermitian,
    /// Same, plus `−iκ₁/2 a₁†a₁ + iκ₂/2 a₂†a₂`.
    NonHermitian,
}

/// Reduced optical Hamiltonian on cavity1 ⊗ cavity2 with cutoffs
/// `n1_max`, `n2_max`:
/// `Δ₁n₁ + Δ₂n₂ − (g²/ω_m) n₁² + J(a₁†a₂ + a₁a₂†) + E a₁† + E* a₁`,
/// with the imaginary decay/gain terms added for
/// [`ReducedVariant::NonHermitian`].
pub fn build_h_reduced(p: &SystemParams, n1_max: usize, n2_max: usize, variant: ReducedVariant) -> ComplexMatrix {
    let (i1, i2) = (ComplexMatrix::identity(n1_max + 1), ComplexMatrix::identity(n2_max + 1));
    let a1 = build_annihilation(n1_max).kron(&i2);
    let a2 = i1.kron(&build_annihilation(n2_max));
    let (a1d, a2d) = (a1.dagger(), a2.dagger());
    let n1 = mul(&a1d, &a1);
    let n2 = mul(&a2d, &a2);
    let (d1, d2) = match variant {
        ReducedVariant::Hermitian => (c(p.delta1), c(p.delta2)),
        ReducedVariant::NonHermitian => (
            Complex64::new(p.delta1, -p.kappa1 / 2.0),
            Complex64::new(p.delta2, p.kappa2 / 2.0),
        ),
    };
    let dim = (n1_max + 1) * (n2_max + 1);
    let mut h = ComplexMatrix::zeros(dim, dim);
    acc(&mut h, d1, &n1);
    acc(&mut h, d2, &n2);
    acc(&mut h, c(-p.kerr()), &mul(&n1, &n1));
    acc(&mut h, c(p.tunneling), &mul(&a1d, &a2));
    acc(&mut h, c(p.tunneling), &mul(&a1, &a2d));
    acc(&mut h, p.drive, &a1d);
    acc(&mut h, p.drive.conj(), &a1);
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TruncationSpec;

    fn params() -> SystemParams {
        let mut p = SystemParams::reference().with_detuning(0.02);
        p.drive = Complex64::new(0.01, 0.004);
        p
    }

    #[test]
    fn h1_is_hermitian() {
        let ops = OperatorSet::new(TruncationSpec::default());
        let h = build_h1(&params(), &ops);
        assert!(h.sub(&h.dagger()).unwrap().frobenius_norm() <= 1e-13);
    }

    #[test]
    fn h1_uncoupled_is_diagonal_in_fock_basis() {
        let dims = TruncationSpec::new(2, 3, 2);
        let ops = OperatorSet::new(dims);
        let mut p = params();
        p.g = 0.0;
        p.drive = Complex64::new(0.0, 0.0);
        p.tunneling = 0.0;
        p.delta2 = -0.7;
        let h = build_h1(&p, &ops);
        for i in 0..dims.dimension() {
            for j in 0..dims.dimension() {
                let (n1, n2, nm) = dims.occupations(i);
                let expect = if i == j {
                    p.delta1 * n1 as f64 + p.delta2 * n2 as f64 + p.omega_m * nm as f64
                } else {
                    0.0
                };
                assert!((h[(i, j)] - c(expect)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn h1_optomechanical_matrix_element() {
        let dims = TruncationSpec::default();
        let ops = OperatorSet::new(dims);
        let p = params();
        let h = build_h1(&p, &ops);
        let v = h[(dims.index(1, 0, 1), dims.index(1, 0, 0))];
        assert!((v - c(-p.g)).norm() < 1e-14);
    }

    #[test]
    fn h1_only_connects_neighbouring_occupations() {
        let dims = TruncationSpec::default();
        let ops = OperatorSet::new(dims);
        let h = build_h1(&params(), &ops);
        for i in 0..dims.dimension() {
            for j in 0..dims.dimension() {
                let (a, b, m) = dims.occupations(i);
                let (x, y, z) = dims.occupations(j);
                let diffs = [a.abs_diff(x), b.abs_diff(y), m.abs_diff(z)];
                let changed = diffs.iter().filter(|&&d| d > 0).count();
                if diffs.iter().any(|&d| d > 1) || changed > 2 {
                    assert_eq!(h[(i, j)], c(0.0), "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn reduced_models() {
        let p = params();
        let h4 = build_h_reduced(&p, 2, 2, ReducedVariant::Hermitian);
        assert_eq!(h4.hermiticity_defect(), 0.0);

        let h = build_h_reduced(&p, 2, 2, ReducedVariant::NonHermitian);
        let idx = |n1: usize, n2: usize| n1 * 3 + n2;
        let expect = Complex64::new(2.0 * p.delta1 - 4.0 * p.kerr(), -p.kappa1);
        assert!((h[(idx(2, 0), idx(2, 0))] - expect).norm() < 1e-14);
        assert!((h[(idx(1, 1), idx(0, 2))] - c(2f64.sqrt() * p.tunneling)).norm() < 1e-14);
    }
}
