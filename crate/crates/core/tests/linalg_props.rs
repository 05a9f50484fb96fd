use num_complex::Complex64;
use optoblock::linalg::{ComplexMatrix, OdeIntegrator, OdeOptions};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |v| {
        let data = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        ComplexMatrix::from_vec(rows, cols, data).unwrap()
    })
}

// Small integers keep every product exact, so associativity is bitwise.
fn integer_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-9i32..10, -9i32..10), rows * cols).prop_map(move |v| {
        let data = v.into_iter().map(|(re, im)| Complex64::new(re as f64, im as f64)).collect();
        ComplexMatrix::from_vec(rows, cols, data).unwrap()
    })
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n, n).prop_map(|m| {
        let h = m.add(&m.dagger()).unwrap();
        h.scale(Complex64::new(0.5, 0.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in integer_matrix(2, 3), b in integer_matrix(3, 2), c in integer_matrix(2, 2)) {
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn kron_is_associative_to_rounding(a in matrix(2, 2), b in matrix(3, 2), c in matrix(2, 3)) {
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        let diff = left.sub(&right).unwrap().max_abs();
        prop_assert!(diff <= 1e-15, "{}", diff);
    }

    #[test]
    fn trace_is_cyclic(a in matrix(5, 3), b in matrix(3, 5)) {
        let ab = a.matmul(&b).unwrap().trace().unwrap();
        let ba = b.matmul(&a).unwrap().trace().unwrap();
        prop_assert!((ab - ba).norm() < 1e-12, "{} vs {}", ab, ba);
    }

    #[test]
    fn anti_hermitian_flow_preserves_norm(
        h in hermitian(4),
        y0 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
        t in 0.1f64..10.0,
    ) {
        let y0: Vec<Complex64> = y0.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let n0 = y0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(n0 > 1e-3);
        let rel_tol = 1e-9;
        let minus_i = Complex64::new(0.0, -1.0);
        let ode = OdeIntegrator::new(OdeOptions::with_tolerances(rel_tol, 1e-14));
        let (y, _) = ode
            .integrate(
                |_, y, out| {
                    for r in 0..4 {
                        out[r] = minus_i * (0..4).map(|c| h[(r, c)] * y[c]).sum::<Complex64>();
                    }
                },
                &y0,
                t,
            )
            .unwrap();
        let n = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((n - n0).abs() <= 10.0 * rel_tol * n0, "{} -> {}", n0, n);
    }
}
