use lebesgue_core::{
    decompose, eval, functional_decompose, gns, is_absolutely_continuous, is_singular, parallel_sum,
    Functional, Method, PsdMatrix, StarAlgebra, Tolerances,
};

fn diag(values: &[f64]) -> PsdMatrix {
    PsdMatrix::from_diagonal(values).unwrap()
}

#[test]
fn operator_workflow() {
    let tol = Tolerances::default();
    let a = diag(&[2.0, 0.0]);
    let b = PsdMatrix::from_real(2, &[3.0, 1.0, 1.0, 5.0], &tol).unwrap();
    let s = parallel_sum(&a, &b, &tol).unwrap();
    assert!(s.trace() > 0.0 && s.trace() <= a.trace());

    let reference = decompose(&a, &b, Method::Direct, &tol).unwrap();
    for method in Method::ALL {
        let d = decompose(&a, &b, method, &tol).unwrap();
        assert!(d.converged, "{method}");
        let sum = d.ac.matrix() + d.sing.matrix() - b.matrix();
        assert!(sum.norm() < 1e-9, "{method}");
        assert!((d.ac.matrix() - reference.ac.matrix()).norm() < 1e-6, "{method}");
        assert!(is_singular(&a, &d.sing, &tol).unwrap(), "{method}");
        assert!(is_absolutely_continuous(&d.ac, &a, &tol).unwrap(), "{method}");
    }
}

#[test]
fn functional_workflow() {
    let tol = Tolerances::default();
    let alg = StarAlgebra::new(vec![2, 1]).unwrap();
    let w = Functional::new(alg.clone(), vec![diag(&[1.0, 2.0]), diag(&[3.0])]).unwrap();
    let v = Functional::new(alg.clone(), vec![diag(&[1.0, 0.0]), diag(&[0.0])]).unwrap();

    let total = eval(&w, &alg.unit()).unwrap();
    assert!((total.re - 6.0).abs() < 1e-12 && total.im.abs() < 1e-12);

    let d = functional_decompose(&w, &v, Method::Direct, &tol).unwrap();
    let ac = eval(&d.ac, &alg.unit()).unwrap().re;
    let sing = eval(&d.sing, &alg.unit()).unwrap().re;
    assert!((ac - 1.0).abs() < 1e-9);
    assert!((sing - 5.0).abs() < 1e-9);

    let g = gns(&w, &tol).unwrap();
    for (block, k, l) in alg.matrix_unit_indices() {
        let e = alg.matrix_unit(block, k, l);
        let lhs = g.vector_state(&e).unwrap();
        let rhs = eval(&w, &e).unwrap();
        assert!((lhs - rhs).norm() < 1e-9);
    }
}
