use super::*;
use crate::algebra::membership;
use crate::numerics::random::{random_hermitian, seeded};
use crate::numerics::{CMatrix, C64};

#[test]
fn equal_hamiltonians_are_transparent() {
    let mut rng = seeded(1);
    let h = random_hermitian(2, &mut rng);
    let spec = ErrorTransparentSpec {
        d_a: 3,
        d_b: 2,
        hamiltonians: vec![h.clone(); 3],
        rates: vec![0.1; 2],
        gate_time: 1.0,
    };
    for v in et_condition_check(&spec, 1e-12).unwrap() {
        assert!(v.transparent);
        assert!(v.lambda.abs() < 1e-15);
    }
}

#[test]
fn shifted_hamiltonian_gives_lambda() {
    let mut rng = seeded(2);
    let h = random_hermitian(3, &mut rng);
    let lambda = 0.37;
    let spec = ErrorTransparentSpec {
        d_a: 2,
        d_b: 3,
        hamiltonians: vec![h.clone(), &h - &CMatrix::identity(3).scale_real(lambda)],
        rates: vec![0.1],
        gate_time: 1.0,
    };
    let v = &et_condition_check(&spec, 1e-12).unwrap()[0];
    assert!(v.transparent);
    assert!((v.lambda - lambda).abs() < 1e-14);
}

#[test]
fn detuned_level_is_not_transparent() {
    let chi = 0.8;
    let spec = ErrorTransparentSpec::broken_example(chi, 0.02);
    let v = et_condition_check(&spec, 1e-10).unwrap();
    assert!(v[0].transparent);
    assert!(!v[1].transparent);
    assert!((v[1].residual - chi / 2f64.sqrt()).abs() < 1e-14);
}

#[test]
fn nas_partitions() {
    let spec = SnapSpec::default_for(4, 2);
    let mut hs = vec![spec.h2.clone(); 4];
    hs[0] = spec.h1.clone();
    assert_eq!(nas_check(&hs, 1e-10), vec![vec![0], vec![1, 2, 3]]);
    let same = vec![spec.h1.clone(); 3];
    assert_eq!(nas_check(&same, 1e-10), vec![vec![0, 1, 2]]);
    let distinct: Vec<CMatrix> = (0..3)
        .map(|k| CMatrix::diag(&[C64::new(0.0, 0.0), C64::new(k as f64, 0.0)]))
        .collect();
    assert_eq!(nas_check(&distinct, 1e-10), vec![vec![0], vec![1], vec![2]]);
}

#[test]
fn snap_dephasing_only_members() {
    let mut spec = SnapSpec::default_for(4, 2);
    spec.relaxation = vec![0.0; 3];
    let sm = snap_model(&spec).unwrap();
    assert!(membership(sm.model.hamiltonian(), &sm.graph).unwrap().residual < 1e-12);
    for j in sm.model.jumps() {
        assert!(membership(&j.operator, &sm.graph).unwrap().residual < 1e-12);
    }
    let closure = sm.graph.closure_check();
    assert!(closure.closed && closure.self_adjoint);
}

#[test]
fn snap_upper_relaxation_members_lower_not() {
    let sm = snap_model(&SnapSpec::default_for(4, 2)).unwrap();
    let framed: Vec<_> = sm.model.jumps().iter().filter(|j| j.is_time_dependent()).collect();
    assert_eq!(framed.len(), 1);
    for j in sm.model.jumps().iter().filter(|j| !j.is_time_dependent()) {
        assert!(membership(&j.operator, &sm.graph).unwrap().residual < 1e-12);
    }
    let k = framed[0].operator_at(0.9).unwrap();
    assert!(membership(&k, &sm.graph).unwrap().residual > 1e-3);
}

#[test]
fn snap_rejects_single_level_ancilla() {
    let mut spec = SnapSpec::default_for(2, 2);
    spec.d_a = 1;
    assert!(snap_model(&spec).is_err());
}
