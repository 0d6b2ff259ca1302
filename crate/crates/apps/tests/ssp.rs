use rsplit::solvers::{continuation, ContinuationSchedule};
use rsplit::{Matrix, SolveOptions, Vector};
use rsplit_apps::ssp::*;

#[test]
fn relaxed_objective_vanishes_at_bellman_solution() {
    for seed in 0..3 {
        let inst = generate_ssp(12, 2, seed).unwrap();
        let x = value_iteration(&inst, 1e-14).unwrap();
        assert!(inst.bellman_residual(&x) <= 1e-12);
        let p = ssp_setup(&inst, 0.5).unwrap();
        let w = p.op().apply(&x).unwrap();
        assert!(p.objective(&w, &x).unwrap() <= 1e-10);
    }
}

#[test]
fn two_node_chain_by_hand() {
    // node 0 reaches the target for cost 3 via graph 1, or stays put half
    // the time for cost 1 via graph 2: x0 = 1 + x0 / 2, so x0 = 2
    let u1 = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 1.0]);
    let u2 = Matrix::from_row_slice(2, 2, &[0.5, 0.5, 0.0, 1.0]);
    let c1 = Matrix::from_row_slice(2, 2, &[0.0, 3.0, 0.0, 0.0]);
    let c2 = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]);
    let inst = SspInstance::new([u1, u2], [c1, c2], 1).unwrap();
    let vi = value_iteration(&inst, 1e-13).unwrap();
    assert!((vi[0] - 2.0).abs() < 1e-10 && vi[1] == 0.0);
    let p = ssp_setup(&inst, 1.0).unwrap();
    let sched = ContinuationSchedule::new(1.0, 0.1, 1e-4, SolveOptions::default().with_max_iter(2000).with_tol(1e-24)).unwrap();
    let c = continuation(&p, &sched, &Vector::zeros(4)).unwrap();
    let x = normalize_at_target(&c.x, &inst);
    assert!((&x - &vi).amax() <= 1e-6, "{x}");
    assert_eq!(extract_policy(&x, &inst), vec![2, 1]);
}

#[test]
fn identical_graphs_tie_to_first_action() {
    let inst = generate_ssp(6, 1, 2).unwrap();
    let same = SspInstance::new([inst.u[0].clone(), inst.u[0].clone()], [inst.c[0].clone(), inst.c[0].clone()], inst.target).unwrap();
    let x = value_iteration(&same, 1e-12).unwrap();
    assert!(extract_policy(&x, &same).iter().all(|&a| a == 1));
}
