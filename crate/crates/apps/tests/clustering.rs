use proptest::prelude::*;
use rsplit::solvers::rs_pgd;
use rsplit::SolveOptions;
use rsplit_apps::clustering::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn run_strictly_descends_from_data(seed in any::<u64>(), lambda in 0.05f64..2.0, scad in any::<bool>()) {
        let pc = planted_clusters(3, 4, 2, 5.0, 1.0, seed).unwrap();
        let fusion = if scad { Fusion::Scad { kappa: pc.packing_radius() } } else { Fusion::Convex };
        let p = clustering_setup(&pc.points, lambda, 1.0, fusion).unwrap();
        let w0 = initial_w(&p).unwrap();
        let u = flatten_points(&pc.points);
        let start = p.objective(&w0, &u).unwrap();
        let r = rs_pgd(&p, &w0, &SolveOptions::default().with_max_iter(50)).unwrap();
        prop_assert!(r.summary.final_objective < start);
    }
}

#[test]
fn planted_partition_recovered_across_seeds() {
    for seed in 0..5 {
        let pc = planted_clusters(3, 10, 2, 30.0, 1.0, seed).unwrap();
        let p = clustering_setup(&pc.points, 0.5, 1.0, Fusion::Convex).unwrap();
        let r = rs_pgd(&p, &initial_w(&p).unwrap(), &SolveOptions::default().with_max_iter(5000).with_tol(1e-16)).unwrap();
        let labels = clusters_from_w(&r.w, 30, 2, 1e-3).unwrap();
        assert_eq!(canonical_labels(&labels), canonical_labels(&pc.labels), "seed {seed}");
        let adj = adjacency(&labels);
        assert_eq!(adj.sum(), 3.0 * 100.0);
    }
}
