use proptest::prelude::*;
use stratdeploy::generators::{random_graph, random_tree};
use stratdeploy::graph_solver::{dfs_baseline, minimum_spanning_tree, solve_mst_approx};
use stratdeploy::instance::rename;
use stratdeploy::oracle::{exact_min_agents, exact_schedule};
use stratdeploy::schedule::{count_agents, replay_fixed, verify_coverage};
use stratdeploy::tree_solver::{return_count, solve_noreturn, solve_return, SolveOptions};
use stratdeploy::{Instance, Schedule, TreeInstance, Variant, VertexId};

fn both(tree: &TreeInstance) -> (TreeInstance, TreeInstance) {
    (
        tree.clone().with_variant(Variant::NoReturn),
        tree.clone().with_variant(Variant::Return),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_loop_and_bounds(n in 1usize..80, seed in any::<u64>(), wmax in 0u64..15) {
        let (nr, rt) = both(&random_tree(n, seed, wmax));
        let a = solve_noreturn(&nr);
        let b = solve_return(&rt);
        for (t, sol) in [(&nr, &a), (&rt, &b)] {
            let walk = sol.schedule.as_ref().unwrap();
            prop_assert_eq!(count_agents(t.instance(), walk).unwrap().total, sol.total);
            prop_assert!(verify_coverage(t.instance(), walk).unwrap().accepted(t.instance().variant()));
            prop_assert_eq!(walk.end(), &sol.end_vertex);
            let bounds = t.instance().trivial_bounds();
            prop_assert!(bounds.lower <= sol.total && sol.total <= bounds.upper);
            prop_assert!(replay_fixed(t.instance(), walk, sol.total).unwrap().feasible);
        }
        prop_assert!(a.total <= b.total);
        prop_assert_eq!(a.visit_order.len(), nr.leaves().count());
    }

    #[test]
    fn totals_do_not_need_the_schedule(n in 1usize..80, seed in any::<u64>()) {
        let (nr, rt) = both(&random_tree(n, seed, 9));
        let lite = SolveOptions { emit_schedule: false };
        let a = stratdeploy::tree_solver::solve_noreturn_with(&nr, lite);
        prop_assert!(a.schedule.is_none());
        prop_assert_eq!(a.total, solve_noreturn(&nr).total);
        prop_assert_eq!(stratdeploy::tree_solver::solve_return_with(&rt, lite).total, solve_return(&rt).total);
    }

    #[test]
    fn integer_scaling(n in 1usize..60, seed in any::<u64>(), c in 1u64..6) {
        let (nr, rt) = both(&random_tree(n, seed, 9));
        let scale = |t: &TreeInstance| {
            stratdeploy::instance::as_tree(t.instance().map_weights(|v| v.weight * c, |e| e.weight * c).unwrap()).unwrap()
        };
        prop_assert_eq!(solve_noreturn(&scale(&nr)).total, c * solve_noreturn(&nr).total);
        let count = return_count(&rt);
        if count.steps.last().is_some_and(|s| s.curr > 0) {
            prop_assert_eq!(solve_return(&scale(&rt)).total, c * count.total);
        }
    }

    #[test]
    fn identifiers_do_not_matter(n in 1usize..40, seed in any::<u64>()) {
        let (nr, rt) = both(&random_tree(n, seed, 9));
        for t in [nr, rt] {
            let renamed: Instance = rename(
                t.instance(),
                |v| VertexId::new(format!("z{}", v.as_str().chars().rev().collect::<String>())),
                |e| format!("x{}", e.as_str()).into(),
            ).unwrap();
            let r = stratdeploy::instance::as_tree(renamed).unwrap();
            let f = |t: &TreeInstance| match t.instance().variant() {
                Variant::Return => solve_return(t).total,
                Variant::NoReturn => solve_noreturn(t).total,
            };
            prop_assert_eq!(f(&t), f(&r));
        }
    }

    #[test]
    fn replay_threshold_is_the_count(n in 1usize..12, seed in any::<u64>(), variant_return in any::<bool>()) {
        let variant = if variant_return { Variant::Return } else { Variant::NoReturn };
        let g: Instance = random_graph(n, 0.3, seed, 7).with_variant(variant);
        let walk = dfs_baseline(&g).schedule.unwrap();
        let count = count_agents(&g, &walk).unwrap();
        prop_assert!(count.total <= g.trivial_bounds().upper);
        prop_assert!(replay_fixed(&g, &walk, count.total).unwrap().feasible);
        if count.total > 0 {
            prop_assert!(!replay_fixed(&g, &walk, count.total - 1).unwrap().feasible);
        }
        prop_assert_eq!(Schedule::from_json(&walk.to_json()).unwrap(), walk);
    }

    #[test]
    fn instance_json_round_trip(n in 1usize..30, seed in any::<u64>()) {
        let g: Instance = random_graph(n, 0.2, seed, 50);
        prop_assert_eq!(Instance::from_json(&g.to_json()).unwrap(), g);
    }
}

fn spanning_weight_brute_force(g: &Instance) -> u64 {
    let m = g.edge_count();
    let n = g.vertex_count();
    let mut best = u64::MAX;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize + 1 != n {
            continue;
        }
        let keep: Vec<usize> = (0..m).filter(|&e| mask & (1 << e) != 0).collect();
        if let Ok(sub) = g.restrict_edges(&keep) {
            best = best.min(sub.edges().iter().map(|e| e.weight).sum());
        }
    }
    best
}

#[test]
fn mst_weight_is_minimal() {
    let mut checked = 0;
    for seed in 0..300 {
        let n = 2 + (seed % 7) as usize;
        let g: Instance = random_graph(n, 0.35, seed, 9);
        if g.edge_count() > 14 {
            continue;
        }
        let mst = minimum_spanning_tree(&g).unwrap();
        let w: u64 = mst.instance().edges().iter().map(|e| e.weight).sum();
        assert_eq!(w, spanning_weight_brute_force(&g), "seed {seed}");
        checked += 1;
    }
    assert!(checked > 200);
}

#[test]
fn mst_approx_is_exact_on_trees() {
    for seed in 0..100 {
        let t: TreeInstance = random_tree(1 + (seed % 30) as usize, seed, 9);
        let approx = solve_mst_approx(t.instance()).unwrap();
        assert_eq!(approx.solution.total, solve_noreturn(&t).total);
        assert!(approx.ratio_certificate <= 2.0);
    }
}

#[test]
fn oracle_witnesses_are_tight() {
    for seed in 0..150 {
        let n = 1 + (seed % 9) as usize;
        for variant in [Variant::NoReturn, Variant::Return] {
            let g: Instance = random_graph(n, 0.3, seed, 6).with_variant(variant);
            let opt = exact_min_agents(&g).unwrap();
            let walk = exact_schedule(&g, opt)
                .unwrap()
                .expect("optimum is feasible");
            assert!(replay_fixed(&g, &walk, opt).unwrap().feasible);
            assert!(verify_coverage(&g, &walk).unwrap().accepted(variant));
            assert!(count_agents(&g, &walk).unwrap().total <= opt);
            if opt > 0 {
                assert!(
                    exact_schedule(&g, opt - 1).unwrap().is_none(),
                    "seed {seed} {variant}"
                );
            }
        }
    }
}
