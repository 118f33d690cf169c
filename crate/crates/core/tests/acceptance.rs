//! Acceptance suite. Runs every criterion and prints one line per criterion.
//! Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use stratdeploy::decomposition::{recursive_decomposition, top_decomposition};
use stratdeploy::generators::{
    figure1_instance, figure2_input, figure2_no_cover_input, figure4_instance, random_graph,
    random_tree, star_instance, xc3_reduction, xc3_threshold, zigzag_instance,
};
use stratdeploy::graph_solver::solve_mst_approx;
use stratdeploy::oracle::exact_min_agents;
use stratdeploy::schedule::{count_agents, verify_coverage};
use stratdeploy::tree_solver::{
    noreturn_total, return_count, return_total, solve_noreturn, solve_noreturn_with, solve_return,
    solve_return_with, SolveOptions,
};
use stratdeploy::{Instance, Schedule, Solution, TreeInstance, Variant};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Bound and closed-loop audit shared by all suites (criteria 7 and 8).
#[derive(Default)]
struct Audit {
    solutions: usize,
    bound_violations: Vec<String>,
    loop_mismatches: Vec<String>,
}

impl Audit {
    fn solution(&mut self, label: &str, instance: &Instance, sol: &Solution) {
        self.solutions += 1;
        let b = instance.trivial_bounds();
        if sol.total < b.lower || sol.total > b.upper {
            self.bound_violations.push(format!(
                "{label}: {} outside [{}, {}]",
                sol.total, b.lower, b.upper
            ));
        }
        let Some(walk) = &sol.schedule else {
            self.loop_mismatches.push(format!("{label}: no schedule"));
            return;
        };
        match count_agents(instance, walk) {
            Ok(c) if c.total == sol.total => {}
            Ok(c) => self.loop_mismatches.push(format!(
                "{label}: counted {} vs reported {}",
                c.total, sol.total
            )),
            Err(e) => self.loop_mismatches.push(format!("{label}: {e}")),
        }
        if !verify_coverage(instance, walk).is_ok_and(|r| r.accepted(instance.variant())) {
            self.loop_mismatches
                .push(format!("{label}: walk not accepted"));
        }
    }

    fn pair(&mut self, label: &str, tree: &TreeInstance) -> (u64, u64) {
        let nr = tree.clone().with_variant(Variant::NoReturn);
        let rt = tree.clone().with_variant(Variant::Return);
        let a = solve_noreturn(&nr);
        let b = solve_return(&rt);
        self.solution(&format!("{label}/no_return"), nr.instance(), &a);
        self.solution(&format!("{label}/return"), rt.instance(), &b);
        if a.total > b.total {
            self.bound_violations.push(format!(
                "{label}: no-return {} above return {}",
                a.total, b.total
            ));
        }
        (a.total, b.total)
    }
}

fn criterion1(audit: &mut Audit) -> Check {
    let start = Instant::now();
    let inst = figure1_instance::<u64>();
    let tree = stratdeploy::instance::as_tree(inst.clone()).unwrap();
    let (nr, rt) = audit.pair("fig1", &tree);
    ensure(nr == 23, format!("tree no-return {nr}, expected 23"))?;
    ensure(rt == 25, format!("tree return {rt}, expected 25"))?;
    let o_nr = exact_min_agents(&inst).map_err(|e| e.to_string())?;
    let o_rt =
        exact_min_agents(&inst.clone().with_variant(Variant::Return)).map_err(|e| e.to_string())?;
    ensure(
        o_nr == 23 && o_rt == 25,
        format!("oracle {o_nr}/{o_rt}, expected 23/25"),
    )?;
    let walk = Schedule::from_sequence(&[
        "v1", "e1", "v2", "e2", "v3", "e2", "v2", "e1", "v1", "e3", "v4", "e3", "v1", "e1", "v2",
        "e4", "v5",
    ])
    .unwrap();
    let c = count_agents(&inst, &walk).map_err(|e| e.to_string())?;
    ensure(
        c.total == 23 && c.final_unsettled == 4,
        format!(
            "sequence counts {} with {} unsettled",
            c.total, c.final_unsettled
        ),
    )?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), format!("took {t:?}"))?;
    Ok(format!(
        "no-return 23, return 25 (tree and oracle); sequence 23 with 4 unsettled; {t:.2?}"
    ))
}

fn criterion2(audit: &mut Audit) -> Check {
    let start = Instant::now();
    let tree = figure4_instance::<u64>();
    let count = return_count(&tree);
    let mut trace = vec![tree.total_demand()];
    trace.extend(count.steps.iter().map(|s| s.deducted));
    let tops: Vec<u64> = count.steps.iter().map(|s| s.curr).collect();
    ensure(count.total == 46, format!("return total {}", count.total))?;
    ensure(
        trace == [41, 27, 19, 11, 2, 5],
        format!("curr trace {trace:?}"),
    )?;
    ensure(
        tops[3] == 7 && count.steps[3].add == 5,
        "no top-up of 5 to 7 at the fourth subtree",
    )?;
    let (nr, rt) = audit.pair("fig4", &tree);
    ensure(rt == 46, format!("solve_return {rt}"))?;
    let sol = solve_noreturn(&tree.clone().with_variant(Variant::NoReturn));
    ensure(
        nr == 41 && sol.end_vertex.as_str() == "b5",
        format!("no-return {} ending at {}", nr, sol.end_vertex),
    )?;
    let xs: Vec<u64> = top_decomposition(&tree)
        .subtrees
        .iter()
        .map(|s| s.x)
        .collect();
    ensure(
        xs == [12, 10, 9, 7, 4],
        format!("dominating weights {xs:?}"),
    )?;
    let dec = recursive_decomposition(&tree);
    let seen = |leaves: &[&str], x: u64, y: u64| {
        dec.formations().any(|f| {
            let m: Vec<&str> = dec
                .members(f.cluster)
                .iter()
                .map(|&l| tree.vertex_id(l).as_str())
                .collect();
            m == leaves && f.x == x && f.y == y
        })
    };
    ensure(seen(&["b7", "b6"], 12, 8), "T(b7,b6)^{12,8} never formed")?;
    ensure(seen(&["b5"], 7, 9), "T(b5)^{7,9} never formed")?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), format!("took {t:?}"))?;
    Ok(format!("return 46 via 41>27>19>11>2(+5)>7>5; no-return 41 at b5; order (12,10,9,7,4); heap annotations; {t:.2?}"))
}

fn criterion3() -> Check {
    let start = Instant::now();
    let cover = figure2_input();
    let no_cover = figure2_no_cover_input();
    ensure(cover.exact_cover().is_some(), "fixture has no cover")?;
    ensure(
        no_cover.exact_cover().is_none(),
        "modified family has a cover",
    )?;
    let a: Instance = xc3_reduction(&cover, Variant::NoReturn).map_err(|e| e.to_string())?;
    let b: Instance = xc3_reduction(&no_cover, Variant::NoReturn).map_err(|e| e.to_string())?;
    ensure(
        a.vertex_count() == 20,
        format!("{} vertices", a.vertex_count()),
    )?;
    let oa = exact_min_agents(&a).map_err(|e| e.to_string())?;
    let ob = exact_min_agents(&b).map_err(|e| e.to_string())?;
    ensure(
        oa == 19 && oa == xc3_threshold(&cover, Variant::NoReturn),
        format!("cover instance optimum {oa}"),
    )?;
    ensure(ob >= 20, format!("no-cover optimum {ob}"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(60), format!("took {t:?}"))?;
    Ok(format!("with cover 19, without cover {ob}; {t:.2?}"))
}

fn criterion4(audit: &mut Audit) -> Check {
    for n in 1..=50 {
        let tree = star_instance::<u64>(n);
        let sol = solve_return(&tree);
        audit.solution(&format!("star{n}"), tree.instance(), &sol);
        ensure(
            sol.total == n as u64 + 1,
            format!("star({n}) gives {}", sol.total),
        )?;
        if n <= 12 {
            let o = exact_min_agents(tree.instance()).map_err(|e| e.to_string())?;
            ensure(o == n as u64 + 1, format!("oracle star({n}) gives {o}"))?;
        }
    }
    Ok("n+1 for n = 1..50; oracle agrees for n <= 12".into())
}

fn criterion5(audit: &mut Audit) -> Check {
    let mut mismatches = Vec::new();
    let cases = 1200;
    for seed in 0..cases {
        let n = 1 + (seed % 10) as usize;
        let tree: TreeInstance = random_tree(n, 5_000 + seed, 8);
        let (nr, rt) = audit.pair(&format!("tree{seed}"), &tree);
        let o_nr =
            exact_min_agents(tree.clone().with_variant(Variant::NoReturn).instance()).unwrap();
        let o_rt = exact_min_agents(tree.clone().with_variant(Variant::Return).instance()).unwrap();
        if nr != o_nr || rt != o_rt {
            mismatches.push(format!("seed {seed}: tree {nr}/{rt} oracle {o_nr}/{o_rt}"));
        }
    }
    ensure(
        mismatches.is_empty(),
        format!(
            "{} mismatches, first: {}",
            mismatches.len(),
            mismatches.join("; ")
        ),
    )?;
    Ok(format!("{cases} trees, both variants, 0 mismatches"))
}

fn criterion6(audit: &mut Audit) -> Check {
    let mut violations = Vec::new();
    let cases = 600;
    for seed in 0..cases {
        let n = 1 + (seed % 9) as usize;
        let p = [0.2, 0.4, 0.7][(seed % 3) as usize];
        for variant in [Variant::NoReturn, Variant::Return] {
            let g: Instance = random_graph::<u64>(n, p, 9_000 + seed, 8).with_variant(variant);
            let opt = exact_min_agents(&g).unwrap();
            let approx = solve_mst_approx(&g).map_err(|e| e.to_string())?;
            audit.solution(&format!("graph{seed}/{variant}"), &g, &approx.solution);
            let total = approx.solution.total;
            if !(opt <= total && total <= 2 * opt && approx.lower_bound <= opt) {
                violations.push(format!(
                    "seed {seed} {variant}: opt {opt} approx {total} lb {}",
                    approx.lower_bound
                ));
            }
        }
    }
    ensure(
        violations.is_empty(),
        format!("{} violations: {}", violations.len(), violations.join("; ")),
    )?;
    Ok(format!("{cases} graphs, both variants, 0 violations"))
}

fn criterion9() -> Check {
    let big: TreeInstance = random_tree(100_000, 17, 1_000);
    let nr = big.clone().with_variant(Variant::NoReturn);
    let rt = big.with_variant(Variant::Return);
    let t = Instant::now();
    let a = solve_noreturn_with(
        &nr,
        SolveOptions {
            emit_schedule: false,
        },
    )
    .total;
    let t_nr = t.elapsed();
    let t = Instant::now();
    let b = solve_return_with(
        &rt,
        SolveOptions {
            emit_schedule: false,
        },
    )
    .total;
    let t_rt = t.elapsed();
    ensure(
        t_nr < Duration::from_secs(5),
        format!("no-return on 1e5 took {t_nr:?}"),
    )?;
    ensure(
        t_rt < Duration::from_secs(5),
        format!("return on 1e5 took {t_rt:?}"),
    )?;
    ensure(
        a == noreturn_total(&nr) && b == return_total(&rt),
        "totals-only entry points disagree",
    )?;

    // Sizes are timed round-robin so that allocator and cache state is shared
    // across sizes; each size keeps its fastest repetition.
    let sizes = [1usize << 14, 1 << 15, 1 << 16, 1 << 17];
    let trees: Vec<TreeInstance> = sizes
        .iter()
        .map(|&n| random_tree(n, n as u64, 1_000))
        .collect();
    let mut worst = 0.0f64;
    for (name, total) in [
        ("no-return", noreturn_total as fn(&TreeInstance) -> u64),
        ("return", return_total),
    ] {
        let mut best = vec![Duration::MAX; sizes.len()];
        for _ in 0..9 {
            for (k, tree) in trees.iter().enumerate() {
                let t = Instant::now();
                std::hint::black_box(total(tree));
                best[k] = best[k].min(t.elapsed());
            }
        }
        for w in best.windows(2) {
            let r = w[1].as_secs_f64() / w[0].as_secs_f64();
            worst = worst.max(r);
            ensure(
                r <= 2.4,
                format!("{name}: doubling ratio {r:.2} (times {best:?})"),
            )?;
        }
    }
    Ok(format!(
        "1e5 vertices: no-return {t_nr:.2?}, return {t_rt:.2?}; worst doubling ratio {worst:.2}"
    ))
}

fn criterion10(audit: &mut Audit) -> Check {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for m in 4..=64usize {
        let tree = zigzag_instance::<u64>(m);
        let sol = solve_return(&tree);
        audit.solution(&format!("zigzag{m}"), tree.instance(), &sol);
        ensure(
            sol.total == m as u64 + 1,
            format!("zigzag({m}) gives {}", sol.total),
        )?;
        xs.push((m as f64).ln());
        ys.push((sol.schedule.as_ref().unwrap().len() as f64).ln());
    }
    for m in 1..=6usize {
        let tree = zigzag_instance::<u64>(m);
        let o = exact_min_agents(tree.instance()).map_err(|e| e.to_string())?;
        ensure(o == m as u64 + 1, format!("oracle zigzag({m}) gives {o}"))?;
    }
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = cov / var;
    ensure(slope >= 1.8, format!("fitted exponent {slope:.3}"))?;
    Ok(format!(
        "optimum m+1 for m = 4..64 (oracle m <= 6); fitted length exponent {slope:.3}"
    ))
}

fn main() {
    let mut audit = Audit::default();
    let mut results: Vec<(u32, &str, Check)> = vec![
        (1, "five-vertex example", criterion1(&mut audit)),
        (2, "fourteen-vertex fixture", criterion2(&mut audit)),
        (3, "exact-cover gadget", criterion3()),
        (4, "star family", criterion4(&mut audit)),
        (5, "oracle equivalence on trees", criterion5(&mut audit)),
        (6, "2-approximation on graphs", criterion6(&mut audit)),
    ];
    let c10 = criterion10(&mut audit);
    let c7 = ensure(
        audit.bound_violations.is_empty(),
        format!(
            "{} violations: {:?}",
            audit.bound_violations.len(),
            audit.bound_violations.first()
        ),
    )
    .map(|_| {
        format!(
            "{} solutions within [N, N + w_max], no-return <= return",
            audit.solutions
        )
    });
    let c8 = ensure(
        audit.loop_mismatches.is_empty(),
        format!(
            "{} mismatches: {:?}",
            audit.loop_mismatches.len(),
            audit.loop_mismatches.first()
        ),
    )
    .map(|_| {
        format!(
            "{} emitted schedules recount to the reported total",
            audit.solutions
        )
    });
    results.push((7, "bound suite", c7));
    results.push((8, "closed loop", c8));
    results.push((9, "performance", criterion9()));
    results.push((10, "quadratic walk evidence", c10));

    let mut failed = 0;
    for (id, name, r) in &results {
        match r {
            Ok(detail) => println!("[PASS] criterion {id}: {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {id}: {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
