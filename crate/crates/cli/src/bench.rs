use std::path::PathBuf;
use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;
use stratdeploy::generators::{random_graph, random_tree, star_instance, zigzag_instance};
use stratdeploy::graph_solver::solve_mst_approx_with;
use stratdeploy::tree_solver::solve_tree;
use stratdeploy::{Solution, SolveOptions, TreeInstance, Variant};

use crate::{write, Failure, VariantArg};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchFamily {
    RandomTree,
    RandomGraph,
    Star,
    Zigzag,
}

#[derive(clap::Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    family: BenchFamily,
    /// Instance sizes, comma separated (`m` for zigzag).
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Seed of the first repetition; repetition `i` uses `seed + i`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    weight_max: u64,
    /// Extra-edge probability for random-graph.
    #[arg(long, default_value_t = 0.001)]
    edge_prob: f64,
    /// Variant for the random families (default no-return).
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Skip schedule emission; `schedule_len` is then left empty.
    #[arg(long)]
    totals_only: bool,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    family: &'static str,
    n: usize,
    seed: u64,
    total: u64,
    solve_time_ns: u64,
    schedule_len: Option<usize>,
}

fn timed(f: impl FnOnce() -> Solution) -> (Solution, u64) {
    let clock = Instant::now();
    let solution = f();
    (solution, clock.elapsed().as_nanos() as u64)
}

impl BenchFamily {
    fn name(self) -> &'static str {
        match self {
            BenchFamily::RandomTree => "random-tree",
            BenchFamily::RandomGraph => "random-graph",
            BenchFamily::Star => "star",
            BenchFamily::Zigzag => "zigzag",
        }
    }
}

pub fn run(a: &BenchArgs) -> Result<(), Failure> {
    if a.sizes.contains(&0) {
        return Err(Failure::Invalid("--sizes must be positive".into()));
    }
    if a.reps == 0 {
        return Err(Failure::Invalid("--reps must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&a.edge_prob) {
        return Err(Failure::Invalid("--edge-prob must lie in [0, 1]".into()));
    }
    let variant = a.variant.map_or(Variant::NoReturn, Variant::from);
    let options = SolveOptions {
        emit_schedule: !a.totals_only,
    };
    let jobs: Vec<(usize, u64)> = a
        .sizes
        .iter()
        .flat_map(|&n| (0..a.reps as u64).map(move |r| (n, a.seed + r)))
        .collect();

    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let (solution, elapsed) = match a.family {
                BenchFamily::RandomGraph => {
                    let g = random_graph(n, a.edge_prob, seed, a.weight_max).with_variant(variant);
                    timed(|| {
                        solve_mst_approx_with(&g, options)
                            .expect("generated graphs are valid")
                            .solution
                    })
                }
                family => {
                    let t: TreeInstance = match family {
                        BenchFamily::Star => star_instance(n),
                        BenchFamily::Zigzag => zigzag_instance(n),
                        _ => random_tree(n, seed, a.weight_max).with_variant(variant),
                    };
                    timed(|| solve_tree(&t, options))
                }
            };
            Row {
                family: a.family.name(),
                n,
                seed,
                total: solution.total,
                solve_time_ns: elapsed,
                schedule_len: solution.schedule.as_ref().map(|s| s.len()),
            }
        })
        .collect();

    let mut out = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        out.serialize(row).map_err(|e| Failure::Io(e.to_string()))?;
    }
    let text = String::from_utf8(out.into_inner().map_err(|e| Failure::Io(e.to_string()))?)
        .expect("csv output is utf-8");
    match &a.output {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
