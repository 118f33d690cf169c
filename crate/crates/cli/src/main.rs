mod bench;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stratdeploy::decomposition::recursive_decomposition;
use stratdeploy::generators::{
    figure1_instance, figure2_input, figure2_no_cover_input, figure4_instance, random_graph,
    random_tree, star_instance, uniform_gap_instance, xc3_reduction, zigzag_instance, Xc3Input,
};
use stratdeploy::graph_solver::{minimum_spanning_tree, solve_mst_approx_with};
use stratdeploy::instance::as_tree;
use stratdeploy::oracle::{exact_min_agents_report, exact_schedule_with, OracleConfig, HARD_CAP};
use stratdeploy::schedule::{count_agents, verify_coverage};
use stratdeploy::tree_solver::solve_tree;
use stratdeploy::{Error, Instance, Schedule, SolveOptions, TreeInstance, Variant};

use crate::report::Report;

#[derive(Parser)]
#[command(
    name = "stratdeploy",
    version,
    about = "Minimum-agent deployment schedules on weighted trees and graphs"
)]
struct Cli {
    /// Print reports as one JSON object instead of `key: value` lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMethod::Auto)]
        method: SolveMethod,
        /// Build the explicit walk (can be quadratic in the instance size).
        #[arg(long)]
        emit_schedule: bool,
        /// Write the walk to this file as JSON; implies --emit-schedule.
        #[arg(long)]
        schedule_out: Option<PathBuf>,
        /// Print the recursive decomposition of the (spanning) tree.
        #[arg(long)]
        dump_decomposition: bool,
    },
    /// Count the agents a schedule needs and check that it covers the instance.
    Validate {
        instance: PathBuf,
        schedule: PathBuf,
    },
    /// Write a generated instance.
    Generate(GenerateArgs),
    /// Exact optimum by exhaustive search on small instances.
    Oracle {
        input: PathBuf,
        /// Refuse instances with more vertices than this.
        #[arg(long, default_value_t = 20)]
        cap: usize,
        /// Write an optimal walk to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Time the solvers over a size sweep and write CSV rows.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveMethod {
    Auto,
    Tree,
    MstApprox,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    #[value(alias = "no_return")]
    NoReturn,
    Return,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::NoReturn => Variant::NoReturn,
            VariantArg::Return => Variant::Return,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Fig1,
    Fig4,
    Star,
    UniformGap,
    Zigzag,
    Xc3,
    RandomTree,
    RandomGraph,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Leaves (star), vertices (random-tree, random-graph) or ground set size / 3 (xc3).
    #[arg(long)]
    n: Option<usize>,
    /// Leaves of the zigzag family.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 9)]
    weight_max: u64,
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
    /// Edge weights of the uniform-gap star, comma separated.
    #[arg(long, value_delimiter = ',')]
    values: Vec<u64>,
    /// Leaf demand of the uniform-gap star.
    #[arg(long, default_value_t = 1)]
    eps: u64,
    /// Override the family's default variant.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Exact-cover subsets as `a,b,c;d,e,f;...` (xc3 only).
    #[arg(long)]
    sets: Option<String>,
    /// Use the built-in exact-cover input that has no exact cover (xc3 only).
    #[arg(long)]
    no_cover: bool,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Failure with its documented exit code.
#[derive(Debug)]
pub enum Failure {
    Io(String),
    Invalid(String),
    NotATree(String),
    Cap(String),
    Rejected,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::NotATree(_) => 3,
            Failure::Cap(_) => 4,
            Failure::Rejected => 5,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            Error::Cycle => Failure::NotATree(e.to_string()),
            e => Failure::Invalid(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> CliResult<Instance> {
    Instance::from_json(&read(path)?)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let outcome = match cli.command {
        Command::Solve {
            input,
            method,
            emit_schedule,
            schedule_out,
            dump_decomposition,
        } => solve(
            &input,
            method,
            emit_schedule,
            schedule_out.as_deref(),
            dump_decomposition,
            json,
        ),
        Command::Validate { instance, schedule } => validate(&instance, &schedule, json),
        Command::Generate(args) => generate(&args),
        Command::Oracle {
            input,
            cap,
            witness,
        } => oracle(&input, cap, witness.as_deref(), json),
        Command::Bench(args) => bench::run(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Io(m) | Failure::Invalid(m) | Failure::NotATree(m) | Failure::Cap(m) => {
                    eprintln!("error: {m}")
                }
                Failure::Rejected => {}
            }
            ExitCode::from(f.code())
        }
    }
}

fn solve(
    input: &Path,
    method: SolveMethod,
    emit_schedule: bool,
    schedule_out: Option<&Path>,
    dump_decomposition: bool,
    json: bool,
) -> CliResult {
    let instance = load(input)?;
    let options = SolveOptions {
        emit_schedule: emit_schedule || schedule_out.is_some(),
    };
    let use_tree = match method {
        SolveMethod::Auto => instance.is_tree(),
        SolveMethod::Tree => true,
        SolveMethod::MstApprox => false,
    };
    let mut r = Report::default();
    let (solution, tree) = if use_tree {
        let tree: TreeInstance = as_tree(instance)?;
        let sol = solve_tree(&tree, options);
        r.put("method", serde_json::to_value(sol.method).unwrap());
        (sol, tree)
    } else {
        let approx = solve_mst_approx_with(&instance, options)?;
        r.put("method", "mst-approx");
        r.put("lower_bound", approx.lower_bound);
        r.put("ratio", approx.ratio_certificate);
        r.put("ratio_bound", 2);
        (approx.solution, minimum_spanning_tree(&instance)?)
    };
    let bounds = tree.instance().trivial_bounds();
    r.put("variant", tree.instance().variant().to_string());
    r.put("vertices", tree.len());
    r.put("total", solution.total);
    r.put("bounds", vec![bounds.lower, bounds.upper]);
    r.put("end", solution.end_vertex.as_str());
    r.put(
        "order",
        solution
            .visit_order
            .iter()
            .map(|v| v.as_str())
            .collect::<Vec<_>>(),
    );
    if let Some(walk) = &solution.schedule {
        r.put("schedule_len", walk.len());
        match schedule_out {
            Some(path) => {
                write(path, &walk.to_json())?;
                r.put("schedule_out", path.display().to_string());
            }
            None if json => {
                r.put("schedule", serde_json::to_value(walk).unwrap());
            }
            None => {
                let mut seq = vec![walk.start.as_str()];
                for s in &walk.steps {
                    seq.push(s.edge.as_str());
                    seq.push(s.to.as_str());
                }
                r.put("schedule", seq);
            }
        }
    }
    if dump_decomposition {
        r.put("decomposition", recursive_decomposition(&tree).dump(&tree));
    }
    print!("{}", r.render(json));
    Ok(())
}

fn validate(instance: &Path, schedule: &Path, json: bool) -> CliResult {
    let instance = load(instance)?;
    let walk = Schedule::from_json(&read(schedule)?)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", schedule.display())))?;
    let count = count_agents(&instance, &walk)?;
    let coverage = verify_coverage(&instance, &walk)?;
    let variant = instance.variant();
    let accepted = coverage.accepted(variant);
    let mut r = Report::default();
    r.put("variant", variant.to_string())
        .put("steps", walk.len())
        .put("total", count.total)
        .put("add", count.add)
        .put("final_unsettled", count.final_unsettled)
        .put("reporting_agent", count.reporting_agent)
        .put("covered", coverage.covered)
        .put(
            "missing",
            coverage
                .missing
                .iter()
                .map(|v| v.as_str())
                .collect::<Vec<_>>(),
        )
        .put("ends_at_start", coverage.ends_at_start)
        .put("accepted_no_return", coverage.accepted(Variant::NoReturn))
        .put("accepted_return", coverage.accepted(Variant::Return))
        .put("accepted", accepted);
    print!("{}", r.render(json));
    if accepted {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn generate(a: &GenerateArgs) -> CliResult {
    let positive = |v: Option<usize>, default: usize, flag: &str| match v.unwrap_or(default) {
        0 => Err(Failure::Invalid(format!("--{flag} must be at least 1"))),
        n => Ok(n),
    };
    let variant = a.variant.map(Variant::from);
    let instance: Instance = match a.family {
        Family::Fig1 => figure1_instance(),
        Family::Fig4 => figure4_instance().into_instance(),
        Family::Star => star_instance(positive(a.n, 5, "n")?).into_instance(),
        Family::UniformGap => {
            uniform_gap_instance(&a.values, a.eps, variant.unwrap_or(Variant::Return))?
                .into_instance()
        }
        Family::Zigzag => zigzag_instance(positive(a.m, 4, "m")?).into_instance(),
        Family::Xc3 => {
            let input = match (&a.sets, a.no_cover) {
                (Some(_), true) => {
                    return Err(Failure::Invalid(
                        "--sets and --no-cover exclude each other".into(),
                    ))
                }
                (Some(text), false) => parse_sets(text, a.n)?,
                (None, true) => figure2_no_cover_input(),
                (None, false) => figure2_input(),
            };
            xc3_reduction(&input, variant.unwrap_or(Variant::NoReturn))?
        }
        Family::RandomTree => {
            random_tree(positive(a.n, 10, "n")?, a.seed, a.weight_max).into_instance()
        }
        Family::RandomGraph => {
            if !(0.0..=1.0).contains(&a.edge_prob) {
                return Err(Failure::Invalid("--edge-prob must lie in [0, 1]".into()));
            }
            random_graph(positive(a.n, 8, "n")?, a.edge_prob, a.seed, a.weight_max)
        }
    };
    let instance = match variant {
        Some(v) => instance.with_variant(v),
        None => instance,
    };
    let text = instance.to_json() + "\n";
    match &a.output {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_sets(text: &str, n: Option<usize>) -> CliResult<Xc3Input> {
    let bad = |m: String| Failure::Invalid(format!("--sets: {m}"));
    let mut sets = Vec::new();
    for chunk in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
        let items = chunk
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|e| bad(format!("`{x}`: {e}")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let set: [usize; 3] = items
            .try_into()
            .map_err(|_| bad(format!("`{chunk}` is not a 3-element subset")))?;
        sets.push(set);
    }
    let largest = sets.iter().flatten().copied().max().unwrap_or(0);
    Ok(Xc3Input::new(n.unwrap_or(largest.div_ceil(3)), sets)?)
}

fn oracle(input: &Path, cap: usize, witness: Option<&Path>, json: bool) -> CliResult {
    let instance = load(input)?;
    let config = OracleConfig { cap };
    let report = exact_min_agents_report(&instance, config)?;
    let mut r = Report::default();
    r.put("variant", instance.variant().to_string())
        .put("vertices", instance.vertex_count())
        .put("cap", cap.min(HARD_CAP))
        .put("optimum", report.optimum)
        .put("probes", report.probes.len())
        .put("max_states", report.max_states);
    if let Some(path) = witness {
        let walk = exact_schedule_with(&instance, report.optimum, config)?
            .expect("the optimum is feasible");
        write(path, &walk.to_json())?;
        r.put("witness", path.display().to_string());
        r.put("witness_len", walk.len());
    }
    print!("{}", r.render(json));
    Ok(())
}
