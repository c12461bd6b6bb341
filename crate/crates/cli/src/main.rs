//! `maxgeom`: long matchings and tours on planar point sets, with star-bound
//! certificates for how far from optimal a result can be.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on bad data (unreadable or
//! malformed instances, inputs a solver rejects), 3 when an internal
//! invariant fails.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use maxgeom::instances::{
    drop_last_if_odd, gen_clustered, gen_uniform, read_instance, write_native, ClusterConfig,
    DEFAULT_CLUSTER_RADIUS,
};
use maxgeom::matching::{cross_matching_with_center, CenterMode};
use maxgeom::oracles::{
    brute_matching, brute_tour, lp_matching_optimum, subtour_fractional_construction,
};
use maxgeom::tour::cross_tour_with_center;
use maxgeom::weber::{fwp_improved, weber_combinatorial, weber_numeric_default, WeberMethod};
use maxgeom::{cross_matching, cross_tour, dist, Instance, SearchBudget};
use maxgeom::{matching_local_search, tour_local_search};
use maxgeom_cli::bench::{run_bench, write_csv, Algorithm, BenchSpec, InstanceSpec};
use maxgeom_cli::svg::{render_svg, Overlay};

#[derive(Parser)]
#[command(name = "maxgeom", version)]
#[command(about = "Near-optimal long matchings and tours on planar point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance in the native text format
    Gen {
        /// Point distribution
        #[arg(long, value_enum)]
        kind: Kind,
        /// Number of points
        #[arg(long)]
        n: usize,
        /// Generator seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cluster count (clustered kind only)
        #[arg(long = "k", default_value_t = 5)]
        clusters: usize,
        /// Cluster radius in [0, 0.5) (clustered kind only)
        #[arg(long, default_value_t = DEFAULT_CLUSTER_RADIUS)]
        radius: f64,
        /// Write here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute a long perfect matching with a certified bound
    SolveMatching {
        /// Instance file (.tsp or native)
        #[arg(long)]
        input: PathBuf,
        /// Improve the pairing by local search
        #[arg(long)]
        local_search: bool,
        /// Evaluation budget for the local search
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Seed for the local search
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// How to pick the center the pairing is organized around
        #[arg(long, value_enum, default_value_t = Center::Numeric)]
        center: Center,
        /// Drop the last point when the instance has odd cardinality
        #[arg(long)]
        drop_odd: bool,
        /// Print one line per matched pair
        #[arg(long)]
        pairs: bool,
    },
    /// Compute a long tour with a certified bound
    SolveTour {
        /// Instance file (.tsp or native)
        #[arg(long)]
        input: PathBuf,
        /// Improve the tour by local search
        #[arg(long)]
        local_search: bool,
        /// Evaluation budget for the local search
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Seed for the local search
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the visiting order
        #[arg(long)]
        order: bool,
    },
    /// Compute the star bound of an instance without solving it
    Bound {
        /// Instance file (.tsp or native)
        #[arg(long)]
        input: PathBuf,
        /// Also compute the tighter quadratic-time bound
        #[arg(long)]
        improved: bool,
        /// Which center construction to use
        #[arg(long, value_enum, default_value_t = Center::Numeric)]
        center: Center,
    },
    /// Exact reference values for small instances
    Exact {
        /// Instance file (.tsp or native)
        #[arg(long)]
        input: PathBuf,
        /// Which exact quantity to compute
        #[arg(long, value_enum)]
        what: ExactWhat,
    },
    /// Run a batch of instances and algorithms, reporting CSV
    Bench {
        /// Instance file to include (repeatable)
        #[arg(long = "input")]
        inputs: Vec<PathBuf>,
        /// Generated uniform instance of this size (repeatable)
        #[arg(long = "uniform")]
        uniform: Vec<usize>,
        /// Generated clustered instance as N:K (repeatable)
        #[arg(long = "clustered", value_parser = parse_clustered)]
        clustered: Vec<(usize, usize)>,
        /// Comma-separated algorithms: cross, cross_ls, cross_tour,
        /// cross_tour_ls, lp_opt, brute
        #[arg(long = "algo", value_delimiter = ',', default_value = "cross", value_parser = parse_algorithm)]
        algo: Vec<Algorithm>,
        /// Timed repetitions per run
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Base seed for generated instances and searches
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compute the quadratic-time improved bound column
        #[arg(long)]
        fwp_prime: bool,
        /// Also compute the relaxation bound column (cubic time)
        #[arg(long)]
        lp_bound: bool,
        /// Evaluation budget for the _ls algorithms
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Run instances in parallel on this many threads
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Write the CSV here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw an instance as SVG, optionally with a matching or tour overlay
    Render {
        /// Instance file (.tsp or native)
        #[arg(long)]
        input: PathBuf,
        /// What to draw on top of the points
        #[arg(long, value_enum, default_value_t = OverlayKind::None)]
        overlay: OverlayKind,
        /// Pixel width of the drawing
        #[arg(long, default_value_t = 720.0)]
        width: f64,
        /// Write here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Uniform,
    Clustered,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Center {
    Numeric,
    Combinatorial,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExactWhat {
    /// Optimal matching by exhaustive search
    Matching,
    /// Optimal tour by exhaustive search
    Tour,
    /// Optimum of the fractional matching relaxation
    LpMatching,
    /// Fractional tour built from diagonals of a convex instance
    Subtour,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OverlayKind {
    None,
    Matching,
    Tour,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn parse_clustered(s: &str) -> Result<(usize, usize), String> {
    let (n, k) = s
        .split_once(':')
        .ok_or_else(|| format!("expected N:K, got {s:?}"))?;
    let n = n.parse().map_err(|e| format!("bad point count: {e}"))?;
    let k = k.parse().map_err(|e| format!("bad cluster count: {e}"))?;
    Ok((n, k))
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<maxgeom::Error>() {
                Some(maxgeom::Error::Internal(_)) => 3,
                _ => 2,
            }
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Gen {
            kind,
            n,
            seed,
            clusters,
            radius,
            output,
        } => {
            let inst = match kind {
                Kind::Uniform => gen_uniform(n, seed)?,
                Kind::Clustered => gen_clustered(&ClusterConfig {
                    n,
                    clusters,
                    radius,
                    seed,
                })?,
            };
            emit(output.as_deref(), &write_native(&inst))
        }
        Command::SolveMatching {
            input,
            local_search,
            budget,
            seed,
            center,
            drop_odd,
            pairs,
        } => {
            let inst = load(&input, drop_odd)?;
            let mode = match center {
                Center::Numeric => CenterMode::Numeric,
                Center::Combinatorial => CenterMode::Combinatorial,
            };
            let (start, weber) = cross_matching_with_center(&inst.points, mode)?;
            let start_value = start.value();
            let matching = if local_search {
                let budget = SearchBudget {
                    evaluations: budget,
                    time_limit: None,
                    seed,
                };
                matching_local_search(&inst.points, &start, &budget)?
            } else {
                start
            };
            println!("instance {}", inst.name);
            println!("n {}", inst.len());
            if local_search {
                println!("start_value {start_value}");
            }
            println!("value {}", matching.value());
            println!("bound_fwp {}", weber.value);
            if matching.value() > 0.0 {
                let gap = 100.0 * (weber.value - matching.value()) / matching.value();
                println!("gap_pct {gap:.2}");
            }
            println!("center {} {}", weber.center.x, weber.center.y);
            println!("center_method {}", method_name(weber.method));
            if pairs {
                for &(i, j) in matching.pairs() {
                    println!("pair {i} {j} {}", dist(inst.points[i], inst.points[j]));
                }
            }
            Ok(())
        }
        Command::SolveTour {
            input,
            local_search,
            budget,
            seed,
            order,
        } => {
            let inst = load(&input, false)?;
            let (start, weber) = cross_tour_with_center(&inst.points)?;
            let start_value = start.value();
            let tour = if local_search {
                let budget = SearchBudget {
                    evaluations: budget,
                    time_limit: None,
                    seed,
                };
                tour_local_search(&inst.points, &start, &budget)?
            } else {
                start
            };
            let bound = 2.0 * weber.value;
            println!("instance {}", inst.name);
            println!("n {}", inst.len());
            if local_search {
                println!("start_value {start_value}");
            }
            println!("value {}", tour.value());
            println!("bound_2fwp {bound}");
            if tour.value() > 0.0 {
                let gap = 100.0 * (bound - tour.value()) / tour.value();
                println!("gap_pct {gap:.2}");
            }
            if order {
                println!("order {}", join_indices(tour.order()));
            }
            Ok(())
        }
        Command::Bound {
            input,
            improved,
            center,
        } => {
            let inst = load(&input, false)?;
            let weber = match center {
                Center::Numeric => weber_numeric_default(&inst.points)?,
                Center::Combinatorial => weber_combinatorial(&inst.points)?,
            };
            println!("instance {}", inst.name);
            println!("n {}", inst.len());
            println!("bound_fwp {}", weber.value);
            println!("center {} {}", weber.center.x, weber.center.y);
            println!("center_method {}", method_name(weber.method));
            println!("iterations {}", weber.iterations);
            println!("converged {}", weber.converged);
            if improved {
                println!(
                    "bound_fwp_prime {}",
                    fwp_improved(&inst.points, weber.center)?
                );
            }
            Ok(())
        }
        Command::Exact { input, what } => {
            let inst = load(&input, false)?;
            println!("instance {}", inst.name);
            println!("n {}", inst.len());
            match what {
                ExactWhat::Matching => {
                    let matching = brute_matching(&inst.points)?;
                    println!("value {}", matching.value());
                    for &(i, j) in matching.pairs() {
                        println!("pair {i} {j} {}", dist(inst.points[i], inst.points[j]));
                    }
                }
                ExactWhat::Tour => {
                    let tour = brute_tour(&inst.points)?;
                    println!("value {}", tour.value());
                    println!("order {}", join_indices(tour.order()));
                }
                ExactWhat::LpMatching => {
                    let relaxed = lp_matching_optimum(&inst.points)?;
                    println!("value {}", relaxed.value());
                    println!("integral {}", relaxed.is_integral(1e-9));
                    for (&(i, j), &weight) in relaxed.edges() {
                        println!("edge {i} {j} {weight}");
                    }
                }
                ExactWhat::Subtour => {
                    let fractional = subtour_fractional_construction(&inst.points)?;
                    println!("value {}", fractional.value());
                    for (&(i, j), &weight) in fractional.edges() {
                        println!("edge {i} {j} {weight}");
                    }
                }
            }
            Ok(())
        }
        Command::Bench {
            inputs,
            uniform,
            clustered,
            algo,
            reps,
            seed,
            fwp_prime,
            lp_bound,
            budget,
            threads,
            output,
        } => {
            let mut instances: Vec<InstanceSpec> =
                inputs.into_iter().map(InstanceSpec::File).collect();
            instances.extend(uniform.into_iter().map(|n| InstanceSpec::Uniform { n }));
            instances.extend(
                clustered
                    .into_iter()
                    .map(|(n, clusters)| InstanceSpec::Clustered { n, clusters }),
            );
            let spec = BenchSpec {
                instances,
                algorithms: algo,
                reps,
                seed,
                fwp_prime,
                lp_bound,
                budget_evals: budget,
                threads,
            };
            let records = run_bench(&spec);
            for r in &records {
                if let Some(e) = &r.error {
                    if r.algorithm.is_empty() {
                        eprintln!("bench: {}: {e}", r.instance);
                    } else {
                        eprintln!("bench: {} ({}): {e}", r.instance, r.algorithm);
                    }
                }
            }
            emit(output.as_deref(), &write_csv(&records))
        }
        Command::Render {
            input,
            overlay,
            width,
            output,
        } => {
            let inst = load(&input, false)?;
            let overlay = match overlay {
                OverlayKind::None => Overlay::None,
                OverlayKind::Matching => {
                    Overlay::Matching(cross_matching(&inst.points)?.pairs().to_vec())
                }
                OverlayKind::Tour => Overlay::Tour(cross_tour(&inst.points)?.order().to_vec()),
            };
            emit(output.as_deref(), &render_svg(&inst.points, &overlay, width))
        }
    }
}

fn load(path: &std::path::Path, drop_odd: bool) -> anyhow::Result<Instance> {
    let inst = read_instance(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(if drop_odd { drop_last_if_odd(inst) } else { inst })
}

fn emit(output: Option<&std::path::Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn method_name(method: WeberMethod) -> &'static str {
    match method {
        WeberMethod::Weiszfeld => "weiszfeld",
        WeberMethod::Newton => "newton",
        WeberMethod::Combinatorial => "combinatorial",
    }
}

fn join_indices(order: &[usize]) -> String {
    order
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
