//! Batch runner behind `maxgeom bench`. Takes a declarative spec, runs each
//! requested algorithm on each instance, and reports one CSV row per
//! (instance, algorithm) pair with the value, the applicable upper bounds and
//! the certified gap.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use maxgeom::instances::{gen_clustered, gen_uniform, read_instance, ClusterConfig};
use maxgeom::matching::{cross_matching_with_center, CenterMode};
use maxgeom::oracles::{brute_matching, lp_matching_optimum, LP_MATCHING_CAP};
use maxgeom::tour::cross_tour_with_center;
use maxgeom::weber::{fwp_improved, weber_numeric_default, FWP_IMPROVED_CAP};
use maxgeom::{
    cross_tour, matching_local_search, tour_local_search, Instance, Point2D, SearchBudget,
};
use rayon::prelude::*;

/// Solvers the bench runner knows how to time. The `_ls` variants start from
/// the plain heuristic and spend the configured evaluation budget on top of
/// it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Cross,
    CrossLs,
    CrossTour,
    CrossTourLs,
    LpOpt,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Cross,
        Algorithm::CrossLs,
        Algorithm::CrossTour,
        Algorithm::CrossTourLs,
        Algorithm::LpOpt,
        Algorithm::Brute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cross => "cross",
            Algorithm::CrossLs => "cross_ls",
            Algorithm::CrossTour => "cross_tour",
            Algorithm::CrossTourLs => "cross_tour_ls",
            Algorithm::LpOpt => "lp_opt",
            Algorithm::Brute => "brute",
        }
    }

    /// Tour algorithms compare against doubled matching bounds.
    pub fn is_tour(self) -> bool {
        matches!(self, Algorithm::CrossTour | Algorithm::CrossTourLs)
    }
}

impl FromStr for Algorithm {
    type Err = String;

    /// Accepts the canonical underscored names and their hyphenated
    /// spellings.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.replace('-', "_");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == normalized)
            .ok_or_else(|| {
                let known: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                format!("unknown algorithm {s:?}, expected one of: {}", known.join(", "))
            })
    }
}

/// One instance to bench: either a file on disk or a seeded generator call.
/// Generated specs draw their seed from the bench seed plus a running index,
/// so a spec listing `Uniform` twice gets two distinct instances.
#[derive(Debug, Clone)]
pub enum InstanceSpec {
    File(PathBuf),
    Uniform { n: usize },
    Clustered { n: usize, clusters: usize },
}

/// Everything `run_bench` needs. `fwp_prime` and `lp_bound` opt into the
/// quadratic and cubic bounds; the plain star bound is always computed.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub instances: Vec<InstanceSpec>,
    pub algorithms: Vec<Algorithm>,
    /// Timed repetitions per (instance, algorithm); values are identical
    /// across reps, times are averaged.
    pub reps: usize,
    /// Base seed. Generated instances take consecutive seeds starting here;
    /// searches on an instance reuse its seed, or this one for file
    /// instances.
    pub seed: u64,
    pub fwp_prime: bool,
    pub lp_bound: bool,
    pub budget_evals: u64,
    /// Instances run in parallel when this is above 1.
    pub threads: usize,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            instances: Vec::new(),
            algorithms: vec![Algorithm::Cross],
            reps: 1,
            seed: 0,
            fwp_prime: false,
            lp_bound: false,
            budget_evals: 1_000_000,
            threads: 1,
        }
    }
}

/// One CSV row. `None` fields serialize as empty cells. A failed run keeps
/// the identity columns (instance, n, algorithm, seed), leaves every numeric
/// column empty and records the reason in `error`, which is not part of the
/// CSV schema and goes to stderr instead.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub instance: String,
    pub n: Option<usize>,
    pub algorithm: &'static str,
    pub value: Option<f64>,
    pub bound_fwp: Option<f64>,
    pub bound_fwp_prime: Option<f64>,
    pub bound_2mat: Option<f64>,
    pub gap_pct: Option<f64>,
    pub time_ms: Option<f64>,
    pub seed: Option<u64>,
    pub error: Option<String>,
}

pub const CSV_HEADER: &str =
    "instance,n,algorithm,value,bound_fwp,bound_fwp_prime,bound_2mat,gap_pct,time_ms,seed";

/// Runs the whole spec. Rows come back in spec order: instances outer,
/// algorithms inner. An instance that fails to load contributes a single
/// error row and the run continues with the next instance.
pub fn run_bench(spec: &BenchSpec) -> Vec<BenchRecord> {
    let mut prepared: Vec<(String, Option<u64>, maxgeom::Result<Instance>)> = Vec::new();
    let mut generated = 0u64;
    for inst in &spec.instances {
        match inst {
            InstanceSpec::File(path) => {
                let fallback = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                prepared.push((fallback, None, read_instance(path)));
            }
            InstanceSpec::Uniform { n } => {
                let seed = spec.seed.wrapping_add(generated);
                generated += 1;
                let result = gen_uniform(*n, seed);
                prepared.push((format!("uniform-n{n}-s{seed}"), Some(seed), result));
            }
            InstanceSpec::Clustered { n, clusters } => {
                let seed = spec.seed.wrapping_add(generated);
                generated += 1;
                let result = gen_clustered(&ClusterConfig::new(*n, *clusters, seed));
                prepared.push((
                    format!("clustered-n{n}-k{clusters}-s{seed}"),
                    Some(seed),
                    result,
                ));
            }
        }
    }

    let rows_per_instance: Vec<Vec<BenchRecord>> = if spec.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.threads)
            .build();
        match pool {
            Ok(pool) => pool.install(|| {
                prepared
                    .par_iter()
                    .map(|(name, seed, inst)| run_one(name, *seed, inst, spec))
                    .collect()
            }),
            Err(_) => prepared
                .iter()
                .map(|(name, seed, inst)| run_one(name, *seed, inst, spec))
                .collect(),
        }
    } else {
        prepared
            .iter()
            .map(|(name, seed, inst)| run_one(name, *seed, inst, spec))
            .collect()
    };
    rows_per_instance.into_iter().flatten().collect()
}

fn run_one(
    name: &str,
    seed: Option<u64>,
    inst: &maxgeom::Result<Instance>,
    spec: &BenchSpec,
) -> Vec<BenchRecord> {
    let blank = BenchRecord {
        instance: name.to_string(),
        n: None,
        algorithm: "",
        value: None,
        bound_fwp: None,
        bound_fwp_prime: None,
        bound_2mat: None,
        gap_pct: None,
        time_ms: None,
        seed,
        error: None,
    };
    let inst = match inst {
        Ok(inst) => inst,
        Err(err) => {
            return vec![BenchRecord {
                error: Some(err.to_string()),
                ..blank
            }];
        }
    };
    let points = &inst.points;
    let n = points.len();
    let blank = BenchRecord {
        instance: inst.name.clone(),
        n: Some(n),
        ..blank
    };

    // Bounds are shared by every algorithm row of the instance and are not
    // part of the timed work.
    let weber = match weber_numeric_default(points) {
        Ok(weber) => weber,
        Err(err) => {
            return vec![BenchRecord {
                error: Some(err.to_string()),
                ..blank
            }];
        }
    };
    let fwp = weber.value;
    let fwp_prime = if spec.fwp_prime && n >= 2 && n <= FWP_IMPROVED_CAP {
        fwp_improved(points, weber.center).ok()
    } else {
        None
    };
    let lp = if spec.lp_bound && n >= 2 && n % 2 == 0 && n <= LP_MATCHING_CAP {
        lp_matching_optimum(points).ok().map(|m| m.value())
    } else {
        None
    };

    let budget = SearchBudget {
        evaluations: spec.budget_evals,
        time_limit: None,
        seed: seed.unwrap_or(spec.seed),
    };
    spec.algorithms
        .iter()
        .map(|&alg| {
            let mut record = BenchRecord {
                algorithm: alg.name(),
                ..blank.clone()
            };
            let reps = spec.reps.max(1);
            let mut times = Vec::with_capacity(reps);
            let mut outcome: maxgeom::Result<f64> = Err(maxgeom::Error::EmptyInstance);
            for _ in 0..reps {
                let start = Instant::now();
                outcome = solve(alg, points, &budget);
                let elapsed = start.elapsed().as_secs_f64() * 1e3;
                if outcome.is_err() {
                    break;
                }
                times.push(elapsed);
            }
            match outcome {
                Ok(value) => {
                    let scale = if alg.is_tour() { 2.0 } else { 1.0 };
                    record.value = Some(value);
                    record.bound_fwp = Some(scale * fwp);
                    record.bound_fwp_prime = fwp_prime.map(|b| scale * b);
                    record.bound_2mat = lp.map(|b| scale * b);
                    record.gap_pct = gap_pct(
                        value,
                        [record.bound_fwp, record.bound_fwp_prime, record.bound_2mat],
                    );
                    record.time_ms = Some(times.iter().sum::<f64>() / times.len() as f64);
                }
                Err(err) => record.error = Some(err.to_string()),
            }
            record
        })
        .collect()
}

fn solve(alg: Algorithm, points: &[Point2D], budget: &SearchBudget) -> maxgeom::Result<f64> {
    match alg {
        Algorithm::Cross => {
            cross_matching_with_center(points, CenterMode::Numeric).map(|(m, _)| m.value())
        }
        Algorithm::CrossLs => {
            let (start, _) = cross_matching_with_center(points, CenterMode::Numeric)?;
            matching_local_search(points, &start, budget).map(|m| m.value())
        }
        Algorithm::CrossTour => cross_tour_with_center(points).map(|(t, _)| t.value()),
        Algorithm::CrossTourLs => {
            let start = cross_tour(points)?;
            tour_local_search(points, &start, budget).map(|t| t.value())
        }
        Algorithm::LpOpt => lp_matching_optimum(points).map(|m| m.value()),
        Algorithm::Brute => brute_matching(points).map(|m| m.value()),
    }
}

/// Certified gap against the tightest bound that was computed, in percent of
/// the achieved value. `None` when the value is zero or no bound applies.
fn gap_pct(value: f64, bounds: [Option<f64>; 3]) -> Option<f64> {
    let best = bounds
        .iter()
        .flatten()
        .fold(f64::INFINITY, |acc, &b| acc.min(b));
    (best.is_finite() && value > 0.0).then(|| 100.0 * (best - value) / value)
}

/// Serializes records under the fixed header. Fields containing commas,
/// quotes or newlines are quoted; `None` becomes an empty cell.
pub fn write_csv(records: &[BenchRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let fields = [
            quote(&r.instance),
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            r.algorithm.to_string(),
            num(r.value),
            num(r.bound_fwp),
            num(r.bound_fwp_prime),
            num(r.bound_2mat),
            num(r.gap_pct),
            r.time_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_with(instances: Vec<InstanceSpec>, algorithms: Vec<Algorithm>) -> BenchSpec {
        BenchSpec {
            instances,
            algorithms,
            reps: 2,
            seed: 9,
            fwp_prime: true,
            lp_bound: true,
            budget_evals: 20_000,
            threads: 1,
        }
    }

    /// The CSV with the timing column blanked, for determinism comparisons.
    fn strip_time(csv: &str) -> String {
        csv.lines()
            .map(|line| {
                let mut cells: Vec<&str> = line.split(',').collect();
                if cells.len() == 10 {
                    cells[8] = "";
                }
                cells.join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn empty_spec_gives_header_only_csv() {
        let spec = BenchSpec::default();
        let records = run_bench(&BenchSpec {
            instances: Vec::new(),
            ..spec
        });
        assert!(records.is_empty());
        assert_eq!(write_csv(&records), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn algorithm_names_round_trip() {
        for alg in Algorithm::ALL {
            assert_eq!(alg.name().parse::<Algorithm>().unwrap(), alg);
        }
        let err = "simplex".parse::<Algorithm>().unwrap_err();
        assert!(err.contains("unknown algorithm"));
        assert!(err.contains("cross_tour_ls"));
    }

    #[test]
    fn matching_rows_respect_the_bound_chain() {
        let spec = spec_with(
            vec![InstanceSpec::Uniform { n: 10 }],
            vec![
                Algorithm::Cross,
                Algorithm::CrossLs,
                Algorithm::Brute,
                Algorithm::LpOpt,
            ],
        );
        let records = run_bench(&spec);
        assert_eq!(records.len(), 4);
        for r in &records {
            assert_eq!(r.error, None, "{r:?}");
            assert_eq!(r.n, Some(10));
            assert_eq!(r.seed, Some(9));
            let value = r.value.unwrap();
            let fwp = r.bound_fwp.unwrap();
            let fwp_prime = r.bound_fwp_prime.unwrap();
            let lp = r.bound_2mat.unwrap();
            assert!(value <= lp + 1e-9);
            assert!(lp <= fwp_prime + 1e-9);
            assert!(fwp_prime <= fwp + 1e-9);
            assert!(r.gap_pct.unwrap() >= -1e-9);
            assert!(r.time_ms.unwrap() >= 0.0);
        }
        let by_name = |name: &str| records.iter().find(|r| r.algorithm == name).unwrap();
        let cross = by_name("cross").value.unwrap();
        let cross_ls = by_name("cross_ls").value.unwrap();
        let brute = by_name("brute").value.unwrap();
        let lp_opt = by_name("lp_opt").value.unwrap();
        assert!(cross <= cross_ls + 1e-9);
        assert!(cross_ls <= brute + 1e-9);
        assert!(brute <= lp_opt + 1e-9);
    }

    #[test]
    fn tour_rows_double_the_bounds() {
        let spec = spec_with(
            vec![InstanceSpec::Uniform { n: 12 }],
            vec![Algorithm::Cross, Algorithm::CrossTour],
        );
        let records = run_bench(&spec);
        let matching = &records[0];
        let tour = &records[1];
        assert_eq!(tour.algorithm, "cross_tour");
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(tour.bound_fwp.unwrap(), 2.0 * matching.bound_fwp.unwrap()) < 1e-12);
        assert!(rel(tour.bound_2mat.unwrap(), 2.0 * matching.bound_2mat.unwrap()) < 1e-12);
        assert!(tour.value.unwrap() <= tour.bound_2mat.unwrap() + 1e-9);
    }

    #[test]
    fn missing_file_yields_error_row_and_run_continues() {
        let spec = spec_with(
            vec![
                InstanceSpec::File(PathBuf::from("definitely/not/here.pts")),
                InstanceSpec::Uniform { n: 6 },
            ],
            vec![Algorithm::Cross],
        );
        let records = run_bench(&spec);
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].instance, "here");
        assert_eq!(records[0].algorithm, "");
        assert!(records[0].error.is_some());
        assert_eq!(records[0].value, None);
        assert_eq!(records[0].n, None);
        assert_eq!(records[1].error, None);
        assert_eq!(records[1].instance, "uniform-n6-s9");
        let csv = write_csv(&records);
        let error_line = csv.lines().nth(1).unwrap();
        assert_eq!(error_line, "here,,,,,,,,,");
    }

    #[test]
    fn algorithm_failures_keep_identity_columns_only() {
        let spec = spec_with(
            vec![InstanceSpec::Uniform { n: 5 }],
            vec![Algorithm::Cross, Algorithm::CrossTour],
        );
        let records = run_bench(&spec);
        assert_eq!(records.len(), 2);
        let failed = &records[0];
        assert_eq!(failed.algorithm, "cross");
        assert!(failed.error.as_deref().unwrap().contains("odd"));
        assert_eq!(failed.value, None);
        assert_eq!(failed.bound_fwp, None);
        assert_eq!(failed.gap_pct, None);
        assert_eq!(failed.n, Some(5));
        // The tour does not need even cardinality and still succeeds.
        assert_eq!(records[1].error, None);
        assert!(records[1].value.is_some());
    }

    #[test]
    fn runs_are_deterministic_up_to_timing() {
        let spec = spec_with(
            vec![
                InstanceSpec::Uniform { n: 14 },
                InstanceSpec::Clustered { n: 12, clusters: 3 },
            ],
            vec![Algorithm::CrossLs, Algorithm::CrossTourLs],
        );
        let a = strip_time(&write_csv(&run_bench(&spec)));
        let b = strip_time(&write_csv(&run_bench(&spec)));
        assert_eq!(a, b);
    }

    #[test]
    fn threaded_run_matches_sequential_run() {
        let mut spec = spec_with(
            vec![
                InstanceSpec::Uniform { n: 10 },
                InstanceSpec::Uniform { n: 12 },
                InstanceSpec::Clustered { n: 8, clusters: 2 },
            ],
            vec![Algorithm::Cross, Algorithm::CrossTour],
        );
        let sequential = strip_time(&write_csv(&run_bench(&spec)));
        spec.threads = 3;
        let threaded = strip_time(&write_csv(&run_bench(&spec)));
        assert_eq!(sequential, threaded);
    }

    #[test]
    fn generated_specs_advance_the_seed() {
        let spec = spec_with(
            vec![InstanceSpec::Uniform { n: 6 }, InstanceSpec::Uniform { n: 6 }],
            vec![Algorithm::Cross],
        );
        let records = run_bench(&spec);
        assert_eq!(records[0].seed, Some(9));
        assert_eq!(records[1].seed, Some(10));
        assert_ne!(records[0].value, records[1].value);
    }

    #[test]
    fn csv_quotes_awkward_names() {
        let record = BenchRecord {
            instance: "name,with\"stuff".to_string(),
            n: Some(4),
            algorithm: "cross",
            value: Some(1.5),
            bound_fwp: Some(2.0),
            bound_fwp_prime: None,
            bound_2mat: None,
            gap_pct: Some(100.0 * 0.5 / 1.5),
            time_ms: Some(0.1234),
            seed: None,
            error: None,
        };
        let csv = write_csv(&[record]);
        let line = csv.lines().nth(1).unwrap();
        assert!(line.starts_with("\"name,with\"\"stuff\",4,cross,1.5,2,"));
        assert!(line.ends_with(",0.123,"));
    }
}
