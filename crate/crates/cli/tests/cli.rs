//! End-to-end tests that run the `maxgeom` binary as a subprocess and check
//! stdout, stderr, produced files and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_maxgeom"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawning maxgeom")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

/// Value of the first `key <rest>` line in the output.
fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|line| line.strip_prefix(&format!("{key} ")))
        .unwrap_or_else(|| panic!("no `{key}` line in:\n{text}"))
        .to_string()
}

fn num_field(text: &str, key: &str) -> f64 {
    field(text, key).parse().expect("numeric field")
}

/// Fresh scratch directory per test.
fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("maxgeom-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("creating scratch dir");
    dir
}

fn write_square(dir: &std::path::Path) -> PathBuf {
    let path = dir.join("square.pts");
    std::fs::write(&path, "4\n0 0\n1 0\n1 1\n0 1\n").expect("writing square");
    path
}

fn write_hexagon(dir: &std::path::Path) -> PathBuf {
    let path = dir.join("hexagon.pts");
    let r3 = 3.0f64.sqrt() / 2.0;
    let mut text = String::from("6\n");
    for (x, y) in [
        (1.0, 0.0),
        (0.5, r3),
        (-0.5, r3),
        (-1.0, 0.0),
        (-0.5, -r3),
        (0.5, -r3),
    ] {
        text.push_str(&format!("{x} {y}\n"));
    }
    std::fs::write(&path, text).expect("writing hexagon");
    path
}

#[test]
fn gen_is_deterministic_and_well_formed() {
    let a = run(&["gen", "--kind", "uniform", "--n", "8", "--seed", "3"]);
    let b = run(&["gen", "--kind", "uniform", "--n", "8", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("8"));
    assert_eq!(lines.count(), 8);

    let c = run(&[
        "gen", "--kind", "clustered", "--n", "9", "--k", "2", "--seed", "5",
    ]);
    assert!(c.status.success());
    assert_eq!(stdout(&c).lines().next(), Some("9"));
}

#[test]
fn gen_solve_matching_round_trip() {
    let dir = scratch("roundtrip");
    let path = dir.join("u10.pts");
    let gen = run(&[
        "gen",
        "--kind",
        "uniform",
        "--n",
        "10",
        "--seed",
        "7",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    assert_eq!(gen.stdout.len(), 0);

    let solve = run(&["solve-matching", "--input", path.to_str().unwrap()]);
    assert!(solve.status.success(), "stderr: {}", stderr(&solve));
    let text = stdout(&solve);
    assert_eq!(field(&text, "instance"), "u10");
    assert_eq!(field(&text, "n"), "10");
    let value = num_field(&text, "value");
    let bound = num_field(&text, "bound_fwp");
    let gap = num_field(&text, "gap_pct");
    assert!(value > 0.0);
    assert!(value <= bound + 1e-9);
    // The displayed percentage is rounded to two decimals.
    assert!((gap - 100.0 * (bound - value) / value).abs() <= 0.005 + 1e-9);
}

#[test]
fn solve_matching_pairs_and_local_search() {
    let dir = scratch("pairs");
    let square = write_square(&dir);
    let out = run(&[
        "solve-matching",
        "--input",
        square.to_str().unwrap(),
        "--local-search",
        "--budget",
        "5000",
        "--pairs",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value = num_field(&text, "value");
    assert!((value - 2.0 * 2.0f64.sqrt()).abs() < 1e-9);
    assert!(num_field(&text, "start_value") <= value + 1e-9);
    let pairs: Vec<&str> = text.lines().filter(|l| l.starts_with("pair ")).collect();
    assert_eq!(pairs.len(), 2);
}

#[test]
fn solve_matching_rejects_odd_unless_dropped() {
    let dir = scratch("odd");
    let path = dir.join("odd7.pts");
    let gen = run(&[
        "gen",
        "--kind",
        "uniform",
        "--n",
        "7",
        "--seed",
        "1",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(gen.status.success());

    let refused = run(&["solve-matching", "--input", path.to_str().unwrap()]);
    assert_eq!(refused.status.code(), Some(2));
    assert!(stderr(&refused).contains("odd"));

    let dropped = run(&[
        "solve-matching",
        "--input",
        path.to_str().unwrap(),
        "--drop-odd",
    ]);
    assert!(dropped.status.success());
    let text = stdout(&dropped);
    assert_eq!(field(&text, "n"), "6");
    assert_eq!(field(&text, "instance"), "odd7-minus-last");
}

#[test]
fn solve_tour_reports_doubled_star_bound_and_order() {
    let dir = scratch("tour");
    let hexagon = write_hexagon(&dir);
    let out = run(&["solve-tour", "--input", hexagon.to_str().unwrap(), "--order"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value = num_field(&text, "value");
    let bound = num_field(&text, "bound_2fwp");
    assert!((value - (4.0 + 4.0 * 3.0f64.sqrt())).abs() < 1e-9);
    assert!((bound - 12.0).abs() < 1e-9);
    let order: Vec<usize> = field(&text, "order")
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    let mut sorted = order.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, (0..6).collect::<Vec<_>>());
    assert_eq!(order[0], 0);
}

#[test]
fn bound_command_reports_both_bounds() {
    let dir = scratch("bound");
    let square = write_square(&dir);
    let out = run(&["bound", "--input", square.to_str().unwrap(), "--improved"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let fwp = num_field(&text, "bound_fwp");
    let prime = num_field(&text, "bound_fwp_prime");
    assert!((fwp - 2.0 * 2.0f64.sqrt()).abs() < 1e-9);
    assert!(prime <= fwp + 1e-12);
    let center = field(&text, "center");
    let coords: Vec<f64> = center
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert!((coords[0] - 0.5).abs() < 1e-6);
    assert!((coords[1] - 0.5).abs() < 1e-6);
    assert_eq!(field(&text, "converged"), "true");

    let comb = run(&[
        "bound",
        "--input",
        square.to_str().unwrap(),
        "--center",
        "combinatorial",
    ]);
    assert!(comb.status.success());
    assert_eq!(field(&stdout(&comb), "center_method"), "combinatorial");
}

#[test]
fn exact_values_match_known_instances() {
    let dir = scratch("exact");
    let square = write_square(&dir);
    let hexagon = write_hexagon(&dir);

    let matching = run(&[
        "exact",
        "--input",
        square.to_str().unwrap(),
        "--what",
        "matching",
    ]);
    assert!(matching.status.success());
    let text = stdout(&matching);
    assert!((num_field(&text, "value") - 2.0 * 2.0f64.sqrt()).abs() < 1e-9);
    assert!(text.contains("pair 0 2 "));
    assert!(text.contains("pair 1 3 "));

    let tour = run(&["exact", "--input", square.to_str().unwrap(), "--what", "tour"]);
    assert!(tour.status.success());
    let text = stdout(&tour);
    assert!((num_field(&text, "value") - (2.0 + 2.0 * 2.0f64.sqrt())).abs() < 1e-9);
    assert_eq!(field(&text, "order"), "0 1 3 2");

    let lp = run(&[
        "exact",
        "--input",
        square.to_str().unwrap(),
        "--what",
        "lp-matching",
    ]);
    assert!(lp.status.success());
    let text = stdout(&lp);
    assert!((num_field(&text, "value") - 2.0 * 2.0f64.sqrt()).abs() < 1e-9);
    assert_eq!(field(&text, "integral"), "true");
    assert!(text.contains("edge 0 2 1"));

    let subtour = run(&[
        "exact",
        "--input",
        hexagon.to_str().unwrap(),
        "--what",
        "subtour",
    ]);
    assert!(subtour.status.success());
    let text = stdout(&subtour);
    assert!((num_field(&text, "value") - (6.0 + 3.0 * 3.0f64.sqrt())).abs() < 1e-9);
    assert_eq!(text.lines().filter(|l| l.starts_with("edge ")).count(), 9);
}

#[test]
fn exact_tour_above_cap_is_a_data_error() {
    let dir = scratch("cap");
    let path = dir.join("u12.pts");
    assert!(run(&[
        "gen",
        "--kind",
        "uniform",
        "--n",
        "12",
        "--seed",
        "2",
        "-o",
        path.to_str().unwrap(),
    ])
    .status
    .success());
    let out = run(&["exact", "--input", path.to_str().unwrap(), "--what", "tour"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("at most 10"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["gen", "--kind", "uniform"]).status.code(), Some(1));
    assert_eq!(run(&["bench", "--algo", "simplex"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn unreadable_instance_exits_two() {
    let out = run(&["solve-matching", "--input", "definitely/not/here.pts"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!stderr(&out).is_empty());

    let dir = scratch("malformed");
    let path = dir.join("bad.pts");
    std::fs::write(&path, "3\n0 0\n1 nope\n2 2\n").unwrap();
    let out = run(&["bound", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"));
}

#[test]
fn bench_reports_csv_with_fixed_header() {
    let out = run(&[
        "bench",
        "--uniform",
        "8",
        "--uniform",
        "10",
        "--clustered",
        "8:2",
        "--algo",
        "cross,cross_tour",
        "--reps",
        "2",
        "--seed",
        "4",
        "--fwp-prime",
        "--lp-bound",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "instance,n,algorithm,value,bound_fwp,bound_fwp_prime,bound_2mat,gap_pct,time_ms,seed"
    );
    assert_eq!(lines.len(), 1 + 3 * 2);
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), 10);
    }
    assert!(lines[1].starts_with("uniform-n8-s4,8,cross,"));
    assert!(lines[2].starts_with("uniform-n8-s4,8,cross_tour,"));
    assert!(lines[5].starts_with("clustered-n8-k2-s6,8,cross,"));
}

#[test]
fn bench_is_deterministic_up_to_timing() {
    let args = [
        "bench",
        "--uniform",
        "12",
        "--algo",
        "cross_ls,cross_tour_ls",
        "--budget",
        "20000",
        "--threads",
        "2",
    ];
    let strip = |text: String| -> String {
        text.lines()
            .map(|line| {
                let mut cells: Vec<&str> = line.split(',').collect();
                cells[8] = "";
                cells.join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = strip(stdout(&run(&args)));
    let b = strip(stdout(&run(&args)));
    assert_eq!(a, b);
}

#[test]
fn bench_missing_file_row_does_not_stop_the_run() {
    let out = run(&[
        "bench",
        "--input",
        "nope/missing.pts",
        "--uniform",
        "6",
        "--algo",
        "cross",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "missing,,,,,,,,,");
    assert!(lines[2].starts_with("uniform-n6-s0,6,cross,"));
    assert!(stderr(&out).contains("missing"));
}

#[test]
fn bench_without_instances_prints_header_only() {
    let out = run(&["bench", "--algo", "cross,brute"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text,
        "instance,n,algorithm,value,bound_fwp,bound_fwp_prime,bound_2mat,gap_pct,time_ms,seed\n"
    );
}

#[test]
fn render_produces_deterministic_svg() {
    let dir = scratch("render");
    let square = write_square(&dir);
    let svg_path = dir.join("square.svg");
    let to_file = run(&[
        "render",
        "--input",
        square.to_str().unwrap(),
        "--overlay",
        "matching",
        "-o",
        svg_path.to_str().unwrap(),
    ]);
    assert!(to_file.status.success());
    let written = std::fs::read_to_string(&svg_path).unwrap();
    assert!(written.starts_with("<?xml version=\"1.0\""));
    assert_eq!(written.matches("<circle").count(), 4);
    assert_eq!(written.matches("<line").count(), 2);

    let a = run(&[
        "render",
        "--input",
        square.to_str().unwrap(),
        "--overlay",
        "tour",
    ]);
    let b = run(&[
        "render",
        "--input",
        square.to_str().unwrap(),
        "--overlay",
        "tour",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).matches("<line").count(), 4);

    let plain = run(&["render", "--input", square.to_str().unwrap()]);
    assert!(plain.status.success());
    assert_eq!(stdout(&plain).matches("<line").count(), 0);
}
