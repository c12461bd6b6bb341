//! Instance construction: seeded generators, a TSPLIB coordinate reader and
//! a minimal native text format.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{Instance, InstanceSource, Point2D};

pub const DEFAULT_CLUSTER_RADIUS: f64 = 0.05;

/// Uniform points in the unit square. For each point x is drawn before y
/// from `ChaCha8Rng::seed_from_u64(seed)`, so output is stable for a given
/// seed.
pub fn gen_uniform(n: usize, seed: u64) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidConfig("point count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            let x = rng.gen::<f64>();
            let y = rng.gen::<f64>();
            Point2D::new(x, y)
        })
        .collect();
    Ok(Instance {
        name: format!("uniform-n{n}-s{seed}"),
        points,
        source: InstanceSource::Uniform,
        seed: Some(seed),
    })
}

/// Configuration for `gen_clustered`.
#[derive(Debug, Clone)]
pub struct ClusterConfig {
    pub n: usize,
    pub clusters: usize,
    pub radius: f64,
    pub seed: u64,
}

impl ClusterConfig {
    pub fn new(n: usize, clusters: usize, seed: u64) -> Self {
        ClusterConfig {
            n,
            clusters,
            radius: DEFAULT_CLUSTER_RADIUS,
            seed,
        }
    }
}

/// Clustered points in the unit square: cluster centers are uniform in
/// `[radius, 1 - radius]^2`, each point picks a uniform cluster index, a
/// uniform distance in `[0, radius)` and a uniform angle, in that order.
/// Centers come from stream 0 of the seed and points from stream 1, so the
/// point stream does not shift when the cluster count changes.
pub fn gen_clustered(cfg: &ClusterConfig) -> Result<Instance> {
    if cfg.n == 0 {
        return Err(Error::InvalidConfig("point count must be positive".into()));
    }
    if cfg.clusters == 0 {
        return Err(Error::InvalidConfig("cluster count must be positive".into()));
    }
    if !(cfg.radius > 0.0 && cfg.radius < 0.5) {
        return Err(Error::InvalidConfig(format!(
            "cluster radius must lie strictly between 0 and 0.5, got {}",
            cfg.radius
        )));
    }
    let mut center_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    center_rng.set_stream(0);
    let span = 1.0 - 2.0 * cfg.radius;
    let centers: Vec<Point2D> = (0..cfg.clusters)
        .map(|_| {
            let x = cfg.radius + span * center_rng.gen::<f64>();
            let y = cfg.radius + span * center_rng.gen::<f64>();
            Point2D::new(x, y)
        })
        .collect();

    let mut point_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    point_rng.set_stream(1);
    let points = (0..cfg.n)
        .map(|_| {
            let c = centers[point_rng.gen_range(0..cfg.clusters)];
            let rho = cfg.radius * point_rng.gen::<f64>();
            let theta = 2.0 * std::f64::consts::PI * point_rng.gen::<f64>();
            Point2D::new(c.x + rho * theta.cos(), c.y + rho * theta.sin())
        })
        .collect();
    Ok(Instance {
        name: format!("clustered-n{}-k{}-s{}", cfg.n, cfg.clusters, cfg.seed),
        points,
        source: InstanceSource::Clustered,
        seed: Some(cfg.seed),
    })
}

/// Removes the final point when the count is odd, for running matchings on
/// odd inputs. The name records the removal.
pub fn drop_last_if_odd(mut inst: Instance) -> Instance {
    if inst.len() % 2 == 1 {
        inst.points.pop();
        inst.name.push_str("-minus-last");
    }
    inst
}

/// Reads the coordinate subset of the TSPLIB format: header keywords, a
/// NODE_COORD_SECTION with `id x y` lines and an optional EOF marker. Only
/// TSP instances with EDGE_WEIGHT_TYPE EUC_2D or CEIL_2D are accepted, and
/// only the coordinates are kept. Errors carry 1-based line numbers.
pub fn parse_tsplib(text: &str) -> Result<Instance> {
    let mut name: Option<String> = None;
    let mut dimension: Option<usize> = None;
    let mut points: Vec<Option<Point2D>> = Vec::new();
    let mut in_coords = false;
    let mut seen = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "EOF" {
            break;
        }
        if in_coords {
            let mut it = trimmed.split_whitespace();
            let id: usize = it
                .next()
                .unwrap()
                .parse()
                .map_err(|_| Error::Parse {
                    line,
                    message: format!("expected a point id, got {trimmed:?}"),
                })?;
            let mut coord = |axis: &str| -> Result<f64> {
                it.next()
                    .ok_or_else(|| Error::Parse {
                        line,
                        message: format!("missing {axis} coordinate"),
                    })?
                    .parse()
                    .map_err(|_| Error::Parse {
                        line,
                        message: format!("malformed {axis} coordinate"),
                    })
            };
            let x = coord("x")?;
            let y = coord("y")?;
            let n = points.len();
            if id == 0 || id > n {
                return Err(Error::Parse {
                    line,
                    message: format!("point id {id} outside 1..={n}"),
                });
            }
            if points[id - 1].is_some() {
                return Err(Error::Parse {
                    line,
                    message: format!("point id {id} given twice"),
                });
            }
            points[id - 1] = Some(Point2D::try_new(x, y).map_err(|_| Error::Parse {
                line,
                message: format!("non-finite coordinates for point {id}"),
            })?);
            seen += 1;
            continue;
        }

        let (key, value) = match trimmed.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (trimmed, ""),
        };
        match key {
            "NAME" => name = Some(value.to_string()),
            "TYPE" => {
                if !value.starts_with("TSP") {
                    return Err(Error::UnsupportedFormat(format!(
                        "instance type {value:?}, only TSP is supported"
                    )));
                }
            }
            "DIMENSION" => {
                let n: usize = value.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("malformed DIMENSION {value:?}"),
                })?;
                if n == 0 {
                    return Err(Error::Parse {
                        line,
                        message: "DIMENSION must be positive".into(),
                    });
                }
                dimension = Some(n);
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EUC_2D" && value != "CEIL_2D" {
                    return Err(Error::UnsupportedFormat(format!(
                        "edge weight type {value:?}, only EUC_2D and CEIL_2D are supported"
                    )));
                }
            }
            "NODE_COORD_SECTION" => {
                let n = dimension.ok_or(Error::Parse {
                    line,
                    message: "NODE_COORD_SECTION before DIMENSION".into(),
                })?;
                points = vec![None; n];
                in_coords = true;
            }
            // headers we carry no meaning for (COMMENT and friends)
            _ => {}
        }
    }

    let n = dimension.ok_or(Error::Parse {
        line: text.lines().count() + 1,
        message: "missing DIMENSION".into(),
    })?;
    if seen != n {
        return Err(Error::Parse {
            line: text.lines().count() + 1,
            message: format!("NODE_COORD_SECTION has {seen} of {n} points"),
        });
    }
    Ok(Instance {
        name: name.unwrap_or_else(|| "tsplib".into()),
        points: points.into_iter().map(Option::unwrap).collect(),
        source: InstanceSource::Tsplib,
        seed: None,
    })
}

/// Reads the native format: a count line followed by that many `x y` lines.
/// Blank lines and lines starting with `#` are ignored. Errors carry 1-based
/// line numbers.
pub fn parse_native(text: &str, name: impl Into<String>) -> Result<Instance> {
    let mut expected: Option<usize> = None;
    let mut points: Vec<Point2D> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some(n) = expected else {
            let n: usize = trimmed.parse().map_err(|_| Error::Parse {
                line,
                message: format!("expected a point count, got {trimmed:?}"),
            })?;
            expected = Some(n);
            continue;
        };
        if points.len() == n {
            return Err(Error::Parse {
                line,
                message: format!("more than the declared {n} points"),
            });
        }
        let mut it = trimmed.split_whitespace();
        let parse_coord = |tok: Option<&str>, axis: &str| -> Result<f64> {
            tok.ok_or_else(|| Error::Parse {
                line,
                message: format!("missing {axis} coordinate"),
            })?
            .parse()
            .map_err(|_| Error::Parse {
                line,
                message: format!("malformed {axis} coordinate"),
            })
        };
        let x = parse_coord(it.next(), "x")?;
        let y = parse_coord(it.next(), "y")?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line,
                message: "more than two coordinates on a point line".into(),
            });
        }
        points.push(Point2D::try_new(x, y).map_err(|_| Error::Parse {
            line,
            message: "non-finite coordinates".into(),
        })?);
    }
    let n = expected.ok_or(Error::Parse {
        line: text.lines().count() + 1,
        message: "missing point count line".into(),
    })?;
    if points.len() != n {
        return Err(Error::Parse {
            line: text.lines().count() + 1,
            message: format!("declared {n} points, found {}", points.len()),
        });
    }
    Ok(Instance {
        name: name.into(),
        points,
        source: InstanceSource::Literal,
        seed: None,
    })
}

/// Writes the native format. Coordinates use the shortest representation
/// that round-trips, so `parse_native` recovers them exactly.
pub fn write_native(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", inst.len());
    for p in &inst.points {
        let _ = writeln!(out, "{} {}", p.x, p.y);
    }
    out
}

/// Loads an instance from disk, picking the parser by extension: `.tsp` is
/// TSPLIB, anything else the native format named after the file stem.
pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    let is_tsplib = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("tsp"))
        .unwrap_or(false);
    if is_tsplib {
        parse_tsplib(&text)
    } else {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "instance".into());
        parse_native(&text, stem)
    }
}
