//! Planar points and the geometric primitives shared by every solver:
//! Euclidean distance, angular sorting around a center, and a strict
//! convex-position test.

use crate::error::{Error, Result};

/// A point in the plane. Coordinates must be finite; `new` enforces this and
/// parsers validate before constructing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    /// Panics if either coordinate is NaN or infinite.
    pub fn new(x: f64, y: f64) -> Self {
        assert!(
            x.is_finite() && y.is_finite(),
            "point coordinates must be finite, got ({x}, {y})"
        );
        Point2D { x, y }
    }

    /// Non-panicking constructor for untrusted input.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point2D { x, y })
        } else {
            Err(Error::Internal(format!(
                "non-finite point coordinates ({x}, {y})"
            )))
        }
    }
}

/// Where an instance came from. Generated instances keep their seed so runs
/// can be reproduced exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceSource {
    Tsplib,
    Uniform,
    Clustered,
    Literal,
}

/// A named point set. Point order is part of the identity of an instance:
/// generators and parsers produce it deterministically.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub points: Vec<Point2D>,
    pub source: InstanceSource,
    pub seed: Option<u64>,
}

impl Instance {
    pub fn literal(name: impl Into<String>, points: Vec<Point2D>) -> Self {
        Instance {
            name: name.into(),
            points,
            source: InstanceSource::Literal,
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Euclidean distance.
#[inline]
pub fn dist(p: Point2D, q: Point2D) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    (dx * dx + dy * dy).sqrt()
}

/// Diagonal of the bounding box; zero for an empty or single-point set.
/// Used as the natural length scale when picking tolerances.
pub fn bbox_diagonal(points: &[Point2D]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for p in points {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    dist(Point2D::new(min_x, min_y), Point2D::new(max_x, max_y))
}

/// Indices of `points` sorted by angle around `center`.
///
/// Angles are measured with `atan2` in (-pi, pi]. Ties on equal angle are
/// broken by increasing distance from the center, then by original index.
/// Points exactly coincident with the center come first, in index order,
/// so the result is a total order on any input.
///
/// The cycle is cut at the widest angular gap (ties keep the cut on the
/// negative x axis). Consumers that treat the result cyclically are
/// unaffected, but the rule matters when the center lies on a point of the
/// set's hull: the remaining points then span at most a half turn, and
/// cutting anywhere inside that span would order them inconsistently with
/// their cyclic order around the hull. The coincident points slot into the
/// wide gap the center itself faces.
pub fn angular_order(points: &[Point2D], center: Point2D) -> Vec<usize> {
    let mut coincident: Vec<usize> = Vec::new();
    // key: (angle, squared distance, index); squared distance orders ties
    // the same way distance does
    let mut keys: Vec<(f64, f64, usize)> = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let dx = p.x - center.x;
        let dy = p.y - center.y;
        if dx == 0.0 && dy == 0.0 {
            coincident.push(i);
        } else {
            let mut a = dy.atan2(dx);
            // atan2 can return -pi for dy = -0.0; fold onto +pi so the
            // range is exactly (-pi, pi].
            if a == -std::f64::consts::PI {
                a = std::f64::consts::PI;
            }
            keys.push((a, dx * dx + dy * dy, i));
        }
    }
    keys.sort_unstable_by(|a, b| a.partial_cmp(b).expect("angles are finite"));
    if keys.len() >= 2 {
        let wrap = keys[0].0 + 2.0 * std::f64::consts::PI - keys[keys.len() - 1].0;
        let mut widest = wrap;
        let mut cut = 0usize;
        for i in 1..keys.len() {
            let gap = keys[i].0 - keys[i - 1].0;
            if gap > widest {
                widest = gap;
                cut = i;
            }
        }
        keys.rotate_left(cut);
    }
    coincident.extend(keys.into_iter().map(|(_, _, i)| i));
    coincident
}

fn cross(o: Point2D, a: Point2D, b: Point2D) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// True when every point is a vertex of the convex hull of the set, with no
/// duplicates and no three collinear hull points.
///
/// Collinearity is decided with a scale-aware tolerance: a cross product of
/// magnitude at most `1e-9 * (bbox diagonal)^2` counts as zero. The test is
/// invariant under rigid motions and uniform scaling up to that tolerance.
/// Fewer than three points are not considered to be in convex position.
pub fn is_convex_position(points: &[Point2D]) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    let diag = bbox_diagonal(points);
    let tol = 1e-9 * diag * diag;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| {
        (points[a].x, points[a].y)
            .partial_cmp(&(points[b].x, points[b].y))
            .unwrap()
    });
    for w in idx.windows(2) {
        if points[w[0]] == points[w[1]] {
            return false;
        }
    }

    // Monotone chain keeping only strict turns: collinear-within-tolerance
    // middles get popped, so the hull size equals n exactly when the set is
    // strictly convex.
    let chain = |order: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut hull: Vec<usize> = Vec::new();
        for i in order {
            while hull.len() >= 2 {
                let o = points[hull[hull.len() - 2]];
                let a = points[hull[hull.len() - 1]];
                if cross(o, a, points[i]) <= tol {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(i);
        }
        hull
    };

    let lower = chain(&mut idx.iter().copied());
    let upper = chain(&mut idx.iter().rev().copied());
    // Chain endpoints are shared between the two halves.
    lower.len() + upper.len() - 2 == n
}
