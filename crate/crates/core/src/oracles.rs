//! Exact references for desk-scale instances: brute-force optima, the
//! fractional matching relaxation solved via an assignment reduction, and a
//! feasible fractional subtour solution that can beat every integral tour.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geom::{angular_order, dist, is_convex_position, Point2D};
use crate::matching::Matching;
use crate::tour::Tour;

/// Largest instance `brute_matching` accepts; (n-1)!! grows too fast beyond.
pub const BRUTE_MATCHING_CAP: usize = 12;
/// Largest instance `brute_tour` accepts; (n-1)!/2 grows too fast beyond.
pub const BRUTE_TOUR_CAP: usize = 10;
/// Largest instance `lp_matching_optimum` accepts, the assignment solve is
/// cubic.
pub const LP_MATCHING_CAP: usize = 2000;
/// Largest instance `subtour_fractional_construction` accepts, cut
/// feasibility is checked over all subsets.
pub const SUBTOUR_CONSTRUCTION_CAP: usize = 16;

/// Exhaustive maximum-weight perfect matching. Partners are tried in
/// ascending index order and only strict improvements are kept, so among
/// equal-value optima the lexicographically smallest pair list wins.
pub fn brute_matching(points: &[Point2D]) -> Result<Matching> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if n % 2 != 0 {
        return Err(Error::OddCardinality { n });
    }
    if n > BRUTE_MATCHING_CAP {
        return Err(Error::CapExceeded {
            what: "brute-force matching",
            cap: BRUTE_MATCHING_CAP,
            n,
        });
    }

    fn search(
        points: &[Point2D],
        used: &mut [bool],
        pairs: &mut Vec<(usize, usize)>,
        acc: f64,
        best: &mut (f64, Vec<(usize, usize)>),
    ) {
        let i = match used.iter().position(|&u| !u) {
            Some(i) => i,
            None => {
                if acc > best.0 {
                    *best = (acc, pairs.clone());
                }
                return;
            }
        };
        used[i] = true;
        for j in i + 1..points.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            pairs.push((i, j));
            search(points, used, pairs, acc + dist(points[i], points[j]), best);
            pairs.pop();
            used[j] = false;
        }
        used[i] = false;
    }

    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut used = vec![false; n];
    search(points, &mut used, &mut Vec::new(), 0.0, &mut best);
    Matching::new(best.1, points)
}

/// Exhaustive maximum tour. The first point is pinned and each cycle is
/// enumerated in one direction only; ties keep the lexicographically
/// smallest order.
pub fn brute_tour(points: &[Point2D]) -> Result<Tour> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    if n > BRUTE_TOUR_CAP {
        return Err(Error::CapExceeded {
            what: "brute-force tour",
            cap: BRUTE_TOUR_CAP,
            n,
        });
    }

    fn search(
        points: &[Point2D],
        order: &mut Vec<usize>,
        used: &mut [bool],
        acc: f64,
        best: &mut (f64, Vec<usize>),
    ) {
        let n = points.len();
        if order.len() == n {
            // each cycle appears twice; keep the orientation with the
            // smaller second entry
            if order[1] > order[n - 1] {
                return;
            }
            let total = acc + dist(points[order[n - 1]], points[order[0]]);
            if total > best.0 {
                *best = (total, order.clone());
            }
            return;
        }
        for v in 1..n {
            if used[v] {
                continue;
            }
            used[v] = true;
            let step = dist(points[*order.last().unwrap()], points[v]);
            order.push(v);
            search(points, order, used, acc + step, best);
            order.pop();
            used[v] = false;
        }
    }

    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut used = vec![false; n];
    used[0] = true;
    search(points, &mut vec![0], &mut used, 0.0, &mut best);
    Tour::new(best.1, points)
}

/// Minimum-cost perfect assignment on a dense square matrix via the
/// potential-based Hungarian method, cubic time. Returns the assignment as
/// `row -> column`.
fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    // 1-indexed with column 0 as the sentinel of the augmenting search
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![usize::MAX; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            assignment[matched_row[j] - 1] = j - 1;
        }
    }
    assignment
}

/// A half-integral solution of the matching relaxation: edge weights in
/// {1/2, 1}, per-vertex degree exactly one.
#[derive(Debug, Clone)]
pub struct FractionalMatching {
    edges: BTreeMap<(usize, usize), f64>,
    value: f64,
}

impl FractionalMatching {
    /// Edge weights keyed by index pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.edges
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// True when every edge weight is within `tol` of one.
    pub fn is_integral(&self, tol: f64) -> bool {
        self.edges.values().all(|&w| (w - 1.0).abs() <= tol)
    }
}

/// Exact optimum of the fractional perfect matching relaxation: maximize the
/// distance-weighted edge sum subject to degree exactly one per point and
/// nonnegative edge weights.
///
/// Solved as half of a maximum assignment on the doubled instance. Self
/// assignment is excluded by a penalty larger than any tour, which is valid
/// because a fixed-point-free permutation exists for even n. The extreme
/// points of the relaxation are half-integral, so the reduction is exact.
pub fn lp_matching_optimum(points: &[Point2D]) -> Result<FractionalMatching> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if n % 2 != 0 {
        return Err(Error::OddCardinality { n });
    }
    if n > LP_MATCHING_CAP {
        return Err(Error::CapExceeded {
            what: "fractional matching optimum",
            cap: LP_MATCHING_CAP,
            n,
        });
    }
    let mut maxd = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            maxd = maxd.max(dist(points[i], points[j]));
        }
    }
    let big = (n as f64 + 1.0) * maxd + 1.0;
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { big } else { -dist(points[i], points[j]) })
                .collect()
        })
        .collect();
    let assignment = min_cost_assignment(&cost);

    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut value = 0.0;
    for (i, &j) in assignment.iter().enumerate() {
        if i == j {
            return Err(Error::Internal(format!(
                "assignment relaxation matched point {i} to itself"
            )));
        }
        let key = (i.min(j), i.max(j));
        *edges.entry(key).or_insert(0.0) += 0.5;
        value += 0.5 * dist(points[i], points[j]);
    }

    let mut degree = vec![0.0f64; n];
    for (&(i, j), &w) in &edges {
        degree[i] += w;
        degree[j] += w;
    }
    for (i, &d) in degree.iter().enumerate() {
        if (d - 1.0).abs() > 1e-9 {
            return Err(Error::Internal(format!(
                "fractional matching degree at point {i} is {d}"
            )));
        }
    }
    Ok(FractionalMatching { edges, value })
}

/// A feasible solution of the fractional subtour relaxation: degree exactly
/// two everywhere and every proper cut crossed with weight at least two.
#[derive(Debug, Clone)]
pub struct FractionalTour {
    edges: BTreeMap<(usize, usize), f64>,
    value: f64,
}

impl FractionalTour {
    /// Edge weights keyed by index pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.edges
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Builds the fractional subtour solution that puts weight 1 on every long
/// diagonal (angular rank r to r + n/2) and weight 1/2 on every near-diagonal
/// (rank r to r + n/2 - 1) of an even convex instance. Degrees and all
/// exponentially many cut constraints are verified before returning, hence
/// the size cap. On a regular hexagon its value exceeds the best tour, so the
/// relaxation has an integrality gap on convex instances.
pub fn subtour_fractional_construction(points: &[Point2D]) -> Result<FractionalTour> {
    let n = points.len();
    if n < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: n });
    }
    if n % 2 != 0 {
        return Err(Error::OddCardinality { n });
    }
    if n > SUBTOUR_CONSTRUCTION_CAP {
        return Err(Error::CapExceeded {
            what: "fractional subtour construction",
            cap: SUBTOUR_CONSTRUCTION_CAP,
            n,
        });
    }
    if !is_convex_position(points) {
        return Err(Error::NotConvex);
    }
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n as f64;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n as f64;
    let ranks = angular_order(points, Point2D::new(cx, cy));
    let half = n / 2;
    let s = half - 1;

    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut add = |a: usize, b: usize, w: f64| {
        let key = (a.min(b), a.max(b));
        *edges.entry(key).or_insert(0.0) += w;
    };
    for r in 0..half {
        add(ranks[r], ranks[r + half], 1.0);
    }
    for r in 0..n {
        add(ranks[r], ranks[(r + s) % n], 0.5);
    }

    let mut degree = vec![0.0f64; n];
    let mut value = 0.0;
    for (&(i, j), &w) in &edges {
        degree[i] += w;
        degree[j] += w;
        value += w * dist(points[i], points[j]);
    }
    for (i, &d) in degree.iter().enumerate() {
        if (d - 2.0).abs() > 1e-9 {
            return Err(Error::Internal(format!(
                "subtour construction degree at point {i} is {d}"
            )));
        }
    }
    // proper cuts only; fixing point 0 inside S halves the enumeration
    for mask in 1u32..(1u32 << (n - 1)) {
        let s_mask = (mask << 1) | 1;
        if s_mask == (1u32 << n) - 1 {
            continue;
        }
        let mut cut = 0.0;
        for (&(i, j), &w) in &edges {
            if (s_mask >> i) & 1 != (s_mask >> j) & 1 {
                cut += w;
            }
        }
        if cut < 2.0 - 1e-9 {
            let inside: Vec<usize> = (0..n).filter(|&i| (s_mask >> i) & 1 == 1).collect();
            return Err(Error::Internal(format!(
                "subtour construction cut {inside:?} has weight {cut}"
            )));
        }
    }
    Ok(FractionalTour { edges, value })
}
