//! Maximum-weight perfect matching: the antipodal-pairing heuristic around a
//! Weber center, a 2-exchange local search, and a per-instance certificate
//! factor for the star bound.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{angular_order, dist, Point2D};
use crate::weber::{weber_combinatorial, weber_numeric_default, WeberResult};
use crate::SearchBudget;

/// A perfect matching on point indices. Pairs are stored with the smaller
/// index first and sorted, so equal matchings compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
    value: f64,
}

impl Matching {
    /// Validates that `pairs` is a perfect matching of `points` (every index
    /// in `0..points.len()` exactly once) and computes its total length.
    pub fn new(pairs: Vec<(usize, usize)>, points: &[Point2D]) -> Result<Self> {
        let n = points.len();
        if n % 2 != 0 {
            return Err(Error::OddCardinality { n });
        }
        if pairs.len() * 2 != n {
            return Err(Error::InvalidMatching(format!(
                "{} pairs cannot cover {} points",
                pairs.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        let mut normalized = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::InvalidMatching(format!(
                    "pair ({a}, {b}) out of range for {n} points"
                )));
            }
            if a == b {
                return Err(Error::InvalidMatching(format!("self-pair ({a}, {b})")));
            }
            for v in [a, b] {
                if seen[v] {
                    return Err(Error::InvalidMatching(format!("index {v} matched twice")));
                }
                seen[v] = true;
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        let value = normalized
            .iter()
            .map(|&(a, b)| dist(points[a], points[b]))
            .sum();
        Ok(Matching {
            pairs: normalized,
            value,
        })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Which center the pairing heuristic organizes itself around.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterMode {
    Numeric,
    Combinatorial,
}

/// Pairs each point with its angular antipode around the chosen Weber center:
/// rank i with rank i + n/2 in the angular order. Every matched segment
/// passes near the center, which is what ties the matching value to the star
/// bound. Runs in O(n log n); returns the matching and the center it used.
pub fn cross_matching_with_center(
    points: &[Point2D],
    mode: CenterMode,
) -> Result<(Matching, WeberResult)> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if n % 2 != 0 {
        return Err(Error::OddCardinality { n });
    }
    let center = match mode {
        CenterMode::Numeric => weber_numeric_default(points)?,
        CenterMode::Combinatorial => weber_combinatorial(points)?,
    };
    let matching = cross_matching_at(points, center.center)?;
    Ok((matching, center))
}

/// `cross_matching_with_center` around the numeric center, without the
/// center in the result.
pub fn cross_matching(points: &[Point2D]) -> Result<Matching> {
    cross_matching_with_center(points, CenterMode::Numeric).map(|(m, _)| m)
}

/// The antipodal pairing around an explicitly provided center.
pub fn cross_matching_at(points: &[Point2D], center: Point2D) -> Result<Matching> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if n % 2 != 0 {
        return Err(Error::OddCardinality { n });
    }
    let order = angular_order(points, center);
    let half = n / 2;
    let pairs: Vec<(usize, usize)> = (0..half).map(|r| (order[r], order[r + half])).collect();
    Matching::new(pairs, points)
}

/// Hill-climbs `start` with pairwise 2-exchanges, first improvement in a
/// random scan order. At a local optimum the current matching is recorded and
/// two random pairs are re-wired blindly to escape. The best matching seen is
/// returned; it is never worse than `start`. The budget counts exchange
/// evaluations.
pub fn matching_local_search(
    points: &[Point2D],
    start: &Matching,
    budget: &SearchBudget,
) -> Result<Matching> {
    let n = points.len();
    if start.pairs.len() * 2 != n {
        return Err(Error::InvalidMatching(format!(
            "start matching covers {} points, instance has {n}",
            start.pairs.len() * 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let started = std::time::Instant::now();
    let mut pairs = start.pairs.clone();
    let m = pairs.len();
    let mut current = start.value;
    let mut best_pairs = pairs.clone();
    let mut best = current;
    // Improvements below float noise would spin the scan forever.
    let min_gain = 1e-12 * (1.0 + current.abs());

    if m < 2 {
        return Ok(start.clone());
    }

    let mut combos: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
        .collect();
    let mut evals: u64 = 0;

    'outer: while evals < budget.evaluations {
        combos.shuffle(&mut rng);
        let mut improved = false;
        for &(i, j) in &combos {
            if evals >= budget.evaluations {
                break 'outer;
            }
            if budget.time_limit.map_or(false, |t| started.elapsed() >= t) {
                break 'outer;
            }
            evals += 1;
            let (a, b) = pairs[i];
            let (c, d) = pairs[j];
            let old = dist(points[a], points[b]) + dist(points[c], points[d]);
            let ac_bd = dist(points[a], points[c]) + dist(points[b], points[d]);
            let ad_bc = dist(points[a], points[d]) + dist(points[b], points[c]);
            let (gain, rewired) = if ac_bd >= ad_bc {
                (ac_bd - old, [(a, c), (b, d)])
            } else {
                (ad_bc - old, [(a, d), (b, c)])
            };
            if gain > min_gain {
                pairs[i] = rewired[0];
                pairs[j] = rewired[1];
                current += gain;
                improved = true;
                break;
            }
        }
        if !improved {
            // Local optimum: keep it if it is the best so far, then kick.
            if current > best {
                best = current;
                best_pairs = pairs.clone();
            }
            let i = rng.gen_range(0..m);
            let mut j = rng.gen_range(0..m - 1);
            if j >= i {
                j += 1;
            }
            let (a, b) = pairs[i];
            let (c, d) = pairs[j];
            let old = dist(points[a], points[b]) + dist(points[c], points[d]);
            let rewired = if rng.gen::<bool>() {
                [(a, c), (b, d)]
            } else {
                [(a, d), (b, c)]
            };
            pairs[i] = rewired[0];
            pairs[j] = rewired[1];
            current += dist(points[rewired[0].0], points[rewired[0].1])
                + dist(points[rewired[1].0], points[rewired[1].1])
                - old;
        }
    }
    if current > best {
        best = current;
        best_pairs = pairs;
    }
    let result = Matching::new(best_pairs, points)?;
    debug_assert!((result.value - best).abs() <= 1e-6 * (1.0 + best.abs()));
    Ok(result)
}

/// Worst-case ratio by which the star value at `center` can exceed the
/// matching value, from the opening angles of the matched pairs: a pair seen
/// under angle phi satisfies
/// `d(c,p) + d(c,q) <= sqrt(2 / (1 - cos phi)) * d(p,q)`.
/// The maximum of that factor over all pairs certifies
/// `fwp_value(points, center) <= factor * matching.value()`. A pair with a
/// point on the center has no angle; its rays already sum to the pair length,
/// covered by factor 2. Pairs seen under angle zero give infinity.
pub fn certify_ratio(points: &[Point2D], center: Point2D, matching: &Matching) -> f64 {
    let mut worst: f64 = 1.0;
    for &(a, b) in &matching.pairs {
        let ux = points[a].x - center.x;
        let uy = points[a].y - center.y;
        let vx = points[b].x - center.x;
        let vy = points[b].y - center.y;
        let nu = (ux * ux + uy * uy).sqrt();
        let nv = (vx * vx + vy * vy).sqrt();
        let factor = if nu == 0.0 || nv == 0.0 {
            2.0
        } else {
            let cos_phi = ((ux * vx + uy * vy) / (nu * nv)).clamp(-1.0, 1.0);
            (2.0 / (1.0 - cos_phi)).sqrt()
        };
        worst = worst.max(factor);
    }
    worst
}
