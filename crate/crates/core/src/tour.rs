//! Maximum tours: the antipodal step heuristic around a Weber center, a
//! maximizing 2-opt local search, and the enumeration of locally optimal
//! tours on convex point sets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{angular_order, dist, is_convex_position, Point2D};
use crate::weber::{weber_numeric_default, WeberResult};
use crate::SearchBudget;

/// A Hamiltonian cycle over point indices, stored in canonical form: the
/// cycle is rotated to start at index 0 and oriented so the second entry is
/// smaller than the last. Equal cycles therefore compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    order: Vec<usize>,
    value: f64,
}

impl Tour {
    /// Validates that `order` is a permutation of `0..points.len()` with at
    /// least three entries, canonicalizes it and computes the cycle length.
    pub fn new(order: Vec<usize>, points: &[Point2D]) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(Error::TooFewPoints { needed: 3, got: n });
        }
        if order.len() != n {
            return Err(Error::InvalidTour(format!(
                "order has {} entries for {} points",
                order.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n {
                return Err(Error::InvalidTour(format!("index {v} out of range")));
            }
            if seen[v] {
                return Err(Error::InvalidTour(format!("index {v} visited twice")));
            }
            seen[v] = true;
        }
        let mut order = order;
        let zero_at = order.iter().position(|&v| v == 0).unwrap();
        order.rotate_left(zero_at);
        if order[1] > order[n - 1] {
            order[1..].reverse();
        }
        let value = order
            .iter()
            .zip(order.iter().cycle().skip(1))
            .map(|(&a, &b)| dist(points[a], points[b]))
            .sum();
        Ok(Tour { order, value })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Long tour around the numeric Weber center. Returns the tour and the center
/// it used.
///
/// Odd n: angular rank t is followed by rank t + (n-1)/2, a single circulant
/// cycle in which consecutive tour points are nearly antipodal.
///
/// Even n: start from the near-diagonal 2-factor (rank r joined to rank
/// r + n/2 - 1), total length L, then apply the one 2-exchange that swaps two
/// near-diagonals for two adjacent full diagonals, picking the position i
/// maximizing the gain
/// `D = d(i, i+n/2) + d(i+1, i+1+n/2) - d(i, i+n/2+1) - d(i+1, i+n/2)`
/// (indices are angular ranks mod n, ties to the smallest i). The exchange
/// also stitches the 2-factor's two cycles together when n = 2 mod 4; the
/// result is checked to be one cycle and the tour value equals L + D.
pub fn cross_tour_with_center(points: &[Point2D]) -> Result<(Tour, WeberResult)> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let center = weber_numeric_default(points)?;
    let tour = cross_tour_at(points, center.center)?;
    Ok((tour, center))
}

/// `cross_tour_with_center` without the center in the result.
pub fn cross_tour(points: &[Point2D]) -> Result<Tour> {
    cross_tour_with_center(points).map(|(t, _)| t)
}

/// The antipodal-step tour around an explicitly provided center.
pub fn cross_tour_at(points: &[Point2D], center: Point2D) -> Result<Tour> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let ranks = angular_order(points, center);
    if n % 2 == 1 {
        let step = (n - 1) / 2;
        let order: Vec<usize> = (0..n).map(|t| ranks[(t * step) % n]).collect();
        return Tour::new(order, points);
    }

    let half = n / 2;
    let s = half - 1;
    let d_rank = |a: usize, b: usize| dist(points[ranks[a % n]], points[ranks[b % n]]);

    let l_sum: f64 = (0..n).map(|r| d_rank(r, r + s)).sum();
    let mut best_i = 0;
    let mut best_d = f64::NEG_INFINITY;
    for i in 0..n {
        let gain = d_rank(i, i + half) + d_rank(i + 1, i + 1 + half)
            - d_rank(i, i + half + 1)
            - d_rank(i + 1, i + half);
        if gain > best_d {
            best_d = gain;
            best_i = i;
        }
    }

    let walk = exchanged_two_factor_cycle(n, best_i)?;
    let order: Vec<usize> = walk.into_iter().map(|r| ranks[r]).collect();
    let tour = Tour::new(order, points)?;
    let expected = l_sum + best_d;
    debug_assert!(
        (tour.value - expected).abs() <= 1e-9 * expected.abs().max(1.0),
        "tour value {} != L + D = {expected}",
        tour.value
    );
    Ok(tour)
}

/// Rank-space cycle of the near-diagonal 2-factor after swapping the two
/// near-diagonals at position `i` for the adjacent diagonals. Errors if the
/// edge set is not a single cycle, which would mean the exchange failed to
/// reconnect it.
fn exchanged_two_factor_cycle(n: usize, i: usize) -> Result<Vec<usize>> {
    let half = n / 2;
    let s = half - 1;
    let mut nb: Vec<[usize; 2]> = (0..n).map(|r| [(r + s) % n, (r + n - s) % n]).collect();
    let replace = |nb: &mut Vec<[usize; 2]>, v: usize, old: usize, new: usize| {
        let slot = nb[v].iter().position(|&x| x == old).expect("edge present");
        nb[v][slot] = new;
    };
    let (a, b) = (i % n, (i + 1) % n);
    let (da, db) = ((i + half) % n, (i + 1 + half) % n);
    let (ra, rb) = ((i + half + 1) % n, (i + half) % n);
    // drop {a, ra} and {b, rb}, add {a, da} and {b, db}
    replace(&mut nb, a, ra, da);
    replace(&mut nb, ra, a, b);
    replace(&mut nb, b, rb, db);
    replace(&mut nb, rb, b, a);

    let mut walk = Vec::with_capacity(n);
    let mut prev = usize::MAX;
    let mut cur = 0;
    loop {
        walk.push(cur);
        let next = if nb[cur][0] != prev {
            nb[cur][0]
        } else {
            nb[cur][1]
        };
        prev = cur;
        cur = next;
        if cur == 0 {
            break;
        }
        if walk.len() > n {
            break;
        }
    }
    if walk.len() != n {
        return Err(Error::Internal(format!(
            "tour exchange at position {i} left a {}-cycle instead of a Hamiltonian cycle on {n} points",
            walk.len()
        )));
    }
    Ok(walk)
}

/// Maximizing 2-opt hill climb from `start`, first improvement in a random
/// scan order, with candidate moves restricted to each point's 16 angular
/// antipodes around the numeric Weber center (long edges come from
/// near-antipodal partners). Local optima are recorded and escaped with a
/// double-bridge kick. Returns the best tour seen, never worse than `start`;
/// the budget counts move evaluations.
pub fn tour_local_search(points: &[Point2D], start: &Tour, budget: &SearchBudget) -> Result<Tour> {
    let n = points.len();
    if start.order.len() != n {
        return Err(Error::InvalidTour(format!(
            "start tour has {} entries, instance has {n}",
            start.order.len()
        )));
    }
    if n == 3 {
        return Ok(start.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let started = std::time::Instant::now();

    let center = weber_numeric_default(points)?.center;
    let ranks = angular_order(points, center);
    let mut rank_of = vec![0usize; n];
    for (r, &v) in ranks.iter().enumerate() {
        rank_of[v] = r;
    }
    let list_len = 16.min(n - 1);
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let anti = rank_of[v] + n / 2;
            let mut list = Vec::with_capacity(list_len);
            let mut offset = 0usize;
            while list.len() < list_len {
                // antipodal rank, then +-1, +-2, ... around it
                let delta = if offset % 2 == 0 {
                    offset / 2
                } else {
                    n - 1 - offset / 2
                };
                let u = ranks[(anti + delta) % n];
                if u != v && !list.contains(&u) {
                    list.push(u);
                }
                offset += 1;
            }
            list
        })
        .collect();

    let mut order = start.order.clone();
    let mut pos = vec![0usize; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    let mut current = start.value;
    let mut best_order = order.clone();
    let mut best = current;
    let min_gain = 1e-12 * (1.0 + current.abs());

    let mut scan: Vec<usize> = (0..n).collect();
    let mut evals: u64 = 0;

    'outer: while evals < budget.evaluations {
        scan.shuffle(&mut rng);
        let mut improved = false;
        for &a in &scan {
            if evals >= budget.evaluations
                || budget.time_limit.map_or(false, |t| started.elapsed() >= t)
            {
                break 'outer;
            }
            for &c in &candidates[a] {
                let mut i = pos[a];
                let mut j = pos[c];
                if i > j {
                    std::mem::swap(&mut i, &mut j);
                }
                // skip shared-vertex edge pairs, their exchange is a no-op
                if i == j || j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                evals += 1;
                let (oi, oj) = (order[i], order[j]);
                let (si, sj) = (order[i + 1], order[(j + 1) % n]);
                let gain = dist(points[oi], points[oj]) + dist(points[si], points[sj])
                    - dist(points[oi], points[si])
                    - dist(points[oj], points[sj]);
                if gain > min_gain {
                    order[i + 1..=j].reverse();
                    for (p, &v) in order.iter().enumerate().take(j + 1).skip(i + 1) {
                        pos[v] = p;
                    }
                    current += gain;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            if current > best {
                best = current;
                best_order = order.clone();
            }
            if n >= 8 {
                // double bridge: swap the two middle blocks of A|B|C|D
                let mut cuts = [0usize; 3];
                loop {
                    for c in &mut cuts {
                        *c = rng.gen_range(1..n);
                    }
                    cuts.sort_unstable();
                    if cuts[0] != cuts[1] && cuts[1] != cuts[2] {
                        break;
                    }
                }
                let (p, q, r) = (cuts[0], cuts[1], cuts[2]);
                let mut kicked = Vec::with_capacity(n);
                kicked.extend_from_slice(&order[..p]);
                kicked.extend_from_slice(&order[q..r]);
                kicked.extend_from_slice(&order[p..q]);
                kicked.extend_from_slice(&order[r..]);
                order = kicked;
            } else {
                let i = rng.gen_range(0..n - 1);
                let j = rng.gen_range(i + 1..n);
                order[i..=j].reverse();
            }
            for (p, &v) in order.iter().enumerate() {
                pos[v] = p;
            }
            current = order
                .iter()
                .zip(order.iter().cycle().skip(1))
                .map(|(&x, &y)| dist(points[x], points[y]))
                .sum();
        }
    }
    if current > best {
        best = current;
        best_order = order;
    }
    let result = Tour::new(best_order, points)?;
    debug_assert!(result.value >= start.value - 1e-9 * (1.0 + start.value.abs()));
    debug_assert!((result.value - best).abs() <= 1e-6 * (1.0 + best.abs()));
    Ok(result)
}

/// All tours on an even strictly convex point set that no length-increasing
/// 2-exchange improves: one per adjacent diagonal pair, so exactly n/2 of
/// them. Candidate i uses the diagonals at angular ranks (i, i+n/2) and
/// (i+1, i+1+n/2) plus all other near-diagonals; its value is L + D_i,
/// evaluated with rolling sums in O(n) distance computations overall. The
/// best of them is exactly what `cross_tour` returns.
pub fn locally_optimal_convex_tours(points: &[Point2D]) -> Result<Vec<Tour>> {
    let n = points.len();
    if n < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: n });
    }
    if n % 2 != 0 {
        return Err(Error::OddCardinality { n });
    }
    if !is_convex_position(points) {
        return Err(Error::NotConvex);
    }
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n as f64;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n as f64;
    let ranks = angular_order(points, Point2D::new(cx, cy));
    let half = n / 2;
    let s = half - 1;
    let d_rank = |a: usize, b: usize| dist(points[ranks[a % n]], points[ranks[b % n]]);
    let l_sum: f64 = (0..n).map(|r| d_rank(r, r + s)).sum();

    let mut tours = Vec::with_capacity(half);
    for i in 0..half {
        let d_i = d_rank(i, i + half) + d_rank(i + 1, i + 1 + half)
            - d_rank(i, i + half + 1)
            - d_rank(i + 1, i + half);
        let walk = exchanged_two_factor_cycle(n, i)?;
        let order: Vec<usize> = walk.into_iter().map(|r| ranks[r]).collect();
        let tour = Tour::new(order, points)?;
        let expected = l_sum + d_i;
        debug_assert!(
            (tour.value - expected).abs() <= 1e-9 * expected.abs().max(1.0),
            "candidate {i}: value {} != rolling sum {expected}",
            tour.value
        );
        tours.push(tour);
    }
    Ok(tours)
}
