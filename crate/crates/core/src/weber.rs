//! Weber centers and star bounds.
//!
//! The star value of a center `c` is the sum of distances from `c` to every
//! point. Its minimum over all centers upper-bounds the maximum-weight
//! perfect matching value (each matched pair is at most the sum of its two
//! rays), and twice the minimum upper-bounds the maximum tour value. This
//! module computes that minimum numerically (`weber_numeric`), a sector-
//! balanced variant with a combinatorial guarantee (`weber_combinatorial`),
//! and a sharper bound that shortens every ray by its best triangle slack
//! (`fwp_improved`).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{bbox_diagonal, dist, Point2D};

/// Default relative gradient tolerance for `weber_numeric`.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration budget for `weber_numeric`.
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// `fwp_improved` evaluates an O(n^2) objective a few hundred times; the cap
/// keeps a single call from silently burning hours.
pub const FWP_IMPROVED_CAP: usize = 20_000;

/// Two angles closer than this (radians) are treated as the same direction
/// when sweeping sector rotations. Exact symmetric constructions survive
/// floating-point noise; random instances are unaffected, their angular gaps
/// are many orders of magnitude wider.
const SECTOR_BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeberMethod {
    Weiszfeld,
    Newton,
    Combinatorial,
}

#[derive(Debug, Clone)]
pub struct WeberResult {
    pub center: Point2D,
    /// Sum of distances from `center` to all points, recomputed at return.
    pub value: f64,
    /// Which solver produced the final center. `Combinatorial` only when a
    /// balanced sector rotation certifies the center.
    pub method: WeberMethod,
    pub iterations: usize,
    /// Gradient norm at termination. `None` when the center coincides with an
    /// input point, where the objective is not differentiable.
    pub gradient_norm: Option<f64>,
    /// True when some rotation of the six-sector fan around `center` puts
    /// equally many points in each pair of opposite sectors. Only
    /// `weber_combinatorial` searches for this; the numeric solvers leave it
    /// false.
    pub sector_balanced: bool,
    /// False only if the iteration budget ran out while the iterate was still
    /// moving. The best iterate found is returned either way.
    pub converged: bool,
}

/// Star value of `center`: the sum of distances to all points.
pub fn fwp_value(points: &[Point2D], center: Point2D) -> f64 {
    points.iter().map(|&p| dist(center, p)).sum()
}

fn centroid(points: &[Point2D]) -> Point2D {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point2D::new(sx / n, sy / n)
}

/// Minimizes the star value, starting from the centroid.
///
/// Weiszfeld iterations (guaranteed non-increasing) with a Newton refinement
/// once the relative gradient is small; Newton steps that fail a decrease
/// check or meet an ill-conditioned Hessian fall back to Weiszfeld. Iterates
/// that land on an input point are handled with the standard anchored-point
/// optimality test. Termination: gradient norm at most `tol` times the mean
/// point-to-center distance, or a step too small to change the iterate at
/// f64 resolution (the gradient criterion is unreachable in f64 for large n,
/// where the value is long since exact to machine precision).
pub fn weber_numeric(points: &[Point2D], tol: f64, max_iter: usize) -> Result<WeberResult> {
    if points.is_empty() {
        return Err(Error::EmptyInstance);
    }
    Ok(weber_from(points, centroid(points), tol, max_iter))
}

/// `weber_numeric` with the default tolerance and iteration budget.
pub fn weber_numeric_default(points: &[Point2D]) -> Result<WeberResult> {
    weber_numeric(points, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub(crate) fn weber_from(
    points: &[Point2D],
    start: Point2D,
    tol: f64,
    max_iter: usize,
) -> WeberResult {
    let n = points.len();
    let diam = bbox_diagonal(points);
    if diam == 0.0 {
        // Single point, or all points coincident.
        return WeberResult {
            center: points[0],
            value: 0.0,
            method: WeberMethod::Weiszfeld,
            iterations: 0,
            gradient_norm: None,
            sector_balanced: false,
            converged: true,
        };
    }
    let anchor_eps = 1e-12 * diam;
    // Hand over to Newton once the average unit-vector residual is small.
    let newton_rel = 1e-6;

    let mut c = start;
    let mut value = fwp_value(points, c);
    let mut method = WeberMethod::Weiszfeld;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter {
        iterations += 1;

        // Anchored iterate: apply the vertex optimality test.
        if let Some(j) = nearest_within(points, c, anchor_eps) {
            let pj = points[j];
            let mut rx = 0.0;
            let mut ry = 0.0;
            let mut inv_sum = 0.0;
            let mut multiplicity = 0.0;
            for &p in points {
                let d = dist(pj, p);
                if d <= anchor_eps {
                    multiplicity += 1.0;
                } else {
                    rx += (p.x - pj.x) / d;
                    ry += (p.y - pj.y) / d;
                    inv_sum += 1.0 / d;
                }
            }
            let r_norm = (rx * rx + ry * ry).sqrt();
            if r_norm <= multiplicity {
                // The data point is the minimizer.
                return WeberResult {
                    center: pj,
                    value: fwp_value(points, pj),
                    method,
                    iterations,
                    gradient_norm: None,
                    sector_balanced: false,
                    converged: true,
                };
            }
            // Step off the anchor along the pull direction.
            let mut t = (r_norm - multiplicity) / inv_sum;
            let mut next = Point2D::new(pj.x + t * rx / r_norm, pj.y + t * ry / r_norm);
            let mut next_value = fwp_value(points, next);
            let mut halvings = 0;
            while next_value > value && halvings < 60 {
                t *= 0.5;
                next = Point2D::new(pj.x + t * rx / r_norm, pj.y + t * ry / r_norm);
                next_value = fwp_value(points, next);
                halvings += 1;
            }
            c = next;
            value = next_value;
            continue;
        }

        // One pass: gradient, Weiszfeld sums and Hessian entries.
        let mut gx = 0.0;
        let mut gy = 0.0;
        let mut inv_sum = 0.0;
        let mut wx = 0.0;
        let mut wy = 0.0;
        let mut hxx = 0.0;
        let mut hxy = 0.0;
        let mut hyy = 0.0;
        for &p in points {
            let dx = c.x - p.x;
            let dy = c.y - p.y;
            let d = (dx * dx + dy * dy).sqrt();
            let inv = 1.0 / d;
            gx += dx * inv;
            gy += dy * inv;
            inv_sum += inv;
            wx += p.x * inv;
            wy += p.y * inv;
            let ux = dx * inv;
            let uy = dy * inv;
            hxx += (1.0 - ux * ux) * inv;
            hxy += -ux * uy * inv;
            hyy += (1.0 - uy * uy) * inv;
        }
        let g_norm = (gx * gx + gy * gy).sqrt();
        if g_norm <= tol * (value / n as f64) {
            converged = true;
            break;
        }

        let weiszfeld_next = Point2D::new(wx / inv_sum, wy / inv_sum);
        let mut next = weiszfeld_next;
        let mut next_value = f64::NAN;
        let mut stepped_newton = false;

        if g_norm / n as f64 <= newton_rel {
            // 2x2 Newton step, guarded by conditioning and a decrease check.
            let tr = hxx + hyy;
            let disc = (((hxx - hyy) * (hxx - hyy)) + 4.0 * hxy * hxy).sqrt();
            let lambda_min = 0.5 * (tr - disc);
            let lambda_max = 0.5 * (tr + disc);
            if lambda_min > 0.0 && lambda_max <= 1e12 * lambda_min {
                let det = hxx * hyy - hxy * hxy;
                let full_dx = -(hyy * gx - hxy * gy) / det;
                let full_dy = -(hxx * gy - hxy * gx) / det;
                let mut t = 1.0;
                for _ in 0..40 {
                    let cand = Point2D::new(c.x + t * full_dx, c.y + t * full_dy);
                    let cand_value = fwp_value(points, cand);
                    if cand_value <= value {
                        next = cand;
                        next_value = cand_value;
                        stepped_newton = true;
                        break;
                    }
                    t *= 0.5;
                }
            }
        }
        if !stepped_newton {
            next_value = fwp_value(points, next);
        } else {
            method = WeberMethod::Newton;
        }

        debug_assert!(
            next_value <= value * (1.0 + 1e-9) + 1e-300,
            "weber iterate increased the objective: {value} -> {next_value}"
        );

        let step = dist(next, c);
        let scale = diam.max(c.x.abs()).max(c.y.abs());
        c = next;
        value = next_value;
        if step <= 4.0 * f64::EPSILON * scale {
            // Numerically stationary; no f64 iterate can improve further.
            converged = true;
            break;
        }
    }

    let value = fwp_value(points, c);
    let gradient_norm = gradient_norm_at(points, c, anchor_eps);
    WeberResult {
        center: c,
        value,
        method,
        iterations,
        gradient_norm,
        sector_balanced: false,
        converged,
    }
}

fn nearest_within(points: &[Point2D], c: Point2D, eps: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &p) in points.iter().enumerate() {
        let d = dist(c, p);
        if d <= eps && best.map_or(true, |(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

fn gradient_norm_at(points: &[Point2D], c: Point2D, anchor_eps: f64) -> Option<f64> {
    let mut gx = 0.0;
    let mut gy = 0.0;
    for &p in points {
        let d = dist(c, p);
        if d <= anchor_eps {
            return None;
        }
        gx += (c.x - p.x) / d;
        gy += (c.y - p.y) / d;
    }
    Some((gx * gx + gy * gy).sqrt())
}

/// Best-effort search for a center admitting a balanced sector rotation.
///
/// Starts from the numeric center and sweeps all critical rotations of the
/// six-sector fan there; if no rotation balances the three opposite-sector
/// pairs, retries on a small grid of perturbed centers (up to 192 candidates
/// within 5% of the diameter). Falls back to the numeric result with
/// `sector_balanced = false` when everything fails, so the value is always a
/// valid star bound. A balanced center pins the largest point-center-point
/// opening angle of the induced pairing at 2*pi/3 or more, which is what
/// makes the 2/sqrt(3) matching guarantee work.
pub fn weber_combinatorial(points: &[Point2D]) -> Result<WeberResult> {
    if points.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let num = weber_numeric(points, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    if balanced_rotation_exists(points, num.center) {
        return Ok(WeberResult {
            method: WeberMethod::Combinatorial,
            sector_balanced: true,
            ..num
        });
    }
    let diam = bbox_diagonal(points);
    if diam > 0.0 {
        let radius = 0.05 * diam;
        let rings = 8;
        let spokes = 24;
        for ring in 1..=rings {
            let r = radius * ring as f64 / rings as f64;
            for spoke in 0..spokes {
                let a = 2.0 * PI * spoke as f64 / spokes as f64;
                let cand = Point2D::new(num.center.x + r * a.cos(), num.center.y + r * a.sin());
                if balanced_rotation_exists(points, cand) {
                    return Ok(WeberResult {
                        center: cand,
                        value: fwp_value(points, cand),
                        method: WeberMethod::Combinatorial,
                        iterations: num.iterations,
                        gradient_norm: gradient_norm_at(points, cand, 1e-12 * diam),
                        sector_balanced: true,
                        converged: num.converged,
                    });
                }
            }
        }
    }
    Ok(num)
}

/// Decides whether some rotation of the six-sector fan around `center`
/// balances all three opposite-sector pairs.
///
/// Each point reduces to (cell, offset) with offset in [0, pi/3); as the fan
/// rotates, counts only change when a boundary passes a point's direction, so
/// it suffices to try one rotation per gap between distinct offsets plus the
/// offsets themselves. Points sitting exactly on a boundary (within
/// `SECTOR_BOUNDARY_TOL`) may be assigned to either adjacent sector; whether
/// a feasible split exists reduces to a closed-form check with box
/// constraints. Runs in O(n log n).
fn balanced_rotation_exists(points: &[Point2D], center: Point2D) -> bool {
    let sixth = PI / 3.0;
    let delta = SECTOR_BOUNDARY_TOL;
    let n = points.len();
    if n == 0 {
        return false;
    }

    // (offset, cell): direction = cell * pi/3 + offset. Offsets within delta
    // of the next cell boundary are folded onto it so grouping never wraps.
    let mut items: Vec<(f64, usize)> = Vec::with_capacity(n);
    for &p in points {
        let dx = p.x - center.x;
        let dy = p.y - center.y;
        let mut a = dy.atan2(dx);
        if a < 0.0 {
            a += 2.0 * PI;
        }
        let mut k = (a / sixth).floor() as i64;
        k = k.clamp(0, 5);
        let mut rho = a - k as f64 * sixth;
        if rho >= sixth {
            rho -= sixth;
            k = (k + 1) % 6;
        }
        if rho < 0.0 {
            rho = 0.0;
        }
        if rho > sixth - delta {
            rho -= sixth;
            k = (k + 1) % 6;
        }
        items.push((rho, k as usize));
    }
    items.sort_by(|x, y| x.partial_cmp(y).unwrap());

    // Group offsets within delta of a representative; distinct groups are the
    // critical rotations.
    let mut groups: Vec<(f64, [i64; 6])> = Vec::new();
    for &(rho, k) in &items {
        match groups.last_mut() {
            Some((rep, counts)) if rho - *rep <= delta => counts[k] += 1,
            _ => {
                let mut counts = [0i64; 6];
                counts[k] = 1;
                groups.push((rho, counts));
            }
        }
    }
    let g = groups.len();
    let mut prefix: Vec<[i64; 6]> = Vec::with_capacity(g + 1);
    prefix.push([0; 6]);
    for (_, counts) in &groups {
        let mut next = *prefix.last().unwrap();
        for (acc, c) in next.iter_mut().zip(counts) {
            *acc += c;
        }
        prefix.push(next);
    }
    let total = prefix[g];

    // Fixed counts f (per sector) plus boundary counts m (per boundary, each
    // splittable between the sectors it separates): the three balance
    // equations have a one-parameter closed form over the split variables.
    let feasible = |f: [i64; 6], m: [i64; 6]| -> bool {
        let a0 = f[0] - f[3] + m[1] - m[4];
        let a1 = f[1] - f[4] + m[2] - m[5];
        let a2 = f[2] - f[5] + m[3] - m[0];
        let s = a0 + a1 + a2;
        if s.rem_euclid(2) != 0 {
            return false;
        }
        let y0 = -s / 2;
        let y1 = y0 + a0;
        let y2 = y1 + a1;
        let in_box = |k: usize, y: i64| y >= -m[(k + 3) % 6] && y <= m[k];
        in_box(0, y0) && in_box(1, y1) && in_box(2, y2)
    };

    // Rotation below every critical offset: each point keeps its own cell.
    if feasible(total, [0; 6]) {
        return true;
    }
    for i in 0..g {
        // Rotation exactly at group i: earlier groups fall one sector back,
        // later groups stay, group i sits on its boundary.
        let mut f = [0i64; 6];
        for (s, slot) in f.iter_mut().enumerate() {
            *slot = prefix[i][(s + 1) % 6] + (total[s] - prefix[i + 1][s]);
        }
        if feasible(f, groups[i].1) {
            return true;
        }
        // Rotation in the open gap after group i.
        if i + 1 < g {
            let mut f = [0i64; 6];
            for (s, slot) in f.iter_mut().enumerate() {
                *slot = prefix[i + 1][(s + 1) % 6] + (total[s] - prefix[i + 1][s]);
            }
            if feasible(f, [0; 6]) {
                return true;
            }
        }
    }
    false
}

/// Sharper star bound: each ray is shortened by half the best triangle slack
/// its point has with any other point,
/// `sum_i [ d(c,p_i) - min_{j != i} (d(c,p_i) + d(c,p_j) - d(p_i,p_j)) / 2 ]`,
/// minimized over the center with a Nelder-Mead descent (200 iterations)
/// started at `start`. The result never exceeds the plain star value at
/// `start` and never falls below the maximum matching value, which the slack
/// term cannot cut into. Each evaluation is O(n^2); see `FWP_IMPROVED_CAP`.
pub fn fwp_improved(points: &[Point2D], start: Point2D) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    if n > FWP_IMPROVED_CAP {
        return Err(Error::CapExceeded {
            what: "improved star bound",
            cap: FWP_IMPROVED_CAP,
            n,
        });
    }

    let objective = |c: Point2D| -> f64 {
        let d: Vec<f64> = points.iter().map(|&p| dist(c, p)).collect();
        let mut slack = vec![f64::INFINITY; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let s = d[i] + d[j] - dist(points[i], points[j]);
                if s < slack[i] {
                    slack[i] = s;
                }
                if s < slack[j] {
                    slack[j] = s;
                }
            }
        }
        d.iter()
            .zip(&slack)
            .map(|(di, si)| di - 0.5 * si)
            .sum()
    };

    let diam = bbox_diagonal(points);
    if diam == 0.0 {
        return Ok(objective(start));
    }
    Ok(nelder_mead(objective, start, 0.05 * diam, 200))
}

/// Plain two-dimensional Nelder-Mead descent. Returns the best value ever
/// evaluated, which includes the starting point.
fn nelder_mead(f: impl Fn(Point2D) -> f64, start: Point2D, scale: f64, iters: usize) -> f64 {
    let mut simplex = [
        (start, f(start)),
        (Point2D::new(start.x + scale, start.y), 0.0),
        (Point2D::new(start.x, start.y + scale), 0.0),
    ];
    simplex[1].1 = f(simplex[1].0);
    simplex[2].1 = f(simplex[2].0);
    let mut best = simplex.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);

    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        best = best.min(simplex[0].1);
        let (b, sec, w) = (simplex[0].0, simplex[1].0, simplex[2].0);
        let ox = 0.5 * (b.x + sec.x);
        let oy = 0.5 * (b.y + sec.y);
        let reflect = Point2D::new(2.0 * ox - w.x, 2.0 * oy - w.y);
        let fr = f(reflect);
        if fr < simplex[0].1 {
            let expand = Point2D::new(3.0 * ox - 2.0 * w.x, 3.0 * oy - 2.0 * w.y);
            let fe = f(expand);
            simplex[2] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (reflect, fr);
        } else {
            let contract = Point2D::new(0.5 * (ox + w.x), 0.5 * (oy + w.y));
            let fc = f(contract);
            if fc < simplex[2].1 {
                simplex[2] = (contract, fc);
            } else {
                for i in 1..3 {
                    let v = simplex[i].0;
                    let shrunk = Point2D::new(0.5 * (b.x + v.x), 0.5 * (b.y + v.y));
                    simplex[i] = (shrunk, f(shrunk));
                }
            }
        }
        best = best.min(simplex[2].1).min(simplex[1].1);
    }
    best
}
