//! Lloyd K-means and random-subset center selection.

use rand::seq::index;

use crate::dataset::FeatureMatrix;
use crate::linalg::Matrix;
use crate::{seeded_rng, Error, Result};

pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    /// k×d
    pub centers: Matrix,
    pub assignments: Vec<usize>,
    pub inertia: f64,
    /// Number of center-update steps performed.
    pub iterations: usize,
    /// Inertia after the initial assignment and after every update step.
    pub inertia_history: Vec<f64>,
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest center per point, lowest index on ties, plus the total squared
/// distance.
pub fn assign(points: &Matrix, centers: &Matrix) -> (Vec<usize>, f64) {
    let mut inertia = 0.0;
    let assignments = points
        .row_iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, c) in centers.row_iter().enumerate() {
                let d = sq_dist(p, c);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            inertia += best_d;
            best
        })
        .collect();
    (assignments, inertia)
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds the {n} available points")));
    }
    Ok(())
}

fn update_centers(points: &Matrix, assignments: &[usize], k: usize) -> (Matrix, Vec<usize>) {
    let d = points.cols();
    let mut sums = Matrix::zeros(k, d);
    let mut counts = vec![0usize; k];
    for (p, &a) in points.row_iter().zip(assignments) {
        counts[a] += 1;
        for (s, v) in sums.row_mut(a).iter_mut().zip(p) {
            *s += v;
        }
    }
    for (j, &c) in counts.iter().enumerate() {
        if c > 0 {
            for s in sums.row_mut(j) {
                *s /= c as f64;
            }
        }
    }
    (sums, counts)
}

/// Moves every empty cluster's center onto the point currently farthest from
/// its own center. Each reseed consumes a distinct point.
fn repair_empty(points: &Matrix, centers: &mut Matrix, assignments: &[usize], counts: &[usize]) {
    let empty: Vec<usize> = (0..counts.len()).filter(|&j| counts[j] == 0).collect();
    if empty.is_empty() {
        return;
    }
    let mut order: Vec<(usize, f64)> = points
        .row_iter()
        .zip(assignments)
        .enumerate()
        .map(|(i, (p, &a))| (i, sq_dist(p, centers.row(a))))
        .collect();
    // farthest first, lowest point index on ties
    order.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    for (j, (i, _)) in empty.into_iter().zip(order) {
        centers.row_mut(j).copy_from_slice(points.row(i));
    }
}

/// Lloyd iterations from `k` distinct input points drawn under `seed`.
///
/// When an update improves inertia by less than `tol` or leaves the
/// assignment unchanged, a single-point transfer pass looks for a point whose
/// move to another cluster lowers inertia even though it is already nearest
/// its own center; if one moves, Lloyd iterations resume. Every update and
/// every transfer pass counts toward `max_iter`.
pub fn kmeans(
    points: &FeatureMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<Clustering> {
    let x = points.values();
    check_k(x.rows(), k)?;
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    if !(tol >= 0.0) {
        return Err(Error::invalid("tol must be non-negative"));
    }

    let mut rng = seeded_rng(seed);
    let init = index::sample(&mut rng, x.rows(), k).into_vec();
    Ok(descend(x, k, x.select_rows(&init), max_iter, tol))
}

fn descend(x: &Matrix, k: usize, mut centers: Matrix, max_iter: usize, tol: f64) -> Clustering {
    let (mut assignments, mut inertia) = assign(x, &centers);
    let mut history = vec![inertia];
    let mut iterations = 0;

    while iterations < max_iter {
        let (mut next, counts) = update_centers(x, &assignments, k);
        repair_empty(x, &mut next, &assignments, &counts);
        let (next_assign, next_inertia) = assign(x, &next);
        iterations += 1;
        history.push(next_inertia);

        let improvement = inertia - next_inertia;
        let changed = next_assign != assignments;
        centers = next;
        assignments = next_assign;
        inertia = next_inertia;
        if changed && improvement >= tol {
            continue;
        }
        // Lloyd has settled; try single-point transfers before giving up.
        if iterations >= max_iter || !transfer_pass(x, &mut assignments, k) {
            break;
        }
        iterations += 1;
        centers = update_centers(x, &assignments, k).0;
        inertia = partition_inertia(x, &centers, &assignments);
        history.push(inertia);
    }

    Clustering {
        centers,
        assignments,
        inertia,
        iterations,
        inertia_history: history,
    }
}

fn partition_inertia(x: &Matrix, centers: &Matrix, assignments: &[usize]) -> f64 {
    x.row_iter()
        .zip(assignments)
        .map(|(p, &a)| sq_dist(p, centers.row(a)))
        .sum()
}

/// One sweep of exact single-point transfers: point `i` leaves cluster `a`
/// for `b` when `n_b/(n_b+1)·‖x−μ_b‖² < n_a/(n_a−1)·‖x−μ_a‖²`, the exact
/// change in inertia. Means are updated after each move. Returns whether any
/// point moved.
fn transfer_pass(points: &Matrix, assignments: &mut [usize], k: usize) -> bool {
    let (mut means, mut counts) = update_centers(points, assignments, k);
    let mut moved = false;
    for (i, p) in points.row_iter().enumerate() {
        let a = assignments[i];
        if counts[a] <= 1 {
            continue;
        }
        let na = counts[a] as f64;
        let removal_gain = na / (na - 1.0) * sq_dist(p, means.row(a));
        let mut best: Option<(usize, f64)> = None;
        for b in (0..k).filter(|&b| b != a) {
            let nb = counts[b] as f64;
            let cost = nb / (nb + 1.0) * sq_dist(p, means.row(b));
            if best.map_or(true, |(_, c)| cost < c) {
                best = Some((b, cost));
            }
        }
        let Some((b, cost)) = best else { continue };
        if cost >= removal_gain * (1.0 - 1e-12) {
            continue;
        }
        let nb = counts[b] as f64;
        for (m, v) in means.row_mut(a).iter_mut().zip(p) {
            *m = (*m * na - v) / (na - 1.0);
        }
        for (m, v) in means.row_mut(b).iter_mut().zip(p) {
            *m = (*m * nb + v) / (nb + 1.0);
        }
        counts[a] -= 1;
        counts[b] += 1;
        assignments[i] = b;
        moved = true;
    }
    moved
}

/// Runs [`kmeans`] with seeds `seed, seed + 1, …`, keeps the lowest inertia
/// (earliest restart on ties), then polishes the winner by center swaps
/// until none helps. Each swap pass reruns Lloyd up to `k·N` times.
pub fn kmeans_best_of(
    points: &FeatureMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
    tol: f64,
) -> Result<Clustering> {
    let mut best: Option<Clustering> = None;
    for r in 0..restarts.max(1) {
        let c = kmeans(points, k, seed.wrapping_add(r as u64), max_iter, tol)?;
        if best.as_ref().map_or(true, |b| c.inertia < b.inertia) {
            best = Some(c);
        }
    }
    let mut best = best.expect("at least one restart");
    let x = points.values();
    while let Some(c) = swap_improvement(x, k, &best, max_iter, tol) {
        best = c;
    }
    Ok(best)
}

/// First center swap that ends lower: center `c` is moved onto point `p` and
/// Lloyd iterations rerun from there.
fn swap_improvement(x: &Matrix, k: usize, current: &Clustering, max_iter: usize, tol: f64) -> Option<Clustering> {
    let margin = 1e-12 * (1.0 + current.inertia);
    for c in 0..k {
        for p in x.row_iter() {
            let mut centers = current.centers.clone();
            centers.row_mut(c).copy_from_slice(p);
            let next = descend(x, k, centers, max_iter, tol);
            if next.inertia < current.inertia - margin {
                return Some(next);
            }
        }
    }
    None
}

/// `k` distinct training rows sampled without replacement.
pub fn random_subset_centers(points: &FeatureMatrix, k: usize, seed: u64) -> Result<Matrix> {
    let x = points.values();
    check_k(x.rows(), k)?;
    let mut rng = seeded_rng(seed);
    let idx = index::sample(&mut rng, x.rows(), k).into_vec();
    Ok(x.select_rows(&idx))
}
