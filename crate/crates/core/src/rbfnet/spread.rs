use crate::linalg::Matrix;

use super::{SpreadMode, Spreads};

/// Widths at or below this are treated as degenerate.
pub const SPREAD_EPSILON: f64 = 1e-6;

/// `d_max / √(2J)` over pairwise center distances, or 1 when all centers
/// coincide.
fn fallback_width(centers: &Matrix) -> f64 {
    let j = centers.rows();
    let mut d_max: f64 = 0.0;
    for a in 0..j {
        for b in a + 1..j {
            d_max = d_max.max(crate::kmeans::sq_dist(centers.row(a), centers.row(b)).sqrt());
        }
    }
    if d_max > 0.0 {
        d_max / (2.0 * j as f64).sqrt()
    } else {
        1.0
    }
}

/// Receptive-field widths from a center assignment.
///
/// Scalar mode uses the RMS distance of a cluster's points to its center;
/// per-dimension mode uses the per-coordinate standard deviation of the
/// cluster. Singleton or empty clusters and widths `≤ SPREAD_EPSILON` take
/// the global fallback width.
pub fn compute_spreads(
    centers: &Matrix,
    assignments: &[usize],
    points: &Matrix,
    mode: SpreadMode,
) -> Spreads {
    let j = centers.rows();
    let d = centers.cols();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); j];
    for (i, &a) in assignments.iter().enumerate() {
        members[a].push(i);
    }

    let mut fallback = None;
    let mut fb = || *fallback.get_or_insert_with(|| fallback_width(centers));

    match mode {
        SpreadMode::Scalar => Spreads::Scalar(
            members
                .iter()
                .enumerate()
                .map(|(c, idx)| {
                    if idx.len() <= 1 {
                        return fb();
                    }
                    let ms: f64 = idx
                        .iter()
                        .map(|&i| crate::kmeans::sq_dist(points.row(i), centers.row(c)))
                        .sum::<f64>()
                        / idx.len() as f64;
                    let s = ms.sqrt();
                    if s > SPREAD_EPSILON {
                        s
                    } else {
                        fb()
                    }
                })
                .collect(),
        ),
        SpreadMode::PerDimension => {
            let mut out = Matrix::zeros(j, d);
            for (c, idx) in members.iter().enumerate() {
                for dim in 0..d {
                    out[(c, dim)] = if idx.len() <= 1 {
                        fb()
                    } else {
                        let n = idx.len() as f64;
                        let mean = idx.iter().map(|&i| points[(i, dim)]).sum::<f64>() / n;
                        let var = idx
                            .iter()
                            .map(|&i| (points[(i, dim)] - mean).powi(2))
                            .sum::<f64>()
                            / n;
                        let s = var.sqrt();
                        if s > SPREAD_EPSILON {
                            s
                        } else {
                            fb()
                        }
                    };
                }
            }
            Spreads::PerDimension(out)
        }
    }
}
