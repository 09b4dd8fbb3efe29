use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, LabelVector};
use crate::{seeded_rng, Error, Result};

/// Row indices of a train/test partition, both in shuffled order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub stratified: bool,
}

impl Split {
    pub fn apply(&self, data: &Dataset) -> Result<(Dataset, Dataset)> {
        Ok((data.subset(&self.train)?, data.subset(&self.test)?))
    }
}

/// Per-class training quotas by largest remainder, kept inside `[lo, hi]`.
fn quotas(counts: &[usize], n_train: usize, total: usize) -> Vec<usize> {
    let present = counts.iter().filter(|&&c| c > 0).count();
    let keep_both_sides = n_train >= present && total - n_train >= present;
    let bounds = |c: usize| {
        if c == 0 {
            (0, 0)
        } else if keep_both_sides {
            (1, c - 1)
        } else {
            (0, c)
        }
    };
    let exact: Vec<f64> = counts
        .iter()
        .map(|&c| n_train as f64 * c as f64 / total as f64)
        .collect();
    let mut q: Vec<usize> = counts
        .iter()
        .zip(&exact)
        .map(|(&c, &e)| {
            let (lo, hi) = bounds(c);
            (e.floor() as usize).clamp(lo, hi)
        })
        .collect();

    let mut assigned: usize = q.iter().sum();
    while assigned < n_train {
        let c = (0..q.len())
            .filter(|&c| q[c] < bounds(counts[c]).1)
            .max_by(|&a, &b| (exact[a] - q[a] as f64).total_cmp(&(exact[b] - q[b] as f64)).then(b.cmp(&a)))
            .expect("n_train < N leaves room");
        q[c] += 1;
        assigned += 1;
    }
    while assigned > n_train {
        let c = (0..q.len())
            .filter(|&c| q[c] > bounds(counts[c]).0)
            .min_by(|&a, &b| (exact[a] - q[a] as f64).total_cmp(&(exact[b] - q[b] as f64)).then(a.cmp(&b)))
            .expect("lower bounds sum to at most n_train");
        q[c] -= 1;
        assigned -= 1;
    }
    q
}

/// Seeded shuffle-and-split into `n_train` training rows and the rest.
///
/// With `stratify`, each class is split in proportion to its size and kept
/// on both sides when counts permit. A class with fewer than two members
/// makes that impossible; the split then falls back to a plain shuffle with
/// a logged warning.
pub fn train_test_split(
    labels: &LabelVector,
    n_train: usize,
    seed: u64,
    stratify: bool,
) -> Result<Split> {
    let n = labels.len();
    if n_train == 0 || n_train >= n {
        return Err(Error::invalid(format!("n_train must be in 1..{n}, got {n_train}")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut seeded_rng(seed));

    let counts = labels.counts();
    let stratified = stratify && counts.iter().all(|&c| c == 0 || c >= 2);
    if stratify && !stratified {
        log::warn!("a class has fewer than 2 members; using an unstratified split");
    }

    if !stratified {
        return Ok(Split {
            train: perm[..n_train].to_vec(),
            test: perm[n_train..].to_vec(),
            stratified,
        });
    }

    let mut remaining = quotas(&counts, n_train, n);
    let (mut train, mut test) = (Vec::with_capacity(n_train), Vec::with_capacity(n - n_train));
    for i in perm {
        let c = labels.indices()[i];
        if remaining[c] > 0 {
            remaining[c] -= 1;
            train.push(i);
        } else {
            test.push(i);
        }
    }
    Ok(Split {
        train,
        test,
        stratified,
    })
}
