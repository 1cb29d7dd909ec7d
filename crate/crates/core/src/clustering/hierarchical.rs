use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::DistanceMatrix;

use super::{Dendrogram, DendrogramKind, Merge};

/// Inter-cluster dissimilarity used by [`agnes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
}

/// Agglomerative nesting. At each step the two closest clusters merge; ties
/// go to the pair whose smallest member ids are lowest.
pub fn agnes(d: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = d.len();
    if n < 2 {
        return Err(Error::Param(format!("need at least 2 items, got {n}")));
    }
    // Row-major working copy; only rows/columns of active clusters are live.
    let mut dist: Vec<f64> = (0..n * n).map(|x| d.get(x / n, x % n)).collect();
    let mut active: Vec<bool> = vec![true; n];
    let mut size = vec![1usize; n];
    // Merged clusters live in the lower slot, so a slot index is always the
    // smallest member id of its cluster and scanning pairs in slot order
    // with a strict comparison implements the tie rule.
    let mut node_id: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in (0..n).filter(|&i| active[i]) {
            for j in ((i + 1)..n).filter(|&j| active[j]) {
                let dij = dist[i * n + j];
                let better = best.is_none_or(|(bd, _, _)| dij < bd);
                if better {
                    best = Some((dij, i, j));
                }
            }
        }
        let (height, i, j) = best.expect("at least two active clusters");
        merges.push(Merge {
            a: node_id[i],
            b: node_id[j],
            height,
            size: size[i] + size[j],
        });

        // Keep the merged cluster in slot i.
        for k in (0..n).filter(|&k| active[k] && k != i && k != j) {
            let dik = dist[i * n + k];
            let djk = dist[j * n + k];
            let updated = match linkage {
                Linkage::Single => dik.min(djk),
                Linkage::Complete => dik.max(djk),
                Linkage::Average => {
                    (size[i] as f64 * dik + size[j] as f64 * djk) / (size[i] + size[j]) as f64
                }
            };
            dist[i * n + k] = updated;
            dist[k * n + i] = updated;
        }
        size[i] += size[j];
        node_id[i] = n + step;
        active[j] = false;
    }
    Ok(Dendrogram::new(DendrogramKind::Agglomerative, n, merges))
}

fn diameter(d: &DistanceMatrix, members: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for (x, &i) in members.iter().enumerate() {
        for &j in &members[x + 1..] {
            best = best.max(d.get(i, j));
        }
    }
    best
}

fn mean_to(d: &DistanceMatrix, i: usize, group: &[usize]) -> f64 {
    let (sum, count) = group
        .iter()
        .filter(|&&j| j != i)
        .fold((0.0, 0usize), |(s, c), &j| (s + d.get(i, j), c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Splits `members` (sorted) into a splinter group and the remainder.
fn splinter(d: &DistanceMatrix, members: &[usize]) -> (Vec<usize>, Vec<usize>) {
    // Seed: the member with the largest mean dissimilarity to the others.
    let seed = members
        .iter()
        .map(|&i| (i, mean_to(d, i, members)))
        .fold((usize::MAX, f64::NEG_INFINITY), |b, c| {
            if c.1 > b.1 {
                c
            } else {
                b
            }
        })
        .0;
    let mut splinter = vec![seed];
    let mut rest: Vec<usize> = members.iter().copied().filter(|&i| i != seed).collect();

    // Move the member that is, on average, most clearly closer to the
    // splinter group than to the rest, until no member is.
    while rest.len() > 1 {
        let mut best: Option<(usize, f64)> = None;
        for (pos, &i) in rest.iter().enumerate() {
            let diff = mean_to(d, i, &rest) - mean_to(d, i, &splinter);
            if diff > 0.0 && best.is_none_or(|b| diff > b.1) {
                best = Some((pos, diff));
            }
        }
        let Some((pos, _)) = best else { break };
        splinter.push(rest.remove(pos));
    }
    splinter.sort_unstable();
    (splinter, rest)
}

/// Divisive analysis. The cluster with the largest diameter is split first
/// (ties: lowest smallest member) until only singletons remain.
pub fn diana(d: &DistanceMatrix) -> Result<Dendrogram> {
    let n = d.len();
    if n < 2 {
        return Err(Error::Param(format!("need at least 2 items, got {n}")));
    }
    struct Split {
        parts: [Vec<usize>; 2],
        height: f64,
    }
    let mut clusters: Vec<(Vec<usize>, f64)> = vec![((0..n).collect(), 0.0)];
    clusters[0].1 = diameter(d, &clusters[0].0);
    let mut splits = Vec::with_capacity(n - 1);

    while splits.len() < n - 1 {
        let pick = clusters
            .iter()
            .enumerate()
            .filter(|(_, (m, _))| m.len() > 1)
            .fold(
                None::<(usize, f64, usize)>,
                |best, (idx, (m, diam))| match best {
                    Some((_, bd, bmin)) if *diam < bd || (*diam == bd && m[0] > bmin) => best,
                    _ => Some((idx, *diam, m[0])),
                },
            )
            .expect("a cluster with two or more members remains")
            .0;
        let (members, height) = clusters.swap_remove(pick);
        let (a, b) = splinter(d, &members);
        let (a, b) = if a[0] < b[0] { (a, b) } else { (b, a) };
        let (da, db) = (diameter(d, &a), diameter(d, &b));
        splits.push(Split {
            parts: [a.clone(), b.clone()],
            height,
        });
        clusters.push((a, da));
        clusters.push((b, db));
    }

    // Replay the splits bottom-up as merges.
    let mut id_of: std::collections::HashMap<Vec<usize>, usize> =
        (0..n).map(|i| (vec![i], i)).collect();
    let mut merges = Vec::with_capacity(n - 1);
    for (step, split) in splits.iter().rev().enumerate() {
        let [a, b] = &split.parts;
        let mut joined: Vec<usize> = a.iter().chain(b).copied().collect();
        joined.sort_unstable();
        merges.push(Merge {
            a: id_of[a],
            b: id_of[b],
            height: split.height,
            size: joined.len(),
        });
        id_of.insert(joined, n + step);
    }
    Ok(Dendrogram::new(DendrogramKind::Divisive, n, merges))
}
