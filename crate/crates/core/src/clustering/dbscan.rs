use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::features::DistanceMatrix;

use super::Partition;

/// Density-based clustering over a precomputed matrix.
///
/// An item's neighbourhood is every item within `eps` (inclusive), itself
/// included; it is a core item when the neighbourhood holds at least
/// `min_pts` items. Items are scanned in index order. Items reachable from
/// no core item are noise.
pub fn dbscan(d: &DistanceMatrix, eps: f64, min_pts: usize) -> Result<Partition> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Param(format!("eps = {eps} must be positive")));
    }
    if min_pts == 0 {
        return Err(Error::Param("min_pts must be at least 1".into()));
    }
    let n = d.len();
    let neighbours = |i: usize| -> Vec<usize> { (0..n).filter(|&j| d.get(i, j) <= eps).collect() };

    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut next_cluster = 0;
    let mut queue = VecDeque::new();

    for start in 0..n {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let seeds = neighbours(start);
        if seeds.len() < min_pts {
            continue;
        }
        let cluster = next_cluster;
        next_cluster += 1;
        labels[start] = Some(cluster);
        queue.extend(seeds);
        while let Some(j) = queue.pop_front() {
            if labels[j].is_none() {
                labels[j] = Some(cluster);
            }
            if visited[j] {
                continue;
            }
            visited[j] = true;
            let reach = neighbours(j);
            if reach.len() >= min_pts {
                queue.extend(
                    reach
                        .into_iter()
                        .filter(|&x| !visited[x] || labels[x].is_none()),
                );
            }
        }
    }
    Ok(Partition::with_noise(labels))
}
