use crate::error::{Error, Result};
use crate::features::DistanceMatrix;

use super::Partition;

/// Improvements smaller than this are treated as no improvement, so that
/// rounding noise cannot make SWAP cycle.
const MIN_GAIN: f64 = 1e-12;

/// Outcome of a k-medoids run.
#[derive(Debug, Clone)]
pub struct PamResult {
    pub partition: Partition,
    /// Medoid item per cluster id.
    pub medoids: Vec<usize>,
    /// Sum of distances from each item to its medoid.
    pub cost: f64,
    /// Total cost after BUILD, then after every accepted swap.
    pub cost_trace: Vec<f64>,
}

/// k-medoids partition (BUILD seeding followed by SWAP).
pub fn pam(d: &DistanceMatrix, k: usize) -> Result<Partition> {
    Ok(pam_with_trace(d, k)?.partition)
}

/// Nearest medoid (lowest item index on ties) and the distance to the
/// closest other medoid, per item.
fn nearest_two(d: &DistanceMatrix, medoids: &[usize]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = d.len();
    let mut sorted = medoids.to_vec();
    sorted.sort_unstable();
    let mut owner = vec![0; n];
    let mut near = vec![f64::INFINITY; n];
    let mut second = vec![f64::INFINITY; n];
    for j in 0..n {
        if sorted.binary_search(&j).is_ok() {
            // A medoid always owns itself.
            owner[j] = j;
            near[j] = 0.0;
            second[j] = sorted
                .iter()
                .filter(|&&m| m != j)
                .map(|&m| d.get(j, m))
                .fold(f64::INFINITY, f64::min);
            continue;
        }
        for &m in &sorted {
            let dist = d.get(j, m);
            if dist < near[j] {
                second[j] = near[j];
                near[j] = dist;
                owner[j] = m;
            } else if dist < second[j] {
                second[j] = dist;
            }
        }
    }
    (owner, near, second)
}

pub fn pam_with_trace(d: &DistanceMatrix, k: usize) -> Result<PamResult> {
    let n = d.len();
    if k < 2 || k >= n {
        return Err(Error::Param(format!("k = {k} outside 2..{n}")));
    }

    // BUILD: first the item with the smallest total dissimilarity, then
    // greedily the item that lowers the total cost the most.
    let mut medoids = Vec::with_capacity(k);
    let first = (0..n)
        .map(|c| (c, (0..n).map(|j| d.get(c, j)).sum::<f64>()))
        .fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        )
        .0;
    medoids.push(first);
    let mut near: Vec<f64> = (0..n).map(|j| d.get(j, first)).collect();
    while medoids.len() < k {
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for c in (0..n).filter(|c| !medoids.contains(c)) {
            let gain: f64 = (0..n).map(|j| (near[j] - d.get(j, c)).max(0.0)).sum();
            if gain > best.1 {
                best = (c, gain);
            }
        }
        medoids.push(best.0);
        for (j, nj) in near.iter_mut().enumerate() {
            *nj = nj.min(d.get(j, best.0));
        }
    }

    // SWAP: apply the best improving (medoid, non-medoid) exchange until
    // none improves.
    let (mut owner, mut near, mut second) = nearest_two(d, &medoids);
    let mut cost_trace = vec![near.iter().sum::<f64>()];
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for (mi, &m) in medoids.iter().enumerate() {
            for h in (0..n).filter(|h| !medoids.contains(h)) {
                let mut delta = 0.0;
                for j in 0..n {
                    let dh = d.get(j, h);
                    let replacement = if owner[j] == m {
                        second[j].min(dh)
                    } else {
                        near[j].min(dh)
                    };
                    delta += replacement - near[j];
                }
                if delta < -MIN_GAIN && best.is_none_or(|b| delta < b.2) {
                    best = Some((mi, h, delta));
                }
            }
        }
        let Some((mi, h, _)) = best else { break };
        medoids[mi] = h;
        (owner, near, second) = nearest_two(d, &medoids);
        cost_trace.push(near.iter().sum());
    }

    let mut sorted = medoids.clone();
    sorted.sort_unstable();
    let labels: Vec<usize> = owner
        .iter()
        .map(|o| sorted.binary_search(o).unwrap())
        .collect();
    let partition = Partition::from_labels(&labels);
    // Medoid of each dense cluster id.
    let mut by_cluster = vec![usize::MAX; k];
    for &m in &sorted {
        by_cluster[partition.label(m).expect("medoids are never noise")] = m;
    }
    Ok(PamResult {
        partition,
        medoids: by_cluster,
        cost: *cost_trace.last().unwrap(),
        cost_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::fixtures::two_tight_pairs;

    #[test]
    fn separates_two_pairs() {
        let r = pam_with_trace(&two_tight_pairs(), 2).unwrap();
        assert_eq!(r.partition, Partition::from_labels(&[0, 0, 1, 1]));
        assert!((r.cost - 0.2).abs() < 1e-12);
    }

    #[test]
    fn all_zero_distances() {
        let d = DistanceMatrix::from_upper(5, vec![0.0; 10]).unwrap();
        let r = pam_with_trace(&d, 2).unwrap();
        assert_eq!(r.partition.k(), 2);
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn k_out_of_range() {
        let d = two_tight_pairs();
        assert!(matches!(pam(&d, 1), Err(Error::Param(_))));
        assert!(matches!(pam(&d, 4), Err(Error::Param(_))));
    }

    #[test]
    fn cost_trace_is_monotone() {
        let d = DistanceMatrix::from_fn(12, |i, j| ((i * 7 + j * 13) % 17) as f64 / 17.0 + 0.01)
            .unwrap();
        let r = pam_with_trace(&d, 3).unwrap();
        assert!(r.cost_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.partition.k(), 3);
        for (c, &m) in r.medoids.iter().enumerate() {
            assert_eq!(r.partition.label(m), Some(c));
        }
    }
}
