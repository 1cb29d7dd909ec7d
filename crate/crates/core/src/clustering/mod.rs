//! Clustering over a precomputed [`DistanceMatrix`]: k-medoids, agglomerative
//! and divisive hierarchies, density-based clustering, and silhouette-driven
//! model selection.

mod dbscan;
mod hierarchical;
mod pam;
mod select;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dbscan::dbscan;
pub use hierarchical::{agnes, diana, Linkage};
pub use pam::{pam, pam_with_trace, PamResult};
pub use select::{
    eps_grid, model_select, Candidate, EpsGrid, Method, MethodSelection, SelectionConfig,
};

/// Flat assignment of items to clusters; `None` marks noise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<Option<usize>>,
    k: usize,
}

impl Partition {
    /// Densely relabels cluster ids in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        Self::with_noise(labels.iter().map(|&l| Some(l)).collect())
    }

    /// Like [`Partition::from_labels`] but allowing noise items.
    pub fn with_noise(labels: Vec<Option<usize>>) -> Self {
        let mut remap = HashMap::new();
        let labels: Vec<Option<usize>> = labels
            .into_iter()
            .map(|l| {
                l.map(|c| {
                    let next = remap.len();
                    *remap.entry(c).or_insert(next)
                })
            })
            .collect();
        Partition {
            k: remap.len(),
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of clusters, noise excluded.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Option<usize> {
        self.labels[i]
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    /// Cluster sizes indexed by cluster id.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for c in self.labels.iter().flatten() {
            sizes[*c] += 1;
        }
        sizes
    }

    /// Labels with every noise item promoted to its own singleton cluster.
    pub fn noise_as_singletons(&self) -> Vec<usize> {
        let mut next = self.k;
        self.labels
            .iter()
            .map(|l| {
                l.unwrap_or_else(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    }
}

/// Whether a dendrogram was built bottom-up or top-down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DendrogramKind {
    Agglomerative,
    Divisive,
}

/// One join in a dendrogram. Ids below `n` are items; id `n + i` is the
/// cluster formed by merge `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub size: usize,
}

/// Binary cluster tree stored as `n - 1` merges in bottom-up order.
///
/// Divisive trees are stored the same way: their splits reversed, so that
/// cutting at `k` clusters keeps the first `k - 1` splits.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub kind: DendrogramKind,
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub(crate) fn new(kind: DendrogramKind, n: usize, merges: Vec<Merge>) -> Self {
        debug_assert_eq!(merges.len(), n.saturating_sub(1));
        Dendrogram { kind, n, merges }
    }

    /// Number of leaves.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Flat partition with `k` clusters: the first `n - k` merges are applied.
pub fn cut_dendrogram(dend: &Dendrogram, k: usize) -> Result<Partition> {
    let n = dend.n;
    if k == 0 || k > n {
        return Err(Error::Param(format!("k = {k} outside 1..={n}")));
    }
    let mut parent: Vec<usize> = (0..2 * n).collect();
    for (step, m) in dend.merges.iter().take(n - k).enumerate() {
        let node = n + step;
        let ra = find(&mut parent, m.a);
        let rb = find(&mut parent, m.b);
        parent[ra] = node;
        parent[rb] = node;
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Ok(Partition::from_labels(&roots))
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Pam => "pam",
            Method::Agnes => "agnes",
            Method::Diana => "diana",
            Method::Dbscan => "dbscan",
        })
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(Error::Param(format!("unknown linkage {other:?}"))),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        })
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::features::DistanceMatrix;

    /// Items {0,1} and {2,3}: 0.1 within a pair, 0.9 across.
    pub fn two_tight_pairs() -> DistanceMatrix {
        DistanceMatrix::from_square(&[
            vec![0.0, 0.1, 0.9, 0.9],
            vec![0.1, 0.0, 0.9, 0.9],
            vec![0.9, 0.9, 0.0, 0.1],
            vec![0.9, 0.9, 0.1, 0.0],
        ])
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_relabels_densely() {
        let p = Partition::with_noise(vec![Some(5), None, Some(2), Some(5)]);
        assert_eq!(p.labels(), &[Some(0), None, Some(1), Some(0)]);
        assert_eq!(p.k(), 2);
        assert_eq!(p.noise_count(), 1);
        assert_eq!(p.sizes(), vec![2, 1]);
        assert_eq!(p.noise_as_singletons(), vec![0, 2, 1, 0]);
    }

    #[test]
    fn cut_bounds() {
        let d = agnes(&fixtures::two_tight_pairs(), Linkage::Average).unwrap();
        assert_eq!(cut_dendrogram(&d, 1).unwrap().k(), 1);
        assert_eq!(
            cut_dendrogram(&d, 4).unwrap(),
            Partition::from_labels(&[0, 1, 2, 3])
        );
        assert_eq!(
            cut_dendrogram(&d, 2).unwrap(),
            Partition::from_labels(&[0, 0, 1, 1])
        );
        assert!(matches!(cut_dendrogram(&d, 0), Err(Error::Param(_))));
        assert!(matches!(cut_dendrogram(&d, 5), Err(Error::Param(_))));
    }
}
