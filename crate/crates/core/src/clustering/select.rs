use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::DistanceMatrix;
use crate::stats::silhouette;

use super::{agnes, cut_dendrogram, dbscan, diana, pam, Linkage, Partition};

/// Clustering algorithm family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pam,
    Agnes,
    Diana,
    Dbscan,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pam, Method::Agnes, Method::Diana, Method::Dbscan];
}

/// Radii tried for density-based clustering.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsGrid {
    /// The 10%, 20%, ..., 90% quantiles of the off-diagonal distances.
    #[default]
    Deciles,
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    pub k_min: usize,
    /// Clamped to `N - 1`.
    pub k_max: usize,
    pub linkage: Linkage,
    pub eps_grid: EpsGrid,
    pub min_pts: Vec<usize>,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            k_min: 2,
            k_max: 10,
            linkage: Linkage::Average,
            eps_grid: EpsGrid::Deciles,
            min_pts: vec![2, 3, 4, 5],
        }
    }
}

/// One scored parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Requested cluster count; for density-based runs, the count found.
    pub k: usize,
    pub eps: Option<f64>,
    pub min_pts: Option<usize>,
    pub partition: Partition,
    pub silhouette: f64,
}

/// Scored candidates of one method and the best of them.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSelection {
    pub method: Method,
    /// Highest average silhouette, earliest candidate on ties. `None` when
    /// no candidate yields two or more clusters.
    pub best: Option<Candidate>,
    pub candidates: Vec<Candidate>,
}

/// Linear-interpolated quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Positive, distinct radii in ascending order.
pub fn eps_grid(d: &DistanceMatrix, grid: &EpsGrid) -> Vec<f64> {
    let mut eps: Vec<f64> = match grid {
        EpsGrid::List(values) => values.clone(),
        EpsGrid::Deciles => {
            if d.upper().is_empty() {
                return Vec::new();
            }
            let mut sorted = d.upper().to_vec();
            sorted.sort_by(f64::total_cmp);
            (1..=9)
                .map(|i| quantile(&sorted, i as f64 / 10.0))
                .collect()
        }
    };
    eps.retain(|e| *e > 0.0 && e.is_finite());
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    eps
}

fn score(
    d: &DistanceMatrix,
    k: usize,
    eps: Option<f64>,
    min_pts: Option<usize>,
    partition: Partition,
) -> Option<Candidate> {
    let silhouette = silhouette(d, &partition).ok()?.average;
    Some(Candidate {
        k,
        eps,
        min_pts,
        partition,
        silhouette,
    })
}

fn candidates(
    d: &DistanceMatrix,
    method: Method,
    ks: &[usize],
    config: &SelectionConfig,
) -> Result<Vec<Candidate>> {
    let cut_all = |dend| -> Result<Vec<Candidate>> {
        ks.iter()
            .map(|&k| Ok(score(d, k, None, None, cut_dendrogram(&dend, k)?)))
            .filter_map(Result::transpose)
            .collect()
    };
    match method {
        Method::Pam => ks
            .iter()
            .map(|&k| Ok(score(d, k, None, None, pam(d, k)?)))
            .filter_map(Result::transpose)
            .collect(),
        Method::Agnes => cut_all(agnes(d, config.linkage)?),
        Method::Diana => cut_all(diana(d)?),
        Method::Dbscan => {
            let mut out = Vec::new();
            for eps in eps_grid(d, &config.eps_grid) {
                for &min_pts in &config.min_pts {
                    let p = dbscan(d, eps, min_pts)?;
                    if let Some(c) = score(d, p.k(), Some(eps), Some(min_pts), p) {
                        out.push(c);
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Scores every parameterization of each method by average silhouette and
/// keeps the best. Results follow the order of `methods`.
pub fn model_select(
    d: &DistanceMatrix,
    methods: &[Method],
    config: &SelectionConfig,
) -> Result<Vec<MethodSelection>> {
    let n = d.len();
    if n < 3 {
        return Err(Error::Param(format!("need at least 3 items, got {n}")));
    }
    let k_max = config.k_max.min(n - 1);
    if config.k_min < 2 || config.k_min > k_max {
        return Err(Error::Param(format!(
            "k range {}..={} invalid for {n} items",
            config.k_min, config.k_max
        )));
    }
    if config.min_pts.contains(&0) {
        return Err(Error::Param("min_pts values must be at least 1".into()));
    }
    let ks: Vec<usize> = (config.k_min..=k_max).collect();
    methods
        .par_iter()
        .map(|&method| {
            let candidates = candidates(d, method, &ks, config)?;
            let best = candidates
                .iter()
                .fold(None::<&Candidate>, |best, c| match best {
                    Some(b) if c.silhouette <= b.silhouette => Some(b),
                    _ => Some(c),
                })
                .cloned();
            Ok(MethodSelection {
                method,
                best,
                candidates,
            })
        })
        .collect()
}
