use std::collections::BTreeMap;

use crate::clustering::Partition;
use crate::error::{Error, Result};
use crate::features::DistanceMatrix;

/// Silhouette widths of a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SilhouetteReport {
    /// Width per item; `None` for noise items, which are left out.
    pub widths: Vec<Option<f64>>,
    /// Mean width over the scored items.
    pub average: f64,
}

/// Silhouette widths `(b - a) / max(a, b)`, with `a` the mean distance to the
/// item's own cluster and `b` the smallest mean distance to another cluster.
/// Members of singleton clusters score 0.
pub fn silhouette(d: &DistanceMatrix, p: &Partition) -> Result<SilhouetteReport> {
    if d.len() != p.len() {
        return Err(Error::Param(format!(
            "matrix has {} items, partition {}",
            d.len(),
            p.len()
        )));
    }
    let sizes = p.sizes();
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(Error::Undefined(
            "silhouette needs at least 2 clusters".into(),
        ));
    }
    let k = p.k();
    let mut widths = vec![None; p.len()];
    let mut sums = vec![0.0; k];
    for (i, width) in widths.iter_mut().enumerate() {
        let Some(own) = p.label(i) else { continue };
        if sizes[own] == 1 {
            *width = Some(0.0);
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..p.len() {
            if let Some(c) = p.label(j) {
                sums[c] += d.get(i, j);
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        *width = Some(if denom > 0.0 { (b - a) / denom } else { 0.0 });
    }
    let scored: Vec<f64> = widths.iter().flatten().copied().collect();
    let average = scored.iter().sum::<f64>() / scored.len() as f64;
    Ok(SilhouetteReport { widths, average })
}

/// Cross-tabulation of two labellings of the same items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// `cells[i][j]`: items in row cluster `i` and column cluster `j`.
    pub cells: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

impl ContingencyTable {
    /// Rows and columns follow the sorted distinct labels of each side.
    pub fn new(rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::Param(format!(
                "labellings differ in size: {} vs {}",
                rows.len(),
                cols.len()
            )));
        }
        let index = |labels: &[usize]| -> BTreeMap<usize, usize> {
            let mut m: BTreeMap<usize, usize> = labels.iter().map(|&l| (l, 0)).collect();
            for (pos, v) in m.values_mut().enumerate() {
                *v = pos;
            }
            m
        };
        let (ri, ci) = (index(rows), index(cols));
        let mut cells = vec![vec![0u64; ci.len()]; ri.len()];
        for (r, c) in rows.iter().zip(cols) {
            cells[ri[r]][ci[c]] += 1;
        }
        let row_sums = cells.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..ci.len())
            .map(|j| cells.iter().map(|r| r[j]).sum())
            .collect();
        Ok(ContingencyTable {
            cells,
            row_sums,
            col_sums,
            total: rows.len() as u64,
        })
    }
}

fn pairs(x: u64) -> i128 {
    let x = x as i128;
    x * (x - 1).max(0) / 2
}

/// Adjusted Rand index. Noise items count as singleton clusters.
///
/// Evaluated as one division of exact integer pair counts, so rational
/// results such as -1/2 come out exactly.
pub fn ari(p1: &Partition, p2: &Partition) -> Result<f64> {
    let table = ContingencyTable::new(&p1.noise_as_singletons(), &p2.noise_as_singletons())?;
    let index: i128 = table.cells.iter().flatten().map(|&c| pairs(c)).sum();
    let rows: i128 = table.row_sums.iter().map(|&c| pairs(c)).sum();
    let cols: i128 = table.col_sums.iter().map(|&c| pairs(c)).sum();
    let total = pairs(table.total);
    // (index - rows*cols/total) / ((rows+cols)/2 - rows*cols/total), scaled
    // by 2*total.
    let num = 2 * total * index - 2 * rows * cols;
    let den = total * (rows + cols) - 2 * rows * cols;
    if den == 0 {
        // Only reachable when both sides are all singletons or both are a
        // single cluster, i.e. identical partitions.
        return Ok(1.0);
    }
    Ok(num as f64 / den as f64)
}
