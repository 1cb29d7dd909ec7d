//! Local (per node, per link, per pair) and global topological measures.
//!
//! Everything distance-based comes out of a single all-sources sweep: one BFS
//! per source followed by dependency accumulation in reverse BFS order, which
//! yields node and link betweenness together with distance sums, eccentricities
//! and the distance distribution.

mod community;

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bfs_into, Graph, NodeId, UNREACHED};

pub use community::{maximize_modularity, modularity, CommunityPartition};

/// Sources handled sequentially by one task. Fixed so that floating-point
/// summation order does not depend on the thread count.
const SOURCES_PER_CHUNK: usize = 32;
/// Chunks held in memory before being folded into the running totals.
const CHUNKS_PER_BATCH: usize = 16;

/// Raw series of the seven local measures of one connected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalProfile {
    pub degree: Vec<usize>,
    /// `distance_counts[h]` is the number of unordered node pairs at `h` hops.
    pub distance_counts: Vec<u64>,
    pub eccentricity: Vec<u32>,
    pub betweenness: Vec<f64>,
    pub closeness: Vec<f64>,
    /// Indexed by edge id, see [`Graph::edges`].
    pub edge_betweenness: Vec<f64>,
    pub local_transitivity: Vec<f64>,
}

impl LocalProfile {
    /// Number of unordered node pairs, `n(n-1)/2`.
    pub fn pair_count(&self) -> u64 {
        self.distance_counts.iter().sum()
    }

    /// Pairwise distances in ascending order, one value per unordered pair.
    pub fn distances(&self) -> impl Iterator<Item = u32> + '_ {
        self.distance_counts
            .iter()
            .enumerate()
            .flat_map(|(h, &c)| std::iter::repeat_n(h as u32, c as usize))
    }

    pub fn mean_distance(&self) -> f64 {
        let total: f64 = self
            .distance_counts
            .iter()
            .enumerate()
            .map(|(h, &c)| h as f64 * c as f64)
            .sum();
        total / self.pair_count() as f64
    }

    /// The seven series as floats, in feature order: degree, distance,
    /// eccentricity, betweenness, closeness, edgebetweenness, local transitivity.
    pub fn series(&self) -> [Vec<f64>; 7] {
        [
            self.degree.iter().map(|&k| k as f64).collect(),
            self.distances().map(f64::from).collect(),
            self.eccentricity.iter().map(|&e| f64::from(e)).collect(),
            self.betweenness.clone(),
            self.closeness.clone(),
            self.edge_betweenness.clone(),
            self.local_transitivity.clone(),
        ]
    }
}

/// Names of the local measures, in feature order.
pub const LOCAL_MEASURES: [&str; 7] = [
    "degree",
    "distance",
    "eccentricity",
    "betweenness",
    "closeness",
    "edgebetweenness",
    "local_transitivity",
];

/// Names of the global measures, in feature order.
pub const GLOBAL_MEASURES: [&str; 12] = [
    "density",
    "diameter",
    "radius",
    "transitivity",
    "modularity",
    "avg_degree",
    "avg_distance",
    "avg_eccentricity",
    "avg_betweenness",
    "avg_closeness",
    "avg_edgebetweenness",
    "avg_local_transitivity",
];

/// The twelve global scalars of one network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalSummary {
    pub density: f64,
    pub diameter: f64,
    pub radius: f64,
    pub transitivity: f64,
    pub modularity: f64,
    pub avg_degree: f64,
    pub avg_distance: f64,
    pub avg_eccentricity: f64,
    pub avg_betweenness: f64,
    pub avg_closeness: f64,
    pub avg_edgebetweenness: f64,
    pub avg_local_transitivity: f64,
}

impl GlobalSummary {
    pub fn to_array(&self) -> [f64; 12] {
        [
            self.density,
            self.diameter,
            self.radius,
            self.transitivity,
            self.modularity,
            self.avg_degree,
            self.avg_distance,
            self.avg_eccentricity,
            self.avg_betweenness,
            self.avg_closeness,
            self.avg_edgebetweenness,
            self.avg_local_transitivity,
        ]
    }

    pub fn from_array(v: [f64; 12]) -> Self {
        GlobalSummary {
            density: v[0],
            diameter: v[1],
            radius: v[2],
            transitivity: v[3],
            modularity: v[4],
            avg_degree: v[5],
            avg_distance: v[6],
            avg_eccentricity: v[7],
            avg_betweenness: v[8],
            avg_closeness: v[9],
            avg_edgebetweenness: v[10],
            avg_local_transitivity: v[11],
        }
    }
}

/// Totals of one chunk of sources, plus each source's eccentricity and
/// distance sum.
type ChunkOutput = (SweepTotals, Vec<(u32, u64)>);

/// Per-source output of the shortest-path sweep, summed over a chunk.
struct SweepTotals {
    betweenness: Vec<f64>,
    edge_betweenness: Vec<f64>,
    distance_counts: Vec<u64>,
}

impl SweepTotals {
    fn new(n: usize, m: usize) -> Self {
        SweepTotals {
            betweenness: vec![0.0; n],
            edge_betweenness: vec![0.0; m],
            distance_counts: Vec::new(),
        }
    }

    fn absorb(&mut self, other: &SweepTotals) {
        for (a, b) in self.betweenness.iter_mut().zip(&other.betweenness) {
            *a += b;
        }
        for (a, b) in self
            .edge_betweenness
            .iter_mut()
            .zip(&other.edge_betweenness)
        {
            *a += b;
        }
        add_counts(&mut self.distance_counts, &other.distance_counts);
    }
}

fn add_counts(into: &mut Vec<u64>, from: &[u64]) {
    if into.len() < from.len() {
        into.resize(from.len(), 0);
    }
    for (a, b) in into.iter_mut().zip(from) {
        *a += b;
    }
}

/// Reusable per-task scratch space for one BFS + accumulation pass.
struct Scratch {
    dist: Vec<u32>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<NodeId>,
    queue: VecDeque<NodeId>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: Vec::with_capacity(n),
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }
}

/// Runs the sweep from `source`, adding pair dependencies into `totals`.
/// Returns `(eccentricity, distance sum)`.
fn sweep_source(
    g: &Graph,
    source: NodeId,
    s: &mut Scratch,
    totals: &mut SweepTotals,
) -> Result<(u32, u64)> {
    let n = g.node_count();
    s.dist.clear();
    s.dist.resize(n, UNREACHED);
    s.sigma.iter_mut().for_each(|x| *x = 0.0);
    s.delta.iter_mut().for_each(|x| *x = 0.0);
    s.order.clear();
    s.queue.clear();

    s.dist[source] = 0;
    s.sigma[source] = 1.0;
    s.queue.push_back(source);
    while let Some(u) = s.queue.pop_front() {
        s.order.push(u);
        let du = s.dist[u];
        for &v in g.neighbors(u) {
            if s.dist[v] == UNREACHED {
                s.dist[v] = du + 1;
                s.queue.push_back(v);
            }
            if s.dist[v] == du + 1 {
                s.sigma[v] += s.sigma[u];
            }
        }
    }
    if s.order.len() != n {
        let missing = s.dist.iter().position(|&d| d == UNREACHED).unwrap_or(0);
        return Err(Error::Disconnected(missing));
    }

    let mut ecc = 0;
    let mut sum = 0u64;
    for v in (source + 1)..n {
        let d = s.dist[v] as usize;
        if totals.distance_counts.len() <= d {
            totals.distance_counts.resize(d + 1, 0);
        }
        totals.distance_counts[d] += 1;
    }
    for &d in &s.dist {
        ecc = ecc.max(d);
        sum += u64::from(d);
    }

    for &w in s.order.iter().rev() {
        let dw = s.dist[w];
        if dw == 0 {
            continue;
        }
        let coeff = (1.0 + s.delta[w]) / s.sigma[w];
        for (&v, &e) in g.neighbors(w).iter().zip(g.incident_edges(w)) {
            if s.dist[v] + 1 == dw {
                let c = s.sigma[v] * coeff;
                totals.edge_betweenness[e] += c;
                s.delta[v] += c;
            }
        }
        totals.betweenness[w] += s.delta[w];
    }
    Ok((ecc, sum))
}

/// Distance-based part of the profile.
struct PathMeasures {
    distance_counts: Vec<u64>,
    eccentricity: Vec<u32>,
    betweenness: Vec<f64>,
    closeness: Vec<f64>,
    edge_betweenness: Vec<f64>,
}

fn path_measures(g: &Graph) -> Result<PathMeasures> {
    let n = g.node_count();
    let m = g.edge_count();
    let mut totals = SweepTotals::new(n, m);
    let mut eccentricity = vec![0u32; n];
    let mut closeness = vec![0.0; n];

    let chunk_starts: Vec<usize> = (0..n).step_by(SOURCES_PER_CHUNK).collect();
    for batch in chunk_starts.chunks(CHUNKS_PER_BATCH) {
        let partials: Vec<Result<ChunkOutput>> = batch
            .par_iter()
            .map(|&start| {
                let end = (start + SOURCES_PER_CHUNK).min(n);
                let mut scratch = Scratch::new(n);
                let mut local = SweepTotals::new(n, m);
                let mut per_source = Vec::with_capacity(end - start);
                for src in start..end {
                    per_source.push(sweep_source(g, src, &mut scratch, &mut local)?);
                }
                Ok((local, per_source))
            })
            .collect();
        for (&start, partial) in batch.iter().zip(partials) {
            let (local, per_source) = partial?;
            totals.absorb(&local);
            for (i, (ecc, sum)) in per_source.into_iter().enumerate() {
                eccentricity[start + i] = ecc;
                closeness[start + i] = 1.0 / sum as f64;
            }
        }
    }

    // Each unordered pair was accumulated once from either end.
    totals.betweenness.iter_mut().for_each(|b| *b /= 2.0);
    totals.edge_betweenness.iter_mut().for_each(|b| *b /= 2.0);

    Ok(PathMeasures {
        distance_counts: totals.distance_counts,
        eccentricity,
        betweenness: totals.betweenness,
        closeness,
        edge_betweenness: totals.edge_betweenness,
    })
}

pub fn degrees(g: &Graph) -> Vec<usize> {
    (0..g.node_count()).map(|u| g.degree(u)).collect()
}

/// Eccentricities with `(diameter, radius)`.
pub fn eccentricities(g: &Graph) -> Result<(Vec<u32>, u32, u32)> {
    let n = g.node_count();
    let ecc: Vec<u32> = (0..n)
        .into_par_iter()
        .map_init(
            || (Vec::new(), VecDeque::new()),
            |(dist, queue), src| {
                bfs_into(g, src, dist, queue);
                if let Some(u) = dist.iter().position(|&d| d == UNREACHED) {
                    return Err(Error::Disconnected(u));
                }
                Ok(dist.iter().copied().max().unwrap_or(0))
            },
        )
        .collect::<Result<_>>()?;
    let diameter = ecc.iter().copied().max().unwrap_or(0);
    let radius = ecc.iter().copied().min().unwrap_or(0);
    Ok((ecc, diameter, radius))
}

pub fn betweenness(g: &Graph) -> Result<Vec<f64>> {
    Ok(path_measures(g)?.betweenness)
}

pub fn closeness(g: &Graph) -> Result<Vec<f64>> {
    Ok(path_measures(g)?.closeness)
}

/// Link betweenness indexed by edge id.
pub fn edge_betweenness(g: &Graph) -> Result<Vec<f64>> {
    Ok(path_measures(g)?.edge_betweenness)
}

/// Number of links among the neighbours of each node.
fn neighbor_links(g: &Graph) -> Vec<u64> {
    let n = g.node_count();
    let mut marked = vec![false; n];
    (0..n)
        .map(|u| {
            for &v in g.neighbors(u) {
                marked[v] = true;
            }
            let mut count = 0;
            for &v in g.neighbors(u) {
                count += g
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| w > v && marked[w])
                    .count() as u64;
            }
            for &v in g.neighbors(u) {
                marked[v] = false;
            }
            count
        })
        .collect()
}

/// Clustering coefficient of every node; nodes of degree below 2 get 0.
pub fn local_transitivity(g: &Graph) -> Vec<f64> {
    neighbor_links(g)
        .into_iter()
        .enumerate()
        .map(|(u, links)| {
            let k = g.degree(u) as u64;
            if k < 2 {
                0.0
            } else {
                links as f64 / (k * (k - 1) / 2) as f64
            }
        })
        .collect()
}

/// Undirected density `2m / (n(n-1))`.
pub fn density(g: &Graph) -> f64 {
    let n = g.node_count() as f64;
    2.0 * g.edge_count() as f64 / (n * (n - 1.0))
}

/// Three times the triangle count over the number of length-2 paths.
pub fn global_transitivity(g: &Graph) -> Result<f64> {
    // Every triangle is seen once from each of its corners.
    let closed: u64 = neighbor_links(g).iter().sum();
    let paths: u64 = (0..g.node_count())
        .map(|u| {
            let k = g.degree(u) as u64;
            k * k.saturating_sub(1) / 2
        })
        .sum();
    if paths == 0 {
        return Err(Error::Undefined("graph has no path of length 2".into()));
    }
    Ok(closed as f64 / paths as f64)
}

/// All seven local series of a connected graph.
pub fn local_profile(g: &Graph) -> Result<LocalProfile> {
    let paths = path_measures(g)?;
    Ok(LocalProfile {
        degree: degrees(g),
        distance_counts: paths.distance_counts,
        eccentricity: paths.eccentricity,
        betweenness: paths.betweenness,
        closeness: paths.closeness,
        edge_betweenness: paths.edge_betweenness,
        local_transitivity: local_transitivity(g),
    })
}

fn mean<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut count = 0usize;
    let mut sum = 0.0;
    for v in values {
        sum += v;
        count += 1;
    }
    sum / count as f64
}

/// Global scalars from a graph, its profile and its best modularity.
pub fn global_summary(
    g: &Graph,
    profile: &LocalProfile,
    best_modularity: f64,
) -> Result<GlobalSummary> {
    let diameter = profile.eccentricity.iter().copied().max().unwrap_or(0);
    let radius = profile.eccentricity.iter().copied().min().unwrap_or(0);
    Ok(GlobalSummary {
        density: density(g),
        diameter: f64::from(diameter),
        radius: f64::from(radius),
        transitivity: global_transitivity(g)?,
        modularity: best_modularity,
        avg_degree: mean(profile.degree.iter().map(|&k| k as f64)),
        avg_distance: profile.mean_distance(),
        avg_eccentricity: mean(profile.eccentricity.iter().map(|&e| f64::from(e))),
        avg_betweenness: mean(profile.betweenness.iter().copied()),
        avg_closeness: mean(profile.closeness.iter().copied()),
        avg_edgebetweenness: mean(profile.edge_betweenness.iter().copied()),
        avg_local_transitivity: mean(profile.local_transitivity.iter().copied()),
    })
}

/// Profile, community partition and global summary of a connected graph.
pub fn characterize(g: &Graph) -> Result<(LocalProfile, CommunityPartition, GlobalSummary)> {
    let profile = local_profile(g)?;
    let (partition, q) = maximize_modularity(g);
    let summary = global_summary(g, &profile, q)?;
    Ok((profile, partition, summary))
}
