//! Seeded random graph models used for baselines, tests and synthetic corpora.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Random graph model with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticModel {
    /// Erdős–Rényi G(n, p).
    ErdosRenyi { n: usize, p: f64 },
    /// Watts–Strogatz ring of `n` nodes, each linked to its `k` nearest
    /// neighbours (`k` even), edges rewired with probability `beta`.
    WattsStrogatz { n: usize, k: usize, beta: f64 },
    /// Barabási–Albert preferential attachment, `m0` links per new node.
    BarabasiAlbert { n: usize, m0: usize },
    /// `c` contiguous equal-ish blocks; intra-block pairs linked with
    /// probability `p_in`, inter-block pairs with `p_out`.
    PlantedPartition {
        n: usize,
        c: usize,
        p_in: f64,
        p_out: f64,
    },
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Param(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

/// Deterministic RNG for a seed.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Block index of each node under [`SyntheticModel::PlantedPartition`].
pub fn planted_blocks(n: usize, c: usize) -> Vec<usize> {
    (0..n).map(|u| u * c / n).collect()
}

pub fn generate_synthetic(model: SyntheticModel, seed: u64) -> Result<Graph> {
    let mut rng = rng_for(seed);
    match model {
        SyntheticModel::ErdosRenyi { n, p } => {
            check_prob("p", p)?;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edges(n, edges)
        }
        SyntheticModel::WattsStrogatz { n, k, beta } => {
            check_prob("beta", beta)?;
            if k == 0 || k % 2 != 0 || k >= n {
                return Err(Error::Param(format!("k = {k} must be even and in 2..{n}")));
            }
            watts_strogatz(n, k, beta, &mut rng)
        }
        SyntheticModel::BarabasiAlbert { n, m0 } => {
            if m0 == 0 || m0 >= n {
                return Err(Error::Param(format!("m0 = {m0} must be in 1..{n}")));
            }
            barabasi_albert(n, m0, &mut rng)
        }
        SyntheticModel::PlantedPartition { n, c, p_in, p_out } => {
            check_prob("p_in", p_in)?;
            check_prob("p_out", p_out)?;
            if c == 0 || c > n {
                return Err(Error::Param(format!("c = {c} must be in 1..={n}")));
            }
            let blocks = planted_blocks(n, c);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    let p = if blocks[u] == blocks[v] { p_in } else { p_out };
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edges(n, edges)
        }
    }
}

fn watts_strogatz<R: Rng>(n: usize, k: usize, beta: f64, rng: &mut R) -> Result<Graph> {
    let key = |u: NodeId, v: NodeId| (u.min(v), u.max(v));
    let mut present: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut ring = Vec::with_capacity(n * k / 2);
    for j in 1..=k / 2 {
        for u in 0..n {
            let e = key(u, (u + j) % n);
            present.insert(e);
            ring.push((u, (u + j) % n));
        }
    }
    let mut edges = Vec::with_capacity(ring.len());
    for (u, v) in ring {
        let mut target = v;
        if rng.gen::<f64>() < beta && present.len() < n * (n - 1) / 2 {
            // Degree of u may already be n - 1; give up after a bounded search.
            for _ in 0..4 * n {
                let w = rng.gen_range(0..n);
                if w != u && !present.contains(&key(u, w)) {
                    present.remove(&key(u, v));
                    present.insert(key(u, w));
                    target = w;
                    break;
                }
            }
        }
        edges.push((u, target));
    }
    Graph::from_edges(n, edges)
}

fn barabasi_albert<R: Rng>(n: usize, m0: usize, rng: &mut R) -> Result<Graph> {
    let mut edges = Vec::new();
    // Seed clique on m0 + 1 nodes.
    let mut repeated: Vec<NodeId> = Vec::new();
    let seed_nodes = (m0 + 1).min(n);
    for u in 0..seed_nodes {
        for v in (u + 1)..seed_nodes {
            edges.push((u, v));
            repeated.push(u);
            repeated.push(v);
        }
    }
    for u in seed_nodes..n {
        let mut targets: Vec<NodeId> = Vec::with_capacity(m0);
        while targets.len() < m0 {
            let &t = repeated.choose(rng).expect("seed clique is non-empty");
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            edges.push((u, t));
            repeated.push(u);
            repeated.push(t);
        }
    }
    Graph::from_edges(n, edges)
}
