//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::ops::RangeInclusive;

use nettopo::graph::connected_components;
use nettopo::measures::{modularity, CommunityPartition};
use nettopo::{DistanceMatrix, Graph, Histogram};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_connected(rng: &mut ChaCha8Rng, n_range: RangeInclusive<usize>) -> Graph {
    loop {
        let n = rng.gen_range(n_range.clone());
        let p = rng.gen_range(0.25..0.75);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| rng.gen::<f64>() < p)
            .collect();
        if let Ok(g) = Graph::from_edges(n, edges) {
            if connected_components(&g).count() == 1 {
                return g;
            }
        }
    }
}

/// Path measures obtained by enumerating every simple path of every pair.
pub struct PathOracle {
    /// `dist[u][v]` in hops.
    pub dist: Vec<Vec<usize>>,
    pub eccentricity: Vec<usize>,
    pub closeness: Vec<f64>,
    pub betweenness: Vec<f64>,
    /// Indexed like [`Graph::edges`].
    pub edge_betweenness: Vec<f64>,
}

fn simple_paths(g: &Graph, s: usize, t: usize) -> Vec<Vec<usize>> {
    fn rec(g: &Graph, t: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if u == t {
            out.push(path.clone());
            return;
        }
        for &v in g.neighbors(u) {
            if !on[v] {
                on[v] = true;
                path.push(v);
                rec(g, t, path, on, out);
                path.pop();
                on[v] = false;
            }
        }
    }
    let mut on = vec![false; g.node_count()];
    on[s] = true;
    let mut out = Vec::new();
    rec(g, t, &mut vec![s], &mut on, &mut out);
    out
}

#[allow(clippy::needless_range_loop)]
pub fn path_oracle(g: &Graph) -> PathOracle {
    let n = g.node_count();
    let edge_id = |a: usize, b: usize| g.edges().binary_search(&(a.min(b), a.max(b))).unwrap();
    let mut dist = vec![vec![0; n]; n];
    let mut betweenness = vec![0.0; n];
    let mut edge_betweenness = vec![0.0; g.edge_count()];
    for s in 0..n {
        for t in s + 1..n {
            let paths = simple_paths(g, s, t);
            let shortest = paths.iter().map(Vec::len).min().unwrap();
            let geodesics: Vec<&Vec<usize>> =
                paths.iter().filter(|p| p.len() == shortest).collect();
            let share = 1.0 / geodesics.len() as f64;
            dist[s][t] = shortest - 1;
            dist[t][s] = shortest - 1;
            for p in geodesics {
                for &v in &p[1..p.len() - 1] {
                    betweenness[v] += share;
                }
                for w in p.windows(2) {
                    edge_betweenness[edge_id(w[0], w[1])] += share;
                }
            }
        }
    }
    let eccentricity = dist.iter().map(|row| *row.iter().max().unwrap()).collect();
    let closeness = dist
        .iter()
        .map(|row| 1.0 / row.iter().sum::<usize>() as f64)
        .collect();
    PathOracle {
        dist,
        eccentricity,
        closeness,
        betweenness,
        edge_betweenness,
    }
}

/// `3 * triangles / connected triples`, triangles found by triple enumeration.
pub fn transitivity_oracle(g: &Graph) -> f64 {
    let n = g.node_count();
    let mut triangles = 0usize;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                    triangles += 1;
                }
            }
        }
    }
    let triples: usize = (0..n)
        .map(|u| g.degree(u) * g.degree(u).saturating_sub(1) / 2)
        .sum();
    3.0 * triangles as f64 / triples as f64
}

/// Sum over communities of `internal links / m - (total degree / 2m)^2`.
pub fn modularity_oracle(g: &Graph, labels: &[usize]) -> f64 {
    let m = g.edge_count() as f64;
    let k = labels.iter().max().unwrap() + 1;
    let mut internal = vec![0.0; k];
    let mut degree = vec![0.0; k];
    for &(u, v) in g.edges() {
        if labels[u] == labels[v] {
            internal[labels[u]] += 1.0;
        }
    }
    for (u, &c) in labels.iter().enumerate() {
        degree[c] += g.degree(u) as f64;
    }
    (0..k)
        .map(|c| internal[c] / m - (degree[c] / (2.0 * m)).powi(2))
        .sum()
}

/// Calls `f` on every set partition of `0..n`, as restricted growth strings.
pub fn for_each_partition(n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(labels: &mut Vec<usize>, n: usize, max: usize, f: &mut impl FnMut(&[usize])) {
        if labels.len() == n {
            f(labels);
            return;
        }
        for l in 0..=max + 1 {
            labels.push(l);
            rec(labels, n, max.max(l), f);
            labels.pop();
        }
    }
    let mut labels = vec![0];
    rec(&mut labels, n, 0, f);
}

pub fn exhaustive_best_modularity(g: &Graph) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for_each_partition(g.node_count(), &mut |labels| {
        best = best.max(modularity(g, &CommunityPartition::from_labels(labels)));
    });
    best
}

/// Random histogram; about a third of the bins are left empty.
pub fn random_histogram(rng: &mut ChaCha8Rng, bins: usize) -> Histogram {
    let raw: Vec<f64> = (0..bins)
        .map(|_| {
            if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen::<f64>()
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    let masses = if total == 0.0 {
        let mut m = vec![0.0; bins];
        m[rng.gen_range(0..bins)] = 1.0;
        m
    } else {
        raw.iter().map(|x| x / total).collect()
    };
    Histogram::from_masses(masses).unwrap()
}

/// Transport cost under ground distance `|i - j| / (bins - 1)`, found by the
/// northwest-corner rule, which is optimal for a monotone 1-D ground metric.
pub fn transport_emd(a: &[f64], b: &[f64]) -> f64 {
    let bins = a.len();
    let (mut supply, mut demand) = (a.to_vec(), b.to_vec());
    let (mut i, mut j, mut cost) = (0, 0, 0.0);
    while i < bins && j < bins {
        let flow = supply[i].min(demand[j]);
        cost += flow * i.abs_diff(j) as f64;
        supply[i] -= flow;
        demand[j] -= flow;
        if supply[i] <= demand[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    cost / (bins - 1) as f64
}

/// `ln Γ(n / 2)` for a positive integer `n`, from the factorial recurrences.
fn ln_gamma_half(n: u32) -> f64 {
    let (mut acc, mut x) = if n.is_multiple_of(2) {
        (0.0, 1.0)
    } else {
        (0.5 * std::f64::consts::PI.ln(), 0.5)
    };
    while x < n as f64 / 2.0 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// Adaptive Simpson quadrature.
pub fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    /// `[a, b]` with `f` at both ends and the midpoint.
    fn rec(
        f: &impl Fn(f64) -> f64,
        [a, b]: [f64; 2],
        [fa, fm, fb]: [f64; 3],
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, [a, m], [fa, flm, fm], left, tol / 2.0, depth - 1)
            + rec(f, [m, b], [fm, frm, fb], right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(
        f,
        [a, b],
        [fa, fm, fb],
        (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        tol,
        50,
    )
}

/// F(d1, d2) CDF by integrating the beta density of `d1 x / (d1 x + d2)`.
/// Substituting `t = u^(1/a)` removes the singularity at 0.
pub fn f_cdf_oracle(x: f64, d1: u32, d2: u32) -> f64 {
    let (a, b) = (d1 as f64 / 2.0, d2 as f64 / 2.0);
    let z = d1 as f64 * x / (d1 as f64 * x + d2 as f64);
    let ln_beta = ln_gamma_half(d1) + ln_gamma_half(d2) - ln_gamma_half(d1 + d2);
    let integrand = |u: f64| (1.0 - u.powf(1.0 / a)).powf(b - 1.0);
    simpson(&integrand, 0.0, z.powf(a), 1e-14) / a / ln_beta.exp()
}

/// Two blocks of sizes `n1` and `n - n1`: intra-block distances in
/// `(0, 0.2]`, inter-block in `[0.8, 1]`.
pub fn planted_matrix(rng: &mut ChaCha8Rng, n: usize, n1: usize) -> (DistanceMatrix, Vec<usize>) {
    let truth: Vec<usize> = (0..n).map(|i| usize::from(i >= n1)).collect();
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            upper.push(if truth[i] == truth[j] {
                rng.gen_range(0.01..=0.2)
            } else {
                rng.gen_range(0.8..=1.0)
            });
        }
    }
    (DistanceMatrix::from_upper(n, upper).unwrap(), truth)
}

/// Uniform random symmetric matrix with entries in `[0, 1)`.
pub fn uniform_matrix(rng: &mut ChaCha8Rng, n: usize) -> DistanceMatrix {
    DistanceMatrix::from_upper(n, (0..n * (n - 1) / 2).map(|_| rng.gen()).collect()).unwrap()
}
