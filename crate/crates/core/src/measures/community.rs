use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::graph::Graph;

/// Disjoint community assignment covering every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityPartition {
    /// Community id per node, dense in `0..count`.
    pub assignment: Vec<usize>,
    pub count: usize,
}

impl CommunityPartition {
    /// Relabels arbitrary ids densely, in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap = BTreeMap::new();
        let assignment = labels
            .iter()
            .map(|&l| {
                let next = remap.len();
                *remap.entry(l).or_insert(next)
            })
            .collect();
        CommunityPartition {
            assignment,
            count: remap.len(),
        }
    }

    pub fn single(n: usize) -> Self {
        CommunityPartition {
            assignment: vec![0; n],
            count: 1,
        }
    }

    pub fn singletons(n: usize) -> Self {
        CommunityPartition {
            assignment: (0..n).collect(),
            count: n,
        }
    }
}

/// Modularity of `partition`, summed per community as
/// `L_c / m - (K_c / 2m)^2` with `L_c` internal links and `K_c` total degree.
pub fn modularity(g: &Graph, partition: &CommunityPartition) -> f64 {
    assert_eq!(
        partition.assignment.len(),
        g.node_count(),
        "partition size mismatch"
    );
    let m = g.edge_count() as f64;
    let mut internal = vec![0u64; partition.count];
    let mut degree = vec![0u64; partition.count];
    for u in 0..g.node_count() {
        degree[partition.assignment[u]] += g.degree(u) as u64;
    }
    for &(u, v) in g.edges() {
        let cu = partition.assignment[u];
        if cu == partition.assignment[v] {
            internal[cu] += 1;
        }
    }
    internal
        .iter()
        .zip(&degree)
        .map(|(&l, &k)| {
            let share = k as f64 / (2.0 * m);
            l as f64 / m - share * share
        })
        .sum()
}

/// Modularity maximization: greedy agglomeration followed by refinement.
///
/// The greedy phase starts from singletons and repeatedly merges the pair of
/// linked communities with the largest modularity gain while that gain is
/// positive. Gains are compared exactly as integers (`2m * l_ab - K_a * K_b`),
/// ties go to the lexicographically smallest community pair, and a merged
/// community keeps the smaller id. The refinement phase then applies local
/// moves, merges and vertex-mover passes until none raises modularity.
pub fn maximize_modularity(g: &Graph) -> (CommunityPartition, f64) {
    let n = g.node_count();
    let mut best: Option<(f64, CommunityPartition)> = None;
    for mut labels in [greedy_merge(g), vec![0; n], (0..n).collect()] {
        refine(g, &mut labels);
        let partition = CommunityPartition::from_labels(&labels);
        let q = modularity(g, &partition);
        if best.as_ref().is_none_or(|(bq, _)| q > *bq) {
            best = Some((q, partition));
        }
    }
    let (q, partition) = best.expect("at least one start");
    (partition, q)
}

fn greedy_merge(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let two_m = 2 * g.edge_count() as i128;

    let mut links: Vec<BTreeMap<usize, i128>> = vec![BTreeMap::new(); n];
    for &(u, v) in g.edges() {
        links[u].insert(v, 1);
        links[v].insert(u, 1);
    }
    let mut weight: Vec<i128> = (0..n).map(|u| g.degree(u) as i128).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|u| vec![u]).collect();
    let mut alive = vec![true; n];

    let gain = |l: i128, ka: i128, kb: i128| two_m * l - ka * kb;
    let mut heap: BinaryHeap<(i128, Reverse<usize>, Reverse<usize>)> = g
        .edges()
        .iter()
        .map(|&(u, v)| (gain(1, weight[u], weight[v]), Reverse(u), Reverse(v)))
        .collect();

    while let Some((key, Reverse(a), Reverse(b))) = heap.pop() {
        if !alive[a] || !alive[b] {
            continue;
        }
        let Some(&l) = links[a].get(&b) else { continue };
        if gain(l, weight[a], weight[b]) != key {
            continue;
        }
        if key <= 0 {
            break;
        }

        // Merge b into a (a < b).
        let absorbed = std::mem::take(&mut links[b]);
        for (c, l_bc) in absorbed {
            if c == a {
                continue;
            }
            *links[a].entry(c).or_insert(0) += l_bc;
            links[c].remove(&b);
            *links[c].entry(a).or_insert(0) += l_bc;
        }
        links[a].remove(&b);
        weight[a] += weight[b];
        alive[b] = false;
        let moved = std::mem::take(&mut members[b]);
        members[a].extend(moved);

        for (&c, &l_ac) in &links[a] {
            let (lo, hi) = (a.min(c), a.max(c));
            heap.push((gain(l_ac, weight[a], weight[c]), Reverse(lo), Reverse(hi)));
        }
    }

    let mut labels = vec![0; n];
    for (id, group) in members.iter().enumerate() {
        for &u in group {
            labels[u] = id;
        }
    }
    labels
}

/// Above this node count the quadratic vertex-mover pass is skipped.
const FINE_TUNE_LIMIT: usize = 1000;

/// Per-community totals in the exact scale `4m^2 * Q = sum(4m L_c - K_c^2)`.
struct Totals {
    degree: Vec<i128>,
}

impl Totals {
    fn new(g: &Graph, labels: &[usize]) -> Self {
        let mut degree = vec![0i128; g.node_count()];
        for (u, &c) in labels.iter().enumerate() {
            degree[c] += g.degree(u) as i128;
        }
        Totals { degree }
    }
}

/// Local improvement until no step raises modularity: single-node moves to a
/// neighbouring or empty community (nodes in index order, best target first,
/// lowest id on ties), alternating with merges of linked community pairs.
/// Every accepted step strictly increases the exact integer objective, so
/// the loop terminates.
fn refine(g: &Graph, labels: &mut [usize]) {
    let n = g.node_count();
    let four_m = 4 * g.edge_count() as i128;
    let mut totals = Totals::new(g, labels);
    loop {
        let mut changed = false;

        // Node moves.
        let mut moved = true;
        while moved {
            moved = false;
            for u in 0..n {
                let k = g.degree(u) as i128;
                let from = labels[u];
                let mut link: BTreeMap<usize, i128> = BTreeMap::new();
                for &v in g.neighbors(u) {
                    *link.entry(labels[v]).or_insert(0) += 1;
                }
                let l_from = link.get(&from).copied().unwrap_or(0);
                let k_from = totals.degree[from];
                let delta =
                    |l_to: i128, k_to: i128| four_m * (l_to - l_from) + 2 * k * (k_from - k_to - k);

                let mut best: Option<(i128, usize)> = None;
                for (&c, &l) in link.iter().filter(|(&c, _)| c != from) {
                    let d = delta(l, totals.degree[c]);
                    if d > 0 && best.is_none_or(|(bd, _)| d > bd) {
                        best = Some((d, c));
                    }
                }
                // An empty community, unless u is already alone.
                if k_from > k {
                    if let Some(empty) = (0..n).find(|&c| totals.degree[c] == 0) {
                        let d = delta(0, 0);
                        if d > 0 && best.is_none_or(|(bd, bc)| d > bd || (d == bd && empty < bc)) {
                            best = Some((d, empty));
                        }
                    }
                }
                if let Some((_, to)) = best {
                    labels[u] = to;
                    totals.degree[from] -= k;
                    totals.degree[to] += k;
                    moved = true;
                    changed = true;
                }
            }
        }

        // Community merges, best pair first, lowest pair on ties.
        loop {
            let mut between: BTreeMap<(usize, usize), i128> = BTreeMap::new();
            for &(u, v) in g.edges() {
                let (a, b) = (labels[u], labels[v]);
                if a != b {
                    *between.entry((a.min(b), a.max(b))).or_insert(0) += 1;
                }
            }
            let best = between
                .iter()
                .map(|(&(a, b), &l)| (four_m * l - 2 * totals.degree[a] * totals.degree[b], a, b))
                .filter(|&(d, _, _)| d > 0)
                .fold(None::<(i128, usize, usize)>, |best, cur| match best {
                    Some(b) if cur.0 <= b.0 => Some(b),
                    _ => Some(cur),
                });
            let Some((_, a, b)) = best else { break };
            for l in labels.iter_mut().filter(|l| **l == b) {
                *l = a;
            }
            totals.degree[a] += totals.degree[b];
            totals.degree[b] = 0;
            changed = true;
        }

        if !changed && !fine_tune(g, labels, &mut totals) {
            break;
        }
    }
}

/// One vertex-mover pass: every node moves exactly once, each time taking
/// the best available move even when it lowers modularity (largest gain,
/// then lowest node, then lowest target). The pass then rolls back to its
/// best prefix. Returns whether modularity strictly increased.
fn fine_tune(g: &Graph, labels: &mut [usize], totals: &mut Totals) -> bool {
    let n = g.node_count();
    if n > FINE_TUNE_LIMIT {
        return false;
    }
    let four_m = 4 * g.edge_count() as i128;
    let mut moved = vec![false; n];
    let mut history: Vec<(usize, usize, usize)> = Vec::with_capacity(n);
    let (mut running, mut best_total, mut best_len) = (0i128, 0i128, 0usize);

    for _ in 0..n {
        let mut best: Option<(i128, usize, usize)> = None;
        let empty = (0..n).find(|&c| totals.degree[c] == 0);
        for u in (0..n).filter(|&u| !moved[u]) {
            let k = g.degree(u) as i128;
            let from = labels[u];
            let mut link: BTreeMap<usize, i128> = BTreeMap::new();
            for &v in g.neighbors(u) {
                *link.entry(labels[v]).or_insert(0) += 1;
            }
            let l_from = link.get(&from).copied().unwrap_or(0);
            let k_from = totals.degree[from];
            let delta =
                |l_to: i128, k_to: i128| four_m * (l_to - l_from) + 2 * k * (k_from - k_to - k);
            let mut targets: Vec<(usize, i128)> = link
                .iter()
                .filter(|(&c, _)| c != from)
                .map(|(&c, &l)| (c, delta(l, totals.degree[c])))
                .collect();
            if let Some(e) = empty.filter(|_| k_from > k) {
                targets.push((e, delta(0, 0)));
            }
            for (to, d) in targets {
                let better = match best {
                    None => true,
                    Some((bd, bu, bt)) => d > bd || (d == bd && (u, to) < (bu, bt)),
                };
                if better {
                    best = Some((d, u, to));
                }
            }
        }
        let Some((d, u, to)) = best else { break };
        let from = labels[u];
        let k = g.degree(u) as i128;
        labels[u] = to;
        totals.degree[from] -= k;
        totals.degree[to] += k;
        moved[u] = true;
        history.push((u, from, to));
        running += d;
        if running > best_total {
            best_total = running;
            best_len = history.len();
        }
    }

    for &(u, from, to) in history[best_len..].iter().rev() {
        let k = g.degree(u) as i128;
        labels[u] = from;
        totals.degree[to] -= k;
        totals.degree[from] += k;
    }
    best_total > 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn barbell() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn single_community_is_zero() {
        let g = barbell();
        assert_eq!(modularity(&g, &CommunityPartition::single(6)), 0.0);
    }

    #[test]
    fn barbell_triangles() {
        let g = barbell();
        let p = CommunityPartition::from_labels(&[0, 0, 0, 1, 1, 1]);
        assert!((modularity(&g, &p) - 0.357142857142857).abs() < 1e-12);
        let (found, q) = maximize_modularity(&g);
        assert_eq!(found, p);
        assert!((q - 0.357142857142857).abs() < 1e-12);
    }

    #[test]
    fn triangle_singletons() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let q = modularity(&tri, &CommunityPartition::singletons(3));
        assert!((q + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn complete_graph_stays_whole() {
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let (p, q) = maximize_modularity(&k4);
        assert_eq!(p.count, 1);
        assert_eq!(q, 0.0);
    }

    #[test]
    fn dense_relabeling() {
        let p = CommunityPartition::from_labels(&[7, 7, 3, 9, 3]);
        assert_eq!(p.assignment, vec![0, 0, 1, 2, 1]);
        assert_eq!(p.count, 3);
    }
}
