//! Simple undirected graphs: edge-list ingestion, canonical serialization,
//! connectivity and breadth-first distances.

use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Dense node identifier, `0..n`.
pub type NodeId = usize;

/// Marker for an unreached node in a distance array.
pub const UNREACHED: u32 = u32::MAX;

/// Immutable simple undirected graph with dense node ids.
///
/// Adjacency lists are sorted. Every adjacency slot also carries the id of
/// the corresponding edge, where edges are numbered in canonical order
/// (sorted by `(min id, max id)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    adjacency: Vec<Vec<NodeId>>,
    adjacency_edges: Vec<Vec<usize>>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Graph {
    /// Builds a graph over `n` nodes labelled `0..n`.
    ///
    /// Self-loops are dropped and duplicate edges collapsed.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    /// Builds a graph with explicit node labels; `labels.len()` is the node count.
    pub fn with_labels(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut canonical = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::MalformedGraph(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u != v {
                canonical.push((u.min(v), u.max(v)));
            }
        }
        canonical.sort_unstable();
        canonical.dedup();
        if n < 3 {
            return Err(Error::MalformedGraph(format!("{n} nodes, need at least 3")));
        }
        if canonical.is_empty() {
            return Err(Error::MalformedGraph("no edges".into()));
        }

        let mut adjacency = vec![Vec::new(); n];
        let mut adjacency_edges = vec![Vec::new(); n];
        // Canonical edge order makes both endpoint lists come out sorted.
        for (id, &(u, v)) in canonical.iter().enumerate() {
            adjacency[u].push(v);
            adjacency_edges[u].push(id);
        }
        for (id, &(u, v)) in canonical.iter().enumerate() {
            adjacency[v].push(u);
            adjacency_edges[v].push(id);
        }
        for (nbrs, ids) in adjacency.iter_mut().zip(adjacency_edges.iter_mut()) {
            let mut paired: Vec<(NodeId, usize)> =
                nbrs.iter().copied().zip(ids.iter().copied()).collect();
            paired.sort_unstable();
            *nbrs = paired.iter().map(|p| p.0).collect();
            *ids = paired.iter().map(|p| p.1).collect();
        }

        Ok(Graph {
            labels,
            adjacency,
            adjacency_edges,
            edges: canonical,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonically ordered edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adjacency[u]
    }

    /// Edge ids parallel to [`Graph::neighbors`].
    pub fn incident_edges(&self, u: NodeId) -> &[usize] {
        &self.adjacency_edges[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn label(&self, u: NodeId) -> &str {
        &self.labels[u]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Writes the canonical edge list: edges sorted by `(min id, max id)`,
    /// one per line, labels separated by a single space.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for &(u, v) in &self.edges {
            writeln!(out, "{} {}", self.labels[u], self.labels[v])?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("labels are UTF-8")
    }

    /// Induced subgraph on `nodes` (given in the order that defines new ids).
    fn induced(&self, nodes: &[NodeId]) -> Result<Graph> {
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            remap[old] = new;
        }
        let labels = nodes.iter().map(|&u| self.labels[u].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| remap[u] != usize::MAX && remap[v] != usize::MAX)
            .map(|&(u, v)| (remap[u], remap[v]));
        Graph::with_labels(labels, edges)
    }
}

/// Outcome of reading an edge list.
#[derive(Debug, Clone)]
pub struct ParsedEdgeList {
    pub graph: Graph,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

/// Reads a whitespace-separated edge list. Lines starting with `#` or `%`
/// and blank lines are skipped. Node ids are assigned in order of first
/// appearance.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<ParsedEdgeList> {
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut labels = Vec::new();
    let mut raw_edges = Vec::new();
    let mut self_loops = 0;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 2 tokens, found {}", tokens.len()),
            });
        }
        let mut intern = |tok: &str| {
            *ids.entry(tok.to_string()).or_insert_with(|| {
                labels.push(tok.to_string());
                labels.len() - 1
            })
        };
        let u = intern(tokens[0]);
        let v = intern(tokens[1]);
        if u == v {
            self_loops += 1;
        } else {
            raw_edges.push((u, v));
        }
    }

    let total = raw_edges.len();
    let graph = Graph::with_labels(labels, raw_edges)?;
    let duplicates_collapsed = total - graph.edge_count();
    Ok(ParsedEdgeList {
        graph,
        self_loops_dropped: self_loops,
        duplicates_collapsed,
    })
}

/// Connected component labelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentMap {
    /// Component id per node, dense in `0..count`.
    pub labels: Vec<usize>,
    /// Node count per component.
    pub sizes: Vec<usize>,
}

impl ComponentMap {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

/// BFS labelling; component ids follow the smallest member node id.
pub fn connected_components(g: &Graph) -> ComponentMap {
    let n = g.node_count();
    let mut labels = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        labels[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in g.neighbors(u) {
                if labels[v] == usize::MAX {
                    labels[v] = id;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
    }
    ComponentMap { labels, sizes }
}

/// Induced subgraph on the largest connected component, ids re-densified in
/// increasing order of the original ids. Ties go to the component holding
/// the smallest node id.
pub fn largest_component(g: &Graph) -> Result<Graph> {
    let comps = connected_components(g);
    // First maximum wins, and component ids are ordered by smallest member.
    let (best, &size) =
        comps
            .sizes
            .iter()
            .enumerate()
            .fold((0, &0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    if size < 3 {
        return Err(Error::MalformedGraph(format!(
            "largest component has {size} nodes, need at least 3"
        )));
    }
    if comps.count() == 1 {
        return Ok(g.clone());
    }
    let nodes: Vec<NodeId> = (0..g.node_count())
        .filter(|&u| comps.labels[u] == best)
        .collect();
    g.induced(&nodes)
}

/// Hop distances from `source`, written into `dist` (resized to `n`).
/// Unreached nodes keep [`UNREACHED`].
pub(crate) fn bfs_into(
    g: &Graph,
    source: NodeId,
    dist: &mut Vec<u32>,
    queue: &mut VecDeque<NodeId>,
) {
    dist.clear();
    dist.resize(g.node_count(), UNREACHED);
    dist[source] = 0;
    queue.clear();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &v in g.neighbors(u) {
            if dist[v] == UNREACHED {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
}

/// Single-source unweighted shortest path lengths.
pub fn sssp_bfs(g: &Graph, source: NodeId) -> Result<Vec<u32>> {
    if source >= g.node_count() {
        return Err(Error::Param(format!("source {source} out of range")));
    }
    let mut dist = Vec::new();
    bfs_into(g, source, &mut dist, &mut VecDeque::new());
    if let Some(u) = dist.iter().position(|&d| d == UNREACHED) {
        return Err(Error::Disconnected(u));
    }
    Ok(dist)
}
