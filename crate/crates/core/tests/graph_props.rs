use std::collections::BTreeSet;

use nettopo::graph::{largest_component, sssp_bfs};
use nettopo::{generate_synthetic, parse_edge_list, Graph, SyntheticModel};
use proptest::prelude::*;

fn edge_text(pairs: &[(u8, u8)]) -> String {
    pairs
        .iter()
        .map(|(u, v)| format!("n{} n{}\n", u % 12, v % 12))
        .collect()
}

/// Same, with self-loops redirected so every mentioned node keeps an edge.
fn loop_free_text(pairs: &[(u8, u8)]) -> String {
    pairs
        .iter()
        .map(|(u, v)| {
            let (u, v) = (u % 12, v % 12);
            format!("n{} n{}\n", u, if u == v { (v + 1) % 12 } else { v })
        })
        .collect()
}

fn parse(text: &str) -> Option<Graph> {
    parse_edge_list(text.as_bytes()).ok().map(|p| p.graph)
}

/// Edges as unordered label pairs.
fn label_edges(g: &Graph) -> BTreeSet<(String, String)> {
    g.edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (g.label(u).to_string(), g.label(v).to_string());
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect()
}

proptest! {
    // Reparsing may renumber nodes, which reorders lines; the labelled
    // graph and the set of lines are preserved.
    #[test]
    fn serialization_round_trip(pairs in prop::collection::vec((any::<u8>(), any::<u8>()), 1..40)) {
        let Some(g) = parse(&loop_free_text(&pairs)) else { return Ok(()) };
        let s1 = g.to_edge_list_string();
        let g1 = parse(&s1).unwrap();
        prop_assert_eq!(label_edges(&g), label_edges(&g1));
        let mut labels: Vec<&String> = g.labels().iter().collect();
        let mut labels1: Vec<&String> = g1.labels().iter().collect();
        labels.sort();
        labels1.sort();
        prop_assert_eq!(labels, labels1);

        let s2 = g1.to_edge_list_string();
        prop_assert!(s2.ends_with('\n'));
        let lines = |s: &str| s.lines().map(|l| {
            let mut t: Vec<&str> = l.split(' ').collect();
            t.sort_unstable();
            t.join(" ")
        }).collect::<BTreeSet<String>>();
        prop_assert_eq!(lines(&s1), lines(&s2));
        prop_assert_eq!(label_edges(&parse(&s2).unwrap()), label_edges(&g));
    }

    #[test]
    fn serialization_is_a_fixed_point_once_ids_follow_the_text(pairs in prop::collection::vec((any::<u8>(), any::<u8>()), 1..40)) {
        let Some(g) = parse(&loop_free_text(&pairs)) else { return Ok(()) };
        let mut text = g.to_edge_list_string();
        for _ in 0..64 {
            let next = parse(&text).unwrap().to_edge_list_string();
            if next == text {
                return Ok(());
            }
            text = next;
        }
        prop_assert!(false, "no fixed point within 64 rounds");
    }

    #[test]
    fn degree_sum_and_symmetry(pairs in prop::collection::vec((any::<u8>(), any::<u8>()), 1..60)) {
        let Some(g) = parse(&edge_text(&pairs)) else { return Ok(()) };
        let n = g.node_count();
        prop_assert_eq!((0..n).map(|u| g.degree(u)).sum::<usize>(), 2 * g.edge_count());
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
            }
        }
    }

    #[test]
    fn bfs_triangle_inequality(pairs in prop::collection::vec((any::<u8>(), any::<u8>()), 3..60)) {
        let Some(g) = parse(&edge_text(&pairs)) else { return Ok(()) };
        let Ok(g) = largest_component(&g) else { return Ok(()) };
        let d: Vec<Vec<u32>> = (0..g.node_count()).map(|s| sssp_bfs(&g, s).unwrap()).collect();
        let n = g.node_count();
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(d[u][v], d[v][u]);
                for w in 0..n {
                    prop_assert!(d[u][w] <= d[u][v] + d[v][w]);
                }
            }
        }
    }
}

#[test]
fn er_edge_count_within_four_sigma() {
    let (n, p) = (200usize, 0.05);
    let pairs = (n * (n - 1) / 2) as f64;
    let (mean, sd) = (p * pairs, (pairs * p * (1.0 - p)).sqrt());
    for seed in 0..50 {
        let g = generate_synthetic(SyntheticModel::ErdosRenyi { n, p }, seed).unwrap();
        assert!(
            (g.edge_count() as f64 - mean).abs() < 4.0 * sd,
            "seed {seed}"
        );
    }
}
