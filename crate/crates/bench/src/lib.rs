//! Fixed-seed inputs shared by the benchmarks.

use nettopo::generate::rng_for;
use nettopo::graph::largest_component;
use nettopo::{generate_synthetic, DistanceMatrix, Graph, SyntheticModel};
use rand::Rng;

/// Preferential-attachment graph of `n` nodes.
pub fn scale_free(n: usize) -> Graph {
    generate_synthetic(SyntheticModel::BarabasiAlbert { n, m0: 3 }, 11).expect("valid model")
}

/// Largest component of a random graph of `n` nodes with mean degree 8.
pub fn random_graph(n: usize) -> Graph {
    let p = 8.0 / (n - 1) as f64;
    let g = generate_synthetic(SyntheticModel::ErdosRenyi { n, p }, 13).expect("valid model");
    largest_component(&g).expect("non-empty graph")
}

/// Euclidean distances between `n` points drawn around `groups` centres on
/// the unit square.
pub fn clustered_matrix(n: usize, groups: usize) -> DistanceMatrix {
    let mut rng = rng_for(17);
    let centres: Vec<(f64, f64)> = (0..groups).map(|_| (rng.gen(), rng.gen())).collect();
    let points: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (cx, cy) = centres[i % groups];
            (
                cx + rng.gen_range(-0.05..0.05),
                cy + rng.gen_range(-0.05..0.05),
            )
        })
        .collect();
    DistanceMatrix::from_fn(n, |i, j| {
        let (a, b) = (points[i], points[j]);
        ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
    })
    .expect("finite distances")
}
