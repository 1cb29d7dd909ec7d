mod common;

use common::planted_matrix;
use nettopo::clustering::{
    agnes, dbscan, diana, model_select, pam, pam_with_trace, SelectionConfig,
};
use nettopo::stats::ari;
use nettopo::{cut_dendrogram, DistanceMatrix, Linkage, Method, Partition};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Euclidean distances between planar points, hence a metric.
fn points_matrix() -> impl Strategy<Value = DistanceMatrix> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 4..25).prop_map(|pts| {
        DistanceMatrix::from_fn(pts.len(), |i, j| {
            (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1)
        })
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn agnes_heights_are_monotone(d in points_matrix()) {
        for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
            let dend = agnes(&d, linkage).unwrap();
            let h: Vec<f64> = dend.merges().iter().map(|m| m.height).collect();
            prop_assert!(h.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{:?}: {:?}", linkage, h);
        }
    }

    #[test]
    fn cuts_and_pam_have_exactly_k_clusters(d in points_matrix(), k_seed in any::<usize>()) {
        let k = 2 + k_seed % (d.len() - 2);
        let sizes_ok = |p: &Partition| p.k() == k && p.sizes().iter().all(|&s| s > 0) && p.noise_count() == 0;
        prop_assert!(sizes_ok(&pam(&d, k).unwrap()));
        prop_assert!(sizes_ok(&cut_dendrogram(&agnes(&d, Linkage::Average).unwrap(), k).unwrap()));
        prop_assert!(sizes_ok(&cut_dendrogram(&diana(&d).unwrap(), k).unwrap()));
    }

    #[test]
    fn pam_swap_never_increases_cost(d in points_matrix(), k_seed in any::<usize>()) {
        let k = 2 + k_seed % (d.len() - 2);
        let r = pam_with_trace(&d, k).unwrap();
        prop_assert!(r.cost_trace.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(r.cost <= r.cost_trace[0]);
    }
}

#[test]
fn planted_blocks_are_recovered_by_every_method() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let (d, truth) = planted_matrix(&mut rng, 40, 20);
        let truth = Partition::from_labels(&truth);
        let exact = |p: Partition| ari(&p, &truth).unwrap() == 1.0;
        assert!(exact(pam(&d, 2).unwrap()));
        assert!(exact(
            cut_dendrogram(&agnes(&d, Linkage::Average).unwrap(), 2).unwrap()
        ));
        assert!(exact(cut_dendrogram(&diana(&d).unwrap(), 2).unwrap()));
        assert!(exact(dbscan(&d, 0.5, 2).unwrap()));
    }
}

#[test]
fn selection_is_independent_of_thread_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let (d, _) = planted_matrix(&mut rng, 30, 12);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| model_select(&d, &Method::ALL, &SelectionConfig::default()).unwrap())
    };
    let summary = |sel: Vec<nettopo::clustering::MethodSelection>| {
        sel.into_iter()
            .map(|s| {
                (
                    s.method,
                    s.best.map(|b| (b.partition, b.silhouette.to_bits())),
                )
            })
            .collect::<Vec<_>>()
    };
    let one = summary(run(1));
    assert_eq!(one, summary(run(4)));
    assert_eq!(one, summary(run(6)));
}
