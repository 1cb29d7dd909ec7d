//! Report tables built from the stage outputs.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::format::{Cell, Table};
use super::stages::{ClusterStage, DistanceStage, MeasureStage};
use crate::clustering::Method;
use crate::error::Result;
use crate::generate::{generate_synthetic, SyntheticModel};
use crate::graph::largest_component;
use crate::measures::{global_transitivity, local_profile, GLOBAL_MEASURES, LOCAL_MEASURES};
use crate::stats::{
    anova_oneway, ari, distance_correlation, pearson, powerlaw_ks, tukey_posthoc, SIGNIFICANCE,
};

/// Marker row written when ANOVA has fewer than two usable groups.
pub const INSUFFICIENT_GROUPS: &str = "insufficient groups";

/// A report table and the file stem it is written under.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub name: String,
    pub table: Table,
}

impl Report {
    fn new(name: impl Into<String>, table: Table) -> Self {
        Report {
            name: name.into(),
            table,
        }
    }
}

/// Indices of the networks of each domain, domains in sorted order.
fn by_domain(measures: &MeasureStage) -> BTreeMap<String, Vec<usize>> {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in measures.records.iter().enumerate() {
        groups.entry(r.domain.clone()).or_default().push(i);
    }
    groups
}

fn column(measures: &MeasureStage, j: usize) -> Vec<f64> {
    measures.summaries.iter().map(|s| s.to_array()[j]).collect()
}

fn corr_cell(r: Result<f64>) -> Cell {
    r.map_or(Cell::Float(f64::NAN), Cell::Float)
}

/// Min, max, mean and sample standard deviation of each global measure per
/// domain.
pub fn domain_summary(measures: &MeasureStage) -> Report {
    let mut t = Table::new(["domain", "measure", "count", "min", "max", "mean", "sd"]);
    for (domain, members) in by_domain(measures) {
        for (j, name) in GLOBAL_MEASURES.iter().enumerate() {
            let values: Vec<f64> = members
                .iter()
                .map(|&i| measures.summaries[i].to_array()[j])
                .collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let sd = if values.len() > 1 {
                (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            t.push(vec![
                domain.clone().into(),
                (*name).into(),
                values.len().into(),
                min.into(),
                max.into(),
                mean.into(),
                sd.into(),
            ]);
        }
    }
    Report::new("domain_summary", t)
}

/// Pearson correlation between every pair of global measures across
/// networks.
pub fn global_correlation(measures: &MeasureStage) -> Report {
    let columns: Vec<Vec<f64>> = (0..GLOBAL_MEASURES.len())
        .map(|j| column(measures, j))
        .collect();
    let mut t = Table::new(std::iter::once("measure").chain(GLOBAL_MEASURES));
    for (a, name) in GLOBAL_MEASURES.iter().enumerate() {
        let mut row = vec![Cell::from(*name)];
        row.extend(columns.iter().map(|c| corr_cell(pearson(&columns[a], c))));
        t.push(row);
    }
    Report::new("global_correlation", t)
}

/// Correlations between the partial distance vectors of the local measures,
/// and between those of the global and the local measures.
pub fn distance_correlations(distances: &DistanceStage) -> [Report; 2] {
    let partials = &distances.set.partials;
    let global = &partials[..GLOBAL_MEASURES.len()];
    let local = &partials[GLOBAL_MEASURES.len()..];
    let table = |rows: &[Vec<f64>], names: &[&str]| {
        let mut t = Table::new(std::iter::once("measure").chain(LOCAL_MEASURES));
        for (name, r) in names.iter().zip(rows) {
            let mut row = vec![Cell::from(*name)];
            row.extend(local.iter().map(|c| corr_cell(distance_correlation(r, c))));
            t.push(row);
        }
        t
    };
    [
        Report::new("local_correlation", table(local, &LOCAL_MEASURES)),
        Report::new("global_local_correlation", table(global, &GLOBAL_MEASURES)),
    ]
}

/// One-way ANOVA of each global measure across domains, and the Tukey
/// post-hoc comparison of every domain pair. Domains with fewer than two
/// networks are left out.
pub fn anova_reports(measures: &MeasureStage) -> [Report; 2] {
    let groups: Vec<(String, Vec<usize>)> = by_domain(measures)
        .into_iter()
        .filter(|(_, m)| m.len() >= 2)
        .collect();
    let mut anova = Table::new([
        "measure",
        "f",
        "df_between",
        "df_within",
        "p",
        "significant",
    ]);
    let mut posthoc = Table::new([
        "measure",
        "domain_a",
        "domain_b",
        "mean_diff",
        "q",
        "p",
        "significant",
    ]);
    if groups.len() < 2 {
        let marker = |width: usize| {
            let mut row = vec![Cell::from(INSUFFICIENT_GROUPS)];
            row.resize(width, Cell::Empty);
            row
        };
        anova.push(marker(6));
        posthoc.push(marker(7));
        return [Report::new("anova", anova), Report::new("posthoc", posthoc)];
    }
    let rows: Vec<_> = GLOBAL_MEASURES
        .par_iter()
        .enumerate()
        .map(|(j, _)| {
            let values: Vec<Vec<f64>> = groups
                .iter()
                .map(|(_, members)| {
                    members
                        .iter()
                        .map(|&i| measures.summaries[i].to_array()[j])
                        .collect()
                })
                .collect();
            (anova_oneway(&values), tukey_posthoc(&values))
        })
        .collect();
    for (name, (a, pairs)) in GLOBAL_MEASURES.iter().zip(rows) {
        match a {
            Ok(a) => anova.push(vec![
                (*name).into(),
                a.f.into(),
                a.df_between.into(),
                a.df_within.into(),
                a.p.into(),
                (a.p < SIGNIFICANCE).into(),
            ]),
            Err(_) => anova.push(vec![
                (*name).into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ]),
        }
        for c in pairs.into_iter().flatten() {
            posthoc.push(vec![
                (*name).into(),
                groups[c.i].0.clone().into(),
                groups[c.j].0.clone().into(),
                c.mean_diff.into(),
                c.q.into(),
                c.p.into(),
                c.significant.into(),
            ]);
        }
    }
    [Report::new("anova", anova), Report::new("posthoc", posthoc)]
}

/// Power-law fit of each network's degree sequence.
pub fn powerlaw_report(measures: &MeasureStage, kmin: usize) -> Report {
    let mut t = Table::new(["network", "kmin", "n", "alpha", "ks", "error"]);
    for (r, degrees) in measures.records.iter().zip(&measures.degrees) {
        match powerlaw_ks(degrees, kmin) {
            Ok(fit) => t.push(vec![
                r.name.clone().into(),
                kmin.into(),
                fit.n.into(),
                fit.alpha.into(),
                fit.ks.into(),
                Cell::Empty,
            ]),
            Err(e) => t.push(vec![
                r.name.clone().into(),
                kmin.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                e.to_string().into(),
            ]),
        }
    }
    Report::new("powerlaw", t)
}

/// Transitivity and mean distance of a sampled ER graph.
fn er_sample(n: usize, p: f64, seed: u64) -> Option<(f64, f64)> {
    let g = generate_synthetic(SyntheticModel::ErdosRenyi { n, p }, seed).ok()?;
    let lcc = largest_component(&g).ok()?;
    let transitivity = global_transitivity(&lcc).ok()?;
    let distance = local_profile(&lcc).ok()?.mean_distance();
    Some((transitivity, distance))
}

/// Each network's transitivity and mean distance beside the values expected
/// of an Erdős–Rényi graph with the same size and density: `p` and
/// `ln n / ln(np)` in closed form, plus one seeded sample.
pub fn er_baseline(measures: &MeasureStage, seed: u64) -> Report {
    let mut t = Table::new([
        "network",
        "nodes",
        "density",
        "transitivity",
        "er_transitivity_expected",
        "er_transitivity_sample",
        "avg_distance",
        "er_distance_expected",
        "er_distance_sample",
    ]);
    let samples: Vec<Option<(f64, f64)>> = measures
        .records
        .par_iter()
        .zip(&measures.summaries)
        .enumerate()
        .map(|(i, (r, s))| er_sample(r.lcc_nodes, s.density, seed.wrapping_add(i as u64)))
        .collect();
    for ((r, s), sample) in measures
        .records
        .iter()
        .zip(&measures.summaries)
        .zip(samples)
    {
        let n = r.lcc_nodes as f64;
        let mean_degree = n * s.density;
        let expected_distance = if mean_degree > 1.0 {
            n.ln() / mean_degree.ln()
        } else {
            f64::NAN
        };
        t.push(vec![
            r.name.clone().into(),
            r.lcc_nodes.into(),
            s.density.into(),
            s.transitivity.into(),
            s.density.into(),
            sample.map(|x| x.0).into(),
            s.avg_distance.into(),
            expected_distance.into(),
            sample.map(|x| x.1).into(),
        ]);
    }
    Report::new("er_baseline", t)
}

/// Statistical analyses: domain summary, correlations, ANOVA with post-hoc
/// tests, power-law fits and ER baselines.
pub fn statistics_reports(
    measures: &MeasureStage,
    distances: &DistanceStage,
    kmin: usize,
    seed: u64,
) -> Vec<Report> {
    let mut out = vec![domain_summary(measures), global_correlation(measures)];
    out.extend(distance_correlations(distances));
    out.extend(anova_reports(measures));
    out.push(powerlaw_report(measures, kmin));
    out.push(er_baseline(measures, seed));
    out
}

/// Clustering outcome: the chosen parameterization per method, the ARI
/// between methods, and per method the domain by cluster cross-tabulation.
pub fn clustering_reports(measures: &MeasureStage, clusters: &ClusterStage) -> Vec<Report> {
    let mut summary = Table::new([
        "method",
        "k",
        "eps",
        "min_pts",
        "clusters",
        "noise",
        "silhouette",
        "status",
    ]);
    for (method, chosen) in &clusters.chosen {
        match chosen {
            Some(c) => summary.push(vec![
                method.to_string().into(),
                c.k.into(),
                c.eps.into(),
                c.min_pts.into(),
                c.partition.k().into(),
                c.partition.noise_count().into(),
                c.silhouette.into(),
                "selected".into(),
            ]),
            None => {
                let mut row = vec![Cell::from(method.to_string())];
                row.resize(7, Cell::Empty);
                row.push("no valid candidate".into());
                summary.push(row);
            }
        }
    }
    let mut out = vec![Report::new("clusters", summary)];

    let present: Vec<Method> = Method::ALL
        .into_iter()
        .filter(|&m| clusters.get(m).is_some())
        .collect();
    let mut agreement = Table::new(
        std::iter::once("method".to_string()).chain(present.iter().map(Method::to_string)),
    );
    for &a in &present {
        let mut row = vec![Cell::from(a.to_string())];
        for &b in &present {
            let (pa, pb) = (
                &clusters.get(a).expect("present").partition,
                &clusters.get(b).expect("present").partition,
            );
            row.push(corr_cell(ari(pa, pb)));
        }
        agreement.push(row);
    }
    out.push(Report::new("method_ari", agreement));

    let domains = by_domain(measures);
    for &m in &present {
        let p = &clusters.get(m).expect("present").partition;
        let noisy = p.noise_count() > 0;
        let mut columns: Vec<String> = std::iter::once("domain".to_string())
            .chain((0..p.k()).map(|c| format!("cluster_{c}")))
            .collect();
        if noisy {
            columns.push("noise".into());
        }
        let mut t = Table::new(columns);
        for (domain, members) in &domains {
            let mut counts = vec![0usize; p.k() + usize::from(noisy)];
            for &i in members {
                counts[p.label(i).unwrap_or(p.k())] += 1;
            }
            t.push(
                std::iter::once(Cell::from(domain.clone()))
                    .chain(counts.into_iter().map(Cell::from))
                    .collect(),
            );
        }
        out.push(Report::new(format!("crosstab_{m}"), t));
    }
    out
}
