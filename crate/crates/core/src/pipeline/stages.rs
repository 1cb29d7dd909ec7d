//! The pipeline stages. Each stage computes its results, persists them under
//! the output directory and can be reloaded from there, so later stages can
//! run from disk alone. Intermediates print floats in shortest round-trip
//! form so that reloading is lossless.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use super::config::RunConfig;
use super::manifest::{Manifest, ManifestEntry};
use crate::clustering::{
    agnes, diana, model_select, Dendrogram, Method, MethodSelection, Partition,
};
use crate::error::{Error, Result};
use crate::features::{
    assemble_features, distance_set, local_histograms, DistanceMatrix, DistanceSet, Histogram,
    NetworkFeatures, LOCAL_COUNT,
};
use crate::graph::{connected_components, largest_component, parse_edge_list};
use crate::measures::{characterize, GlobalSummary, GLOBAL_MEASURES, LOCAL_MEASURES};

pub const NETWORKS_FILE: &str = "networks.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const SUMMARIES_FILE: &str = "summaries.csv";
pub const HISTOGRAMS_FILE: &str = "histograms.csv";
pub const PROFILES_DIR: &str = "profiles";
pub const FEATURES_FILE: &str = "features.csv";
pub const DISTANCES_CSV: &str = "distances.csv";
pub const DISTANCES_BIN: &str = "distances.bin";
pub const PARTIALS_FILE: &str = "partials.csv";
pub const SELECTION_FILE: &str = "selection.csv";
pub const PARTITIONS_FILE: &str = "partitions.csv";

/// Shortest text that parses back to the same float.
fn lossless(x: f64) -> String {
    format!("{x:?}")
}

fn parse_field<T: FromStr>(file: &str, line: usize, field: &str) -> Result<T> {
    field.parse().map_err(|_| {
        Error::InvariantViolation(format!("{file}, line {line}: cannot parse {field:?}"))
    })
}

fn reader(dir: &Path, file: &str) -> Result<csv::Reader<File>> {
    let path = dir.join(file);
    csv::Reader::from_path(&path).map_err(|e| Error::File {
        path: path.display().to_string(),
        source: Box::new(e.into()),
    })
}

/// Profile audit directory of the `index`-th measured network.
pub fn profile_dir(out: &Path, index: usize, name: &str) -> PathBuf {
    let safe: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    out.join(PROFILES_DIR).join(format!("{index:04}_{safe}"))
}

/// Size and cleaning statistics of a measured network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRecord {
    pub name: String,
    pub domain: String,
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    /// Nodes and edges of the largest component, on which everything is
    /// measured.
    pub lcc_nodes: usize,
    pub lcc_edges: usize,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
    /// Communities found by modularity maximization.
    pub communities: usize,
}

impl NetworkRecord {
    /// Fraction of nodes in the largest component.
    pub fn coverage(&self) -> f64 {
        self.lcc_nodes as f64 / self.nodes as f64
    }
}

/// A network excluded from the downstream stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkFailure {
    pub name: String,
    pub domain: String,
    pub stage: String,
    pub message: String,
}

/// Output of the measure stage, in manifest order of the successful networks.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureStage {
    pub records: Vec<NetworkRecord>,
    pub failures: Vec<NetworkFailure>,
    pub summaries: Vec<GlobalSummary>,
    pub histograms: Vec<[Histogram; LOCAL_COUNT]>,
    /// Degree sequence of each largest component.
    pub degrees: Vec<Vec<usize>>,
}

impl MeasureStage {
    pub fn names(&self) -> Vec<String> {
        self.records.iter().map(|r| r.name.clone()).collect()
    }

    pub fn domains(&self) -> Vec<String> {
        self.records.iter().map(|r| r.domain.clone()).collect()
    }
}

struct Measured {
    record: NetworkRecord,
    summary: GlobalSummary,
    histograms: [Histogram; LOCAL_COUNT],
    series: [Vec<f64>; LOCAL_COUNT],
}

fn measure_one(entry: &ManifestEntry, bins: usize) -> Result<Measured, (&'static str, Error)> {
    let file = File::open(&entry.path).map_err(|e| ("read", e.into()))?;
    let parsed = parse_edge_list(BufReader::new(file)).map_err(|e| ("parse", e))?;
    let g = &parsed.graph;
    let components = connected_components(g).count();
    let lcc = largest_component(g).map_err(|e| ("parse", e))?;
    let (profile, communities, summary) = characterize(&lcc).map_err(|e| ("measures", e))?;
    let histograms = local_histograms(&profile, bins).map_err(|e| ("features", e))?;
    Ok(Measured {
        record: NetworkRecord {
            name: entry.name.clone(),
            domain: entry.domain.clone(),
            nodes: g.node_count(),
            edges: g.edge_count(),
            components,
            lcc_nodes: lcc.node_count(),
            lcc_edges: lcc.edge_count(),
            self_loops_dropped: parsed.self_loops_dropped,
            duplicates_collapsed: parsed.duplicates_collapsed,
            communities: communities.count,
        },
        summary,
        histograms,
        series: profile.series(),
    })
}

/// Measures every manifest entry in parallel. Failed networks are skipped
/// and listed, or abort the run under `fail_fast`.
pub fn run_measures(manifest: &Manifest, config: &RunConfig, out: &Path) -> Result<MeasureStage> {
    let results: Vec<_> = manifest
        .entries
        .par_iter()
        .map(|entry| measure_one(entry, config.bins))
        .collect();

    let mut stage = MeasureStage {
        records: Vec::new(),
        failures: Vec::new(),
        summaries: Vec::new(),
        histograms: Vec::new(),
        degrees: Vec::new(),
    };
    fs::create_dir_all(out.join(PROFILES_DIR))?;
    for (entry, result) in manifest.entries.iter().zip(results) {
        match result {
            Ok(m) => {
                write_profile(
                    &profile_dir(out, stage.records.len(), &m.record.name),
                    &m.series,
                )?;
                stage
                    .degrees
                    .push(m.series[0].iter().map(|&k| k as usize).collect());
                stage.records.push(m.record);
                stage.summaries.push(m.summary);
                stage.histograms.push(m.histograms);
            }
            Err((step, source)) => {
                if config.fail_fast {
                    return Err(Error::Network {
                        network: entry.name.clone(),
                        stage: step,
                        source: Box::new(source),
                    });
                }
                stage.failures.push(NetworkFailure {
                    name: entry.name.clone(),
                    domain: entry.domain.clone(),
                    stage: step.to_string(),
                    message: source.to_string(),
                });
            }
        }
    }
    stage.write(out)?;
    Ok(stage)
}

fn write_profile(dir: &Path, series: &[Vec<f64>; LOCAL_COUNT]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, values) in LOCAL_MEASURES.iter().zip(series) {
        let mut w = BufWriter::new(File::create(dir.join(format!("{name}.txt")))?);
        for v in values {
            writeln!(w, "{}", lossless(*v))?;
        }
        w.flush()?;
    }
    Ok(())
}

impl MeasureStage {
    fn write(&self, out: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(out.join(NETWORKS_FILE))?;
        w.write_record([
            "network",
            "domain",
            "nodes",
            "edges",
            "components",
            "lcc_nodes",
            "lcc_edges",
            "coverage",
            "self_loops_dropped",
            "duplicates_collapsed",
            "communities",
        ])?;
        for r in &self.records {
            w.write_record([
                r.name.clone(),
                r.domain.clone(),
                r.nodes.to_string(),
                r.edges.to_string(),
                r.components.to_string(),
                r.lcc_nodes.to_string(),
                r.lcc_edges.to_string(),
                lossless(r.coverage()),
                r.self_loops_dropped.to_string(),
                r.duplicates_collapsed.to_string(),
                r.communities.to_string(),
            ])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(out.join(FAILURES_FILE))?;
        w.write_record(["network", "domain", "stage", "error"])?;
        for f in &self.failures {
            w.write_record([&f.name, &f.domain, &f.stage, &f.message])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(out.join(SUMMARIES_FILE))?;
        w.write_record(std::iter::once("network").chain(GLOBAL_MEASURES))?;
        for (r, s) in self.records.iter().zip(&self.summaries) {
            w.write_record(std::iter::once(r.name.clone()).chain(s.to_array().map(lossless)))?;
        }
        w.flush()?;

        let bins = self.histograms.first().map_or(0, |h| h[0].bins());
        let mut w = csv::Writer::from_path(out.join(HISTOGRAMS_FILE))?;
        w.write_record(
            ["network".to_string(), "measure".to_string()]
                .into_iter()
                .chain((0..bins).map(|b| format!("bin_{b}"))),
        )?;
        for (r, hs) in self.records.iter().zip(&self.histograms) {
            for (name, h) in LOCAL_MEASURES.iter().zip(hs) {
                w.write_record(
                    [r.name.clone(), name.to_string()]
                        .into_iter()
                        .chain(h.masses().iter().map(|&m| lossless(m))),
                )?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reloads a persisted measure stage.
    pub fn load(out: &Path) -> Result<Self> {
        let mut records = Vec::new();
        for (i, row) in reader(out, NETWORKS_FILE)?.records().enumerate() {
            let row = row?;
            let line = i + 2;
            let num = |k: usize| parse_field::<usize>(NETWORKS_FILE, line, &row[k]);
            records.push(NetworkRecord {
                name: row[0].to_string(),
                domain: row[1].to_string(),
                nodes: num(2)?,
                edges: num(3)?,
                components: num(4)?,
                lcc_nodes: num(5)?,
                lcc_edges: num(6)?,
                self_loops_dropped: num(8)?,
                duplicates_collapsed: num(9)?,
                communities: num(10)?,
            });
        }

        let mut failures = Vec::new();
        for row in reader(out, FAILURES_FILE)?.records() {
            let row = row?;
            failures.push(NetworkFailure {
                name: row[0].to_string(),
                domain: row[1].to_string(),
                stage: row[2].to_string(),
                message: row[3].to_string(),
            });
        }

        let mut summaries = Vec::new();
        for (i, row) in reader(out, SUMMARIES_FILE)?.records().enumerate() {
            let row = row?;
            let line = i + 2;
            expect_name(SUMMARIES_FILE, line, &row[0], records.get(i))?;
            let mut values = [0.0; 12];
            for (j, v) in values.iter_mut().enumerate() {
                *v = parse_field(SUMMARIES_FILE, line, &row[j + 1])?;
            }
            summaries.push(GlobalSummary::from_array(values));
        }

        let mut histograms = Vec::new();
        let mut current: Vec<Histogram> = Vec::new();
        for (i, row) in reader(out, HISTOGRAMS_FILE)?.records().enumerate() {
            let row = row?;
            let line = i + 2;
            expect_name(
                HISTOGRAMS_FILE,
                line,
                &row[0],
                records.get(histograms.len()),
            )?;
            let masses = row
                .iter()
                .skip(2)
                .map(|f| parse_field(HISTOGRAMS_FILE, line, f))
                .collect::<Result<Vec<f64>>>()?;
            current.push(Histogram::from_masses(masses)?);
            if current.len() == LOCAL_COUNT {
                histograms.push(
                    std::mem::take(&mut current)
                        .try_into()
                        .expect("seven histograms"),
                );
            }
        }

        let mut degrees = Vec::new();
        for (i, r) in records.iter().enumerate() {
            let path = profile_dir(out, i, &r.name).join("degree.txt");
            let text = fs::read_to_string(&path)?;
            let file = path.display().to_string();
            degrees.push(
                text.lines()
                    .enumerate()
                    .map(|(l, v)| parse_field::<f64>(&file, l + 1, v).map(|k| k as usize))
                    .collect::<Result<Vec<usize>>>()?,
            );
        }

        if summaries.len() != records.len()
            || histograms.len() != records.len()
            || !current.is_empty()
        {
            return Err(Error::InvariantViolation(
                "measure intermediates disagree on the network list".into(),
            ));
        }
        Ok(MeasureStage {
            records,
            failures,
            summaries,
            histograms,
            degrees,
        })
    }
}

fn expect_name(file: &str, line: usize, found: &str, record: Option<&NetworkRecord>) -> Result<()> {
    match record {
        Some(r) if r.name == found => Ok(()),
        _ => Err(Error::InvariantViolation(format!(
            "{file}, line {line}: network {found:?} does not match {NETWORKS_FILE}"
        ))),
    }
}

/// Distances between the measured networks.
#[derive(Debug)]
pub struct DistanceStage {
    pub names: Vec<String>,
    pub set: DistanceSet,
}

impl DistanceStage {
    pub fn matrix(&self) -> &DistanceMatrix {
        &self.set.overall
    }
}

/// Normalizes features over the collection and computes every pairwise
/// distance.
pub fn run_distances(measures: &MeasureStage, out: &Path) -> Result<DistanceStage> {
    let features = assemble_features(&measures.summaries, measures.histograms.clone())?;
    let set = distance_set(&features)?;
    let stage = DistanceStage {
        names: measures.names(),
        set,
    };
    write_features(out, &stage.names, &features)?;
    stage.write(out)?;
    Ok(stage)
}

fn write_features(out: &Path, names: &[String], features: &[NetworkFeatures]) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join(FEATURES_FILE))?;
    w.write_record(std::iter::once("network").chain(GLOBAL_MEASURES))?;
    for (name, f) in names.iter().zip(features) {
        w.write_record(std::iter::once(name.clone()).chain(f.global.map(lossless)))?;
    }
    w.flush()?;
    Ok(())
}

fn partial_columns() -> Vec<String> {
    GLOBAL_MEASURES
        .iter()
        .chain(&LOCAL_MEASURES)
        .map(|m| m.to_string())
        .collect()
}

impl DistanceStage {
    fn write(&self, out: &Path) -> Result<()> {
        let d = &self.set.overall;
        let n = d.len();
        let mut w = csv::Writer::from_path(out.join(DISTANCES_CSV))?;
        w.write_record(std::iter::once(String::new()).chain(self.names.iter().cloned()))?;
        for i in 0..n {
            w.write_record(
                std::iter::once(self.names[i].clone()).chain((0..n).map(|j| lossless(d.get(i, j)))),
            )?;
        }
        w.flush()?;

        let mut bin = BufWriter::new(File::create(out.join(DISTANCES_BIN))?);
        d.write_binary(&mut bin)?;
        bin.flush()?;

        let mut w = csv::Writer::from_path(out.join(PARTIALS_FILE))?;
        w.write_record(
            [
                "network_a".to_string(),
                "network_b".to_string(),
                "overall".to_string(),
            ]
            .into_iter()
            .chain(partial_columns()),
        )?;
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                let row = [
                    self.names[i].clone(),
                    self.names[j].clone(),
                    lossless(d.upper()[idx]),
                ]
                .into_iter()
                .chain(self.set.partials.iter().map(|p| lossless(p[idx])));
                w.write_record(row)?;
                idx += 1;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reloads the matrix from its binary form and the partials from CSV.
    pub fn load(out: &Path, names: Vec<String>) -> Result<Self> {
        let overall =
            DistanceMatrix::read_binary(BufReader::new(File::open(out.join(DISTANCES_BIN))?))?;
        if overall.len() != names.len() {
            return Err(Error::InvariantViolation(format!(
                "{DISTANCES_BIN} holds {} networks, {NETWORKS_FILE} {}",
                overall.len(),
                names.len()
            )));
        }
        let columns = partial_columns().len();
        let mut partials = vec![Vec::with_capacity(overall.upper().len()); columns];
        for (i, row) in reader(out, PARTIALS_FILE)?.records().enumerate() {
            let row = row?;
            for (k, p) in partials.iter_mut().enumerate() {
                p.push(parse_field(PARTIALS_FILE, i + 2, &row[k + 3])?);
            }
        }
        if partials[0].len() != overall.upper().len() {
            return Err(Error::InvariantViolation(format!(
                "{PARTIALS_FILE} does not match {DISTANCES_BIN}"
            )));
        }
        Ok(DistanceStage {
            names,
            set: DistanceSet { overall, partials },
        })
    }
}

/// The selected partition of one clustering method.
#[derive(Debug, Clone, PartialEq)]
pub struct ChosenPartition {
    pub method: Method,
    pub k: usize,
    pub eps: Option<f64>,
    pub min_pts: Option<usize>,
    pub silhouette: f64,
    pub partition: Partition,
}

/// Output of the clustering stage: per method its best partition, or
/// `None` when no candidate was valid.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStage {
    pub chosen: Vec<(Method, Option<ChosenPartition>)>,
}

impl ClusterStage {
    pub fn get(&self, method: Method) -> Option<&ChosenPartition> {
        self.chosen
            .iter()
            .find(|(m, _)| *m == method)
            .and_then(|(_, c)| c.as_ref())
    }
}

/// Runs model selection for every method and persists candidates, chosen
/// partitions and both dendrograms.
pub fn run_clustering(
    distances: &DistanceStage,
    config: &RunConfig,
    out: &Path,
) -> Result<ClusterStage> {
    let d = distances.matrix();
    let selections = model_select(d, &Method::ALL, &config.selection())?;
    write_selection(out, &selections)?;
    write_dendrogram(out, "agnes", &agnes(d, config.linkage)?)?;
    write_dendrogram(out, "diana", &diana(d)?)?;
    let stage = ClusterStage {
        chosen: selections
            .into_iter()
            .map(|s| {
                let chosen = s.best.map(|b| ChosenPartition {
                    method: s.method,
                    k: b.k,
                    eps: b.eps,
                    min_pts: b.min_pts,
                    silhouette: b.silhouette,
                    partition: b.partition,
                });
                (s.method, chosen)
            })
            .collect(),
    };
    write_partitions(out, &distances.names, &stage)?;
    Ok(stage)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

fn write_selection(out: &Path, selections: &[MethodSelection]) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join(SELECTION_FILE))?;
    w.write_record([
        "method",
        "k",
        "eps",
        "min_pts",
        "clusters",
        "noise",
        "silhouette",
        "best",
    ])?;
    for s in selections {
        for c in &s.candidates {
            let best = s.best.as_ref() == Some(c);
            w.write_record([
                s.method.to_string(),
                c.k.to_string(),
                opt(c.eps.map(lossless)),
                opt(c.min_pts),
                c.partition.k().to_string(),
                c.partition.noise_count().to_string(),
                lossless(c.silhouette),
                best.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_dendrogram(out: &Path, method: &str, dend: &Dendrogram) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join(format!("dendrogram_{method}.csv")))?;
    w.write_record(["id_a", "id_b", "height", "size"])?;
    for m in dend.merges() {
        w.write_record([
            m.a.to_string(),
            m.b.to_string(),
            lossless(m.height),
            m.size.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_partitions(out: &Path, names: &[String], stage: &ClusterStage) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join(PARTITIONS_FILE))?;
    w.write_record(["method", "network", "cluster", "noise"])?;
    for (method, chosen) in &stage.chosen {
        let Some(c) = chosen else { continue };
        for (name, label) in names.iter().zip(c.partition.labels()) {
            w.write_record([
                method.to_string(),
                name.clone(),
                opt(*label),
                label.is_none().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn parse_method(file: &str, line: usize, text: &str) -> Result<Method> {
    Method::ALL
        .into_iter()
        .find(|m| m.to_string() == text)
        .ok_or_else(|| {
            Error::InvariantViolation(format!("{file}, line {line}: unknown method {text:?}"))
        })
}

impl ClusterStage {
    /// Reloads the chosen partitions of a persisted clustering stage.
    pub fn load(out: &Path, names: &[String]) -> Result<Self> {
        let mut chosen: Vec<(Method, Option<ChosenPartition>)> =
            Method::ALL.iter().map(|&m| (m, None)).collect();
        for (i, row) in reader(out, SELECTION_FILE)?.records().enumerate() {
            let row = row?;
            let line = i + 2;
            if &row[7] != "true" {
                continue;
            }
            let method = parse_method(SELECTION_FILE, line, &row[0])?;
            let optional = |k: usize| -> Result<Option<String>> {
                Ok(Some(row[k].to_string()).filter(|s| !s.is_empty()))
            };
            let slot = &mut chosen[Method::ALL
                .iter()
                .position(|&m| m == method)
                .expect("known method")]
            .1;
            *slot = Some(ChosenPartition {
                method,
                k: parse_field(SELECTION_FILE, line, &row[1])?,
                eps: optional(2)?
                    .map(|s| parse_field(SELECTION_FILE, line, &s))
                    .transpose()?,
                min_pts: optional(3)?
                    .map(|s| parse_field(SELECTION_FILE, line, &s))
                    .transpose()?,
                silhouette: parse_field(SELECTION_FILE, line, &row[6])?,
                partition: Partition::with_noise(Vec::new()),
            });
        }

        let mut labels: Vec<(Method, Vec<Option<usize>>)> = Vec::new();
        for (i, row) in reader(out, PARTITIONS_FILE)?.records().enumerate() {
            let row = row?;
            let line = i + 2;
            let method = parse_method(PARTITIONS_FILE, line, &row[0])?;
            if labels.last().is_none_or(|(m, _)| *m != method) {
                labels.push((method, Vec::new()));
            }
            let current = &mut labels.last_mut().expect("just pushed").1;
            if names.get(current.len()).map(String::as_str) != Some(&row[1]) {
                return Err(Error::InvariantViolation(format!(
                    "{PARTITIONS_FILE}, line {line}: network {:?} out of order",
                    &row[1]
                )));
            }
            current.push(if row[2].is_empty() {
                None
            } else {
                Some(parse_field(PARTITIONS_FILE, line, &row[2])?)
            });
        }
        for (method, l) in labels {
            let Some(Some(c)) = chosen
                .iter_mut()
                .find(|(m, _)| *m == method)
                .map(|(_, c)| c.as_mut())
            else {
                return Err(Error::InvariantViolation(format!(
                    "{PARTITIONS_FILE}: {method} has no selected candidate"
                )));
            };
            c.partition = Partition::with_noise(l);
        }
        if chosen
            .iter()
            .flat_map(|(_, c)| c)
            .any(|c| c.partition.len() != names.len())
        {
            return Err(Error::InvariantViolation(format!(
                "{PARTITIONS_FILE} does not cover every network"
            )));
        }
        Ok(ClusterStage { chosen })
    }
}
