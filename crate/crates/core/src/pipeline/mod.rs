//! Batch orchestration: manifest, measures, features and distances,
//! clustering, statistics and report files.
//!
//! Output layout under the configured directory:
//!
//! * `networks.csv`, `failures.csv`, `summaries.csv`, `histograms.csv` and
//!   `profiles/` from the measure stage;
//! * `features.csv`, `distances.csv`, `distances.bin` and `partials.csv` from
//!   the distance stage;
//! * `selection.csv`, `partitions.csv` and `dendrogram_*.csv` from the
//!   clustering stage;
//! * `reports/` with the statistics and clustering tables.

mod config;
mod corpus;
mod format;
mod manifest;
mod reports;
mod stages;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{parse_eps_grid, parse_list, RunConfig};
pub use corpus::{generate_corpus, CorpusKind};
pub use format::{fmt_sig9, Cell, OutputFormat, Table};
pub use manifest::{load_manifest, Manifest, ManifestEntry};
pub use reports::{clustering_reports, statistics_reports, Report, INSUFFICIENT_GROUPS};
pub use stages::{
    profile_dir, run_clustering, run_distances, run_measures, ChosenPartition, ClusterStage,
    DistanceStage, MeasureStage, NetworkFailure, NetworkRecord,
};

use crate::error::Result;

/// Subdirectory holding the report tables.
pub const REPORTS_DIR: &str = "reports";

/// Everything a full run produces.
#[derive(Debug)]
pub struct RunArtifacts {
    pub measures: MeasureStage,
    pub distances: DistanceStage,
    pub clusters: ClusterStage,
    pub reports: Vec<Report>,
}

/// Runs every stage, persisting each stage's output, then writes the
/// reports.
pub fn run_pipeline(manifest: &Manifest, config: &RunConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let out = &config.out_dir;
    fs::create_dir_all(out)?;
    let measures = run_measures(manifest, config, out)?;
    let distances = run_distances(&measures, out)?;
    let clusters = run_clustering(&distances, config, out)?;
    let mut reports = statistics_reports(&measures, &distances, config.kmin, config.seed);
    reports.extend(clustering_reports(&measures, &clusters));
    let artifacts = RunArtifacts {
        measures,
        distances,
        clusters,
        reports,
    };
    emit_reports(&artifacts.reports, config)?;
    Ok(artifacts)
}

/// Writes report tables to `<out>/reports` in the configured format.
pub fn emit_reports(reports: &[Report], config: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = reports_dir(&config.out_dir);
    fs::create_dir_all(&dir)?;
    let mut written = Vec::with_capacity(reports.len());
    for r in reports {
        r.table.write(&dir, &r.name, config.format)?;
        written.push(dir.join(format!("{}.{}", r.name, config.format.extension())));
    }
    Ok(written)
}

pub fn reports_dir(out: &Path) -> PathBuf {
    out.join(REPORTS_DIR)
}

/// Measure stage on its own: writes the measure intermediates.
pub fn measures_stage(manifest: &Manifest, config: &RunConfig) -> Result<MeasureStage> {
    config.validate()?;
    fs::create_dir_all(&config.out_dir)?;
    run_measures(manifest, config, &config.out_dir)
}

/// Distance stage from persisted measures.
pub fn distances_stage(config: &RunConfig) -> Result<DistanceStage> {
    let measures = MeasureStage::load(&config.out_dir)?;
    run_distances(&measures, &config.out_dir)
}

/// Clustering stage from persisted distances.
pub fn cluster_stage(config: &RunConfig) -> Result<ClusterStage> {
    config.validate()?;
    let measures = MeasureStage::load(&config.out_dir)?;
    let distances = DistanceStage::load(&config.out_dir, measures.names())?;
    run_clustering(&distances, config, &config.out_dir)
}

/// Statistics reports from persisted measures and distances.
pub fn stats_stage(config: &RunConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let measures = MeasureStage::load(&config.out_dir)?;
    let distances = DistanceStage::load(&config.out_dir, measures.names())?;
    emit_reports(
        &statistics_reports(&measures, &distances, config.kmin, config.seed),
        config,
    )
}

/// Clustering reports from persisted measures and partitions.
pub fn report_stage(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let measures = MeasureStage::load(&config.out_dir)?;
    let clusters = ClusterStage::load(&config.out_dir, &measures.names())?;
    emit_reports(&clustering_reports(&measures, &clusters), config)
}
