//! Synthetic corpora with known domain structure.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;

use super::manifest::{Manifest, ManifestEntry};
use crate::error::{Error, Result};
use crate::generate::{generate_synthetic, rng_for, SyntheticModel};

/// Corpus layouts understood by [`generate_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    /// Two domains: sparse planted-partition graphs with strong community
    /// structure (`modular`) and dense, highly clustered small-world rings
    /// (`dense`).
    PlantedVsDense,
    /// One domain per random model: `er`, `ws`, `ba` and `planted`.
    Models,
}

impl FromStr for CorpusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "planted-vs-dense" => Ok(CorpusKind::PlantedVsDense),
            "models" => Ok(CorpusKind::Models),
            other => Err(Error::Param(format!("unknown corpus kind {other:?}"))),
        }
    }
}

fn domains(kind: CorpusKind) -> Vec<(&'static str, SyntheticModel)> {
    match kind {
        CorpusKind::PlantedVsDense => vec![
            (
                "modular",
                SyntheticModel::PlantedPartition {
                    n: 100,
                    c: 4,
                    p_in: 0.2,
                    p_out: 0.005,
                },
            ),
            (
                "dense",
                SyntheticModel::WattsStrogatz {
                    n: 100,
                    k: 16,
                    beta: 0.1,
                },
            ),
        ],
        CorpusKind::Models => vec![
            ("er", SyntheticModel::ErdosRenyi { n: 100, p: 0.08 }),
            (
                "ws",
                SyntheticModel::WattsStrogatz {
                    n: 100,
                    k: 6,
                    beta: 0.1,
                },
            ),
            ("ba", SyntheticModel::BarabasiAlbert { n: 100, m0: 3 }),
            (
                "planted",
                SyntheticModel::PlantedPartition {
                    n: 100,
                    c: 4,
                    p_in: 0.3,
                    p_out: 0.01,
                },
            ),
        ],
    }
}

/// Writes `per_domain` edge lists per domain under `dir/networks` and a
/// manifest at `dir/manifest.csv`. Network seeds are drawn from `seed`.
pub fn generate_corpus(
    kind: CorpusKind,
    per_domain: usize,
    seed: u64,
    dir: &Path,
) -> Result<Manifest> {
    if per_domain == 0 {
        return Err(Error::Param("per_domain must be at least 1".into()));
    }
    let networks = dir.join("networks");
    fs::create_dir_all(&networks)?;
    let mut rng = rng_for(seed);
    let mut entries = Vec::new();
    for (domain, model) in domains(kind) {
        for i in 0..per_domain {
            let name = format!("{domain}_{i:03}");
            let g = generate_synthetic(model, rng.gen())?;
            let path = networks.join(format!("{name}.txt"));
            g.write_edge_list(BufWriter::new(File::create(&path)?))?;
            entries.push(ManifestEntry {
                name,
                path,
                domain: domain.to_string(),
            });
        }
    }
    let manifest = Manifest { entries };
    manifest.write(&dir.join("manifest.csv"), dir)?;
    Ok(manifest)
}
