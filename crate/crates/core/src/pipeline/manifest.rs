use std::collections::HashSet;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// One network of a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub name: String,
    /// Edge-list file, resolved against the manifest's directory.
    pub path: PathBuf,
    /// Free-form domain label.
    pub domain: String,
}

/// Validated list of networks with unique names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

const HEADER: [&str; 3] = ["name", "path", "domain"];

impl Manifest {
    /// Parses CSV with the header `name,path,domain`; relative paths are
    /// joined onto `base`.
    pub fn from_reader<R: Read>(reader: R, base: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header != HEADER {
            return Err(Error::Manifest(format!(
                "expected header name,path,domain, found {}",
                header.join(",")
            )));
        }
        let mut seen = HashSet::new();
        let mut entries = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let line = row + 2;
            let (name, path, domain) = (&record[0], &record[1], &record[2]);
            if name.is_empty() || path.is_empty() {
                return Err(Error::Manifest(format!("line {line}: empty name or path")));
            }
            if !seen.insert(name.to_string()) {
                return Err(Error::Manifest(format!(
                    "line {line}: duplicate network name {name:?}"
                )));
            }
            let path = Path::new(path);
            entries.push(ManifestEntry {
                name: name.to_string(),
                path: if path.is_absolute() {
                    path.to_path_buf()
                } else {
                    base.join(path)
                },
                domain: domain.to_string(),
            });
        }
        if entries.is_empty() {
            return Err(Error::Manifest("manifest lists no networks".into()));
        }
        Ok(Manifest { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes the manifest with paths relative to `base` where possible.
    pub fn write(&self, path: &Path, base: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(HEADER)?;
        for e in &self.entries {
            let rel = e.path.strip_prefix(base).unwrap_or(&e.path);
            w.write_record([e.name.as_str(), &rel.to_string_lossy(), e.domain.as_str()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A manifest that cannot be opened is a data error naming its path.
pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let file = File::open(path).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    Manifest::from_reader(file, base).map_err(|e| match e {
        Error::Io(_) | Error::Manifest(_) => e,
        other => Error::Manifest(other.to_string()),
    })
}
