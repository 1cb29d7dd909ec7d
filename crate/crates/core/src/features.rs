//! Feature extraction and the composite inter-network distance.
//!
//! Global measures are min-max normalized over the whole collection and
//! compared with the absolute difference; local measures are min-max
//! normalized within each network, binned into fixed-width histograms and
//! compared with the one-dimensional earth mover's distance. The overall
//! distance is the plain mean of all partial distances.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{GlobalSummary, LocalProfile};

pub const DEFAULT_BINS: usize = 20;
pub const GLOBAL_COUNT: usize = 12;
pub const LOCAL_COUNT: usize = 7;
pub const PARTIAL_COUNT: usize = GLOBAL_COUNT + LOCAL_COUNT;

const MASS_TOLERANCE: f64 = 1e-9;

/// Min-max normalization; a constant series maps to all zeros.
pub fn minmax_normalize(series: &[f64]) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = series.iter().position(|x| !x.is_finite()) {
        return Err(Error::Numeric(i));
    }
    let (lo, hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if hi == lo {
        return Ok(vec![0.0; series.len()]);
    }
    let span = hi - lo;
    Ok(series.iter().map(|&x| (x - lo) / span).collect())
}

/// Normalized histogram of values in `[0, 1]` over equal-width bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    masses: Vec<f64>,
}

impl Histogram {
    /// Wraps bin masses after checking they form a distribution.
    pub fn from_masses(masses: Vec<f64>) -> Result<Self> {
        let h = Histogram { masses };
        h.validate()?;
        Ok(h)
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.masses.len() < 2 {
            return Err(Error::InvariantViolation(format!(
                "histogram has {} bins, need at least 2",
                self.masses.len()
            )));
        }
        if self.masses.iter().any(|&m| m < 0.0 || !m.is_finite()) {
            return Err(Error::InvariantViolation(
                "negative or non-finite bin mass".into(),
            ));
        }
        let total: f64 = self.masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvariantViolation(format!(
                "histogram mass {total} != 1"
            )));
        }
        Ok(())
    }
}

/// Bins values of `[0, 1]`: bin `i` covers `[i/b, (i+1)/b)`, the last bin is
/// closed at 1.
pub fn build_histogram(values: &[f64], bins: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins < 2 {
        return Err(Error::Param(format!("bins = {bins}, need at least 2")));
    }
    let mut counts = vec![0u64; bins];
    for (i, &v) in values.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Param(format!(
                "value {v} at position {i} outside [0, 1]"
            )));
        }
        let bin = ((v * bins as f64).floor() as usize).min(bins - 1);
        counts[bin] += 1;
    }
    let total = values.len() as f64;
    Ok(Histogram {
        masses: counts.into_iter().map(|c| c as f64 / total).collect(),
    })
}

/// Absolute difference of two normalized scalars.
pub fn manhattan(a: f64, b: f64) -> f64 {
    (a - b).abs()
}

/// Earth mover's distance between two histograms with ground distance
/// `|i - j| / (bins - 1)`, via cumulative sums.
pub fn emd_1d(h1: &Histogram, h2: &Histogram) -> Result<f64> {
    h1.validate()?;
    h2.validate()?;
    if h1.bins() != h2.bins() {
        return Err(Error::InvariantViolation(format!(
            "bin counts differ: {} vs {}",
            h1.bins(),
            h2.bins()
        )));
    }
    Ok(emd_unchecked(h1, h2))
}

fn emd_unchecked(h1: &Histogram, h2: &Histogram) -> f64 {
    let bins = h1.bins();
    let (mut c1, mut c2, mut work) = (0.0, 0.0, 0.0);
    for i in 0..bins - 1 {
        c1 += h1.masses[i];
        c2 += h2.masses[i];
        work += (c1 - c2).abs();
    }
    // Rounding in the running sums can push a full-mass move a hair past 1.
    (work / (bins - 1) as f64).min(1.0)
}

/// Local measure series binned into one histogram each, after per-network
/// normalization.
pub fn local_histograms(profile: &LocalProfile, bins: usize) -> Result<[Histogram; LOCAL_COUNT]> {
    let series = profile.series();
    let mut out = Vec::with_capacity(LOCAL_COUNT);
    for s in &series {
        out.push(build_histogram(&minmax_normalize(s)?, bins)?);
    }
    Ok(out.try_into().expect("seven local series"))
}

/// Everything compared between two networks.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkFeatures {
    /// Collection-normalized global measures, see [`crate::measures::GLOBAL_MEASURES`].
    pub global: [f64; GLOBAL_COUNT],
    /// One histogram per local measure, see [`crate::measures::LOCAL_MEASURES`].
    pub local: [Histogram; LOCAL_COUNT],
}

/// Normalizes every global column over the collection and pairs the result
/// with each network's local histograms.
pub fn assemble_features(
    summaries: &[GlobalSummary],
    histograms: Vec<[Histogram; LOCAL_COUNT]>,
) -> Result<Vec<NetworkFeatures>> {
    if summaries.len() != histograms.len() {
        return Err(Error::Param(
            "summaries and histograms differ in length".into(),
        ));
    }
    if summaries.is_empty() {
        return Err(Error::EmptyInput);
    }
    let rows: Vec<[f64; GLOBAL_COUNT]> = summaries.iter().map(|s| s.to_array()).collect();
    let mut columns = Vec::with_capacity(GLOBAL_COUNT);
    for j in 0..GLOBAL_COUNT {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        columns.push(minmax_normalize(&col)?);
    }
    Ok(histograms
        .into_iter()
        .enumerate()
        .map(|(i, local)| NetworkFeatures {
            global: std::array::from_fn(|j| columns[j][i]),
            local,
        })
        .collect())
}

/// The nineteen partial distances between two networks: twelve global
/// absolute differences followed by seven histogram EMDs.
pub fn partial_distances(f1: &NetworkFeatures, f2: &NetworkFeatures) -> [f64; PARTIAL_COUNT] {
    std::array::from_fn(|j| {
        if j < GLOBAL_COUNT {
            manhattan(f1.global[j], f2.global[j])
        } else {
            emd_unchecked(&f1.local[j - GLOBAL_COUNT], &f2.local[j - GLOBAL_COUNT])
        }
    })
}

/// Mean of all partial distances.
pub fn overall_distance(f1: &NetworkFeatures, f2: &NetworkFeatures) -> f64 {
    partial_distances(f1, f2).iter().sum::<f64>() / PARTIAL_COUNT as f64
}

/// Symmetric matrix with zero diagonal, stored as its strict upper triangle
/// in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    upper: Vec<f64>,
}

fn condensed_index(size: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < size);
    i * (2 * size - i - 1) / 2 + (j - i - 1)
}

impl DistanceMatrix {
    /// Builds a matrix from its strict upper triangle.
    pub fn from_upper(size: usize, upper: Vec<f64>) -> Result<Self> {
        if upper.len() != size * size.saturating_sub(1) / 2 {
            return Err(Error::InvariantViolation(format!(
                "{} values for a {size}x{size} matrix",
                upper.len()
            )));
        }
        if let Some(i) = upper.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvariantViolation(format!(
                "entry {i} is negative or not finite"
            )));
        }
        Ok(DistanceMatrix { size, upper })
    }

    /// Builds a matrix from a dense square array; asymmetric input is rejected.
    pub fn from_square(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut upper = Vec::with_capacity(size * size.saturating_sub(1) / 2);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvariantViolation("matrix is not square".into()));
            }
            if row[i] != 0.0 {
                return Err(Error::InvariantViolation(format!(
                    "diagonal entry {i} is not zero"
                )));
            }
            for j in (i + 1)..size {
                if row[j] != rows[j][i] {
                    return Err(Error::InvariantViolation(format!(
                        "entry ({i}, {j}) is not symmetric"
                    )));
                }
                upper.push(row[j]);
            }
        }
        Self::from_upper(size, upper)
    }

    /// Builds a matrix by evaluating `f(i, j)` for every `i < j`.
    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let upper = (0..size)
            .flat_map(|i| ((i + 1)..size).map(move |j| (i, j)))
            .map(|(i, j)| f(i, j))
            .collect();
        Self::from_upper(size, upper)
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.upper[condensed_index(self.size, i, j)],
            std::cmp::Ordering::Greater => self.upper[condensed_index(self.size, j, i)],
        }
    }

    /// Strict upper triangle, row-major.
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Little-endian binary form: the size as `u64`, then the upper
    /// triangle as `f64` values.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.size as u64).to_le_bytes())?;
        for v in &self.upper {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut word = [0u8; 8];
        input.read_exact(&mut word)?;
        let size = u64::from_le_bytes(word) as usize;
        let count = size * size.saturating_sub(1) / 2;
        let mut upper = Vec::with_capacity(count);
        for _ in 0..count {
            input.read_exact(&mut word)?;
            upper.push(f64::from_le_bytes(word));
        }
        if input.read(&mut word)? != 0 {
            return Err(Error::InvariantViolation(
                "trailing bytes after matrix".into(),
            ));
        }
        Self::from_upper(size, upper)
    }
}

/// Overall distances between every pair of networks, plus the per-measure
/// partial distance vectors (each in the same condensed order).
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSet {
    pub overall: DistanceMatrix,
    pub partials: Vec<Vec<f64>>,
}

pub fn distance_matrix(features: &[NetworkFeatures]) -> Result<DistanceMatrix> {
    Ok(distance_set(features)?.overall)
}

pub fn distance_set(features: &[NetworkFeatures]) -> Result<DistanceSet> {
    let size = features.len();
    if size < 2 {
        return Err(Error::TooFewNetworks(size));
    }
    let pairs: Vec<(usize, usize)> = (0..size)
        .flat_map(|i| ((i + 1)..size).map(move |j| (i, j)))
        .collect();
    let parts: Vec<[f64; PARTIAL_COUNT]> = pairs
        .par_iter()
        .map(|&(i, j)| partial_distances(&features[i], &features[j]))
        .collect();
    let overall = parts
        .iter()
        .map(|p| p.iter().sum::<f64>() / PARTIAL_COUNT as f64)
        .collect();
    let partials = (0..PARTIAL_COUNT)
        .map(|k| parts.iter().map(|p| p[k]).collect())
        .collect();
    Ok(DistanceSet {
        overall: DistanceMatrix::from_upper(size, overall)?,
        partials,
    })
}
