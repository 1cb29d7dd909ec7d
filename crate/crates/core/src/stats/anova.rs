use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use super::quadrature::GaussLegendre;
use crate::error::{Error, Result};

/// Significance level used to flag post-hoc pairs.
pub const SIGNIFICANCE: f64 = 0.05;

/// One-way ANOVA of a single measure across groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnovaResult {
    pub f: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p: f64,
}

/// Tukey HSD comparison of groups `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairComparison {
    pub i: usize,
    pub j: usize,
    pub mean_diff: f64,
    pub q: f64,
    pub p: f64,
    pub significant: bool,
}

struct Decomposition {
    means: Vec<f64>,
    sizes: Vec<usize>,
    ssb: f64,
    ssw: f64,
    df_between: usize,
    df_within: usize,
}

fn decompose<G: AsRef<[f64]>>(groups: &[G]) -> Result<Decomposition> {
    if groups.len() < 2 {
        return Err(Error::Param(format!(
            "need at least 2 groups, got {}",
            groups.len()
        )));
    }
    for (g, values) in groups.iter().enumerate() {
        let values = values.as_ref();
        if values.len() < 2 {
            return Err(Error::Param(format!(
                "group {g} has {} values, need at least 2",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(pos));
        }
    }
    let sizes: Vec<usize> = groups.iter().map(|g| g.as_ref().len()).collect();
    let total: usize = sizes.iter().sum();
    let means: Vec<f64> = groups
        .iter()
        .map(|g| g.as_ref().iter().sum::<f64>() / g.as_ref().len() as f64)
        .collect();
    let grand = groups.iter().flat_map(|g| g.as_ref()).sum::<f64>() / total as f64;
    let ssb = means
        .iter()
        .zip(&sizes)
        .map(|(m, &n)| n as f64 * (m - grand) * (m - grand))
        .sum();
    let ssw = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.as_ref().iter().map(|v| (v - m) * (v - m)).sum::<f64>())
        .sum();
    Ok(Decomposition {
        df_between: groups.len() - 1,
        df_within: total - groups.len(),
        means,
        sizes,
        ssb,
        ssw,
    })
}

/// One-way ANOVA: `F = (SSB / df_b) / (SSW / df_w)` with its upper-tail
/// p-value. Zero within-group spread gives `F = 0, p = 1` when the group
/// means coincide and `F = inf, p = 0` otherwise.
pub fn anova_oneway<G: AsRef<[f64]>>(groups: &[G]) -> Result<AnovaResult> {
    let dec = decompose(groups)?;
    let (df_between, df_within) = (dec.df_between, dec.df_within);
    let (f, p) = if dec.ssb == 0.0 {
        (0.0, 1.0)
    } else if dec.ssw == 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        let f = (dec.ssb / df_between as f64) / (dec.ssw / df_within as f64);
        (f, f_sf(f, df_between as f64, df_within as f64))
    };
    Ok(AnovaResult {
        f,
        df_between,
        df_within,
        p,
    })
}

/// CDF of the F distribution with `(d1, d2)` degrees of freedom.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        beta_reg(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2))
    }
}

/// Upper tail `1 - f_cdf`, computed without cancellation.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x))
    }
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `P(range of k standard normals <= w)`.
fn range_cdf_known_sigma(w: f64, k: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let rule = GaussLegendre::order64();
    let inner = |z: f64| {
        let span = normal_cdf(z) - normal_cdf(z - w);
        if span <= 0.0 {
            0.0
        } else {
            k * normal_pdf(z) * span.powf(k - 1.0)
        }
    };
    // The integrand is concentrated on [-8, 8 + w]; two panels keep the
    // fixed rule accurate for wide ranges.
    let hi = 8.0 + w.min(8.0);
    let mid = 0.5 * (hi - 8.0);
    (rule.integrate(-8.0, mid, inner) + rule.integrate(mid, hi, inner)).min(1.0)
}

/// CDF of the studentized range `Q(k, df)`, by 64-point Gauss–Legendre
/// integration over the scaled chi density of the variance estimate.
/// `df = inf` gives the known-variance case.
pub fn studentized_range_cdf(q: f64, k: usize, df: f64) -> f64 {
    assert!(k >= 2, "studentized range needs k >= 2");
    if q <= 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return 1.0;
    }
    let k = k as f64;
    if df.is_infinite() {
        return range_cdf_known_sigma(q, k);
    }
    // s = chi_df / sqrt(df) has mean near 1 and sd near 1 / sqrt(2 df).
    let sigma = 1.0 / (2.0 * df).sqrt();
    let lo = (1.0 - 10.0 * sigma).max(0.0);
    let hi = 1.0 + 10.0 * sigma;
    let half = 0.5 * df;
    let log_norm = half * df.ln() - ln_gamma(half) - (half - 1.0) * std::f64::consts::LN_2;
    let density = |s: f64| {
        if s <= 0.0 {
            0.0
        } else {
            (log_norm + (df - 1.0) * s.ln() - half * s * s).exp()
        }
    };
    let rule = GaussLegendre::order64();
    let mid = 0.5 * (lo + hi);
    let outer = |s: f64| density(s) * range_cdf_known_sigma(q * s, k);
    (rule.integrate(lo, mid, outer) + rule.integrate(mid, hi, outer)).clamp(0.0, 1.0)
}

/// Upper-`alpha` critical value of the studentized range, by bisection.
pub fn studentized_range_quantile(alpha: f64, k: usize, df: f64) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    let target = 1.0 - alpha;
    let mut hi = 1.0;
    while studentized_range_cdf(hi, k, df) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if studentized_range_cdf(mid, k, df) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Tukey–Kramer HSD over every pair of groups, in `(i, j)` order.
pub fn tukey_posthoc<G: AsRef<[f64]>>(groups: &[G]) -> Result<Vec<PairComparison>> {
    let dec = decompose(groups)?;
    let k = groups.len();
    let msw = dec.ssw / dec.df_within as f64;
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let mean_diff = dec.means[i] - dec.means[j];
            let se = (msw / 2.0 * (1.0 / dec.sizes[i] as f64 + 1.0 / dec.sizes[j] as f64)).sqrt();
            let q = if mean_diff == 0.0 {
                0.0
            } else if se == 0.0 {
                f64::INFINITY
            } else {
                mean_diff.abs() / se
            };
            let p = 1.0 - studentized_range_cdf(q, k, dec.df_within as f64);
            out.push(PairComparison {
                i,
                j,
                mean_diff,
                q,
                p,
                significant: p < SIGNIFICANCE,
            });
        }
    }
    Ok(out)
}
