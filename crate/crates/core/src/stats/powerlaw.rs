use crate::error::{Error, Result};

/// Minimum number of values at or above `kmin` needed for a fit.
const MIN_SAMPLE: usize = 10;

/// Discrete power-law fit of a degree sequence above a fixed threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub alpha: f64,
    /// Largest gap between the empirical and fitted CDFs at observed values.
    pub ks: f64,
    /// Number of values at or above `kmin`.
    pub n: usize,
    pub kmin: usize,
}

/// Euler-Maclaurin coefficients `B_2j / (2j)!`.
const EM_COEFFS: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

/// Hurwitz zeta `sum_{k >= 0} (q + k)^-s` for `s > 1`, `q >= 1`.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    const DIRECT: usize = 12;
    let mut sum: f64 = (0..DIRECT).map(|k| (q + k as f64).powf(-s)).sum();
    let a = q + DIRECT as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    let (mut rising, mut power) = (s, a.powf(-s - 1.0));
    for (j, c) in EM_COEFFS.iter().enumerate() {
        sum += c * rising * power;
        let m = 2.0 * j as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        power /= a * a;
    }
    sum
}

/// Exponent search interval; the log-likelihood is concave in `alpha`.
const ALPHA_RANGE: (f64, f64) = (1.0 + 1e-9, 50.0);

/// Maximum-likelihood discrete power law `P(k) = k^-alpha / zeta(alpha, kmin)`
/// over the values `>= kmin`, with the KS distance against the fitted CDF
/// `1 - zeta(alpha, k + 1) / zeta(alpha, kmin)` at each distinct value.
pub fn powerlaw_ks(degrees: &[usize], kmin: usize) -> Result<PowerLawFit> {
    if kmin == 0 {
        return Err(Error::Param("kmin must be at least 1".into()));
    }
    let mut tail: Vec<usize> = degrees.iter().copied().filter(|&k| k >= kmin).collect();
    if tail.len() < MIN_SAMPLE {
        return Err(Error::Param(format!(
            "need at least {MIN_SAMPLE} values >= {kmin}, got {}",
            tail.len()
        )));
    }
    if tail.iter().all(|&k| k == kmin) {
        return Err(Error::Degenerate(format!(
            "every value equals kmin = {kmin}"
        )));
    }
    tail.sort_unstable();
    let n = tail.len();
    let q = kmin as f64;
    let log_sum: f64 = tail.iter().map(|&k| (k as f64).ln()).sum();
    let neg_log_lik = |alpha: f64| alpha * log_sum + n as f64 * hurwitz_zeta(alpha, q).ln();

    // Golden-section search.
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = ALPHA_RANGE;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (neg_log_lik(x1), neg_log_lik(x2));
    while hi - lo > 1e-10 {
        if f1 <= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - ratio * (hi - lo);
            f1 = neg_log_lik(x1);
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + ratio * (hi - lo);
            f2 = neg_log_lik(x2);
        }
    }
    let alpha = 0.5 * (lo + hi);

    let norm = hurwitz_zeta(alpha, q);
    let mut ks = 0.0f64;
    let mut i = 0;
    while i < n {
        let k = tail[i];
        while i < n && tail[i] == k {
            i += 1;
        }
        let empirical = i as f64 / n as f64;
        let fitted = 1.0 - hurwitz_zeta(alpha, k as f64 + 1.0) / norm;
        ks = ks.max((empirical - fitted).abs());
    }
    Ok(PowerLawFit { alpha, ks, n, kmin })
}
