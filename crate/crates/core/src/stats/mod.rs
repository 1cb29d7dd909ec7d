//! Partition evaluation and the statistical analyses run over a collection.

mod anova;
mod correlation;
mod powerlaw;
mod quadrature;
mod validation;

pub use anova::{
    anova_oneway, f_cdf, f_sf, studentized_range_cdf, studentized_range_quantile, tukey_posthoc,
    AnovaResult, PairComparison, SIGNIFICANCE,
};
pub use correlation::{distance_correlation, pearson};
pub use powerlaw::{hurwitz_zeta, powerlaw_ks, PowerLawFit};
pub use quadrature::GaussLegendre;
pub use validation::{ari, silhouette, ContingencyTable, SilhouetteReport};
