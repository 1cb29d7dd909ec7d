//! Topological characterization, comparison and clustering of undirected
//! networks.
//!
//! Networks are summarized by twelve global measures and seven local
//! distributions ([`measures`]), compared with a composite distance
//! ([`features`]), grouped by four clustering methods ([`clustering`]) and
//! analysed with the statistics in [`stats`]. [`pipeline`] ties the stages
//! together over a manifest of edge-list files.

pub mod clustering;
pub mod error;
pub mod features;
pub mod generate;
pub mod graph;
pub mod measures;
pub mod pipeline;
pub mod stats;

pub use clustering::{cut_dendrogram, Dendrogram, Linkage, Method, Partition};
pub use error::{Error, Result};
pub use features::{DistanceMatrix, Histogram, NetworkFeatures};
pub use generate::{generate_synthetic, SyntheticModel};
pub use graph::{parse_edge_list, Graph, NodeId};
pub use measures::{CommunityPartition, GlobalSummary, LocalProfile};
