//! Originality scoring for sets of assets.
//!
//! Each asset is a point (a feature vector, a row of a distance matrix, or a
//! piece of text) and the set is modeled as particles that repel through a
//! pair potential. An asset's originality is the ratio of the interaction
//! energy among its comparands to its own interaction energy, so remote
//! assets score high, average ones score 1 and an asset that coincides with
//! a comparand scores 0.
//!
//! ```
//! use originality::{score_all, DistanceMatrix, ScoreConfig};
//!
//! // Three collinear points at 0, 0.5 and 1.
//! let d = DistanceMatrix::from_rows(&[
//!     vec![0.0, 0.5, 1.0],
//!     vec![0.5, 0.0, 0.5],
//!     vec![1.0, 0.5, 0.0],
//! ])
//! .unwrap();
//! let report = score_all(&d, &ScoreConfig::default()).unwrap();
//! assert_eq!(report.scores[1], Some(0.5));
//! ```

pub mod dataset;
pub mod distances;
pub mod energy;
pub mod error;
pub mod exec;
pub mod heatmap;
pub mod matrix;
pub mod means;
pub mod pipeline;
pub mod potential;
pub mod score;
pub mod stats;
pub mod sum;

#[cfg(test)]
mod testutil;

pub use distances::{ExtractionMode, ExtractionScheme, FeatureVectors};
pub use energy::{
    asset_energy, energy_breakdown, maxent_density, reference_energy, surprisal_asset, surprisal_total, total_energy,
    EnergyBreakdown,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use heatmap::{heatmap_grid, Bounds, HeatmapGrid};
pub use matrix::{validate_matrix, DistanceMatrix, ValidationReport};
pub use potential::{eval_pair_potential, PotentialSpec};
pub use score::{
    bounded_score, generalized_mean_score, j_nearest_score, score_all, score_all_with, score_asset, score_asset_with,
    score_vs_mean_energy, time_ordered_scores, AssetFlag, CollisionPolicy, ScoreConfig, ScoreReport, Variant,
};
pub use stats::{correlations, Correlations};
