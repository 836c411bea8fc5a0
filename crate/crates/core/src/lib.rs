//! Approximate area under the ROC curve over a sliding window.
//!
//! [`SlidingAucEstimator`] keeps the last `k` scored, labeled events and
//! reports an AUC estimate whose relative error is at most `epsilon / 2`,
//! at a cost of `O(log k + log(k) / epsilon)` per event. The exact AUC of
//! the same window is available for validation in `O(k)`.
//!
//! Scores follow the "larger score means more likely negative" direction;
//! see [`model`].

pub mod cli;
pub mod error;
pub mod estimator;
pub mod list;
pub mod model;
pub mod tree;
pub mod window;

pub use error::{AucError, InvariantViolation, ListName};
pub use estimator::{
    approx_auc, approx_auc_ratio, compressed_size_bound, Alpha, AucEstimator, CompressedAuc,
    Epsilon, EstimatorConfig,
};
pub use list::{Gap, WeightedList};
pub use model::{
    exact_auc, exact_auc_ratio, pairwise_auc_oracle, pairwise_auc_oracle_ratio, AucRatio,
    AucValue, Label, LabeledScore, Score,
};
pub use tree::{NodeId, NodeKey, StatsTree};
pub use window::{ExactWindow, SlidingAucEstimator};
