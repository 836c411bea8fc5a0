//! Count-based sliding windows.

use std::collections::VecDeque;

use crate::error::{AucError, InvariantViolation};
use crate::estimator::{AucEstimator, EstimatorConfig};
use crate::model::{AucRatio, AucValue, Label, LabeledScore};
use crate::tree::StatsTree;

/// Approximate AUC over the last `capacity` events.
///
/// During warm-up the estimate covers whatever has arrived so far.
///
/// ```
/// use windowed_auc::{Epsilon, EstimatorConfig, Label, SlidingAucEstimator};
///
/// let config = EstimatorConfig::new("0.1".parse::<Epsilon>().unwrap());
/// let mut window = SlidingAucEstimator::new(1000, config).unwrap();
/// window.push_score(0.2, Label::Positive).unwrap();
/// window.push_score(0.9, Label::Negative).unwrap();
/// assert_eq!(window.estimate().value(), Some(1.0));
/// ```
#[derive(Debug, Clone)]
pub struct SlidingAucEstimator {
    capacity: usize,
    buffer: VecDeque<LabeledScore>,
    est: AucEstimator,
}

impl SlidingAucEstimator {
    pub fn new(capacity: usize, config: EstimatorConfig) -> Result<Self, AucError> {
        if capacity == 0 {
            return Err(AucError::ZeroCapacity);
        }
        Ok(SlidingAucEstimator {
            capacity,
            buffer: VecDeque::with_capacity(capacity),
            est: AucEstimator::new(config),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.buffer.len() == self.capacity
    }

    /// Window contents, oldest first.
    pub fn events(&self) -> impl ExactSizeIterator<Item = &LabeledScore> {
        self.buffer.iter()
    }

    pub fn estimator(&self) -> &AucEstimator {
        &self.est
    }

    /// Appends `event`, first evicting and returning the oldest event when
    /// the window is full.
    pub fn push(&mut self, event: LabeledScore) -> Option<LabeledScore> {
        let evicted = if self.is_full() {
            let old = self.buffer.pop_front().expect("full window is non-empty");
            self.est
                .remove(old)
                .expect("buffered event is present in the estimator");
            Some(old)
        } else {
            None
        };
        self.buffer.push_back(event);
        self.est.insert(event);
        evicted
    }

    /// Like [`push`](Self::push) for a raw score. A non-finite score is
    /// rejected and leaves the window untouched.
    pub fn push_score(&mut self, score: f64, label: Label) -> Result<Option<LabeledScore>, AucError> {
        Ok(self.push(LabeledScore::new(score, label)?))
    }

    pub fn estimate(&self) -> AucValue {
        self.est.estimate()
    }

    pub fn estimate_ratio(&self) -> Option<AucRatio> {
        self.est.estimate_ratio()
    }

    /// Exact AUC of the window by a full tree walk, O(k).
    pub fn exact(&self) -> AucValue {
        self.est.exact()
    }

    pub fn exact_ratio(&self) -> Option<AucRatio> {
        self.est.exact_ratio()
    }

    pub fn compressed_len(&self) -> usize {
        self.est.compressed_len()
    }

    /// Estimator invariants plus agreement between buffer and tree totals.
    pub fn verify_invariants(&self) -> Result<(), InvariantViolation> {
        self.est.verify_invariants()?;
        let tree = self.est.primary().tree();
        let pos = self.buffer.iter().filter(|e| e.label == Label::Positive).count() as u64;
        let neg = self.buffer.len() as u64 - pos;
        if tree.total_pos() != pos || tree.total_neg() != neg {
            return Err(InvariantViolation::Totals);
        }
        Ok(())
    }
}

/// Baseline: same window, exact AUC recomputed from the tree on request.
#[derive(Debug, Clone)]
pub struct ExactWindow {
    capacity: usize,
    buffer: VecDeque<LabeledScore>,
    tree: StatsTree,
}

impl ExactWindow {
    pub fn new(capacity: usize) -> Result<Self, AucError> {
        if capacity == 0 {
            return Err(AucError::ZeroCapacity);
        }
        Ok(ExactWindow {
            capacity,
            buffer: VecDeque::with_capacity(capacity),
            tree: StatsTree::new(),
        })
    }

    pub fn push(&mut self, event: LabeledScore) -> Option<LabeledScore> {
        let evicted = if self.buffer.len() == self.capacity {
            let old = self.buffer.pop_front().expect("full window is non-empty");
            match old.label {
                Label::Positive => self.tree.remove_tree_pos(old.score),
                Label::Negative => self.tree.remove_tree_neg(old.score),
            }
            .expect("buffered event is present in the tree");
            Some(old)
        } else {
            None
        };
        self.buffer.push_back(event);
        match event.label {
            Label::Positive => {
                self.tree.add_tree_pos(event.score);
            }
            Label::Negative => {
                self.tree.add_tree_neg(event.score);
            }
        }
        evicted
    }

    pub fn exact(&self) -> AucValue {
        self.tree.exact_ratio().into()
    }

    pub fn exact_ratio(&self) -> Option<AucRatio> {
        self.tree.exact_ratio()
    }
}
