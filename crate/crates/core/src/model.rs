//! Stream events, the AUC value domain and the exact reference computations.
//!
//! Score direction: a larger score means the classifier leans towards the
//! *negative* label. AUC is therefore the probability that a random negative
//! outscores a random positive, ties counting one half. Flip the sign of the
//! scores to use the usual "high score means positive" convention.

use std::cmp::Ordering;
use std::fmt;

use crate::error::AucError;

/// A finite classifier score.
///
/// `-0.0` is normalized to `0.0` so that ties are decided by plain numeric
/// equality while the ordering stays total.
#[derive(Debug, Clone, Copy)]
pub struct Score(f64);

impl Score {
    pub fn new(value: f64) -> Result<Self, AucError> {
        if value.is_finite() {
            Ok(Score(value + 0.0))
        } else {
            Err(AucError::NonFiniteScore(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl PartialEq for Score {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Eq for Score {}

impl std::hash::Hash for Score {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Ground-truth label. On the wire `1` is positive and `0` is negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn from_bit(bit: u8) -> Option<Label> {
        match bit {
            0 => Some(Label::Negative),
            1 => Some(Label::Positive),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Label::Negative => 0,
            Label::Positive => 1,
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }

    pub(crate) fn name(self) -> &'static str {
        match self {
            Label::Negative => "negative",
            Label::Positive => "positive",
        }
    }
}

/// One stream event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledScore {
    pub score: Score,
    pub label: Label,
}

impl LabeledScore {
    pub fn new(score: f64, label: Label) -> Result<Self, AucError> {
        Ok(LabeledScore {
            score: Score::new(score)?,
            label,
        })
    }

    pub fn positive(score: f64) -> Result<Self, AucError> {
        Self::new(score, Label::Positive)
    }

    pub fn negative(score: f64) -> Result<Self, AucError> {
        Self::new(score, Label::Negative)
    }
}

/// AUC of a window, undefined when one of the classes is absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AucValue {
    Defined(f64),
    Undefined,
}

impl AucValue {
    pub fn value(self) -> Option<f64> {
        match self {
            AucValue::Defined(v) => Some(v),
            AucValue::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, AucValue::Defined(_))
    }
}

impl From<Option<AucRatio>> for AucValue {
    fn from(ratio: Option<AucRatio>) -> Self {
        ratio.map_or(AucValue::Undefined, |r| AucValue::Defined(r.value()))
    }
}

/// AUC as an exact fraction.
///
/// `numerator` is twice the concordance sum (ties count 1, concordant pairs
/// count 2) and `denominator` is `2 * positives * negatives`, so that all
/// accumulation stays in integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AucRatio {
    pub numerator: u128,
    pub denominator: u128,
}

impl AucRatio {
    /// `None` when either class is empty.
    pub fn from_twice_sum(twice_sum: u128, positives: u64, negatives: u64) -> Option<AucRatio> {
        let a = positives as u128 * negatives as u128;
        (a > 0).then(|| AucRatio {
            numerator: twice_sum,
            denominator: 2 * a,
        })
    }

    pub fn value(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// `1 - self`.
    pub fn complement(self) -> AucRatio {
        AucRatio {
            numerator: self.denominator - self.numerator,
            denominator: self.denominator,
        }
    }

    /// Exact rational comparison.
    pub fn same_value(self, other: AucRatio) -> bool {
        self.numerator * other.denominator == other.numerator * self.denominator
    }
}

/// Counts labels per distinct score and sums `(2 * HP(s) + p(s)) * n(s)`.
pub fn exact_auc_ratio(events: &[LabeledScore]) -> Option<AucRatio> {
    let mut sorted: Vec<LabeledScore> = events.to_vec();
    sorted.sort_by_key(|e| e.score);

    let (mut head_pos, mut total_neg) = (0u64, 0u64);
    let mut twice_sum: u128 = 0;
    for group in sorted.chunk_by(|a, b| a.score == b.score) {
        let pos = group.iter().filter(|e| e.label == Label::Positive).count() as u64;
        let neg = group.len() as u64 - pos;
        twice_sum += (2 * head_pos as u128 + pos as u128) * neg as u128;
        head_pos += pos;
        total_neg += neg;
    }
    AucRatio::from_twice_sum(twice_sum, head_pos, total_neg)
}

pub fn exact_auc(events: &[LabeledScore]) -> AucValue {
    exact_auc_ratio(events).into()
}

/// Brute force over every (positive, negative) pair. Quadratic; meant for
/// cross-checking [`exact_auc`].
pub fn pairwise_auc_oracle_ratio(events: &[LabeledScore]) -> Option<AucRatio> {
    let positives: Vec<Score> = events
        .iter()
        .filter(|e| e.label == Label::Positive)
        .map(|e| e.score)
        .collect();
    let negatives: Vec<Score> = events
        .iter()
        .filter(|e| e.label == Label::Negative)
        .map(|e| e.score)
        .collect();

    let mut twice_sum: u128 = 0;
    for p in &positives {
        for n in &negatives {
            twice_sum += match n.cmp(p) {
                Ordering::Greater => 2,
                Ordering::Equal => 1,
                Ordering::Less => 0,
            };
        }
    }
    AucRatio::from_twice_sum(twice_sum, positives.len() as u64, negatives.len() as u64)
}

pub fn pairwise_auc_oracle(events: &[LabeledScore]) -> AucValue {
    pairwise_auc_oracle_ratio(events).into()
}
