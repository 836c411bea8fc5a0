//! Approximate AUC from a compressed list of positive nodes.
//!
//! The compressed list `C` is a sub-list of `P`. For consecutive members
//! `v, w` it keeps `HP(w) <= alpha * (HP(v) + p(v))`, which bounds the
//! relative error of the grouped estimate by `epsilon / 2`, and for
//! consecutive triples `v, w, u` it keeps `HP(u) > alpha * (HP(v) + p(v))`,
//! which keeps `|C|` logarithmic in the number of positives.
//!
//! All threshold comparisons use integers: `alpha` is the exact decimal
//! `1 + epsilon` with six fractional digits.

use std::fmt;
use std::str::FromStr;

use crate::error::{AucError, InvariantViolation, ListName};
use crate::list::WeightedList;
use crate::model::{AucRatio, AucValue, Label, LabeledScore, Score};
use crate::tree::{NodeId, NodeKey, StatsTree};

const SCALE: u64 = 1_000_000;

/// Non-negative decimal with at most six fractional digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Epsilon {
    micros: u64,
}

impl Epsilon {
    pub const ZERO: Epsilon = Epsilon { micros: 0 };

    pub fn from_micros(micros: u64) -> Epsilon {
        Epsilon { micros }
    }

    pub fn micros(self) -> u64 {
        self.micros
    }

    pub fn as_f64(self) -> f64 {
        self.micros as f64 / SCALE as f64
    }

    pub fn alpha(self) -> Alpha {
        Alpha {
            numerator: (SCALE + self.micros) as u128,
        }
    }

    pub fn is_zero(self) -> bool {
        self.micros == 0
    }
}

impl FromStr for Epsilon {
    type Err = AucError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AucError::InvalidEpsilon(s.to_string());
        let t = s.trim();
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        let digits = |x: &str| x.bytes().all(|b| b.is_ascii_digit());
        if (int.is_empty() && frac.is_empty()) || !digits(int) || !digits(frac) || frac.len() > 6 {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac_micros: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse::<u64>().map_err(|_| bad())? * 10u64.pow(6 - frac.len() as u32)
        };
        int.checked_mul(SCALE)
            .and_then(|m| m.checked_add(frac_micros))
            .map(Epsilon::from_micros)
            .ok_or_else(bad)
    }
}

impl TryFrom<f64> for Epsilon {
    type Error = AucError;

    /// Accepts values whose shortest decimal form has at most six fractional digits.
    fn try_from(value: f64) -> Result<Self, Self::Error> {
        if !value.is_finite() {
            return Err(AucError::InvalidEpsilon(value.to_string()));
        }
        format!("{value}").parse()
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (int, frac) = (self.micros / SCALE, self.micros % SCALE);
        if frac == 0 {
            write!(f, "{int}")
        } else {
            let frac = format!("{frac:06}");
            write!(f, "{int}.{}", frac.trim_end_matches('0'))
        }
    }
}

/// `alpha = 1 + epsilon` as the fraction `numerator / 10^6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alpha {
    numerator: u128,
}

impl Alpha {
    /// `lhs <= alpha * rhs`
    #[inline]
    pub fn within(self, lhs: u64, rhs: u64) -> bool {
        SCALE as u128 * lhs as u128 <= self.numerator * rhs as u128
    }

    /// `lhs > alpha * rhs`
    #[inline]
    pub fn exceeds(self, lhs: u64, rhs: u64) -> bool {
        !self.within(lhs, rhs)
    }

    pub fn as_f64(self) -> f64 {
        self.numerator as f64 / SCALE as f64
    }
}

/// Grouped AUC over any weighted list that is gap-consistent with `tree`.
///
/// Each member contributes its own counts, and the nodes strictly between it
/// and its successor are treated as one pseudo-node with the remaining gap
/// counts. With every positive node in the list the result is exact.
pub fn approx_auc_ratio(tree: &StatsTree, list: &WeightedList) -> Option<AucRatio> {
    let mut head_pos: u128 = 0;
    let mut twice_sum: u128 = 0;
    for (id, _, gap) in list.iter() {
        let (p, n) = (tree.poslab(id), tree.neglab(id));
        twice_sum += (2 * head_pos + p as u128) * n as u128;
        head_pos += p as u128;
        let (p, n) = (gap.pos - p, gap.neg - n);
        twice_sum += (2 * head_pos + p as u128) * n as u128;
        head_pos += p as u128;
    }
    AucRatio::from_twice_sum(twice_sum, tree.total_pos(), tree.total_neg())
}

pub fn approx_auc(tree: &StatsTree, list: &WeightedList) -> AucValue {
    approx_auc_ratio(tree, list).into()
}

/// `2 * log(max(positives, 2)) / log(alpha) + 6`, or `None` for `epsilon = 0`.
pub fn compressed_size_bound(positives: u64, epsilon: Epsilon) -> Option<f64> {
    (!epsilon.is_zero()).then(|| {
        2.0 * (positives.max(2) as f64).ln() / epsilon.alpha().as_f64().ln() + 6.0
    })
}

/// Search tree, positive list and compressed list for one label orientation.
#[derive(Debug, Clone)]
pub struct CompressedAuc {
    tree: StatsTree,
    clist: WeightedList,
    epsilon: Epsilon,
    alpha: Alpha,
}

impl CompressedAuc {
    pub fn new(epsilon: Epsilon) -> CompressedAuc {
        let tree = StatsTree::new();
        let clist = WeightedList::new(
            tree.min_sentinel(),
            NodeKey::MinSentinel,
            tree.max_sentinel(),
            NodeKey::MaxSentinel,
        );
        CompressedAuc {
            tree,
            clist,
            epsilon,
            alpha: epsilon.alpha(),
        }
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn tree(&self) -> &StatsTree {
        &self.tree
    }

    pub fn compressed_list(&self) -> &WeightedList {
        &self.clist
    }

    /// `|C|`, sentinels included.
    pub fn compressed_len(&self) -> usize {
        self.clist.len()
    }

    pub fn estimate_ratio(&self) -> Option<AucRatio> {
        approx_auc_ratio(&self.tree, &self.clist)
    }

    pub fn estimate(&self) -> AucValue {
        self.estimate_ratio().into()
    }

    /// Exact AUC by a full walk of the tree.
    pub fn exact_ratio(&self) -> Option<AucRatio> {
        self.tree.exact_ratio()
    }

    pub fn exact(&self) -> AucValue {
        self.exact_ratio().into()
    }

    pub fn insert(&mut self, event: LabeledScore) {
        match event.label {
            Label::Positive => self.add_pos(event.score),
            Label::Negative => self.add_neg(event.score),
        }
    }

    pub fn remove(&mut self, event: LabeledScore) -> Result<(), AucError> {
        match event.label {
            Label::Positive => self.remove_pos(event.score),
            Label::Negative => self.remove_neg(event.score),
        }
    }

    /// Puts the `P`-successor of `v` into `C` right after `v`, unless it is
    /// already there. `v` must be a member of both lists. Returns whether a
    /// member was added.
    pub fn add_next(&mut self, v: NodeId) -> bool {
        let plist = self.tree.pos_list();
        let Some(w) = plist.next(v) else { return false };
        if self.clist.contains(w) {
            return false;
        }
        let split = plist.gap(v).expect("v is in P");
        self.clist
            .add(v, w, self.tree.key(w), split)
            .expect("P gap splits a C gap");
        true
    }

    /// Deletes every middle member of a triple whose outer gap is still within
    /// `alpha`. Assumes the pair condition holds on entry; one pass suffices.
    pub fn compress(&mut self) {
        let mut v = self.clist.head();
        let mut head_pos = 0u64;
        while let Some(w) = self.clist.next(v) {
            if self.clist.next(w).is_none() {
                break;
            }
            let gv = self.clist.gap(v).unwrap().pos;
            let gw = self.clist.gap(w).unwrap().pos;
            if self.alpha.within(head_pos + gv + gw, head_pos + self.tree.poslab(v)) {
                self.clist.remove(w).expect("w is an inner member");
            } else {
                head_pos += gv;
                v = w;
            }
        }
    }

    pub fn add_pos(&mut self, score: Score) {
        let key = NodeKey::Finite(score);
        self.tree.add_tree_pos(score);
        let (u, before) = self.clist.locate(key);
        self.clist.adjust(u, 1, 0).expect("u is in C");
        let c = before.pos;
        let gap = self.clist.gap(u).unwrap().pos;
        if self.alpha.exceeds(c + gap, c + self.tree.poslab(u)) {
            self.add_next(u);
        }
        self.compress();
    }

    pub fn remove_pos(&mut self, score: Score) -> Result<(), AucError> {
        let key = NodeKey::Finite(score);
        if !self.tree.find(key).is_some_and(|v| self.tree.poslab(v) > 0) {
            return Err(AucError::MissingEntry {
                score: score.get(),
                label: Label::Positive.name(),
            });
        }

        let (u, _) = self.clist.locate(key);
        if self.tree.key(u) == key && self.tree.poslab(u) == 1 {
            // u stops being positive: hand its place to the next positive
            // node, which inherits u's head count.
            self.add_next(u);
            self.clist.adjust(u, -1, 0)?;
            self.clist.remove(u)?;
        } else {
            self.clist.adjust(u, -1, 0)?;
        }
        self.tree.remove_tree_pos(score)?;

        let mut v = self.clist.head();
        let mut head_pos = 0u64;
        while let Some(w) = self.clist.next(v) {
            let x = self.clist.gap(v).unwrap().pos;
            if self.alpha.exceeds(head_pos + x, head_pos + self.tree.poslab(v)) {
                self.add_next(v);
            }
            head_pos += x;
            v = w;
        }
        self.compress();
        Ok(())
    }

    pub fn add_neg(&mut self, score: Score) {
        self.tree.add_tree_neg(score);
        let (u, _) = self.clist.locate(NodeKey::Finite(score));
        self.clist.adjust(u, 0, 1).expect("u is in C");
    }

    pub fn remove_neg(&mut self, score: Score) -> Result<(), AucError> {
        self.tree.remove_tree_neg(score)?;
        let (u, _) = self.clist.locate(NodeKey::Finite(score));
        self.clist.adjust(u, 0, -1)
    }

    /// Full consistency check against first principles. O(k log k).
    pub fn verify_invariants(&self) -> Result<(), InvariantViolation> {
        self.tree.verify()?;
        self.tree.verify_gaps(&self.clist, ListName::Compressed)?;

        let plist = self.tree.pos_list();
        let mut heads: Vec<(NodeKey, u64, u64)> = Vec::with_capacity(self.clist.len());
        for (id, key, _) in self.clist.iter() {
            if !plist.contains(id) {
                return Err(InvariantViolation::Membership(ListName::Compressed));
            }
            let hp = self.tree.head_stats(key).expect("checked by verify_gaps").pos;
            heads.push((key, hp, self.tree.poslab(id)));
        }
        for pair in heads.windows(2) {
            let ((vk, hv, pv), (_, hw, _)) = (pair[0], pair[1]);
            if !self.alpha.within(hw, hv + pv) {
                return Err(InvariantViolation::Uncompressed(vk));
            }
        }
        for triple in heads.windows(3) {
            let ((vk, hv, pv), (_, hu, _)) = (triple[0], triple[2]);
            if !self.alpha.exceeds(hu, hv + pv) {
                return Err(InvariantViolation::Redundant(vk));
            }
        }

        if let Some(bound) = compressed_size_bound(self.tree.total_pos(), self.epsilon) {
            if self.clist.len() as f64 > bound {
                return Err(InvariantViolation::SizeBound {
                    len: self.clist.len(),
                    bound,
                });
            }
        }

        if let (Some(est), Some(exact)) = (self.estimate_ratio(), self.exact_ratio()) {
            debug_assert_eq!(est.denominator, exact.denominator);
            // |est - exact| <= (eps / 2) * exact, over the shared denominator
            let diff = est.numerator.abs_diff(exact.numerator);
            if 2 * SCALE as u128 * diff > self.epsilon.micros as u128 * exact.numerator {
                return Err(InvariantViolation::ErrorBound {
                    estimate: est.value(),
                    exact: exact.value(),
                });
            }
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn clist_mut(&mut self) -> &mut WeightedList {
        &mut self.clist
    }

    /// HP of each C member, in list order.
    #[cfg(test)]
    fn c_heads(&self) -> Vec<(NodeKey, u64)> {
        self.clist
            .iter()
            .map(|(_, k, _)| (k, self.tree.head_stats(k).unwrap().pos))
            .collect()
    }
}

/// Estimator settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EstimatorConfig {
    pub epsilon: Epsilon,
    /// Estimate `1 - AUC` of the label-flipped window instead, which bounds
    /// the absolute error by `(1 - auc) * epsilon / 2`.
    pub flipped: bool,
}

impl EstimatorConfig {
    pub fn new(epsilon: Epsilon) -> Self {
        EstimatorConfig {
            epsilon,
            flipped: false,
        }
    }

    pub fn flipped(mut self, flipped: bool) -> Self {
        self.flipped = flipped;
        self
    }

    pub fn alpha(&self) -> Alpha {
        self.epsilon.alpha()
    }
}

/// A [`CompressedAuc`] plus, in flipped mode, a twin fed inverted labels.
#[derive(Debug, Clone)]
pub struct AucEstimator {
    config: EstimatorConfig,
    primary: CompressedAuc,
    flipped: Option<CompressedAuc>,
}

impl AucEstimator {
    pub fn new(config: EstimatorConfig) -> Self {
        AucEstimator {
            config,
            primary: CompressedAuc::new(config.epsilon),
            flipped: config.flipped.then(|| CompressedAuc::new(config.epsilon)),
        }
    }

    pub fn config(&self) -> EstimatorConfig {
        self.config
    }

    pub fn primary(&self) -> &CompressedAuc {
        &self.primary
    }

    pub fn flipped_twin(&self) -> Option<&CompressedAuc> {
        self.flipped.as_ref()
    }

    pub fn insert(&mut self, event: LabeledScore) {
        self.primary.insert(event);
        if let Some(twin) = &mut self.flipped {
            twin.insert(LabeledScore {
                score: event.score,
                label: event.label.flipped(),
            });
        }
    }

    pub fn remove(&mut self, event: LabeledScore) -> Result<(), AucError> {
        self.primary.remove(event)?;
        if let Some(twin) = &mut self.flipped {
            twin.remove(LabeledScore {
                score: event.score,
                label: event.label.flipped(),
            })?;
        }
        Ok(())
    }

    pub fn estimate_ratio(&self) -> Option<AucRatio> {
        match &self.flipped {
            Some(twin) => twin.estimate_ratio().map(AucRatio::complement),
            None => self.primary.estimate_ratio(),
        }
    }

    pub fn estimate(&self) -> AucValue {
        self.estimate_ratio().into()
    }

    pub fn exact_ratio(&self) -> Option<AucRatio> {
        self.primary.exact_ratio()
    }

    pub fn exact(&self) -> AucValue {
        self.exact_ratio().into()
    }

    /// Length of the compressed list that produces the estimate.
    pub fn compressed_len(&self) -> usize {
        self.flipped.as_ref().unwrap_or(&self.primary).compressed_len()
    }

    pub fn verify_invariants(&self) -> Result<(), InvariantViolation> {
        self.primary.verify_invariants()?;
        if let Some(twin) = &self.flipped {
            twin.verify_invariants()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::list::Gap;
    use crate::model::exact_auc_ratio;
    use proptest::prelude::*;

    fn s(x: f64) -> Score {
        Score::new(x).unwrap()
    }

    fn fin(x: f64) -> NodeKey {
        NodeKey::Finite(s(x))
    }

    fn eps(x: &str) -> Epsilon {
        x.parse().unwrap()
    }

    fn c_keys(est: &CompressedAuc) -> Vec<NodeKey> {
        est.compressed_list().iter().map(|(_, k, _)| k).collect()
    }

    #[test]
    fn epsilon_parsing() {
        assert_eq!(eps("0.3").micros(), 300_000);
        assert_eq!(eps("1").micros(), 1_000_000);
        assert_eq!(eps(".5").micros(), 500_000);
        assert_eq!(eps("0.000001").micros(), 1);
        assert_eq!(eps("2.25").to_string(), "2.25");
        assert_eq!(eps("0").to_string(), "0");
        for bad in ["", ".", "-0.1", "0.1234567", "1e-3", "abc", "0.3.1"] {
            assert!(bad.parse::<Epsilon>().is_err(), "{bad}");
        }
        assert_eq!(Epsilon::try_from(0.1).unwrap(), eps("0.1"));
        assert!(Epsilon::try_from(f64::NAN).is_err());
        assert!(Epsilon::try_from(1e-9).is_err());
    }

    #[test]
    fn alpha_comparisons_are_exact() {
        let a = eps("0.3").alpha();
        // 13 <= 1.3 * 10 exactly, no float tie-break
        assert!(a.within(13, 10));
        assert!(a.exceeds(14, 10));
        assert!(Epsilon::ZERO.alpha().within(5, 5));
        assert!(Epsilon::ZERO.alpha().exceeds(6, 5));
    }

    #[test]
    fn approx_auc_traces() {
        let mut est = CompressedAuc::new(eps("0.5"));
        est.add_pos(s(1.0));
        est.add_neg(s(2.0));
        assert_eq!(c_keys(&est), vec![NodeKey::MinSentinel, fin(1.0), NodeKey::MaxSentinel]);
        assert_eq!(est.estimate(), AucValue::Defined(1.0));

        // hand-built list [S-, node1, S+] over positives at 1, 2, 3 and a negative at 4
        let mut tree = StatsTree::new();
        for x in [1.0, 2.0, 3.0] {
            tree.add_tree_pos(s(x));
        }
        tree.add_tree_neg(s(4.0));
        let node1 = tree.find(fin(1.0)).unwrap();
        let mut list = WeightedList::new(
            tree.min_sentinel(),
            NodeKey::MinSentinel,
            tree.max_sentinel(),
            NodeKey::MaxSentinel,
        );
        list.adjust(tree.min_sentinel(), 3, 1).unwrap();
        list.add(tree.min_sentinel(), node1, fin(1.0), Gap::default()).unwrap();
        // grouped node after node1 has p = 2, n = 1 at head count 1: (1 + 1) * 1 = 2 of 3
        let r = approx_auc_ratio(&tree, &list).unwrap();
        assert!(r.same_value(AucRatio { numerator: 2, denominator: 3 }));
        assert_eq!(tree.exact_ratio().unwrap().value(), 1.0);

        // P itself holds every positive node: exact
        assert_eq!(approx_auc_ratio(&tree, tree.pos_list()), tree.exact_ratio());
    }

    #[test]
    fn compress_trace_alpha_two() {
        let mut est = CompressedAuc::new(eps("1"));
        for x in [1.0, 2.0, 3.0, 4.0] {
            est.tree.add_tree_pos(s(x));
        }
        // C := P
        let plist = est.tree.pos_list().clone();
        let mut at = plist.head();
        est.clist.adjust(at, 4, 0).unwrap();
        while est.add_next(at) {
            at = plist.next(at).unwrap();
        }
        assert_eq!(est.compressed_len(), 6);
        est.compress();
        assert_eq!(
            c_keys(&est),
            vec![NodeKey::MinSentinel, fin(1.0), fin(3.0), NodeKey::MaxSentinel]
        );
        est.verify_invariants().unwrap();

        let before = c_keys(&est);
        est.compress();
        assert_eq!(c_keys(&est), before);
    }

    #[test]
    fn add_next_examples() {
        let mut est = CompressedAuc::new(eps("0.5"));
        est.tree.add_tree_pos(s(1.0));
        let head = est.tree.min_sentinel();
        est.clist.adjust(head, 1, 0).unwrap();
        assert!(est.add_next(head));
        assert_eq!(c_keys(&est), vec![NodeKey::MinSentinel, fin(1.0), NodeKey::MaxSentinel]);
        assert!(!est.add_next(head));
        assert_eq!(est.compressed_len(), 3);
        est.verify_invariants().unwrap();
    }

    #[test]
    fn first_add_keeps_first_positive() {
        let mut est = CompressedAuc::new(eps("0.9"));
        est.add_pos(s(1.0));
        assert_eq!(c_keys(&est), vec![NodeKey::MinSentinel, fin(1.0), NodeKey::MaxSentinel]);
        est.verify_invariants().unwrap();
    }

    #[test]
    fn add_remove_round_trip_to_empty() {
        let mut est = CompressedAuc::new(eps("0.3"));
        est.add_pos(s(1.0));
        est.remove_pos(s(1.0)).unwrap();
        assert_eq!(est.compressed_len(), 2);
        assert_eq!(est.tree().node_count(), 2);
        est.verify_invariants().unwrap();
    }

    #[test]
    fn add_neg_adjusts_c_gap() {
        let mut est = CompressedAuc::new(eps("0.3"));
        est.add_pos(s(1.0));
        est.add_neg(s(2.0));
        let node1 = est.tree().find(fin(1.0)).unwrap();
        assert_eq!(est.compressed_list().gap(node1), Some(Gap::new(1, 1)));
        assert_eq!(est.estimate(), AucValue::Defined(1.0));

        let snapshot = format!("{:?}", c_keys(&est));
        est.add_neg(s(0.5));
        est.remove_neg(s(0.5)).unwrap();
        assert_eq!(format!("{:?}", c_keys(&est)), snapshot);
        assert_eq!(est.compressed_list().gap(node1), Some(Gap::new(1, 1)));
        est.verify_invariants().unwrap();
    }

    #[test]
    fn missing_entries_are_errors() {
        let mut est = CompressedAuc::new(eps("0.3"));
        est.add_neg(s(1.0));
        assert!(matches!(est.remove_pos(s(1.0)), Err(AucError::MissingEntry { .. })));
        assert!(matches!(est.remove_neg(s(2.0)), Err(AucError::MissingEntry { .. })));
        est.verify_invariants().unwrap();
    }

    #[test]
    fn replacement_preserves_head_counts() {
        // Positives at 1..=6, eps large enough that C skips nodes.
        let mut est = CompressedAuc::new(eps("1"));
        for x in 1..=6 {
            est.add_pos(s(x as f64));
        }
        est.verify_invariants().unwrap();
        // pick an inner C member holding one positive
        let (victim, key) = est
            .compressed_list()
            .iter()
            .map(|(id, k, _)| (id, k))
            .find(|&(id, k)| {
                !k.is_sentinel()
                    && k != fin(1.0)
                    && est.tree.poslab(id) == 1
                    && !est.clist.contains(est.tree.pos_list().next(id).unwrap())
            })
            .unwrap();
        let heads_before = est.c_heads();
        let next_p = est.tree.pos_list().next(victim).unwrap();

        // replacement step in isolation
        let mut probe = est.clone();
        probe.add_next(victim);
        probe.clist.adjust(victim, -1, 0).unwrap();
        probe.clist.remove(victim).unwrap();
        probe.tree.remove_tree_pos(key.score().unwrap()).unwrap();
        assert!(probe.compressed_list().contains(next_p));
        let heads_after = probe.c_heads();
        // the successor takes over the victim's head count; later members
        // lose the removed positive
        let at = heads_before.iter().position(|&(id, _)| id == key).unwrap();
        let expected: Vec<u64> = heads_before
            .iter()
            .enumerate()
            .map(|(i, &(_, h))| if i > at { h - 1 } else { h })
            .collect();
        let found: Vec<u64> = heads_after.iter().map(|&(_, h)| h).collect();
        assert_eq!(expected, found);

        est.remove_pos(key.score().unwrap()).unwrap();
        est.verify_invariants().unwrap();
    }

    #[test]
    fn single_add_next_repairs_violation() {
        // eps = 0: every positive node must be in C; adding a new positive
        // between two members creates exactly one violation at u.
        let mut est = CompressedAuc::new(Epsilon::ZERO);
        est.add_pos(s(1.0));
        est.add_pos(s(3.0));
        est.tree.add_tree_pos(s(2.0));
        let (u, before) = est.clist.locate(fin(2.0));
        est.clist.adjust(u, 1, 0).unwrap();
        assert_eq!(est.tree.key(u), fin(1.0));
        let gap = est.clist.gap(u).unwrap().pos;
        assert!(est.alpha.exceeds(before.pos + gap, before.pos + est.tree.poslab(u)));
        assert!(est.add_next(u));
        est.verify_invariants().unwrap();
    }

    #[test]
    fn verify_reports_clean_and_corrupted_states() {
        let est = CompressedAuc::new(eps("0.3"));
        assert_eq!(est.verify_invariants(), Ok(()));

        let mut est = CompressedAuc::new(eps("0.3"));
        est.add_pos(s(1.0));
        est.add_neg(s(2.0));
        let head = est.tree.min_sentinel();
        est.clist_mut().gap_mut(head).neg += 1;
        assert!(matches!(
            est.verify_invariants(),
            Err(InvariantViolation::GapMismatch { list: ListName::Compressed, .. })
        ));
    }

    #[test]
    fn negatives_never_change_c() {
        let mut est = CompressedAuc::new(eps("0.2"));
        for x in 0..50 {
            est.add_pos(s(x as f64));
        }
        let keys = c_keys(&est);
        for x in 0..100 {
            est.add_neg(s(x as f64 * 0.37));
            assert_eq!(c_keys(&est), keys);
        }
        for x in 0..100 {
            est.remove_neg(s(x as f64 * 0.37)).unwrap();
            assert_eq!(c_keys(&est), keys);
        }
        est.verify_invariants().unwrap();
    }

    #[test]
    fn flipped_mode_exact_at_perfect_auc() {
        let mut est = AucEstimator::new(EstimatorConfig::new(eps("0.5")).flipped(true));
        for i in 0..50 {
            est.insert(LabeledScore::positive(i as f64).unwrap());
            est.insert(LabeledScore::negative(100.0 + i as f64).unwrap());
        }
        assert_eq!(est.estimate(), AucValue::Defined(1.0));
        assert_eq!(est.exact(), AucValue::Defined(1.0));
        est.verify_invariants().unwrap();
    }

    #[derive(Debug, Clone)]
    enum Op {
        Add(i32, bool),
        Remove(usize),
    }

    fn ops(max: usize) -> impl Strategy<Value = Vec<Op>> {
        prop::collection::vec(
            prop_oneof![
                3 => (0i32..40, any::<bool>()).prop_map(|(x, p)| Op::Add(x, p)),
                2 => any::<usize>().prop_map(Op::Remove),
            ],
            1..max,
        )
    }

    fn replay(est: &mut CompressedAuc, ops: &[Op], mut check: impl FnMut(&CompressedAuc, &[LabeledScore])) {
        let mut live: Vec<LabeledScore> = Vec::new();
        for op in ops {
            match *op {
                Op::Add(x, p) => {
                    let e = LabeledScore::new(x as f64 * 0.25, if p { Label::Positive } else { Label::Negative }).unwrap();
                    est.insert(e);
                    live.push(e);
                }
                Op::Remove(i) if !live.is_empty() => {
                    let e = live.swap_remove(i % live.len());
                    est.remove(e).unwrap();
                }
                Op::Remove(_) => continue,
            }
            check(est, &live);
        }
    }

    proptest! {
        #[test]
        fn random_ops_keep_invariants(ops in ops(150), micros in prop::sample::select(vec![0u64, 100_000, 300_000, 1_000_000, 4_000_000])) {
            let mut est = CompressedAuc::new(Epsilon::from_micros(micros));
            replay(&mut est, &ops, |est, live| {
                assert_eq!(est.verify_invariants(), Ok(()));
                assert_eq!(est.exact_ratio(), exact_auc_ratio(live));
                if micros == 0 {
                    assert_eq!(est.estimate_ratio(), est.exact_ratio());
                }
            });
        }

        #[test]
        fn replay_is_deterministic(ops in ops(100)) {
            let mut a = CompressedAuc::new(eps("0.3"));
            let mut b = CompressedAuc::new(eps("0.3"));
            replay(&mut a, &ops, |_, _| {});
            replay(&mut b, &ops, |_, _| {});
            prop_assert_eq!(format!("{:?}", a), format!("{:?}", b));
        }
    }
}
