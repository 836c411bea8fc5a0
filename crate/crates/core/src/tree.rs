//! Counter-augmented search tree over the distinct scores of a window.
//!
//! Every node holds the positive and negative label counts of one score plus
//! the sums of those counts over its subtree, so label totals below any key
//! come out of a single root-to-node walk. The tree is an AVL tree stored in
//! an arena; rotations recompute the aggregates of the two rotated nodes.
//!
//! Alongside the main tree, [`StatsTree`] keeps an ordered index of the
//! positive nodes and the weighted list `P` of positive nodes, both bounded
//! by a `-inf` and a `+inf` sentinel node.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{AucError, InvariantViolation, ListName};
use crate::list::{Gap, WeightedList};
use crate::model::{AucRatio, Score};

/// Handle to a tree node. Stable for the lifetime of the node, reused after
/// the node is deleted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn from_raw(raw: u32) -> NodeId {
        NodeId(raw)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Tree key: a finite score or one of the two sentinels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKey {
    MinSentinel,
    Finite(Score),
    MaxSentinel,
}

impl NodeKey {
    pub fn is_sentinel(self) -> bool {
        !matches!(self, NodeKey::Finite(_))
    }

    pub fn score(self) -> Option<Score> {
        match self {
            NodeKey::Finite(s) => Some(s),
            _ => None,
        }
    }
}

impl From<Score> for NodeKey {
    fn from(s: Score) -> Self {
        NodeKey::Finite(s)
    }
}

#[derive(Debug, Clone)]
struct Node {
    key: NodeKey,
    poslab: u64,
    neglab: u64,
    accpos: u64,
    accneg: u64,
    left: Option<NodeId>,
    right: Option<NodeId>,
    height: u32,
}

impl Node {
    fn leaf(key: NodeKey) -> Node {
        Node {
            key,
            poslab: 0,
            neglab: 0,
            accpos: 0,
            accneg: 0,
            left: None,
            right: None,
            height: 1,
        }
    }

    fn is_empty(&self) -> bool {
        self.poslab == 0 && self.neglab == 0
    }
}

#[derive(Debug, Clone)]
pub struct StatsTree {
    nodes: Vec<Node>,
    free: Vec<NodeId>,
    root: NodeId,
    min: NodeId,
    max: NodeId,
    live: usize,
    positives: BTreeMap<NodeKey, NodeId>,
    pos_list: WeightedList,
}

impl Default for StatsTree {
    fn default() -> Self {
        Self::new()
    }
}

impl StatsTree {
    pub fn new() -> StatsTree {
        let min = NodeId(0);
        let max = NodeId(1);
        let mut nodes = vec![Node::leaf(NodeKey::MinSentinel), Node::leaf(NodeKey::MaxSentinel)];
        nodes[0].right = Some(max);
        nodes[0].height = 2;
        let positives = BTreeMap::from([(NodeKey::MinSentinel, min), (NodeKey::MaxSentinel, max)]);
        StatsTree {
            nodes,
            free: Vec::new(),
            root: min,
            min,
            max,
            live: 2,
            positives,
            pos_list: WeightedList::new(min, NodeKey::MinSentinel, max, NodeKey::MaxSentinel),
        }
    }

    #[inline]
    fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    #[inline]
    fn node_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id.index()]
    }

    pub fn min_sentinel(&self) -> NodeId {
        self.min
    }

    pub fn max_sentinel(&self) -> NodeId {
        self.max
    }

    pub fn key(&self, id: NodeId) -> NodeKey {
        self.node(id).key
    }

    pub fn poslab(&self, id: NodeId) -> u64 {
        self.node(id).poslab
    }

    pub fn neglab(&self, id: NodeId) -> u64 {
        self.node(id).neglab
    }

    pub fn total_pos(&self) -> u64 {
        self.node(self.root).accpos
    }

    pub fn total_neg(&self) -> u64 {
        self.node(self.root).accneg
    }

    /// Number of nodes, sentinels included.
    pub fn node_count(&self) -> usize {
        self.live
    }

    pub fn height(&self) -> u32 {
        self.node(self.root).height
    }

    /// The weighted list `P` of positive nodes.
    pub fn pos_list(&self) -> &WeightedList {
        &self.pos_list
    }

    pub fn find(&self, key: NodeKey) -> Option<NodeId> {
        let mut at = Some(self.root);
        while let Some(id) = at {
            let n = self.node(id);
            at = match key.cmp(&n.key) {
                Ordering::Less => n.left,
                Ordering::Greater => n.right,
                Ordering::Equal => return Some(id),
            };
        }
        None
    }

    /// Label totals over all nodes with key strictly below `key`.
    ///
    /// A node with `key` must exist.
    pub fn head_stats(&self, key: NodeKey) -> Result<Gap, AucError> {
        let mut head = Gap::default();
        let mut at = Some(self.root);
        while let Some(id) = at {
            let n = self.node(id);
            if key < n.key {
                at = n.left;
                continue;
            }
            if let Some(l) = n.left {
                head.pos += self.node(l).accpos;
                head.neg += self.node(l).accneg;
            }
            if key == n.key {
                return Ok(head);
            }
            head.pos += n.poslab;
            head.neg += n.neglab;
            at = n.right;
        }
        Err(AucError::MissingNode(key))
    }

    /// The positive node (or the lower sentinel) with the largest key `<= key`.
    pub fn max_pos_key(&self, key: NodeKey) -> NodeId {
        *self
            .positives
            .range(..=key)
            .next_back()
            .expect("lower sentinel is always indexed")
            .1
    }

    pub fn max_pos(&self, score: Score) -> NodeId {
        self.max_pos_key(NodeKey::Finite(score))
    }

    /// Positive nodes and sentinels in key order.
    pub fn positive_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.positives.values().copied()
    }

    /// Adds one positive entry at `score` and returns its node.
    pub fn add_tree_pos(&mut self, score: Score) -> NodeId {
        let key = NodeKey::Finite(score);
        let w = self.max_pos_key(key);
        let v = self.increment(key, 1, 0);
        // The new positive lies in w's gap until v is spliced in.
        self.pos_list.adjust(w, 1, 0).expect("w is in P");
        if w != v {
            self.positives.insert(key, v);
            let wh = self.head_stats(self.key(w)).expect("w is live");
            let vh = self.head_stats(key).expect("v is live");
            let split = Gap::new(self.poslab(w), vh.neg - wh.neg);
            self.pos_list.add(w, v, key, split).expect("P split is consistent");
        }
        v
    }

    /// Removes one positive entry at `score`.
    pub fn remove_tree_pos(&mut self, score: Score) -> Result<(), AucError> {
        let key = NodeKey::Finite(score);
        let v = self.find(key).filter(|&v| self.poslab(v) > 0).ok_or(AucError::MissingEntry {
            score: score.get(),
            label: "positive",
        })?;
        self.decrement(key, 1, 0);
        self.pos_list.adjust(v, -1, 0).expect("v is in P");
        if self.poslab(v) == 0 {
            self.pos_list.remove(v).expect("v is in P");
            self.positives.remove(&key);
        }
        self.cleanup(v, key);
        Ok(())
    }

    pub fn add_tree_neg(&mut self, score: Score) -> NodeId {
        let key = NodeKey::Finite(score);
        let v = self.increment(key, 0, 1);
        let u = self.max_pos_key(key);
        self.pos_list.adjust(u, 0, 1).expect("max_pos is in P");
        v
    }

    pub fn remove_tree_neg(&mut self, score: Score) -> Result<(), AucError> {
        let key = NodeKey::Finite(score);
        let v = self.find(key).filter(|&v| self.neglab(v) > 0).ok_or(AucError::MissingEntry {
            score: score.get(),
            label: "negative",
        })?;
        self.decrement(key, 0, 1);
        let u = self.max_pos_key(key);
        self.pos_list.adjust(u, 0, -1).expect("max_pos is in P");
        self.cleanup(v, key);
        Ok(())
    }

    fn cleanup(&mut self, v: NodeId, key: NodeKey) {
        if self.node(v).is_empty() {
            let root = self.delete(Some(self.root), key).expect("sentinels keep the tree non-empty");
            self.root = root;
        }
    }

    /// Exact AUC by an in-order walk. O(number of nodes).
    pub fn exact_ratio(&self) -> Option<AucRatio> {
        let mut twice_sum: u128 = 0;
        let mut head_pos: u64 = 0;
        self.for_each_in_order(|n| {
            twice_sum += (2 * head_pos as u128 + n.poslab as u128) * n.neglab as u128;
            head_pos += n.poslab;
        });
        AucRatio::from_twice_sum(twice_sum, self.total_pos(), self.total_neg())
    }

    fn for_each_in_order(&self, mut f: impl FnMut(&Node)) {
        let mut stack: Vec<NodeId> = Vec::with_capacity(2 * self.height() as usize);
        let mut at = Some(self.root);
        loop {
            while let Some(id) = at {
                stack.push(id);
                at = self.node(id).left;
            }
            match stack.pop() {
                Some(id) => {
                    let n = self.node(id);
                    f(n);
                    at = n.right;
                }
                None => break,
            }
        }
    }

    /// Node ids in key order, sentinels included.
    pub fn in_order(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.live);
        let mut stack = Vec::new();
        let mut at = Some(self.root);
        loop {
            while let Some(id) = at {
                stack.push(id);
                at = self.node(id).left;
            }
            match stack.pop() {
                Some(id) => {
                    out.push(id);
                    at = self.node(id).right;
                }
                None => return out,
            }
        }
    }

    // ---- AVL machinery ----

    fn alloc(&mut self, key: NodeKey) -> NodeId {
        self.live += 1;
        match self.free.pop() {
            Some(id) => {
                self.nodes[id.index()] = Node::leaf(key);
                id
            }
            None => {
                let id = NodeId(u32::try_from(self.nodes.len()).expect("tree arena exhausted"));
                self.nodes.push(Node::leaf(key));
                id
            }
        }
    }

    fn h(&self, id: Option<NodeId>) -> u32 {
        id.map_or(0, |i| self.node(i).height)
    }

    fn update(&mut self, id: NodeId) {
        let (left, right) = (self.node(id).left, self.node(id).right);
        let (mut accpos, mut accneg) = (self.node(id).poslab, self.node(id).neglab);
        for c in [left, right].into_iter().flatten() {
            accpos += self.node(c).accpos;
            accneg += self.node(c).accneg;
        }
        let height = 1 + self.h(left).max(self.h(right));
        let n = self.node_mut(id);
        n.accpos = accpos;
        n.accneg = accneg;
        n.height = height;
    }

    fn rotate_right(&mut self, y: NodeId) -> NodeId {
        let x = self.node(y).left.expect("rotate_right needs a left child");
        self.node_mut(y).left = self.node(x).right;
        self.node_mut(x).right = Some(y);
        self.update(y);
        self.update(x);
        x
    }

    fn rotate_left(&mut self, x: NodeId) -> NodeId {
        let y = self.node(x).right.expect("rotate_left needs a right child");
        self.node_mut(x).right = self.node(y).left;
        self.node_mut(y).left = Some(x);
        self.update(x);
        self.update(y);
        y
    }

    /// Refreshes `id` and restores the AVL condition; returns the new subtree root.
    fn rebalance(&mut self, id: NodeId) -> NodeId {
        self.update(id);
        let (left, right) = (self.node(id).left, self.node(id).right);
        let (hl, hr) = (self.h(left), self.h(right));
        if hl > hr + 1 {
            let l = left.unwrap();
            if self.h(self.node(l).left) < self.h(self.node(l).right) {
                let nl = self.rotate_left(l);
                self.node_mut(id).left = Some(nl);
            }
            self.rotate_right(id)
        } else if hr > hl + 1 {
            let r = right.unwrap();
            if self.h(self.node(r).right) < self.h(self.node(r).left) {
                let nr = self.rotate_right(r);
                self.node_mut(id).right = Some(nr);
            }
            self.rotate_left(id)
        } else {
            id
        }
    }

    fn increment(&mut self, key: NodeKey, dpos: u64, dneg: u64) -> NodeId {
        let (root, target) = self.insert_at(Some(self.root), key, dpos, dneg);
        self.root = root;
        target
    }

    fn insert_at(&mut self, at: Option<NodeId>, key: NodeKey, dpos: u64, dneg: u64) -> (NodeId, NodeId) {
        let Some(id) = at else {
            let id = self.alloc(key);
            let n = self.node_mut(id);
            n.poslab = dpos;
            n.neglab = dneg;
            n.accpos = dpos;
            n.accneg = dneg;
            return (id, id);
        };
        match key.cmp(&self.node(id).key) {
            Ordering::Less => {
                let (sub, target) = self.insert_at(self.node(id).left, key, dpos, dneg);
                self.node_mut(id).left = Some(sub);
                (self.rebalance(id), target)
            }
            Ordering::Greater => {
                let (sub, target) = self.insert_at(self.node(id).right, key, dpos, dneg);
                self.node_mut(id).right = Some(sub);
                (self.rebalance(id), target)
            }
            Ordering::Equal => {
                let n = self.node_mut(id);
                n.poslab += dpos;
                n.neglab += dneg;
                n.accpos += dpos;
                n.accneg += dneg;
                (id, id)
            }
        }
    }

    /// Subtracts counts at an existing node and fixes the aggregates on the path.
    fn decrement(&mut self, key: NodeKey, dpos: u64, dneg: u64) {
        let mut at = self.root;
        loop {
            let n = self.node_mut(at);
            n.accpos -= dpos;
            n.accneg -= dneg;
            at = match key.cmp(&n.key) {
                Ordering::Less => n.left.expect("key exists"),
                Ordering::Greater => n.right.expect("key exists"),
                Ordering::Equal => {
                    n.poslab -= dpos;
                    n.neglab -= dneg;
                    return;
                }
            };
        }
    }

    /// Deletes the node with `key`, relinking rather than copying so that
    /// every other node keeps its id.
    fn delete(&mut self, at: Option<NodeId>, key: NodeKey) -> Option<NodeId> {
        let id = at?;
        match key.cmp(&self.node(id).key) {
            Ordering::Less => {
                let sub = self.delete(self.node(id).left, key);
                self.node_mut(id).left = sub;
                Some(self.rebalance(id))
            }
            Ordering::Greater => {
                let sub = self.delete(self.node(id).right, key);
                self.node_mut(id).right = sub;
                Some(self.rebalance(id))
            }
            Ordering::Equal => {
                let (left, right) = (self.node(id).left, self.node(id).right);
                self.free.push(id);
                self.live -= 1;
                match (left, right) {
                    (None, r) => r,
                    (l, None) => l,
                    (Some(l), Some(r)) => {
                        let (rest, succ) = self.take_min(r);
                        let s = self.node_mut(succ);
                        s.left = Some(l);
                        s.right = rest;
                        Some(self.rebalance(succ))
                    }
                }
            }
        }
    }

    fn take_min(&mut self, id: NodeId) -> (Option<NodeId>, NodeId) {
        match self.node(id).left {
            None => (self.node(id).right, id),
            Some(l) => {
                let (rest, min) = self.take_min(l);
                self.node_mut(id).left = rest;
                (Some(self.rebalance(id)), min)
            }
        }
    }

    // ---- checks ----

    /// Recomputes every tree-side invariant from scratch. O(n log n).
    pub fn verify(&self) -> Result<(), InvariantViolation> {
        self.verify_subtree(Some(self.root))?;

        let order = self.in_order();
        if order.len() != self.live {
            return Err(InvariantViolation::NodeCount {
                reachable: order.len(),
                recorded: self.live,
            });
        }
        for w in order.windows(2) {
            if self.key(w[0]) >= self.key(w[1]) {
                return Err(InvariantViolation::KeyOrder(self.key(w[1])));
            }
        }
        for &id in &order {
            let n = self.node(id);
            let bad = if n.key.is_sentinel() { !n.is_empty() } else { n.is_empty() };
            if bad {
                return Err(InvariantViolation::NodeCounts(n.key));
            }
        }

        let indexed: Vec<NodeId> = order
            .iter()
            .copied()
            .filter(|&id| self.poslab(id) > 0 || self.key(id).is_sentinel())
            .collect();
        if !self.positive_nodes().eq(indexed.iter().copied()) {
            return Err(InvariantViolation::PositiveIndex);
        }
        if !self.pos_list.iter().map(|(id, _, _)| id).eq(indexed.iter().copied()) {
            return Err(InvariantViolation::Membership(ListName::Positive));
        }
        self.verify_gaps(&self.pos_list, ListName::Positive)
    }

    /// Checks every gap of `list` against head-count differences in the tree.
    pub fn verify_gaps(&self, list: &WeightedList, name: ListName) -> Result<(), InvariantViolation> {
        let members: Vec<(NodeId, NodeKey, Gap)> = list.iter().collect();
        if members.first().map(|m| m.0) != Some(self.min) || members.last().map(|m| m.0) != Some(self.max) {
            return Err(InvariantViolation::Membership(name));
        }
        let mut total = Gap::default();
        for pair in members.windows(2) {
            let (u, uk, ug) = pair[0];
            let (_, vk, _) = pair[1];
            if self.find(uk) != Some(u) {
                return Err(InvariantViolation::Membership(name));
            }
            let hu = self.head_stats(uk).map_err(|_| InvariantViolation::Membership(name))?;
            let hv = self.head_stats(vk).map_err(|_| InvariantViolation::Membership(name))?;
            let expected = Gap::new(hv.pos - hu.pos, hv.neg - hu.neg);
            if expected != ug {
                return Err(InvariantViolation::GapMismatch {
                    list: name,
                    key: uk,
                    expected,
                    found: ug,
                });
            }
            total.pos += ug.pos;
            total.neg += ug.neg;
        }
        let (_, last_key, last_gap) = *members.last().unwrap();
        if last_gap != Gap::default() {
            return Err(InvariantViolation::GapMismatch {
                list: name,
                key: last_key,
                expected: Gap::default(),
                found: last_gap,
            });
        }
        if total != Gap::new(self.total_pos(), self.total_neg()) {
            return Err(InvariantViolation::Totals);
        }
        Ok(())
    }

    /// Returns (height, accpos, accneg) of the subtree after checking it.
    fn verify_subtree(&self, at: Option<NodeId>) -> Result<(u32, u64, u64), InvariantViolation> {
        let Some(id) = at else { return Ok((0, 0, 0)) };
        let n = self.node(id);
        let (hl, pl, nl) = self.verify_subtree(n.left)?;
        let (hr, pr, nr) = self.verify_subtree(n.right)?;
        if n.accpos != n.poslab + pl + pr || n.accneg != n.neglab + nl + nr {
            return Err(InvariantViolation::Aggregate(n.key));
        }
        if n.height != 1 + hl.max(hr) || hl.abs_diff(hr) > 1 {
            return Err(InvariantViolation::Balance(n.key));
        }
        Ok((n.height, n.accpos, n.accneg))
    }

    #[cfg(test)]
    pub(crate) fn pos_list_mut(&mut self) -> &mut WeightedList {
        &mut self.pos_list
    }
}
