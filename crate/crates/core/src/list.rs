//! Weighted linked lists over tree nodes.
//!
//! A member `u` with successor `v` stores the label totals of every tree node
//! whose key lies in `[key(u), key(v))`. Splicing a member in or out only
//! moves counts between neighbouring gaps, so both are O(1).

use crate::error::AucError;
use crate::tree::{NodeId, NodeKey};

/// Label totals of a half-open key interval.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Gap {
    pub pos: u64,
    pub neg: u64,
}

impl Gap {
    pub fn new(pos: u64, neg: u64) -> Gap {
        Gap { pos, neg }
    }
}

#[derive(Debug, Clone)]
struct Link {
    key: NodeKey,
    prev: Option<NodeId>,
    next: Option<NodeId>,
    gap: Gap,
}

/// Doubly linked list anchored by two permanent end members.
///
/// Links are stored in a table indexed by [`NodeId`], which lets one tree
/// node belong to several lists at once, each with its own gap counters.
#[derive(Debug, Clone)]
pub struct WeightedList {
    links: Vec<Option<Link>>,
    head: NodeId,
    tail: NodeId,
    len: usize,
}

impl WeightedList {
    /// Creates `[head, tail]` with empty gaps. `head_key` must be below `tail_key`.
    pub fn new(head: NodeId, head_key: NodeKey, tail: NodeId, tail_key: NodeKey) -> Self {
        assert!(head_key < tail_key, "list anchors out of order");
        let mut list = WeightedList {
            links: Vec::new(),
            head,
            tail,
            len: 2,
        };
        list.put(
            head,
            Link {
                key: head_key,
                prev: None,
                next: Some(tail),
                gap: Gap::default(),
            },
        );
        list.put(
            tail,
            Link {
                key: tail_key,
                prev: Some(head),
                next: None,
                gap: Gap::default(),
            },
        );
        list
    }

    fn put(&mut self, id: NodeId, link: Link) {
        let idx = id.index();
        if idx >= self.links.len() {
            self.links.resize(idx + 1, None);
        }
        self.links[idx] = Some(link);
    }

    fn link(&self, id: NodeId) -> Option<&Link> {
        self.links.get(id.index()).and_then(Option::as_ref)
    }

    fn link_mut(&mut self, id: NodeId) -> Option<&mut Link> {
        self.links.get_mut(id.index()).and_then(Option::as_mut)
    }

    pub fn head(&self) -> NodeId {
        self.head
    }

    pub fn tail(&self) -> NodeId {
        self.tail
    }

    /// Number of members, anchors included.
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false: the two anchors are permanent.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.link(id).is_some()
    }

    pub fn next(&self, id: NodeId) -> Option<NodeId> {
        self.link(id).and_then(|l| l.next)
    }

    pub fn prev(&self, id: NodeId) -> Option<NodeId> {
        self.link(id).and_then(|l| l.prev)
    }

    pub fn key(&self, id: NodeId) -> Option<NodeKey> {
        self.link(id).map(|l| l.key)
    }

    pub fn gap(&self, id: NodeId) -> Option<Gap> {
        self.link(id).map(|l| l.gap)
    }

    /// Splices `v` in after `u`. `split` holds the totals of `[key(u), key(v))`;
    /// `u` keeps them and `v` takes over the rest of `u`'s old gap.
    pub fn add(&mut self, u: NodeId, v: NodeId, v_key: NodeKey, split: Gap) -> Result<(), AucError> {
        if self.contains(v) {
            return Err(AucError::AlreadyMember(v_key));
        }
        let (u_key, u_next, u_gap) = {
            let l = self.link(u).ok_or(AucError::NotMember(u))?;
            (l.key, l.next, l.gap)
        };
        let next = match u_next {
            Some(next) if u_key < v_key && v_key < self.link(next).expect("dangling link").key => next,
            _ => {
                return Err(AucError::KeyOrder {
                    after: u_key,
                    inserted: v_key,
                })
            }
        };
        if split.pos > u_gap.pos || split.neg > u_gap.neg {
            return Err(AucError::GapUnderflow(u_key));
        }

        let rest = Gap::new(u_gap.pos - split.pos, u_gap.neg - split.neg);
        self.put(
            v,
            Link {
                key: v_key,
                prev: Some(u),
                next: Some(next),
                gap: rest,
            },
        );
        let ul = self.link_mut(u).expect("checked above");
        ul.next = Some(v);
        ul.gap = split;
        self.link_mut(next).expect("checked above").prev = Some(v);
        self.len += 1;
        Ok(())
    }

    /// Unlinks `v` and merges its gap into its predecessor.
    pub fn remove(&mut self, v: NodeId) -> Result<Gap, AucError> {
        let link = match self.link(v) {
            Some(l) => l.clone(),
            None => return Err(AucError::NotMember(v)),
        };
        let (prev, next) = match (link.prev, link.next) {
            (Some(p), Some(n)) => (p, n),
            _ => return Err(AucError::SentinelRemoval(link.key)),
        };
        let pl = self.link_mut(prev).expect("dangling link");
        pl.next = Some(next);
        pl.gap.pos += link.gap.pos;
        pl.gap.neg += link.gap.neg;
        self.link_mut(next).expect("dangling link").prev = Some(prev);
        self.links[v.index()] = None;
        self.len -= 1;
        Ok(link.gap)
    }

    /// Adds signed deltas to a member's gap counters.
    pub fn adjust(&mut self, id: NodeId, dpos: i64, dneg: i64) -> Result<(), AucError> {
        let link = self
            .link_mut(id)
            .ok_or(AucError::NotMember(id))?;
        let pos = link.gap.pos.checked_add_signed(dpos);
        let neg = link.gap.neg.checked_add_signed(dneg);
        match (pos, neg) {
            (Some(pos), Some(neg)) => {
                link.gap = Gap::new(pos, neg);
                Ok(())
            }
            _ => Err(AucError::GapUnderflow(link.key)),
        }
    }

    /// The last member with key `<= key`, together with the summed gaps of
    /// all members before it. Linear in the list length.
    pub fn locate(&self, key: NodeKey) -> (NodeId, Gap) {
        let mut at = self.head;
        let mut before = Gap::default();
        loop {
            let link = self.link(at).expect("dangling link");
            match link.next {
                Some(next) if self.link(next).expect("dangling link").key <= key => {
                    before.pos += link.gap.pos;
                    before.neg += link.gap.neg;
                    at = next;
                }
                _ => return (at, before),
            }
        }
    }

    /// Members from head to tail.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            list: self,
            at: Some(self.head),
        }
    }

    #[cfg(test)]
    pub(crate) fn gap_mut(&mut self, id: NodeId) -> &mut Gap {
        &mut self.link_mut(id).unwrap().gap
    }
}

/// Iterator over `(member, key, gap)` in list order.
pub struct Iter<'a> {
    list: &'a WeightedList,
    at: Option<NodeId>,
}

impl Iterator for Iter<'_> {
    type Item = (NodeId, NodeKey, Gap);

    fn next(&mut self) -> Option<Self::Item> {
        let id = self.at?;
        let link = self.list.link(id).expect("dangling link");
        self.at = link.next;
        Some((id, link.key, link.gap))
    }
}
