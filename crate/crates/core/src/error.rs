use thiserror::Error;

use crate::list::Gap;
use crate::tree::{NodeId, NodeKey};

/// Errors returned by the window, tree and list operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AucError {
    #[error("score {0} is not finite")]
    NonFiniteScore(f64),

    #[error("no node with key {0:?} in the tree")]
    MissingNode(NodeKey),

    /// Removal of an entry that is not in the window.
    #[error("no {label} entry with score {score} in the window")]
    MissingEntry { score: f64, label: &'static str },

    #[error("gap counter underflow at {0:?}")]
    GapUnderflow(NodeKey),

    #[error("cannot insert {inserted:?} after {after:?}: key order violated")]
    KeyOrder { after: NodeKey, inserted: NodeKey },

    #[error("{0:?} is not a member of the list")]
    NotMember(NodeId),

    #[error("{0:?} is already a member of the list")]
    AlreadyMember(NodeKey),

    #[error("sentinel {0:?} cannot be removed from a list")]
    SentinelRemoval(NodeKey),

    #[error("invalid epsilon {0:?}: expected a non-negative decimal with at most 6 fractional digits")]
    InvalidEpsilon(String),

    #[error("window capacity must be positive")]
    ZeroCapacity,
}

/// Which weighted list a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListName {
    /// All positive nodes.
    Positive,
    /// The compressed list.
    Compressed,
}

/// First broken invariant found by a full consistency check.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantViolation {
    #[error("subtree aggregates wrong at {0:?}")]
    Aggregate(NodeKey),

    #[error("height or balance wrong at {0:?}")]
    Balance(NodeKey),

    #[error("keys out of order at {0:?}")]
    KeyOrder(NodeKey),

    #[error("{reachable} reachable nodes but {recorded} recorded")]
    NodeCount { reachable: usize, recorded: usize },

    #[error("label counts invalid at {0:?}")]
    NodeCounts(NodeKey),

    #[error("positive index does not match the positive nodes")]
    PositiveIndex,

    #[error("{0:?} list has wrong members")]
    Membership(ListName),

    #[error("{list:?} gap at {key:?} is {found:?}, expected {expected:?}")]
    GapMismatch {
        list: ListName,
        key: NodeKey,
        expected: Gap,
        found: Gap,
    },

    #[error("gap totals differ from tree totals")]
    Totals,

    #[error("compressed list gap too large after {0:?}")]
    Uncompressed(NodeKey),

    #[error("compressed list member after {0:?} is redundant")]
    Redundant(NodeKey),

    #[error("compressed list has {len} members, bound is {bound}")]
    SizeBound { len: usize, bound: f64 },

    #[error("estimate {estimate} too far from exact {exact}")]
    ErrorBound { estimate: f64, exact: f64 },
}
