use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

/// Index of a domain element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of an interned data value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValueId(pub u32);

/// The second component of a property pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Filler {
    Node(NodeId),
    Value(ValueId),
}

impl Filler {
    pub fn as_node(self) -> Option<NodeId> {
        match self {
            Filler::Node(n) => Some(n),
            Filler::Value(_) => None,
        }
    }
}

/// A subset of the domain.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    bits: FixedBitSet,
}

impl NodeSet {
    pub fn empty(domain_size: usize) -> Self {
        NodeSet {
            bits: FixedBitSet::with_capacity(domain_size),
        }
    }

    pub fn full(domain_size: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(domain_size);
        bits.insert_range(..);
        NodeSet { bits }
    }

    pub fn from_nodes(domain_size: usize, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut set = Self::empty(domain_size);
        for n in nodes {
            set.insert(n);
        }
        set
    }

    pub fn domain_size(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, n: NodeId) -> bool {
        !self.bits.put(n.index())
    }

    pub fn remove(&mut self, n: NodeId) -> bool {
        let had = self.bits.contains(n.index());
        self.bits.set(n.index(), false);
        had
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.bits.contains(n.index())
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.bits.ones().map(|i| NodeId(i as u32))
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn intersect_with(&mut self, other: &NodeSet) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &NodeSet) {
        self.bits.difference_with(&other.bits);
    }

    pub fn complement(&self) -> NodeSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        NodeSet { bits }
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|n| n.0)).finish()
    }
}

/// A set of (node, filler) pairs with forward and backward indexes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Relation {
    forward: HashMap<NodeId, Vec<Filler>>,
    backward: HashMap<NodeId, Vec<NodeId>>,
    len: usize,
}

impl Relation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (NodeId, Filler)>) -> Self {
        let mut forward: HashMap<NodeId, Vec<Filler>> = HashMap::new();
        for (x, f) in pairs {
            forward.entry(x).or_default().push(f);
        }
        let mut backward: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        let mut len = 0;
        for (&x, fillers) in forward.iter_mut() {
            fillers.sort_unstable();
            fillers.dedup();
            len += fillers.len();
            for f in fillers.iter() {
                if let Filler::Node(y) = *f {
                    backward.entry(y).or_default().push(x);
                }
            }
        }
        for subjects in backward.values_mut() {
            subjects.sort_unstable();
        }
        Relation { forward, backward, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Distinct fillers of `x`, sorted.
    pub fn fillers(&self, x: NodeId) -> &[Filler] {
        self.forward.get(&x).map_or(&[], Vec::as_slice)
    }

    /// Subjects related to node `y`, sorted.
    pub fn subjects_of(&self, y: NodeId) -> &[NodeId] {
        self.backward.get(&y).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, x: NodeId, f: Filler) -> bool {
        self.fillers(x).binary_search(&f).is_ok()
    }

    pub fn subjects(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.forward.keys().copied()
    }

    /// Every pair, in unspecified order.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, Filler)> + '_ {
        self.forward.iter().flat_map(|(&x, fs)| fs.iter().map(move |&f| (x, f)))
    }

    /// Every pair, sorted.
    pub fn sorted_pairs(&self) -> Vec<(NodeId, Filler)> {
        let mut out: Vec<_> = self.pairs().collect();
        out.sort_unstable();
        out
    }

    pub fn has_value_fillers(&self) -> bool {
        self.pairs().any(|(_, f)| matches!(f, Filler::Value(_)))
    }
}
