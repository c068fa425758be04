//! Pruned decoder trees.

use std::fmt;

use crate::polar_code::{BitSlice, BitVec, CodeSpec};

use super::CompileError;

/// Kind of a decoder-tree node. Every kind except `RateR` is decoded
/// directly, without visiting its descendants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    /// All leaves frozen; the output is the zero vector.
    Rate0,
    /// No leaf frozen; the output is the threshold decision of the input.
    Rate1,
    /// Only the last leaf is information.
    Rep,
    /// Only the first leaf is frozen.
    Spc,
    /// Length 8, repetition left half and SPC right half.
    RepSpc,
    /// Length 4 with the first two leaves frozen.
    Ml4,
    /// Anything else; decoded through its two children.
    RateR,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NodeKind::Rate0 => "rate-0",
            NodeKind::Rate1 => "rate-1",
            NodeKind::Rep => "rep",
            NodeKind::Spc => "spc",
            NodeKind::RepSpc => "rep-spc",
            NodeKind::Ml4 => "ml",
            NodeKind::RateR => "rate-r",
        };
        f.write_str(s)
    }
}

/// Which specialized node kinds the classifier may use. Rate-0 and rate-1
/// pruning is always on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeRuleSet {
    pub rep: bool,
    /// Smallest repetition node.
    pub rep_min: usize,
    /// Largest repetition node.
    pub rep_max: usize,
    pub spc: bool,
    /// Smallest SPC node.
    pub spc_min: usize,
    pub rep_spc: bool,
    pub ml4: bool,
}

impl NodeRuleSet {
    /// Every node kind. Repetition and SPC nodes shorter than 4 are left to
    /// the rate-0/rate-1 mergers, which decode them at least as fast.
    pub const fn fast_ssc() -> Self {
        Self {
            rep: true,
            rep_min: 4,
            rep_max: 16,
            spc: true,
            spc_min: 4,
            rep_spc: true,
            ml4: true,
        }
    }

    /// Rule set for SPC length statistics: like [`NodeRuleSet::ssc`] with
    /// SPC nodes down to length 2.
    pub const fn spc_census() -> Self {
        Self {
            spc: true,
            spc_min: 2,
            ..Self::ssc()
        }
    }

    /// Rule set for repetition length statistics: like [`NodeRuleSet::ssc`]
    /// with repetition nodes from length 2 up to the usual cap of 16.
    pub const fn rep_census() -> Self {
        Self {
            rep: true,
            rep_min: 2,
            ..Self::ssc()
        }
    }

    /// Rate-0, rate-1 and length-4 ML nodes only.
    pub const fn ml_ssc() -> Self {
        Self {
            rep: false,
            spc: false,
            rep_spc: false,
            ..Self::fast_ssc()
        }
    }

    /// Rate-0 and rate-1 pruning only.
    pub const fn ssc() -> Self {
        Self {
            ml4: false,
            ..Self::ml_ssc()
        }
    }

    /// `self` with ML nodes disabled.
    pub const fn without_ml4(self) -> Self {
        Self { ml4: false, ..self }
    }

    pub const fn with_rep(self, rep: bool) -> Self {
        Self { rep, ..self }
    }

    pub const fn with_spc(self, spc: bool) -> Self {
        Self { spc, ..self }
    }

    pub const fn with_rep_spc(self, rep_spc: bool) -> Self {
        Self { rep_spc, ..self }
    }

    /// Kind of the node whose leaves have the natural-order frozen flags
    /// `frozen`.
    pub fn classify(&self, frozen: &BitSlice) -> NodeKind {
        let n = frozen.len();
        let ones = frozen.count_ones();
        if ones == n {
            return NodeKind::Rate0;
        }
        if ones == 0 {
            return NodeKind::Rate1;
        }
        if self.rep && (self.rep_min..=self.rep_max).contains(&n) && ones == n - 1 && !frozen[n - 1] {
            return NodeKind::Rep;
        }
        if self.spc && n >= self.spc_min && ones == 1 && frozen[0] {
            return NodeKind::Spc;
        }
        if self.rep_spc && n == 8 && frozen.iter_ones().eq([0, 1, 2, 4]) {
            return NodeKind::RepSpc;
        }
        if self.ml4 && n == 4 && frozen.iter_ones().eq([0, 1]) {
            return NodeKind::Ml4;
        }
        NodeKind::RateR
    }
}

impl Default for NodeRuleSet {
    fn default() -> Self {
        Self::fast_ssc()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    /// `log2` of the node length.
    pub stage: u32,
    /// Natural index of the first leaf.
    pub offset: usize,
    /// Arena indices of the left and right children of a `RateR` node.
    pub children: Option<[usize; 2]>,
}

impl Node {
    pub fn len(&self) -> usize {
        1 << self.stage
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A pruned decoder tree stored as an arena; index 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderTree {
    n_bits: u32,
    k: usize,
    p: usize,
    rules: NodeRuleSet,
    nodes: Vec<Node>,
}

/// Builds the pruned tree of `spec` under `rules` for a decoder with
/// resource parameter `p` (a power of two).
pub fn build_tree(spec: &CodeSpec, p: usize, rules: NodeRuleSet) -> Result<DecoderTree, CompileError> {
    if p == 0 || !p.is_power_of_two() {
        return Err(CompileError::InvalidP(p));
    }
    let frozen = spec.natural_frozen_mask();
    let mut nodes = Vec::new();
    grow(&frozen, 0, spec.n_bits(), &rules, &mut nodes);
    Ok(DecoderTree {
        n_bits: spec.n_bits(),
        k: spec.k(),
        p,
        rules,
        nodes,
    })
}

fn grow(frozen: &BitVec, offset: usize, stage: u32, rules: &NodeRuleSet, nodes: &mut Vec<Node>) -> usize {
    let len = 1usize << stage;
    let kind = rules.classify(&frozen[offset..offset + len]);
    let idx = nodes.len();
    nodes.push(Node {
        kind,
        stage,
        offset,
        children: None,
    });
    if kind == NodeKind::RateR {
        let l = grow(frozen, offset, stage - 1, rules, nodes);
        let r = grow(frozen, offset + len / 2, stage - 1, rules, nodes);
        nodes[idx].children = Some([l, r]);
    }
    idx
}

impl DecoderTree {
    pub fn n_bits(&self) -> u32 {
        self.n_bits
    }

    pub fn n(&self) -> usize {
        1 << self.n_bits
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn rules(&self) -> &NodeRuleSet {
        &self.rules
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    /// All nodes in depth-first (pre-order) order.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    /// Unconstrained time steps of a traversal without mergers: one step
    /// for every node's input vector and one more for each multi-bit rate-1
    /// threshold decision; leaf decisions and combinations are free.
    pub fn logical_steps(&self) -> usize {
        let alphas = self.nodes.len() - 1;
        let rate1 = self
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Rate1 && n.stage > 0)
            .count();
        alphas + rate1
    }
}
