use std::fmt;

use super::tree::{DecoderTree, NodeKind};

/// Upper bounds of the SPC length bins; the last bin is open-ended.
pub const SPC_BINS: [usize; 3] = [8, 64, 256];
/// Upper bounds of the repetition length bins; the last bin is open-ended.
pub const REP_BINS: [usize; 2] = [8, 16];

/// Node counts of a pruned tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeStats {
    /// Every node of the pruned tree, internal ones included.
    pub total: usize,
    /// SPC nodes with length in (0, 8], (8, 64], (64, 256], (256, N].
    pub spc: [usize; 4],
    /// Repetition nodes with length in (0, 8], (8, 16], (16, N].
    pub rep: [usize; 3],
}

fn bin(len: usize, bounds: &[usize]) -> usize {
    bounds.iter().position(|&b| len <= b).unwrap_or(bounds.len())
}

pub fn node_stats(tree: &DecoderTree) -> NodeStats {
    let mut stats = NodeStats {
        total: tree.nodes().len(),
        ..NodeStats::default()
    };
    for node in tree.nodes() {
        match node.kind {
            NodeKind::Spc => stats.spc[bin(node.len(), &SPC_BINS)] += 1,
            NodeKind::Rep => stats.rep[bin(node.len(), &REP_BINS)] += 1,
            _ => {}
        }
    }
    stats
}

impl NodeStats {
    pub fn spc_total(&self) -> usize {
        self.spc.iter().sum()
    }

    pub fn rep_total(&self) -> usize {
        self.rep.iter().sum()
    }
}

impl fmt::Display for NodeStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "all={} spc(0,8]={} spc(8,64]={} spc(64,256]={} spc(256,N]={} rep(0,8]={} rep(8,16]={} rep(16,N]={}",
            self.total, self.spc[0], self.spc[1], self.spc[2], self.spc[3], self.rep[0], self.rep[1], self.rep[2]
        )
    }
}
