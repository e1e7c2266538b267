//! Locating a mode-forced vertex by pruning insignificant leaves.
//!
//! A leaf whose value does not exceed its neighbour's can always be absorbed
//! by the component covering that neighbour, so it is peeled off. Repeating
//! this to a fixpoint leaves either a single vertex (the density is unimodal)
//! or a core whose leaves all strictly exceed their neighbours. Across such
//! a leaf's core edge the density rises, so every decomposition has a
//! component peaking on the leaf's side of that edge. That side may include
//! branches pruned into the leaf, which is why the leaf itself need not be a
//! mode of every minimal decomposition.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::density::EdgeLinearDensity;
use crate::tree::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForcedError {
    #[error("the density is identically zero")]
    ZeroDensity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Unimodal { mode: VertexId },
    Forced { chosen: VertexId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneReport {
    pub surviving: BTreeSet<VertexId>,
    /// Leaves of the surviving core, lexicographic. Empty when unimodal.
    pub forced_leaves: Vec<VertexId>,
    /// Vertices removed, in removal order.
    pub pruned: Vec<VertexId>,
    pub verdict: Verdict,
}

impl PruneReport {
    pub fn chosen(&self) -> &VertexId {
        match &self.verdict {
            Verdict::Unimodal { mode } => mode,
            Verdict::Forced { chosen } => chosen,
        }
    }
}

pub fn prune_insignificant(f: &EdgeLinearDensity) -> Result<PruneReport, ForcedError> {
    prune_with_order(f, |candidates| candidates.iter().next().cloned())
}

/// Pruning with a caller-chosen pick among the currently removable leaves.
/// The surviving set does not depend on the picks.
pub fn prune_with_order<P>(f: &EdgeLinearDensity, mut pick: P) -> Result<PruneReport, ForcedError>
where
    P: FnMut(&BTreeSet<VertexId>) -> Option<VertexId>,
{
    if f.support_is_empty() {
        return Err(ForcedError::ZeroDensity);
    }
    let tree = f.tree();
    let mut nbrs: BTreeMap<VertexId, BTreeSet<VertexId>> = tree
        .vertices()
        .map(|v| (v.clone(), tree.neighbors(v).unwrap().clone()))
        .collect();

    let removable = |v: &VertexId, nbrs: &BTreeMap<VertexId, BTreeSet<VertexId>>| {
        let adj = &nbrs[v];
        adj.len() == 1 && f.at(v) <= f.at(adj.iter().next().unwrap())
    };
    let mut candidates: BTreeSet<VertexId> = nbrs
        .keys()
        .filter(|v| removable(v, &nbrs))
        .cloned()
        .collect();
    let mut pruned = Vec::new();

    while nbrs.len() > 1 {
        let Some(leaf) = pick(&candidates) else { break };
        candidates.remove(&leaf);
        let parent = nbrs.remove(&leaf).unwrap().into_iter().next().unwrap();
        nbrs.get_mut(&parent).unwrap().remove(&leaf);
        pruned.push(leaf);
        // Only the parent's status can change. With two vertices left both
        // may be candidates; removing either leaves one.
        if nbrs.len() > 1 && removable(&parent, &nbrs) {
            candidates.insert(parent);
        } else {
            candidates.remove(&parent);
        }
    }

    let surviving: BTreeSet<VertexId> = nbrs.keys().cloned().collect();
    if surviving.len() == 1 {
        // The survivor lies on the maximum plateau; report the same
        // representative `is_unimodal` would.
        let mode = f.argmax().clone();
        return Ok(PruneReport {
            surviving,
            forced_leaves: Vec::new(),
            pruned,
            verdict: Verdict::Unimodal { mode },
        });
    }
    let forced_leaves: Vec<VertexId> = nbrs
        .iter()
        .filter(|(_, adj)| adj.len() == 1)
        .map(|(v, _)| v.clone())
        .collect();
    // Highest value first, then smallest id.
    let chosen = forced_leaves
        .iter()
        .min_by(|a, b| f.at(b).cmp(f.at(a)).then_with(|| a.cmp(b)))
        .unwrap()
        .clone();
    Ok(PruneReport {
        surviving,
        forced_leaves,
        pruned,
        verdict: Verdict::Forced { chosen },
    })
}

pub fn find_forced_vertex(f: &EdgeLinearDensity) -> Result<VertexId, ForcedError> {
    Ok(prune_insignificant(f)?.chosen().clone())
}
