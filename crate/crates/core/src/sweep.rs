//! The sweeping move: the largest function with mode `v` that descends no
//! faster than `f` along paths away from `v`, and the remainder it leaves.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::density::{DensityError, EdgeLinearDensity};
use crate::rational::Rational;
use crate::tree::{EdgePoint, MetricTree, VertexId};

/// A vertex inserted where the swept function reaches zero inside an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    pub vertex: VertexId,
    /// The edge of the input tree that was split, oriented away from the origin.
    pub from: VertexId,
    pub to: VertexId,
    /// Position of `vertex` as a fraction of the edge from `from`.
    pub t: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepResult {
    pub origin: VertexId,
    /// Input `f` on the refined tree.
    pub f_refined: EdgeLinearDensity,
    pub h: EdgeLinearDensity,
    pub remainder: EdgeLinearDensity,
    pub subdivisions: Vec<Subdivision>,
}

impl SweepResult {
    pub fn refined_tree(&self) -> &Arc<MetricTree> {
        self.f_refined.shared_tree()
    }
}

/// Sweeps `f` from `origin`.
///
/// Edges are visited in BFS order away from `origin`. Across an ascending
/// edge `h` is carried unchanged; across a descending one it drops by the
/// same amount as `f`, clamped at zero. When the clamp bites strictly inside
/// an edge a vertex is inserted there so `h` stays edge-linear.
pub fn sweep(f: &EdgeLinearDensity, origin: &VertexId) -> Result<SweepResult, DensityError> {
    let orientation = f.tree().root_at(origin)?;
    let mut tree = f.tree().clone();
    let mut fv = f.values().clone();
    let mut h: BTreeMap<VertexId, Rational> = BTreeMap::new();
    let mut subdivisions = Vec::new();

    h.insert(origin.clone(), fv[origin].clone());
    let mut children: BTreeMap<&VertexId, Vec<&VertexId>> = BTreeMap::new();
    for (p, c) in orientation.edges() {
        children.entry(p).or_default().push(c);
    }
    let mut queue: VecDeque<&VertexId> = VecDeque::from([origin]);
    while let Some(u) = queue.pop_front() {
        for &w in children.get(u).map(Vec::as_slice).unwrap_or_default() {
            let hu = h[u].clone();
            let drop = &fv[u] - &fv[w];
            let hw = if !drop.is_positive() {
                hu
            } else if hu.is_positive() && hu < drop {
                let t = &hu / &drop;
                let s = tree
                    .subdivide_in_place(&EdgePoint::new(u.clone(), w.clone(), t.clone()))
                    .map_err(DensityError::Tree)?;
                let fs = &fv[u] - &hu;
                fv.insert(s.clone(), fs);
                h.insert(s.clone(), Rational::zero());
                subdivisions.push(Subdivision {
                    vertex: s,
                    from: u.clone(),
                    to: w.clone(),
                    t,
                });
                // Past the zero crossing h stays at zero.
                Rational::zero()
            } else {
                (hu - drop).max(Rational::zero())
            };
            h.insert(w.clone(), hw);
            queue.push_back(w);
        }
    }

    let tree = Arc::new(tree);
    let remainder = fv.iter().map(|(v, x)| (v.clone(), x - &h[v])).collect();
    Ok(SweepResult {
        origin: origin.clone(),
        f_refined: EdgeLinearDensity::from_parts_unchecked(tree.clone(), fv),
        h: EdgeLinearDensity::from_parts_unchecked(tree.clone(), h),
        remainder: EdgeLinearDensity::from_parts_unchecked(tree, remainder),
        subdivisions,
    })
}

/// The `origin`-remainder `f - h`; the full [`SweepResult`] is returned so
/// callers keep the refined tree.
pub fn remainder(f: &EdgeLinearDensity, origin: &VertexId) -> Result<SweepResult, DensityError> {
    sweep(f, origin)
}
