//! Edge-linear densities: nonnegative values at vertices, interpolated
//! linearly along each edge.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, Rational};
use crate::tree::{EdgePoint, MergeRecord, MetricTree, TreeError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error("no value given for vertex {0}")]
    MissingValue(VertexId),
    #[error("value given for {0}, which is not a vertex of the tree")]
    ExtraValue(VertexId),
    #[error("negative value {1} at vertex {0}")]
    NegativeValue(VertexId, String),
    #[error("densities live on different trees")]
    TreeMismatch,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A nonnegative density, bound to one tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLinearDensity {
    tree: Arc<MetricTree>,
    values: BTreeMap<VertexId, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeWitness {
    pub mode: VertexId,
    pub max_value: Rational,
}

/// Why a density failed the unimodality test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotUnimodal {
    ZeroDensity,
    /// Oriented away from the chosen maximum, `f(child) > f(parent)`.
    Increase {
        parent: VertexId,
        child: VertexId,
    },
}

impl EdgeLinearDensity {
    pub fn new(
        tree: Arc<MetricTree>,
        values: BTreeMap<VertexId, Rational>,
    ) -> Result<Self, DensityError> {
        if let Some(extra) = values.keys().find(|v| !tree.contains(v)) {
            return Err(DensityError::ExtraValue(extra.clone()));
        }
        for v in tree.vertices() {
            match values.get(v) {
                None => return Err(DensityError::MissingValue(v.clone())),
                Some(x) if x.is_negative() => {
                    return Err(DensityError::NegativeValue(v.clone(), format_rational(x)))
                }
                Some(_) => {}
            }
        }
        Ok(EdgeLinearDensity { tree, values })
    }

    /// Pairs `tree.vertices()` (lexicographic order) with `values`.
    pub fn from_ordered(
        tree: Arc<MetricTree>,
        values: Vec<Rational>,
    ) -> Result<Self, DensityError> {
        let ids: Vec<VertexId> = tree.vertices().cloned().collect();
        if let Some(v) = ids.get(values.len()) {
            return Err(DensityError::MissingValue(v.clone()));
        }
        let map = ids.into_iter().zip(values).collect();
        EdgeLinearDensity::new(tree, map)
    }

    pub fn zero(tree: Arc<MetricTree>) -> Self {
        let values = tree
            .vertices()
            .map(|v| (v.clone(), Rational::zero()))
            .collect();
        EdgeLinearDensity { tree, values }
    }

    pub(crate) fn from_parts_unchecked(
        tree: Arc<MetricTree>,
        values: BTreeMap<VertexId, Rational>,
    ) -> Self {
        debug_assert!(tree.vertices().eq(values.keys()));
        EdgeLinearDensity { tree, values }
    }

    pub fn tree(&self) -> &MetricTree {
        &self.tree
    }

    pub fn shared_tree(&self) -> &Arc<MetricTree> {
        &self.tree
    }

    pub fn values(&self) -> &BTreeMap<VertexId, Rational> {
        &self.values
    }

    pub fn into_values(self) -> BTreeMap<VertexId, Rational> {
        self.values
    }

    /// Value at a vertex; panics if `v` is not in the tree.
    pub fn at(&self, v: &VertexId) -> &Rational {
        &self.values[v]
    }

    pub fn get(&self, v: &VertexId) -> Option<&Rational> {
        self.values.get(v)
    }

    pub fn same_tree(&self, other: &EdgeLinearDensity) -> bool {
        Arc::ptr_eq(&self.tree, &other.tree) || self.tree == other.tree
    }

    /// `(1 - t) f(u) + t f(w)`.
    pub fn value_at(&self, p: &EdgePoint) -> Result<Rational, DensityError> {
        if self.tree.edge_length(&p.u, &p.w).is_none() {
            return Err(TreeError::UnknownEdge(p.u.clone(), p.w.clone()).into());
        }
        if p.t.is_negative() || p.t > Rational::one() {
            return Err(TreeError::EndpointSubdivision(format_rational(&p.t)).into());
        }
        Ok(interpolate(&self.values[&p.u], &self.values[&p.w], &p.t))
    }

    pub fn support_is_empty(&self) -> bool {
        self.values.values().all(Zero::is_zero)
    }

    /// Sum of the vertex values.
    pub fn mass(&self) -> Rational {
        self.values
            .values()
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn max_value(&self) -> Rational {
        self.values
            .values()
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Smallest id attaining the maximum value.
    pub fn argmax(&self) -> &VertexId {
        let max = self.values.values().max().expect("trees are nonempty");
        self.values
            .iter()
            .find(|(_, x)| *x == max)
            .map(|(v, _)| v)
            .unwrap()
    }

    /// Passes iff `f` is non-increasing along every edge oriented away from
    /// its (lexicographically first) global maximum.
    pub fn is_unimodal(&self) -> Result<ModeWitness, NotUnimodal> {
        if self.support_is_empty() {
            return Err(NotUnimodal::ZeroDensity);
        }
        let mode = self.argmax().clone();
        let orientation = self.tree.root_at(&mode).expect("argmax is a vertex");
        for (parent, child) in orientation.edges() {
            if self.values[child] > self.values[parent] {
                return Err(NotUnimodal::Increase {
                    parent: parent.clone(),
                    child: child.clone(),
                });
            }
        }
        let max_value = self.values[&mode].clone();
        Ok(ModeWitness { mode, max_value })
    }

    /// Whether `f` is non-increasing away from `mode`, i.e. unimodal with a
    /// maximum plateau containing `mode`. The zero density passes trivially.
    pub fn non_increasing_from(&self, mode: &VertexId) -> Result<bool, DensityError> {
        let orientation = self.tree.root_at(mode)?;
        let ok = orientation
            .edges()
            .all(|(p, c)| self.values[c] <= self.values[p]);
        Ok(ok)
    }

    /// Re-expresses `f` on a subdivision of its tree. `p` is a point of the
    /// current tree and the new vertex receives the interpolated value.
    pub fn subdivide(&self, p: &EdgePoint) -> Result<(EdgeLinearDensity, VertexId), DensityError> {
        let value = self.value_at(p)?;
        let (tree, s) = self.tree.subdivide(p)?;
        let mut values = self.values.clone();
        values.insert(s.clone(), value);
        Ok((
            EdgeLinearDensity {
                tree: Arc::new(tree),
                values,
            },
            s,
        ))
    }

    /// Contracts every edge whose endpoints carry equal values until none is
    /// left. The records, replayed in reverse, restore the input tree.
    pub fn normalize(&self) -> (EdgeLinearDensity, Vec<MergeRecord>) {
        let mut tree = (*self.tree).clone();
        let mut values = self.values.clone();
        let mut records = Vec::new();
        loop {
            let constant = tree
                .edges()
                .find(|(u, w, _)| values[*u] == values[*w])
                .map(|(u, w, _)| (u.clone(), w.clone()));
            let Some((u, w)) = constant else { break };
            let record = tree.contract_in_place(&u, &w).expect("edge exists");
            values.remove(&record.removed);
            records.push(record);
        }
        let tree = if records.is_empty() {
            self.tree.clone()
        } else {
            Arc::new(tree)
        };
        (EdgeLinearDensity { tree, values }, records)
    }

    /// Lifts a density on a contracted tree back through `records` (as
    /// returned by [`EdgeLinearDensity::normalize`]); each removed vertex
    /// takes the value of the vertex it was merged into.
    pub fn lift(&self, records: &[MergeRecord]) -> Result<EdgeLinearDensity, DensityError> {
        let mut tree = (*self.tree).clone();
        let mut values = self.values.clone();
        for record in records.iter().rev() {
            tree.expand_in_place(record)?;
            let value = values[&record.survivor].clone();
            values.insert(record.removed.clone(), value);
        }
        Ok(EdgeLinearDensity {
            tree: Arc::new(tree),
            values,
        })
    }

    /// Scales every value by `c`.
    pub fn scaled(&self, c: &Rational) -> EdgeLinearDensity {
        let values = self
            .values
            .iter()
            .map(|(v, x)| (v.clone(), x * c))
            .collect();
        EdgeLinearDensity {
            tree: self.tree.clone(),
            values,
        }
    }
}

pub(crate) fn interpolate(a: &Rational, b: &Rational, t: &Rational) -> Rational {
    a + (b - a) * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn v(s: &str) -> VertexId {
        VertexId::new(s)
    }

    pub(crate) fn path_density(values: &[i64]) -> EdgeLinearDensity {
        let ids: Vec<String> = (1..=values.len()).map(|i| format!("v{i}")).collect();
        let tree = Arc::new(MetricTree::path(&ids).unwrap());
        let map = ids
            .iter()
            .zip(values)
            .map(|(id, x)| (v(id), int(*x)))
            .collect();
        EdgeLinearDensity::new(tree, map).unwrap()
    }

    fn star(center: i64, leaves: [i64; 3]) -> EdgeLinearDensity {
        let tree = MetricTree::new(
            ["C", "X", "Y", "Z"].map(v),
            ["X", "Y", "Z"].map(|l| (v("C"), v(l), int(1))),
        )
        .unwrap();
        let values = BTreeMap::from([
            (v("C"), int(center)),
            (v("X"), int(leaves[0])),
            (v("Y"), int(leaves[1])),
            (v("Z"), int(leaves[2])),
        ]);
        EdgeLinearDensity::new(Arc::new(tree), values).unwrap()
    }

    #[test]
    fn value_at_examples() {
        let tree = Arc::new(MetricTree::path(&["A", "B"]).unwrap());
        let f = EdgeLinearDensity::from_ordered(tree.clone(), vec![int(2), int(0)]).unwrap();
        assert_eq!(
            f.value_at(&EdgePoint::new("A", "B", ratio(2, 3))).unwrap(),
            ratio(2, 3)
        );
        assert_eq!(
            f.value_at(&EdgePoint::new("A", "B", int(0))).unwrap(),
            int(2)
        );
        assert_eq!(
            f.value_at(&EdgePoint::new("B", "A", ratio(1, 4))).unwrap(),
            ratio(1, 2)
        );
        let c = EdgeLinearDensity::from_ordered(tree, vec![int(5), int(5)]).unwrap();
        for t in [ratio(1, 7), ratio(1, 2), int(1)] {
            assert_eq!(c.value_at(&EdgePoint::new("A", "B", t)).unwrap(), int(5));
        }
        assert!(matches!(
            c.value_at(&EdgePoint::new("A", "Q", ratio(1, 2))),
            Err(DensityError::Tree(TreeError::UnknownEdge(..)))
        ));
    }

    #[test]
    fn construction_errors() {
        let tree = Arc::new(MetricTree::path(&["A", "B"]).unwrap());
        let missing = EdgeLinearDensity::new(tree.clone(), BTreeMap::from([(v("A"), int(1))]));
        assert_eq!(missing, Err(DensityError::MissingValue(v("B"))));
        let negative = EdgeLinearDensity::from_ordered(tree.clone(), vec![int(1), int(-1)]);
        assert!(matches!(negative, Err(DensityError::NegativeValue(..))));
        let extra = EdgeLinearDensity::new(
            tree,
            BTreeMap::from([(v("A"), int(1)), (v("B"), int(1)), (v("Q"), int(1))]),
        );
        assert_eq!(extra, Err(DensityError::ExtraValue(v("Q"))));
    }

    #[test]
    fn is_unimodal_examples() {
        let w = path_density(&[1, 2, 1]).is_unimodal().unwrap();
        assert_eq!(
            w,
            ModeWitness {
                mode: v("v2"),
                max_value: int(2)
            }
        );

        match path_density(&[1, 2, 1, 2, 1]).is_unimodal() {
            Err(NotUnimodal::Increase { parent, child }) => {
                let edge = (parent.as_str(), child.as_str());
                assert!(edge == ("v3", "v4") || edge == ("v2", "v3"), "{edge:?}");
            }
            other => panic!("{other:?}"),
        }

        let w = star(2, [1, 1, 1]).is_unimodal().unwrap();
        assert_eq!(w.mode, v("C"));
        assert_eq!(
            path_density(&[0, 0]).is_unimodal(),
            Err(NotUnimodal::ZeroDensity)
        );
    }

    #[test]
    fn plateaus_and_zero_gaps() {
        assert!(path_density(&[2, 2, 1]).is_unimodal().is_ok());
        assert!(path_density(&[1, 2, 2, 1]).is_unimodal().is_ok());
        assert!(path_density(&[2, 1, 2]).is_unimodal().is_err());
        assert!(path_density(&[1, 0, 1]).is_unimodal().is_err());
        assert!(path_density(&[0, 0, 3, 0]).is_unimodal().is_ok());
    }

    #[test]
    fn normalize_examples() {
        let (g, records) = path_density(&[1, 2, 2, 1]).normalize();
        assert_eq!(records.len(), 1);
        assert_eq!(
            g.values().values().cloned().collect::<Vec<_>>(),
            vec![int(1), int(2), int(1)]
        );

        let f = path_density(&[1, 2, 1]);
        let (g, records) = f.normalize();
        assert!(records.is_empty());
        assert_eq!(g, f);

        let (g, records) = star(3, [3, 3, 3]).normalize();
        assert_eq!(records.len(), 3);
        assert_eq!(g.tree().vertex_count(), 1);
        assert_eq!(g.values().values().next(), Some(&int(3)));
    }

    #[test]
    fn lift_undoes_normalize() {
        let f = path_density(&[1, 2, 2, 2, 0, 0, 3]);
        let (g, records) = f.normalize();
        assert_eq!(g.tree().vertex_count(), 4);
        assert_eq!(g.lift(&records).unwrap(), f);
    }

    #[test]
    fn support_is_empty_examples() {
        assert!(path_density(&[0]).support_is_empty());
        assert!(!path_density(&[0, 1, 0]).support_is_empty());
        assert!(star(0, [0, 0, 0]).support_is_empty());
    }

    #[test]
    fn subdivide_interpolates() {
        let f = path_density(&[3, 0]);
        let (g, s) = f
            .subdivide(&EdgePoint::new("v1", "v2", ratio(1, 3)))
            .unwrap();
        assert_eq!(g.at(&s), &int(2));
        assert_eq!(g.tree().vertex_count(), 3);
    }
}
