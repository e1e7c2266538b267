//! Immutable finite metric trees.
//!
//! A [`MetricTree`] is validated on construction and never mutated afterwards;
//! every transform (`subdivide`, `contract_edge`) returns a fresh tree. Vertex
//! ids are ordered lexicographically and that order drives every traversal, so
//! all downstream tie-breaks are reproducible.
//!
//! Vertices created by subdivision are named `_s<N>`, where `N` comes from a
//! per-tree counter that only ever grows. User-supplied ids may not start with
//! `_`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, Rational};

const SYNTHETIC_PREFIX: &str = "_s";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(id: impl Into<String>) -> Self {
        VertexId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn synthetic(n: u64) -> Self {
        VertexId(format!("{SYNTHETIC_PREFIX}{n}"))
    }

    /// The counter value of a `_s<N>` id.
    pub fn synthetic_index(&self) -> Option<u64> {
        let digits = self.0.strip_prefix(SYNTHETIC_PREFIX)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        digits.parse().ok()
    }

    pub fn is_synthetic(&self) -> bool {
        self.synthetic_index().is_some()
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree has no vertices")]
    Empty,
    #[error("duplicate vertex id {0}")]
    DuplicateVertexId(VertexId),
    #[error("vertex id {0:?} is invalid (the '_' prefix is reserved for generated vertices)")]
    InvalidVertexId(String),
    #[error("edge {0}-{1} references unknown vertex {2}")]
    UnknownEndpoint(VertexId, VertexId, VertexId),
    #[error("edge {0}-{1} has non-positive length {2}")]
    NonPositiveLength(VertexId, VertexId, String),
    #[error("edge {0}-{1} closes a cycle")]
    CycleDetected(VertexId, VertexId),
    #[error("tree is disconnected: {0} is unreachable from {1}")]
    Disconnected(VertexId, VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("no edge between {0} and {1}")]
    UnknownEdge(VertexId, VertexId),
    #[error("subdivision parameter {0} is not strictly between 0 and 1")]
    EndpointSubdivision(String),
}

/// A point on an edge, `t` measured as a fraction of the edge length from `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePoint {
    pub u: VertexId,
    pub w: VertexId,
    pub t: Rational,
}

impl EdgePoint {
    pub fn new(u: impl Into<VertexId>, w: impl Into<VertexId>, t: Rational) -> Self {
        EdgePoint {
            u: u.into(),
            w: w.into(),
            t,
        }
    }
}

/// A rooting of a tree: parent pointers toward `root` plus the BFS visit order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    pub root: VertexId,
    pub parent: BTreeMap<VertexId, VertexId>,
    /// Vertices in BFS order, root first, children in lexicographic order.
    pub order: Vec<VertexId>,
}

impl Orientation {
    /// Oriented edges `(parent, child)` in BFS order of the child.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId)> + '_ {
        self.order[1..].iter().map(move |w| (&self.parent[w], w))
    }
}

/// What `contract_edge` removed, enough to put it back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeRecord {
    pub survivor: VertexId,
    pub removed: VertexId,
    pub length: Rational,
    /// Edges of `removed` other than the contracted one, re-hung on `survivor`.
    pub moved_edges: Vec<(VertexId, Rational)>,
}

/// Unordered edge key, smaller id first.
pub(crate) fn edge_key(a: &VertexId, b: &VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricTree {
    adjacency: BTreeMap<VertexId, BTreeSet<VertexId>>,
    lengths: BTreeMap<(VertexId, VertexId), Rational>,
    next_synthetic: u64,
}

impl MetricTree {
    /// Builds and validates a tree. Ids must be plain identifiers or `_s<N>`.
    pub fn new<I, E>(vertices: I, edges: E) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId, Rational)>,
    {
        let vertices: Vec<VertexId> = vertices.into_iter().collect();
        let edges: Vec<(VertexId, VertexId, Rational)> = edges.into_iter().collect();
        validate(&vertices, &edges)?;

        let mut adjacency: BTreeMap<VertexId, BTreeSet<VertexId>> = vertices
            .iter()
            .map(|v| (v.clone(), BTreeSet::new()))
            .collect();
        let mut lengths = BTreeMap::new();
        for (u, w, len) in edges {
            adjacency.get_mut(&u).unwrap().insert(w.clone());
            adjacency.get_mut(&w).unwrap().insert(u.clone());
            lengths.insert(edge_key(&u, &w), len);
        }
        let next_synthetic = vertices
            .iter()
            .filter_map(VertexId::synthetic_index)
            .max()
            .map_or(0, |n| n + 1);
        Ok(MetricTree {
            adjacency,
            lengths,
            next_synthetic,
        })
    }

    /// Convenience constructor for a path with unit edge lengths.
    pub fn path<S: AsRef<str>>(ids: &[S]) -> Result<Self, TreeError> {
        let vertices = ids.iter().map(|s| VertexId::new(s.as_ref()));
        let edges = ids.windows(2).map(|pair| {
            (
                VertexId::new(pair[0].as_ref()),
                VertexId::new(pair[1].as_ref()),
                Rational::one(),
            )
        });
        MetricTree::new(vertices, edges)
    }

    pub fn single(id: impl Into<VertexId>) -> Self {
        MetricTree::new([id.into()], []).expect("a single vertex is a tree")
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.lengths.len()
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> + '_ {
        self.adjacency.keys()
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.adjacency.contains_key(v)
    }

    /// Edges as `(smaller id, larger id, length)`.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId, &Rational)> + '_ {
        self.lengths.iter().map(|((u, w), len)| (u, w, len))
    }

    pub fn neighbors(&self, v: &VertexId) -> Result<&BTreeSet<VertexId>, TreeError> {
        self.adjacency
            .get(v)
            .ok_or_else(|| TreeError::UnknownVertex(v.clone()))
    }

    pub fn degree(&self, v: &VertexId) -> usize {
        self.adjacency.get(v).map_or(0, BTreeSet::len)
    }

    pub fn edge_length(&self, u: &VertexId, w: &VertexId) -> Option<&Rational> {
        self.lengths.get(&edge_key(u, w))
    }

    pub fn total_length(&self) -> Rational {
        self.lengths
            .values()
            .fold(Rational::zero(), |acc, l| acc + l)
    }

    /// The id the next subdivision will use.
    pub fn next_synthetic_id(&self) -> VertexId {
        VertexId::synthetic(self.next_synthetic)
    }

    pub fn root_at(&self, root: &VertexId) -> Result<Orientation, TreeError> {
        if !self.contains(root) {
            return Err(TreeError::UnknownVertex(root.clone()));
        }
        let mut parent = BTreeMap::new();
        let mut order = Vec::with_capacity(self.vertex_count());
        let mut queue = VecDeque::from([root.clone()]);
        while let Some(u) = queue.pop_front() {
            for w in &self.adjacency[&u] {
                if w != root && !parent.contains_key(w) {
                    parent.insert(w.clone(), u.clone());
                    queue.push_back(w.clone());
                }
            }
            order.push(u);
        }
        Ok(Orientation {
            root: root.clone(),
            parent,
            order,
        })
    }

    /// Splits the edge at `p`, returning the new tree and the new vertex.
    pub fn subdivide(&self, p: &EdgePoint) -> Result<(MetricTree, VertexId), TreeError> {
        let mut tree = self.clone();
        let s = tree.subdivide_in_place(p)?;
        Ok((tree, s))
    }

    pub(crate) fn subdivide_in_place(&mut self, p: &EdgePoint) -> Result<VertexId, TreeError> {
        if !p.t.is_positive() || p.t >= Rational::one() {
            return Err(TreeError::EndpointSubdivision(format_rational(&p.t)));
        }
        let key = edge_key(&p.u, &p.w);
        let len = self
            .lengths
            .remove(&key)
            .ok_or_else(|| TreeError::UnknownEdge(p.u.clone(), p.w.clone()))?;
        let s = VertexId::synthetic(self.next_synthetic);
        self.next_synthetic += 1;

        let near = &len * &p.t;
        let far = &len - &near;
        self.adjacency.get_mut(&p.u).unwrap().remove(&p.w);
        self.adjacency.get_mut(&p.w).unwrap().remove(&p.u);
        self.adjacency.get_mut(&p.u).unwrap().insert(s.clone());
        self.adjacency.get_mut(&p.w).unwrap().insert(s.clone());
        self.adjacency
            .insert(s.clone(), BTreeSet::from([p.u.clone(), p.w.clone()]));
        self.lengths.insert(edge_key(&p.u, &s), near);
        self.lengths.insert(edge_key(&s, &p.w), far);
        Ok(s)
    }

    /// Merges the endpoints of `u`–`w` into the lexicographically smaller one.
    pub fn contract_edge(
        &self,
        u: &VertexId,
        w: &VertexId,
    ) -> Result<(MetricTree, MergeRecord), TreeError> {
        let mut tree = self.clone();
        let record = tree.contract_in_place(u, w)?;
        Ok((tree, record))
    }

    pub(crate) fn contract_in_place(
        &mut self,
        u: &VertexId,
        w: &VertexId,
    ) -> Result<MergeRecord, TreeError> {
        let key = edge_key(u, w);
        let length = self
            .lengths
            .remove(&key)
            .ok_or_else(|| TreeError::UnknownEdge(u.clone(), w.clone()))?;
        let (survivor, removed) = key;
        let removed_nbrs = self.adjacency.remove(&removed).unwrap();
        self.adjacency.get_mut(&survivor).unwrap().remove(&removed);

        let mut moved_edges = Vec::new();
        for x in removed_nbrs.into_iter().filter(|x| *x != survivor) {
            let len = self.lengths.remove(&edge_key(&removed, &x)).unwrap();
            let nbrs = self.adjacency.get_mut(&x).unwrap();
            nbrs.remove(&removed);
            nbrs.insert(survivor.clone());
            self.adjacency.get_mut(&survivor).unwrap().insert(x.clone());
            self.lengths.insert(edge_key(&survivor, &x), len.clone());
            moved_edges.push((x, len));
        }
        Ok(MergeRecord {
            survivor,
            removed,
            length,
            moved_edges,
        })
    }

    /// Undoes a contraction recorded by [`MetricTree::contract_edge`].
    pub fn expand(&self, record: &MergeRecord) -> Result<MetricTree, TreeError> {
        let mut tree = self.clone();
        tree.expand_in_place(record)?;
        Ok(tree)
    }

    pub(crate) fn expand_in_place(&mut self, record: &MergeRecord) -> Result<(), TreeError> {
        let MergeRecord {
            survivor,
            removed,
            length,
            moved_edges,
        } = record;
        if !self.contains(survivor) {
            return Err(TreeError::UnknownVertex(survivor.clone()));
        }
        if self.contains(removed) {
            return Err(TreeError::DuplicateVertexId(removed.clone()));
        }
        for (x, _) in moved_edges {
            if self.lengths.remove(&edge_key(survivor, x)).is_none() {
                return Err(TreeError::UnknownEdge(survivor.clone(), x.clone()));
            }
            self.adjacency.get_mut(survivor).unwrap().remove(x);
            self.adjacency.get_mut(x).unwrap().remove(survivor);
        }
        let mut nbrs = BTreeSet::from([survivor.clone()]);
        for (x, len) in moved_edges {
            nbrs.insert(x.clone());
            self.adjacency.get_mut(x).unwrap().insert(removed.clone());
            self.lengths.insert(edge_key(removed, x), len.clone());
        }
        self.adjacency
            .get_mut(survivor)
            .unwrap()
            .insert(removed.clone());
        self.adjacency.insert(removed.clone(), nbrs);
        self.lengths
            .insert(edge_key(survivor, removed), length.clone());
        Ok(())
    }

    /// Number of edges on the path from `from` to every vertex.
    pub fn hop_distances(&self, from: &VertexId) -> Result<BTreeMap<VertexId, usize>, TreeError> {
        let orientation = self.root_at(from)?;
        let mut dist = BTreeMap::from([(from.clone(), 0usize)]);
        for (p, c) in orientation.edges() {
            let d = dist[p] + 1;
            dist.insert(c.clone(), d);
        }
        Ok(dist)
    }
}

fn id_is_acceptable(id: &VertexId) -> bool {
    let s = id.as_str();
    !s.is_empty() && (!s.starts_with('_') || id.is_synthetic())
}

/// Checks the tree invariants on raw parts, reporting the first violation.
pub fn validate(
    vertices: &[VertexId],
    edges: &[(VertexId, VertexId, Rational)],
) -> Result<(), TreeError> {
    if vertices.is_empty() {
        return Err(TreeError::Empty);
    }
    let mut index = BTreeMap::new();
    for (i, v) in vertices.iter().enumerate() {
        if !id_is_acceptable(v) {
            return Err(TreeError::InvalidVertexId(v.as_str().to_string()));
        }
        if index.insert(v.clone(), i).is_some() {
            return Err(TreeError::DuplicateVertexId(v.clone()));
        }
    }
    let mut components = UnionFind::new(vertices.len());
    for (u, w, len) in edges {
        for end in [u, w] {
            if !index.contains_key(end) {
                return Err(TreeError::UnknownEndpoint(
                    u.clone(),
                    w.clone(),
                    end.clone(),
                ));
            }
        }
        if !len.is_positive() {
            return Err(TreeError::NonPositiveLength(
                u.clone(),
                w.clone(),
                format_rational(len),
            ));
        }
        if !components.union(index[u], index[w]) {
            return Err(TreeError::CycleDetected(u.clone(), w.clone()));
        }
    }
    let root = components.find(0);
    if let Some(v) = (1..vertices.len()).find(|&i| components.find(i) != root) {
        return Err(TreeError::Disconnected(
            vertices[v].clone(),
            vertices[0].clone(),
        ));
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False when `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn v(s: &str) -> VertexId {
        VertexId::new(s)
    }

    fn star() -> MetricTree {
        MetricTree::new(
            ["C", "X", "Y", "Z"].map(v),
            ["X", "Y", "Z"].map(|l| (v("C"), v(l), int(1))),
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(MetricTree::path(&["A", "B", "C"]).is_ok());
        let triangle = MetricTree::new(
            ["A", "B", "C"].map(v),
            [
                (v("A"), v("B"), int(1)),
                (v("B"), v("C"), int(1)),
                (v("C"), v("A"), int(1)),
            ],
        );
        assert!(matches!(triangle, Err(TreeError::CycleDetected(..))));
        let flat = MetricTree::new(["A", "B"].map(v), [(v("A"), v("B"), int(0))]);
        assert!(matches!(flat, Err(TreeError::NonPositiveLength(..))));
    }

    #[test]
    fn validate_other_violations() {
        let dup = MetricTree::new(["A", "A"].map(v), []);
        assert_eq!(dup, Err(TreeError::DuplicateVertexId(v("A"))));
        let split = MetricTree::new(["A", "B", "C"].map(v), [(v("A"), v("B"), int(1))]);
        assert_eq!(split, Err(TreeError::Disconnected(v("C"), v("A"))));
        let ghost = MetricTree::new(["A"].map(v), [(v("A"), v("Q"), int(1))]);
        assert!(matches!(ghost, Err(TreeError::UnknownEndpoint(_, _, q)) if q == v("Q")));
        let reserved = MetricTree::new([v("_x")], []);
        assert!(matches!(reserved, Err(TreeError::InvalidVertexId(_))));
        let negative = MetricTree::new(["A", "B"].map(v), [(v("A"), v("B"), int(-2))]);
        assert!(matches!(negative, Err(TreeError::NonPositiveLength(..))));
        assert_eq!(MetricTree::new([], []), Err(TreeError::Empty));
        let self_loop = MetricTree::new(["A"].map(v), [(v("A"), v("A"), int(1))]);
        assert!(matches!(self_loop, Err(TreeError::CycleDetected(..))));
    }

    #[test]
    fn synthetic_ids_continue_the_counter() {
        let t = MetricTree::new(
            [v("A"), v("_s4"), v("B")],
            [(v("A"), v("_s4"), int(1)), (v("_s4"), v("B"), int(1))],
        )
        .unwrap();
        assert_eq!(t.next_synthetic_id(), v("_s5"));
        assert_eq!(v("_s12").synthetic_index(), Some(12));
        assert_eq!(v("_sx").synthetic_index(), None);
    }

    #[test]
    fn root_at_examples() {
        let path = MetricTree::path(&["A", "B", "C"]).unwrap();
        let o = path.root_at(&v("B")).unwrap();
        assert_eq!(
            o.parent,
            BTreeMap::from([(v("A"), v("B")), (v("C"), v("B"))])
        );
        assert_eq!(o.order, vec![v("B"), v("A"), v("C")]);
        let o = path.root_at(&v("A")).unwrap();
        assert_eq!(
            o.parent,
            BTreeMap::from([(v("B"), v("A")), (v("C"), v("B"))])
        );
        let single = MetricTree::single("A");
        assert!(single.root_at(&v("A")).unwrap().parent.is_empty());
        assert_eq!(path.root_at(&v("Q")), Err(TreeError::UnknownVertex(v("Q"))));
    }

    #[test]
    fn subdivide_examples() {
        let t = MetricTree::new(["A", "B"].map(v), [(v("A"), v("B"), int(3))]).unwrap();
        let (t2, s) = t.subdivide(&EdgePoint::new("A", "B", ratio(2, 3))).unwrap();
        assert_eq!(s, v("_s0"));
        assert_eq!(t2.edge_length(&v("A"), &s), Some(&int(2)));
        assert_eq!(t2.edge_length(&s, &v("B")), Some(&int(1)));
        assert!(t2.edge_length(&v("A"), &v("B")).is_none());

        let t = MetricTree::path(&["A", "B"]).unwrap();
        let (t1, s0) = t.subdivide(&EdgePoint::new("A", "B", ratio(1, 2))).unwrap();
        let (t2, s1) = t1
            .subdivide(&EdgePoint::new(v("A"), s0.clone(), ratio(1, 2)))
            .unwrap();
        assert_eq!(s1, v("_s1"));
        assert_eq!(t2.edge_length(&v("A"), &s1), Some(&ratio(1, 4)));
        assert_eq!(t2.edge_length(&s1, &s0), Some(&ratio(1, 4)));
        assert_eq!(t2.edge_length(&s0, &v("B")), Some(&ratio(1, 2)));

        let zero = t.subdivide(&EdgePoint::new("A", "B", int(0)));
        assert!(matches!(zero, Err(TreeError::EndpointSubdivision(_))));
        let one = t.subdivide(&EdgePoint::new("A", "B", int(1)));
        assert!(matches!(one, Err(TreeError::EndpointSubdivision(_))));
        let missing = t.subdivide(&EdgePoint::new("A", "C", ratio(1, 2)));
        assert!(matches!(missing, Err(TreeError::UnknownEdge(..))));
    }

    #[test]
    fn subdivide_measures_from_u_in_either_storage_order() {
        let t = MetricTree::new(["A", "B"].map(v), [(v("A"), v("B"), int(4))]).unwrap();
        let (t2, s) = t.subdivide(&EdgePoint::new("B", "A", ratio(1, 4))).unwrap();
        assert_eq!(t2.edge_length(&v("B"), &s), Some(&int(1)));
        assert_eq!(t2.edge_length(&s, &v("A")), Some(&int(3)));
    }

    #[test]
    fn contract_examples() {
        let path = MetricTree::path(&["A", "B", "C"]).unwrap();
        let (t, rec) = path.contract_edge(&v("C"), &v("B")).unwrap();
        assert_eq!(t, MetricTree::path(&["A", "B"]).unwrap());
        assert_eq!(rec.survivor, v("B"));
        assert_eq!(t.expand(&rec).unwrap(), path);

        let (t, _) = star().contract_edge(&v("C"), &v("X")).unwrap();
        let expected = MetricTree::new(
            ["C", "Y", "Z"].map(v),
            ["Y", "Z"].map(|l| (v("C"), v(l), int(1))),
        )
        .unwrap();
        assert_eq!(t, expected);

        let (t, _) = MetricTree::path(&["A", "B"])
            .unwrap()
            .contract_edge(&v("A"), &v("B"))
            .unwrap();
        assert_eq!(t, MetricTree::single("A"));

        assert!(matches!(
            path.contract_edge(&v("A"), &v("C")),
            Err(TreeError::UnknownEdge(..))
        ));
    }

    #[test]
    fn contracting_toward_a_hub_moves_its_edges() {
        // X is lexicographically larger than C, so C survives and inherits nothing;
        // contracting A-C makes A survive and inherit C's other edges.
        let t = MetricTree::new(
            ["A", "C", "X", "Y"].map(v),
            [
                (v("A"), v("C"), int(2)),
                (v("C"), v("X"), int(3)),
                (v("C"), v("Y"), ratio(1, 2)),
            ],
        )
        .unwrap();
        let (c, rec) = t.contract_edge(&v("C"), &v("A")).unwrap();
        assert_eq!(rec.survivor, v("A"));
        assert_eq!(c.edge_length(&v("A"), &v("X")), Some(&int(3)));
        assert_eq!(c.edge_length(&v("A"), &v("Y")), Some(&ratio(1, 2)));
        assert_eq!(c.expand(&rec).unwrap(), t);
    }

    #[test]
    fn hop_distances_count_edges() {
        let d = star().hop_distances(&v("X")).unwrap();
        assert_eq!(d[&v("X")], 0);
        assert_eq!(d[&v("C")], 1);
        assert_eq!(d[&v("Z")], 2);
    }
}
