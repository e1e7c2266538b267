//! Validity of a decomposition, checked without reusing the producer's state.
//!
//! The input density is re-expressed on the decomposition's refined tree from
//! the edge geometry alone: every vertex the refinement added must sit inside
//! a chain replacing one original edge, and gets the value interpolated by
//! arc length along that chain.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::density::{interpolate, EdgeLinearDensity, NotUnimodal};
use crate::greedy::Decomposition;
use crate::rational::{format_rational, Rational};
use crate::tree::{edge_key, MetricTree, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("decomposition tree does not refine the input tree: {0}")]
    TreeMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentViolation {
    MissingValue(VertexId),
    Negative(VertexId),
    Zero,
    /// Oriented away from the maximum, the value increases from parent to child.
    NotUnimodal {
        parent: VertexId,
        child: VertexId,
    },
    /// The recorded mode is not on the component's maximum plateau.
    ModeNotMaximal {
        mode: VertexId,
    },
}

impl fmt::Display for ComponentViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentViolation::MissingValue(v) => write!(f, "no value at vertex {v}"),
            ComponentViolation::Negative(v) => write!(f, "negative value at vertex {v}"),
            ComponentViolation::Zero => write!(f, "identically zero"),
            ComponentViolation::NotUnimodal { parent, child } => {
                write!(f, "not unimodal: increases along {parent} -> {child}")
            }
            ComponentViolation::ModeNotMaximal { mode } => {
                write!(f, "recorded mode {mode} is not a maximum")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumMismatch {
    pub vertex: VertexId,
    pub expected: Rational,
    pub actual: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub sum_ok: bool,
    pub sum_mismatches: Vec<SumMismatch>,
    pub components: Vec<(usize, Result<(), ComponentViolation>)>,
    pub count: usize,
    pub overall: bool,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "components: {}", self.count)?;
        if self.sum_ok {
            writeln!(f, "sum: ok")?;
        } else {
            writeln!(f, "sum: FAILED")?;
            for m in &self.sum_mismatches {
                writeln!(
                    f,
                    "  vertex {}: components sum to {}, density is {}",
                    m.vertex,
                    format_rational(&m.actual),
                    format_rational(&m.expected)
                )?;
            }
        }
        for (i, status) in &self.components {
            match status {
                Ok(()) => writeln!(f, "component {i}: unimodal")?,
                Err(e) => writeln!(f, "component {i}: FAILED ({e})")?,
            }
        }
        write!(f, "overall: {}", if self.overall { "ok" } else { "FAILED" })
    }
}

/// Re-expresses `f` on `refined`, which must be `f.tree()` with some edges
/// split into chains of new degree-2 vertices.
pub fn refine_onto(
    f: &EdgeLinearDensity,
    refined: &MetricTree,
) -> Result<BTreeMap<VertexId, Rational>, CheckError> {
    let original = f.tree();
    let mismatch = |msg: String| Err(CheckError::TreeMismatch(msg));
    for v in original.vertices() {
        if !refined.contains(v) {
            return mismatch(format!("vertex {v} is missing"));
        }
    }
    let mut values: BTreeMap<VertexId, Rational> = f.values().clone();
    let mut seen_edges = BTreeSet::new();
    for u in original.vertices() {
        for first in refined.neighbors(u).unwrap() {
            let mut chain = vec![(
                first.clone(),
                refined.edge_length(u, first).unwrap().clone(),
            )];
            let mut prev = u.clone();
            let mut cur = first.clone();
            while !original.contains(&cur) {
                let nbrs = refined.neighbors(&cur).unwrap();
                if nbrs.len() != 2 {
                    return mismatch(format!("added vertex {cur} has degree {}", nbrs.len()));
                }
                let next = nbrs.iter().find(|n| **n != prev).unwrap().clone();
                let len = refined.edge_length(&cur, &next).unwrap().clone();
                chain.push((next.clone(), len));
                prev = cur;
                cur = next;
            }
            let w = cur;
            let Some(expected_len) = original.edge_length(u, &w) else {
                return mismatch(format!(
                    "{u} and {w} are joined in the refinement but not in the input"
                ));
            };
            let total = chain.iter().fold(Rational::zero(), |acc, (_, l)| acc + l);
            if &total != expected_len {
                return mismatch(format!(
                    "edge {u}-{w} has length {} in the input but {} in the refinement",
                    format_rational(expected_len),
                    format_rational(&total)
                ));
            }
            seen_edges.insert(edge_key(u, &w));
            let mut pos = Rational::zero();
            for (v, len) in &chain[..chain.len() - 1] {
                pos += len;
                let t = &pos / &total;
                values.insert(v.clone(), interpolate(f.at(u), f.at(&w), &t));
            }
        }
    }
    if seen_edges.len() != original.edge_count() {
        return mismatch("some input edge has no counterpart".to_string());
    }
    if values.len() != refined.vertex_count() {
        return mismatch("the refinement has vertices off every input edge".to_string());
    }
    Ok(values)
}

pub fn check_decomposition(
    f: &EdgeLinearDensity,
    d: &Decomposition,
) -> Result<CheckReport, CheckError> {
    let expected = refine_onto(f, &d.refined_tree)?;

    let mut sum_mismatches = Vec::new();
    for (v, want) in &expected {
        let actual = d.components.iter().fold(Rational::zero(), |acc, c| {
            acc + c.values.get(v).cloned().unwrap_or_default()
        });
        if &actual != want {
            sum_mismatches.push(SumMismatch {
                vertex: v.clone(),
                expected: want.clone(),
                actual,
            });
        }
    }

    let components: Vec<_> = d
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| (i, check_component(&d.refined_tree, &c.mode, &c.values)))
        .collect();

    let sum_ok = sum_mismatches.is_empty();
    let overall = sum_ok && components.iter().all(|(_, r)| r.is_ok());
    Ok(CheckReport {
        sum_ok,
        sum_mismatches,
        count: d.components.len(),
        components,
        overall,
    })
}

fn check_component(
    tree: &std::sync::Arc<MetricTree>,
    mode: &VertexId,
    values: &BTreeMap<VertexId, Rational>,
) -> Result<(), ComponentViolation> {
    for v in tree.vertices() {
        match values.get(v) {
            None => return Err(ComponentViolation::MissingValue(v.clone())),
            Some(x) if x.is_negative() => return Err(ComponentViolation::Negative(v.clone())),
            Some(_) => {}
        }
    }
    if !tree.contains(mode) {
        return Err(ComponentViolation::ModeNotMaximal { mode: mode.clone() });
    }
    let g = EdgeLinearDensity::new(tree.clone(), values.clone())
        .map_err(|_| ComponentViolation::MissingValue(mode.clone()))?;
    match g.is_unimodal() {
        Err(NotUnimodal::ZeroDensity) => Err(ComponentViolation::Zero),
        Err(NotUnimodal::Increase { parent, child }) => {
            Err(ComponentViolation::NotUnimodal { parent, child })
        }
        Ok(witness) if g.at(mode) != &witness.max_value => {
            Err(ComponentViolation::ModeNotMaximal { mode: mode.clone() })
        }
        Ok(_) => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::{decompose, Component};
    use crate::rational::{int, ratio};
    use std::sync::Arc;

    fn v(s: &str) -> VertexId {
        VertexId::new(s)
    }

    fn path(values: &[i64]) -> EdgeLinearDensity {
        let ids: Vec<String> = (1..=values.len()).map(|i| format!("v{i}")).collect();
        let tree = Arc::new(MetricTree::path(&ids).unwrap());
        EdgeLinearDensity::from_ordered(tree, values.iter().map(|x| int(*x)).collect()).unwrap()
    }

    fn handmade(f: &EdgeLinearDensity, comps: &[(&str, &[i64])]) -> Decomposition {
        let components = comps
            .iter()
            .map(|(mode, vals)| Component {
                mode: v(mode),
                values: f
                    .tree()
                    .vertices()
                    .cloned()
                    .zip(vals.iter().map(|x| int(*x)))
                    .collect(),
            })
            .collect();
        Decomposition {
            refined_tree: f.shared_tree().clone(),
            components,
            input_on_refined: f.clone(),
        }
    }

    #[test]
    fn producer_output_passes() {
        let f = path(&[1, 2, 1, 2, 1]);
        let (d, _) = decompose(&f).unwrap();
        let report = check_decomposition(&f, &d).unwrap();
        assert!(report.overall, "{report}");
        assert_eq!(report.count, 2);
    }

    #[test]
    fn wrong_sum_is_reported_at_the_vertex() {
        let f = path(&[1, 2, 1, 2, 1]);
        let d = handmade(&f, &[("v2", &[1, 2, 1, 0, 0]), ("v4", &[0, 0, 0, 2, 2])]);
        let report = check_decomposition(&f, &d).unwrap();
        assert!(!report.sum_ok);
        assert!(!report.overall);
        assert_eq!(report.sum_mismatches.len(), 1);
        assert_eq!(report.sum_mismatches[0].vertex, v("v5"));
        assert_eq!(report.sum_mismatches[0].actual, int(2));
        assert!(report.components.iter().all(|(_, r)| r.is_ok()));
    }

    #[test]
    fn bimodal_component_is_flagged() {
        let f = path(&[1, 2, 1, 2, 1]);
        let d = handmade(&f, &[("v2", &[1, 2, 1, 2, 1])]);
        let report = check_decomposition(&f, &d).unwrap();
        assert!(report.sum_ok);
        assert!(matches!(
            report.components[0].1,
            Err(ComponentViolation::NotUnimodal { .. })
        ));
        assert!(!report.overall);
    }

    #[test]
    fn mode_off_the_plateau_and_zero_components() {
        let f = path(&[1, 2, 1]);
        let d = handmade(&f, &[("v1", &[1, 2, 1]), ("v2", &[0, 0, 0])]);
        let report = check_decomposition(&f, &d).unwrap();
        assert_eq!(
            report.components[0].1,
            Err(ComponentViolation::ModeNotMaximal { mode: v("v1") })
        );
        assert_eq!(report.components[1].1, Err(ComponentViolation::Zero));
    }

    #[test]
    fn foreign_tree_is_a_mismatch() {
        let f = path(&[1, 2, 1]);
        let other = Arc::new(MetricTree::path(&["a", "b", "c"]).unwrap());
        let g = EdgeLinearDensity::from_ordered(other, vec![int(1), int(2), int(1)]).unwrap();
        let (d, _) = decompose(&g).unwrap();
        assert!(matches!(
            check_decomposition(&f, &d),
            Err(CheckError::TreeMismatch(_))
        ));
    }

    #[test]
    fn refinement_interpolates_by_length() {
        let tree =
            Arc::new(MetricTree::new(["A", "B"].map(v), [(v("A"), v("B"), int(4))]).unwrap());
        let f = EdgeLinearDensity::from_ordered(tree.clone(), vec![int(8), int(0)]).unwrap();
        let (t1, s0) = tree
            .subdivide(&crate::tree::EdgePoint::new("A", "B", ratio(1, 4)))
            .unwrap();
        let (t2, s1) = t1
            .subdivide(&crate::tree::EdgePoint::new(
                s0.clone(),
                v("B"),
                ratio(1, 3),
            ))
            .unwrap();
        let values = refine_onto(&f, &t2).unwrap();
        assert_eq!(values[&s0], int(6));
        assert_eq!(values[&s1], int(4));

        let stretched = MetricTree::new(
            [v("A"), v("B"), v("_s0")],
            [(v("A"), v("_s0"), int(1)), (v("_s0"), v("B"), int(1))],
        )
        .unwrap();
        assert!(matches!(
            refine_onto(&f, &stretched),
            Err(CheckError::TreeMismatch(_))
        ));
    }
}
