//! Greedy minimal unimodal decomposition.
//!
//! Each round picks a mode-forced vertex of the current density, sweeps
//! from it, keeps the swept function as a component and continues with the
//! remainder. All components live on one common refined tree: vertices that
//! a later sweep inserts are given interpolated values in earlier components.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::density::{interpolate, DensityError, EdgeLinearDensity};
use crate::forced::{find_forced_vertex, ForcedError};
use crate::rational::Rational;
use crate::sweep::sweep;
use crate::tree::{MetricTree, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("no termination after {iterations} rounds on a tree of {vertices} vertices")]
    NonTermination { iterations: usize, vertices: usize },
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Forced(#[from] ForcedError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub mode: VertexId,
    pub values: BTreeMap<VertexId, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub refined_tree: Arc<MetricTree>,
    pub components: Vec<Component>,
    pub input_on_refined: EdgeLinearDensity,
}

impl Decomposition {
    pub fn ucat(&self) -> usize {
        self.components.len()
    }

    pub fn component_density(&self, index: usize) -> EdgeLinearDensity {
        EdgeLinearDensity::from_parts_unchecked(
            self.refined_tree.clone(),
            self.components[index].values.clone(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub iteration: usize,
    pub forced: VertexId,
    pub subdivided: Vec<VertexId>,
    /// Sum of the remainder's vertex values after this round.
    pub remaining_mass: Rational,
}

pub fn decompose(
    f: &EdgeLinearDensity,
) -> Result<(Decomposition, Vec<TraceEvent>), DecomposeError> {
    let mut current = f.clone();
    let mut input_on_refined = f.values().clone();
    let mut components: Vec<Component> = Vec::new();
    let mut trace = Vec::new();

    while !current.support_is_empty() {
        let vertices = current.tree().vertex_count();
        if components.len() >= vertices {
            return Err(DecomposeError::NonTermination {
                iterations: components.len(),
                vertices,
            });
        }
        let forced = find_forced_vertex(&current)?;
        let swept = sweep(&current, &forced)?;

        for sub in &swept.subdivisions {
            let (a, b) = (&sub.from, &sub.to);
            for comp in components.iter_mut() {
                let value = interpolate(&comp.values[a], &comp.values[b], &sub.t);
                comp.values.insert(sub.vertex.clone(), value);
            }
            let value = interpolate(&input_on_refined[a], &input_on_refined[b], &sub.t);
            input_on_refined.insert(sub.vertex.clone(), value);
        }

        let remainder = swept.remainder;
        trace.push(TraceEvent {
            iteration: components.len(),
            forced: forced.clone(),
            subdivided: swept
                .subdivisions
                .iter()
                .map(|s| s.vertex.clone())
                .collect(),
            remaining_mass: remainder.mass(),
        });
        components.push(Component {
            mode: forced,
            values: swept.h.into_values(),
        });
        current = remainder;
    }

    let refined_tree = current.shared_tree().clone();
    let input_on_refined =
        EdgeLinearDensity::from_parts_unchecked(refined_tree.clone(), input_on_refined);
    Ok((
        Decomposition {
            refined_tree,
            components,
            input_on_refined,
        },
        trace,
    ))
}

/// The unimodal category: the number of components `decompose` produces.
pub fn ucat(f: &EdgeLinearDensity) -> Result<usize, DecomposeError> {
    Ok(decompose(f)?.0.ucat())
}

/// Sum of all component values at every refined vertex.
pub fn component_sum(d: &Decomposition) -> BTreeMap<VertexId, Rational> {
    d.refined_tree
        .vertices()
        .map(|v| {
            let total = d
                .components
                .iter()
                .fold(Rational::zero(), |acc, c| acc + &c.values[v]);
            (v.clone(), total)
        })
        .collect()
}
