//! Minimal unimodal decompositions of edge-linear densities on metric trees.
//!
//! A density is given by nonnegative rational values at the vertices of a
//! finite metric tree and is linear along edges. [`greedy::decompose`] writes
//! it as a sum of the fewest possible unimodal functions; the length of that
//! sum is the unimodal category, [`greedy::ucat`]. The [`verify`] module holds
//! independent checkers: a decomposition validator, an exact LP-based
//! brute-force oracle for small trees and a separate path algorithm.

pub mod density;
pub mod forced;
pub mod greedy;
pub mod rational;
pub mod sweep;
pub mod tree;
pub mod verify;

pub use density::{EdgeLinearDensity, ModeWitness, NotUnimodal};
pub use greedy::{decompose, ucat, Component, Decomposition, TraceEvent};
pub use rational::Rational;
pub use tree::{EdgePoint, MetricTree, VertexId};
