//! Brute-force unimodal category for small trees.
//!
//! A multiset of `k` mode vertices is feasible when `f` splits into `k`
//! nonnegative components, each non-increasing away from its own mode along
//! every edge. That is a linear system, decided exactly by the rational
//! simplex in [`super::lp`]. The oracle tries every multiset of size
//! `1, 2, ...` until one is feasible.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use thiserror::Error;

use super::lp::{LinearProgram, LpOutcome, Relation};
use crate::density::EdgeLinearDensity;
use crate::rational::Rational;
use crate::tree::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the mode multiset is empty")]
    EmptyModeSet,
    #[error("unknown mode vertex {0}")]
    UnknownVertex(VertexId),
    #[error("no decomposition with at most {0} components")]
    ExceedsKMax(usize),
}

/// Components indexed like `modes`, each a full vertex map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityCertificate {
    pub modes: Vec<VertexId>,
    pub components: Vec<BTreeMap<VertexId, Rational>>,
}

impl FeasibilityCertificate {
    /// Re-checks the certificate against `f` edge by edge.
    pub fn is_valid_for(&self, f: &EdgeLinearDensity) -> bool {
        if self.modes.len() != self.components.len() {
            return false;
        }
        let tree = f.tree();
        for (mode, comp) in self.modes.iter().zip(&self.components) {
            let Ok(orientation) = tree.root_at(mode) else {
                return false;
            };
            if tree
                .vertices()
                .any(|v| comp.get(v).is_none_or(|x| x < &Rational::zero()))
            {
                return false;
            }
            if orientation.edges().any(|(p, c)| comp[c] > comp[p]) {
                return false;
            }
        }
        tree.vertices().all(|v| {
            let total = self
                .components
                .iter()
                .fold(Rational::zero(), |acc, c| acc + &c[v]);
            &total == f.at(v)
        })
    }
}

/// The feasibility system for `modes`, with variables only where `f > 0`.
struct ModeSystem {
    lp: LinearProgram,
    /// Variable index of (mode index, vertex).
    var: BTreeMap<(usize, VertexId), usize>,
}

fn build_system(f: &EdgeLinearDensity, modes: &[VertexId]) -> Result<ModeSystem, OracleError> {
    if modes.is_empty() {
        return Err(OracleError::EmptyModeSet);
    }
    let tree = f.tree();
    let positive: Vec<&VertexId> = tree.vertices().filter(|v| !f.at(v).is_zero()).collect();
    let mut var = BTreeMap::new();
    for alpha in 0..modes.len() {
        for v in &positive {
            let next = var.len();
            var.insert((alpha, (*v).clone()), next);
        }
    }
    let mut lp = LinearProgram::new(var.len());
    for (alpha, mode) in modes.iter().enumerate() {
        let dist = tree
            .hop_distances(mode)
            .map_err(|_| OracleError::UnknownVertex(mode.clone()))?;
        for (a, b, _) in tree.edges() {
            let (near, far) = if dist[a] < dist[b] { (a, b) } else { (b, a) };
            let near_var = var.get(&(alpha, near.clone()));
            let far_var = var.get(&(alpha, far.clone()));
            match (near_var, far_var) {
                (Some(&n), Some(&w)) => lp.add(
                    vec![(n, Rational::one()), (w, -Rational::one())],
                    Relation::Ge,
                    Rational::zero(),
                ),
                // The near end is pinned to zero, so the far end is too.
                (None, Some(&w)) => {
                    lp.add(vec![(w, Rational::one())], Relation::Le, Rational::zero())
                }
                _ => {}
            }
        }
    }
    for v in &positive {
        let coeffs = (0..modes.len())
            .map(|alpha| (var[&(alpha, (*v).clone())], Rational::one()))
            .collect();
        lp.add(coeffs, Relation::Eq, f.at(v).clone());
    }
    Ok(ModeSystem { lp, var })
}

fn certificate(
    f: &EdgeLinearDensity,
    modes: &[VertexId],
    system: &ModeSystem,
    x: &[Rational],
) -> FeasibilityCertificate {
    let components = (0..modes.len())
        .map(|alpha| {
            f.tree()
                .vertices()
                .map(|v| {
                    let value = system
                        .var
                        .get(&(alpha, v.clone()))
                        .map_or_else(Rational::zero, |&j| x[j].clone());
                    (v.clone(), value)
                })
                .collect()
        })
        .collect();
    FeasibilityCertificate {
        modes: modes.to_vec(),
        components,
    }
}

/// Decides whether `f` splits into components anchored at `modes`.
pub fn feasible_with_modes(
    f: &EdgeLinearDensity,
    modes: &[VertexId],
) -> Result<Option<FeasibilityCertificate>, OracleError> {
    let system = build_system(f, modes)?;
    match system.lp.solve() {
        LpOutcome::Optimal { x, .. } => Ok(Some(certificate(f, modes, &system, &x))),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => unreachable!("zero objective is bounded"),
    }
}

/// Largest `eps` in `[0, 1]` such that some decomposition anchored at
/// `modes` has every component at least `eps` higher at its mode than
/// anywhere in `avoid`. `None` when `modes` is infeasible outright. A
/// positive margin means no component attains its maximum on `avoid`.
pub fn margin_avoiding(
    f: &EdgeLinearDensity,
    modes: &[VertexId],
    avoid: &BTreeSet<VertexId>,
) -> Result<Option<Rational>, OracleError> {
    let mut system = build_system(f, modes)?;
    let eps = system.lp.num_vars;
    system.lp.num_vars += 1;
    let value = |alpha: usize, v: &VertexId| system.var.get(&(alpha, v.clone())).copied();
    let mut rows = Vec::new();
    for (alpha, mode) in modes.iter().enumerate() {
        for p in avoid {
            // x[mode] - x[p] - eps >= 0; missing variables are pinned at zero.
            let mut coeffs = vec![(eps, -Rational::one())];
            if let Some(j) = value(alpha, mode) {
                coeffs.push((j, Rational::one()));
            }
            if let Some(j) = value(alpha, p) {
                coeffs.push((j, -Rational::one()));
            }
            rows.push(coeffs);
        }
    }
    for coeffs in rows {
        system.lp.add(coeffs, Relation::Ge, Rational::zero());
    }
    system
        .lp
        .add(vec![(eps, Rational::one())], Relation::Le, Rational::one());
    system.lp.objective = vec![(eps, Rational::one())];
    match system.lp.solve() {
        LpOutcome::Optimal { value, .. } => Ok(Some(value)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => unreachable!("eps is bounded above"),
    }
}

/// All multisets of size `k` drawn from `items`, in lexicographic order.
pub fn multisets<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn extend<T: Clone>(
        items: &[T],
        start: usize,
        k: usize,
        cur: &mut Vec<T>,
        out: &mut Vec<Vec<T>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            extend(items, i, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(items, 0, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// For each edge along which `f` strictly rises, the vertices on the high
/// side. Every feasible mode multiset must meet each of these sets, since
/// some component has to rise along that edge too.
pub fn ascent_sides(f: &EdgeLinearDensity) -> Vec<BTreeSet<VertexId>> {
    let tree = f.tree();
    let mut sides = Vec::new();
    for (a, b, _) in tree.edges() {
        let (low, high) = match f.at(a).cmp(f.at(b)) {
            std::cmp::Ordering::Less => (a, b),
            std::cmp::Ordering::Greater => (b, a),
            std::cmp::Ordering::Equal => continue,
        };
        let dist_high = tree.hop_distances(high).unwrap();
        let dist_low = tree.hop_distances(low).unwrap();
        sides.push(
            tree.vertices()
                .filter(|v| dist_high[*v] < dist_low[*v])
                .cloned()
                .collect(),
        );
    }
    sides
}

/// Smallest `k <= k_max` admitting a decomposition, with its certificate.
///
/// Modes are drawn from vertices where `f > 0` (a component anchored at a
/// zero of `f` vanishes and could be dropped) and multisets that miss the
/// high side of some ascending edge are skipped without solving.
pub fn ucat_oracle_with_certificate(
    f: &EdgeLinearDensity,
    k_max: usize,
) -> Result<(usize, Option<FeasibilityCertificate>), OracleError> {
    if f.support_is_empty() {
        return Ok((0, None));
    }
    let candidates: Vec<VertexId> = f
        .tree()
        .vertices()
        .filter(|v| !f.at(v).is_zero())
        .cloned()
        .collect();
    let sides = ascent_sides(f);
    for k in 1..=k_max {
        for modes in multisets(&candidates, k) {
            if !sides
                .iter()
                .all(|side| modes.iter().any(|m| side.contains(m)))
            {
                continue;
            }
            if let Some(cert) = feasible_with_modes(f, &modes)? {
                return Ok((k, Some(cert)));
            }
        }
    }
    Err(OracleError::ExceedsKMax(k_max))
}

pub fn ucat_oracle(f: &EdgeLinearDensity, k_max: usize) -> Result<usize, OracleError> {
    ucat_oracle_with_certificate(f, k_max).map(|(k, _)| k)
}
