//! Seeded random instances for property tests and benchmarks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::density::EdgeLinearDensity;
use crate::rational::{int, Rational};
use crate::tree::{MetricTree, VertexId};

fn ids(n: usize) -> Vec<VertexId> {
    let width = n.to_string().len();
    (1..=n)
        .map(|i| VertexId::new(format!("v{i:0width$}")))
        .collect()
}

fn values(rng: &mut ChaCha8Rng, n: usize, max_value: u64) -> Vec<Rational> {
    (0..n)
        .map(|_| int(rng.gen_range(0..=max_value) as i64))
        .collect()
}

/// A tree of `1..=max_vertices` vertices, each new vertex hung on a uniformly
/// chosen earlier one, with unit lengths and integer values in
/// `[0, max_value]`. Ids are `v1..vN`, zero-padded so they sort numerically.
pub fn gen_instance(
    seed: u64,
    max_vertices: usize,
    max_value: u64,
) -> (Arc<MetricTree>, EdgeLinearDensity) {
    assert!(max_vertices >= 1, "max_vertices must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_vertices);
    let ids = ids(n);
    let edges: Vec<_> = (1..n)
        .map(|i| (ids[rng.gen_range(0..i)].clone(), ids[i].clone(), int(1)))
        .collect();
    let tree = Arc::new(MetricTree::new(ids.clone(), edges).expect("attachment builds a tree"));
    let vals = values(&mut rng, n, max_value);
    let map = ids.into_iter().zip(vals).collect();
    let f = EdgeLinearDensity::new(tree.clone(), map).expect("values cover the tree");
    (tree, f)
}

/// A path of `1..=max_len` vertices, values in `[0, max_value]`.
pub fn gen_path_instance(
    seed: u64,
    max_len: usize,
    max_value: u64,
) -> (Vec<Rational>, EdgeLinearDensity) {
    assert!(max_len >= 1, "max_len must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_len);
    let ids = ids(n);
    let vals = values(&mut rng, n, max_value);
    let tree =
        Arc::new(MetricTree::path(&ids.iter().map(VertexId::as_str).collect::<Vec<_>>()).unwrap());
    let map = ids.into_iter().zip(vals.iter().cloned()).collect();
    (
        vals,
        EdgeLinearDensity::new(tree, map).expect("values cover the path"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex() {
        let (tree, f) = gen_instance(0, 1, 4);
        assert_eq!(tree.vertex_count(), 1);
        assert_eq!(f.values().len(), 1);
    }

    #[test]
    fn deterministic() {
        assert_eq!(gen_instance(42, 8, 4), gen_instance(42, 8, 4));
        assert_eq!(gen_path_instance(42, 30, 9), gen_path_instance(42, 30, 9));
    }

    #[test]
    fn within_bounds() {
        for seed in 0..200 {
            let (tree, f) = gen_instance(seed, 8, 4);
            assert!((1..=8).contains(&tree.vertex_count()));
            assert_eq!(tree.edge_count() + 1, tree.vertex_count());
            assert!(f.values().values().all(|x| *x >= int(0) && *x <= int(4)));
        }
        let sizes: std::collections::BTreeSet<usize> = (0..200)
            .map(|s| gen_instance(s, 8, 4).0.vertex_count())
            .collect();
        assert_eq!(sizes.len(), 8);
    }

    #[test]
    fn path_ids_sort_in_path_order() {
        let (vals, f) = gen_path_instance(5, 30, 9);
        let ordered: Vec<_> = f.values().values().cloned().collect();
        assert_eq!(ordered, vals);
    }
}
