//! Unimodal category of a density on a path, computed directly on the
//! sequence of values.
//!
//! Deliberately written against plain slices with no use of the tree
//! machinery, so it serves as a cross-check of the tree algorithm.
//!
//! Each round takes the first strict descent of the sequence (the end of the
//! leading non-decreasing run). Everything left of it is covered exactly by
//! one component, which then continues rightwards: it holds its level over
//! rises and follows every fall until it runs out. The point where it runs
//! out mid-segment is added to the sequence so the leftover stays exact.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

pub fn interval_ucat(values: &[Rational]) -> usize {
    let mut seq: Vec<Rational> = values.to_vec();
    let mut rounds = 0;
    while seq.iter().any(|x| !x.is_zero()) {
        rounds += 1;
        let peak = (0..seq.len() - 1)
            .find(|&i| seq[i] > seq[i + 1])
            .unwrap_or(seq.len() - 1);

        let mut level = seq[peak].clone();
        let mut next: Vec<Rational> = vec![Rational::zero(); peak + 1];
        for i in peak + 1..seq.len() {
            let fall = &seq[i - 1] - &seq[i];
            if fall.is_positive() && level.is_positive() && level < fall {
                // Runs out inside (i-1, i): the leftover there is seq[i-1] - level.
                next.push(&seq[i - 1] - &level);
                level = Rational::zero();
            } else if fall.is_positive() {
                level = (level - fall).max(Rational::zero());
            }
            next.push(&seq[i] - &level);
        }
        seq = next;
    }
    rounds
}
