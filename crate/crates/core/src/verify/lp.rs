//! A small dense two-phase simplex over exact rationals.
//!
//! Bland's rule is used for both entering and leaving variables, so the method
//! cannot cycle. Problems here have at most a few dozen rows and columns.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Maximize `objective · x` subject to `constraints` and `x >= 0`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Rational>, value: Rational },
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            ..Default::default()
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.num_vars));
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    num_cols: usize,
    /// Columns at or past this index are artificial.
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let m = lp.constraints.len();
        let num_slack = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let first_artificial = lp.num_vars + num_slack;

        // Normalize to nonnegative right-hand sides first; a row needs an
        // artificial unless its slack can start in the basis.
        let mut normalized = Vec::with_capacity(m);
        for c in &lp.constraints {
            let flip = c.rhs.is_negative();
            let relation = match (flip, c.relation) {
                (true, Relation::Le) => Relation::Ge,
                (true, Relation::Ge) => Relation::Le,
                (_, r) => r,
            };
            normalized.push((flip, relation));
        }
        let num_artificial = normalized
            .iter()
            .filter(|(_, r)| *r != Relation::Le)
            .count();
        let num_cols = first_artificial + num_artificial;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut slack, mut artificial) = (lp.num_vars, first_artificial);
        for (c, (flip, relation)) in lp.constraints.iter().zip(normalized) {
            let sign = if flip {
                -Rational::one()
            } else {
                Rational::one()
            };
            let mut row = vec![Rational::zero(); num_cols];
            for (j, a) in &c.coeffs {
                row[*j] += a * &sign;
            }
            if c.relation != Relation::Eq {
                row[slack] = match relation {
                    Relation::Le => Rational::one(),
                    _ => -Rational::one(),
                };
                if relation == Relation::Le {
                    basis.push(slack);
                }
                slack += 1;
            }
            if relation != Relation::Le {
                row[artificial] = Rational::one();
                basis.push(artificial);
                artificial += 1;
            }
            rows.push(row);
            rhs.push(&c.rhs * &sign);
        }
        Tableau {
            rows,
            rhs,
            basis,
            num_cols,
            first_artificial,
        }
    }

    fn pivot(&mut self, r: usize, c: usize, cost: &mut [Rational], value: &mut Rational) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for x in self.rows[r].iter_mut().filter(|x| !x.is_zero()) {
                *x /= &p;
            }
            self.rhs[r] /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        let nonzero: Vec<usize> = (0..self.num_cols)
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        if !cost[c].is_zero() {
            let factor = cost[c].clone();
            for &j in &nonzero {
                cost[j] -= &factor * &pivot_row[j];
            }
            *value += &factor * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Maximizes with reduced costs `cost`; columns `>= limit` never enter.
    /// Returns false if unbounded.
    fn optimize(&mut self, cost: &mut [Rational], value: &mut Rational, limit: usize) -> bool {
        loop {
            let Some(c) = (0..limit).find(|&j| cost[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else { return false };
            self.pivot(r, c, cost, value);
        }
    }

    fn reduced_costs(&self, objective: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut cost = objective.to_vec();
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &objective[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    cost[j] -= cb * a;
                }
            }
            value += cb * &self.rhs[i];
        }
        (cost, value)
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        if self.first_artificial < self.num_cols {
            let mut phase_one = vec![Rational::zero(); self.num_cols];
            for c in phase_one.iter_mut().skip(self.first_artificial) {
                *c = -Rational::one();
            }
            let (mut cost, mut value) = self.reduced_costs(&phase_one);
            self.optimize(&mut cost, &mut value, self.num_cols);
            if value.is_negative() {
                return LpOutcome::Infeasible;
            }
            self.evict_artificials(&mut cost, &mut value);
        }

        let mut objective = vec![Rational::zero(); self.num_cols];
        for (j, c) in &lp.objective {
            objective[*j] += c;
        }
        let (mut cost, mut value) = self.reduced_costs(&objective);
        if !self.optimize(&mut cost, &mut value, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); lp.num_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < lp.num_vars {
                x[b] = self.rhs[i].clone();
            }
        }
        LpOutcome::Optimal { x, value }
    }

    /// Pivots zero-valued artificials out of the basis, dropping redundant rows.
    fn evict_artificials(&mut self, cost: &mut [Rational], value: &mut Rational) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                Some(c) => {
                    self.pivot(i, c, cost, value);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.rhs.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn optimal(outcome: LpOutcome) -> (Vec<Rational>, Rational) {
        match outcome {
            LpOutcome::Optimal { x, value } => (x, value),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.add(vec![(0, int(1))], Relation::Le, int(4));
        lp.add(vec![(1, int(2))], Relation::Le, int(12));
        lp.add(vec![(0, int(3)), (1, int(2))], Relation::Le, int(18));
        lp.objective = vec![(0, int(3)), (1, int(5))];
        let (x, value) = optimal(lp.solve());
        assert_eq!(x, vec![int(2), int(6)]);
        assert_eq!(value, int(36));
    }

    #[test]
    fn equality_and_ge_rows() {
        // x + y = 1, x - y >= 1/3, maximize y -> y = 1/3
        let mut lp = LinearProgram::new(2);
        lp.add(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(1));
        lp.add(vec![(0, int(1)), (1, int(-1))], Relation::Ge, ratio(1, 3));
        lp.objective = vec![(1, int(1))];
        let (x, value) = optimal(lp.solve());
        assert_eq!(value, ratio(1, 3));
        assert_eq!(x, vec![ratio(2, 3), ratio(1, 3)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![(0, int(1))], Relation::Ge, int(2));
        lp.add(vec![(0, int(1))], Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.add(vec![(0, int(1))], Relation::Ge, int(2));
        lp.objective = vec![(0, int(1))];
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_and_redundant_rows() {
        // -x <= -2 is x >= 2; the duplicated equality is redundant.
        let mut lp = LinearProgram::new(2);
        lp.add(vec![(0, int(-1))], Relation::Le, int(-2));
        lp.add(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(5));
        lp.add(vec![(0, int(2)), (1, int(2))], Relation::Eq, int(10));
        lp.objective = vec![(1, int(1))];
        let (x, value) = optimal(lp.solve());
        assert_eq!(value, int(3));
        assert_eq!(x, vec![int(2), int(3)]);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // A classic cycling example under the largest-coefficient rule.
        let mut lp = LinearProgram::new(4);
        lp.add(
            vec![
                (0, ratio(1, 2)),
                (1, ratio(-11, 2)),
                (2, ratio(-5, 2)),
                (3, int(9)),
            ],
            Relation::Le,
            int(0),
        );
        lp.add(
            vec![
                (0, ratio(1, 2)),
                (1, ratio(-3, 2)),
                (2, ratio(-1, 2)),
                (3, int(1)),
            ],
            Relation::Le,
            int(0),
        );
        lp.add(vec![(0, int(1))], Relation::Le, int(1));
        lp.objective = vec![(0, int(10)), (1, int(-57)), (2, int(-9)), (3, int(-24))];
        let (_, value) = optimal(lp.solve());
        assert_eq!(value, int(1));
    }

    #[test]
    fn empty_program_is_feasible() {
        let lp = LinearProgram::new(3);
        let (x, value) = optimal(lp.solve());
        assert_eq!(x, vec![int(0); 3]);
        assert!(value.is_zero());
    }
}
