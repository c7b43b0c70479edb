//! Exact two-phase simplex over `BigRational` with Bland's anti-cycling rule.
//!
//! All variables carry the implicit bound `x_i >= 0`. Problems here are
//! desk-sized (tens of rows and columns), so a dense tableau is used.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::kb::{LinearConstraint, Relation};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub num_vars: usize,
    pub constraints: Vec<LinearConstraint>,
    pub objective: BTreeMap<usize, Rational>,
    pub sense: Sense,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible { pivots: usize },
    Unbounded { pivots: usize },
}

impl LpOutcome {
    pub fn pivots(&self) -> usize {
        match self {
            LpOutcome::Optimal(s) => s.pivots,
            LpOutcome::Infeasible { pivots } | LpOutcome::Unbounded { pivots } => *pivots,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Column {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row; last entry holds minus the objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<Column>,
    pivots: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let w = self.width();
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for j in 0..=w {
                if !pivot_row[j].is_zero() {
                    row[j] -= &f * &pivot_row[j];
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
    }

    fn set_cost(&mut self, costs: &[Rational]) {
        let w = self.width();
        let mut cost: Vec<Rational> = costs.to_vec();
        cost.resize(w + 1, Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..=w {
                if !self.rows[i][j].is_zero() {
                    cost[j] -= &cb * &self.rows[i][j];
                }
            }
        }
        self.cost = cost;
    }

    /// Runs Bland's-rule iterations. Returns false when unbounded.
    fn optimize(&mut self, allow: impl Fn(Column) -> bool) -> bool {
        let w = self.width();
        loop {
            let entering = (0..w).find(|&j| allow(self.kinds[j]) && self.cost[j].is_negative());
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[w] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Solves `problem` exactly.
pub fn solve(problem: &LpProblem) -> LpOutcome {
    let n = problem.num_vars;
    for c in &problem.constraints {
        if let Some(i) = c.max_index() {
            assert!(i < n, "constraint references variable {i} outside 0..{n}");
        }
    }
    // Normalise each row to a non-negative right-hand side.
    let rows: Vec<(BTreeMap<usize, Rational>, Relation, Rational)> = problem
        .constraints
        .iter()
        .map(|c| {
            if c.rhs.is_negative() {
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coefficients.iter().map(|(&i, v)| (i, -v)).collect(), rel, -c.rhs.clone())
            } else {
                (c.coefficients.clone(), c.relation, c.rhs.clone())
            }
        })
        .collect();

    let mut kinds = vec![Column::Structural; n];
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let artificial_count = rows.iter().filter(|r| r.1 != Relation::Le).count();
    kinds.extend(std::iter::repeat_n(Column::Slack, slack_count));
    kinds.extend(std::iter::repeat_n(Column::Artificial, artificial_count));
    let w = kinds.len();

    let mut tableau_rows = Vec::with_capacity(rows.len());
    let mut basis = Vec::with_capacity(rows.len());
    let (mut next_slack, mut next_art) = (n, n + slack_count);
    for (coeffs, rel, rhs) in &rows {
        let mut row = vec![Rational::zero(); w + 1];
        for (&i, v) in coeffs {
            row[i] = v.clone();
        }
        row[w] = rhs.clone();
        match rel {
            Relation::Le => {
                row[next_slack] = Rational::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        tableau_rows.push(row);
    }

    let mut t = Tableau { rows: tableau_rows, cost: Vec::new(), basis, kinds, pivots: 0 };

    if artificial_count > 0 {
        let phase1: Vec<Rational> =
            t.kinds.iter().map(|k| if *k == Column::Artificial { Rational::one() } else { Rational::zero() }).collect();
        t.set_cost(&phase1);
        t.optimize(|_| true);
        if !t.cost[w].is_zero() {
            return LpOutcome::Infeasible { pivots: t.pivots };
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        let mut r = 0;
        while r < t.rows.len() {
            if t.kinds[t.basis[r]] == Column::Artificial {
                match (0..w).find(|&j| t.kinds[j] != Column::Artificial && !t.rows[r][j].is_zero()) {
                    Some(c) => t.pivot(r, c),
                    None => {
                        t.rows.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut costs = vec![Rational::zero(); w];
    for (&i, v) in &problem.objective {
        assert!(i < n, "objective references variable {i} outside 0..{n}");
        costs[i] = match problem.sense {
            Sense::Minimize => v.clone(),
            Sense::Maximize => -v.clone(),
        };
    }
    t.set_cost(&costs);
    if !t.optimize(|k| k != Column::Artificial) {
        return LpOutcome::Unbounded { pivots: t.pivots };
    }

    let mut x = vec![Rational::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rows[i][w].clone();
        }
    }
    let value: Rational = problem.objective.iter().map(|(&i, v)| v * &x[i]).sum();
    LpOutcome::Optimal(LpSolution { value, x, pivots: t.pivots })
}
