//! Exact rational linear programming.
//!
//! Dense two-phase primal simplex with Bland's smallest-index rule, so it
//! terminates on degenerate problems. All variables are implicitly `>= 0`.
//! Problems here have at most a few dozen variables, so no attempt is made
//! at sparsity or refactorization.

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }

    fn flipped(self) -> Sense {
        match self {
            Sense::Le => Sense::Ge,
            Sense::Ge => Sense::Le,
            Sense::Eq => Sense::Eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub sense: Sense,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>, sense: Sense, rhs: Rational) -> Self {
        LinearConstraint { coeffs, sense, rhs }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum()
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        self.sense.holds(&self.lhs(x), &self.rhs)
    }
}

/// `maximize objective . x` subject to `constraints`, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<LinearConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<Rational>) -> Self {
        LinearProgram {
            num_vars: objective.len(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, sense: Sense, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(LinearConstraint::new(coeffs, sense, rhs));
    }

    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.is_satisfied(x))
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn maximize(&self) -> LpOutcome {
        Tableau::solve(self)
    }

    /// Optimal value together with the lexicographically smallest optimal
    /// point (compared coordinate by coordinate in variable order). That
    /// point is always a vertex of the feasible region.
    pub fn maximize_lexmin(&self) -> LpOutcome {
        let mut tab = match Tableau::phase_one(self) {
            Some(tab) => tab,
            None => return LpOutcome::Infeasible,
        };
        if let Pivoting::Unbounded = tab.optimize(&self.objective) {
            return LpOutcome::Unbounded;
        }
        let value = tab.value();
        // Columns with positive reduced cost stay at zero on the optimal
        // face; freezing them and minimizing each coordinate in turn walks
        // down to the lexicographically smallest optimal vertex.
        for k in 0..self.num_vars {
            tab.freeze_positive_costs();
            let cost = unit(self.num_vars, k, -Rational::one());
            if let Pivoting::Unbounded = tab.optimize(&cost) {
                unreachable!("coordinates are bounded below by zero");
            }
        }
        LpOutcome::Optimal {
            value,
            point: tab.point(),
        }
    }
}

fn unit(n: usize, k: usize, v: Rational) -> Vec<Rational> {
    (0..n)
        .map(|i| if i == k { v.clone() } else { Rational::zero() })
        .collect()
}

struct Tableau {
    /// `rows[i]` has one entry per column followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs `c_B B^-1 A_j - c_j`, last entry is the objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    num_cols: usize,
    num_vars: usize,
    /// Columns that may enter the basis.
    allowed: Vec<bool>,
}

enum Pivoting {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn solve(lp: &LinearProgram) -> LpOutcome {
        let Some(mut tab) = Tableau::phase_one(lp) else {
            return LpOutcome::Infeasible;
        };
        match tab.optimize(&lp.objective) {
            Pivoting::Unbounded => LpOutcome::Unbounded,
            Pivoting::Optimal => LpOutcome::Optimal {
                value: tab.value(),
                point: tab.point(),
            },
        }
    }

    /// Builds the tableau and drives out the artificials. `None` means the
    /// constraints are infeasible.
    fn phase_one(lp: &LinearProgram) -> Option<Tableau> {
        let n = lp.num_vars;
        let m = lp.constraints.len();

        // Normalize to nonnegative right-hand sides.
        let normalized: Vec<(Vec<Rational>, Sense, Rational)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative() {
                    (
                        c.coeffs.iter().map(|a| -a).collect(),
                        c.sense.flipped(),
                        -&c.rhs,
                    )
                } else {
                    (c.coeffs.clone(), c.sense, c.rhs.clone())
                }
            })
            .collect();

        let num_slack = normalized.iter().filter(|c| c.1 != Sense::Eq).count();
        let num_art = normalized.iter().filter(|c| c.1 != Sense::Le).count();
        let art_start = n + num_slack;
        let num_cols = art_start + num_art;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (n, art_start);
        for (coeffs, sense, rhs) in normalized {
            let mut row = vec![Rational::zero(); num_cols + 1];
            row[..n].clone_from_slice(&coeffs);
            row[num_cols] = rhs;
            match sense {
                Sense::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Sense::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Sense::Eq => {
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }

        let mut tab = Tableau {
            rows,
            obj: Vec::new(),
            basis,
            num_cols,
            num_vars: n,
            allowed: (0..num_cols).map(|j| j < art_start).collect(),
        };

        // Phase one: maximize -(sum of artificials).
        if num_art > 0 {
            let cost: Vec<Rational> = (0..num_cols)
                .map(|j| {
                    if j >= art_start {
                        -Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            tab.set_objective(&cost);
            let everything = vec![true; num_cols];
            if let Pivoting::Unbounded = tab.pivot_to_optimum(&everything) {
                unreachable!("phase one objective is bounded by zero");
            }
            if tab.obj[num_cols].is_negative() {
                return None;
            }
            tab.evict_artificials(art_start);
        }

        Some(tab)
    }

    /// Maximizes `objective` over the original variables; artificial and
    /// frozen columns may not enter.
    fn optimize(&mut self, objective: &[Rational]) -> Pivoting {
        let mut cost = vec![Rational::zero(); self.num_cols];
        cost[..self.num_vars].clone_from_slice(objective);
        self.set_objective(&cost);
        let allowed = std::mem::take(&mut self.allowed);
        let result = self.pivot_to_optimum(&allowed);
        self.allowed = allowed;
        result
    }

    fn freeze_positive_costs(&mut self) {
        for (a, c) in self.allowed.iter_mut().zip(&self.obj) {
            if c.is_positive() {
                *a = false;
            }
        }
    }

    fn value(&self) -> Rational {
        self.obj[self.num_cols].clone()
    }

    fn point(&self) -> Vec<Rational> {
        let mut point = vec![Rational::zero(); self.num_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.num_vars {
                point[b] = self.rows[i][self.num_cols].clone();
            }
        }
        point
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        let nc = self.num_cols;
        let mut obj: Vec<Rational> = (0..=nc)
            .map(|j| if j < nc { -&cost[j] } else { Rational::zero() })
            .collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (o, a) in obj.iter_mut().zip(row) {
                *o += cb * a;
            }
        }
        self.obj = obj;
    }

    /// Bland's rule: entering column is the smallest index with negative
    /// reduced cost; ratio-test ties go to the smallest basic index.
    fn pivot_to_optimum(&mut self, allowed: &[bool]) -> Pivoting {
        loop {
            let Some(col) = (0..self.num_cols).find(|&j| allowed[j] && self.obj[j].is_negative()) else {
                return Pivoting::Optimal;
            };
            let rhs = self.num_cols;
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Pivoting::Unbounded,
                Some((row, _)) => self.pivot(row, col),
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &(&f * p);
                }
            }
        }
        if !self.obj.is_empty() && !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &(&f * p);
                }
            }
        }
        self.basis[r] = c;
    }

    /// After a successful phase one every artificial is at level zero. Pivot
    /// the basic ones out, dropping rows that turn out to be redundant.
    fn evict_artificials(&mut self, art_start: usize) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < art_start {
                i += 1;
                continue;
            }
            match (0..art_start).find(|&j| !self.rows[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}
