//! Exact rational linear programming by a revised two-phase simplex.
//!
//! Columns are stored sparsely and the basis inverse densely, which suits
//! the shape of the problems here: few constraint rows and many columns
//! (one per monotone map).

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Q)>,
    pub relation: Relation,
    pub rhs: Q,
}

/// Variables are nonnegative unless declared free. The objective, when
/// present, is maximized.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearProgram {
    free: Vec<bool>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, Q)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { values: Vec<Q>, objective: Q },
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.free.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add_var(&mut self) -> usize {
        self.free.push(false);
        self.free.len() - 1
    }

    pub fn add_free_var(&mut self) -> usize {
        self.free.push(true);
        self.free.len() - 1
    }

    /// Adds `count` nonnegative variables and returns the first index.
    pub fn add_vars(&mut self, count: usize) -> usize {
        let first = self.free.len();
        self.free.resize(first + count, false);
        first
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Q)>, relation: Relation, rhs: Q) {
        debug_assert!(coeffs.iter().all(|&(v, _)| v < self.free.len()));
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, Q)>) {
        self.objective = coeffs;
    }

    /// Whether `values` satisfies every constraint and sign restriction.
    pub fn is_feasible_point(&self, values: &[Q]) -> bool {
        values.len() == self.num_vars()
            && values
                .iter()
                .zip(&self.free)
                .all(|(v, &free)| free || !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs: Q = c.coeffs.iter().map(|(v, a)| a * &values[*v]).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }
}

/// A feasible point, or `None` when the constraints are inconsistent.
pub fn lp_feasible(lp: &LinearProgram) -> Option<Vec<Q>> {
    let mut plain = lp.clone();
    plain.objective.clear();
    match solve(&plain) {
        LpOutcome::Optimal { values, .. } => Some(values),
        _ => None,
    }
}

pub fn solve(lp: &LinearProgram) -> LpOutcome {
    StandardForm::new(lp).solve()
}

// Columns of the standard form `A x = b, x >= 0, b >= 0`: the user's
// variables (free ones split in two), then one slack per inequality, then
// one artificial per row.
struct StandardForm {
    rows: usize,
    columns: Vec<Vec<(usize, Q)>>,
    cost: Vec<Q>,
    rhs: Vec<Q>,
    // For each user variable: positive column and optional negative column.
    user: Vec<(usize, Option<usize>)>,
    first_artificial: usize,
    initial_basis: Vec<usize>,
}

impl StandardForm {
    fn new(lp: &LinearProgram) -> StandardForm {
        let rows = lp.constraints.len();
        let mut columns: Vec<Vec<(usize, Q)>> = Vec::new();
        let mut user = Vec::with_capacity(lp.num_vars());
        for &free in &lp.free {
            let pos = columns.len();
            columns.push(Vec::new());
            let neg = free.then(|| {
                columns.push(Vec::new());
                pos + 1
            });
            user.push((pos, neg));
        }
        let mut rhs = Vec::with_capacity(rows);
        let mut initial_basis = vec![usize::MAX; rows];
        let mut slack_rows = Vec::new();
        for (r, c) in lp.constraints.iter().enumerate() {
            let flip = c.rhs.is_negative();
            let sign = |q: &Q| if flip { -q.clone() } else { q.clone() };
            rhs.push(sign(&c.rhs));
            let mut merged: Vec<(usize, Q)> = c.coeffs.clone();
            merged.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < merged.len() {
                let v = merged[k].0;
                let mut a = Q::zero();
                while k < merged.len() && merged[k].0 == v {
                    a += &merged[k].1;
                    k += 1;
                }
                if a.is_zero() {
                    continue;
                }
                let (pos, neg) = user[v];
                columns[pos].push((r, sign(&a)));
                if let Some(neg) = neg {
                    columns[neg].push((r, -sign(&a)));
                }
            }
            let slack = match c.relation {
                Relation::Le => Some(Q::one()),
                Relation::Ge => Some(-Q::one()),
                Relation::Eq => None,
            };
            if let Some(s) = slack {
                slack_rows.push((r, sign(&s)));
            }
        }
        for (r, s) in slack_rows {
            if s.is_positive() {
                initial_basis[r] = columns.len();
            }
            columns.push(vec![(r, s)]);
        }
        let first_artificial = columns.len();
        for r in 0..rows {
            columns.push(vec![(r, Q::one())]);
            if initial_basis[r] == usize::MAX {
                initial_basis[r] = first_artificial + r;
            }
        }
        let mut cost = vec![Q::zero(); columns.len()];
        for (v, a) in &lp.objective {
            let (pos, neg) = user[*v];
            cost[pos] += a;
            if let Some(neg) = neg {
                cost[neg] -= a;
            }
        }
        StandardForm { rows, columns, cost, rhs, user, first_artificial, initial_basis }
    }

    fn solve(self) -> LpOutcome {
        let mut tableau = Revised::new(&self);
        let phase_one: Vec<Q> = (0..self.columns.len())
            .map(|j| if j >= self.first_artificial { -Q::one() } else { Q::zero() })
            .collect();
        tableau.optimize(&self, &phase_one, usize::MAX);
        let infeasibility: Q = tableau
            .basis
            .iter()
            .zip(&tableau.values)
            .filter(|(&j, _)| j >= self.first_artificial)
            .map(|(_, v)| v.clone())
            .sum();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        tableau.expel_artificials(&self);
        if !tableau.optimize(&self, &self.cost, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Q::zero(); self.columns.len()];
        for (r, &j) in tableau.basis.iter().enumerate() {
            x[j] = tableau.values[r].clone();
        }
        let values: Vec<Q> = self
            .user
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => &x[pos] - &x[neg],
                None => x[pos].clone(),
            })
            .collect();
        let objective = self.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpOutcome::Optimal { values, objective }
    }
}

struct Revised {
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    inverse: Vec<Vec<Q>>,
    values: Vec<Q>,
}

// After this many consecutive degenerate pivots the pricing switches from
// largest reduced cost to Bland's rule, which cannot cycle.
const DEGENERATE_STREAK: usize = 16;

impl Revised {
    fn new(form: &StandardForm) -> Revised {
        let m = form.rows;
        let mut in_basis = vec![false; form.columns.len()];
        for &j in &form.initial_basis {
            in_basis[j] = true;
        }
        let inverse = (0..m)
            .map(|r| (0..m).map(|c| if r == c { Q::one() } else { Q::zero() }).collect())
            .collect();
        Revised { basis: form.initial_basis.clone(), in_basis, inverse, values: form.rhs.clone() }
    }

    fn duals(&self, cost: &[Q]) -> Vec<Q> {
        let m = self.basis.len();
        let mut y = vec![Q::zero(); m];
        for (r, &j) in self.basis.iter().enumerate() {
            let c = &cost[j];
            if c.is_zero() {
                continue;
            }
            for (i, yi) in y.iter_mut().enumerate() {
                let b = &self.inverse[r][i];
                if !b.is_zero() {
                    *yi += c * b;
                }
            }
        }
        y
    }

    fn direction(&self, column: &[(usize, Q)]) -> Vec<Q> {
        let m = self.basis.len();
        let mut u = vec![Q::zero(); m];
        for (i, a) in column {
            for (r, ur) in u.iter_mut().enumerate() {
                let b = &self.inverse[r][*i];
                if !b.is_zero() {
                    *ur += b * a;
                }
            }
        }
        u
    }

    fn pivot(&mut self, row: usize, entering: usize, u: &[Q]) {
        let p = u[row].clone();
        for v in self.inverse[row].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        self.values[row] /= &p;
        let pivot_row = self.inverse[row].clone();
        let pivot_value = self.values[row].clone();
        for (r, f) in u.iter().enumerate() {
            if r == row || f.is_zero() {
                continue;
            }
            for (v, b) in self.inverse[r].iter_mut().zip(&pivot_row) {
                if !b.is_zero() {
                    *v -= f * b;
                }
            }
            self.values[r] -= f * &pivot_value;
        }
        self.in_basis[self.basis[row]] = false;
        self.in_basis[entering] = true;
        self.basis[row] = entering;
    }

    /// Maximizes `cost` over columns below `limit`. Returns false if the
    /// objective is unbounded.
    fn optimize(&mut self, form: &StandardForm, cost: &[Q], limit: usize) -> bool {
        let mut streak = 0;
        loop {
            let y = self.duals(cost);
            let bland = streak >= DEGENERATE_STREAK;
            let mut entering: Option<(usize, Q)> = None;
            for (j, column) in form.columns.iter().enumerate().take(limit.min(form.columns.len())) {
                if self.in_basis[j] {
                    continue;
                }
                let mut d = cost[j].clone();
                for (i, a) in column {
                    if !y[*i].is_zero() {
                        d -= &y[*i] * a;
                    }
                }
                if d.is_positive() {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.as_ref().is_none_or(|(_, best)| d > *best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, _)) = entering else {
                return true;
            };
            let u = self.direction(&form.columns[q]);
            let mut leave: Option<(usize, Q)> = None;
            for (r, ur) in u.iter().enumerate() {
                if !ur.is_positive() {
                    continue;
                }
                let ratio = &self.values[r] / ur;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, step)) = leave else {
                return false;
            };
            streak = if step.is_zero() { streak + 1 } else { 0 };
            self.pivot(row, q, &u);
        }
    }

    /// Pivots zero-valued artificials out of the basis where possible. Those
    /// that remain sit on redundant rows and stay at zero.
    fn expel_artificials(&mut self, form: &StandardForm) {
        for row in 0..self.basis.len() {
            if self.basis[row] < form.first_artificial {
                continue;
            }
            for j in 0..form.first_artificial {
                if self.in_basis[j] {
                    continue;
                }
                let entry: Q = form.columns[j]
                    .iter()
                    .map(|(i, a)| &self.inverse[row][*i] * a)
                    .sum();
                if !entry.is_zero() {
                    let u = self.direction(&form.columns[j]);
                    self.pivot(row, j, &u);
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn single_equation() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var();
        lp.add_constraint(vec![(x, int(1))], Relation::Eq, int(1));
        assert_eq!(lp_feasible(&lp), Some(vec![int(1)]));
        let mut bad = LinearProgram::new();
        let x = bad.add_var();
        bad.add_constraint(vec![(x, int(1))], Relation::Eq, int(-1));
        assert_eq!(lp_feasible(&bad), None);
    }

    #[test]
    fn textbook_maximum() {
        // max 2x + 3y s.t. 2x + y <= 18, 6x + 5y <= 60, 2x + 5y <= 40
        let mut lp = LinearProgram::new();
        let x = lp.add_var();
        let y = lp.add_var();
        lp.add_constraint(vec![(x, int(2)), (y, int(1))], Relation::Le, int(18));
        lp.add_constraint(vec![(x, int(6)), (y, int(5))], Relation::Le, int(60));
        lp.add_constraint(vec![(x, int(2)), (y, int(5))], Relation::Le, int(40));
        lp.set_objective(vec![(x, int(2)), (y, int(3))]);
        assert_eq!(
            solve(&lp),
            LpOutcome::Optimal { values: vec![int(5), int(6)], objective: int(28) }
        );
    }

    #[test]
    fn free_variables_and_unboundedness() {
        let mut lp = LinearProgram::new();
        let x = lp.add_free_var();
        lp.add_constraint(vec![(x, int(1))], Relation::Le, ratio(-5, 2));
        lp.set_objective(vec![(x, int(1))]);
        assert_eq!(
            solve(&lp),
            LpOutcome::Optimal { values: vec![ratio(-5, 2)], objective: ratio(-5, 2) }
        );
        lp.set_objective(vec![(x, int(-1))]);
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var();
        let y = lp.add_var();
        for _ in 0..3 {
            lp.add_constraint(vec![(x, int(1)), (y, int(1))], Relation::Eq, int(1));
        }
        lp.set_objective(vec![(y, int(1))]);
        assert_eq!(
            solve(&lp),
            LpOutcome::Optimal { values: vec![int(0), int(1)], objective: int(1) }
        );
    }
}
