//! Exact two-phase simplex over rationals with Bland's anti-cycling rule.

use num::traits::{Signed, Zero};

use crate::rational::Rational;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

/// Optimal solution of `max cᵀx s.t. constraints, x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub value: Rational,
    /// One multiplier per constraint, from the final reduced costs.
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

const MAX_PIVOTS: usize = 1_000_000;

struct Tableau {
    rows: Vec<Vec<Rational>>,
    obj: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        let nz: Vec<usize> = (0..=self.width).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                let delta = &f * &pivot_row[j];
                row[j] -= delta;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs to optimality over columns `j` with `allowed(j)`.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<()> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Lp("pivot limit exceeded".into()));
            }
            let Some(enter) = (0..self.width).find(|&j| allowed(j) && self.obj[j].is_negative()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Err(Error::Lp("objective is unbounded".into())),
            }
        }
    }

    fn reset_objective(&mut self, cost: &[Rational]) {
        self.obj = (0..=self.width).map(|j| if j < self.width { -cost[j].clone() } else { Rational::zero() }).collect();
        for i in 0..self.rows.len() {
            let f = self.obj[self.basis[i]].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..=self.width {
                let delta = &f * &self.rows[i][j];
                self.obj[j] -= delta;
            }
        }
    }
}

/// Solves `max cᵀx` subject to `constraints` and `x ≥ 0`.
pub fn maximize(c: &[Rational], constraints: &[Constraint]) -> Result<LpSolution> {
    let n = c.len();
    let m = constraints.len();
    for row in constraints {
        if row.coeffs.len() != n {
            return Err(Error::Lp("constraint width differs from objective width".into()));
        }
    }
    // Column layout: originals, then one slack/surplus per inequality, then artificials.
    let mut flipped = vec![false; m];
    let mut extra_cols = Vec::with_capacity(m);
    let mut next = n;
    for (i, row) in constraints.iter().enumerate() {
        flipped[i] = row.rhs.is_negative();
        let rel = effective_relation(row.relation, flipped[i]);
        if rel != Relation::Eq {
            extra_cols.push(Some(next));
            next += 1;
        } else {
            extra_cols.push(None);
        }
        let _ = rel;
    }
    let mut identity = vec![0usize; m];
    let mut artificial_start = next;
    for i in 0..m {
        let rel = effective_relation(constraints[i].relation, flipped[i]);
        if rel == Relation::Le {
            identity[i] = extra_cols[i].expect("slack column");
        }
    }
    let mut artificials = Vec::new();
    for i in 0..m {
        let rel = effective_relation(constraints[i].relation, flipped[i]);
        if rel != Relation::Le {
            identity[i] = next;
            artificials.push(next);
            next += 1;
        }
    }
    if artificials.is_empty() {
        artificial_start = next;
    }
    let width = next;
    let mut rows = Vec::with_capacity(m);
    for (i, row) in constraints.iter().enumerate() {
        let sign = if flipped[i] { -Rational::from_integer(1.into()) } else { Rational::from_integer(1.into()) };
        let mut t = vec![Rational::zero(); width + 1];
        for (j, v) in row.coeffs.iter().enumerate() {
            if !v.is_zero() {
                t[j] = v * &sign;
            }
        }
        let rel = effective_relation(row.relation, flipped[i]);
        match rel {
            Relation::Le => t[extra_cols[i].unwrap()] = Rational::from_integer(1.into()),
            Relation::Ge => {
                t[extra_cols[i].unwrap()] = Rational::from_integer((-1).into());
                t[identity[i]] = Rational::from_integer(1.into());
            }
            Relation::Eq => t[identity[i]] = Rational::from_integer(1.into()),
        }
        t[width] = &row.rhs * &sign;
        rows.push(t);
    }
    let mut tab = Tableau { rows, obj: Vec::new(), basis: identity.clone(), width, pivots: 0 };
    let is_artificial = |j: usize| j >= artificial_start;

    if !artificials.is_empty() {
        let cost: Vec<Rational> = (0..width)
            .map(|j| if is_artificial(j) { Rational::from_integer((-1).into()) } else { Rational::zero() })
            .collect();
        tab.reset_objective(&cost);
        tab.optimize(&|_| true)?;
        if !tab.obj[width].is_zero() {
            return Err(Error::Lp("infeasible constraints".into()));
        }
        for r in 0..m {
            if is_artificial(tab.basis[r]) {
                if let Some(j) = (0..artificial_start).find(|&j| !tab.rows[r][j].is_zero()) {
                    tab.pivot(r, j);
                }
            }
        }
    }
    let mut cost = vec![Rational::zero(); width];
    cost[..n].clone_from_slice(c);
    tab.reset_objective(&cost);
    tab.optimize(&|j| !is_artificial(j))?;

    let mut x = vec![Rational::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rows[i][width].clone();
        }
    }
    let duals = (0..m)
        .map(|i| {
            let y = tab.obj[identity[i]].clone();
            if flipped[i] {
                -y
            } else {
                y
            }
        })
        .collect();
    Ok(LpSolution { x, value: tab.obj[width].clone(), duals, pivots: tab.pivots })
}

fn effective_relation(rel: Relation, flipped: bool) -> Relation {
    match (rel, flipped) {
        (Relation::Le, true) => Relation::Ge,
        (Relation::Ge, true) => Relation::Le,
        (r, _) => r,
    }
}
