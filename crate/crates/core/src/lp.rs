//! Exact linear feasibility with weak and strict inequalities.
//!
//! Strict rows `a·x > b` become `a·x - g >= b` for one shared gap `g`,
//! `0 <= g <= 1`. The gap is maximized with a dictionary simplex under
//! Bland's rule and the system is feasible iff the optimum is positive.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{Rational, Show};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Ge,
    Gt,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(VarId, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, values: &[Rational]) -> Rational {
        self.terms
            .iter()
            .fold(Rational::zero(), |acc, (v, c)| acc + c * &values[v.0])
    }

    pub fn holds(&self, values: &[Rational]) -> bool {
        let l = self.lhs(values);
        match self.relation {
            Relation::Ge => l >= self.rhs,
            Relation::Gt => l > self.rhs,
            Relation::Eq => l == self.rhs,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LinearFeasibilityProblem {
    names: Vec<String>,
    constraints: Vec<Constraint>,
}

impl LinearFeasibilityProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&mut self, name: impl Into<String>) -> VarId {
        self.names.push(name.into());
        VarId(self.names.len() - 1)
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.0]
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Adds `sum(terms) relation rhs`, merging repeated variables.
    pub fn add(&mut self, terms: Vec<(VarId, Rational)>, relation: Relation, rhs: Rational) {
        let mut merged: Vec<(VarId, Rational)> = Vec::with_capacity(terms.len());
        let mut sorted = terms;
        sorted.sort_by_key(|(v, _)| *v);
        for (v, c) in sorted {
            match merged.last_mut() {
                Some((last, acc)) if *last == v => *acc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.constraints.push(Constraint {
            terms: merged,
            relation,
            rhs,
        });
    }

    pub fn ge(&mut self, terms: Vec<(VarId, Rational)>, rhs: Rational) {
        self.add(terms, Relation::Ge, rhs);
    }

    pub fn gt(&mut self, terms: Vec<(VarId, Rational)>, rhs: Rational) {
        self.add(terms, Relation::Gt, rhs);
    }

    pub fn eq(&mut self, terms: Vec<(VarId, Rational)>, rhs: Rational) {
        self.add(terms, Relation::Eq, rhs);
    }

    pub fn le(&mut self, terms: Vec<(VarId, Rational)>, rhs: Rational) {
        self.add(negate(terms), Relation::Ge, -rhs);
    }

    pub fn lt(&mut self, terms: Vec<(VarId, Rational)>, rhs: Rational) {
        self.add(negate(terms), Relation::Gt, -rhs);
    }

    pub fn solve(&self) -> Feasibility {
        solve_linear_feasibility(self)
    }
}

fn negate(terms: Vec<(VarId, Rational)>) -> Vec<(VarId, Rational)> {
    terms.into_iter().map(|(v, c)| (v, -c)).collect()
}

impl fmt::Display for LinearFeasibilityProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            let lhs: Vec<String> = c
                .terms
                .iter()
                .map(|(v, k)| format!("{}*{}", Show(k), self.names[v.0]))
                .collect();
            let rel = match c.relation {
                Relation::Ge => ">=",
                Relation::Gt => ">",
                Relation::Eq => "=",
            };
            writeln!(f, "{} {} {}", lhs.join(" + "), rel, Show(&c.rhs))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub values: Vec<Rational>,
}

impl Assignment {
    pub fn get(&self, v: VarId) -> &Rational {
        &self.values[v.0]
    }

    pub fn satisfies(&self, problem: &LinearFeasibilityProblem) -> bool {
        problem.constraints.iter().all(|c| c.holds(&self.values))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Assignment),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn assignment(self) -> Option<Assignment> {
        match self {
            Feasibility::Feasible(a) => Some(a),
            Feasibility::Infeasible => None,
        }
    }
}

pub fn solve_linear_feasibility(problem: &LinearFeasibilityProblem) -> Feasibility {
    let n = problem.names.len();
    let has_strict = problem.constraints.iter().any(|c| c.relation == Relation::Gt);
    // Columns: x_j^+ = 2j, x_j^- = 2j+1, gap = 2n.
    let ncols = 2 * n + usize::from(has_strict);
    let gap_col = 2 * n;

    // Rows in `a·z <= b` form, deduplicated.
    let mut rows: BTreeSet<(Vec<(usize, Rational)>, Rational)> = BTreeSet::new();
    let mut push = |coeffs: Vec<(usize, Rational)>, rhs: Rational| {
        rows.insert((coeffs, rhs));
    };
    for c in &problem.constraints {
        let expand = |sign: &Rational| -> Vec<(usize, Rational)> {
            let mut out = Vec::new();
            for (v, k) in &c.terms {
                let k = k * sign;
                out.push((2 * v.0, k.clone()));
                out.push((2 * v.0 + 1, -k));
            }
            out
        };
        let neg = -Rational::one();
        match c.relation {
            Relation::Ge => push(expand(&neg), -c.rhs.clone()),
            Relation::Gt => {
                let mut co = expand(&neg);
                co.push((gap_col, Rational::one()));
                push(co, -c.rhs.clone());
            }
            Relation::Eq => {
                push(expand(&Rational::one()), c.rhs.clone());
                push(expand(&neg), -c.rhs.clone());
            }
        }
    }
    if has_strict {
        push(vec![(gap_col, Rational::one())], Rational::one());
    }

    let rows: Vec<(Vec<(usize, Rational)>, Rational)> = rows.into_iter().collect();
    let mut dict = Dictionary::new(ncols, &rows);
    if !dict.make_feasible() {
        return Feasibility::Infeasible;
    }
    let mut objective = vec![Rational::zero(); ncols + 1];
    if has_strict {
        objective[gap_col + 1] = Rational::one();
    }
    dict.set_objective(&objective);
    dict.optimize();
    let z = dict.values();
    if has_strict && !z[gap_col].is_positive() {
        return Feasibility::Infeasible;
    }
    let values: Vec<Rational> = (0..n).map(|j| &z[2 * j] - &z[2 * j + 1]).collect();
    let a = Assignment { values };
    debug_assert!(a.satisfies(problem), "simplex returned a violating point");
    Feasibility::Feasible(a)
}

/// Dictionary `basic_i = d[i][0] + sum_j d[i][j+1] * nonbasic_j`.
/// Variable labels: structural `0..ncols`, slack `ncols..ncols+m`,
/// auxiliary `ncols+m` during phase one.
struct Dictionary {
    d: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    nonbasis: Vec<usize>,
    obj: Vec<Rational>,
    ntotal: usize,
}

impl Dictionary {
    fn new(ncols: usize, rows: &[(Vec<(usize, Rational)>, Rational)]) -> Self {
        let m = rows.len();
        let mut d = Vec::with_capacity(m);
        for (coeffs, rhs) in rows {
            let mut row = vec![Rational::zero(); ncols + 1];
            row[0] = rhs.clone();
            for (j, k) in coeffs {
                row[j + 1] -= k;
            }
            d.push(row);
        }
        Dictionary {
            d,
            basis: (ncols..ncols + m).collect(),
            nonbasis: (0..ncols).collect(),
            obj: vec![Rational::zero(); ncols + 1],
            ntotal: ncols + m,
        }
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let piv = self.d[r][s + 1].clone();
        let inv = Rational::one() / &piv;
        let mut new_row: Vec<Rational> = self.d[r].iter().map(|x| -(x * &inv)).collect();
        new_row[s + 1] = inv;
        for i in 0..self.d.len() {
            if i == r {
                continue;
            }
            let f = self.d[i][s + 1].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.d[i];
            row[s + 1] = Rational::zero();
            for (x, y) in row.iter_mut().zip(&new_row) {
                if !y.is_zero() {
                    *x += &f * y;
                }
            }
        }
        let f = self.obj[s + 1].clone();
        if !f.is_zero() {
            self.obj[s + 1] = Rational::zero();
            for (x, y) in self.obj.iter_mut().zip(&new_row) {
                if !y.is_zero() {
                    *x += &f * y;
                }
            }
        }
        self.d[r] = new_row;
        std::mem::swap(&mut self.basis[r], &mut self.nonbasis[s]);
    }

    /// Runs the simplex on the current objective. Returns false if unbounded.
    fn optimize(&mut self) -> bool {
        loop {
            let entering = (0..self.nonbasis.len())
                .filter(|&j| self.obj[j + 1].is_positive())
                .min_by_key(|&j| self.nonbasis[j]);
            let Some(s) = entering else { return true };
            let mut best: Option<(Rational, usize, usize)> = None;
            for (i, row) in self.d.iter().enumerate() {
                let c = &row[s + 1];
                if c.is_negative() {
                    let ratio = &row[0] / -c;
                    let label = self.basis[i];
                    let better = match &best {
                        None => true,
                        Some((b, _, bl)) => ratio < *b || (ratio == *b && label < *bl),
                    };
                    if better {
                        best = Some((ratio, i, label));
                    }
                }
            }
            match best {
                Some((_, r, _)) => self.pivot(r, s),
                None => return false,
            }
        }
    }

    /// Phase one with one auxiliary column. Returns false when infeasible.
    fn make_feasible(&mut self) -> bool {
        let worst = (0..self.d.len())
            .filter(|&i| self.d[i][0].is_negative())
            .min_by(|&a, &b| self.d[a][0].cmp(&self.d[b][0]).then(a.cmp(&b)));
        let Some(r) = worst else { return true };
        let aux = self.ntotal;
        for row in &mut self.d {
            row.push(Rational::one());
        }
        self.nonbasis.push(aux);
        let s = self.nonbasis.len() - 1;
        self.obj = vec![Rational::zero(); self.nonbasis.len() + 1];
        self.obj[s + 1] = -Rational::one();
        self.pivot(r, s);
        self.optimize();
        if self.obj[0].is_negative() {
            return false;
        }
        if let Some(r) = self.basis.iter().position(|&b| b == aux) {
            let s = (0..self.nonbasis.len())
                .find(|&j| !self.d[r][j + 1].is_zero())
                .expect("auxiliary row has a nonzero coefficient");
            self.pivot(r, s);
        }
        let s = self.nonbasis.iter().position(|&b| b == aux).unwrap();
        self.nonbasis.remove(s);
        for row in &mut self.d {
            row.remove(s + 1);
        }
        true
    }

    /// Sets `max sum_j c[j+1] * z_j + c[0]` over structural labels.
    fn set_objective(&mut self, c: &[Rational]) {
        let mut obj = vec![Rational::zero(); self.nonbasis.len() + 1];
        obj[0] = c[0].clone();
        for (j, &label) in self.nonbasis.iter().enumerate() {
            if label + 1 < c.len() {
                obj[j + 1] += &c[label + 1];
            }
        }
        for (i, &label) in self.basis.iter().enumerate() {
            if label + 1 < c.len() && !c[label + 1].is_zero() {
                let k = &c[label + 1];
                for (o, x) in obj.iter_mut().zip(&self.d[i]) {
                    *o += k * x;
                }
            }
        }
        self.obj = obj;
    }

    fn values(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.ntotal];
        for (i, &label) in self.basis.iter().enumerate() {
            v[label] = self.d[i][0].clone();
        }
        v
    }
}
