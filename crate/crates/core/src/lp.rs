//! Dense two-phase simplex over a [`Scalar`], with Bland's pivoting rule.
//!
//! Variables of a [`LinearProgram`] are free unless it is built with
//! [`LinearProgram::nonnegative`]. Infeasible programs carry a Farkas
//! certificate: one multiplier per constraint, nonnegative on `≥` rows,
//! nonpositive on `≤` rows and free on `=` rows, whose combination of
//! left-hand sides vanishes (is `≤ 0` for nonnegative variables) while the
//! combination of right-hand sides is positive.

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};
use crate::space::StateSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Eq,
    Le,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<S> {
    pub variables: usize,
    /// All variables are constrained to be `≥ 0`.
    pub nonnegative: bool,
    pub constraints: Vec<Constraint<S>>,
    pub objective: Option<(Sense, Vec<S>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Feasible,
    Infeasible,
    Optimal,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult<S> {
    pub status: LpStatus,
    /// A feasible point; for `Optimal` it attains the optimum.
    pub witness: Option<Vec<S>>,
    pub optimum: Option<S>,
    pub farkas: Option<Vec<S>>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn feasibility(variables: usize) -> Self {
        Self {
            variables,
            nonnegative: false,
            constraints: Vec::new(),
            objective: None,
        }
    }

    /// Program over `x ≥ 0`.
    pub fn nonnegative(variables: usize) -> Self {
        Self {
            nonnegative: true,
            ..Self::feasibility(variables)
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<S>, relation: Relation, rhs: S) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn with_objective(mut self, sense: Sense, coeffs: Vec<S>) -> Self {
        self.objective = Some((sense, coeffs));
        self
    }

    fn check(&self) -> Result<()> {
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.variables {
                return Err(Error::MalformedProgram(format!(
                    "constraint {k} has {} coefficients for {} variables",
                    c.coeffs.len(),
                    self.variables
                )));
            }
        }
        if let Some((_, obj)) = &self.objective {
            if obj.len() != self.variables {
                return Err(Error::MalformedProgram(format!(
                    "objective has {} coefficients for {} variables",
                    obj.len(),
                    self.variables
                )));
            }
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpResult<S>> {
        self.check()?;
        Tableau::build(self).run(self)
    }
}

/// Re-checks that `x` satisfies every constraint (within tolerance for floats).
pub fn satisfies<S: Scalar>(lp: &LinearProgram<S>, x: &[S]) -> bool {
    x.len() == lp.variables
        && (!lp.nonnegative || x.iter().all(|v| !v.is_clearly_negative()))
        && lp.constraints.iter().all(|c| {
            let lhs = dot(&c.coeffs, x);
            match c.relation {
                Relation::Ge => !lhs.approx_cmp(&c.rhs).is_lt(),
                Relation::Le => !lhs.approx_cmp(&c.rhs).is_gt(),
                Relation::Eq => lhs.approx_eq(&c.rhs),
            }
        })
}

/// Re-checks a Farkas certificate against the program.
pub fn farkas_certifies<S: Scalar>(lp: &LinearProgram<S>, y: &[S]) -> bool {
    if y.len() != lp.constraints.len() {
        return false;
    }
    let signs_ok = lp.constraints.iter().zip(y).all(|(c, m)| match c.relation {
        Relation::Ge => !m.is_clearly_negative(),
        Relation::Le => !m.is_clearly_positive(),
        Relation::Eq => true,
    });
    let combo_vanishes = (0..lp.variables).all(|j| {
        let combo = lp.constraints.iter().zip(y).fold(S::zero(), |acc, (c, m)| {
            acc + m.clone() * c.coeffs[j].clone()
        });
        if lp.nonnegative {
            !combo.is_clearly_positive()
        } else {
            combo.is_negligible()
        }
    });
    let rhs = lp
        .constraints
        .iter()
        .zip(y)
        .fold(S::zero(), |acc, (c, m)| acc + m.clone() * c.rhs.clone());
    signs_ok && combo_vanishes && rhs.is_clearly_positive()
}

/// Tableau in equality form `Ā z + a = b̄`, `z, a ≥ 0`, `b̄ ≥ 0`.
///
/// Columns: `x⁺` (n), `x⁻` (n, only for free variables), one slack per
/// inequality, one artificial per row. The last column holds the right-hand side. The objective row stores
/// reduced costs and, in its last entry, minus the current objective value.
struct Tableau<S> {
    rows: Vec<Vec<S>>,
    obj: Vec<S>,
    basis: Vec<usize>,
    flipped: Vec<bool>,
    n: usize,
    /// Number of `x⁻` columns: `n` for free variables, 0 otherwise.
    neg: usize,
    first_artificial: usize,
    width: usize,
}

impl<S: Scalar> Tableau<S> {
    fn build(lp: &LinearProgram<S>) -> Self {
        let n = lp.variables;
        let neg = if lp.nonnegative { 0 } else { n };
        let m = lp.constraints.len();
        let slacks = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let first_artificial = n + neg + slacks;
        let width = first_artificial + m + 1;
        let mut rows = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        let mut slack = n + neg;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![S::zero(); width];
            row[..n].clone_from_slice(&c.coeffs[..n]);
            for j in 0..neg {
                row[n + j] = -c.coeffs[j].clone();
            }
            match c.relation {
                Relation::Ge => {
                    row[slack] = -S::one();
                    slack += 1;
                }
                Relation::Le => {
                    row[slack] = S::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[width - 1] = c.rhs.clone();
            let flip = c.rhs.is_negative();
            if flip {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
            row[first_artificial + i] = S::one();
            rows.push(row);
            flipped.push(flip);
        }
        // Phase-one costs: 1 on artificials, priced out against the basis.
        let mut obj = vec![S::zero(); width];
        for row in &rows {
            for j in 0..first_artificial {
                obj[j] -= row[j].clone();
            }
            obj[width - 1] -= row[width - 1].clone();
        }
        Self {
            rows,
            obj,
            basis: (first_artificial..first_artificial + m).collect(),
            flipped,
            n,
            neg,
            first_artificial,
            width,
        }
    }

    fn rhs(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let inv = S::one() / self.rows[r][c].clone();
        for j in 0..w {
            let v = self.rows[r][j].clone() * inv.clone();
            self.rows[r][j] = v;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<S>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for j in 0..w {
                if !pivot_row[j].is_zero() {
                    let v = row[j].clone() - f.clone() * pivot_row[j].clone();
                    row[j] = v;
                }
            }
            row[c] = S::zero();
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Bland's rule on columns `< limit`. Returns `false` when unbounded.
    fn optimize(&mut self, limit: usize) -> bool {
        let rhs = self.rhs();
        loop {
            let Some(enter) = (0..limit).find(|&j| self.obj[j].is_clearly_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, S)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_clearly_positive() {
                    continue;
                }
                let ratio = row[rhs].clone() / row[enter].clone();
                let better = match &leave {
                    None => true,
                    Some((li, best)) => match ratio.approx_cmp(best) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Equal => self.basis[i] < self.basis[*li],
                        std::cmp::Ordering::Greater => false,
                    },
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }

    fn point(&self) -> Vec<S> {
        let rhs = self.rhs();
        let mut z = vec![S::zero(); self.first_artificial];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.first_artificial {
                z[b] = self.rows[i][rhs].clone();
            }
        }
        (0..self.n)
            .map(|j| {
                if j < self.neg {
                    z[j].clone() - z[self.n + j].clone()
                } else {
                    z[j].clone()
                }
            })
            .collect()
    }

    fn run(mut self, lp: &LinearProgram<S>) -> Result<LpResult<S>> {
        let rhs = self.rhs();
        let art = self.first_artificial;
        let total = self.width - 1;
        self.optimize(total);
        let infeasibility = -self.obj[rhs].clone();
        if infeasibility.is_clearly_positive() {
            // Duals of the phase-one optimum: y'_i = 1 - reduced cost of artificial i.
            let farkas = (0..self.rows.len())
                .map(|i| {
                    let y = S::one() - self.obj[art + i].clone();
                    if self.flipped[i] {
                        -y
                    } else {
                        y
                    }
                })
                .collect();
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                witness: None,
                optimum: None,
                farkas: Some(farkas),
            });
        }

        // Drive artificials out of the basis; rows that cannot be are redundant.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= art {
                if let Some(c) = (0..art).find(|&j| !self.rows[i][j].is_negligible()) {
                    self.pivot(i, c);
                } else {
                    self.rows.remove(i);
                    self.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }

        let Some((sense, coeffs)) = &lp.objective else {
            return Ok(LpResult {
                status: LpStatus::Feasible,
                witness: Some(self.point()),
                optimum: None,
                farkas: None,
            });
        };

        let mut cost = vec![S::zero(); self.width];
        for j in 0..self.n {
            let c = match sense {
                Sense::Minimize => coeffs[j].clone(),
                Sense::Maximize => -coeffs[j].clone(),
            };
            if j < self.neg {
                cost[self.n + j] = -c.clone();
            }
            cost[j] = c;
        }
        let mut obj = cost.clone();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.width {
                obj[j] -= cb.clone() * row[j].clone();
            }
        }
        self.obj = obj;
        if !self.optimize(art) {
            return Ok(LpResult {
                status: LpStatus::Unbounded,
                witness: Some(self.point()),
                optimum: None,
                farkas: None,
            });
        }
        let x = self.point();
        let optimum = dot(coeffs, &x);
        Ok(LpResult {
            status: LpStatus::Optimal,
            witness: Some(x),
            optimum: Some(optimum),
            farkas: None,
        })
    }
}

/// Maximum of a linear functional over the state space, by vertex scan.
///
/// Returns the optimum and the lowest-index maximizing vertex.
pub fn maximize_over_polytope<S: Scalar>(
    objective: &[S],
    space: &StateSpace<S>,
) -> Result<(S, usize)> {
    if objective.len() != space.dimension() {
        return Err(Error::DimensionMismatch {
            expected: space.dimension(),
            found: objective.len(),
        });
    }
    let mut best: Option<(S, usize)> = None;
    for (i, v) in space.vertices().iter().enumerate() {
        let val = dot(objective, v);
        if best.as_ref().is_none_or(|(b, _)| val.approx_cmp(b).is_gt()) {
            best = Some((val, i));
        }
    }
    best.ok_or_else(|| Error::Degenerate("state space has no vertices".into()))
}
