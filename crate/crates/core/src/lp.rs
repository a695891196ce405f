//! Dense two-phase simplex for small linear programs.
//!
//! All variables are nonnegative. Constraints may be `<=`, `>=` or `=`.
//! Pivoting is deterministic: Dantzig's rule with lowest-index ties, falling
//! back to Bland's rule after a run of degenerate pivots so the method cannot
//! cycle. Dual values are read off the final tableau, which lets callers
//! check strong duality without a second solve.

use thiserror::Error;

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("linear program is infeasible (phase-one residual {residual:.3e})")]
    Infeasible { residual: f64 },
    #[error("linear program is unbounded along variable {column}")]
    Unbounded { column: usize },
    #[error("simplex stopped after {iterations} iterations (objective {objective:.6e})")]
    IterationLimit { iterations: usize, objective: f64 },
    #[error("constraint {row} references variable {column} but the model has {n_vars} variables")]
    BadIndex {
        row: usize,
        column: usize,
        n_vars: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per constraint, in the sign convention of the model's sense.
    pub duals: Vec<f64>,
    /// `sum(rhs_i * dual_i)`; equals `objective` at an optimum.
    pub dual_objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn duality_gap(&self) -> f64 {
        (self.objective - self.dual_objective).abs()
    }
}

impl LinearProgram {
    pub fn new(sense: Sense, n_vars: usize) -> Self {
        Self {
            sense,
            objective: vec![0.0; n_vars],
            constraints: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective_coeffs(&self) -> &[f64] {
        &self.objective
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        for (row, c) in self.constraints.iter().enumerate() {
            if let Some(&(column, _)) = c.coeffs.iter().find(|(j, _)| *j >= self.n_vars()) {
                return Err(LpError::BadIndex {
                    row,
                    column,
                    n_vars: self.n_vars(),
                });
            }
        }
        let mut tab = Tableau::build(self);
        tab.run()?;
        Ok(tab.extract(self))
    }
}

/// Row-major simplex tableau for `min c x, A x = b, x >= 0`.
struct Tableau {
    m: usize,
    n_struct: usize,
    /// structural + slack columns
    n_real: usize,
    /// all columns except rhs
    ncols: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    /// column holding `+e_r` of the original system for each row
    unit_col: Vec<usize>,
    /// row multiplied by -1 when its rhs was negative
    flipped: Vec<bool>,
    cost: Vec<f64>,
    iterations: usize,
    limit: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let n_struct = lp.n_vars();
        let n_slack = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let n_real = n_struct + n_slack;

        let mut flipped = vec![false; m];
        let mut relations = Vec::with_capacity(m);
        for (r, c) in lp.constraints.iter().enumerate() {
            let mut rel = c.relation;
            if c.rhs < 0.0 {
                flipped[r] = true;
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            relations.push(rel);
        }
        let n_art = relations.iter().filter(|r| **r != Relation::Le).count();
        let ncols = n_real + n_art;
        let width = ncols + 1;
        let mut data = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut unit_col = vec![0; m];

        let mut slack = n_struct;
        let mut art = n_real;
        for (r, c) in lp.constraints.iter().enumerate() {
            let sign = if flipped[r] { -1.0 } else { 1.0 };
            let row = &mut data[r * width..(r + 1) * width];
            for &(j, a) in &c.coeffs {
                row[j] += sign * a;
            }
            row[ncols] = sign * c.rhs;
            match relations[r] {
                Relation::Le => {
                    row[slack] = 1.0;
                    basis[r] = slack;
                    unit_col[r] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                    row[art] = 1.0;
                    basis[r] = art;
                    unit_col[r] = art;
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = 1.0;
                    basis[r] = art;
                    unit_col[r] = art;
                    art += 1;
                }
            }
        }

        let mut cost = vec![0.0; ncols];
        let flip = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
        for (j, c) in lp.objective.iter().enumerate() {
            cost[j] = flip * c;
        }

        Self {
            m,
            n_struct,
            n_real,
            ncols,
            data,
            basis,
            unit_col,
            flipped,
            cost,
            iterations: 0,
            limit: 200 * (m + ncols) + 1000,
        }
    }

    fn width(&self) -> usize {
        self.ncols + 1
    }

    fn at(&self, r: usize, j: usize) -> f64 {
        self.data[r * self.width() + j]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.ncols)
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let w = self.width();
        let mut d = cost.to_vec();
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.data[r * w..r * w + self.ncols];
                for (dj, a) in d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    fn pivot(&mut self, pr: usize, pc: usize, d: &mut [f64]) {
        let w = self.width();
        let pv = self.data[pr * w + pc];
        for v in &mut self.data[pr * w..(pr + 1) * w] {
            *v /= pv;
        }
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.m {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f != 0.0 {
                for (v, p) in self.data[r * w..(r + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                self.data[r * w + pc] = 0.0;
            }
        }
        let f = d[pc];
        if f != 0.0 {
            for (dj, p) in d.iter_mut().zip(&pivot_row[..self.ncols]) {
                *dj -= f * p;
            }
            d[pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.iterations += 1;
    }

    /// Optimizes `cost` over columns `< allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<(), LpError> {
        let mut d = self.reduced_costs(cost);
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= self.limit {
                let objective = (0..self.m).map(|r| cost[self.basis[r]] * self.rhs(r)).sum();
                return Err(LpError::IterationLimit {
                    iterations: self.iterations,
                    objective,
                });
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let mut entering = None;
            let mut best = -COST_TOL;
            for (j, &dj) in d.iter().enumerate().take(allowed) {
                if dj < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = dj;
                }
            }
            let Some(pc) = entering else {
                return Ok(());
            };

            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            let tie = (ratio - lratio).abs() <= 1e-12 * (1.0 + lratio.abs());
                            if ratio < lratio && !tie
                                || tie && self.basis[r] < self.basis[lr]
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, ratio)) = leave else {
                return Err(LpError::Unbounded { column: pc });
            };
            if ratio <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(pr, pc, &mut d);
        }
    }

    fn run(&mut self) -> Result<(), LpError> {
        let has_art = self.ncols > self.n_real;
        if has_art {
            let mut phase1 = vec![0.0; self.ncols];
            for c in phase1.iter_mut().skip(self.n_real) {
                *c = 1.0;
            }
            self.optimize(&phase1, self.ncols)?;
            let residual: f64 = (0..self.m)
                .filter(|&r| self.basis[r] >= self.n_real)
                .map(|r| self.rhs(r))
                .sum();
            let scale = (0..self.m).map(|r| self.rhs(r).abs()).fold(1.0, f64::max);
            if residual > 1e-7 * scale {
                return Err(LpError::Infeasible { residual });
            }
            // drive zero-valued artificials out of the basis where possible
            let mut scratch = vec![0.0; self.ncols];
            for r in 0..self.m {
                if self.basis[r] < self.n_real {
                    continue;
                }
                let col = (0..self.n_real).find(|&j| self.at(r, j).abs() > PIVOT_TOL);
                if let Some(j) = col {
                    self.pivot(r, j, &mut scratch);
                }
            }
        }
        let cost = self.cost.clone();
        self.optimize(&cost, self.n_real)
    }

    fn extract(&self, lp: &LinearProgram) -> LpSolution {
        let mut x = vec![0.0; self.n_struct];
        for r in 0..self.m {
            let b = self.basis[r];
            if b < self.n_struct {
                x[b] = self.rhs(r).max(0.0);
            }
        }
        let objective: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();

        let d = self.reduced_costs(&self.cost);
        let to_model = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
        let duals: Vec<f64> = (0..self.m)
            .map(|r| {
                let y = self.cost[self.unit_col[r]] - d[self.unit_col[r]];
                let y = if self.flipped[r] { -y } else { y };
                to_model * y
            })
            .collect();
        let dual_objective = lp
            .constraints
            .iter()
            .zip(&duals)
            .map(|(c, y)| c.rhs * y)
            .sum();

        LpSolution {
            x,
            objective,
            duals,
            dual_objective,
            iterations: self.iterations,
        }
    }
}
