//! Dense two-phase simplex solver for small linear programs.
//!
//! Problems are stated as `min c.x` over `x >= 0` with `<=`, `>=`, or
//! `=` rows. Bland's rule is used for both the entering and leaving
//! choices, so the method terminates on degenerate instances. The
//! solver also reports row duals (sensitivities of the optimum to each
//! right-hand side), which callers use to read a primal solution off a
//! solved dual.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Rel, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
    /// `duals[i]` is d(objective)/d(rhs_i) at the optimum.
    pub row_duals: Vec<f64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex iteration limit reached")]
    IterationLimit,
}

const TOL: f64 = 1e-9;

impl LpProblem {
    /// `min objective . x` subject to rows added later, `x >= 0`.
    pub fn minimize(objective: Vec<f64>) -> Self {
        Self { num_vars: objective.len(), objective, rows: Vec::new() }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, rel: Rel, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars, "row width must match variable count");
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Simplex::new(self).run()
    }
}

struct Simplex {
    num_vars: usize,
    num_rows: usize,
    total_cols: usize,
    /// `tableau[i]` holds the row coefficients followed by the rhs.
    tableau: Vec<Vec<f64>>,
    basis: Vec<usize>,
    costs: Vec<f64>,
    is_artificial: Vec<bool>,
    /// Column index of the slack/surplus/artificial used to read the
    /// dual of each row, with the sign to apply to its reduced cost.
    dual_col: Vec<(usize, f64)>,
    flipped: Vec<bool>,
}

impl Simplex {
    fn new(problem: &LpProblem) -> Self {
        let num_vars = problem.num_vars;
        let num_rows = problem.rows.len();

        // Normalize to nonnegative right-hand sides.
        let mut rows = Vec::with_capacity(num_rows);
        let mut flipped = vec![false; num_rows];
        for (i, (coeffs, rel, rhs)) in problem.rows.iter().enumerate() {
            if *rhs < 0.0 {
                let neg: Vec<f64> = coeffs.iter().map(|c| -c).collect();
                let rel = match rel {
                    Rel::Le => Rel::Ge,
                    Rel::Ge => Rel::Le,
                    Rel::Eq => Rel::Eq,
                };
                flipped[i] = true;
                rows.push((neg, rel, -rhs));
            } else {
                rows.push((coeffs.clone(), *rel, *rhs));
            }
        }

        let mut num_extra = 0;
        for (_, rel, _) in &rows {
            num_extra += match rel {
                Rel::Le | Rel::Eq => 1,
                Rel::Ge => 2,
            };
        }
        let total_cols = num_vars + num_extra;

        let mut tableau = vec![vec![0.0; total_cols + 1]; num_rows];
        let mut basis = vec![0; num_rows];
        let mut is_artificial = vec![false; total_cols];
        let mut dual_col = vec![(0, 0.0); num_rows];
        let mut next_col = num_vars;

        for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
            tableau[i][..num_vars].copy_from_slice(coeffs);
            tableau[i][total_cols] = *rhs;
            match rel {
                Rel::Le => {
                    tableau[i][next_col] = 1.0;
                    basis[i] = next_col;
                    dual_col[i] = (next_col, -1.0);
                    next_col += 1;
                }
                Rel::Ge => {
                    tableau[i][next_col] = -1.0;
                    dual_col[i] = (next_col, 1.0);
                    next_col += 1;
                    tableau[i][next_col] = 1.0;
                    is_artificial[next_col] = true;
                    basis[i] = next_col;
                    next_col += 1;
                }
                Rel::Eq => {
                    tableau[i][next_col] = 1.0;
                    is_artificial[next_col] = true;
                    basis[i] = next_col;
                    dual_col[i] = (next_col, -1.0);
                    next_col += 1;
                }
            }
        }

        let mut costs = problem.objective.clone();
        costs.resize(total_cols, 0.0);

        Self {
            num_vars,
            num_rows,
            total_cols,
            tableau,
            basis,
            costs,
            is_artificial,
            dual_col,
            flipped,
        }
    }

    fn run(mut self) -> Result<LpSolution, LpError> {
        // Phase 1: drive the artificial variables to zero.
        let phase1_costs: Vec<f64> = self
            .is_artificial
            .iter()
            .map(|&a| if a { 1.0 } else { 0.0 })
            .collect();
        let mut obj_row = self.reduced_costs(&phase1_costs);
        let infeasibility = self.iterate(&mut obj_row, &phase1_costs, true)?;
        if infeasibility > 1e-7 {
            return Err(LpError::Infeasible);
        }
        self.evict_basic_artificials();

        // Phase 2: optimize the real objective; artificial columns may
        // no longer enter the basis.
        let costs = self.costs.clone();
        let mut obj_row = self.reduced_costs(&costs);
        self.iterate(&mut obj_row, &costs, false)?;

        let mut x = vec![0.0; self.total_cols];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.tableau[i][self.total_cols];
        }
        let objective: f64 = (0..self.num_vars).map(|j| self.costs[j] * x[j]).sum();

        let row_duals = (0..self.num_rows)
            .map(|i| {
                let (col, sign) = self.dual_col[i];
                let y = sign * obj_row[col];
                if self.flipped[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();

        Ok(LpSolution { objective, x: x[..self.num_vars].to_vec(), row_duals })
    }

    /// Reduced costs `c_j - c_B . T_j` for the current basis, with the
    /// current objective value appended.
    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let mut row = costs.to_vec();
        row.push(0.0);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs[b];
            if cb != 0.0 {
                for j in 0..=self.total_cols {
                    row[j] -= cb * self.tableau[i][j];
                }
            }
        }
        row
    }

    /// Bland-rule simplex loop; returns the final objective value of
    /// `costs` (phase 1 passes the artificial costs, so this is the
    /// residual infeasibility).
    fn iterate(
        &mut self,
        obj_row: &mut Vec<f64>,
        costs: &[f64],
        allow_artificial: bool,
    ) -> Result<f64, LpError> {
        let max_iterations = 200 * (self.num_rows + self.total_cols) + 10_000;
        for _ in 0..max_iterations {
            let entering = (0..self.total_cols).find(|&j| {
                obj_row[j] < -TOL && (allow_artificial || !self.is_artificial[j])
            });
            let entering = match entering {
                Some(j) => j,
                None => {
                    let value: f64 = self
                        .basis
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| costs[b] * self.tableau[i][self.total_cols])
                        .sum();
                    return Ok(value);
                }
            };

            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.num_rows {
                let a = self.tableau[i][entering];
                if a > TOL {
                    let ratio = self.tableau[i][self.total_cols] / a;
                    match leaving {
                        None => leaving = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio < lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                leaving = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let (pivot_row, _) = leaving.ok_or(LpError::Unbounded)?;
            self.pivot(pivot_row, entering, obj_row);
        }
        Err(LpError::IterationLimit)
    }

    fn pivot(&mut self, pivot_row: usize, entering: usize, obj_row: &mut [f64]) {
        let pivot = self.tableau[pivot_row][entering];
        for value in self.tableau[pivot_row].iter_mut() {
            *value /= pivot;
        }
        for i in 0..self.num_rows {
            if i == pivot_row {
                continue;
            }
            let factor = self.tableau[i][entering];
            if factor != 0.0 {
                for j in 0..=self.total_cols {
                    self.tableau[i][j] -= factor * self.tableau[pivot_row][j];
                }
                self.tableau[i][entering] = 0.0;
            }
        }
        let factor = obj_row[entering];
        if factor != 0.0 {
            for j in 0..=self.total_cols {
                obj_row[j] -= factor * self.tableau[pivot_row][j];
            }
            obj_row[entering] = 0.0;
        }
        self.basis[pivot_row] = entering;
    }

    /// Pivot out any artificial still basic after phase 1. Rows whose
    /// structural coefficients are all zero are redundant and keep
    /// their artificial at level zero.
    fn evict_basic_artificials(&mut self) {
        for i in 0..self.num_rows {
            if !self.is_artificial[self.basis[i]] {
                continue;
            }
            if let Some(j) = (0..self.total_cols)
                .find(|&j| !self.is_artificial[j] && self.tableau[i][j].abs() > TOL)
            {
                let mut dummy = vec![0.0; self.total_cols + 1];
                self.pivot(i, j, &mut dummy);
            }
        }
    }
}
