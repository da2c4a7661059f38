//! Dense simplex for programs of the form `max v·y s.t. M y ≤ c, y ≥ 0`
//! with `c ≥ 0`, so the all-slack basis is always primal feasible and no
//! phase-one is needed. Bland's rule keeps pivoting finite.
//!
//! Every LP in this crate is funneled through this shape: a program
//! `min c·x s.t. A x ≥ b, x ≥ 0` is solved as its dual
//! `max b·y s.t. Aᵀ y ≤ c, y ≥ 0`, whose row duals recover `x`. Columns can
//! be appended between solves, which is exactly the cutting-plane /
//! column-generation access pattern.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const REDUCED_COST_TOL: f64 = 1e-9;

pub(crate) struct MaxForm {
    rows: usize,
    /// Structural column count (columns `rows..rows+ncols` in the tableau).
    ncols: usize,
    /// One tableau row per constraint: slack block, structural block.
    tab: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// Reduced costs `z_j − v_j`; optimal when all `≥ 0`.
    obj: Vec<f64>,
    /// Basic variable per row (tableau column index).
    basis: Vec<usize>,
    values: Vec<f64>,
}

pub(crate) struct MaxFormSolution {
    /// Optimal structural variable values `y`.
    pub col_values: Vec<f64>,
    /// Row duals; for the dual-form usage these are the primal `x`.
    pub row_duals: Vec<f64>,
    pub objective: f64,
}

impl MaxForm {
    /// One constraint per entry of `caps`, all initially `0 ≤ cap`.
    pub fn new(caps: &[f64]) -> Result<Self> {
        if caps.iter().any(|&c| !c.is_finite() || c < 0.0) {
            return Err(Error::UnboundedOrInfeasibleLP);
        }
        let rows = caps.len();
        let mut tab = Vec::with_capacity(rows);
        for r in 0..rows {
            let mut row = vec![0.0; rows];
            row[r] = 1.0;
            tab.push(row);
        }
        Ok(MaxForm {
            rows,
            ncols: 0,
            tab,
            rhs: caps.to_vec(),
            obj: vec![0.0; rows],
            basis: (0..rows).collect(),
            values: Vec::new(),
        })
    }

    /// Append a structural column with objective coefficient `value` and
    /// constraint coefficients `coeffs`, re-expressed in the current basis.
    pub fn add_column(&mut self, value: f64, coeffs: &[f64]) -> usize {
        debug_assert_eq!(coeffs.len(), self.rows);
        // The slack block of the tableau holds B^{-1}, so the basis-space
        // column is (slack block) · coeffs.
        for r in 0..self.rows {
            let mut entry = 0.0;
            for (i, &a) in coeffs.iter().enumerate() {
                if a != 0.0 {
                    entry += self.tab[r][i] * a;
                }
            }
            self.tab[r].push(entry);
        }
        let mut reduced = -value;
        for (i, &a) in coeffs.iter().enumerate() {
            if a != 0.0 {
                reduced += self.obj[i] * a;
            }
        }
        self.obj.push(reduced);
        self.values.push(value);
        self.ncols += 1;
        self.ncols - 1
    }

    /// Run primal simplex to optimality from the current basis.
    ///
    /// Pricing is Dantzig (most negative reduced cost); after a long run of
    /// degenerate pivots the rule drops to Bland for the rest of the call,
    /// which rules out cycling.
    pub fn solve(&mut self) -> Result<MaxFormSolution> {
        let width = self.rows + self.ncols;
        let pivot_limit = 20_000 + 200 * width;
        let stall_limit = 100 + 2 * self.rows;
        let mut stalled = 0usize;
        let mut bland = false;
        for _ in 0..pivot_limit {
            let entering = if bland {
                (0..width).find(|&j| self.obj[j] < -REDUCED_COST_TOL)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..width {
                    let rc = self.obj[j];
                    if rc < -REDUCED_COST_TOL && best.is_none_or(|(_, b)| rc < b) {
                        best = Some((j, rc));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(entering) = entering else {
                return Ok(self.extract());
            };
            // Ratio test; ties by smallest basic variable index.
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for r in 0..self.rows {
                let coef = self.tab[r][entering];
                if coef > PIVOT_TOL {
                    let ratio = self.rhs[r] / coef;
                    let better = ratio < best_ratio - 1e-12
                        || (ratio < best_ratio + 1e-12
                            && leave.is_some_and(|l| self.basis[r] < self.basis[l]));
                    if better {
                        best_ratio = ratio;
                        leave = Some(r);
                    }
                }
            }
            let Some(leaving) = leave else {
                return Err(Error::UnboundedOrInfeasibleLP);
            };
            if best_ratio <= 1e-12 {
                stalled += 1;
                if stalled > stall_limit {
                    bland = true;
                }
            } else {
                stalled = 0;
            }
            self.pivot(leaving, entering);
        }
        Err(Error::UnboundedOrInfeasibleLP)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.rows + self.ncols;
        let inv = 1.0 / self.tab[row][col];
        for j in 0..width {
            self.tab[row][j] *= inv;
        }
        self.rhs[row] *= inv;
        self.tab[row][col] = 1.0;
        for r in 0..self.rows {
            if r != row {
                let factor = self.tab[r][col];
                if factor != 0.0 {
                    for j in 0..width {
                        self.tab[r][j] -= factor * self.tab[row][j];
                    }
                    self.tab[r][col] = 0.0;
                    self.rhs[r] -= factor * self.rhs[row];
                    if self.rhs[r].abs() < 1e-14 {
                        self.rhs[r] = 0.0;
                    }
                }
            }
        }
        let factor = self.obj[col];
        if factor != 0.0 {
            for j in 0..width {
                self.obj[j] -= factor * self.tab[row][j];
            }
            self.obj[col] = 0.0;
        }
        self.basis[row] = col;
    }

    fn extract(&self) -> MaxFormSolution {
        let mut col_values = vec![0.0; self.ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            if b >= self.rows {
                col_values[b - self.rows] = self.rhs[r].max(0.0);
            }
        }
        let row_duals: Vec<f64> = (0..self.rows).map(|i| self.obj[i].max(0.0)).collect();
        let objective = self
            .values
            .iter()
            .zip(&col_values)
            .map(|(v, y)| v * y)
            .sum();
        MaxFormSolution { col_values, row_duals, objective }
    }
}

/// Solve `min c·x s.t. rows·x ≥ rhs, x ≥ 0` (with `c ≥ 0`) through its
/// dual. Returns `(x, per-constraint duals, objective)`.
#[cfg(test)]
pub(crate) fn solve_min_cover_lp(
    costs: &[f64],
    rows: &[Vec<f64>],
    rhs: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let mut lp = MaxForm::new(costs)?;
    for (row, &b) in rows.iter().zip(rhs) {
        lp.add_column(b, row);
    }
    let sol = lp.solve()?;
    Ok((sol.row_duals, sol.col_values, sol.objective))
}
