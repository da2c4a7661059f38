use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::simplex::MaxForm;
use crate::subset::FacilitySet;

/// An active knapsack-cover inequality with its cached residual requirement
/// and clipped contribution row.
#[derive(Clone, Debug)]
pub struct Cut {
    pub user: u32,
    pub subset: FacilitySet,
    /// `r_j^S`.
    pub rhs: f64,
    /// `a_ij^S` per facility, zero on `subset`.
    pub row: Vec<f64>,
}

/// Restricted master problem: `min c·x` over the active cuts, `x ≥ 0`.
///
/// Solved through its dual (one variable per cut, one constraint per
/// facility), which keeps the tableau a few dozen rows wide and lets new
/// cuts warm-start as freshly priced columns. Duals come out exactly
/// complementary to the reported primal.
pub struct RestrictedMaster {
    costs: Vec<f64>,
    cuts: Vec<Cut>,
    keys: BTreeSet<(u32, FacilitySet)>,
    lp: MaxForm,
    x: Vec<f64>,
    duals: Vec<f64>,
    objective: f64,
    solved: bool,
}

impl RestrictedMaster {
    pub fn new(inst: &Instance) -> Result<Self> {
        Ok(RestrictedMaster {
            costs: inst.costs().to_vec(),
            cuts: Vec::new(),
            keys: BTreeSet::new(),
            lp: MaxForm::new(inst.costs())?,
            x: Vec::new(),
            duals: Vec::new(),
            objective: 0.0,
            solved: false,
        })
    }

    /// Master seeded with the empty-subset cut of every user, which makes
    /// the first solve the naive LP without upper bounds.
    pub fn warm_start(inst: &Instance, users: &[u32]) -> Result<Self> {
        inst.check_users(users)?;
        let mut master = Self::new(inst)?;
        let empty = FacilitySet::empty(inst.n_facilities());
        for &j in users {
            master.add_cut(inst, j, empty.clone())?;
        }
        Ok(master)
    }

    /// Add the inequality for `(user, subset)`. Returns `false` when the
    /// cut is already active or trivially slack (`r_j^S ≤ 0`).
    pub fn add_cut(&mut self, inst: &Instance, user: u32, subset: FacilitySet) -> Result<bool> {
        inst.check_user(user)?;
        inst.check_facility_set(&subset)?;
        let key = (user, subset.clone());
        if self.keys.contains(&key) {
            return Ok(false);
        }
        let rhs = inst.residual_requirement_unchecked(user, &subset);
        if rhs <= 0.0 {
            return Ok(false);
        }
        let row: Vec<f64> = inst
            .facilities()
            .map(|i| {
                if subset.contains(i) {
                    0.0
                } else {
                    inst.contribution(i, user).min(rhs)
                }
            })
            .collect();
        self.lp.add_column(rhs, &row);
        self.keys.insert(key);
        self.cuts.push(Cut { user, subset, rhs, row });
        self.solved = false;
        Ok(true)
    }

    /// Optimize the current cut set; resumes from the previous basis.
    pub fn solve(&mut self) -> Result<()> {
        if self.cuts.is_empty() {
            return Err(Error::UnboundedOrInfeasibleLP);
        }
        let sol = self.lp.solve()?;
        self.x = sol.row_duals;
        self.duals = sol.col_values;
        self.objective = sol.objective;
        self.solved = true;
        Ok(())
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn has_cut(&self, user: u32, subset: &FacilitySet) -> bool {
        self.keys.contains(&(user, subset.clone()))
    }

    /// Current primal point (valid after `solve`).
    pub fn x(&self) -> &[f64] {
        debug_assert!(self.solved);
        &self.x
    }

    /// Dual value per active cut, aligned with `cuts()`.
    pub fn duals(&self) -> &[f64] {
        debug_assert!(self.solved);
        &self.duals
    }

    pub fn objective(&self) -> f64 {
        debug_assert!(self.solved);
        self.objective
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }
}
