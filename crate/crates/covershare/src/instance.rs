use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::subset::FacilitySet;

/// Optional provenance attached to an instance by generators and loaders.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InstanceMeta {
    pub seed: Option<u64>,
    pub label: Option<String>,
    /// Free-form generator parameters as key/value pairs.
    pub entries: Vec<(String, String)>,
}

/// A covering integer program: `min c·x  s.t.  A x ≥ r,  x ∈ {0,1}^n`.
///
/// `n` facilities with nonnegative opening costs, `m` users with positive
/// coverage requirements, and an `n × m` nonnegative contribution matrix.
/// Construction enforces that opening every facility covers every user, so
/// any represented instance (and any user subset of it) is feasible.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    costs: Vec<f64>,
    requirements: Vec<f64>,
    /// Row-major `n × m`: `contributions[i * m + j]`.
    contributions: Vec<f64>,
    meta: Option<InstanceMeta>,
}

impl Instance {
    /// Build and validate an instance from a flat row-major contribution
    /// matrix (one row per facility).
    pub fn new(costs: Vec<f64>, requirements: Vec<f64>, contributions: Vec<f64>) -> Result<Self> {
        let n = costs.len();
        let m = requirements.len();
        if n == 0 || m == 0 {
            return Err(Error::InvalidData("need at least one facility and one user"));
        }
        if contributions.len() != n * m {
            return Err(Error::InvalidData("contribution matrix shape mismatch"));
        }
        if costs.iter().any(|&c| !c.is_finite() || c < 0.0) {
            return Err(Error::InvalidData("facility costs must be finite and nonnegative"));
        }
        if requirements.iter().any(|&r| !r.is_finite() || r <= 0.0) {
            return Err(Error::InvalidData("requirements must be finite and positive"));
        }
        if contributions.iter().any(|&a| !a.is_finite() || a < 0.0) {
            return Err(Error::InvalidData("contributions must be finite and nonnegative"));
        }
        let inst = Instance { costs, requirements, contributions, meta: None };
        for j in 0..m {
            if inst.total_contribution(j as u32) < inst.requirements[j] {
                return Err(Error::InfeasibleInstance);
            }
        }
        Ok(inst)
    }

    /// Convenience constructor from per-facility rows.
    pub fn from_rows(costs: Vec<f64>, requirements: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = requirements.len();
        if rows.len() != costs.len() || rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidData("contribution matrix shape mismatch"));
        }
        let flat = rows.into_iter().flatten().collect();
        Self::new(costs, requirements, flat)
    }

    pub fn with_meta(mut self, meta: InstanceMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn meta(&self) -> Option<&InstanceMeta> {
        self.meta.as_ref()
    }

    /// Number of facilities (`n`).
    pub fn n_facilities(&self) -> usize {
        self.costs.len()
    }

    /// Number of users (`m`).
    pub fn n_users(&self) -> usize {
        self.requirements.len()
    }

    pub fn cost(&self, i: u32) -> f64 {
        self.costs[i as usize]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn requirement(&self, j: u32) -> f64 {
        self.requirements[j as usize]
    }

    pub fn requirements(&self) -> &[f64] {
        &self.requirements
    }

    pub fn contribution(&self, i: u32, j: u32) -> f64 {
        self.contributions[i as usize * self.n_users() + j as usize]
    }

    pub fn contributions(&self) -> &[f64] {
        &self.contributions
    }

    /// Total coverage user `j` receives when every facility is open.
    pub fn total_contribution(&self, j: u32) -> f64 {
        (0..self.n_facilities() as u32).map(|i| self.contribution(i, j)).sum()
    }

    pub fn facilities(&self) -> impl Iterator<Item = u32> {
        0..self.n_facilities() as u32
    }

    pub fn users(&self) -> impl Iterator<Item = u32> {
        0..self.n_users() as u32
    }

    /// All users as an index list, for the common "whole population" calls.
    pub fn all_users(&self) -> Vec<u32> {
        self.users().collect()
    }

    pub(crate) fn check_user(&self, j: u32) -> Result<()> {
        if (j as usize) < self.n_users() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange)
        }
    }

    pub(crate) fn check_facility(&self, i: u32) -> Result<()> {
        if (i as usize) < self.n_facilities() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange)
        }
    }

    pub(crate) fn check_facility_set(&self, set: &FacilitySet) -> Result<()> {
        match set.max_index() {
            Some(i) if i as usize >= self.n_facilities() => Err(Error::IndexOutOfRange),
            _ => Ok(()),
        }
    }

    pub(crate) fn check_users(&self, users: &[u32]) -> Result<()> {
        for &j in users {
            self.check_user(j)?;
        }
        Ok(())
    }

    /// Residual requirement `max{r_j − Σ_{i∈S} a_ij, 0}` after building `S`.
    pub fn residual_requirement(&self, j: u32, built: &FacilitySet) -> Result<f64> {
        self.check_user(j)?;
        self.check_facility_set(built)?;
        Ok(self.residual_requirement_unchecked(j, built))
    }

    pub(crate) fn residual_requirement_unchecked(&self, j: u32, built: &FacilitySet) -> f64 {
        let covered: f64 = built.iter().map(|i| self.contribution(i, j)).sum();
        (self.requirement(j) - covered).max(0.0)
    }

    /// Residual contribution `min{a_ij, r_j^S}`, zero when `i ∈ S`.
    pub fn residual_contribution(&self, i: u32, j: u32, built: &FacilitySet) -> Result<f64> {
        self.check_facility(i)?;
        self.check_user(j)?;
        self.check_facility_set(built)?;
        if built.contains(i) {
            return Ok(0.0);
        }
        Ok(self.contribution(i, j).min(self.residual_requirement_unchecked(j, built)))
    }

    /// Does `sel` cover every user in `users` up to absolute tolerance?
    pub fn is_feasible_for(&self, sel: &Selection, users: &[u32], tol: f64) -> bool {
        users.iter().all(|&j| {
            let covered: f64 = sel.opened().iter().map(|i| self.contribution(i, j)).sum();
            covered >= self.requirement(j) - tol
        })
    }

    /// Does `sel` cover every user up to absolute tolerance?
    pub fn is_feasible(&self, sel: &Selection, tol: f64) -> bool {
        let users = self.all_users();
        self.is_feasible_for(sel, &users, tol)
    }

    /// Build a [`Selection`] from facility indices, deriving its cost.
    pub fn selection<I: IntoIterator<Item = u32>>(&self, opened: I) -> Result<Selection> {
        let mut set = FacilitySet::empty(self.n_facilities());
        for i in opened {
            self.check_facility(i)?;
            set.insert(i);
        }
        let cost = set.iter().map(|i| self.cost(i)).sum();
        Ok(Selection { opened: set, cost })
    }

    /// Column sparsity `Δ` (max users served by one facility) and row
    /// sparsity `Γ` (max facilities serving one user), over strict
    /// positivity `a_ij > 0`. With `users` given, both counts are
    /// restricted to that subset; an empty subset is flagged degenerate.
    pub fn sparsity(&self, users: Option<&[u32]>) -> Result<SparsityStats> {
        let all;
        let users = match users {
            Some(u) => {
                self.check_users(u)?;
                u
            }
            None => {
                all = self.all_users();
                &all
            }
        };
        if users.is_empty() {
            return Ok(SparsityStats { delta: 0, gamma: 0, degenerate: true });
        }
        let mut delta = 0usize;
        for i in self.facilities() {
            let served = users.iter().filter(|&&j| self.contribution(i, j) > 0.0).count();
            delta = delta.max(served);
        }
        let mut gamma = 0usize;
        for &j in users {
            let serving = self.facilities().filter(|&i| self.contribution(i, j) > 0.0).count();
            gamma = gamma.max(serving);
        }
        Ok(SparsityStats { delta, gamma, degenerate: false })
    }
}

/// A set of opened facilities together with its derived cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    opened: FacilitySet,
    cost: f64,
}

impl Selection {
    pub fn opened(&self) -> &FacilitySet {
        &self.opened
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.opened.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opened.is_empty()
    }

    pub fn contains(&self, i: u32) -> bool {
        self.opened.contains(i)
    }
}

/// Column and row sparsity of the contribution matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SparsityStats {
    /// Max number of users (in the chosen subset) served by one facility.
    pub delta: usize,
    /// Max number of facilities serving one user (in the chosen subset).
    pub gamma: usize,
    /// Set when the requested user subset was empty.
    pub degenerate: bool,
}
