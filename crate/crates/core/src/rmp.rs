//! Restricted master problem: the LP relaxation of the set-covering
//! coloring formulation, with per-column 0/1 bound fixings from branching.
//!
//! minimize    sum_S x_S
//! subject to  sum_{S : v in S} x_S >= 1   for every vertex v
//!             lower_S <= x_S <= upper_S
//!
//! Solved by a bounded-variable primal simplex on the dense row form with
//! surplus variables and an explicit basis inverse. Dual prices of the
//! covering rows are a first-class output (they drive pricing). Dantzig
//! pricing with a Bland's-rule fallback after a degeneracy streak.
//!
//! A feasible starting basis always exists when every vertex has some
//! column with upper bound 1: put every structural variable at its upper
//! bound and the surplus variables in the basis. Infeasibility is exactly
//! the absence of such a cover, which is detected structurally.

use crate::bitset::BitSet;
use crate::graph::Graph;
use std::fmt::Write as _;
use thiserror::Error;

pub type ColumnId = usize;

/// Feasibility tolerance on bounds and row activity.
pub const FEAS_TOL: f64 = 1e-7;
/// Reduced-cost optimality tolerance.
pub const OPT_TOL: f64 = 1e-7;
/// Primal/dual objective agreement required of an optimal solve.
pub const DUALITY_TOL: f64 = 1e-6;

const PIVOT_TOL: f64 = 1e-8;
const DEGENERATE_STEP: f64 = 1e-10;
const BLAND_TRIGGER: usize = 200;
const REFACTOR_EVERY: usize = 128;

/// A maximal independent set admitted to the column pool.
#[derive(Clone, Debug)]
pub struct Column {
    pub id: ColumnId,
    pub vertices: BitSet,
}

#[derive(Debug, Error)]
pub enum RmpError {
    #[error("column {0} already pooled: ZDD restriction and pool desynchronized")]
    DuplicateColumn(ColumnId),
    #[error("column is not a maximal independent set of the graph")]
    NotMaximalIndependent,
    #[error("unknown column id {0}")]
    UnknownColumn(ColumnId),
    #[error("simplex failed numerically: {0}")]
    Numerical(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RmpStatus {
    Optimal,
    /// Some vertex cannot be covered by any column with upper bound 1.
    Infeasible,
}

/// Primal/dual solution of one RMP solve.
#[derive(Clone, Debug)]
pub struct RmpSolution {
    pub status: RmpStatus,
    pub objective: f64,
    /// Per-column value, aligned with column ids.
    pub primal: Vec<f64>,
    /// Dual price per vertex (covering row), nonnegative at optimality.
    pub duals: Vec<f64>,
}

impl RmpSolution {
    fn infeasible(num_columns: usize, num_rows: usize) -> RmpSolution {
        RmpSolution {
            status: RmpStatus::Infeasible,
            objective: f64::INFINITY,
            primal: vec![0.0; num_columns],
            duals: vec![0.0; num_rows],
        }
    }
}

/// Reduced cost `1 - sum_{v in col} duals[v]` of a column.
pub fn reduced_cost(col: &BitSet, duals: &[f64]) -> f64 {
    1.0 - col.iter().map(|v| duals[v]).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
}

/// The pool, bounds, and simplex state for one subproblem family.
pub struct RmpModel {
    graph: Graph,
    columns: Vec<Column>,
    by_vertices: std::collections::HashMap<BitSet, ColumnId>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    // Simplex state (survives across solves for warm starts).
    basis: Vec<usize>,
    state: Vec<VarState>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    has_basis: bool,
    pivots_since_refactor: usize,
}

impl RmpModel {
    pub fn new(graph: &Graph) -> RmpModel {
        RmpModel {
            graph: graph.clone(),
            columns: Vec::new(),
            by_vertices: std::collections::HashMap::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            basis: Vec::new(),
            state: Vec::new(),
            binv: Vec::new(),
            xb: Vec::new(),
            has_basis: false,
            pivots_since_refactor: 0,
        }
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.graph.n()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, id: ColumnId) -> &Column {
        &self.columns[id]
    }

    pub fn contains_set(&self, vertices: &BitSet) -> Option<ColumnId> {
        self.by_vertices.get(vertices).copied()
    }

    /// Admit a column. The vertex set must be a maximal independent set
    /// not already pooled (a duplicate means the ZDD restriction failed).
    pub fn add_column(&mut self, vertices: BitSet) -> Result<ColumnId, RmpError> {
        if let Some(&id) = self.by_vertices.get(&vertices) {
            return Err(RmpError::DuplicateColumn(id));
        }
        if !self.graph.is_maximal_independent(&vertices) {
            return Err(RmpError::NotMaximalIndependent);
        }
        let id = self.columns.len();
        self.by_vertices.insert(vertices.clone(), id);
        self.columns.push(Column { id, vertices });
        self.lower.push(0.0);
        self.upper.push(1.0);
        // A new variable enters nonbasic at its lower bound (value 0), so
        // an existing basis stays feasible: warm starts are cheap.
        self.state.push(VarState::AtLower);
        Ok(id)
    }

    /// Fix a column to 0 or 1 (branching decision).
    pub fn fix_column(&mut self, id: ColumnId, value: bool) -> Result<(), RmpError> {
        if id >= self.columns.len() {
            return Err(RmpError::UnknownColumn(id));
        }
        let v = if value { 1.0 } else { 0.0 };
        self.lower[id] = v;
        self.upper[id] = v;
        Ok(())
    }

    /// Reset every column to free 0..=1 bounds.
    pub fn clear_fixings(&mut self) {
        self.lower.iter_mut().for_each(|l| *l = 0.0);
        self.upper.iter_mut().for_each(|u| *u = 1.0);
    }

    pub fn bounds(&self, id: ColumnId) -> (f64, f64) {
        (self.lower[id], self.upper[id])
    }

    // Variable layout: 0..m surplus (row coefficient -1, bounds [0, inf)),
    // then structural columns. Structural variables grow at the tail, so
    // indices stay stable when columns are added and the basis survives.
    fn num_vars(&self) -> usize {
        self.columns.len() + self.graph.n()
    }

    fn structural(&self, j: usize) -> Option<usize> {
        j.checked_sub(self.graph.n())
    }

    fn var_lower(&self, j: usize) -> f64 {
        match self.structural(j) {
            Some(c) => self.lower[c],
            None => 0.0,
        }
    }

    fn var_upper(&self, j: usize) -> f64 {
        match self.structural(j) {
            Some(c) => self.upper[c],
            None => f64::INFINITY,
        }
    }

    fn cost(&self, j: usize) -> f64 {
        match self.structural(j) {
            Some(_) => 1.0,
            None => 0.0,
        }
    }

    /// y^T A_j for a dense row-price vector y.
    fn price_column(&self, y: &[f64], j: usize) -> f64 {
        match self.structural(j) {
            Some(c) => self.columns[c].vertices.iter().map(|v| y[v]).sum(),
            None => -y[j],
        }
    }

    /// w = B^-1 A_j.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.graph.n();
        let mut w = vec![0.0; m];
        match self.structural(j) {
            Some(c) => {
                for v in self.columns[c].vertices.iter() {
                    for i in 0..m {
                        w[i] += self.binv[i * m + v];
                    }
                }
            }
            None => {
                for i in 0..m {
                    w[i] = -self.binv[i * m + j];
                }
            }
        }
        w
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::Basic => unreachable!("basic variable has no bound value"),
            VarState::AtLower => self.var_lower(j),
            VarState::AtUpper => self.var_upper(j),
        }
    }

    /// xB = B^-1 (b - A_N x_N), b = 1.
    fn recompute_xb(&mut self) {
        let m = self.graph.n();
        let mut residual = vec![1.0; m];
        for j in 0..self.num_vars() {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let value = self.nonbasic_value(j);
            if value == 0.0 {
                continue;
            }
            match self.structural(j) {
                Some(c) => {
                    for v in self.columns[c].vertices.iter() {
                        residual[v] -= value;
                    }
                }
                None => residual[j] += value,
            }
        }
        let mut xb = vec![0.0; m];
        for i in 0..m {
            let mut acc = 0.0;
            for v in 0..m {
                acc += self.binv[i * m + v] * residual[v];
            }
            xb[i] = acc;
        }
        self.xb = xb;
    }

    /// Every structural variable at its upper bound, surplus basic. This
    /// is primal feasible whenever the model is feasible at all.
    fn cold_start(&mut self) {
        let m = self.graph.n();
        let n = self.columns.len();
        self.state = vec![VarState::Basic; m];
        self.state.extend(std::iter::repeat(VarState::AtUpper).take(n));
        self.basis = (0..m).collect();
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = -1.0;
        }
        self.recompute_xb();
        self.has_basis = true;
        self.pivots_since_refactor = 0;
    }

    /// Rebuild B^-1 from the basis by Gauss-Jordan elimination.
    fn refactor(&mut self) -> Result<(), RmpError> {
        let m = self.graph.n();
        let mut b: Vec<f64> = vec![0.0; m * m];
        for (row, &j) in self.basis.iter().enumerate() {
            match self.structural(j) {
                Some(c) => {
                    for v in self.columns[c].vertices.iter() {
                        b[v * m + row] = 1.0;
                    }
                }
                None => b[j * m + row] = -1.0,
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let pivot_row = (col..m)
                .max_by(|&a, &b2| {
                    b[a * m + col]
                        .abs()
                        .partial_cmp(&b[b2 * m + col].abs())
                        .unwrap()
                })
                .unwrap();
            let pivot = b[pivot_row * m + col];
            if pivot.abs() < 1e-12 {
                return Err(RmpError::Numerical("singular basis".into()));
            }
            if pivot_row != col {
                for k in 0..m {
                    b.swap(pivot_row * m + k, col * m + k);
                    inv.swap(pivot_row * m + k, col * m + k);
                }
            }
            let inv_pivot = 1.0 / b[col * m + col];
            for k in 0..m {
                b[col * m + k] *= inv_pivot;
                inv[col * m + k] *= inv_pivot;
            }
            for r in 0..m {
                if r != col {
                    let factor = b[r * m + col];
                    if factor != 0.0 {
                        for k in 0..m {
                            b[r * m + k] -= factor * b[col * m + k];
                            inv[r * m + k] -= factor * inv[col * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn dual_prices(&self) -> Vec<f64> {
        let m = self.graph.n();
        let mut y = vec![0.0; m];
        for (row, &j) in self.basis.iter().enumerate() {
            let c = self.cost(j);
            if c != 0.0 {
                for v in 0..m {
                    y[v] += c * self.binv[row * m + v];
                }
            }
        }
        y
    }

    /// Solve to optimality (or detect infeasibility). Reuses the previous
    /// basis when it is still primal feasible; otherwise restarts from the
    /// all-at-upper-bound basis. Deterministic for identical input.
    pub fn solve(&mut self) -> Result<RmpSolution, RmpError> {
        let m = self.graph.n();
        let n = self.columns.len();
        if m == 0 {
            let primal: Vec<f64> = self.lower.clone();
            return Ok(RmpSolution {
                status: RmpStatus::Optimal,
                objective: primal.iter().sum(),
                primal,
                duals: Vec::new(),
            });
        }
        // Structural feasibility: every vertex needs a pooled column with
        // upper bound 1 containing it.
        let mut coverable = BitSet::new(m);
        for j in 0..n {
            if self.upper[j] > 0.5 {
                coverable.union_with(&self.columns[j].vertices);
            }
        }
        if coverable.len() != m {
            return Ok(RmpSolution::infeasible(n, m));
        }

        // Warm start if the previous basis is still primal feasible under
        // the current bounds; otherwise cold start.
        if self.has_basis && self.state.len() == self.num_vars() {
            self.recompute_xb();
            let ok = (0..m).all(|i| {
                let j = self.basis[i];
                self.xb[i] >= self.var_lower(j) - FEAS_TOL
                    && self.xb[i] <= self.var_upper(j) + FEAS_TOL
            });
            if !ok {
                self.cold_start();
            }
        } else {
            self.cold_start();
        }

        self.pivot_to_optimality()?;

        // Extract the solution.
        let duals = self.dual_prices();
        let mut primal = vec![0.0; n];
        for c in 0..n {
            if self.state[m + c] != VarState::Basic {
                primal[c] = self.nonbasic_value(m + c);
            }
        }
        for (row, &j) in self.basis.iter().enumerate() {
            if let Some(c) = self.structural(j) {
                primal[c] = self.xb[row];
            }
        }
        let objective = primal.iter().sum();
        let solution = RmpSolution {
            status: RmpStatus::Optimal,
            objective,
            primal,
            duals,
        };
        debug_assert!(self.duality_gap(&solution).abs() <= DUALITY_TOL);
        Ok(solution)
    }

    /// |primal objective - dual objective| for an optimal solution,
    /// including the bound terms of nonbasic variables.
    pub fn duality_gap(&self, solution: &RmpSolution) -> f64 {
        let m = self.graph.n();
        let mut dual_obj: f64 = solution.duals.iter().sum();
        for c in 0..self.columns.len() {
            if self.state[m + c] != VarState::Basic {
                let d = 1.0 - self.price_column(&solution.duals, m + c);
                dual_obj += d * self.nonbasic_value(m + c);
            }
        }
        solution.objective - dual_obj
    }

    fn pivot_to_optimality(&mut self) -> Result<(), RmpError> {
        let m = self.graph.n();
        let max_iters = 200 + 50 * self.num_vars() + 10 * m;
        let mut degenerate_streak = 0usize;
        let mut bland = false;
        for _ in 0..max_iters {
            let y = self.dual_prices();
            // Entering variable: Dantzig (most violating reduced cost),
            // ties toward the lowest index; Bland mode takes the lowest
            // eligible index outright.
            let mut entering: Option<(usize, f64, bool)> = None; // (var, |d|, from_lower)
            for j in 0..self.num_vars() {
                let (eligible, score, from_lower) = match self.state[j] {
                    VarState::Basic => (false, 0.0, false),
                    VarState::AtLower => {
                        if self.var_upper(j) - self.var_lower(j) < FEAS_TOL {
                            (false, 0.0, true)
                        } else {
                            let d = self.cost(j) - self.price_column(&y, j);
                            (d < -OPT_TOL, -d, true)
                        }
                    }
                    VarState::AtUpper => {
                        if self.var_upper(j) - self.var_lower(j) < FEAS_TOL {
                            (false, 0.0, false)
                        } else {
                            let d = self.cost(j) - self.price_column(&y, j);
                            (d > OPT_TOL, d, false)
                        }
                    }
                };
                if eligible {
                    if bland {
                        entering = Some((j, score, from_lower));
                        break;
                    }
                    if entering.map_or(true, |(_, best, _)| score > best) {
                        entering = Some((j, score, from_lower));
                    }
                }
            }
            let Some((j, _, from_lower)) = entering else {
                return Ok(());
            };

            let w = self.ftran(j);
            let dir = if from_lower { 1.0 } else { -1.0 };
            // Ratio test: first basic variable to hit a bound, or the
            // entering variable's own opposite bound (a bound flip).
            let own_limit = self.var_upper(j) - self.var_lower(j);
            let mut best_t = own_limit;
            let mut leaving: Option<(usize, bool)> = None; // (row, hits_lower)
            for i in 0..m {
                let coef = dir * w[i];
                let bj = self.basis[i];
                if coef > PIVOT_TOL {
                    let t = (self.xb[i] - self.var_lower(bj)) / coef;
                    if t < best_t - DEGENERATE_STEP
                        || (t < best_t + DEGENERATE_STEP
                            && leaving.map_or(false, |(r, _)| self.basis[r] > bj))
                    {
                        best_t = t.max(0.0);
                        leaving = Some((i, true));
                    }
                } else if coef < -PIVOT_TOL {
                    let ub = self.var_upper(bj);
                    if ub.is_finite() {
                        let t = (ub - self.xb[i]) / -coef;
                        if t < best_t - DEGENERATE_STEP
                            || (t < best_t + DEGENERATE_STEP
                                && leaving.map_or(false, |(r, _)| self.basis[r] > bj))
                        {
                            best_t = t.max(0.0);
                            leaving = Some((i, false));
                        }
                    }
                }
            }
            if best_t.is_infinite() {
                return Err(RmpError::Numerical(
                    "unbounded direction in a bounded problem".into(),
                ));
            }

            if best_t <= DEGENERATE_STEP {
                degenerate_streak += 1;
                if degenerate_streak >= BLAND_TRIGGER {
                    bland = true;
                }
            } else {
                degenerate_streak = 0;
                bland = false;
            }

            match leaving {
                None => {
                    // Bound flip: the entering variable crosses to its
                    // other bound; the basis is unchanged.
                    for i in 0..m {
                        self.xb[i] -= dir * best_t * w[i];
                    }
                    self.state[j] = if from_lower {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                }
                Some((row, hits_lower)) => {
                    if w[row].abs() < PIVOT_TOL {
                        return Err(RmpError::Numerical("tiny pivot element".into()));
                    }
                    let new_value = if from_lower {
                        self.var_lower(j) + best_t
                    } else {
                        self.var_upper(j) - best_t
                    };
                    let old = self.basis[row];
                    self.state[old] = if hits_lower {
                        VarState::AtLower
                    } else {
                        VarState::AtUpper
                    };
                    self.state[j] = VarState::Basic;
                    self.basis[row] = j;
                    for i in 0..m {
                        if i != row {
                            self.xb[i] -= dir * best_t * w[i];
                        }
                    }
                    self.xb[row] = new_value;
                    // Eta update of the explicit inverse.
                    let pivot = w[row];
                    for k in 0..m {
                        self.binv[row * m + k] /= pivot;
                    }
                    for i in 0..m {
                        if i != row && w[i] != 0.0 {
                            let factor = w[i];
                            for k in 0..m {
                                self.binv[i * m + k] -= factor * self.binv[row * m + k];
                            }
                        }
                    }
                    self.pivots_since_refactor += 1;
                    if self.pivots_since_refactor >= REFACTOR_EVERY {
                        self.refactor()?;
                        self.recompute_xb();
                    }
                }
            }
        }
        Err(RmpError::Numerical(format!(
            "no convergence within the iteration budget ({} columns, {} rows)",
            self.columns.len(),
            m
        )))
    }

    /// LP-format dump of the current model, for external cross-checking.
    pub fn write_lp(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        for j in 0..self.columns.len() {
            let _ = write!(out, " + x{j}");
        }
        out.push_str("\nSubject To\n");
        for v in 0..self.graph.n() {
            let _ = write!(out, " cover_v{v}:");
            for (j, col) in self.columns.iter().enumerate() {
                if col.vertices.contains(v) {
                    let _ = write!(out, " + x{j}");
                }
            }
            out.push_str(" >= 1\n");
        }
        out.push_str("Bounds\n");
        for j in 0..self.columns.len() {
            let _ = writeln!(out, " {} <= x{j} <= {}", self.lower[j], self.upper[j]);
        }
        out.push_str("End\n");
        out
    }
}
