//! Dense two-phase simplex for small linear programs in the form
//!
//! ```text
//! maximize  c·v  subject to  A v <= b,  v >= 0
//! ```
//!
//! Pivoting takes the step with the greatest objective gain, or the largest
//! pivot element when every step is degenerate. After a run of degenerate
//! pivots it falls back to Bland's rule (lowest eligible index enters, ties
//! go to the lowest basic index), so the method cannot cycle.
//! Problems in this crate have at most a handful of variables, so the
//! tableau is stored densely in a single row-major buffer.

use thiserror::Error;

/// Primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-9;
/// Maximum number of pivots over both phases.
pub const MAX_PIVOTS: usize = 10_000;

const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite coefficient at {0}")]
    NonFinite(String),
    #[error("simplex did not converge within {0} pivots")]
    IterationLimit(usize),
}

/// A linear program with `<=` rows and implicitly non-negative variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    /// Row-major constraint matrix, `rhs.len()` rows by `objective.len()` columns.
    a: Vec<f64>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    /// Builds a program from the objective and a list of `(row, rhs)` pairs.
    pub fn new(objective: Vec<f64>, rows: &[Vec<f64>], rhs: Vec<f64>) -> Result<Self, LpError> {
        let n = objective.len();
        if rows.len() != rhs.len() {
            return Err(LpError::Dimension(format!(
                "{} rows but {} right-hand sides",
                rows.len(),
                rhs.len()
            )));
        }
        let mut a = Vec::with_capacity(rows.len() * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(LpError::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            a.extend_from_slice(row);
        }
        Self::from_dense(objective, a, rhs)
    }

    /// Builds a program from a row-major matrix buffer.
    pub fn from_dense(objective: Vec<f64>, a: Vec<f64>, rhs: Vec<f64>) -> Result<Self, LpError> {
        let n = objective.len();
        if a.len() != rhs.len() * n {
            return Err(LpError::Dimension(format!(
                "matrix has {} entries, expected {} x {n}",
                a.len(),
                rhs.len()
            )));
        }
        if let Some(j) = objective.iter().position(|v| !v.is_finite()) {
            return Err(LpError::NonFinite(format!("objective[{j}]")));
        }
        if let Some(k) = a.iter().position(|v| !v.is_finite()) {
            return Err(LpError::NonFinite(format!("A[{}][{}]", k / n.max(1), k % n.max(1))));
        }
        if let Some(i) = rhs.iter().position(|v| !v.is_finite()) {
            return Err(LpError::NonFinite(format!("b[{i}]")));
        }
        Ok(Self { objective, a, rhs })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.num_vars();
        &self.a[i * n..(i + 1) * n]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Largest violation of `A v <= b` and `v >= 0` at `point`.
    pub fn max_violation(&self, point: &[f64]) -> f64 {
        let mut worst = point.iter().map(|&v| -v).fold(0.0, f64::max);
        for i in 0..self.num_rows() {
            let lhs: f64 = self.row(i).iter().zip(point).map(|(a, v)| a * v).sum();
            worst = worst.max(lhs - self.rhs[i]);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value at `point`; meaningful only when optimal.
    pub value: f64,
    /// Optimizer, empty unless optimal.
    pub point: Vec<f64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves `lp` to optimality, or reports infeasibility or unboundedness.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let mut t = Tableau::new(lp);
    if !t.phase_one()? {
        return Ok(LpSolution { status: LpStatus::Infeasible, value: f64::NAN, point: Vec::new() });
    }
    if !t.phase_two(&lp.objective)? {
        return Ok(LpSolution { status: LpStatus::Unbounded, value: f64::INFINITY, point: Vec::new() });
    }
    let point = t.primal();
    let value = lp.objective.iter().zip(&point).map(|(c, v)| c * v).sum();
    Ok(LpSolution { status: LpStatus::Optimal, value, point })
}

/// Whether `{v >= 0 : A v <= b}` is non-empty. `rows` holds the rows of `A`.
pub fn lp_feasible(rows: &[Vec<f64>], rhs: &[f64]) -> Result<bool, LpError> {
    let n = rows.first().map_or(0, Vec::len);
    let lp = LinearProgram::new(vec![0.0; n], rows, rhs.to_vec())?;
    is_feasible(&lp)
}

/// Phase one only: whether the feasible set of `lp` is non-empty.
pub fn is_feasible(lp: &LinearProgram) -> Result<bool, LpError> {
    Tableau::new(lp).phase_one()
}

/// Simplex tableau. Columns are laid out as
/// `[structural (n) | slack (m) | artificial (k) | rhs]`.
struct Tableau {
    m: usize,
    n: usize,
    n_art: usize,
    width: usize,
    cells: Vec<f64>,
    /// Reduced-cost row for the current phase (same layout as a row).
    cost: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
    scale: f64,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let m = lp.num_rows();
        let n = lp.num_vars();
        let n_art = lp.rhs.iter().filter(|&&b| b < 0.0).count();
        let width = n + m + n_art + 1;
        let mut cells = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut next_art = n + m;
        let mut scale: f64 = 1.0;
        for i in 0..m {
            let row = &mut cells[i * width..(i + 1) * width];
            let b = lp.rhs[i];
            scale = scale.max(b.abs());
            let sign = if b < 0.0 { -1.0 } else { 1.0 };
            for (dst, &src) in row[..n].iter_mut().zip(lp.row(i)) {
                *dst = sign * src;
            }
            row[n + i] = sign;
            row[width - 1] = sign * b;
            if b < 0.0 {
                row[next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            } else {
                basis[i] = n + i;
            }
        }
        Self { m, n, n_art, width, cells, cost: vec![0.0; width], basis, pivots: 0, scale }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn first_art(&self) -> usize {
        self.n + self.m
    }

    /// Returns `true` when a feasible basis exists.
    fn phase_one(&mut self) -> Result<bool, LpError> {
        if self.n_art == 0 {
            return Ok(true);
        }
        // Maximize -sum(artificials); express the cost row in terms of
        // the non-basic columns by adding every artificial-basic row.
        let first_art = self.first_art();
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        for i in 0..self.m {
            if self.basis[i] >= first_art {
                let row = &self.cells[i * self.width..(i + 1) * self.width];
                for (c, &v) in self.cost.iter_mut().zip(row) {
                    *c += v;
                }
            }
        }
        for j in first_art..first_art + self.n_art {
            self.cost[j] = 0.0;
        }
        if !self.optimize(self.width - 1)? {
            // Phase one is bounded by construction.
            return Err(LpError::IterationLimit(self.pivots));
        }
        let infeasibility = self.cost[self.width - 1];
        if infeasibility > FEAS_TOL * self.scale {
            return Ok(false);
        }
        // Drive zero-valued artificials out of the basis where possible. The
        // residual value is within tolerance and is zeroed so the pivot
        // cannot magnify it.
        for i in 0..self.m {
            if self.basis[i] >= first_art {
                let best = (0..first_art)
                    .map(|j| (j, self.at(i, j).abs()))
                    .fold((0, 0.0), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
                if best.1 > PIVOT_TOL {
                    self.cells[i * self.width + self.width - 1] = 0.0;
                    self.pivot(i, best.0);
                }
            }
        }
        Ok(true)
    }

    /// Returns `false` when the objective is unbounded above.
    fn phase_two(&mut self, objective: &[f64]) -> Result<bool, LpError> {
        // Reduced costs: c_B B^-1 A - c, stored with the convention that a
        // positive entry marks an improving column.
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        self.cost[..self.n].copy_from_slice(objective);
        for i in 0..self.m {
            let b = self.basis[i];
            let cb = if b < self.n { objective[b] } else { 0.0 };
            if cb != 0.0 {
                let row = &self.cells[i * self.width..(i + 1) * self.width];
                for (c, &v) in self.cost.iter_mut().zip(row) {
                    *c -= cb * v;
                }
            }
        }
        self.optimize(self.first_art())
    }

    /// Ratio test for column `enter`: the leaving row, its ratio and the
    /// pivot element. Ties go to the lowest basic index under Bland's rule
    /// and to the largest pivot element otherwise.
    fn ratio_test(&self, enter: usize, bland: bool) -> Option<(usize, f64, f64)> {
        let mut leave: Option<(usize, f64, f64)> = None;
        for i in 0..self.m {
            let a = self.at(i, enter);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / a;
            let better = match leave {
                None => true,
                Some((r, best, pivot)) => {
                    let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                    if !tie {
                        ratio < best
                    } else if bland {
                        self.basis[i] < self.basis[r]
                    } else {
                        a > pivot
                    }
                }
            };
            if better {
                leave = Some((i, ratio, a));
            }
        }
        leave
    }

    /// Pivots over columns `< limit` until no reduced cost is positive. The
    /// cost row holds `c_j - z_j`.
    ///
    /// The entering column is the one with the greatest objective gain; when
    /// every candidate step is degenerate, the one with the largest pivot
    /// element. After a run of degenerate pivots the rule switches to Bland's
    /// for the rest of the phase, which rules out cycling.
    fn optimize(&mut self, limit: usize) -> Result<bool, LpError> {
        let mut degenerate_run = 0;
        let mut bland = false;
        loop {
            let mut choice: Option<(usize, (usize, f64, f64))> = None;
            for j in (0..limit).filter(|&j| self.cost[j] > FEAS_TOL) {
                let Some(leave) = self.ratio_test(j, bland) else {
                    return Ok(false);
                };
                if bland {
                    choice = Some((j, leave));
                    break;
                }
                let better = match choice {
                    None => true,
                    Some((k, (_, ratio, pivot))) => {
                        let (gain, best_gain) = (self.cost[j] * leave.1, self.cost[k] * ratio);
                        if gain > 0.0 || best_gain > 0.0 {
                            gain > best_gain
                        } else {
                            leave.2 > pivot
                        }
                    }
                };
                if better {
                    choice = Some((j, leave));
                }
            }
            let Some((enter, (row, ratio, _))) = choice else {
                return Ok(true);
            };
            if self.pivots >= MAX_PIVOTS {
                return Err(LpError::IterationLimit(self.pivots));
            }
            if ratio == 0.0 {
                degenerate_run += 1;
                bland |= degenerate_run > 2 * (self.m + self.n);
            } else {
                degenerate_run = 0;
            }
            self.pivot(row, enter);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        self.pivots += 1;
        let w = self.width;
        let p = self.at(row, col);
        let (before, rest) = self.cells.split_at_mut(row * w);
        let (prow, after) = rest.split_at_mut(w);
        for v in prow.iter_mut() {
            *v /= p;
        }
        prow[col] = 1.0;
        for other in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = other[col];
            if f != 0.0 {
                for (o, &pv) in other.iter_mut().zip(prow.iter()) {
                    *o -= f * pv;
                }
                other[col] = 0.0;
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for (c, &pv) in self.cost.iter_mut().zip(prow.iter()) {
                *c -= f * pv;
            }
            self.cost[col] = 0.0;
        }
        self.basis[row] = col;
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for i in 0..self.m {
            if self.basis[i] < self.n {
                x[self.basis[i]] = self.rhs(i);
            }
        }
        x
    }
}
