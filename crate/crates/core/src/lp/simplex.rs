//! Revised primal simplex for bounded variables.
//!
//! Each row `a_i x (<=|=|>=) b_i` gets a slack `s_i` so that `a_i x + s_i = b_i`
//! with `s_i ∈ [0, ∞)`, `(-∞, 0]` or `[0, 0]`. Nonbasic variables sit at one
//! of their bounds (free ones at zero). The basis inverse is kept dense and
//! updated by elementary row operations, with periodic refactorization.
//!
//! Pricing is Dantzig's rule with the lowest index winning ties. After a run
//! of degenerate pivots the solver switches to Bland's rule until the
//! objective moves again. The ratio test is a two-pass Harris test outside
//! Bland mode. All choices are deterministic, so solving the same program
//! twice walks the same pivots.
//!
//! Phase 1 minimizes the sum of artificial variables added to rows whose
//! slack cannot absorb the initial residual. A caller that knows a feasible
//! starting basis can pass a [`BasisHint`] and skip phase 1.

use super::{check_solution, LinearProgram, LpSolution, LpStatus, Sense};

/// Residual threshold every Optimal solution must meet.
const RESIDUAL_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Pivot budget across both phases; 0 means `20 * (rows + columns) + 1000`.
    pub max_iterations: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_limit: usize,
    pub refactor_interval: usize,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub pivot_tol: f64,
    /// Divide every row by its largest coefficient before solving.
    pub equilibrate: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 0,
            degenerate_limit: 50,
            refactor_interval: 100,
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            pivot_tol: 1e-9,
            equilibrate: false,
        }
    }
}

/// The variable to make basic in one row of a starting basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisHintEntry {
    Structural(usize),
    Slack(usize),
}

/// A starting basis: one entry per constraint row. Used only if it is
/// nonsingular and primal feasible with every other variable at its
/// default bound; otherwise the solver starts cold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisHint {
    pub basic: Vec<BasisHintEntry>,
}

pub fn solve(lp: &LinearProgram) -> LpSolution {
    solve_with(lp, &SolverOptions::default(), None)
}

pub fn solve_with(lp: &LinearProgram, opts: &SolverOptions, hint: Option<&BasisHint>) -> LpSolution {
    if let Err(e) = lp.validate() {
        return failure(lp, 0, format!("malformed program: {e}"));
    }
    let mut s = Simplex::new(lp, opts);
    let warm = hint.is_some_and(|h| s.start_from_hint(h));
    if !warm {
        s.start_cold();
        if s.has_artificials() {
            match s.run(Phase::One) {
                Outcome::Optimal => {}
                Outcome::Unbounded => return failure(lp, s.iterations, "phase 1 reported unbounded".into()),
                Outcome::Stalled(msg) => return failure(lp, s.iterations, msg),
            }
            let infeasibility = s.artificial_sum();
            if infeasibility > s.infeasibility_threshold() {
                return LpSolution {
                    status: LpStatus::Infeasible,
                    values: s.structural_values(),
                    objective: f64::NAN,
                    iterations: s.iterations,
                    diagnostics: Some(format!("phase 1 infeasibility {infeasibility:.3e}")),
                };
            }
            s.retire_artificials();
        }
    }
    match s.run(Phase::Two) {
        Outcome::Optimal => {}
        Outcome::Unbounded => {
            return LpSolution {
                status: LpStatus::Unbounded,
                values: s.structural_values(),
                objective: f64::NEG_INFINITY,
                iterations: s.iterations,
                diagnostics: None,
            }
        }
        Outcome::Stalled(msg) => return failure(lp, s.iterations, msg),
    }
    s.finish(lp)
}

fn failure(lp: &LinearProgram, iterations: usize, msg: String) -> LpSolution {
    LpSolution {
        status: LpStatus::NumericalFailure,
        values: vec![f64::NAN; lp.num_variables()],
        objective: f64::NAN,
        iterations,
        diagnostics: Some(msg),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum Outcome {
    Optimal,
    Unbounded,
    Stalled(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable, held at zero.
    Zero,
}

struct Simplex {
    n: usize,
    m: usize,
    // Structural columns in compressed-column form.
    col_start: Vec<usize>,
    col_rows: Vec<usize>,
    col_vals: Vec<f64>,
    /// `(row, sign)` of each artificial column.
    artificials: Vec<(usize, f64)>,
    b: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    status: Vec<Status>,
    /// Basic column at each basis position.
    head: Vec<usize>,
    /// Column-major `B^{-1}`: entry `(position i, row r)` at `r * m + i`.
    binv: Vec<f64>,
    opts: SolverOptions,
    max_iterations: usize,
    iterations: usize,
    since_refactor: usize,
}

impl Simplex {
    fn new(lp: &LinearProgram, opts: &SolverOptions) -> Self {
        let n = lp.num_variables();
        let m = lp.num_constraints();
        let scale: Vec<f64> = lp
            .constraints
            .iter()
            .map(|c| {
                let big = c.coeffs.iter().fold(0.0f64, |acc, &(_, a)| acc.max(a.abs()));
                if opts.equilibrate && big > 0.0 {
                    1.0 / big
                } else {
                    1.0
                }
            })
            .collect();
        // Merge duplicate (row, column) entries while transposing.
        let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (r, c) in lp.constraints.iter().enumerate() {
            for &(j, a) in &c.coeffs {
                match by_col[j].last_mut() {
                    Some((row, val)) if *row == r => *val += a * scale[r],
                    _ => by_col[j].push((r, a * scale[r])),
                }
            }
        }
        let mut col_start = Vec::with_capacity(n + 1);
        let mut col_rows = Vec::new();
        let mut col_vals = Vec::new();
        col_start.push(0);
        for col in &by_col {
            for &(r, a) in col {
                if a != 0.0 {
                    col_rows.push(r);
                    col_vals.push(a);
                }
            }
            col_start.push(col_rows.len());
        }
        let mut lower: Vec<f64> = lp.variables.iter().map(|v| v.lower).collect();
        let mut upper: Vec<f64> = lp.variables.iter().map(|v| v.upper).collect();
        let mut cost: Vec<f64> = lp.variables.iter().map(|v| v.cost).collect();
        for c in &lp.constraints {
            let (lo, hi) = match c.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lower.push(lo);
            upper.push(hi);
            cost.push(0.0);
        }
        let b = lp
            .constraints
            .iter()
            .zip(&scale)
            .map(|(c, s)| c.rhs * s)
            .collect();
        let total = n + m;
        let max_iterations = if opts.max_iterations == 0 {
            20 * total + 1000
        } else {
            opts.max_iterations
        };
        Self {
            n,
            m,
            col_start,
            col_rows,
            col_vals,
            artificials: Vec::new(),
            b,
            lower,
            upper,
            cost,
            x: vec![0.0; total],
            status: vec![Status::AtLower; total],
            head: Vec::new(),
            binv: Vec::new(),
            opts: opts.clone(),
            max_iterations,
            iterations: 0,
            since_refactor: 0,
        }
    }

    fn total(&self) -> usize {
        self.lower.len()
    }

    fn has_artificials(&self) -> bool {
        !self.artificials.is_empty()
    }

    /// Calls `f(row, value)` for every nonzero of column `j`.
    #[inline]
    fn for_column(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for k in self.col_start[j]..self.col_start[j + 1] {
                f(self.col_rows[k], self.col_vals[k]);
            }
        } else if j < self.n + self.m {
            f(j - self.n, 1.0);
        } else {
            let (r, s) = self.artificials[j - self.n - self.m];
            f(r, s);
        }
    }

    fn default_status(&self, j: usize) -> (Status, f64) {
        if self.lower[j].is_finite() {
            (Status::AtLower, self.lower[j])
        } else if self.upper[j].is_finite() {
            (Status::AtUpper, self.upper[j])
        } else {
            (Status::Zero, 0.0)
        }
    }

    fn place_nonbasic_structurals(&mut self) {
        for j in 0..self.n {
            let (st, v) = self.default_status(j);
            self.status[j] = st;
            self.x[j] = v;
        }
    }

    /// `b - A x` over the structural columns.
    fn structural_residual(&self) -> Vec<f64> {
        let mut r = self.b.clone();
        for j in 0..self.n {
            let xj = self.x[j];
            if xj != 0.0 {
                self.for_column(j, |row, a| r[row] -= a * xj);
            }
        }
        r
    }

    /// Slack basis plus one artificial per row whose slack cannot take up
    /// the residual.
    fn start_cold(&mut self) {
        self.place_nonbasic_structurals();
        let r = self.structural_residual();
        let m = self.m;
        self.head = vec![0; m];
        self.binv = vec![0.0; m * m];
        for (i, &ri) in r.iter().enumerate() {
            let s = self.n + i;
            let clamped = ri.clamp(self.lower[s], self.upper[s]);
            if clamped == ri {
                self.status[s] = Status::Basic;
                self.x[s] = ri;
                self.head[i] = s;
                self.binv[i * m + i] = 1.0;
            } else {
                self.status[s] = if clamped == self.lower[s] {
                    Status::AtLower
                } else {
                    Status::AtUpper
                };
                self.x[s] = clamped;
                let sign = if ri > clamped { 1.0 } else { -1.0 };
                let a = self.total();
                self.artificials.push((i, sign));
                self.lower.push(0.0);
                self.upper.push(f64::INFINITY);
                self.cost.push(0.0);
                self.x.push((ri - clamped).abs());
                self.status.push(Status::Basic);
                self.head[i] = a;
                self.binv[i * m + i] = sign;
            }
        }
        self.since_refactor = 0;
    }

    fn start_from_hint(&mut self, hint: &BasisHint) -> bool {
        if hint.basic.len() != self.m {
            return false;
        }
        self.place_nonbasic_structurals();
        for i in 0..self.m {
            let s = self.n + i;
            let (st, v) = self.default_status(s);
            self.status[s] = st;
            self.x[s] = v;
        }
        let mut head = Vec::with_capacity(self.m);
        for entry in &hint.basic {
            let j = match *entry {
                BasisHintEntry::Structural(j) if j < self.n => j,
                BasisHintEntry::Slack(i) if i < self.m => self.n + i,
                _ => return false,
            };
            if self.status[j] == Status::Basic {
                return false;
            }
            self.status[j] = Status::Basic;
            head.push(j);
        }
        self.head = head;
        if !self.refactor() {
            return false;
        }
        let tol = self.opts.feasibility_tol;
        self.head
            .iter()
            .all(|&j| self.x[j] >= self.lower[j] - tol && self.x[j] <= self.upper[j] + tol)
    }

    fn artificial_sum(&self) -> f64 {
        (self.n + self.m..self.total()).map(|j| self.x[j]).sum()
    }

    fn infeasibility_threshold(&self) -> f64 {
        let scale = self.b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        1e-8 * scale
    }

    /// Fixes every artificial at zero and pivots basic ones out where a
    /// replacement column exists. Artificials left basic sit on redundant
    /// rows and stay at zero.
    fn retire_artificials(&mut self) {
        let first = self.n + self.m;
        for j in first..self.total() {
            self.upper[j] = 0.0;
        }
        let m = self.m;
        for p in 0..m {
            if self.head[p] < first {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..first {
                if self.status[j] == Status::Basic {
                    continue;
                }
                let mut v = 0.0;
                self.for_column(j, |r, a| v += self.binv[r * m + p] * a);
                if v.abs() > 1e-7 && best.is_none_or(|(_, bv)| v.abs() > bv.abs()) {
                    best = Some((j, v));
                }
            }
            if let Some((q, _)) = best {
                let alpha = self.ftran(q);
                let leaving = self.head[p];
                self.x[leaving] = 0.0;
                self.status[leaving] = Status::AtLower;
                self.pivot(p, q, &alpha);
            }
        }
        for j in first..self.total() {
            if self.status[j] != Status::Basic {
                self.x[j] = 0.0;
            }
        }
        self.refactor();
    }

    /// Rebuilds `B^{-1}` from the current head and recomputes basic values.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        // Dense B, row-major, augmented with the identity on the right.
        let w = 2 * m;
        let mut a = vec![0.0; m * w];
        for (i, &j) in self.head.iter().enumerate() {
            self.for_column(j, |r, v| a[r * w + i] = v);
        }
        for r in 0..m {
            a[r * w + m + r] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            let mut big = a[col * w + col].abs();
            for r in col + 1..m {
                let v = a[r * w + col].abs();
                if v > big {
                    big = v;
                    piv = r;
                }
            }
            if big < 1e-12 {
                return false;
            }
            if piv != col {
                for k in 0..w {
                    a.swap(col * w + k, piv * w + k);
                }
            }
            let d = a[col * w + col];
            for k in 0..w {
                a[col * w + k] /= d;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = a[r * w + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..w {
                    let v = a[col * w + k];
                    if v != 0.0 {
                        a[r * w + k] -= f * v;
                    }
                }
            }
        }
        // Row i of the right half is row i of B^{-1}, i.e. basis position i.
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            for r in 0..m {
                self.binv[r * m + i] = a[i * w + m + r];
            }
        }
        self.recompute_basics();
        self.since_refactor = 0;
        true
    }

    /// `x_B = B^{-1} (b - N x_N)`.
    fn recompute_basics(&mut self) {
        let m = self.m;
        let mut r = self.b.clone();
        for j in 0..self.total() {
            if self.status[j] == Status::Basic {
                continue;
            }
            let xj = self.x[j];
            if xj != 0.0 {
                self.for_column(j, |row, a| r[row] -= a * xj);
            }
        }
        let mut xb = vec![0.0; m];
        for (row, &rv) in r.iter().enumerate() {
            if rv != 0.0 {
                let col = &self.binv[row * m..(row + 1) * m];
                for (acc, &v) in xb.iter_mut().zip(col) {
                    *acc += v * rv;
                }
            }
        }
        for (i, &j) in self.head.iter().enumerate() {
            self.x[j] = xb[i];
        }
    }

    /// `B^{-1} a_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        self.for_column(j, |r, v| {
            let col = &self.binv[r * m..(r + 1) * m];
            for (acc, &b) in alpha.iter_mut().zip(col) {
                *acc += b * v;
            }
        });
        alpha
    }

    /// Simplex multipliers `y' = c_B' B^{-1}`.
    fn btran_costs(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let cb: Vec<f64> = self.head.iter().map(|&j| cost[j]).collect();
        (0..m)
            .map(|r| {
                self.binv[r * m..(r + 1) * m]
                    .iter()
                    .zip(&cb)
                    .map(|(b, c)| b * c)
                    .sum()
            })
            .collect()
    }

    fn pivot(&mut self, p: usize, q: usize, alpha: &[f64]) {
        let m = self.m;
        let ap = alpha[p];
        for r in 0..m {
            let col = &mut self.binv[r * m..(r + 1) * m];
            let v = col[p];
            if v == 0.0 {
                continue;
            }
            let scaled = v / ap;
            for (i, (c, &a)) in col.iter_mut().zip(alpha).enumerate() {
                if i != p && a != 0.0 {
                    *c -= a * scaled;
                }
            }
            col[p] = scaled;
        }
        self.head[p] = q;
        self.status[q] = Status::Basic;
        self.since_refactor += 1;
    }

    fn phase_costs(&self, phase: Phase) -> Vec<f64> {
        match phase {
            Phase::Two => self.cost.clone(),
            Phase::One => {
                let first = self.n + self.m;
                (0..self.total())
                    .map(|j| if j >= first { 1.0 } else { 0.0 })
                    .collect()
            }
        }
    }

    fn run(&mut self, phase: Phase) -> Outcome {
        let cost = self.phase_costs(phase);
        let total = self.total();
        let m = self.m;
        let opt_tol = self.opts.optimality_tol;
        let ptol = self.opts.pivot_tol;
        let ftol = self.opts.feasibility_tol;
        let mut bland = false;
        let mut degenerate_run = 0usize;
        loop {
            if self.since_refactor >= self.opts.refactor_interval && !self.refactor() {
                return Outcome::Stalled("basis became singular".into());
            }
            let y = self.btran_costs(&cost);

            // Pricing.
            let mut entering: Option<(usize, f64)> = None;
            let mut best_score = 0.0;
            for j in 0..total {
                let st = self.status[j];
                if st == Status::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                let mut d = cost[j];
                self.for_column(j, |r, a| d -= y[r] * a);
                let (score, dir) = match st {
                    Status::AtLower if d < -opt_tol => (-d, 1.0),
                    Status::AtUpper if d > opt_tol => (d, -1.0),
                    Status::Zero if d.abs() > opt_tol => (d.abs(), -d.signum()),
                    _ => continue,
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if score > best_score {
                    best_score = score;
                    entering = Some((j, dir));
                }
            }
            let Some((q, dir)) = entering else {
                return Outcome::Optimal;
            };
            if self.iterations >= self.max_iterations {
                return Outcome::Stalled(format!(
                    "iteration limit {} reached in {:?}",
                    self.max_iterations, phase
                ));
            }
            let alpha = self.ftran(q);

            // Ratio test. `rate` is the change of a basic variable per unit
            // step of the entering variable.
            let limit = |i: usize, tol: f64| -> Option<f64> {
                let rate = -dir * alpha[i];
                let j = self.head[i];
                if rate < -ptol && self.lower[j].is_finite() {
                    Some((self.x[j] - self.lower[j] + tol) / -rate)
                } else if rate > ptol && self.upper[j].is_finite() {
                    Some((self.upper[j] - self.x[j] + tol) / rate)
                } else {
                    None
                }
            };
            let mut leave: Option<usize> = None;
            let mut step;
            if bland {
                step = f64::INFINITY;
                for i in 0..m {
                    if let Some(t) = limit(i, 0.0) {
                        let better = t < step
                            || (t == step && leave.is_some_and(|l| self.head[i] < self.head[l]));
                        if better {
                            step = t;
                            leave = Some(i);
                        }
                    }
                }
            } else {
                let mut relaxed = f64::INFINITY;
                for i in 0..m {
                    if let Some(t) = limit(i, ftol) {
                        relaxed = relaxed.min(t);
                    }
                }
                step = f64::INFINITY;
                let mut best_alpha = 0.0;
                if relaxed.is_finite() {
                    for i in 0..m {
                        if let Some(t) = limit(i, 0.0) {
                            if t <= relaxed && alpha[i].abs() > best_alpha {
                                best_alpha = alpha[i].abs();
                                step = t;
                                leave = Some(i);
                            }
                        }
                    }
                }
            }
            let range = self.upper[q] - self.lower[q];
            let flip = range.is_finite() && (leave.is_none() || range <= step);
            if leave.is_none() && !flip {
                return Outcome::Unbounded;
            }
            if flip {
                step = range;
            }
            let step = step.max(0.0);
            self.iterations += 1;

            // Move.
            if step > 0.0 {
                self.x[q] += dir * step;
                for i in 0..m {
                    let j = self.head[i];
                    self.x[j] -= dir * alpha[i] * step;
                }
            }
            if flip {
                self.status[q] = if dir > 0.0 { Status::AtUpper } else { Status::AtLower };
                self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
            } else {
                let p = leave.expect("leaving row chosen");
                let j = self.head[p];
                let rate = -dir * alpha[p];
                if rate < 0.0 {
                    self.status[j] = Status::AtLower;
                    self.x[j] = self.lower[j];
                } else {
                    self.status[j] = Status::AtUpper;
                    self.x[j] = self.upper[j];
                }
                self.pivot(p, q, &alpha);
            }

            if step <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > self.opts.degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    fn structural_values(&self) -> Vec<f64> {
        self.x[..self.n].to_vec()
    }

    fn finish(&mut self, lp: &LinearProgram) -> LpSolution {
        self.recompute_basics();
        let mut values = self.clamped_values();
        let mut report = check_solution(lp, &values).expect("length matches");
        if !report.within(RESIDUAL_TOL) && self.refactor() {
            values = self.clamped_values();
            report = check_solution(lp, &values).expect("length matches");
        }
        if !report.within(RESIDUAL_TOL) {
            return LpSolution {
                status: LpStatus::NumericalFailure,
                objective: report.objective,
                values,
                iterations: self.iterations,
                diagnostics: Some(format!(
                    "final residuals too large: bounds {:.3e}, rows {:.3e}",
                    report.max_bound_violation, report.max_constraint_violation
                )),
            };
        }
        LpSolution {
            status: LpStatus::Optimal,
            objective: report.objective,
            values,
            iterations: self.iterations,
            diagnostics: None,
        }
    }

    fn clamped_values(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| self.x[j].clamp(self.lower[j], self.upper[j]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::LinearProgram;

    #[test]
    fn bound_only_program() {
        let mut lp = LinearProgram::new();
        lp.add_variable(0.0, 3.0, -1.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.values, vec![3.0]);
        assert_eq!(sol.objective, -3.0);
    }

    #[test]
    fn covering_constraint() {
        let mut lp = LinearProgram::new();
        let a = lp.add_variable(0.0, f64::INFINITY, 1.0);
        let b = lp.add_variable(0.0, f64::INFINITY, 1.0);
        lp.add_constraint(vec![(a, 1.0), (b, 1.0)], Sense::Ge, 2.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(f64::NEG_INFINITY, f64::INFINITY, 1.0);
        lp.add_constraint(vec![(x, 1.0)], Sense::Ge, 1.0);
        lp.add_constraint(vec![(x, 1.0)], Sense::Le, 0.0);
        assert_eq!(solve(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray_is_detected() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(0.0, f64::INFINITY, -1.0);
        let y = lp.add_variable(0.0, f64::INFINITY, 0.0);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Sense::Le, 1.0);
        assert_eq!(solve(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_enters_from_zero() {
        // min -x - y  s.t.  x + y <= 4, x - y = 1, x, y free -> objective -4
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(f64::NEG_INFINITY, f64::INFINITY, -1.0);
        let y = lp.add_variable(f64::NEG_INFINITY, f64::INFINITY, -1.0);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Sense::Le, 4.0);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Sense::Eq, 1.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 4.0).abs() < 1e-12);
        assert!((sol.values[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn negative_lower_bound_and_upper_start() {
        // max x (min -x) on x in [-5, -1] with -x <= 3 -> x = -1
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(-5.0, -1.0, -1.0);
        lp.add_constraint(vec![(x, -1.0)], Sense::Le, 3.0);
        let sol = solve(&lp);
        assert_eq!(sol.values, vec![-1.0]);
        // upper-only variable starts at its upper bound
        let mut lp = LinearProgram::new();
        let z = lp.add_variable(f64::NEG_INFINITY, 2.0, 1.0);
        lp.add_constraint(vec![(z, 1.0)], Sense::Ge, -7.0);
        let sol = solve(&lp);
        assert!((sol.values[0] + 7.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities_are_handled() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(0.0, 10.0, 1.0);
        let y = lp.add_variable(0.0, 10.0, 2.0);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Sense::Eq, 3.0);
        lp.add_constraint(vec![(x, 2.0), (y, 2.0)], Sense::Eq, 6.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn hint_start_matches_cold_start() {
        // min 3a + b  s.t.  a + b = 4, b <= 3
        let mut lp = LinearProgram::new();
        let a = lp.add_variable(0.0, f64::INFINITY, 3.0);
        let b = lp.add_variable(0.0, f64::INFINITY, 1.0);
        lp.add_constraint(vec![(a, 1.0), (b, 1.0)], Sense::Eq, 4.0);
        lp.add_constraint(vec![(b, 1.0)], Sense::Le, 3.0);
        let hint = BasisHint {
            basic: vec![BasisHintEntry::Structural(a), BasisHintEntry::Slack(1)],
        };
        let warm = solve_with(&lp, &SolverOptions::default(), Some(&hint));
        let cold = solve(&lp);
        assert_eq!(warm.status, LpStatus::Optimal);
        assert!((warm.objective - 6.0).abs() < 1e-12);
        assert!((cold.objective - 6.0).abs() < 1e-12);
        // an infeasible hint falls back to a cold start
        let bad = BasisHint {
            basic: vec![BasisHintEntry::Slack(0), BasisHintEntry::Slack(1)],
        };
        assert_eq!(solve_with(&lp, &SolverOptions::default(), Some(&bad)).objective, cold.objective);
    }

    #[test]
    fn equilibration_does_not_change_the_optimum() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(0.0, f64::INFINITY, 1.0);
        let y = lp.add_variable(0.0, f64::INFINITY, 1.0);
        lp.add_constraint(vec![(x, 1000.0), (y, 2000.0)], Sense::Ge, 3000.0);
        lp.add_constraint(vec![(x, 0.001), (y, -0.001)], Sense::Le, 0.0);
        let plain = solve(&lp);
        let opts = SolverOptions {
            equilibrate: true,
            ..SolverOptions::default()
        };
        let scaled = solve_with(&lp, &opts, None);
        assert!((plain.objective - scaled.objective).abs() < 1e-9);
    }

    #[test]
    fn zero_rows_and_zero_columns() {
        let sol = solve(&LinearProgram::new());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, 0.0);
        let mut lp = LinearProgram::new();
        lp.add_constraint(vec![], Sense::Le, 1.0);
        assert_eq!(solve(&lp).status, LpStatus::Optimal);
        let mut lp = LinearProgram::new();
        lp.add_constraint(vec![], Sense::Ge, 1.0);
        assert_eq!(solve(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn iteration_limit_is_reported() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(0.0, f64::INFINITY, -1.0);
        let y = lp.add_variable(0.0, f64::INFINITY, -1.0);
        lp.add_constraint(vec![(x, 1.0), (y, 2.0)], Sense::Le, 4.0);
        lp.add_constraint(vec![(x, 3.0), (y, 1.0)], Sense::Le, 6.0);
        let opts = SolverOptions {
            max_iterations: 1,
            ..SolverOptions::default()
        };
        let sol = solve_with(&lp, &opts, None);
        assert_eq!(sol.status, LpStatus::NumericalFailure);
        assert!(sol.diagnostics.unwrap().contains("iteration limit"));
    }
}
