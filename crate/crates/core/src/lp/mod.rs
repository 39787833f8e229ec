//! Bounded-variable linear programs and their solution.
//!
//! Every problem is a minimization. Variables carry their own bounds (either
//! side may be infinite) so free and fixed variables need no reformulation.

mod mps;
mod simplex;

pub use mps::write_mps;
pub use simplex::{solve, solve_with, BasisHint, BasisHintEntry, SolverOptions};

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Variable {
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    /// Sparse row: `(variable index, coefficient)`.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("variable {index}: lower bound {lower} exceeds upper bound {upper}")]
    InvertedBounds { index: usize, lower: f64, upper: f64 },
    #[error("variable {index}: bound or cost is NaN")]
    NanVariable { index: usize },
    #[error("constraint {row} references variable {index}, but only {n} exist")]
    UnknownVariable { row: usize, index: usize, n: usize },
    #[error("constraint {row} has a non-finite coefficient or right-hand side")]
    NonFiniteRow { row: usize },
    #[error("{0} values supplied for {1} variables")]
    WrongLength(usize, usize),
}

/// `min c'x` subject to sparse rows and per-variable bounds.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, lower: f64, upper: f64, cost: f64) -> usize {
        self.variables.push(Variable { lower, upper, cost });
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        self.constraints.push(Constraint { coeffs, sense, rhs });
        self.constraints.len() - 1
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for (index, v) in self.variables.iter().enumerate() {
            if v.lower.is_nan() || v.upper.is_nan() || v.cost.is_nan() {
                return Err(LpError::NanVariable { index });
            }
            if v.lower > v.upper {
                return Err(LpError::InvertedBounds {
                    index,
                    lower: v.lower,
                    upper: v.upper,
                });
            }
        }
        let n = self.variables.len();
        for (row, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(LpError::NonFiniteRow { row });
            }
            for &(index, a) in &c.coeffs {
                if index >= n {
                    return Err(LpError::UnknownVariable { row, index, n });
                }
                if !a.is_finite() {
                    return Err(LpError::NonFiniteRow { row });
                }
            }
        }
        Ok(())
    }

    pub fn objective(&self, values: &[f64]) -> f64 {
        self.variables
            .iter()
            .zip(values)
            .map(|(v, x)| v.cost * x)
            .sum()
    }

    /// Left-hand side of constraint `row` at `values`.
    pub fn activity(&self, row: usize, values: &[f64]) -> f64 {
        self.constraints[row]
            .coeffs
            .iter()
            .map(|&(j, a)| a * values[j])
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration limit reached or the final point failed its residual
    /// check; see [`LpSolution::diagnostics`].
    NumericalFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub diagnostics: Option<String>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Primal residuals of a candidate point.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub max_bound_violation: f64,
    pub max_constraint_violation: f64,
    /// Violation of each constraint, zero when satisfied.
    pub constraint_violations: Vec<f64>,
    pub objective: f64,
}

impl ResidualReport {
    pub fn within(&self, tol: f64) -> bool {
        self.max_bound_violation <= tol && self.max_constraint_violation <= tol
    }
}

/// Measures how far `values` is from satisfying `lp`. Only the length
/// check can fail.
pub fn check_solution(lp: &LinearProgram, values: &[f64]) -> Result<ResidualReport, LpError> {
    if values.len() != lp.num_variables() {
        return Err(LpError::WrongLength(values.len(), lp.num_variables()));
    }
    let max_bound_violation = lp
        .variables
        .iter()
        .zip(values)
        .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0))
        .fold(0.0, f64::max);
    let constraint_violations: Vec<f64> = (0..lp.num_constraints())
        .map(|row| {
            let c = &lp.constraints[row];
            let lhs = lp.activity(row, values);
            match c.sense {
                Sense::Le => (lhs - c.rhs).max(0.0),
                Sense::Ge => (c.rhs - lhs).max(0.0),
                Sense::Eq => (lhs - c.rhs).abs(),
            }
        })
        .collect();
    let max_constraint_violation = constraint_violations.iter().copied().fold(0.0, f64::max);
    Ok(ResidualReport {
        max_bound_violation,
        max_constraint_violation,
        constraint_violations,
        objective: lp.objective(values),
    })
}
