//! Sequential decision problems: the policy interface, sample paths,
//! trajectory simulation and Monte-Carlo policy evaluation under common
//! random numbers.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::seed::{child_seed, rng_from_seed, SimRng};

/// A violated constraint, reported by [`Problem::check_decision`].
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub constraint: String,
    /// How far the decision is on the wrong side of the constraint.
    pub amount: f64,
}

impl Violation {
    pub fn new(constraint: impl Into<String>, amount: f64) -> Self {
        Self {
            constraint: constraint.into(),
            amount,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated by {:.3e}", self.constraint, self.amount)
    }
}

/// Error raised by a policy while computing a decision.
#[derive(Debug, Error)]
#[error("{message}")]
pub struct PolicyError {
    pub message: String,
}

impl PolicyError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("sample path has {available} periods, problem needs {required}")]
    PathTooShort { required: usize, available: usize },
    #[error("period {period}: policy failed: {source}")]
    Policy {
        period: usize,
        #[source]
        source: PolicyError,
    },
    #[error("period {period}: infeasible decision: {}", join_violations(.violations))]
    InfeasibleDecision {
        period: usize,
        violations: Vec<Violation>,
    },
    #[error("period {period}: transition failed: {message}")]
    Transition { period: usize, message: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("policy evaluation needs at least one sample path")]
    NoPaths,
    #[error("sample path {index} (seed {seed}): {source}")]
    Path {
        index: usize,
        seed: u64,
        #[source]
        source: SimulationError,
    },
}

/// A finite-horizon sequential decision problem `(S_0, x_t, W_{t+1}, S^M, C)`.
///
/// Exogenous information is drawn up front, one payload per period, from a
/// seeded RNG. It therefore cannot depend on the state or the decision; the
/// problems in this crate don't need that.
pub trait Problem: Sync {
    type State: Clone + Send + Sync;
    type Decision: Clone + Send + Sync;
    type Exogenous: Clone + Send + Sync;

    /// Number of decision periods `T`.
    fn horizon(&self) -> usize;

    fn initial_state(&self) -> Self::State;

    /// Draws `W_{t+1}`, the information revealed after the decision at `t`.
    fn sample_exogenous(&self, t: usize, rng: &mut SimRng) -> Self::Exogenous;

    /// Constraint violations of `decision` in `state`; empty when feasible.
    fn check_decision(&self, state: &Self::State, decision: &Self::Decision) -> Vec<Violation>;

    fn transition(
        &self,
        state: &Self::State,
        decision: &Self::Decision,
        info: &Self::Exogenous,
    ) -> Result<Self::State, String>;

    /// Cost `C_t(S_t, x_t)`.
    fn contribution(&self, state: &Self::State, decision: &Self::Decision) -> f64;
}

/// A decision rule `X^π(S_t)`. Policies are read-only after construction so
/// one instance can serve many simulation workers.
pub trait Policy<P: Problem>: Sync {
    fn decide(&self, problem: &P, t: usize, state: &P::State) -> Result<P::Decision, PolicyError>;
}

impl<P, F> Policy<P> for F
where
    P: Problem,
    F: Fn(&P, usize, &P::State) -> Result<P::Decision, PolicyError> + Sync,
{
    fn decide(&self, problem: &P, t: usize, state: &P::State) -> Result<P::Decision, PolicyError> {
        self(problem, t, state)
    }
}

/// Exogenous realizations `W_1..W_T` produced by one seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePath<W> {
    pub seed: u64,
    /// `info[t]` is `W_{t+1}`.
    pub info: Vec<W>,
}

impl<W> SamplePath<W> {
    pub fn len(&self) -> usize {
        self.info.len()
    }

    pub fn is_empty(&self) -> bool {
        self.info.is_empty()
    }
}

/// One simulated run of a policy.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S, X> {
    /// `S_0..S_T`.
    pub states: Vec<S>,
    /// `x_0..x_{T-1}`.
    pub decisions: Vec<X>,
    pub contributions: Vec<f64>,
    pub total_cost: f64,
}

/// Sample-average estimate of a policy's expected cost.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyEvaluation {
    pub mean: f64,
    pub std_error: f64,
    pub path_costs: Vec<f64>,
    pub n_paths: usize,
    pub master_seed: u64,
}

impl PolicyEvaluation {
    pub fn from_costs(path_costs: Vec<f64>, master_seed: u64) -> Self {
        let (mean, std_error) = mean_and_std_error(&path_costs);
        Self {
            mean,
            std_error,
            n_paths: path_costs.len(),
            path_costs,
            master_seed,
        }
    }
}

/// Arithmetic mean and `s / sqrt(n)`; the standard error of a single value is 0.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (n - 1) as f64).sqrt();
    (mean, sd / (n as f64).sqrt())
}

pub fn generate_sample_path<P: Problem>(problem: &P, seed: u64, periods: usize) -> SamplePath<P::Exogenous> {
    let mut rng = rng_from_seed(seed);
    let info = (0..periods)
        .map(|t| problem.sample_exogenous(t, &mut rng))
        .collect();
    SamplePath { seed, info }
}

/// Rolls `policy` forward along `path` from `initial`.
///
/// An infeasible decision aborts the run; it is never repaired.
pub fn simulate_policy<P, Pi>(
    policy: &Pi,
    problem: &P,
    path: &SamplePath<P::Exogenous>,
    initial: P::State,
) -> Result<Trajectory<P::State, P::Decision>, SimulationError>
where
    P: Problem,
    Pi: Policy<P> + ?Sized,
{
    let horizon = problem.horizon();
    if path.len() < horizon {
        return Err(SimulationError::PathTooShort {
            required: horizon,
            available: path.len(),
        });
    }
    let mut states = Vec::with_capacity(horizon + 1);
    let mut decisions = Vec::with_capacity(horizon);
    let mut contributions = Vec::with_capacity(horizon);
    let mut state = initial;
    for (t, info) in path.info.iter().take(horizon).enumerate() {
        let decision = policy
            .decide(problem, t, &state)
            .map_err(|source| SimulationError::Policy { period: t, source })?;
        let violations = problem.check_decision(&state, &decision);
        if !violations.is_empty() {
            return Err(SimulationError::InfeasibleDecision {
                period: t,
                violations,
            });
        }
        contributions.push(problem.contribution(&state, &decision));
        let next = problem
            .transition(&state, &decision, info)
            .map_err(|message| SimulationError::Transition { period: t, message })?;
        states.push(std::mem::replace(&mut state, next));
        decisions.push(decision);
    }
    states.push(state);
    let total_cost = contributions.iter().sum();
    Ok(Trajectory {
        states,
        decisions,
        contributions,
        total_cost,
    })
}

/// Estimates the expected total cost of `policy` over `n_paths` sample paths.
///
/// Path `i` is generated from `child_seed(master_seed, i)`, so every policy
/// evaluated with the same master seed faces the same paths. Paths run in
/// parallel; costs are collected in path order.
pub fn evaluate_policy<P, Pi>(
    policy: &Pi,
    problem: &P,
    n_paths: usize,
    master_seed: u64,
) -> Result<PolicyEvaluation, EvaluationError>
where
    P: Problem,
    Pi: Policy<P> + ?Sized,
{
    if n_paths == 0 {
        return Err(EvaluationError::NoPaths);
    }
    let horizon = problem.horizon();
    let results: Vec<Result<f64, EvaluationError>> = (0..n_paths)
        .into_par_iter()
        .map(|index| {
            let seed = child_seed(master_seed, index as u64);
            let path = generate_sample_path(problem, seed, horizon);
            simulate_policy(policy, problem, &path, problem.initial_state())
                .map(|traj| traj.total_cost)
                .map_err(|source| EvaluationError::Path {
                    index,
                    seed,
                    source,
                })
        })
        .collect();
    let costs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(PolicyEvaluation::from_costs(costs, master_seed))
}

/// Seeds of the paths [`evaluate_policy`] uses for `(master_seed, n_paths)`.
pub fn path_seeds(master_seed: u64, n_paths: usize) -> impl Iterator<Item = u64> {
    (0..n_paths as u64).map(move |i| child_seed(master_seed, i))
}
