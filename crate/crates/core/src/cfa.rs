//! Parameterized deterministic lookahead policy for the energy system.
//!
//! At time `t` the policy plans periods `t, t+1, ..., t+h` as one linear
//! program and implements only the first period's flows. Period `t` uses the
//! realized demand, wind and storage; a future period at lag `τ` uses the
//! scaled forecasts `θ^D_τ f^D_{t,t+τ}` (demand, an equality) and
//! `θ^E_τ f^E_{t,t+τ}` (wind available, an upper bound). `θ ≡ 1` gives the
//! classical rolling-horizon lookahead.
//!
//! The planned price of every future period is the current price `p_t`,
//! the conditional mean of a random walk. The lookahead is truncated at the
//! end of the episode and stored energy left at its end is worth nothing.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{EnergyConfig, EnergyDecision, EnergyProblem, EnergyState, Flow};
use crate::lp::{solve_with, write_mps, BasisHint, BasisHintEntry, LinearProgram, LpStatus, Sense, SolverOptions};
use crate::sdm::{evaluate_policy, Policy, PolicyError, PolicyEvaluation};
use crate::tuner::{Objective, ObjectiveError};

#[derive(Debug, Error)]
pub enum CfaError {
    #[error("{stream} forecast covers {available} lags, lookahead needs {required}")]
    ForecastTooShort {
        stream: &'static str,
        required: usize,
        available: usize,
    },
    #[error("theta covers {available} lags, lookahead needs {required}")]
    ThetaTooShort { required: usize, available: usize },
    #[error("theta vectors differ in length: demand {demand}, wind {wind}")]
    ThetaShape { demand: usize, wind: usize },
    #[error("theta component {0} is not finite")]
    ThetaNotFinite(f64),
    #[error("{dimension} free parameters expected, got {got}")]
    ParameterCount { dimension: usize, got: usize },
    #[error("lookahead at t={t} is infeasible\n{mps}")]
    Infeasible { t: usize, mps: String },
    #[error("lookahead at t={t} is unbounded; a flow is missing a bound")]
    Unbounded { t: usize },
    #[error("lookahead at t={t}: solver failure: {diagnostics}")]
    Solver { t: usize, diagnostics: String },
    #[error("writing lookahead dump: {0}")]
    Dump(String),
}

/// Forecast multipliers by lag: `demand[τ-1] = θ^D_τ`, `wind[τ-1] = θ^E_τ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaVector {
    pub demand: Vec<f64>,
    pub wind: Vec<f64>,
}

impl ThetaVector {
    pub fn new(demand: Vec<f64>, wind: Vec<f64>) -> Result<Self, CfaError> {
        if demand.len() != wind.len() {
            return Err(CfaError::ThetaShape {
                demand: demand.len(),
                wind: wind.len(),
            });
        }
        if let Some(&bad) = demand.iter().chain(&wind).find(|v| !v.is_finite()) {
            return Err(CfaError::ThetaNotFinite(bad));
        }
        Ok(Self { demand, wind })
    }

    pub fn constant(horizon: usize, value: f64) -> Self {
        Self {
            demand: vec![value; horizon],
            wind: vec![value; horizon],
        }
    }

    pub fn ones(horizon: usize) -> Self {
        Self::constant(horizon, 1.0)
    }

    pub fn horizon(&self) -> usize {
        self.demand.len()
    }

    pub fn components(&self) -> impl Iterator<Item = f64> + '_ {
        self.demand.iter().chain(&self.wind).copied()
    }
}

/// How a flat vector of tunable parameters maps onto a [`ThetaVector`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameterization {
    /// `[θ^D_1..θ^D_H, θ^E_1..θ^E_H]`.
    #[default]
    Full,
    /// `θ^D ≡ 1`; the parameters are `θ^E_1..θ^E_H`.
    WindOnly,
    /// One value shared by every lag of both streams.
    Scalar,
}

impl Parameterization {
    pub fn dimension(self, horizon: usize) -> usize {
        match self {
            Parameterization::Full => 2 * horizon,
            Parameterization::WindOnly => horizon,
            Parameterization::Scalar => 1,
        }
    }

    pub fn expand(self, params: &[f64], horizon: usize) -> Result<ThetaVector, CfaError> {
        let dimension = self.dimension(horizon);
        if params.len() != dimension {
            return Err(CfaError::ParameterCount {
                dimension,
                got: params.len(),
            });
        }
        match self {
            Parameterization::Full => {
                ThetaVector::new(params[..horizon].to_vec(), params[horizon..].to_vec())
            }
            Parameterization::WindOnly => ThetaVector::new(vec![1.0; horizon], params.to_vec()),
            Parameterization::Scalar => ThetaVector::new(vec![params[0]; horizon], vec![params[0]; horizon]),
        }
    }

    /// Inverse of [`expand`](Self::expand) for vectors it can represent;
    /// the scalar form takes the first wind coefficient.
    pub fn flatten(self, theta: &ThetaVector) -> Vec<f64> {
        match self {
            Parameterization::Full => theta.components().collect(),
            Parameterization::WindOnly => theta.wind.clone(),
            Parameterization::Scalar => vec![theta.wind.first().copied().unwrap_or(1.0)],
        }
    }
}

/// Variable and row indexing of a lookahead program with `horizon` future
/// periods. Period `k` (lag `k`, `k = 0` is now) owns variables
/// `6k..6k+5`: the five flows in [`Flow::ALL`] order, then the storage level
/// at the start of period `k+1`. Its rows are `4k..4k+3`: storage available,
/// storage balance, demand balance, wind available.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LookaheadLayout {
    horizon: usize,
}

const VARS_PER_PERIOD: usize = 6;
const ROWS_PER_PERIOD: usize = 4;

impl LookaheadLayout {
    pub fn new(horizon: usize) -> Self {
        Self { horizon }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn periods(&self) -> usize {
        self.horizon + 1
    }

    pub fn num_variables(&self) -> usize {
        VARS_PER_PERIOD * self.periods()
    }

    pub fn num_rows(&self) -> usize {
        ROWS_PER_PERIOD * self.periods()
    }

    pub fn flow(&self, flow: Flow, lag: usize) -> usize {
        debug_assert!(lag <= self.horizon);
        VARS_PER_PERIOD * lag + flow as usize
    }

    /// Planned storage `R̃_{t,t+lag}`, `lag = 1..=h+1`.
    pub fn storage(&self, lag: usize) -> usize {
        debug_assert!(lag >= 1 && lag <= self.periods());
        VARS_PER_PERIOD * (lag - 1) + 5
    }

    /// A starting basis that is feasible for every state: grid covers all
    /// demand, the battery idles, and the `<=` rows keep their slacks.
    pub fn idle_basis(&self) -> BasisHint {
        let mut basic = Vec::with_capacity(self.num_rows());
        for k in 0..self.periods() {
            let row = ROWS_PER_PERIOD * k;
            basic.push(BasisHintEntry::Slack(row));
            basic.push(BasisHintEntry::Structural(self.storage(k + 1)));
            basic.push(BasisHintEntry::Structural(self.flow(Flow::GridToDemand, k)));
            basic.push(BasisHintEntry::Slack(row + 3));
        }
        BasisHint { basic }
    }
}

/// Future periods the lookahead at `state.t` plans over: `min(H, T - 1 - t)`.
pub fn effective_horizon(state: &EnergyState, config: &EnergyConfig) -> usize {
    config
        .lookahead
        .min(config.horizon.saturating_sub(state.t + 1))
}

/// Builds the lookahead with forecasts scaled by `theta`.
pub fn build_lookahead(
    state: &EnergyState,
    theta: &ThetaVector,
    config: &EnergyConfig,
) -> Result<(LinearProgram, LookaheadLayout), CfaError> {
    build(state, Some(theta), config)
}

/// Builds the unscaled lookahead, which uses the forecasts as they are.
pub fn build_deterministic_lookahead(
    state: &EnergyState,
    config: &EnergyConfig,
) -> Result<(LinearProgram, LookaheadLayout), CfaError> {
    build(state, None, config)
}

fn build(
    state: &EnergyState,
    theta: Option<&ThetaVector>,
    config: &EnergyConfig,
) -> Result<(LinearProgram, LookaheadLayout), CfaError> {
    let h = effective_horizon(state, config);
    for (stream, f) in [("demand", &state.demand_forecast), ("wind", &state.wind_forecast)] {
        if f.horizon() < h {
            return Err(CfaError::ForecastTooShort {
                stream,
                required: h,
                available: f.horizon(),
            });
        }
    }
    if let Some(theta) = theta {
        if theta.horizon() < h {
            return Err(CfaError::ThetaTooShort {
                required: h,
                available: theta.horizon(),
            });
        }
    }
    let layout = LookaheadLayout::new(h);
    let mut lp = LinearProgram::new();
    let price = state.price;
    for _ in 0..layout.periods() {
        for flow in Flow::ALL {
            let (lo, hi) = config.limits.bounds(flow);
            let cost = match flow {
                Flow::GridToDemand | Flow::GridToBattery => price,
                _ => 0.0,
            };
            lp.add_variable(lo, hi, cost);
        }
        lp.add_variable(0.0, config.storage_capacity, 0.0);
    }
    for k in 0..layout.periods() {
        let x = |flow| layout.flow(flow, k);
        let (demand, wind) = if k == 0 {
            (state.demand, state.wind)
        } else {
            let f_d = state.demand_forecast.lag(k);
            let f_e = state.wind_forecast.lag(k);
            match theta {
                Some(theta) => (theta.demand[k - 1] * f_d, theta.wind[k - 1] * f_e),
                None => (f_d, f_e),
            }
        };
        // Storage available and storage balance. Now the level is the
        // realized R_t; later it is the planned level variable.
        let mut available = vec![
            (x(Flow::BatteryToDemand), 1.0),
            (x(Flow::GridToBattery), -1.0),
            (x(Flow::WindToBattery), -1.0),
        ];
        let mut balance = vec![
            (layout.storage(k + 1), 1.0),
            (x(Flow::GridToBattery), -1.0),
            (x(Flow::WindToBattery), -1.0),
            (x(Flow::BatteryToDemand), 1.0),
        ];
        let level = if k == 0 {
            state.storage
        } else {
            available.push((layout.storage(k), -1.0));
            balance.push((layout.storage(k), -1.0));
            0.0
        };
        lp.add_constraint(available, Sense::Le, level);
        lp.add_constraint(balance, Sense::Eq, level);
        lp.add_constraint(
            vec![
                (x(Flow::WindToDemand), 1.0),
                (x(Flow::BatteryToDemand), 1.0),
                (x(Flow::GridToDemand), 1.0),
            ],
            Sense::Eq,
            demand,
        );
        lp.add_constraint(
            vec![(x(Flow::WindToBattery), 1.0), (x(Flow::WindToDemand), 1.0)],
            Sense::Le,
            wind,
        );
    }
    Ok((lp, layout))
}

/// Rolling lookahead policy. `theta: None` is the unscaled lookahead.
#[derive(Clone, Debug, Default)]
pub struct CfaPolicy {
    pub theta: Option<ThetaVector>,
    pub solver: SolverOptions,
    /// Start every solve from [`LookaheadLayout::idle_basis`].
    pub idle_start: bool,
    /// Write every built program to `<dir>/lookahead_t<t>.mps`.
    pub dump_dir: Option<PathBuf>,
}

impl CfaPolicy {
    pub fn new(theta: ThetaVector) -> Self {
        Self {
            theta: Some(theta),
            idle_start: true,
            ..Self::default()
        }
    }

    pub fn deterministic() -> Self {
        Self {
            theta: None,
            idle_start: true,
            ..Self::default()
        }
    }

    pub fn decide(&self, state: &EnergyState, config: &EnergyConfig) -> Result<EnergyDecision, CfaError> {
        let (lp, layout) = build(state, self.theta.as_ref(), config)?;
        if let Some(dir) = &self.dump_dir {
            let path = dir.join(format!("lookahead_t{:04}.mps", state.t));
            std::fs::write(&path, write_mps(&lp, &format!("LOOKAHEAD_T{}", state.t)))
                .map_err(|e| CfaError::Dump(format!("{}: {e}", path.display())))?;
        }
        let hint = self.idle_start.then(|| layout.idle_basis());
        let sol = solve_with(&lp, &self.solver, hint.as_ref());
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => {
                return Err(CfaError::Infeasible {
                    t: state.t,
                    mps: write_mps(&lp, "INFEASIBLE_LOOKAHEAD"),
                })
            }
            LpStatus::Unbounded => return Err(CfaError::Unbounded { t: state.t }),
            LpStatus::NumericalFailure => {
                return Err(CfaError::Solver {
                    t: state.t,
                    diagnostics: sol.diagnostics.unwrap_or_default(),
                })
            }
        }
        let mut decision = EnergyDecision::default();
        for flow in Flow::ALL {
            decision.set(flow, sol.values[layout.flow(flow, 0)]);
        }
        Ok(decision)
    }
}

/// Solves the lookahead built from `theta` and returns its first-period flows.
pub fn cfa_policy(state: &EnergyState, theta: &ThetaVector, config: &EnergyConfig) -> Result<EnergyDecision, CfaError> {
    CfaPolicy::new(theta.clone()).decide(state, config)
}

impl Policy<EnergyProblem> for CfaPolicy {
    fn decide(&self, problem: &EnergyProblem, _t: usize, state: &EnergyState) -> Result<EnergyDecision, PolicyError> {
        CfaPolicy::decide(self, state, &problem.config).map_err(|e| PolicyError::new(e.to_string()))
    }
}

/// Mean simulated cost of the lookahead policy as a function of its free
/// parameters.
#[derive(Clone, Debug)]
pub struct LookaheadObjective {
    pub problem: EnergyProblem,
    pub parameterization: Parameterization,
    pub solver: SolverOptions,
}

impl LookaheadObjective {
    pub fn new(problem: EnergyProblem, parameterization: Parameterization) -> Self {
        Self {
            problem,
            parameterization,
            solver: SolverOptions::default(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.parameterization.dimension(self.problem.config.lookahead)
    }

    pub fn policy(&self, params: &[f64]) -> Result<CfaPolicy, CfaError> {
        let theta = self.parameterization.expand(params, self.problem.config.lookahead)?;
        Ok(CfaPolicy {
            solver: self.solver.clone(),
            ..CfaPolicy::new(theta)
        })
    }

    pub fn evaluate_paths(&self, params: &[f64], master_seed: u64, paths: usize) -> Result<PolicyEvaluation, String> {
        let policy = self.policy(params).map_err(|e| e.to_string())?;
        evaluate_policy(&policy, &self.problem, paths, master_seed).map_err(|e| e.to_string())
    }
}

impl Objective for LookaheadObjective {
    fn evaluate(&self, theta: &[f64], master_seed: u64, paths: usize) -> Result<f64, ObjectiveError> {
        self.evaluate_paths(theta, master_seed, paths)
            .map(|e| e.mean)
            .map_err(|message| ObjectiveError {
                theta: theta.to_vec(),
                message,
            })
    }
}
