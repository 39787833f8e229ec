//! Parametric cost function approximations for sequential decisions under
//! uncertainty.
//!
//! The centerpiece is an energy-storage dispatch problem driven by rolling
//! wind and demand forecasts. The policy solves a deterministic lookahead
//! linear program whose forecasts are scaled by tunable coefficients θ, and
//! θ is tuned by simultaneous perturbation against a Monte-Carlo simulator.

pub mod cfa;
pub mod energy;
pub mod exemplars;
pub mod forecast;
pub mod lp;
pub mod sdm;
pub mod seed;
pub mod stats;
pub mod tuner;

pub use cfa::{cfa_policy, CfaPolicy, Parameterization, ThetaVector};
pub use energy::{EnergyConfig, EnergyDecision, EnergyProblem, EnergyState, Flow};
pub use forecast::{ForecastVector, Profile};
pub use lp::{LinearProgram, LpSolution, LpStatus, Sense};
pub use sdm::{evaluate_policy, simulate_policy, Policy, PolicyEvaluation, Problem, Trajectory};
pub use seed::{domain_seed, SeedDomain};
pub use tuner::{tune, Objective, TuneSchedule, TuneTrace};
