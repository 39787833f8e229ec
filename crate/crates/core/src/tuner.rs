//! Stochastic search over policy parameters.
//!
//! The objective is a noisy function `F(θ; seed, paths)`: the simulated
//! mean cost of the policy with parameters `θ` over `paths` sample paths
//! derived from `seed`. Comparisons made within one step (the two SPSA
//! evaluations, the two sides of a finite difference, every point of a grid)
//! always reuse the same seed.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::{domain_seed, rng_from_seed, SeedDomain, SimRng};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("objective failed at theta = {theta:?}: {message}")]
pub struct ObjectiveError {
    pub theta: Vec<f64>,
    pub message: String,
}

/// A noisy objective to minimize.
pub trait Objective: Sync {
    fn evaluate(&self, theta: &[f64], master_seed: u64, paths: usize) -> Result<f64, ObjectiveError>;
}

impl<F> Objective for F
where
    F: Fn(&[f64], u64, usize) -> Result<f64, String> + Sync,
{
    fn evaluate(&self, theta: &[f64], master_seed: u64, paths: usize) -> Result<f64, ObjectiveError> {
        self(theta, master_seed, paths).map_err(|message| ObjectiveError {
            theta: theta.to_vec(),
            message,
        })
    }
}

/// Step sizes `a_n = a / (n + A)^α`, perturbation widths `c_n = c / n^γ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuneSchedule {
    /// Step-size numerator. `None` calibrates it so that the first step
    /// moves a typical coordinate by `initial_step`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    pub initial_step: f64,
    pub big_a: f64,
    pub alpha: f64,
    pub c: f64,
    pub gamma: f64,
    pub iterations: usize,
    /// Paths per objective evaluation.
    pub batch_size: usize,
    /// Independent SPSA estimates averaged per iteration.
    pub gradient_replicates: usize,
    pub lo: f64,
    pub hi: f64,
    /// Paths in the fixed set used to rank iterates.
    pub selection_paths: usize,
    /// Iterates are ranked every this many iterations (and at the end).
    pub select_every: usize,
}

impl Default for TuneSchedule {
    fn default() -> Self {
        Self {
            a: None,
            initial_step: 0.1,
            big_a: 10.0,
            alpha: 0.602,
            c: 0.1,
            gamma: 0.101,
            iterations: 100,
            batch_size: 20,
            gradient_replicates: 1,
            lo: 0.0,
            hi: 2.0,
            selection_paths: 200,
            select_every: 10,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("tuner schedule: {0}")]
pub struct ScheduleError(pub String);

impl TuneSchedule {
    /// Validates the schedule; returns warnings for legal but unusual values.
    pub fn validate(&self) -> Result<Vec<String>, ScheduleError> {
        let err = |m: &str| Err(ScheduleError(m.to_string()));
        if let Some(a) = self.a {
            if !(a > 0.0 && a.is_finite()) {
                return err("a must be positive");
            }
        } else if !(self.initial_step > 0.0) {
            return err("initial_step must be positive");
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return err("c must be positive");
        }
        if !(self.alpha > 0.5 && self.alpha <= 1.0) {
            return err("alpha must lie in (0.5, 1]");
        }
        if !(self.gamma > 0.0) {
            return err("gamma must be positive");
        }
        if self.big_a < 0.0 {
            return err("big_a must be nonnegative");
        }
        if !(self.lo <= self.hi) {
            return err("lo must not exceed hi");
        }
        if self.batch_size == 0 || self.selection_paths == 0 {
            return err("batch_size and selection_paths must be positive");
        }
        if self.gradient_replicates == 0 || self.select_every == 0 {
            return err("gradient_replicates and select_every must be positive");
        }
        let mut warnings = Vec::new();
        if self.alpha - 2.0 * self.gamma <= 0.0 {
            warnings.push(format!(
                "alpha - 2 gamma = {:.3} is not positive; SPSA convergence conditions fail",
                self.alpha - 2.0 * self.gamma
            ));
        }
        Ok(warnings)
    }

    pub fn step(&self, a: f64, n: usize) -> f64 {
        a / (n as f64 + self.big_a).powf(self.alpha)
    }

    pub fn width(&self, n: usize) -> f64 {
        self.c / (n as f64).powf(self.gamma)
    }
}

pub fn project_box(theta: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    theta.iter().map(|v| v.clamp(lo, hi)).collect()
}

/// One simultaneous-perturbation gradient estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct SpsaEstimate {
    pub gradient: Vec<f64>,
    pub delta: Vec<f64>,
    pub plus: f64,
    pub minus: f64,
}

/// Draws `Δ ∈ {-1, +1}^d` from `rng` and returns
/// `ĝ_i = (F(θ + cΔ) - F(θ - cΔ)) / (2 c Δ_i)`, both sides on `seed`.
///
/// With `bounds`, the perturbed points are projected into the box and each
/// coordinate divides by the distance actually spanned; a coordinate with
/// no room to move gets a zero component.
pub fn spsa_gradient<O: Objective + ?Sized>(
    objective: &O,
    theta: &[f64],
    c: f64,
    rng: &mut SimRng,
    seed: u64,
    paths: usize,
    bounds: Option<(f64, f64)>,
) -> Result<SpsaEstimate, ObjectiveError> {
    let delta: Vec<f64> = theta
        .iter()
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let shift = |sign: f64| -> Vec<f64> {
        let raw: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + sign * c * d).collect();
        match bounds {
            Some((lo, hi)) => project_box(&raw, lo, hi),
            None => raw,
        }
    };
    let up = shift(1.0);
    let down = shift(-1.0);
    let (plus, minus) = rayon::join(
        || objective.evaluate(&up, seed, paths),
        || objective.evaluate(&down, seed, paths),
    );
    let (plus, minus) = (plus?, minus?);
    let gradient = up
        .iter()
        .zip(&down)
        .map(|(u, d)| {
            let span = u - d;
            if span == 0.0 {
                0.0
            } else {
                (plus - minus) / span
            }
        })
        .collect();
    Ok(SpsaEstimate {
        gradient,
        delta,
        plus,
        minus,
    })
}

/// Central differences `(F(θ + h e_i) - F(θ - h e_i)) / 2h`, every pair on `seed`.
pub fn finite_difference_gradient<O: Objective + ?Sized>(
    objective: &O,
    theta: &[f64],
    h: f64,
    seed: u64,
    paths: usize,
) -> Result<Vec<f64>, ObjectiveError> {
    (0..theta.len())
        .map(|i| {
            let mut up = theta.to_vec();
            let mut down = theta.to_vec();
            up[i] += h;
            down[i] -= h;
            let plus = objective.evaluate(&up, seed, paths)?;
            let minus = objective.evaluate(&down, seed, paths)?;
            Ok((plus - minus) / (2.0 * h))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// Iterate after this iteration's update (`θ_0` on row 0).
    pub theta: Vec<f64>,
    /// Mean of the two perturbed evaluations, NaN on row 0.
    pub objective: f64,
    pub gradient_norm: f64,
    /// Master seed of this iteration's objective evaluations.
    pub eval_seed: u64,
    /// Seed of this iteration's perturbation directions.
    pub perturb_seed: u64,
    /// Objective on the selection set, when this iterate was ranked.
    pub selection: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TuneTrace {
    pub rows: Vec<TraceRow>,
    /// Step-size numerator used, after calibration.
    pub a: f64,
    pub selection_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuneOutcome {
    pub theta: Vec<f64>,
    pub selection_objective: f64,
    /// Iteration whose iterate was selected.
    pub selected_iteration: usize,
    pub trace: TuneTrace,
}

#[derive(Debug, Error)]
pub enum TuneError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("starting point {0:?} lies outside the box")]
    StartOutsideBox(Vec<f64>),
    #[error("iteration {iteration}: {source}")]
    Objective {
        iteration: usize,
        #[source]
        source: ObjectiveError,
        trace: TuneTrace,
    },
    #[error("iteration {iteration}: gradient estimate is not finite")]
    NonFinite { iteration: usize, trace: TuneTrace },
}

/// Projected SPSA: `θ_{n+1} = Π(θ_n - a_n ĝ_n)`.
///
/// Iterate `n` is scored on a fixed selection path set every
/// `select_every` iterations, at the start and at the end; the best scored
/// iterate is returned (earliest on ties).
pub fn tune<O: Objective + ?Sized>(
    objective: &O,
    theta0: &[f64],
    schedule: &TuneSchedule,
    master_seed: u64,
) -> Result<TuneOutcome, TuneError> {
    schedule.validate()?;
    let (lo, hi) = (schedule.lo, schedule.hi);
    if theta0.iter().any(|v| !(lo..=hi).contains(v)) {
        return Err(TuneError::StartOutsideBox(theta0.to_vec()));
    }
    let selection_seed = domain_seed(master_seed, SeedDomain::Select, 0);
    let mut trace = TuneTrace {
        rows: Vec::with_capacity(schedule.iterations + 1),
        a: schedule.a.unwrap_or(f64::NAN),
        selection_seed,
    };
    let select = |theta: &[f64], iteration: usize, trace: &TuneTrace| {
        objective
            .evaluate(theta, selection_seed, schedule.selection_paths)
            .map_err(|source| TuneError::Objective {
                iteration,
                source,
                trace: trace.clone(),
            })
    };

    let mut theta = theta0.to_vec();
    let first = select(&theta, 0, &trace)?;
    let mut best = (theta.clone(), first, 0usize);
    trace.rows.push(TraceRow {
        iteration: 0,
        theta: theta.clone(),
        objective: f64::NAN,
        gradient_norm: f64::NAN,
        eval_seed: selection_seed,
        perturb_seed: 0,
        selection: Some(first),
    });
    if schedule.iterations == 0 {
        trace.a = schedule.a.unwrap_or(0.0);
        return Ok(TuneOutcome {
            theta,
            selection_objective: first,
            selected_iteration: 0,
            trace,
        });
    }

    let mut a = schedule.a;
    for n in 1..=schedule.iterations {
        let eval_seed = domain_seed(master_seed, SeedDomain::Tune, n as u64);
        let perturb_seed = domain_seed(master_seed, SeedDomain::Perturb, n as u64);
        let mut rng = rng_from_seed(perturb_seed);
        let c_n = schedule.width(n);
        let mut gradient = vec![0.0; theta.len()];
        let mut level = 0.0;
        for _ in 0..schedule.gradient_replicates {
            let est = spsa_gradient(
                objective,
                &theta,
                c_n,
                &mut rng,
                eval_seed,
                schedule.batch_size,
                Some((lo, hi)),
            )
            .map_err(|source| TuneError::Objective {
                iteration: n,
                source,
                trace: trace.clone(),
            })?;
            for (g, e) in gradient.iter_mut().zip(&est.gradient) {
                *g += e;
            }
            level += 0.5 * (est.plus + est.minus);
        }
        let reps = schedule.gradient_replicates as f64;
        gradient.iter_mut().for_each(|g| *g /= reps);
        level /= reps;
        if gradient.iter().any(|g| !g.is_finite()) {
            return Err(TuneError::NonFinite { iteration: n, trace });
        }
        let norm = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        let a_value = *a.get_or_insert_with(|| {
            let typical = gradient.iter().map(|g| g.abs()).sum::<f64>() / gradient.len().max(1) as f64;
            if typical > 0.0 {
                schedule.initial_step * (1.0 + schedule.big_a).powf(schedule.alpha) / typical
            } else {
                schedule.initial_step
            }
        });
        trace.a = a_value;
        let a_n = schedule.step(a_value, n);
        let stepped: Vec<f64> = theta.iter().zip(&gradient).map(|(t, g)| t - a_n * g).collect();
        theta = project_box(&stepped, lo, hi);

        let selection = if n % schedule.select_every == 0 || n == schedule.iterations {
            let value = select(&theta, n, &trace)?;
            if value < best.1 {
                best = (theta.clone(), value, n);
            }
            Some(value)
        } else {
            None
        };
        trace.rows.push(TraceRow {
            iteration: n,
            theta: theta.clone(),
            objective: level,
            gradient_norm: norm,
            eval_seed,
            perturb_seed,
            selection,
        });
    }
    Ok(TuneOutcome {
        theta: best.0,
        selection_objective: best.1,
        selected_iteration: best.2,
        trace,
    })
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid search supports at most 2 axes, got {0}")]
    TooManyAxes(usize),
    #[error("grid axis {0} is empty")]
    EmptyAxis(usize),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSearch {
    pub best: Vec<f64>,
    pub best_value: f64,
    /// Every grid point with its objective, first axis slowest.
    pub table: Vec<(Vec<f64>, f64)>,
}

/// Exhaustive search over the Cartesian product of `axes`, every point on
/// the same paths. The first point attaining the minimum wins.
pub fn grid_search<O: Objective + ?Sized>(
    objective: &O,
    axes: &[Vec<f64>],
    master_seed: u64,
    paths: usize,
) -> Result<GridSearch, GridError> {
    grid_search_with_ties(objective, axes, master_seed, paths, 0.0)
}

/// As [`grid_search`], but values within `rel_tol * max(1, |min|)` of the
/// minimum count as tied and the first such point wins. Simulated costs of
/// different policies that coincide in exact arithmetic can differ in the
/// last bits.
pub fn grid_search_with_ties<O: Objective + ?Sized>(
    objective: &O,
    axes: &[Vec<f64>],
    master_seed: u64,
    paths: usize,
    rel_tol: f64,
) -> Result<GridSearch, GridError> {
    if axes.len() > 2 {
        return Err(GridError::TooManyAxes(axes.len()));
    }
    if let Some(i) = axes.iter().position(|a| a.is_empty()) {
        return Err(GridError::EmptyAxis(i));
    }
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    let mut table = Vec::with_capacity(points.len());
    for point in points {
        let value = objective.evaluate(&point, master_seed, paths)?;
        table.push((point, value));
    }
    let min = table.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let cutoff = min + rel_tol * min.abs().max(1.0);
    let (best, best_value) = table
        .iter()
        .find(|(_, v)| *v <= cutoff)
        .cloned()
        .unwrap_or_else(|| table[0].clone());
    Ok(GridSearch {
        best,
        best_value,
        table,
    })
}
