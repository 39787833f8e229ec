//! The `simulate`, `tune`, `evaluate`, `compare` and `selftest` workflows.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use cfa_core::cfa::{LookaheadObjective, Parameterization};
use cfa_core::energy::{EnergyProblem, Flow};
use cfa_core::exemplars::bandit::{bandit_tune, ucb_argmax, BanditTestbed};
use cfa_core::exemplars::shortest_path::{navigate_simulate, percentile_shortest_path, Link, StochasticGraph};
use cfa_core::lp::{solve, LinearProgram, LpStatus, Sense};
use cfa_core::sdm::{generate_sample_path, mean_and_std_error, path_seeds, simulate_policy, Problem};
use cfa_core::seed::{child_seed, domain_seed, SeedDomain};
use cfa_core::stats::paired_t_test;
use cfa_core::tuner::{grid_search_with_ties, project_box, tune, GridSearch, Objective, TuneOutcome, TuneSchedule};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, ProblemKind};
use crate::output::{header, num, write_file, ResultFile};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Tune,
    Evaluate,
    Compare,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Tune => "tune",
            Command::Evaluate => "evaluate",
            Command::Compare => "compare",
            Command::Selftest => "selftest",
        }
    }
}

/// Files written and one-line summaries for the terminal.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn unsupported(command: Command, problem: ProblemKind) -> CliError {
    CliError::Config(format!("`{}` is not available for problem {problem:?}", command.name()))
}

/// Runs `command` on a resolved config, writing results under `out`.
pub fn run(command: Command, config: &ExperimentConfig, out: &Path) -> Result<RunOutput, CliError> {
    if command == Command::Selftest {
        return selftest();
    }
    let head = header(command.name(), &config.to_toml());
    let ctx = Context { config, out, head };
    match (config.problem, command) {
        (ProblemKind::Energy, Command::Simulate) => ctx.energy_simulate(),
        (ProblemKind::Energy, Command::Tune) => ctx.energy_tune(),
        (ProblemKind::Energy, Command::Evaluate) => ctx.energy_evaluate(),
        (ProblemKind::Energy, Command::Compare) => ctx.energy_compare(),
        (ProblemKind::Bandit, Command::Simulate) => ctx.bandit_rewards(SeedDomain::Simulate, config.evaluation.simulate_paths),
        (ProblemKind::Bandit, Command::Evaluate) => ctx.bandit_rewards(SeedDomain::Validate, config.evaluation.paths),
        (ProblemKind::Bandit, Command::Tune) => ctx.bandit_tune(),
        (ProblemKind::ShortestPath, Command::Simulate) => ctx.trips(SeedDomain::Simulate, config.evaluation.simulate_paths),
        (ProblemKind::ShortestPath, Command::Evaluate) => ctx.trips(SeedDomain::Validate, config.evaluation.paths),
        (ProblemKind::ShortestPath, Command::Tune) => ctx.shortest_path_tune(),
        (ProblemKind::Quadratic, Command::Tune) => ctx.quadratic_tune(),
        (ProblemKind::Quadratic, Command::Evaluate) => ctx.quadratic_evaluate(),
        (problem, command) => Err(unsupported(command, problem)),
    }
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    out: &'a Path,
    head: String,
}

#[derive(Serialize)]
struct ThetaRecord<'a> {
    problem: ProblemKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameterization: Option<Parameterization>,
    objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    selected_iteration: Option<usize>,
    theta: &'a [f64],
}

/// Seeds of every path the tuner may simulate for `(master, schedule)`.
pub fn tuning_path_seeds(master: u64, schedule: &TuneSchedule) -> HashSet<u64> {
    let mut seeds = HashSet::new();
    for n in 1..=schedule.iterations {
        seeds.extend(path_seeds(domain_seed(master, SeedDomain::Tune, n as u64), schedule.batch_size));
    }
    seeds.extend(path_seeds(domain_seed(master, SeedDomain::Select, 0), schedule.selection_paths));
    seeds
}

/// Master seed of tuning run `k` in `compare`. Run 0 uses the experiment
/// seed itself, as `tune` does.
fn start_master(seed: u64, k: usize) -> u64 {
    if k == 0 {
        seed
    } else {
        child_seed(seed, k as u64)
    }
}

fn opt_num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        num(v)
    }
}

impl Context<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn table(&self, name: &str, columns: &[&str]) -> ResultFile {
        ResultFile::new(self.path(name), &self.head, columns)
    }

    fn theta_columns(&self) -> Vec<String> {
        let d = self.config.dimension();
        if self.config.problem != ProblemKind::Energy {
            return if d == 1 {
                vec!["theta".into()]
            } else {
                (1..=d).map(|i| format!("theta_{i}")).collect()
            };
        }
        let h = self.config.energy().lookahead;
        let lags = |p: &'static str| (1..=h).map(move |i| format!("theta_{p}{i}"));
        match self.config.policy.parameterization {
            Parameterization::Full => lags("d").chain(lags("e")).collect(),
            Parameterization::WindOnly => lags("e").collect(),
            Parameterization::Scalar => vec!["theta".into()],
        }
    }

    fn write_theta(&self, name: &str, theta: &[f64], objective: f64, selected: Option<usize>) -> Result<PathBuf, CliError> {
        let record = ThetaRecord {
            problem: self.config.problem,
            parameterization: (self.config.problem == ProblemKind::Energy).then_some(self.config.policy.parameterization),
            objective,
            selected_iteration: selected,
            theta,
        };
        let body = toml::to_string(&record).map_err(runtime)?;
        let path = self.path(name);
        write_file(&path, format!("{}{body}", self.head).as_bytes())?;
        Ok(path)
    }

    fn write_trace(&self, name: &str, outcome: &TuneOutcome) -> Result<PathBuf, CliError> {
        let theta_cols = self.theta_columns();
        let mut cols: Vec<&str> = vec!["iteration"];
        cols.extend(theta_cols.iter().map(String::as_str));
        cols.extend(["objective", "gradient_norm", "eval_seed", "perturb_seed", "selection"]);
        let mut file = self.table(name, &cols);
        for r in &outcome.trace.rows {
            let mut row = vec![r.iteration.to_string()];
            row.extend(r.theta.iter().map(|v| num(*v)));
            row.push(opt_num(r.objective));
            row.push(opt_num(r.gradient_norm));
            row.push(r.eval_seed.to_string());
            row.push(r.perturb_seed.to_string());
            row.push(r.selection.map(num).unwrap_or_default());
            file.row(row);
        }
        file.finish()
    }

    fn write_grid(&self, name: &str, search: &GridSearch) -> Result<PathBuf, CliError> {
        let theta_cols = self.theta_columns();
        let mut cols: Vec<&str> = theta_cols.iter().map(String::as_str).collect();
        cols.push("objective");
        let mut file = self.table(name, &cols);
        for (point, value) in &search.table {
            let mut row: Vec<String> = point.iter().map(|v| num(*v)).collect();
            row.push(num(*value));
            file.row(row);
        }
        file.finish()
    }

    fn grid_search(&self, objective: &(impl Objective + ?Sized)) -> Result<RunOutput, CliError> {
        let grid = self.config.grid.as_ref().expect("grid present");
        let master = domain_seed(self.config.seed, SeedDomain::Tune, 0);
        let search = grid_search_with_ties(objective, &grid.axes, master, self.config.evaluation.paths, grid.tie_tolerance)
            .map_err(runtime)?;
        let files = vec![
            self.write_grid("grid.csv", &search)?,
            self.write_theta("theta.txt", &search.best, search.best_value, None)?,
        ];
        Ok(RunOutput {
            files,
            summary: vec![format!("grid argmin {:?} objective {}", search.best, search.best_value)],
        })
    }

    fn spsa(&self, objective: &(impl Objective + ?Sized)) -> Result<RunOutput, CliError> {
        let cfg = self.config;
        for w in cfg.tuner.validate().map_err(runtime)? {
            eprintln!("warning: {w}");
        }
        let start = project_box(cfg.theta(), cfg.tuner.lo, cfg.tuner.hi);
        let outcome = tune(objective, &start, &cfg.tuner, cfg.seed).map_err(runtime)?;
        let files = vec![
            self.write_trace("trace.csv", &outcome)?,
            self.write_theta("theta.txt", &outcome.theta, outcome.selection_objective, Some(outcome.selected_iteration))?,
        ];
        Ok(RunOutput {
            files,
            summary: vec![format!(
                "selected iteration {} of {}, selection objective {}",
                outcome.selected_iteration, cfg.tuner.iterations, outcome.selection_objective
            )],
        })
    }

    fn energy_objective(&self) -> LookaheadObjective {
        LookaheadObjective::new(
            EnergyProblem::new(self.config.energy().clone()),
            self.config.policy.parameterization,
        )
    }

    fn energy_simulate(&self) -> Result<RunOutput, CliError> {
        let objective = self.energy_objective();
        let problem = &objective.problem;
        let policy = objective.policy(self.config.theta()).map_err(runtime)?;
        let master = domain_seed(self.config.seed, SeedDomain::Simulate, 0);
        let seeds: Vec<u64> = path_seeds(master, self.config.evaluation.simulate_paths).collect();
        let trajectories = seeds
            .par_iter()
            .map(|&seed| {
                let path = generate_sample_path(problem, seed, problem.horizon());
                simulate_policy(&policy, problem, &path, problem.initial_state())
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(runtime)?;
        let mut cols = vec!["path", "seed", "t", "storage", "demand", "wind", "price"];
        cols.extend(Flow::ALL.iter().map(|f| f.name()));
        cols.extend(["contribution", "cumulative_cost"]);
        let mut file = self.table("trajectory.csv", &cols);
        let mut summary = Vec::new();
        for (i, (seed, traj)) in seeds.iter().zip(&trajectories).enumerate() {
            let mut cumulative = 0.0;
            for (t, (s, x)) in traj.states.iter().zip(&traj.decisions).enumerate() {
                cumulative += traj.contributions[t];
                let mut row = vec![i.to_string(), seed.to_string(), t.to_string()];
                row.extend([s.storage, s.demand, s.wind, s.price].map(num));
                row.extend(Flow::ALL.iter().map(|f| num(x.get(*f))));
                row.push(num(traj.contributions[t]));
                row.push(num(cumulative));
                file.row(row);
            }
            summary.push(format!("path {i}: total cost {}", traj.total_cost));
        }
        Ok(RunOutput {
            files: vec![file.finish()?],
            summary,
        })
    }

    fn energy_tune(&self) -> Result<RunOutput, CliError> {
        let objective = self.energy_objective();
        if self.config.grid.is_some() {
            self.grid_search(&objective)
        } else {
            self.spsa(&objective)
        }
    }

    fn energy_evaluate(&self) -> Result<RunOutput, CliError> {
        let objective = self.energy_objective();
        let master = domain_seed(self.config.seed, SeedDomain::Validate, 0);
        let eval = objective
            .evaluate_paths(self.config.theta(), master, self.config.evaluation.paths)
            .map_err(runtime)?;
        let mut file = self.table("evaluation.csv", &["path", "seed", "cost"]);
        for (i, (seed, cost)) in path_seeds(master, eval.n_paths).zip(&eval.path_costs).enumerate() {
            file.row([i.to_string(), seed.to_string(), num(*cost)]);
        }
        Ok(RunOutput {
            files: vec![file.finish()?],
            summary: vec![format!(
                "mean cost {} (std error {}) over {} paths",
                eval.mean, eval.std_error, eval.n_paths
            )],
        })
    }

    fn energy_compare(&self) -> Result<RunOutput, CliError> {
        let cfg = self.config;
        let objective = self.energy_objective();
        let d = cfg.dimension();
        let n = cfg.evaluation.paths;
        let validate_master = domain_seed(cfg.seed, SeedDomain::Validate, 0);
        let validation: HashSet<u64> = path_seeds(validate_master, n).collect();
        let baseline = objective.evaluate_paths(&vec![1.0; d], validate_master, n).map_err(runtime)?;

        struct Candidate {
            label: String,
            theta: Vec<f64>,
            selected: Option<usize>,
        }
        let mut files = Vec::new();
        let mut candidates = Vec::new();
        match &cfg.evaluation.tuned {
            Some(theta) => {
                check_overlap(&tuning_path_seeds(cfg.seed, &cfg.tuner), &validation)?;
                candidates.push(Candidate {
                    label: "given".into(),
                    theta: theta.clone(),
                    selected: None,
                });
            }
            None => {
                for (k, &start) in cfg.evaluation.starts.iter().enumerate() {
                    let master = start_master(cfg.seed, k);
                    check_overlap(&tuning_path_seeds(master, &cfg.tuner), &validation)?;
                    let theta0 = project_box(&vec![start; d], cfg.tuner.lo, cfg.tuner.hi);
                    let outcome = tune(&objective, &theta0, &cfg.tuner, master).map_err(runtime)?;
                    files.push(self.write_trace(&format!("trace_start{k}.csv"), &outcome)?);
                    files.push(self.write_theta(
                        &format!("theta_start{k}.txt"),
                        &outcome.theta,
                        outcome.selection_objective,
                        Some(outcome.selected_iteration),
                    )?);
                    candidates.push(Candidate {
                        label: num(start),
                        theta: outcome.theta,
                        selected: Some(outcome.selected_iteration),
                    });
                }
            }
        }

        let mut report = self.table(
            "comparison.csv",
            &[
                "start",
                "baseline_mean",
                "baseline_std_error",
                "tuned_mean",
                "tuned_std_error",
                "improvement_pct",
                "mean_difference",
                "t_statistic",
                "p_value",
                "paths",
                "theta_min",
                "theta_max",
                "boundary_components",
                "selected_iteration",
            ],
        );
        let mut paired = self.table("paired.csv", &["start", "path", "seed", "baseline_cost", "tuned_cost", "difference"]);
        let mut summary = Vec::new();
        for c in &candidates {
            let tuned = objective.evaluate_paths(&c.theta, validate_master, n).map_err(runtime)?;
            let test = paired_t_test(&tuned.path_costs, &baseline.path_costs).map_err(runtime)?;
            let improvement = 100.0 * (baseline.mean - tuned.mean) / baseline.mean.abs();
            let lo = c.theta.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = c.theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let boundary = c
                .theta
                .iter()
                .filter(|v| **v <= cfg.tuner.lo || **v >= cfg.tuner.hi)
                .count();
            report.row([
                c.label.clone(),
                num(baseline.mean),
                num(baseline.std_error),
                num(tuned.mean),
                num(tuned.std_error),
                num(improvement),
                num(test.mean_difference),
                num(test.t_statistic),
                num(test.p_value),
                n.to_string(),
                num(lo),
                num(hi),
                boundary.to_string(),
                c.selected.map(|s| s.to_string()).unwrap_or_default(),
            ]);
            for (i, seed) in path_seeds(validate_master, n).enumerate() {
                let (b, t) = (baseline.path_costs[i], tuned.path_costs[i]);
                paired.row([c.label.clone(), i.to_string(), seed.to_string(), num(b), num(t), num(t - b)]);
            }
            summary.push(format!(
                "start {}: baseline {} tuned {} improvement {improvement:.2}% p = {:.3e}; theta in [{lo}, {hi}], {boundary} of {} on the box boundary",
                c.label,
                baseline.mean,
                tuned.mean,
                test.p_value,
                c.theta.len()
            ));
        }
        files.push(report.finish()?);
        files.push(paired.finish()?);
        Ok(RunOutput { files, summary })
    }

    fn bandit(&self) -> &BanditTestbed {
        self.config.bandit.as_ref().expect("resolved bandit")
    }

    fn bandit_rewards(&self, domain: SeedDomain, count: usize) -> Result<RunOutput, CliError> {
        let testbed = self.bandit();
        let theta = self.config.theta()[0];
        let seeds: Vec<u64> = path_seeds(domain_seed(self.config.seed, domain, 0), count).collect();
        let rewards: Vec<f64> = seeds.par_iter().map(|&s| testbed.run(theta, s)).collect();
        let mut file = self.table("rewards.csv", &["run", "seed", "theta", "reward"]);
        for (i, (s, r)) in seeds.iter().zip(&rewards).enumerate() {
            file.row([i.to_string(), s.to_string(), num(theta), num(*r)]);
        }
        let (mean, se) = mean_and_std_error(&rewards);
        Ok(RunOutput {
            files: vec![file.finish()?],
            summary: vec![format!("mean cumulative reward {mean} (std error {se}) over {} runs", rewards.len())],
        })
    }

    fn bandit_tune(&self) -> Result<RunOutput, CliError> {
        let grid = self
            .config
            .grid
            .as_ref()
            .ok_or_else(|| CliError::Config("bandit tuning needs a [grid] section".into()))?;
        let testbed = self.bandit();
        let seeds: Vec<u64> = path_seeds(domain_seed(self.config.seed, SeedDomain::Tune, 0), self.config.evaluation.paths).collect();
        let out = bandit_tune(testbed, &grid.axes[0], &seeds).map_err(runtime)?;
        let best_possible = testbed.means.iter().copied().fold(f64::NEG_INFINITY, f64::max) * testbed.horizon as f64;
        let mut file = self.table("grid.csv", &["theta", "mean_reward", "std_error", "mean_regret"]);
        for row in &out.table {
            file.row([
                num(row.theta),
                num(row.mean_reward),
                num(row.std_error),
                num(best_possible - row.mean_reward),
            ]);
        }
        let best = out.table.iter().find(|r| r.theta == out.best_theta).map_or(f64::NAN, |r| r.mean_reward);
        let files = vec![file.finish()?, self.write_theta("theta.txt", &[out.best_theta], best, None)?];
        Ok(RunOutput {
            files,
            summary: vec![format!("best theta {} with mean reward {best}", out.best_theta)],
        })
    }

    fn trips(&self, domain: SeedDomain, count: usize) -> Result<RunOutput, CliError> {
        let graph = self.config.graph();
        let rules = &self.config.shortest_path.as_ref().unwrap().trip;
        let theta = self.config.theta()[0];
        let seeds: Vec<u64> = path_seeds(domain_seed(self.config.seed, domain, 0), count).collect();
        let trips = seeds
            .par_iter()
            .map(|&s| navigate_simulate(graph, theta, rules, s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(runtime)?;
        let mut file = self.table("trips.csv", &["trip", "seed", "theta", "travel", "cost", "completed", "route"]);
        for (i, (s, trip)) in seeds.iter().zip(&trips).enumerate() {
            let route: Vec<String> = trip.nodes.iter().map(|n| n.to_string()).collect();
            file.row([
                i.to_string(),
                s.to_string(),
                num(theta),
                num(trip.travel),
                num(trip.cost),
                trip.completed.to_string(),
                route.join(" "),
            ]);
        }
        let costs: Vec<f64> = trips.iter().map(|t| t.cost).collect();
        let (mean, se) = mean_and_std_error(&costs);
        Ok(RunOutput {
            files: vec![file.finish()?],
            summary: vec![format!("mean trip cost {mean} (std error {se}) over {} trips", trips.len())],
        })
    }

    fn shortest_path_tune(&self) -> Result<RunOutput, CliError> {
        if self.config.grid.is_none() {
            return Err(CliError::Config("shortest-path tuning needs a [grid] section".into()));
        }
        let graph = self.config.graph();
        let rules = &self.config.shortest_path.as_ref().unwrap().trip;
        let objective = |theta: &[f64], master: u64, paths: usize| -> Result<f64, String> {
            let seeds: Vec<u64> = path_seeds(master, paths).collect();
            let costs = seeds
                .par_iter()
                .map(|&s| navigate_simulate(graph, theta[0], rules, s).map(|t| t.cost))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            Ok(mean_and_std_error(&costs).0)
        };
        self.grid_search(&objective)
    }

    fn quadratic_value(&self) -> impl Fn(&[f64], u64, usize) -> Result<f64, String> + Sync {
        let target = self.config.quadratic.as_ref().unwrap().target;
        move |theta: &[f64], _: u64, _: usize| Ok(theta.iter().map(|t| (t - target).powi(2)).sum())
    }

    fn quadratic_tune(&self) -> Result<RunOutput, CliError> {
        let objective = self.quadratic_value();
        if self.config.grid.is_some() {
            self.grid_search(&objective)
        } else {
            self.spsa(&objective)
        }
    }

    fn quadratic_evaluate(&self) -> Result<RunOutput, CliError> {
        let value = self.quadratic_value()(self.config.theta(), 0, 1).map_err(runtime)?;
        let theta_cols = self.theta_columns();
        let mut cols: Vec<&str> = theta_cols.iter().map(String::as_str).collect();
        cols.push("objective");
        let mut file = self.table("evaluation.csv", &cols);
        let mut row: Vec<String> = self.config.theta().iter().map(|v| num(*v)).collect();
        row.push(num(value));
        file.row(row);
        Ok(RunOutput {
            files: vec![file.finish()?],
            summary: vec![format!("objective {value}")],
        })
    }
}

fn check_overlap(tuning: &HashSet<u64>, validation: &HashSet<u64>) -> Result<(), CliError> {
    let shared = tuning.intersection(validation).count();
    if shared > 0 {
        return Err(CliError::Runtime(format!(
            "{shared} validation path seeds also appear in the tuning set; refusing to compare"
        )));
    }
    Ok(())
}

/// Quick built-in checks that need no config.
fn selftest() -> Result<RunOutput, CliError> {
    let mut summary = Vec::new();
    let mut failed = 0;
    let mut check = |name: &str, ok: bool, detail: String| {
        if !ok {
            failed += 1;
        }
        summary.push(format!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" }));
    };

    let quadratic = |t: &[f64], _: u64, _: usize| -> Result<f64, String> { Ok(t.iter().map(|v| (v - 1.0).powi(2)).sum()) };
    let schedule = TuneSchedule {
        a: Some(0.2),
        c: 0.05,
        iterations: 500,
        batch_size: 1,
        selection_paths: 1,
        select_every: 1,
        ..TuneSchedule::default()
    };
    match tune(&quadratic, &[0.5; 8], &schedule, 0) {
        Ok(out) => {
            let err = out.theta.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max);
            check("spsa on an 8-dimensional quadratic", err <= 0.05, format!("max |theta - 1| = {err:.4}"));
        }
        Err(e) => check("spsa on an 8-dimensional quadratic", false, e.to_string()),
    }

    let mut lp = LinearProgram::new();
    let x = lp.add_variable(0.0, 4.0, -1.0);
    let y = lp.add_variable(0.0, 3.0, -2.0);
    lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Sense::Le, 5.0);
    let sol = solve(&lp);
    let ok = sol.status == LpStatus::Optimal && (sol.objective + 8.0).abs() < 1e-9;
    check("simplex on a bounded program", ok, format!("{:?}, objective {}", sol.status, sol.objective));

    let graph = StochasticGraph {
        nodes: 2,
        links: vec![
            Link { from: 0, to: 1, mean: 10.0, std: 5.0 },
            Link { from: 0, to: 1, mean: 11.0, std: 1.0 },
        ],
        destination: 1,
        drift_sigma: 0.0,
    };
    let pick = |theta: f64| percentile_shortest_path(&graph, theta, 0).map(|r| r.links[0]);
    let ok = matches!((pick(0.5), pick(0.9)), (Ok(0), Ok(1)));
    check("percentile shortest path", ok, "median picks the low mean, 90th percentile the low spread".into());

    let ok = ucb_argmax(&[1.0, 0.9], &[0.0, 0.2], 1.0) == 1 && ucb_argmax(&[1.0, 0.9], &[0.0, 0.2], 0.0) == 0;
    check("upper confidence bound", ok, "theta = 1 explores, theta = 0 exploits".into());

    if failed > 0 {
        for line in &summary {
            println!("{line}");
        }
        return Err(CliError::Runtime(format!("{failed} self-test check(s) failed")));
    }
    Ok(RunOutput {
        files: Vec::new(),
        summary,
    })
}
