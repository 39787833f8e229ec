//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! The experiments go through the `cfa` binary with the configs under
//! `configs/`; the library-level checks call `cfa_core` directly.

#[path = "../../core/tests/support/lp_oracle.rs"]
mod lp_oracle;
#[path = "../../core/tests/support/monolithic.rs"]
mod monolithic;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cfa_cli::config::ExperimentConfig;
use cfa_core::cfa::{build_deterministic_lookahead, build_lookahead, cfa_policy, CfaPolicy, ThetaVector};
use cfa_core::energy::{EnergyConfig, EnergyDecision, EnergyProblem, Flow};
use cfa_core::exemplars::bandit::{ucb_argmax, BanditTestbed};
use cfa_core::exemplars::shortest_path::{percentile_shortest_path, Link, StochasticGraph};
use cfa_core::forecast::{evolve_forecast, init_forecast, sample_noise, Profile};
use cfa_core::lp::{solve, LpStatus};
use cfa_core::sdm::{generate_sample_path, path_seeds, simulate_policy, Problem};
use cfa_core::seed::{domain_seed, rng_from_seed, SeedDomain};
use cfa_core::stats::paired_t_test;
use cfa_core::tuner::{finite_difference_gradient, spsa_gradient};
use lp_oracle::{random_bounded_lp, vertex_enumeration, Oracle};
use rand::Rng;

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

struct Run {
    out: PathBuf,
    elapsed: Duration,
}

/// Runs `cfa <command> --config <config> --out <scratch>/<label>`.
fn cfa(command: &str, config: &Path, scratch: &Path, label: &str) -> Result<Run, String> {
    let out = scratch.join(label);
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_cfa"))
        .args([command, "--config"])
        .arg(config)
        .arg("--out")
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!(
            "cfa {command} failed: {}",
            String::from_utf8_lossy(&status.stderr).trim()
        ));
    }
    Ok(Run {
        out,
        elapsed: start.elapsed(),
    })
}

/// Data rows of a result CSV, keyed by column name.
fn read_rows(path: &Path) -> Result<Vec<BTreeMap<String, String>>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| e.to_string())?;
            Ok(headers.iter().zip(r.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        })
        .collect()
}

fn field(row: &BTreeMap<String, String>, name: &str) -> Result<f64, String> {
    row.get(name)
        .ok_or_else(|| format!("missing column {name}"))?
        .parse()
        .map_err(|e| format!("column {name}: {e}"))
}

fn read_theta(path: &Path) -> Result<Vec<f64>, String> {
    cfa_cli::config::read_theta_file(path).map_err(|e| e.to_string())
}

type Outcome = Result<String, String>;

fn criterion_1(scratch: &Path) -> Outcome {
    let config = workspace().join("configs/perfect-forecast.toml");
    let run = cfa("tune", &config, scratch, "c1")?;
    let best = read_theta(&run.out.join("theta.txt"))?;
    let grid = read_rows(&run.out.join("grid.csv"))?;
    let unit = grid
        .iter()
        .find(|r| r.get("theta").map(String::as_str) == Some("1"))
        .ok_or("no theta = 1 row in grid.csv")?;
    let f1 = field(unit, "objective")?;
    let energy = ExperimentConfig::load(&config).map_err(|e| e.to_string())?.energy().clone();
    let optimum = monolithic::monolithic_optimum(&energy);
    let rel = (f1 - optimum).abs() / optimum.abs().max(1.0);
    let detail = format!(
        "argmin {best:?}, F(1) = {f1}, full-horizon optimum = {optimum}, relative gap {rel:.2e}, {:.1}s",
        run.elapsed.as_secs_f64()
    );
    if best == [1.0] && rel <= 1e-6 && run.elapsed < Duration::from_secs(120) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Compare on the benchmark; returns the pass/fail of criteria 2 and 3.
fn criteria_2_3(scratch: &Path) -> (Outcome, Outcome) {
    let run = match cfa("compare", &workspace().join("configs/benchmark.toml"), scratch, "c2") {
        Ok(run) => run,
        Err(e) => return (Err(e.clone()), Err(e)),
    };
    let c2 = (|| {
        let rows = read_rows(&run.out.join("comparison.csv"))?;
        let row = rows.first().ok_or("empty comparison.csv")?;
        let improvement = field(row, "improvement_pct")?;
        let p = field(row, "p_value")?;
        let paths = field(row, "paths")?;
        let detail = format!(
            "baseline {} tuned {} improvement {improvement:.2}% (need >= 5), paired p = {p:.2e} on {paths} paths, {:.0}s",
            field(row, "baseline_mean")?,
            field(row, "tuned_mean")?,
            run.elapsed.as_secs_f64()
        );
        if improvement >= 5.0 && p < 0.05 && paths == 200.0 && run.elapsed < Duration::from_secs(900) {
            Ok(detail)
        } else {
            Err(detail)
        }
    })();
    let c3 = (|| {
        let theta = read_theta(&run.out.join("theta_start0.txt"))?;
        let lo = theta.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let at_bound = theta.iter().filter(|t| **t == 0.0 || **t == 2.0).count();
        let detail = format!(
            "{} components in [{lo:.4}, {hi:.4}]; {at_bound} on the boundary, {} interior",
            theta.len(),
            theta.len() - at_bound
        );
        if theta.iter().all(|t| (0.0..=2.0).contains(t)) {
            Ok(detail)
        } else {
            Err(detail)
        }
    })();
    (c2, c3)
}

fn criterion_4() -> Outcome {
    let mut optimal = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let lp = random_bounded_lp(seed);
        let sol = solve(&lp);
        match (vertex_enumeration(&lp), sol.status) {
            (Oracle::Infeasible, LpStatus::Infeasible) => {}
            (Oracle::Optimal(v), LpStatus::Optimal) => {
                optimal += 1;
                let gap = (v - sol.objective).abs();
                worst = worst.max(gap);
                if gap > 1e-8 {
                    return Err(format!("seed {seed}: oracle {v}, simplex {}", sol.objective));
                }
            }
            (oracle, status) => return Err(format!("seed {seed}: oracle {oracle:?}, simplex {status:?}")),
        }
    }
    Ok(format!(
        "100 programs agree ({optimal} optimal, {} infeasible), largest objective gap {worst:.1e}",
        100 - optimal
    ))
}

fn same_bits(a: &EnergyDecision, b: &EnergyDecision) -> bool {
    Flow::ALL.iter().all(|f| a.get(*f).to_bits() == b.get(*f).to_bits())
}

fn criterion_5() -> Outcome {
    let config = EnergyConfig::benchmark();
    let problem = EnergyProblem::new(config.clone());
    let h = config.lookahead;
    let ones = ThetaVector::ones(h);
    // Drive the system with a few different policies so the visited states
    // cover empty, partial and full storage.
    let drivers = [
        CfaPolicy::deterministic(),
        CfaPolicy::new(ThetaVector::constant(h, 0.5)),
        CfaPolicy::new(ThetaVector::constant(h, 1.5)),
    ];
    let mut states = Vec::new();
    let mut k = 0u64;
    while states.len() < 1000 {
        let path = generate_sample_path(&problem, domain_seed(99, SeedDomain::Simulate, k), problem.horizon());
        let traj = simulate_policy(&drivers[k as usize % 3], &problem, &path, problem.initial_state())
            .map_err(|e| e.to_string())?;
        states.extend(traj.states.into_iter().take(problem.horizon()));
        k += 1;
    }
    states.truncate(1000);
    let plain = CfaPolicy::deterministic();
    for s in &states {
        let (scaled_lp, _) = build_lookahead(s, &ones, &config).map_err(|e| e.to_string())?;
        let (plain_lp, _) = build_deterministic_lookahead(s, &config).map_err(|e| e.to_string())?;
        if scaled_lp != plain_lp {
            return Err(format!("t = {}: programs differ", s.t));
        }
        let a = cfa_policy(s, &ones, &config).map_err(|e| e.to_string())?;
        let b = plain.decide(s, &config).map_err(|e| e.to_string())?;
        if !same_bits(&a, &b) {
            return Err(format!("t = {}: {a:?} vs {b:?}", s.t));
        }
    }
    let full = states.iter().filter(|s| s.storage >= config.storage_capacity - 1e-9).count();
    let empty = states.iter().filter(|s| s.storage <= 1e-9).count();
    Ok(format!(
        "1000 reachable states from {k} paths ({empty} empty, {full} full storage), decisions bit-identical"
    ))
}

fn criterion_6() -> Outcome {
    let (h, n, sigma) = (24, 10_000, 1.0);
    let profile = Profile::flat(1_000.0);
    let mut rng = rng_from_seed(6);
    let mut forecast = init_forecast(&profile, 0, h);
    let mut sums = vec![0.0; h];
    for _ in 0..n {
        let noise = sample_noise(sigma, h, &mut rng).map_err(|e| e.to_string())?;
        let next = evolve_forecast(&forecast, &noise, &profile).map_err(|e| e.to_string())?;
        sums[0] += next.actual - forecast.lag(1);
        for tau in 2..=h {
            sums[tau - 1] += next.forecast.lag(tau - 1) - forecast.lag(tau);
        }
        forecast = next.forecast;
    }
    let bound = 3.0 * sigma / (n as f64).sqrt();
    let worst = sums.iter().map(|s| (s / n as f64).abs()).fold(0.0, f64::max);
    let detail = format!("{h} lags x {n} evolutions, max |mean increment| {worst:.4} vs bound {bound:.4}");
    if worst <= bound {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7(scratch: &Path) -> Outcome {
    let run = cfa("tune", &workspace().join("configs/quadratic.toml"), scratch, "c7")?;
    let theta = read_theta(&run.out.join("theta.txt"))?;
    let iterations = ExperimentConfig::load(&workspace().join("configs/quadratic.toml"))
        .map_err(|e| e.to_string())?
        .tuner
        .iterations;
    let sup = theta.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max);

    let quadratic = |t: &[f64], _: u64, _: usize| -> Result<f64, String> {
        Ok(t.iter().enumerate().map(|(i, v)| (i + 1) as f64 * (v - 1.0).powi(2)).sum())
    };
    let at = [0.0, 0.5, 1.5, 2.0];
    let fd = finite_difference_gradient(&quadratic, &at, 0.01, 0, 1).map_err(|e| e.to_string())?;
    let mut rng = rng_from_seed(7);
    let n = 10_000;
    let mut avg = [0.0; 4];
    for _ in 0..n {
        let g = spsa_gradient(&quadratic, &at, 0.01, &mut rng, 0, 1, None).map_err(|e| e.to_string())?;
        for (a, v) in avg.iter_mut().zip(&g.gradient) {
            *a += v / n as f64;
        }
    }
    let gap = avg.iter().zip(&fd).map(|(a, f)| (a - f).abs()).fold(0.0, f64::max);
    let detail = format!(
        "(a) d = {}, {iterations} iterations, max |theta - 1| = {sup:.2e}; (b) averaged SPSA vs finite differences, max gap {gap:.3}",
        theta.len()
    );
    if theta.len() == 8 && iterations <= 500 && sup <= 0.05 && gap <= 0.1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8(scratch: &Path) -> Outcome {
    let graph = StochasticGraph {
        nodes: 2,
        links: vec![
            Link { from: 0, to: 1, mean: 10.0, std: 5.0 },
            Link { from: 0, to: 1, mean: 11.0, std: 1.0 },
        ],
        destination: 1,
        drift_sigma: 0.0,
    };
    let pick = |theta| percentile_shortest_path(&graph, theta, 0).map(|r| r.links[0]).map_err(|e| e.to_string());
    let (median, high) = (pick(0.5)?, pick(0.9)?);
    let run = cfa("tune", &workspace().join("configs/shortest-path.toml"), scratch, "c8")?;
    let best = read_theta(&run.out.join("theta.txt"))?;
    let detail = format!(
        "theta 0.5 takes link {}, theta 0.9 takes link {}; lateness testbed argmin theta* = {}",
        ["A", "B"][median],
        ["A", "B"][high],
        best[0]
    );
    if median == 0 && high == 1 && best[0] > 0.5 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_9(scratch: &Path) -> Outcome {
    // θ = 0 is greedy on every belief we throw at it.
    let mut rng = rng_from_seed(9);
    for _ in 0..10_000 {
        let k = rng.random_range(1..=8);
        let means: Vec<f64> = (0..k).map(|_| rng.random_range(-5.0..5.0)).collect();
        let se: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..3.0)).collect();
        let greedy = means
            .iter()
            .enumerate()
            .fold(0, |best, (i, m)| if *m > means[best] { i } else { best });
        if ucb_argmax(&means, &se, 0.0) != greedy {
            return Err(format!("theta = 0 is not greedy on {means:?}"));
        }
    }
    let config_path = workspace().join("configs/bandit.toml");
    let run = cfa("tune", &config_path, scratch, "c9")?;
    let best = read_theta(&run.out.join("theta.txt"))?[0];
    let config = ExperimentConfig::load(&config_path).map_err(|e| e.to_string())?;
    let testbed: &BanditTestbed = config.bandit.as_ref().ok_or("no bandit section")?;
    let grid = &config.grid.as_ref().ok_or("no grid")?.axes[0];
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    // Fresh seeds, disjoint from the tuning seeds by domain.
    let seeds: Vec<u64> = path_seeds(domain_seed(config.seed, SeedDomain::Validate, 0), 200).collect();
    let tuned: Vec<f64> = seeds.iter().map(|s| testbed.run(best, *s)).collect();
    let greedy: Vec<f64> = seeds.iter().map(|s| testbed.run(0.0, *s)).collect();
    let test = paired_t_test(&tuned, &greedy).map_err(|e| e.to_string())?;
    let detail = format!(
        "theta = 0 greedy on 10000 beliefs; tuned theta* = {best} (grid {lo}..{hi}) beats theta = 0 by {:.2} reward on 200 fresh seeds, p = {:.2e}",
        test.mean_difference, test.p_value
    );
    if best > lo && best < hi && test.mean_difference > 0.0 && test.p_value < 0.05 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Reruns every experiment above from the config embedded in its own output
/// and compares the result files byte for byte.
fn criterion_10(scratch: &Path) -> Outcome {
    let experiments = [
        ("tune", "c1", "grid.csv"),
        ("compare", "c2", "comparison.csv"),
        ("tune", "c7", "trace.csv"),
        ("tune", "c8", "grid.csv"),
        ("tune", "c9", "grid.csv"),
    ];
    let mut compared = 0;
    for (command, label, source) in experiments {
        let first = scratch.join(label);
        let rerun = cfa(command, &first.join(source), scratch, &format!("{label}-rerun"))?;
        let mut names: Vec<_> = fs::read_dir(&first)
            .map_err(|e| e.to_string())?
            .map(|e| e.map(|e| e.file_name()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        names.sort();
        for name in names {
            let a = fs::read(first.join(&name)).map_err(|e| e.to_string())?;
            let b = fs::read(rerun.out.join(&name)).map_err(|e| format!("{label}: {name:?} not rewritten: {e}"))?;
            if a != b {
                return Err(format!("{label}/{}: rerun differs", name.to_string_lossy()));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} result files from 5 experiments reproduced byte for byte"))
}

fn main() -> ExitCode {
    // Skip under `cargo test -- --list` and similar harness probes.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let dir = tempfile::tempdir().expect("scratch dir");
    let scratch = dir.path();
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut record = |n: u32, outcome: Outcome| {
        match &outcome {
            Ok(d) => println!("criterion {n}: PASS {d}"),
            Err(d) => println!("criterion {n}: FAIL {d}"),
        }
        results.push((n, outcome));
    };
    record(1, criterion_1(scratch));
    let (c2, c3) = criteria_2_3(scratch);
    record(2, c2);
    record(3, c3);
    record(4, criterion_4());
    record(5, criterion_5());
    record(6, criterion_6());
    record(7, criterion_7(scratch));
    record(8, criterion_8(scratch));
    record(9, criterion_9(scratch));
    record(10, criterion_10(scratch));
    let failed: Vec<u32> = results.iter().filter(|(_, o)| o.is_err()).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}

