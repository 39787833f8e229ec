use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cfa_cli::config::{read_theta_file, ExperimentConfig};

fn cfa(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cfa"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().expect("spawn cfa")
}

fn benchmark() -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/benchmark.toml");
    ExperimentConfig::load(&path).unwrap()
}

/// A day with exact forecasts and a constant price.
fn calm_day() -> ExperimentConfig {
    let mut c = benchmark();
    let e = c.energy.as_mut().unwrap();
    e.horizon = 24;
    e.demand_sigma = 0.0;
    e.wind_sigma = 0.0;
    e.price.sigma = 0.0;
    e.storage_capacity = 60.0;
    c.evaluation.paths = 4;
    c.tuner.iterations = 3;
    c.tuner.batch_size = 2;
    c.tuner.selection_paths = 2;
    c
}

fn write_config(dir: &Path, config: &ExperimentConfig) -> PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, config.to_toml()).unwrap();
    path
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(String::from)
        .collect()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn missing_field_is_a_config_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "problem = \"energy\"\n[energy]\nhorizon = 24\nlookahead = 4\n").unwrap();
    let out = cfa(&["simulate"], Some(&path), dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("storage_capacity"), "{stderr}");
}

#[test]
fn semantic_errors_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = calm_day();
    c.tuner.lo = 3.0;
    let path = write_config(dir.path(), &c);
    assert_eq!(cfa(&["tune"], Some(&path), dir.path()).status.code(), Some(2));
    assert_eq!(cfa(&["simulate"], None, dir.path()).status.code(), Some(2));

    let quad = dir.path().join("quad.toml");
    fs::write(&quad, "problem = \"quadratic\"\n[quadratic]\ndimension = 2\n").unwrap();
    let out = cfa(&["simulate"], Some(&quad), dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn single_period_gives_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = calm_day();
    c.energy.as_mut().unwrap().horizon = 1;
    let path = write_config(dir.path(), &c);
    let out = cfa(&["simulate"], Some(&path), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(data_rows(&dir.path().join("trajectory.csv")).len(), 1);
}

#[test]
fn deterministic_simulation_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &calm_day());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(cfa(&["simulate"], Some(&path), &a).status.success());
    assert!(cfa(&["simulate", "--workers", "1"], Some(&path), &b).status.success());
    let first = fs::read(a.join("trajectory.csv")).unwrap();
    assert_eq!(first, fs::read(b.join("trajectory.csv")).unwrap());
    assert_eq!(data_rows(&a.join("trajectory.csv")).len(), 24);

    // A different seed gives the same costs when nothing is random.
    let c = dir.path().join("c");
    assert!(cfa(&["simulate", "--seed", "5"], Some(&path), &c).status.success());
    assert_eq!(column(&a.join("trajectory.csv"), "cumulative_cost"), column(&c.join("trajectory.csv"), "cumulative_cost"));
}

#[test]
fn zero_iterations_returns_the_start() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = benchmark();
    c.tuner.iterations = 0;
    c.tuner.selection_paths = 2;
    c.policy.parameterization = cfa_core::Parameterization::Scalar;
    c.policy.theta = Some(vec![0.7]);
    let path = write_config(dir.path(), &c);
    let out = cfa(&["tune"], Some(&path), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_theta_file(&dir.path().join("theta.txt")).unwrap(), vec![0.7]);
    assert_eq!(data_rows(&dir.path().join("trace.csv")).len(), 1);
}

#[test]
fn tuning_resumes_from_a_theta_file() {
    let dir = tempfile::tempdir().unwrap();
    let quad = dir.path().join("quad.toml");
    fs::write(
        &quad,
        "problem = \"quadratic\"\n[tuner]\niterations = 5\nbatch_size = 1\nselection_paths = 1\n[quadratic]\ndimension = 3\n",
    )
    .unwrap();
    let first = dir.path().join("first");
    assert!(cfa(&["tune"], Some(&quad), &first).status.success());
    let theta_file = first.join("theta.txt");
    let theta = read_theta_file(&theta_file).unwrap();

    let second = dir.path().join("second");
    let out = cfa(&["tune", "--theta", theta_file.to_str().unwrap()], Some(&quad), &second);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let start: Vec<f64> = (1..=3)
        .map(|i| column(&second.join("trace.csv"), &format!("theta_{i}"))[0].parse().unwrap())
        .collect();
    assert_eq!(start, theta);
}

#[test]
fn comparing_the_baseline_with_itself_is_a_wash() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = benchmark();
    c.energy.as_mut().unwrap().horizon = 24;
    c.evaluation.paths = 6;
    c.policy.parameterization = cfa_core::Parameterization::Scalar;
    let path = write_config(dir.path(), &c);
    let ones = dir.path().join("ones.txt");
    fs::write(&ones, "theta = [1.0]\n").unwrap();
    let out = cfa(&["compare", "--theta", ones.to_str().unwrap()], Some(&path), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = dir.path().join("comparison.csv");
    assert_eq!(column(&report, "improvement_pct"), ["0"]);
    assert_eq!(column(&report, "p_value"), ["1"]);
    assert_eq!(data_rows(&dir.path().join("paired.csv")).len(), 6);
}

#[test]
fn exact_forecasts_leave_nothing_to_gain() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = calm_day();
    c.policy.parameterization = cfa_core::Parameterization::Scalar;
    c.evaluation.starts = vec![1.0, 0.5];
    let path = write_config(dir.path(), &c);
    let out = cfa(&["compare"], Some(&path), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let improvement = column(&dir.path().join("comparison.csv"), "improvement_pct");
    assert_eq!(improvement.len(), 2);
    // From θ = 1 nothing beats the full-information plan; from 0.5 tuning
    // cannot do better than it either.
    assert_eq!(improvement[0], "0");
    assert!(improvement[1].parse::<f64>().unwrap() <= 1e-9);
    assert!(dir.path().join("trace_start1.csv").exists());
}

#[test]
fn results_rerun_from_their_own_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &calm_day());
    let first = dir.path().join("first");
    assert!(cfa(&["evaluate", "--seed", "31"], Some(&path), &first).status.success());
    let second = dir.path().join("second");
    let out = cfa(&["evaluate"], Some(&first.join("evaluation.csv")), &second);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(first.join("evaluation.csv")).unwrap(),
        fs::read(second.join("evaluation.csv")).unwrap()
    );
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = cfa(&["selftest"], None, dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.matches("PASS").count(), 4, "{stdout}");
}

#[test]
fn shipped_benchmark_matches_the_library_default() {
    assert_eq!(benchmark().energy.unwrap(), cfa_core::EnergyConfig::benchmark());
}

#[test]
fn tuning_and_validation_seeds_are_disjoint() {
    use cfa_core::sdm::path_seeds;
    use cfa_core::seed::{domain_seed, SeedDomain};

    let c = benchmark();
    for seed in [0, 1, c.seed, u64::MAX] {
        let tuning = cfa_cli::commands::tuning_path_seeds(seed, &c.tuner);
        assert_eq!(tuning.len(), c.tuner.iterations * c.tuner.batch_size + c.tuner.selection_paths);
        let validation = path_seeds(domain_seed(seed, SeedDomain::Validate, 0), c.evaluation.paths);
        assert!(validation.into_iter().all(|s| !tuning.contains(&s)));
    }
}
