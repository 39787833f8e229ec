//! Experiment configuration: one TOML document fully determines a run.

use std::fs;
use std::path::{Path, PathBuf};

use cfa_core::cfa::Parameterization;
use cfa_core::energy::EnergyConfig;
use cfa_core::exemplars::bandit::BanditTestbed;
use cfa_core::exemplars::shortest_path::{StochasticGraph, TripRules};
use cfa_core::tuner::TuneSchedule;
use serde::{Deserialize, Serialize};

use crate::output::extract_embedded_config;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Energy,
    Bandit,
    ShortestPath,
    /// `‖θ - target‖²`, noiseless; exercises the tuner alone.
    Quadratic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    #[serde(default = "full")]
    pub parameterization: Parameterization,
    /// Parameters for simulate and evaluate, and the starting point of tune.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
}

fn full() -> Parameterization {
    Parameterization::Full
}

impl Default for PolicySection {
    fn default() -> Self {
        Self {
            parameterization: Parameterization::Full,
            theta: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluationSection {
    /// Sample paths (or seeds) per evaluation.
    pub paths: usize,
    /// Trajectories written by `simulate`.
    pub simulate_paths: usize,
    /// Scalar starting points for `compare`, one tuning run each.
    pub starts: Vec<f64>,
    /// Tuned parameters for `compare`; when set, `compare` skips tuning and
    /// pits these against the baseline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuned: Option<Vec<f64>>,
}

impl Default for EvaluationSection {
    fn default() -> Self {
        Self {
            paths: 200,
            simulate_paths: 1,
            starts: vec![1.0],
            tuned: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// One axis per free parameter (at most two).
    pub axes: Vec<Vec<f64>>,
    /// Values within this relative distance of the minimum count as tied.
    #[serde(default)]
    pub tie_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeListSource {
    pub path: PathBuf,
    pub destination: usize,
    #[serde(default)]
    pub drift_sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShortestPathSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<StochasticGraph>,
    /// Read the graph from a `from,to,mean,std` CSV instead; resolved into
    /// `graph` before the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_list: Option<EdgeListSource>,
    pub trip: TripRules,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSection {
    pub dimension: usize,
    #[serde(default = "one")]
    pub target: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub policy: PolicySection,
    #[serde(default)]
    pub evaluation: EvaluationSection,
    #[serde(default)]
    pub tuner: TuneSchedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandit: Option<BanditTestbed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shortest_path: Option<ShortestPathSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<QuadraticSection>,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| config_error(e.to_string()))
    }

    /// Reads a TOML file, or the config embedded in the header of a file
    /// this tool wrote.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        match extract_embedded_config(&text) {
            Some(embedded) => Self::parse(&embedded),
            None => Self::parse(&text),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Number of free policy parameters.
    pub fn dimension(&self) -> usize {
        match self.problem {
            ProblemKind::Energy => self
                .energy
                .as_ref()
                .map_or(0, |e| self.policy.parameterization.dimension(e.lookahead)),
            ProblemKind::Bandit | ProblemKind::ShortestPath => 1,
            ProblemKind::Quadratic => self.quadratic.as_ref().map_or(0, |q| q.dimension),
        }
    }

    pub fn energy(&self) -> &EnergyConfig {
        self.energy.as_ref().expect("resolved energy config")
    }

    pub fn graph(&self) -> &StochasticGraph {
        self.shortest_path
            .as_ref()
            .and_then(|s| s.graph.as_ref())
            .expect("resolved graph")
    }

    pub fn theta(&self) -> &[f64] {
        self.policy.theta.as_deref().expect("resolved theta")
    }

    /// Validates the config and makes every implicit input explicit: the
    /// policy parameters, and a graph given as an edge-list file. The result
    /// reproduces the run on its own.
    pub fn resolve(mut self, seed: Option<u64>, theta: Option<Vec<f64>>) -> Result<Self, CliError> {
        if let Some(seed) = seed {
            self.seed = seed;
        }
        self.output_dir = None;
        self.tuner.validate().map_err(|e| config_error(e.to_string()))?;
        if self.evaluation.paths == 0 || self.evaluation.simulate_paths == 0 {
            return Err(config_error("evaluation.paths and evaluation.simulate_paths must be positive"));
        }
        let section = |present: bool, name: &str| {
            if present {
                Ok(())
            } else {
                Err(config_error(format!("problem = {:?} needs a [{name}] section", self.problem)))
            }
        };
        match self.problem {
            ProblemKind::Energy => {
                section(self.energy.is_some(), "energy")?;
                self.energy()
                    .validate(self.tuner.hi)
                    .map_err(|e| config_error(e.to_string()))?;
            }
            ProblemKind::Bandit => {
                section(self.bandit.is_some(), "bandit")?;
                let b = self.bandit.as_ref().unwrap();
                b.validate().map_err(|e| config_error(format!("bandit: {e}")))?;
            }
            ProblemKind::ShortestPath => {
                section(self.shortest_path.is_some(), "shortest_path")?;
                let sp = self.shortest_path.as_mut().unwrap();
                if let Some(src) = sp.edge_list.take() {
                    let file = fs::File::open(&src.path)
                        .map_err(|e| config_error(format!("shortest_path.edge_list.path: {}: {e}", src.path.display())))?;
                    let mut g = StochasticGraph::read_edge_list(file, src.destination)
                        .map_err(|e| config_error(format!("shortest_path.edge_list: {e}")))?;
                    g.drift_sigma = src.drift_sigma;
                    sp.graph = Some(g);
                }
                let g = sp
                    .graph
                    .as_ref()
                    .ok_or_else(|| config_error("shortest_path needs `graph` or `edge_list`"))?;
                g.validate().map_err(|e| config_error(format!("shortest_path.graph: {e}")))?;
                if sp.trip.origin >= g.nodes {
                    return Err(config_error("shortest_path.trip.origin: not a node"));
                }
            }
            ProblemKind::Quadratic => {
                section(self.quadratic.is_some(), "quadratic")?;
                if self.quadratic.as_ref().unwrap().dimension == 0 {
                    return Err(config_error("quadratic.dimension: must be at least 1"));
                }
            }
        }
        if let Some(grid) = &self.grid {
            if grid.axes.is_empty() || grid.axes.len() > 2 || grid.axes.iter().any(|a| a.is_empty()) {
                return Err(config_error("grid.axes: need one or two nonempty axes"));
            }
            if grid.axes.len() != self.dimension() {
                return Err(config_error(format!(
                    "grid.axes: {} axes for {} free parameters",
                    grid.axes.len(),
                    self.dimension()
                )));
            }
        }
        let d = self.dimension();
        if let Some(t) = theta {
            self.policy.theta = Some(t);
        }
        if self.policy.theta.is_none() {
            let default = match self.problem {
                ProblemKind::Energy | ProblemKind::Bandit => 1.0,
                ProblemKind::ShortestPath | ProblemKind::Quadratic => 0.5,
            };
            self.policy.theta = Some(vec![default; d]);
        }
        if let Some(t) = &self.evaluation.tuned {
            if t.len() != d {
                return Err(config_error(format!("evaluation.tuned: expected {d} values, got {}", t.len())));
            }
        }
        if self.evaluation.starts.is_empty() {
            return Err(config_error("evaluation.starts: need at least one starting value"));
        }
        let t = self.theta();
        if t.len() != d {
            return Err(config_error(format!("policy.theta: expected {d} values, got {}", t.len())));
        }
        if t.iter().any(|v| !v.is_finite()) {
            return Err(config_error("policy.theta: values must be finite"));
        }
        if self.problem == ProblemKind::ShortestPath && !(t[0] > 0.0 && t[0] < 1.0) {
            return Err(config_error("policy.theta: a percentile must lie strictly between 0 and 1"));
        }
        Ok(self)
    }
}

/// Reads the `theta` array of a parameter file written by `tune`.
pub fn read_theta_file(path: &Path) -> Result<Vec<f64>, CliError> {
    #[derive(Deserialize)]
    struct ThetaFile {
        theta: Vec<f64>,
    }
    let text = fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    let parsed: ThetaFile = toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    Ok(parsed.theta)
}
