//! Dynamic shortest path with θ-percentile link costs.
//!
//! Link costs are normal with a floor at zero. The planner replaces each
//! link's cost by its θ-quantile and solves a deterministic shortest path;
//! the traveler re-plans at every node with the current cost estimates.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::io::Read;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::seed::{child_seed, rng_from_seed};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("link {index}: node out of range (graph has {nodes} nodes)")]
    NodeOutOfRange { index: usize, nodes: usize },
    #[error("link {index}: mean must be finite and std finite and nonnegative")]
    BadCost { index: usize },
    #[error("destination {0} is not a node")]
    Destination(usize),
    #[error("theta must lie strictly between 0 and 1, got {0}")]
    Theta(f64),
    #[error("destination unreachable from node {0}")]
    Unreachable(usize),
    #[error("edge list: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StochasticGraph {
    pub nodes: usize,
    pub links: Vec<Link>,
    pub destination: usize,
    /// Std of the per-step random-walk increment of every mean estimate.
    #[serde(default)]
    pub drift_sigma: f64,
}

impl StochasticGraph {
    pub fn new(nodes: usize, links: Vec<Link>, destination: usize) -> Result<Self, GraphError> {
        let g = Self {
            nodes,
            links,
            destination,
            drift_sigma: 0.0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.destination >= self.nodes {
            return Err(GraphError::Destination(self.destination));
        }
        for (index, l) in self.links.iter().enumerate() {
            if l.from >= self.nodes || l.to >= self.nodes {
                return Err(GraphError::NodeOutOfRange {
                    index,
                    nodes: self.nodes,
                });
            }
            if !l.mean.is_finite() || !(l.std >= 0.0 && l.std.is_finite()) {
                return Err(GraphError::BadCost { index });
            }
        }
        if !(self.drift_sigma >= 0.0 && self.drift_sigma.is_finite()) {
            return Err(GraphError::BadCost { index: usize::MAX });
        }
        Ok(())
    }

    /// Reads `from,to,mean,std` rows (with a header line). The node count is
    /// one more than the largest index seen.
    pub fn read_edge_list<R: Read>(reader: R, destination: usize) -> Result<Self, GraphError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let links: Vec<Link> = rdr.deserialize().collect::<Result<_, _>>()?;
        let nodes = links
            .iter()
            .map(|l| l.from.max(l.to) + 1)
            .max()
            .unwrap_or(0)
            .max(destination + 1);
        Self::new(nodes, links, destination)
    }
}

/// `max(0, mean + z(θ) std)`.
pub fn percentile_cost(mean: f64, std: f64, theta: f64) -> f64 {
    if std == 0.0 {
        return mean.max(0.0);
    }
    let z = Normal::standard().inverse_cdf(theta);
    (mean + z * std).max(0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    /// Link indices in travel order.
    pub links: Vec<usize>,
    pub nodes: Vec<usize>,
    /// Sum of the percentile costs along the route.
    pub cost: f64,
}

#[derive(PartialEq)]
struct Label(f64, usize);

impl Eq for Label {}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

fn check_theta(theta: f64) -> Result<(), GraphError> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(GraphError::Theta(theta))
    }
}

/// Dijkstra on percentile costs computed from `means` (one per link) and the
/// graph's stds. Labels are settled in (cost, node) order and a predecessor
/// is replaced only by a strictly cheaper one, so ties resolve the same way
/// on every run.
fn plan(graph: &StochasticGraph, means: &[f64], theta: f64, origin: usize) -> Result<Route, GraphError> {
    let costs: Vec<f64> = graph
        .links
        .iter()
        .zip(means)
        .map(|(l, &m)| percentile_cost(m, l.std, theta))
        .collect();
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); graph.nodes];
    for (i, l) in graph.links.iter().enumerate() {
        outgoing[l.from].push(i);
    }
    let mut dist = vec![f64::INFINITY; graph.nodes];
    let mut pred: Vec<Option<usize>> = vec![None; graph.nodes];
    let mut done = vec![false; graph.nodes];
    let mut heap = BinaryHeap::new();
    dist[origin] = 0.0;
    heap.push(Reverse(Label(0.0, origin)));
    while let Some(Reverse(Label(d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == graph.destination {
            break;
        }
        for &i in &outgoing[u] {
            let v = graph.links[i].to;
            let nd = d + costs[i];
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = Some(i);
                heap.push(Reverse(Label(nd, v)));
            }
        }
    }
    if !dist[graph.destination].is_finite() {
        return Err(GraphError::Unreachable(origin));
    }
    let mut links = Vec::new();
    let mut node = graph.destination;
    while node != origin {
        let i = pred[node].expect("settled node has a predecessor");
        links.push(i);
        node = graph.links[i].from;
    }
    links.reverse();
    let mut nodes = vec![origin];
    nodes.extend(links.iter().map(|&i| graph.links[i].to));
    Ok(Route {
        links,
        nodes,
        cost: dist[graph.destination],
    })
}

pub fn percentile_shortest_path(graph: &StochasticGraph, theta: f64, origin: usize) -> Result<Route, GraphError> {
    check_theta(theta)?;
    let means: Vec<f64> = graph.links.iter().map(|l| l.mean).collect();
    plan(graph, &means, theta, origin)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripRules {
    pub origin: usize,
    /// Maximum number of links traversed.
    pub max_steps: usize,
    /// Added when the destination is not reached within `max_steps`.
    pub incomplete_penalty: f64,
    /// Lateness is `max(0, travel - deadline)`, charged at `late_penalty`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline: Option<f64>,
    #[serde(default)]
    pub late_penalty: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trip {
    pub nodes: Vec<usize>,
    /// Sum of realized link costs (also the arrival time).
    pub travel: f64,
    pub completed: bool,
    /// Travel plus lateness and incompleteness penalties.
    pub cost: f64,
}

/// Drives from `rules.origin`, re-planning at every node.
///
/// Step `k` draws, from a generator seeded by `(seed, k)`, one standard
/// normal per link for the realized cost `max(0, c̄ + std z)` and then one
/// per link for the estimate drift `c̄ ← max(0, c̄ + drift_sigma η)`. The
/// draws do not depend on the route, so different θ see common numbers.
pub fn navigate_simulate(graph: &StochasticGraph, theta: f64, rules: &TripRules, seed: u64) -> Result<Trip, GraphError> {
    check_theta(theta)?;
    let mut means: Vec<f64> = graph.links.iter().map(|l| l.mean).collect();
    let mut node = rules.origin;
    let mut nodes = vec![node];
    let mut travel = 0.0;
    let n = graph.links.len();
    let mut step = 0;
    while node != graph.destination && step < rules.max_steps {
        let route = plan(graph, &means, theta, node)?;
        let link = route.links[0];
        let mut rng = rng_from_seed(child_seed(seed, step as u64));
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        travel += (means[link] + graph.links[link].std * z[link]).max(0.0);
        if graph.drift_sigma > 0.0 {
            for m in means.iter_mut() {
                let eta: f64 = rng.sample(StandardNormal);
                *m = (*m + graph.drift_sigma * eta).max(0.0);
            }
        }
        node = graph.links[link].to;
        nodes.push(node);
        step += 1;
    }
    let completed = node == graph.destination;
    let mut cost = travel;
    if let Some(deadline) = rules.deadline {
        cost += rules.late_penalty * (travel - deadline).max(0.0);
    }
    if !completed {
        cost += rules.incomplete_penalty;
    }
    Ok(Trip {
        nodes,
        travel,
        completed,
        cost,
    })
}
