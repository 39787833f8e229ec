//! Two small cost-function-approximation exemplars outside the energy domain.

pub mod bandit;
pub mod shortest_path;
