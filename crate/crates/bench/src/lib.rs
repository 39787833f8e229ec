//! Fixtures shared by the benchmarks.

use cfa_core::energy::{EnergyConfig, EnergyState};
use cfa_core::lp::{LinearProgram, Sense};
use cfa_core::seed::rng_from_seed;
use rand::Rng;

/// A state halfway through the default benchmark week with its forecasts.
pub fn midweek_state(config: &EnergyConfig) -> EnergyState {
    let mut state = EnergyState::initial(config);
    state.t = config.horizon / 2;
    state.storage = 0.5 * config.storage_capacity;
    state
}

/// Dense random program with finite bounds, feasible at the origin.
pub fn random_dense_lp(seed: u64, n: usize, m: usize) -> LinearProgram {
    let mut rng = rng_from_seed(seed);
    let mut lp = LinearProgram::new();
    for _ in 0..n {
        lp.add_variable(0.0, rng.random_range(1.0..10.0), rng.random_range(-5.0..5.0));
    }
    for _ in 0..m {
        let coeffs = (0..n).map(|j| (j, rng.random_range(-1.0..3.0))).collect();
        lp.add_constraint(coeffs, Sense::Le, rng.random_range(1.0..20.0));
    }
    lp
}
