//! The full-horizon energy program with perfect information, built directly
//! from a deterministic configuration.
#![allow(dead_code)]

use cfa_core::energy::{EnergyConfig, Flow};
use cfa_core::lp::{solve, LinearProgram, LpStatus, Sense};

/// Optimal total cost over periods `0..T` when demand, wind and price follow
/// their profiles and price model exactly.
pub fn monolithic_optimum(config: &EnergyConfig) -> f64 {
    let t_max = config.horizon;
    let mut price = config.price.initial;
    let mut lp = LinearProgram::new();
    // x[t][flow], r[t] = storage at the start of t+1
    let mut x = Vec::with_capacity(t_max);
    let mut r = Vec::with_capacity(t_max);
    for _ in 0..t_max {
        let flows: Vec<usize> = Flow::ALL
            .iter()
            .map(|&f| {
                let (lo, hi) = config.limits.bounds(f);
                let cost = match f {
                    Flow::GridToBattery | Flow::GridToDemand => price,
                    _ => 0.0,
                };
                lp.add_variable(lo, hi, cost)
            })
            .collect();
        x.push(flows);
        r.push(lp.add_variable(0.0, config.storage_capacity, 0.0));
        price = config.price.next(price, 0.0);
    }
    let idx = |f: Flow| Flow::ALL.iter().position(|&g| g == f).unwrap();
    let (ed, eb, gd, gb, bd) = (
        idx(Flow::WindToDemand),
        idx(Flow::WindToBattery),
        idx(Flow::GridToDemand),
        idx(Flow::GridToBattery),
        idx(Flow::BatteryToDemand),
    );
    for t in 0..t_max {
        let v = &x[t];
        let mut avail = vec![(v[bd], 1.0), (v[gb], -1.0), (v[eb], -1.0)];
        let mut link = vec![(r[t], 1.0), (v[gb], -1.0), (v[eb], -1.0), (v[bd], 1.0)];
        let start = if t == 0 {
            config.initial_storage
        } else {
            avail.push((r[t - 1], -1.0));
            link.push((r[t - 1], -1.0));
            0.0
        };
        lp.add_constraint(avail, Sense::Le, start);
        lp.add_constraint(link, Sense::Eq, start);
        lp.add_constraint(vec![(v[ed], 1.0), (v[bd], 1.0), (v[gd], 1.0)], Sense::Eq, config.demand_profile.at(t));
        lp.add_constraint(vec![(v[eb], 1.0), (v[ed], 1.0)], Sense::Le, config.wind_profile.at(t));
    }
    let sol = solve(&lp);
    assert_eq!(sol.status, LpStatus::Optimal);
    sol.objective
}
