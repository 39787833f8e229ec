//! Wind + battery + grid energy storage system serving a time-varying demand.
//!
//! State `S_t = (R_t, D_t, E_t, p_t, f^D_t, f^E_t)`, decisions are the five
//! energy flows of a period, and the cost of a period is the money paid to
//! the grid, `p_t (x^GB + x^GD)`. Selling stored energy back (`x^GB < 0`)
//! counts as negative cost.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forecast::{evolve_forecast, init_forecast, sample_noise, ForecastNoise, ForecastVector, Profile, HOURS};
use crate::sdm::{Problem, Violation};
use crate::seed::SimRng;
use rand::Rng;
use rand_distr::StandardNormal;

/// Tolerance used when checking decisions against constraints.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// The five flows of the system, in layout order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flow {
    WindToDemand,
    WindToBattery,
    GridToDemand,
    GridToBattery,
    BatteryToDemand,
}

impl Flow {
    pub const ALL: [Flow; 5] = [
        Flow::WindToDemand,
        Flow::WindToBattery,
        Flow::GridToDemand,
        Flow::GridToBattery,
        Flow::BatteryToDemand,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Flow::WindToDemand => "wind_to_demand",
            Flow::WindToBattery => "wind_to_battery",
            Flow::GridToDemand => "grid_to_demand",
            Flow::GridToBattery => "grid_to_battery",
            Flow::BatteryToDemand => "battery_to_demand",
        }
    }

    /// Only grid-to-battery may be negative (battery selling to the grid).
    pub fn is_signed(self) -> bool {
        self == Flow::GridToBattery
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyDecision {
    pub wind_to_demand: f64,
    pub wind_to_battery: f64,
    pub grid_to_demand: f64,
    pub grid_to_battery: f64,
    pub battery_to_demand: f64,
}

impl EnergyDecision {
    pub fn get(&self, flow: Flow) -> f64 {
        match flow {
            Flow::WindToDemand => self.wind_to_demand,
            Flow::WindToBattery => self.wind_to_battery,
            Flow::GridToDemand => self.grid_to_demand,
            Flow::GridToBattery => self.grid_to_battery,
            Flow::BatteryToDemand => self.battery_to_demand,
        }
    }

    pub fn set(&mut self, flow: Flow, value: f64) {
        match flow {
            Flow::WindToDemand => self.wind_to_demand = value,
            Flow::WindToBattery => self.wind_to_battery = value,
            Flow::GridToDemand => self.grid_to_demand = value,
            Flow::GridToBattery => self.grid_to_battery = value,
            Flow::BatteryToDemand => self.battery_to_demand = value,
        }
    }

    /// `R_{t+1} - R_t`.
    pub fn storage_change(&self) -> f64 {
        self.wind_to_battery + self.grid_to_battery - self.battery_to_demand
    }
}

/// Per-period transmission limits; `None` is unlimited. The grid-to-battery
/// limit applies to both directions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowLimits {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wind_to_demand: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wind_to_battery: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_to_demand: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_to_battery: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub battery_to_demand: Option<f64>,
}

impl FlowLimits {
    pub fn get(&self, flow: Flow) -> Option<f64> {
        match flow {
            Flow::WindToDemand => self.wind_to_demand,
            Flow::WindToBattery => self.wind_to_battery,
            Flow::GridToDemand => self.grid_to_demand,
            Flow::GridToBattery => self.grid_to_battery,
            Flow::BatteryToDemand => self.battery_to_demand,
        }
    }

    /// `(lower, upper)` bounds of a flow variable.
    pub fn bounds(&self, flow: Flow) -> (f64, f64) {
        let u = self.get(flow).unwrap_or(f64::INFINITY);
        if flow.is_signed() {
            (-u, u)
        } else {
            (0.0, u)
        }
    }
}

/// Grid price: `p_{t+1} = p_t + κ (p̄ - p_t) + p̂_{t+1}`, `p̂ ~ N(0, σ²)`,
/// optionally floored. With the default `κ = 0` it is a pure random walk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceModel {
    pub initial: f64,
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub reversion: f64,
    /// Level the price reverts to; defaults to `initial`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl PriceModel {
    pub fn random_walk(initial: f64, sigma: f64) -> Self {
        Self {
            initial,
            sigma,
            floor: None,
            reversion: 0.0,
            mean: None,
        }
    }

    pub fn next(&self, price: f64, change: f64) -> f64 {
        let mean = self.mean.unwrap_or(self.initial);
        let p = price + self.reversion * (mean - price) + change;
        match self.floor {
            Some(f) => p.max(f),
            None => p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    /// Number of decision periods `T`.
    pub horizon: usize,
    /// Lookahead and forecast horizon `H`.
    pub lookahead: usize,
    /// Battery capacity `R_max` (MWh).
    pub storage_capacity: f64,
    #[serde(default)]
    pub initial_storage: f64,
    #[serde(default)]
    pub limits: FlowLimits,
    /// Standard deviation of each demand forecast increment.
    pub demand_sigma: f64,
    /// Standard deviation of each wind forecast increment.
    pub wind_sigma: f64,
    pub price: PriceModel,
    pub demand_profile: Profile,
    pub wind_profile: Profile,
}

#[derive(Debug, Error, PartialEq)]
#[error("energy.{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

fn config_err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        message: message.into(),
    }
}

impl EnergyConfig {
    /// Checks ranges and that the grid can always cover demand, including
    /// lookahead demands scaled by up to `theta_max`.
    ///
    /// The realized demand can exceed its profile by accumulated forecast
    /// increments; the grid limit must clear `theta_max * (max profile +
    /// 6 σ_D sqrt(H))`.
    pub fn validate(&self, theta_max: f64) -> Result<(), ConfigError> {
        if self.horizon == 0 {
            return Err(config_err("horizon", "must be at least 1"));
        }
        if self.lookahead == 0 {
            return Err(config_err("lookahead", "must be at least 1"));
        }
        let nonneg = |field: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(config_err(field, format!("must be a nonnegative number, got {v}")))
            }
        };
        nonneg("storage_capacity", self.storage_capacity)?;
        nonneg("initial_storage", self.initial_storage)?;
        if self.initial_storage > self.storage_capacity {
            return Err(config_err("initial_storage", "exceeds storage_capacity"));
        }
        nonneg("demand_sigma", self.demand_sigma)?;
        nonneg("wind_sigma", self.wind_sigma)?;
        nonneg("price.sigma", self.price.sigma)?;
        if !self.price.initial.is_finite() {
            return Err(config_err("price.initial", "must be finite"));
        }
        if !(0.0..=1.0).contains(&self.price.reversion) {
            return Err(config_err("price.reversion", "must lie in [0, 1]"));
        }
        for flow in Flow::ALL {
            if let Some(u) = self.limits.get(flow) {
                nonneg(&format!("limits.{}", flow.name()), u)?;
            }
        }
        if let Some(u) = self.limits.grid_to_demand {
            let worst = theta_max.max(1.0)
                * (self.demand_profile.max() + 6.0 * self.demand_sigma * (self.lookahead as f64).sqrt());
            if u < worst {
                return Err(config_err(
                    "limits.grid_to_demand",
                    format!("{u} cannot cover scaled demand up to {worst:.3}"),
                ));
            }
        }
        Ok(())
    }
}

impl EnergyConfig {
    /// The synthetic benchmark week: hourly periods, a one-day lookahead,
    /// demand peaking in the afternoon and wind peaking at night.
    pub fn benchmark() -> Self {
        let demand: Vec<f64> = (0..HOURS)
            .map(|h| 10.0 - 3.0 * (2.0 * std::f64::consts::PI * (h as f64 - 3.0) / HOURS as f64).cos())
            .collect();
        let wind: Vec<f64> = (0..HOURS)
            .map(|h| 10.0 + 4.0 * (2.0 * std::f64::consts::PI * (h as f64 - 3.0) / HOURS as f64).cos())
            .collect();
        let demand_profile = Profile::new(demand).expect("valid demand profile");
        let wind_profile = Profile::new(wind).expect("valid wind profile");
        Self {
            horizon: 168,
            lookahead: 24,
            storage_capacity: 30.0,
            initial_storage: 0.0,
            limits: FlowLimits {
                grid_to_battery: Some(0.0),
                ..FlowLimits::default()
            },
            demand_sigma: 0.1 * demand_profile.mean(),
            wind_sigma: 0.4 * wind_profile.mean(),
            price: PriceModel {
                initial: 50.0,
                sigma: 2.0,
                floor: Some(0.0),
                reversion: 0.05,
                mean: None,
            },
            demand_profile,
            wind_profile,
        }
    }
}

/// Exogenous information `W_{t+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyInfo {
    pub demand: ForecastNoise,
    pub wind: ForecastNoise,
    pub price_change: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyState {
    pub t: usize,
    /// `R_t`.
    pub storage: f64,
    /// `D_t`.
    pub demand: f64,
    /// `E_t`.
    pub wind: f64,
    /// `p_t`.
    pub price: f64,
    pub demand_forecast: ForecastVector,
    pub wind_forecast: ForecastVector,
}

impl EnergyState {
    pub fn initial(config: &EnergyConfig) -> Self {
        Self {
            t: 0,
            storage: config.initial_storage,
            demand: config.demand_profile.at(0),
            wind: config.wind_profile.at(0),
            price: config.price.initial,
            demand_forecast: init_forecast(&config.demand_profile, 0, config.lookahead),
            wind_forecast: init_forecast(&config.wind_profile, 0, config.lookahead),
        }
    }
}

pub fn check_decision(state: &EnergyState, x: &EnergyDecision, config: &EnergyConfig) -> Vec<Violation> {
    let tol = FEASIBILITY_TOL;
    let mut v = Vec::new();
    let mut check = |name: String, excess: f64| {
        if excess > tol {
            v.push(Violation::new(name, excess));
        }
    };
    let outflow = x.battery_to_demand - x.grid_to_battery - x.wind_to_battery;
    check("storage-available".into(), outflow - state.storage);
    let next = state.storage + x.storage_change();
    check("storage-nonnegative".into(), -next);
    check("storage-capacity".into(), next - config.storage_capacity);
    let served = x.wind_to_demand + x.battery_to_demand + x.grid_to_demand;
    check("demand-balance".into(), (served - state.demand).abs());
    check("wind-available".into(), x.wind_to_battery + x.wind_to_demand - state.wind);
    for flow in Flow::ALL {
        let value = x.get(flow);
        if !value.is_finite() {
            check(format!("finite:{}", flow.name()), f64::INFINITY);
            continue;
        }
        if !flow.is_signed() {
            check(format!("nonnegative:{}", flow.name()), -value);
        }
        if let Some(u) = config.limits.get(flow) {
            check(format!("flow-limit:{}", flow.name()), value.abs() - u);
        }
    }
    v
}

/// Money paid to the grid in the period.
pub fn contribution(state: &EnergyState, x: &EnergyDecision) -> f64 {
    state.price * (x.grid_to_battery + x.grid_to_demand)
}

#[derive(Debug, Error, PartialEq)]
pub enum TransitionError {
    #[error("decision infeasible: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Infeasible(Vec<Violation>),
    #[error(transparent)]
    Forecast(#[from] crate::forecast::ForecastError),
}

pub fn transition(
    state: &EnergyState,
    x: &EnergyDecision,
    info: &EnergyInfo,
    config: &EnergyConfig,
) -> Result<EnergyState, TransitionError> {
    let violations = check_decision(state, x, config);
    if !violations.is_empty() {
        return Err(TransitionError::Infeasible(violations));
    }
    let demand = evolve_forecast(&state.demand_forecast, &info.demand, &config.demand_profile)?;
    let wind = evolve_forecast(&state.wind_forecast, &info.wind, &config.wind_profile)?;
    Ok(EnergyState {
        t: state.t + 1,
        storage: state.storage + x.storage_change(),
        demand: demand.actual,
        wind: wind.actual,
        price: config.price.next(state.price, info.price_change),
        demand_forecast: demand.forecast,
        wind_forecast: wind.forecast,
    })
}

/// The energy system as a [`Problem`].
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyProblem {
    pub config: EnergyConfig,
}

impl EnergyProblem {
    pub fn new(config: EnergyConfig) -> Self {
        Self { config }
    }
}

impl Problem for EnergyProblem {
    type State = EnergyState;
    type Decision = EnergyDecision;
    type Exogenous = EnergyInfo;

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn initial_state(&self) -> EnergyState {
        EnergyState::initial(&self.config)
    }

    fn sample_exogenous(&self, _t: usize, rng: &mut SimRng) -> EnergyInfo {
        let h = self.config.lookahead;
        let demand = sample_noise(self.config.demand_sigma, h, rng).expect("validated sigma");
        let wind = sample_noise(self.config.wind_sigma, h, rng).expect("validated sigma");
        let price_change = self.config.price.sigma * rng.sample::<f64, _>(StandardNormal);
        EnergyInfo {
            demand,
            wind,
            price_change,
        }
    }

    fn check_decision(&self, state: &EnergyState, x: &EnergyDecision) -> Vec<Violation> {
        check_decision(state, x, &self.config)
    }

    fn transition(&self, state: &EnergyState, x: &EnergyDecision, info: &EnergyInfo) -> Result<EnergyState, String> {
        transition(state, x, info, &self.config).map_err(|e| e.to_string())
    }

    fn contribution(&self, state: &EnergyState, x: &EnergyDecision) -> f64 {
        contribution(state, x)
    }
}
