//! Rolling forecasts evolving as a martingale (MMFE).
//!
//! A [`ForecastVector`] issued at time `t` stores `f_{t,t+τ}` by lag
//! `τ = 1..H`. Moving to `t+1`, the forecast of target `t+τ` receives the
//! increment `ε_τ`: for `τ = 1` that increment is the gap between the
//! realized value and its forecast, for `τ ≥ 2` it revises a forecast that
//! stays in the vector at the new lag `τ - 1`. The slot freed at lag `H` is
//! filled from the hour-of-day profile. Forecasts and realizations are
//! clamped at zero.

use std::io::Read;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ForecastError {
    #[error("forecast has horizon {forecast}, noise has {noise} increments")]
    LengthMismatch { forecast: usize, noise: usize },
    #[error("standard deviation must be nonnegative and finite, got {0}")]
    InvalidSigma(f64),
    #[error("profile needs {HOURS} hourly values, got {0}")]
    ProfileLength(usize),
    #[error("profile value {value} at hour {hour} is not a nonnegative number")]
    ProfileValue { hour: usize, value: f64 },
    #[error("forecast matrix row {row}: {message}")]
    Matrix { row: usize, message: String },
}

pub const HOURS: usize = 24;

/// Periodic hour-of-day profile; the unconditional mean of a stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Profile {
    hourly: Vec<f64>,
}

impl Profile {
    pub fn new(hourly: Vec<f64>) -> Result<Self, ForecastError> {
        if hourly.len() != HOURS {
            return Err(ForecastError::ProfileLength(hourly.len()));
        }
        if let Some((hour, &value)) = hourly
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(ForecastError::ProfileValue { hour, value });
        }
        Ok(Self { hourly })
    }

    pub fn flat(value: f64) -> Self {
        Self::new(vec![value; HOURS]).expect("flat profile value must be nonnegative")
    }

    /// Value for absolute period `t`.
    pub fn at(&self, t: usize) -> f64 {
        self.hourly[t % HOURS]
    }

    pub fn hourly(&self) -> &[f64] {
        &self.hourly
    }

    pub fn mean(&self) -> f64 {
        self.hourly.iter().sum::<f64>() / HOURS as f64
    }

    pub fn max(&self) -> f64 {
        self.hourly.iter().copied().fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for Profile {
    type Error = ForecastError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<Profile> for Vec<f64> {
    fn from(p: Profile) -> Self {
        p.hourly
    }
}

/// Forecasts `f_{t,t+τ}`, `τ = 1..H`, issued at `base = t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ForecastVector {
    base: usize,
    values: Vec<f64>,
}

impl ForecastVector {
    /// Negative inputs are clamped to zero.
    pub fn new(base: usize, values: Vec<f64>) -> Self {
        let values = values.into_iter().map(clamp_nonnegative).collect();
        Self { base, values }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    /// `f_{t,t+lag}` for `lag` in `1..=H`.
    pub fn lag(&self, lag: usize) -> f64 {
        assert!(lag >= 1 && lag <= self.values.len(), "lag {lag} out of 1..={}", self.values.len());
        self.values[lag - 1]
    }

    /// Forecast of absolute period `target`, if it lies in `t+1..=t+H`.
    pub fn target(&self, target: usize) -> Option<f64> {
        target
            .checked_sub(self.base + 1)
            .and_then(|i| self.values.get(i).copied())
    }

    /// Values by lag; index 0 is lag 1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Increments `ε_{t+1,τ}`, `τ = 1..H`, of one forecast stream.
#[derive(Clone, Debug, PartialEq)]
pub struct ForecastNoise {
    pub sigma: f64,
    pub increments: Vec<f64>,
}

impl ForecastNoise {
    pub fn zeros(horizon: usize) -> Self {
        Self {
            sigma: 0.0,
            increments: vec![0.0; horizon],
        }
    }
}

/// A forecast moved from `t` to `t+1`, with the realized value of period
/// `t+1` (the lag-0 entry) split out.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolvedForecast {
    pub actual: f64,
    pub forecast: ForecastVector,
}

fn clamp_nonnegative(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

pub fn evolve_forecast(
    current: &ForecastVector,
    noise: &ForecastNoise,
    profile: &Profile,
) -> Result<EvolvedForecast, ForecastError> {
    let h = current.horizon();
    if noise.increments.len() != h {
        return Err(ForecastError::LengthMismatch {
            forecast: h,
            noise: noise.increments.len(),
        });
    }
    let next_base = current.base + 1;
    if h == 0 {
        return Ok(EvolvedForecast {
            actual: profile.at(next_base),
            forecast: ForecastVector::new(next_base, Vec::new()),
        });
    }
    let actual = clamp_nonnegative(current.values[0] + noise.increments[0]);
    let mut values = Vec::with_capacity(h);
    for (f, e) in current.values[1..].iter().zip(&noise.increments[1..]) {
        values.push(clamp_nonnegative(f + e));
    }
    values.push(profile.at(next_base + h));
    Ok(EvolvedForecast {
        actual,
        forecast: ForecastVector { base: next_base, values },
    })
}

pub fn realize_actual(evolved: &EvolvedForecast) -> f64 {
    evolved.actual
}

/// `horizon` i.i.d. `N(0, sigma^2)` increments.
pub fn sample_noise<R: Rng + ?Sized>(
    sigma: f64,
    horizon: usize,
    rng: &mut R,
) -> Result<ForecastNoise, ForecastError> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(ForecastError::InvalidSigma(sigma));
    }
    let increments = (0..horizon)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(ForecastNoise { sigma, increments })
}

/// `f_{t,t+τ} = profile(t+τ)`.
pub fn init_forecast(profile: &Profile, t: usize, horizon: usize) -> ForecastVector {
    ForecastVector {
        base: t,
        values: (1..=horizon).map(|tau| profile.at(t + tau)).collect(),
    }
}

/// Reads a historical forecast matrix: one CSV row per issue time, one
/// column per lag. An optional header row is skipped if its first cell is
/// not a number. Row `i` becomes the forecast issued at time `i`.
pub fn read_forecast_matrix<R: Read>(reader: R) -> Result<Vec<ForecastVector>, ForecastError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out: Vec<ForecastVector> = Vec::new();
    let mut width = None;
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| ForecastError::Matrix {
            row,
            message: e.to_string(),
        })?;
        if row == 0 && record.get(0).is_some_and(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        let values = record
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ForecastError::Matrix {
                row,
                message: e.to_string(),
            })?;
        if *width.get_or_insert(values.len()) != values.len() {
            return Err(ForecastError::Matrix {
                row,
                message: format!("expected {} lags, found {}", width.unwrap(), values.len()),
            });
        }
        out.push(ForecastVector::new(out.len(), values));
    }
    Ok(out)
}
