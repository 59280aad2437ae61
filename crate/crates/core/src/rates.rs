//! Risk-free rate path and the growth factor of the cash account.
//!
//! The rate over `[k, k+1)` is `rates[k]`, so the cumulative integral up to
//! sample `k` is the left-rectangle sum `Σ_{j<k} rates[j]·dt`. This is exact
//! for rates that are constant between samples.

use std::path::Path;

use thiserror::Error;

use crate::series::{check_step, read_dated_values, SeriesError, DEFAULT_DT_YEARS};

#[derive(Debug, Error)]
pub enum RateError {
    #[error("rate path is empty")]
    Empty,
    #[error("non-finite rate {value} at sample {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("sampling interval must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("sample index {index} out of range for rate path of length {len}")]
    OutOfRange { index: usize, len: usize },
    #[error(transparent)]
    Csv(#[from] SeriesError),
}

/// Annualized risk-free rates, one per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePath {
    rates: Vec<f64>,
    dt_years: f64,
    /// `integral[k] = Σ_{j<k} rates[j]·dt`.
    integral: Vec<f64>,
}

impl RatePath {
    pub fn new(rates: Vec<f64>, dt_years: f64) -> Result<Self, RateError> {
        check_step(dt_years).map_err(|_| RateError::InvalidStep(dt_years))?;
        if rates.is_empty() {
            return Err(RateError::Empty);
        }
        if let Some((index, &value)) = rates.iter().enumerate().find(|(_, r)| !r.is_finite()) {
            return Err(RateError::NonFinite { index, value });
        }
        let mut integral = Vec::with_capacity(rates.len());
        let mut acc = 0.0;
        for r in &rates {
            integral.push(acc);
            acc += r * dt_years;
        }
        Ok(Self {
            rates,
            dt_years,
            integral,
        })
    }

    pub fn constant(rate: f64, len: usize, dt_years: f64) -> Result<Self, RateError> {
        Self::new(vec![rate; len], dt_years)
    }

    /// Reads a `date,value` file of annualized rates. Rates may be zero or
    /// negative; `dt_years` defaults to one trading day.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self, RateError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| SeriesError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let rows = read_dated_values(std::io::BufReader::new(file))?;
        Self::new(rows.values, rows.dt_years.unwrap_or(DEFAULT_DT_YEARS))
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn dt_years(&self) -> f64 {
        self.dt_years
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn rate(&self, k: usize) -> f64 {
        self.rates[k]
    }

    fn check_index(&self, k: usize) -> Result<(), RateError> {
        if k < self.len() {
            Ok(())
        } else {
            Err(RateError::OutOfRange {
                index: k,
                len: self.len(),
            })
        }
    }

    /// `∫₀^{t_k} r dτ` by the left-rectangle rule.
    pub fn integral(&self, k: usize) -> Result<f64, RateError> {
        self.check_index(k)?;
        Ok(self.integral[k])
    }

    /// `exp ∫₀^{t_k} r dτ`; exactly 1 at `k = 0`.
    pub fn growth_factor(&self, k: usize) -> Result<f64, RateError> {
        Ok(self.integral(k)?.exp())
    }

    pub fn growth_factors(&self) -> Vec<f64> {
        self.integral.iter().map(|i| i.exp()).collect()
    }

    /// Value at sample `k` of a riskless portfolio worth `pi0` at the start.
    pub fn target_value(&self, pi0: f64, k: usize) -> Result<f64, RateError> {
        Ok(pi0 * self.growth_factor(k)?)
    }
}
