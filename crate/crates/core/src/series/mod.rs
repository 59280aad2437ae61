//! Uniformly sampled price series, their CSV form, and a seeded generator.

mod csv;
mod rng;
mod synth;

use std::io;
use std::path::PathBuf;

use chrono::{Datelike, NaiveDate, Weekday};
use thiserror::Error;

pub use self::csv::{load_csv, read_csv, read_dated_values, write_csv, write_series, DatedValues};
pub use self::rng::GaussianStream;
pub use self::synth::{generate, Jump, SynthSpec};

/// One trading day, in years.
pub const DEFAULT_DT_YEARS: f64 = 1.0 / 252.0;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("empty series")]
    Empty,
    #[error("non-positive price {value} at sample {index}")]
    NonPositive { index: usize, value: f64 },
    #[error("sampling interval must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: non-positive price {value}")]
    NonPositiveRow { line: usize, value: f64 },
    #[error("line {line}: date {date} is not after {previous}")]
    NonMonotonicDate {
        line: usize,
        date: NaiveDate,
        previous: NaiveDate,
    },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Raw observations of one instrument at a fixed sampling interval.
///
/// Dates are metadata: only the first one is stored and the remaining ones
/// are regenerated as consecutive weekdays when the series is written out.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    label: String,
    t0: NaiveDate,
    dt_years: f64,
    values: Vec<f64>,
}

impl PriceSeries {
    pub fn new(
        label: impl Into<String>,
        t0: NaiveDate,
        dt_years: f64,
        values: Vec<f64>,
    ) -> Result<Self, SeriesError> {
        check_step(dt_years)?;
        if values.is_empty() {
            return Err(SeriesError::Empty);
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(SeriesError::NonPositive { index, value });
        }
        Ok(Self {
            label: label.into(),
            t0,
            dt_years,
            values,
        })
    }

    /// Series with the default label, start date and daily sampling.
    pub fn from_values(values: Vec<f64>) -> Result<Self, SeriesError> {
        Self::new("series", default_start_date(), DEFAULT_DT_YEARS, values)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn t0(&self) -> NaiveDate {
        self.t0
    }

    pub fn dt_years(&self) -> f64 {
        self.dt_years
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: a series holds at least one sample.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest sample, used as the price scale of the series.
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_t0(mut self, t0: NaiveDate) -> Self {
        self.t0 = t0;
        self
    }

    pub fn with_dt_years(mut self, dt_years: f64) -> Result<Self, SeriesError> {
        check_step(dt_years)?;
        self.dt_years = dt_years;
        Ok(self)
    }

    /// Applies `f` sample-wise, keeping label, start date and sampling.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self, SeriesError> {
        Self::new(
            self.label.clone(),
            self.t0,
            self.dt_years,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Calendar dates of the samples: `t0`, then consecutive weekdays.
    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> {
        weekdays_from(self.t0).take(self.values.len())
    }
}

pub(crate) fn check_step(dt_years: f64) -> Result<(), SeriesError> {
    if dt_years.is_finite() && dt_years > 0.0 {
        Ok(())
    } else {
        Err(SeriesError::InvalidStep(dt_years))
    }
}

pub fn default_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2009, 1, 2).expect("valid date")
}

/// `start` followed by every later Monday..Friday.
pub fn weekdays_from(start: NaiveDate) -> impl Iterator<Item = NaiveDate> {
    std::iter::successors(Some(start), |d| {
        let mut next = d.succ_opt()?;
        while matches!(next.weekday(), Weekday::Sat | Weekday::Sun) {
            next = next.succ_opt()?;
        }
        Some(next)
    })
}
