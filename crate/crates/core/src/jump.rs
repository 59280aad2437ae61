//! Abrupt-change forecasts from unusual fluctuations around the trend, and
//! gentler hedge paths around them.
//!
//! A sample is flagged when its residual is large compared with the recent
//! residual scale: `|residual[k]| / σ[k] ≥ z_threshold`, where `σ[k]` is the
//! root-mean-square residual over the `stat_window` samples strictly before
//! `k`. Events fire at detection time; no lead time is claimed.

use std::fmt;

use thiserror::Error;

use crate::hedge::HedgePath;
use crate::series::PriceSeries;
use crate::trend::TrendEstimate;

/// Lower bound of the residual scale, relative to the price level.
pub const SCALE_FLOOR_REL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum JumpError {
    #[error("invalid jump config: {0}")]
    InvalidConfig(String),
    #[error("invalid policy config: {0}")]
    InvalidPolicy(String),
    #[error("series has {len} samples, jump statistics need at least {stat_window}")]
    TooShort { len: usize, stat_window: usize },
    #[error("length mismatch: series has {series} samples, trend has {trend}")]
    LengthMismatch { series: usize, trend: usize },
    #[error("event index {index} outside hedge path of length {len}")]
    EventOutOfRange { index: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpConfig {
    pub stat_window: usize,
    pub z_threshold: f64,
    pub direction_window: usize,
    pub refractory: usize,
}

impl Default for JumpConfig {
    fn default() -> Self {
        Self {
            stat_window: 20,
            z_threshold: 3.0,
            direction_window: 5,
            refractory: 10,
        }
    }
}

impl JumpConfig {
    pub fn validate(&self) -> Result<(), JumpError> {
        let invalid = |m: String| Err(JumpError::InvalidConfig(m));
        if self.stat_window < 4 {
            return invalid(format!(
                "stat_window must be at least 4, got {}",
                self.stat_window
            ));
        }
        if !(self.z_threshold.is_finite() && self.z_threshold > 0.0) {
            return invalid(format!(
                "z_threshold must be positive, got {}",
                self.z_threshold
            ));
        }
        if self.direction_window < 1 {
            return invalid("direction_window must be at least 1".to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Upward,
    Downward,
}

impl Direction {
    /// `up` or `down`.
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Upward => "up",
            Direction::Downward => "down",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub index: usize,
    pub direction: Direction,
    /// `|residual| / σ` at the trigger.
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct JumpForecast {
    pub events: Vec<JumpEvent>,
}

impl JumpForecast {
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.events.iter().map(|e| e.index)
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }
}

pub fn forecast_jumps(
    series: &PriceSeries,
    trend: &TrendEstimate,
    cfg: &JumpConfig,
) -> Result<JumpForecast, JumpError> {
    cfg.validate()?;
    if series.len() != trend.len() {
        return Err(JumpError::LengthMismatch {
            series: series.len(),
            trend: trend.len(),
        });
    }
    if series.len() < cfg.stat_window {
        return Err(JumpError::TooShort {
            len: series.len(),
            stat_window: cfg.stat_window,
        });
    }
    let residual = trend.residual();
    let floor = SCALE_FLOOR_REL * series.max_value();
    let w = cfg.stat_window;

    let mut events: Vec<JumpEvent> = Vec::new();
    for k in w..residual.len() {
        let mean_sq = residual[k - w..k].iter().map(|e| e * e).sum::<f64>() / w as f64;
        let sigma = mean_sq.sqrt().max(floor);
        let score = residual[k].abs() / sigma;
        if score < cfg.z_threshold {
            continue;
        }
        if let Some(last) = events.last() {
            if k - last.index <= cfg.refractory {
                continue;
            }
        }
        let from = (k + 1).saturating_sub(cfg.direction_window);
        let vote: f64 = residual[from..=k].iter().sum();
        let direction = if vote > 0.0 {
            Direction::Upward
        } else {
            Direction::Downward
        };
        events.push(JumpEvent {
            index: k,
            direction,
            score,
        });
    }
    Ok(JumpForecast { events })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Hold Δ at its pre-event value for `freeze_horizon` samples.
    Freeze,
    /// Bound every per-sample move of Δ by `max_step`.
    RateLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyConfig {
    pub policy: Policy,
    pub freeze_horizon: usize,
    pub max_step: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            policy: Policy::RateLimit,
            freeze_horizon: 5,
            max_step: 0.05,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<(), JumpError> {
        if !(self.max_step > 0.0) {
            return Err(JumpError::InvalidPolicy(format!(
                "max_step must be positive, got {}",
                self.max_step
            )));
        }
        Ok(())
    }
}

/// Replaces the risk-free Δ by a less violent open-loop path.
///
/// * `Freeze`: for each event at `k`, Δ is held at the shaped value of
///   `k − 1` (or at `Δ[0]` when `k = 0`) over `k ..= k + freeze_horizon`.
///   Overlapping spans merge into one constant stretch.
/// * `RateLimit`: `Δ'[0] = Δ[0]`, `Δ'[k] = Δ'[k−1] + clamp(Δ[k] − Δ'[k−1], ±max_step)`
///   everywhere; the events do not influence the limiter.
///
/// Target and initialization are carried over unchanged.
pub fn shape_delta(
    path: &HedgePath,
    forecast: &JumpForecast,
    cfg: &PolicyConfig,
) -> Result<HedgePath, JumpError> {
    cfg.validate()?;
    let n = path.len();
    if let Some(index) = forecast.indices().find(|&i| i >= n) {
        return Err(JumpError::EventOutOfRange { index, len: n });
    }
    let input = path.delta();
    let shaped = match cfg.policy {
        Policy::Freeze => {
            let mut out = input.to_vec();
            for k in forecast.indices() {
                let held = if k == 0 { out[0] } else { out[k - 1] };
                let end = (k + cfg.freeze_horizon).min(n - 1);
                out[k..=end].fill(held);
            }
            out
        }
        Policy::RateLimit => {
            let mut out: Vec<f64> = Vec::with_capacity(n);
            for &target in input {
                let next = match out.last() {
                    None => target,
                    Some(&prev) => limited_step(prev, target, cfg.max_step),
                };
                out.push(next);
            }
            out
        }
    };
    Ok(path
        .with_delta(shaped)
        .expect("shaped path keeps the input length"))
}

/// `prev + clamp(target − prev, ±max_step)`, with the rounded sum pulled back
/// towards `prev` so the realised move never exceeds `max_step`.
fn limited_step(prev: f64, target: f64, max_step: f64) -> f64 {
    if (target - prev).abs() <= max_step {
        return target;
    }
    let mut next = prev + (target - prev).clamp(-max_step, max_step);
    while (next - prev).abs() > max_step {
        next = if next > prev {
            next.next_down()
        } else {
            next.next_up()
        };
    }
    next
}

/// Sample ranges held constant by the freeze policy, after merging overlaps.
pub fn freeze_spans(forecast: &JumpForecast, horizon: usize, len: usize) -> Vec<(usize, usize)> {
    let mut spans: Vec<(usize, usize)> = Vec::new();
    for k in forecast.indices().filter(|&k| k < len) {
        let end = (k + horizon).min(len - 1);
        match spans.last_mut() {
            Some(last) if k <= last.1 + 1 => last.1 = last.1.max(end),
            _ => spans.push((k, end)),
        }
    }
    spans
}
