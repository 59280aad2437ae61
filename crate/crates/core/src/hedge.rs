//! Hedge ratio by dynamic replication on trends.
//!
//! The portfolio `Π_trend = V_trend − Δ·S_trend` is asked to grow like cash,
//! `Π_trend(t) = Π_trend(0)·exp ∫₀ᵗ r dτ`, which is solved for Δ sample by
//! sample:
//!
//! ```text
//! Δ(t) = (V_trend(t) − Π_trend(0)·exp ∫₀ᵗ r dτ) / S_trend(t)
//! ```
//!
//! The starting pair comes from matching the logarithmic derivatives of both
//! sides at `t = 0`:
//!
//! ```text
//! Δ(0)         = (V̇_trend(0) − r(0)·V_trend(0)) / (Ṡ_trend(0) − r(0)·S_trend(0))
//! Π_trend(0)   = V_trend(0) − Δ(0)·S_trend(0)
//! ```
//!
//! With a holding cost `q` on the underlying, the differential balance
//! `dΠ = dV − Δ dS + qΔS dt = r Π dt` gives instead
//!
//! ```text
//! Δ(t) = (V̇_trend − r·Π_trend(0)·exp ∫₀ᵗ r dτ) / (Ṡ_trend − q·S_trend)
//! ```
//!
//! with the same initialization. No stochastic model of `S` is involved.

use statrs::function::erf::erf;
use thiserror::Error;

use crate::rates::{RateError, RatePath};
use crate::series::PriceSeries;
use crate::trend::TrendEstimate;

/// Relative size below which a denominator counts as zero.
pub const SINGULAR_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum HedgeError {
    #[error("empty trend estimate")]
    Empty,
    #[error("length mismatch: {left_name} has {left} samples, {right_name} has {right}")]
    LengthMismatch {
        left_name: &'static str,
        left: usize,
        right_name: &'static str,
        right: usize,
    },
    #[error(
        "singular initialization: underlying trend grows at the risk-free rate at t=0 \
         (denominator {denominator:e}, tolerance {tolerance:e})"
    )]
    SingularInitialization { denominator: f64, tolerance: f64 },
    #[error("degenerate underlying: trend {value} at sample {index} is below {tolerance:e}")]
    DegenerateUnderlying {
        index: usize,
        value: f64,
        tolerance: f64,
    },
    #[error(
        "singular carry denominator {denominator:e} at sample {index} (tolerance {tolerance:e})"
    )]
    SingularCarryDenominator {
        index: usize,
        denominator: f64,
        tolerance: f64,
    },
    #[error("{name} must be positive, got {value}")]
    NonPositiveInput { name: &'static str, value: f64 },
    #[error("non-finite {name}: {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error(transparent)]
    Rate(#[from] RateError),
}

/// `Δ(0)` and `Π_trend(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HedgeInit {
    pub delta0: f64,
    pub pi0: f64,
}

impl HedgeInit {
    /// Pairs a chosen `delta0` with the portfolio value it implies.
    pub fn from_delta0(delta0: f64, v_trend0: f64, s_trend0: f64) -> Self {
        Self {
            delta0,
            pi0: v_trend0 - delta0 * s_trend0,
        }
    }
}

/// Per-sample hedge ratio and the riskless reference trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgePath {
    delta: Vec<f64>,
    target: Vec<f64>,
    init: HedgeInit,
}

impl HedgePath {
    pub fn new(delta: Vec<f64>, target: Vec<f64>, init: HedgeInit) -> Result<Self, HedgeError> {
        check_len("delta", delta.len(), "target", target.len())?;
        Ok(Self {
            delta,
            target,
            init,
        })
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// `Π_trend(0)·exp ∫₀ᵗ r dτ` at each sample.
    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn init(&self) -> HedgeInit {
        self.init
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    /// Same path with Δ replaced, target and initialization kept.
    pub fn with_delta(&self, delta: Vec<f64>) -> Result<Self, HedgeError> {
        Self::new(delta, self.target.clone(), self.init)
    }
}

/// Annualized holding cost of the underlying.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarryParams {
    pub q: f64,
}

fn check_len(
    left_name: &'static str,
    left: usize,
    right_name: &'static str,
    right: usize,
) -> Result<(), HedgeError> {
    if left == right {
        Ok(())
    } else {
        Err(HedgeError::LengthMismatch {
            left_name,
            left,
            right_name,
            right,
        })
    }
}

fn check_inputs(v: &TrendEstimate, s: &TrendEstimate, r: &RatePath) -> Result<(), HedgeError> {
    if s.is_empty() {
        return Err(HedgeError::Empty);
    }
    check_len("option", v.len(), "underlying", s.len())?;
    check_len("rates", r.len(), "underlying", s.len())
}

pub fn init_hedge(v: &TrendEstimate, s: &TrendEstimate, r0: f64) -> Result<HedgeInit, HedgeError> {
    if v.is_empty() || s.is_empty() {
        return Err(HedgeError::Empty);
    }
    if !r0.is_finite() {
        return Err(HedgeError::NonFinite {
            name: "rate",
            value: r0,
        });
    }
    let (v0, v_dot0) = (v.trend()[0], v.deriv()[0]);
    let (s0, s_dot0) = (s.trend()[0], s.deriv()[0]);
    let numerator = v_dot0 - r0 * v0;
    let denominator = s_dot0 - r0 * s0;
    let tolerance = SINGULAR_REL_TOL * 1f64.max(s_dot0.abs()).max((r0 * s0).abs());
    if !(denominator.abs() > tolerance) {
        return Err(HedgeError::SingularInitialization {
            denominator,
            tolerance,
        });
    }
    Ok(HedgeInit::from_delta0(numerator / denominator, v0, s0))
}

fn targets(r: &RatePath, pi0: f64) -> Vec<f64> {
    r.growth_factors().into_iter().map(|g| pi0 * g).collect()
}

/// Risk-free tracking: `Δ[k] = (V_trend[k] − target[k]) / S_trend[k]`.
pub fn delta_path(
    v: &TrendEstimate,
    s: &TrendEstimate,
    r: &RatePath,
    init: HedgeInit,
) -> Result<HedgePath, HedgeError> {
    check_inputs(v, s, r)?;
    let tolerance = SINGULAR_REL_TOL * s.raw_max();
    if let Some((index, &value)) = s
        .trend()
        .iter()
        .enumerate()
        .find(|(_, &x)| !(x > tolerance))
    {
        return Err(HedgeError::DegenerateUnderlying {
            index,
            value,
            tolerance,
        });
    }
    let target = targets(r, init.pi0);
    let delta = v
        .trend()
        .iter()
        .zip(s.trend())
        .zip(&target)
        .map(|((v, s), t)| (v - t) / s)
        .collect();
    HedgePath::new(delta, target, init)
}

/// Cost-of-carry tracking:
/// `Δ[k] = (V̇_trend[k] − r[k]·target[k]) / (Ṡ_trend[k] − q·S_trend[k])`.
pub fn delta_path_carry(
    v: &TrendEstimate,
    s: &TrendEstimate,
    r: &RatePath,
    init: HedgeInit,
    carry: CarryParams,
) -> Result<HedgePath, HedgeError> {
    check_inputs(v, s, r)?;
    if !carry.q.is_finite() {
        return Err(HedgeError::NonFinite {
            name: "carry q",
            value: carry.q,
        });
    }
    let target = targets(r, init.pi0);
    let mut delta = Vec::with_capacity(target.len());
    for k in 0..target.len() {
        let s_dot = s.deriv()[k];
        let held = carry.q * s.trend()[k];
        let denominator = s_dot - held;
        let tolerance = SINGULAR_REL_TOL * 1f64.max(s_dot.abs()).max(held.abs());
        if !(denominator.abs() > tolerance) {
            return Err(HedgeError::SingularCarryDenominator {
                index: k,
                denominator,
                tolerance,
            });
        }
        delta.push((v.deriv()[k] - r.rate(k) * target[k]) / denominator);
    }
    HedgePath::new(delta, target, init)
}

/// How well the hedge tracks the cash account on raw prices.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationReport {
    /// `(V[k] − Δ[k]·S[k]) − target[k]`.
    pub errors: Vec<f64>,
    pub max_abs: f64,
    pub rms: f64,
    pub terminal: f64,
}

pub fn replication_report(
    v_raw: &PriceSeries,
    s_raw: &PriceSeries,
    path: &HedgePath,
) -> Result<ReplicationReport, HedgeError> {
    check_len("option", v_raw.len(), "underlying", s_raw.len())?;
    check_len("hedge path", path.len(), "underlying", s_raw.len())?;
    let errors: Vec<f64> = v_raw
        .values()
        .iter()
        .zip(s_raw.values())
        .zip(path.delta().iter().zip(path.target()))
        .map(|((v, s), (d, t))| (v - d * s) - t)
        .collect();
    let max_abs = errors.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let rms = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
    let terminal = *errors.last().expect("non-empty series");
    Ok(ReplicationReport {
        errors,
        max_abs,
        rms,
        terminal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptionKind {
    Call,
    Put,
}

/// Standard normal CDF, `N(x) = (1 + erf(x/√2)) / 2`.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

fn bsm_d1(spot: f64, strike: f64, vol: f64, rate: f64, tau: f64) -> Result<f64, HedgeError> {
    for (name, value) in [
        ("spot", spot),
        ("strike", strike),
        ("vol", vol),
        ("tau", tau),
    ] {
        if !(value.is_finite() && value > 0.0) {
            return Err(HedgeError::NonPositiveInput { name, value });
        }
    }
    if !rate.is_finite() {
        return Err(HedgeError::NonFinite {
            name: "rate",
            value: rate,
        });
    }
    Ok(((spot / strike).ln() + (rate + 0.5 * vol * vol) * tau) / (vol * tau.sqrt()))
}

/// Black-Scholes delta, kept as a comparison baseline.
pub fn bsm_delta(
    spot: f64,
    strike: f64,
    vol: f64,
    rate: f64,
    tau: f64,
    kind: OptionKind,
) -> Result<f64, HedgeError> {
    let d1 = bsm_d1(spot, strike, vol, rate, tau)?;
    Ok(match kind {
        OptionKind::Call => norm_cdf(d1),
        OptionKind::Put => norm_cdf(d1) - 1.0,
    })
}

/// Black-Scholes price of a European option with `tau` years left.
pub fn bsm_price(
    spot: f64,
    strike: f64,
    vol: f64,
    rate: f64,
    tau: f64,
    kind: OptionKind,
) -> Result<f64, HedgeError> {
    let d1 = bsm_d1(spot, strike, vol, rate, tau)?;
    let d2 = d1 - vol * tau.sqrt();
    let discounted = strike * (-rate * tau).exp();
    Ok(match kind {
        OptionKind::Call => spot * norm_cdf(d1) - discounted * norm_cdf(d2),
        OptionKind::Put => discounted * norm_cdf(-d2) - spot * norm_cdf(-d1),
    })
}
