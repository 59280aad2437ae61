//! Trend and trend-derivative estimation.
//!
//! Each sample `k` is fitted by an unweighted least-squares polynomial over
//! the trailing window `[k − m + 1, k]`, `m = min(window, k + 1)`. Only past
//! and present samples enter, so the estimate at `k` never changes when later
//! samples arrive. While fewer than `min_points` samples exist, the fit over
//! the first `min_points` samples is evaluated at `k` instead.
//!
//! The fit is linear in the observations, so it reduces to a pair of weight
//! vectors per window shape (value and slope at the evaluation point), as in
//! a Savitzky-Golay filter. Weights come from normal equations on the abscissa
//! `t = (j − last) / (m − 1) ∈ [−1, 0]`, which keeps the Gram matrix
//! well conditioned for any window length.

use thiserror::Error;

use crate::series::PriceSeries;

#[derive(Debug, Error, PartialEq)]
pub enum TrendError {
    #[error("invalid trend config: {0}")]
    InvalidConfig(String),
    #[error("series has {len} samples, trend fit needs at least {min_points}")]
    TooShort { len: usize, min_points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrendConfig {
    pub window: usize,
    /// Polynomial degree, 1 or 2.
    pub degree: usize,
    pub min_points: usize,
}

impl Default for TrendConfig {
    fn default() -> Self {
        Self {
            window: 20,
            degree: 2,
            min_points: 5,
        }
    }
}

impl TrendConfig {
    pub fn new(window: usize, degree: usize, min_points: usize) -> Result<Self, TrendError> {
        let cfg = Self {
            window,
            degree,
            min_points,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), TrendError> {
        let invalid = |m: String| Err(TrendError::InvalidConfig(m));
        if !(1..=2).contains(&self.degree) {
            return invalid(format!("degree must be 1 or 2, got {}", self.degree));
        }
        if self.window < self.degree + 2 {
            return invalid(format!(
                "window {} must be at least degree + 2 = {}",
                self.window,
                self.degree + 2
            ));
        }
        if self.min_points < self.degree + 1 || self.min_points > self.window {
            return invalid(format!(
                "min_points {} must lie in [{}, {}]",
                self.min_points,
                self.degree + 1,
                self.window
            ));
        }
        Ok(())
    }
}

/// Trend, trend derivative (per year) and quick fluctuations of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendEstimate {
    trend: Vec<f64>,
    deriv: Vec<f64>,
    residual: Vec<f64>,
}

impl TrendEstimate {
    /// Assembles an estimate from explicit trend values and derivatives;
    /// residuals are `raw − trend`. The subtraction is exact, and so is
    /// `trend + residual == raw`, whenever the trend lies within a factor two
    /// of the raw sample; otherwise the two agree to one rounding.
    pub fn from_parts(raw: &[f64], trend: Vec<f64>, deriv: Vec<f64>) -> Self {
        assert_eq!(raw.len(), trend.len(), "trend length");
        assert_eq!(raw.len(), deriv.len(), "derivative length");
        let residual = raw.iter().zip(&trend).map(|(x, t)| x - t).collect();
        Self {
            trend,
            deriv,
            residual,
        }
    }

    pub fn trend(&self) -> &[f64] {
        &self.trend
    }

    pub fn deriv(&self) -> &[f64] {
        &self.deriv
    }

    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    pub fn len(&self) -> usize {
        self.trend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trend.is_empty()
    }

    /// Raw sample at `k`, recovered as trend plus residual.
    pub fn raw(&self, k: usize) -> f64 {
        self.trend[k] + self.residual[k]
    }

    /// Largest raw sample.
    pub fn raw_max(&self) -> f64 {
        (0..self.len())
            .map(|k| self.raw(k))
            .fold(f64::MIN, f64::max)
    }
}

pub fn estimate_trend(
    series: &PriceSeries,
    cfg: &TrendConfig,
) -> Result<TrendEstimate, TrendError> {
    estimate_trend_values(series.values(), series.dt_years(), cfg)
}

/// Same as [`estimate_trend`] on bare samples spaced `dt_years` apart.
pub fn estimate_trend_values(
    values: &[f64],
    dt_years: f64,
    cfg: &TrendConfig,
) -> Result<TrendEstimate, TrendError> {
    cfg.validate()?;
    if values.len() < cfg.min_points {
        return Err(TrendError::TooShort {
            len: values.len(),
            min_points: cfg.min_points,
        });
    }
    let n = values.len();
    let mut trend = Vec::with_capacity(n);
    let mut deriv = Vec::with_capacity(n);

    for k in 0..cfg.min_points - 1 {
        // Extrapolate the first full fit backwards.
        let w = FitWeights::new(
            cfg.min_points,
            cfg.degree,
            k as f64 - (cfg.min_points - 1) as f64,
        );
        let (v, d) = w.apply(&values[..cfg.min_points]);
        trend.push(v);
        deriv.push(d / dt_years);
    }
    let full = FitWeights::new(cfg.window, cfg.degree, 0.0);
    for k in cfg.min_points - 1..n {
        let m = cfg.window.min(k + 1);
        let samples = &values[k + 1 - m..=k];
        let (v, d) = if m == cfg.window {
            full.apply(samples)
        } else {
            FitWeights::new(m, cfg.degree, 0.0).apply(samples)
        };
        trend.push(v);
        deriv.push(d / dt_years);
    }
    Ok(TrendEstimate::from_parts(values, trend, deriv))
}

/// Weights mapping `m` equally spaced samples to the fitted value and the
/// fitted slope (per sample) at `offset` samples from the last one.
#[derive(Debug, Clone)]
struct FitWeights {
    value: Vec<f64>,
    slope: Vec<f64>,
}

impl FitWeights {
    fn new(m: usize, degree: usize, offset: f64) -> Self {
        debug_assert!(m > degree && m >= 2);
        let p = degree + 1;
        let span = (m - 1) as f64;
        let abscissa: Vec<f64> = (0..m).map(|j| (j as f64 - span) / span).collect();

        let mut gram = vec![vec![0.0; p]; p];
        for &t in &abscissa {
            let powers = monomials(t, p);
            for a in 0..p {
                for b in 0..p {
                    gram[a][b] += powers[a] * powers[b];
                }
            }
        }
        // Basis evaluated at the target point, and its derivative in samples.
        let t_eval = offset / span;
        let at = monomials(t_eval, p);
        let d_at: Vec<f64> = (0..p)
            .map(|a| {
                if a == 0 {
                    0.0
                } else {
                    a as f64 * t_eval.powi(a as i32 - 1) / span
                }
            })
            .collect();
        let value_coef = solve(gram.clone(), at);
        let slope_coef = solve(gram, d_at);

        let weigh = |coef: &[f64]| -> Vec<f64> {
            abscissa
                .iter()
                .map(|&t| monomials(t, p).iter().zip(coef).map(|(x, c)| x * c).sum())
                .collect()
        };
        Self {
            value: weigh(&value_coef),
            slope: weigh(&slope_coef),
        }
    }

    fn apply(&self, samples: &[f64]) -> (f64, f64) {
        debug_assert_eq!(samples.len(), self.value.len());
        let dot = |w: &[f64]| w.iter().zip(samples).map(|(a, b)| a * b).sum::<f64>();
        (dot(&self.value), dot(&self.slope))
    }
}

fn monomials(t: f64, count: usize) -> Vec<f64> {
    std::iter::successors(Some(1.0), |x| Some(x * t))
        .take(count)
        .collect()
}

/// Gaussian elimination with partial pivoting for the small, symmetric
/// positive-definite Gram systems above.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= factor * a[col][c];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}
