use super::DEFAULT_DT_YEARS;
use super::{check_step, default_start_date, GaussianStream, PriceSeries, SeriesError};

/// A multiplicative jump of `relative_size` applied at sample `index`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub index: usize,
    pub relative_size: f64,
}

/// Geometric Brownian motion with optional multiplicative jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub s0: f64,
    /// Annualized drift.
    pub drift: f64,
    /// Annualized volatility.
    pub vol: f64,
    pub jumps: Vec<Jump>,
    pub seed: u64,
    pub dt_years: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n: 252,
            s0: 100.0,
            drift: 0.0,
            vol: 0.2,
            jumps: Vec::new(),
            seed: 0,
            dt_years: DEFAULT_DT_YEARS,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SeriesError> {
        let invalid = |m: String| Err(SeriesError::InvalidSpec(m));
        if self.n < 2 {
            return invalid(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.s0.is_finite() && self.s0 > 0.0) {
            return invalid(format!("s0 must be positive, got {}", self.s0));
        }
        if !self.drift.is_finite() {
            return invalid(format!("drift must be finite, got {}", self.drift));
        }
        if !(self.vol.is_finite() && self.vol >= 0.0) {
            return invalid(format!("vol must be non-negative, got {}", self.vol));
        }
        check_step(self.dt_years).map_err(|_| {
            SeriesError::InvalidSpec(format!("dt_years must be positive, got {}", self.dt_years))
        })?;
        for jump in &self.jumps {
            if jump.index == 0 || jump.index >= self.n {
                return invalid(format!(
                    "jump index {} outside [1, {}]",
                    jump.index,
                    self.n - 1
                ));
            }
            if !(jump.relative_size.is_finite() && jump.relative_size > -1.0) {
                return invalid(format!("jump size {} must exceed -1", jump.relative_size));
            }
        }
        Ok(())
    }
}

/// Simulates the spec: `values[0] = s0`, then for each step `k ≥ 1`
/// `s ← s·exp((drift − vol²/2)·dt + vol·√dt·z_k)`, multiplied by
/// `1 + relative_size` for every jump at `k`. One normal variate is drawn per
/// step even when `vol = 0`, so the stream stays aligned across specs.
///
/// The recurrence is accumulated in log space, which keeps every sample
/// strictly positive.
pub fn generate(spec: &SynthSpec) -> Result<PriceSeries, SeriesError> {
    spec.validate()?;
    let dt = spec.dt_years;
    let mean_step = (spec.drift - 0.5 * spec.vol * spec.vol) * dt;
    let vol_step = spec.vol * dt.sqrt();
    let mut normals = GaussianStream::new(spec.seed);

    let mut log_growth = 0.0;
    let mut values = Vec::with_capacity(spec.n);
    values.push(spec.s0);
    for k in 1..spec.n {
        log_growth += mean_step + vol_step * normals.next_normal();
        for jump in spec.jumps.iter().filter(|j| j.index == k) {
            log_growth += jump.relative_size.ln_1p();
        }
        values.push(spec.s0 * log_growth.exp());
    }
    PriceSeries::new("synthetic", default_start_date(), dt, values)
}
