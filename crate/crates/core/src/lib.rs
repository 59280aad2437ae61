//! Model-free delta hedging driven by trends of price time series.
//!
//! The crate replaces a stochastic pricing model with dynamic replication on
//! trends. Raw prices of the underlying `S` and of the derivative `V` are split
//! into a trend and quick fluctuations ([`trend`]); the hedge ratio is then the
//! solution of the degree-one equation that keeps the trend portfolio
//! `V_trend - Δ·S_trend` on the riskless growth path of a cash account
//! ([`rates`], [`hedge`]). Unusual fluctuations around the trend are used to
//! flag abrupt changes and to soften the hedge around them ([`jump`]).
//!
//! ```
//! use trendhedge::prelude::*;
//!
//! let s = generate(&SynthSpec { n: 120, s0: 3500.0, drift: 0.08, vol: 0.0, ..SynthSpec::default() })?;
//! let v = s.map_values(|x| 0.4 * x + 30.0)?;
//! let cfg = TrendConfig::default();
//! let (s_trend, v_trend) = (estimate_trend(&s, &cfg)?, estimate_trend(&v, &cfg)?);
//! let rates = RatePath::constant(0.0, s.len(), s.dt_years())?;
//! let init = init_hedge(&v_trend, &s_trend, rates.rate(0))?;
//! let path = delta_path(&v_trend, &s_trend, &rates, init)?;
//! assert!((path.delta()[119] - 0.4).abs() < 1e-6);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod hedge;
pub mod jump;
pub mod rates;
pub mod series;
pub mod trend;

pub mod prelude {
    pub use crate::hedge::{
        bsm_delta, bsm_price, delta_path, delta_path_carry, init_hedge, replication_report,
        CarryParams, HedgeError, HedgeInit, HedgePath, OptionKind, ReplicationReport,
    };
    pub use crate::jump::{
        forecast_jumps, shape_delta, Direction, JumpConfig, JumpError, JumpEvent, JumpForecast,
        Policy, PolicyConfig,
    };
    pub use crate::rates::{RateError, RatePath};
    pub use crate::series::{
        generate, load_csv, write_csv, Jump, PriceSeries, SeriesError, SynthSpec, DEFAULT_DT_YEARS,
    };
    pub use crate::trend::{estimate_trend, TrendConfig, TrendError, TrendEstimate};
}
