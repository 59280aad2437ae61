use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, ValueEnum};
use trendhedge::prelude::*;

use crate::config::{RateSource, RunConfig};
use crate::plot::Chart;
use crate::table::{write_indexed, write_table, Cell};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Call,
    Put,
}

impl From<KindArg> for OptionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Call => OptionKind::Call,
            KindArg::Put => OptionKind::Put,
        }
    }
}

fn parse_jump(text: &str) -> Result<Jump, String> {
    let (index, size) = text
        .split_once(':')
        .ok_or_else(|| format!("expected INDEX:SIZE, got `{text}`"))?;
    Ok(Jump {
        index: index
            .trim()
            .parse()
            .map_err(|e| format!("jump index `{index}`: {e}"))?,
        relative_size: size
            .trim()
            .parse()
            .map_err(|e| format!("jump size `{size}`: {e}"))?,
    })
}

fn parse_date(text: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(text, "%Y-%m-%d").map_err(|e| format!("`{text}`: {e}"))
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Number of samples.
    #[arg(long, default_value_t = 252)]
    pub n: usize,
    /// Initial price.
    #[arg(long, default_value_t = 100.0)]
    pub s0: f64,
    /// Annualized drift.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub drift: f64,
    /// Annualized volatility.
    #[arg(long, default_value_t = 0.2)]
    pub vol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Multiplicative jump `INDEX:SIZE`, e.g. `120:0.1` for +10% at sample 120.
    #[arg(long = "jump", value_name = "INDEX:SIZE", value_parser = parse_jump, allow_negative_numbers = true)]
    pub jumps: Vec<Jump>,
    #[arg(long)]
    pub label: Option<String>,
    /// Date of the first sample (YYYY-MM-DD).
    #[arg(long, value_parser = parse_date)]
    pub start: Option<NaiveDate>,
    /// Sampling step in years.
    #[arg(long, default_value_t = DEFAULT_DT_YEARS)]
    pub dt_years: f64,
    /// Output CSV of the underlying.
    #[arg(long, default_value = "series.csv")]
    pub out: PathBuf,
    /// Also write a Black-Scholes priced option on the generated path.
    #[arg(long)]
    pub option_out: Option<PathBuf>,
    /// Option strike; defaults to `s0`.
    #[arg(long, requires = "option_out")]
    pub strike: Option<f64>,
    /// Pricing volatility; defaults to `--vol`.
    #[arg(long, requires = "option_out")]
    pub option_vol: Option<f64>,
    /// Years from the first sample to expiry; defaults to the series span plus a quarter.
    #[arg(long, requires = "option_out")]
    pub maturity: Option<f64>,
    #[arg(long, value_enum, default_value_t = KindArg::Call)]
    pub kind: KindArg,
    /// Pricing rate.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rate: f64,
}

pub fn generate(args: &GenerateArgs) -> Result<(), CliError> {
    let spec = SynthSpec {
        n: args.n,
        s0: args.s0,
        drift: args.drift,
        vol: args.vol,
        jumps: args.jumps.clone(),
        seed: args.seed,
        dt_years: args.dt_years,
    };
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if !args.drift.is_finite() {
        return Err(CliError::Usage(format!(
            "drift must be finite, got {}",
            args.drift
        )));
    }
    let mut series = generate_series(&spec)?;
    if let Some(label) = &args.label {
        series = series.with_label(label.clone());
    }
    if let Some(start) = args.start {
        series = series.with_t0(start);
    }

    let option = match &args.option_out {
        Some(path) => Some((path, price_option(&series, args)?)),
        None => None,
    };

    write_csv(&series, &args.out).map_err(anyhow::Error::from)?;
    println!("{}", args.out.display());
    if let Some((path, option)) = option {
        write_csv(&option, path).map_err(anyhow::Error::from)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn generate_series(spec: &SynthSpec) -> Result<PriceSeries, CliError> {
    trendhedge::series::generate(spec).map_err(|e| CliError::Runtime(e.into()))
}

fn price_option(series: &PriceSeries, args: &GenerateArgs) -> Result<PriceSeries, CliError> {
    let dt = series.dt_years();
    let span = dt * (series.len() - 1) as f64;
    let strike = args.strike.unwrap_or(args.s0);
    let vol = args.option_vol.unwrap_or(args.vol);
    let maturity = args.maturity.unwrap_or(span + 0.25);
    if !(maturity > span) {
        return Err(CliError::Usage(format!(
            "maturity {maturity} must exceed the series span {span} years"
        )));
    }
    if !args.rate.is_finite() {
        return Err(CliError::Usage(format!(
            "rate must be finite, got {}",
            args.rate
        )));
    }
    let kind = OptionKind::from(args.kind);
    let mut prices = Vec::with_capacity(series.len());
    for (k, &spot) in series.values().iter().enumerate() {
        let tau = maturity - dt * k as f64;
        let price = bsm_price(spot, strike, vol, args.rate, tau, kind)
            .map_err(|e| CliError::Usage(format!("option pricing: {e}")))?;
        prices.push(price);
    }
    let label = format!("{}_option", series.label());
    PriceSeries::new(label, series.t0(), dt, prices)
        .context("option price collapsed to zero; choose a nearer strike or longer maturity")
        .map_err(CliError::Runtime)
}

struct Inputs {
    underlying: PriceSeries,
    option: Option<PriceSeries>,
}

fn load_inputs(run: &RunConfig, need_option: bool) -> Result<Inputs> {
    let underlying = load_csv(&run.underlying)?;
    let option = match &run.option {
        Some(path) => Some(load_csv(path)?),
        None if need_option => bail!("missing --option"),
        None => None,
    };
    if let Some(v) = &option {
        if v.len() != underlying.len() {
            return Err(HedgeError::LengthMismatch {
                left_name: "option",
                left: v.len(),
                right_name: "underlying",
                right: underlying.len(),
            }
            .into());
        }
    }
    Ok(Inputs { underlying, option })
}

fn load_rates(run: &RunConfig, s: &PriceSeries) -> Result<RatePath> {
    let rates = match &run.rates {
        RateSource::Constant(r) => RatePath::constant(*r, s.len(), s.dt_years())?,
        RateSource::File(path) => RatePath::load_csv(path)?,
    };
    if rates.len() != s.len() {
        return Err(HedgeError::LengthMismatch {
            left_name: "rates",
            left: rates.len(),
            right_name: "underlying",
            right: s.len(),
        }
        .into());
    }
    if (rates.dt_years() - s.dt_years()).abs() > 1e-12 * s.dt_years() {
        bail!(
            "rates dt_years {} differs from underlying dt_years {}",
            rates.dt_years(),
            s.dt_years()
        );
    }
    Ok(rates)
}

fn prepare_out(run: &RunConfig) -> Result<&Path> {
    std::fs::create_dir_all(&run.out_dir)
        .with_context(|| format!("creating {}", run.out_dir.display()))?;
    Ok(&run.out_dir)
}

fn emit(path: PathBuf) -> PathBuf {
    println!("{}", path.display());
    path
}

fn write_trend(
    out: &Path,
    name: &str,
    raw: &PriceSeries,
    est: &TrendEstimate,
    svg: bool,
) -> Result<()> {
    let rows = (0..est.len()).map(|k| {
        [
            raw.values()[k],
            est.trend()[k],
            est.deriv()[k],
            est.residual()[k],
        ]
        .map(Cell::from)
    });
    write_table(
        &emit(out.join(format!("trend_{name}.csv"))),
        &["raw", "trend", "deriv", "residual"],
        rows,
    )?;
    if svg {
        Chart {
            title: &format!("{name}: raw and trend"),
            series: vec![("raw", raw.values()), ("trend", est.trend())],
            markers: vec![],
        }
        .write(&emit(out.join(format!("trend_{name}.svg"))))?;
    }
    Ok(())
}

pub fn trend(run: &RunConfig) -> Result<()> {
    let inputs = load_inputs(run, false)?;
    let out = prepare_out(run)?;
    let s_est = estimate_trend(&inputs.underlying, &run.trend)?;
    write_trend(out, "underlying", &inputs.underlying, &s_est, run.svg)?;
    if let Some(v) = &inputs.option {
        let v_est = estimate_trend(v, &run.trend)?;
        write_trend(out, "option", v, &v_est, run.svg)?;
    }
    Ok(())
}

struct Hedged {
    s_est: TrendEstimate,
    v_est: TrendEstimate,
    path: HedgePath,
    report: ReplicationReport,
    rate0: f64,
}

fn compute_hedge(run: &RunConfig, s: &PriceSeries, v: &PriceSeries) -> Result<Hedged> {
    let rates = load_rates(run, s)?;
    let s_est = estimate_trend(s, &run.trend)?;
    let v_est = estimate_trend(v, &run.trend)?;
    let rate0 = rates.rate(0);
    let init = init_hedge(&v_est, &s_est, rate0)?;
    let path = match run.carry {
        Some(carry) => delta_path_carry(&v_est, &s_est, &rates, init, carry)?,
        None => delta_path(&v_est, &s_est, &rates, init)?,
    };
    let report = replication_report(v, s, &path)?;
    Ok(Hedged {
        s_est,
        v_est,
        path,
        report,
        rate0,
    })
}

fn report_text(run: &RunConfig, h: &Hedged) -> String {
    let init = h.path.init();
    let delta = h.path.delta();
    let (lo, hi) = delta
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| {
            (lo.min(d), hi.max(d))
        });
    let mut text = String::new();
    let strategy = match run.carry {
        Some(_) => "carry",
        None => "risk_free",
    };
    let _ = writeln!(text, "strategy={strategy}");
    if let Some(carry) = run.carry {
        let _ = writeln!(text, "carry_q={}", carry.q);
    }
    let _ = writeln!(text, "samples={}", delta.len());
    let _ = writeln!(text, "window={}", run.trend.window);
    let _ = writeln!(text, "degree={}", run.trend.degree);
    let _ = writeln!(text, "min_points={}", run.trend.min_points);
    let _ = writeln!(text, "rate0={}", h.rate0);
    let _ = writeln!(text, "delta0={}", init.delta0);
    let _ = writeln!(text, "pi0={}", init.pi0);
    let _ = writeln!(text, "delta_min={lo}");
    let _ = writeln!(text, "delta_max={hi}");
    let _ = writeln!(text, "delta_final={}", delta[delta.len() - 1]);
    let _ = writeln!(text, "raw_error_max_abs={}", h.report.max_abs);
    let _ = writeln!(text, "raw_error_rms={}", h.report.rms);
    let _ = writeln!(text, "raw_error_terminal={}", h.report.terminal);
    text
}

pub fn hedge(run: &RunConfig) -> Result<()> {
    let inputs = load_inputs(run, true)?;
    let (s, v) = (
        &inputs.underlying,
        inputs.option.as_ref().expect("option required"),
    );
    let h = compute_hedge(run, s, v)?;
    let out = prepare_out(run)?;
    write_trend(out, "underlying", s, &h.s_est, run.svg)?;
    write_trend(out, "option", v, &h.v_est, run.svg)?;

    let rows = (0..h.path.len())
        .map(|k| [h.path.delta()[k], h.path.target()[k], h.report.errors[k]].map(Cell::from));
    write_table(
        &emit(out.join("delta.csv")),
        &["delta", "target", "raw_error"],
        rows,
    )?;
    let report = out.join("report.txt");
    std::fs::write(&report, report_text(run, &h))
        .with_context(|| format!("writing {}", report.display()))?;
    emit(report);
    if run.svg {
        Chart {
            title: "hedge ratio",
            series: vec![("delta", h.path.delta())],
            markers: vec![],
        }
        .write(&emit(out.join("delta.svg")))?;
    }
    Ok(())
}

pub fn jumps(run: &RunConfig) -> Result<()> {
    let inputs = load_inputs(run, true)?;
    let (s, v) = (
        &inputs.underlying,
        inputs.option.as_ref().expect("option required"),
    );
    let h = compute_hedge(run, s, v)?;
    let forecast = forecast_jumps(s, &h.s_est, &run.jump)?;
    let shaped = shape_delta(&h.path, &forecast, &run.policy)?;
    let out = prepare_out(run)?;

    let rows = forecast.events.iter().map(|e| {
        (
            e.index,
            [Cell::Text(e.direction.as_str()), Cell::from(e.score)],
        )
    });
    write_indexed(&emit(out.join("jumps.csv")), &["direction", "score"], rows)?;
    let rows = (0..h.path.len()).map(|k| [h.path.delta()[k], shaped.delta()[k]].map(Cell::from));
    write_table(
        &emit(out.join("delta_shaped.csv")),
        &["risk_free", "shaped"],
        rows,
    )?;

    if run.svg {
        let markers: Vec<usize> = forecast.indices().collect();
        Chart {
            title: "underlying with forecast jumps",
            series: vec![("raw", s.values()), ("trend", h.s_est.trend())],
            markers: markers.clone(),
        }
        .write(&emit(out.join("jumps.svg")))?;
        Chart {
            title: "risk-free and shaped hedge ratio",
            series: vec![("risk_free", h.path.delta()), ("shaped", shaped.delta())],
            markers,
        }
        .write(&emit(out.join("delta_shaped.svg")))?;
    }
    Ok(())
}
