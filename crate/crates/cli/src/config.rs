//! Run configuration: flags, then `key=value` config file, then defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use trendhedge::prelude::*;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Freeze,
    RateLimit,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Freeze => Policy::Freeze,
            PolicyArg::RateLimit => Policy::RateLimit,
        }
    }
}

/// Flags shared by `trend`, `hedge` and `jumps`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Config file of `key=value` lines; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Underlying price CSV.
    #[arg(long)]
    pub underlying: Option<PathBuf>,
    /// Option (derivative) price CSV.
    #[arg(long)]
    pub option: Option<PathBuf>,
    /// Constant annualized risk-free rate.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "rates")]
    pub rate: Option<f64>,
    /// CSV of annualized risk-free rates, one per sample.
    #[arg(long)]
    pub rates: Option<PathBuf>,
    /// Trend window in samples.
    #[arg(long)]
    pub window: Option<usize>,
    /// Trend polynomial degree (1 or 2).
    #[arg(long)]
    pub degree: Option<usize>,
    /// Minimum samples of the first trend fit.
    #[arg(long)]
    pub min_points: Option<usize>,
    /// Samples in the rolling residual scale.
    #[arg(long)]
    pub stat_window: Option<usize>,
    /// Jump trigger level in residual standard deviations.
    #[arg(long)]
    pub z: Option<f64>,
    /// Samples voting on the jump direction.
    #[arg(long)]
    pub direction_window: Option<usize>,
    /// Samples after an event during which no new event fires.
    #[arg(long)]
    pub refractory: Option<usize>,
    /// Hedge shaping policy around forecast jumps.
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
    /// Largest per-sample move of the rate-limited Δ.
    #[arg(long)]
    pub max_step: Option<f64>,
    /// Samples Δ stays frozen after an event.
    #[arg(long)]
    pub freeze_horizon: Option<usize>,
    /// Annualized holding cost q; switches to the cost-of-carry hedge.
    #[arg(long, allow_negative_numbers = true)]
    pub carry: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write SVG line plots.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RateSource {
    Constant(f64),
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub underlying: PathBuf,
    pub option: Option<PathBuf>,
    pub rates: RateSource,
    pub trend: TrendConfig,
    pub jump: JumpConfig,
    pub policy: PolicyConfig,
    pub carry: Option<CarryParams>,
    pub out_dir: PathBuf,
    pub svg: bool,
}

const KEYS: &[&str] = &[
    "underlying",
    "option",
    "rate",
    "rates",
    "window",
    "degree",
    "min-points",
    "stat-window",
    "z",
    "direction-window",
    "refractory",
    "policy",
    "max-step",
    "freeze-horizon",
    "carry",
    "out",
    "svg",
];

/// Parses `key=value` lines; `#` starts a comment line. Keys use the long
/// flag names, with `_` accepted for `-`. Input paths in the file are
/// relative to the file itself; `out` is relative to the working directory.
pub fn parse_config_file(text: &str, origin: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected key=value, found `{line}`",
                origin.display(),
                i + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "{}:{}: unknown key `{key}`",
                origin.display(),
                i + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

struct Layer {
    file: BTreeMap<String, String>,
    origin: PathBuf,
}

impl Layer {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.file
            .get(key)
            .map(|raw| {
                raw.parse().map_err(|_| {
                    CliError::Usage(format!(
                        "{}: invalid value `{raw}` for `{key}`",
                        self.origin.display()
                    ))
                })
            })
            .transpose()
    }

    /// A path value, taken relative to the config file's directory.
    fn path(&self, key: &str) -> Result<Option<PathBuf>, CliError> {
        let base = self.origin.parent().unwrap_or(Path::new(""));
        Ok(self.get::<PathBuf>(key)?.map(|p| base.join(p)))
    }
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let layer = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Runtime(anyhow::anyhow!("{}: {e}", path.display())))?;
                Layer {
                    file: parse_config_file(&text, path)?,
                    origin: path.clone(),
                }
            }
            None => Layer {
                file: BTreeMap::new(),
                origin: PathBuf::new(),
            },
        };

        let underlying = match &self.underlying {
            Some(p) => p.clone(),
            None => layer
                .path("underlying")?
                .ok_or_else(|| CliError::Usage("missing --underlying".to_string()))?,
        };
        let option = match &self.option {
            Some(p) => Some(p.clone()),
            None => layer.path("option")?,
        };
        let rates = match (self.rate, &self.rates) {
            (Some(r), _) => RateSource::Constant(r),
            (None, Some(p)) => RateSource::File(p.clone()),
            (None, None) => match (layer.get::<f64>("rate")?, layer.path("rates")?) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage(
                        "config sets both `rate` and `rates`".to_string(),
                    ))
                }
                (Some(r), None) => RateSource::Constant(r),
                (None, Some(p)) => RateSource::File(p),
                (None, None) => RateSource::Constant(0.0),
            },
        };
        if let RateSource::Constant(r) = rates {
            if !r.is_finite() {
                return Err(CliError::Usage(format!("rate must be finite, got {r}")));
            }
        }

        let defaults = TrendConfig::default();
        let trend = TrendConfig {
            window: pick(self.window, layer.get("window")?, defaults.window),
            degree: pick(self.degree, layer.get("degree")?, defaults.degree),
            min_points: pick(
                self.min_points,
                layer.get("min-points")?,
                defaults.min_points,
            ),
        };
        trend
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;

        let defaults = JumpConfig::default();
        let jump = JumpConfig {
            stat_window: pick(
                self.stat_window,
                layer.get("stat-window")?,
                defaults.stat_window,
            ),
            z_threshold: pick(self.z, layer.get("z")?, defaults.z_threshold),
            direction_window: pick(
                self.direction_window,
                layer.get("direction-window")?,
                defaults.direction_window,
            ),
            refractory: pick(
                self.refractory,
                layer.get("refractory")?,
                defaults.refractory,
            ),
        };
        jump.validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;

        let defaults = PolicyConfig::default();
        let file_policy = layer
            .get::<String>("policy")?
            .map(|p| {
                PolicyArg::from_str(&p, true)
                    .map_err(|_| CliError::Usage(format!("unknown policy `{p}`")))
            })
            .transpose()?;
        let policy = PolicyConfig {
            policy: self
                .policy
                .or(file_policy)
                .map(Policy::from)
                .unwrap_or(defaults.policy),
            freeze_horizon: pick(
                self.freeze_horizon,
                layer.get("freeze-horizon")?,
                defaults.freeze_horizon,
            ),
            max_step: pick(self.max_step, layer.get("max-step")?, defaults.max_step),
        };
        policy
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;

        let carry = match self.carry {
            Some(q) => Some(q),
            None => layer.get::<f64>("carry")?,
        };
        if let Some(q) = carry {
            if !q.is_finite() {
                return Err(CliError::Usage(format!("carry must be finite, got {q}")));
            }
        }

        Ok(RunConfig {
            underlying,
            option,
            rates,
            trend,
            jump,
            policy,
            carry: carry.map(|q| CarryParams { q }),
            out_dir: pick(self.out.clone(), layer.get("out")?, PathBuf::from("out")),
            svg: self.svg || layer.get::<bool>("svg")?.unwrap_or(false),
        })
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
