//! The `date,value` CSV format shared by price and rate files.
//!
//! ```text
//! # label=CAC 40
//! # dt_years=0.003968253968253968
//! date,value
//! 2009-01-02,3500
//! 2009-01-05,3520.5
//! ```
//!
//! Comment lines are only recognised before the header. Values are written
//! with Rust's shortest round-trip float formatting, so a reload reproduces
//! every sample bit for bit.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::NaiveDate;

use super::{check_step, default_start_date, PriceSeries, SeriesError, DEFAULT_DT_YEARS};

pub const HEADER: &str = "date,value";

/// Rows of a `date,value` file with its optional metadata, before any
/// domain validation of the values themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct DatedValues {
    pub label: Option<String>,
    pub dt_years: Option<f64>,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
    /// 1-based line number of each row, for error reporting.
    pub lines: Vec<usize>,
}

/// Parses the file layout: comments, exact header, dated rows with strictly
/// increasing dates and finite values.
pub fn read_dated_values<R: BufRead>(reader: R) -> Result<DatedValues, SeriesError> {
    let mut out = DatedValues {
        label: None,
        dt_years: None,
        dates: Vec::new(),
        values: Vec::new(),
        lines: Vec::new(),
    };
    let mut seen_header = false;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| SeriesError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if !seen_header {
            if let Some(comment) = line.strip_prefix('#') {
                parse_comment(comment, line_no, &mut out)?;
                continue;
            }
            if line != HEADER {
                return Err(SeriesError::Parse {
                    line: line_no,
                    message: format!("expected header `{HEADER}`, found `{line}`"),
                });
            }
            seen_header = true;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let (date, value) = parse_row(line, line_no)?;
        if let Some(&previous) = out.dates.last() {
            if date <= previous {
                return Err(SeriesError::NonMonotonicDate {
                    line: line_no,
                    date,
                    previous,
                });
            }
        }
        out.dates.push(date);
        out.values.push(value);
        out.lines.push(line_no);
    }
    if !seen_header {
        return Err(SeriesError::Parse {
            line: 1,
            message: format!("missing header `{HEADER}`"),
        });
    }
    if out.values.is_empty() {
        return Err(SeriesError::Empty);
    }
    Ok(out)
}

fn parse_comment(comment: &str, line: usize, out: &mut DatedValues) -> Result<(), SeriesError> {
    let Some((key, value)) = comment.trim().split_once('=') else {
        return Ok(());
    };
    match key.trim() {
        "label" => out.label = Some(value.trim().to_string()),
        "dt_years" => {
            let dt: f64 = value.trim().parse().map_err(|_| SeriesError::Parse {
                line,
                message: format!("invalid dt_years `{}`", value.trim()),
            })?;
            check_step(dt).map_err(|_| SeriesError::Parse {
                line,
                message: format!("dt_years must be positive, got {dt}"),
            })?;
            out.dt_years = Some(dt);
        }
        _ => {}
    }
    Ok(())
}

fn parse_row(line: &str, line_no: usize) -> Result<(NaiveDate, f64), SeriesError> {
    let malformed = |message: String| SeriesError::Parse {
        line: line_no,
        message,
    };
    let (date, value) = line
        .split_once(',')
        .ok_or_else(|| malformed(format!("expected `date,value`, found `{line}`")))?;
    let date = NaiveDate::parse_from_str(date, "%Y-%m-%d")
        .map_err(|_| malformed(format!("invalid date `{date}`")))?;
    let value: f64 = value
        .parse()
        .map_err(|_| malformed(format!("invalid value `{value}`")))?;
    if !value.is_finite() {
        return Err(malformed(format!("non-finite value `{value}`")));
    }
    Ok((date, value))
}

/// Reads a price series. `dt_years` comes from the `# dt_years=` comment when
/// present, otherwise one trading day.
pub fn read_csv<R: BufRead>(reader: R) -> Result<PriceSeries, SeriesError> {
    let rows = read_dated_values(reader)?;
    if let Some((&value, &line)) = rows
        .values
        .iter()
        .zip(&rows.lines)
        .find(|(v, _)| **v <= 0.0)
    {
        return Err(SeriesError::NonPositiveRow { line, value });
    }
    PriceSeries::new(
        rows.label.unwrap_or_else(|| "series".to_string()),
        rows.dates
            .first()
            .copied()
            .unwrap_or_else(default_start_date),
        rows.dt_years.unwrap_or(DEFAULT_DT_YEARS),
        rows.values,
    )
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<PriceSeries, SeriesError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| SeriesError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(BufReader::new(file))
}

/// Writes the series in the canonical layout (LF endings).
pub fn write_series<W: Write>(series: &PriceSeries, mut out: W) -> io::Result<()> {
    let label = series.label().replace(['\n', '\r'], " ");
    writeln!(out, "# label={label}")?;
    writeln!(out, "# dt_years={}", series.dt_years())?;
    writeln!(out, "{HEADER}")?;
    for (date, value) in series.dates().zip(series.values()) {
        writeln!(out, "{},{}", date.format("%Y-%m-%d"), value)?;
    }
    out.flush()
}

pub fn write_csv(series: &PriceSeries, path: impl AsRef<Path>) -> Result<(), SeriesError> {
    let path = path.as_ref();
    let io_err = |source| SeriesError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_series(series, BufWriter::new(file)).map_err(io_err)
}
