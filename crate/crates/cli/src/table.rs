//! Result tables: comma-separated, header line, LF endings, 0-based `index`
//! as the first column.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(&'static str),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

/// Writes `header` and one row per entry of `rows`, prefixed by its index.
pub fn write_table<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = Cell>,
{
    write_indexed(path, header, rows.into_iter().enumerate())
}

/// Like [`write_table`] with explicit (possibly sparse) sample indices.
pub fn write_indexed<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = (usize, R)>,
    R: IntoIterator<Item = Cell>,
{
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    let mut head = vec!["index"];
    head.extend_from_slice(header);
    out.write_record(&head)?;
    for (index, row) in rows {
        let mut record = vec![index.to_string()];
        record.extend(row.into_iter().map(|cell| match cell {
            Cell::Num(x) => x.to_string(),
            Cell::Text(s) => s.to_string(),
        }));
        if record.len() != head.len() {
            bail!(
                "{}: row {index} has {} fields, header has {}",
                path.display(),
                record.len(),
                head.len()
            );
        }
        out.write_record(&record)?;
    }
    out.into_inner()
        .map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e.error()))?
        .flush()
        .with_context(|| format!("writing {}", path.display()))
}

/// A loaded result table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn load(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .from_path(path)
            .with_context(|| format!("opening {}", path.display()))?;
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.with_context(|| format!("reading {}", path.display()))?;
            rows.push(record.iter().map(str::to_string).collect());
        }
        Ok(Self { header, rows })
    }

    /// The named column parsed as numbers.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let Some(j) = self.header.iter().position(|h| h == name) else {
            bail!("no column `{name}` in [{}]", self.header.join(","));
        };
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row[j]
                    .parse()
                    .with_context(|| format!("row {i}, column `{name}`: `{}`", row[j]))
            })
            .collect()
    }
}
