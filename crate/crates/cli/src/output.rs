//! CSV and gnuplot emission.

use std::fs;
use std::path::PathBuf;

use crate::error::{CliError, CliResult};

/// 17 significant digits, enough for every `f64` to round-trip.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Column-oriented table collected before writing.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }
}

/// Result of an acceptance-style check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

pub struct Output {
    dir: PathBuf,
    csv_only: bool,
}

impl Output {
    pub fn new(dir: PathBuf, csv_only: bool) -> Self {
        Self { dir, csv_only }
    }

    /// Output directory for a sub-experiment.
    pub fn nested(&self, name: &str) -> Self {
        Self::new(self.dir.join(name), self.csv_only)
    }

    fn ensure_dir(&self) -> CliResult<()> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> CliResult<PathBuf> {
        self.ensure_dir()?;
        let path = self.dir.join(name);
        let io = |e: csv::Error| match e.into_kind() {
            csv::ErrorKind::Io(e) => CliError::io(&path, e),
            other => CliError::Invalid(format!("{other:?}")),
        };
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(&table.header).map_err(io)?;
        for row in &table.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// Writes a gnuplot script unless `--csv-only` was given.
    pub fn gnuplot(&mut self, name: &str, body: &str) -> CliResult<()> {
        if self.csv_only {
            return Ok(());
        }
        self.ensure_dir()?;
        let path = self.dir.join(name);
        let script = format!("set datafile separator comma\nset key autotitle columnhead\n{body}");
        fs::write(&path, script).map_err(|e| CliError::io(&path, e))?;
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> CliResult<()> {
        self.ensure_dir()?;
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        Ok(())
    }
}

/// Log-scale error plot against `sqrt(n)` for several CSVs (columns n, sqrt_n, error).
pub fn sqrt_n_plot(title: &str, files: &[(&str, &str)]) -> String {
    let series: Vec<String> = files.iter().map(|(f, label)| format!("'{f}' using 2:3 with linespoints title '{label}'")).collect();
    format!(
        "set title '{title}'\nset xlabel 'sqrt(n)'\nset ylabel 'error'\nset logscale y\nset format y '10^{{%L}}'\nplot {}\n",
        series.join(", \\\n     ")
    )
}
