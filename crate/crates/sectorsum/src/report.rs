//! Result rows and CSV output with a `#` provenance header line.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    PaperTable,
    Trivial,
    DerivedOracle,
}

/// How `value` is compared against `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    /// `value <= tolerance`; scaled by `--tol-scale`.
    AtMost(f64),
    /// `value >= tolerance`; not scaled.
    AtLeast(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub suite: String,
    pub case: String,
    pub metric: String,
    pub value_re: f64,
    pub value_im: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub provenance: Provenance,
}

/// Collects rows for one suite, applying tolerance scale and overrides.
pub struct RowSink<'a> {
    pub suite: &'static str,
    pub tol_scale: f64,
    pub overrides: &'a std::collections::BTreeMap<String, f64>,
    pub rows: Vec<ResultRow>,
}

impl<'a> RowSink<'a> {
    pub fn new(suite: &'static str, tol_scale: f64, overrides: &'a std::collections::BTreeMap<String, f64>) -> Self {
        Self { suite, tol_scale, overrides, rows: Vec::new() }
    }

    pub fn push(&mut self, case: impl Into<String>, metric: &str, value: f64, check: Check, provenance: Provenance) {
        self.push_complex(case, metric, (value, 0.0), check, provenance);
    }

    pub fn push_complex(
        &mut self,
        case: impl Into<String>,
        metric: &str,
        value: (f64, f64),
        check: Check,
        provenance: Provenance,
    ) {
        let key = format!("{}.{metric}", self.suite);
        let (tolerance, pass) = match check {
            Check::AtMost(t) => {
                let t = self.overrides.get(&key).copied().unwrap_or(t * self.tol_scale);
                (t, value.0 <= t)
            }
            Check::AtLeast(t) => {
                let t = self.overrides.get(&key).copied().unwrap_or(t);
                (t, value.0 >= t)
            }
        };
        self.rows.push(ResultRow {
            suite: self.suite.to_string(),
            case: case.into(),
            metric: metric.to_string(),
            value_re: value.0,
            value_im: value.1,
            tolerance,
            pass,
            provenance,
        });
    }

    /// Evaluates `value`, recording an error row when it fails.
    pub fn record<E: std::fmt::Display>(
        &mut self,
        case: impl Into<String>,
        metric: &str,
        check: Check,
        provenance: Provenance,
        value: impl FnOnce() -> Result<f64, E>,
    ) {
        match value() {
            Ok(v) => self.push(case, metric, v, check, provenance),
            Err(e) => self.push_error(case, metric, &e, provenance),
        }
    }

    /// An empty sink with the same settings.
    pub fn fork(&self) -> Self {
        Self::new(self.suite, self.tol_scale, self.overrides)
    }

    pub fn absorb(&mut self, other: Self) {
        self.rows.extend(other.rows);
    }

    /// A check that could not be evaluated.
    pub fn push_error(&mut self, case: impl Into<String>, metric: &str, err: &dyn std::fmt::Display, provenance: Provenance) {
        let case = format!("{} [error: {err}]", case.into());
        self.rows.push(ResultRow {
            suite: self.suite.to_string(),
            case,
            metric: metric.to_string(),
            value_re: f64::NAN,
            value_im: 0.0,
            tolerance: f64::NAN,
            pass: false,
            provenance,
        });
    }
}

pub fn header_line(seed: u64, hash: &str) -> String {
    let ts = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    format!("# sectorsum seed={seed} config_hash={hash} timestamp={ts}")
}

/// Writes the header line followed by the serialized records.
pub fn write_csv<T: Serialize>(path: &Path, header: &str, records: &[T]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    writeln!(file, "{header}").map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

/// The CSV body: every line except `#` comments.
pub fn body(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}
