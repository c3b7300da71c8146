use std::io::Write;
use std::path::Path;

use crate::Format;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(semilayer::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl From<semilayer::Error> for CliError {
    fn from(e: semilayer::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// A rendered command result. `failures` names every failed check.
pub struct Outcome {
    pub json: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn new<T: serde::Serialize>(
        value: &T,
        headers: &[&str],
        rows: Vec<Vec<String>>,
        failures: Vec<String>,
    ) -> Self {
        let mut json = serde_json::to_string_pretty(value).expect("report types serialize");
        json.push('\n');
        Self { json, headers: headers.iter().map(|h| h.to_string()).collect(), rows, failures }
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
        w.write_record(&self.headers).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    fn table(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.headers);
        out += &(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ") + "\n");
        for r in &self.rows {
            out += &line(r);
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        Ok(match format {
            Format::Json => self.json.clone(),
            Format::Csv => self.csv()?,
            Format::Table => self.table(),
        })
    }
}

/// Writes to `path` through a temporary file in the same directory, so a
/// reader never observes a partial report.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn emit(outcome: &Outcome, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let text = outcome.render(format)?;
    match path {
        Some(p) => write_atomic(p, &text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
