use std::fmt;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use qbc_core::harness::{write_csv_rows, CsvRow};
use qbc_core::QbcError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Core(QbcError),
    Usage(String),
    /// A verification suite or bundled check failed.
    Verify(String),
    /// Strict mode found an estimate too far from its prediction.
    Strict(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Strict(_) => 4,
            CliError::Core(e) => match e {
                QbcError::Json(_)
                | QbcError::Io(_)
                | QbcError::Config(_)
                | QbcError::UnknownStrategy(_)
                | QbcError::Order(_) => 2,
                QbcError::Invariant { .. }
                | QbcError::Dimension(_)
                | QbcError::NotSquare { .. }
                | QbcError::Empty(_)
                | QbcError::Subsystem(_)
                | QbcError::CapExceeded { .. } => 3,
                QbcError::Numerical(_) => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(s) | CliError::Verify(s) | CliError::Strict(s) => f.write_str(s),
        }
    }
}

impl From<QbcError> for CliError {
    fn from(e: QbcError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(QbcError::Io(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(QbcError::Json(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_input(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn csv(rows: &[CsvRow]) -> CliResult<String> {
    let mut buf = Vec::new();
    write_csv_rows(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Row for an exactly computed quantity: the value goes in the prediction
/// column and the sampling columns stay empty.
pub fn exact_row(protocol: &str, params: &str, metric: &str, value: f64) -> CsvRow {
    CsvRow {
        protocol: protocol.to_string(),
        params: params.to_string(),
        metric: metric.to_string(),
        estimate: None,
        stderr: None,
        prediction: Some(value),
        z: None,
    }
}

/// Writes `text` to `out`, or to stdout when `out` is `None`.
pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
        }
    }
    Ok(())
}
