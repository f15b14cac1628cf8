use std::fmt;
use std::path::Path;

use shrubflow::curves::CurveError;
use shrubflow::field::FieldError;
use shrubflow::flow::FlowError;
use shrubflow::shrub::ShrubError;

/// Failures sorted by exit code: bad input is 2, numerical trouble is 3.
#[derive(Debug)]
pub enum CliError {
    Validation(anyhow::Error),
    Numeric(anyhow::Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn invalid(msg: impl fmt::Display) -> CliError {
        CliError::Validation(anyhow::anyhow!("{msg}"))
    }

    pub fn io(path: &Path, e: std::io::Error) -> CliError {
        CliError::Validation(anyhow::anyhow!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            CliError::Validation(e) | CliError::Numeric(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Exceptional(_) | FieldError::OffSphere(_) => CliError::Numeric(e.into()),
            _ => CliError::Validation(e.into()),
        }
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Field(f) => f.into(),
            FlowError::Options(_) => CliError::Validation(e.into()),
            _ => CliError::Numeric(e.into()),
        }
    }
}

impl From<ShrubError> for CliError {
    fn from(e: ShrubError) -> Self {
        CliError::Validation(e.into())
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        CliError::Validation(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(e.into())
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Pretty JSON with a trailing newline, to `out` or stdout.
pub fn emit<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
