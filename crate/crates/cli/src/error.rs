//! Error classes mapped onto process exit codes:
//! 2 usage/config, 3 data, 4 numerical divergence.

use std::fmt;

use fsojitter::dynamics::DynamicsError;
use fsojitter::forcing::ForcingError;
use fsojitter::linkbudget::LinkBudgetError;
use fsojitter::pointing::PointingError;
use fsojitter::tracker::TrackerError;

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or invalid configuration; lists every offending field.
    Usage(Vec<String>),
    /// Unreadable or malformed input data.
    Data(String),
    /// The simulation left the linear model's validity region.
    Divergence(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(vec![msg.into()])
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Divergence(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(problems) => {
                writeln!(f, "configuration error:")?;
                for p in problems {
                    writeln!(f, "  - {p}")?;
                }
                Ok(())
            }
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Divergence(msg) => write!(f, "numerical divergence: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Diverged { .. } | DynamicsError::NonFiniteForcing { .. } => {
                CliError::Divergence(e.to_string())
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<ForcingError> for CliError {
    fn from(e: ForcingError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<PointingError> for CliError {
    fn from(e: PointingError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<LinkBudgetError> for CliError {
    fn from(e: LinkBudgetError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<TrackerError> for CliError {
    fn from(e: TrackerError) -> Self {
        CliError::Data(e.to_string())
    }
}
