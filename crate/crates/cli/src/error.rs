use std::fmt;

use serde::Serialize;

/// Exit statuses shared by every subcommand.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const DOMAIN: i32 = 3;
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, unreadable or malformed configuration, invalid values.
    Config(String),
    /// Valid input that the mathematics rejects at runtime.
    Domain(String),
    Io(String),
    Internal(String),
    /// Some verification criteria failed.
    Verification(String),
}

#[derive(Serialize)]
struct Record<'a> {
    error: &'a str,
    message: &'a str,
    exit_code: i32,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Verification(_) => exit::VERIFY_FAILED,
            _ => exit::DOMAIN,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
            CliError::Internal(_) => "internal",
            CliError::Verification(_) => "verification",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Domain(m)
            | CliError::Io(m)
            | CliError::Internal(m)
            | CliError::Verification(m) => m,
        }
    }

    /// Single-line JSON record for standard error.
    pub fn record(&self) -> String {
        let r = Record {
            error: self.kind(),
            message: self.message(),
            exit_code: self.exit_code(),
        };
        serde_json::to_string(&r).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.kind()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<mageo::Error> for CliError {
    fn from(e: mageo::Error) -> Self {
        use mageo::Error as E;
        let msg = e.to_string();
        match e {
            E::Poly(_) | E::InvalidEpsQ(_) | E::UnknownChart(_) | E::ChartVariables { .. } | E::InvalidInput(_) => {
                CliError::Config(msg)
            }
            E::UnsupportedChart { .. } | E::SingularMetric { .. } | E::NotNull(_) | E::Domain(_) | E::Degenerate(_) => {
                CliError::Domain(msg)
            }
            E::Internal(_) => CliError::Internal(msg),
        }
    }
}

impl From<mageo::poly::PolyError> for CliError {
    fn from(e: mageo::poly::PolyError) -> Self {
        CliError::Config(e.to_string())
    }
}
