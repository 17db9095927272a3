// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use jplay_core::Error;

/// Exit status classes. The numeric codes are a stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Config,
    Data,
    Numerical,
}

impl Failure {
    pub fn code(self) -> i32 {
        match self {
            Failure::Config => 2,
            Failure::Data => 3,
            Failure::Numerical => 4,
        }
    }

    pub fn prefix(self) -> &'static str {
        match self {
            Failure::Config => "CONFIG_ERROR",
            Failure::Data => "DATA_ERROR",
            Failure::Numerical => "DIVERGENCE",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Failure,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: Failure::Config,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError {
            kind: Failure::Data,
            message: message.into(),
        }
    }

    pub fn code(&self) -> i32 {
        self.kind.code()
    }
}

impl fmt::Display for CliError {
    /// Always a single line: `PREFIX: message`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = self.message.replace('\n', " ");
        write!(f, "{}: {}", self.kind.prefix(), msg.trim())
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Parameter(_) | Error::Rank { .. } => Failure::Config,
            Error::Singular(_) | Error::Divergence { .. } => Failure::Numerical,
            Error::Input(_)
            | Error::Shape(_)
            | Error::Stratification { .. }
            | Error::Parse { .. }
            | Error::Format { .. }
            | Error::Io { .. } => Failure::Data,
        };
        let mut message = e.to_string();
        if let Error::Divergence { trace, .. } = &e {
            if !trace.is_empty() {
                let t: Vec<String> = trace.iter().map(|v| format!("{v:.6e}")).collect();
                message.push_str(&format!(" (objective trace: {})", t.join(" ")));
            }
        }
        CliError { kind, message }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
