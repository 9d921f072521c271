use std::fmt::Display;

use qcd_core::Error;

pub const OK: u8 = 0;
pub const INVALID: u8 = 1;
pub const USAGE: u8 = 2;
pub const SIZE_CAP: u8 = 3;
pub const NOT_CONVERGED: u8 = 4;

/// JSON to print and the exit code to finish with.
pub struct Report {
    pub json: String,
    pub code: u8,
}

/// A command that stopped early. `json`, when present, still goes to
/// standard output.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    pub json: Option<String>,
}

impl Failure {
    pub fn usage(message: impl Display) -> Failure {
        Failure {
            code: USAGE,
            message: message.to_string(),
            json: None,
        }
    }
}

pub fn code_of(err: &Error) -> u8 {
    match err {
        Error::Syntax { .. } | Error::Invalid(_) | Error::NotCompletelyPositive(_) | Error::Internal(_) => INVALID,
        Error::SizeCap { .. } => SIZE_CAP,
        Error::Shape(_) | Error::Domain(_) | Error::Construction(_) | Error::Json(_) => USAGE,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        Failure {
            code: code_of(&err),
            message: err.to_string(),
            json: None,
        }
    }
}
