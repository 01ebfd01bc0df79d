//! Error taxonomy and process exit-code mapping.
//!
//! Errors are grouped by how the caller should react: domain/range/config
//! errors are user-input problems (exit 1), numeric errors are runtime
//! failures of the solvers (exit 2), and validation failures are reserved
//! for the built-in check suite (exit 3).

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical argument violated a precondition (e.g. ω ≤ 0, D ≤ 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// A query fell outside tabulated or banded support.
    #[error("range error: {0}")]
    Range(String),

    /// Inconsistent configuration (e.g. dipole orientation mismatch).
    #[error("config error: {0}")]
    Config(String),

    /// Config text could not be parsed; names the offending line and key.
    #[error("parse error at line {line}, key `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    /// A series or iteration failed to converge within its hard cap.
    #[error("convergence error: {context} (last relative increment {last_increment:.3e})")]
    Convergence {
        context: String,
        last_increment: f64,
    },

    /// An eigensolver or linear solve reported failure.
    #[error("numeric error: {context} (status {status}, residual {residual:.3e})")]
    Numeric {
        context: String,
        status: i32,
        residual: f64,
    },

    /// A desk-scale resource guard tripped (e.g. too many time steps).
    #[error("resource error: {0}")]
    Resource(String),

    /// Validation suite reported failing checks.
    #[error("validation failed: {0} check(s) did not pass")]
    Validation(usize),

    /// Filesystem failure while reading or writing artifacts.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Map to the documented process exit code:
    /// 1 usage/parse/domain, 2 numeric/convergence/resource/io, 3 validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Range(_) | Error::Config(_) | Error::Parse { .. } => 1,
            Error::Convergence { .. }
            | Error::Numeric { .. }
            | Error::Resource(_)
            | Error::Io { .. } => 2,
            Error::Validation(_) => 3,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_cli_contract() {
        assert_eq!(Error::Domain("x".into()).exit_code(), 1);
        assert_eq!(
            Error::Parse {
                line: 3,
                key: "tau0_fs".into(),
                message: "must be positive".into()
            }
            .exit_code(),
            1
        );
        assert_eq!(
            Error::Convergence {
                context: "series".into(),
                last_increment: 1e-3
            }
            .exit_code(),
            2
        );
        assert_eq!(Error::Validation(2).exit_code(), 3);
    }

    #[test]
    fn parse_error_names_line_and_key() {
        let e = Error::Parse {
            line: 7,
            key: "omega0_ev".into(),
            message: "not a number".into(),
        };
        let text = e.to_string();
        assert!(text.contains("line 7"));
        assert!(text.contains("omega0_ev"));
    }
}
