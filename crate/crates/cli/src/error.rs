use std::fmt;
use std::path::Path;

use rigidity_core::GeometryError;

/// Process exit codes. Verdict codes are 0–2; everything above is an error.
pub mod code {
    pub const OK: i32 = 0;
    pub const FAILS: i32 = 1;
    pub const INDETERMINATE: i32 = 2;
    pub const USAGE: i32 = 3;
    pub const PARSE: i32 = 4;
    pub const IO: i32 = 5;
    pub const INVALID: i32 = 6;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: code::USAGE,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: code::INVALID,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError {
            code: code::IO,
            message: format!("{}: {err}", path.display()),
        }
    }

    /// Syntax and truncation errors are parse failures; well-formed JSON
    /// that fails validation is reported as invalid data.
    pub fn json(source: &str, err: serde_json::Error) -> Self {
        let code = if err.is_syntax() || err.is_eof() {
            code::PARSE
        } else {
            code::INVALID
        };
        CliError {
            code,
            message: format!(
                "{source}: line {} column {}: {err}",
                err.line(),
                err.column()
            ),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::UnknownName(_) => CliError::usage(e.to_string()),
            other => CliError::invalid(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_errors_split_by_kind() {
        let syntax = serde_json::from_str::<serde_json::Value>("{,}").unwrap_err();
        assert_eq!(CliError::json("x", syntax).code, code::PARSE);
        let eof = serde_json::from_str::<serde_json::Value>("[1,").unwrap_err();
        assert_eq!(CliError::json("x", eof).code, code::PARSE);
        let data = serde_json::from_str::<Vec<u8>>("[\"a\"]").unwrap_err();
        let e = CliError::json("x", data);
        assert_eq!(e.code, code::INVALID);
        assert!(e.message.starts_with("x: line 1"));
    }

    #[test]
    fn geometry_errors_map_to_codes() {
        let e: CliError = GeometryError::UnknownName("helix".into()).into();
        assert_eq!(e.code, code::USAGE);
        let e: CliError = rigidity_core::models::veronese(1.0, -1.0)
            .unwrap_err()
            .into();
        assert_eq!(e.code, code::INVALID);
    }
}
