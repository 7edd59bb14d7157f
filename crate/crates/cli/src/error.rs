//! Application-level errors: model failures passed through from the library,
//! configuration problems, and I/O failures, each carrying enough context to
//! name the offending file or field.
//!
//! On failure the binary prints one machine-readable line to standard error
//! (see [`Error::machine_line`]) and exits nonzero, so scripted callers can
//! classify what went wrong without scraping human-oriented text.

use std::fmt;

/// Everything the command-line front end can fail with.
#[derive(Debug)]
pub enum Error {
    /// The underlying model or estimator rejected the inputs.
    Model(beamnet::Error),
    /// The experiment specification is inconsistent or incomplete.
    Config {
        /// Human-readable description naming the field and constraint.
        message: String,
    },
    /// A file could not be read or written.
    Io {
        /// What was being attempted, including the path.
        context: String,
        /// The operating-system error.
        source: std::io::Error,
    },
}

impl Error {
    /// Convenience constructor for configuration errors.
    pub fn config(message: impl Into<String>) -> Self {
        Error::Config {
            message: message.into(),
        }
    }

    /// Convenience constructor for I/O errors with context.
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Short machine-readable classification of the failure.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Model(beamnet::Error::InvalidParam { .. }) => "invalid_param",
            Error::Model(beamnet::Error::SingularInput { .. }) => "singular_input",
            Error::Model(beamnet::Error::Domain { .. }) => "domain",
            Error::Model(beamnet::Error::NonConvergent { .. }) => "non_convergent",
            Error::Config { .. } => "config",
            Error::Io { .. } => "io",
        }
    }

    /// One-line JSON rendering, `{"error": KIND, "message": TEXT}`, emitted
    /// on standard error before a nonzero exit.
    pub fn machine_line(&self) -> String {
        format!(
            "{{\"error\": \"{}\", \"message\": \"{}\"}}",
            self.kind(),
            escape_json(&self.to_string())
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Model(inner) => inner.fmt(f),
            Error::Config { message } => write!(f, "configuration error: {message}"),
            Error::Io { context, source } => write!(f, "{context}: {source}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Model(inner) => Some(inner),
            Error::Config { .. } => None,
            Error::Io { source, .. } => Some(source),
        }
    }
}

impl From<beamnet::Error> for Error {
    fn from(inner: beamnet::Error) -> Self {
        Error::Model(inner)
    }
}

/// Result alias used throughout the front end.
pub type Result<T> = std::result::Result<T, Error>;

/// Escapes a string for inclusion inside a JSON string literal.
fn escape_json(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out
}
