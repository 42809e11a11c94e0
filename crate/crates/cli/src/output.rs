use rainbow_core::scalar::format_fraction;
use rainbow_core::{Error, Rational};
use serde_json::{json, Value};

/// A command result in both renderings.
pub struct Output {
    pub text: String,
    pub json: Value,
}

impl Output {
    pub fn render(&self, json: bool) -> String {
        if json {
            serde_json::to_string_pretty(&self.json).expect("json values serialize")
        } else {
            self.text.trim_end().to_string()
        }
    }
}

pub fn frac(q: &Rational) -> Value {
    Value::String(format_fraction(q))
}

/// Argument problems that clap cannot see.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::NoCycle => "NoCycle",
        Error::CapExceeded { .. } => "CapExceeded",
        Error::ComplexityGuard { .. } => "ComplexityGuard",
        Error::EpsilonTooLarge { .. } => "EpsilonTooLarge",
        Error::NoPositiveK { .. } => "NoPositiveK",
        Error::NotFound => "NotFound",
        Error::GapNotPositive { .. } => "GapNotPositive",
        Error::Precondition(_) => "Precondition",
        Error::InvalidGraph(_) => "InvalidGraph",
        Error::InvalidColoring(_) => "InvalidColoring",
        Error::InvalidGraphon(_) => "InvalidGraphon",
        Error::Parse(_) => "Parse",
        Error::Io(_) => "Io",
    }
}

/// Exit code and message: 1 for domain errors, 2 for usage errors.
pub fn render_error(err: &anyhow::Error, json: bool) -> (u8, String) {
    let (code, kind) = if let Some(e) = err.downcast_ref::<Error>() {
        (1, kind(e))
    } else if err.downcast_ref::<UsageError>().is_some() {
        (2, "Usage")
    } else {
        (1, "Error")
    };
    let message = format!("{err:#}");
    let rendered = if json {
        json!({ "error": kind, "message": message }).to_string()
    } else {
        format!("error[{kind}]: {message}")
    };
    (code, rendered)
}
