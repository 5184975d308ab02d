use std::fmt::Write as _;

use antimark_core::exclusion::{Certificate, Decision, Verdict};
use antimark_core::Error;
use serde::Serialize;

use crate::{EXIT_DATA, EXIT_USAGE};

pub const EXIT_YES: u8 = 0;
pub const EXIT_NO: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub subcommand: String,
    /// `YES`, `NO`, `UNKNOWN`, `pass`, `fail` or `ok`.
    pub status: String,
    pub exit_code: u8,
    pub result: serde_json::Value,
    pub duration_seconds: f64,
    #[serde(skip)]
    pub text: String,
}

impl Report {
    pub fn new(subcommand: &str, status: impl Into<String>, exit_code: u8, result: serde_json::Value, text: String) -> Self {
        Self {
            command: Vec::new(),
            subcommand: subcommand.into(),
            status: status.into(),
            exit_code,
            result,
            duration_seconds: 0.0,
            text,
        }
    }

    pub fn decision(subcommand: &str, d: Decision, result: serde_json::Value, text: String) -> Self {
        Self::new(subcommand, d.to_string(), decision_code(d), result, text)
    }

    pub fn pass_fail(subcommand: &str, pass: bool, result: serde_json::Value, text: String) -> Self {
        let (status, code) = if pass { ("pass", EXIT_YES) } else { ("fail", EXIT_NO) };
        Self::new(subcommand, status, code, result, text)
    }
}

pub fn decision_code(d: Decision) -> u8 {
    match d {
        Decision::Yes => EXIT_YES,
        Decision::No => EXIT_NO,
        Decision::Unknown => EXIT_UNKNOWN,
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { code: EXIT_DATA, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownEnsemble(_)
            | Error::MissingParameter { .. }
            | Error::ParameterOutOfRange { .. }
            | Error::Range(_) => Failure::usage(e.to_string()),
            _ => Failure::data(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::data(e.to_string())
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value, Failure> {
    Ok(serde_json::to_value(v)?)
}

/// Shortest round-trip form; exponent notation for very small or large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| num(x)).collect();
    format!("[{}]", parts.join(", "))
}

/// Human-readable verdict, indented by `indent` spaces.
pub fn write_verdict(out: &mut String, v: &Verdict, indent: usize) {
    let pad = " ".repeat(indent);
    let _ = writeln!(out, "{pad}decision: {}", v.decision);
    let _ = writeln!(out, "{pad}method: {}", v.method);
    let _ = writeln!(out, "{pad}margins: {}", fmt_list(&v.margins));
    if let Some(note) = &v.note {
        let _ = writeln!(out, "{pad}note: {note}");
    }
    match &v.certificate {
        None => {}
        Some(Certificate::Povm { povm }) => {
            let _ = writeln!(out, "{pad}certificate: measurement with {} outcomes", povm.len());
        }
        Some(Certificate::Weights { alpha, .. }) => {
            let _ = writeln!(out, "{pad}certificate: weights {}", fmt_list(alpha));
        }
        Some(Certificate::TripleCover { triples, .. }) => {
            let names: Vec<String> = triples.iter().map(|t| format!("{{{}}}", t.join(", "))).collect();
            let _ = writeln!(out, "{pad}certificate: triples {}", names.join(" "));
        }
        Some(Certificate::Violation { criterion, values }) => {
            let _ = writeln!(out, "{pad}certificate: violates {criterion} at {}", fmt_list(values));
        }
        Some(Certificate::LocalParts { parties }) => {
            let _ = writeln!(out, "{pad}local parts:");
            for (name, pv) in parties {
                let _ = writeln!(out, "{pad}  party {name}:");
                write_verdict(out, pv, indent + 4);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, -0.25, 1.0 / 3.0, 5.887846720064156e-17, 1e20, -1e-300] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(-5.887846720064156e-17), "-5.887846720064156e-17");
        assert_eq!(num(0.5), "0.5");
    }

    #[test]
    fn error_classes() {
        assert_eq!(Failure::from(Error::UnknownEnsemble("x".into())).code, EXIT_USAGE);
        assert_eq!(Failure::from(Error::Schema("x".into())).code, EXIT_DATA);
    }
}
