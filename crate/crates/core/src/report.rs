//! Diagnostics shared by the ontology checker and instance validation, plus
//! the report wrapper they are serialized through.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::axiom::Witness;
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A single finding. Field order is alphabetical so the JSON form has a
/// stable key order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Diagnostic {
    pub code: String,
    pub message: String,
    pub severity: Severity,
    pub subjects: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip)]
    pub span: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn error(code: impl Into<String>, subjects: Vec<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            code: code.into(),
            message: message.into(),
            severity: Severity::Error,
            subjects,
            witness: None,
            span: None,
        }
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_span(mut self, span: Option<SourceSpan>) -> Self {
        self.span = span;
        self
    }

    fn sort_key(&self) -> (&str, &[String], &str) {
        (&self.code, &self.subjects, &self.message)
    }
}

/// Sorts by code, then subjects, then message.
pub fn sort_canonical(diagnostics: &mut [Diagnostic]) {
    diagnostics.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// A list of diagnostics; passes iff there are no errors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub diagnostics: Vec<Diagnostic>,
}

impl Report {
    pub fn new(mut diagnostics: Vec<Diagnostic>) -> Self {
        sort_canonical(&mut diagnostics);
        Report { diagnostics }
    }

    pub fn status(&self) -> Status {
        if self.diagnostics.iter().any(|d| d.severity == Severity::Error) {
            Status::Fail
        } else {
            Status::Pass
        }
    }

    pub fn is_pass(&self) -> bool {
        self.status() == Status::Pass
    }

    pub fn codes(&self) -> Vec<&str> {
        self.diagnostics.iter().map(|d| d.code.as_str()).collect()
    }
}

impl Serialize for Report {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Report", 2)?;
        s.serialize_field("diagnostics", &self.diagnostics)?;
        s.serialize_field("status", &self.status())?;
        s.end()
    }
}
