//! Text formats: ontologies (`.onto`), instance models (`.inst`) and
//! refinement maps (`.refmap`).
//!
//! All three share one lexer. Names that may contain spaces (terms,
//! relationships) are double-quoted; identifiers (ontology names, node ids,
//! axiom ids, variables) are bare. `#` starts a comment that runs to the end
//! of the line. Each declaration starts on a new line and may continue over
//! several.
//!
//! Parsing never panics. A result either carries the parsed value plus any
//! warnings, or a [`ParseFailure`] holding every diagnostic found. Each
//! diagnostic has a [`SourceSpan`] inside the input.
//!
//! The `write_*` functions produce the canonical text form; parsing it back
//! yields a structurally equal value.

mod inst;
mod lexer;
mod onto;
mod refmap;
mod render;
mod write;

use std::fmt;

use serde::Serialize;

use crate::report::Severity;
use crate::span::SourceSpan;

use lexer::{Tok, Token};

pub use crate::model::parse_multiplicity;
pub use inst::parse_instance_model;
pub use onto::{parse_ontologies, parse_ontology};
pub use refmap::parse_refinement_map;
pub use render::{serialize_report, Format, Renderable};
pub use write::{write_instance_model, write_ontologies, write_ontology, write_refinement_map};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseDiagnostic {
    pub(crate) fn error(code: &'static str, message: impl Into<String>, span: SourceSpan) -> Self {
        ParseDiagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
        }
    }

    pub(crate) fn warning(code: &'static str, message: impl Into<String>, span: SourceSpan) -> Self {
        ParseDiagnostic {
            severity: Severity::Warning,
            ..ParseDiagnostic::error(code, message, span)
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {level}[{}]: {}", self.span, self.code, self.message)
    }
}

/// A successfully parsed value with the warnings raised along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<ParseDiagnostic>,
}

/// Input that could not be turned into a value. Holds errors and warnings
/// in source order; at least one is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseFailure {
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl ParseFailure {
    pub fn errors(&self) -> impl Iterator<Item = &ParseDiagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    pub fn codes(&self) -> Vec<&'static str> {
        self.errors().map(|d| d.code).collect()
    }

    /// Sets the file name on every span.
    pub fn in_file(mut self, file: &str) -> Self {
        for d in &mut self.diagnostics {
            d.span.file = Some(file.to_string());
        }
        self
    }
}

impl fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseFailure {}

pub(crate) fn finish<T>(value: T, mut diagnostics: Vec<ParseDiagnostic>) -> Result<Parsed<T>, ParseFailure> {
    diagnostics.sort_by_key(|d| d.span.offset);
    if diagnostics.iter().any(ParseDiagnostic::is_error) {
        Err(ParseFailure { diagnostics })
    } else {
        Ok(Parsed {
            value,
            warnings: diagnostics,
        })
    }
}

/// Marker for "a diagnostic was recorded; resynchronize".
pub(crate) struct Stop;

pub(crate) type PResult<T> = Result<T, Stop>;

/// Token stream with error recording.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    pub diags: Vec<ParseDiagnostic>,
}

impl Cursor {
    pub fn new(text: &str) -> Self {
        let (toks, diags) = lexer::tokenize(text);
        Cursor { toks, pos: 0, diags }
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn peek_tok(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        let hit = self.at_keyword(kw);
        if hit {
            self.bump();
        }
        hit
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        let hit = &self.peek().tok == tok;
        if hit {
            self.bump();
        }
        hit
    }

    pub fn error(&mut self, code: &'static str, message: impl Into<String>, span: SourceSpan) {
        self.diags.push(ParseDiagnostic::error(code, message, span));
    }

    pub fn warn(&mut self, code: &'static str, message: impl Into<String>, span: SourceSpan) {
        self.diags.push(ParseDiagnostic::warning(code, message, span));
    }

    /// Records "expected `what`" at the current token.
    pub fn fail<T>(&mut self, what: &str) -> PResult<T> {
        let t = self.peek().clone();
        self.error(
            "SYNTAX_ERROR",
            format!("expected {what}, found {}", t.tok.describe()),
            t.span,
        );
        Err(Stop)
    }

    pub fn expect_keyword(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.at_keyword(kw) {
            Ok(self.bump().span)
        } else {
            self.fail(&format!("`{kw}`"))
        }
    }

    pub fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if self.peek().tok == tok {
            Ok(self.bump().span)
        } else {
            let what = tok.describe();
            self.fail(&what)
        }
    }

    pub fn expect_str(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            _ => self.fail(what),
        }
    }

    pub fn expect_ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            _ => self.fail(what),
        }
    }

    /// The next token must begin a new line (or be the end of input).
    pub fn end_decl(&mut self) -> PResult<()> {
        if self.peek().line_start {
            Ok(())
        } else {
            self.fail("end of declaration")
        }
    }

    /// Skips at least one token, then up to the next line-initial token
    /// accepted by `is_start`.
    pub fn recover(&mut self, is_start: impl Fn(&Tok, &Tok) -> bool) {
        self.bump();
        while !self.at_eof() {
            let t = self.peek();
            if t.line_start && is_start(&t.tok, self.peek_tok(1)) {
                break;
            }
            self.bump();
        }
    }
}
