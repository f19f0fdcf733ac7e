use std::fmt;

use serde::Serialize;

/// Location of a token or declaration in a source file.
///
/// `line` and `column` are 1-based, `column` counts characters. `offset` and
/// `length` are byte positions into the text the span was produced from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SourceSpan {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, offset: usize, length: usize) -> Self {
        SourceSpan {
            file: None,
            line,
            column,
            offset,
            length,
        }
    }

    /// Zero-length span at the very start of the input.
    pub fn start() -> Self {
        SourceSpan::new(1, 1, 0, 0)
    }

    pub fn with_file(mut self, file: impl Into<String>) -> Self {
        self.file = Some(file.into());
        self
    }

    /// Span from the start of `self` to the end of `other`.
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        let end = (other.offset + other.length).max(self.offset + self.length);
        SourceSpan {
            file: self.file.clone(),
            line: self.line,
            column: self.column,
            offset: self.offset,
            length: end - self.offset,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{}:{}:{}", file, self.line, self.column),
            None => write!(f, "{}:{}", self.line, self.column),
        }
    }
}
