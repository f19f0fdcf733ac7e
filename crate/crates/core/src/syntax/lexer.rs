use crate::span::SourceSpan;

use super::ParseDiagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    /// Raw text between `[` and `]`.
    Mult(String),
    Colon,
    Comma,
    Dot,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Arrow,
    Amp,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Mult(s) => format!("multiplicity [{s}]"),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
    /// First token on its line.
    pub line_start: bool,
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Lexer<'t> {
    text: &'t str,
    chars: std::iter::Peekable<std::str::CharIndices<'t>>,
    line: usize,
    column: usize,
    line_start: bool,
    tokens: Vec<Token>,
    diagnostics: Vec<ParseDiagnostic>,
}

impl<'t> Lexer<'t> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.text.len(), |&(i, _)| i)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
            self.line_start = true;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn push(&mut self, tok: Tok, start: (usize, usize, usize)) {
        let (line, column, offset) = start;
        let end = self.offset();
        self.tokens.push(Token {
            tok,
            span: SourceSpan::new(line, column, offset, end - offset),
            line_start: std::mem::take(&mut self.line_start),
        });
    }

    fn error(&mut self, start: (usize, usize, usize), message: String) {
        let (line, column, offset) = start;
        let end = self.offset();
        self.diagnostics.push(ParseDiagnostic::error(
            "LEXICAL_ERROR",
            message,
            SourceSpan::new(line, column, offset, end - offset),
        ));
    }

    fn string(&mut self, start: (usize, usize, usize)) {
        self.bump();
        let mut value = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => {
                    self.error(start, "unterminated string".into());
                    return;
                }
                Some('"') => {
                    self.bump();
                    break;
                }
                Some('\\') => {
                    let esc_start = (self.line, self.column, self.offset());
                    self.bump();
                    match self.peek() {
                        Some('"') => value.push('"'),
                        Some('\\') => value.push('\\'),
                        Some('n') => value.push('\n'),
                        Some('t') => value.push('\t'),
                        Some('r') => value.push('\r'),
                        Some(c) if c != '\n' => {
                            self.bump();
                            self.error(esc_start, format!("unknown escape `\\{c}`"));
                            continue;
                        }
                        _ => {
                            self.error(esc_start, "unterminated string".into());
                            return;
                        }
                    }
                    self.bump();
                }
                Some(c) => {
                    value.push(c);
                    self.bump();
                }
            }
        }
        self.push(Tok::Str(value), start);
    }

    fn mult(&mut self, start: (usize, usize, usize)) {
        self.bump();
        let mut raw = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => {
                    self.error(start, "unterminated `[`".into());
                    return;
                }
                Some(']') => {
                    self.bump();
                    break;
                }
                Some(c) => {
                    raw.push(c);
                    self.bump();
                }
            }
        }
        self.push(Tok::Mult(raw.trim().to_string()), start);
    }

    fn run(mut self) -> (Vec<Token>, Vec<ParseDiagnostic>) {
        while let Some(c) = self.peek() {
            let start = (self.line, self.column, self.offset());
            match c {
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                c if c.is_whitespace() => {
                    self.bump();
                }
                '"' => self.string(start),
                '[' => self.mult(start),
                '-' => {
                    self.bump();
                    if self.peek() == Some('>') {
                        self.bump();
                        self.push(Tok::Arrow, start);
                    } else {
                        self.error(start, "expected `->`".into());
                    }
                }
                c if is_ident_char(c) => {
                    let mut s = String::new();
                    while let Some(c) = self.peek().filter(|&c| is_ident_char(c)) {
                        s.push(c);
                        self.bump();
                    }
                    self.push(Tok::Ident(s), start);
                }
                _ => {
                    self.bump();
                    let tok = match c {
                        ':' => Tok::Colon,
                        ',' => Tok::Comma,
                        '.' => Tok::Dot,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '&' => Tok::Amp,
                        other => {
                            self.error(start, format!("unexpected character {other:?}"));
                            continue;
                        }
                    };
                    self.push(tok, start);
                }
            }
        }
        let start = (self.line, self.column, self.text.len());
        self.line_start = true;
        self.push(Tok::Eof, start);
        (self.tokens, self.diagnostics)
    }
}

/// Splits `text` into tokens. The last token is always [`Tok::Eof`].
pub(crate) fn tokenize(text: &str) -> (Vec<Token>, Vec<ParseDiagnostic>) {
    Lexer {
        text,
        chars: text.char_indices().peekable(),
        line: 1,
        column: 1,
        line_start: true,
        tokens: Vec::new(),
        diagnostics: Vec::new(),
    }
    .run()
}
