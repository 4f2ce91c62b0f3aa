//! The MiniJ language: a small Java-like language with classes, typed
//! fields and methods, `if`/`while`/`do` control flow and 64-bit integer
//! arithmetic.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod validate;

pub use ast::*;
pub use lexer::{tokenize, LexError, Token, TokenKind, TokenStream, MASK};
pub use parser::{parse, ParseError};
pub use printer::render;
pub use validate::{validate, Diagnostic, DiagnosticCategory, ValidationReport};

/// Byte range into a source text plus the 1-based line it starts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub start: usize,
    pub len: usize,
    pub line: u32,
}

impl Span {
    pub const fn new(start: usize, len: usize, line: u32) -> Self {
        Span { start, len, line }
    }

    pub const fn end(&self) -> usize {
        self.start + self.len
    }

    /// Smallest span covering both `self` and `other`; the line is taken from
    /// whichever starts first.
    pub fn join(self, other: Span) -> Span {
        let (first, _) = if self.start <= other.start {
            (self, other)
        } else {
            (other, self)
        };
        let end = self.end().max(other.end());
        Span::new(first.start, end - first.start, first.line)
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end() <= self.end()
    }
}
