//! MiniJ lexer.
//!
//! Produces a lossless token list: every token carries the exact byte span it
//! was read from. Whitespace and comments are skipped. The `<mask>`
//! placeholder lexes as a single [`TokenKind::Mask`] token so masked
//! sequences can be re-lexed.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use super::Span;

/// Placeholder text that stands in for a masked token.
pub const MASK: &str = "<mask>";

pub const KEYWORDS: &[&str] = &[
    "class", "void", "int", "boolean", "String", "if", "else", "while", "do", "return",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Literal,
    Operator,
    Separator,
    /// The `<mask>` placeholder.
    Mask,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenKind::Keyword => "keyword",
            TokenKind::Identifier => "identifier",
            TokenKind::Literal => "literal",
            TokenKind::Operator => "operator",
            TokenKind::Separator => "separator",
            TokenKind::Mask => "mask",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, lexeme: &str) -> bool {
        self.lexeme == lexeme
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("illegal character {found:?} at byte {offset} (line {line})")]
pub struct LexError {
    pub offset: usize,
    pub line: u32,
    pub found: char,
}

/// Ordered token list produced by [`tokenize`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn lexemes(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.lexeme.as_str())
    }

    /// Lexemes joined with single spaces. Re-lexing this text yields the same
    /// kind/lexeme sequence.
    pub fn joined(&self) -> String {
        join_lexemes(self.lexemes())
    }
}

pub fn join_lexemes<'a>(lexemes: impl IntoIterator<Item = &'a str>) -> String {
    let mut out = String::new();
    for (i, l) in lexemes.into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(l);
    }
    out
}

// Longest first so that `<=` wins over `<`.
const OPERATORS: &[&str] = &[
    "++", "--", "+=", "-=", "*=", "/=", "==", "!=", "<=", ">=", "&&", "||", "+", "-", "*", "/",
    "%", "<", ">", "!", "=",
];
const SEPARATORS: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.'];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

fn is_literal_word(word: &str) -> bool {
    matches!(word, "true" | "false" | "null")
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Lex `text` into tokens.
pub fn tokenize(text: &str) -> Result<TokenStream, LexError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0usize;
    let mut line = 1u32;

    let err = |pos: usize, line: u32| LexError {
        offset: pos,
        line,
        found: text[pos..].chars().next().unwrap_or('\0'),
    };

    while pos < bytes.len() {
        let c = bytes[pos] as char;
        if c == '\n' {
            line += 1;
            pos += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let rest = &text[pos..];
        if rest.starts_with("//") {
            pos += rest.find('\n').unwrap_or(rest.len());
            continue;
        }
        if let Some(body) = rest.strip_prefix("/*") {
            let end = match body.find("*/") {
                Some(e) => e + 4,
                None => return Err(err(pos, line)),
            };
            line += rest[..end].matches('\n').count() as u32;
            pos += end;
            continue;
        }
        let start = pos;
        let kind;
        if rest.starts_with(MASK) {
            pos += MASK.len();
            kind = TokenKind::Mask;
        } else if is_ident_start(c) {
            pos += rest
                .find(|ch: char| !is_ident_continue(ch))
                .unwrap_or(rest.len());
            let word = &text[start..pos];
            kind = if is_keyword(word) {
                TokenKind::Keyword
            } else if is_literal_word(word) {
                TokenKind::Literal
            } else {
                TokenKind::Identifier
            };
        } else if c.is_ascii_digit() {
            pos += rest
                .find(|ch: char| !ch.is_ascii_digit())
                .unwrap_or(rest.len());
            if text[pos..].starts_with(|ch: char| is_ident_start(ch)) {
                return Err(err(pos, line));
            }
            kind = TokenKind::Literal;
        } else if c == '"' {
            let mut i = pos + 1;
            loop {
                match bytes.get(i) {
                    None | Some(b'\n') => return Err(err(start, line)),
                    Some(b'\\') => i += 2,
                    Some(b'"') => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            pos = i;
            kind = TokenKind::Literal;
        } else if let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) {
            pos += op.len();
            kind = TokenKind::Operator;
        } else if SEPARATORS.contains(&c) {
            pos += 1;
            kind = TokenKind::Separator;
        } else {
            return Err(err(pos, line));
        }
        tokens.push(Token {
            kind,
            lexeme: text[start..pos].to_string(),
            span: Span::new(start, pos - start, line),
        });
    }
    Ok(TokenStream { tokens })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).unwrap().tokens.iter().map(|t| t.kind).collect()
    }

    #[test]
    fn assignment_expression() {
        use TokenKind::*;
        assert_eq!(
            kinds("res = a + b"),
            vec![Identifier, Operator, Identifier, Operator, Identifier]
        );
    }

    #[test]
    fn mask_is_one_token() {
        let ts = tokenize("res = <mask> + b").unwrap();
        assert_eq!(ts.len(), 5);
        assert_eq!(ts.tokens[2].kind, TokenKind::Mask);
        assert_eq!(ts.tokens[2].lexeme, MASK);
    }

    #[test]
    fn declaration() {
        use TokenKind::*;
        assert_eq!(
            kinds("int a = 1;"),
            vec![Keyword, Identifier, Operator, Literal, Separator]
        );
    }

    #[test]
    fn longest_operator_wins() {
        let ts = tokenize("a<=b&&!c--").unwrap();
        let lex: Vec<_> = ts.lexemes().collect();
        assert_eq!(lex, vec!["a", "<=", "b", "&&", "!", "c", "--"]);
    }

    #[test]
    fn comments_and_lines() {
        let ts = tokenize("a // x\n/* y\n z */ b").unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts.tokens[1].span.line, 3);
    }

    #[test]
    fn string_literal_with_escapes() {
        let ts = tokenize(r#"s = "a \"b\" c";"#).unwrap();
        assert_eq!(ts.tokens[2].lexeme, r#""a \"b\" c""#);
        assert_eq!(ts.tokens[2].kind, TokenKind::Literal);
    }

    #[test]
    fn illegal_character() {
        let e = tokenize("a = #;").unwrap_err();
        assert_eq!(e.offset, 4);
        assert_eq!(e.found, '#');
        assert!(tokenize("\"open").is_err());
        assert!(tokenize("12abc").is_err());
    }
}
