//! Recursive-descent parser for MiniJ.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize, LexError, Token, TokenKind};
use super::Span;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("syntax error at byte {offset} (line {line}): expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        offset: usize,
        line: u32,
        expected: Vec<String>,
        found: String,
    },
    #[error("integer literal {lexeme} out of range at byte {offset}")]
    IntRange { offset: usize, lexeme: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Lex(e) => e.offset,
            ParseError::Syntax { offset, .. } | ParseError::IntRange { offset, .. } => *offset,
        }
    }
}

/// Parse MiniJ source text into a [`SourceUnit`].
pub fn parse(text: &str) -> Result<SourceUnit, ParseError> {
    let tokens = tokenize(text)?.tokens;
    let mut p = Parser {
        text,
        tokens,
        pos: 0,
        next_stmt: 0,
    };
    let mut classes = Vec::new();
    loop {
        classes.push(p.class_decl()?);
        if p.at_end() {
            break;
        }
    }
    let span = classes
        .iter()
        .map(|c| c.span)
        .reduce(Span::join)
        .unwrap_or_default();
    Ok(SourceUnit {
        source: text.to_owned(),
        classes,
        span,
    })
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    next_stmt: u32,
}

type PResult<T> = Result<T, ParseError>;

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Token> {
        self.tokens.get(self.pos + ahead)
    }

    fn check(&self, lexeme: &str) -> bool {
        self.peek().is_some_and(|t| t.is(lexeme) && t.kind != TokenKind::Literal)
    }

    fn check_at(&self, ahead: usize, lexeme: &str) -> bool {
        self.peek_at(ahead)
            .is_some_and(|t| t.is(lexeme) && t.kind != TokenKind::Literal)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let (offset, line, found) = match self.peek() {
            Some(t) => (t.span.start, t.span.line, alloc::format!("{:?}", t.lexeme)),
            None => (
                self.text.len(),
                self.text.matches('\n').count() as u32 + 1,
                "end of input".to_string(),
            ),
        };
        Err(ParseError::Syntax {
            offset,
            line,
            expected: expected.iter().map(|s| (*s).to_string()).collect(),
            found,
        })
    }

    fn expect(&mut self, lexeme: &str) -> PResult<Token> {
        if self.check(lexeme) {
            Ok(self.bump())
        } else {
            self.error(&[lexeme])
        }
    }

    fn eat(&mut self, lexeme: &str) -> Option<Token> {
        if self.check(lexeme) {
            Some(self.bump())
        } else {
            None
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let t = self.bump();
                Ok(Ident {
                    name: t.lexeme,
                    span: t.span,
                })
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos - 1].span
    }

    fn class_decl(&mut self) -> PResult<ClassDecl> {
        let start = self.expect("class")?.span;
        let name = self.ident()?;
        self.expect("{")?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        while !self.check("}") {
            if self.at_end() {
                return self.error(&["}"]);
            }
            let ty = self.type_node(true)?;
            let name = self.ident()?;
            if self.check("(") {
                methods.push(self.method_rest(ty, name)?);
            } else {
                self.expect(";")?;
                if ty.ty == Type::Void {
                    return Err(ParseError::Syntax {
                        offset: ty.span.start,
                        line: ty.span.line,
                        expected: vec!["field type".to_string()],
                        found: "\"void\"".to_string(),
                    });
                }
                let span = ty.span.join(self.prev_span());
                fields.push(FieldDecl { ty, name, span });
            }
        }
        let end = self.expect("}")?.span;
        Ok(ClassDecl {
            name,
            fields,
            methods,
            span: start.join(end),
        })
    }

    fn method_rest(&mut self, ret: TypeNode, name: Ident) -> PResult<MethodDecl> {
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.check(")") {
            loop {
                let ty = self.type_node(false)?;
                let pname = self.ident()?;
                let span = ty.span.join(pname.span);
                params.push(Param {
                    ty,
                    name: pname,
                    span,
                });
                if self.eat(",").is_none() {
                    break;
                }
            }
        }
        self.expect(")")?;
        let body = self.block()?;
        let span = ret.span.join(body.span);
        Ok(MethodDecl {
            ret,
            name,
            params,
            body,
            span,
        })
    }

    fn type_node(&mut self, allow_void: bool) -> PResult<TypeNode> {
        let expected: &[&str] = if allow_void {
            &["type", "void"]
        } else {
            &["type"]
        };
        let Some(t) = self.peek() else {
            return self.error(expected);
        };
        let base = match (t.kind, t.lexeme.as_str()) {
            (TokenKind::Keyword, "int") => Type::Int,
            (TokenKind::Keyword, "boolean") => Type::Boolean,
            (TokenKind::Keyword, "String") => Type::Str,
            (TokenKind::Keyword, "void") if allow_void => Type::Void,
            (TokenKind::Identifier, name) => Type::Class(name.to_string()),
            _ => return self.error(expected),
        };
        let mut span = self.bump().span;
        let mut ty = base;
        while self.check("[") && self.check_at(1, "]") {
            if ty == Type::Void {
                return self.error(&["identifier"]);
            }
            self.bump();
            span = span.join(self.bump().span);
            ty = Type::Array(Box::new(ty));
        }
        Ok(TypeNode { ty, span })
    }

    fn block(&mut self) -> PResult<Block> {
        let start = self.expect("{")?.span;
        let mut stmts = Vec::new();
        while !self.check("}") {
            if self.at_end() {
                return self.error(&["}"]);
            }
            stmts.push(self.statement()?);
        }
        let end = self.expect("}")?.span;
        Ok(Block {
            stmts,
            span: start.join(end),
        })
    }

    fn fresh_id(&mut self) -> StmtId {
        let id = StmtId(self.next_stmt);
        self.next_stmt += 1;
        id
    }

    fn starts_declaration(&self) -> bool {
        let Some(t) = self.peek() else { return false };
        match t.kind {
            TokenKind::Keyword => matches!(t.lexeme.as_str(), "int" | "boolean" | "String"),
            TokenKind::Identifier => {
                self.peek_at(1)
                    .is_some_and(|n| n.kind == TokenKind::Identifier)
                    || (self.check_at(1, "[") && self.check_at(2, "]"))
            }
            _ => false,
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let id = self.fresh_id();
        let start = match self.peek() {
            Some(t) => t.span,
            None => return self.error(&["statement"]),
        };
        let kind = if self.eat("if").is_some() {
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            let then_block = self.block()?;
            let else_block = if self.eat("else").is_some() {
                if self.check("if") {
                    // `else if` is sugar for an else block holding one `if`.
                    let nested = self.statement()?;
                    Some(Block {
                        span: nested.span,
                        stmts: vec![nested],
                    })
                } else {
                    Some(self.block()?)
                }
            } else {
                None
            };
            StmtKind::If {
                cond,
                then_block,
                else_block,
            }
        } else if self.eat("while").is_some() {
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            let body = self.block()?;
            StmtKind::While { cond, body }
        } else if self.eat("do").is_some() {
            let body = self.block()?;
            self.expect("while")?;
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            self.expect(";")?;
            StmtKind::DoWhile { body, cond }
        } else if self.eat("return").is_some() {
            let value = if self.check(";") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect(";")?;
            StmtKind::Return { value }
        } else if self.starts_declaration() {
            let ty = self.type_node(false)?;
            let name = self.ident()?;
            let init = if self.eat("=").is_some() {
                Some(self.expr()?)
            } else {
                None
            };
            self.expect(";")?;
            StmtKind::VarDecl { ty, name, init }
        } else {
            let target = self.expr()?;
            let assign = self
                .peek()
                .filter(|t| t.kind == TokenKind::Operator)
                .and_then(|t| AssignOp::from_lexeme(&t.lexeme));
            if let Some(op) = assign {
                if !matches!(
                    target.kind,
                    ExprKind::Name(_) | ExprKind::Field { .. } | ExprKind::Index { .. }
                ) {
                    return Err(ParseError::Syntax {
                        offset: target.span.start,
                        line: target.span.line,
                        expected: vec!["assignable expression".to_string()],
                        found: alloc::format!(
                            "{:?}",
                            &self.text[target.span.start..target.span.end()]
                        ),
                    });
                }
                let op_span = self.bump().span;
                let value = self.expr()?;
                self.expect(";")?;
                StmtKind::Assign {
                    target,
                    op,
                    op_span,
                    value,
                }
            } else {
                if self.peek().is_none() || !self.check(";") {
                    return self.error(&[";", "assignment operator"]);
                }
                self.bump();
                StmtKind::Expr(target)
            }
        };
        Ok(Stmt {
            id,
            kind,
            span: start.join(self.prev_span()),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(t) if t.kind == TokenKind::Operator => BinaryOp::from_lexeme(&t.lexeme),
                _ => None,
            };
            let Some(op) = op.filter(|op| op.precedence() >= min_prec) else {
                break;
            };
            let op_span = self.bump().span;
            let rhs = self.binary(op.precedence() + 1)?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr {
                kind: ExprKind::Binary {
                    op,
                    op_span,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            Some(t) if t.kind == TokenKind::Operator => UnaryOp::from_lexeme(&t.lexeme),
            _ => None,
        };
        if let Some(op) = op {
            let op_span = self.bump().span;
            let operand = self.unary()?;
            let span = op_span.join(operand.span);
            return Ok(Expr {
                kind: ExprKind::Unary {
                    op,
                    op_span,
                    operand: Box::new(operand),
                },
                span,
            });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat(".").is_some() {
                let name = self.ident()?;
                if self.check("(") {
                    let args = self.args()?;
                    let span = e.span.join(self.prev_span());
                    e = Expr {
                        kind: ExprKind::Call {
                            receiver: Some(Box::new(e)),
                            name,
                            args,
                        },
                        span,
                    };
                } else {
                    let span = e.span.join(name.span);
                    e = Expr {
                        kind: ExprKind::Field {
                            object: Box::new(e),
                            name,
                        },
                        span,
                    };
                }
            } else if self.eat("[").is_some() {
                let index = self.expr()?;
                let end = self.expect("]")?.span;
                let span = e.span.join(end);
                e = Expr {
                    kind: ExprKind::Index {
                        array: Box::new(e),
                        index: Box::new(index),
                    },
                    span,
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.check(")") {
            loop {
                args.push(self.expr()?);
                if self.eat(",").is_none() {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(args)
    }

    fn primary(&mut self) -> PResult<Expr> {
        const EXPECTED: &[&str] = &["expression"];
        let Some(t) = self.peek().cloned() else {
            return self.error(EXPECTED);
        };
        let kind = match t.kind {
            TokenKind::Literal => {
                self.bump();
                match t.lexeme.as_str() {
                    "true" => ExprKind::Bool(true),
                    "false" => ExprKind::Bool(false),
                    "null" => ExprKind::Null,
                    lex if lex.starts_with('"') => match unescape(&lex[1..lex.len() - 1]) {
                        Some(s) => ExprKind::Str(s),
                        None => {
                            self.pos -= 1;
                            return self.error(&["valid string escape"]);
                        }
                    },
                    lex => match lex.parse::<i64>() {
                        Ok(v) => ExprKind::Int(v),
                        Err(_) => {
                            return Err(ParseError::IntRange {
                                offset: t.span.start,
                                lexeme: t.lexeme,
                            })
                        }
                    },
                }
            }
            TokenKind::Identifier => {
                let ident = self.ident()?;
                if self.check("(") {
                    let args = self.args()?;
                    let span = ident.span.join(self.prev_span());
                    return Ok(Expr {
                        kind: ExprKind::Call {
                            receiver: None,
                            name: ident,
                            args,
                        },
                        span,
                    });
                }
                if self.check(".") && ident.name.starts_with(|c: char| c.is_ascii_uppercase()) {
                    ExprKind::TypeRef(ident.name)
                } else {
                    ExprKind::Name(ident.name)
                }
            }
            TokenKind::Mask => {
                self.bump();
                ExprKind::Mask
            }
            TokenKind::Separator if t.lexeme == "(" => {
                self.bump();
                let inner = self.expr()?;
                let end = self.expect(")")?.span;
                return Ok(Expr {
                    kind: inner.kind,
                    span: t.span.join(end),
                });
            }
            _ => return self.error(EXPECTED),
        };
        Ok(Expr { kind, span: t.span })
    }
}

pub(crate) fn unescape(body: &str) -> Option<String> {
    let mut out = String::with_capacity(body.len());
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            out.push(match chars.next()? {
                'n' => '\n',
                't' => '\t',
                '"' => '"',
                '\\' => '\\',
                _ => return None,
            });
        } else {
            out.push(c);
        }
    }
    Some(out)
}
