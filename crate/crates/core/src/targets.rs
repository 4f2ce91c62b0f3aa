//! Maskable AST nodes and the masked token sequences built from them.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::lang::ast::*;
use crate::lang::lexer::{tokenize, Token, TokenKind, MASK};
use crate::lang::Span;

/// Default token budget of the prediction model.
pub const DEFAULT_WINDOW: usize = 512;

/// The nine node categories a first-order mutation may target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Literal,
    Identifier,
    BinaryOperator,
    UnaryOperator,
    AssignmentOperator,
    ObjectField,
    MethodName,
    ArrayIndex,
    StaticTypeRef,
}

impl NodeKind {
    pub const ALL: [NodeKind; 9] = [
        NodeKind::Literal,
        NodeKind::Identifier,
        NodeKind::BinaryOperator,
        NodeKind::UnaryOperator,
        NodeKind::AssignmentOperator,
        NodeKind::ObjectField,
        NodeKind::MethodName,
        NodeKind::ArrayIndex,
        NodeKind::StaticTypeRef,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Literal => "literal",
            NodeKind::Identifier => "identifier",
            NodeKind::BinaryOperator => "binary-operator",
            NodeKind::UnaryOperator => "unary-operator",
            NodeKind::AssignmentOperator => "assignment-operator",
            NodeKind::ObjectField => "object-field",
            NodeKind::MethodName => "method-name",
            NodeKind::ArrayIndex => "array-index",
            NodeKind::StaticTypeRef => "static-type-ref",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        NodeKind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn slot(self) -> Slot {
        match self {
            NodeKind::Literal => Slot::Literal,
            NodeKind::Identifier
            | NodeKind::ObjectField
            | NodeKind::ArrayIndex
            | NodeKind::StaticTypeRef => Slot::Operand,
            NodeKind::BinaryOperator => Slot::BinaryOperator,
            NodeKind::UnaryOperator => Slot::UnaryOperator,
            NodeKind::AssignmentOperator => Slot::AssignmentOperator,
            NodeKind::MethodName => Slot::MethodName,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Syntactic role of a masked position; selects the offline predictor's
/// candidate pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Literal,
    /// Variable, field, receiver or index operand.
    Operand,
    BinaryOperator,
    UnaryOperator,
    /// Arithmetic prefix of an assignment operator (`<mask>=`).
    AssignmentOperator,
    MethodName,
}

impl Slot {
    pub const ALL: [Slot; 6] = [
        Slot::Literal,
        Slot::Operand,
        Slot::BinaryOperator,
        Slot::UnaryOperator,
        Slot::AssignmentOperator,
        Slot::MethodName,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Slot::Literal => "literal",
            Slot::Operand => "operand",
            Slot::BinaryOperator => "binary-operator",
            Slot::UnaryOperator => "unary-operator",
            Slot::AssignmentOperator => "assignment-operator",
            Slot::MethodName => "method-name",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Slot::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Guess the slot from the tokens around the mask alone.
    pub fn infer(tokens: &[Token], mask_index: usize) -> Slot {
        let prev = mask_index.checked_sub(1).and_then(|i| tokens.get(i));
        let next = tokens.get(mask_index + 1);
        let prev_is = |s: &str| prev.is_some_and(|t| t.lexeme == s);
        let next_is = |s: &str| next.is_some_and(|t| t.lexeme == s);
        let ends_operand = prev.is_some_and(|t| {
            matches!(t.kind, TokenKind::Identifier | TokenKind::Literal)
                || t.lexeme == ")"
                || t.lexeme == "]"
        });
        let starts_operand = next.is_some_and(|t| {
            matches!(t.kind, TokenKind::Identifier | TokenKind::Literal)
                || t.lexeme == "("
                || (t.kind == TokenKind::Operator && UnaryOp::from_lexeme(&t.lexeme).is_some())
        });
        if next_is("(") && !ends_operand {
            Slot::MethodName
        } else if prev_is(".") {
            Slot::Operand
        } else if ends_operand && next_is("=") {
            Slot::AssignmentOperator
        } else if ends_operand {
            Slot::BinaryOperator
        } else if starts_operand {
            Slot::UnaryOperator
        } else {
            Slot::Operand
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A maskable node occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MutationTarget {
    pub kind: NodeKind,
    /// Source range replaced by the mask. Zero-length for a plain `=`, whose
    /// mask is inserted in front of the `=`.
    pub span: Span,
    pub line: u32,
    pub stmt: StmtId,
    /// Source text under `span`.
    pub lexeme: String,
}

/// Every maskable node inside method bodies, ordered by (line, span).
/// Declarations contribute only their initializer expression.
pub fn collect_targets(unit: &SourceUnit) -> Vec<MutationTarget> {
    let mut out = Vec::new();
    for s in unit.statements() {
        statement_targets(unit, s, &mut out);
    }
    out.sort_by_key(|t| (t.line, t.span.start, t.span.len, t.kind));
    out
}

/// Targets owned directly by one statement (nested blocks excluded).
pub fn statement_targets(unit: &SourceUnit, stmt: &Stmt, out: &mut Vec<MutationTarget>) {
    let mut push = |kind: NodeKind, span: Span| {
        out.push(MutationTarget {
            kind,
            span,
            line: span.line,
            stmt: stmt.id,
            lexeme: unit.source[span.start..span.end()].to_string(),
        });
    };
    if let StmtKind::Assign {
        target,
        op_span,
        value,
        ..
    } = &stmt.kind
    {
        expr_targets(target, &mut push);
        // Mask the arithmetic prefix and keep the trailing `=`.
        push(
            NodeKind::AssignmentOperator,
            Span::new(op_span.start, op_span.len - 1, op_span.line),
        );
        expr_targets(value, &mut push);
        return;
    }
    for e in stmt.exprs() {
        expr_targets(e, &mut push);
    }
}

fn is_single_token(e: &Expr) -> bool {
    matches!(
        e.kind,
        ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Null | ExprKind::Name(_)
    )
}

pub(crate) fn expr_targets(e: &Expr, push: &mut impl FnMut(NodeKind, Span)) {
    match &e.kind {
        ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Null => {
            push(NodeKind::Literal, e.span)
        }
        ExprKind::Name(_) => push(NodeKind::Identifier, e.span),
        ExprKind::TypeRef(_) => push(NodeKind::StaticTypeRef, e.span),
        ExprKind::Field { object, name } => {
            expr_targets(object, push);
            push(NodeKind::ObjectField, name.span);
        }
        ExprKind::Call {
            receiver,
            name,
            args,
        } => {
            if let Some(r) = receiver {
                expr_targets(r, push);
            }
            push(NodeKind::MethodName, name.span);
            for a in args {
                expr_targets(a, push);
            }
        }
        ExprKind::Index { array, index } => {
            expr_targets(array, push);
            // A single-token index is already covered by its own target.
            if !is_single_token(index) {
                push(NodeKind::ArrayIndex, index.span);
            }
            expr_targets(index, push);
        }
        ExprKind::Unary {
            op_span, operand, ..
        } => {
            push(NodeKind::UnaryOperator, *op_span);
            expr_targets(operand, push);
        }
        ExprKind::Binary {
            op_span, lhs, rhs, ..
        } => {
            expr_targets(lhs, push);
            push(NodeKind::BinaryOperator, *op_span);
            expr_targets(rhs, push);
        }
        ExprKind::Mask => {}
    }
}

/// Where a masked sequence came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaskOrigin {
    Target(MutationTarget),
    /// A token of a seeded condition; `condition` indexes the generation
    /// plan's seeded programs.
    Seeded {
        condition: usize,
        slot: Slot,
        line: u32,
    },
}

impl MaskOrigin {
    pub fn slot(&self) -> Slot {
        match self {
            MaskOrigin::Target(t) => t.kind.slot(),
            MaskOrigin::Seeded { slot, .. } => *slot,
        }
    }

    pub fn line(&self) -> u32 {
        match self {
            MaskOrigin::Target(t) => t.line,
            MaskOrigin::Seeded { line, .. } => *line,
        }
    }
}

/// Token sequence holding exactly one mask placeholder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedSequence {
    pub tokens: Vec<Token>,
    pub mask_index: usize,
    pub origin: MaskOrigin,
    pub original_lexeme: String,
}

impl MaskedSequence {
    pub fn mask(&self) -> &Token {
        &self.tokens[self.mask_index]
    }

    /// Source range the prediction will be spliced into.
    pub fn mask_span(&self) -> Span {
        self.mask().span
    }

    pub fn lexemes(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.lexeme.clone()).collect()
    }

    /// Tokens joined with source spacing collapsed to single spaces.
    pub fn text(&self) -> String {
        join_spaced(&self.tokens)
    }

    /// Only the tokens on the mask's line, joined like [`Self::text`].
    pub fn line_text(&self) -> String {
        let line = self.mask().span.line;
        let on_line: Vec<Token> = self
            .tokens
            .iter()
            .filter(|t| t.span.line == line)
            .cloned()
            .collect();
        join_spaced(&on_line)
    }
}

fn join_spaced(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut prev_end: Option<usize> = None;
    for t in tokens {
        if let Some(end) = prev_end {
            if end != t.span.start {
                out.push(' ');
            }
        }
        out.push_str(&t.lexeme);
        prev_end = Some(t.span.end());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaskError {
    #[error("target at byte {start} no longer matches the unit (expected {expected:?})")]
    TargetStale { start: usize, expected: String },
    #[error("window limit must be at least 1")]
    InvalidLimit,
}

/// Replace `span` of the unit's source with a single mask token.
pub fn mask_span(
    unit: &SourceUnit,
    span: Span,
    expected: &str,
    origin: MaskOrigin,
) -> Result<MaskedSequence, MaskError> {
    let stale = || MaskError::TargetStale {
        start: span.start,
        expected: expected.to_string(),
    };
    if unit.source.get(span.start..span.end()) != Some(expected) {
        return Err(stale());
    }
    let all = tokenize(&unit.source).map_err(|_| stale())?.tokens;
    let mut tokens = Vec::with_capacity(all.len() + 1);
    let mut mask_index = None;
    for t in all {
        let (ts, te) = (t.span.start, t.span.end());
        if te <= span.start && !(span.len == 0 && te == span.start && ts == span.start) {
            tokens.push(t);
            continue;
        }
        if mask_index.is_none() {
            if ts < span.start {
                // A token straddling the mask start cannot be split cleanly.
                return Err(stale());
            }
            mask_index = Some(tokens.len());
            tokens.push(Token {
                kind: TokenKind::Mask,
                lexeme: MASK.to_string(),
                span,
            });
        }
        if ts >= span.end() {
            tokens.push(t);
        } else if te > span.end() {
            // Keep the tail of a token the mask only partly covers (`+=`).
            let cut = span.end() - ts;
            tokens.push(Token {
                kind: t.kind,
                lexeme: t.lexeme[cut..].to_string(),
                span: Span::new(span.end(), te - span.end(), t.span.line),
            });
        }
    }
    let mask_index = match mask_index {
        Some(i) => i,
        None => {
            tokens.push(Token {
                kind: TokenKind::Mask,
                lexeme: MASK.to_string(),
                span,
            });
            tokens.len() - 1
        }
    };
    Ok(MaskedSequence {
        tokens,
        mask_index,
        origin,
        original_lexeme: expected.to_string(),
    })
}

pub fn mask_target(unit: &SourceUnit, target: &MutationTarget) -> Result<MaskedSequence, MaskError> {
    mask_span(
        unit,
        target.span,
        &target.lexeme,
        MaskOrigin::Target(target.clone()),
    )
}

/// Fit `seq` into `max_tokens`, keeping the mask roughly centred:
/// `(max_tokens - 1) / 2` tokens before it, shifted to stay full-length near
/// either end.
pub fn crop_window(seq: &MaskedSequence, max_tokens: usize) -> Result<MaskedSequence, MaskError> {
    if max_tokens < 1 {
        return Err(MaskError::InvalidLimit);
    }
    let n = seq.tokens.len();
    if n <= max_tokens {
        return Ok(seq.clone());
    }
    let (start, _) = window_bounds(n, seq.mask_index, max_tokens);
    Ok(MaskedSequence {
        tokens: seq.tokens[start..start + max_tokens].to_vec(),
        mask_index: seq.mask_index - start,
        origin: seq.origin.clone(),
        original_lexeme: seq.original_lexeme.clone(),
    })
}

/// `[start, end)` of the cropped window.
pub fn window_bounds(len: usize, mask_index: usize, max_tokens: usize) -> (usize, usize) {
    if len <= max_tokens {
        return (0, len);
    }
    let before = (max_tokens - 1) / 2;
    let start = mask_index.saturating_sub(before).min(len - max_tokens);
    (start, start + max_tokens)
}
