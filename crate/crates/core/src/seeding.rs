//! Second-order candidates: conditions extended with a seeded conjunct or
//! disjunct, either another condition of the class or a comparison between
//! two variables of the same type.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::lang::ast::*;
use crate::lang::lexer::tokenize;
use crate::lang::printer::render_expr;
use crate::lang::validate::statement_scopes;
use crate::lang::{parse, render, validate, Span};
use crate::targets::{expr_targets, Slot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    ClassConditions,
    Variables,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::ClassConditions => "class-conditions",
            Scheme::Variables => "variables",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Scheme::ClassConditions, Scheme::Variables]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeedOrder {
    OriginalFirst,
    SeededFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionKind {
    If,
    While,
    DoWhile,
    Return,
}

/// A conditional expression of the unit.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSite {
    pub stmt: StmtId,
    pub class: usize,
    pub line: u32,
    pub kind: ConditionKind,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeededCondition {
    pub stmt: StmtId,
    pub line: u32,
    pub statement_kind: ConditionKind,
    pub original_expr: Expr,
    pub seeded_expr: Expr,
    /// `And` or `Or`.
    pub op: BinaryOp,
    pub negated: bool,
    pub order: SeedOrder,
    pub scheme: Scheme,
}

impl SeededCondition {
    /// The combined condition `Exp_t op [!]Exp_s` or `[!]Exp_s op Exp_t`.
    pub fn combined(&self) -> Expr {
        let seeded = if self.negated {
            Expr::new(ExprKind::Unary {
                op: UnaryOp::Not,
                op_span: Span::default(),
                operand: Box::new(self.seeded_expr.clone()),
            })
        } else {
            self.seeded_expr.clone()
        };
        let (lhs, rhs) = match self.order {
            SeedOrder::OriginalFirst => (self.original_expr.clone(), seeded),
            SeedOrder::SeededFirst => (seeded, self.original_expr.clone()),
        };
        Expr::new(ExprKind::Binary {
            op: self.op,
            op_span: Span::default(),
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        })
    }

    pub fn render(&self) -> String {
        render_expr(&self.combined())
    }
}

/// `==`/`!=` with a `null` operand.
pub fn is_null_check(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Binary { op, lhs, rhs, .. } => {
            matches!(op, BinaryOp::Eq | BinaryOp::Ne)
                && (matches!(lhs.kind, ExprKind::Null) || matches!(rhs.kind, ExprKind::Null))
        }
        _ => false,
    }
}

fn token_key(e: &Expr) -> Vec<String> {
    tokenize(&render_expr(e))
        .map(|ts| ts.tokens.into_iter().map(|t| t.lexeme).collect())
        .unwrap_or_default()
}

/// Conditions of `if`/`while`/`do` statements and non-literal returns of
/// boolean methods, in preorder.
pub fn condition_sites(unit: &SourceUnit) -> Vec<ConditionSite> {
    let mut out = Vec::new();
    for (ci, class) in unit.classes.iter().enumerate() {
        for m in &class.methods {
            let boolean = m.ret.ty == Type::Boolean;
            m.body.walk_stmts(&mut |s| {
                let (kind, expr) = match &s.kind {
                    StmtKind::If { cond, .. } => (ConditionKind::If, cond),
                    StmtKind::While { cond, .. } => (ConditionKind::While, cond),
                    StmtKind::DoWhile { cond, .. } => (ConditionKind::DoWhile, cond),
                    StmtKind::Return { value: Some(v) }
                        if boolean && !matches!(v.kind, ExprKind::Bool(_)) =>
                    {
                        (ConditionKind::Return, v)
                    }
                    _ => return,
                };
                out.push(ConditionSite {
                    stmt: s.id,
                    class: ci,
                    line: s.span.line,
                    kind,
                    expr: expr.clone(),
                });
            });
        }
    }
    out
}

/// Sites eligible as seeding targets: every condition except null-checks.
pub fn seeding_targets(unit: &SourceUnit) -> Vec<ConditionSite> {
    condition_sites(unit)
        .into_iter()
        .filter(|c| !is_null_check(&c.expr))
        .collect()
}

/// S_E: the other conditions of the target's class, without null-checks,
/// without the target's own token stream, de-duplicated by token stream.
pub fn collect_class_conditions(unit: &SourceUnit, target: &ConditionSite) -> Vec<Expr> {
    let own = token_key(&target.expr);
    let mut seen: Vec<Vec<String>> = alloc::vec![own];
    let mut out = Vec::new();
    for c in condition_sites(unit) {
        if c.class != target.class || c.stmt == target.stmt || is_null_check(&c.expr) {
            continue;
        }
        let key = token_key(&c.expr);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        out.push(c.expr);
    }
    out
}

const ORDERS: [SeedOrder; 2] = [SeedOrder::OriginalFirst, SeedOrder::SeededFirst];
const LOGICAL: [BinaryOp; 2] = [BinaryOp::Or, BinaryOp::And];

/// Every (order, op, negation) combination for each member of `s_e`.
pub fn seed_with_conditions(target: &ConditionSite, s_e: &[Expr]) -> Vec<SeededCondition> {
    let mut out = Vec::with_capacity(8 * s_e.len());
    for e in s_e {
        for order in ORDERS {
            for op in LOGICAL {
                for negated in [false, true] {
                    out.push(SeededCondition {
                        stmt: target.stmt,
                        line: target.line,
                        statement_kind: target.kind,
                        original_expr: target.expr.clone(),
                        seeded_expr: e.clone(),
                        op,
                        negated,
                        order,
                        scheme: Scheme::ClassConditions,
                    });
                }
            }
        }
    }
    out
}

/// Relational operators applicable to a type.
pub fn rel_ops(ty: &Type) -> &'static [BinaryOp] {
    if *ty == Type::Int {
        &BinaryOp::RELATIONAL
    } else {
        &[BinaryOp::Eq, BinaryOp::Ne]
    }
}

/// Distinct bare variable names of `e`, in order of appearance.
pub fn variables_of(e: &Expr) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    e.walk(&mut |x| {
        if let ExprKind::Name(n) = &x.kind {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
    });
    out
}

/// Fields of the target's class plus the method variables visible at the
/// target statement; a local hides a field of the same name.
pub fn variable_scope(unit: &SourceUnit, target: &ConditionSite) -> Vec<(String, Type)> {
    let locals = statement_scopes(unit)
        .into_iter()
        .find(|s| s.stmt == target.stmt)
        .map(|s| s.locals)
        .unwrap_or_default();
    let mut out: Vec<(String, Type)> = Vec::new();
    for f in &unit.classes[target.class].fields {
        if !locals.iter().any(|(n, _)| *n == f.name.name) {
            out.push((f.name.name.clone(), f.ty.ty.clone()));
        }
    }
    for (n, t) in locals {
        if let Some(slot) = out.iter_mut().find(|(m, _)| *m == n) {
            slot.1 = t;
        } else {
            out.push((n, t));
        }
    }
    out
}

/// Scheme 2 on an `if` condition: `var_t rel var_i` for every variable of
/// the condition and every other same-typed variable in scope.
pub fn seed_with_variables(
    target: &ConditionSite,
    scope: &[(String, Type)],
) -> Vec<SeededCondition> {
    let mut out = Vec::new();
    if target.kind != ConditionKind::If {
        return out;
    }
    for var_t in variables_of(&target.expr) {
        let Some((_, ty)) = scope.iter().find(|(n, _)| *n == var_t) else {
            continue;
        };
        for (var_i, ty_i) in scope {
            if *var_i == var_t || ty_i != ty {
                continue;
            }
            for &rel in rel_ops(ty) {
                let seeded = Expr::new(ExprKind::Binary {
                    op: rel,
                    op_span: Span::default(),
                    lhs: Box::new(Expr::new(ExprKind::Name(var_t.clone()))),
                    rhs: Box::new(Expr::new(ExprKind::Name(var_i.clone()))),
                });
                for order in ORDERS {
                    for op in LOGICAL {
                        out.push(SeededCondition {
                            stmt: target.stmt,
                            line: target.line,
                            statement_kind: target.kind,
                            original_expr: target.expr.clone(),
                            seeded_expr: seeded.clone(),
                            op,
                            negated: false,
                            order,
                            scheme: Scheme::Variables,
                        });
                    }
                }
            }
        }
    }
    out
}

/// A maskable token of a seeded sub-expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskSite {
    pub span: Span,
    pub lexeme: String,
    pub slot: Slot,
}

/// A validated program carrying one seeded condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SeededProgram {
    pub condition: SeededCondition,
    pub unit: SourceUnit,
    pub sites: Vec<MaskSite>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeedingResult {
    pub programs: Vec<SeededProgram>,
    /// Candidates enumerated before validation.
    pub candidates: usize,
    /// Candidates dropped because the seeded program did not validate.
    pub invalid: usize,
}

fn replace_condition(stmt: &mut Stmt, e: Expr) {
    match &mut stmt.kind {
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } | StmtKind::DoWhile { cond, .. } => {
            *cond = e
        }
        StmtKind::Return { value } => *value = Some(e),
        _ => {}
    }
}

fn stmt_condition(stmt: &Stmt) -> Option<&Expr> {
    match &stmt.kind {
        StmtKind::Return { value } => value.as_ref(),
        _ => stmt.condition(),
    }
}

/// Render the unit with the condition swapped in, re-parse and validate.
/// `None` when the result does not validate.
pub fn apply_seed(unit: &SourceUnit, seed: &SeededCondition) -> Option<SeededProgram> {
    let mut edited = unit.clone();
    replace_condition(edited.statement_mut(seed.stmt)?, seed.combined());
    let text = render(&edited);
    let seeded_unit = parse(&text).ok()?;
    if !validate(&seeded_unit).ok {
        return None;
    }
    let stmt = seeded_unit.statement(seed.stmt)?;
    let ExprKind::Binary {
        op_span, lhs, rhs, ..
    } = &stmt_condition(stmt)?.kind
    else {
        return None;
    };
    let side = match seed.order {
        SeedOrder::OriginalFirst => rhs,
        SeedOrder::SeededFirst => lhs,
    };
    let mut spans: Vec<(Slot, Span)> = alloc::vec![(Slot::BinaryOperator, *op_span)];
    let inner = match (&side.kind, seed.negated) {
        (
            ExprKind::Unary {
                op: UnaryOp::Not,
                op_span,
                operand,
            },
            true,
        ) => {
            spans.push((Slot::UnaryOperator, *op_span));
            operand.as_ref()
        }
        _ => side.as_ref(),
    };
    expr_targets(inner, &mut |kind, span| spans.push((kind.slot(), span)));
    spans.sort_by_key(|(_, s)| (s.start, s.len));
    let sites = spans
        .into_iter()
        .map(|(slot, span)| MaskSite {
            span,
            lexeme: seeded_unit.source[span.start..span.end()].to_string(),
            slot,
        })
        .collect();
    Some(SeededProgram {
        condition: seed.clone(),
        unit: seeded_unit,
        sites,
    })
}

/// All candidates of both schemes for one target, in enumeration order.
pub fn seed_candidates(unit: &SourceUnit, target: &ConditionSite) -> Vec<SeededCondition> {
    let s_e = collect_class_conditions(unit, target);
    let mut out = seed_with_conditions(target, &s_e);
    out.extend(seed_with_variables(target, &variable_scope(unit, target)));
    out
}

/// Seed every eligible condition of a canonical, valid unit.
pub fn seed_unit(unit: &SourceUnit) -> SeedingResult {
    let mut res = SeedingResult::default();
    for target in seeding_targets(unit) {
        for seed in seed_candidates(unit, &target) {
            res.candidates += 1;
            match apply_seed(unit, &seed) {
                Some(p) => res.programs.push(p),
                None => res.invalid += 1,
            }
        }
    }
    res
}
