//! Static checks standing in for "does it compile": name resolution, MiniJ
//! typing rules, reachability and definite return.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::ast::*;
use super::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagnosticCategory {
    Parse,
    NameResolution,
    Type,
}

impl fmt::Display for DiagnosticCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticCategory::Parse => "parse",
            DiagnosticCategory::NameResolution => "name-resolution",
            DiagnosticCategory::Type => "type",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
    pub category: DiagnosticCategory,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub diagnostics: Vec<Diagnostic>,
}

/// Signatures of the built-in `Math` methods: (name, parameter count).
pub const MATH_METHODS: &[(&str, usize)] =
    &[("abs", 1), ("max", 2), ("min", 2), ("random", 0)];

pub fn validate(unit: &SourceUnit) -> ValidationReport {
    let mut c = Checker::new(unit);
    c.check_unit();
    ValidationReport {
        ok: c.diags.is_empty(),
        diagnostics: c.diags,
    }
}

/// Variables visible just before a statement executes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StmtScope {
    pub class: usize,
    pub method: usize,
    pub stmt: StmtId,
    /// Parameters and locals in declaration order (fields not included).
    pub locals: Vec<(String, Type)>,
}

/// Scope snapshot for every statement of the unit, in preorder.
pub fn statement_scopes(unit: &SourceUnit) -> Vec<StmtScope> {
    let mut c = Checker::new(unit);
    c.scopes = Some(Vec::new());
    c.check_unit();
    c.scopes.unwrap_or_default()
}

/// Static type of `expr` evaluated inside class `class` with `locals` in
/// scope. `None` when the expression does not type-check.
pub fn expr_type(
    unit: &SourceUnit,
    class: usize,
    locals: &[(String, Type)],
    expr: &Expr,
) -> Option<Type> {
    let mut c = Checker::new(unit);
    c.class = class;
    c.locals = alloc::vec![locals.to_vec()];
    let ty = c.expr(expr);
    if c.diags.is_empty() {
        ty
    } else {
        None
    }
}

struct Checker<'u> {
    unit: &'u SourceUnit,
    diags: Vec<Diagnostic>,
    scopes: Option<Vec<StmtScope>>,
    class: usize,
    method: usize,
    ret: Type,
    locals: Vec<Vec<(String, Type)>>,
}

impl<'u> Checker<'u> {
    fn new(unit: &'u SourceUnit) -> Self {
        Checker {
            unit,
            diags: Vec::new(),
            scopes: None,
            class: 0,
            method: 0,
            ret: Type::Void,
            locals: Vec::new(),
        }
    }

    fn report(&mut self, span: Span, category: DiagnosticCategory, message: String) {
        self.diags.push(Diagnostic {
            span,
            message,
            category,
        });
    }

    fn check_unit(&mut self) {
        let unit = self.unit;
        for (i, c) in unit.classes.iter().enumerate() {
            if unit.classes[..i].iter().any(|o| o.name.name == c.name.name) {
                self.report(
                    c.name.span,
                    DiagnosticCategory::NameResolution,
                    format!("duplicate class {}", c.name.name),
                );
            }
            if c.name.name == "Math" {
                self.report(
                    c.name.span,
                    DiagnosticCategory::NameResolution,
                    "class Math shadows the built-in library".to_string(),
                );
            }
        }
        for (ci, c) in unit.classes.iter().enumerate() {
            self.class = ci;
            for (i, f) in c.fields.iter().enumerate() {
                self.check_type_exists(&f.ty);
                if c.fields[..i].iter().any(|o| o.name.name == f.name.name) {
                    self.report(
                        f.name.span,
                        DiagnosticCategory::NameResolution,
                        format!("duplicate field {}", f.name.name),
                    );
                }
            }
            for (mi, m) in c.methods.iter().enumerate() {
                if c.methods[..mi].iter().any(|o| o.name.name == m.name.name) {
                    self.report(
                        m.name.span,
                        DiagnosticCategory::NameResolution,
                        format!("duplicate method {}", m.name.name),
                    );
                }
                self.method = mi;
                self.check_method(m);
            }
        }
    }

    fn check_type_exists(&mut self, ty: &TypeNode) {
        let mut t = &ty.ty;
        while let Type::Array(inner) = t {
            t = inner;
        }
        if let Type::Class(name) = t {
            if self.unit.class(name).is_none() {
                self.report(
                    ty.span,
                    DiagnosticCategory::NameResolution,
                    format!("unknown type {name}"),
                );
            }
        }
    }

    fn check_method(&mut self, m: &MethodDecl) {
        if m.ret.ty != Type::Void {
            self.check_type_exists(&m.ret);
        }
        self.ret = m.ret.ty.clone();
        let mut params: Vec<(String, Type)> = Vec::new();
        for p in &m.params {
            self.check_type_exists(&p.ty);
            if params.iter().any(|(n, _)| *n == p.name.name) {
                self.report(
                    p.name.span,
                    DiagnosticCategory::NameResolution,
                    format!("duplicate parameter {}", p.name.name),
                );
            }
            params.push((p.name.name.clone(), p.ty.ty.clone()));
        }
        self.locals = alloc::vec![params];
        let completes = self.block(&m.body);
        if completes && m.ret.ty != Type::Void {
            self.report(
                m.name.span,
                DiagnosticCategory::Type,
                format!("method {} may finish without returning a value", m.name.name),
            );
        }
        self.locals.clear();
    }

    fn lookup_local(&self, name: &str) -> Option<&Type> {
        self.locals
            .iter()
            .rev()
            .flat_map(|s| s.iter().rev())
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    fn current_class(&self) -> &'u ClassDecl {
        &self.unit.classes[self.class]
    }

    /// Checks the block in a fresh scope; returns whether it can complete
    /// normally.
    fn block(&mut self, b: &Block) -> bool {
        self.locals.push(Vec::new());
        let mut completes = true;
        for s in &b.stmts {
            if !completes {
                self.report(
                    s.span,
                    DiagnosticCategory::Type,
                    "unreachable statement".to_string(),
                );
            }
            completes &= self.stmt(s);
        }
        self.locals.pop();
        completes
    }

    fn snapshot(&mut self, id: StmtId) {
        if self.scopes.is_some() {
            let locals = self.locals.iter().flatten().cloned().collect();
            let scope = StmtScope {
                class: self.class,
                method: self.method,
                stmt: id,
                locals,
            };
            if let Some(v) = self.scopes.as_mut() {
                v.push(scope);
            }
        }
    }

    fn expect_type(&mut self, e: &Expr, want: &Type, what: &str) {
        if let Some(got) = self.expr(e) {
            if !want.accepts(&got) {
                self.report(
                    e.span,
                    DiagnosticCategory::Type,
                    format!("{what}: expected {want}, found {got}"),
                );
            }
        }
    }

    fn stmt(&mut self, s: &Stmt) -> bool {
        self.snapshot(s.id);
        match &s.kind {
            StmtKind::VarDecl { ty, name, init } => {
                self.check_type_exists(ty);
                if let Some(e) = init {
                    self.expect_type(e, &ty.ty, "initializer");
                }
                if self.lookup_local(&name.name).is_some() {
                    self.report(
                        name.span,
                        DiagnosticCategory::NameResolution,
                        format!("variable {} is already defined", name.name),
                    );
                }
                if let Some(scope) = self.locals.last_mut() {
                    scope.push((name.name.clone(), ty.ty.clone()));
                }
                true
            }
            StmtKind::Assign {
                target, op, value, ..
            } => {
                let tt = self.expr(target);
                let vt = self.expr(value);
                if let (Some(tt), Some(vt)) = (tt, vt) {
                    let ok = match op {
                        AssignOp::Assign => tt.accepts(&vt),
                        AssignOp::Add => {
                            (tt == Type::Int && vt == Type::Int)
                                || (tt == Type::Str && vt != Type::Void)
                        }
                        _ => tt == Type::Int && vt == Type::Int,
                    };
                    if !ok {
                        self.report(
                            s.span,
                            DiagnosticCategory::Type,
                            format!("cannot apply {} to {tt} and {vt}", op.as_str()),
                        );
                    }
                }
                true
            }
            StmtKind::If {
                cond,
                then_block,
                else_block,
            } => {
                self.expect_type(cond, &Type::Boolean, "condition");
                let a = self.block(then_block);
                let b = else_block.as_ref().is_none_or(|b| self.block(b));
                a || b
            }
            StmtKind::While { cond, body } => {
                self.expect_type(cond, &Type::Boolean, "condition");
                self.block(body);
                !matches!(cond.kind, ExprKind::Bool(true))
            }
            StmtKind::DoWhile { body, cond } => {
                let body_completes = self.block(body);
                self.expect_type(cond, &Type::Boolean, "condition");
                body_completes && !matches!(cond.kind, ExprKind::Bool(true))
            }
            StmtKind::Return { value } => {
                match (value, self.ret.clone()) {
                    (None, Type::Void) => {}
                    (None, want) => self.report(
                        s.span,
                        DiagnosticCategory::Type,
                        format!("missing return value of type {want}"),
                    ),
                    (Some(e), Type::Void) => {
                        self.expr(e);
                        self.report(
                            e.span,
                            DiagnosticCategory::Type,
                            "void method cannot return a value".to_string(),
                        );
                    }
                    (Some(e), want) => self.expect_type(e, &want, "return value"),
                }
                false
            }
            StmtKind::Expr(e) => {
                self.expr(e);
                let is_statement = matches!(
                    e.kind,
                    ExprKind::Call { .. }
                        | ExprKind::Unary {
                            op: UnaryOp::PreInc | UnaryOp::PreDec,
                            ..
                        }
                );
                if !is_statement {
                    self.report(
                        e.span,
                        DiagnosticCategory::Type,
                        "expression is not a statement".to_string(),
                    );
                }
                true
            }
        }
    }

    fn type_error(&mut self, span: Span, message: String) -> Option<Type> {
        self.report(span, DiagnosticCategory::Type, message);
        None
    }

    fn expr(&mut self, e: &Expr) -> Option<Type> {
        match &e.kind {
            ExprKind::Int(_) => Some(Type::Int),
            ExprKind::Bool(_) => Some(Type::Boolean),
            ExprKind::Str(_) => Some(Type::Str),
            ExprKind::Null => Some(Type::Null),
            ExprKind::Mask => {
                self.report(
                    e.span,
                    DiagnosticCategory::Parse,
                    "mask placeholder is not valid in a program".to_string(),
                );
                None
            }
            ExprKind::Name(n) => {
                if let Some(t) = self.lookup_local(n) {
                    return Some(t.clone());
                }
                if let Some(f) = self.current_class().field(n) {
                    return Some(f.ty.ty.clone());
                }
                self.report(
                    e.span,
                    DiagnosticCategory::NameResolution,
                    format!("cannot find variable {n}"),
                );
                None
            }
            ExprKind::TypeRef(n) => {
                self.static_receiver(e.span, n);
                self.type_error(e.span, format!("type {n} used as a value"))
            }
            ExprKind::Field { object, name } => {
                if let ExprKind::TypeRef(n) = &object.kind {
                    self.static_receiver(object.span, n);
                    return self.type_error(name.span, format!("{n} has no static field {}", name.name));
                }
                match self.expr(object)? {
                    Type::Class(c) => match self.unit.class(&c).and_then(|cd| cd.field(&name.name))
                    {
                        Some(f) => Some(f.ty.ty.clone()),
                        None => {
                            self.report(
                                name.span,
                                DiagnosticCategory::NameResolution,
                                format!("class {c} has no field {}", name.name),
                            );
                            None
                        }
                    },
                    Type::Array(_) if name.name == "length" => Some(Type::Int),
                    other => self.type_error(
                        name.span,
                        format!("type {other} has no field {}", name.name),
                    ),
                }
            }
            ExprKind::Call {
                receiver,
                name,
                args,
            } => self.call(receiver.as_deref(), name, args),
            ExprKind::Index { array, index } => {
                let at = self.expr(array);
                self.expect_type(index, &Type::Int, "array index");
                match at? {
                    Type::Array(inner) => Some(*inner),
                    other => self.type_error(array.span, format!("type {other} is not an array")),
                }
            }
            ExprKind::Unary {
                op, operand, ..
            } => {
                let t = self.expr(operand)?;
                match op {
                    UnaryOp::Not if t == Type::Boolean => Some(Type::Boolean),
                    UnaryOp::Neg if t == Type::Int => Some(Type::Int),
                    UnaryOp::PreInc | UnaryOp::PreDec if t == Type::Int => {
                        if is_lvalue(operand) {
                            Some(Type::Int)
                        } else {
                            self.type_error(
                                operand.span,
                                format!("{} needs a variable", op.as_str()),
                            )
                        }
                    }
                    _ => self.type_error(
                        e.span,
                        format!("cannot apply {} to {t}", op.as_str()),
                    ),
                }
            }
            ExprKind::Binary { op, lhs, rhs, .. } => {
                let l = self.expr(lhs);
                let r = self.expr(rhs);
                let (l, r) = (l?, r?);
                let result = binary_result(*op, &l, &r);
                if result.is_none() {
                    self.report(
                        e.span,
                        DiagnosticCategory::Type,
                        format!("cannot apply {} to {l} and {r}", op.as_str()),
                    );
                }
                result
            }
        }
    }

    fn static_receiver(&mut self, span: Span, name: &str) {
        if name != "Math" {
            let category = if self.unit.class(name).is_some() {
                DiagnosticCategory::Type
            } else {
                DiagnosticCategory::NameResolution
            };
            self.report(span, category, format!("unknown static type {name}"));
        }
    }

    fn call(&mut self, receiver: Option<&Expr>, name: &Ident, args: &[Expr]) -> Option<Type> {
        let arg_types: Vec<Option<Type>> = args.iter().map(|a| self.expr(a)).collect();
        let method = match receiver {
            None => self.current_class().method(&name.name),
            Some(Expr {
                kind: ExprKind::TypeRef(t),
                span,
            }) => {
                if t != "Math" {
                    self.static_receiver(*span, t);
                    return None;
                }
                let Some(&(_, arity)) = MATH_METHODS.iter().find(|(n, _)| *n == name.name)
                else {
                    self.report(
                        name.span,
                        DiagnosticCategory::NameResolution,
                        format!("Math has no method {}", name.name),
                    );
                    return None;
                };
                if args.len() != arity {
                    return self.type_error(
                        name.span,
                        format!("Math.{} takes {arity} arguments", name.name),
                    );
                }
                for (a, t) in args.iter().zip(&arg_types) {
                    if let Some(t) = t {
                        if *t != Type::Int {
                            self.report(
                                a.span,
                                DiagnosticCategory::Type,
                                format!("argument: expected int, found {t}"),
                            );
                        }
                    }
                }
                return Some(Type::Int);
            }
            Some(r) => match self.expr(r)? {
                Type::Class(c) => self.unit.class(&c).and_then(|cd| cd.method(&name.name)),
                other => {
                    return self.type_error(
                        name.span,
                        format!("type {other} has no method {}", name.name),
                    )
                }
            },
        };
        let Some(m) = method else {
            self.report(
                name.span,
                DiagnosticCategory::NameResolution,
                format!("cannot find method {}", name.name),
            );
            return None;
        };
        if m.params.len() != args.len() {
            return self.type_error(
                name.span,
                format!(
                    "method {} takes {} arguments, found {}",
                    name.name,
                    m.params.len(),
                    args.len()
                ),
            );
        }
        for ((a, t), p) in args.iter().zip(&arg_types).zip(&m.params) {
            if let Some(t) = t {
                if !p.ty.ty.accepts(t) {
                    self.report(
                        a.span,
                        DiagnosticCategory::Type,
                        format!("argument: expected {}, found {t}", p.ty.ty),
                    );
                }
            }
        }
        Some(m.ret.ty.clone())
    }
}

pub fn is_lvalue(e: &Expr) -> bool {
    matches!(
        e.kind,
        ExprKind::Name(_) | ExprKind::Field { .. } | ExprKind::Index { .. }
    )
}

/// Result type of `l op r` under MiniJ typing, if well-typed.
pub fn binary_result(op: BinaryOp, l: &Type, r: &Type) -> Option<Type> {
    use BinaryOp::*;
    match op {
        Add if (*l == Type::Str && *r != Type::Void) || (*r == Type::Str && *l != Type::Void) => {
            Some(Type::Str)
        }
        Add | Sub | Mul | Div | Rem if *l == Type::Int && *r == Type::Int => Some(Type::Int),
        Lt | Le | Gt | Ge if *l == Type::Int && *r == Type::Int => Some(Type::Boolean),
        And | Or if *l == Type::Boolean && *r == Type::Boolean => Some(Type::Boolean),
        Eq | Ne if comparable(l, r) => Some(Type::Boolean),
        _ => None,
    }
}

fn comparable(l: &Type, r: &Type) -> bool {
    match (l, r) {
        (Type::Int, Type::Int) | (Type::Boolean, Type::Boolean) => true,
        _ if l.is_reference() && r.is_reference() => {
            l == r || *l == Type::Null || *r == Type::Null
        }
        _ => false,
    }
}
