use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::Span;

/// Parsed MiniJ program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    /// Text the unit was parsed from. Spans index into it.
    pub source: String,
    pub classes: Vec<ClassDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Int,
    Boolean,
    Str,
    Void,
    /// Type of the `null` literal.
    Null,
    Class(String),
    Array(Box<Type>),
}

impl Type {
    pub fn is_reference(&self) -> bool {
        matches!(self, Type::Str | Type::Null | Type::Class(_) | Type::Array(_))
    }

    /// Whether a value of type `from` may be stored in a slot of type `self`.
    pub fn accepts(&self, from: &Type) -> bool {
        self == from || (*from == Type::Null && self.is_reference() && *self != Type::Null)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Boolean => f.write_str("boolean"),
            Type::Str => f.write_str("String"),
            Type::Void => f.write_str("void"),
            Type::Null => f.write_str("null"),
            Type::Class(name) => f.write_str(name),
            Type::Array(inner) => write!(f, "{inner}[]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeNode {
    pub ty: Type,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: Ident,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

impl ClassDecl {
    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name.name == name)
    }

    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|m| m.name.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub ty: TypeNode,
    pub name: Ident,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub ty: TypeNode,
    pub name: Ident,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub ret: TypeNode,
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

/// Preorder index of a statement within its unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StmtId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub id: StmtId,
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    VarDecl {
        ty: TypeNode,
        name: Ident,
        init: Option<Expr>,
    },
    Assign {
        target: Expr,
        op: AssignOp,
        op_span: Span,
        value: Expr,
    },
    If {
        cond: Expr,
        then_block: Block,
        else_block: Option<Block>,
    },
    While {
        cond: Expr,
        body: Block,
    },
    DoWhile {
        body: Block,
        cond: Expr,
    },
    Return {
        value: Option<Expr>,
    },
    Expr(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AssignOp {
    Assign,
    Add,
    Sub,
    Mul,
    Div,
}

impl AssignOp {
    pub fn as_str(self) -> &'static str {
        match self {
            AssignOp::Assign => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
        }
    }

    pub fn from_lexeme(lexeme: &str) -> Option<Self> {
        Some(match lexeme {
            "=" => AssignOp::Assign,
            "+=" => AssignOp::Add,
            "-=" => AssignOp::Sub,
            "*=" => AssignOp::Mul,
            "/=" => AssignOp::Div,
            _ => return None,
        })
    }

    /// The arithmetic operator folded into a compound assignment.
    pub fn arithmetic(self) -> Option<BinaryOp> {
        match self {
            AssignOp::Assign => None,
            AssignOp::Add => Some(BinaryOp::Add),
            AssignOp::Sub => Some(BinaryOp::Sub),
            AssignOp::Mul => Some(BinaryOp::Mul),
            AssignOp::Div => Some(BinaryOp::Div),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 13] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Rem,
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::Eq,
        BinaryOp::Ne,
        BinaryOp::And,
        BinaryOp::Or,
    ];

    pub const RELATIONAL: [BinaryOp; 6] = [
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::Eq,
        BinaryOp::Ne,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BinaryOp::Or => "||",
            BinaryOp::And => "&&",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
        }
    }

    pub fn from_lexeme(lexeme: &str) -> Option<Self> {
        BinaryOp::ALL.into_iter().find(|op| op.as_str() == lexeme)
    }

    /// Binding strength; larger binds tighter. All binary operators are
    /// left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
    PreInc,
    PreDec,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 4] = [UnaryOp::Not, UnaryOp::Neg, UnaryOp::PreInc, UnaryOp::PreDec];

    pub fn as_str(self) -> &'static str {
        match self {
            UnaryOp::Not => "!",
            UnaryOp::Neg => "-",
            UnaryOp::PreInc => "++",
            UnaryOp::PreDec => "--",
        }
    }

    pub fn from_lexeme(lexeme: &str) -> Option<Self> {
        UnaryOp::ALL.into_iter().find(|op| op.as_str() == lexeme)
    }
}

pub const UNARY_PRECEDENCE: u8 = 7;
pub const POSTFIX_PRECEDENCE: u8 = 8;
pub const ATOM_PRECEDENCE: u8 = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    /// Decoded string contents.
    Str(String),
    Null,
    /// Variable reference (local, parameter or field).
    Name(String),
    /// Static type used as a call receiver, e.g. `Math` in `Math.abs(x)`.
    TypeRef(String),
    Field {
        object: Box<Expr>,
        name: Ident,
    },
    Call {
        receiver: Option<Box<Expr>>,
        name: Ident,
        args: Vec<Expr>,
    },
    Index {
        array: Box<Expr>,
        index: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        op_span: Span,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        op_span: Span,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    /// The `<mask>` placeholder; never valid in a final program.
    Mask,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary { op, .. } => op.precedence(),
            ExprKind::Unary { .. } => UNARY_PRECEDENCE,
            ExprKind::Field { .. } | ExprKind::Call { .. } | ExprKind::Index { .. } => {
                POSTFIX_PRECEDENCE
            }
            _ => ATOM_PRECEDENCE,
        }
    }

    /// Direct sub-expressions in source order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Field { object, .. } => alloc::vec![&**object],
            ExprKind::Call { receiver, args, .. } => {
                receiver.iter().map(|r| &**r).chain(args.iter()).collect()
            }
            ExprKind::Index { array, index } => alloc::vec![&**array, &**index],
            ExprKind::Unary { operand, .. } => alloc::vec![&**operand],
            ExprKind::Binary { lhs, rhs, .. } => alloc::vec![&**lhs, &**rhs],
            _ => Vec::new(),
        }
    }

    /// Preorder walk over this expression and its descendants.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

impl Block {
    /// Preorder walk over every statement, descending into nested blocks.
    pub fn walk_stmts<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        for s in &self.stmts {
            f(s);
            match &s.kind {
                StmtKind::If {
                    then_block,
                    else_block,
                    ..
                } => {
                    then_block.walk_stmts(f);
                    if let Some(b) = else_block {
                        b.walk_stmts(f);
                    }
                }
                StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => {
                    body.walk_stmts(f)
                }
                _ => {}
            }
        }
    }

    pub fn walk_stmts_mut(&mut self, f: &mut impl FnMut(&mut Stmt)) {
        for s in &mut self.stmts {
            f(s);
            match &mut s.kind {
                StmtKind::If {
                    then_block,
                    else_block,
                    ..
                } => {
                    then_block.walk_stmts_mut(f);
                    if let Some(b) = else_block {
                        b.walk_stmts_mut(f);
                    }
                }
                StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => {
                    body.walk_stmts_mut(f)
                }
                _ => {}
            }
        }
    }
}

impl Stmt {
    /// Expressions owned directly by this statement (not by nested blocks).
    pub fn exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::VarDecl { init, .. } => init.iter().collect(),
            StmtKind::Assign { target, value, .. } => alloc::vec![target, value],
            StmtKind::If { cond, .. }
            | StmtKind::While { cond, .. }
            | StmtKind::DoWhile { cond, .. } => alloc::vec![cond],
            StmtKind::Return { value } => value.iter().collect(),
            StmtKind::Expr(e) => alloc::vec![e],
        }
    }

    /// Condition of an `if`, `while` or `do` statement.
    pub fn condition(&self) -> Option<&Expr> {
        match &self.kind {
            StmtKind::If { cond, .. }
            | StmtKind::While { cond, .. }
            | StmtKind::DoWhile { cond, .. } => Some(cond),
            _ => None,
        }
    }
}

impl SourceUnit {
    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name.name == name)
    }

    /// Every statement in every method body, in preorder.
    pub fn statements(&self) -> Vec<&Stmt> {
        let mut out = Vec::new();
        for c in &self.classes {
            for m in &c.methods {
                m.body.walk_stmts(&mut |s| out.push(s));
            }
        }
        out
    }

    pub fn statement(&self, id: StmtId) -> Option<&Stmt> {
        self.statements().into_iter().find(|s| s.id == id)
    }

    pub fn statement_mut(&mut self, id: StmtId) -> Option<&mut Stmt> {
        self.classes
            .iter_mut()
            .flat_map(|c| c.methods.iter_mut())
            .find_map(|m| find_stmt_mut(&mut m.body, id))
    }

    /// Copy of this unit with every position, statement id and the source text
    /// cleared, for structural comparison.
    pub fn structure(&self) -> SourceUnit {
        let mut u = self.clone();
        u.source.clear();
        u.span = Span::default();
        for c in &mut u.classes {
            c.span = Span::default();
            c.name.span = Span::default();
            for f in &mut c.fields {
                f.span = Span::default();
                f.ty.span = Span::default();
                f.name.span = Span::default();
            }
            for m in &mut c.methods {
                m.span = Span::default();
                m.ret.span = Span::default();
                m.name.span = Span::default();
                for p in &mut m.params {
                    p.span = Span::default();
                    p.ty.span = Span::default();
                    p.name.span = Span::default();
                }
                clear_block(&mut m.body);
            }
        }
        u
    }

    pub fn structurally_eq(&self, other: &SourceUnit) -> bool {
        self.structure() == other.structure()
    }
}

fn find_stmt_mut(block: &mut Block, id: StmtId) -> Option<&mut Stmt> {
    for s in &mut block.stmts {
        if s.id == id {
            return Some(s);
        }
        let found = match &mut s.kind {
            StmtKind::If {
                then_block,
                else_block,
                ..
            } => find_stmt_mut(then_block, id)
                .or_else(|| else_block.as_mut().and_then(|b| find_stmt_mut(b, id))),
            StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => {
                find_stmt_mut(body, id)
            }
            _ => None,
        };
        if found.is_some() {
            return found;
        }
    }
    None
}

fn clear_block(b: &mut Block) {
    b.span = Span::default();
    for s in &mut b.stmts {
        s.span = Span::default();
        s.id = StmtId::default();
        match &mut s.kind {
            StmtKind::VarDecl { ty, name, init } => {
                ty.span = Span::default();
                name.span = Span::default();
                if let Some(e) = init {
                    clear_expr(e);
                }
            }
            StmtKind::Assign {
                target,
                op_span,
                value,
                ..
            } => {
                *op_span = Span::default();
                clear_expr(target);
                clear_expr(value);
            }
            StmtKind::If {
                cond,
                then_block,
                else_block,
            } => {
                clear_expr(cond);
                clear_block(then_block);
                if let Some(b) = else_block {
                    clear_block(b);
                }
            }
            StmtKind::While { cond, body } | StmtKind::DoWhile { body, cond } => {
                clear_expr(cond);
                clear_block(body);
            }
            StmtKind::Return { value } => {
                if let Some(e) = value {
                    clear_expr(e);
                }
            }
            StmtKind::Expr(e) => clear_expr(e),
        }
    }
}

fn clear_expr(e: &mut Expr) {
    e.span = Span::default();
    match &mut e.kind {
        ExprKind::Field { object, name } => {
            name.span = Span::default();
            clear_expr(object);
        }
        ExprKind::Call {
            receiver,
            name,
            args,
        } => {
            name.span = Span::default();
            if let Some(r) = receiver {
                clear_expr(r);
            }
            args.iter_mut().for_each(clear_expr);
        }
        ExprKind::Index { array, index } => {
            clear_expr(array);
            clear_expr(index);
        }
        ExprKind::Unary {
            op_span, operand, ..
        } => {
            *op_span = Span::default();
            clear_expr(operand);
        }
        ExprKind::Binary {
            op_span, lhs, rhs, ..
        } => {
            *op_span = Span::default();
            clear_expr(lhs);
            clear_expr(rhs);
        }
        _ => {}
    }
}
