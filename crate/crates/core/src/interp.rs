//! Deterministic big-step interpreter for validated MiniJ programs.

use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;

use crate::lang::ast::*;

pub const DEFAULT_FUEL: u64 = 100_000;
pub const MAX_CALL_DEPTH: usize = 256;
/// Nesting limit when converting a result into plain data.
const DATA_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuntimeErrorKind {
    DivisionByZero,
    NullDereference,
    IndexOutOfBounds,
    Overflow,
    StackOverflow,
    /// The test names a class or method the program lacks.
    MissingEntry,
}

impl RuntimeErrorKind {
    pub const ALL: [RuntimeErrorKind; 6] = [
        RuntimeErrorKind::DivisionByZero,
        RuntimeErrorKind::NullDereference,
        RuntimeErrorKind::IndexOutOfBounds,
        RuntimeErrorKind::Overflow,
        RuntimeErrorKind::StackOverflow,
        RuntimeErrorKind::MissingEntry,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuntimeErrorKind::DivisionByZero => "division-by-zero",
            RuntimeErrorKind::NullDereference => "null-dereference",
            RuntimeErrorKind::IndexOutOfBounds => "index-out-of-bounds",
            RuntimeErrorKind::Overflow => "overflow",
            RuntimeErrorKind::StackOverflow => "stack-overflow",
            RuntimeErrorKind::MissingEntry => "missing-entry",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        RuntimeErrorKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for RuntimeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Plain data crossing the test boundary: arguments and observed results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Data {
    Int(i64),
    Bool(bool),
    Str(String),
    Null,
    Array(Vec<Data>),
    Object {
        class: String,
        fields: Vec<(String, Data)>,
    },
}

impl Data {
    /// Copy with object fields sorted by name at every depth.
    pub fn normalized(&self) -> Data {
        match self {
            Data::Array(items) => Data::Array(items.iter().map(Data::normalized).collect()),
            Data::Object { class, fields } => {
                let mut fields: Vec<(String, Data)> =
                    fields.iter().map(|(n, v)| (n.clone(), v.normalized())).collect();
                fields.sort_by(|a, b| a.0.cmp(&b.0));
                Data::Object {
                    class: class.clone(),
                    fields,
                }
            }
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    Value(Data),
    Error(RuntimeErrorKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub name: String,
    /// `Class.method`.
    pub entry: String,
    pub args: Vec<Data>,
    pub expect: Expectation,
}

impl TestCase {
    pub fn entry_parts(&self) -> Option<(&str, &str)> {
        self.entry.split_once('.')
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    FailValue(Data),
    RuntimeError(RuntimeErrorKind),
    Timeout,
}

impl Verdict {
    pub fn kind_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::FailValue(_) => "fail-value",
            Verdict::RuntimeError(_) => "runtime-error",
            Verdict::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestOutcome {
    pub verdict: Verdict,
}

impl TestOutcome {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone)]
pub struct Object {
    pub class: String,
    pub fields: Vec<(String, Value)>,
}

#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(String),
    Null,
    Array(Rc<RefCell<Vec<Value>>>),
    Object(Rc<RefCell<Object>>),
}

impl Value {
    pub fn default_for(ty: &Type) -> Value {
        match ty {
            Type::Int => Value::Int(0),
            Type::Boolean => Value::Bool(false),
            _ => Value::Null,
        }
    }

    fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Null, Value::Null) => true,
            (Value::Array(a), Value::Array(b)) => Rc::ptr_eq(a, b),
            (Value::Object(a), Value::Object(b)) => Rc::ptr_eq(a, b),
            _ => false,
        }
    }

    fn display(&self) -> String {
        match self {
            Value::Int(v) => format!("{v}"),
            Value::Bool(b) => format!("{b}"),
            Value::Str(s) => s.clone(),
            Value::Null => "null".to_string(),
            Value::Array(a) => format!("array[{}]", a.borrow().len()),
            Value::Object(o) => o.borrow().class.clone(),
        }
    }

    pub fn to_data(&self) -> Data {
        self.to_data_at(0)
    }

    fn to_data_at(&self, depth: usize) -> Data {
        if depth > DATA_DEPTH {
            return Data::Null;
        }
        match self {
            Value::Int(v) => Data::Int(*v),
            Value::Bool(b) => Data::Bool(*b),
            Value::Str(s) => Data::Str(s.clone()),
            Value::Null => Data::Null,
            Value::Array(a) => Data::Array(a.borrow().iter().map(|v| v.to_data_at(depth + 1)).collect()),
            Value::Object(o) => {
                let o = o.borrow();
                Data::Object {
                    class: o.class.clone(),
                    fields: o
                        .fields
                        .iter()
                        .map(|(n, v)| (n.clone(), v.to_data_at(depth + 1)))
                        .collect(),
                }
            }
        }
    }
}

fn new_object(unit: &SourceUnit, class: &ClassDecl) -> Value {
    let _ = unit;
    Value::Object(Rc::new(RefCell::new(Object {
        class: class.name.name.clone(),
        fields: class
            .fields
            .iter()
            .map(|f| (f.name.name.clone(), Value::default_for(&f.ty.ty)))
            .collect(),
    })))
}

/// Build a runtime value from test data; `None` if an object names an
/// unknown class or field.
pub fn from_data(unit: &SourceUnit, d: &Data) -> Option<Value> {
    Some(match d {
        Data::Int(v) => Value::Int(*v),
        Data::Bool(b) => Value::Bool(*b),
        Data::Str(s) => Value::Str(s.clone()),
        Data::Null => Value::Null,
        Data::Array(items) => Value::Array(Rc::new(RefCell::new(
            items
                .iter()
                .map(|i| from_data(unit, i))
                .collect::<Option<Vec<_>>>()?,
        ))),
        Data::Object { class, fields } => {
            let decl = unit.class(class)?;
            let obj = new_object(unit, decl);
            if let Value::Object(o) = &obj {
                for (name, v) in fields {
                    let val = from_data(unit, v)?;
                    let mut o = o.borrow_mut();
                    let slot = o.fields.iter_mut().find(|(n, _)| n == name)?;
                    slot.1 = val;
                }
            }
            obj
        }
    })
}

/// Whether `d` may be passed where `ty` is expected.
pub fn data_fits(unit: &SourceUnit, d: &Data, ty: &Type) -> bool {
    match (d, ty) {
        (Data::Int(_), Type::Int) | (Data::Bool(_), Type::Boolean) | (Data::Str(_), Type::Str) => {
            true
        }
        (Data::Null, t) => t.is_reference(),
        (Data::Array(items), Type::Array(inner)) => items.iter().all(|i| data_fits(unit, i, inner)),
        (Data::Object { class, fields }, Type::Class(c)) => {
            class == c
                && unit.class(c).is_some_and(|decl| {
                    fields.iter().all(|(n, v)| {
                        decl.field(n).is_some_and(|f| data_fits(unit, v, &f.ty.ty))
                    })
                })
        }
        _ => false,
    }
}

/// Why a test cannot run against a program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryProblem {
    Malformed,
    MissingClass,
    MissingMethod,
    Arity { expected: usize, found: usize },
    ArgumentType { index: usize },
}

impl fmt::Display for EntryProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryProblem::Malformed => f.write_str("entry must be Class.method"),
            EntryProblem::MissingClass => f.write_str("unknown class"),
            EntryProblem::MissingMethod => f.write_str("unknown method"),
            EntryProblem::Arity { expected, found } => {
                write!(f, "expects {expected} arguments, got {found}")
            }
            EntryProblem::ArgumentType { index } => write!(f, "argument {index} has the wrong type"),
        }
    }
}

pub fn check_test(unit: &SourceUnit, test: &TestCase) -> Result<(), EntryProblem> {
    let (c, m) = test.entry_parts().ok_or(EntryProblem::Malformed)?;
    let class = unit.class(c).ok_or(EntryProblem::MissingClass)?;
    let method = class.method(m).ok_or(EntryProblem::MissingMethod)?;
    if method.params.len() != test.args.len() {
        return Err(EntryProblem::Arity {
            expected: method.params.len(),
            found: test.args.len(),
        });
    }
    for (i, (p, a)) in method.params.iter().zip(&test.args).enumerate() {
        if !data_fits(unit, a, &p.ty.ty) {
            return Err(EntryProblem::ArgumentType { index: i });
        }
    }
    Ok(())
}

/// What a run produced, independent of any expectation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observation {
    Returned(Data),
    Error(RuntimeErrorKind),
    Timeout,
}

pub fn judge(observed: Observation, expect: &Expectation) -> TestOutcome {
    let verdict = match (observed, expect) {
        (Observation::Timeout, _) => Verdict::Timeout,
        (Observation::Returned(v), Expectation::Value(e)) if v.normalized() == e.normalized() => {
            Verdict::Pass
        }
        (Observation::Returned(v), _) => Verdict::FailValue(v.normalized()),
        (Observation::Error(k), Expectation::Error(e)) if k == *e => Verdict::Pass,
        (Observation::Error(k), _) => Verdict::RuntimeError(k),
    };
    TestOutcome { verdict }
}

/// Run one test on a fresh, default-initialised receiver.
pub fn run_test(program: &SourceUnit, test: &TestCase, fuel: u64) -> TestOutcome {
    judge(observe(program, test, fuel), &test.expect)
}

pub fn observe(program: &SourceUnit, test: &TestCase, fuel: u64) -> Observation {
    let missing = Observation::Error(RuntimeErrorKind::MissingEntry);
    let Some((c, m)) = test.entry_parts() else {
        return missing;
    };
    let Some(ci) = program.classes.iter().position(|k| k.name.name == c) else {
        return missing;
    };
    let Some(method) = program.classes[ci].method(m) else {
        return missing;
    };
    if method.params.len() != test.args.len() {
        return missing;
    }
    let Some(args) = test
        .args
        .iter()
        .map(|a| from_data(program, a))
        .collect::<Option<Vec<_>>>()
    else {
        return missing;
    };
    let receiver = new_object(program, &program.classes[ci]);
    let mut it = Interp {
        unit: program,
        fuel,
        depth: 0,
        rng: RANDOM_SEED,
    };
    match it.invoke(ci, method, receiver, args) {
        Ok(v) => Observation::Returned(v.to_data()),
        Err(Halt::Error(k)) => Observation::Error(k),
        Err(Halt::Timeout) => Observation::Timeout,
    }
}

const RANDOM_SEED: u64 = 0x2545_f491_4f6c_dd1d;

enum Halt {
    Error(RuntimeErrorKind),
    Timeout,
}

type R<T> = Result<T, Halt>;

fn err<T>(k: RuntimeErrorKind) -> R<T> {
    Err(Halt::Error(k))
}

enum Flow {
    Next,
    Return(Value),
}

struct Frame {
    class: usize,
    this: Value,
    scopes: Vec<Vec<(String, Value)>>,
}

impl Frame {
    fn local_mut(&mut self, name: &str) -> Option<&mut Value> {
        self.scopes
            .iter_mut()
            .rev()
            .find_map(|s| s.iter_mut().rev().find(|(n, _)| n == name).map(|(_, v)| v))
    }
}

struct Interp<'u> {
    unit: &'u SourceUnit,
    fuel: u64,
    depth: usize,
    rng: u64,
}

fn int(v: &Value) -> R<i64> {
    match v {
        Value::Int(i) => Ok(*i),
        Value::Null => err(RuntimeErrorKind::NullDereference),
        _ => unreachable!("validated program"),
    }
}

fn boolean(v: &Value) -> R<bool> {
    match v {
        Value::Bool(b) => Ok(*b),
        _ => err(RuntimeErrorKind::NullDereference),
    }
}

fn checked(v: Option<i64>) -> R<Value> {
    v.map(Value::Int).ok_or(Halt::Error(RuntimeErrorKind::Overflow))
}

fn field_of(obj: &Value, name: &str) -> R<Value> {
    match obj {
        Value::Object(o) => Ok(o
            .borrow()
            .fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .unwrap_or(Value::Null)),
        Value::Array(a) if name == "length" => Ok(Value::Int(a.borrow().len() as i64)),
        _ => err(RuntimeErrorKind::NullDereference),
    }
}

fn set_field(obj: &Value, name: &str, v: Value) -> R<()> {
    match obj {
        Value::Object(o) => {
            if let Some(slot) = o.borrow_mut().fields.iter_mut().find(|(n, _)| n == name) {
                slot.1 = v;
            }
            Ok(())
        }
        _ => err(RuntimeErrorKind::NullDereference),
    }
}

fn element(arr: &Value, index: &Value) -> R<Value> {
    let i = int(index)?;
    match arr {
        Value::Array(a) => {
            let a = a.borrow();
            usize::try_from(i)
                .ok()
                .and_then(|i| a.get(i).cloned())
                .ok_or(Halt::Error(RuntimeErrorKind::IndexOutOfBounds))
        }
        _ => err(RuntimeErrorKind::NullDereference),
    }
}

fn set_element(arr: &Value, index: &Value, v: Value) -> R<()> {
    let i = int(index)?;
    match arr {
        Value::Array(a) => {
            let mut a = a.borrow_mut();
            let slot = usize::try_from(i)
                .ok()
                .and_then(|i| a.get_mut(i))
                .ok_or(Halt::Error(RuntimeErrorKind::IndexOutOfBounds))?;
            *slot = v;
            Ok(())
        }
        _ => err(RuntimeErrorKind::NullDereference),
    }
}

fn arith(op: BinaryOp, l: &Value, r: &Value) -> R<Value> {
    use BinaryOp::*;
    if op == Add && (matches!(l, Value::Str(_)) || matches!(r, Value::Str(_))) {
        return Ok(Value::Str(format!("{}{}", l.display(), r.display())));
    }
    let (a, b) = (int(l)?, int(r)?);
    match op {
        Add => checked(a.checked_add(b)),
        Sub => checked(a.checked_sub(b)),
        Mul => checked(a.checked_mul(b)),
        Div | Rem if b == 0 => err(RuntimeErrorKind::DivisionByZero),
        Div => checked(a.checked_div(b)),
        Rem => checked(a.checked_rem(b)),
        Lt => Ok(Value::Bool(a < b)),
        Le => Ok(Value::Bool(a <= b)),
        Gt => Ok(Value::Bool(a > b)),
        Ge => Ok(Value::Bool(a >= b)),
        Eq | Ne | And | Or => unreachable!("handled by caller"),
    }
}

/// Where an assignment stores its value.
enum Place {
    Local(String),
    Field(Value, String),
    Element(Value, Value),
}

impl<'u> Interp<'u> {
    fn tick(&mut self) -> R<()> {
        if self.fuel == 0 {
            return Err(Halt::Timeout);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn invoke(&mut self, class: usize, m: &'u MethodDecl, this: Value, args: Vec<Value>) -> R<Value> {
        if self.depth >= MAX_CALL_DEPTH {
            return err(RuntimeErrorKind::StackOverflow);
        }
        self.depth += 1;
        let params = m
            .params
            .iter()
            .map(|p| p.name.name.clone())
            .zip(args)
            .collect();
        let mut frame = Frame {
            class,
            this,
            scopes: alloc::vec![params],
        };
        let r = self.block(&mut frame, &m.body);
        self.depth -= 1;
        match r? {
            Flow::Return(v) => Ok(v),
            Flow::Next => Ok(Value::Null),
        }
    }

    fn block(&mut self, f: &mut Frame, b: &'u Block) -> R<Flow> {
        f.scopes.push(Vec::new());
        let mut out = Ok(Flow::Next);
        for s in &b.stmts {
            match self.stmt(f, s) {
                Ok(Flow::Next) => {}
                other => {
                    out = other;
                    break;
                }
            }
        }
        f.scopes.pop();
        out
    }

    fn stmt(&mut self, f: &mut Frame, s: &'u Stmt) -> R<Flow> {
        self.tick()?;
        match &s.kind {
            StmtKind::VarDecl { ty, name, init } => {
                let v = match init {
                    Some(e) => self.expr(f, e)?,
                    None => Value::default_for(&ty.ty),
                };
                f.scopes
                    .last_mut()
                    .expect("block scope")
                    .push((name.name.clone(), v));
            }
            StmtKind::Assign {
                target, op, value, ..
            } => {
                let place = self.place(f, target)?;
                let rhs = self.expr(f, value)?;
                let v = match op.arithmetic() {
                    Some(bop) => {
                        let cur = self.load(f, &place)?;
                        arith(bop, &cur, &rhs)?
                    }
                    None => rhs,
                };
                self.store(f, place, v)?;
            }
            StmtKind::If {
                cond,
                then_block,
                else_block,
            } => {
                let c = self.expr(f, cond)?;
                if boolean(&c)? {
                    return self.block(f, then_block);
                } else if let Some(b) = else_block {
                    return self.block(f, b);
                }
            }
            StmtKind::While { cond, body } => loop {
                let c = self.expr(f, cond)?;
                if !boolean(&c)? {
                    break;
                }
                if let Flow::Return(v) = self.block(f, body)? {
                    return Ok(Flow::Return(v));
                }
                self.tick()?;
            },
            StmtKind::DoWhile { body, cond } => loop {
                if let Flow::Return(v) = self.block(f, body)? {
                    return Ok(Flow::Return(v));
                }
                let c = self.expr(f, cond)?;
                if !boolean(&c)? {
                    break;
                }
                self.tick()?;
            },
            StmtKind::Return { value } => {
                let v = match value {
                    Some(e) => self.expr(f, e)?,
                    None => Value::Null,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::Expr(e) => {
                self.expr(f, e)?;
            }
        }
        Ok(Flow::Next)
    }

    fn place(&mut self, f: &mut Frame, e: &'u Expr) -> R<Place> {
        match &e.kind {
            ExprKind::Name(n) => {
                if f.local_mut(n).is_some() {
                    Ok(Place::Local(n.clone()))
                } else {
                    Ok(Place::Field(f.this.clone(), n.clone()))
                }
            }
            ExprKind::Field { object, name } => {
                let o = self.expr(f, object)?;
                Ok(Place::Field(o, name.name.clone()))
            }
            ExprKind::Index { array, index } => {
                let a = self.expr(f, array)?;
                let i = self.expr(f, index)?;
                Ok(Place::Element(a, i))
            }
            _ => unreachable!("validated lvalue"),
        }
    }

    fn load(&mut self, f: &mut Frame, p: &Place) -> R<Value> {
        match p {
            Place::Local(n) => Ok(f.local_mut(n).cloned().unwrap_or(Value::Null)),
            Place::Field(o, n) => field_of(o, n),
            Place::Element(a, i) => element(a, i),
        }
    }

    fn store(&mut self, f: &mut Frame, p: Place, v: Value) -> R<()> {
        match p {
            Place::Local(n) => {
                if let Some(slot) = f.local_mut(&n) {
                    *slot = v;
                }
                Ok(())
            }
            Place::Field(o, n) => set_field(&o, &n, v),
            Place::Element(a, i) => set_element(&a, &i, v),
        }
    }

    fn expr(&mut self, f: &mut Frame, e: &'u Expr) -> R<Value> {
        self.tick()?;
        match &e.kind {
            ExprKind::Int(v) => Ok(Value::Int(*v)),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Str(s) => Ok(Value::Str(s.clone())),
            ExprKind::Null => Ok(Value::Null),
            ExprKind::Name(n) => match f.local_mut(n) {
                Some(v) => Ok(v.clone()),
                None => field_of(&f.this, n),
            },
            ExprKind::TypeRef(_) | ExprKind::Mask => unreachable!("validated program"),
            ExprKind::Field { object, name } => {
                let o = self.expr(f, object)?;
                field_of(&o, &name.name)
            }
            ExprKind::Index { array, index } => {
                let a = self.expr(f, array)?;
                let i = self.expr(f, index)?;
                element(&a, &i)
            }
            ExprKind::Call {
                receiver,
                name,
                args,
            } => self.call(f, receiver.as_deref(), &name.name, args),
            ExprKind::Unary { op, operand, .. } => match op {
                UnaryOp::Not => Ok(Value::Bool(!boolean(&self.expr(f, operand)?)?)),
                UnaryOp::Neg => checked(int(&self.expr(f, operand)?)?.checked_neg()),
                UnaryOp::PreInc | UnaryOp::PreDec => {
                    let place = self.place(f, operand)?;
                    let cur = int(&self.load(f, &place)?)?;
                    let next = if *op == UnaryOp::PreInc {
                        cur.checked_add(1)
                    } else {
                        cur.checked_sub(1)
                    };
                    let v = checked(next)?;
                    self.store(f, place, v.clone())?;
                    Ok(v)
                }
            },
            ExprKind::Binary { op, lhs, rhs, .. } => {
                let l = self.expr(f, lhs)?;
                match op {
                    BinaryOp::And => {
                        if !boolean(&l)? {
                            return Ok(Value::Bool(false));
                        }
                        Ok(Value::Bool(boolean(&self.expr(f, rhs)?)?))
                    }
                    BinaryOp::Or => {
                        if boolean(&l)? {
                            return Ok(Value::Bool(true));
                        }
                        Ok(Value::Bool(boolean(&self.expr(f, rhs)?)?))
                    }
                    BinaryOp::Eq | BinaryOp::Ne => {
                        let r = self.expr(f, rhs)?;
                        Ok(Value::Bool(l.same(&r) == (*op == BinaryOp::Eq)))
                    }
                    _ => {
                        let r = self.expr(f, rhs)?;
                        arith(*op, &l, &r)
                    }
                }
            }
        }
    }

    fn call(
        &mut self,
        f: &mut Frame,
        receiver: Option<&'u Expr>,
        name: &str,
        args: &'u [Expr],
    ) -> R<Value> {
        if let Some(Expr {
            kind: ExprKind::TypeRef(_),
            ..
        }) = receiver
        {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(int(&self.expr(f, a)?)?);
            }
            return self.math(name, &vals);
        }
        let (class, this) = match receiver {
            None => (f.class, f.this.clone()),
            Some(r) => {
                let o = self.expr(f, r)?;
                let Value::Object(obj) = &o else {
                    return err(RuntimeErrorKind::NullDereference);
                };
                let cname = obj.borrow().class.clone();
                let ci = self
                    .unit
                    .classes
                    .iter()
                    .position(|c| c.name.name == cname)
                    .ok_or(Halt::Error(RuntimeErrorKind::MissingEntry))?;
                (ci, o)
            }
        };
        let mut vals = Vec::with_capacity(args.len());
        for a in args {
            vals.push(self.expr(f, a)?);
        }
        let unit = self.unit;
        let m = unit.classes[class]
            .method(name)
            .ok_or(Halt::Error(RuntimeErrorKind::MissingEntry))?;
        self.invoke(class, m, this, vals)
    }

    fn math(&mut self, name: &str, a: &[i64]) -> R<Value> {
        match (name, a) {
            ("abs", [x]) => checked(x.checked_abs()),
            ("max", [x, y]) => Ok(Value::Int(*x.max(y))),
            ("min", [x, y]) => Ok(Value::Int(*x.min(y))),
            ("random", []) => {
                self.rng = self
                    .rng
                    .wrapping_mul(6_364_136_223_846_793_005)
                    .wrapping_add(1_442_695_040_888_963_407);
                Ok(Value::Int((self.rng >> 33) as i64))
            }
            _ => err(RuntimeErrorKind::MissingEntry),
        }
    }
}
