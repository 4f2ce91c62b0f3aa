//! Canonical MiniJ printer: four-space indentation, one statement per line,
//! minimal parentheses.

use alloc::string::String;
use core::fmt::Write;

use super::ast::*;

pub fn render(unit: &SourceUnit) -> String {
    let mut out = String::new();
    for (i, class) in unit.classes.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        render_class(&mut out, class);
    }
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn render_class(out: &mut String, class: &ClassDecl) {
    let _ = writeln!(out, "class {} {{", class.name.name);
    for f in &class.fields {
        indent(out, 1);
        let _ = writeln!(out, "{} {};", f.ty.ty, f.name.name);
    }
    for m in &class.methods {
        indent(out, 1);
        let _ = write!(out, "{} {}(", m.ret.ty, m.name.name);
        for (i, p) in m.params.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{} {}", p.ty.ty, p.name.name);
        }
        out.push_str(") ");
        render_block(out, &m.body, 1);
        out.push('\n');
    }
    out.push_str("}\n");
}

/// Writes `{`, the statements, and the closing `}` without a trailing newline.
fn render_block(out: &mut String, block: &Block, depth: usize) {
    out.push_str("{\n");
    for s in &block.stmts {
        render_stmt(out, s, depth + 1);
    }
    indent(out, depth);
    out.push('}');
}

fn render_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    indent(out, depth);
    match &stmt.kind {
        StmtKind::VarDecl { ty, name, init } => {
            let _ = write!(out, "{} {}", ty.ty, name.name);
            if let Some(e) = init {
                out.push_str(" = ");
                render_expr_into(out, e);
            }
            out.push(';');
        }
        StmtKind::Assign {
            target, op, value, ..
        } => {
            render_expr_into(out, target);
            let _ = write!(out, " {} ", op.as_str());
            render_expr_into(out, value);
            out.push(';');
        }
        StmtKind::If {
            cond,
            then_block,
            else_block,
        } => {
            out.push_str("if (");
            render_expr_into(out, cond);
            out.push_str(") ");
            render_block(out, then_block, depth);
            if let Some(b) = else_block {
                out.push_str(" else ");
                render_block(out, b, depth);
            }
        }
        StmtKind::While { cond, body } => {
            out.push_str("while (");
            render_expr_into(out, cond);
            out.push_str(") ");
            render_block(out, body, depth);
        }
        StmtKind::DoWhile { body, cond } => {
            out.push_str("do ");
            render_block(out, body, depth);
            out.push_str(" while (");
            render_expr_into(out, cond);
            out.push_str(");");
        }
        StmtKind::Return { value } => {
            out.push_str("return");
            if let Some(e) = value {
                out.push(' ');
                render_expr_into(out, e);
            }
            out.push(';');
        }
        StmtKind::Expr(e) => {
            render_expr_into(out, e);
            out.push(';');
        }
    }
    out.push('\n');
}

pub fn render_expr(e: &Expr) -> String {
    let mut out = String::new();
    render_expr_into(&mut out, e);
    out
}

fn render_expr_into(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Int(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Str(s) => escape_into(out, s),
        ExprKind::Null => out.push_str("null"),
        ExprKind::Name(n) | ExprKind::TypeRef(n) => out.push_str(n),
        ExprKind::Mask => out.push_str(super::MASK),
        ExprKind::Field { object, name } => {
            operand(out, object, POSTFIX_PRECEDENCE);
            out.push('.');
            out.push_str(&name.name);
        }
        ExprKind::Call {
            receiver,
            name,
            args,
        } => {
            if let Some(r) = receiver {
                operand(out, r, POSTFIX_PRECEDENCE);
                out.push('.');
            }
            out.push_str(&name.name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render_expr_into(out, a);
            }
            out.push(')');
        }
        ExprKind::Index { array, index } => {
            operand(out, array, POSTFIX_PRECEDENCE);
            out.push('[');
            render_expr_into(out, index);
            out.push(']');
        }
        ExprKind::Unary {
            op, operand: inner, ..
        } => {
            let sym = op.as_str();
            out.push_str(sym);
            let mut tail = String::new();
            operand(&mut tail, inner, UNARY_PRECEDENCE);
            // `- -a` must not collapse into `--a`.
            let last = sym.chars().last();
            if last.is_some() && tail.starts_with(last.unwrap()) && matches!(last, Some('-' | '+'))
            {
                out.push(' ');
            }
            out.push_str(&tail);
        }
        ExprKind::Binary { op, lhs, rhs, .. } => {
            let prec = op.precedence();
            operand(out, lhs, prec);
            let _ = write!(out, " {} ", op.as_str());
            operand(out, rhs, prec + 1);
        }
    }
}

/// Render `e`, parenthesized when it binds looser than `min_prec`.
fn operand(out: &mut String, e: &Expr, min_prec: u8) {
    if e.precedence() < min_prec {
        out.push('(');
        render_expr_into(out, e);
        out.push(')');
    } else {
        render_expr_into(out, e);
    }
}

fn escape_into(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
}
