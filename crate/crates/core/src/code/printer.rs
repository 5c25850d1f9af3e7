//! Regeneration of source text from the code model.

use super::*;

const INDENT: &str = "  ";

/// Source text of every file in the model, keyed by relative path.
pub fn regenerate(model: &CodeModel) -> Vec<(String, String)> {
    model
        .files()
        .into_iter()
        .map(|(path, cc)| (path.to_string(), regenerate_container(cc)))
        .collect()
}

pub fn regenerate_container(cc: &CodeContainer) -> String {
    cc.blocks.iter().map(|b| print_block_body(b, 0)).collect()
}

/// Statements of a block, one per line, at the given indent depth.
pub fn print_block_body(block: &CodeBlock, depth: usize) -> String {
    let mut out = String::new();
    for s in &block.statements {
        print_stmt(s, depth, &mut out);
    }
    out
}

/// One statement with its trailing newline.
pub fn print_statement(s: &Statement, depth: usize) -> String {
    let mut out = String::new();
    print_stmt(s, depth, &mut out);
    out
}

pub fn print_expr(e: &Expr) -> String {
    expr_text(e, 0)
}

fn pad(depth: usize) -> String {
    INDENT.repeat(depth)
}

fn print_stmt(s: &Statement, depth: usize, out: &mut String) {
    out.push_str(&pad(depth));
    match &s.variant {
        StmtKind::ExpressionStmt {
            expr: Expr {
                kind: ExprKind::Opaque { text },
                ..
            },
        } => out.push_str(text),
        StmtKind::ExpressionStmt { expr } => {
            out.push_str(&expr_text(expr, depth));
            out.push(';');
        }
        StmtKind::VariableDecl { decl, name, init } => {
            out.push_str(decl.keyword());
            out.push(' ');
            out.push_str(name);
            if let Some(e) = init {
                out.push_str(" = ");
                out.push_str(&expr_text(e, depth));
            }
            out.push(';');
        }
        StmtKind::Assignment { target, value } => {
            out.push_str(&expr_text(target, depth));
            out.push_str(" = ");
            out.push_str(&expr_text(value, depth));
            out.push(';');
        }
        StmtKind::If {
            cond,
            then,
            otherwise,
        } => {
            print_if(cond, then, otherwise.as_ref(), depth, out);
        }
        StmtKind::While { cond, body } => {
            out.push_str("while (");
            out.push_str(&expr_text(cond, depth));
            out.push_str(") ");
            print_braced(body, depth, out);
        }
        StmtKind::Return { value } => {
            out.push_str("return");
            if let Some(e) = value {
                out.push(' ');
                out.push_str(&expr_text(e, depth));
            }
            out.push(';');
        }
        StmtKind::FunctionDecl { name, body } => {
            out.push_str("function ");
            out.push_str(name);
            let params = body.callable.as_ref().map(|c| c.params.join(", ")).unwrap_or_default();
            out.push_str(&format!("({params}) "));
            print_braced(body, depth, out);
        }
    }
    out.push('\n');
}

fn print_if(cond: &Expr, then: &CodeBlock, otherwise: Option<&CodeBlock>, depth: usize, out: &mut String) {
    out.push_str("if (");
    out.push_str(&expr_text(cond, depth));
    out.push_str(") ");
    print_braced(then, depth, out);
    if let Some(e) = otherwise {
        out.push_str(" else ");
        match e.statements.as_slice() {
            [Statement {
                variant:
                    StmtKind::If {
                        cond,
                        then,
                        otherwise,
                    },
                ..
            }] => print_if(cond, then, otherwise.as_ref(), depth, out),
            _ => print_braced(e, depth, out),
        }
    }
}

fn print_braced(block: &CodeBlock, depth: usize, out: &mut String) {
    if block.statements.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    out.push_str(&print_block_body(block, depth + 1));
    out.push_str(&pad(depth));
    out.push('}');
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\0' => out.push_str("\\0"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
}

/// Expressions that must be parenthesised when used as a receiver or
/// operand.
fn needs_parens_as_object(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Binary { .. } | ExprKind::Lambda { .. })
}

fn object_text(e: &Expr, depth: usize) -> String {
    if needs_parens_as_object(e) {
        format!("({})", expr_text(e, depth))
    } else {
        expr_text(e, depth)
    }
}

fn operand_text(e: &Expr, depth: usize, min_prec: u8) -> String {
    let wrap = match &e.kind {
        ExprKind::Binary { op, .. } => op.precedence() < min_prec,
        ExprKind::Lambda { .. } => true,
        _ => false,
    };
    if wrap {
        format!("({})", expr_text(e, depth))
    } else {
        expr_text(e, depth)
    }
}

fn list(items: &[Expr], depth: usize) -> String {
    items.iter().map(|a| expr_text(a, depth)).collect::<Vec<_>>().join(", ")
}

fn expr_text(e: &Expr, depth: usize) -> String {
    match &e.kind {
        ExprKind::Literal { kind, lexeme } => match kind {
            LiteralKind::String => quote(lexeme),
            _ => lexeme.clone(),
        },
        ExprKind::VarAccess { name } => name.clone(),
        ExprKind::PropertyAccess { object, property } => {
            format!("{}.{property}", object_text(object, depth))
        }
        ExprKind::IndexAccess { object, index } => {
            format!("{}[{}]", object_text(object, depth), expr_text(index, depth))
        }
        ExprKind::Call {
            receiver,
            method,
            args,
        } => match receiver {
            Some(r) => format!("{}.{method}({})", object_text(r, depth), list(args, depth)),
            None => format!("{method}({})", list(args, depth)),
        },
        ExprKind::Lambda {
            params,
            body,
            arrow,
        } => {
            let mut out = if *arrow {
                format!("({}) => ", params.join(", "))
            } else {
                format!("function ({}) ", params.join(", "))
            };
            print_braced(body, depth, &mut out);
            out
        }
        ExprKind::ObjectLiteral { pairs } => {
            if pairs.is_empty() {
                return "{}".into();
            }
            let inner = pairs
                .iter()
                .map(|(k, v)| {
                    let key = if is_ident(k) { k.clone() } else { quote(k) };
                    format!("{key}: {}", expr_text(v, depth))
                })
                .collect::<Vec<_>>()
                .join(", ");
            format!("{{ {inner} }}")
        }
        ExprKind::ArrayLiteral { items } => format!("[{}]", list(items, depth)),
        ExprKind::New { class_name, args } => format!("new {class_name}({})", list(args, depth)),
        ExprKind::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            format!(
                "{} {} {}",
                operand_text(lhs, depth, p),
                op.symbol(),
                operand_text(rhs, depth, p + 1)
            )
        }
        ExprKind::Opaque { text } => text.clone(),
    }
}
