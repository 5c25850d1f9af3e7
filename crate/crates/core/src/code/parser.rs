//! Recursive-descent injector from source text into the code model.

use super::lexer::{tokenize, Tok, Token};
use super::visit::renumber;
use super::*;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

/// Parse one script as file 0.
pub fn parse_source(source: &str, path: &str, mode: ParseMode) -> Result<CodeContainer> {
    parse_source_indexed(source, path, 0, mode)
}

pub fn parse_source_indexed(
    source: &str,
    path: &str,
    file_index: u32,
    mode: ParseMode,
) -> Result<CodeContainer> {
    let toks = tokenize(source).map_err(|e| Error::Syntax {
        path: path.to_string(),
        line: e.line,
        column: e.column,
        message: e.message,
    })?;
    let mut p = Parser {
        src: source,
        toks,
        pos: 0,
        mode,
        path,
        warnings: Vec::new(),
    };
    let statements = p.statements(false).map_err(|e| Error::Syntax {
        path: path.to_string(),
        line: e.line,
        column: e.column,
        message: e.message,
    })?;
    let mut cc = CodeContainer {
        kind: CodeContainerKind::Script,
        file_index,
        blocks: vec![CodeBlock {
            id: TMP,
            statements,
            locals: Vec::new(),
            callable: None,
        }],
        variable_decls: Vec::new(),
        warnings: p.warnings,
    };
    renumber(&mut cc);
    Ok(cc)
}

const TMP: NodeId = NodeId::new(0, 0);

#[derive(Debug)]
struct PErr {
    line: u32,
    column: u32,
    message: String,
}

type PResult<T> = std::result::Result<T, PErr>;

const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "class", "for", "do", "switch", "try", "catch", "throw", "async", "await", "import", "export",
    "yield", "break", "continue", "delete", "typeof", "instanceof", "of", "in",
];

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    mode: ParseMode,
    path: &'a str,
    warnings: Vec<Diagnostic>,
}

fn expr(kind: ExprKind) -> Expr {
    Expr { id: TMP, kind }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn tok(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        let t = self.tok();
        Err(PErr {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`, found {}", self.describe()))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Template => "template literal".into(),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !UNSUPPORTED_KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            Tok::Ident(s) => self.err(format!("unsupported construct `{s}`")),
            _ => self.err(format!("expected identifier, found {}", self.describe())),
        }
    }

    /// Statements up to end of input, or up to (not including) the closing
    /// brace of the current block.
    fn statements(&mut self, in_block: bool) -> PResult<Vec<Statement>> {
        let mut out = Vec::new();
        loop {
            if in_block && self.is_punct("}") {
                break;
            }
            if matches!(self.peek(), Tok::Eof) {
                if in_block {
                    return self.err("expected `}`");
                }
                break;
            }
            if self.eat_punct(";") {
                continue;
            }
            let start = self.pos;
            match self.statement() {
                Ok(s) => out.push(s),
                Err(e) if self.mode == ParseMode::Lenient => {
                    self.pos = start;
                    let opaque = self.skip_statement();
                    self.warnings.push(
                        Diagnostic::warning(format!("unsupported statement kept opaque: {}", e.message))
                            .at(Some(self.path), e.line, e.column),
                    );
                    out.push(opaque);
                }
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// Lenient recovery: consume one statement's worth of tokens, keeping its
    /// text verbatim.
    fn skip_statement(&mut self) -> Statement {
        let first = self.tok().clone();
        let start_pos = self.pos;
        let mut depth = 0i32;
        let mut last_end = first.end;
        loop {
            let t = self.tok().clone();
            match &t.tok {
                Tok::Eof => break,
                Tok::Punct("}") if depth == 0 => break,
                Tok::Punct(";") if depth == 0 => {
                    self.bump();
                    last_end = t.end;
                    break;
                }
                _ => {}
            }
            if self.pos > 0 && depth == 0 && t.line > self.toks[self.pos - 1].line && self.pos > start_pos {
                let prev = &self.toks[self.pos - 1].tok;
                let continues = matches!(
                    t.tok,
                    Tok::Punct("." | "(" | "[" | "," | ")" | "]" | "=>" | "+" | "-" | "&&" | "||" | "=" | ":" | "?")
                ) || matches!(prev, Tok::Punct("=" | "(" | "[" | "," | "+" | "-" | "=>" | "&&" | "||" | ":" | "?" | "{"));
                if !continues {
                    break;
                }
            }
            match &t.tok {
                Tok::Punct("(" | "[" | "{") => depth += 1,
                Tok::Punct(")" | "]" | "}") => depth -= 1,
                _ => {}
            }
            self.bump();
            last_end = t.end;
        }
        let text = self.src[first.start..last_end].to_string();
        Statement {
            id: TMP,
            span: Span {
                line: first.line,
                column: first.column,
                length: (last_end - first.start) as u32,
                offset: first.start as u32,
            },
            variant: StmtKind::ExpressionStmt {
                expr: expr(ExprKind::Opaque { text }),
            },
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        let first = self.tok().clone();
        let variant = self.statement_kind()?;
        let end = self.toks[self.pos.saturating_sub(1)].end.max(first.end);
        Ok(Statement {
            id: TMP,
            span: Span {
                line: first.line,
                column: first.column,
                length: (end - first.start) as u32,
                offset: first.start as u32,
            },
            variant,
        })
    }

    fn end_statement(&mut self) -> PResult<()> {
        if self.eat_punct(";") || self.is_punct("}") || matches!(self.peek(), Tok::Eof) {
            return Ok(());
        }
        // a following token on a new line starts the next statement
        if self.pos > 0 && self.tok().line > self.toks[self.pos - 1].line {
            return Ok(());
        }
        self.err(format!("expected `;`, found {}", self.describe()))
    }

    fn statement_kind(&mut self) -> PResult<StmtKind> {
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            Tok::Template => return self.err("template literals are not supported"),
            _ => String::new(),
        };
        match kw.as_str() {
            "const" | "let" | "var" => {
                self.bump();
                let decl = match kw.as_str() {
                    "const" => DeclKind::Const,
                    "let" => DeclKind::Let,
                    _ => DeclKind::Var,
                };
                if self.is_punct("{") || self.is_punct("[") {
                    return self.err("destructuring is not supported");
                }
                let name = self.ident()?;
                let init = if self.eat_punct("=") {
                    Some(self.expression()?)
                } else {
                    None
                };
                if self.is_punct(",") {
                    return self.err("multiple declarators are not supported");
                }
                self.end_statement()?;
                Ok(StmtKind::VariableDecl { decl, name, init })
            }
            "function" if matches!(self.peek_at(1), Tok::Ident(_)) => {
                self.bump();
                let name = self.ident()?;
                let params = self.params()?;
                let body = self.block(Some(CallableInfo {
                    params,
                    anonymous: false,
                }))?;
                Ok(StmtKind::FunctionDecl { name, body })
            }
            "if" => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.expression()?;
                self.expect_punct(")")?;
                let then = self.branch()?;
                let otherwise = if self.is_ident("else") {
                    self.bump();
                    Some(self.branch()?)
                } else {
                    None
                };
                Ok(StmtKind::If {
                    cond,
                    then,
                    otherwise,
                })
            }
            "while" => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.expression()?;
                self.expect_punct(")")?;
                let body = self.branch()?;
                Ok(StmtKind::While { cond, body })
            }
            "return" => {
                let line = self.tok().line;
                self.bump();
                let value = if self.is_punct(";")
                    || self.is_punct("}")
                    || matches!(self.peek(), Tok::Eof)
                    || self.tok().line > line
                {
                    None
                } else {
                    Some(self.expression()?)
                };
                self.end_statement()?;
                Ok(StmtKind::Return { value })
            }
            "else" => self.err("`else` without `if`"),
            k if UNSUPPORTED_KEYWORDS.contains(&k) => self.err(format!("unsupported construct `{k}`")),
            _ => {
                let target = self.expression()?;
                if self.eat_punct("=") {
                    match target.kind {
                        ExprKind::VarAccess { .. }
                        | ExprKind::PropertyAccess { .. }
                        | ExprKind::IndexAccess { .. } => {}
                        _ => return self.err("invalid assignment target"),
                    }
                    let value = self.expression()?;
                    self.end_statement()?;
                    Ok(StmtKind::Assignment { target, value })
                } else {
                    self.end_statement()?;
                    Ok(StmtKind::ExpressionStmt { expr: target })
                }
            }
        }
    }

    /// Body of an `if`/`else`/`while`: a braced block, an `else if`, or a
    /// single statement wrapped into a block.
    fn branch(&mut self) -> PResult<CodeBlock> {
        if self.is_punct("{") {
            return self.block(None);
        }
        let s = self.statement()?;
        Ok(CodeBlock {
            id: TMP,
            statements: vec![s],
            locals: Vec::new(),
            callable: None,
        })
    }

    fn block(&mut self, callable: Option<CallableInfo>) -> PResult<CodeBlock> {
        self.expect_punct("{")?;
        let statements = self.statements(true)?;
        self.expect_punct("}")?;
        Ok(CodeBlock {
            id: TMP,
            statements,
            locals: Vec::new(),
            callable,
        })
    }

    fn params(&mut self) -> PResult<Vec<String>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        while !self.is_punct(")") {
            if self.is_punct("{") || self.is_punct("[") || self.is_punct("...") {
                return self.err("destructuring parameters are not supported");
            }
            let p = self.ident()?;
            if params.contains(&p) {
                return self.err(format!("duplicate parameter `{p}`"));
            }
            params.push(p);
            if self.is_punct("=") {
                return self.err("default parameters are not supported");
            }
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    fn expression(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        let Tok::Punct(p) = self.peek() else {
            return None;
        };
        Some(match *p {
            "==" => BinaryOp::Eq,
            "===" => BinaryOp::StrictEq,
            "!=" => BinaryOp::Ne,
            "!==" => BinaryOp::StrictNe,
            ">=" => BinaryOp::Ge,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            "<" => BinaryOp::Lt,
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "&&" => BinaryOp::And,
            "||" => BinaryOp::Or,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            lhs = expr(ExprKind::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            });
        }
        match self.peek() {
            Tok::Punct(p @ ("*" | "/" | "%" | "?" | "!" | "&" | "|")) => {
                let p = *p;
                self.err(format!("unsupported operator `{p}`"))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.is_punct("-") {
            if let Tok::Num(n) = self.peek_at(1).clone() {
                self.bump();
                self.bump();
                return self.postfix(number_literal(&format!("-{n}")));
            }
            return self.err("unsupported unary operator `-`");
        }
        if self.is_punct("!") {
            return self.err("unsupported unary operator `!`");
        }
        let primary = self.primary()?;
        self.postfix(primary)
    }

    fn postfix(&mut self, mut e: Expr) -> PResult<Expr> {
        loop {
            if self.eat_punct(".") {
                let property = match self.peek().clone() {
                    Tok::Ident(s) => {
                        self.bump();
                        s
                    }
                    _ => return self.err("expected property name"),
                };
                e = expr(ExprKind::PropertyAccess {
                    object: Box::new(e),
                    property,
                });
            } else if self.eat_punct("[") {
                let index = self.expression()?;
                self.expect_punct("]")?;
                e = expr(ExprKind::IndexAccess {
                    object: Box::new(e),
                    index: Box::new(index),
                });
            } else if self.is_punct("(") {
                let args = self.args()?;
                e = match e.kind {
                    ExprKind::VarAccess { name } => expr(ExprKind::Call {
                        receiver: None,
                        method: name,
                        args,
                    }),
                    ExprKind::PropertyAccess { property, .. } if property == "then" => {
                        return self.err("promise chains are not supported")
                    }
                    ExprKind::PropertyAccess { object, property } => expr(ExprKind::Call {
                        receiver: Some(object),
                        method: property,
                        args,
                    }),
                    _ => return self.err("unsupported callee expression"),
                };
            } else if matches!(self.peek(), Tok::Template) {
                return self.err("template literals are not supported");
            } else {
                return Ok(e);
            }
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        while !self.is_punct(")") {
            if self.is_punct("...") {
                return self.err("spread arguments are not supported");
            }
            args.push(self.expression()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn arrow_ahead(&self) -> bool {
        // `(` [ident {, ident}] `)` `=>`
        let mut i = 1;
        loop {
            match self.peek_at(i) {
                Tok::Punct(")") => return matches!(self.peek_at(i + 1), Tok::Punct("=>")),
                Tok::Ident(_) => {}
                Tok::Punct(",") => {}
                _ => return false,
            }
            i += 1;
        }
    }

    fn arrow_body(&mut self, params: Vec<String>) -> PResult<Expr> {
        self.expect_punct("=>")?;
        let info = CallableInfo {
            params: params.clone(),
            anonymous: true,
        };
        let body = if self.is_punct("{") {
            self.block(Some(info))?
        } else {
            let first = self.tok().clone();
            let value = self.expression()?;
            let end = self.toks[self.pos - 1].end;
            CodeBlock {
                id: TMP,
                statements: vec![Statement {
                    id: TMP,
                    span: Span {
                        line: first.line,
                        column: first.column,
                        length: (end - first.start) as u32,
                        offset: first.start as u32,
                    },
                    variant: StmtKind::Return { value: Some(value) },
                }],
                locals: Vec::new(),
                callable: Some(info),
            }
        };
        Ok(expr(ExprKind::Lambda {
            params,
            body,
            arrow: true,
        }))
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(number_literal(&n))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(expr(ExprKind::Literal {
                    kind: LiteralKind::String,
                    lexeme: s,
                }))
            }
            Tok::Template => self.err("template literals are not supported"),
            Tok::Ident(name) => match name.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(expr(ExprKind::Literal {
                        kind: LiteralKind::Bool,
                        lexeme: name,
                    }))
                }
                "null" => {
                    self.bump();
                    Ok(expr(ExprKind::Literal {
                        kind: LiteralKind::Null,
                        lexeme: name,
                    }))
                }
                "function" => {
                    self.bump();
                    if matches!(self.peek(), Tok::Ident(_)) {
                        return self.err("named function expressions are not supported");
                    }
                    let params = self.params()?;
                    let body = self.block(Some(CallableInfo {
                        params: params.clone(),
                        anonymous: true,
                    }))?;
                    Ok(expr(ExprKind::Lambda {
                        params,
                        body,
                        arrow: false,
                    }))
                }
                "new" => {
                    self.bump();
                    let class_name = self.ident()?;
                    let args = if self.is_punct("(") { self.args()? } else { Vec::new() };
                    Ok(expr(ExprKind::New { class_name, args }))
                }
                _ => {
                    let name = self.ident()?;
                    if self.is_punct("=>") {
                        return self.arrow_body(vec![name]);
                    }
                    Ok(expr(ExprKind::VarAccess { name }))
                }
            },
            Tok::Punct("(") => {
                if self.arrow_ahead() {
                    let params = self.params()?;
                    return self.arrow_body(params);
                }
                self.bump();
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Punct("{") => {
                self.bump();
                let mut pairs = Vec::new();
                while !self.is_punct("}") {
                    let key = match self.peek().clone() {
                        Tok::Ident(s) => s,
                        Tok::Str(s) => s,
                        Tok::Num(n) => n,
                        Tok::Punct("...") => return self.err("object spread is not supported"),
                        Tok::Punct("[") => return self.err("computed keys are not supported"),
                        _ => return self.err(format!("expected property key, found {}", self.describe())),
                    };
                    let shorthand_ok = matches!(self.peek(), Tok::Ident(_));
                    self.bump();
                    let value = if self.eat_punct(":") {
                        self.expression()?
                    } else if shorthand_ok && (self.is_punct(",") || self.is_punct("}")) {
                        expr(ExprKind::VarAccess { name: key.clone() })
                    } else {
                        return self.err("unsupported object member");
                    };
                    if pairs.iter().any(|(k, _): &(String, Expr)| *k == key) {
                        return self.err(format!("duplicate key `{key}`"));
                    }
                    pairs.push((key, value));
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct("}")?;
                Ok(expr(ExprKind::ObjectLiteral { pairs }))
            }
            Tok::Punct("[") => {
                self.bump();
                let mut items = Vec::new();
                while !self.is_punct("]") {
                    if self.is_punct("...") {
                        return self.err("array spread is not supported");
                    }
                    items.push(self.expression()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct("]")?;
                Ok(expr(ExprKind::ArrayLiteral { items }))
            }
            _ => self.err(format!("unexpected {}", self.describe())),
        }
    }
}

fn number_literal(n: &str) -> Expr {
    let is_double = n.contains('.') || n.contains('e') || n.contains('E');
    expr(ExprKind::Literal {
        kind: if is_double { LiteralKind::Double } else { LiteralKind::Int },
        lexeme: n.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> CodeContainer {
        parse_source(src, "t.js", ParseMode::Strict).unwrap()
    }

    #[test]
    fn empty_source_gives_one_empty_block() {
        let cc = parse("");
        assert_eq!(cc.blocks.len(), 1);
        assert!(cc.body().statements.is_empty());
        assert!(cc.warnings.is_empty());
    }

    #[test]
    fn let_with_var_init() {
        let cc = parse("let x = y;");
        let stmts = &cc.body().statements;
        assert_eq!(stmts.len(), 1);
        match &stmts[0].variant {
            StmtKind::VariableDecl { name, init: Some(init), .. } => {
                assert_eq!(name, "x");
                assert_eq!(init.kind, ExprKind::VarAccess { name: "y".into() });
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn call_chain_nests_receivers() {
        let cc = parse("a.b(x).c(y);");
        let StmtKind::ExpressionStmt { expr } = &cc.body().statements[0].variant else {
            panic!()
        };
        let ExprKind::Call { receiver: Some(r), method, .. } = &expr.kind else { panic!() };
        assert_eq!(method, "c");
        let ExprKind::Call { receiver: Some(r2), method: m2, .. } = &r.kind else { panic!() };
        assert_eq!(m2, "b");
        assert_eq!(r2.kind, ExprKind::VarAccess { name: "a".into() });
    }

    #[test]
    fn strict_rejects_unsupported_with_position() {
        let err = parse_source("let a = 1;\nclass Foo {}", "t.js", ParseMode::Strict).unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (2, 1)),
            other => panic!("{other}"),
        }
        assert!(parse_source("let s = `x`;", "t.js", ParseMode::Strict).is_err());
        assert!(parse_source("async function f() {}", "t.js", ParseMode::Strict).is_err());
        assert!(parse_source("const { a } = b;", "t.js", ParseMode::Strict).is_err());
    }

    #[test]
    fn lenient_keeps_unsupported_statements_opaque() {
        let src = "let a = 1;\nclass Foo {\n  m() {}\n}\nf(a);\n";
        let cc = parse_source(src, "t.js", ParseMode::Lenient).unwrap();
        let stmts = &cc.body().statements;
        assert_eq!(stmts.len(), 3);
        match &stmts[1].variant {
            StmtKind::ExpressionStmt { expr } => {
                assert_eq!(expr.kind, ExprKind::Opaque { text: "class Foo {\n  m() {}\n}".into() })
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(cc.warnings.len(), 1);
    }

    #[test]
    fn lenient_still_fails_on_unbalanced_delimiters() {
        assert!(parse_source("f(a;", "t.js", ParseMode::Lenient).is_err());
    }

    #[test]
    fn else_if_and_single_statement_bodies() {
        let cc = parse("if (a) f(); else if (b) { g(); } else h();");
        let StmtKind::If { otherwise: Some(e), then, .. } = &cc.body().statements[0].variant else {
            panic!()
        };
        assert_eq!(then.statements.len(), 1);
        assert!(matches!(e.statements[0].variant, StmtKind::If { .. }));
    }

    #[test]
    fn arrow_forms() {
        let cc = parse("f(x => x.a, (a, b) => { g(a); }, function (e) { return e; });");
        let StmtKind::ExpressionStmt { expr } = &cc.body().statements[0].variant else { panic!() };
        let ExprKind::Call { args, .. } = &expr.kind else { panic!() };
        assert_eq!(args.len(), 3);
        assert!(matches!(&args[0].kind, ExprKind::Lambda { params, arrow: true, .. } if params == &["x"]));
        assert!(matches!(&args[2].kind, ExprKind::Lambda { arrow: false, .. }));
    }

    #[test]
    fn precedence() {
        let cc = parse("x = a + b >= 5 && c;");
        let StmtKind::Assignment { value, .. } = &cc.body().statements[0].variant else { panic!() };
        let ExprKind::Binary { op, lhs, .. } = &value.kind else { panic!() };
        assert_eq!(*op, BinaryOp::And);
        assert!(matches!(&lhs.kind, ExprKind::Binary { op: BinaryOp::Ge, .. }));
    }

    #[test]
    fn duplicate_params_rejected() {
        assert!(parse_source("f((a, a) => {});", "t.js", ParseMode::Strict).is_err());
    }

    #[test]
    fn spans_cover_statement_text() {
        let src = "let a = 1;\n  f(a,\n b);\n";
        let cc = parse(src);
        let s = &cc.body().statements[1];
        assert_eq!((s.span.line, s.span.column), (2, 3));
        let text = &src[s.span.offset as usize..(s.span.offset + s.span.length) as usize];
        assert_eq!(text, "f(a,\n b);");
    }
}
