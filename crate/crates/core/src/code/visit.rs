//! Traversal helpers over the code model.

use super::*;

/// Reassign dense pre-order ids within one file and rebuild block locals.
pub fn renumber(cc: &mut CodeContainer) {
    let mut counter = 0u32;
    let file = cc.file_index;
    for block in cc.blocks.iter_mut() {
        number_block(block, file, &mut counter);
    }
    cc.variable_decls = cc.blocks.first().map(|b| b.locals.clone()).unwrap_or_default();
}

fn next(file: u32, counter: &mut u32) -> NodeId {
    let id = NodeId::new(file, *counter);
    *counter += 1;
    id
}

fn number_block(block: &mut CodeBlock, file: u32, counter: &mut u32) {
    block.id = next(file, counter);
    for stmt in block.statements.iter_mut() {
        number_stmt(stmt, file, counter);
    }
    let old = std::mem::take(&mut block.locals);
    block.locals = block
        .statements
        .iter()
        .filter_map(|s| match &s.variant {
            StmtKind::VariableDecl { name, .. } => Some(VariableDecl {
                name: name.clone(),
                declared_type: old
                    .iter()
                    .find(|v| &v.name == name)
                    .map(|v| v.declared_type)
                    .unwrap_or_default(),
                init_site: Some(s.id),
            }),
            _ => None,
        })
        .collect();
}

fn number_stmt(stmt: &mut Statement, file: u32, counter: &mut u32) {
    stmt.id = next(file, counter);
    match &mut stmt.variant {
        StmtKind::ExpressionStmt { expr } => number_expr(expr, file, counter),
        StmtKind::VariableDecl { init, .. } => {
            if let Some(e) = init {
                number_expr(e, file, counter);
            }
        }
        StmtKind::Assignment { target, value } => {
            number_expr(target, file, counter);
            number_expr(value, file, counter);
        }
        StmtKind::If {
            cond,
            then,
            otherwise,
        } => {
            number_expr(cond, file, counter);
            number_block(then, file, counter);
            if let Some(b) = otherwise {
                number_block(b, file, counter);
            }
        }
        StmtKind::While { cond, body } => {
            number_expr(cond, file, counter);
            number_block(body, file, counter);
        }
        StmtKind::Return { value } => {
            if let Some(e) = value {
                number_expr(e, file, counter);
            }
        }
        StmtKind::FunctionDecl { body, .. } => number_block(body, file, counter),
    }
}

fn number_expr(e: &mut Expr, file: u32, counter: &mut u32) {
    e.id = next(file, counter);
    match &mut e.kind {
        ExprKind::Literal { .. } | ExprKind::VarAccess { .. } | ExprKind::Opaque { .. } => {}
        ExprKind::PropertyAccess { object, .. } => number_expr(object, file, counter),
        ExprKind::IndexAccess { object, index } => {
            number_expr(object, file, counter);
            number_expr(index, file, counter);
        }
        ExprKind::Call { receiver, args, .. } => {
            if let Some(r) = receiver {
                number_expr(r, file, counter);
            }
            for a in args {
                number_expr(a, file, counter);
            }
        }
        ExprKind::Lambda { body, .. } => number_block(body, file, counter),
        ExprKind::ObjectLiteral { pairs } => {
            for (_, v) in pairs {
                number_expr(v, file, counter);
            }
        }
        ExprKind::ArrayLiteral { items } => {
            for i in items {
                number_expr(i, file, counter);
            }
        }
        ExprKind::New { args, .. } => {
            for a in args {
                number_expr(a, file, counter);
            }
        }
        ExprKind::Binary { lhs, rhs, .. } => {
            number_expr(lhs, file, counter);
            number_expr(rhs, file, counter);
        }
    }
}

/// Top-level expressions of a statement, in source order.
pub fn stmt_exprs(stmt: &Statement) -> Vec<&Expr> {
    match &stmt.variant {
        StmtKind::ExpressionStmt { expr } => vec![expr],
        StmtKind::VariableDecl { init, .. } => init.iter().collect(),
        StmtKind::Assignment { target, value } => vec![target, value],
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
        StmtKind::Return { value } => value.iter().collect(),
        StmtKind::FunctionDecl { .. } => Vec::new(),
    }
}

pub fn stmt_exprs_mut(stmt: &mut Statement) -> Vec<&mut Expr> {
    match &mut stmt.variant {
        StmtKind::ExpressionStmt { expr } => vec![expr],
        StmtKind::VariableDecl { init, .. } => init.iter_mut().collect(),
        StmtKind::Assignment { target, value } => vec![target, value],
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
        StmtKind::Return { value } => value.iter_mut().collect(),
        StmtKind::FunctionDecl { .. } => Vec::new(),
    }
}

/// Nested blocks owned directly by a statement (not lambda bodies).
pub fn stmt_blocks(stmt: &Statement) -> Vec<&CodeBlock> {
    match &stmt.variant {
        StmtKind::If {
            then, otherwise, ..
        } => std::iter::once(then).chain(otherwise.iter()).collect(),
        StmtKind::While { body, .. } | StmtKind::FunctionDecl { body, .. } => vec![body],
        _ => Vec::new(),
    }
}

pub fn stmt_blocks_mut(stmt: &mut Statement) -> Vec<&mut CodeBlock> {
    match &mut stmt.variant {
        StmtKind::If {
            then, otherwise, ..
        } => std::iter::once(then).chain(otherwise.iter_mut()).collect(),
        StmtKind::While { body, .. } | StmtKind::FunctionDecl { body, .. } => vec![body],
        _ => Vec::new(),
    }
}

/// Direct sub-expressions, in source order. Lambda bodies are not entered.
pub fn expr_children(e: &Expr) -> Vec<&Expr> {
    match &e.kind {
        ExprKind::Literal { .. } | ExprKind::VarAccess { .. } | ExprKind::Opaque { .. } => Vec::new(),
        ExprKind::Lambda { .. } => Vec::new(),
        ExprKind::PropertyAccess { object, .. } => vec![object],
        ExprKind::IndexAccess { object, index } => vec![object, index],
        ExprKind::Call { receiver, args, .. } => receiver.iter().map(|r| &**r).chain(args.iter()).collect(),
        ExprKind::ObjectLiteral { pairs } => pairs.iter().map(|(_, v)| v).collect(),
        ExprKind::ArrayLiteral { items } => items.iter().collect(),
        ExprKind::New { args, .. } => args.iter().collect(),
        ExprKind::Binary { lhs, rhs, .. } => vec![lhs, rhs],
    }
}

pub fn expr_children_mut(e: &mut Expr) -> Vec<&mut Expr> {
    match &mut e.kind {
        ExprKind::Literal { .. } | ExprKind::VarAccess { .. } | ExprKind::Opaque { .. } => Vec::new(),
        ExprKind::Lambda { .. } => Vec::new(),
        ExprKind::PropertyAccess { object, .. } => vec![object],
        ExprKind::IndexAccess { object, index } => vec![object, index],
        ExprKind::Call { receiver, args, .. } => receiver
            .iter_mut()
            .map(|r| &mut **r)
            .chain(args.iter_mut())
            .collect(),
        ExprKind::ObjectLiteral { pairs } => pairs.iter_mut().map(|(_, v)| v).collect(),
        ExprKind::ArrayLiteral { items } => items.iter_mut().collect(),
        ExprKind::New { args, .. } => args.iter_mut().collect(),
        ExprKind::Binary { lhs, rhs, .. } => vec![lhs, rhs],
    }
}

/// Pre-order walk of an expression tree, lambda bodies excluded.
pub fn walk_expr<'a>(e: &'a Expr, f: &mut dyn FnMut(&'a Expr)) {
    f(e);
    for c in expr_children(e) {
        walk_expr(c, f);
    }
}

/// Lambdas reachable from an expression without entering other lambdas.
pub fn lambdas_in(e: &Expr) -> Vec<&Expr> {
    let mut out = Vec::new();
    walk_expr(e, &mut |x| {
        if matches!(x.kind, ExprKind::Lambda { .. }) {
            out.push(x);
        }
    });
    out
}

/// Pre-order walk over every statement of a block, including statements of
/// nested blocks and lambda bodies.
pub fn walk_stmts<'a>(block: &'a CodeBlock, f: &mut dyn FnMut(&'a Statement)) {
    for s in &block.statements {
        f(s);
        for e in stmt_exprs(s) {
            for l in lambdas_in(e) {
                if let ExprKind::Lambda { body, .. } = &l.kind {
                    walk_stmts(body, f);
                }
            }
        }
        for b in stmt_blocks(s) {
            walk_stmts(b, f);
        }
    }
}

/// Every expression of a block, pre-order, including lambda bodies.
pub fn walk_all_exprs<'a>(block: &'a CodeBlock, f: &mut dyn FnMut(&'a Expr)) {
    walk_stmts(block, &mut |s| {
        for e in stmt_exprs(s) {
            walk_expr(e, f);
        }
    });
}

/// Apply `f` to every block (pre-order), lambda bodies included. `f` may
/// edit the statement list; the edited list is then descended into.
pub fn for_each_block_mut(block: &mut CodeBlock, f: &mut dyn FnMut(&mut CodeBlock)) {
    f(block);
    for s in block.statements.iter_mut() {
        for e in stmt_exprs_mut(s) {
            lambda_blocks_mut(e, f);
        }
        for b in stmt_blocks_mut(s) {
            for_each_block_mut(b, f);
        }
    }
}

fn lambda_blocks_mut(e: &mut Expr, f: &mut dyn FnMut(&mut CodeBlock)) {
    if let ExprKind::Lambda { body, .. } = &mut e.kind {
        for_each_block_mut(body, f);
        return;
    }
    for c in expr_children_mut(e) {
        lambda_blocks_mut(c, f);
    }
}

/// Post-order mutable walk of every expression in a block, lambda bodies
/// included. The callback sees children before parents.
pub fn for_each_expr_mut(block: &mut CodeBlock, f: &mut dyn FnMut(&mut Expr)) {
    for_each_block_mut(block, &mut |b| {
        for s in b.statements.iter_mut() {
            for e in stmt_exprs_mut(s) {
                expr_post_mut(e, f);
            }
        }
    });
}

fn expr_post_mut(e: &mut Expr, f: &mut dyn FnMut(&mut Expr)) {
    for c in expr_children_mut(e) {
        expr_post_mut(c, f);
    }
    f(e);
}

pub fn find_stmt(block: &CodeBlock, id: NodeId) -> Option<&Statement> {
    let mut found = None;
    walk_stmts(block, &mut |s| {
        if s.id == id && found.is_none() {
            found = Some(s);
        }
    });
    found
}

pub fn find_expr(block: &CodeBlock, id: NodeId) -> Option<&Expr> {
    let mut found = None;
    walk_all_exprs(block, &mut |e| {
        if e.id == id && found.is_none() {
            found = Some(e);
        }
    });
    found
}

/// One step of an access path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "step", content = "name", rename_all = "camelCase")]
pub enum Step {
    Prop(String),
    Index,
    Method(String),
}

/// A variable followed by property, index and method steps, such as
/// `user.watchedMovies[i].movie_id` or `arr.forEach(...)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AccessPath {
    pub root: String,
    pub steps: Vec<Step>,
}

impl AccessPath {
    /// Property names in order, ignoring index and method steps.
    pub fn props(&self) -> Vec<&str> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                Step::Prop(p) => Some(p.as_str()),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for AccessPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root)?;
        for s in &self.steps {
            match s {
                Step::Prop(p) => write!(f, ".{p}")?,
                Step::Index => f.write_str("[]")?,
                Step::Method(m) => write!(f, ".{m}()")?,
            }
        }
        Ok(())
    }
}

/// Access path of an expression if it is a chain rooted in a variable.
pub fn access_path(e: &Expr) -> Option<AccessPath> {
    match &e.kind {
        ExprKind::VarAccess { name } => Some(AccessPath {
            root: name.clone(),
            steps: Vec::new(),
        }),
        ExprKind::PropertyAccess { object, property } => {
            let mut p = access_path(object)?;
            p.steps.push(Step::Prop(property.clone()));
            Some(p)
        }
        ExprKind::IndexAccess { object, .. } => {
            let mut p = access_path(object)?;
            p.steps.push(Step::Index);
            Some(p)
        }
        ExprKind::Call {
            receiver: Some(r),
            method,
            ..
        } => {
            let mut p = access_path(r)?;
            p.steps.push(Step::Method(method.clone()));
            Some(p)
        }
        _ => None,
    }
}

/// Root variable of the leftmost access chain of an expression.
pub fn root_var(e: &Expr) -> Option<&str> {
    match &e.kind {
        ExprKind::VarAccess { name } => Some(name),
        ExprKind::PropertyAccess { object, .. } | ExprKind::IndexAccess { object, .. } => root_var(object),
        ExprKind::Call {
            receiver: Some(r), ..
        } => root_var(r),
        _ => None,
    }
}

/// Variables read anywhere in an expression (lambda bodies excluded).
pub fn vars_in(e: &Expr) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    walk_expr(e, &mut |x| {
        if let ExprKind::VarAccess { name } = &x.kind {
            if !out.contains(name) {
                out.push(name.clone());
            }
        }
    });
    out
}

/// Lookup tables from node ids to statements, expressions and blocks of a
/// whole model.
#[derive(Debug, Default)]
pub struct CodeIndex<'a> {
    pub stmts: std::collections::HashMap<NodeId, &'a Statement>,
    pub exprs: std::collections::HashMap<NodeId, &'a Expr>,
    pub blocks: std::collections::HashMap<NodeId, &'a CodeBlock>,
    /// Function declaration name by body block id.
    pub functions: std::collections::HashMap<NodeId, &'a str>,
    pub paths: std::collections::HashMap<u32, &'a str>,
}

impl<'a> CodeIndex<'a> {
    pub fn new(model: &'a CodeModel) -> Self {
        let mut ix = CodeIndex::default();
        for (path, cc) in model.files() {
            ix.paths.insert(cc.file_index, path);
            for b in &cc.blocks {
                ix.add_block(b);
            }
        }
        ix
    }

    fn add_block(&mut self, b: &'a CodeBlock) {
        self.blocks.insert(b.id, b);
        for s in &b.statements {
            self.stmts.insert(s.id, s);
            if let StmtKind::FunctionDecl { name, body } = &s.variant {
                self.functions.insert(body.id, name);
            }
            for e in stmt_exprs(s) {
                self.add_expr(e);
            }
            for nb in stmt_blocks(s) {
                self.add_block(nb);
            }
        }
    }

    fn add_expr(&mut self, e: &'a Expr) {
        self.exprs.insert(e.id, e);
        if let ExprKind::Lambda { body, .. } = &e.kind {
            self.add_block(body);
        }
        for c in expr_children(e) {
            self.add_expr(c);
        }
    }

    pub fn stmt(&self, id: NodeId) -> Option<&'a Statement> {
        self.stmts.get(&id).copied()
    }

    pub fn expr(&self, id: NodeId) -> Option<&'a Expr> {
        self.exprs.get(&id).copied()
    }

    pub fn path(&self, file: u32) -> &'a str {
        self.paths.get(&file).copied().unwrap_or("")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{parse_source, ParseMode};

    fn parse(src: &str) -> CodeContainer {
        parse_source(src, "t.js", ParseMode::Strict).unwrap()
    }

    #[test]
    fn ids_are_dense_and_preorder() {
        let cc = parse("let a = f(x, y => { g(y); });\nif (a) { h(); }");
        let mut ids = Vec::new();
        fn collect_block(b: &CodeBlock, ids: &mut Vec<u32>) {
            ids.push(b.id.index);
            for s in &b.statements {
                ids.push(s.id.index);
                for e in stmt_exprs(s) {
                    collect_expr(e, ids);
                }
                for nb in stmt_blocks(s) {
                    collect_block(nb, ids);
                }
            }
        }
        fn collect_expr(e: &Expr, ids: &mut Vec<u32>) {
            ids.push(e.id.index);
            if let ExprKind::Lambda { body, .. } = &e.kind {
                collect_block(body, ids);
            }
            for c in expr_children(e) {
                collect_expr(c, ids);
            }
        }
        collect_block(cc.body(), &mut ids);
        let expected: Vec<u32> = (0..ids.len() as u32).collect();
        assert_eq!(ids, expected);
    }

    #[test]
    fn locals_point_at_declarations() {
        let cc = parse("const dbName = 'x';\nlet b = 1;");
        assert_eq!(cc.variable_decls.len(), 2);
        assert_eq!(cc.variable_decls[0].name, "dbName");
        assert_eq!(cc.variable_decls[0].init_site, Some(cc.body().statements[0].id));
    }

    #[test]
    fn access_paths() {
        let cc = parse("x = user.watchedMovies[i].movie_id;\nuser.list.forEach(f);");
        let StmtKind::Assignment { value, .. } = &cc.body().statements[0].variant else { panic!() };
        let p = access_path(value).unwrap();
        assert_eq!(p.to_string(), "user.watchedMovies[].movie_id");
        assert_eq!(p.props(), vec!["watchedMovies", "movie_id"]);
        let StmtKind::ExpressionStmt { expr } = &cc.body().statements[1].variant else { panic!() };
        assert_eq!(access_path(expr).unwrap().steps.last(), Some(&Step::Method("forEach".into())));
    }

    #[test]
    fn walk_stmts_enters_lambdas() {
        let cc = parse("f(function (e) { g(e); if (e) { h(); } });");
        let mut n = 0;
        walk_stmts(cc.body(), &mut |_| n += 1);
        assert_eq!(n, 4);
    }

    #[test]
    fn find_by_id() {
        let cc = parse("f(a => { g(a); });");
        let mut target = None;
        walk_stmts(cc.body(), &mut |s| target = Some(s.id));
        let s = find_stmt(cc.body(), target.unwrap()).unwrap();
        assert!(matches!(s.variant, StmtKind::ExpressionStmt { .. }));
    }
}
