//! Brute-force reference for operation and join detection: a direct walk
//! over the statements, with joins found by lexical callback nesting.

use std::collections::HashMap;

use schema_xray::code::{CodeBlock, CodeModel, DeclKind, Expr, ExprKind, LiteralKind, Statement, StmtKind};
use schema_xray::dos::DosModel;
use schema_xray::profile::{ApiProfile, OpKind, ProfileEntry};

/// (file, line, method, container)
pub type OpKey = (String, u32, String, String);

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Findings {
    pub ops: Vec<OpKey>,
    /// (join op, previous op)
    pub sequential: Vec<(OpKey, OpKey)>,
    pub lookups: Vec<OpKey>,
}

impl Findings {
    fn sort(mut self) -> Self {
        self.ops.sort();
        self.sequential.sort();
        self.lookups.sort();
        self
    }
}

pub fn from_dos(dos: &DosModel) -> Findings {
    let key = |i: usize| {
        let o = &dos.operations[i];
        (o.file.clone(), o.line, o.method.clone(), o.container_name.clone())
    };
    let mut f = Findings::default();
    for o in &dos.operations {
        f.ops.push(key(o.id));
        if let Some(p) = o.prev_op.filter(|p| o.is_join && dos.operations[*p].container_name != o.container_name) {
            f.sequential.push((key(o.id), key(p)));
        }
        if !o.lookups.is_empty() {
            f.lookups.push(key(o.id));
        }
    }
    f.sort()
}

pub fn brute_force(code: &CodeModel, profile: &ApiProfile) -> Findings {
    let mut f = Findings::default();
    for (path, cc) in code.files() {
        let mut consts = HashMap::new();
        for s in &cc.body().statements {
            if let StmtKind::VariableDecl {
                decl: DeclKind::Const,
                name,
                init: Some(Expr {
                    kind: ExprKind::Literal {
                        kind: LiteralKind::String,
                        lexeme,
                    },
                    ..
                }),
            } = &s.variant
            {
                consts.entry(name.clone()).or_insert_with(|| lexeme.clone());
            }
        }
        let mut w = Walker {
            profile,
            file: path.to_string(),
            consts,
            enclosing: Vec::new(),
            out: &mut f,
        };
        for b in &cc.blocks {
            w.block(b, &HashMap::new());
        }
    }
    f.sort()
}

struct Walker<'a> {
    profile: &'a ApiProfile,
    file: String,
    consts: HashMap<String, String>,
    /// Enclosing operations with the parameter bound to their result.
    enclosing: Vec<(OpKey, Option<String>)>,
    out: &'a mut Findings,
}

fn path_root(e: &Expr) -> Option<&str> {
    match &e.kind {
        ExprKind::VarAccess { name } => Some(name),
        ExprKind::PropertyAccess { object, .. } | ExprKind::IndexAccess { object, .. } => path_root(object),
        _ => None,
    }
}

/// Control never falls through the statement.
fn terminates(s: &Statement) -> bool {
    let all = |b: &CodeBlock| b.statements.iter().any(terminates);
    match &s.variant {
        StmtKind::Return { .. } => true,
        StmtKind::If {
            then,
            otherwise: Some(o),
            ..
        } => all(then) && all(o),
        _ => false,
    }
}

fn lambda_param(e: Option<&Expr>, k: usize) -> Option<String> {
    match e.map(|e| &e.kind) {
        Some(ExprKind::Lambda { params, .. }) => params.get(k).cloned(),
        _ => None,
    }
}

impl<'a> Walker<'a> {
    fn block(&mut self, b: &CodeBlock, outer: &HashMap<String, String>) {
        let mut aliases = outer.clone();
        let mut dead = false;
        for s in &b.statements {
            let line = s.span.line;
            if dead && !matches!(s.variant, StmtKind::FunctionDecl { .. }) {
                continue;
            }
            dead |= terminates(s);
            match &s.variant {
                StmtKind::ExpressionStmt { expr } => self.expr(expr, line, &aliases),
                StmtKind::VariableDecl { name, init, .. } => {
                    if let Some(e) = init {
                        self.expr(e, line, &aliases);
                        if let Some(r) = path_root(e) {
                            aliases.insert(name.clone(), r.to_string());
                        }
                    }
                }
                StmtKind::Assignment { target, value } => {
                    self.expr(target, line, &aliases);
                    self.expr(value, line, &aliases);
                }
                StmtKind::If { cond, then, otherwise } => {
                    self.expr(cond, line, &aliases);
                    self.block(then, &aliases);
                    if let Some(o) = otherwise {
                        self.block(o, &aliases);
                    }
                }
                StmtKind::While { cond, body } => {
                    self.expr(cond, line, &aliases);
                    self.block(body, &aliases);
                }
                StmtKind::Return { value } => {
                    if let Some(v) = value {
                        self.expr(v, line, &aliases);
                    }
                }
                StmtKind::FunctionDecl { body, .. } => {
                    let saved = std::mem::take(&mut self.enclosing);
                    self.block(body, &HashMap::new());
                    self.enclosing = saved;
                }
            }
        }
    }

    /// Container named by the receiver chain of a candidate call.
    fn container(&self, entry: &ProfileEntry, mut e: &Expr) -> Option<String> {
        loop {
            match &e.kind {
                ExprKind::Call { receiver, method, args } => {
                    if *method == entry.container_arg.method {
                        return match args.get(entry.container_arg.arg_index).map(|a| &a.kind) {
                            Some(ExprKind::Literal {
                                kind: LiteralKind::String,
                                lexeme,
                            }) => Some(lexeme.clone()),
                            Some(ExprKind::VarAccess { name }) => self.consts.get(name).cloned(),
                            _ => None,
                        };
                    }
                    e = receiver.as_deref()?;
                }
                ExprKind::PropertyAccess { object, .. } => e = object,
                _ => return None,
            }
        }
    }

    fn as_op<'e>(&self, e: &'e Expr) -> Option<(&'a ProfileEntry, String, &'e [Expr])> {
        let ExprKind::Call {
            receiver: Some(r),
            method,
            args,
        } = &e.kind
        else {
            return None;
        };
        let entry = self.profile.entries.iter().find(|x| x.method_name == *method)?;
        let c = self.container(entry, r)?;
        Some((entry, c, args))
    }

    fn expr(&mut self, e: &Expr, line: u32, aliases: &HashMap<String, String>) {
        if let ExprKind::Call {
            receiver: Some(r),
            method,
            args,
        } = &e.kind
        {
            if self.profile.cursor_methods.contains(method) {
                if let Some((entry, c, inner)) = self.as_op(r) {
                    let cb = args.last();
                    for a in &args[..args.len().saturating_sub(1)] {
                        self.expr(a, line, aliases);
                    }
                    self.op(entry, c, inner, cb, line, aliases);
                    return;
                }
            }
            if let Some((entry, c, args)) = self.as_op(e) {
                let cb = entry.callback_arg_index.and_then(|i| args.get(i));
                self.op(entry, c, args, cb, line, aliases);
                return;
            }
        }
        match &e.kind {
            ExprKind::PropertyAccess { object, .. } => self.expr(object, line, aliases),
            ExprKind::IndexAccess { object, index } => {
                self.expr(object, line, aliases);
                self.expr(index, line, aliases);
            }
            ExprKind::Call { receiver, args, .. } => {
                if let Some(r) = receiver {
                    self.expr(r, line, aliases);
                }
                for a in args {
                    self.expr(a, line, aliases);
                }
            }
            ExprKind::Lambda { body, .. } => self.block(body, aliases),
            ExprKind::ObjectLiteral { pairs } => pairs.iter().for_each(|(_, v)| self.expr(v, line, aliases)),
            ExprKind::ArrayLiteral { items } => items.iter().for_each(|v| self.expr(v, line, aliases)),
            ExprKind::New { args, .. } => args.iter().for_each(|v| self.expr(v, line, aliases)),
            ExprKind::Binary { lhs, rhs, .. } => {
                self.expr(lhs, line, aliases);
                self.expr(rhs, line, aliases);
            }
            ExprKind::Literal { .. } | ExprKind::VarAccess { .. } | ExprKind::Opaque { .. } => {}
        }
    }

    /// Filter pairs: the filter argument, or `$match` stages of a pipeline.
    fn filter_pairs<'e>(entry: &ProfileEntry, args: &'e [Expr]) -> Vec<&'e (String, Expr)> {
        let obj = |e: Option<&'e Expr>| match e.map(|e| &e.kind) {
            Some(ExprKind::ObjectLiteral { pairs }) => pairs.iter().collect(),
            _ => Vec::new(),
        };
        if let Some(i) = entry.filter_arg_index {
            return obj(args.get(i));
        }
        let Some(ExprKind::ArrayLiteral { items }) = entry.pipeline_arg_index.and_then(|i| args.get(i)).map(|e| &e.kind) else {
            return Vec::new();
        };
        items
            .iter()
            .flat_map(|st| match &st.kind {
                ExprKind::ObjectLiteral { pairs } => pairs
                    .iter()
                    .filter(|(k, _)| k == "$match")
                    .flat_map(|(_, v)| obj(Some(v)))
                    .collect::<Vec<_>>(),
                _ => Vec::new(),
            })
            .collect()
    }

    fn has_lookup(entry: &ProfileEntry, args: &[Expr]) -> bool {
        let Some(ExprKind::ArrayLiteral { items }) = entry.pipeline_arg_index.and_then(|i| args.get(i)).map(|e| &e.kind) else {
            return false;
        };
        items
            .iter()
            .any(|st| matches!(&st.kind, ExprKind::ObjectLiteral { pairs } if pairs.iter().any(|(k, _)| k == "$lookup")))
    }

    fn op(&mut self, entry: &ProfileEntry, container: String, args: &[Expr], cb: Option<&Expr>, line: u32, aliases: &HashMap<String, String>) {
        let key: OpKey = (self.file.clone(), line, entry.method_name.clone(), container.clone());
        self.out.ops.push(key.clone());
        let read = matches!(entry.op_kind, OpKind::Read | OpKind::AggregateRead);
        if entry.op_kind == OpKind::AggregateRead && Self::has_lookup(entry, args) {
            self.out.lookups.push(key.clone());
        }
        let mut roots: Vec<String> = Vec::new();
        for (k, v) in Self::filter_pairs(entry, args) {
            if k.starts_with('$') {
                continue;
            }
            let mut r = path_root(v).map(str::to_string);
            let mut guard = 0;
            while let Some(name) = r {
                roots.push(name.clone());
                guard += 1;
                r = aliases.get(&name).filter(|_| guard < 32).cloned();
            }
        }
        let prev = self
            .enclosing
            .iter()
            .rev()
            .find(|(_, p)| p.as_ref().is_some_and(|p| roots.contains(p)))
            .map(|(k, _)| k.clone());
        if let Some(p) = prev {
            if read && p.3 != container {
                self.out.sequential.push((key.clone(), p));
            }
        }
        for a in args {
            if cb.is_some_and(|c| std::ptr::eq(c, a)) {
                continue;
            }
            self.expr(a, line, aliases);
        }
        if let Some(Expr {
            kind: ExprKind::Lambda { body, .. },
            ..
        }) = cb
        {
            self.enclosing.push((key, lambda_param(cb, entry.callback_result_param)));
            self.block(body, aliases);
            self.enclosing.pop();
        }
    }
}
