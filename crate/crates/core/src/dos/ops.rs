use std::collections::{HashMap, HashSet};

use crate::cfg::{ControlFlowModel, NodeKind, NodeRef};
use crate::code::visit::{access_path, root_var, vars_in, walk_expr, AccessPath, CodeIndex, Step};
use crate::code::{CodeModel, Expr, ExprKind, NodeId, StmtKind};
use crate::error::{Error, Result};
use crate::profile::{ApiProfile, Constants, OpKind, ProfileEntry, ResultBinding};

use super::{Conjunct, DatabaseOperation, DosModel, Lookup, OperationKind, Predicate, Rhs};

/// A call node matched against the profile.
#[derive(Debug, Clone)]
pub struct DbCallNode {
    pub node: NodeRef,
    pub call: NodeId,
    pub stmt: NodeId,
    pub entry: ProfileEntry,
    pub container: String,
}

/// Database call nodes in discovery order: each subgraph in index order is
/// walked forward from its start, callee subgraphs included, and nodes
/// already seen are skipped.
pub fn find_db_call_nodes(cfg: &ControlFlowModel, code: &CodeModel, profile: &ApiProfile) -> Result<Vec<DbCallNode>> {
    let ix = CodeIndex::new(code);
    let consts: HashMap<u32, Constants> = code
        .files()
        .into_iter()
        .map(|(_, cc)| (cc.file_index, Constants::of(cc)))
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in &cfg.subgraphs {
        let mut order = vec![g.start];
        order.extend(cfg.forward_from(g.start));
        for r in order {
            if !seen.insert(r) {
                continue;
            }
            let n = cfg.node(r);
            if n.kind != NodeKind::Call {
                continue;
            }
            let (Some(eid), Some(sid)) = (n.expr_ref, n.stmt_ref) else {
                continue;
            };
            let Some(expr) = ix.expr(eid) else { continue };
            let Some(c) = consts.get(&eid.file) else { continue };
            match profile.match_call(expr, c) {
                Ok(Some((entry, container))) => out.push(DbCallNode {
                    node: r,
                    call: eid,
                    stmt: sid,
                    entry: entry.clone(),
                    container,
                }),
                Ok(None) => {}
                Err(Error::Profile(m)) => {
                    return Err(Error::Profile(format!("{}:{}: {m}", ix.path(eid.file), n.line.unwrap_or(0))))
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn operation_kind(k: OpKind) -> OperationKind {
    match k {
        OpKind::Read | OpKind::AggregateRead => OperationKind::Read,
        OpKind::Insert => OperationKind::Insert,
        OpKind::Update => OperationKind::Update,
        OpKind::Delete => OperationKind::Delete,
    }
}

fn call_parts(e: &Expr) -> (&str, &[Expr]) {
    match &e.kind {
        ExprKind::Call { method, args, .. } => (method, args),
        _ => ("", &[]),
    }
}

fn lambda_param(e: Option<&Expr>, idx: usize) -> Option<String> {
    match e.map(|e| &e.kind) {
        Some(ExprKind::Lambda { params, .. }) => params.get(idx).cloned(),
        _ => None,
    }
}

/// Call whose receiver is the expression `inner`, searched inside `within`.
fn wrapping_call(within: &Expr, inner: NodeId) -> Option<&Expr> {
    let mut found = None;
    walk_expr(within, &mut |x| {
        if let ExprKind::Call {
            receiver: Some(r), ..
        } = &x.kind
        {
            if r.id == inner && found.is_none() {
                found = Some(x);
            }
        }
    });
    found
}

fn contains_expr(e: &Expr, id: NodeId) -> bool {
    let mut hit = false;
    walk_expr(e, &mut |x| hit |= x.id == id);
    hit
}

fn result_variable(ix: &CodeIndex, profile: &ApiProfile, n: &DbCallNode, call: &Expr) -> Option<String> {
    let (_, args) = call_parts(call);
    let stmt = ix.stmt(n.stmt)?;
    if n.entry.result_binding == ResultBinding::CallbackParam {
        if let Some(p) = n.entry.callback_arg_index.and_then(|i| lambda_param(args.get(i), n.entry.callback_result_param)) {
            return Some(p);
        }
        for e in crate::code::visit::stmt_exprs(stmt) {
            if let Some(w) = wrapping_call(e, call.id) {
                let (m, wargs) = call_parts(w);
                if profile.is_cursor_method(m) {
                    if let Some(p) = lambda_param(wargs.last(), n.entry.callback_result_param) {
                        return Some(p);
                    }
                }
            }
        }
    }
    match &stmt.variant {
        StmtKind::VariableDecl {
            name, init: Some(init), ..
        } if contains_expr(init, call.id) => Some(name.clone()),
        StmtKind::Assignment { target, value } if contains_expr(value, call.id) => {
            access_path(target).filter(|p| p.steps.is_empty()).map(|p| p.root)
        }
        _ => None,
    }
}

/// Whether the result reaches the program through a cursor method.
fn through_cursor(ix: &CodeIndex, profile: &ApiProfile, n: &DbCallNode, call: &Expr) -> bool {
    let Some(stmt) = ix.stmt(n.stmt) else { return false };
    crate::code::visit::stmt_exprs(stmt)
        .into_iter()
        .filter_map(|e| wrapping_call(e, call.id))
        .any(|w| profile.is_cursor_method(call_parts(w).0))
}

fn handler_name(cfg: &ControlFlowModel, ix: &CodeIndex, node: NodeRef) -> Option<String> {
    let mut sg = node.subgraph;
    for _ in 0..64 {
        let g = &cfg.subgraphs[sg];
        if let Some(name) = ix.functions.get(&g.block_ref) {
            return Some(name.to_string());
        }
        let caller = cfg.predecessors(g.start).into_iter().next()?;
        sg = caller.1.subgraph;
    }
    None
}

/// Normalize an object-literal filter into equality conjuncts. Operator
/// keys (`$or`, ...) are skipped.
pub(crate) fn predicate_of(e: &Expr) -> Option<Predicate> {
    let ExprKind::ObjectLiteral { pairs } = &e.kind else {
        return None;
    };
    let conjuncts = pairs
        .iter()
        .filter(|(k, _)| !k.starts_with('$'))
        .map(|(k, v)| Conjunct {
            field_path: k.split('.').map(str::to_string).collect(),
            rhs: rhs_of(v),
            rhs_ref: v.id,
        })
        .collect();
    Some(Predicate { conjuncts })
}

fn rhs_of(v: &Expr) -> Rhs {
    match &v.kind {
        ExprKind::Literal { kind, lexeme } => Rhs::Literal {
            literal: *kind,
            lexeme: lexeme.clone(),
        },
        _ => match access_path(v) {
            Some(p) if !p.steps.iter().any(|s| matches!(s, Step::Method(_))) => Rhs::VariablePath { path: p },
            _ => Rhs::Other,
        },
    }
}

fn string_field(pairs: &[(String, Expr)], key: &str, consts: &Constants) -> Option<String> {
    pairs.iter().find(|(k, _)| k == key).and_then(|(_, v)| consts.string_value(v))
}

/// `$match` filter and `$lookup`/`$unwind` stages of a pipeline literal.
fn pipeline(e: &Expr, consts: &Constants) -> (Option<Predicate>, Vec<Lookup>) {
    let ExprKind::ArrayLiteral { items } = &e.kind else {
        return (None, Vec::new());
    };
    let mut filter = None;
    let mut lookups: Vec<Lookup> = Vec::new();
    for (i, stage) in items.iter().enumerate() {
        let ExprKind::ObjectLiteral { pairs } = &stage.kind else {
            continue;
        };
        let Some((op, body)) = pairs.first() else { continue };
        match (op.as_str(), &body.kind) {
            ("$match", _) => filter = predicate_of(body),
            ("$lookup", ExprKind::ObjectLiteral { pairs: lp }) => {
                let get = |k| string_field(lp, k, consts);
                if let (Some(from), Some(local), Some(foreign), Some(alias)) =
                    (get("from"), get("localField"), get("foreignField"), get("as"))
                {
                    lookups.push(Lookup {
                        from,
                        local_field: local,
                        foreign_field: foreign,
                        alias,
                        unwind: false,
                        stage: i,
                        stage_ref: stage.id,
                    });
                }
            }
            ("$unwind", _) => {
                if let Some(path) = consts.string_value(body) {
                    let alias = path.trim_start_matches('$');
                    if let Some(l) = lookups.iter_mut().find(|l| l.alias == alias) {
                        l.unwind = true;
                    }
                }
            }
            _ => {}
        }
    }
    (filter, lookups)
}

/// Create one operation per node and link data dependencies by walking the
/// control flow backwards with a search list of variables.
pub fn backward_traverse(
    nodes: &[DbCallNode],
    cfg: &ControlFlowModel,
    code: &CodeModel,
    profile: &ApiProfile,
) -> Result<DosModel> {
    let ix = CodeIndex::new(code);
    let consts: HashMap<u32, Constants> = code
        .files()
        .into_iter()
        .map(|(_, cc)| (cc.file_index, Constants::of(cc)))
        .collect();
    let mut dos = DosModel::default();
    for (i, n) in nodes.iter().enumerate() {
        let call = ix
            .expr(n.call)
            .ok_or_else(|| Error::Model(format!("call {} not in code model", n.call)))?;
        let (method, args) = call_parts(call);
        let empty = Constants::default();
        let c = consts.get(&n.call.file).unwrap_or(&empty);
        let (mut filter, lookups) = match n.entry.pipeline_arg_index.and_then(|p| args.get(p)) {
            Some(p) => pipeline(p, c),
            None => (None, Vec::new()),
        };
        if let Some(f) = n.entry.filter_arg_index.and_then(|f| args.get(f)) {
            filter = predicate_of(f);
        }
        let mut params = Vec::new();
        for a in args {
            if !matches!(a.kind, ExprKind::Lambda { .. }) {
                for v in vars_in(a) {
                    if !params.contains(&v) {
                        params.push(v);
                    }
                }
            }
        }
        dos.operations.push(DatabaseOperation {
            id: i,
            kind: operation_kind(n.entry.op_kind),
            method: method.to_string(),
            stmt_ref: n.stmt,
            call_ref: n.call,
            node: n.node,
            file: ix.path(n.call.file).to_string(),
            line: cfg.node(n.node).line.unwrap_or(0),
            handler: handler_name(cfg, &ix, n.node),
            container_name: n.container.clone(),
            result_variable: result_variable(&ix, profile, n, call),
            cursor: through_cursor(&ix, profile, n, call),
            filter,
            payload_ref: n.entry.payload_arg_index.and_then(|p| args.get(p)).map(|p| p.id),
            prev_op: None,
            next_ops: Vec::new(),
            is_join: !lookups.is_empty(),
            result_ds: None,
            params,
            lookups,
        });
    }
    let by_node: HashMap<NodeRef, usize> = dos.operations.iter().map(|o| (o.node, o.id)).collect();
    for i in 0..dos.operations.len() {
        let mut s_list: Vec<String> = dos.operations[i].params.clone();
        let mut prev = None;
        let mut aliases: HashMap<String, AccessPath> = HashMap::new();
        for r in cfg.backward_from(dos.operations[i].node) {
            if let Some(&j) = by_node.get(&r) {
                if j != i {
                    if let Some(v) = &dos.operations[j].result_variable {
                        if s_list.contains(v) {
                            prev = Some(j);
                            break;
                        }
                    }
                }
            }
            let node = cfg.node(r);
            if !node.stmt_tail {
                continue;
            }
            let Some(stmt) = node.stmt_ref.and_then(|s| ix.stmt(s)) else {
                continue;
            };
            let rhs = match &stmt.variant {
                StmtKind::VariableDecl {
                    name, init: Some(init), ..
                } if s_list.contains(name) => {
                    if let Some(p) = access_path(init).filter(|p| !p.steps.iter().any(|s| matches!(s, Step::Method(_)))) {
                        aliases.entry(name.clone()).or_insert(p);
                    }
                    root_var(init)
                }
                StmtKind::Assignment { target, value } if root_var(target).is_some_and(|t| s_list.iter().any(|s| s == t)) => {
                    root_var(value)
                }
                _ => None,
            };
            if let Some(v) = rhs {
                if !s_list.iter().any(|s| s == v) {
                    s_list.push(v.to_string());
                }
            }
        }
        let Some(j) = prev else { continue };
        dos.operations[i].prev_op = Some(j);
        dos.operations[j].next_ops.push(i);
        let op = &dos.operations[i];
        let joins = op.kind == OperationKind::Read
            && op.container_name != dos.operations[j].container_name
            && op.filter.as_ref().is_some_and(|f| {
                f.conjuncts.iter().any(|c| match &c.rhs {
                    Rhs::VariablePath { path } => s_list.contains(&path.root),
                    _ => false,
                })
            });
        if joins {
            dos.operations[i].is_join = true;
            if let Some(f) = dos.operations[i].filter.as_mut() {
                for c in &mut f.conjuncts {
                    if let Rhs::VariablePath { path } = &mut c.rhs {
                        expand_alias(path, &aliases);
                    }
                }
            }
        }
    }
    Ok(dos)
}

fn expand_alias(path: &mut AccessPath, aliases: &HashMap<String, AccessPath>) {
    let mut guard = aliases.len();
    while let Some(a) = aliases.get(&path.root) {
        if guard == 0 {
            return;
        }
        guard -= 1;
        let mut steps = a.steps.clone();
        steps.append(&mut path.steps);
        *path = AccessPath {
            root: a.root.clone(),
            steps,
        };
    }
}
