use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::cfg::ControlFlowModel;
use crate::code::visit::{access_path, expr_children, CodeIndex, Step};
use crate::code::{CodeModel, Expr, ExprKind, NodeId, StmtKind};
use crate::dos::structure::{maximal_paths, node_exprs, strip_index, ELEMENT_METHODS};
use crate::dos::DosModel;

/// A join with the fields of the joined data used together with the data
/// it was joined to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JoinCandidate {
    pub join_op: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prev_op: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lookup: Option<usize>,
    /// Source fields in order of first use.
    pub fields: Vec<String>,
    pub usage_sites: Vec<NodeId>,
    pub usage_lines: BTreeSet<u32>,
    pub escapes: bool,
}

impl JoinCandidate {
    fn new(join_op: usize, prev_op: Option<usize>, lookup: Option<usize>) -> Self {
        JoinCandidate {
            join_op,
            prev_op,
            lookup,
            fields: Vec::new(),
            usage_sites: Vec::new(),
            usage_lines: BTreeSet::new(),
            escapes: false,
        }
    }

    fn use_site(&mut self, stmt: Option<NodeId>, line: Option<u32>) {
        if let Some(s) = stmt {
            if !self.usage_sites.contains(&s) {
                self.usage_sites.push(s);
            }
        }
        self.usage_lines.extend(line);
    }

    fn field(&mut self, f: &str) {
        if !self.fields.iter().any(|x| x == f) {
            self.fields.push(f.to_string());
        }
    }
}

/// Whether one of `names` is used as a whole value: call argument, object
/// or array element, or returned.
fn bare_value_use(e: &Expr, names: &HashSet<String>) -> bool {
    let is_bare = |x: &Expr| matches!(&x.kind, ExprKind::VarAccess { name } if names.contains(name));
    let direct = match &e.kind {
        ExprKind::Call { args, .. } | ExprKind::New { args, .. } => args.iter().any(is_bare),
        ExprKind::ObjectLiteral { pairs } => pairs.iter().any(|(_, v)| is_bare(v)),
        ExprKind::ArrayLiteral { items } => items.iter().any(is_bare),
        _ => false,
    };
    direct || expr_children(e).into_iter().any(|c| bare_value_use(c, names))
}

fn stmt_escapes(s: &crate::code::Statement, names: &HashSet<String>) -> bool {
    match &s.variant {
        StmtKind::Return {
            value: Some(Expr {
                kind: ExprKind::VarAccess { name },
                ..
            }),
        } => names.contains(name),
        StmtKind::Assignment {
            value: Expr {
                kind: ExprKind::VarAccess { name },
                ..
            },
            target,
        } => names.contains(name) && access_path(target).is_some_and(|p| !p.steps.is_empty()),
        _ => false,
    }
}

/// First property of a path after leading indexes.
fn first_prop(steps: &[Step]) -> Option<&str> {
    match strip_index(steps).first() {
        Some(Step::Prop(p)) => Some(p),
        _ => None,
    }
}

fn sequential(cfg: &ControlFlowModel, ix: &CodeIndex, dos: &DosModel, i: usize, j: usize) -> JoinCandidate {
    let op = &dos.operations[i];
    let mut c = JoinCandidate::new(i, Some(j), None);
    let (Some(jv), Some(pv)) = (&op.result_variable, &dos.operations[j].result_variable) else {
        return c;
    };
    let mut join_s: HashSet<String> = HashSet::from([jv.clone()]);
    let mut prev_s: HashSet<String> = HashSet::from([pv.clone()]);
    for r in cfg.forward_from(op.node) {
        let node = cfg.node(r);
        let exprs = node_exprs(cfg, ix, r);
        let mut joined = Vec::new();
        let mut prev_used = false;
        for e in &exprs {
            let mut paths = Vec::new();
            maximal_paths(e, &mut paths);
            for (p, _) in paths {
                if join_s.contains(&p.root) {
                    joined.push(p);
                } else if prev_s.contains(&p.root) {
                    prev_used = true;
                }
            }
            c.escapes |= bare_value_use(e, &join_s);
        }
        let stmt = node.stmt_ref.and_then(|s| ix.stmt(s));
        if !joined.is_empty() {
            c.use_site(node.stmt_ref, node.line);
            if prev_used {
                for p in &joined {
                    if let Some(f) = first_prop(&p.steps) {
                        c.field(f);
                    }
                }
            }
        }
        if let (true, Some(s)) = (node.stmt_tail, stmt) {
            c.escapes |= stmt_escapes(s, &join_s);
            if let StmtKind::VariableDecl {
                name, init: Some(init), ..
            } = &s.variant
            {
                if let Some(p) = access_path(init) {
                    if join_s.contains(&p.root) && p.steps.is_empty() {
                        join_s.insert(name.clone());
                    } else if prev_s.contains(&p.root) {
                        prev_s.insert(name.clone());
                    }
                }
            }
        }
    }
    c
}

fn aggregation(cfg: &ControlFlowModel, ix: &CodeIndex, dos: &DosModel, i: usize, k: usize) -> JoinCandidate {
    let op = &dos.operations[i];
    let alias = &op.lookups[k].alias;
    let mut c = JoinCandidate::new(i, None, Some(k));
    let Some(rv) = &op.result_variable else { return c };
    let mut docs: HashSet<String> = HashSet::from([rv.clone()]);
    for r in cfg.forward_from(op.node) {
        let node = cfg.node(r);
        let exprs = node_exprs(cfg, ix, r);
        let mut joined = Vec::new();
        let mut own_used = false;
        for e in &exprs {
            let mut paths = Vec::new();
            maximal_paths(e, &mut paths);
            for (p, _) in paths {
                if !docs.contains(&p.root) {
                    continue;
                }
                match first_prop(&p.steps) {
                    Some(f) if f == alias => {
                        let rest = &strip_index(&p.steps)[1..];
                        if first_prop(rest).is_none() {
                            c.escapes = true;
                        }
                        joined.push(rest.to_vec());
                    }
                    Some(f) if op.lookups.iter().any(|l| l.alias == f) => {}
                    Some(_) => own_used = true,
                    None => {}
                }
            }
            c.escapes |= bare_value_use(e, &docs);
            if let ExprKind::Call {
                receiver: Some(recv),
                method,
                args,
            } = &e.kind
            {
                let on_docs = access_path(recv).is_some_and(|p| docs.contains(&p.root) && first_prop(&p.steps).is_none());
                if on_docs && ELEMENT_METHODS.contains(&method.as_str()) {
                    if let Some(ExprKind::Lambda { params, .. }) = args.first().map(|a| &a.kind) {
                        docs.extend(params.first().cloned());
                    }
                }
            }
        }
        if !joined.is_empty() {
            c.use_site(node.stmt_ref, node.line);
            if own_used {
                for steps in &joined {
                    if let Some(f) = first_prop(steps) {
                        c.field(f);
                    }
                }
            }
        }
        if let (true, Some(s)) = (node.stmt_tail, node.stmt_ref.and_then(|s| ix.stmt(s))) {
            c.escapes |= stmt_escapes(s, &docs);
            if let StmtKind::VariableDecl {
                name, init: Some(init), ..
            } = &s.variant
            {
                if access_path(init).is_some_and(|p| docs.contains(&p.root) && first_prop(&p.steps).is_none()) {
                    docs.insert(name.clone());
                }
            }
        }
    }
    c
}

/// One candidate per join: a sequential join read, or each `$lookup`
/// stage of a pipeline read. Search lists start afresh for every join.
pub fn detect_duplications(cfg: &ControlFlowModel, code: &CodeModel, dos: &DosModel) -> Vec<JoinCandidate> {
    let ix = CodeIndex::new(code);
    let mut out = Vec::new();
    for op in dos.joins() {
        if let Some(j) = op.prev_op {
            out.push(sequential(cfg, &ix, dos, op.id, j));
        }
        for k in 0..op.lookups.len() {
            out.push(aggregation(cfg, &ix, dos, op.id, k));
        }
    }
    out
}
