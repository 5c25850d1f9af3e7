use std::collections::{HashMap, HashSet};

use crate::cfg::{ControlFlowModel, NodeKind, NodeRef};
use crate::code::visit::{access_path, expr_children, stmt_exprs, walk_expr, AccessPath, CodeIndex, Step};
use crate::code::{collect_evidence, merge_types, CodeModel, Expr, ExprKind, NodeId, PrimitiveType, StmtKind};
use crate::error::Diagnostic;

use super::{singular, DosModel, ExtractOptions, FieldType, Lookup, OperationKind, Rhs};

/// Array methods whose callback receives the element as first parameter.
pub(crate) const ELEMENT_METHODS: &[&str] = &["forEach", "map", "filter", "some", "every", "find", "findIndex"];
/// Methods that only make sense on an array.
const COLLECTION_METHODS: &[&str] = &[
    "forEach", "map", "filter", "some", "every", "find", "findIndex", "includes", "indexOf", "push", "concat",
    "join", "slice", "reduce",
];

#[derive(Debug, Clone)]
struct Alias {
    ds: usize,
    steps: Vec<Step>,
    lookups: Vec<Lookup>,
}

pub(crate) fn strip_index(steps: &[Step]) -> &[Step] {
    let n = steps.iter().take_while(|s| **s == Step::Index).count();
    &steps[n..]
}

/// Merge two field types; `None` marks a conflict.
pub(crate) fn merge_field_types(a: &FieldType, b: &FieldType) -> Option<FieldType> {
    use FieldType::*;
    match (a, b) {
        _ if a == b => Some(a.clone()),
        (Attribute { primitive: None }, y) | (y, Attribute { primitive: None }) => Some(y.clone()),
        (Attribute { primitive: Some(p) }, Attribute { primitive: Some(q) }) => {
            merge_types(*p, *q).map(|t| Attribute { primitive: Some(t) })
        }
        (Reference { .. }, _) => Some(a.clone()),
        (_, Reference { .. }) => Some(b.clone()),
        (Collection { element: x }, Collection { element: y }) => Some(Collection {
            element: Box::new(merge_field_types(x, y)?),
        }),
        (agg @ Aggregate { .. }, Collection { element }) | (Collection { element }, agg @ Aggregate { .. }) => {
            Some(Collection {
                element: Box::new(merge_field_types(agg, element)?),
            })
        }
        (Aggregate { .. }, Aggregate { .. }) => Some(a.clone()),
        _ => None,
    }
}

fn aggregate_target(t: &FieldType) -> Option<usize> {
    match t {
        FieldType::Aggregate { target } => Some(*target),
        FieldType::Collection { element } => aggregate_target(element),
        _ => None,
    }
}

struct Builder<'a> {
    dos: &'a mut DosModel,
    /// Fields that fell back to the default type after a conflict.
    conflicted: HashSet<(usize, String)>,
}

impl Builder<'_> {
    fn set(&mut self, ds: usize, name: &str, ty: FieldType) {
        let s = self.dos.structure_mut(ds);
        let Some(f) = s.fields.iter_mut().find(|f| f.name == name) else {
            s.fields.push(super::DosField {
                name: name.to_string(),
                ty,
                duplicated_from: None,
            });
            return;
        };
        let key = (ds, name.to_string());
        if self.conflicted.contains(&key) {
            return;
        }
        match merge_field_types(&f.ty, &ty) {
            Some(t) => f.ty = t,
            None => {
                f.ty = FieldType::default_attribute();
                self.conflicted.insert(key);
                let msg = format!("conflicting types for field `{}` of `{}`; using the default type", name, s.name);
                self.dos.diagnostics.push(Diagnostic::warning(msg));
            }
        }
    }

    /// Embedded structure behind a field, created when missing.
    fn child(&mut self, ds: usize, name: &str) -> usize {
        let s = self.dos.structure(ds);
        if let Some(t) = s.field(name).and_then(|f| aggregate_target(&f.ty)) {
            return t;
        }
        let container = s.container.clone();
        self.dos.new_embedded(&container, singular(name))
    }

    /// Record the fields named by an access path below structure `ds`.
    fn record(&mut self, mut ds: usize, steps: &[Step], ev: Option<PrimitiveType>) {
        let steps = strip_index(steps);
        let mut i = 0;
        while let Some(Step::Prop(name)) = steps.get(i) {
            if name == "length" {
                return;
            }
            let rest = &steps[i + 1..];
            match rest.first() {
                None => return self.set(ds, name, FieldType::Attribute { primitive: ev }),
                Some(Step::Prop(m)) if m == "length" => return self.set(ds, name, collection(FieldType::default_attribute())),
                Some(Step::Prop(_)) => {
                    let t = self.child(ds, name);
                    self.set(ds, name, FieldType::Aggregate { target: t });
                    ds = t;
                    i += 1;
                }
                Some(Step::Index) => match rest.get(1) {
                    Some(Step::Prop(m)) if m != "length" => {
                        let t = self.child(ds, name);
                        self.set(ds, name, collection(FieldType::Aggregate { target: t }));
                        ds = t;
                        i += 2;
                    }
                    None => return self.set(ds, name, collection(FieldType::Attribute { primitive: ev })),
                    _ => return self.set(ds, name, collection(FieldType::default_attribute())),
                },
                Some(Step::Method(m)) => {
                    let ty = if COLLECTION_METHODS.contains(&m.as_str()) {
                        collection(FieldType::default_attribute())
                    } else {
                        FieldType::default_attribute()
                    };
                    return self.set(ds, name, ty);
                }
            }
        }
    }

    /// Record a path relative to an alias, routing `$lookup` aliases to the
    /// joined container.
    fn record_alias(&mut self, alias: &Alias, path: &AccessPath, ev: Option<PrimitiveType>) {
        let mut steps = alias.steps.clone();
        steps.extend(path.steps.iter().cloned());
        let stripped = strip_index(&steps);
        if let Some(Step::Prop(first)) = stripped.first() {
            if let Some(l) = alias.lookups.iter().find(|l| &l.alias == first) {
                let target = self.dos.root_structure(&l.from);
                let rest = stripped[1..].to_vec();
                return self.record(target, &rest, ev);
            }
        }
        let rest = stripped.to_vec();
        self.record(alias.ds, &rest, ev)
    }

    fn payload(&mut self, ds: usize, e: &Expr, evidence: &HashMap<String, PrimitiveType>) {
        let ExprKind::ObjectLiteral { pairs } = &e.kind else { return };
        for (k, v) in pairs {
            match k.as_str() {
                "$set" => self.payload(ds, v, evidence),
                "$push" | "$addToSet" => {
                    if let ExprKind::ObjectLiteral { pairs } = &v.kind {
                        for (f, item) in pairs {
                            let item = match &item.kind {
                                ExprKind::ObjectLiteral { pairs } => {
                                    pairs.iter().find(|(k, _)| k == "$each").map(|(_, x)| x).unwrap_or(item)
                                }
                                _ => item,
                            };
                            let elem = match &item.kind {
                                ExprKind::ArrayLiteral { .. } => match self.value_type(ds, f, item, evidence) {
                                    FieldType::Collection { element } => *element,
                                    t => t,
                                },
                                ExprKind::Literal { .. } | ExprKind::ObjectLiteral { .. } => {
                                    self.value_type(ds, f, item, evidence)
                                }
                                _ => FieldType::default_attribute(),
                            };
                            self.set(ds, f, collection(elem));
                        }
                    }
                }
                k if k.starts_with('$') => {}
                k => {
                    let parts: Vec<&str> = k.split('.').collect();
                    let (last, init) = parts.split_last().expect("split yields one part");
                    let mut target = ds;
                    for p in init {
                        let t = self.child(target, p);
                        self.set(target, p, FieldType::Aggregate { target: t });
                        target = t;
                    }
                    let ty = self.value_type(target, last, v, evidence);
                    self.set(target, last, ty);
                }
            }
        }
    }

    fn value_type(&mut self, ds: usize, name: &str, v: &Expr, evidence: &HashMap<String, PrimitiveType>) -> FieldType {
        match &v.kind {
            ExprKind::Literal { kind, .. } => FieldType::Attribute {
                primitive: kind.primitive(),
            },
            ExprKind::ObjectLiteral { .. } => {
                let t = self.child(ds, name);
                self.payload(t, v, evidence);
                FieldType::Aggregate { target: t }
            }
            ExprKind::ArrayLiteral { items } => {
                if items.iter().any(|i| matches!(i.kind, ExprKind::ObjectLiteral { .. })) {
                    let t = self.child(ds, name);
                    for i in items {
                        self.payload(t, i, evidence);
                    }
                    collection(FieldType::Aggregate { target: t })
                } else {
                    let prim = items.iter().find_map(|i| match &i.kind {
                        ExprKind::Literal { kind, .. } => kind.primitive(),
                        _ => None,
                    });
                    collection(FieldType::Attribute { primitive: prim })
                }
            }
            _ => FieldType::Attribute {
                primitive: access_path(v).and_then(|p| evidence.get(&p.to_string()).copied()),
            },
        }
    }
}

fn collection(element: FieldType) -> FieldType {
    FieldType::Collection {
        element: Box::new(element),
    }
}

/// Maximal access paths in an expression, outside lambda bodies.
pub(crate) fn maximal_paths<'a>(e: &'a Expr, out: &mut Vec<(AccessPath, &'a Expr)>) {
    match access_path(e) {
        Some(p) => {
            out.push((p, e));
            chain_operands(e, out);
        }
        None => {
            for c in expr_children(e) {
                maximal_paths(c, out);
            }
        }
    }
}

fn chain_operands<'a>(e: &'a Expr, out: &mut Vec<(AccessPath, &'a Expr)>) {
    match &e.kind {
        ExprKind::PropertyAccess { object, .. } => chain_operands(object, out),
        ExprKind::IndexAccess { object, index } => {
            maximal_paths(index, out);
            chain_operands(object, out);
        }
        ExprKind::Call {
            receiver: Some(r), args, ..
        } => {
            for a in args {
                maximal_paths(a, out);
            }
            chain_operands(r, out);
        }
        _ => {}
    }
}

/// Literal types compared against path expressions, by path expression id.
fn comparison_evidence(e: &Expr) -> HashMap<NodeId, PrimitiveType> {
    let mut out = HashMap::new();
    walk_expr(e, &mut |x| {
        if let ExprKind::Binary { op, lhs, rhs } = &x.kind {
            if op.is_comparison() {
                for (side, other) in [(lhs, rhs), (rhs, lhs)] {
                    if let ExprKind::Literal { kind, .. } = &other.kind {
                        if let Some(t) = kind.primitive() {
                            out.insert(side.id, t);
                        }
                    }
                }
            }
        }
    });
    out
}

fn file_evidence(code: &CodeModel) -> HashMap<u32, HashMap<String, PrimitiveType>> {
    let mut out = HashMap::new();
    for (_, cc) in code.files() {
        let mut m: HashMap<String, Option<PrimitiveType>> = HashMap::new();
        for ev in collect_evidence(cc) {
            m.entry(ev.subject)
                .and_modify(|t| *t = t.and_then(|t| merge_types(t, ev.ty)))
                .or_insert(Some(ev.ty));
        }
        out.insert(cc.file_index, m.into_iter().filter_map(|(k, v)| Some((k, v?))).collect());
    }
    out
}

/// Discover containers, structures and fields: every Read's result is
/// followed forward through the control flow; filters, `$lookup` stages and
/// (optionally) Insert/Update payloads contribute fields as well.
pub fn forward_traverse(dos: &mut DosModel, cfg: &ControlFlowModel, code: &CodeModel, opts: ExtractOptions) {
    let ix = CodeIndex::new(code);
    let evidence = file_evidence(code);
    let by_node: HashMap<NodeRef, usize> = dos.operations.iter().map(|o| (o.node, o.id)).collect();
    let mut b = Builder {
        dos,
        conflicted: HashSet::new(),
    };
    for i in 0..b.dos.operations.len() {
        let op = b.dos.operations[i].clone();
        let root = b.dos.root_structure(&op.container_name);
        if let Some(f) = &op.filter {
            for c in &f.conjuncts {
                let ev = match &c.rhs {
                    Rhs::Literal { literal, .. } => literal.primitive(),
                    _ => None,
                };
                let steps: Vec<Step> = c.field_path.iter().map(|p| Step::Prop(p.clone())).collect();
                b.record(root, &steps, ev);
            }
        }
        for l in &op.lookups {
            b.record(root, &[Step::Prop(l.local_field.clone())], None);
            let f = b.dos.root_structure(&l.from);
            b.record(f, &[Step::Prop(l.foreign_field.clone())], None);
        }
        match op.kind {
            OperationKind::Insert | OperationKind::Update if opts.payload_structures => {
                if let Some(p) = op.payload_ref.and_then(|p| ix.expr(p)) {
                    let empty = HashMap::new();
                    let ev = evidence.get(&p.id.file).unwrap_or(&empty);
                    b.payload(root, p, ev);
                }
            }
            OperationKind::Read => {
                b.dos.operations[i].result_ds = Some(root);
                if let Some(var) = &op.result_variable {
                    let mut aliases = HashMap::new();
                    aliases.insert(
                        var.clone(),
                        Alias {
                            ds: root,
                            steps: Vec::new(),
                            lookups: op.lookups.clone(),
                        },
                    );
                    follow(&mut b, cfg, &ix, &by_node, i, aliases);
                }
            }
            _ => {}
        }
    }
}

fn follow(
    b: &mut Builder,
    cfg: &ControlFlowModel,
    ix: &CodeIndex,
    by_node: &HashMap<NodeRef, usize>,
    op: usize,
    mut aliases: HashMap<String, Alias>,
) {
    let op_call = b.dos.operations[op].call_ref;
    for r in cfg.forward_from(b.dos.operations[op].node) {
        if aliases.is_empty() {
            break;
        }
        let node = cfg.node(r);
        let stmt = node.stmt_ref.and_then(|s| ix.stmt(s));
        let exprs = node_exprs(cfg, ix, r);
        for e in &exprs {
            let ev = comparison_evidence(e);
            let mut paths = Vec::new();
            maximal_paths(e, &mut paths);
            for (p, pe) in paths {
                if let Some(a) = aliases.get(&p.root) {
                    let a = a.clone();
                    b.record_alias(&a, &p, ev.get(&pe.id).copied());
                }
            }
        }
        if node.kind == NodeKind::Call {
            if let Some(call) = node.expr_ref.and_then(|e| ix.expr(e)) {
                let own_cursor = matches!(&call.kind, ExprKind::Call { receiver: Some(r), .. } if r.id == op_call);
                if !own_cursor {
                    bind_lambda_params(call, &mut aliases);
                }
            }
            if let Some(&j) = by_node.get(&r) {
                if let Some(v) = &b.dos.operations[j].result_variable {
                    aliases.remove(v);
                }
            }
        }
        if node.stmt_tail {
            if let Some(s) = stmt {
                rebind(s, &mut aliases);
            }
        }
    }
}

/// Expressions evaluated at a node: the call or condition, plus the whole
/// statement at a statement's last node.
pub(crate) fn node_exprs<'a>(cfg: &ControlFlowModel, ix: &CodeIndex<'a>, r: NodeRef) -> Vec<&'a Expr> {
    let node = cfg.node(r);
    let stmt = node.stmt_ref.and_then(|s| ix.stmt(s));
    let mut exprs: Vec<&Expr> = Vec::new();
    match node.kind {
        NodeKind::Call | NodeKind::Selection => exprs.extend(node.expr_ref.and_then(|e| ix.expr(e))),
        NodeKind::Statement => exprs.extend(stmt.map(stmt_exprs).unwrap_or_default()),
        _ => {}
    }
    if node.stmt_tail && node.kind != NodeKind::Statement {
        exprs.extend(stmt.map(stmt_exprs).unwrap_or_default());
    }
    exprs
}

fn bind_lambda_params(call: &Expr, aliases: &mut HashMap<String, Alias>) {
    let ExprKind::Call { receiver, method, args } = &call.kind else {
        return;
    };
    let element = receiver
        .as_deref()
        .and_then(access_path)
        .filter(|_| ELEMENT_METHODS.contains(&method.as_str()))
        .and_then(|p| {
            let a = aliases.get(&p.root)?;
            let mut steps = a.steps.clone();
            steps.extend(p.steps);
            steps.push(Step::Index);
            Some(Alias {
                ds: a.ds,
                steps,
                lookups: a.lookups.clone(),
            })
        });
    for (i, a) in args.iter().enumerate() {
        if let ExprKind::Lambda { params, .. } = &a.kind {
            for (k, p) in params.iter().enumerate() {
                aliases.remove(p);
                if i == 0 && k == 0 {
                    if let Some(el) = &element {
                        aliases.insert(p.clone(), el.clone());
                    }
                }
            }
        }
    }
}

fn rebind(s: &crate::code::Statement, aliases: &mut HashMap<String, Alias>) {
    let (name, value) = match &s.variant {
        StmtKind::VariableDecl {
            name, init: Some(init), ..
        } => (name.as_str(), init),
        StmtKind::Assignment {
            target:
                Expr {
                    kind: ExprKind::VarAccess { name },
                    ..
                },
            value,
        } => (name.as_str(), value),
        _ => return,
    };
    let target = access_path(value)
        .filter(|p| !p.steps.iter().any(|s| matches!(s, Step::Method(_))))
        .and_then(|p| {
            let a = aliases.get(&p.root)?;
            let mut steps = a.steps.clone();
            steps.extend(p.steps);
            Some(Alias {
                ds: a.ds,
                steps,
                lookups: a.lookups.clone(),
            })
        });
    match target {
        Some(t) => {
            aliases.insert(name.to_string(), t);
        }
        None => {
            aliases.remove(name);
        }
    }
}
