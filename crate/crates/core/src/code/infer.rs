//! Local type inference from literal initializations and comparisons.

use std::collections::BTreeMap;

use super::visit::{access_path, stmt_exprs, walk_all_exprs, walk_expr, walk_stmts, AccessPath};
use super::*;

/// One piece of literal type evidence found in the code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TypeEvidence {
    /// Variable name, access path (`u.stars`) or object key the literal
    /// is bound to.
    pub subject: String,
    pub ty: PrimitiveType,
    pub site: NodeId,
}

/// Merge two pieces of evidence. `None` marks a conflict.
pub fn merge_types(a: PrimitiveType, b: PrimitiveType) -> Option<PrimitiveType> {
    use PrimitiveType::*;
    match (a, b) {
        _ if a == b => Some(a),
        (Int, Double) | (Double, Int) => Some(Double),
        _ => None,
    }
}

fn literal_type(e: &Expr) -> Option<PrimitiveType> {
    match &e.kind {
        ExprKind::Literal { kind, .. } => kind.primitive(),
        _ => None,
    }
}

fn path_subject(p: &AccessPath) -> String {
    p.to_string()
}

/// Collect evidence from one file.
pub fn collect_evidence(cc: &CodeContainer) -> Vec<TypeEvidence> {
    let mut out = Vec::new();
    for block in &cc.blocks {
        walk_stmts(block, &mut |s| match &s.variant {
            StmtKind::VariableDecl {
                name,
                init: Some(init),
                ..
            } => {
                if let Some(ty) = literal_type(init) {
                    out.push(TypeEvidence {
                        subject: name.clone(),
                        ty,
                        site: s.id,
                    });
                }
            }
            StmtKind::Assignment { target, value } => {
                if let (Some(p), Some(ty)) = (access_path(target), literal_type(value)) {
                    out.push(TypeEvidence {
                        subject: path_subject(&p),
                        ty,
                        site: s.id,
                    });
                }
            }
            _ => {}
        });
        walk_all_exprs(block, &mut |e| match &e.kind {
            ExprKind::Binary { op, lhs, rhs } if op.is_comparison() => {
                for (side, other) in [(lhs, rhs), (rhs, lhs)] {
                    if let (Some(p), Some(ty)) = (access_path(side), literal_type(other)) {
                        out.push(TypeEvidence {
                            subject: path_subject(&p),
                            ty,
                            site: e.id,
                        });
                    }
                }
            }
            ExprKind::ObjectLiteral { pairs } => {
                for (k, v) in pairs {
                    if let Some(ty) = literal_type(v) {
                        out.push(TypeEvidence {
                            subject: k.clone(),
                            ty,
                            site: v.id,
                        });
                    }
                }
            }
            _ => {}
        });
    }
    out
}

/// Annotate variable declarations and lambda-parameter classes with
/// locally inferred types. Returns all evidence found.
pub fn infer_local_types(model: &mut CodeModel) -> Vec<TypeEvidence> {
    let mut all = Vec::new();
    let mut warnings = Vec::new();
    let mut classes: BTreeMap<String, BTreeMap<String, Option<PrimitiveType>>> = BTreeMap::new();

    for (path, cc) in model.files_mut() {
        let evidence = collect_evidence(cc);
        let mut by_subject: BTreeMap<&str, Option<PrimitiveType>> = BTreeMap::new();
        for ev in &evidence {
            let slot = by_subject.entry(ev.subject.as_str()).or_insert(Some(ev.ty));
            if let Some(cur) = *slot {
                let merged = merge_types(cur, ev.ty);
                if merged.is_none() {
                    warnings.push(Diagnostic {
                        path: Some(path.clone()),
                        ..Diagnostic::warning(format!(
                            "conflicting type evidence for `{}`: {} vs {}",
                            ev.subject, cur, ev.ty
                        ))
                    });
                }
                *slot = merged;
            }
        }
        let resolved = |name: &str| -> VarType {
            match by_subject.get(name) {
                Some(Some(t)) => (*t).into(),
                _ => VarType::Unknown,
            }
        };

        // lambda and function parameters whose properties are read
        let mut params: Vec<String> = Vec::new();
        for block in &cc.blocks {
            walk_stmts(block, &mut |s| {
                if let StmtKind::FunctionDecl { body, .. } = &s.variant {
                    if let Some(c) = &body.callable {
                        params.extend(c.params.iter().cloned());
                    }
                }
                for e in stmt_exprs(s) {
                    walk_expr(e, &mut |x| {
                        if let ExprKind::Lambda { params: ps, .. } = &x.kind {
                            params.extend(ps.iter().cloned());
                        }
                    });
                }
            });
            walk_all_exprs(block, &mut |e| {
                if let ExprKind::PropertyAccess { object, property } = &e.kind {
                    if let ExprKind::VarAccess { name } = &object.kind {
                        if params.contains(name) {
                            let ty = by_subject.get(format!("{name}.{property}").as_str()).copied().flatten();
                            let props = classes.entry(name.clone()).or_default();
                            match props.get(property) {
                                None => {
                                    props.insert(property.clone(), ty);
                                }
                                Some(None) => {
                                    props.insert(property.clone(), ty);
                                }
                                Some(Some(cur)) => {
                                    if let Some(t) = ty {
                                        let merged = merge_types(*cur, t);
                                        props.insert(property.clone(), merged);
                                    }
                                }
                            }
                        }
                    }
                }
            });
        }

        for block in cc.blocks.iter_mut() {
            super::visit::for_each_block_mut(block, &mut |b| {
                for v in b.locals.iter_mut() {
                    v.declared_type = resolved(&v.name);
                }
            });
        }
        for v in cc.variable_decls.iter_mut() {
            v.declared_type = resolved(&v.name);
        }
        all.extend(evidence);
    }

    model.classes = classes
        .into_iter()
        .map(|(name, props)| ClassDecl {
            name,
            properties: props
                .into_iter()
                .map(|(p, t)| (p, t.map(VarType::from).unwrap_or_default()))
                .collect(),
        })
        .collect();
    let mut globals: Vec<VariableDecl> = Vec::new();
    for (_, cc) in model.files() {
        for v in &cc.variable_decls {
            if !globals.iter().any(|g| g.name == v.name) {
                globals.push(v.clone());
            }
        }
    }
    model.globals = globals;
    model.warnings.extend(warnings);
    all
}
