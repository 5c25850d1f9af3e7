use std::collections::HashSet;

use crate::code::visit::{access_path, for_each_block_mut, for_each_expr_mut, walk_all_exprs, walk_stmts, Step};
use crate::code::{CodeBlock, CodeContainer, CodeModel, Expr, ExprKind, NodeId, Statement, StmtKind};
use crate::dos::structure::{strip_index, ELEMENT_METHODS};
use crate::error::{Error, Result};

use super::{JoinRemovalPlan, JoinType};

fn rewrite_error(plan: &JoinRemovalPlan, msg: impl Into<String>) -> Error {
    Error::Rewrite(plan.id.clone(), msg.into())
}

fn node(id: NodeId, kind: ExprKind) -> Expr {
    Expr { id, kind }
}

fn prop(object: Expr, property: &str) -> Expr {
    node(
        object.id,
        ExprKind::PropertyAccess {
            object: Box::new(object),
            property: property.to_string(),
        },
    )
}

pub(crate) fn container_mut(code: &mut CodeModel, file: u32) -> Option<&mut CodeContainer> {
    code.files_mut().into_iter().map(|(_, cc)| cc).find(|cc| cc.file_index == file)
}

/// Remove the plan's join from the code in place. Node ids are left
/// stale; callers renumber.
pub(crate) fn rewrite(code: &mut CodeModel, plan: &JoinRemovalPlan) -> Result<()> {
    let cc = container_mut(code, plan.join_stmt.file)
        .ok_or_else(|| Error::PlanStale(plan.id.clone(), "file no longer present".into()))?;
    let mut result = None;
    for block in cc.blocks.iter_mut() {
        for_each_block_mut(block, &mut |b| {
            if result.is_some() {
                return;
            }
            if let Some(idx) = b.statements.iter().position(|s| s.id == plan.join_stmt) {
                result = Some(match plan.join_type {
                    JoinType::Sequential => inline_join(b, idx, plan),
                    JoinType::Aggregation => drop_lookup(b, idx, plan),
                });
            }
        });
    }
    result.unwrap_or_else(|| Err(Error::PlanStale(plan.id.clone(), "join statement not found".into())))
}

/// Right-hand side of the join predicate in the join call's filter.
fn predicate_rhs<'a>(args: &'a [Expr], attr: &str) -> Option<&'a Expr> {
    args.iter().find_map(|a| match &a.kind {
        ExprKind::ObjectLiteral { pairs } => pairs.iter().find(|(k, _)| k == attr).map(|(_, v)| v),
        _ => None,
    })
}

/// Rename the last property step of an access chain.
fn rename_last_prop(e: &mut Expr, to: &str) -> bool {
    match &mut e.kind {
        ExprKind::IndexAccess { object, .. } => rename_last_prop(object, to),
        ExprKind::PropertyAccess { property, .. } => {
            *property = to.to_string();
            true
        }
        _ => false,
    }
}

fn inline_join(b: &mut CodeBlock, idx: usize, plan: &JoinRemovalPlan) -> Result<()> {
    let StmtKind::ExpressionStmt {
        expr: Expr {
            id,
            kind: ExprKind::Call { args, .. },
        },
    } = &b.statements[idx].variant
    else {
        return Err(rewrite_error(plan, "join is not a call statement"));
    };
    if *id != plan.join_call {
        return Err(rewrite_error(plan, "join call is nested inside another expression"));
    }
    let rhs = predicate_rhs(args, &plan.reference.target_attribute)
        .ok_or_else(|| rewrite_error(plan, "join predicate not found"))?
        .clone();
    let Some((params, body)) = args.iter().rev().find_map(|a| match &a.kind {
        ExprKind::Lambda { params, body, .. } => Some((params, body)),
        _ => None,
    }) else {
        return Err(rewrite_error(plan, "join has no callback"));
    };
    if !params.contains(&plan.join_var) {
        return Err(rewrite_error(plan, "callback does not bind the join result"));
    }
    let mut body = body.clone();
    let mut failure = None;
    for_each_expr_mut(&mut body, &mut |e| {
        let ExprKind::PropertyAccess { object, property } = &e.kind else { return };
        if !matches!(&object.kind, ExprKind::VarAccess { name } if *name == plan.join_var) {
            return;
        }
        let Some(d) = plan.duplicates.iter().find(|d| &d.source_field == property) else {
            failure.get_or_insert_with(|| format!("field `{property}` of `{}` is not duplicated", plan.join_var));
            return;
        };
        let mut r = rhs.clone();
        let renamed = match &plan.embedded {
            None => rename_last_prop(&mut r, &d.new_name),
            Some(stem) => rename_last_prop(&mut r, stem),
        };
        if !renamed {
            failure.get_or_insert_with(|| "join key is held in a local variable".to_string());
            return;
        }
        if plan.embedded.is_some() {
            r = prop(r, &d.new_name);
        }
        *e = r;
    });
    if let Some(m) = failure {
        return Err(rewrite_error(plan, m));
    }
    let mut dangling = false;
    walk_all_exprs(&body, &mut |e| {
        dangling |= matches!(&e.kind, ExprKind::VarAccess { name } if *name == plan.join_var);
    });
    if dangling {
        return Err(rewrite_error(plan, format!("`{}` is used beyond duplicated fields", plan.join_var)));
    }
    b.statements.splice(idx..=idx, body.statements);
    Ok(())
}

fn is_lookup_stage(e: &Expr, alias: &str) -> bool {
    let ExprKind::ObjectLiteral { pairs } = &e.kind else { return false };
    match pairs.first() {
        Some((k, v)) if k == "$lookup" => match &v.kind {
            ExprKind::ObjectLiteral { pairs } => pairs.iter().any(|(k, v)| {
                k == "as" && matches!(&v.kind, ExprKind::Literal { lexeme, .. } if lexeme == alias)
            }),
            _ => false,
        },
        Some((k, v)) if k == "$unwind" => {
            matches!(&v.kind, ExprKind::Literal { lexeme, .. } if lexeme.strip_prefix('$') == Some(alias))
        }
        _ => false,
    }
}

/// Variables holding result documents (or the result array) of the read.
fn document_vars(block: &CodeBlock, result: &str) -> HashSet<String> {
    let mut docs = HashSet::from([result.to_string()]);
    let bare = |e: &Expr, docs: &HashSet<String>| {
        access_path(e).is_some_and(|p| docs.contains(&p.root) && p.steps.iter().all(|s| *s == Step::Index))
    };
    loop {
        let before = docs.len();
        walk_all_exprs(block, &mut |e| {
            if let ExprKind::Call {
                receiver: Some(r),
                method,
                args,
            } = &e.kind
            {
                if ELEMENT_METHODS.contains(&method.as_str()) && bare(r, &docs) {
                    if let Some(ExprKind::Lambda { params, .. }) = args.first().map(|a| &a.kind) {
                        docs.extend(params.first().cloned());
                    }
                }
            }
        });
        walk_stmts(block, &mut |s| {
            if let StmtKind::VariableDecl {
                name, init: Some(init), ..
            } = &s.variant
            {
                if bare(init, &docs) {
                    docs.insert(name.clone());
                }
            }
        });
        if docs.len() == before {
            return docs;
        }
    }
}

/// `base.alias` or `base.alias[i]` with `base` a result document.
fn split_alias<'a>(o: &'a Expr, alias: &str, docs: &HashSet<String>) -> Option<(&'a Expr, Option<&'a Expr>)> {
    let (pa, index) = match &o.kind {
        ExprKind::IndexAccess { object, index } => (object.as_ref(), Some(index.as_ref())),
        _ => (o, None),
    };
    let ExprKind::PropertyAccess { object, property } = &pa.kind else { return None };
    if property != alias {
        return None;
    }
    let p = access_path(object)?;
    (docs.contains(&p.root) && strip_index(&p.steps).is_empty()).then_some((object.as_ref(), index))
}

fn drop_lookup(b: &mut CodeBlock, idx: usize, plan: &JoinRemovalPlan) -> Result<()> {
    let alias = plan.alias.clone().ok_or_else(|| rewrite_error(plan, "aggregation plan without alias"))?;
    let stmt = std::mem::replace(
        &mut b.statements[idx],
        Statement {
            id: plan.join_stmt,
            span: Default::default(),
            variant: StmtKind::Return { value: None },
        },
    );
    let mut tmp = CodeBlock {
        id: plan.join_stmt,
        statements: vec![stmt],
        locals: Vec::new(),
        callable: None,
    };
    let docs = document_vars(&tmp, &plan.join_var);
    let mut uses = 0;
    walk_all_exprs(&tmp, &mut |e| {
        if let ExprKind::PropertyAccess { object, property } = &e.kind {
            if *property == alias && access_path(object).is_some_and(|p| docs.contains(&p.root)) {
                uses += 1;
            }
        }
    });
    let mut replaced = 0;
    let mut removed = 0;
    let mut failure = None;
    for_each_expr_mut(&mut tmp, &mut |e| {
        if e.id == plan.join_call {
            if let ExprKind::Call { args, .. } = &mut e.kind {
                for a in args.iter_mut() {
                    if let ExprKind::ArrayLiteral { items } = &mut a.kind {
                        let n = items.len();
                        items.retain(|s| !is_lookup_stage(s, &alias));
                        removed += n - items.len();
                    }
                }
            }
            return;
        }
        let ExprKind::PropertyAccess { object, property } = &e.kind else { return };
        let Some((base, index)) = split_alias(object, &alias, &docs) else { return };
        let Some(d) = plan.duplicates.iter().find(|d| &d.source_field == property) else {
            failure.get_or_insert_with(|| format!("field `{property}` of `{alias}` is not duplicated"));
            return;
        };
        let wrap = |inner: Expr| match index {
            Some(i) => node(
                inner.id,
                ExprKind::IndexAccess {
                    object: Box::new(inner),
                    index: Box::new(i.clone()),
                },
            ),
            None => inner,
        };
        replaced += 1;
        *e = match &plan.embedded {
            None => wrap(prop(base.clone(), &d.new_name)),
            Some(stem) => prop(wrap(prop(base.clone(), stem)), &d.new_name),
        };
    });
    let stmt = tmp.statements.pop().expect("statement kept");
    b.statements[idx] = stmt;
    if let Some(m) = failure {
        return Err(rewrite_error(plan, m));
    }
    if removed == 0 {
        return Err(rewrite_error(plan, format!("no `$lookup` stage named `{alias}`")));
    }
    if replaced < uses {
        return Err(rewrite_error(plan, format!("`{alias}` is used beyond duplicated fields")));
    }
    Ok(())
}
