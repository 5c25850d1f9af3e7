use sha2::{Digest, Sha256};

use crate::cfg::ControlFlowModel;
use crate::code::visit::{for_each_block_mut, AccessPath, CodeIndex, Step};
use crate::code::{print_block_body, print_statement, CodeModel, NodeId};
use crate::dos::refs::resolve;
use crate::dos::{DosField, DosModel, FieldRef, FieldType, Rhs};
use crate::error::Diagnostic;
use crate::uschema::{entity_name, structure_entity_name};

use super::detect::{detect_duplications, JoinCandidate};
use super::rewrite::{container_mut, rewrite};
use super::{Duplicate, JoinRemovalPlan, JoinType, ReferencePath};

pub(crate) fn digest(s: &str) -> String {
    format!("{:x}", Sha256::digest(s.as_bytes()))
}

/// Digest of the printed statement `id`, or `None` when it is gone.
pub(crate) fn statement_signature(ix: &CodeIndex, id: NodeId) -> Option<String> {
    ix.stmt(id).map(|s| digest(&print_statement(s, 0)))
}

fn prop_steps(props: &[String]) -> Vec<Step> {
    props.iter().map(|p| Step::Prop(p.clone())).collect()
}

fn is_many(t: &FieldType) -> bool {
    matches!(t, FieldType::Collection { .. } | FieldType::Reference { many: true, .. })
}

/// Array flags for each property step from `ds` down the path.
fn array_flags(dos: &DosModel, mut ds: usize, props: &[String]) -> Vec<bool> {
    let mut out = Vec::new();
    for p in props {
        let Some(f) = dos.structure(ds).field(p) else {
            out.push(false);
            continue;
        };
        out.push(is_many(&f.ty));
        match &f.ty {
            FieldType::Aggregate { target } => ds = *target,
            FieldType::Collection { element } => {
                if let FieldType::Aggregate { target } = element.as_ref() {
                    ds = *target
                }
            }
            _ => {}
        }
    }
    out
}

/// Structure holding the reference field of a plan.
pub(crate) fn destination_structure(dos: &DosModel, plan: &JoinRemovalPlan) -> Option<usize> {
    let root = dos.root_of(&plan.target_container)?;
    if plan.reference.reverse {
        return Some(root);
    }
    resolve(dos, root, &prop_steps(&plan.reference.props)).map(|(ds, _)| ds)
}

struct Join {
    join_type: JoinType,
    target_container: String,
    source_container: String,
    destination: usize,
    reference: ReferencePath,
    join_var: String,
    alias: Option<String>,
}

fn sequential_join(dos: &DosModel, c: &JoinCandidate) -> Option<Join> {
    let op = &dos.operations[c.join_op];
    let prev = &dos.operations[c.prev_op?];
    let root = prev.result_ds?;
    let (path, attr, ds) = op.filter.as_ref()?.conjuncts.iter().find_map(|cj| {
        let Rhs::VariablePath { path } = &cj.rhs else { return None };
        let (ds, _) = resolve(dos, root, &path.steps)?;
        Some((path, cj.field_path.join("."), ds))
    })?;
    let props: Vec<String> = AccessPath::props(path).into_iter().map(String::from).collect();
    if props.len() == 1 && props[0] == "_id" && attr != "_id" {
        return Some(Join {
            join_type: JoinType::Sequential,
            target_container: prev.container_name.clone(),
            source_container: op.container_name.clone(),
            destination: ds,
            reference: ReferencePath {
                arrays: vec![op.cursor],
                props,
                target_attribute: attr,
                many: op.cursor,
                reverse: true,
            },
            join_var: op.result_variable.clone()?,
            alias: None,
        });
    }
    let arrays = array_flags(dos, root, &props);
    Some(Join {
        join_type: JoinType::Sequential,
        target_container: prev.container_name.clone(),
        source_container: op.container_name.clone(),
        destination: ds,
        reference: ReferencePath {
            many: arrays.last().copied().unwrap_or(false),
            arrays,
            props,
            target_attribute: attr,
            reverse: false,
        },
        join_var: op.result_variable.clone()?,
        alias: None,
    })
}

fn lookup_join(dos: &DosModel, c: &JoinCandidate) -> Option<Join> {
    let op = &dos.operations[c.join_op];
    let l = &op.lookups[c.lookup?];
    let root = dos.root_of(&op.container_name)?;
    let (props, attr, many, reverse) = if l.foreign_field == "_id" {
        let many = dos.structure(root).field(&l.local_field).is_some_and(|f| is_many(&f.ty));
        (vec![l.local_field.clone()], "_id".to_string(), many, false)
    } else if l.local_field == "_id" {
        (vec!["_id".to_string()], l.foreign_field.clone(), !l.unwind, true)
    } else {
        (vec![l.local_field.clone()], l.foreign_field.clone(), !l.unwind, false)
    };
    Some(Join {
        join_type: JoinType::Aggregation,
        target_container: op.container_name.clone(),
        source_container: l.from.clone(),
        destination: root,
        reference: ReferencePath {
            arrays: vec![many],
            props,
            target_attribute: attr,
            many,
            reverse,
        },
        join_var: op.result_variable.clone()?,
        alias: Some(l.alias.clone()),
    })
}

/// Prefix for copied field names: the reference field without its `_id`
/// suffix, or the referenced entity name.
fn stem(reference: &ReferencePath, source_container: &str) -> String {
    match reference.field().strip_suffix("_id") {
        Some(s) if !s.is_empty() && !reference.reverse => s.to_string(),
        _ => entity_name(source_container).to_lowercase(),
    }
}

/// Print the block holding `stmt` before and after a dry-run rewrite.
fn snippets(code: &CodeModel, plan: &JoinRemovalPlan) -> (String, Result<String, String>) {
    let mut scratch = code.clone();
    let Some(cc) = container_mut(&mut scratch, plan.join_stmt.file) else {
        return (String::new(), Err("file not found".into()));
    };
    let mut found = None;
    for b in cc.blocks.iter_mut() {
        for_each_block_mut(b, &mut |b| {
            if found.is_none() && b.statements.iter().any(|s| s.id == plan.join_stmt) {
                found = Some((b.id, print_block_body(b, 0)));
            }
        });
    }
    let Some((block, before)) = found else {
        return (String::new(), Err("join statement not found".into()));
    };
    if let Err(e) = rewrite(&mut scratch, plan) {
        return (before, Err(e.to_string()));
    }
    let cc = container_mut(&mut scratch, plan.join_stmt.file).expect("file still present");
    let mut after = String::new();
    for b in cc.blocks.iter_mut() {
        for_each_block_mut(b, &mut |b| {
            if b.id == block && after.is_empty() {
                after = print_block_body(b, 0);
            }
        });
    }
    (before, Ok(after))
}

fn plan_for(code: &CodeModel, ix: &CodeIndex, dos: &DosModel, c: &JoinCandidate) -> Option<JoinRemovalPlan> {
    if c.fields.is_empty() {
        return None;
    }
    let op = &dos.operations[c.join_op];
    let j = match c.lookup {
        None => sequential_join(dos, c)?,
        Some(_) => lookup_join(dos, c)?,
    };
    let mut warnings = Vec::new();
    let stem = stem(&j.reference, &j.source_container);
    let dest = dos.structure(j.destination);
    let taken = |n: &str| dest.field(n).is_some();
    let fresh = |n: String, warnings: &mut Vec<Diagnostic>| {
        if taken(&n) {
            warnings.push(
                Diagnostic::warning(format!("field `{n}` already exists; copy renamed to `{n}_dup`")).at(
                    Some(&op.file),
                    op.line,
                    0,
                ),
            );
            format!("{n}_dup")
        } else {
            n
        }
    };
    let prefix: String = j.reference.props[..j.reference.props.len().saturating_sub(1)]
        .iter()
        .map(|p| format!("{p}."))
        .collect();
    let (embedded, duplicates) = if c.fields.len() == 1 {
        let n = fresh(format!("{stem}_{}", c.fields[0]), &mut warnings);
        let d = Duplicate {
            source_field: c.fields[0].clone(),
            destination_path: format!("{prefix}{n}"),
            new_name: n,
        };
        (None, vec![d])
    } else {
        let s = fresh(stem, &mut warnings);
        let ds = c
            .fields
            .iter()
            .map(|f| Duplicate {
                source_field: f.clone(),
                new_name: f.clone(),
                destination_path: format!("{prefix}{s}.{f}"),
            })
            .collect();
        (Some(s), ds)
    };
    let id_src = format!(
        "{}|{:?}|{:?}|{}|{}|{:?}|{:?}|{:?}",
        op.file, op.handler, j.join_type, j.target_container, j.source_container, j.reference, c.fields, j.alias
    );
    let related_ops = dos
        .operations
        .iter()
        .filter(|o| o.container_name == j.target_container || o.container_name == j.source_container)
        .map(|o| o.id)
        .collect();
    let mut plan = JoinRemovalPlan {
        id: digest(&id_src)[..12].to_string(),
        join_type: j.join_type,
        query: op.handler.clone().unwrap_or_else(|| format!("{}:{}", op.file, op.line)),
        file: op.file.clone(),
        line: op.line,
        join_op: c.join_op,
        prev_op: c.prev_op,
        lookup: c.lookup,
        target_entity: entity_name(&j.target_container),
        target_container: j.target_container,
        source_entity: entity_name(&j.source_container),
        source_container: j.source_container,
        destination_entity: structure_entity_name(dos, j.destination),
        reference: j.reference,
        duplicates,
        embedded,
        usage_sites: c.usage_sites.clone(),
        usage_line_count: c.usage_lines.len(),
        related_ops,
        original_snippet: String::new(),
        rewritten_snippet: String::new(),
        partial: c.escapes,
        join_stmt: op.stmt_ref,
        join_call: op.call_ref,
        join_var: j.join_var,
        alias: j.alias,
        signature: statement_signature(ix, op.stmt_ref).unwrap_or_default(),
        warnings,
    };
    let (before, after) = snippets(code, &plan);
    plan.original_snippet = before;
    match after {
        Ok(a) => plan.rewritten_snippet = a,
        Err(e) => {
            plan.partial = true;
            plan.warnings
                .push(Diagnostic::warning(format!("code cannot be rewritten: {e}")).at(Some(&op.file), op.line, 0));
        }
    }
    Some(plan)
}

/// One join removal plan per join whose data is used with the data it
/// was joined to, in operation order.
pub fn build_plans(code: &CodeModel, cfg: &ControlFlowModel, dos: &DosModel) -> Vec<JoinRemovalPlan> {
    let ix = CodeIndex::new(code);
    detect_duplications(cfg, code, dos)
        .iter()
        .filter_map(|c| plan_for(code, &ix, dos, c))
        .collect()
}

fn copied_type(dos: &DosModel, plan: &JoinRemovalPlan, field: &str) -> FieldType {
    let primitive = dos
        .root_of(&plan.source_container)
        .and_then(|r| dos.structure(r).field(field))
        .and_then(|f| match &f.ty {
            FieldType::Attribute { primitive } => *primitive,
            _ => None,
        });
    FieldType::Attribute { primitive }
}

fn wrap_many(t: FieldType, many: bool) -> FieldType {
    if many {
        FieldType::Collection { element: Box::new(t) }
    } else {
        t
    }
}

/// Record the copies a plan introduces as duplicated fields of the DOS
/// model.
pub fn annotate_duplications(dos: &mut DosModel, plans: &[JoinRemovalPlan]) {
    for plan in plans {
        let (Some(ds), Some(src)) = (destination_structure(dos, plan), dos.root_of(&plan.source_container)) else {
            continue;
        };
        let many = plan.reference.many;
        let copy = |dos: &DosModel, d: &Duplicate| DosField {
            name: d.new_name.clone(),
            ty: copied_type(dos, plan, &d.source_field),
            duplicated_from: Some(FieldRef {
                structure: src,
                field: d.source_field.clone(),
            }),
        };
        match &plan.embedded {
            None => {
                for d in &plan.duplicates {
                    let mut f = copy(dos, d);
                    f.ty = wrap_many(f.ty, many);
                    dos.structure_mut(ds).fields.push(f);
                }
            }
            Some(stem) => {
                let fields: Vec<DosField> = plan.duplicates.iter().map(|d| copy(dos, d)).collect();
                let e = dos.new_embedded(&plan.target_container, stem);
                dos.structure_mut(e).fields = fields;
                dos.structure_mut(ds).fields.push(DosField {
                    name: stem.clone(),
                    ty: wrap_many(FieldType::Aggregate { target: e }, many),
                    duplicated_from: None,
                });
            }
        }
    }
}

/// Plan summary as a text table, numbered per join operation.
pub fn plan_table(plans: &[JoinRemovalPlan]) -> String {
    let header = ["#", "Query", "Target entity", "Source entity", "Fields", "Location", "Join type", "Plan"];
    let mut n = 0;
    let rows: Vec<[String; 8]> = plans
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let first = i == 0 || plans[i - 1].join_op != p.join_op;
            n += usize::from(first);
            [
                if first { n.to_string() } else { String::new() },
                p.query.clone(),
                p.target_entity.clone(),
                p.source_entity.clone(),
                p.fields().join(", "),
                p.location(),
                p.join_type.to_string(),
                p.id.clone(),
            ]
        })
        .collect();
    let mut w: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in &rows {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let s: Vec<String> = cells.iter().zip(&w).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", s.join(" | ").trim_end())
    };
    let mut out = line(header.to_vec());
    let sep: Vec<String> = w.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&sep.join("-+-"));
    out.push('\n');
    for r in &rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}
