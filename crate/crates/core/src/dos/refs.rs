use crate::code::visit::Step;
use crate::code::CodeModel;
use crate::error::Diagnostic;

use super::{DosModel, FieldType, Rhs};

/// Field of structure `ds` named by a path, following aggregates.
pub(crate) fn resolve(dos: &DosModel, mut ds: usize, steps: &[Step]) -> Option<(usize, String)> {
    let props: Vec<&str> = steps
        .iter()
        .filter_map(|s| match s {
            Step::Prop(p) => Some(p.as_str()),
            _ => None,
        })
        .collect();
    let (last, init) = props.split_last()?;
    for p in init {
        let f = dos.structure(ds).field(p)?;
        ds = match &f.ty {
            FieldType::Aggregate { target } => *target,
            FieldType::Collection { element } => match element.as_ref() {
                FieldType::Aggregate { target } => *target,
                _ => return None,
            },
            _ => return None,
        };
    }
    dos.structure(ds).field(last)?;
    Some((ds, last.to_string()))
}

fn make_reference(dos: &mut DosModel, ds: usize, field: &str, container: &str, attribute: &str) {
    let s = dos.structure_mut(ds);
    let Some(f) = s.fields.iter_mut().find(|f| f.name == field) else {
        s.fields.push(super::DosField {
            name: field.to_string(),
            ty: FieldType::Reference {
                target_container: container.to_string(),
                target_attribute: attribute.to_string(),
                many: false,
            },
            duplicated_from: None,
        });
        return;
    };
    let many = match &f.ty {
        FieldType::Collection { .. } => true,
        FieldType::Reference { many, .. } => *many,
        _ => false,
    };
    f.ty = FieldType::Reference {
        target_container: container.to_string(),
        target_attribute: attribute.to_string(),
        many,
    };
}

/// Turn join predicates and `$lookup` stages into Reference fields.
pub fn create_references(dos: &mut DosModel, _code: &CodeModel) {
    for i in 0..dos.operations.len() {
        let op = dos.operations[i].clone();
        if !op.is_join {
            continue;
        }
        if let (Some(j), Some(filter)) = (op.prev_op, &op.filter) {
            let prev_ds = dos.operations[j].result_ds;
            let mut done = false;
            for c in &filter.conjuncts {
                let Rhs::VariablePath { path } = &c.rhs else { continue };
                if let Some((ds, field)) = prev_ds.and_then(|d| resolve(dos, d, &path.steps)) {
                    let attr = c.field_path.join(".");
                    if field == "_id" && attr != "_id" && dos.structure(ds).root {
                        let steps: Vec<Step> = c.field_path.iter().map(|p| Step::Prop(p.clone())).collect();
                        let own = op.result_ds.unwrap_or_else(|| dos.root_structure(&op.container_name));
                        let (rds, rfield) = resolve(dos, own, &steps).unwrap_or((own, attr));
                        let target = dos.structure(ds).container.clone();
                        make_reference(dos, rds, &rfield, &target, "_id");
                    } else {
                        make_reference(dos, ds, &field, &op.container_name, &attr);
                    }
                    done = true;
                    break;
                }
            }
            if !done {
                dos.diagnostics.push(
                    Diagnostic::warning(format!(
                        "cannot locate the join field of the `{}` read in `{}`",
                        op.container_name, dos.operations[j].container_name
                    ))
                    .at(Some(&op.file), op.line, 0),
                );
            }
        }
        for l in &op.lookups {
            let c = dos.root_structure(&op.container_name);
            let f = dos.root_structure(&l.from);
            if l.foreign_field == "_id" {
                make_reference(dos, c, &l.local_field, &l.from, "_id");
            } else if l.local_field == "_id" {
                make_reference(dos, f, &l.foreign_field, &op.container_name, "_id");
            } else {
                make_reference(dos, c, &l.local_field, &l.from, &l.foreign_field);
            }
        }
    }
}

fn signature(dos: &DosModel, id: usize) -> Vec<String> {
    let mut v: Vec<String> = dos
        .structure(id)
        .fields
        .iter()
        .map(|f| format!("{}:{}", f.name, serde_json::to_string(&f.ty).expect("field type serializes")))
        .collect();
    v.sort();
    v
}

fn retarget(t: &mut FieldType, from: usize, to: usize) {
    match t {
        FieldType::Aggregate { target } if *target == from => *target = to,
        FieldType::Collection { element } => retarget(element, from, to),
        _ => {}
    }
}

/// Merge embedded structures with identical field sets, keeping the one
/// with the lowest id. Root structures are never merged.
pub fn dedup_structures(dos: &mut DosModel) {
    loop {
        let embedded: Vec<usize> = dos.structures.iter().filter(|s| !s.root).map(|s| s.id).collect();
        let mut pair = None;
        'outer: for (k, &a) in embedded.iter().enumerate() {
            let sa = signature(dos, a);
            for &b in &embedded[k + 1..] {
                if signature(dos, b) == sa {
                    pair = Some((a, b));
                    break 'outer;
                }
            }
        }
        let Some((keep, drop)) = pair else { return };
        dos.structures.retain(|s| s.id != drop);
        for c in &mut dos.containers {
            c.data_structures.retain(|d| *d != drop);
        }
        for s in &mut dos.structures {
            for f in &mut s.fields {
                retarget(&mut f.ty, drop, keep);
            }
        }
    }
}
