use crate::code::visit::{renumber, CodeIndex};
use crate::code::{parse_source, regenerate, CodeModel, ParseMode, PrimitiveType};
use crate::error::{Error, Result};
use crate::uschema::{capitalize, Cardinality, EntityType, Feature, StructuralVariation, USchemaModel};

use super::emit::{emit_copy, emit_migration};
use super::plan::statement_signature;
use super::rewrite::{container_mut, rewrite};
use super::{FileChange, JoinRemovalPlan, RefactorOutcome};

/// Type of a source attribute, and whether it was defaulted.
fn source_type(schema: &USchemaModel, plan: &JoinRemovalPlan, field: &str) -> (PrimitiveType, bool) {
    match schema.entity(&plan.source_entity).and_then(|e| e.feature(field, "attribute")) {
        Some(Feature::Attribute { ty, defaulted, .. }) => (*ty, *defaulted),
        _ => (PrimitiveType::String, true),
    }
}

fn add_feature(e: &mut EntityType, f: Feature) {
    for v in e.variations.iter_mut() {
        if !v.features.iter().any(|x| x.name() == f.name()) {
            v.features.push(f.clone());
        }
    }
}

fn update_schema(schema: &USchemaModel, plan: &JoinRemovalPlan) -> Result<USchemaModel> {
    let mut out = schema.clone();
    let attr = |name: &str, field: &str, collection: bool| {
        let (ty, defaulted) = source_type(schema, plan, field);
        Feature::Attribute {
            name: name.to_string(),
            ty,
            collection,
            defaulted,
        }
    };
    let many = plan.reference.many;
    let feature = match &plan.embedded {
        None => {
            let d = &plan.duplicates[0];
            attr(&d.new_name, &d.source_field, many)
        }
        Some(stem) => {
            let name = format!("{}{}", plan.destination_entity, capitalize(stem));
            if out.entity(&name).is_some() {
                return Err(Error::Rewrite(plan.id.clone(), format!("entity type `{name}` already exists")));
            }
            let features = plan.duplicates.iter().map(|d| attr(&d.new_name, &d.source_field, false)).collect();
            out.entity_types.push(EntityType {
                name: name.clone(),
                root: false,
                variations: vec![StructuralVariation { id: 1, features }],
            });
            Feature::Aggregate {
                name: stem.clone(),
                target: name,
                variation: 1,
                cardinality: Cardinality::new(0, many),
            }
        }
    };
    let dest = out.entity_mut(&plan.destination_entity).ok_or_else(|| {
        Error::Rewrite(plan.id.clone(), format!("entity type `{}` not in schema", plan.destination_entity))
    })?;
    add_feature(dest, feature);
    Ok(out)
}

/// Apply one plan: rewrite the code, extend the schema, and produce the
/// data copy statement and migration script. Inputs are left untouched.
pub fn apply_plan(code: &CodeModel, schema: &USchemaModel, plan: &JoinRemovalPlan) -> Result<RefactorOutcome> {
    if plan.partial {
        return Err(Error::Rewrite(plan.id.clone(), "the joined data escapes its block".into()));
    }
    let ix = CodeIndex::new(code);
    match statement_signature(&ix, plan.join_stmt) {
        Some(s) if s == plan.signature => {}
        Some(_) => return Err(Error::PlanStale(plan.id.clone(), "join statement changed".into())),
        None => return Err(Error::PlanStale(plan.id.clone(), "join statement not found".into())),
    }
    let mut updated = code.clone();
    rewrite(&mut updated, plan)?;
    let cc = container_mut(&mut updated, plan.join_stmt.file).expect("rewritten file present");
    renumber(cc);
    let before = regenerate(code);
    let sources = regenerate(&updated);
    let mut report = Vec::new();
    for (path, text) in &sources {
        let changed = before.iter().find(|(p, _)| p == path).is_none_or(|(_, t)| t != text);
        if changed {
            parse_source(text, path, ParseMode::Strict)
                .map_err(|e| Error::Rewrite(plan.id.clone(), format!("rewritten code does not parse: {e}")))?;
        }
        report.push(FileChange {
            path: path.clone(),
            changed,
        });
    }
    Ok(RefactorOutcome {
        updated_schema: update_schema(schema, plan)?,
        updated_code: updated,
        sources,
        copy_statement: emit_copy(plan),
        migration_script: emit_migration(plan),
        report,
    })
}
