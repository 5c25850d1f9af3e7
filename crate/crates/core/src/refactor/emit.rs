use std::fmt::Write;

use crate::uschema::capitalize;

use super::JoinRemovalPlan;

/// Declarative description of the data copy a plan needs, e.g.
/// `COPY Movies::{title} TO Users::watchedMovies.movie_id WHERE movie_id = _id`.
pub fn emit_copy(plan: &JoinRemovalPlan) -> String {
    format!(
        "COPY {}::{{{}}} TO {}::{} WHERE {} = {}",
        capitalize(&plan.source_container),
        plan.fields().join(", "),
        capitalize(&plan.target_container),
        plan.reference.props.join("."),
        plan.reference.field(),
        plan.reference.target_attribute,
    )
}

fn collection(name: &str) -> String {
    let ident = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ident {
        format!("db.{name}")
    } else {
        format!("db.getCollection('{name}')")
    }
}

fn copied_value(plan: &JoinRemovalPlan) -> String {
    match &plan.embedded {
        None => format!("ref.{}", plan.duplicates[0].source_field),
        Some(_) => {
            let pairs: Vec<String> = plan
                .duplicates
                .iter()
                .map(|d| format!("{}: ref.{}", d.new_name, d.source_field))
                .collect();
            format!("{{ {} }}", pairs.join(", "))
        }
    }
}

fn pad(out: &mut String, depth: usize) {
    out.push_str(&"  ".repeat(depth));
}

/// Statements filling the copy into `holder`, the object holding the
/// reference field.
fn fill(out: &mut String, plan: &JoinRemovalPlan, holder: &str, depth: usize) {
    let r = &plan.reference;
    let source = collection(&plan.source_container);
    let attr = &r.target_attribute;
    let name = plan.embedded.as_deref().unwrap_or(&plan.duplicates[0].new_name);
    let value = copied_value(plan);
    pad(out, depth);
    if r.reverse && r.many {
        let _ = writeln!(
            out,
            "{holder}.{name} = {source}.find({{ {attr}: {holder}._id }}).toArray().map(function (ref) {{ return {value}; }});"
        );
    } else if r.reverse {
        let _ = writeln!(out, "const ref = {source}.findOne({{ {attr}: {holder}._id }});");
        pad(out, depth);
        let _ = writeln!(out, "if (ref) {{ {holder}.{name} = {value}; }}");
    } else if r.many {
        let f = r.field();
        let _ = writeln!(out, "{holder}.{name} = ({holder}.{f} || []).map(function (id) {{");
        pad(out, depth + 1);
        let _ = writeln!(out, "const ref = {source}.findOne({{ {attr}: id }});");
        pad(out, depth + 1);
        let _ = writeln!(out, "return ref ? {value} : null;");
        pad(out, depth);
        out.push_str("});\n");
    } else {
        let _ = writeln!(out, "const ref = {source}.findOne({{ {attr}: {holder}.{} }});", r.field());
        pad(out, depth);
        let _ = writeln!(out, "if (ref) {{ {holder}.{name} = {value}; }}");
    }
}

fn descend(out: &mut String, plan: &JoinRemovalPlan, holder: &str, level: usize, depth: usize) {
    let props = &plan.reference.props;
    if level + 1 >= props.len() || plan.reference.reverse {
        fill(out, plan, holder, depth);
        return;
    }
    let p = &props[level];
    if plan.reference.arrays.get(level).copied().unwrap_or(false) {
        let item = if level == 0 { "item".to_string() } else { format!("item{}", level + 1) };
        pad(out, depth);
        let _ = writeln!(out, "({holder}.{p} || []).forEach(function ({item}) {{");
        descend(out, plan, &item, level + 1, depth + 1);
        pad(out, depth);
        out.push_str("});\n");
    } else {
        let next = format!("{holder}.{p}");
        pad(out, depth);
        let _ = writeln!(out, "if ({next}) {{");
        descend(out, plan, &next, level + 1, depth + 1);
        pad(out, depth);
        out.push_str("}\n");
    }
}

/// Mongo shell script copying the duplicated fields into existing
/// documents.
pub fn emit_migration(plan: &JoinRemovalPlan) -> String {
    let target = collection(&plan.target_container);
    let mut out = String::new();
    let _ = writeln!(out, "// {}", emit_copy(plan));
    let _ = writeln!(out, "{target}.find().forEach(function (doc) {{");
    descend(&mut out, plan, "doc", 0, 1);
    let _ = writeln!(out, "  {target}.replaceOne({{ _id: doc._id }}, doc);");
    out.push_str("});\n");
    out
}
