use std::fmt::Write;

use super::{Feature, USchemaModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Dot,
}

pub fn render(schema: &USchemaModel, format: RenderFormat) -> String {
    match format {
        RenderFormat::Text => text(schema),
        RenderFormat::Dot => dot(schema),
    }
}

fn feature_line(f: &Feature) -> String {
    match f {
        Feature::Attribute {
            name,
            ty,
            collection,
            defaulted,
        } => {
            let ty = if *collection {
                format!("[{}]", ty.as_str())
            } else {
                ty.as_str().to_string()
            };
            let d = if *defaulted { " (default)" } else { "" };
            format!("attr {name}: {ty}{d}")
        }
        Feature::Aggregate {
            name,
            target,
            cardinality,
            ..
        } => format!("agg {name} -> {target} [{cardinality}]"),
        Feature::Reference {
            name,
            target,
            cardinality,
        } => format!("ref {name} -> {target} [{cardinality}]"),
        Feature::Key { attribute } => format!("key {attribute}"),
    }
}

fn text(schema: &USchemaModel) -> String {
    let mut out = String::new();
    for (i, e) in schema.entity_types.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let kind = if e.root { "root" } else { "embedded" };
        writeln!(out, "entity {} ({kind})", e.name).unwrap();
        let many = e.variations.len() > 1;
        for v in &e.variations {
            let indent = if many {
                writeln!(out, "  variation {}", v.id).unwrap();
                "    "
            } else {
                "  "
            };
            for f in &v.features {
                writeln!(out, "{indent}{}", feature_line(f)).unwrap();
            }
        }
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('{', "\\{")
        .replace('}', "\\}")
        .replace('|', "\\|")
        .replace('<', "\\<")
        .replace('>', "\\>")
}

fn dot(schema: &USchemaModel) -> String {
    let mut out = String::from("digraph schema {\n  node [shape=record];\n");
    for e in &schema.entity_types {
        let mut rows = Vec::new();
        for f in e.features() {
            if let Feature::Attribute { .. } | Feature::Key { .. } = f {
                rows.push(escape(&feature_line(f)));
            }
        }
        let style = if e.root { "" } else { ", style=rounded" };
        writeln!(out, "  \"{}\" [label=\"{{{}|{}}}\"{style}];", e.name, e.name, rows.join("\\l") + if rows.is_empty() { "" } else { "\\l" }).unwrap();
    }
    for e in &schema.entity_types {
        for f in e.features() {
            match f {
                Feature::Aggregate {
                    name,
                    target,
                    cardinality,
                    ..
                } => writeln!(out, "  \"{}\" -> \"{target}\" [label=\"{name} {cardinality}\"];", e.name).unwrap(),
                Feature::Reference {
                    name,
                    target,
                    cardinality,
                } => writeln!(out, "  \"{}\" -> \"{target}\" [label=\"{name} {cardinality}\", style=dashed];", e.name).unwrap(),
                _ => {}
            }
        }
    }
    out.push_str("}\n");
    out
}
