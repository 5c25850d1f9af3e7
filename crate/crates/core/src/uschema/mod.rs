//! Unified logical schema model: entity types with structural variations made of
//! attribute, aggregate, reference and key features.

mod diff;
mod map;
mod render;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::code::PrimitiveType;
use crate::error::{Error, Result};

pub use diff::{diff, EntityDiff, Mismatch, SchemaDiff};
pub(crate) use map::capitalize;
pub use map::{entity_name, structure_entity_name, to_uschema};
pub use render::{render, RenderFormat};

pub const FORMAT_VERSION: u32 = 1;

fn format_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Upper {
    One,
    Many,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cardinality {
    pub lower: u8,
    pub upper: Upper,
}

impl Cardinality {
    pub const fn new(lower: u8, many: bool) -> Self {
        Cardinality {
            lower,
            upper: if many { Upper::Many } else { Upper::One },
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Upper::One => write!(f, "{}..1", self.lower),
            Upper::Many => write!(f, "{}..*", self.lower),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Feature {
    #[serde(rename_all = "camelCase")]
    Attribute {
        name: String,
        #[serde(rename = "type")]
        ty: PrimitiveType,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        collection: bool,
        /// No evidence backed the type; the default was assigned.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        defaulted: bool,
    },
    #[serde(rename_all = "camelCase")]
    Aggregate {
        name: String,
        target: String,
        variation: u32,
        cardinality: Cardinality,
    },
    #[serde(rename_all = "camelCase")]
    Reference {
        name: String,
        target: String,
        cardinality: Cardinality,
    },
    #[serde(rename_all = "camelCase")]
    Key { attribute: String },
}

impl Feature {
    /// Name of the feature; keys are named after their attribute.
    pub fn name(&self) -> &str {
        match self {
            Feature::Attribute { name, .. } | Feature::Aggregate { name, .. } | Feature::Reference { name, .. } => name,
            Feature::Key { attribute } => attribute,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Feature::Attribute { .. } => "attribute",
            Feature::Aggregate { .. } => "aggregate",
            Feature::Reference { .. } => "reference",
            Feature::Key { .. } => "key",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralVariation {
    pub id: u32,
    pub features: Vec<Feature>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityType {
    pub name: String,
    pub root: bool,
    pub variations: Vec<StructuralVariation>,
}

impl EntityType {
    /// Features of all variations, first occurrence of each name and kind.
    pub fn features(&self) -> Vec<&Feature> {
        let mut out: Vec<&Feature> = Vec::new();
        for v in &self.variations {
            for f in &v.features {
                if !out.iter().any(|g| g.name() == f.name() && g.kind() == f.kind()) {
                    out.push(f);
                }
            }
        }
        out
    }

    pub fn feature(&self, name: &str, kind: &str) -> Option<&Feature> {
        self.variations
            .iter()
            .flat_map(|v| &v.features)
            .find(|f| f.name() == name && f.kind() == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationshipType {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct USchemaModel {
    #[serde(default = "format_version")]
    pub format_version: u32,
    pub name: String,
    pub entity_types: Vec<EntityType>,
    #[serde(default)]
    pub relationship_types: Vec<RelationshipType>,
}

impl USchemaModel {
    pub fn new(name: &str) -> Self {
        USchemaModel {
            format_version: FORMAT_VERSION,
            name: name.to_string(),
            entity_types: Vec::new(),
            relationship_types: Vec::new(),
        }
    }

    pub fn entity(&self, name: &str) -> Option<&EntityType> {
        self.entity_types.iter().find(|e| e.name == name)
    }

    pub fn entity_mut(&mut self, name: &str) -> Option<&mut EntityType> {
        self.entity_types.iter_mut().find(|e| e.name == name)
    }

    /// The same schema without reference features.
    pub fn without_references(&self) -> Self {
        let mut s = self.clone();
        for e in &mut s.entity_types {
            for v in &mut e.variations {
                v.features.retain(|f| !matches!(f, Feature::Reference { .. }));
            }
        }
        s
    }

    /// Violations of the model invariants.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, e) in self.entity_types.iter().enumerate() {
            if self.entity_types[..i].iter().any(|o| o.name == e.name) {
                out.push(format!("duplicate entity `{}`", e.name));
            }
            if e.variations.is_empty() {
                out.push(format!("entity `{}` has no variation", e.name));
            }
            for v in &e.variations {
                for (k, f) in v.features.iter().enumerate() {
                    if v.features[..k].iter().any(|g| g.name() == f.name() && g.kind() == f.kind()) {
                        out.push(format!("{}: duplicate feature `{}`", e.name, f.name()));
                    }
                    match f {
                        Feature::Reference { target, .. } | Feature::Aggregate { target, .. } if self.entity(target).is_none() => {
                            out.push(format!("{}.{}: unknown target `{target}`", e.name, f.name()))
                        }
                        Feature::Key { attribute } if v.feature_attribute(attribute).is_none() => {
                            out.push(format!("{}: key on missing attribute `{attribute}`", e.name))
                        }
                        _ => {}
                    }
                }
            }
            if !e.root {
                let aggregated = self.entity_types.iter().any(|o| {
                    o.variations.iter().flat_map(|v| &v.features).any(|f| matches!(f, Feature::Aggregate { target, .. } if target == &e.name))
                });
                if !aggregated {
                    out.push(format!("non-root entity `{}` is not aggregated", e.name));
                }
            }
        }
        out
    }
}

impl StructuralVariation {
    fn feature_attribute(&self, name: &str) -> Option<&Feature> {
        self.features
            .iter()
            .find(|f| matches!(f, Feature::Attribute { name: n, .. } if n == name))
    }
}

/// Canonical JSON text.
pub fn serialize(schema: &USchemaModel) -> String {
    let mut s = serde_json::to_string_pretty(schema).expect("schema serializes");
    s.push('\n');
    s
}

pub fn deserialize(text: &str) -> Result<USchemaModel> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let mut message = e.inner().to_string();
        if let Some(name) = entity_at(text, &path) {
            message = format!("entity `{name}`: {message}");
        }
        Error::Format {
            path: if path == "." { String::new() } else { path },
            message,
        }
    })
}

/// Name of the entity an error path points into, if any.
fn entity_at(text: &str, path: &str) -> Option<String> {
    let rest = path.strip_prefix("entityTypes[")?;
    let idx: usize = rest[..rest.find(']')?].parse().ok()?;
    let v: serde_json::Value = serde_json::from_str(text).ok()?;
    v.get("entityTypes")?.get(idx)?.get("name")?.as_str().map(str::to_string)
}
