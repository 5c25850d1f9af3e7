use serde::{Deserialize, Serialize};

use crate::code::PrimitiveType;
use crate::error::{Error, Result};
use crate::uschema::{entity_name, Cardinality, EntityType, Feature, StructuralVariation, USchemaModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AttributeSpec {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: PrimitiveType,
}

/// An aggregate or reference. `cardinality` is written `lower..upper`
/// with upper `1` or `*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RelationSpec {
    pub name: String,
    pub target: String,
    pub cardinality: String,
}

impl RelationSpec {
    pub fn parsed_cardinality(&self) -> Result<Cardinality> {
        let bad = || Error::Spec(format!("`{}`: bad cardinality `{}`", self.name, self.cardinality));
        let (lo, hi) = self.cardinality.split_once("..").ok_or_else(bad)?;
        let lower: u8 = lo.parse().map_err(|_| bad())?;
        let many = match hi {
            "1" => false,
            "*" => true,
            _ => return Err(bad()),
        };
        if lower > 1 {
            return Err(bad());
        }
        Ok(Cardinality::new(lower, many))
    }

    pub fn many(&self) -> bool {
        self.cardinality.ends_with('*')
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EntitySpec {
    pub name: String,
    /// Collection name; defaults to the lowercase entity name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub container: Option<String>,
    #[serde(default = "yes")]
    pub root: bool,
    #[serde(default)]
    pub attributes: Vec<AttributeSpec>,
    #[serde(default)]
    pub aggregates: Vec<RelationSpec>,
    #[serde(default)]
    pub references: Vec<RelationSpec>,
}

fn yes() -> bool {
    true
}

impl EntitySpec {
    pub fn container_name(&self) -> String {
        self.container.clone().unwrap_or_else(|| self.name.to_lowercase())
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeSpec> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn reference(&self, name: &str) -> Option<&RelationSpec> {
        self.references.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum JoinStyle {
    Sequential,
    Aggregation,
}

/// One join of a query. `via` names a reference of the query entity, or of
/// `owner` when the owner points back at the query entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct JoinSpec {
    pub via: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub owner: Option<String>,
    pub fields: Vec<String>,
}

/// A join query the generated application performs. A sequential query
/// without `by` is placed inside the entity's get-by-id handler.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct QuerySpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub entity: String,
    pub style: JoinStyle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub by: Option<String>,
    pub joins: Vec<JoinSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SchemaSpec {
    pub name: String,
    pub entities: Vec<EntitySpec>,
    #[serde(default)]
    pub queries: Vec<QuerySpec>,
}

/// A join resolved against the schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ResolvedJoin<'a> {
    pub target: &'a EntitySpec,
    pub reference: &'a RelationSpec,
    /// The target holds the reference to the query entity.
    pub reverse: bool,
    pub fields: &'a [String],
}

fn spec_err(msg: String) -> Error {
    Error::Spec(msg)
}

impl SchemaSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: SchemaSpec = serde_path_to_error::deserialize(de)
            .map_err(|e| spec_err(format!("{}: {}", e.path(), e.inner())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn entity(&self, name: &str) -> Option<&EntitySpec> {
        self.entities.iter().find(|e| e.name == name)
    }

    pub fn roots(&self) -> impl Iterator<Item = &EntitySpec> {
        self.entities.iter().filter(|e| e.root)
    }

    fn target(&self, owner: &str, r: &RelationSpec) -> Result<&EntitySpec> {
        self.entity(&r.target)
            .ok_or_else(|| spec_err(format!("{owner}.{}: unknown target `{}`", r.name, r.target)))
    }

    pub(crate) fn resolve_join<'a>(&'a self, q: &QuerySpec, j: &'a JoinSpec) -> Result<ResolvedJoin<'a>> {
        let e = self
            .entity(&q.entity)
            .ok_or_else(|| spec_err(format!("query `{}`: unknown entity `{}`", q.name, q.entity)))?;
        let (target, reference, reverse) = match &j.owner {
            None => {
                let r = e
                    .reference(&j.via)
                    .ok_or_else(|| spec_err(format!("query `{}`: `{}` has no reference `{}`", q.name, e.name, j.via)))?;
                (self.target(&e.name, r)?, r, false)
            }
            Some(o) => {
                let owner = self
                    .entity(o)
                    .ok_or_else(|| spec_err(format!("query `{}`: unknown entity `{o}`", q.name)))?;
                let r = owner
                    .reference(&j.via)
                    .ok_or_else(|| spec_err(format!("query `{}`: `{o}` has no reference `{}`", q.name, j.via)))?;
                if r.target != e.name {
                    return Err(spec_err(format!("query `{}`: `{o}.{}` does not target `{}`", q.name, j.via, e.name)));
                }
                (owner, r, true)
            }
        };
        if j.fields.is_empty() {
            return Err(spec_err(format!("query `{}`: join `{}` reads no field", q.name, j.via)));
        }
        for f in &j.fields {
            if target.attribute(f).is_none() {
                return Err(spec_err(format!("query `{}`: `{}` has no attribute `{f}`", q.name, target.name)));
            }
        }
        Ok(ResolvedJoin {
            target,
            reference,
            reverse,
            fields: &j.fields,
        })
    }

    /// Check names and targets.
    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.entities.iter().enumerate() {
            if self.entities[..i].iter().any(|o| o.name == e.name) {
                return Err(spec_err(format!("duplicate entity `{}`", e.name)));
            }
            if e.root && entity_name(&e.container_name()) != e.name {
                return Err(spec_err(format!(
                    "collection `{}` does not name entity `{}`",
                    e.container_name(),
                    e.name
                )));
            }
            for r in &e.references {
                r.parsed_cardinality()?;
                if !self.target(&e.name, r)?.root {
                    return Err(spec_err(format!("{}.{}: references must target root entities", e.name, r.name)));
                }
            }
            for a in &e.aggregates {
                a.parsed_cardinality()?;
                if self.target(&e.name, a)?.root {
                    return Err(spec_err(format!("{}.{}: aggregates must target embedded entities", e.name, a.name)));
                }
            }
        }
        for q in &self.queries {
            match self.entity(&q.entity) {
                Some(e) if e.root => {}
                _ => return Err(spec_err(format!("query `{}`: `{}` is not a root entity", q.name, q.entity))),
            }
            if let Some(by) = &q.by {
                if self.entity(&q.entity).and_then(|e| e.attribute(by)).is_none() {
                    return Err(spec_err(format!("query `{}`: no attribute `{by}`", q.name)));
                }
            }
            for j in &q.joins {
                self.resolve_join(q, j)?;
            }
        }
        Ok(())
    }

    /// The schema the spec declares. Root entities get an `_id` key.
    pub fn designed_schema(&self) -> USchemaModel {
        let mut out = USchemaModel::new(&self.name);
        for e in &self.entities {
            let mut features = Vec::new();
            if e.root {
                features.push(Feature::Attribute {
                    name: "_id".into(),
                    ty: PrimitiveType::String,
                    collection: false,
                    defaulted: false,
                });
                features.push(Feature::Key {
                    attribute: "_id".into(),
                });
            }
            for a in &e.attributes {
                features.push(Feature::Attribute {
                    name: a.name.clone(),
                    ty: a.ty,
                    collection: false,
                    defaulted: false,
                });
            }
            for a in &e.aggregates {
                features.push(Feature::Aggregate {
                    name: a.name.clone(),
                    target: a.target.clone(),
                    variation: 1,
                    cardinality: a.parsed_cardinality().expect("validated"),
                });
            }
            for r in &e.references {
                features.push(Feature::Reference {
                    name: r.name.clone(),
                    target: r.target.clone(),
                    cardinality: r.parsed_cardinality().expect("validated"),
                });
            }
            out.entity_types.push(EntityType {
                name: e.name.clone(),
                root: e.root,
                variations: vec![StructuralVariation { id: 1, features }],
            });
        }
        out
    }

    /// The spec with reference `from` renamed to `to` everywhere.
    pub fn rename_reference(&self, from: &str, to: &str) -> Self {
        let mut s = self.clone();
        for e in &mut s.entities {
            for r in &mut e.references {
                if r.name == from {
                    r.name = to.to_string();
                }
            }
        }
        for q in &mut s.queries {
            for j in &mut q.joins {
                if j.via == from {
                    j.via = to.to_string();
                }
            }
        }
        s
    }
}
