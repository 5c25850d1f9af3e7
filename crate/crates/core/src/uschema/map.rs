use std::collections::HashMap;

use crate::code::PrimitiveType;
use crate::dos::{singular, DosModel, FieldType};
use crate::error::{Error, Result};

use super::{Cardinality, EntityType, Feature, StructuralVariation, USchemaModel};

pub(crate) fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Entity type name of a container: singular, capitalized.
pub fn entity_name(container: &str) -> String {
    capitalize(singular(container))
}

struct Mapper<'a> {
    dos: &'a DosModel,
    schema: USchemaModel,
    /// Structure id to (entity, variation id).
    done: HashMap<usize, (String, u32)>,
}

impl Mapper<'_> {
    fn features(&mut self, ds: usize) -> Result<Vec<Feature>> {
        let mut out = Vec::new();
        for f in &self.dos.structure(ds).fields {
            match &f.ty {
                FieldType::Attribute { primitive } => {
                    out.push(attribute(&f.name, *primitive, false));
                    if f.name == "_id" {
                        out.push(Feature::Key {
                            attribute: f.name.clone(),
                        });
                    }
                }
                FieldType::Collection { element } => match element.as_ref() {
                    FieldType::Aggregate { target } => out.push(self.aggregate(&f.name, *target, true)?),
                    FieldType::Reference {
                        target_container, ..
                    } => out.push(self.reference(&f.name, target_container, true)?),
                    FieldType::Attribute { primitive } => out.push(attribute(&f.name, *primitive, true)),
                    FieldType::Collection { .. } => out.push(attribute(&f.name, None, true)),
                },
                FieldType::Aggregate { target } => out.push(self.aggregate(&f.name, *target, false)?),
                FieldType::Reference {
                    target_container,
                    many,
                    ..
                } => out.push(self.reference(&f.name, target_container, *many)?),
            }
        }
        Ok(out)
    }

    fn reference(&self, name: &str, container: &str, many: bool) -> Result<Feature> {
        if self.dos.container(container).is_none() {
            return Err(Error::Mapping(format!("reference `{name}` targets unknown container `{container}`")));
        }
        Ok(Feature::Reference {
            name: name.to_string(),
            target: entity_name(container),
            cardinality: Cardinality::new(0, many),
        })
    }

    fn aggregate(&mut self, name: &str, ds: usize, many: bool) -> Result<Feature> {
        let (target, variation) = self.embedded(ds)?;
        Ok(Feature::Aggregate {
            name: name.to_string(),
            target,
            variation,
            cardinality: Cardinality::new(0, many),
        })
    }

    /// Non-root entity and variation for an embedded structure.
    fn embedded(&mut self, ds: usize) -> Result<(String, u32)> {
        if let Some(r) = self.done.get(&ds) {
            return Ok(r.clone());
        }
        let mut name = capitalize(&self.dos.structure(ds).name);
        if self.schema.entity(&name).is_some_and(|e| e.root) {
            name.push_str("Embedded");
        }
        let features = self.features(ds)?;
        let id = match self.schema.entity_mut(&name) {
            Some(e) => match e.variations.iter().find(|v| v.features == features) {
                Some(v) => v.id,
                None => {
                    let id = e.variations.len() as u32 + 1;
                    e.variations.push(StructuralVariation { id, features });
                    id
                }
            },
            None => {
                self.schema.entity_types.push(EntityType {
                    name: name.clone(),
                    root: false,
                    variations: vec![StructuralVariation { id: 1, features }],
                });
                1
            }
        };
        self.done.insert(ds, (name.clone(), id));
        Ok((name, id))
    }
}

fn attribute(name: &str, primitive: Option<PrimitiveType>, collection: bool) -> Feature {
    Feature::Attribute {
        name: name.to_string(),
        ty: primitive.unwrap_or(PrimitiveType::String),
        collection,
        defaulted: primitive.is_none(),
    }
}

/// Map a DOS model to a logical schema model: containers become root entity
/// types, embedded structures non-root ones.
pub fn to_uschema(dos: &DosModel, name: &str) -> Result<USchemaModel> {
    let mut m = Mapper {
        dos,
        schema: USchemaModel::new(name),
        done: HashMap::new(),
    };
    for c in &dos.containers {
        m.schema.entity_types.push(EntityType {
            name: entity_name(&c.name),
            root: true,
            variations: Vec::new(),
        });
    }
    for (i, c) in dos.containers.iter().enumerate() {
        let features = m.features(c.data_structures[0])?;
        m.schema.entity_types[i].variations.push(StructuralVariation { id: 1, features });
    }
    Ok(m.schema)
}

/// Entity type name the mapping gives a DOS structure.
pub fn structure_entity_name(dos: &DosModel, ds: usize) -> String {
    let s = dos.structure(ds);
    if s.root {
        return entity_name(&s.container);
    }
    let name = capitalize(&s.name);
    if dos.containers.iter().any(|c| entity_name(&c.name) == name) {
        format!("{name}Embedded")
    } else {
        name
    }
}
