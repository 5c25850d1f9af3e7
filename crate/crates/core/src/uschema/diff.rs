use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Feature, USchemaModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub feature: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EntityDiff {
    pub missing_features: Vec<String>,
    pub extra_features: Vec<String>,
    pub type_mismatches: Vec<Mismatch>,
    pub cardinality_mismatches: Vec<Mismatch>,
    /// Actual type is the default and expected another primitive.
    pub defaulted_types: Vec<Mismatch>,
    /// Cardinalities differing only in the lower bound.
    pub lower_cardinalities: Vec<Mismatch>,
}

impl EntityDiff {
    pub fn is_empty(&self) -> bool {
        self.missing_features.is_empty()
            && self.extra_features.is_empty()
            && self.type_mismatches.is_empty()
            && self.cardinality_mismatches.is_empty()
            && self.defaulted_types.is_empty()
            && self.lower_cardinalities.is_empty()
    }

    /// Nothing but defaulted types and lower-bound differences.
    pub fn is_tolerable(&self) -> bool {
        self.missing_features.is_empty()
            && self.extra_features.is_empty()
            && self.type_mismatches.is_empty()
            && self.cardinality_mismatches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SchemaDiff {
    pub missing_entities: Vec<String>,
    pub extra_entities: Vec<String>,
    pub per_entity: BTreeMap<String, EntityDiff>,
}

impl SchemaDiff {
    pub fn is_empty(&self) -> bool {
        self.missing_entities.is_empty() && self.extra_entities.is_empty() && self.per_entity.is_empty()
    }

    pub fn is_tolerable(&self) -> bool {
        self.missing_entities.is_empty()
            && self.extra_entities.is_empty()
            && self.per_entity.values().all(EntityDiff::is_tolerable)
    }
}

fn label(f: &Feature) -> String {
    format!("{} {}", f.kind(), f.name())
}

fn describe(f: &Feature) -> String {
    match f {
        Feature::Attribute { ty, collection, .. } => {
            if *collection {
                format!("[{}]", ty.as_str())
            } else {
                ty.as_str().to_string()
            }
        }
        Feature::Aggregate { target, .. } | Feature::Reference { target, .. } => target.clone(),
        Feature::Key { attribute } => attribute.clone(),
    }
}

fn compare(e: &Feature, a: &Feature, out: &mut EntityDiff) {
    let (de, da) = (describe(e), describe(a));
    if de != da {
        let m = Mismatch {
            feature: e.name().to_string(),
            expected: de,
            actual: da,
        };
        let defaulted = matches!(
            (e, a),
            (Feature::Attribute { collection: c1, .. }, Feature::Attribute { collection: c2, defaulted: true, .. }) if c1 == c2
        );
        if defaulted {
            out.defaulted_types.push(m);
        } else {
            out.type_mismatches.push(m);
        }
    }
    let card = |f: &Feature| match f {
        Feature::Aggregate { cardinality, .. } | Feature::Reference { cardinality, .. } => Some(*cardinality),
        _ => None,
    };
    if let (Some(ce), Some(ca)) = (card(e), card(a)) {
        if ce != ca {
            let m = Mismatch {
                feature: e.name().to_string(),
                expected: ce.to_string(),
                actual: ca.to_string(),
            };
            if ce.upper == ca.upper {
                out.lower_cardinalities.push(m);
            } else {
                out.cardinality_mismatches.push(m);
            }
        }
    }
}

/// Structural comparison of two schemas. Features are matched by name and
/// kind over the union of each entity's variations.
pub fn diff(expected: &USchemaModel, actual: &USchemaModel) -> SchemaDiff {
    let mut d = SchemaDiff::default();
    for e in &expected.entity_types {
        let Some(a) = actual.entity(&e.name) else {
            d.missing_entities.push(e.name.clone());
            continue;
        };
        let mut ed = EntityDiff::default();
        if e.root != a.root {
            ed.type_mismatches.push(Mismatch {
                feature: String::new(),
                expected: if e.root { "root" } else { "non-root" }.into(),
                actual: if a.root { "root" } else { "non-root" }.into(),
            });
        }
        let (fe, fa) = (e.features(), a.features());
        for f in &fe {
            match fa.iter().find(|g| g.name() == f.name() && g.kind() == f.kind()) {
                Some(g) => compare(f, g, &mut ed),
                None => ed.missing_features.push(label(f)),
            }
        }
        for g in &fa {
            if !fe.iter().any(|f| g.name() == f.name() && g.kind() == f.kind()) {
                ed.extra_features.push(label(g));
            }
        }
        if !ed.is_empty() {
            d.per_entity.insert(e.name.clone(), ed);
        }
    }
    for a in &actual.entity_types {
        if expected.entity(&a.name).is_none() {
            d.extra_entities.push(a.name.clone());
        }
    }
    d
}
