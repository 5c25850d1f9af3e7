use serde::{Deserialize, Serialize};

use crate::uschema::{diff, Feature, SchemaDiff, USchemaModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Score {
    pub expected: usize,
    pub found: usize,
    pub matched: usize,
    pub precision: f64,
    pub recall: f64,
}

impl Score {
    fn new(expected: usize, found: usize, matched: usize) -> Self {
        let ratio = |n: usize, d: usize| if d == 0 { 1.0 } else { n as f64 / d as f64 };
        Score {
            expected,
            found,
            matched,
            precision: ratio(matched, found),
            recall: ratio(matched, expected),
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.matched == self.expected && self.matched == self.found
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundTripReport {
    pub format_version: u32,
    pub entities: Score,
    pub attributes: Score,
    pub references: Score,
    pub aggregates: Score,
    pub defaulted_type_count: usize,
    pub lowered_cardinality_count: usize,
    pub op_count: usize,
    pub join_count: usize,
    pub diff: SchemaDiff,
}

impl RoundTripReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, s) in [
            ("entities", &self.entities),
            ("attributes", &self.attributes),
            ("references", &self.references),
            ("aggregates", &self.aggregates),
        ] {
            out.push_str(&format!(
                "{name:<11} precision {:.3}  recall {:.3}  ({} matched, {} expected, {} found)\n",
                s.precision, s.recall, s.matched, s.expected, s.found
            ));
        }
        out.push_str(&format!("defaulted types       {}\n", self.defaulted_type_count));
        out.push_str(&format!("lowered cardinalities {}\n", self.lowered_cardinality_count));
        out.push_str(&format!("operations            {}\n", self.op_count));
        out.push_str(&format!("join candidates       {}\n", self.join_count));
        out
    }
}

/// Features of one kind as `(entity, name, target)`.
fn features(s: &USchemaModel, kind: &str) -> Vec<(String, String, Option<String>)> {
    let mut out = Vec::new();
    for e in &s.entity_types {
        for f in e.features() {
            if f.kind() != kind {
                continue;
            }
            let target = match f {
                Feature::Aggregate { target, .. } | Feature::Reference { target, .. } => Some(target.clone()),
                _ => None,
            };
            out.push((e.name.clone(), f.name().to_string(), target));
        }
    }
    out
}

fn score<T: PartialEq>(expected: &[T], found: &[T]) -> Score {
    let matched = expected.iter().filter(|x| found.contains(x)).count();
    Score::new(expected.len(), found.len(), matched)
}

/// Score an extracted schema against the designed one. Entities match by
/// name; features by entity, name and kind, and also target for
/// relationships. Keys are not scored.
pub fn compare(designed: &USchemaModel, extracted: &USchemaModel) -> RoundTripReport {
    let names = |s: &USchemaModel| s.entity_types.iter().map(|e| (e.name.clone(), e.root)).collect::<Vec<_>>();
    let d = diff(designed, extracted);
    RoundTripReport {
        format_version: crate::uschema::FORMAT_VERSION,
        entities: score(&names(designed), &names(extracted)),
        attributes: score(&features(designed, "attribute"), &features(extracted, "attribute")),
        references: score(&features(designed, "reference"), &features(extracted, "reference")),
        aggregates: score(&features(designed, "aggregate"), &features(extracted, "aggregate")),
        defaulted_type_count: d.per_entity.values().map(|e| e.defaulted_types.len()).sum(),
        lowered_cardinality_count: d.per_entity.values().map(|e| e.lower_cardinalities.len()).sum(),
        op_count: 0,
        join_count: 0,
        diff: d,
    }
}
