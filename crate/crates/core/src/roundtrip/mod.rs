//! Declared schema → generated application → extracted schema → score.

mod compare;
mod generate;
mod spec;

pub use compare::{compare, RoundTripReport, Score};
pub use generate::generate_app;
pub use spec::{AttributeSpec, EntitySpec, JoinSpec, JoinStyle, QuerySpec, RelationSpec, SchemaSpec};

use crate::code::{inject_sources, ParseMode};
use crate::dos::ExtractOptions;
use crate::error::Result;
use crate::pipeline::{analyze, Analysis};
use crate::profile::ApiProfile;

/// Generate the application for `spec`, analyze it, and score the result.
pub fn run(spec: &SchemaSpec, seed: u64, profile: &ApiProfile, opts: ExtractOptions) -> Result<(RoundTripReport, Analysis)> {
    let files = generate_app(spec, seed)?;
    let code = inject_sources(&files, ParseMode::Strict)?;
    let analysis = analyze(code, profile, opts, &spec.name)?;
    let mut report = compare(&spec.designed_schema(), &analysis.schema);
    report.op_count = analysis.dos.operations.len();
    report.join_count = analysis.join_candidates();
    Ok((report, analysis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::PrimitiveType;

    fn entity(name: &str, attrs: &[(&str, PrimitiveType)]) -> EntitySpec {
        EntitySpec {
            name: name.into(),
            container: None,
            root: true,
            attributes: attrs
                .iter()
                .map(|(n, t)| AttributeSpec {
                    name: n.to_string(),
                    ty: *t,
                })
                .collect(),
            aggregates: Vec::new(),
            references: Vec::new(),
        }
    }

    fn single() -> SchemaSpec {
        SchemaSpec {
            name: "shop".into(),
            entities: vec![entity("Item", &[("label", PrimitiveType::String), ("stock", PrimitiveType::Int)])],
            queries: Vec::new(),
        }
    }

    #[test]
    fn single_entity_is_crud_only() {
        let files = generate_app(&single(), 0).unwrap();
        assert_eq!(
            files.iter().map(|f| f.0.as_str()).collect::<Vec<_>>(),
            ["index.js", "item.routes.js"]
        );
        let (report, a) = run(&single(), 0, &ApiProfile::default(), ExtractOptions::default()).unwrap();
        assert_eq!(report.op_count, 5);
        assert_eq!(report.join_count, 0);
        assert!(a.plans.is_empty());
        assert!(report.attributes.is_perfect(), "{}", report.render());
        assert_eq!(report.defaulted_type_count, 0, "{:?}", report.diff);
    }

    #[test]
    fn generation_is_deterministic_and_seeded() {
        let a = generate_app(&single(), 7).unwrap();
        assert_eq!(a, generate_app(&single(), 7).unwrap());
        let differs = (0..8).any(|s| generate_app(&single(), s).unwrap() != a);
        assert!(differs);
    }

    #[test]
    fn self_comparison_is_perfect() {
        let s = single().designed_schema();
        let r = compare(&s, &s);
        assert!(r.entities.is_perfect() && r.attributes.is_perfect());
        assert_eq!((r.references.precision, r.references.recall), (1.0, 1.0));
        assert_eq!(r.defaulted_type_count, 0);
    }

    #[test]
    fn dangling_target_is_a_spec_error() {
        let mut s = single();
        s.entities[0].references.push(RelationSpec {
            name: "maker".into(),
            target: "Maker".into(),
            cardinality: "0..1".into(),
        });
        assert!(matches!(generate_app(&s, 0), Err(crate::error::Error::Spec(_))));
    }

    #[test]
    fn bad_cardinality_is_rejected() {
        let text = r#"{"name":"x","entities":[{"name":"A","attributes":[],"references":[{"name":"b","target":"A","cardinality":"2..*"}]}]}"#;
        assert!(SchemaSpec::parse(text).is_err());
    }
}
