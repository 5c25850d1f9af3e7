//! One line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use proptest::test_runner::{Config, TestRunner};
use serde_json::{json, Value};

use common::*;
use schema_xray::cfg::NodeKind;
use schema_xray::code::{parse_source, ParseMode};
use schema_xray::dos::ExtractOptions;
use schema_xray::profile::ApiProfile;
use schema_xray::roundtrip::{self, SchemaSpec};
use schema_xray::uschema::{Feature, USchemaModel};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, || format!("took {:?}, limit {limit:?}", t.elapsed()))
}

/// Entities as name -> (root, sorted feature JSON).
fn shape(s: &USchemaModel) -> Vec<(String, bool, Vec<String>)> {
    let mut v: Vec<_> = s
        .entity_types
        .iter()
        .map(|e| {
            let mut fs: Vec<String> = e.features().iter().map(|f| serde_json::to_string(f).unwrap()).collect();
            fs.sort();
            (e.name.clone(), e.root, fs)
        })
        .collect();
    v.sort();
    v
}

fn expected_shape(entities: Value) -> Vec<(String, bool, Vec<String>)> {
    let mut v: Vec<_> = entities
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let mut fs: Vec<String> = e["features"]
                .as_array()
                .unwrap()
                .iter()
                .map(|f| serde_json::to_string(&serde_json::from_value::<Feature>(f.clone()).unwrap()).unwrap())
                .collect();
            fs.sort();
            (e["name"].as_str().unwrap().to_string(), e["root"].as_bool().unwrap(), fs)
        })
        .collect();
    v.sort();
    v
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let a = analyze_dir("fwm");
    within(t, Duration::from_secs(1))?;
    let id = json!({"kind": "attribute", "name": "_id", "type": "string", "defaulted": true});
    let key = json!({"kind": "key", "attribute": "_id"});
    let expected = expected_shape(json!([
        {"name": "User", "root": true, "features": [
            id, key,
            {"kind": "attribute", "name": "name", "type": "string"},
            {"kind": "attribute", "name": "surname", "type": "string", "defaulted": true},
            {"kind": "attribute", "name": "email", "type": "string", "defaulted": true},
            {"kind": "aggregate", "name": "watchedMovies", "target": "WatchedMovie", "variation": 1,
             "cardinality": {"lower": 0, "upper": "many"}}
        ]},
        {"name": "WatchedMovie", "root": false, "features": [
            {"kind": "attribute", "name": "stars", "type": "int"},
            {"kind": "reference", "name": "movie_id", "target": "Movie", "cardinality": {"lower": 0, "upper": "one"}}
        ]},
        {"name": "Movie", "root": true, "features": [
            id, key,
            {"kind": "attribute", "name": "title", "type": "string", "defaulted": true}
        ]}
    ]));
    let found = shape(&a.schema);
    ensure(found == expected, || format!("schema differs: {found:?}"))?;
    Ok(format!("3 entities, exact match, {:?}", t.elapsed()))
}

fn criterion_2() -> Outcome {
    let a = analyze_dir("fwm");
    let counts: Vec<(usize, usize, usize)> = a
        .cfg
        .subgraphs
        .iter()
        .map(|g| {
            let n = |k| g.nodes.iter().filter(|x| x.kind == k).count();
            (n(NodeKind::Call), n(NodeKind::Selection), n(NodeKind::Statement))
        })
        .collect();
    ensure(counts == [(3, 0, 0), (3, 0, 0), (3, 1, 0)], || format!("node counts {counts:?}"))?;
    Ok("3 subgraphs: 3 call / 3 call / 1 selection + 3 call".into())
}

fn criterion_3() -> Outcome {
    let a = analyze_dir("fwm");
    ensure(a.plans.len() == 1, || format!("{} plans", a.plans.len()))?;
    let p = &a.plans[0];
    let dups: Vec<(&str, &str)> = p.duplicates.iter().map(|d| (d.source_field.as_str(), d.new_name.as_str())).collect();
    ensure(dups == [("title", "movie_title")], || format!("duplicates {dups:?}"))?;
    ensure(p.destination_entity == "WatchedMovie", || format!("destination {}", p.destination_entity))?;
    let o = schema_xray::refactor::apply_plan(&a.code, &a.schema, p).map_err(|e| e.to_string())?;
    let (_, text) = changed_source(&o);
    ensure(text.contains("user.watchedMovies[0].movie_title"), || text.clone())?;
    ensure(text.matches("findOne").count() == 1, || text.clone())?;
    parse_source(&text, "fwm.js", ParseMode::Strict).map_err(|e| e.to_string())?;
    Ok("1 plan, title -> movie_title in WatchedMovie, one findOne left".into())
}

const TABLE: [(&str, &str, &str, &str, &str); 8] = [
    ("Artist", "Album", "title", "In Artist", "Sequential Query"),
    ("Artist", "Track", "title", "In Artist", "Sequential Query"),
    ("Album", "Artist", "name", "In Album", "Aggregation Query"),
    ("Album", "Track", "title", "In Album", "Sequential Query"),
    ("Album", "Genre", "name", "In Album", "Aggregation Query"),
    ("Track", "Album", "title, releaseYear", "In Track", "Aggregation Query"),
    ("Track", "Artist", "name", "In Track", "Aggregation Query"),
    ("Track", "Genre", "name", "In Track", "Aggregation Query"),
];

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let a = analyze_dir("music");
    within(t, Duration::from_secs(5))?;
    let files = a.code.file_count();
    let ops = a.dos.operations.len();
    ensure((files, ops) == (5, 28), || format!("{ops} operations in {files} files"))?;
    let candidates = a.join_candidates();
    ensure((candidates, a.plans.len()) == (7, 8), || format!("{candidates} candidates, {} plans", a.plans.len()))?;
    let text = std::fs::read_to_string(fixtures().join("specs/music.json")).unwrap();
    let spec = SchemaSpec::parse(&text).map_err(|e| e.to_string())?;
    let order = |q: &str| spec.queries.iter().position(|x| x.name == q).unwrap_or(usize::MAX);
    let mut plans: Vec<_> = a.plans.iter().collect();
    plans.sort_by_key(|p| order(&p.query));
    let rows: Vec<(String, String, String, String, String)> = plans
        .iter()
        .map(|p| {
            (
                p.target_entity.clone(),
                p.source_entity.clone(),
                p.fields().join(", "),
                p.location(),
                p.join_type.to_string(),
            )
        })
        .collect();
    for (i, (row, want)) in rows.iter().zip(TABLE).enumerate() {
        let want = (want.0.into(), want.1.into(), want.2.into(), want.3.into(), want.4.into());
        ensure(*row == want, || format!("row {}: {row:?}, expected {want:?}", i + 1))?;
    }
    Ok(format!("28 operations in 5 files, 7 candidates, 8 plan rows match, {:?}", t.elapsed()))
}

fn lower_bounds_zero(s: &USchemaModel) -> Result<(), String> {
    for e in &s.entity_types {
        for f in e.features() {
            if let Feature::Reference { name, cardinality, .. } | Feature::Aggregate { name, cardinality, .. } = f {
                ensure(cardinality.lower == 0, || format!("{}.{name} lower bound {}", e.name, cardinality.lower))?;
            }
        }
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let text = std::fs::read_to_string(fixtures().join("specs/music.json")).unwrap();
    let spec = SchemaSpec::parse(&text).map_err(|e| e.to_string())?;
    let profile = ApiProfile::default();
    let (r, a) = roundtrip::run(&spec, 0, &profile, ExtractOptions::default()).map_err(|e| e.to_string())?;
    for (name, s) in [("entities", &r.entities), ("attributes", &r.attributes), ("references", &r.references), ("aggregates", &r.aggregates)] {
        ensure(s.precision == 1.0 && s.recall == 1.0, || format!("{name}: P={} R={}", s.precision, s.recall))?;
    }
    lower_bounds_zero(&a.schema)?;
    let renamed = spec.rename_reference("tracks", "songs");
    let (r2, _) = roundtrip::run(&renamed, 0, &profile, ExtractOptions::default()).map_err(|e| e.to_string())?;
    ensure(r2.references.recall == 1.0, || format!("renamed: reference recall {}", r2.references.recall))?;
    within(t, Duration::from_secs(10))?;
    Ok(format!(
        "P=R=1 on {} entities, {} attributes, {} references, {} aggregates; rename keeps recall 1, {:?}",
        r.entities.expected, r.attributes.expected, r.references.expected, r.aggregates.expected, t.elapsed()
    ))
}

fn criterion_6() -> Outcome {
    let mut checked = (0, 0);
    for (name, files) in corpus() {
        for (rel, src) in &files {
            check_print_roundtrip(src).map_err(|e| format!("{name}/{rel}: {e}"))?;
            if statement_count(src) <= 60 {
                check_oracle(&[(rel.clone(), src.clone())]).map_err(|e| format!("{name}/{rel}: {e}"))?;
                checked.1 += 1;
            }
        }
        check_cfg_of(&files).map_err(|e| format!("{name}: {e}"))?;
        check_determinism(&files).map_err(|e| format!("{name}: {e}"))?;
        checked.0 += 1;
    }
    let mut runner = TestRunner::new(Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&gen::program(), |p| {
            let src = gen::render(&p);
            let files = vec![("r.js".to_string(), src.clone())];
            let fail = |e: String| proptest::test_runner::TestCaseError::fail(format!("{e}\n{src}"));
            check_print_roundtrip(&src).map_err(fail)?;
            check_cfg_of(&files).map_err(fail)?;
            if statement_count(&src) <= 60 {
                check_oracle(&files).map_err(fail)?;
            }
            check_determinism(&files).map_err(fail)?;
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{} fixture projects ({} files against the oracle) and 200 random programs", checked.0, checked.1))
}

fn criterion_7() -> Outcome {
    let a = analyze_dir("fwm");
    let p = a.plans.first().ok_or("no plan")?;
    let o = schema_xray::refactor::apply_plan(&a.code, &a.schema, p).map_err(|e| e.to_string())?;
    let want = "COPY Movies::{title} TO Users::watchedMovies.movie_id WHERE movie_id = _id";
    ensure(o.copy_statement == want, || o.copy_statement.clone())?;
    golden("fwm.migration.js", &o.migration_script)?;
    golden("fwm.rewritten.js", &changed_source(&o).1)?;
    Ok("COPY statement, migration and rewritten source match".into())
}

fn main() {
    let criteria: [(u8, fn() -> Outcome); 7] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match r {
            Ok(detail) => println!("criterion {n}: PASS  {detail} [{} ms]", t.elapsed().as_millis()),
            Err(e) => {
                failed += 1;
                println!("criterion {n}: FAIL  {e}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
