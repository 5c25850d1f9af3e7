#![allow(dead_code)]

pub mod gen;
pub mod oracle;

use std::path::{Path, PathBuf};

use schema_xray::cfg::{build_cfg, ControlFlowModel, EdgeKind, NodeKind};
use schema_xray::code::{inject_sources, parse_source, regenerate_container, structurally_equal, ParseMode};
use schema_xray::dos::ExtractOptions;
use schema_xray::pipeline::analyze;
use schema_xray::profile::ApiProfile;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn read_dir_sources(dir: &Path) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "js"))
        .map(|p| {
            let rel = p.file_name().unwrap().to_string_lossy().into_owned();
            (rel, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

/// Every strict-mode fixture project: each directory is one project,
/// except `corpus/`, where each file stands alone.
pub fn corpus() -> Vec<(String, Vec<(String, String)>)> {
    let mut out = Vec::new();
    for name in ["fwm", "fwm_full", "music"] {
        out.push((name.to_string(), read_dir_sources(&fixtures().join(name))));
    }
    for f in read_dir_sources(&fixtures().join("corpus")) {
        out.push((format!("corpus/{}", f.0), vec![f]));
    }
    out
}

pub fn statement_count(src: &str) -> usize {
    let cc = parse_source(src, "x.js", ParseMode::Strict).unwrap();
    serde_json::to_string(&cc).unwrap().matches("\"variant\":").count()
}

/// parse, print, parse again: same structure, and printing is a fixpoint.
pub fn check_print_roundtrip(src: &str) -> Result<(), String> {
    let a = parse_source(src, "x.js", ParseMode::Strict).map_err(|e| format!("first parse: {e}"))?;
    let printed = regenerate_container(&a);
    let b = parse_source(&printed, "x.js", ParseMode::Strict).map_err(|e| format!("reparse: {e}\n{printed}"))?;
    if !structurally_equal(&a, &b) {
        return Err(format!("structure changed after printing:\n{printed}"));
    }
    let again = regenerate_container(&b);
    if again != printed {
        return Err(format!("printing is not a fixpoint:\n{printed}\n---\n{again}"));
    }
    Ok(())
}

/// Graph invariants checked from the outside, plus the model's own check.
pub fn check_cfg(cfg: &ControlFlowModel) -> Result<(), String> {
    let mut problems = cfg.check();
    for (i, g) in cfg.subgraphs.iter().enumerate() {
        let starts = g.nodes.iter().filter(|n| n.kind == NodeKind::Start).count();
        let ends = g.nodes.iter().filter(|n| n.kind == NodeKind::End).count();
        if (starts, ends) != (1, 1) {
            problems.push(format!("subgraph {i}: {starts} starts, {ends} ends"));
        }
        for (k, e) in g.edges.iter().enumerate() {
            if e.source.subgraph != i {
                problems.push(format!("subgraph {i}: edge {k} owned by the wrong subgraph"));
                continue;
            }
            let src = &g.nodes[e.source.node];
            let Some(tg) = cfg.subgraphs.get(e.target.subgraph) else {
                problems.push(format!("subgraph {i}: edge {k} targets a missing subgraph"));
                continue;
            };
            let Some(dst) = tg.nodes.get(e.target.node) else {
                problems.push(format!("subgraph {i}: edge {k} targets a missing node"));
                continue;
            };
            if !src.outgoing.iter().any(|r| r.subgraph == i && r.edge == k) {
                problems.push(format!("subgraph {i}: edge {k} missing from its source"));
            }
            if !dst.incoming.iter().any(|r| r.subgraph == i && r.edge == k) {
                problems.push(format!("subgraph {i}: edge {k} missing from its target"));
            }
            let cross = e.target.subgraph != i;
            if cross != (e.kind == EdgeKind::Call) {
                problems.push(format!("subgraph {i}: edge {k} crosses subgraphs as {:?}", e.kind));
            }
            if e.kind == EdgeKind::Call && (src.kind != NodeKind::Call || dst.kind != NodeKind::Start) {
                problems.push(format!("subgraph {i}: call edge {k} does not go from a call to a start"));
            }
        }
        for (n, node) in g.nodes.iter().enumerate() {
            let conds = node
                .outgoing
                .iter()
                .filter(|r| matches!(cfg.edge(**r).kind, EdgeKind::CondTrue | EdgeKind::CondFalse))
                .count();
            if node.kind == NodeKind::Selection && conds != 2 {
                problems.push(format!("subgraph {i}: selection {n} has {conds} branches"));
            }
            if node.kind != NodeKind::Selection && conds != 0 {
                problems.push(format!("subgraph {i}: non-selection {n} branches"));
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems.join("\n"))
    }
}

pub fn check_cfg_of(files: &[(String, String)]) -> Result<(), String> {
    let code = inject_sources(files, ParseMode::Strict).map_err(|e| e.to_string())?;
    let cfg = build_cfg(&code).map_err(|e| e.to_string())?;
    check_cfg(&cfg)
}

/// Detected operations and joins agree with the brute-force walk.
pub fn check_oracle(files: &[(String, String)]) -> Result<(), String> {
    let profile = ApiProfile::default();
    let code = inject_sources(files, ParseMode::Strict).map_err(|e| e.to_string())?;
    let expected = oracle::brute_force(&code, &profile);
    let a = analyze(code, &profile, ExtractOptions::default(), "x").map_err(|e| e.to_string())?;
    let found = oracle::from_dos(&a.dos);
    if expected == found {
        Ok(())
    } else {
        Err(format!("oracle:   {expected:?}\nanalysis: {found:?}"))
    }
}

/// Serialized outputs of the whole pipeline.
pub fn snapshot(files: &[(String, String)]) -> Result<String, String> {
    let code = inject_sources(files, ParseMode::Strict).map_err(|e| e.to_string())?;
    let a = analyze(code, &ApiProfile::default(), ExtractOptions::default(), "x").map_err(|e| e.to_string())?;
    let parts = [
        serde_json::to_string(&a.code).unwrap(),
        serde_json::to_string(&a.cfg).unwrap(),
        serde_json::to_string(&a.dos).unwrap(),
        serde_json::to_string(&a.schema).unwrap(),
        serde_json::to_string(&a.plans).unwrap(),
    ];
    Ok(parts.join("\n"))
}

pub fn check_determinism(files: &[(String, String)]) -> Result<(), String> {
    let a = snapshot(files)?;
    let b = snapshot(files)?;
    if a == b {
        Ok(())
    } else {
        Err("two runs differ".into())
    }
}

pub fn analyze_dir(name: &str) -> schema_xray::pipeline::Analysis {
    let files = read_dir_sources(&fixtures().join(name));
    let code = inject_sources(&files, ParseMode::Strict).unwrap();
    analyze(code, &ApiProfile::default(), ExtractOptions::default(), name).unwrap()
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Compare against a pinned file; `UPDATE_GOLDEN=1` rewrites it instead.
pub fn golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        return Ok(());
    }
    let line = expected
        .lines()
        .zip(actual.lines())
        .position(|(a, b)| a != b)
        .unwrap_or_else(|| expected.lines().count().min(actual.lines().count()));
    Err(format!("{name} differs from the golden file at line {}", line + 1))
}

/// Apply the plan whose query and source entity match; return the outcome.
pub fn apply_by(a: &schema_xray::pipeline::Analysis, query: &str, source: &str) -> schema_xray::refactor::RefactorOutcome {
    let plan = a
        .plans
        .iter()
        .find(|p| p.query == query && p.source_entity == source)
        .unwrap_or_else(|| panic!("no plan for {query}/{source}"));
    schema_xray::refactor::apply_plan(&a.code, &a.schema, plan).unwrap()
}

pub fn changed_source(o: &schema_xray::refactor::RefactorOutcome) -> (String, String) {
    let path = &o.report.iter().find(|c| c.changed).expect("one file changed").path;
    o.sources.iter().find(|(p, _)| p == path).cloned().unwrap()
}
