mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixtures;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schema-xray"))
        .args(args)
        .env_remove("SCHEMA_XRAY_PROFILE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn data_rows(table: &str) -> Vec<&str> {
    table.lines().skip(2).filter(|l| !l.trim().is_empty()).collect()
}

#[test]
fn plans_on_the_running_example() {
    let o = run(&["plans", &fixture("fwm")]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 1, "{out}");
    assert!(rows[0].contains("title") && rows[0].contains("Sequential Query"), "{out}");
    assert!(rows[0].contains("In User"), "{out}");
}

#[test]
fn plans_on_music() {
    let o = run(&["plans", &fixture("music")]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 8, "{out}");
    let numbered = rows.iter().filter(|r| !r.starts_with(' ')).count();
    assert_eq!(numbered, 7, "{out}");
}

#[test]
fn plans_json_is_stable() {
    let a = stdout(&run(&["plans", &fixture("music"), "--format", "json"]));
    let b = stdout(&run(&["plans", &fixture("music"), "--format", "json"]));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(v.to_string().contains("formatVersion"));
}

#[test]
fn empty_directory_is_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["plans", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["plans"]).status.code(), Some(2));
}

#[test]
fn strict_mode_rejects_a_class_and_lenient_mode_warns() {
    let strict = run(&["schema", &fixture("mixed")]);
    assert_eq!(strict.status.code(), Some(1));
    let err = String::from_utf8_lossy(&strict.stderr).into_owned();
    assert!(err.contains("legacy.js:4:1"), "{err}");
    let lenient = run(&["schema", &fixture("mixed"), "--mode", "lenient"]);
    assert!(lenient.status.success(), "{}", String::from_utf8_lossy(&lenient.stderr));
    assert!(stdout(&lenient).contains("entity Account"));
    assert!(!lenient.stderr.is_empty());
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for e in std::fs::read_dir(from).unwrap() {
        let p = e.unwrap().path();
        std::fs::copy(&p, to.join(p.file_name().unwrap())).unwrap();
    }
}

#[test]
fn applied_plan_disappears_from_the_next_listing() {
    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("src");
    copy_dir(&fixtures().join("music"), &src);
    let before = stdout(&run(&["plans", src.to_str().unwrap(), "--format", "json"]));
    let plans: serde_json::Value = serde_json::from_str(&before).unwrap();
    let list = plans["plans"].as_array().unwrap();
    let target = list.iter().find(|p| p["query"] == "getAlbum").unwrap();
    let id = target["id"].as_str().unwrap();

    let out = work.path().join("out");
    let o = run(&["apply", src.to_str().unwrap(), "--plan", &id[..6], "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["migration.js", "copy.txt", "uschema.json", "plan.json", "src/album.routes.js"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(!out.join("src/track.routes.js").exists());

    copy_dir(&out.join("src"), &src);
    let after = stdout(&run(&["plans", src.to_str().unwrap(), "--format", "json"]));
    let plans: serde_json::Value = serde_json::from_str(&after).unwrap();
    let list = plans["plans"].as_array().unwrap();
    assert_eq!(list.len(), 7);
    assert!(list.iter().all(|p| p["id"] != id && p["query"] != "getAlbum"));
}

#[test]
fn apply_refuses_to_write_into_the_sources() {
    let work = tempfile::tempdir().unwrap();
    copy_dir(&fixtures().join("fwm"), work.path());
    let inside = work.path().join("out");
    let o = run(&["apply", work.path().to_str().unwrap(), "--plan", "d657", "--out", inside.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn roundtrip_check_passes_on_the_music_spec() {
    let spec = fixtures().join("specs/music.json");
    let o = run(&["roundtrip", "check", "--spec", spec.to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
}

#[test]
fn generated_music_app_matches_the_fixture() {
    let spec = fixtures().join("specs/music.json");
    let out = tempfile::tempdir().unwrap();
    let o = run(&["roundtrip", "gen", "--spec", spec.to_str().unwrap(), "--seed", "0", "--out", out.path().to_str().unwrap()]);
    assert!(o.status.success());
    let generated = common::read_dir_sources(out.path());
    assert_eq!(generated, common::read_dir_sources(&fixtures().join("music")));
}
