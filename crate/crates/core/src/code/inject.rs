//! Multi-file injection of a project directory.

use std::path::Path;

use globset::{Glob, GlobSet, GlobSetBuilder};
use walkdir::WalkDir;

use super::visit::renumber;
use super::*;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectOptions {
    pub include: Vec<String>,
    pub mode: ParseMode,
}

impl Default for InjectOptions {
    fn default() -> Self {
        InjectOptions {
            include: vec!["**/*.js".to_string()],
            mode: ParseMode::Strict,
        }
    }
}

fn globset(patterns: &[String]) -> Result<GlobSet> {
    let mut b = GlobSetBuilder::new();
    for p in patterns {
        let g = Glob::new(p).map_err(|e| Error::Model(format!("bad include pattern `{p}`: {e}")))?;
        b.add(g);
    }
    b.build().map_err(|e| Error::Model(e.to_string()))
}

/// Inject every matching file under `root` (or `root` itself when it is a
/// file) in lexicographic path order.
pub fn inject_project(root: &Path, opts: &InjectOptions) -> Result<CodeModel> {
    let meta = std::fs::metadata(root).map_err(|e| Error::io(root, e))?;
    let mut files: Vec<(String, std::path::PathBuf)> = Vec::new();
    if meta.is_file() {
        let name = root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        files.push((name, root.to_path_buf()));
    } else {
        let set = globset(&opts.include)?;
        for entry in WalkDir::new(root).sort_by_file_name() {
            let entry = entry.map_err(|e| {
                let path = e.path().unwrap_or(root).to_path_buf();
                Error::io(path, e.into())
            })?;
            if !entry.file_type().is_file() {
                continue;
            }
            let rel = entry
                .path()
                .strip_prefix(root)
                .expect("walkdir yields children of root")
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            if set.is_match(&rel) {
                files.push((rel, entry.path().to_path_buf()));
            }
        }
        files.sort_by(|a, b| a.0.cmp(&b.0));
    }

    let mut sources = Vec::with_capacity(files.len());
    for (rel, full) in files {
        let text = std::fs::read_to_string(&full).map_err(|e| Error::io(&full, e))?;
        sources.push((rel, text));
    }
    inject_sources(&sources, opts.mode)
}

/// Build a model from in-memory `(relative path, text)` pairs, indexed in
/// the given order.
pub fn inject_sources(sources: &[(String, String)], mode: ParseMode) -> Result<CodeModel> {
    let mut model = CodeModel::default();
    let mut errors = Vec::new();
    for (index, (rel, source)) in sources.iter().enumerate() {
        match parse_source_indexed(source, rel, index as u32, mode) {
            Ok(mut cc) => {
                renumber(&mut cc);
                model.warnings.extend(cc.warnings.iter().cloned());
                insert_file(&mut model.containers, rel, cc);
            }
            Err(e) => errors.push(e),
        }
    }
    match errors.len() {
        0 => Ok(model),
        1 => Err(errors.pop().unwrap()),
        _ => Err(Error::SyntaxErrors(errors)),
    }
}

fn insert_file(level: &mut Vec<Container>, rel: &str, cc: CodeContainer) {
    fn go(level: &mut Vec<Container>, prefix: &str, parts: &[&str], cc: CodeContainer) {
        let path = if prefix.is_empty() {
            parts[0].to_string()
        } else {
            format!("{prefix}/{}", parts[0])
        };
        if parts.len() == 1 {
            level.push(Container {
                kind: ContainerKind::File,
                path,
                children: Vec::new(),
                code_containers: vec![cc],
            });
            return;
        }
        let pos = match level
            .iter()
            .position(|c| c.kind == ContainerKind::Directory && c.path == path)
        {
            Some(p) => p,
            None => {
                level.push(Container {
                    kind: ContainerKind::Directory,
                    path: path.clone(),
                    children: Vec::new(),
                    code_containers: Vec::new(),
                });
                level.len() - 1
            }
        };
        go(&mut level[pos].children, &path, &parts[1..], cc);
    }
    let parts: Vec<&str> = rel.split('/').collect();
    go(level, "", &parts, cc);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, rel: &str, text: &str) {
        let p = dir.join(rel);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(p, text).unwrap();
    }

    #[test]
    fn empty_dir_gives_empty_model() {
        let d = tempfile::tempdir().unwrap();
        let m = inject_project(d.path(), &InjectOptions::default()).unwrap();
        assert_eq!(m.file_count(), 0);
    }

    #[test]
    fn nested_dirs_and_order() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), "b.js", "f();");
        write(d.path(), "a/x.js", "g();");
        write(d.path(), "a/y.txt", "not js");
        let m = inject_project(d.path(), &InjectOptions::default()).unwrap();
        let files: Vec<&str> = m.files().iter().map(|(p, _)| *p).collect();
        assert_eq!(files, vec!["a/x.js", "b.js"]);
        assert_eq!(m.containers[0].kind, ContainerKind::Directory);
        assert_eq!(m.files()[1].1.body().id, NodeId::new(1, 0));
    }

    #[test]
    fn strict_aggregates_errors_lenient_warns() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), "ok.js", "f();");
        write(d.path(), "bad.js", "class A {}\nf();");
        assert!(inject_project(d.path(), &InjectOptions::default()).is_err());
        let opts = InjectOptions {
            mode: ParseMode::Lenient,
            ..Default::default()
        };
        let m = inject_project(d.path(), &opts).unwrap();
        assert_eq!(m.file_count(), 2);
        assert!(!m.warnings.is_empty());
    }

    #[test]
    fn missing_root_is_io_error() {
        let err = inject_project(Path::new("/nonexistent/xyz"), &InjectOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
