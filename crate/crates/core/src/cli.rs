//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::cfg::{export_graph, GraphFormat};
use crate::code::{inject_project, InjectOptions, ParseMode};
use crate::dos::ExtractOptions;
use crate::error::{Error, Result};
use crate::pipeline::{analyze, Analysis};
use crate::profile::ApiProfile;
use crate::refactor::{apply_plan, plan_table};
use crate::roundtrip::{self, generate_app, SchemaSpec};
use crate::uschema::{render, serialize, RenderFormat, FORMAT_VERSION};

pub const PROFILE_ENV: &str = "SCHEMA_XRAY_PROFILE";

#[derive(Debug, Parser)]
#[command(name = "schema-xray", version, about = "Extract document-store schemas from application code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Debug, Args)]
struct Common {
    /// Project directory or single source file.
    path: PathBuf,
    /// API profile; defaults to $SCHEMA_XRAY_PROFILE, then the bundled one.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "strict")]
    mode: Mode,
    /// Ignore insert/update payloads when building structures.
    #[arg(long)]
    no_payload_structures: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the code, control-flow, operation and schema models as JSON.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "xray-out")]
        out: PathBuf,
    },
    /// Print the extracted schema.
    Schema {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the control-flow graph.
    Cfg {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
    /// List join removal plans.
    Plans {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also write the plans as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Apply one plan; changed sources, migration and COPY go to a separate directory.
    Apply {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        plan: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate an application from a schema spec, or score extraction on it.
    Roundtrip {
        #[command(subcommand)]
        action: RoundtripAction,
    },
}

#[derive(Debug, Subcommand)]
enum RoundtripAction {
    Gen {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    /// Finished, but with findings that count as failure.
    Failed,
}

fn load_profile(flag: Option<&Path>) -> Result<ApiProfile> {
    match flag.map(PathBuf::from).or_else(|| std::env::var_os(PROFILE_ENV).map(PathBuf::from)) {
        Some(p) => ApiProfile::load(&p),
        None => Ok(ApiProfile::default()),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// JSON text with `formatVersion` as the first key.
pub fn versioned_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("model serializes");
    let out = match v {
        Value::Object(fields) => {
            let mut m = serde_json::Map::new();
            m.insert("formatVersion".into(), Value::from(FORMAT_VERSION));
            for (k, v) in fields {
                if k != "formatVersion" {
                    m.insert(k, v);
                }
            }
            Value::Object(m)
        }
        other => {
            let mut m = serde_json::Map::new();
            m.insert("formatVersion".into(), Value::from(FORMAT_VERSION));
            m.insert("items".into(), other);
            Value::Object(m)
        }
    };
    let mut s = serde_json::to_string_pretty(&out).expect("json value serializes");
    s.push('\n');
    s
}

fn schema_name(path: &Path) -> String {
    let p = std::fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf());
    let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if name.is_empty() {
        "schema".into()
    } else {
        name
    }
}

fn run_analysis(c: &Common) -> Result<Analysis> {
    let profile = load_profile(c.profile.as_deref())?;
    let opts = InjectOptions {
        mode: match c.mode {
            Mode::Strict => ParseMode::Strict,
            Mode::Lenient => ParseMode::Lenient,
        },
        ..InjectOptions::default()
    };
    let code = inject_project(&c.path, &opts)?;
    let extract = ExtractOptions {
        payload_structures: !c.no_payload_structures,
    };
    analyze(code, &profile, extract, &schema_name(&c.path))
}

fn diagnostics(a: &Analysis, err: &mut dyn Write) {
    for d in a.code.warnings.iter().chain(&a.dos.diagnostics) {
        let _ = writeln!(err, "{d}");
    }
}

fn same_or_inside(out: &Path, src: &Path) -> bool {
    let canon = |p: &Path| std::fs::canonicalize(p).ok();
    let Some(src) = canon(src) else { return false };
    let mut probe = out.to_path_buf();
    loop {
        if let Some(c) = canon(&probe) {
            return c.starts_with(&src);
        }
        match probe.parent() {
            Some(p) if !p.as_os_str().is_empty() => probe = p.to_path_buf(),
            _ => return false,
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let w = |out: &mut dyn Write, s: &str| out.write_all(s.as_bytes()).map_err(|e| Error::io("<stdout>", e));
    match cmd {
        Command::Analyze { common, out: dir } => {
            let a = run_analysis(&common)?;
            diagnostics(&a, err);
            let files = [
                ("code.json", versioned_json(&a.code)),
                ("cfg.json", versioned_json(&a.cfg)),
                ("dos.json", versioned_json(&a.dos)),
                ("uschema.json", serialize(&a.schema)),
            ];
            for (name, text) in &files {
                write(&dir.join(name), text)?;
            }
            w(
                out,
                &format!(
                    "{} files, {} operations, {} join candidates, {} entity types\n",
                    a.code.file_count(),
                    a.dos.operations.len(),
                    a.join_candidates(),
                    a.schema.entity_types.len()
                ),
            )?;
        }
        Command::Schema { common, format } => {
            let a = run_analysis(&common)?;
            diagnostics(&a, err);
            let text = match format {
                Format::Json => serialize(&a.schema),
                Format::Text => render(&a.schema, RenderFormat::Text),
                Format::Dot => render(&a.schema, RenderFormat::Dot),
            };
            w(out, &text)?;
        }
        Command::Cfg { common, format } => {
            let a = run_analysis(&common)?;
            diagnostics(&a, err);
            let text = match format {
                Format::Json => versioned_json(&a.cfg),
                Format::Dot => export_graph(&a.cfg, GraphFormat::Dot),
                Format::Text => export_graph(&a.cfg, GraphFormat::GraphCypher),
            };
            w(out, &text)?;
        }
        Command::Plans { common, format, json } => {
            let a = run_analysis(&common)?;
            diagnostics(&a, err);
            let as_json = versioned_json(&serde_json::json!({ "plans": a.plans }));
            if let Some(p) = json {
                write(&p, &as_json)?;
            }
            match format {
                Format::Json => w(out, &as_json)?,
                _ => w(out, &plan_table(&a.plans))?,
            }
        }
        Command::Apply { common, plan, out: dir } => {
            if same_or_inside(&dir, &common.path) {
                return Err(Error::Model(format!(
                    "output directory {} lies inside the analyzed sources",
                    dir.display()
                )));
            }
            let a = run_analysis(&common)?;
            diagnostics(&a, err);
            let Some(p) = a.plans.iter().find(|p| p.id == plan || p.id.starts_with(&plan) && plan.len() >= 4) else {
                return Err(Error::PlanStale(plan, "no such plan in the current sources".into()));
            };
            let outcome = apply_plan(&a.code, &a.schema, p)?;
            let mut files: Vec<(PathBuf, String)> = Vec::new();
            let single = common.path.is_file();
            let changed: Vec<&str> = outcome.report.iter().filter(|c| c.changed).map(|c| c.path.as_str()).collect();
            for (rel, text) in outcome.sources.iter().filter(|(rel, _)| changed.contains(&rel.as_str())) {
                files.push((dir.join("src").join(rel), text.clone()));
            }
            files.push((dir.join("migration.js"), outcome.migration_script.clone()));
            files.push((dir.join("copy.txt"), format!("{}\n", outcome.copy_statement)));
            files.push((dir.join("uschema.json"), serialize(&outcome.updated_schema)));
            files.push((dir.join("plan.json"), versioned_json(p)));
            for (path, text) in &files {
                write(path, text)?;
            }
            w(
                out,
                &format!(
                    "applied {} ({} file{} changed{})\n{}\n",
                    p.id,
                    changed.len(),
                    if changed.len() == 1 { "" } else { "s" },
                    if single { ", single file input" } else { "" },
                    outcome.copy_statement
                ),
            )?;
        }
        Command::Roundtrip { action } => match action {
            RoundtripAction::Gen { spec, seed, out: dir } => {
                let spec = SchemaSpec::parse(&read(&spec)?)?;
                let files = generate_app(&spec, seed)?;
                for (rel, text) in &files {
                    write(&dir.join(rel), text)?;
                }
                w(out, &format!("{} files written to {}\n", files.len(), dir.display()))?;
            }
            RoundtripAction::Check {
                spec,
                seed,
                profile,
                format,
            } => {
                let spec = SchemaSpec::parse(&read(&spec)?)?;
                let profile = load_profile(profile.as_deref())?;
                let (report, _) = roundtrip::run(&spec, seed, &profile, ExtractOptions::default())?;
                match format {
                    Format::Json => w(out, &versioned_json(&report))?,
                    _ => w(out, &report.render())?,
                }
                let perfect = [&report.entities, &report.attributes, &report.references, &report.aggregates]
                    .iter()
                    .all(|s| s.is_perfect());
                if !perfect {
                    return Ok(Status::Failed);
                }
            }
        },
    }
    Ok(Status::Ok)
}

/// Run with explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(Status::Ok) => 0,
        Ok(Status::Failed) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
