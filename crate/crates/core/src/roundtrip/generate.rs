use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::code::PrimitiveType;
use crate::error::Result;

use super::spec::{EntitySpec, JoinStyle, QuerySpec, ResolvedJoin, SchemaSpec};

/// Naming choices drawn from the seed.
struct Style {
    err: &'static str,
    list: &'static str,
    result: &'static str,
}

impl Style {
    fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Style {
            err: ["err", "error"].choose(&mut rng).copied().unwrap_or("err"),
            list: ["docs", "items", "results"].choose(&mut rng).copied().unwrap_or("docs"),
            result: ["result", "outcome", "info"].choose(&mut rng).copied().unwrap_or("result"),
        }
    }
}

#[derive(Default)]
struct Out {
    text: String,
    depth: usize,
}

impl Out {
    fn line(&mut self, s: &str) {
        if s.is_empty() {
            self.text.push('\n');
            return;
        }
        for _ in 0..self.depth {
            self.text.push_str("  ");
        }
        self.text.push_str(s);
        self.text.push('\n');
    }

    fn open(&mut self, s: &str) {
        self.line(s);
        self.depth += 1;
    }

    fn close(&mut self, s: &str) {
        self.depth -= 1;
        self.line(s);
    }
}

fn var_name(e: &EntitySpec) -> String {
    let mut c = e.name.chars();
    c.next().map(|f| f.to_lowercase().chain(c).collect()).unwrap_or_default()
}

fn plural(s: &str) -> String {
    if s.ends_with('s') {
        s.to_string()
    } else {
        format!("{s}s")
    }
}

fn collection(e: &EntitySpec) -> String {
    format!("client.db(dbName).collection('{}')", e.container_name())
}

fn invalid(out: &mut Out, cond: &str, msg: &str) {
    out.open(&format!("if ({cond}) {{"));
    out.line(&format!("res.status(400).json({{ error: '{msg}' }});"));
    out.line("return;");
    out.close("}");
}

fn type_check(ty: PrimitiveType, path: &str) -> String {
    match ty {
        PrimitiveType::String => format!("{path} == ''"),
        PrimitiveType::Int => format!("{path} < 0"),
        PrimitiveType::Double => format!("{path} < 0.0"),
        PrimitiveType::Bool => format!("{path} != true && {path} != false"),
    }
}

struct Gen<'a> {
    spec: &'a SchemaSpec,
    style: Style,
}

impl<'a> Gen<'a> {
    /// Object literal text for a full document of `e` read from `src`.
    fn document(&self, e: &EntitySpec, src: &str) -> String {
        let mut pairs = Vec::new();
        for a in &e.attributes {
            pairs.push(format!("{}: {src}.{}", a.name, a.name));
        }
        for r in &e.references {
            pairs.push(format!("{}: {src}.{}", r.name, r.name));
        }
        for g in &e.aggregates {
            let inner = self.spec.entity(&g.target).expect("validated");
            let nested = self.document(inner, &format!("{src}.{}", g.name));
            if g.many() {
                pairs.push(format!("{}: [{nested}]", g.name));
            } else {
                pairs.push(format!("{}: {nested}", g.name));
            }
        }
        format!("{{ {} }}", pairs.join(", "))
    }

    fn list(&self, out: &mut Out, e: &EntitySpec) {
        let (err, docs) = (self.style.err, self.style.list);
        out.open(&format!("function list{}(req, res) {{", plural(&e.name)));
        out.open(&format!("{}.find({{}}).toArray(({err}, {docs}) => {{", collection(e)));
        out.line(&format!("res.json({docs});"));
        out.close("});");
        out.close("}");
    }

    fn get(&self, out: &mut Out, e: &EntitySpec, name: &str, by: &str, joins: &[ResolvedJoin]) {
        let err = self.style.err;
        let v = var_name(e);
        let key = if by == "_id" { "id" } else { by };
        out.open(&format!("function {name}(req, res) {{"));
        out.open(&format!(
            "{}.findOne({{ {by}: req.params.{key} }}, ({err}, {v}) => {{",
            collection(e)
        ));
        let own = self.own_field(e);
        for j in joins {
            let w = var_name(j.target);
            let idx = if j.reference.many() { "[0]" } else { "" };
            out.open(&format!(
                "{}.findOne({{ _id: {v}.{}{idx} }}, ({err}, {w}) => {{",
                collection(j.target),
                j.reference.name
            ));
            let mut parts = vec![format!("{v}.{own}")];
            parts.extend(j.fields.iter().map(|f| format!("{w}.{f}")));
            out.line(&format!("console.log({});", parts.join(" + ' ' + ")));
            out.close("});");
        }
        out.line(&format!("res.json({v});"));
        out.close("});");
        out.close("}");
    }

    fn own_field(&self, e: &EntitySpec) -> String {
        e.attributes.first().map(|a| a.name.clone()).unwrap_or_else(|| "_id".into())
    }

    fn create(&self, out: &mut Out, e: &EntitySpec) {
        let (err, result) = (self.style.err, self.style.result);
        out.open(&format!("function create{}(req, res) {{", e.name));
        out.line("const body = req.body;");
        for a in &e.attributes {
            invalid(out, &format!("body.{} == null", a.name), &format!("{} is required", a.name));
            invalid(out, &type_check(a.ty, &format!("body.{}", a.name)), &format!("invalid {}", a.name));
        }
        for g in &e.aggregates {
            let inner = self.spec.entity(&g.target).expect("validated");
            if g.many() {
                continue;
            }
            out.open(&format!("if (body.{} != null) {{", g.name));
            for a in &inner.attributes {
                let path = format!("body.{}.{}", g.name, a.name);
                invalid(out, &type_check(a.ty, &path), &format!("invalid {}.{}", g.name, a.name));
            }
            out.close("}");
        }
        out.open(&format!(
            "{}.insertOne({}, ({err}, {result}) => {{",
            collection(e),
            self.document(e, "body")
        ));
        out.line(&format!("res.json({result});"));
        out.close("});");
        out.close("}");
    }

    fn update(&self, out: &mut Out, e: &EntitySpec) {
        let (err, result) = (self.style.err, self.style.result);
        let mut set: Vec<String> = e.attributes.iter().map(|a| format!("{0}: body.{0}", a.name)).collect();
        let mut add = Vec::new();
        for r in &e.references {
            if r.many() {
                add.push(format!("{0}: {{ $each: body.{0} }}", r.name));
            } else {
                set.push(format!("{0}: body.{0}", r.name));
            }
        }
        let mut ops = vec![format!("$set: {{ {} }}", set.join(", "))];
        if !add.is_empty() {
            ops.push(format!("$addToSet: {{ {} }}", add.join(", ")));
        }
        out.open(&format!("function update{}(req, res) {{", e.name));
        out.line("const body = req.body;");
        out.open(&format!(
            "{}.updateOne({{ _id: req.params.id }}, {{ {} }}, ({err}, {result}) => {{",
            collection(e),
            ops.join(", ")
        ));
        out.line(&format!("res.json({result});"));
        out.close("});");
        out.close("}");
    }

    fn delete(&self, out: &mut Out, e: &EntitySpec) {
        let (err, result) = (self.style.err, self.style.result);
        out.open(&format!("function delete{}(req, res) {{", e.name));
        out.open(&format!(
            "{}.deleteOne({{ _id: req.params.id }}, ({err}, {result}) => {{",
            collection(e)
        ));
        out.line(&format!("res.json({result});"));
        out.close("});");
        out.close("}");
    }

    fn aggregation(&self, out: &mut Out, e: &EntitySpec, q: &QuerySpec, joins: &[ResolvedJoin]) {
        let err = self.style.err;
        let docs = plural(&var_name(e));
        let d = &docs[..1];
        let mut stages = Vec::new();
        let mut parts = vec![format!("{d}.{}", self.own_field(e))];
        for j in joins {
            let from = j.target.container_name();
            let (local, foreign, unwind) = if j.reverse {
                ("_id".to_string(), j.reference.name.clone(), true)
            } else {
                (j.reference.name.clone(), "_id".to_string(), !j.reference.many())
            };
            let alias = if unwind {
                var_name(j.target)
            } else {
                format!("{}Docs", var_name(j.target))
            };
            stages.push(format!(
                "{{ $lookup: {{ from: '{from}', localField: '{local}', foreignField: '{foreign}', as: '{alias}' }} }}"
            ));
            if unwind {
                stages.push(format!("{{ $unwind: '${alias}' }}"));
            }
            let idx = if unwind { "" } else { "[0]" };
            parts.extend(j.fields.iter().map(|f| format!("{d}.{alias}{idx}.{f}")));
        }
        out.open(&format!("function {}(req, res) {{", q.name));
        out.open(&format!("{}.aggregate([", collection(e)));
        let n = stages.len();
        for (i, s) in stages.iter().enumerate() {
            out.line(&format!("{s}{}", if i + 1 < n { "," } else { "" }));
        }
        out.depth -= 1;
        out.open(&format!("]).toArray(({err}, {docs}) => {{"));
        out.open(&format!("{docs}.forEach(({d}) => {{"));
        out.line(&format!("console.log({});", parts.join(" + ' ' + ")));
        out.close("});");
        out.line("res.end();");
        out.close("});");
        out.close("}");
    }

    fn routes(&self, e: &'a EntitySpec) -> Result<String> {
        let mut out = Out::default();
        out.line("const client = require('./index').client;");
        out.line(&format!("const dbName = '{}';", self.spec.name));
        let mut handlers = Vec::new();
        let mut emit = |out: &mut Out, name: String, f: &dyn Fn(&mut Out)| {
            out.line("");
            f(out);
            handlers.push(name);
        };
        let spec: &'a SchemaSpec = self.spec;
        let queries: Vec<&'a QuerySpec> = spec.queries.iter().filter(|q| q.entity == e.name).collect();
        let resolve = |q: &'a QuerySpec| -> Result<Vec<ResolvedJoin<'a>>> {
            q.joins.iter().map(|j| spec.resolve_join(q, j)).collect()
        };
        emit(&mut out, format!("list{}", plural(&e.name)), &|o| self.list(o, e));
        let in_get = queries.iter().find(|q| q.style == JoinStyle::Sequential && q.by.is_none());
        let (get_name, get_joins) = match in_get {
            Some(q) => (q.name.clone(), resolve(q)?),
            None => (format!("get{}", e.name), Vec::new()),
        };
        emit(&mut out, get_name.clone(), &|o| self.get(o, e, &get_name, "_id", &get_joins));
        emit(&mut out, format!("create{}", e.name), &|o| self.create(o, e));
        emit(&mut out, format!("update{}", e.name), &|o| self.update(o, e));
        emit(&mut out, format!("delete{}", e.name), &|o| self.delete(o, e));
        for q in &queries {
            let joins = resolve(q)?;
            match (q.style, &q.by) {
                (JoinStyle::Sequential, Some(by)) => {
                    emit(&mut out, q.name.clone(), &|o| self.get(o, e, &q.name, by, &joins))
                }
                (JoinStyle::Sequential, None) => {}
                (JoinStyle::Aggregation, _) => emit(&mut out, q.name.clone(), &|o| self.aggregation(o, e, q, &joins)),
            }
        }
        out.line("");
        for h in &handlers {
            out.line(&format!("module.exports.{h} = {h};"));
        }
        Ok(out.text)
    }
}

fn index(spec: &SchemaSpec) -> String {
    let mut s = String::new();
    s.push_str("const MongoClient = require('mongodb').MongoClient;\n\n");
    let _ = writeln!(s, "const url = 'mongodb://localhost:27017/{}';", spec.name);
    s.push_str("const client = new MongoClient(url);\n");
    s.push_str("client.connect();\n\n");
    s.push_str("module.exports.client = client;\n");
    s
}

/// Source files of an application exercising the schema: an index plus
/// one routes file per root entity, as `(relative path, text)`.
pub fn generate_app(spec: &SchemaSpec, seed: u64) -> Result<Vec<(String, String)>> {
    spec.validate()?;
    let g = Gen {
        spec,
        style: Style::new(seed),
    };
    let mut files = vec![("index.js".to_string(), index(spec))];
    for e in spec.roots() {
        files.push((format!("{}.routes.js", e.container_name()), g.routes(e)?));
    }
    files.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(files)
}
