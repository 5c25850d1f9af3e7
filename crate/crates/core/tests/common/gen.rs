//! Random programs inside the supported language subset.

use proptest::prelude::*;

const FIELDS: [&str; 6] = ["_id", "name", "owner_id", "tags", "total", "item_id"];
const CONTAINERS: [&str; 4] = ["users", "movies", "orders", "items"];
const OPS: [&str; 7] = ["+", "==", "<", "&&", "||", "!=", ">="];

#[derive(Debug, Clone)]
pub enum Val {
    Int(u16),
    Dbl(u16),
    Str(String),
    Bool(bool),
    Null,
    /// Scope pick, field pick, through an index.
    Path(u8, u8, bool),
}

#[derive(Debug, Clone)]
pub enum Ex {
    V(Val),
    Bin(u8, Box<Ex>, Box<Ex>),
}

#[derive(Debug, Clone)]
pub struct DbCall {
    container: u8,
    method: u8,
    by_const: bool,
    filter: Vec<(u8, Val)>,
    body: Vec<St>,
}

#[derive(Debug, Clone)]
pub enum St {
    Log(Ex),
    Alias(u8, u8),
    Assign(Ex),
    If(Ex, Vec<St>, Option<Vec<St>>),
    While(Ex, Vec<St>),
    Db(Box<DbCall>),
    Ret,
}

fn val() -> impl Strategy<Value = Val> {
    prop_oneof![
        (0u16..1000).prop_map(Val::Int),
        (0u16..100).prop_map(Val::Dbl),
        "[a-z ]{0,6}".prop_map(Val::Str),
        any::<bool>().prop_map(Val::Bool),
        Just(Val::Null),
        (any::<u8>(), any::<u8>(), any::<bool>()).prop_map(|(a, b, c)| Val::Path(a, b, c)),
        (any::<u8>(), any::<u8>(), any::<bool>()).prop_map(|(a, b, c)| Val::Path(a, b, c)),
    ]
}

/// Filter values lean towards paths so that joins are common.
fn filter_val() -> impl Strategy<Value = Val> {
    prop_oneof![
        3 => (any::<u8>(), any::<u8>(), any::<bool>()).prop_map(|(a, b, c)| Val::Path(a, b, c)),
        1 => val(),
    ]
}

fn ex() -> impl Strategy<Value = Ex> {
    val()
        .prop_map(Ex::V)
        .prop_recursive(3, 8, 2, |inner| (any::<u8>(), inner.clone(), inner).prop_map(|(o, a, b)| Ex::Bin(o, Box::new(a), Box::new(b))))
}

fn stmt() -> impl Strategy<Value = St> {
    let leaf = prop_oneof![
        ex().prop_map(St::Log),
        (any::<u8>(), any::<u8>()).prop_map(|(a, b)| St::Alias(a, b)),
        ex().prop_map(St::Assign),
        Just(St::Ret),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        let body = prop::collection::vec(inner, 0..4);
        prop_oneof![
            (ex(), body.clone(), prop::option::of(body.clone())).prop_map(|(c, t, e)| St::If(c, t, e)),
            (ex(), body.clone()).prop_map(|(c, b)| St::While(c, b)),
            (any::<u8>(), any::<u8>(), any::<bool>(), prop::collection::vec((any::<u8>(), filter_val()), 0..3), body.clone()).prop_map(
                |(container, method, by_const, filter, body)| St::Db(Box::new(DbCall {
                    container,
                    method,
                    by_const,
                    filter,
                    body,
                }))
            ),
            (any::<u8>(), any::<u8>(), any::<bool>(), prop::collection::vec((any::<u8>(), filter_val()), 1..3), body).prop_map(
                |(container, method, by_const, filter, body)| St::Db(Box::new(DbCall {
                    container,
                    method: method % 2,
                    by_const,
                    filter,
                    body,
                }))
            ),
        ]
    })
}

/// A program: handlers, each a list of statements.
pub fn program() -> impl Strategy<Value = Vec<Vec<St>>> {
    prop::collection::vec(prop::collection::vec(stmt(), 1..5), 1..4)
}

struct Renderer {
    out: String,
    depth: usize,
    scope: Vec<String>,
    fresh: usize,
}

impl Renderer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn val(&self, v: &Val) -> String {
        match v {
            Val::Int(n) => n.to_string(),
            Val::Dbl(n) => format!("{n}.5"),
            Val::Str(s) => format!("'{s}'"),
            Val::Bool(b) => b.to_string(),
            Val::Null => "null".into(),
            Val::Path(s, f, idx) => {
                if self.scope.is_empty() {
                    return "'none'".into();
                }
                let root = &self.scope[*s as usize % self.scope.len()];
                let field = FIELDS[*f as usize % FIELDS.len()];
                if *idx {
                    format!("{root}[0].{field}")
                } else {
                    format!("{root}.{field}")
                }
            }
        }
    }

    fn ex(&self, e: &Ex) -> String {
        match e {
            Ex::V(v) => self.val(v),
            Ex::Bin(o, a, b) => format!("({} {} {})", self.ex(a), OPS[*o as usize % OPS.len()], self.ex(b)),
        }
    }

    fn filter(&self, pairs: &[(u8, Val)]) -> String {
        let mut seen = Vec::new();
        let mut parts = Vec::new();
        for (k, v) in pairs {
            let k = FIELDS[*k as usize % FIELDS.len()];
            if seen.contains(&k) {
                continue;
            }
            seen.push(k);
            parts.push(format!("{k}: {}", self.val(v)));
        }
        if parts.is_empty() {
            "{}".into()
        } else {
            format!("{{ {} }}", parts.join(", "))
        }
    }

    fn block(&mut self, stmts: &[St]) {
        let mark = self.scope.len();
        self.depth += 1;
        for (i, s) in stmts.iter().enumerate() {
            self.stmt(s, i + 1 == stmts.len());
        }
        self.depth -= 1;
        self.scope.truncate(mark);
    }

    fn stmt(&mut self, s: &St, last: bool) {
        match s {
            St::Log(e) => {
                let t = format!("console.log({});", self.ex(e));
                self.line(&t);
            }
            St::Alias(p, f) => {
                if self.scope.is_empty() {
                    return;
                }
                let init = self.val(&Val::Path(*p, *f, false));
                let n = self.name("k");
                self.line(&format!("const {n} = {init};"));
                self.scope.push(n);
            }
            St::Assign(e) => {
                let t = format!("total = {};", self.ex(e));
                self.line(&t);
            }
            St::Ret => {
                if last {
                    self.line("return;");
                }
            }
            St::If(c, t, e) => {
                let head = format!("if ({}) {{", self.ex(c));
                self.line(&head);
                self.block(t);
                if let Some(e) = e {
                    self.line("} else {");
                    self.block(e);
                }
                self.line("}");
            }
            St::While(c, b) => {
                let head = format!("while ({}) {{", self.ex(c));
                self.line(&head);
                self.block(b);
                self.line("}");
            }
            St::Db(d) => self.db(d),
        }
    }

    fn db(&mut self, d: &DbCall) {
        let ci = d.container as usize % CONTAINERS.len();
        let coll = if d.by_const {
            format!("C_{}", CONTAINERS[ci].to_uppercase())
        } else {
            format!("'{}'", CONTAINERS[ci])
        };
        let base = format!("client.db(dbName).collection({coll})");
        let f = self.filter(&d.filter);
        let var = self.name("d");
        let cb = format!("(err, {var}) => {{");
        let head = match d.method % 6 {
            0 => format!("{base}.findOne({f}, {cb}"),
            1 => format!("{base}.find({f}).toArray({cb}"),
            2 => format!("{base}.updateOne({f}, {{ $set: {{ total: 1 }} }}, {cb}"),
            3 => format!("{base}.insertOne({{ name: 'n', total: 2.5 }}, {cb}"),
            4 => format!("{base}.deleteOne({f}, {cb}"),
            _ => {
                let from = CONTAINERS[(ci + 1) % CONTAINERS.len()];
                format!(
                    "{base}.aggregate([{{ $match: {f} }}, {{ $lookup: {{ from: '{from}', localField: 'item_id', foreignField: '_id', as: 'joined' }} }}]).toArray({cb}"
                )
            }
        };
        self.line(&head);
        self.scope.push(var);
        self.block(&d.body);
        self.scope.pop();
        self.line("});");
    }
}

pub fn render(program: &[Vec<St>]) -> String {
    let mut r = Renderer {
        out: String::new(),
        depth: 0,
        scope: Vec::new(),
        fresh: 0,
    };
    r.line("const dbName = 'app';");
    for c in CONTAINERS {
        r.line(&format!("const C_{} = '{c}';", c.to_uppercase()));
    }
    for (i, h) in program.iter().enumerate() {
        r.line("");
        r.line(&format!("function handler{i}(req, res) {{"));
        r.line("  let total = 0;");
        r.block(h);
        r.line("}");
    }
    r.out
}
