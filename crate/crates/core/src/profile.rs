//! Database API profiles: which calls are database operations and where
//! their container, filter, payload and result live.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::code::{CodeContainer, Expr, ExprKind, LiteralKind, StmtKind};
use crate::error::{Error, Result};

const MONGODB_NODE: &str = include_str!("../profiles/mongodb-node.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpKind {
    Read,
    Insert,
    Update,
    Delete,
    AggregateRead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResultBinding {
    CallbackParam,
    ReturnValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContainerArg {
    /// Connector method on the receiver chain naming the container.
    pub method: String,
    pub arg_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProfileEntry {
    pub method_name: String,
    pub op_kind: OpKind,
    pub container_arg: ContainerArg,
    #[serde(default)]
    pub filter_arg_index: Option<usize>,
    #[serde(default)]
    pub payload_arg_index: Option<usize>,
    #[serde(default)]
    pub callback_arg_index: Option<usize>,
    #[serde(default)]
    pub pipeline_arg_index: Option<usize>,
    pub result_binding: ResultBinding,
    /// Position of the result among the callback parameters.
    #[serde(default = "one")]
    pub callback_result_param: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiProfile {
    pub name: String,
    pub connectors: Vec<String>,
    #[serde(default)]
    pub cursor_methods: Vec<String>,
    pub entries: Vec<ProfileEntry>,
}

impl Default for ApiProfile {
    fn default() -> Self {
        ApiProfile::from_json(MONGODB_NODE).expect("bundled profile is valid")
    }
}

impl ApiProfile {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let p: ApiProfile = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Profile(format!("at `{}`: {}", e.path(), e.inner())))?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for e in &self.entries {
            if !names.insert(e.method_name.as_str()) {
                return Err(Error::Profile(format!("duplicate entry `{}`", e.method_name)));
            }
            let idx: Vec<usize> = [e.filter_arg_index, e.payload_arg_index, e.callback_arg_index]
                .into_iter()
                .flatten()
                .collect();
            let distinct: HashSet<usize> = idx.iter().copied().collect();
            if distinct.len() != idx.len() {
                return Err(Error::Profile(format!("entry `{}` reuses an argument index", e.method_name)));
            }
            if !self.connectors.contains(&e.container_arg.method) {
                return Err(Error::Profile(format!(
                    "entry `{}` names container method `{}` that is not a connector",
                    e.method_name, e.container_arg.method
                )));
            }
        }
        Ok(())
    }

    pub fn entry(&self, method: &str) -> Option<&ProfileEntry> {
        self.entries.iter().find(|e| e.method_name == method)
    }

    pub fn is_cursor_method(&self, method: &str) -> bool {
        self.cursor_methods.iter().any(|m| m == method)
    }

    /// Match a call expression against the profile. Calls whose receiver
    /// chain holds no container connector are not database calls.
    pub fn match_call<'p>(&'p self, call: &Expr, consts: &Constants) -> Result<Option<(&'p ProfileEntry, String)>> {
        let ExprKind::Call {
            receiver: Some(recv),
            method,
            ..
        } = &call.kind
        else {
            return Ok(None);
        };
        let Some(entry) = self.entry(method) else {
            return Ok(None);
        };
        let Some(connector) = find_connector(recv, &entry.container_arg.method, consts, 0) else {
            return Ok(None);
        };
        let ExprKind::Call { args, .. } = &connector.kind else {
            unreachable!("connector is a call")
        };
        let arg = args.get(entry.container_arg.arg_index).ok_or_else(|| {
            Error::Profile(format!("`{}` call without a container argument", entry.container_arg.method))
        })?;
        match consts.string_value(arg) {
            Some(name) => Ok(Some((entry, name))),
            None => Err(Error::Profile(format!(
                "container argument of `{}` is neither a string literal nor a resolvable constant",
                entry.container_arg.method
            ))),
        }
    }
}

fn find_connector<'a>(e: &'a Expr, method: &str, consts: &'a Constants, depth: usize) -> Option<&'a Expr> {
    if depth > 16 {
        return None;
    }
    match &e.kind {
        ExprKind::Call {
            method: m,
            receiver,
            ..
        } => {
            if m == method {
                Some(e)
            } else {
                receiver.as_deref().and_then(|r| find_connector(r, method, consts, depth + 1))
            }
        }
        ExprKind::VarAccess { name } => consts
            .init(name)
            .and_then(|init| find_connector(init, method, consts, depth + 1)),
        _ => None,
    }
}

/// Top-level `const` initializers of one file.
#[derive(Debug, Default, Clone)]
pub struct Constants {
    inits: BTreeMap<String, Expr>,
}

impl Constants {
    pub fn of(cc: &CodeContainer) -> Self {
        let mut inits = BTreeMap::new();
        for s in &cc.body().statements {
            if let StmtKind::VariableDecl {
                decl: crate::code::DeclKind::Const,
                name,
                init: Some(init),
            } = &s.variant
            {
                inits.entry(name.clone()).or_insert_with(|| init.clone());
            }
        }
        Constants { inits }
    }

    pub fn init(&self, name: &str) -> Option<&Expr> {
        self.inits.get(name)
    }

    pub fn string_value(&self, e: &Expr) -> Option<String> {
        match &e.kind {
            ExprKind::Literal {
                kind: LiteralKind::String,
                lexeme,
            } => Some(lexeme.clone()),
            ExprKind::VarAccess { name } => match self.init(name) {
                Some(Expr {
                    kind:
                        ExprKind::Literal {
                            kind: LiteralKind::String,
                            lexeme,
                        },
                    ..
                }) => Some(lexeme.clone()),
                _ => None,
            },
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::visit::stmt_exprs;
    use crate::code::{parse_source, ParseMode};

    fn first_expr_match(src: &str) -> Result<Option<(OpKind, String)>> {
        let cc = parse_source(src, "t.js", ParseMode::Strict).unwrap();
        let consts = Constants::of(&cc);
        let p = ApiProfile::default();
        let stmt = cc.body().statements.last().unwrap();
        let e = match &stmt.variant {
            StmtKind::VariableDecl { init: Some(e), .. } => e,
            _ => stmt_exprs(stmt)[0],
        };
        Ok(p.match_call(e, &consts)?.map(|(en, c)| (en.op_kind, c)))
    }

    #[test]
    fn bundled_profile_loads() {
        let p = ApiProfile::default();
        assert_eq!(p.entries.len(), 6);
        assert_eq!(p.entry("aggregate").unwrap().op_kind, OpKind::AggregateRead);
    }

    #[test]
    fn container_from_literal_and_constant() {
        assert_eq!(
            first_expr_match("client.db(n).collection('users').findOne({}, f);").unwrap(),
            Some((OpKind::Read, "users".into()))
        );
        assert_eq!(
            first_expr_match("const c = 'albums';\nclient.db(n).collection(c).insertOne({});").unwrap(),
            Some((OpKind::Insert, "albums".into()))
        );
        assert_eq!(
            first_expr_match("const col = db.collection('tracks');\ncol.deleteOne({});").unwrap(),
            Some((OpKind::Delete, "tracks".into()))
        );
    }

    #[test]
    fn non_database_calls_are_ignored() {
        assert_eq!(first_expr_match("items.find(x => x.a);").unwrap(), None);
        assert_eq!(first_expr_match("console.log(a);").unwrap(), None);
    }

    #[test]
    fn unresolvable_container_is_profile_error() {
        let err = first_expr_match("db.collection(name).findOne({});").unwrap_err();
        assert!(matches!(err, Error::Profile(_)));
    }

    #[test]
    fn bad_profile_reports_path() {
        let err = ApiProfile::from_json(r#"{"name": "x", "connectors": [], "entries": [{"methodName": 3}]}"#).unwrap_err();
        assert!(err.to_string().contains("entries[0].methodName"), "{err}");
        let dup = r#"{"name": "x", "connectors": ["c"], "entries": [
            {"methodName": "f", "opKind": "read", "containerArg": {"method": "c", "argIndex": 0}, "resultBinding": "return-value"},
            {"methodName": "f", "opKind": "read", "containerArg": {"method": "c", "argIndex": 0}, "resultBinding": "return-value"}]}"#;
        assert!(ApiProfile::from_json(dup).is_err());
    }
}
