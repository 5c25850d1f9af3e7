//! Language-independent code model.
//!
//! Source files of the supported ECMAScript subset are injected into a
//! [`CodeModel`]: a tree of [`Container`]s (directories and files), each file
//! holding one script [`CodeContainer`] whose top-level [`CodeBlock`] lists
//! the statements in source order. Every statement, block and expression
//! carries a [`NodeId`] that later models use to point back into the code.

mod infer;
mod inject;
mod lexer;
mod parser;
mod printer;
pub mod visit;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Diagnostic;

pub use infer::{collect_evidence, infer_local_types, merge_types, TypeEvidence};
pub use inject::{inject_project, inject_sources, InjectOptions};
pub use parser::{parse_source, parse_source_indexed, ParseMode};
pub use printer::{print_block_body, print_expr, print_statement, regenerate, regenerate_container};

/// Stable identifier of a code element: file index plus a dense pre-order
/// counter within that file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub file: u32,
    pub index: u32,
}

impl NodeId {
    pub const fn new(file: u32, index: u32) -> Self {
        NodeId { file, index }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.index)
    }
}

impl FromStr for NodeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("bad node id `{s}`"))?;
        Ok(NodeId {
            file: a.parse().map_err(|_| format!("bad node id `{s}`"))?,
            index: b.parse().map_err(|_| format!("bad node id `{s}`"))?,
        })
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
    /// Length in bytes of the statement text, terminator included.
    pub length: u32,
    /// Byte offset of the statement start.
    pub offset: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimitiveType {
    String,
    Int,
    Double,
    Bool,
}

impl PrimitiveType {
    pub fn as_str(self) -> &'static str {
        match self {
            PrimitiveType::String => "string",
            PrimitiveType::Int => "int",
            PrimitiveType::Double => "double",
            PrimitiveType::Bool => "bool",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "string" => PrimitiveType::String,
            "int" => PrimitiveType::Int,
            "double" => PrimitiveType::Double,
            "bool" | "boolean" => PrimitiveType::Bool,
            _ => return None,
        })
    }
}

impl fmt::Display for PrimitiveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Declared or locally inferred type of a variable or property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VarType {
    #[default]
    Unknown,
    String,
    Int,
    Double,
    Bool,
}

impl From<PrimitiveType> for VarType {
    fn from(p: PrimitiveType) -> Self {
        match p {
            PrimitiveType::String => VarType::String,
            PrimitiveType::Int => VarType::Int,
            PrimitiveType::Double => VarType::Double,
            PrimitiveType::Bool => VarType::Bool,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub struct CodeModel {
    pub containers: Vec<Container>,
    #[serde(default)]
    pub classes: Vec<ClassDecl>,
    #[serde(default)]
    pub globals: Vec<VariableDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContainerKind {
    Directory,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Container {
    pub kind: ContainerKind,
    /// Path relative to the injected root, `/`-separated.
    pub path: String,
    #[serde(default)]
    pub children: Vec<Container>,
    #[serde(default)]
    pub code_containers: Vec<CodeContainer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeContainerKind {
    Script,
    ClassBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CodeContainer {
    pub kind: CodeContainerKind,
    pub file_index: u32,
    pub blocks: Vec<CodeBlock>,
    #[serde(default)]
    pub variable_decls: Vec<VariableDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Diagnostic>,
}

impl CodeContainer {
    /// The script body. Script containers always hold exactly one block.
    pub fn body(&self) -> &CodeBlock {
        &self.blocks[0]
    }

    pub fn body_mut(&mut self) -> &mut CodeBlock {
        &mut self.blocks[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CallableInfo {
    pub params: Vec<String>,
    pub anonymous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CodeBlock {
    pub id: NodeId,
    pub statements: Vec<Statement>,
    #[serde(default)]
    pub locals: Vec<VariableDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub callable: Option<CallableInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Statement {
    pub id: NodeId,
    pub span: Span,
    pub variant: StmtKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeclKind {
    Const,
    Let,
    Var,
}

impl DeclKind {
    pub fn keyword(self) -> &'static str {
        match self {
            DeclKind::Const => "const",
            DeclKind::Let => "let",
            DeclKind::Var => "var",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum StmtKind {
    ExpressionStmt {
        expr: Expr,
    },
    VariableDecl {
        decl: DeclKind,
        name: String,
        init: Option<Expr>,
    },
    Assignment {
        target: Expr,
        value: Expr,
    },
    If {
        cond: Expr,
        then: CodeBlock,
        #[serde(rename = "else")]
        otherwise: Option<CodeBlock>,
    },
    While {
        cond: Expr,
        body: CodeBlock,
    },
    Return {
        value: Option<Expr>,
    },
    FunctionDecl {
        name: String,
        body: CodeBlock,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiteralKind {
    String,
    Int,
    Double,
    Bool,
    Null,
}

impl LiteralKind {
    pub fn primitive(self) -> Option<PrimitiveType> {
        match self {
            LiteralKind::String => Some(PrimitiveType::String),
            LiteralKind::Int => Some(PrimitiveType::Int),
            LiteralKind::Double => Some(PrimitiveType::Double),
            LiteralKind::Bool => Some(PrimitiveType::Bool),
            LiteralKind::Null => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryOp {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "===")]
    StrictEq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "!==")]
    StrictNe,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "+")]
    Add,
    #[serde(rename = "-")]
    Sub,
    #[serde(rename = "&&")]
    And,
    #[serde(rename = "||")]
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Eq => "==",
            BinaryOp::StrictEq => "===",
            BinaryOp::Ne => "!=",
            BinaryOp::StrictNe => "!==",
            BinaryOp::Ge => ">=",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Lt => "<",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::StrictEq | BinaryOp::Ne | BinaryOp::StrictNe => 3,
            BinaryOp::Ge | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Lt => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
        }
    }

    /// Equality and relational operators: the shapes that carry type evidence.
    pub fn is_comparison(self) -> bool {
        matches!(self.precedence(), 3 | 4)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum ExprKind {
    Literal {
        kind: LiteralKind,
        /// Decoded value for strings, source text for everything else.
        lexeme: String,
    },
    VarAccess {
        name: String,
    },
    PropertyAccess {
        object: Box<Expr>,
        property: String,
    },
    IndexAccess {
        object: Box<Expr>,
        index: Box<Expr>,
    },
    Call {
        receiver: Option<Box<Expr>>,
        method: String,
        args: Vec<Expr>,
    },
    Lambda {
        params: Vec<String>,
        body: CodeBlock,
        arrow: bool,
    },
    ObjectLiteral {
        pairs: Vec<(String, Expr)>,
    },
    ArrayLiteral {
        items: Vec<Expr>,
    },
    New {
        class_name: String,
        args: Vec<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    /// Source text kept verbatim for a construct outside the subset
    /// (lenient mode only).
    Opaque {
        text: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassDecl {
    pub name: String,
    pub properties: Vec<(String, VarType)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VariableDecl {
    pub name: String,
    pub declared_type: VarType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_site: Option<NodeId>,
}

impl CodeModel {
    /// All script containers with their relative path, in file-index order.
    pub fn files(&self) -> Vec<(&str, &CodeContainer)> {
        fn walk<'a>(c: &'a Container, out: &mut Vec<(&'a str, &'a CodeContainer)>) {
            for cc in &c.code_containers {
                out.push((c.path.as_str(), cc));
            }
            for child in &c.children {
                walk(child, out);
            }
        }
        let mut out = Vec::new();
        for c in &self.containers {
            walk(c, &mut out);
        }
        out.sort_by_key(|(_, cc)| cc.file_index);
        out
    }

    pub fn files_mut(&mut self) -> Vec<(String, &mut CodeContainer)> {
        fn walk<'a>(c: &'a mut Container, out: &mut Vec<(String, &'a mut CodeContainer)>) {
            let path = c.path.clone();
            for cc in c.code_containers.iter_mut() {
                out.push((path.clone(), cc));
            }
            for child in c.children.iter_mut() {
                walk(child, out);
            }
        }
        let mut out = Vec::new();
        for c in self.containers.iter_mut() {
            walk(c, &mut out);
        }
        out.sort_by_key(|(_, cc)| cc.file_index);
        out
    }

    pub fn file_count(&self) -> usize {
        self.files().len()
    }

    /// Wrap a single parsed script as a one-file model.
    pub fn from_single(path: &str, container: CodeContainer) -> Self {
        CodeModel {
            containers: vec![Container {
                kind: ContainerKind::File,
                path: path.to_string(),
                children: Vec::new(),
                code_containers: vec![container],
            }],
            ..Default::default()
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("code model serializes")
    }
}

/// JSON view of a model with node ids and spans removed, used for
/// structural comparison.
pub fn structural_json<T: Serialize>(value: &T) -> serde_json::Value {
    fn strip(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(map) => {
                for key in ["id", "span", "fileIndex", "warnings", "initSite"] {
                    map.remove(key);
                }
                for (_, child) in map.iter_mut() {
                    strip(child);
                }
            }
            serde_json::Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut v = serde_json::to_value(value).expect("model serializes");
    strip(&mut v);
    v
}

/// Structural equality: same shape and content, node ids and spans ignored.
pub fn structurally_equal<T: Serialize>(a: &T, b: &T) -> bool {
    structural_json(a) == structural_json(b)
}
