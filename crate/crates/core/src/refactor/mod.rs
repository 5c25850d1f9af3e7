//! Join removal: detection of fields worth duplicating, plan construction,
//! and plan application to schema, data (migration) and code.

mod apply;
mod detect;
mod emit;
mod plan;
mod rewrite;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::code::{CodeModel, NodeId};
use crate::error::Diagnostic;
use crate::uschema::USchemaModel;

pub use apply::apply_plan;
pub use detect::{detect_duplications, JoinCandidate};
pub use emit::{emit_copy, emit_migration};
pub use plan::{annotate_duplications, build_plans, plan_table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum JoinType {
    Sequential,
    Aggregation,
}

impl fmt::Display for JoinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JoinType::Sequential => "Sequential Query",
            JoinType::Aggregation => "Aggregation Query",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Duplicate {
    pub source_field: String,
    pub new_name: String,
    /// Where the copy lives, relative to the referencing document.
    pub destination_path: String,
}

/// How the referencing document points at the referenced one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReferencePath {
    /// Property steps from the document root to the reference field.
    pub props: Vec<String>,
    /// Property steps followed by an array index.
    pub arrays: Vec<bool>,
    /// Attribute of the referenced document the field is compared with.
    pub target_attribute: String,
    /// The reference field holds many identifiers.
    pub many: bool,
    /// The referenced document holds the identifier of the referencing one.
    pub reverse: bool,
}

impl ReferencePath {
    pub fn field(&self) -> &str {
        self.props.last().map(String::as_str).unwrap_or("_id")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JoinRemovalPlan {
    pub id: String,
    pub join_type: JoinType,
    /// Enclosing handler, or `file:line`.
    pub query: String,
    pub file: String,
    pub line: u32,
    pub join_op: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prev_op: Option<usize>,
    /// Index of the `$lookup` among the operation's lookups.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lookup: Option<usize>,
    /// Referencing root entity, which receives the copies.
    pub target_entity: String,
    pub target_container: String,
    /// Referenced entity the data is copied from.
    pub source_entity: String,
    pub source_container: String,
    /// Entity of the structure holding the reference field.
    pub destination_entity: String,
    pub reference: ReferencePath,
    pub duplicates: Vec<Duplicate>,
    /// Name of the embedded object grouping several copies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedded: Option<String>,
    pub usage_sites: Vec<NodeId>,
    pub usage_line_count: usize,
    pub related_ops: Vec<usize>,
    pub original_snippet: String,
    pub rewritten_snippet: String,
    /// The join result escapes the block; the plan cannot be applied.
    pub partial: bool,
    pub join_stmt: NodeId,
    pub join_call: NodeId,
    /// Result variable of the join (sequential) or of the pipeline read.
    pub join_var: String,
    /// Lookup alias of an aggregation join.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alias: Option<String>,
    /// Digest of the printed join statement, for staleness checks.
    pub signature: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Diagnostic>,
}

impl JoinRemovalPlan {
    pub fn fields(&self) -> Vec<&str> {
        self.duplicates.iter().map(|d| d.source_field.as_str()).collect()
    }

    pub fn location(&self) -> String {
        format!("In {}", self.target_entity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FileChange {
    pub path: String,
    pub changed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefactorOutcome {
    pub updated_schema: USchemaModel,
    pub updated_code: CodeModel,
    /// Regenerated sources, keyed by relative path.
    pub sources: Vec<(String, String)>,
    pub copy_statement: String,
    pub migration_script: String,
    pub report: Vec<FileChange>,
}
