//! Database Operation and Structure model: detected CRUD operations with
//! their data dependencies, plus the physical structure of stored data.

mod ops;
pub(crate) mod refs;
pub(crate) mod structure;

use serde::{Deserialize, Serialize};

use crate::cfg::{ControlFlowModel, NodeRef};
use crate::code::visit::AccessPath;
use crate::code::{CodeModel, LiteralKind, NodeId, PrimitiveType};
use crate::error::{Diagnostic, Result};
use crate::profile::ApiProfile;

pub use ops::{backward_traverse, find_db_call_nodes, DbCallNode};
pub use refs::{create_references, dedup_structures};
pub use structure::forward_traverse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperationKind {
    Read,
    Insert,
    Update,
    Delete,
}

/// One equality conjunct of a filter: `fieldPath == rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Conjunct {
    pub field_path: Vec<String>,
    pub rhs: Rhs,
    /// Expression id of the right-hand side.
    pub rhs_ref: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Rhs {
    Literal { literal: LiteralKind, lexeme: String },
    VariablePath { path: AccessPath },
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Predicate {
    pub conjuncts: Vec<Conjunct>,
}

/// A `$lookup` stage of an aggregation pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Lookup {
    pub from: String,
    pub local_field: String,
    pub foreign_field: String,
    pub alias: String,
    pub unwind: bool,
    /// Index of the stage within the pipeline array.
    pub stage: usize,
    /// Expression id of the stage object.
    pub stage_ref: NodeId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DatabaseOperation {
    pub id: usize,
    pub kind: OperationKind,
    pub method: String,
    pub stmt_ref: NodeId,
    pub call_ref: NodeId,
    pub node: NodeRef,
    pub file: String,
    pub line: u32,
    /// Enclosing named function, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub handler: Option<String>,
    pub container_name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result_variable: Option<String>,
    /// Result is delivered through a cursor method, so it holds many documents.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub cursor: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<Predicate>,
    /// Payload argument of an Insert or Update.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload_ref: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prev_op: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub next_ops: Vec<usize>,
    pub is_join: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result_ds: Option<usize>,
    /// Root variables of the non-callback arguments.
    pub params: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lookups: Vec<Lookup>,
}

impl DatabaseOperation {
    pub fn is_aggregate(&self) -> bool {
        self.method == "aggregate"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum FieldType {
    /// `None` is the default type (string, not backed by evidence).
    Attribute { primitive: Option<PrimitiveType> },
    Collection { element: Box<FieldType> },
    Aggregate { target: usize },
    Reference {
        target_container: String,
        target_attribute: String,
        many: bool,
    },
}

impl FieldType {
    pub fn default_attribute() -> Self {
        FieldType::Attribute { primitive: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldRef {
    pub structure: usize,
    pub field: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DosField {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: FieldType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duplicated_from: Option<FieldRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DataStructure {
    pub id: usize,
    pub name: String,
    pub container: String,
    pub root: bool,
    pub fields: Vec<DosField>,
}

impl DataStructure {
    pub fn field(&self, name: &str) -> Option<&DosField> {
        self.fields.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DosContainer {
    pub name: String,
    /// Ids of the container's structures; the first one is the root.
    pub data_structures: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub struct DosModel {
    pub operations: Vec<DatabaseOperation>,
    pub containers: Vec<DosContainer>,
    pub structures: Vec<DataStructure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
}

impl DosModel {
    pub fn structure(&self, id: usize) -> &DataStructure {
        self.structures.iter().find(|s| s.id == id).expect("structure id exists")
    }

    pub fn structure_mut(&mut self, id: usize) -> &mut DataStructure {
        self.structures.iter_mut().find(|s| s.id == id).expect("structure id exists")
    }

    pub fn container(&self, name: &str) -> Option<&DosContainer> {
        self.containers.iter().find(|c| c.name == name)
    }

    /// Root structure of a container, created on first use.
    pub fn root_structure(&mut self, container: &str) -> usize {
        if let Some(c) = self.container(container) {
            return c.data_structures[0];
        }
        let id = self.next_structure_id();
        self.structures.push(DataStructure {
            id,
            name: container.to_string(),
            container: container.to_string(),
            root: true,
            fields: vec![DosField {
                name: "_id".into(),
                ty: FieldType::default_attribute(),
                duplicated_from: None,
            }],
        });
        self.containers.push(DosContainer {
            name: container.to_string(),
            data_structures: vec![id],
        });
        id
    }

    pub fn root_of(&self, container: &str) -> Option<usize> {
        self.container(container).map(|c| c.data_structures[0])
    }

    fn next_structure_id(&self) -> usize {
        self.structures.iter().map(|s| s.id + 1).max().unwrap_or(0)
    }

    /// New embedded structure inside a container.
    pub fn new_embedded(&mut self, container: &str, name: &str) -> usize {
        let id = self.next_structure_id();
        self.structures.push(DataStructure {
            id,
            name: name.to_string(),
            container: container.to_string(),
            root: false,
            fields: Vec::new(),
        });
        if let Some(c) = self.containers.iter_mut().find(|c| c.name == container) {
            c.data_structures.push(id);
        }
        id
    }

    pub fn joins(&self) -> impl Iterator<Item = &DatabaseOperation> {
        self.operations.iter().filter(|o| o.is_join)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("dos model serializes")
    }
}

/// Singular form used for structure and entity names: one trailing `s`
/// stripped.
pub fn singular(name: &str) -> &str {
    match name.strip_suffix('s') {
        Some(s) if !s.is_empty() => s,
        _ => name,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractOptions {
    /// Let Insert/Update payload literals contribute fields.
    pub payload_structures: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            payload_structures: true,
        }
    }
}

/// Full extraction: operations, dependencies, structures, references.
pub fn extract_dos(cfg: &ControlFlowModel, code: &CodeModel, profile: &ApiProfile, opts: ExtractOptions) -> Result<DosModel> {
    let nodes = find_db_call_nodes(cfg, code, profile)?;
    let mut dos = backward_traverse(&nodes, cfg, code, profile)?;
    forward_traverse(&mut dos, cfg, code, opts);
    create_references(&mut dos, code);
    dedup_structures(&mut dos);
    Ok(dos)
}
