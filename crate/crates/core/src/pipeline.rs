//! The whole analysis over one code model.

use crate::cfg::{build_cfg, ControlFlowModel};
use crate::code::CodeModel;
use crate::dos::{extract_dos, DosModel, ExtractOptions};
use crate::error::Result;
use crate::profile::ApiProfile;
use crate::refactor::{build_plans, JoinRemovalPlan};
use crate::uschema::{to_uschema, USchemaModel};

#[derive(Debug, Clone)]
pub struct Analysis {
    pub code: CodeModel,
    pub cfg: ControlFlowModel,
    pub dos: DosModel,
    pub schema: USchemaModel,
    pub plans: Vec<JoinRemovalPlan>,
}

impl Analysis {
    /// Distinct operations with at least one plan.
    pub fn join_candidates(&self) -> usize {
        let mut ops: Vec<usize> = self.plans.iter().map(|p| p.join_op).collect();
        ops.dedup();
        ops.len()
    }
}

pub fn analyze(code: CodeModel, profile: &ApiProfile, opts: ExtractOptions, schema_name: &str) -> Result<Analysis> {
    let cfg = build_cfg(&code)?;
    let dos = extract_dos(&cfg, &code, profile, opts)?;
    let schema = to_uschema(&dos, schema_name)?;
    let plans = build_plans(&code, &cfg, &dos);
    Ok(Analysis {
        code,
        cfg,
        dos,
        schema,
        plans,
    })
}
