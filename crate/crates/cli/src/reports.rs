//! Report types written by the commands. Every report is plain data with a
//! derived JSON schema; `subtag schema <kind>` prints it.

use schemars::{schema_for, JsonSchema};
use serde::{Deserialize, Serialize};
use subtag::adversary::AttackReport;
use subtag::params::ParamsFile;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct NodeReport {
    pub name: String,
    pub role: String,
    pub verifier: Option<usize>,
    pub received: usize,
    /// Rank of the node's incoming global encoding vectors.
    pub kernel_rank: usize,
    pub accepted: Option<usize>,
    pub rejected: Option<usize>,
    /// Dimension of the payload span a sink decoded.
    pub decoded_dimension: Option<usize>,
    pub recovered: Option<bool>,
    pub rank_deficient: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SimulateReport {
    pub seed: u64,
    pub topology: String,
    pub n: usize,
    pub injected_at: Option<String>,
    pub nodes: Vec<NodeReport>,
    pub all_verifiers_accept: bool,
    pub all_sinks_recover: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AttackCampaign {
    pub seed: u64,
    pub reports: Vec<AttackReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TargetAnalysis {
    pub target: usize,
    /// Minimal codewords of the dual code with a 1 at the target.
    pub minimal_codewords: Vec<Vec<u32>>,
    /// Minimal coalitions able to forge against the target, 1-based.
    pub access_structure: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum EcClass {
    NotForgeable,
    ForgeableAgainstExactly,
    ForgeableAgainstAll,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EcRow {
    pub coalition: Vec<usize>,
    pub target: usize,
    pub class: EcClass,
    /// The single point a size n-k-1 coalition can forge against.
    pub point: Option<[u32; 2]>,
    /// Whether the remaining points of D sum to O.
    pub rest_sums_to_zero: bool,
    /// The span test on the residue code.
    pub oracle: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EcTable {
    pub n: usize,
    pub k: usize,
    pub rows: Vec<EcRow>,
    pub all_agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeReport {
    pub length: usize,
    pub dimension: usize,
    pub min_distance: usize,
    pub dual_distance: usize,
    pub mds: bool,
    /// k when every target's access structure is all k-subsets of the others.
    pub threshold: Option<usize>,
    pub targets: Vec<TargetAnalysis>,
    pub ec: Option<EcTable>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EcCodeReport {
    pub q: u32,
    pub l: u32,
    pub a: u32,
    pub b: u32,
    /// Affine points in enumeration order; O is not listed.
    pub curve_points: Vec<[u32; 2]>,
    pub group_order: usize,
    pub evaluation_points: Vec<[u32; 2]>,
    pub deg: usize,
    pub evaluation_generator: Vec<Vec<u32>>,
    pub residue_generator: Vec<Vec<u32>>,
    pub residue_distance: usize,
    pub residue_dual_distance: usize,
    pub table: EcTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SchemaKind {
    Params,
    Simulate,
    Attack,
    Analyze,
    EcCode,
}

pub fn schema(kind: SchemaKind) -> serde_json::Value {
    let s = match kind {
        SchemaKind::Params => schema_for!(ParamsFile),
        SchemaKind::Simulate => schema_for!(SimulateReport),
        SchemaKind::Attack => schema_for!(AttackCampaign),
        SchemaKind::Analyze => schema_for!(AnalyzeReport),
        SchemaKind::EcCode => schema_for!(EcCodeReport),
    };
    s.to_value()
}
