//! Configuration and report documents shared by the CLI and the verification
//! suite. Serialized as JSON; exact values travel as coefficient-vector
//! strings so exactness survives serialization.

use serde::{Deserialize, Serialize};

use crate::whittaker::{CheckOutcome, ScatteringReport};

/// Which quadratic character θ to analyze.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSelector {
    Unramified,
    RamifiedPlus,
    RamifiedMinus,
}

/// Which isotropic pairs to run over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPolicy {
    Standard,
    All,
    Index(usize),
}

/// An element of F* as "valuation:unit-residue".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElemSpec {
    pub valuation: i64,
    pub unit: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub p: u64,
    #[serde(default = "default_f")]
    pub f: usize,
    pub n: u64,
    #[serde(default)]
    pub modulus_poly: Option<Vec<u64>>,
    #[serde(default = "default_theta")]
    pub theta: ThetaSelector,
    #[serde(default)]
    pub psi_conductor: i64,
    #[serde(default)]
    pub psi_twist: Option<i64>,
    #[serde(default = "default_c_list")]
    pub c_list: Vec<ElemSpec>,
    #[serde(default = "default_pair_policy")]
    pub pair_policy: PairPolicy,
}

fn default_f() -> usize {
    1
}
fn default_theta() -> ThetaSelector {
    ThetaSelector::Unramified
}
fn default_c_list() -> Vec<ElemSpec> {
    vec![ElemSpec { valuation: 0, unit: 1 }]
}
fn default_pair_policy() -> PairPolicy {
    PairPolicy::Standard
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub config: AnalysisConfig,
    #[serde(default)]
    pub reports: Vec<ScatteringReport>,
    #[serde(default)]
    pub suite: Vec<CheckOutcome>,
    pub all_passed: bool,
}
