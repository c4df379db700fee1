//! Machine-readable outcomes for consistency suites.
//!
//! A report carries everything needed to reproduce a run: the suite
//! name, the seed, the tolerances in force, and for every failing
//! instance a payload that parses as a standalone instance file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use torus_git::{RepSpec, TorusPoint};

/// Result of running one suite over a seeded family. `passed` is
/// derived state: it holds exactly when `failures` is empty, and is
/// recomputed on deserialization so a hand-edited file cannot carry a
/// stale flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawReport")]
pub struct CheckReport {
    pub check: String,
    pub seed: u64,
    pub instances_run: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub failures: Vec<CheckFailure>,
    pub passed: bool,
}

impl CheckReport {
    pub fn new(
        check: &str,
        seed: u64,
        instances_run: usize,
        tolerance: f64,
        max_deviation: f64,
        mut failures: Vec<CheckFailure>,
    ) -> Self {
        failures.sort_by_key(|f| f.index);
        let passed = failures.is_empty();
        CheckReport {
            check: check.to_string(),
            seed,
            instances_run,
            tolerance,
            max_deviation,
            failures,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
struct RawReport {
    check: String,
    seed: u64,
    instances_run: usize,
    tolerance: f64,
    max_deviation: f64,
    failures: Vec<CheckFailure>,
    #[serde(default)]
    passed: bool,
}

impl From<RawReport> for CheckReport {
    fn from(raw: RawReport) -> Self {
        CheckReport::new(
            &raw.check,
            raw.seed,
            raw.instances_run,
            raw.tolerance,
            raw.max_deviation,
            raw.failures,
        )
    }
}

/// One failing instance: its index in the family, a human-readable
/// account of what disagreed, and the instance itself when one was
/// constructed before the failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckFailure {
    pub index: usize,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<InstancePayload>,
}

impl CheckFailure {
    pub fn new(index: usize, detail: String, payload: Option<InstancePayload>) -> Self {
        CheckFailure {
            index,
            detail,
            payload,
        }
    }
}

/// Standalone re-run payload. The shape matches the CLI instance file:
/// a version tag, the representation, an optional group declaration,
/// and named points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstancePayload {
    pub version: u32,
    pub rep: RepSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<PayloadGroup>,
    pub points: BTreeMap<String, TorusPoint>,
}

impl InstancePayload {
    pub fn torus(rep: &RepSpec, x: &TorusPoint) -> Self {
        let mut points = BTreeMap::new();
        points.insert("x".to_string(), x.clone());
        InstancePayload {
            version: 1,
            rep: rep.clone(),
            group: None,
            points,
        }
    }

    pub fn sl2(rep: &RepSpec, e_blocks: &[usize], v_blocks: &[usize], x: &TorusPoint) -> Self {
        let mut points = BTreeMap::new();
        points.insert("x".to_string(), x.clone());
        InstancePayload {
            version: 1,
            rep: rep.clone(),
            group: Some(PayloadGroup::Sl2 {
                e_blocks: e_blocks.to_vec(),
                v_blocks: v_blocks.to_vec(),
            }),
            points,
        }
    }
}

/// Group declaration inside a payload, tagged by kind so the file
/// format stays open to other groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PayloadGroup {
    Sl2 {
        e_blocks: Vec<usize>,
        v_blocks: Vec<usize>,
    },
}
