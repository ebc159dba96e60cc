//! Run reports, their normalized form and the plain-text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::scenario::{Pipeline, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pipeline: String,
    pub check: String,
    pub status: Status,
    pub value: String,
    /// The bound the value was checked against.
    pub bound: String,
}

impl Verdict {
    pub fn new(pipeline: Pipeline, check: &str, passed: bool, value: impl ToString, bound: impl ToString) -> Self {
        Verdict {
            pipeline: pipeline.name().into(),
            check: check.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            value: value.to_string(),
            bound: bound.to_string(),
        }
    }

    pub fn skipped(pipeline: Pipeline, check: &str, reason: impl ToString) -> Self {
        Verdict {
            pipeline: pipeline.name().into(),
            check: check.into(),
            status: Status::Skipped,
            value: reason.to_string(),
            bound: "-".into(),
        }
    }
}

/// Wall-clock data; the only part of a report allowed to differ between replays.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
    pub pipelines_ms: BTreeMap<String, f64>,
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub scenario: Scenario,
    pub seed: Option<u64>,
    pub pipelines: Vec<Pipeline>,
    pub results: BTreeMap<String, serde_json::Value>,
    pub verdicts: Vec<Verdict>,
    pub counters: BTreeMap<String, u64>,
    pub all_passed: bool,
    pub timing: Timing,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the timing block removed.
    pub fn normalized(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("plain data")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {} (seed {})", self.scenario.name, self.seed.map_or("-".into(), |s| s.to_string()));
        let w = self.verdicts.iter().map(|v| v.pipeline.len() + v.check.len() + 1).max().unwrap_or(0);
        for v in &self.verdicts {
            let tag = match v.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            let name = format!("{}/{}", v.pipeline, v.check);
            let _ = writeln!(out, "  {tag}  {name:<w$}  {}  (bound {})", v.value, v.bound);
        }
        for (k, c) in &self.counters {
            let _ = writeln!(out, "  count  {k} = {c}");
        }
        let _ = writeln!(out, "{}", if self.all_passed { "all verdicts pass" } else { "some verdicts fail" });
        out
    }
}
