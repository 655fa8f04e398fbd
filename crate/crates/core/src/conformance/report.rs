use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub status: Status,
    pub detail: String,
    /// Set exactly when `status` is `skip`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
}

impl CheckResult {
    pub fn pass(id: &str, detail: impl Into<String>) -> Self {
        Self {
            check_id: id.to_string(),
            status: Status::Pass,
            detail: detail.into(),
            skip_reason: None,
        }
    }

    pub fn fail(id: &str, detail: impl Into<String>) -> Self {
        Self {
            check_id: id.to_string(),
            status: Status::Fail,
            detail: detail.into(),
            skip_reason: None,
        }
    }

    pub fn skip(id: &str, reason: impl Into<String>) -> Self {
        Self {
            check_id: id.to_string(),
            status: Status::Skip,
            detail: String::new(),
            skip_reason: Some(reason.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub kind_name: String,
    pub scitype: String,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
}

impl ConformanceReport {
    pub fn new(kind_name: &str, scitype: &str, results: Vec<CheckResult>) -> Self {
        let mut summary = Summary::default();
        for r in &results {
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skip => summary.skip += 1,
            }
        }
        Self {
            kind_name: kind_name.to_string(),
            scitype: scitype.to_string(),
            results,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.results.iter().filter(|r| r.status == Status::Fail).collect()
    }

    pub fn failed_ids(&self) -> Vec<&str> {
        self.failures().into_iter().map(|r| r.check_id.as_str()).collect()
    }

    pub fn result(&self, check_id: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.check_id == check_id)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Fixed-width table: one line per check, then the counts.
    pub fn to_text(&self) -> String {
        let width = self
            .results
            .iter()
            .map(|r| r.check_id.len())
            .max()
            .unwrap_or(0)
            .max("check".len());
        let mut out = String::new();
        let _ = writeln!(out, "{} ({})", self.kind_name, self.scitype);
        let _ = writeln!(out, "  {:<width$}  {:<6}  detail", "check", "status");
        for r in &self.results {
            let detail = match (&r.skip_reason, r.detail.is_empty()) {
                (Some(reason), _) => reason.as_str(),
                (None, false) => r.detail.as_str(),
                (None, true) => "",
            };
            let _ = writeln!(out, "  {:<width$}  {:<6}  {}", r.check_id, r.status.as_str(), detail);
        }
        let _ = writeln!(
            out,
            "  {} passed, {} failed, {} skipped",
            self.summary.pass, self.summary.fail, self.summary.skip
        );
        out
    }
}

/// Renders several reports as one JSON array.
pub fn reports_to_json(reports: &[ConformanceReport]) -> Result<String> {
    serde_json::to_string_pretty(reports).map_err(|e| Error::Serialization(e.to_string()))
}
