//! Check reports and their JSON/CSV forms.

use std::fmt::Write as _;

use serde::Serialize;

use crate::space::BallWitness;

/// Relative refinement change below which a check counts as stable.
pub const STABILITY_THRESHOLD: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Stable,
    Unstable,
    FailedHypothesis,
    Vacuous,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Stable => "stable",
            Status::Unstable => "unstable",
            Status::FailedHypothesis => "failed-hypothesis",
            Status::Vacuous => "vacuous",
        }
    }
}

/// One hypothesis gate with its measured value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub value: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Where the empirical constant is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// The same check re-run at a refined resolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementRun {
    /// `eps` (ε-grid doubled) or `space` (points doubled).
    pub kind: String,
    pub points: Option<usize>,
    pub eps_nodes: Option<usize>,
    pub empirical_c: Option<f64>,
    pub relative_change: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub check_id: String,
    pub description: String,
    pub points: usize,
    pub eps_nodes: Option<usize>,
    pub empirical_c: Option<f64>,
    pub witness: Witness,
    pub refinement_delta: Option<f64>,
    pub refinement: Vec<RefinementRun>,
    pub status: Status,
    pub hypotheses: Vec<Hypothesis>,
    /// Exact assertions that failed; any entry makes the suite fail.
    pub exact_failures: Vec<String>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub functions: Vec<FunctionRecord>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.exact_failures.is_empty() && matches!(self.status, Status::Stable | Status::Vacuous)
    }
}

/// Report array as pretty JSON with a trailing newline.
pub fn to_json(reports: &[InequalityReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.11e}"),
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

/// check_id, empirical_C, delta, status, one row per report.
pub fn to_csv(reports: &[InequalityReport]) -> String {
    let mut s = String::from("check_id,empirical_C,delta,status\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.check_id,
            csv_num(r.empirical_c),
            csv_num(r.refinement_delta),
            r.status.as_str()
        );
    }
    s
}

/// 0 when every check passed; 1 on an exact-assertion failure; 3 under
/// `strict` when a hypothesis gate failed; 1 for any other non-passing check.
pub fn exit_code(reports: &[InequalityReport], strict: bool) -> i32 {
    if reports.iter().any(|r| !r.exact_failures.is_empty()) {
        return 1;
    }
    if strict && reports.iter().any(|r| r.status == Status::FailedHypothesis) {
        return 3;
    }
    if reports.iter().all(InequalityReport::passed) {
        0
    } else {
        1
    }
}
