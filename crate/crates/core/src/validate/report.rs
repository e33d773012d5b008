use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Valid,
    GoalUnreached,
    PreconditionFailure,
    NaturalActionViolation,
    NumericError,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::GoalUnreached => "goal-unreached",
            Verdict::PreconditionFailure => "precondition-failure",
            Verdict::NaturalActionViolation => "natural-action-violation",
            Verdict::NumericError => "numeric-error",
        }
    }
}

/// One action of the executed situation, in order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExecutedAction {
    pub time: f64,
    /// SC action symbol.
    pub symbol: String,
    /// Name in the planning files.
    pub pddl: String,
    pub args: Vec<String>,
    pub natural: bool,
    /// Index of the plan step that named this action, if any.
    pub step: Option<usize>,
}

impl ExecutedAction {
    /// `(symbol arg.. time)`.
    pub fn term(&self) -> String {
        let mut out = format!("({}", self.symbol);
        for a in &self.args {
            out.push(' ');
            out.push_str(a);
        }
        let _ = write!(out, " {})", self.time);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    /// Index of the offending plan step; `None` when the failure happened
    /// after the last step.
    pub step: Option<usize>,
    /// Line of that step in the plan file.
    pub line: Option<usize>,
    pub time: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub verdict: Verdict,
    pub failure: Option<Failure>,
    /// Earliest time the goal holds, for valid plans.
    pub goal_time: Option<f64>,
    pub actions: Vec<ExecutedAction>,
    /// Start of the last situation reached.
    pub final_start: f64,
    pub notes: Vec<String>,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = format!("verdict: {}\n", self.verdict.label());
        if let Some(t) = self.goal_time {
            let _ = writeln!(out, "goal reached at t = {t}");
        }
        if let Some(f) = &self.failure {
            match (f.step, f.line) {
                (Some(i), Some(line)) => {
                    let _ = writeln!(out, "failed at step {} (line {line}), t = {}: {}", i + 1, f.time, f.message);
                }
                _ => {
                    let _ = writeln!(out, "failed at t = {}: {}", f.time, f.message);
                }
            }
        }
        out.push_str("executed:\n");
        if self.actions.is_empty() {
            out.push_str("  (none)\n");
        }
        for a in &self.actions {
            let origin = match (a.natural, a.step) {
                (true, Some(i)) => format!("natural, claimed by step {}", i + 1),
                (true, None) => "natural".to_string(),
                (false, Some(i)) => format!("step {}", i + 1),
                (false, None) => "agent".to_string(),
            };
            let _ = writeln!(out, "  {} {}  [{origin}]", a.time, a.term());
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}
