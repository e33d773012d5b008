//! Timestamped plans.
//!
//! One step per line, in either of these forms:
//!
//! ```text
//! 2 accelerate
//! 2.5 move(truck1,depot)
//! 3: (move truck1 depot)
//! ```
//!
//! Blank lines and `;` comments are ignored. Times must be nonnegative and
//! nondecreasing. Names are case-insensitive.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanStep {
    pub time: f64,
    /// PDDL schema name, lowercased.
    pub action: String,
    pub args: Vec<String>,
    /// 1-based line in the plan file.
    pub line: usize,
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.time, self.action)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: time {time} is negative")]
    Negative { line: usize, time: f64 },
    #[error("line {line}: time {time} precedes the previous step at {previous}")]
    Decreasing { line: usize, time: f64, previous: f64 },
}

pub fn parse_plan(text: &str) -> Result<Plan, PlanError> {
    let mut steps: Vec<PlanStep> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split(';').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let step = parse_step(body, line)?;
        if step.time < 0.0 {
            return Err(PlanError::Negative { line, time: step.time });
        }
        if let Some(prev) = steps.last() {
            if step.time < prev.time {
                return Err(PlanError::Decreasing { line, time: step.time, previous: prev.time });
            }
        }
        steps.push(step);
    }
    Ok(Plan { steps })
}

fn parse_step(body: &str, line: usize) -> Result<PlanStep, PlanError> {
    let syntax = |message: String| PlanError::Syntax { line, message };
    let split = body.find(|c: char| c.is_whitespace() || c == ':' || c == '(').unwrap_or(body.len());
    let (time_text, rest) = body.split_at(split);
    let time: f64 = time_text.parse().map_err(|_| syntax(format!("expected a time, found {time_text:?}")))?;
    if !time.is_finite() {
        return Err(syntax(format!("time {time_text} is not finite")));
    }
    let rest = rest.trim_start();
    let rest = rest.strip_prefix(':').unwrap_or(rest).trim();
    let (action, args) = if let Some(inner) = rest.strip_prefix('(') {
        // (name a b)
        let inner = inner.strip_suffix(')').ok_or_else(|| syntax("unclosed '('".into()))?;
        let mut words = inner.split_whitespace();
        let name = words.next().ok_or_else(|| syntax("empty action".into()))?;
        (name.to_string(), words.map(str::to_string).collect())
    } else if let Some(open) = rest.find('(') {
        // name(a,b)
        let inner = rest[open + 1..].strip_suffix(')').ok_or_else(|| syntax("unclosed '('".into()))?;
        let args = inner.split(',').map(str::trim).filter(|a| !a.is_empty()).map(str::to_string).collect();
        (rest[..open].trim().to_string(), args)
    } else {
        let mut words = rest.split_whitespace();
        let name = words.next().ok_or_else(|| syntax("missing action name".into()))?;
        if let Some(extra) = words.next() {
            return Err(syntax(format!("unexpected {extra:?} after the action name")));
        }
        (name.to_string(), Vec::new())
    };
    if action.is_empty() || action.contains(char::is_whitespace) {
        return Err(syntax(format!("bad action name {action:?}")));
    }
    let lower = |s: String| s.to_ascii_lowercase();
    Ok(PlanStep { time, action: lower(action), args: args.into_iter().map(lower).collect(), line })
}
