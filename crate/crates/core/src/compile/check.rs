//! Well-definedness diagnostics: what the construction guarantees, what the
//! validator asserts while running, and what may fail.

use serde::Serialize;

use crate::logic::{ArithOp, Formula, Term};

use super::effects::{EffectAxiom, EffectTarget};
use super::sea::{Sea, SeaForm};
use super::ssa::SsaKind;
use super::HybridBat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingTag {
    Guaranteed,
    RuntimeChecked,
    PotentialViolation,
}

impl FindingTag {
    pub fn label(self) -> &'static str {
        match self {
            FindingTag::Guaranteed => "guaranteed",
            FindingTag::RuntimeChecked => "runtime-checked",
            FindingTag::PotentialViolation => "potential-violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub tag: FindingTag,
    /// Fluent or action the finding is about.
    pub subject: String,
    pub message: String,
}

fn finding(tag: FindingTag, subject: &str, message: String) -> Finding {
    Finding { tag, subject: subject.to_string(), message }
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(xs) => xs.iter().flat_map(conjuncts).collect(),
        f => vec![f],
    }
}

fn complementary(a: &Formula, b: &Formula) -> bool {
    match (a, b) {
        (Formula::Not(x), y) | (y, Formula::Not(x)) if **x == *y => true,
        (Formula::Compare(o1, l1, r1), Formula::Compare(o2, l2, r2)) => {
            l1 == l2 && r1 == r2 && o1.complement() == Some(*o2)
        }
        (Formula::Fluent { symbol: f1, args: a1, situation: s1 }, Formula::Fluent { symbol: f2, args: a2, situation: s2 }) => {
            f1 == f2 && s1 == s2 && distinct_constants(a1, a2)
        }
        _ => false,
    }
}

/// Some position holds two different object constants, so the unique
/// names axioms separate the tuples.
fn distinct_constants(a: &[Term], b: &[Term]) -> bool {
    a.iter().zip(b).any(|(x, y)| matches!((x, y), (Term::Const(p, _), Term::Const(q, _)) if p != q))
}

/// Syntactic sufficient condition for `¬(a ∧ b)`.
fn exclusive(a: &Formula, b: &Formula) -> bool {
    let (ca, cb) = (conjuncts(a), conjuncts(b));
    ca.iter().any(|x| cb.iter().any(|y| complementary(x, y)))
}

fn divisions<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
    match t {
        Term::Arith(op, args) => {
            if *op == ArithOp::Div {
                if let Some(d) = args.get(1) {
                    out.push(d);
                }
            }
            args.iter().for_each(|a| divisions(a, out));
        }
        Term::App { args, .. } | Term::Action { args, .. } => args.iter().for_each(|a| divisions(a, out)),
        Term::Integral { integrand, lower, upper, .. } => {
            divisions(integrand, out);
            divisions(lower, out);
            divisions(upper, out);
        }
        _ => {}
    }
}

fn check_divisions(subject: &str, what: &str, t: &Term, out: &mut Vec<Finding>) {
    let mut ds = Vec::new();
    divisions(t, &mut ds);
    for d in ds {
        match d {
            Term::Real(x) if *x == 0.0 => out.push(finding(
                FindingTag::PotentialViolation,
                subject,
                format!("{what} {t} divides by the literal 0"),
            )),
            Term::Real(_) => {}
            d => out.push(finding(
                FindingTag::RuntimeChecked,
                subject,
                format!("{what} {t} divides by {d}, which may be 0; evaluation reports it as a numeric error"),
            )),
        }
    }
}

/// Contexts of an evolution axiom are pairwise exclusive and each yields
/// one value.
pub fn check_sea(sea: &Sea) -> Vec<Finding> {
    let mut out = Vec::new();
    match &sea.form {
        SeaForm::PowerSet(entries) => out.push(finding(
            FindingTag::Guaranteed,
            &sea.fluent,
            format!(
                "the {} contexts of {} are pairwise exclusive: each fixes every one of the {} process atoms",
                sea.disjunct_count(),
                sea.fluent,
                entries.len()
            ),
        )),
        SeaForm::Explicit(entries) => {
            let before = out.len();
            for (i, a) in entries.iter().enumerate() {
                for b in &entries[i + 1..] {
                    if a.rate != b.rate && !exclusive(&a.context, &b.context) {
                        out.push(finding(
                            FindingTag::PotentialViolation,
                            &sea.fluent,
                            format!(
                                "contexts {} and {} of {} may hold together with different rates {} and {}",
                                a.context, b.context, sea.fluent, a.rate, b.rate
                            ),
                        ));
                    }
                }
            }
            if out.len() == before {
                out.push(finding(
                    FindingTag::Guaranteed,
                    &sea.fluent,
                    format!("the contexts of {} are pairwise exclusive or agree on the rate", sea.fluent),
                ));
            }
        }
    }
    for e in sea.entries() {
        check_divisions(&sea.fluent, "rate", &e.rate, &mut out);
    }
    out
}

fn value(e: &EffectAxiom) -> Option<&Term> {
    match &e.target {
        EffectTarget::Value { value, .. } => Some(value),
        _ => None,
    }
}

/// Two value effects of the same fluent that may fire together with
/// different values.
fn value_conflict(a: &EffectAxiom, b: &EffectAxiom) -> bool {
    a.action == b.action
        && value(a) != value(b)
        && !distinct_constants(a.target.args(), b.target.args())
        && !exclusive(&a.condition, &b.condition)
}

/// A `forall` variable that the value depends on but the target does not
/// mention gives one value per binding.
fn self_conflict(e: &EffectAxiom) -> bool {
    let Some(v) = value(e) else { return false };
    let target_vars = e.target.args().iter().flat_map(crate::logic::term_free_vars).collect::<Vec<_>>();
    let value_vars = crate::logic::term_free_vars(v);
    e.qvars.iter().any(|q| !target_vars.contains(q) && value_vars.contains(q))
}

pub fn check_well_defined(bat: &HybridBat) -> Vec<Finding> {
    let mut out = Vec::new();
    for sea in &bat.seas {
        out.extend(check_sea(sea));
    }
    for ssa in &bat.ssas {
        let before = out.len();
        match ssa.kind {
            SsaKind::Functional | SsaKind::Init => {
                for (i, a) in ssa.positive.iter().enumerate() {
                    if self_conflict(a) {
                        out.push(finding(
                            FindingTag::PotentialViolation,
                            &ssa.fluent,
                            format!("{} may give {} one value per binding of its quantified variables", a.action, ssa.fluent),
                        ));
                    }
                    for b in &ssa.positive[i + 1..] {
                        if value_conflict(a, b) {
                            out.push(finding(
                                FindingTag::PotentialViolation,
                                &ssa.fluent,
                                format!(
                                    "{} may set {} to both {} and {} when {} and {} hold together",
                                    a.action,
                                    ssa.fluent,
                                    value(a).unwrap(),
                                    value(b).unwrap(),
                                    a.condition,
                                    b.condition
                                ),
                            ));
                        }
                    }
                    check_divisions(&ssa.fluent, "effect value", value(a).unwrap(), &mut out);
                }
                if out[before..].iter().all(|f| f.tag != FindingTag::PotentialViolation) && !ssa.positive.is_empty() {
                    out.push(finding(
                        FindingTag::Guaranteed,
                        &ssa.fluent,
                        format!("every action gives {} at most one value", ssa.fluent),
                    ));
                }
            }
            SsaKind::Relational => {
                for a in &ssa.positive {
                    for b in ssa.negative.iter().filter(|b| b.action == a.action) {
                        if !distinct_constants(a.target.args(), b.target.args()) && !exclusive(&a.condition, &b.condition) {
                            out.push(finding(
                                FindingTag::PotentialViolation,
                                &ssa.fluent,
                                format!("{} may both add and delete {}; the add wins", a.action, ssa.fluent),
                            ));
                        }
                    }
                }
            }
            SsaKind::Process => {}
        }
    }
    for sea in &bat.seas {
        out.push(finding(
            FindingTag::RuntimeChecked,
            &sea.init,
            format!("{} agrees with {} at the start of every situation; asserted after each transition", sea.init, sea.fluent),
        ));
    }
    out
}
