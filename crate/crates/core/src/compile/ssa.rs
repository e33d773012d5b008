//! Successor state axioms assembled from effect axioms.

use serde::Serialize;

use crate::logic::{substitute, Binding, Formula, Term, Var};

use super::effects::{EffectAxiom, EffectTarget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SsaKind {
    Relational,
    Process,
    Functional,
    /// `F_init` of the named temporal fluent.
    Init,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ssa {
    pub fluent: String,
    pub kind: SsaKind,
    /// For `Init`, the temporal fluent whose value carries over by default.
    pub temporal: Option<String>,
    pub args: Vec<Var>,
    /// Add effects for relational fluents, value effects for functional
    /// ones.
    pub positive: Vec<EffectAxiom>,
    pub negative: Vec<EffectAxiom>,
}

pub fn arg_vars(n: usize) -> Vec<Var> {
    (1..=n).map(|i| Var::object(format!("x{i}"))).collect()
}

impl Ssa {
    pub fn new(fluent: impl Into<String>, kind: SsaKind, arity: usize) -> Self {
        Ssa { fluent: fluent.into(), kind, temporal: None, args: arg_vars(arity), positive: Vec::new(), negative: Vec::new() }
    }

    pub fn push(&mut self, e: EffectAxiom) {
        match e.target {
            EffectTarget::Del { .. } => self.negative.push(e),
            _ => self.positive.push(e),
        }
    }

    fn args_with(&self, sit: Term) -> Vec<Term> {
        self.args.iter().map(Var::term).chain([sit]).collect()
    }

    /// The axiom with `x1..xn`, `a`, `s` and `y` free (implicitly
    /// universally quantified).
    pub fn formula(&self) -> Formula {
        let a = Var::action("a");
        let s = Var::situation("s");
        let next = Term::do_(a.term(), s.term());
        let xs = &self.args;
        match self.kind {
            SsaKind::Relational | SsaKind::Process => {
                let lhs = Formula::Fluent { symbol: self.fluent.clone(), args: xs.iter().map(Var::term).collect(), situation: next };
                let now = Formula::Fluent { symbol: self.fluent.clone(), args: xs.iter().map(Var::term).collect(), situation: s.term() };
                let frame = if self.negative.is_empty() {
                    now
                } else {
                    let del = Formula::or(self.negative.iter().map(|e| e.ssa_case(xs, &a, None)));
                    Formula::and([now, Formula::not(del)])
                };
                let rhs = Formula::or(self.positive.iter().map(|e| e.ssa_case(xs, &a, None)).chain([frame]));
                Formula::iff(lhs, rhs)
            }
            SsaKind::Functional | SsaKind::Init => {
                let y = Var::real("y");
                let lhs = Formula::eq(Term::real_app(self.fluent.clone(), self.args_with(next)), y.term());
                let keep = |v: Term| match (&self.kind, &self.temporal) {
                    (SsaKind::Init, Some(f)) => Formula::TemporalEq {
                        symbol: f.clone(),
                        args: xs.iter().map(Var::term).collect(),
                        time: Term::time_of(a.term()),
                        situation: s.term(),
                        value: v,
                    },
                    _ => Formula::eq(v, Term::real_app(self.fluent.clone(), self.args_with(s.term()))),
                };
                let cases: Vec<Formula> = self.positive.iter().map(|e| e.ssa_case(xs, &a, Some(&y.term()))).collect();
                let rhs = if cases.is_empty() {
                    keep(y.term())
                } else {
                    let y2 = Var::real("y0");
                    let binding: Binding = [(y.clone(), y2.term())].into_iter().collect();
                    let other =
                        substitute(&Formula::or(cases.clone()), &binding).expect("real variable renamed to real variable");
                    let frame = Formula::and([keep(y.term()), Formula::not(Formula::exists(vec![y2], other))]);
                    Formula::or(cases.into_iter().chain([frame]))
                };
                Formula::iff(lhs, rhs)
            }
        }
    }
}
