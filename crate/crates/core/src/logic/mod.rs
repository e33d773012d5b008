//! Sorted situation-calculus terms and formulas.
//!
//! The AST is deliberately flat: atoms carry their situation and time
//! arguments explicitly, so uniformity and sort checks are structural.

mod canon;
mod sorts;
mod subst;
mod uniform;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use canon::{canonical, is_reserved, parse_formula, serialize, serialize_formula};
pub use sorts::{check_sorts, Signature, SymbolClass, SymbolInfo};
pub use subst::{free_vars, substitute, substitute_term, term_free_vars, Binding};
pub use uniform::check_uniform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sort {
    Object,
    /// Real numbers; also the sort of time points.
    Real,
    Action,
    Situation,
}

impl Sort {
    /// Prefix used for canonically renamed bound variables of this sort.
    pub fn prefix(self) -> &'static str {
        match self {
            Sort::Object => "x",
            Sort::Real => "t",
            Sort::Action => "a",
            Sort::Situation => "s",
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sort::Object => "Object",
            Sort::Real => "Real",
            Sort::Action => "Action",
            Sort::Situation => "Situation",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Var { name: name.into(), sort }
    }
    pub fn object(name: impl Into<String>) -> Self {
        Var::new(name, Sort::Object)
    }
    pub fn real(name: impl Into<String>) -> Self {
        Var::new(name, Sort::Real)
    }
    pub fn action(name: impl Into<String>) -> Self {
        Var::new(name, Sort::Action)
    }
    pub fn situation(name: impl Into<String>) -> Self {
        Var::new(name, Sort::Situation)
    }
    pub fn term(&self) -> Term {
        Term::Var(self.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub | ArithOp::Neg => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        Some(match s {
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            "=" => CmpOp::Eq,
            ">=" => CmpOp::Ge,
            ">" => CmpOp::Gt,
            _ => return None,
        })
    }

    /// The operator equivalent to the negated comparison, when one exists.
    pub fn complement(self) -> Option<CmpOp> {
        match self {
            CmpOp::Lt => Some(CmpOp::Ge),
            CmpOp::Le => Some(CmpOp::Gt),
            CmpOp::Ge => Some(CmpOp::Lt),
            CmpOp::Gt => Some(CmpOp::Le),
            CmpOp::Eq => None,
        }
    }

    pub fn holds(self, l: f64, r: f64) -> bool {
        match self {
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Eq => l == r,
            CmpOp::Ge => l >= r,
            CmpOp::Gt => l > r,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Var(Var),
    /// A rigid constant; objects are the only constants the compiler emits.
    Const(String, Sort),
    Real(f64),
    /// Function application. Situation and time arguments, when present,
    /// are the trailing elements of `args`.
    App { symbol: String, args: Vec<Term>, sort: Sort },
    Action { symbol: String, args: Vec<Term>, time: Box<Term> },
    Do(Box<Term>, Box<Term>),
    S0,
    Start(Box<Term>),
    TimeOf(Box<Term>),
    Integral { integrand: Box<Term>, var: Var, lower: Box<Term>, upper: Box<Term> },
    Arith(ArithOp, Vec<Term>),
}

impl Term {
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort,
            Term::Const(_, s) => *s,
            Term::App { sort, .. } => *sort,
            Term::Action { .. } => Sort::Action,
            Term::Do(..) | Term::S0 => Sort::Situation,
            Term::Real(_) | Term::Start(_) | Term::TimeOf(_) | Term::Integral { .. } | Term::Arith(..) => {
                Sort::Real
            }
        }
    }

    pub fn object(name: impl Into<String>) -> Term {
        Term::Const(name.into(), Sort::Object)
    }

    pub fn real_app(symbol: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App { symbol: symbol.into(), args, sort: Sort::Real }
    }

    pub fn action(symbol: impl Into<String>, args: Vec<Term>, time: Term) -> Term {
        Term::Action { symbol: symbol.into(), args, time: Box::new(time) }
    }

    pub fn do_(action: Term, sit: Term) -> Term {
        Term::Do(Box::new(action), Box::new(sit))
    }

    pub fn start(sit: Term) -> Term {
        Term::Start(Box::new(sit))
    }

    pub fn time_of(action: Term) -> Term {
        Term::TimeOf(Box::new(action))
    }

    pub fn add(l: Term, r: Term) -> Term {
        Term::Arith(ArithOp::Add, vec![l, r])
    }

    pub fn sub(l: Term, r: Term) -> Term {
        Term::Arith(ArithOp::Sub, vec![l, r])
    }

    pub fn neg(t: Term) -> Term {
        Term::Arith(ArithOp::Neg, vec![t])
    }

    pub fn is_ground(&self) -> bool {
        term_free_vars(self).is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    /// Rigid predicate, including type predicates and `natural`.
    Pred { symbol: String, args: Vec<Term> },
    /// Relational fluent `F(args, situation)`.
    Fluent { symbol: String, args: Vec<Term>, situation: Term },
    /// `F(args, time, situation) = value` for a temporal fluent.
    TemporalEq { symbol: String, args: Vec<Term>, time: Term, situation: Term, value: Term },
    Compare(CmpOp, Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Vec<Var>, Box<Formula>),
    Forall(Vec<Var>, Box<Formula>),
    Poss(Term, Term),
}

impl Formula {
    pub fn truth() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn falsity() -> Formula {
        Formula::Or(Vec::new())
    }

    pub fn is_truth(&self) -> bool {
        matches!(self, Formula::And(v) if v.is_empty())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Compare(CmpOp::Eq, l, r)
    }

    /// Conjunction that drops `true` conjuncts and unwraps singletons.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::And(inner) if inner.is_empty() => {}
                p => out.push(p),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Formula::And(out)
        }
    }

    /// Disjunction that unwraps singletons.
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out: Vec<Formula> = parts.into_iter().collect();
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Formula::Or(out)
        }
    }

    /// Existential closure over `vars`, omitted when `vars` is empty.
    pub fn exists(vars: Vec<Var>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    pub fn forall(vars: Vec<Var>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Forall(vars, Box::new(body))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AxiomKind {
    Apa,
    Ssa,
    Sea,
    Una,
    TypeAxiom,
    DomainClosure,
    Init,
    NaturalDecl,
    TimeAxiom,
    GoalDef,
}

impl AxiomKind {
    pub fn label(self) -> &'static str {
        match self {
            AxiomKind::Apa => "apa",
            AxiomKind::Ssa => "ssa",
            AxiomKind::Sea => "sea",
            AxiomKind::Una => "una",
            AxiomKind::TypeAxiom => "type",
            AxiomKind::DomainClosure => "closure",
            AxiomKind::Init => "init",
            AxiomKind::NaturalDecl => "natural",
            AxiomKind::TimeAxiom => "time",
            AxiomKind::GoalDef => "goal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axiom {
    pub kind: AxiomKind,
    pub subject: String,
    pub formula: Formula,
}

impl Axiom {
    pub fn new(kind: AxiomKind, subject: impl Into<String>, formula: Formula) -> Self {
        Axiom { kind, subject: subject.into(), formula }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogicError {
    #[error("ill-sorted: {0}")]
    IllSorted(String),
    #[error("substitution for {var} has sort {found}, expected {expected}")]
    SortMismatch { var: String, expected: Sort, found: Sort },
    #[error("canonical text: {0}")]
    Parse(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&canon::print_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&canon::print_formula(self))
    }
}
