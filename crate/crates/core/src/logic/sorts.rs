use std::collections::BTreeMap;

use serde::Serialize;

use super::{ArithOp, CmpOp, Formula, LogicError, Sort, Term, Var};

/// What a symbol of the compiled vocabulary denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SymbolClass {
    TypePredicate,
    StaticPredicate,
    RelationalFluent,
    ProcessFluent,
    StaticFunction,
    FunctionalFluent,
    TemporalFluent,
    InitFluent,
    Action,
    NaturalAction,
    Object,
}

impl SymbolClass {
    pub fn is_predicate(self) -> bool {
        matches!(self, SymbolClass::TypePredicate | SymbolClass::StaticPredicate)
    }

    pub fn is_relational_fluent(self) -> bool {
        matches!(self, SymbolClass::RelationalFluent | SymbolClass::ProcessFluent)
    }

    pub fn is_function(self) -> bool {
        matches!(
            self,
            SymbolClass::StaticFunction
                | SymbolClass::FunctionalFluent
                | SymbolClass::TemporalFluent
                | SymbolClass::InitFluent
        )
    }

    pub fn is_action(self) -> bool {
        matches!(self, SymbolClass::Action | SymbolClass::NaturalAction)
    }

    /// Sorts of the full argument list for a symbol of this class with
    /// `arity` object arguments.
    pub fn arg_sorts(self, arity: usize) -> Vec<Sort> {
        let mut v = vec![Sort::Object; arity];
        match self {
            SymbolClass::RelationalFluent
            | SymbolClass::ProcessFluent
            | SymbolClass::FunctionalFluent
            | SymbolClass::InitFluent => v.push(Sort::Situation),
            SymbolClass::TemporalFluent => {
                v.push(Sort::Real);
                v.push(Sort::Situation);
            }
            SymbolClass::Action | SymbolClass::NaturalAction => v.push(Sort::Real),
            _ => {}
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymbolInfo {
    pub class: SymbolClass,
    /// Number of object arguments.
    pub arity: usize,
}

/// Vocabulary of a compiled theory, keyed by symbol name.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Signature {
    symbols: BTreeMap<String, SymbolInfo>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, class: SymbolClass, arity: usize) {
        self.symbols.insert(name.into(), SymbolInfo { class, arity });
    }

    pub fn get(&self, name: &str) -> Option<SymbolInfo> {
        self.symbols.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &SymbolInfo)> {
        self.symbols.iter()
    }
}

/// Structural sort check. Every variable name must be used with a single
/// sort throughout the formula.
pub fn check_sorts(phi: &Formula) -> Result<(), LogicError> {
    let mut seen = BTreeMap::new();
    formula(phi, &mut seen)
}

fn ill(msg: impl Into<String>) -> LogicError {
    LogicError::IllSorted(msg.into())
}

fn note_var(v: &Var, seen: &mut BTreeMap<String, Sort>) -> Result<(), LogicError> {
    match seen.insert(v.name.clone(), v.sort) {
        Some(prev) if prev != v.sort => Err(ill(format!("variable {} used as {} and {}", v.name, prev, v.sort))),
        _ => Ok(()),
    }
}

fn expect(t: &Term, sort: Sort, what: &str, seen: &mut BTreeMap<String, Sort>) -> Result<(), LogicError> {
    term(t, seen)?;
    if t.sort() != sort {
        return Err(ill(format!("{what} expects {sort}, found {} in {t}", t.sort())));
    }
    Ok(())
}

fn term(t: &Term, seen: &mut BTreeMap<String, Sort>) -> Result<(), LogicError> {
    match t {
        Term::Var(v) => note_var(v, seen),
        Term::Const(..) | Term::Real(_) | Term::S0 => Ok(()),
        Term::App { args, .. } => args.iter().try_for_each(|a| term(a, seen)),
        Term::Action { args, time, .. } => {
            for a in args {
                expect(a, Sort::Object, "action argument", seen)?;
            }
            expect(time, Sort::Real, "action time", seen)
        }
        Term::Do(a, s) => {
            expect(a, Sort::Action, "do", seen)?;
            expect(s, Sort::Situation, "do", seen)
        }
        Term::Start(s) => expect(s, Sort::Situation, "start", seen),
        Term::TimeOf(a) => expect(a, Sort::Action, "time", seen),
        Term::Integral { integrand, var, lower, upper } => {
            if var.sort != Sort::Real {
                return Err(ill(format!("integration variable {} must be Real", var.name)));
            }
            note_var(var, seen)?;
            expect(integrand, Sort::Real, "integrand", seen)?;
            expect(lower, Sort::Real, "integral bound", seen)?;
            expect(upper, Sort::Real, "integral bound", seen)
        }
        Term::Arith(op, args) => {
            let ok = match op {
                ArithOp::Neg => args.len() == 1,
                ArithOp::Sub | ArithOp::Div => args.len() == 2,
                ArithOp::Add | ArithOp::Mul => args.len() >= 2,
            };
            if !ok {
                return Err(ill(format!("wrong operand count for {}", op.symbol())));
            }
            args.iter().try_for_each(|a| expect(a, Sort::Real, "arithmetic", seen))
        }
    }
}

fn formula(f: &Formula, seen: &mut BTreeMap<String, Sort>) -> Result<(), LogicError> {
    match f {
        Formula::Pred { symbol, args } => {
            for a in args {
                term(a, seen)?;
                let want = if symbol == "natural" { Sort::Action } else { Sort::Object };
                if a.sort() != want {
                    return Err(ill(format!("argument {a} of {symbol} must be {want}")));
                }
            }
            Ok(())
        }
        Formula::Fluent { args, situation, .. } => {
            for a in args {
                expect(a, Sort::Object, "fluent argument", seen)?;
            }
            expect(situation, Sort::Situation, "fluent situation", seen)
        }
        Formula::TemporalEq { args, time, situation, value, .. } => {
            for a in args {
                expect(a, Sort::Object, "fluent argument", seen)?;
            }
            expect(time, Sort::Real, "fluent time", seen)?;
            expect(situation, Sort::Situation, "fluent situation", seen)?;
            expect(value, Sort::Real, "fluent value", seen)
        }
        Formula::Compare(op, l, r) => {
            term(l, seen)?;
            term(r, seen)?;
            if l.sort() != r.sort() {
                return Err(ill(format!("comparison of {} with {}", l.sort(), r.sort())));
            }
            if *op != CmpOp::Eq && l.sort() != Sort::Real {
                return Err(ill(format!("ordering {} on {}", op.symbol(), l.sort())));
            }
            Ok(())
        }
        Formula::Poss(a, s) => {
            expect(a, Sort::Action, "poss", seen)?;
            expect(s, Sort::Situation, "poss", seen)
        }
        Formula::Not(g) => formula(g, seen),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().try_for_each(|g| formula(g, seen)),
        Formula::Implies(l, r) | Formula::Iff(l, r) => {
            formula(l, seen)?;
            formula(r, seen)
        }
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            for v in vs {
                note_var(v, seen)?;
            }
            formula(body, seen)
        }
    }
}
