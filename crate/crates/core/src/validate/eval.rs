//! Ground states and the evaluation of compiled formulas in them.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::compile::HybridBat;
use crate::logic::{ArithOp, Formula, Sort, SymbolClass, Term};
use crate::numeric::{Cond, NumericError, RExpr};

use super::world::{GroundAtom, World};

/// Everything true of one situation.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    /// True relational fluents, bookkeeping fluents included (closed world).
    pub rel: BTreeSet<GroundAtom>,
    /// Values of functional fluents.
    pub fns: BTreeMap<GroundAtom, f64>,
    /// `F_init` values, aligned with `World::temporal`.
    pub init_vals: Vec<f64>,
    /// Active process fluents.
    pub active: BTreeSet<GroundAtom>,
    pub start: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{0} has no value")]
    Undefined(String),
    #[error("cannot evaluate {0}")]
    Unsupported(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Evaluation of formulas about one state. Object variables are looked up
/// in the bindings, the time variable stays symbolic (`RExpr::Time`), and
/// temporal fluents at that time become evolution components.
pub struct Eval<'a> {
    pub bat: &'a HybridBat,
    pub world: &'a World,
    pub state: &'a GroundState,
    /// Name of the variable that stands for the evaluation time.
    pub time: &'a str,
    pub eps: f64,
    env: Vec<(String, String)>,
}

impl<'a> Eval<'a> {
    pub fn new(bat: &'a HybridBat, world: &'a World, state: &'a GroundState, time: &'a str, eps: f64) -> Self {
        Eval { bat, world, state, time, eps, env: Vec::new() }
    }

    pub fn bind(&mut self, var: &str, obj: &str) {
        self.env.push((var.to_string(), obj.to_string()));
    }

    pub fn unbind(&mut self, n: usize) {
        let keep = self.env.len() - n;
        self.env.truncate(keep);
    }

    fn class(&self, symbol: &str) -> Option<SymbolClass> {
        self.bat.table.signature.get(symbol).map(|i| i.class)
    }

    pub fn object(&self, t: &Term) -> Result<String, EvalError> {
        match t {
            Term::Const(n, Sort::Object) => Ok(n.clone()),
            Term::Var(v) if v.sort == Sort::Object => self
                .env
                .iter()
                .rev()
                .find(|(n, _)| *n == v.name)
                .map(|(_, o)| o.clone())
                .ok_or_else(|| EvalError::Unsupported(format!("unbound variable {}", v.name))),
            t => Err(EvalError::Unsupported(t.to_string())),
        }
    }

    fn objects(&self, ts: &[Term]) -> Result<Vec<String>, EvalError> {
        ts.iter().map(|t| self.object(t)).collect()
    }

    fn is_time(&self, t: &Term) -> bool {
        matches!(t, Term::Var(v) if v.name == self.time && v.sort == Sort::Real)
    }

    pub fn rexpr(&self, t: &Term) -> Result<RExpr, EvalError> {
        Ok(match t {
            Term::Real(x) => RExpr::Const(*x),
            Term::Var(_) if self.is_time(t) => RExpr::Time,
            Term::Start(_) => RExpr::Const(self.state.start),
            Term::Arith(op, args) => {
                let xs = args.iter().map(|a| self.rexpr(a)).collect::<Result<Vec<_>, _>>()?;
                match (op, xs.as_slice()) {
                    (ArithOp::Add, _) => RExpr::Add(xs),
                    (ArithOp::Mul, _) => RExpr::Mul(xs),
                    (ArithOp::Neg, [x]) => RExpr::Neg(Box::new(x.clone())),
                    (ArithOp::Sub, [l, r]) => RExpr::sub(l.clone(), r.clone()),
                    (ArithOp::Div, [l, r]) => RExpr::Div(Box::new(l.clone()), Box::new(r.clone())),
                    _ => return Err(EvalError::Unsupported(t.to_string())),
                }
            }
            Term::App { symbol, args, .. } => {
                let n = args.len();
                match self.class(symbol) {
                    Some(SymbolClass::StaticFunction) => {
                        let atom = GroundAtom::new(symbol.clone(), self.objects(args)?);
                        RExpr::Const(self.world.static_value(&atom).ok_or_else(|| EvalError::Undefined(atom.to_string()))?)
                    }
                    Some(SymbolClass::FunctionalFluent) if n >= 1 => {
                        let atom = GroundAtom::new(symbol.clone(), self.objects(&args[..n - 1])?);
                        RExpr::Const(*self.state.fns.get(&atom).ok_or_else(|| EvalError::Undefined(atom.to_string()))?)
                    }
                    Some(SymbolClass::TemporalFluent) if n >= 2 && self.is_time(&args[n - 2]) => {
                        let atom = GroundAtom::new(symbol.clone(), self.objects(&args[..n - 2])?);
                        RExpr::Var(self.world.temporal_index(&atom).ok_or_else(|| EvalError::Undefined(atom.to_string()))?)
                    }
                    Some(SymbolClass::InitFluent) if n >= 1 => {
                        let temporal = self
                            .bat
                            .seas
                            .iter()
                            .find(|s| s.init == *symbol)
                            .map(|s| s.fluent.clone())
                            .ok_or_else(|| EvalError::Unsupported(t.to_string()))?;
                        let atom = GroundAtom::new(temporal, self.objects(&args[..n - 1])?);
                        let i = self.world.temporal_index(&atom).ok_or_else(|| EvalError::Undefined(atom.to_string()))?;
                        RExpr::Const(self.state.init_vals[i])
                    }
                    _ => return Err(EvalError::Unsupported(t.to_string())),
                }
            }
            t => return Err(EvalError::Unsupported(t.to_string())),
        })
    }

    fn holds_atom(&self, symbol: &str, args: &[Term]) -> Result<bool, EvalError> {
        let atom = GroundAtom::new(symbol, self.objects(args)?);
        Ok(match self.class(symbol) {
            Some(SymbolClass::TypePredicate) => self.world.has_type(symbol, &atom.args[0]),
            Some(SymbolClass::StaticPredicate) => self.world.static_holds(&atom),
            Some(SymbolClass::RelationalFluent) => self.state.rel.contains(&atom),
            Some(SymbolClass::ProcessFluent) => self.state.active.contains(&atom),
            _ => return Err(EvalError::Unsupported(symbol.to_string())),
        })
    }

    /// Partial evaluation: everything but the time-dependent comparisons is
    /// decided now.
    pub fn cond(&mut self, f: &Formula) -> Result<Cond, EvalError> {
        Ok(match f {
            Formula::Pred { symbol, args } => Cond::Const(self.holds_atom(symbol, args)?),
            Formula::Fluent { symbol, args, .. } => Cond::Const(self.holds_atom(symbol, args)?),
            Formula::TemporalEq { symbol, args, time, situation, value } => {
                let mut full = args.clone();
                full.push(time.clone());
                full.push(situation.clone());
                let lhs = self.rexpr(&Term::real_app(symbol.clone(), full))?;
                Cond::cmp(crate::logic::CmpOp::Eq, lhs, self.rexpr(value)?, self.eps)?
            }
            Formula::Compare(op, l, r) if l.sort() == Sort::Object => {
                let same = self.object(l)? == self.object(r)?;
                match op {
                    crate::logic::CmpOp::Eq => Cond::Const(same),
                    _ => return Err(EvalError::Unsupported(f.to_string())),
                }
            }
            Formula::Compare(op, l, r) => Cond::cmp(*op, self.rexpr(l)?, self.rexpr(r)?, self.eps)?,
            Formula::Not(x) => Cond::not(self.cond(x)?),
            Formula::And(xs) => {
                let mut parts = Vec::new();
                for x in xs {
                    let c = self.cond(x)?;
                    if c == Cond::Const(false) {
                        return Ok(c);
                    }
                    parts.push(c);
                }
                Cond::and(parts)
            }
            Formula::Or(xs) => {
                let mut parts = Vec::new();
                for x in xs {
                    let c = self.cond(x)?;
                    if c == Cond::Const(true) {
                        return Ok(c);
                    }
                    parts.push(c);
                }
                Cond::or(parts)
            }
            Formula::Implies(l, r) => {
                let l = self.cond(l)?;
                Cond::or(vec![Cond::not(l), self.cond(r)?])
            }
            Formula::Iff(l, r) => {
                let l = self.cond(l)?;
                let r = self.cond(r)?;
                Cond::or(vec![
                    Cond::and(vec![l.clone(), r.clone()]),
                    Cond::and(vec![Cond::not(l), Cond::not(r)]),
                ])
            }
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                if vs.iter().any(|v| v.sort != Sort::Object) {
                    return Err(EvalError::Unsupported(f.to_string()));
                }
                let exists = matches!(f, Formula::Exists(..));
                let mut parts = Vec::new();
                for tuple in object_tuples(&self.world.objects, vs.len()) {
                    for (v, o) in vs.iter().zip(&tuple) {
                        self.bind(&v.name, o);
                    }
                    let c = self.cond(body);
                    self.unbind(vs.len());
                    let c = c?;
                    if c == Cond::Const(exists) {
                        return Ok(c);
                    }
                    parts.push(c);
                }
                if exists {
                    Cond::or(parts)
                } else {
                    Cond::and(parts)
                }
            }
            Formula::Poss(..) => return Err(EvalError::Unsupported(f.to_string())),
        })
    }
}

/// All `n`-tuples over `objects`, lexicographic in declaration order.
pub fn object_tuples(objects: &[String], n: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<String>| {
                objects.iter().map(move |o| {
                    let mut t = prefix.clone();
                    t.push(o.clone());
                    t
                })
            })
            .collect();
    }
    out
}
