//! Goal descriptions and numeric expressions to SC formulas and terms.

use crate::classify::{FnClass, PredClass, SymbolTable};
use crate::logic::{Formula, Term, Var};
use crate::pddl::{Arg, FHead, Gd, NumExpr, PlanningInstance, TypeExpr, Typed};

/// Names a compiled formula may not give to an object variable: the fixed
/// situation/time/action/value variables and the argument variables of
/// successor state axioms.
fn clashes(name: &str, table: &SymbolTable) -> bool {
    if matches!(name, "s" | "t" | "a" | "y" | "tau") || table.signature.contains(name) {
        return true;
    }
    let mut chars = name.chars();
    matches!(chars.next(), Some('x' | 'y' | 'z')) && {
        let rest = chars.as_str();
        !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
    }
}

/// Translation context: the situation and time the mapped expression talks
/// about, plus the SC variable for each PDDL variable in scope.
pub struct Hat<'a> {
    pub inst: &'a PlanningInstance,
    pub table: &'a SymbolTable,
    pub s: Term,
    pub t: Term,
    scope: Vec<(String, Var)>,
}

impl<'a> Hat<'a> {
    pub fn new(inst: &'a PlanningInstance, table: &'a SymbolTable, s: Term, t: Term) -> Self {
        Hat { inst, table, s, t, scope: Vec::new() }
    }

    /// SC object variable for a PDDL variable name, avoiding reserved names.
    pub fn sc_var_name(&self, pddl: &str) -> String {
        let mut n = pddl.replace('-', "_");
        while clashes(&n, self.table) {
            n.push('_');
        }
        n
    }

    /// Brings PDDL variables into scope and returns their SC variables.
    pub fn bind(&mut self, vars: &[Typed]) -> Vec<Var> {
        vars.iter()
            .map(|v| {
                let sc = Var::object(self.sc_var_name(&v.name));
                self.scope.push((v.name.clone(), sc.clone()));
                sc
            })
            .collect()
    }

    pub fn unbind(&mut self, n: usize) {
        let keep = self.scope.len() - n;
        self.scope.truncate(keep);
    }

    pub fn var(&self, pddl: &str) -> Var {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == pddl)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| Var::object(self.sc_var_name(pddl)))
    }

    pub fn arg(&self, a: &Arg) -> Term {
        match a {
            Arg::Var(v) => self.var(v).term(),
            Arg::Name(n) => Term::object(n.clone()),
        }
    }

    /// Type expression applied to an object term: a type atom, a
    /// disjunction for `either`, or truth when it includes `object`.
    pub fn type_guard(&self, ty: &TypeExpr, x: Term) -> Formula {
        if ty.is_trivial() {
            return Formula::truth();
        }
        Formula::or(ty.names().iter().map(|n| Formula::Pred { symbol: self.table.sc(n).to_string(), args: vec![x.clone()] }))
    }

    pub fn guards(&self, vars: &[Typed], sc: &[Var]) -> Formula {
        Formula::and(vars.iter().zip(sc).map(|(v, x)| self.type_guard(&v.ty, x.term())))
    }

    /// Function term with the situation and time arguments its class needs.
    pub fn fhead(&self, h: &FHead) -> Term {
        let mut args: Vec<Term> = h.args.iter().map(|a| self.arg(a)).collect();
        match self.table.fn_class(&h.name) {
            Some(FnClass::Dynamic) => args.push(self.s.clone()),
            Some(FnClass::Temporal) => {
                args.push(self.t.clone());
                args.push(self.s.clone());
            }
            _ => {}
        }
        Term::real_app(self.table.sc(&h.name), args)
    }

    pub fn num(&self, e: &NumExpr) -> Term {
        match e {
            NumExpr::Number(x) => Term::Real(*x),
            NumExpr::Func(h) => self.fhead(h),
            NumExpr::Neg(x) => Term::neg(self.num(x)),
            NumExpr::Bin(op, l, r) => Term::Arith(*op, vec![self.num(l), self.num(r)]),
        }
    }

    pub fn atom(&self, pred: &str, args: &[Arg]) -> Formula {
        let args: Vec<Term> = args.iter().map(|a| self.arg(a)).collect();
        let symbol = self.table.sc(pred).to_string();
        match self.table.pred_class(pred) {
            Some(PredClass::Dynamic) => Formula::Fluent { symbol, args, situation: self.s.clone() },
            _ => Formula::Pred { symbol, args },
        }
    }

    pub fn gd(&mut self, g: &Gd) -> Formula {
        match g {
            Gd::Atom { pred, args } => self.atom(pred, args),
            Gd::Equal(l, r) => Formula::eq(self.arg(l), self.arg(r)),
            Gd::Cmp(op, l, r) => Formula::Compare(*op, self.num(l), self.num(r)),
            Gd::Not(x) => Formula::not(self.gd(x)),
            Gd::And(xs) => Formula::and(xs.iter().map(|x| self.gd(x)).collect::<Vec<_>>()),
            Gd::Or(xs) => Formula::or(xs.iter().map(|x| self.gd(x)).collect::<Vec<_>>()),
            Gd::Imply(l, r) => {
                let l = self.gd(l);
                Formula::implies(l, self.gd(r))
            }
            Gd::Exists(vs, b) | Gd::Forall(vs, b) => {
                let sc = self.bind(vs);
                let guard = self.guards(vs, &sc);
                let body = self.gd(b);
                self.unbind(vs.len());
                if matches!(g, Gd::Exists(..)) {
                    Formula::exists(sc, Formula::and([guard, body]))
                } else if guard.is_truth() {
                    Formula::forall(sc, body)
                } else {
                    Formula::forall(sc, Formula::implies(guard, body))
                }
            }
        }
    }
}
