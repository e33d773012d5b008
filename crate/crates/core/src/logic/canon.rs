//! Canonical prefix text for terms, formulas and axioms.
//!
//! Grammar (whitespace separated, `;` comments):
//!
//! ```text
//! formula := (and f*) | (or f*) | (not f) | (-> f f) | (<-> f f)
//!          | (exists (var+) f) | (forall (var+) f) | (poss term term)
//!          | (natural term) | (cmp term term) | (sym term*)
//! cmp     := < | <= | = | >= | >
//! term    := var | object | number | S0 | (do term term) | (start term)
//!          | (time term) | (integral var term term term)
//!          | (+ term term+) | (- term term) | (- term) | (* term term+) | (/ term term)
//!          | (sym term*)
//! ```
//!
//! Atoms of a fluent carry their time (temporal fluents) and situation as
//! trailing arguments, action terms carry their time as the last argument.
//! `(= (F args t s) y)` with a temporal fluent `F` reads as a temporal
//! fluent equation. Variables are not annotated; their sorts are recovered
//! from the positions they occur in.

use std::collections::{BTreeMap, BTreeSet};

use crate::sexpr::{self, SExpr};

use super::{free_vars, ArithOp, Axiom, CmpOp, Formula, LogicError, Signature, Sort, SymbolClass, Term, Var};

const KEYWORDS: &[&str] = &[
    "and", "or", "not", "->", "<->", "exists", "forall", "poss", "natural", "do", "start", "time", "integral", "S0",
    "+", "-", "*", "/", "<", "<=", "=", ">=", ">",
];

/// True for names the canonical grammar reserves.
pub fn is_reserved(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

pub(crate) fn print_real(x: f64) -> String {
    format!("{x}")
}

pub(crate) fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

pub(crate) fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_list<'a, I>(head: &str, items: I, out: &mut String)
where
    I: IntoIterator<Item = Item<'a>>,
{
    out.push('(');
    out.push_str(head);
    for it in items {
        out.push(' ');
        match it {
            Item::T(t) => write_term(t, out),
            Item::F(f) => write_formula(f, out),
            Item::Raw(s) => out.push_str(&s),
        }
    }
    out.push(')');
}

enum Item<'a> {
    T(&'a Term),
    F(&'a Formula),
    Raw(String),
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(&v.name),
        Term::Const(n, _) => out.push_str(n),
        Term::Real(x) => out.push_str(&print_real(*x)),
        Term::S0 => out.push_str("S0"),
        Term::App { symbol, args, .. } => write_list(symbol, args.iter().map(Item::T), out),
        Term::Action { symbol, args, time } => {
            write_list(symbol, args.iter().map(Item::T).chain([Item::T(time)]), out)
        }
        Term::Do(a, s) => write_list("do", [Item::T(a), Item::T(s)], out),
        Term::Start(s) => write_list("start", [Item::T(s)], out),
        Term::TimeOf(a) => write_list("time", [Item::T(a)], out),
        Term::Integral { integrand, var, lower, upper } => write_list(
            "integral",
            [Item::Raw(var.name.clone()), Item::T(lower), Item::T(upper), Item::T(integrand)],
            out,
        ),
        Term::Arith(op, args) => write_list(op.symbol(), args.iter().map(Item::T), out),
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Pred { symbol, args } => write_list(symbol, args.iter().map(Item::T), out),
        Formula::Fluent { symbol, args, situation } => {
            write_list(symbol, args.iter().map(Item::T).chain([Item::T(situation)]), out)
        }
        Formula::TemporalEq { symbol, args, time, situation, value } => {
            let mut lhs = String::new();
            write_list(symbol, args.iter().map(Item::T).chain([Item::T(time), Item::T(situation)]), &mut lhs);
            write_list("=", [Item::Raw(lhs), Item::T(value)], out);
        }
        Formula::Compare(op, l, r) => write_list(op.symbol(), [Item::T(l), Item::T(r)], out),
        Formula::Not(g) => write_list("not", [Item::F(g)], out),
        Formula::And(gs) => write_list("and", gs.iter().map(Item::F), out),
        Formula::Or(gs) => write_list("or", gs.iter().map(Item::F), out),
        Formula::Implies(l, r) => write_list("->", [Item::F(l), Item::F(r)], out),
        Formula::Iff(l, r) => write_list("<->", [Item::F(l), Item::F(r)], out),
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let head = if matches!(f, Formula::Exists(..)) { "exists" } else { "forall" };
            let names: Vec<&str> = vs.iter().map(|v| v.name.as_str()).collect();
            write_list(head, [Item::Raw(format!("({})", names.join(" "))), Item::F(body)], out);
        }
        Formula::Poss(a, s) => write_list("poss", [Item::T(a), Item::T(s)], out),
    }
}

/// Canonical text of an axiom's formula.
pub fn serialize(a: &Axiom) -> String {
    serialize_formula(&a.formula)
}

pub fn serialize_formula(f: &Formula) -> String {
    print_formula(&canonical(f))
}

/// Renames bound variables to `<prefix><n>` with one counter per sort, in
/// binding pre-order, and rewrites equations on temporal fluent terms into
/// temporal fluent equations. Free variables keep their names.
pub fn canonical(f: &Formula) -> Formula {
    let mut taken: BTreeSet<String> = free_vars(f).into_iter().map(|v| v.name).collect();
    collect_consts_f(f, &mut taken);
    let mut r = Renamer { taken, counters: BTreeMap::new(), scope: Vec::new() };
    r.formula(f)
}

fn collect_consts_t(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Const(n, _) => {
            out.insert(n.clone());
        }
        Term::Var(_) | Term::Real(_) | Term::S0 => {}
        Term::App { args, .. } | Term::Arith(_, args) => args.iter().for_each(|a| collect_consts_t(a, out)),
        Term::Action { args, time, .. } => {
            args.iter().for_each(|a| collect_consts_t(a, out));
            collect_consts_t(time, out);
        }
        Term::Do(a, b) => {
            collect_consts_t(a, out);
            collect_consts_t(b, out);
        }
        Term::Start(x) | Term::TimeOf(x) => collect_consts_t(x, out),
        Term::Integral { integrand, lower, upper, .. } => {
            collect_consts_t(integrand, out);
            collect_consts_t(lower, out);
            collect_consts_t(upper, out);
        }
    }
}

fn collect_consts_f(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Pred { args, .. } => args.iter().for_each(|a| collect_consts_t(a, out)),
        Formula::Fluent { args, situation, .. } => {
            args.iter().for_each(|a| collect_consts_t(a, out));
            collect_consts_t(situation, out);
        }
        Formula::TemporalEq { args, time, situation, value, .. } => {
            args.iter().for_each(|a| collect_consts_t(a, out));
            collect_consts_t(time, out);
            collect_consts_t(situation, out);
            collect_consts_t(value, out);
        }
        Formula::Compare(_, l, r) | Formula::Poss(l, r) => {
            collect_consts_t(l, out);
            collect_consts_t(r, out);
        }
        Formula::Not(g) => collect_consts_f(g, out),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| collect_consts_f(g, out)),
        Formula::Implies(l, r) | Formula::Iff(l, r) => {
            collect_consts_f(l, out);
            collect_consts_f(r, out);
        }
        Formula::Exists(_, b) | Formula::Forall(_, b) => collect_consts_f(b, out),
    }
}

struct Renamer {
    taken: BTreeSet<String>,
    counters: BTreeMap<Sort, usize>,
    scope: Vec<(Var, Var)>,
}

impl Renamer {
    fn fresh(&mut self, v: &Var) -> Var {
        let n = self.counters.entry(v.sort).or_insert(0);
        loop {
            *n += 1;
            let cand = format!("{}{}", v.sort.prefix(), n);
            if !self.taken.contains(&cand) {
                return Var::new(cand, v.sort);
            }
        }
    }

    fn lookup(&self, v: &Var) -> Var {
        self.scope.iter().rev().find(|(old, _)| old == v).map(|(_, new)| new.clone()).unwrap_or_else(|| v.clone())
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(v) => Term::Var(self.lookup(v)),
            Term::Const(..) | Term::Real(_) | Term::S0 => t.clone(),
            Term::App { symbol, args, sort } => {
                Term::App { symbol: symbol.clone(), args: args.iter().map(|a| self.term(a)).collect(), sort: *sort }
            }
            Term::Action { symbol, args, time } => Term::Action {
                symbol: symbol.clone(),
                args: args.iter().map(|a| self.term(a)).collect(),
                time: Box::new(self.term(time)),
            },
            Term::Do(a, s) => Term::do_(self.term(a), self.term(s)),
            Term::Start(s) => Term::start(self.term(s)),
            Term::TimeOf(a) => Term::time_of(self.term(a)),
            Term::Integral { integrand, var, lower, upper } => {
                let lower = Box::new(self.term(lower));
                let upper = Box::new(self.term(upper));
                let nv = self.fresh(var);
                self.scope.push((var.clone(), nv.clone()));
                let integrand = Box::new(self.term(integrand));
                self.scope.pop();
                Term::Integral { integrand, var: nv, lower, upper }
            }
            Term::Arith(op, args) => Term::Arith(*op, args.iter().map(|a| self.term(a)).collect()),
        }
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Pred { symbol, args } => {
                Formula::Pred { symbol: symbol.clone(), args: args.iter().map(|a| self.term(a)).collect() }
            }
            Formula::Fluent { symbol, args, situation } => Formula::Fluent {
                symbol: symbol.clone(),
                args: args.iter().map(|a| self.term(a)).collect(),
                situation: self.term(situation),
            },
            Formula::TemporalEq { symbol, args, time, situation, value } => Formula::TemporalEq {
                symbol: symbol.clone(),
                args: args.iter().map(|a| self.term(a)).collect(),
                time: self.term(time),
                situation: self.term(situation),
                value: self.term(value),
            },
            Formula::Compare(op, l, r) => {
                let l = self.term(l);
                let r = self.term(r);
                match (op, l) {
                    (CmpOp::Eq, Term::App { symbol, mut args, sort: Sort::Real }) if is_temporal_args(&args) => {
                        let situation = args.pop().unwrap();
                        let time = args.pop().unwrap();
                        Formula::TemporalEq { symbol, args, time, situation, value: r }
                    }
                    (_, l) => Formula::Compare(*op, l, r),
                }
            }
            Formula::Poss(a, s) => Formula::Poss(self.term(a), self.term(s)),
            Formula::Not(g) => Formula::not(self.formula(g)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| self.formula(g)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| self.formula(g)).collect()),
            Formula::Implies(l, r) => Formula::implies(self.formula(l), self.formula(r)),
            Formula::Iff(l, r) => Formula::iff(self.formula(l), self.formula(r)),
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let depth = self.scope.len();
                let mut nvs = Vec::with_capacity(vs.len());
                for v in vs {
                    let nv = self.fresh(v);
                    self.scope.push((v.clone(), nv.clone()));
                    nvs.push(nv);
                }
                let body = Box::new(self.formula(body));
                self.scope.truncate(depth);
                if matches!(f, Formula::Exists(..)) {
                    Formula::Exists(nvs, body)
                } else {
                    Formula::Forall(nvs, body)
                }
            }
        }
    }
}

/// Temporal fluent applications end in a time then a situation argument.
fn is_temporal_args(args: &[Term]) -> bool {
    args.len() >= 2
        && args[args.len() - 1].sort() == Sort::Situation
        && args[args.len() - 2].sort() == Sort::Real
}

/// Parses canonical text back into a formula. Symbols are resolved against
/// `sig`; any other bare name is a variable.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, LogicError> {
    let e = sexpr::parse_one(text).map_err(|e| LogicError::Parse(e.to_string()))?;
    let mut p = Parser { sig, env: BTreeMap::new() };
    loop {
        let before = p.env.len();
        p.infer_formula(&e)?;
        if p.env.len() == before {
            break;
        }
    }
    p.formula(&e)
}

struct Parser<'a> {
    sig: &'a Signature,
    env: BTreeMap<String, Sort>,
}

fn perr(e: &SExpr, msg: impl std::fmt::Display) -> LogicError {
    LogicError::Parse(format!("{}: {msg}", e.pos()))
}

fn is_number(s: &str) -> bool {
    let b = s.trim_start_matches(['-', '+']);
    b.starts_with(|c: char| c.is_ascii_digit() || c == '.') && s.parse::<f64>().is_ok()
}

fn default_sort(name: &str) -> Sort {
    match name.chars().next() {
        Some('s') => Sort::Situation,
        Some('t') | Some('y') => Sort::Real,
        Some('a') => Sort::Action,
        _ => Sort::Object,
    }
}

fn split(e: &SExpr) -> Option<(&str, &[SExpr])> {
    match e.as_list()? {
        [SExpr::Atom(h, _), rest @ ..] => Some((h.as_str(), rest)),
        _ => None,
    }
}

impl Parser<'_> {
    fn is_var_atom(&self, name: &str) -> bool {
        !is_number(name)
            && name != "S0"
            && !matches!(self.sig.get(name), Some(i) if i.class == SymbolClass::Object)
    }

    fn bind(&mut self, e: &SExpr, name: &str, sort: Sort) -> Result<(), LogicError> {
        match self.env.get(name) {
            Some(s) if *s != sort => Err(perr(e, format!("variable {name} used as {s} and {sort}"))),
            Some(_) => Ok(()),
            None => {
                self.env.insert(name.to_string(), sort);
                Ok(())
            }
        }
    }

    fn arg_sorts(&self, e: &SExpr, head: &str, n: usize) -> Result<(SymbolClass, Vec<Sort>), LogicError> {
        let info = self.sig.get(head).ok_or_else(|| perr(e, format!("unknown symbol {head}")))?;
        let sorts = info.class.arg_sorts(info.arity);
        if sorts.len() != n {
            return Err(perr(e, format!("{head} expects {} arguments, found {n}", sorts.len())));
        }
        Ok((info.class, sorts))
    }

    /// Records variable sorts implied by the position of `e`; returns the
    /// sort of `e` when it is determined.
    fn infer_term(&mut self, e: &SExpr, expected: Option<Sort>) -> Result<Option<Sort>, LogicError> {
        if let SExpr::Atom(a, _) = e {
            if is_number(a) {
                return Ok(Some(Sort::Real));
            }
            if a == "S0" {
                return Ok(Some(Sort::Situation));
            }
            if !self.is_var_atom(a) {
                return Ok(Some(Sort::Object));
            }
            if let Some(s) = expected {
                self.bind(e, a, s)?;
            }
            return Ok(self.env.get(a.as_str()).copied());
        }
        let (head, rest) = split(e).ok_or_else(|| perr(e, "malformed term"))?;
        match head {
            "do" => {
                self.expect_n(e, rest, 2)?;
                self.infer_term(&rest[0], Some(Sort::Action))?;
                self.infer_term(&rest[1], Some(Sort::Situation))?;
                Ok(Some(Sort::Situation))
            }
            "start" => {
                self.expect_n(e, rest, 1)?;
                self.infer_term(&rest[0], Some(Sort::Situation))?;
                Ok(Some(Sort::Real))
            }
            "time" => {
                self.expect_n(e, rest, 1)?;
                self.infer_term(&rest[0], Some(Sort::Action))?;
                Ok(Some(Sort::Real))
            }
            "integral" => {
                self.expect_n(e, rest, 4)?;
                for r in rest {
                    self.infer_term(r, Some(Sort::Real))?;
                }
                Ok(Some(Sort::Real))
            }
            "+" | "-" | "*" | "/" => {
                for r in rest {
                    self.infer_term(r, Some(Sort::Real))?;
                }
                Ok(Some(Sort::Real))
            }
            _ => {
                let (class, sorts) = self.arg_sorts(e, head, rest.len())?;
                for (r, s) in rest.iter().zip(sorts) {
                    self.infer_term(r, Some(s))?;
                }
                Ok(Some(if class.is_action() { Sort::Action } else { Sort::Real }))
            }
        }
    }

    fn expect_n(&self, e: &SExpr, rest: &[SExpr], n: usize) -> Result<(), LogicError> {
        if rest.len() != n {
            return Err(perr(e, format!("expected {n} operands, found {}", rest.len())));
        }
        Ok(())
    }

    fn quantified<'e>(&self, e: &'e SExpr, rest: &'e [SExpr]) -> Result<(Vec<&'e str>, &'e SExpr), LogicError> {
        self.expect_n(e, rest, 2)?;
        let vars = rest[0].as_list().ok_or_else(|| perr(&rest[0], "expected variable list"))?;
        let names = vars
            .iter()
            .map(|v| v.as_atom().filter(|a| self.is_var_atom(a)).ok_or_else(|| perr(v, "expected variable")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((names, &rest[1]))
    }

    fn infer_formula(&mut self, e: &SExpr) -> Result<(), LogicError> {
        let (head, rest) = split(e).ok_or_else(|| perr(e, "malformed formula"))?;
        match head {
            "and" | "or" | "not" | "->" | "<->" => rest.iter().try_for_each(|r| self.infer_formula(r)),
            "exists" | "forall" => {
                let (_, body) = self.quantified(e, rest)?;
                self.infer_formula(body)
            }
            "poss" => {
                self.expect_n(e, rest, 2)?;
                self.infer_term(&rest[0], Some(Sort::Action))?;
                self.infer_term(&rest[1], Some(Sort::Situation))?;
                Ok(())
            }
            "natural" => {
                self.expect_n(e, rest, 1)?;
                self.infer_term(&rest[0], Some(Sort::Action))?;
                Ok(())
            }
            "=" => {
                self.expect_n(e, rest, 2)?;
                let l = self.infer_term(&rest[0], None)?;
                let r = self.infer_term(&rest[1], l)?;
                if l.is_none() && r.is_some() {
                    self.infer_term(&rest[0], r)?;
                }
                Ok(())
            }
            "<" | "<=" | ">=" | ">" => {
                self.expect_n(e, rest, 2)?;
                self.infer_term(&rest[0], Some(Sort::Real))?;
                self.infer_term(&rest[1], Some(Sort::Real))?;
                Ok(())
            }
            _ => {
                let (_, sorts) = self.arg_sorts(e, head, rest.len())?;
                for (r, s) in rest.iter().zip(sorts) {
                    self.infer_term(r, Some(s))?;
                }
                Ok(())
            }
        }
    }

    fn var(&self, name: &str) -> Var {
        Var::new(name, self.env.get(name).copied().unwrap_or_else(|| default_sort(name)))
    }

    fn terms(&self, rest: &[SExpr]) -> Result<Vec<Term>, LogicError> {
        rest.iter().map(|r| self.term(r)).collect()
    }

    fn term(&self, e: &SExpr) -> Result<Term, LogicError> {
        if let SExpr::Atom(a, _) = e {
            if is_number(a) {
                return a.parse().map(Term::Real).map_err(|_| perr(e, "bad number"));
            }
            if a == "S0" {
                return Ok(Term::S0);
            }
            if !self.is_var_atom(a) {
                return Ok(Term::object(a.clone()));
            }
            return Ok(self.var(a).term());
        }
        let (head, rest) = split(e).ok_or_else(|| perr(e, "malformed term"))?;
        let args = || self.terms(rest);
        Ok(match head {
            "do" => {
                let mut a = args()?;
                let s = a.pop().unwrap();
                Term::do_(a.pop().unwrap(), s)
            }
            "start" => Term::start(args()?.pop().unwrap()),
            "time" => Term::time_of(args()?.pop().unwrap()),
            "integral" => {
                let name = rest[0].as_atom().ok_or_else(|| perr(&rest[0], "expected variable"))?;
                Term::Integral {
                    var: self.var(name),
                    lower: Box::new(self.term(&rest[1])?),
                    upper: Box::new(self.term(&rest[2])?),
                    integrand: Box::new(self.term(&rest[3])?),
                }
            }
            "+" | "*" if rest.len() >= 2 => {
                Term::Arith(if head == "+" { ArithOp::Add } else { ArithOp::Mul }, args()?)
            }
            "-" if rest.len() == 1 => Term::Arith(ArithOp::Neg, args()?),
            "-" | "/" if rest.len() == 2 => Term::Arith(if head == "-" { ArithOp::Sub } else { ArithOp::Div }, args()?),
            "+" | "-" | "*" | "/" => return Err(perr(e, format!("wrong operand count for {head}"))),
            _ => {
                let (class, _) = self.arg_sorts(e, head, rest.len())?;
                let mut a = args()?;
                if class.is_action() {
                    let time = a.pop().unwrap();
                    Term::action(head, a, time)
                } else if class.is_function() {
                    Term::real_app(head, a)
                } else {
                    return Err(perr(e, format!("{head} is not a function or action")));
                }
            }
        })
    }

    fn formula(&self, e: &SExpr) -> Result<Formula, LogicError> {
        let (head, rest) = split(e).ok_or_else(|| perr(e, "malformed formula"))?;
        let subs = || rest.iter().map(|r| self.formula(r)).collect::<Result<Vec<_>, _>>();
        let two = |rest: &[SExpr]| -> Result<(), LogicError> { self.expect_n(e, rest, 2) };
        Ok(match head {
            "and" => Formula::And(subs()?),
            "or" => Formula::Or(subs()?),
            "not" => {
                self.expect_n(e, rest, 1)?;
                Formula::not(self.formula(&rest[0])?)
            }
            "->" | "<->" => {
                two(rest)?;
                let l = self.formula(&rest[0])?;
                let r = self.formula(&rest[1])?;
                if head == "->" {
                    Formula::implies(l, r)
                } else {
                    Formula::iff(l, r)
                }
            }
            "exists" | "forall" => {
                let (names, body) = self.quantified(e, rest)?;
                let vars = names.iter().map(|n| self.var(n)).collect();
                let body = Box::new(self.formula(body)?);
                if head == "exists" {
                    Formula::Exists(vars, body)
                } else {
                    Formula::Forall(vars, body)
                }
            }
            "poss" => {
                two(rest)?;
                Formula::Poss(self.term(&rest[0])?, self.term(&rest[1])?)
            }
            "natural" => Formula::Pred { symbol: "natural".into(), args: vec![self.term(&rest[0])?] },
            op if CmpOp::from_symbol(op).is_some() => {
                two(rest)?;
                let op = CmpOp::from_symbol(op).unwrap();
                let l = self.term(&rest[0])?;
                let r = self.term(&rest[1])?;
                match (op, l) {
                    (CmpOp::Eq, Term::App { symbol, mut args, .. })
                        if self.sig.get(&symbol).map(|i| i.class) == Some(SymbolClass::TemporalFluent) =>
                    {
                        let situation = args.pop().unwrap();
                        let time = args.pop().unwrap();
                        Formula::TemporalEq { symbol, args, time, situation, value: r }
                    }
                    (op, l) => Formula::Compare(op, l, r),
                }
            }
            _ => {
                let (class, _) = self.arg_sorts(e, head, rest.len())?;
                let mut args = self.terms(rest)?;
                if class.is_predicate() {
                    Formula::Pred { symbol: head.into(), args }
                } else if class.is_relational_fluent() {
                    let situation = args.pop().unwrap();
                    Formula::Fluent { symbol: head.into(), args, situation }
                } else {
                    return Err(perr(e, format!("{head} is not a predicate or relational fluent")));
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::AxiomKind;

    fn car_sig() -> Signature {
        let mut sig = Signature::new();
        sig.insert("accel", SymbolClass::Action, 0);
        sig.insert("end_w", SymbolClass::NaturalAction, 0);
        sig.insert("run", SymbolClass::RelationalFluent, 0);
        sig.insert("m", SymbolClass::ProcessFluent, 0);
        sig.insert("a", SymbolClass::FunctionalFluent, 0);
        sig.insert("up_limit", SymbolClass::StaticFunction, 0);
        sig.insert("v", SymbolClass::TemporalFluent, 0);
        sig.insert("v_init", SymbolClass::InitFluent, 0);
        sig.insert("ball", SymbolClass::TypePredicate, 1);
        sig.insert("ball1", SymbolClass::Object, 0);
        sig
    }

    fn una_accel() -> Formula {
        let (t, tp) = (Var::real("t"), Var::real("tp"));
        Formula::Forall(
            vec![t.clone(), tp.clone()],
            Box::new(Formula::implies(
                Formula::eq(Term::action("accel", vec![], t.term()), Term::action("accel", vec![], tp.term())),
                Formula::eq(t.term(), tp.term()),
            )),
        )
    }

    #[test]
    fn una_golden() {
        let ax = Axiom::new(AxiomKind::Una, "accel", una_accel());
        assert_eq!(serialize(&ax), "(forall (t1 t2) (-> (= (accel t1) (accel t2)) (= t1 t2)))");
    }

    #[test]
    fn natural_and_time_golden() {
        let t = Var::real("t");
        let nat = Formula::Pred { symbol: "natural".into(), args: vec![Term::action("end_w", vec![], t.term())] };
        assert_eq!(serialize_formula(&nat), "(natural (end_w t))");
        let time = Formula::eq(Term::time_of(Term::action("accel", vec![], t.term())), t.term());
        assert_eq!(serialize_formula(&time), "(= (time (accel t)) t)");
    }

    #[test]
    fn alpha_equivalent_formulas_serialize_identically() {
        let (u, w) = (Var::real("u"), Var::real("w"));
        let other = Formula::Forall(
            vec![u.clone(), w.clone()],
            Box::new(Formula::implies(
                Formula::eq(Term::action("accel", vec![], u.term()), Term::action("accel", vec![], w.term())),
                Formula::eq(u.term(), w.term()),
            )),
        );
        assert_eq!(serialize_formula(&other), serialize_formula(&una_accel()));
    }

    #[test]
    fn round_trip_with_integral_and_temporal_eq() {
        let sig = car_sig();
        let (s, t, y, tau) = (Var::situation("s"), Var::real("t"), Var::real("y"), Var::real("tau"));
        let m = Formula::Fluent { symbol: "m".into(), args: vec![], situation: s.term() };
        let rhs = Formula::and([
            m,
            Formula::eq(
                y.term(),
                Term::add(
                    Term::real_app("v_init", vec![s.term()]),
                    Term::Integral {
                        integrand: Box::new(Term::real_app("a", vec![s.term()])),
                        var: tau.clone(),
                        lower: Box::new(Term::start(s.term())),
                        upper: Box::new(t.term()),
                    },
                ),
            ),
        ]);
        let lhs = Formula::eq(Term::real_app("v", vec![t.term(), s.term()]), y.term());
        let f = Formula::iff(lhs, rhs);
        let text = serialize_formula(&f);
        assert_eq!(
            text,
            "(<-> (= (v t s) y) (and (m s) (= y (+ (v_init s) (integral t1 (start s) t (a s))))))"
        );
        let back = parse_formula(&text, &sig).unwrap();
        assert_eq!(back, canonical(&f));
        assert!(matches!(back, Formula::Iff(ref l, _) if matches!(**l, Formula::TemporalEq { .. })));
    }

    #[test]
    fn round_trip_quantified_objects_and_poss() {
        let sig = car_sig();
        let (x, s, a) = (Var::object("b"), Var::situation("s"), Var::action("a"));
        let f = Formula::and([
            Formula::Forall(
                vec![x.clone()],
                Box::new(Formula::implies(
                    Formula::Pred { symbol: "ball".into(), args: vec![x.term()] },
                    Formula::not(Formula::eq(x.term(), Term::object("ball1"))),
                )),
            ),
            Formula::Poss(a.term(), Term::do_(Term::action("accel", vec![], Term::Real(-2.5)), Term::S0)),
            Formula::Compare(CmpOp::Lt, Term::real_app("a", vec![s.term()]), Term::real_app("up_limit", vec![])),
        ]);
        let text = serialize_formula(&f);
        assert_eq!(
            text,
            "(and (forall (x1) (-> (ball x1) (not (= x1 ball1)))) (poss a (do (accel -2.5) S0)) (< (a s) (up_limit)))"
        );
        assert_eq!(parse_formula(&text, &sig).unwrap(), canonical(&f));
    }

    #[test]
    fn reals_print_shortest() {
        assert_eq!(print_real(0.1), "0.1");
        assert_eq!(print_real(10.0), "10");
        assert_eq!(print_real(-0.5), "-0.5");
    }

    #[test]
    fn unknown_symbol_is_a_parse_error() {
        assert!(parse_formula("(frob s)", &car_sig()).is_err());
        assert!(parse_formula("(run s", &car_sig()).is_err());
    }
}
