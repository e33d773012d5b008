//! Initial theory: objects, types, closed-world facts about `S0`, and the
//! name/time axioms for actions.

use std::collections::BTreeSet;

use crate::classify::{FnClass, PredClass, SymbolTable};
use crate::logic::{Axiom, AxiomKind, Formula, Term, Var};
use crate::pddl::{InitFact, PlanningInstance, TypeExpr, OBJECT};

use super::ssa::arg_vars;
use super::ActionDef;

fn objects_eq(xs: &[Var], tuple: &[String]) -> Formula {
    Formula::and(xs.iter().zip(tuple).map(|(x, o)| Formula::eq(x.term(), Term::object(o.clone()))))
}

fn one_of(x: &Var, objs: &[String]) -> Formula {
    Formula::or(objs.iter().map(|o| Formula::eq(x.term(), Term::object(o.clone()))))
}

/// Type axioms, object typing, unique names and domain closure.
pub fn objects(inst: &PlanningInstance, table: &SymbolTable) -> Vec<Axiom> {
    let mut out = Vec::new();
    let x = Var::object("x");
    for (ty, parent) in inst.types.entries() {
        if ty == OBJECT || parent.is_trivial() {
            continue;
        }
        let guard = Formula::Pred { symbol: table.sc(ty).to_string(), args: vec![x.term()] };
        let sup = Formula::or(
            parent.names().iter().map(|p| Formula::Pred { symbol: table.sc(p).to_string(), args: vec![x.term()] }),
        );
        out.push(Axiom::new(AxiomKind::TypeAxiom, ty.clone(), Formula::forall(vec![x.clone()], Formula::implies(guard, sup))));
    }
    for (o, ty) in &inst.objects {
        for n in ty.names().iter().filter(|n| *n != OBJECT) {
            out.push(Axiom::new(
                AxiomKind::TypeAxiom,
                o.clone(),
                Formula::Pred { symbol: table.sc(n).to_string(), args: vec![Term::object(o.clone())] },
            ));
        }
    }
    let names: Vec<&String> = inst.objects.keys().collect();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            out.push(Axiom::new(
                AxiomKind::Una,
                format!("{a} {b}"),
                Formula::not(Formula::eq(Term::object((*a).clone()), Term::object((*b).clone()))),
            ));
        }
    }
    for (ty, _) in inst.types.entries() {
        if ty == OBJECT {
            continue;
        }
        let members = inst.members(&TypeExpr::Name(ty.clone()));
        let guard = Formula::Pred { symbol: table.sc(ty).to_string(), args: vec![x.term()] };
        let body = if members.is_empty() { Formula::not(guard) } else { Formula::implies(guard, one_of(&x, &members)) };
        out.push(Axiom::new(AxiomKind::DomainClosure, ty.clone(), Formula::forall(vec![x.clone()], body)));
    }
    if !names.is_empty() {
        let all: Vec<String> = names.into_iter().cloned().collect();
        out.push(Axiom::new(AxiomKind::DomainClosure, OBJECT, Formula::forall(vec![x.clone()], one_of(&x, &all))));
    }
    out
}

/// `start(S0) = 0` and the complete description of `S0`: every predicate,
/// process fluent and bookkeeping fluent under the closed-world
/// assumption, and every initial function value.
pub fn situation(inst: &PlanningInstance, table: &SymbolTable) -> Vec<Axiom> {
    let mut out = vec![Axiom::new(AxiomKind::Init, "start", Formula::eq(Term::start(Term::S0), Term::Real(0.0)))];
    let atom = |name: &str, args: Vec<Term>| {
        let symbol = table.sc(name).to_string();
        match table.pred_class(name) {
            Some(PredClass::Dynamic) => Formula::Fluent { symbol, args, situation: Term::S0 },
            _ => Formula::Pred { symbol, args },
        }
    };
    for d in &inst.domain.predicates {
        let xs = arg_vars(d.params.len());
        let mut tuples: Vec<&Vec<String>> = Vec::new();
        for f in &inst.problem.init {
            if let InitFact::Atom { pred, args } = f {
                if *pred == d.name && !tuples.contains(&args) {
                    tuples.push(args);
                }
            }
        }
        let head = atom(&d.name, xs.iter().map(Var::term).collect());
        let body = if xs.is_empty() {
            if tuples.is_empty() {
                Formula::not(head)
            } else {
                head
            }
        } else if tuples.is_empty() {
            Formula::not(head)
        } else {
            Formula::iff(head, Formula::or(tuples.iter().map(|t| objects_eq(&xs, t))))
        };
        out.push(Axiom::new(AxiomKind::Init, d.name.clone(), Formula::forall(xs, body)));
    }
    for (name, p) in &table.processes {
        let arity = inst.domain.processes.iter().find(|s| s.name == *name).map_or(0, |s| s.params.len());
        let xs = arg_vars(arity);
        let head = Formula::Fluent { symbol: p.fluent.clone(), args: xs.iter().map(Var::term).collect(), situation: Term::S0 };
        out.push(Axiom::new(AxiomKind::Init, p.fluent.clone(), Formula::forall(xs, Formula::not(head))));
    }
    for til in &table.tils {
        out.push(Axiom::new(
            AxiomKind::Init,
            til.fired.clone(),
            Formula::not(Formula::Fluent { symbol: til.fired.clone(), args: vec![], situation: Term::S0 }),
        ));
    }
    let mut seen = BTreeSet::new();
    for f in &inst.problem.init {
        let InitFact::Value { func, args, value } = f else { continue };
        if !seen.insert((func.clone(), args.clone())) {
            continue;
        }
        let objs: Vec<Term> = args.iter().map(|a| Term::object(a.clone())).collect();
        let v = Term::Real(*value);
        let with_s0 = |symbol: &str| {
            let mut a = objs.clone();
            a.push(Term::S0);
            Term::real_app(symbol, a)
        };
        match table.fn_class(func) {
            Some(FnClass::Static) | None => {
                out.push(Axiom::new(AxiomKind::Init, func.clone(), Formula::eq(Term::real_app(table.sc(func), objs.clone()), v)))
            }
            Some(FnClass::Dynamic) => out.push(Axiom::new(AxiomKind::Init, func.clone(), Formula::eq(with_s0(table.sc(func)), v))),
            Some(FnClass::Temporal) => {
                let init = &table.init_fluents[func];
                out.push(Axiom::new(AxiomKind::Init, init.clone(), Formula::eq(with_s0(init), v.clone())));
                out.push(Axiom::new(
                    AxiomKind::Init,
                    func.clone(),
                    Formula::TemporalEq {
                        symbol: table.sc(func).to_string(),
                        args: objs,
                        time: Term::Real(0.0),
                        situation: Term::S0,
                        value: v,
                    },
                ));
            }
        }
    }
    out
}

/// Natural-action declarations, `time(A(x̄,t)) = t`, and unique names for
/// action terms.
pub fn actions(defs: &[ActionDef]) -> Vec<Axiom> {
    let mut out = Vec::new();
    for d in defs.iter().filter(|d| d.origin.is_natural()) {
        out.push(Axiom::new(AxiomKind::NaturalDecl, d.symbol.clone(), Formula::Pred { symbol: "natural".into(), args: vec![d.term()] }));
    }
    for d in defs {
        out.push(Axiom::new(AxiomKind::TimeAxiom, d.symbol.clone(), Formula::eq(Term::time_of(d.term()), d.time.term())));
    }
    let fresh = |d: &ActionDef, prefix: &str, t: &str| -> (Vec<Var>, Term) {
        let xs: Vec<Var> = (1..=d.params.len()).map(|i| Var::object(format!("{prefix}{i}"))).collect();
        let t = Var::real(t);
        let term = Term::action(d.symbol.clone(), xs.iter().map(Var::term).collect(), t.term());
        (xs.into_iter().chain([t]).collect(), term)
    };
    for d in defs {
        let (l, lt) = fresh(d, "x", "t1");
        let (r, rt) = fresh(d, "y", "t2");
        let same = Formula::and(l.iter().zip(&r).map(|(a, b)| Formula::eq(a.term(), b.term())));
        out.push(Axiom::new(
            AxiomKind::Una,
            d.symbol.clone(),
            Formula::forall(l.into_iter().chain(r).collect(), Formula::implies(Formula::eq(lt, rt), same)),
        ));
    }
    for (i, a) in defs.iter().enumerate() {
        for b in &defs[i + 1..] {
            let (l, lt) = fresh(a, "x", "t1");
            let (r, rt) = fresh(b, "y", "t2");
            out.push(Axiom::new(
                AxiomKind::Una,
                format!("{} {}", a.symbol, b.symbol),
                Formula::forall(l.into_iter().chain(r).collect(), Formula::not(Formula::eq(lt, rt))),
            ));
        }
    }
    out
}
