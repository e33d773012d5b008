use std::collections::{BTreeMap, BTreeSet};

use super::{Formula, LogicError, Term, Var};

/// Simultaneous substitution map.
pub type Binding = BTreeMap<Var, Term>;

pub fn term_free_vars(t: &Term) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    collect_term(t, &mut Vec::new(), &mut out);
    out
}

/// Exact set of free variables of `phi`.
pub fn free_vars(phi: &Formula) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    collect_formula(phi, &mut Vec::new(), &mut out);
    out
}

fn collect_term(t: &Term, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        }
        Term::Const(..) | Term::Real(_) | Term::S0 => {}
        Term::App { args, .. } | Term::Arith(_, args) => {
            args.iter().for_each(|a| collect_term(a, bound, out));
        }
        Term::Action { args, time, .. } => {
            args.iter().for_each(|a| collect_term(a, bound, out));
            collect_term(time, bound, out);
        }
        Term::Do(a, s) => {
            collect_term(a, bound, out);
            collect_term(s, bound, out);
        }
        Term::Start(x) | Term::TimeOf(x) => collect_term(x, bound, out),
        Term::Integral { integrand, var, lower, upper } => {
            collect_term(lower, bound, out);
            collect_term(upper, bound, out);
            bound.push(var.clone());
            collect_term(integrand, bound, out);
            bound.pop();
        }
    }
}

fn collect_formula(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match f {
        Formula::Pred { args, .. } => args.iter().for_each(|a| collect_term(a, bound, out)),
        Formula::Fluent { args, situation, .. } => {
            args.iter().for_each(|a| collect_term(a, bound, out));
            collect_term(situation, bound, out);
        }
        Formula::TemporalEq { args, time, situation, value, .. } => {
            args.iter().for_each(|a| collect_term(a, bound, out));
            collect_term(time, bound, out);
            collect_term(situation, bound, out);
            collect_term(value, bound, out);
        }
        Formula::Compare(_, l, r) | Formula::Poss(l, r) => {
            collect_term(l, bound, out);
            collect_term(r, bound, out);
        }
        Formula::Not(g) => collect_formula(g, bound, out),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| collect_formula(g, bound, out)),
        Formula::Implies(l, r) | Formula::Iff(l, r) => {
            collect_formula(l, bound, out);
            collect_formula(r, bound, out);
        }
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let n = bound.len();
            bound.extend(vs.iter().cloned());
            collect_formula(body, bound, out);
            bound.truncate(n);
        }
    }
}

fn check_binding(binding: &Binding) -> Result<(), LogicError> {
    for (v, t) in binding {
        if v.sort != t.sort() {
            return Err(LogicError::SortMismatch { var: v.name.clone(), expected: v.sort, found: t.sort() });
        }
    }
    Ok(())
}

/// Capture-avoiding simultaneous substitution.
pub fn substitute(phi: &Formula, binding: &Binding) -> Result<Formula, LogicError> {
    check_binding(binding)?;
    Ok(subst_formula(phi, binding))
}

pub fn substitute_term(t: &Term, binding: &Binding) -> Result<Term, LogicError> {
    check_binding(binding)?;
    Ok(subst_term(t, binding))
}

/// Restricts `binding` for a scope that binds `vars`, renaming binders that
/// would capture a free variable of a substituted term.
fn enter_scope(vars: &[Var], binding: &Binding, body_free: &BTreeSet<Var>) -> (Vec<Var>, Binding) {
    let mut inner: Binding = binding.iter().filter(|(k, _)| !vars.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect();
    if inner.is_empty() {
        return (vars.to_vec(), inner);
    }
    let incoming: BTreeSet<String> =
        inner.values().flat_map(|t| term_free_vars(t).into_iter().map(|v| v.name)).collect();
    let mut taken: BTreeSet<String> = incoming.clone();
    taken.extend(body_free.iter().map(|v| v.name.clone()));
    taken.extend(vars.iter().map(|v| v.name.clone()));
    let mut renamed = Vec::with_capacity(vars.len());
    for v in vars {
        if incoming.contains(&v.name) {
            let mut i = 1;
            let fresh = loop {
                let cand = format!("{}_{}", v.name, i);
                if !taken.contains(&cand) {
                    break cand;
                }
                i += 1;
            };
            taken.insert(fresh.clone());
            let nv = Var::new(fresh, v.sort);
            inner.insert(v.clone(), Term::Var(nv.clone()));
            renamed.push(nv);
        } else {
            renamed.push(v.clone());
        }
    }
    (renamed, inner)
}

fn subst_term(t: &Term, b: &Binding) -> Term {
    if b.is_empty() {
        return t.clone();
    }
    match t {
        Term::Var(v) => b.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Const(..) | Term::Real(_) | Term::S0 => t.clone(),
        Term::App { symbol, args, sort } => Term::App {
            symbol: symbol.clone(),
            args: args.iter().map(|a| subst_term(a, b)).collect(),
            sort: *sort,
        },
        Term::Arith(op, args) => Term::Arith(*op, args.iter().map(|a| subst_term(a, b)).collect()),
        Term::Action { symbol, args, time } => Term::Action {
            symbol: symbol.clone(),
            args: args.iter().map(|a| subst_term(a, b)).collect(),
            time: Box::new(subst_term(time, b)),
        },
        Term::Do(a, s) => Term::do_(subst_term(a, b), subst_term(s, b)),
        Term::Start(s) => Term::start(subst_term(s, b)),
        Term::TimeOf(a) => Term::time_of(subst_term(a, b)),
        Term::Integral { integrand, var, lower, upper } => {
            let (vars, inner) = enter_scope(std::slice::from_ref(var), b, &term_free_vars(integrand));
            Term::Integral {
                integrand: Box::new(subst_term(integrand, &inner)),
                var: vars.into_iter().next().unwrap(),
                lower: Box::new(subst_term(lower, b)),
                upper: Box::new(subst_term(upper, b)),
            }
        }
    }
}

fn subst_formula(f: &Formula, b: &Binding) -> Formula {
    if b.is_empty() {
        return f.clone();
    }
    let st = |t: &Term| subst_term(t, b);
    match f {
        Formula::Pred { symbol, args } => Formula::Pred { symbol: symbol.clone(), args: args.iter().map(st).collect() },
        Formula::Fluent { symbol, args, situation } => Formula::Fluent {
            symbol: symbol.clone(),
            args: args.iter().map(st).collect(),
            situation: st(situation),
        },
        Formula::TemporalEq { symbol, args, time, situation, value } => Formula::TemporalEq {
            symbol: symbol.clone(),
            args: args.iter().map(st).collect(),
            time: st(time),
            situation: st(situation),
            value: st(value),
        },
        Formula::Compare(op, l, r) => Formula::Compare(*op, st(l), st(r)),
        Formula::Poss(a, s) => Formula::Poss(st(a), st(s)),
        Formula::Not(g) => Formula::not(subst_formula(g, b)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| subst_formula(g, b)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| subst_formula(g, b)).collect()),
        Formula::Implies(l, r) => Formula::implies(subst_formula(l, b), subst_formula(r, b)),
        Formula::Iff(l, r) => Formula::iff(subst_formula(l, b), subst_formula(r, b)),
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let (vars, inner) = enter_scope(vs, b, &free_vars(body));
            let body = Box::new(subst_formula(body, &inner));
            if matches!(f, Formula::Exists(..)) {
                Formula::Exists(vars, body)
            } else {
                Formula::Forall(vars, body)
            }
        }
    }
}
