use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use thiserror::Error;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("problem is for domain {found}, not {expected}")]
    DomainMismatch { expected: String, found: String },
    #[error("{name} is declared both as {first} and as {second}")]
    NameCollision { name: String, first: &'static str, second: &'static str },
    #[error("unknown {what} {name} in {context}")]
    UnknownSymbol { what: &'static str, name: String, context: String },
    #[error("{name} expects {expected} argument(s), found {found} in {context}")]
    Arity { name: String, expected: usize, found: usize, context: String },
    #[error("unbound variable ?{var} in {context}")]
    UnboundVariable { var: String, context: String },
    #[error("undeclared type {ty} in {context}")]
    UndeclaredType { ty: String, context: String },
    #[error("cycle in the type hierarchy through {0}")]
    TypeCycle(String),
    #[error("{0}")]
    Invalid(String),
}

/// Declared primitive types with their parent type expressions. Parents
/// that are never declared themselves are added under `object`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TypeHierarchy {
    entries: IndexMap<String, TypeExpr>,
}

impl TypeHierarchy {
    pub fn entries(&self) -> impl Iterator<Item = (&String, &TypeExpr)> {
        self.entries.iter()
    }

    pub fn contains(&self, ty: &str) -> bool {
        ty == OBJECT || self.entries.contains_key(ty)
    }

    /// `ty` and all its ancestors, `object` included. Every branch of an
    /// `either` parent counts as an ancestor.
    pub fn ancestors(&self, ty: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![ty.to_string()];
        while let Some(t) = stack.pop() {
            if !out.insert(t.clone()) {
                continue;
            }
            if let Some(parent) = self.entries.get(&t) {
                stack.extend(parent.names().iter().cloned());
            }
        }
        out.insert(OBJECT.into());
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanningInstance {
    pub domain: Domain,
    pub problem: Problem,
    pub types: TypeHierarchy,
    /// Domain constants followed by problem objects.
    pub objects: IndexMap<String, TypeExpr>,
}

impl PlanningInstance {
    pub fn predicate(&self, name: &str) -> Option<&Decl> {
        self.domain.predicates.iter().find(|d| d.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&Decl> {
        self.domain.functions.iter().find(|d| d.name == name)
    }

    /// Action, event and process schemas in declaration order.
    pub fn schemas(&self) -> impl Iterator<Item = &Schema> {
        self.domain.actions.iter().chain(&self.domain.events).chain(&self.domain.processes)
    }

    /// Primitive types an object belongs to, ancestors included.
    pub fn object_types(&self, obj: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        if let Some(te) = self.objects.get(obj) {
            for n in te.names() {
                out.extend(self.types.ancestors(n));
            }
        }
        out.insert(OBJECT.into());
        out
    }

    /// Objects satisfying a type expression, in declaration order.
    pub fn members(&self, ty: &TypeExpr) -> Vec<String> {
        self.objects
            .keys()
            .filter(|o| {
                let tys = self.object_types(o);
                ty.names().iter().any(|n| tys.contains(n))
            })
            .cloned()
            .collect()
    }
}

struct Scope<'a> {
    inst: &'a Linker<'a>,
    context: String,
    vars: Vec<String>,
    /// Constants allowed as arguments: domain constants in schemas, all
    /// objects in the problem.
    problem_level: bool,
}

struct Linker<'a> {
    domain: &'a Domain,
    types: TypeHierarchy,
    constants: BTreeSet<String>,
    objects: BTreeSet<String>,
    preds: BTreeMap<String, usize>,
    funcs: BTreeMap<String, usize>,
}

pub fn link(domain: Domain, problem: Problem) -> Result<PlanningInstance, LinkError> {
    if problem.domain != domain.name {
        return Err(LinkError::DomainMismatch { expected: domain.name.clone(), found: problem.domain.clone() });
    }
    let types = hierarchy(&domain)?;
    check_namespace(&domain, &problem)?;

    let mut objects = IndexMap::new();
    for o in domain.constants.iter().chain(&problem.objects) {
        for t in o.ty.names() {
            if !types.contains(t) {
                return Err(LinkError::UndeclaredType { ty: t.clone(), context: format!("object {}", o.name) });
            }
        }
        if objects.insert(o.name.clone(), o.ty.clone()).is_some() {
            return Err(LinkError::Invalid(format!("object {} declared twice", o.name)));
        }
    }

    let mut preds = BTreeMap::new();
    for d in &domain.predicates {
        check_params(&types, &d.params, &format!("predicate {}", d.name))?;
        if preds.insert(d.name.clone(), d.params.len()).is_some() {
            return Err(LinkError::Invalid(format!("predicate {} declared twice", d.name)));
        }
    }
    let mut funcs = BTreeMap::new();
    for d in &domain.functions {
        check_params(&types, &d.params, &format!("function {}", d.name))?;
        if funcs.insert(d.name.clone(), d.params.len()).is_some() {
            return Err(LinkError::Invalid(format!("function {} declared twice", d.name)));
        }
    }

    let linker = Linker {
        domain: &domain,
        types,
        constants: domain.constants.iter().map(|c| c.name.clone()).collect(),
        objects: objects.keys().cloned().collect(),
        preds,
        funcs,
    };
    for s in domain.actions.iter().chain(&domain.events).chain(&domain.processes) {
        linker.schema(s)?;
    }
    linker.problem(&problem)?;
    let types = linker.types;
    Ok(PlanningInstance { domain, problem, types, objects })
}

fn hierarchy(domain: &Domain) -> Result<TypeHierarchy, LinkError> {
    let mut entries: IndexMap<String, TypeExpr> = IndexMap::new();
    for t in &domain.types {
        if t.name == OBJECT || t.name == "number" {
            continue;
        }
        if entries.insert(t.name.clone(), t.ty.clone()).is_some() {
            return Err(LinkError::Invalid(format!("type {} declared twice", t.name)));
        }
    }
    let parents: Vec<String> = entries.values().flat_map(|te| te.names().to_vec()).collect();
    for p in parents {
        if p == "number" {
            return Err(LinkError::Invalid("number cannot be a parent type".into()));
        }
        if p != OBJECT && !entries.contains_key(&p) {
            entries.insert(p, TypeExpr::object());
        }
    }
    // depth-first cycle check
    fn visit(
        t: &str,
        entries: &IndexMap<String, TypeExpr>,
        state: &mut BTreeMap<String, u8>,
    ) -> Result<(), LinkError> {
        match state.get(t) {
            Some(1) => return Err(LinkError::TypeCycle(t.to_string())),
            Some(_) => return Ok(()),
            None => {}
        }
        state.insert(t.to_string(), 1);
        if let Some(te) = entries.get(t) {
            for p in te.names() {
                visit(p, entries, state)?;
            }
        }
        state.insert(t.to_string(), 2);
        Ok(())
    }
    let mut state = BTreeMap::new();
    for t in entries.keys() {
        visit(t, &entries, &mut state)?;
    }
    Ok(TypeHierarchy { entries })
}

fn check_namespace(domain: &Domain, problem: &Problem) -> Result<(), LinkError> {
    let mut seen: BTreeMap<&str, &'static str> = BTreeMap::new();
    let mut entries: Vec<(&str, &'static str)> = Vec::new();
    entries.extend(domain.types.iter().filter(|t| t.name != OBJECT).map(|t| (t.name.as_str(), "type")));
    entries.extend(domain.constants.iter().chain(&problem.objects).map(|o| (o.name.as_str(), "object")));
    entries.extend(domain.predicates.iter().map(|d| (d.name.as_str(), "predicate")));
    entries.extend(domain.functions.iter().map(|d| (d.name.as_str(), "function")));
    entries.extend(domain.actions.iter().map(|s| (s.name.as_str(), "action")));
    entries.extend(domain.events.iter().map(|s| (s.name.as_str(), "event")));
    entries.extend(domain.processes.iter().map(|s| (s.name.as_str(), "process")));
    for (name, kind) in entries {
        match seen.get(name) {
            Some(first) if *first != kind || matches!(kind, "action" | "event" | "process") => {
                return Err(LinkError::NameCollision { name: name.to_string(), first, second: kind });
            }
            _ => {
                seen.insert(name, kind);
            }
        }
    }
    Ok(())
}

fn check_params(types: &TypeHierarchy, params: &[Typed], context: &str) -> Result<(), LinkError> {
    let mut names = BTreeSet::new();
    for p in params {
        if !names.insert(&p.name) {
            return Err(LinkError::Invalid(format!("duplicate parameter ?{} in {context}", p.name)));
        }
        for t in p.ty.names() {
            if !types.contains(t) {
                return Err(LinkError::UndeclaredType { ty: t.clone(), context: context.to_string() });
            }
        }
    }
    Ok(())
}

impl<'a> Linker<'a> {
    fn schema(&'a self, s: &Schema) -> Result<(), LinkError> {
        let context = format!("{} {}", &s.kind.keyword()[1..], s.name);
        check_params(&self.types, &s.params, &context)?;
        let mut scope =
            Scope { inst: self, context, vars: s.params.iter().map(|p| p.name.clone()).collect(), problem_level: false };
        scope.gd(&s.precondition)?;
        scope.effect(&s.effect)?;
        for r in &s.rates {
            scope.fhead(&r.head)?;
            if let Some(a) = r.head.args.iter().find(|a| !matches!(a, Arg::Var(_))) {
                return Err(LinkError::Invalid(format!(
                    "process {} increases {} with a constant argument {a:?}; heads take process parameters",
                    s.name, r.head.name
                )));
            }
            let distinct: BTreeSet<_> = r.head.args.iter().collect();
            if distinct.len() != r.head.args.len() {
                return Err(LinkError::Invalid(format!(
                    "process {} repeats a variable in the head of {}",
                    s.name, r.head.name
                )));
            }
            scope.num(&r.rate)?;
        }
        Ok(())
    }

    fn problem(&'a self, p: &Problem) -> Result<(), LinkError> {
        let scope = Scope { inst: self, context: "initial state".into(), vars: Vec::new(), problem_level: true };
        for f in &p.init {
            match f {
                InitFact::Atom { pred, args } => scope.ground_atom(pred, args, &self.preds, "predicate")?,
                InitFact::Value { func, args, .. } => scope.ground_atom(func, args, &self.funcs, "function")?,
            }
        }
        for t in &p.tils {
            if t.time < 0.0 {
                return Err(LinkError::Invalid(format!("timed initial literal at negative time {}", t.time)));
            }
            scope.ground_atom(&t.pred, &t.args, &self.preds, "predicate")?;
        }
        let mut goal = Scope { inst: self, context: "goal".into(), vars: Vec::new(), problem_level: true };
        goal.gd(&p.goal)
    }
}

impl Scope<'_> {
    fn arg(&self, a: &Arg) -> Result<(), LinkError> {
        match a {
            Arg::Var(v) if self.vars.contains(v) => Ok(()),
            Arg::Var(v) => Err(LinkError::UnboundVariable { var: v.clone(), context: self.context.clone() }),
            Arg::Name(n) => {
                let known = if self.problem_level { &self.inst.objects } else { &self.inst.constants };
                if known.contains(n) {
                    Ok(())
                } else {
                    Err(LinkError::UnknownSymbol { what: "object", name: n.clone(), context: self.context.clone() })
                }
            }
        }
    }

    fn atom(&self, name: &str, args: &[Arg], table: &BTreeMap<String, usize>, what: &'static str) -> Result<(), LinkError> {
        let Some(&n) = table.get(name) else {
            return Err(LinkError::UnknownSymbol { what, name: name.to_string(), context: self.context.clone() });
        };
        if n != args.len() {
            return Err(LinkError::Arity {
                name: name.to_string(),
                expected: n,
                found: args.len(),
                context: self.context.clone(),
            });
        }
        args.iter().try_for_each(|a| self.arg(a))
    }

    fn ground_atom(&self, name: &str, args: &[String], table: &BTreeMap<String, usize>, what: &'static str) -> Result<(), LinkError> {
        let args: Vec<Arg> = args.iter().map(|a| Arg::Name(a.clone())).collect();
        self.atom(name, &args, table, what)
    }

    fn fhead(&self, h: &FHead) -> Result<(), LinkError> {
        self.atom(&h.name, &h.args, &self.inst.funcs, "function")
    }

    fn num(&self, e: &NumExpr) -> Result<(), LinkError> {
        match e {
            NumExpr::Number(_) => Ok(()),
            NumExpr::Func(h) => self.fhead(h),
            NumExpr::Neg(x) => self.num(x),
            NumExpr::Bin(_, l, r) => {
                self.num(l)?;
                self.num(r)
            }
        }
    }

    fn bind(&mut self, vars: &[Typed]) -> Result<usize, LinkError> {
        check_params(&self.inst.types, vars, &self.context)?;
        let n = self.vars.len();
        self.vars.extend(vars.iter().map(|v| v.name.clone()));
        Ok(n)
    }

    fn gd(&mut self, g: &Gd) -> Result<(), LinkError> {
        match g {
            Gd::Atom { pred, args } => {
                if self.inst.domain.processes.iter().any(|p| &p.name == pred) {
                    return Err(LinkError::Invalid(format!("process atom {pred} in {}", self.context)));
                }
                self.atom(pred, args, &self.inst.preds, "predicate")
            }
            Gd::Equal(l, r) => {
                self.arg(l)?;
                self.arg(r)
            }
            Gd::Cmp(_, l, r) => {
                self.num(l)?;
                self.num(r)
            }
            Gd::Not(x) => self.gd(x),
            Gd::And(xs) | Gd::Or(xs) => xs.iter().try_for_each(|x| self.gd(x)),
            Gd::Imply(l, r) => {
                self.gd(l)?;
                self.gd(r)
            }
            Gd::Exists(vs, b) | Gd::Forall(vs, b) => {
                let n = self.bind(vs)?;
                let r = self.gd(b);
                self.vars.truncate(n);
                r
            }
        }
    }

    fn effect(&mut self, e: &Effect) -> Result<(), LinkError> {
        match e {
            Effect::And(xs) => xs.iter().try_for_each(|x| self.effect(x)),
            Effect::Add { pred, args } | Effect::Del { pred, args } => {
                self.atom(pred, args, &self.inst.preds, "predicate")
            }
            Effect::Num { head, value, .. } => {
                self.fhead(head)?;
                self.num(value)
            }
            Effect::Forall(vs, b) => {
                let n = self.bind(vs)?;
                let r = self.effect(b);
                self.vars.truncate(n);
                r
            }
            Effect::When(c, b) => {
                self.gd(c)?;
                self.effect(b)
            }
        }
    }
}
