//! Partition of predicates and functions by how they change, and the SC
//! vocabulary derived from an instance.

use std::collections::BTreeSet;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::logic::{is_reserved, Signature, SymbolClass};
use crate::pddl::{Effect, PlanningInstance, SchemaKind, OBJECT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("{0} is increased by a process and has no declaration")]
    Undeclared(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PredClass {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FnClass {
    Static,
    Dynamic,
    Temporal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProcessSymbols {
    pub fluent: String,
    pub begin: String,
    pub end: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TilSymbols {
    pub time: f64,
    pub action: String,
    pub fired: String,
    /// Indices into the problem's TIL list, in file order.
    pub literals: Vec<usize>,
}

/// Classification of every PDDL symbol plus the derived SC vocabulary.
/// Maps are keyed by PDDL name and iterate in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolTable {
    pub predicates: IndexMap<String, PredClass>,
    pub functions: IndexMap<String, FnClass>,
    /// SC symbol for every PDDL predicate, function, type and schema.
    pub sc_names: IndexMap<String, String>,
    /// `F -> F_init` for each temporal function.
    pub init_fluents: IndexMap<String, String>,
    pub processes: IndexMap<String, ProcessSymbols>,
    /// Temporal functions whose initial value no action or event changes.
    pub untouched_temporal: Vec<String>,
    pub tils: Vec<TilSymbols>,
    pub signature: Signature,
}

impl SymbolTable {
    pub fn sc<'a>(&'a self, pddl: &'a str) -> &'a str {
        self.sc_names.get(pddl).map(String::as_str).unwrap_or(pddl)
    }

    pub fn pred_class(&self, name: &str) -> Option<PredClass> {
        self.predicates.get(name).copied()
    }

    pub fn fn_class(&self, name: &str) -> Option<FnClass> {
        self.functions.get(name).copied()
    }

    pub fn static_predicates(&self) -> impl Iterator<Item = &String> {
        self.predicates.iter().filter(|(_, c)| **c == PredClass::Static).map(|(n, _)| n)
    }

    pub fn dynamic_predicates(&self) -> impl Iterator<Item = &String> {
        self.predicates.iter().filter(|(_, c)| **c == PredClass::Dynamic).map(|(n, _)| n)
    }

    pub fn functions_of(&self, class: FnClass) -> impl Iterator<Item = &String> {
        self.functions.iter().filter(move |(_, c)| **c == class).map(|(n, _)| n)
    }
}

fn collect_effect(e: &Effect, preds: &mut BTreeSet<String>, fns: &mut BTreeSet<String>) {
    match e {
        Effect::And(xs) => xs.iter().for_each(|x| collect_effect(x, preds, fns)),
        Effect::Add { pred, .. } | Effect::Del { pred, .. } => {
            preds.insert(pred.clone());
        }
        Effect::Num { head, .. } => {
            fns.insert(head.name.clone());
        }
        Effect::Forall(_, b) | Effect::When(_, b) => collect_effect(b, preds, fns),
    }
}

struct Names {
    used: BTreeSet<String>,
}

impl Names {
    /// `base`, or `base` with trailing underscores until it is unused and
    /// not a reserved word of the axiom text.
    fn fresh(&mut self, base: &str) -> String {
        let mut n = base.to_string();
        while is_reserved(&n) || self.used.contains(&n) {
            n.push('_');
        }
        self.used.insert(n.clone());
        n
    }
}

pub fn classify(inst: &PlanningInstance) -> Result<SymbolTable, ClassifyError> {
    let dom = &inst.domain;
    let mut eff_preds = BTreeSet::new();
    let mut eff_fns = BTreeSet::new();
    for s in dom.actions.iter().chain(&dom.events) {
        collect_effect(&s.effect, &mut eff_preds, &mut eff_fns);
    }
    eff_preds.extend(inst.problem.tils.iter().map(|t| t.pred.clone()));
    let temporal: BTreeSet<String> =
        dom.processes.iter().flat_map(|p| p.rates.iter().map(|r| r.head.name.clone())).collect();
    for f in &temporal {
        if inst.function(f).is_none() {
            return Err(ClassifyError::Undeclared(f.clone()));
        }
    }

    let predicates: IndexMap<String, PredClass> = dom
        .predicates
        .iter()
        .map(|d| {
            let c = if eff_preds.contains(&d.name) { PredClass::Dynamic } else { PredClass::Static };
            (d.name.clone(), c)
        })
        .collect();
    let functions: IndexMap<String, FnClass> = dom
        .functions
        .iter()
        .map(|d| {
            let c = if temporal.contains(&d.name) {
                FnClass::Temporal
            } else if eff_fns.contains(&d.name) {
                FnClass::Dynamic
            } else {
                FnClass::Static
            };
            (d.name.clone(), c)
        })
        .collect();

    // PDDL names keep their spelling unless they clash with the axiom
    // text's reserved words; derived names avoid every PDDL name.
    let mut names = Names { used: BTreeSet::new() };
    names.used.extend(inst.objects.keys().cloned());
    let pddl_symbols: Vec<&String> = inst
        .types
        .entries()
        .map(|(t, _)| t)
        .chain(dom.predicates.iter().map(|d| &d.name))
        .chain(dom.functions.iter().map(|d| &d.name))
        .chain(inst.schemas().map(|s| &s.name))
        .collect();
    names.used.extend(pddl_symbols.iter().filter(|n| !is_reserved(n)).map(|n| (*n).clone()));
    let mut sc_names = IndexMap::new();
    for n in pddl_symbols {
        let sc = if is_reserved(n) { names.fresh(n) } else { n.clone() };
        sc_names.insert(n.clone(), sc);
    }

    let mut init_fluents = IndexMap::new();
    for f in functions.iter().filter(|(_, c)| **c == FnClass::Temporal).map(|(n, _)| n) {
        let base = format!("{}_init", sc_names[f]);
        init_fluents.insert(f.clone(), names.fresh(&base));
    }
    let mut processes = IndexMap::new();
    for p in &dom.processes {
        let fluent = sc_names[&p.name].clone();
        let begin = names.fresh(&format!("begin_{fluent}"));
        let end = names.fresh(&format!("end_{fluent}"));
        processes.insert(p.name.clone(), ProcessSymbols { fluent, begin, end });
    }
    let untouched_temporal =
        init_fluents.keys().filter(|f| !eff_fns.contains(*f)).cloned().collect();

    let mut times: Vec<f64> = inst.problem.tils.iter().map(|t| t.time).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let tils: Vec<TilSymbols> = times
        .iter()
        .enumerate()
        .map(|(k, &time)| TilSymbols {
            time,
            action: names.fresh(&format!("til_{}", k + 1)),
            fired: names.fresh(&format!("fired_{}", k + 1)),
            literals: inst.problem.tils.iter().enumerate().filter(|(_, t)| t.time == time).map(|(i, _)| i).collect(),
        })
        .collect();

    let mut sig = Signature::new();
    for o in inst.objects.keys() {
        sig.insert(o.clone(), SymbolClass::Object, 0);
    }
    for (t, _) in inst.types.entries() {
        if t != OBJECT {
            sig.insert(sc_names[t].clone(), SymbolClass::TypePredicate, 1);
        }
    }
    for d in &dom.predicates {
        let class = match predicates[&d.name] {
            PredClass::Static => SymbolClass::StaticPredicate,
            PredClass::Dynamic => SymbolClass::RelationalFluent,
        };
        sig.insert(sc_names[&d.name].clone(), class, d.params.len());
    }
    for d in &dom.functions {
        let class = match functions[&d.name] {
            FnClass::Static => SymbolClass::StaticFunction,
            FnClass::Dynamic => SymbolClass::FunctionalFluent,
            FnClass::Temporal => {
                sig.insert(init_fluents[&d.name].clone(), SymbolClass::InitFluent, d.params.len());
                SymbolClass::TemporalFluent
            }
        };
        sig.insert(sc_names[&d.name].clone(), class, d.params.len());
    }
    for s in inst.schemas() {
        let arity = s.params.len();
        match s.kind {
            SchemaKind::Action => sig.insert(sc_names[&s.name].clone(), SymbolClass::Action, arity),
            SchemaKind::Event => sig.insert(sc_names[&s.name].clone(), SymbolClass::NaturalAction, arity),
            SchemaKind::Process => {
                let p = &processes[&s.name];
                sig.insert(p.fluent.clone(), SymbolClass::ProcessFluent, arity);
                sig.insert(p.begin.clone(), SymbolClass::NaturalAction, arity);
                sig.insert(p.end.clone(), SymbolClass::NaturalAction, arity);
            }
        }
    }
    for t in &tils {
        sig.insert(t.action.clone(), SymbolClass::NaturalAction, 0);
        sig.insert(t.fired.clone(), SymbolClass::RelationalFluent, 0);
    }

    Ok(SymbolTable { predicates, functions, sc_names, init_fluents, processes, untouched_temporal, tils, signature: sig })
}
