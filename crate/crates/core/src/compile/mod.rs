//! Compilation of a linked planning instance into a hybrid basic action
//! theory.

mod check;
mod effects;
mod hat;
mod init;
mod sea;
mod ssa;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify, ClassifyError, SymbolTable};
use crate::logic::{serialize_formula, Axiom, AxiomKind, CmpOp, Formula, Term, Var};
use crate::pddl::{PlanningInstance, SchemaKind, TypeExpr};

pub use check::{check_sea, check_well_defined, Finding, FindingTag};
pub use effects::{EffectAxiom, EffectTarget};
pub use hat::Hat;
pub use sea::{tau, Sea, SeaForm, Tca};
pub use ssa::{arg_vars, Ssa, SsaKind};

pub const DEFAULT_SEA_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(
        "expanding the evolution axiom of {fluent} needs {disjuncts} disjuncts, over the cap of {cap}; \
         drop --expand-sea to keep the lazy form"
    )]
    SeaCap { fluent: String, disjuncts: u128, cap: u128 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    pub expand_sea: bool,
    pub sea_cap: u128,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { expand_sea: false, sea_cap: DEFAULT_SEA_CAP }
    }
}

/// Where an action symbol comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Origin {
    Agent,
    Event,
    /// `begin_P` for the named process.
    Begin(String),
    End(String),
    /// Index into `SymbolTable::tils`.
    Til(usize),
}

impl Origin {
    pub fn is_natural(&self) -> bool {
        !matches!(self, Origin::Agent)
    }
}

/// An action symbol with its precondition axiom.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDef {
    pub symbol: String,
    /// Schema name in the PDDL files; the TIL action name otherwise.
    pub pddl: String,
    pub origin: Origin,
    pub params: Vec<Var>,
    pub types: Vec<TypeExpr>,
    pub time: Var,
    /// Right side of the precondition axiom, with the parameters, `t` and
    /// `s` free.
    pub precondition: Formula,
}

impl ActionDef {
    pub fn term(&self) -> Term {
        Term::action(self.symbol.clone(), self.params.iter().map(Var::term).collect(), self.time.term())
    }

    pub fn apa(&self) -> Formula {
        Formula::iff(Formula::Poss(self.term(), Var::situation("s").term()), self.precondition.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridBat {
    pub domain: String,
    pub problem: String,
    pub table: SymbolTable,
    pub actions: Vec<ActionDef>,
    /// Every effect axiom, in the order actions are declared.
    pub effects: Vec<EffectAxiom>,
    pub ssas: Vec<Ssa>,
    pub seas: Vec<Sea>,
    /// Unique-name axioms for objects and actions.
    pub una: Vec<Axiom>,
    /// Types, domain closure, `S0`, natural declarations and time axioms.
    pub initial: Vec<Axiom>,
    /// `Goal(s, t)`, with `s` and `t` free.
    pub goal: Formula,
    /// Latest TIL time, or 0.
    pub tils_horizon: f64,
    pub warnings: Vec<String>,
}

pub fn compile(inst: &PlanningInstance) -> Result<HybridBat, CompileError> {
    let table = classify(inst)?;
    let s = Var::situation("s");
    let t = Var::real("t");
    let mut actions = Vec::new();
    let mut effects = Vec::new();
    let mut hat = Hat::new(inst, &table, s.term(), t.term());

    for schema in inst.domain.actions.iter().chain(&inst.domain.events) {
        let symbol = table.sc(&schema.name).to_string();
        let params = hat.bind(&schema.params);
        let guards = hat.guards(&schema.params, &params);
        let pre = hat.gd(&schema.precondition);
        hat.unbind(params.len());
        actions.push(ActionDef {
            symbol: symbol.clone(),
            pddl: schema.name.clone(),
            origin: if schema.kind == SchemaKind::Event { Origin::Event } else { Origin::Agent },
            params,
            types: schema.params.iter().map(|p| p.ty.clone()).collect(),
            time: t.clone(),
            precondition: Formula::and([guards, pre]),
        });
        effects.extend(effects::tilde(schema, &symbol, &mut hat));
    }
    for schema in &inst.domain.processes {
        let syms = &table.processes[&schema.name];
        let params = hat.bind(&schema.params);
        let guards = hat.guards(&schema.params, &params);
        let pre = hat.gd(&schema.precondition);
        hat.unbind(params.len());
        let types: Vec<TypeExpr> = schema.params.iter().map(|p| p.ty.clone()).collect();
        let args: Vec<Term> = params.iter().map(Var::term).collect();
        for (symbol, origin, cond, target) in [
            (
                &syms.begin,
                Origin::Begin(schema.name.clone()),
                pre.clone(),
                EffectTarget::Add { fluent: syms.fluent.clone(), args: args.clone() },
            ),
            (
                &syms.end,
                Origin::End(schema.name.clone()),
                Formula::not(pre.clone()),
                EffectTarget::Del { fluent: syms.fluent.clone(), args: args.clone() },
            ),
        ] {
            actions.push(ActionDef {
                symbol: symbol.clone(),
                pddl: schema.name.clone(),
                origin,
                params: params.clone(),
                types: types.clone(),
                time: t.clone(),
                precondition: Formula::and([guards.clone(), cond]),
            });
            effects.push(EffectAxiom {
                action: symbol.clone(),
                params: params.clone(),
                time: t.clone(),
                qvars: vec![],
                condition: Formula::truth(),
                target,
            });
        }
    }
    for (k, til) in table.tils.iter().enumerate() {
        let fired = Formula::Fluent { symbol: til.fired.clone(), args: vec![], situation: s.term() };
        actions.push(ActionDef {
            symbol: til.action.clone(),
            pddl: til.action.clone(),
            origin: Origin::Til(k),
            params: vec![],
            types: vec![],
            time: t.clone(),
            precondition: Formula::and([Formula::eq(t.term(), Term::Real(til.time)), Formula::not(fired)]),
        });
        let effect = |target| EffectAxiom {
            action: til.action.clone(),
            params: vec![],
            time: t.clone(),
            qvars: vec![],
            condition: Formula::truth(),
            target,
        };
        for &i in &til.literals {
            let lit = &inst.problem.tils[i];
            let fluent = table.sc(&lit.pred).to_string();
            let args = lit.args.iter().map(|a| Term::object(a.clone())).collect();
            effects.push(effect(if lit.positive {
                EffectTarget::Add { fluent, args }
            } else {
                EffectTarget::Del { fluent, args }
            }));
        }
        effects.push(effect(EffectTarget::Add { fluent: til.fired.clone(), args: vec![] }));
    }

    let mut ssas: IndexMap<String, Ssa> = IndexMap::new();
    for name in table.dynamic_predicates() {
        let arity = inst.predicate(name).map_or(0, |d| d.params.len());
        ssas.insert(table.sc(name).to_string(), Ssa::new(table.sc(name), SsaKind::Relational, arity));
    }
    for til in &table.tils {
        ssas.insert(til.fired.clone(), Ssa::new(til.fired.clone(), SsaKind::Relational, 0));
    }
    for (name, p) in &table.processes {
        let arity = inst.domain.processes.iter().find(|s| s.name == *name).map_or(0, |s| s.params.len());
        ssas.insert(p.fluent.clone(), Ssa::new(p.fluent.clone(), SsaKind::Process, arity));
    }
    for name in table.functions_of(crate::classify::FnClass::Dynamic) {
        let arity = inst.function(name).map_or(0, |d| d.params.len());
        ssas.insert(table.sc(name).to_string(), Ssa::new(table.sc(name), SsaKind::Functional, arity));
    }
    for (name, init) in &table.init_fluents {
        let arity = inst.function(name).map_or(0, |d| d.params.len());
        let mut ssa = Ssa::new(init.clone(), SsaKind::Init, arity);
        ssa.temporal = Some(table.sc(name).to_string());
        ssas.insert(init.clone(), ssa);
    }
    for e in &effects {
        if let Some(ssa) = ssas.get_mut(e.target.fluent()) {
            ssa.push(e.clone());
        }
    }

    let seas = table.init_fluents.keys().map(|f| sea::build(inst, &table, f)).collect();

    let mut warnings = Vec::new();
    for (i, add) in effects.iter().enumerate() {
        let EffectTarget::Add { fluent, args } = &add.target else { continue };
        let clash = effects[i + 1..].iter().chain(&effects[..i]).any(|d| {
            matches!(&d.target, EffectTarget::Del { fluent: f, args: a } if f == fluent && a == args)
                && d.action == add.action
                && d.condition.is_truth()
                && add.condition.is_truth()
                && d.qvars.is_empty()
                && add.qvars.is_empty()
        });
        if clash {
            let atom = Formula::Fluent { symbol: fluent.clone(), args: args.clone(), situation: Var::situation("s").term() };
            warnings.push(format!("{} both adds and deletes {}; the add wins", add.action, atom));
        }
    }
    for f in &table.untouched_temporal {
        warnings.push(format!("no action changes {}; its initial-value fluent only carries the current value over", f));
    }

    let mut goal_hat = Hat::new(inst, &table, s.term(), t.term());
    let goal = goal_hat.gd(&inst.problem.goal);
    let tils_horizon = table.tils.last().map_or(0.0, |k| k.time);

    let mut una = Vec::new();
    let mut initial = Vec::new();
    for ax in init::objects(inst, &table).into_iter().chain(init::situation(inst, &table)).chain(init::actions(&actions)) {
        if ax.kind == AxiomKind::Una {
            una.push(ax);
        } else {
            initial.push(ax);
        }
    }

    Ok(HybridBat {
        domain: inst.domain.name.clone(),
        problem: inst.problem.name.clone(),
        table,
        actions,
        effects,
        ssas: ssas.into_values().collect(),
        seas,
        una,
        initial,
        goal,
        tils_horizon,
        warnings,
    })
}

impl HybridBat {
    pub fn action(&self, symbol: &str) -> Option<&ActionDef> {
        self.actions.iter().find(|a| a.symbol == symbol)
    }

    /// `∃t (t ≥ start(s) ∧ t ≥ T ∧ Goal(s, t))`.
    pub fn goal_axiom(&self) -> Formula {
        let s = Var::situation("s");
        let t = Var::real("t");
        Formula::exists(
            vec![t.clone()],
            Formula::and([
                Formula::Compare(CmpOp::Ge, t.term(), Term::start(s.term())),
                Formula::Compare(CmpOp::Ge, t.term(), Term::Real(self.tils_horizon)),
                self.goal.clone(),
            ]),
        )
    }

    /// Every axiom as a formula. Evolution axioms are expanded, which
    /// fails when one of them needs more than `cap` disjuncts.
    pub fn axioms(&self, cap: u128) -> Result<Vec<Axiom>, CompileError> {
        let mut out: Vec<Axiom> = self.una.clone();
        out.extend(self.initial.iter().cloned());
        out.extend(self.actions.iter().map(|a| Axiom::new(AxiomKind::Apa, a.symbol.clone(), a.apa())));
        out.extend(self.ssas.iter().map(|s| Axiom::new(AxiomKind::Ssa, s.fluent.clone(), s.formula())));
        for sea in &self.seas {
            out.push(Axiom::new(AxiomKind::Sea, sea.fluent.clone(), self.expand(sea, cap)?));
        }
        out.push(Axiom::new(AxiomKind::GoalDef, "goal", self.goal_axiom()));
        Ok(out)
    }

    fn expand(&self, sea: &Sea, cap: u128) -> Result<Formula, CompileError> {
        let n = sea.disjunct_count();
        if n > cap {
            return Err(CompileError::SeaCap { fluent: sea.fluent.clone(), disjuncts: n, cap });
        }
        Ok(sea.expanded())
    }

    /// The theory as text: one canonical formula per line, grouped under
    /// `;; <class>` headers. Evolution axioms stay in their lazy
    /// `(evolution ...)` form unless `expand_sea` is set.
    pub fn render(&self, opts: &CompileOptions) -> Result<String, CompileError> {
        let mut out = format!(";; hybrid basic action theory for problem {} of domain {}\n", self.problem, self.domain);
        out.push_str(";; foundational axioms for situations are implicit\n");
        let section = |name: &str, lines: Vec<String>, out: &mut String| {
            if lines.is_empty() {
                return;
            }
            out.push_str(&format!("\n;; {name}\n"));
            for l in lines {
                out.push_str(&l);
                out.push('\n');
            }
        };
        let of_kind = |kind: AxiomKind| -> Vec<String> {
            self.una.iter().chain(&self.initial).filter(|a| a.kind == kind).map(|a| serialize_formula(&a.formula)).collect()
        };
        for kind in [
            AxiomKind::TypeAxiom,
            AxiomKind::DomainClosure,
            AxiomKind::Una,
            AxiomKind::Init,
            AxiomKind::NaturalDecl,
            AxiomKind::TimeAxiom,
        ] {
            section(kind.label(), of_kind(kind), &mut out);
        }
        section("apa", self.actions.iter().map(|a| serialize_formula(&a.apa())).collect(), &mut out);
        section("ssa", self.ssas.iter().map(|s| serialize_formula(&s.formula())).collect(), &mut out);
        let mut seas = Vec::new();
        for sea in &self.seas {
            seas.push(if opts.expand_sea { serialize_formula(&self.expand(sea, opts.sea_cap)?) } else { sea.lazy_text() });
        }
        section("sea", seas, &mut out);
        section("goal", vec![serialize_formula(&self.goal_axiom())], &mut out);
        if !self.warnings.is_empty() {
            out.push('\n');
            for w in &self.warnings {
                out.push_str(&format!(";; warning: {w}\n"));
            }
        }
        Ok(out)
    }
}
