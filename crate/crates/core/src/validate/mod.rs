//! Execution of timestamped plans under a compiled theory: natural actions
//! fire as soon as they are possible, agent actions are checked against
//! their precondition axioms, and the goal is searched for after the last
//! step.

mod eval;
mod plan;
mod report;
mod trace;
mod world;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::classify::{FnClass, PredClass};
use crate::compile::{ActionDef, EffectTarget, HybridBat, Origin};
use crate::logic::SymbolClass;
use crate::numeric::{find_trigger, Cond, Evolution, NumericError, RExpr, Trigger};
use crate::pddl::{InitFact, PlanningInstance};

pub use eval::{object_tuples, Eval, EvalError, GroundState};
pub use plan::{parse_plan, Plan, PlanError, PlanStep};
pub use report::{ExecutedAction, Failure, Report, Verdict};
pub use trace::{format_time, trace_csv};
pub use world::{tuples, GroundAtom, World};

/// Numeric settings of a validation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Integration and sampling step.
    pub step: f64,
    /// Time tolerance of trigger searches.
    pub eps_time: f64,
    /// Value tolerance of comparisons.
    pub eps_value: f64,
    /// How far past the current situation's start naturals are searched for.
    pub horizon: f64,
    /// The goal is searched up to `max(last plan time, T)` plus this.
    pub goal_margin: f64,
    /// Natural firings allowed at one instant before giving up.
    pub natural_cap: usize,
    /// How far a plan step naming a natural action may be from the time
    /// it actually fires.
    pub claim_tol: f64,
    /// Value for functions the initial state leaves unset.
    pub default_value: Option<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            step: 1e-2,
            eps_time: 1e-6,
            eps_value: 1e-9,
            horizon: 1e4,
            goal_margin: 1000.0,
            natural_cap: 100_000,
            claim_tol: 1e-3,
            default_value: None,
        }
    }
}

impl Config {
    pub fn check(&self) -> Result<(), SetupError> {
        let positive = [("step", self.step), ("horizon", self.horizon)];
        for (name, x) in positive {
            if !(x.is_finite() && x > 0.0) {
                return Err(SetupError::Config(format!("{name} must be positive, got {x}")));
            }
        }
        let nonneg =
            [("eps-time", self.eps_time), ("eps-value", self.eps_value), ("goal-margin", self.goal_margin), ("claim-tol", self.claim_tol)];
        for (name, x) in nonneg {
            if !(x.is_finite() && x >= 0.0) {
                return Err(SetupError::Config(format!("{name} must be nonnegative, got {x}")));
            }
        }
        if self.natural_cap == 0 {
            return Err(SetupError::Config("natural-cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Problems that prevent a run from starting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetupError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("the initial state gives no value for {0}; set one in the problem or pass a default value")]
    MissingInitialValue(String),
    #[error("line {line}: unknown action {name}")]
    UnknownAction { line: usize, name: String },
    #[error("line {line}: {name} takes {expected} arguments, got {found}")]
    Arity { line: usize, name: String, expected: usize, found: usize },
    #[error("line {line}: unknown object {name}")]
    UnknownObject { line: usize, name: String },
}

/// Failure to compute a successor state.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("conflicting effects on {atom}: {first} and {second}")]
    Conflict { atom: String, first: f64, second: f64 },
    #[error("{atom} starts at {evolution} but its initial value is {init}")]
    Inconsistent { atom: String, evolution: f64, init: f64 },
    #[error("{0} is not an action")]
    UnknownAction(String),
}

impl From<NumericError> for StepError {
    fn from(e: NumericError) -> Self {
        StepError::Eval(e.into())
    }
}

/// A situation reached during a run and the action that led to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Situation {
    /// Index into `Report::actions`; `None` for the initial situation.
    pub action: Option<usize>,
    pub state: GroundState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub report: Report,
    pub situations: Vec<Situation>,
    /// Where the last situation's trajectory is cut off: the goal time for
    /// valid plans, otherwise the failure time when it is later than the
    /// last start.
    pub end: f64,
}

/// A natural action that can fire next.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalCandidate {
    pub action: usize,
    pub args: Vec<String>,
    pub trigger: Trigger,
}

pub struct Validator<'a> {
    inst: &'a PlanningInstance,
    bat: &'a HybridBat,
    world: World,
    cfg: Config,
    /// Ground natural actions: index into `bat.actions` and arguments.
    naturals: Vec<(usize, Vec<String>)>,
}

fn key(symbol: &str, args: &[String]) -> String {
    if args.is_empty() {
        format!("({symbol})")
    } else {
        format!("({symbol} {})", args.join(" "))
    }
}

impl<'a> Validator<'a> {
    pub fn new(inst: &'a PlanningInstance, bat: &'a HybridBat, cfg: Config) -> Result<Self, SetupError> {
        cfg.check()?;
        let world = World::new(inst, &bat.table);
        let naturals = bat
            .actions
            .iter()
            .enumerate()
            .filter(|(_, d)| d.origin.is_natural())
            .flat_map(|(i, d)| tuples(inst, &d.types).into_iter().map(move |args| (i, args)))
            .collect();
        Ok(Validator { inst, bat, world, cfg, naturals })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    pub fn bat(&self) -> &HybridBat {
        self.bat
    }

    /// Index of an action symbol in `HybridBat::actions`.
    pub fn action_index(&self, symbol: &str) -> Option<usize> {
        self.bat.actions.iter().position(|d| d.symbol == symbol)
    }

    pub fn initial_state(&self) -> Result<GroundState, SetupError> {
        let table = &self.bat.table;
        let mut rel = BTreeSet::new();
        let mut values: BTreeMap<GroundAtom, f64> = BTreeMap::new();
        for f in &self.inst.problem.init {
            match f {
                InitFact::Atom { pred, args } if table.pred_class(pred) == Some(PredClass::Dynamic) => {
                    rel.insert(GroundAtom::new(table.sc(pred), args.clone()));
                }
                InitFact::Value { func, args, value } if table.fn_class(func) != Some(FnClass::Static) => {
                    values.entry(GroundAtom::new(table.sc(func), args.clone())).or_insert(*value);
                }
                _ => {}
            }
        }
        let lookup = |atom: &GroundAtom| {
            values.get(atom).copied().or(self.cfg.default_value).ok_or_else(|| SetupError::MissingInitialValue(atom.to_string()))
        };
        let fns = self.world.dynamic.iter().map(|a| Ok((a.clone(), lookup(a)?))).collect::<Result<_, SetupError>>()?;
        let init_vals = self.world.temporal.iter().map(lookup).collect::<Result<_, _>>()?;
        Ok(GroundState { rel, fns, init_vals, active: BTreeSet::new(), start: 0.0 })
    }

    fn eval<'b>(&'b self, state: &'b GroundState, time: &'b str) -> Eval<'b> {
        Eval::new(self.bat, &self.world, state, time, self.cfg.eps_value)
    }

    /// The trajectories of all ground temporal fluents in `state`.
    pub fn evolution(&self, state: &GroundState) -> Result<Evolution, EvalError> {
        let mut rates = Vec::with_capacity(self.world.temporal.len());
        for atom in &self.world.temporal {
            let sea = self
                .bat
                .seas
                .iter()
                .find(|s| s.fluent == atom.symbol)
                .ok_or_else(|| EvalError::Unsupported(format!("no evolution axiom for {atom}")))?;
            let mut ev = self.eval(state, "tau");
            for (x, o) in sea.args.iter().zip(&atom.args) {
                ev.bind(&x.name, o);
            }
            let mut active = Vec::new();
            for e in sea.entries() {
                match ev.cond(&e.context)? {
                    Cond::Const(true) => active.push(ev.rexpr(&e.rate)?),
                    Cond::Const(false) => {}
                    _ => return Err(EvalError::Unsupported(e.context.to_string())),
                }
            }
            rates.push(match active.len() {
                0 => None,
                1 => active.pop(),
                _ => Some(RExpr::Add(active)),
            });
        }
        Ok(Evolution::new(state.start, state.init_vals.clone(), rates, self.cfg.step))
    }

    /// The precondition of a ground action as a condition on the time.
    pub fn precondition(&self, state: &GroundState, def: &ActionDef, args: &[String]) -> Result<Cond, EvalError> {
        let mut ev = self.eval(state, &def.time.name);
        for (v, o) in def.params.iter().zip(args) {
            ev.bind(&v.name, o);
        }
        ev.cond(&def.precondition)
    }

    pub fn poss(&self, state: &GroundState, action: usize, args: &[String], t: f64) -> Result<bool, EvalError> {
        if t < state.start {
            return Ok(false);
        }
        let cond = self.precondition(state, &self.bat.actions[action], args)?;
        let evo = self.evolution(state)?;
        Ok(cond.eval(t, &evo.values_at(t)?, self.cfg.eps_value)?)
    }

    /// Successor state after `action(args)` at `t`, and whether anything
    /// other than the start time changed.
    pub fn apply(&self, state: &GroundState, action: usize, args: &[String], t: f64) -> Result<(GroundState, bool), StepError> {
        let def = self.bat.actions.get(action).ok_or_else(|| StepError::UnknownAction(action.to_string()))?;
        let evo = self.evolution(state)?;
        let now = evo.values_at(t)?;
        let eps = self.cfg.eps_value;
        let mut adds = BTreeSet::new();
        let mut dels = BTreeSet::new();
        let mut values: BTreeMap<GroundAtom, f64> = BTreeMap::new();
        for e in self.bat.effects.iter().filter(|e| e.action == def.symbol) {
            let mut ev = self.eval(state, &e.time.name);
            for (v, o) in e.params.iter().zip(args) {
                ev.bind(&v.name, o);
            }
            for q in object_tuples(&self.world.objects, e.qvars.len()) {
                for (v, o) in e.qvars.iter().zip(&q) {
                    ev.bind(&v.name, o);
                }
                let fired = ev.cond(&e.condition)?.eval(t, &now, eps)?;
                if fired {
                    let atom = GroundAtom::new(
                        e.target.fluent(),
                        e.target.args().iter().map(|a| ev.object(a)).collect::<Result<_, _>>()?,
                    );
                    match &e.target {
                        EffectTarget::Add { .. } => {
                            adds.insert(atom);
                        }
                        EffectTarget::Del { .. } => {
                            dels.insert(atom);
                        }
                        EffectTarget::Value { value, .. } => {
                            let y = ev.rexpr(value)?.eval(t, &now)?;
                            if !y.is_finite() {
                                return Err(NumericError::Diverged { time: t }.into());
                            }
                            if let Some(&prev) = values.get(&atom) {
                                if (prev - y).abs() > eps {
                                    return Err(StepError::Conflict { atom: atom.to_string(), first: prev, second: y });
                                }
                            }
                            values.insert(atom, y);
                        }
                    }
                }
                ev.unbind(e.qvars.len());
            }
        }

        let class = |s: &str| self.bat.table.signature.get(s).map(|i| i.class);
        let mut next = state.clone();
        next.start = t;
        next.init_vals = now.clone();
        for atom in &dels {
            match class(&atom.symbol) {
                Some(SymbolClass::ProcessFluent) => next.active.remove(atom),
                _ => next.rel.remove(atom),
            };
        }
        // Adds win over deletes of the same atom.
        for atom in adds {
            match class(&atom.symbol) {
                Some(SymbolClass::ProcessFluent) => next.active.insert(atom),
                _ => next.rel.insert(atom),
            };
        }
        for (atom, y) in values {
            if class(&atom.symbol) == Some(SymbolClass::InitFluent) {
                let temporal = self
                    .bat
                    .seas
                    .iter()
                    .find(|s| s.init == atom.symbol)
                    .map(|s| s.fluent.clone())
                    .ok_or_else(|| EvalError::Unsupported(atom.to_string()))?;
                let target = GroundAtom::new(temporal, atom.args.clone());
                let i = self.world.temporal_index(&target).ok_or_else(|| EvalError::Undefined(target.to_string()))?;
                next.init_vals[i] = y;
            } else {
                next.fns.insert(atom, y);
            }
        }
        // The new situation's trajectories must start at the initial values.
        let check = self.evolution(&next)?.values_at(t)?;
        for (i, (a, b)) in check.iter().zip(&next.init_vals).enumerate() {
            if !a.is_finite() || (a - b).abs() > eps {
                return Err(StepError::Inconsistent { atom: self.world.temporal[i].to_string(), evolution: *a, init: *b });
            }
        }
        let changed = next.rel != state.rel || next.fns != state.fns || next.active != state.active || next.init_vals != now;
        Ok((next, changed))
    }

    /// The natural action that fires first in `[start, hi]` (`[start, hi)`
    /// when `strict`), ties broken by the serialized ground action.
    pub fn next_natural(
        &self,
        state: &GroundState,
        hi: f64,
        strict: bool,
        skip: &BTreeSet<String>,
    ) -> Result<Option<NaturalCandidate>, EvalError> {
        let evo = self.evolution(state)?;
        let mut best: Option<(String, NaturalCandidate)> = None;
        for (i, args) in &self.naturals {
            let def = &self.bat.actions[*i];
            let k = key(&def.symbol, args);
            if skip.contains(&k) {
                continue;
            }
            let active = |p: &str| state.active.contains(&GroundAtom::new(self.bat.table.processes[p].fluent.clone(), args.clone()));
            match &def.origin {
                Origin::Begin(p) if active(p) => continue,
                Origin::End(p) if !active(p) => continue,
                _ => {}
            }
            let cond = self.precondition(state, def, args)?;
            if cond == Cond::Const(false) {
                continue;
            }
            let bound = best.as_ref().map_or(hi, |(_, b)| b.trigger.time.min(hi));
            let Some(trigger) = find_trigger(&cond, &evo, state.start, bound, self.cfg.eps_time, self.cfg.eps_value)? else {
                continue;
            };
            if strict && trigger.time >= hi {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bk, b)) => trigger.time < b.trigger.time || (trigger.time == b.trigger.time && k < *bk),
            };
            if better {
                best = Some((k, NaturalCandidate { action: *i, args: args.clone(), trigger }));
            }
        }
        Ok(best.map(|(_, c)| c))
    }

    /// Earliest `t ≥ max(start, T)`, up to `hi`, at which the goal holds.
    pub fn goal_witness(&self, state: &GroundState, hi: f64) -> Result<Option<Trigger>, EvalError> {
        let lo = state.start.max(self.bat.tils_horizon);
        if lo > hi {
            return Ok(None);
        }
        let cond = self.eval(state, "t").cond(&self.bat.goal)?;
        let evo = self.evolution(state)?;
        Ok(find_trigger(&cond, &evo, lo, hi, self.cfg.eps_time, self.cfg.eps_value)?)
    }

    fn resolve(&self, step: &PlanStep) -> Result<usize, SetupError> {
        let by_symbol = self.bat.actions.iter().position(|d| d.symbol == step.action);
        let by_name = || {
            self.bat
                .actions
                .iter()
                .position(|d| d.pddl == step.action && !matches!(d.origin, Origin::Begin(_) | Origin::End(_)))
        };
        let i = by_symbol
            .or_else(by_name)
            .ok_or_else(|| SetupError::UnknownAction { line: step.line, name: step.action.clone() })?;
        let def = &self.bat.actions[i];
        if def.params.len() != step.args.len() {
            return Err(SetupError::Arity {
                line: step.line,
                name: step.action.clone(),
                expected: def.params.len(),
                found: step.args.len(),
            });
        }
        if let Some(bad) = step.args.iter().find(|a| !self.inst.objects.contains_key(*a)) {
            return Err(SetupError::UnknownObject { line: step.line, name: bad.clone() });
        }
        Ok(i)
    }

    /// Runs `plan` from the initial state.
    pub fn validate(&self, plan: &Plan) -> Result<Run, SetupError> {
        let resolved = plan.steps.iter().map(|s| self.resolve(s)).collect::<Result<Vec<_>, _>>()?;
        let state = self.initial_state()?;
        let mut run = Runner {
            v: self,
            situations: vec![Situation { action: None, state: state.clone() }],
            state,
            actions: Vec::new(),
            notes: Vec::new(),
            skip: BTreeSet::new(),
            same_instant: 0,
        };
        let outcome = run.run(plan, &resolved);
        let (verdict, failure, goal_time) = match outcome {
            Ok(t) => (Verdict::Valid, None, Some(t)),
            Err(h) => (h.verdict, Some(Failure { step: h.step, line: h.step.map(|i| plan.steps[i].line), time: h.time, message: h.message }), None),
        };
        let final_start = run.state.start;
        let end = goal_time.or(failure.as_ref().map(|f| f.time)).unwrap_or(final_start).max(final_start);
        Ok(Run {
            report: Report { verdict, failure, goal_time, actions: run.actions, final_start, notes: run.notes },
            situations: run.situations,
            end,
        })
    }
}

struct Halt {
    verdict: Verdict,
    step: Option<usize>,
    time: f64,
    message: String,
}

impl Halt {
    fn numeric(step: Option<usize>, time: f64, e: impl std::fmt::Display) -> Halt {
        Halt { verdict: Verdict::NumericError, step, time, message: e.to_string() }
    }
}

struct Runner<'v, 'a> {
    v: &'v Validator<'a>,
    state: GroundState,
    situations: Vec<Situation>,
    actions: Vec<ExecutedAction>,
    notes: Vec<String>,
    /// Naturals whose firing would change nothing, until something does.
    skip: BTreeSet<String>,
    /// Naturals fired since time last advanced.
    same_instant: usize,
}

impl Runner<'_, '_> {
    fn record(&mut self, action: usize, args: &[String], time: f64, step: Option<usize>, next: GroundState) -> usize {
        let def = &self.v.bat.actions[action];
        self.actions.push(ExecutedAction {
            time,
            symbol: def.symbol.clone(),
            pddl: def.pddl.clone(),
            args: args.to_vec(),
            natural: def.origin.is_natural(),
            step,
        });
        self.state = next;
        self.situations.push(Situation { action: Some(self.actions.len() - 1), state: self.state.clone() });
        self.actions.len() - 1
    }

    /// Fires the next natural action due by `limit`, if any, and returns
    /// its index in the executed sequence.
    fn fire_next(&mut self, limit: f64, strict: bool, step: Option<usize>) -> Result<Option<usize>, Halt> {
        let v = self.v;
        loop {
            let hi = limit.min(self.state.start + v.cfg.horizon);
            let err_time = self.state.start;
            let Some(c) = v.next_natural(&self.state, hi, strict, &self.skip).map_err(|e| Halt::numeric(step, err_time, e))? else {
                return Ok(None);
            };
            let t = c.trigger.time;
            let (next, changed) = v.apply(&self.state, c.action, &c.args, t).map_err(|e| Halt::numeric(step, t, e))?;
            let k = key(&v.bat.actions[c.action].symbol, &c.args);
            if !changed {
                self.skip.insert(k);
                continue;
            }
            self.skip.clear();
            if t > self.state.start {
                self.same_instant = 0;
            }
            self.same_instant += 1;
            if self.same_instant > v.cfg.natural_cap {
                return Err(Halt {
                    verdict: Verdict::NaturalActionViolation,
                    step,
                    time: t,
                    message: format!("more than {} natural actions fire at t = {t} without time advancing", v.cfg.natural_cap),
                });
            }
            if let Some(note) = c.trigger.note {
                self.notes.push(format!("{k} at t = {t}: {note}"));
            }
            return Ok(Some(self.record(c.action, &c.args, t, None, next)));
        }
    }

    fn claimable(&self, j: usize, action: usize, args: &[String], time: f64) -> bool {
        let a = &self.actions[j];
        a.natural
            && a.step.is_none()
            && a.symbol == self.v.bat.actions[action].symbol
            && a.args == args
            && (a.time - time).abs() <= self.v.cfg.claim_tol
    }

    fn run(&mut self, plan: &Plan, resolved: &[usize]) -> Result<f64, Halt> {
        let v = self.v;
        for (i, (step, &action)) in plan.steps.iter().zip(resolved).enumerate() {
            let tau = step.time;
            let def = &v.bat.actions[action];
            if def.origin.is_natural() {
                if let Some(j) = (0..self.actions.len()).find(|&j| self.claimable(j, action, &step.args, tau)) {
                    self.actions[j].step = Some(i);
                    continue;
                }
                loop {
                    match self.fire_next(tau + v.cfg.claim_tol, false, Some(i))? {
                        Some(j) if self.claimable(j, action, &step.args, tau) => {
                            self.actions[j].step = Some(i);
                            break;
                        }
                        Some(_) => {}
                        None => {
                            return Err(Halt {
                                verdict: Verdict::NaturalActionViolation,
                                step: Some(i),
                                time: tau,
                                message: format!("the plan has {} at t = {tau}, but it does not occur then", key(&def.symbol, &step.args)),
                            })
                        }
                    }
                }
                continue;
            }
            while self.fire_next(tau, false, Some(i))?.is_some() {}
            let fail = |message: String| Halt { verdict: Verdict::PreconditionFailure, step: Some(i), time: tau, message };
            if let Some(prev) = self.actions.iter().rev().find(|a| !a.natural) {
                if prev.time == tau {
                    return Err(fail(format!("{} happens at the same instant as {}", step, prev.term())));
                }
            }
            if tau < self.state.start {
                return Err(fail(format!("t = {tau} precedes the start {} of the current situation", self.state.start)));
            }
            let ok = v.poss(&self.state, action, &step.args, tau).map_err(|e| Halt::numeric(Some(i), tau, e))?;
            if !ok {
                return Err(fail(format!("the precondition of {} does not hold", key(&def.symbol, &step.args))));
            }
            let (next, _) = v.apply(&self.state, action, &step.args, tau).map_err(|e| Halt::numeric(Some(i), tau, e))?;
            self.skip.clear();
            if tau > self.state.start {
                self.same_instant = 0;
            }
            self.record(action, &step.args, tau, Some(i), next);
        }

        let last = plan.steps.last().map_or(0.0, |s| s.time);
        let hi = last.max(v.bat.tils_horizon) + v.cfg.goal_margin;
        loop {
            let start = self.state.start;
            let witness = v.goal_witness(&self.state, hi).map_err(|e| Halt::numeric(None, start, e))?;
            let fired = match &witness {
                Some(w) => self.fire_next(w.time, true, None)?,
                None => self.fire_next(hi, false, None)?,
            };
            match (fired, witness) {
                (Some(_), _) => {}
                (None, Some(w)) => {
                    if let Some(note) = w.note {
                        self.notes.push(format!("goal at t = {}: {note}", w.time));
                    }
                    return Ok(w.time);
                }
                (None, None) => {
                    return Err(Halt {
                        verdict: Verdict::GoalUnreached,
                        step: None,
                        time: self.state.start,
                        message: format!("the goal does not hold at any t in [{}, {hi}]", self.state.start.max(v.bat.tils_horizon)),
                    })
                }
            }
        }
    }
}
