//! Action and event effects as normalized effect axioms, and the successor
//! state axioms they compile into.

use crate::classify::FnClass;
use crate::logic::{substitute, substitute_term, Binding, Formula, Term, Var};
use crate::pddl::{Effect, Schema};

use super::hat::Hat;

#[derive(Debug, Clone, PartialEq)]
pub enum EffectTarget {
    Add { fluent: String, args: Vec<Term> },
    Del { fluent: String, args: Vec<Term> },
    /// `fluent(args, do(a,s)) = value`; `fluent` is an `F_init` symbol for
    /// effects on temporal functions.
    Value { fluent: String, args: Vec<Term>, value: Term },
}

impl EffectTarget {
    pub fn fluent(&self) -> &str {
        match self {
            EffectTarget::Add { fluent, .. } | EffectTarget::Del { fluent, .. } | EffectTarget::Value { fluent, .. } => {
                fluent
            }
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            EffectTarget::Add { args, .. } | EffectTarget::Del { args, .. } | EffectTarget::Value { args, .. } => args,
        }
    }
}

/// `a = A(params, t) ∧ condition → target(do(a, s))`, universally closed
/// over the parameters, the time and the `forall` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectAxiom {
    pub action: String,
    pub params: Vec<Var>,
    pub time: Var,
    pub qvars: Vec<Var>,
    /// Uniform in `s`; includes type guards of `forall` variables.
    pub condition: Formula,
    pub target: EffectTarget,
}

impl EffectAxiom {
    pub fn action_term(&self) -> Term {
        Term::action(self.action.clone(), self.params.iter().map(Var::term).collect(), self.time.term())
    }

    /// The axiom as a closed formula in one of the three effect shapes.
    pub fn formula(&self, a: &Var, s: &Var) -> Formula {
        let sit = Term::do_(a.term(), s.term());
        let head = Formula::and([Formula::eq(a.term(), self.action_term()), self.condition.clone()]);
        let mut vars: Vec<Var> = self.params.iter().cloned().chain([self.time.clone()]).chain(self.qvars.iter().cloned()).collect();
        let (head, target) = match &self.target {
            EffectTarget::Add { fluent, args } => {
                (head, Formula::Fluent { symbol: fluent.clone(), args: args.clone(), situation: sit })
            }
            EffectTarget::Del { fluent, args } => {
                (head, Formula::not(Formula::Fluent { symbol: fluent.clone(), args: args.clone(), situation: sit }))
            }
            EffectTarget::Value { fluent, args, value } => {
                let y = Var::real("y");
                vars.push(y.clone());
                let mut full = args.clone();
                full.push(sit);
                (
                    Formula::and([head, Formula::eq(y.term(), value.clone())]),
                    Formula::eq(Term::real_app(fluent.clone(), full), y.term()),
                )
            }
        };
        Formula::forall(vars, Formula::implies(head, target))
    }

    /// Disjunct contributed to the successor state axiom of the target
    /// fluent with argument variables `xs`: the existential closure of
    /// `a = A(..) ∧ xs = args ∧ Ψ [∧ y = value]`. Target arguments that are
    /// quantified variables are replaced by the matching `x_i` instead of
    /// an equation.
    pub fn ssa_case(&self, xs: &[Var], a: &Var, y: Option<&Term>) -> Formula {
        let mut qvars: Vec<Var> =
            self.params.iter().cloned().chain([self.time.clone()]).chain(self.qvars.iter().cloned()).collect();
        let mut binding = Binding::new();
        let mut pending = Vec::new();
        for (x, arg) in xs.iter().zip(self.target.args()) {
            match arg {
                Term::Var(v) if qvars.contains(v) && !binding.contains_key(v) => {
                    binding.insert(v.clone(), x.term());
                    qvars.retain(|q| q != v);
                }
                _ => pending.push((x, arg)),
            }
        }
        let st = |t: &Term| substitute_term(t, &binding).expect("object variables bound to object variables");
        let mut parts = vec![Formula::eq(a.term(), st(&self.action_term()))];
        parts.extend(pending.into_iter().map(|(x, arg)| Formula::eq(x.term(), st(arg))));
        parts.push(substitute(&self.condition, &binding).expect("sort-preserving binding"));
        if let (Some(y), EffectTarget::Value { value, .. }) = (y, &self.target) {
            parts.push(Formula::eq(y.clone(), st(value)));
        }
        Formula::exists(qvars, Formula::and(parts))
    }
}

/// Flattens an action or event effect into effect axioms (Table 2 followed
/// by the normalization into the three effect shapes).
pub fn tilde(schema: &Schema, action: &str, hat: &mut Hat<'_>) -> Vec<EffectAxiom> {
    let params = hat.bind(&schema.params);
    let time = match &hat.t {
        Term::Var(v) => v.clone(),
        _ => Var::real("t"),
    };
    let mut out = Vec::new();
    walk(&schema.effect, action, &params, &time, &mut Vec::new(), &mut Vec::new(), hat, &mut out);
    hat.unbind(schema.params.len());
    out
}

#[allow(clippy::too_many_arguments)]
fn walk(
    e: &Effect,
    action: &str,
    params: &[Var],
    time: &Var,
    qvars: &mut Vec<Var>,
    conds: &mut Vec<Formula>,
    hat: &mut Hat<'_>,
    out: &mut Vec<EffectAxiom>,
) {
    let mut emit = |target: EffectTarget, qvars: &[Var], conds: &[Formula]| {
        out.push(EffectAxiom {
            action: action.to_string(),
            params: params.to_vec(),
            time: time.clone(),
            qvars: qvars.to_vec(),
            condition: Formula::and(conds.to_vec()),
            target,
        })
    };
    match e {
        Effect::And(xs) => {
            for x in xs {
                walk(x, action, params, time, qvars, conds, hat, out);
            }
        }
        Effect::Add { pred, args } => emit(
            EffectTarget::Add { fluent: hat.table.sc(pred).to_string(), args: args.iter().map(|a| hat.arg(a)).collect() },
            qvars,
            conds,
        ),
        Effect::Del { pred, args } => emit(
            EffectTarget::Del { fluent: hat.table.sc(pred).to_string(), args: args.iter().map(|a| hat.arg(a)).collect() },
            qvars,
            conds,
        ),
        Effect::Num { op, head, value } => {
            let operand = hat.num(value);
            let value = match op.arith() {
                None => operand,
                Some(arith) => Term::Arith(arith, vec![hat.fhead(head), operand]),
            };
            let fluent = match hat.table.fn_class(&head.name) {
                Some(FnClass::Temporal) => hat.table.init_fluents[&head.name].clone(),
                _ => hat.table.sc(&head.name).to_string(),
            };
            let args = head.args.iter().map(|a| hat.arg(a)).collect();
            emit(EffectTarget::Value { fluent, args, value }, qvars, conds)
        }
        Effect::Forall(vs, body) => {
            let sc = hat.bind(vs);
            let guard = hat.guards(vs, &sc);
            let (nq, nc) = (qvars.len(), conds.len());
            qvars.extend(sc);
            if !guard.is_truth() {
                conds.push(guard);
            }
            walk(body, action, params, time, qvars, conds, hat, out);
            qvars.truncate(nq);
            conds.truncate(nc);
            hat.unbind(vs.len());
        }
        Effect::When(c, body) => {
            let cond = hat.gd(c);
            let nc = conds.len();
            conds.push(cond);
            walk(body, action, params, time, qvars, conds, hat, out);
            conds.truncate(nc);
        }
    }
}
