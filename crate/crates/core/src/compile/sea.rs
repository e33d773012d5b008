//! State evolution axioms for temporal fluents.

use crate::classify::SymbolTable;
use crate::logic::{substitute_term, Binding, Formula, Term, Var};
use crate::pddl::{Arg, PlanningInstance};

use super::hat::Hat;
use super::ssa::arg_vars;

/// A context with the rate the fluent changes at while it holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Tca {
    pub context: Formula,
    /// Mentions the integration variable `tau` in place of the time.
    pub rate: Term,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeaForm {
    /// One disjunct per subset of the entries, where the rates of the
    /// active entries add up.
    PowerSet(Vec<Tca>),
    /// Given contexts with their own rates plus a disjunct for none of them.
    Explicit(Vec<Tca>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sea {
    pub fluent: String,
    pub init: String,
    pub args: Vec<Var>,
    pub form: SeaForm,
}

pub fn tau() -> Var {
    Var::real("tau")
}

impl Sea {
    pub fn entries(&self) -> &[Tca] {
        match &self.form {
            SeaForm::PowerSet(e) | SeaForm::Explicit(e) => e,
        }
    }

    /// Number of disjuncts in the expanded axiom, saturating.
    pub fn disjunct_count(&self) -> u128 {
        match &self.form {
            SeaForm::PowerSet(e) => 1u128.checked_shl(e.len() as u32).unwrap_or(u128::MAX),
            SeaForm::Explicit(e) => e.len() as u128 + 1,
        }
    }

    /// `F(x̄, t, s)`.
    pub fn lhs_term(&self) -> Term {
        let s = Var::situation("s").term();
        let mut args: Vec<Term> = self.args.iter().map(Var::term).collect();
        args.push(Var::real("t").term());
        args.push(s);
        Term::real_app(self.fluent.clone(), args)
    }

    pub fn init_term(&self) -> Term {
        let mut args: Vec<Term> = self.args.iter().map(Var::term).collect();
        args.push(Var::situation("s").term());
        Term::real_app(self.init.clone(), args)
    }

    fn value(&self, rates: Vec<Term>) -> Term {
        let init = self.init_term();
        if rates.is_empty() {
            return init;
        }
        let integrand = if rates.len() == 1 { rates.into_iter().next().unwrap() } else { Term::Arith(crate::logic::ArithOp::Add, rates) };
        Term::add(
            init,
            Term::Integral {
                integrand: Box::new(integrand),
                var: tau(),
                lower: Box::new(Term::start(Var::situation("s").term())),
                upper: Box::new(Var::real("t").term()),
            },
        )
    }

    /// The full axiom `F(x̄,t,s) = y ↔ ⋁ disjuncts`, with `x̄`, `t`, `s`
    /// and `y` free. Callers bound the size through `disjunct_count`.
    pub fn expanded(&self) -> Formula {
        let y = Var::real("y").term();
        let lhs = Formula::TemporalEq {
            symbol: self.fluent.clone(),
            args: self.args.iter().map(Var::term).collect(),
            time: Var::real("t").term(),
            situation: Var::situation("s").term(),
            value: y.clone(),
        };
        let disjuncts: Vec<Formula> = match &self.form {
            SeaForm::PowerSet(entries) => (0u64..1 << entries.len())
                .map(|mask| {
                    let mut parts = Vec::new();
                    let mut rates = Vec::new();
                    for (i, e) in entries.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            parts.push(e.context.clone());
                            rates.push(e.rate.clone());
                        } else {
                            parts.push(Formula::not(e.context.clone()));
                        }
                    }
                    parts.push(Formula::eq(y.clone(), self.value(rates)));
                    Formula::and(parts)
                })
                .collect(),
            SeaForm::Explicit(entries) => {
                let mut out: Vec<Formula> = entries
                    .iter()
                    .map(|e| Formula::and([e.context.clone(), Formula::eq(y.clone(), self.value(vec![e.rate.clone()]))]))
                    .collect();
                let none = Formula::not(Formula::or(entries.iter().map(|e| e.context.clone())));
                out.push(Formula::and([none, Formula::eq(y.clone(), self.init_term())]));
                out
            }
        };
        Formula::iff(lhs, Formula::or(disjuncts))
    }

    /// `(evolution <fluent term> <init term> (<context> <rate>)*)`, the
    /// power-set axiom without enumerating the subsets.
    pub fn lazy_text(&self) -> String {
        let mut out = format!("(evolution {} {}", self.lhs_term(), self.init_term());
        if let SeaForm::Explicit(_) = self.form {
            out = format!("(evolution-explicit {} {}", self.lhs_term(), self.init_term());
        }
        for e in self.entries() {
            out.push_str(&format!(" ({} {})", e.context, e.rate));
        }
        out.push(')');
        out
    }
}

/// Power-set axiom for temporal function `f` (a PDDL name), collecting the
/// rate every process contributes. Process parameters that do not occur in
/// the increased head are grounded over the objects of their type; entries
/// with the same context are summed.
pub fn build(inst: &PlanningInstance, table: &SymbolTable, f: &str) -> Sea {
    let arity = inst.function(f).map_or(0, |d| d.params.len());
    let xs = arg_vars(arity);
    let s = Var::situation("s").term();
    let mut entries: Vec<Tca> = Vec::new();
    for p in &inst.domain.processes {
        let fluent = &table.processes[&p.name].fluent;
        for r in p.rates.iter().filter(|r| r.head.name == f) {
            let mut hat = Hat::new(inst, table, s.clone(), tau().term());
            let sc = hat.bind(&p.params);
            let rate = hat.num(&r.rate);
            let mut binding = Binding::new();
            for (x, a) in xs.iter().zip(&r.head.args) {
                if let Arg::Var(v) = a {
                    binding.insert(hat.var(v), x.term());
                }
            }
            hat.unbind(p.params.len());
            let surplus: Vec<usize> = (0..sc.len()).filter(|i| !binding.contains_key(&sc[*i])).collect();
            let domains: Vec<Vec<String>> = surplus.iter().map(|&i| inst.members(&p.params[i].ty)).collect();
            for choice in product(&domains) {
                let mut b = binding.clone();
                for (k, &i) in surplus.iter().enumerate() {
                    b.insert(sc[i].clone(), Term::object(choice[k].clone()));
                }
                let args = sc.iter().map(|v| b[v].clone()).collect();
                let context = Formula::Fluent { symbol: fluent.clone(), args, situation: s.clone() };
                let rate = substitute_term(&rate, &b).expect("object binding");
                match entries.iter_mut().find(|e| e.context == context) {
                    Some(e) => e.rate = Term::add(e.rate.clone(), rate),
                    None => entries.push(Tca { context, rate }),
                }
            }
        }
    }
    Sea { fluent: table.sc(f).to_string(), init: table.init_fluents[f].clone(), args: xs, form: SeaForm::PowerSet(entries) }
}

/// Cartesian product in lexicographic order; one empty tuple for no domains.
fn product(domains: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for d in domains {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<String>| {
                d.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}
