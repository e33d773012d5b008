use super::{check_sorts, Formula, LogicError, Sort, Term, Var};

/// Decides whether `phi` is uniform in the situation variable `s`: no
/// `Poss`, no situation quantifier, no situation equality, and no
/// situation term other than `s` itself.
pub fn check_uniform(phi: &Formula, s: &Var) -> Result<bool, LogicError> {
    if s.sort != Sort::Situation {
        return Err(LogicError::IllSorted(format!("{} is not a situation variable", s.name)));
    }
    check_sorts(phi)?;
    Ok(formula_ok(phi, s))
}

fn term_ok(t: &Term, s: &Var) -> bool {
    match t {
        Term::Var(v) => v.sort != Sort::Situation || v == s,
        Term::S0 | Term::Do(..) => false,
        Term::Const(_, sort) => *sort != Sort::Situation,
        Term::Real(_) => true,
        Term::App { args, .. } | Term::Arith(_, args) => args.iter().all(|a| term_ok(a, s)),
        Term::Action { args, time, .. } => args.iter().all(|a| term_ok(a, s)) && term_ok(time, s),
        Term::Start(x) | Term::TimeOf(x) => term_ok(x, s),
        Term::Integral { integrand, lower, upper, .. } => {
            term_ok(integrand, s) && term_ok(lower, s) && term_ok(upper, s)
        }
    }
}

fn formula_ok(f: &Formula, s: &Var) -> bool {
    match f {
        Formula::Poss(..) => false,
        Formula::Pred { args, .. } => args.iter().all(|a| term_ok(a, s)),
        Formula::Fluent { args, situation, .. } => args.iter().all(|a| term_ok(a, s)) && term_ok(situation, s),
        Formula::TemporalEq { args, time, situation, value, .. } => {
            args.iter().all(|a| term_ok(a, s)) && term_ok(time, s) && term_ok(situation, s) && term_ok(value, s)
        }
        Formula::Compare(_, l, r) => l.sort() != Sort::Situation && term_ok(l, s) && term_ok(r, s),
        Formula::Not(g) => formula_ok(g, s),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().all(|g| formula_ok(g, s)),
        Formula::Implies(l, r) | Formula::Iff(l, r) => formula_ok(l, s) && formula_ok(r, s),
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            vs.iter().all(|v| v.sort != Sort::Situation) && formula_ok(body, s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::CmpOp;

    fn run(sit: Term) -> Formula {
        Formula::Fluent { symbol: "run".into(), args: vec![], situation: sit }
    }

    #[test]
    fn precondition_of_accelerate_is_uniform() {
        let s = Var::situation("s");
        let phi = Formula::And(vec![
            run(s.term()),
            Formula::Compare(CmpOp::Lt, Term::real_app("a", vec![s.term()]), Term::real_app("up_limit", vec![])),
        ]);
        assert!(check_uniform(&phi, &s).unwrap());
    }

    #[test]
    fn poss_is_not_uniform() {
        let s = Var::situation("s");
        let phi = Formula::Poss(Var::action("a").term(), s.term());
        assert!(!check_uniform(&phi, &s).unwrap());
    }

    #[test]
    fn foreign_situation_is_not_uniform() {
        let s = Var::situation("s");
        let s2 = Var::situation("s2");
        assert!(!check_uniform(&run(s2.term()), &s).unwrap());
        assert!(!check_uniform(&run(Term::S0), &s).unwrap());
        assert!(!check_uniform(&run(Term::do_(Var::action("a").term(), s.term())), &s).unwrap());
    }

    #[test]
    fn situation_quantifier_and_equality_rejected() {
        let s = Var::situation("s");
        let q = Formula::Exists(vec![Var::situation("s1")], Box::new(run(s.term())));
        assert!(!check_uniform(&q, &s).unwrap());
        let eq = Formula::eq(s.term(), s.term());
        assert!(!check_uniform(&eq, &s).unwrap());
    }

    #[test]
    fn ill_sorted_input_is_a_diagnostic() {
        let s = Var::situation("s");
        let bad = Formula::Fluent { symbol: "run".into(), args: vec![], situation: Term::Real(1.0) };
        assert!(check_uniform(&bad, &s).is_err());
    }
}
