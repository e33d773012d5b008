use thiserror::Error;

use super::ast::*;
use crate::logic::{ArithOp, CmpOp};
use crate::sexpr::{self, Pos, SExpr, SyntaxError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: {msg}")]
    Malformed { pos: Pos, msg: String },
    #[error("{pos}: unsupported requirement {name}")]
    Unsupported { pos: Pos, name: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax(e) => e.pos(),
            ParseError::Malformed { pos, .. } | ParseError::Unsupported { pos, .. } => *pos,
        }
    }
}

type Result<T> = std::result::Result<T, ParseError>;

const SUPPORTED: &[&str] = &[
    ":adl",
    ":fluents",
    ":typing",
    ":timed-initial-literals",
    ":time",
    ":negative-preconditions",
    // components implied by the flags above
    ":strips",
    ":equality",
    ":conditional-effects",
    ":existential-preconditions",
    ":universal-preconditions",
    ":quantified-preconditions",
    ":disjunctive-preconditions",
    ":numeric-fluents",
];

fn bad<T>(e: &SExpr, msg: impl Into<String>) -> Result<T> {
    Err(ParseError::Malformed { pos: e.pos(), msg: msg.into() })
}

fn atom(e: &SExpr) -> Result<String> {
    match e.as_atom() {
        Some(a) => Ok(a.to_ascii_lowercase()),
        None => bad(e, format!("expected a name, found {e}")),
    }
}

fn list(e: &SExpr) -> Result<&[SExpr]> {
    match e.as_list() {
        Some(l) => Ok(l),
        None => bad(e, format!("expected a list, found {e}")),
    }
}

fn head(e: &SExpr) -> Option<String> {
    e.as_list()?.first()?.as_atom().map(|a| a.to_ascii_lowercase())
}

pub(crate) fn parse_number(s: &str) -> Option<f64> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if !body.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }
    s.parse().ok().filter(|x: &f64| x.is_finite())
}

fn variable(e: &SExpr) -> Result<String> {
    let a = atom(e)?;
    match a.strip_prefix('?') {
        Some(v) if !v.is_empty() => Ok(v.to_string()),
        _ => bad(e, format!("expected a variable, found {a}")),
    }
}

fn arg(e: &SExpr) -> Result<Arg> {
    let a = atom(e)?;
    if parse_number(&a).is_some() {
        return bad(e, format!("expected an object or variable, found number {a}"));
    }
    Ok(match a.strip_prefix('?') {
        Some(v) => Arg::Var(v.to_string()),
        None => Arg::Name(a),
    })
}

fn type_expr(e: &SExpr) -> Result<TypeExpr> {
    if let Some(a) = e.as_atom() {
        return Ok(TypeExpr::Name(a.to_ascii_lowercase()));
    }
    let items = list(e)?;
    if head(e).as_deref() != Some("either") || items.len() < 2 {
        return bad(e, "expected a type name or (either <type>+)");
    }
    Ok(TypeExpr::Either(items[1..].iter().map(atom).collect::<Result<_>>()?))
}

/// `a b - t c - (either u w) d` with untyped trailing names typed `object`.
fn typed_list(items: &[SExpr], name: fn(&SExpr) -> Result<String>) -> Result<Vec<Typed>> {
    let mut out = Vec::new();
    let mut pending = Vec::new();
    let mut i = 0;
    while i < items.len() {
        if items[i].as_atom() == Some("-") {
            let Some(te) = items.get(i + 1) else {
                return bad(&items[i], "missing type after '-'");
            };
            if pending.is_empty() {
                return bad(&items[i], "type without names");
            }
            let ty = type_expr(te)?;
            out.extend(pending.drain(..).map(|n| Typed { name: n, ty: ty.clone() }));
            i += 2;
        } else {
            pending.push(name(&items[i])?);
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|n| Typed { name: n, ty: TypeExpr::object() }));
    Ok(out)
}

fn requirements(e: &SExpr) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for r in &list(e)?[1..] {
        let name = atom(r)?;
        if !SUPPORTED.contains(&name.as_str()) {
            return Err(ParseError::Unsupported { pos: r.pos(), name });
        }
        out.push(name);
    }
    Ok(out)
}

fn define<'a>(text_root: &'a SExpr, kind: &str) -> Result<(String, &'a [SExpr])> {
    if head(text_root).as_deref() != Some("define") {
        return bad(text_root, "expected (define ...)");
    }
    let items = list(text_root)?;
    let Some(name_form) = items.get(1) else {
        return bad(text_root, format!("missing ({kind} <name>)"));
    };
    match name_form.as_list() {
        Some([k, n]) if k.as_atom().map(str::to_ascii_lowercase).as_deref() == Some(kind) => {
            Ok((atom(n)?, &items[2..]))
        }
        _ => bad(name_form, format!("expected ({kind} <name>)")),
    }
}

fn root(text: &str) -> Result<SExpr> {
    Ok(sexpr::parse_one(text)?)
}

pub fn parse_domain(text: &str) -> Result<Domain> {
    let r = root(text)?;
    let (name, sections) = define(&r, "domain")?;
    let mut d = Domain { name, ..Domain::default() };
    for sec in sections {
        let Some(h) = head(sec) else {
            return bad(sec, "expected a domain section");
        };
        let items = list(sec)?;
        match h.as_str() {
            ":requirements" => d.requirements.extend(requirements(sec)?),
            ":types" => d.types.extend(typed_list(&items[1..], atom)?),
            ":constants" => d.constants.extend(typed_list(&items[1..], atom)?),
            ":predicates" => {
                for p in &items[1..] {
                    d.predicates.push(decl(p)?);
                }
            }
            ":functions" => d.functions.extend(functions(&items[1..])?),
            ":action" => d.actions.push(schema(sec, SchemaKind::Action)?),
            ":event" => d.events.push(schema(sec, SchemaKind::Event)?),
            ":process" => d.processes.push(schema(sec, SchemaKind::Process)?),
            ":durative-action" => {
                return Err(ParseError::Unsupported { pos: sec.pos(), name: ":durative-actions".into() })
            }
            ":derived" => return Err(ParseError::Unsupported { pos: sec.pos(), name: ":derived-predicates".into() }),
            other => return bad(sec, format!("unknown domain section {other}")),
        }
    }
    Ok(d)
}

fn decl(e: &SExpr) -> Result<Decl> {
    let items = list(e)?;
    let Some(n) = items.first() else {
        return bad(e, "empty signature");
    };
    Ok(Decl { name: atom(n)?, params: typed_list(&items[1..], variable)? })
}

fn functions(items: &[SExpr]) -> Result<Vec<Decl>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        if items[i].as_atom() == Some("-") {
            match items.get(i + 1).and_then(|t| t.as_atom()) {
                Some(t) if t.eq_ignore_ascii_case("number") => i += 2,
                _ => return bad(&items[i], "functions must be number-valued"),
            }
        } else {
            out.push(decl(&items[i])?);
            i += 1;
        }
    }
    Ok(out)
}

fn schema(e: &SExpr, kind: SchemaKind) -> Result<Schema> {
    let items = list(e)?;
    let Some(n) = items.get(1) else {
        return bad(e, format!("{} without a name", kind.keyword()));
    };
    let mut s = Schema {
        kind,
        name: atom(n)?,
        params: Vec::new(),
        precondition: Gd::truth(),
        effect: Effect::And(Vec::new()),
        rates: Vec::new(),
    };
    let mut i = 2;
    while i < items.len() {
        let key = atom(&items[i])?;
        let Some(val) = items.get(i + 1) else {
            return bad(&items[i], format!("missing value for {key}"));
        };
        match key.as_str() {
            ":parameters" => s.params = typed_list(list(val)?, variable)?,
            ":precondition" => s.precondition = gd(val)?,
            ":effect" if kind == SchemaKind::Process => s.rates = process_effect(val)?,
            ":effect" => s.effect = effect(val, false)?,
            other => return bad(&items[i], format!("unknown schema key {other}")),
        }
        i += 2;
    }
    Ok(s)
}

fn fhead(e: &SExpr) -> Result<FHead> {
    if let Some(a) = e.as_atom() {
        return Ok(FHead { name: a.to_ascii_lowercase(), args: Vec::new() });
    }
    let items = list(e)?;
    let Some(n) = items.first() else {
        return bad(e, "empty function term");
    };
    Ok(FHead { name: atom(n)?, args: items[1..].iter().map(arg).collect::<Result<_>>()? })
}

fn num_expr(e: &SExpr) -> Result<NumExpr> {
    if let Some(a) = e.as_atom() {
        return match parse_number(a) {
            Some(x) => Ok(NumExpr::Number(x)),
            None if a == "#t" => bad(e, "#t is only allowed as (* #t <f-exp>) in process effects"),
            None => bad(e, format!("expected a number or (function ...), found {a}")),
        };
    }
    let items = list(e)?;
    let op = match head(e).as_deref() {
        Some("+") => Some(ArithOp::Add),
        Some("-") => Some(ArithOp::Sub),
        Some("*") => Some(ArithOp::Mul),
        Some("/") => Some(ArithOp::Div),
        _ => None,
    };
    match (op, items.len()) {
        (Some(ArithOp::Sub), 2) => Ok(NumExpr::Neg(Box::new(num_expr(&items[1])?))),
        (Some(op), 3) => Ok(NumExpr::Bin(op, Box::new(num_expr(&items[1])?), Box::new(num_expr(&items[2])?))),
        // n-ary sums and products fold to the left
        (Some(op @ (ArithOp::Add | ArithOp::Mul)), n) if n > 3 => {
            let mut acc = num_expr(&items[1])?;
            for it in &items[2..] {
                acc = NumExpr::Bin(op, Box::new(acc), Box::new(num_expr(it)?));
            }
            Ok(acc)
        }
        (Some(op), _) => bad(e, format!("wrong operand count for {}", op.symbol())),
        (None, _) => Ok(NumExpr::Func(fhead(e)?)),
    }
}

fn quantified<'a>(items: &'a [SExpr], e: &SExpr) -> Result<(Vec<Typed>, &'a SExpr)> {
    match items {
        [_, vars, body] => Ok((typed_list(list(vars)?, variable)?, body)),
        _ => bad(e, "expected (<quantifier> (<typed variables>) <body>)"),
    }
}

pub(crate) fn gd(e: &SExpr) -> Result<Gd> {
    let items = list(e)?;
    if items.is_empty() {
        return Ok(Gd::truth());
    }
    let h = head(e).ok_or_else(|| ParseError::Malformed { pos: e.pos(), msg: "expected a goal description".into() })?;
    let one = |i: usize| -> Result<&SExpr> {
        if items.len() != i + 1 {
            return bad(e, format!("{h} expects {i} operand(s)"));
        }
        Ok(&items[i])
    };
    Ok(match h.as_str() {
        "and" => Gd::And(items[1..].iter().map(gd).collect::<Result<_>>()?),
        "or" => Gd::Or(items[1..].iter().map(gd).collect::<Result<_>>()?),
        "not" => Gd::Not(Box::new(gd(one(1)?)?)),
        "imply" => {
            one(2)?;
            Gd::Imply(Box::new(gd(&items[1])?), Box::new(gd(&items[2])?))
        }
        "exists" | "forall" => {
            let (vars, body) = quantified(items, e)?;
            let body = Box::new(gd(body)?);
            if h == "exists" {
                Gd::Exists(vars, body)
            } else {
                Gd::Forall(vars, body)
            }
        }
        op if CmpOp::from_symbol(op).is_some() => {
            one(2)?;
            let cmp = CmpOp::from_symbol(op).unwrap();
            let is_obj = |x: &SExpr| x.as_atom().is_some_and(|a| parse_number(a).is_none());
            if cmp == CmpOp::Eq && is_obj(&items[1]) && is_obj(&items[2]) {
                Gd::Equal(arg(&items[1])?, arg(&items[2])?)
            } else {
                Gd::Cmp(cmp, num_expr(&items[1])?, num_expr(&items[2])?)
            }
        }
        _ => Gd::Atom { pred: h, args: items[1..].iter().map(arg).collect::<Result<_>>()? },
    })
}

fn effect(e: &SExpr, in_when: bool) -> Result<Effect> {
    let items = list(e)?;
    if items.is_empty() {
        return Ok(Effect::And(Vec::new()));
    }
    let h = head(e).ok_or_else(|| ParseError::Malformed { pos: e.pos(), msg: "expected an effect".into() })?;
    if let Some(op) = AssignOp::from_keyword(&h) {
        if items.len() != 3 {
            return bad(e, format!("{h} expects a function head and a value"));
        }
        return Ok(Effect::Num { op, head: fhead(&items[1])?, value: num_expr(&items[2])? });
    }
    Ok(match h.as_str() {
        "and" => Effect::And(items[1..].iter().map(|x| effect(x, in_when)).collect::<Result<_>>()?),
        "not" => match items {
            [_, inner] if inner.as_list().is_some_and(|l| !l.is_empty()) => {
                let l = list(inner)?;
                let pred = atom(&l[0])?;
                if pred == "not" || pred == "and" {
                    return bad(inner, "expected an atom under not");
                }
                Effect::Del { pred, args: l[1..].iter().map(arg).collect::<Result<_>>()? }
            }
            _ => return bad(e, "expected (not <atom>)"),
        },
        "forall" => {
            let (vars, body) = quantified(items, e)?;
            Effect::Forall(vars, Box::new(effect(body, in_when)?))
        }
        "when" => {
            if in_when {
                return bad(e, "nested when");
            }
            match items {
                [_, cond, body] => Effect::When(gd(cond)?, Box::new(effect(body, true)?)),
                _ => return bad(e, "expected (when <gd> <effect>)"),
            }
        }
        _ => Effect::Add { pred: h, args: items[1..].iter().map(arg).collect::<Result<_>>()? },
    })
}

fn process_effect(e: &SExpr) -> Result<Vec<ProcessRate>> {
    let items = list(e)?;
    if items.is_empty() {
        return Ok(Vec::new());
    }
    if head(e).as_deref() == Some("and") {
        return items[1..].iter().map(process_rate).collect();
    }
    Ok(vec![process_rate(e)?])
}

fn process_rate(e: &SExpr) -> Result<ProcessRate> {
    const SHAPE: &str = "process effects must have the form (increase <f-head> (* #t <f-exp>))";
    let items = list(e)?;
    let h = head(e).unwrap_or_default();
    let negate = match h.as_str() {
        "increase" => false,
        "decrease" => true,
        "assign" | "scale-up" | "scale-down" | "when" | "forall" | "" => return bad(e, SHAPE),
        _ => return bad(e, format!("predicate effect in a process; {SHAPE}")),
    };
    let [_, head_e, rate_e] = items else {
        return bad(e, SHAPE);
    };
    let rate = match rate_e.as_list() {
        Some([op, l, r]) if op.as_atom() == Some("*") => {
            if l.as_atom() == Some("#t") {
                num_expr(r)?
            } else if r.as_atom() == Some("#t") {
                num_expr(l)?
            } else {
                return bad(rate_e, SHAPE);
            }
        }
        _ => return bad(rate_e, SHAPE),
    };
    let rate = if negate { NumExpr::Neg(Box::new(rate)) } else { rate };
    Ok(ProcessRate { head: fhead(head_e)?, rate })
}

pub fn parse_problem(text: &str) -> Result<Problem> {
    let r = root(text)?;
    let (name, sections) = define(&r, "problem")?;
    let mut p = Problem {
        name,
        domain: String::new(),
        requirements: Vec::new(),
        objects: Vec::new(),
        init: Vec::new(),
        tils: Vec::new(),
        goal: Gd::truth(),
    };
    let mut saw_domain = false;
    for sec in sections {
        let Some(h) = head(sec) else {
            return bad(sec, "expected a problem section");
        };
        let items = list(sec)?;
        match h.as_str() {
            ":domain" => match items {
                [_, d] => {
                    p.domain = atom(d)?;
                    saw_domain = true;
                }
                _ => return bad(sec, "expected (:domain <name>)"),
            },
            ":requirements" => p.requirements.extend(requirements(sec)?),
            ":objects" => p.objects.extend(typed_list(&items[1..], atom)?),
            ":init" => {
                for f in &items[1..] {
                    init_entry(f, &mut p)?;
                }
            }
            ":goal" => match items {
                [_, g] => p.goal = gd(g)?,
                _ => return bad(sec, "expected (:goal <gd>)"),
            },
            ":metric" => {}
            other => return bad(sec, format!("unknown problem section {other}")),
        }
    }
    if !saw_domain {
        return bad(&r, "problem without (:domain <name>)");
    }
    Ok(p)
}

fn ground_atom(e: &SExpr) -> Result<(String, Vec<String>)> {
    let items = list(e)?;
    let Some(n) = items.first() else {
        return bad(e, "empty atom");
    };
    let args = items[1..]
        .iter()
        .map(|a| {
            let s = atom(a)?;
            if s.starts_with('?') || parse_number(&s).is_some() {
                return bad(a, format!("expected an object, found {s}"));
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    Ok((atom(n)?, args))
}

fn init_entry(e: &SExpr, p: &mut Problem) -> Result<()> {
    let items = list(e)?;
    match head(e).as_deref() {
        Some("=") => {
            let [_, h, v] = items else {
                return bad(e, "expected (= <f-head> <number>)");
            };
            let value = v.as_atom().and_then(parse_number);
            let Some(value) = value else {
                return bad(v, "initial function values must be numbers");
            };
            let (func, args) = match h.as_atom() {
                Some(a) => (a.to_ascii_lowercase(), Vec::new()),
                None => ground_atom(h)?,
            };
            p.init.push(InitFact::Value { func, args, value });
        }
        Some("at") if items.len() == 3 && items[1].as_atom().and_then(parse_number).is_some() => {
            let time = parse_number(items[1].as_atom().unwrap()).unwrap();
            let lit = &items[2];
            let (positive, target) = match lit.as_list() {
                Some([n, inner]) if n.as_atom().is_some_and(|a| a.eq_ignore_ascii_case("not")) => (false, inner),
                _ => (true, lit),
            };
            if head(target).as_deref() == Some("=") {
                return bad(lit, "timed initial literals must be predicate literals");
            }
            let (pred, args) = ground_atom(target)?;
            p.tils.push(Til { time, positive, pred, args });
        }
        Some("not") => return bad(e, "negative literals are implicit in the initial state"),
        _ => {
            let (pred, args) = ground_atom(e)?;
            p.init.push(InitFact::Atom { pred, args });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_domain() {
        let d = parse_domain("(define (domain d))").unwrap();
        assert_eq!(d.name, "d");
        assert!(d.actions.is_empty() && d.types.is_empty() && d.functions.is_empty());
    }

    #[test]
    fn durative_actions_rejected_by_name() {
        let err = parse_domain("(define (domain d) (:requirements :durative-actions))").unwrap_err();
        assert!(err.to_string().contains(":durative-actions"), "{err}");
        let err = parse_domain("(define (domain d) (:durative-action a :parameters ()))").unwrap_err();
        assert!(err.to_string().contains(":durative-actions"), "{err}");
    }

    #[test]
    fn unbalanced_reports_position() {
        let err = parse_domain("(define (domain d)\n  (:predicates (p)").unwrap_err();
        assert_eq!(err.pos(), Pos { line: 2, col: 3 });
    }

    #[test]
    fn typed_lists_and_either() {
        let d = parse_domain(
            "(define (domain d) (:types ball block - thing thing) (:predicates (on ?x - (either ball block) ?y)))",
        )
        .unwrap();
        assert_eq!(d.types.len(), 3);
        assert_eq!(d.types[0].ty, TypeExpr::Name("thing".into()));
        assert_eq!(d.types[2].ty, TypeExpr::object());
        assert_eq!(d.predicates[0].params[0].ty, TypeExpr::Either(vec!["ball".into(), "block".into()]));
    }

    #[test]
    fn process_effect_extracts_rate() {
        let d = parse_domain(
            "(define (domain d) (:functions (v) (a) - number)
               (:process p :parameters () :precondition (and)
                 :effect (and (increase (v) (* #t (a))) (decrease (v) (* 2 #t)))))",
        )
        .unwrap();
        let rates = &d.processes[0].rates;
        assert_eq!(rates[0].rate, NumExpr::Func(FHead { name: "a".into(), args: vec![] }));
        assert_eq!(rates[1].rate, NumExpr::Neg(Box::new(NumExpr::Number(2.0))));
    }

    #[test]
    fn process_effect_outside_grammar_rejected() {
        let err = parse_domain("(define (domain d) (:process p :effect (increase (v) 1)))").unwrap_err();
        assert!(err.to_string().contains("(* #t"), "{err}");
        let err = parse_domain("(define (domain d) (:process p :effect (and (on ?x))))").unwrap_err();
        assert!(err.to_string().contains("predicate"), "{err}");
    }

    #[test]
    fn problem_tils_and_goal() {
        let p = parse_problem(
            "(define (problem p) (:domain car)
               (:init (running) (= (v) 5) (at 5 (not (running))))
               (:goal (>= (v) 10)))",
        )
        .unwrap();
        assert_eq!(p.init.len(), 2);
        assert_eq!(p.tils, vec![Til { time: 5.0, positive: false, pred: "running".into(), args: vec![] }]);
        assert_eq!(
            p.goal,
            Gd::Cmp(CmpOp::Ge, NumExpr::Func(FHead { name: "v".into(), args: vec![] }), NumExpr::Number(10.0))
        );
    }

    #[test]
    fn at_with_object_is_a_predicate() {
        let p = parse_problem("(define (problem p) (:domain d) (:init (at truck depot)))").unwrap();
        assert_eq!(p.init, vec![InitFact::Atom { pred: "at".into(), args: vec!["truck".into(), "depot".into()] }]);
    }

    #[test]
    fn names_are_lowercased() {
        let p = parse_problem("(define (problem P) (:domain Car) (:objects Ball1 - BALL))").unwrap();
        assert_eq!(p.domain, "car");
        assert_eq!(p.objects[0], Typed { name: "ball1".into(), ty: TypeExpr::Name("ball".into()) });
    }

    #[test]
    fn nested_when_rejected() {
        let err = parse_domain(
            "(define (domain d) (:action a :effect (when (p) (when (q) (r)))))",
        )
        .unwrap_err();
        assert!(err.to_string().contains("nested when"));
    }
}
