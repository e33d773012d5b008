//! PDDL text for parsed domains and problems. The output re-parses to an
//! equal AST.

use std::fmt::Write;

use super::ast::*;

fn type_expr(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Name(n) => n.clone(),
        TypeExpr::Either(ns) => format!("(either {})", ns.join(" ")),
    }
}

fn typed(items: &[Typed], prefix: &str) -> String {
    items.iter().map(|t| format!("{prefix}{} - {}", t.name, type_expr(&t.ty))).collect::<Vec<_>>().join(" ")
}

fn arg(a: &Arg) -> String {
    match a {
        Arg::Var(v) => format!("?{v}"),
        Arg::Name(n) => n.clone(),
    }
}

fn call(name: &str, args: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("({name}");
    for a in args {
        s.push(' ');
        s.push_str(&a);
    }
    s.push(')');
    s
}

fn fhead(h: &FHead) -> String {
    call(&h.name, h.args.iter().map(arg))
}

pub fn num_expr(e: &NumExpr) -> String {
    match e {
        NumExpr::Number(x) => format!("{x}"),
        NumExpr::Func(h) => fhead(h),
        NumExpr::Neg(x) => call("-", [num_expr(x)]),
        NumExpr::Bin(op, l, r) => call(op.symbol(), [num_expr(l), num_expr(r)]),
    }
}

pub fn gd(g: &Gd) -> String {
    match g {
        Gd::Atom { pred, args } => call(pred, args.iter().map(arg)),
        Gd::Equal(l, r) => call("=", [arg(l), arg(r)]),
        Gd::Cmp(op, l, r) => call(op.symbol(), [num_expr(l), num_expr(r)]),
        Gd::Not(x) => call("not", [gd(x)]),
        Gd::And(xs) => call("and", xs.iter().map(gd)),
        Gd::Or(xs) => call("or", xs.iter().map(gd)),
        Gd::Imply(l, r) => call("imply", [gd(l), gd(r)]),
        Gd::Exists(vs, b) => call("exists", [format!("({})", typed(vs, "?")), gd(b)]),
        Gd::Forall(vs, b) => call("forall", [format!("({})", typed(vs, "?")), gd(b)]),
    }
}

pub fn effect(e: &Effect) -> String {
    match e {
        Effect::And(xs) => call("and", xs.iter().map(effect)),
        Effect::Add { pred, args } => call(pred, args.iter().map(arg)),
        Effect::Del { pred, args } => call("not", [call(pred, args.iter().map(arg))]),
        Effect::Num { op, head, value } => call(op.keyword(), [fhead(head), num_expr(value)]),
        Effect::Forall(vs, b) => call("forall", [format!("({})", typed(vs, "?")), effect(b)]),
        Effect::When(c, b) => call("when", [gd(c), effect(b)]),
    }
}

fn schema(s: &Schema, out: &mut String) {
    let _ = writeln!(out, "  ({} {}", s.kind.keyword(), s.name);
    let _ = writeln!(out, "    :parameters ({})", typed(&s.params, "?"));
    let _ = writeln!(out, "    :precondition {}", gd(&s.precondition));
    let eff = if s.kind == SchemaKind::Process {
        call(
            "and",
            s.rates.iter().map(|r| call("increase", [fhead(&r.head), call("*", ["#t".to_string(), num_expr(&r.rate)])])),
        )
    } else {
        effect(&s.effect)
    };
    let _ = writeln!(out, "    :effect {eff})");
}

fn decls(ds: &[Decl]) -> String {
    ds.iter().map(|d| call(&d.name, [typed(&d.params, "?")].into_iter().filter(|s| !s.is_empty()))).collect::<Vec<_>>().join(" ")
}

pub fn domain(d: &Domain) -> String {
    let mut out = format!("(define (domain {})\n", d.name);
    if !d.requirements.is_empty() {
        let _ = writeln!(out, "  (:requirements {})", d.requirements.join(" "));
    }
    let _ = writeln!(out, "  (:types {})", typed(&d.types, ""));
    let _ = writeln!(out, "  (:constants {})", typed(&d.constants, ""));
    let _ = writeln!(out, "  (:predicates {})", decls(&d.predicates));
    let _ = writeln!(out, "  (:functions {})", decls(&d.functions));
    for s in d.actions.iter().chain(&d.events).chain(&d.processes) {
        schema(s, &mut out);
    }
    out.push_str(")\n");
    out
}

pub fn problem(p: &Problem) -> String {
    let mut out = format!("(define (problem {})\n  (:domain {})\n", p.name, p.domain);
    if !p.requirements.is_empty() {
        let _ = writeln!(out, "  (:requirements {})", p.requirements.join(" "));
    }
    let _ = writeln!(out, "  (:objects {})", typed(&p.objects, ""));
    out.push_str("  (:init");
    for f in &p.init {
        let s = match f {
            InitFact::Atom { pred, args } => call(pred, args.iter().cloned()),
            InitFact::Value { func, args, value } => call("=", [call(func, args.iter().cloned()), format!("{value}")]),
        };
        let _ = write!(out, " {s}");
    }
    for t in &p.tils {
        let mut lit = call(&t.pred, t.args.iter().cloned());
        if !t.positive {
            lit = call("not", [lit]);
        }
        let _ = write!(out, " (at {} {lit})", t.time);
    }
    out.push_str(")\n");
    let _ = writeln!(out, "  (:goal {}))", gd(&p.goal));
    out
}
