mod common;

use common::{read, setup};
use hybrid_sc::compile::{compile, CompileError, CompileOptions, Origin, SeaForm};
use hybrid_sc::logic::{canonical, check_sorts, check_uniform, parse_formula, serialize_formula, AxiomKind, Var};
use hybrid_sc::pddl::{link, parse_domain, parse_problem};

#[test]
fn car_theory_matches_golden_files() {
    let (_, bat) = setup("car", "problem");
    assert_eq!(bat.render(&CompileOptions::default()).unwrap(), read("car/theory.golden"));
    let expanded = CompileOptions { expand_sea: true, ..Default::default() };
    assert_eq!(bat.render(&expanded).unwrap(), read("car/theory_expanded.golden"));
}

#[test]
fn car_precondition_and_successor_axioms() {
    let (_, bat) = setup("car", "problem");
    let apa = |sym: &str| serialize_formula(&bat.action(sym).unwrap().apa());
    assert_eq!(apa("accelerate"), "(<-> (poss (accelerate t) s) (and (running s) (< (a s) (up_limit))))");
    assert_eq!(apa("stop"), "(<-> (poss (stop t) s) (and (= (v t s) 0) (>= (d t s) 30)))");
    assert_eq!(apa("begin_windresistance"), "(<-> (poss (begin_windresistance t) s) (and (running s) (>= (v t s) 50)))");
    let ssa = |f: &str| serialize_formula(&bat.ssas.iter().find(|s| s.fluent == f).unwrap().formula());
    assert_eq!(
        ssa("running"),
        "(<-> (running (do a s)) (and (running s) (not (exists (t1) (= a (engineexplode t1))))))"
    );
    assert_eq!(
        ssa("moving"),
        "(<-> (moving (do a s)) (or (exists (t1) (= a (begin_moving t1))) (and (moving s) (not (exists (t2) (= a (end_moving t2)))))))"
    );
    assert_eq!(ssa("v_init"), "(<-> (= (v_init (do a s)) y) (= (v (time a) s) y))");
    assert_eq!(
        serialize_formula(&bat.goal_axiom()),
        "(exists (t1) (and (>= t1 (start s)) (>= t1 0) (>= (v t1 s) 10)))"
    );
}

#[test]
fn every_axiom_round_trips_and_is_well_sorted() {
    for (dir, problem) in [("car", "problem"), ("til", "problem"), ("events", "problem"), ("overlap", "problem")] {
        let (_, bat) = setup(dir, problem);
        for ax in bat.axioms(1 << 20).unwrap() {
            check_sorts(&ax.formula).unwrap_or_else(|e| panic!("{dir} {}: {e}", ax.subject));
            let text = serialize_formula(&ax.formula);
            let back = parse_formula(&text, &bat.table.signature).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert_eq!(back, canonical(&ax.formula), "{text}");
        }
    }
}

#[test]
fn preconditions_and_contexts_are_uniform() {
    let s = Var::situation("s");
    for (dir, problem) in [("car", "problem"), ("til", "problem"), ("events", "problem")] {
        let (_, bat) = setup(dir, problem);
        for a in &bat.actions {
            assert!(check_uniform(&a.precondition, &s).unwrap(), "{}", a.symbol);
        }
        for sea in &bat.seas {
            for e in sea.entries() {
                assert!(check_uniform(&e.context, &s).unwrap());
            }
        }
        assert!(check_uniform(&bat.goal, &s).unwrap());
    }
}

#[test]
fn timed_literal_becomes_a_one_shot_natural_action() {
    let (_, bat) = setup("til", "problem");
    let til = bat.actions.iter().find(|a| a.origin == Origin::Til(0)).unwrap();
    assert_eq!(serialize_formula(&til.apa()), "(<-> (poss (til_1 t) s) (and (= t 5) (not (fired_1 s))))");
    assert_eq!(bat.tils_horizon, 5.0);
    assert_eq!(
        serialize_formula(&bat.goal_axiom()),
        "(exists (t1) (and (>= t1 (start s)) (>= t1 5) (>= (level t1 s) 2)))"
    );
    let naturals: Vec<_> = bat.initial.iter().filter(|a| a.kind == AxiomKind::NaturalDecl).map(|a| a.subject.clone()).collect();
    assert!(naturals.contains(&"til_1".to_string()), "{naturals:?}");
}

#[test]
fn events_are_natural_and_processes_split_into_begin_and_end() {
    let (_, bat) = setup("events", "problem");
    let origins: Vec<_> = bat.actions.iter().map(|a| (a.symbol.as_str(), a.origin.is_natural())).collect();
    assert_eq!(
        origins,
        vec![("reset", false), ("overheat", true), ("alarm", true), ("begin_warming", true), ("end_warming", true)]
    );
}

const GRID: &str = "
(define (domain grid)
  (:requirements :typing :fluents :time)
  (:types lamp)
  (:predicates (lit ?l - lamp))
  (:functions (load))
  (:process draw
    :parameters (?l - lamp)
    :precondition (lit ?l)
    :effect (increase (load) (* #t 2))))";

const GRID_PROBLEM: &str = "
(define (problem two)
  (:domain grid)
  (:objects l1 l2 - lamp)
  (:init (lit l1) (= (load) 0))
  (:goal (>= (load) 4)))";

#[test]
fn process_parameters_missing_from_the_head_are_grounded() {
    let inst = link(parse_domain(GRID).unwrap(), parse_problem(GRID_PROBLEM).unwrap()).unwrap();
    let bat = compile(&inst).unwrap();
    let sea = &bat.seas[0];
    assert!(matches!(sea.form, SeaForm::PowerSet(_)));
    let contexts: Vec<_> = sea.entries().iter().map(|e| e.context.to_string()).collect();
    assert_eq!(contexts, vec!["(draw l1 s)", "(draw l2 s)"]);
    assert_eq!(sea.disjunct_count(), 4);
}

#[test]
fn expansion_over_the_cap_is_an_error() {
    let (_, bat) = setup("car", "problem");
    let err = bat.render(&CompileOptions { expand_sea: true, sea_cap: 3 }).unwrap_err();
    assert!(matches!(err, CompileError::SeaCap { ref fluent, disjuncts: 4, cap: 3 } if fluent == "v"), "{err}");
    assert!(bat.axioms(3).is_err());
    // The lazy form ignores the cap.
    assert!(bat.render(&CompileOptions { expand_sea: false, sea_cap: 3 }).is_ok());
}

#[test]
fn compilation_is_deterministic() {
    let render = || setup("events", "problem").1.render(&CompileOptions { expand_sea: true, ..Default::default() }).unwrap();
    assert_eq!(render(), render());
}
