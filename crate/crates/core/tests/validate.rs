mod common;

use common::{run, sequence, setup};
use hybrid_sc::compile::compile;
use hybrid_sc::pddl::{link, parse_domain, parse_problem};
use hybrid_sc::validate::{trace_csv, Config, GroundAtom, GroundState, SetupError, Validator, Verdict};

fn atom(s: &str) -> GroundAtom {
    GroundAtom::new(s, vec![])
}

/// Car state with the given speed and distance at `start`, engine running
/// and no process active.
fn car_state(v: &Validator<'_>, speed: f64, dist: f64) -> GroundState {
    let mut s = v.initial_state().unwrap();
    let iv = v.world().temporal_index(&atom("v")).unwrap();
    let id = v.world().temporal_index(&atom("d")).unwrap();
    s.init_vals[iv] = speed;
    s.init_vals[id] = dist;
    s
}

#[test]
fn car_initial_state() {
    let (inst, bat) = setup("car", "problem");
    let v = Validator::new(&inst, &bat, Config::default()).unwrap();
    let s = v.initial_state().unwrap();
    assert!(s.rel.contains(&atom("running")));
    assert_eq!(s.rel.len(), 1);
    assert_eq!(s.fns[&atom("a")], 0.0);
    assert_eq!(s.init_vals, vec![0.0, 0.0]);
    assert!(s.active.is_empty());
    assert_eq!(s.start, 0.0);
}

#[test]
fn missing_initial_values_need_a_default() {
    let domain = parse_domain(&common::read("car/domain.pddl")).unwrap();
    let problem = parse_problem(
        "(define (problem p) (:domain car) (:init (running) (= (a) 0) (= (d) 0) (= (up_limit) 1) (= (down_limit) -1)) (:goal (running)))",
    )
    .unwrap();
    let inst = link(domain, problem).unwrap();
    let bat = compile(&inst).unwrap();
    let v = Validator::new(&inst, &bat, Config::default()).unwrap();
    assert_eq!(v.initial_state().unwrap_err(), SetupError::MissingInitialValue("v".into()));
    let v = Validator::new(&inst, &bat, Config { default_value: Some(5.0), ..Config::default() }).unwrap();
    let s = v.initial_state().unwrap();
    assert_eq!(s.init_vals[v.world().temporal_index(&atom("v")).unwrap()], 5.0);
}

#[test]
fn bad_configurations_are_rejected() {
    let (inst, bat) = setup("car", "problem");
    for cfg in [
        Config { step: 0.0, ..Config::default() },
        Config { horizon: f64::NAN, ..Config::default() },
        Config { eps_time: -1.0, ..Config::default() },
        Config { natural_cap: 0, ..Config::default() },
    ] {
        assert!(matches!(Validator::new(&inst, &bat, cfg), Err(SetupError::Config(_))));
    }
}

#[test]
fn car_preconditions() {
    let (inst, bat) = setup("car", "problem");
    let v = Validator::new(&inst, &bat, Config::default()).unwrap();
    let idx = |s: &str| v.action_index(s).unwrap();
    let s0 = v.initial_state().unwrap();
    assert!(v.poss(&s0, idx("accelerate"), &[], 0.0).unwrap());
    assert!(v.poss(&s0, idx("decelerate"), &[], 0.0).unwrap());
    assert!(!v.poss(&s0, idx("engineexplode"), &[], 0.0).unwrap());
    assert!(!v.poss(&car_state(&v, 0.0, 29.0), idx("stop"), &[], 0.0).unwrap());
    assert!(v.poss(&car_state(&v, 0.0, 30.0), idx("stop"), &[], 0.0).unwrap());
    assert!(!v.poss(&car_state(&v, 49.9, 0.0), idx("begin_windresistance"), &[], 0.0).unwrap());
    assert!(v.poss(&car_state(&v, 50.0, 0.0), idx("begin_windresistance"), &[], 0.0).unwrap());
    // Nothing may happen before the situation starts.
    let mut later = s0.clone();
    later.start = 3.0;
    assert!(!v.poss(&later, idx("accelerate"), &[], 2.0).unwrap());
}

#[test]
fn car_transitions() {
    let (inst, bat) = setup("car", "problem");
    let v = Validator::new(&inst, &bat, Config::default()).unwrap();
    let idx = |s: &str| v.action_index(s).unwrap();
    let s0 = v.initial_state().unwrap();

    let (s1, changed) = v.apply(&s0, idx("begin_moving"), &[], 0.0).unwrap();
    assert!(changed);
    assert_eq!(s1.active.iter().map(|a| a.symbol.as_str()).collect::<Vec<_>>(), vec!["moving"]);
    assert_eq!((s1.rel.clone(), s1.fns.clone(), s1.init_vals.clone()), (s0.rel.clone(), s0.fns.clone(), s0.init_vals.clone()));

    let (s2, _) = v.apply(&s1, idx("accelerate"), &[], 2.0).unwrap();
    assert_eq!(s2.fns[&atom("a")], 1.0);
    assert_eq!(s2.start, 2.0);
    assert_eq!(s2.init_vals, vec![0.0, 0.0]);

    // v rises at rate 1 from 2, so at 12 it is 10 and d is 50.
    let (s3, _) = v.apply(&s2, idx("decelerate"), &[], 12.0).unwrap();
    assert_eq!(s3.fns[&atom("a")], 0.0);
    assert!((s3.init_vals[0] - 10.0).abs() < 1e-12 && (s3.init_vals[1] - 50.0).abs() < 1e-12, "{:?}", s3.init_vals);

    let (s4, _) = v.apply(&s2, idx("engineexplode"), &[], 5.0).unwrap();
    assert!(!s4.rel.contains(&atom("running")));
    assert!(s4.rel.contains(&atom("engineblown")));
    assert_eq!(s4.fns[&atom("a")], 0.0);

    // end_moving while moving is inactive changes nothing.
    let (_, changed) = v.apply(&s0, idx("end_moving"), &[], 0.0).unwrap();
    assert!(!changed);
}

#[test]
fn car_plans() {
    let r = run("car", "problem", "2 accelerate\n");
    assert_eq!(r.report.verdict, Verdict::Valid);
    assert!((r.report.goal_time.unwrap() - 12.0).abs() < 1e-6);
    assert_eq!(sequence(&r), vec![(0.0, "(begin_moving 0)".into()), (2.0, "(accelerate 2)".into())]);

    let r = run("car", "problem", "1 stop\n");
    assert_eq!(r.report.verdict, Verdict::PreconditionFailure);
    assert_eq!(r.report.failure.as_ref().unwrap().step, Some(0));

    let r = run("car", "problem_running", "");
    assert_eq!(r.report.verdict, Verdict::Valid);
    assert_eq!(r.report.goal_time, Some(0.0));

    let r = run("car", "problem", "");
    assert_eq!(r.report.verdict, Verdict::GoalUnreached);

    let r = run("car", "problem", "2 accelerate\n2 decelerate\n");
    assert_eq!(r.report.verdict, Verdict::PreconditionFailure);
    assert!(r.report.failure.unwrap().message.contains("same instant"));
}

#[test]
fn wind_sets_in_at_fifty() {
    let r = run("car", "problem_v53", "2 accelerate\n");
    assert_eq!(r.report.verdict, Verdict::Valid);
    let wind = r.report.actions.iter().find(|a| a.symbol == "begin_windresistance").unwrap();
    assert!((wind.time - 52.0).abs() < 1e-9);
    // v = 53 on dv/dt = 1 - (v-50)^2/10 from v(52) = 50: t = 52 + sqrt(10) artanh(3/sqrt(10)).
    let k = 10f64.sqrt();
    let expected = 52.0 + k * (3.0 / k).atanh();
    assert!((r.report.goal_time.unwrap() - expected).abs() < 1e-4, "{:?}", r.report.goal_time);
}

#[test]
fn engine_explodes_without_drag() {
    let r = run("car_nowind", "problem", "0 accelerate\n");
    assert_eq!(r.report.verdict, Verdict::Valid);
    let last = r.report.actions.last().unwrap();
    assert_eq!((last.symbol.as_str(), last.time), ("engineexplode", 100.0));
    assert_eq!(r.report.goal_time, Some(100.0));
}

#[test]
fn events_fire_before_later_agent_actions() {
    let expected_naturals = vec![
        (0.0, "(begin_warming 0)".to_string()),
        (10.0, "(alarm 10)".to_string()),
        (10.0, "(overheat 10)".to_string()),
        (10.0, "(end_warming 10)".to_string()),
    ];
    let r = run("events", "problem", &common::read("events/reset.plan"));
    assert_eq!(r.report.verdict, Verdict::Valid);
    let mut want = expected_naturals.clone();
    want.push((12.0, "(reset 12)".into()));
    assert_eq!(sequence(&r), want);

    // Naturals due at the step's own time go first.
    let r = run("events", "problem", "10 reset\n");
    assert_eq!(r.report.verdict, Verdict::Valid);
    assert_eq!(sequence(&r).last().unwrap(), &(10.0, "(reset 10)".to_string()));

    let r = run("events", "problem", "8 reset\n");
    assert_eq!(r.report.verdict, Verdict::PreconditionFailure);
}

#[test]
fn plans_may_claim_naturals_only_when_they_happen() {
    let r = run("events", "problem", &common::read("events/claimed.plan"));
    assert_eq!(r.report.verdict, Verdict::Valid);
    let overheat = r.report.actions.iter().find(|a| a.symbol == "overheat").unwrap();
    assert_eq!(overheat.step, Some(0));

    let r = run("events", "problem", &common::read("events/late_claim.plan"));
    assert_eq!(r.report.verdict, Verdict::NaturalActionViolation);
    assert_eq!(r.report.failure.unwrap().step, Some(0));

    // Claiming it early fails too: it is not possible before 10.
    let r = run("events", "problem", "5 overheat\n");
    assert_eq!(r.report.verdict, Verdict::NaturalActionViolation);
}

#[test]
fn timed_literals() {
    let r = run("til", "problem_harvest", "5 harvest\n");
    assert_eq!(r.report.verdict, Verdict::Valid);
    assert_eq!(sequence(&r)[1], (5.0, "(til_1 5)".to_string()));
    let r = run("til", "problem_harvest", "4.999 harvest\n");
    assert_eq!(r.report.verdict, Verdict::PreconditionFailure);
    // level reaches 2 at t = 2, but the goal only counts from 5 on.
    let r = run("til", "problem", "");
    assert_eq!(r.report.goal_time, Some(5.0));
}

#[test]
fn conflicting_assignments_are_a_numeric_error() {
    let r = run("overlap", "problem", "1 set\n");
    assert_eq!(r.report.verdict, Verdict::NumericError);
    assert!(r.report.failure.unwrap().message.contains("conflicting effects on setting"));
}

#[test]
fn livelock_is_cut_off() {
    let domain = parse_domain(
        "(define (domain ping) (:requirements :fluents)
           (:predicates (p))
           (:functions (n))
           (:event tick :parameters () :precondition (p) :effect (increase (n) 1)))",
    )
    .unwrap();
    let problem = parse_problem("(define (problem q) (:domain ping) (:init (p) (= (n) 0)) (:goal (>= (n) -1)))").unwrap();
    let inst = link(domain, problem).unwrap();
    let bat = compile(&inst).unwrap();
    let v = Validator::new(&inst, &bat, Config { natural_cap: 50, ..Config::default() }).unwrap();
    // The goal holds at 0, before any tick is forced.
    assert_eq!(v.validate(&Default::default()).unwrap().report.verdict, Verdict::Valid);
    let plan = hybrid_sc::validate::parse_plan("1 tick\n").unwrap();
    let r = v.validate(&plan).unwrap();
    assert_eq!(r.report.verdict, Verdict::NaturalActionViolation);
    assert!(r.report.failure.unwrap().message.contains("without time advancing"));
}

#[test]
fn unknown_plan_entries_are_setup_errors() {
    let (inst, bat) = setup("car", "problem");
    let v = Validator::new(&inst, &bat, Config::default()).unwrap();
    let parse = |s: &str| hybrid_sc::validate::parse_plan(s).unwrap();
    assert!(matches!(v.validate(&parse("1 fly")), Err(SetupError::UnknownAction { line: 1, .. })));
    assert!(matches!(v.validate(&parse("1 accelerate(x)")), Err(SetupError::Arity { expected: 0, found: 1, .. })));
}

#[test]
fn car_trace() {
    let (inst, bat) = setup("car", "problem");
    let v = Validator::new(&inst, &bat, Config::default()).unwrap();
    let run = v.validate(&hybrid_sc::validate::parse_plan("2 accelerate").unwrap()).unwrap();
    let csv = trace_csv(&v, &run, 1.0, false).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "time,v,d");
    let seg = csv.split("# situation 2: (accelerate 2)\n").nth(1).unwrap();
    let rows: Vec<Vec<f64>> = seg.lines().map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 11);
    for (k, r) in rows.iter().enumerate() {
        let t = 2.0 + k as f64;
        assert_eq!(r[0], t);
        assert!((r[1] - (t - 2.0)).abs() < 1e-12);
        assert!((r[2] - (t - 2.0).powi(2) / 2.0).abs() < 1e-9);
    }

    let empty = v.validate(&Default::default()).unwrap();
    let csv = trace_csv(&v, &empty, 1.0, false).unwrap();
    assert_eq!(csv.matches("# situation").count(), 2);
}

#[test]
fn explosion_trace_drops_acceleration() {
    let (inst, bat) = setup("car_nowind", "problem");
    let v = Validator::new(&inst, &bat, Config::default()).unwrap();
    let run = v.validate(&hybrid_sc::validate::parse_plan("0 accelerate").unwrap()).unwrap();
    let csv = trace_csv(&v, &run, 10.0, true).unwrap();
    assert!(csv.starts_with("time,v,d,a\n"));
    let seg = csv.split("# situation 3: (engineexplode 100)\n").nth(1).unwrap();
    assert_eq!(seg, "100,100,5000,0\n");
    assert!(csv.contains("\n90,90,4050,1\n"));
}
