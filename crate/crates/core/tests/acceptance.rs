//! One line per acceptance criterion. Runs without the libtest harness so the
//! lines show up in ordinary `cargo test` output.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{read, run, sequence, setup};
use hybrid_sc::compile::{check_well_defined, CompileOptions, FindingTag, SeaForm};
use hybrid_sc::logic::{Formula, Term};
use hybrid_sc::numeric::{Evolution, RExpr};
use hybrid_sc::validate::{parse_plan, trace_csv, Config, Eval, GroundAtom, GroundState, Validator, Verdict};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn atom(s: &str) -> GroundAtom {
    GroundAtom::new(s, vec![])
}

fn within(budget: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    if took < budget {
        Ok(took)
    } else {
        Err(format!("took {took:?}, budget {budget:?}"))
    }
}

fn car_end_to_end() -> Outcome {
    let t0 = Instant::now();
    let r = run("car", "problem", "2 accelerate\n");
    let took = within(Duration::from_secs(1), t0)?;
    ensure!(r.report.verdict == Verdict::Valid, "verdict {:?}", r.report.verdict);
    let w = r.report.goal_time.ok_or("no witness")?;
    ensure!((w - 12.0).abs() <= 1e-6, "witness {w}");
    let seq = sequence(&r);
    ensure!(seq.first() == Some(&(0.0, "(begin_moving 0)".to_string())), "{seq:?}");
    Ok(format!("witness {w}, {took:?}"))
}

fn sea_structure() -> Outcome {
    let t0 = Instant::now();
    let (_, bat) = setup("car", "problem");
    let text = bat.render(&CompileOptions { expand_sea: true, ..Default::default() }).map_err(|e| e.to_string())?;
    ensure!(text == read("car/theory_expanded.golden"), "expanded theory differs from the golden file");
    let sea = bat.seas.iter().find(|s| s.fluent == "v").ok_or("no axiom for v")?;
    ensure!(matches!(sea.form, SeaForm::PowerSet(_)), "not a power-set axiom");
    let contexts: Vec<String> = sea.entries().iter().map(|e| e.context.to_string()).collect();
    ensure!(contexts == ["(moving s)", "(windresistance s)"], "{contexts:?}");
    let Formula::Iff(_, rhs) = sea.expanded() else { return Err("not a biconditional".into()) };
    let Formula::Or(disjuncts) = *rhs else { return Err("not a disjunction".into()) };
    ensure!(disjuncts.len() == 4, "{} disjuncts", disjuncts.len());
    let line = text.lines().find(|l| l.starts_with("(<-> (= (v t s) y)")).ok_or("no v line")?;
    let order = [
        "(and (not (moving s)) (not (windresistance s))",
        "(and (moving s) (not (windresistance s))",
        "(and (not (moving s)) (windresistance s)",
        "(and (moving s) (windresistance s)",
    ];
    let mut at = 0;
    for o in order {
        at += line[at..].find(o).ok_or_else(|| format!("{o} missing or out of order"))?;
    }
    let took = within(Duration::from_secs(1), t0)?;
    Ok(format!("4 disjuncts, {took:?}"))
}

/// Forward Euler on the car from rest: accelerate at 2, drag above 50.
fn euler_car_speed(until: f64, h: f64) -> f64 {
    let (mut t, mut v, mut wind) = (0.0, 0.0f64, false);
    let n = (until / h).round() as usize;
    for _ in 0..n {
        let a = if t >= 2.0 { 1.0 } else { 0.0 };
        wind |= v >= 50.0;
        let drag = if wind { (v - 50.0).powi(2) / 10.0 } else { 0.0 };
        v += h * (a - drag);
        t += h;
    }
    v
}

fn wind_trigger() -> Outcome {
    let t0 = Instant::now();
    let (inst, bat) = setup("car", "problem_v53");
    let v = Validator::new(&inst, &bat, Config::default()).map_err(|e| e.to_string())?;
    let r = v.validate(&parse_plan("2 accelerate\n").unwrap()).map_err(|e| e.to_string())?;
    ensure!(r.report.verdict == Verdict::Valid, "verdict {:?}", r.report.verdict);
    // v = t - 2 until the drag starts.
    let crossing = 2.0 + 50.0;
    let wind = r.report.actions.iter().find(|a| a.symbol == "begin_windresistance").ok_or("no begin_windresistance")?;
    ensure!((wind.time - crossing).abs() <= 1e-5, "begin_windresistance at {}", wind.time);
    let last = &r.situations.last().unwrap().state;
    ensure!(last.start == wind.time, "last situation starts at {}", last.start);
    let iv = v.world().temporal_index(&atom("v")).unwrap();
    let at200 = v.evolution(last).map_err(|e| e.to_string())?.value(iv, 200.0).map_err(|e| e.to_string())?;
    let limit = 50.0 + 10f64.sqrt();
    ensure!((at200 - limit).abs() <= 1e-3, "v(200) = {at200}, limit {limit}");
    let euler = euler_car_speed(200.0, 1e-4);
    ensure!((at200 - euler).abs() <= 1e-3, "v(200) = {at200}, euler {euler}");
    let took = within(Duration::from_secs(10), t0)?;
    Ok(format!("wind at {}, v(200) = {at200:.6}, euler {euler:.6}, {took:?}", wind.time))
}

/// Random Car situation: any process combination, any acceleration.
fn random_car_state(v: &Validator<'_>, rng: &mut ChaCha8Rng) -> GroundState {
    let mut s = v.initial_state().unwrap();
    s.start = rng.gen_range(0.0..100.0);
    s.fns.insert(atom("a"), rng.gen_range(-2.0..2.0));
    let wind = rng.gen_bool(0.5);
    for (name, on) in [("moving", rng.gen_bool(0.5)), ("windresistance", wind)] {
        if on {
            s.active.insert(atom(name));
        }
    }
    if rng.gen_bool(0.2) {
        s.rel.remove(&atom("running"));
    }
    // The drag term blows up in finite time from below 50 - sqrt(10).
    let speed = if wind { rng.gen_range(48.0..60.0) } else { rng.gen_range(-100.0..100.0) };
    s.init_vals = vec![speed, rng.gen_range(-1e3..1e3)];
    s
}

/// Rates from the one expanded disjunct whose context holds in `state`.
fn rates_from_expanded(v: &Validator<'_>, state: &GroundState) -> Result<Vec<Option<RExpr>>, String> {
    let mut out = Vec::new();
    for fluent in &v.world().temporal {
        let sea = v.bat().seas.iter().find(|s| s.fluent == fluent.symbol).ok_or("no axiom")?;
        let Formula::Iff(_, rhs) = sea.expanded() else { return Err("not a biconditional".into()) };
        let Formula::Or(disjuncts) = *rhs else { return Err("not a disjunction".into()) };
        let mut ev = Eval::new(v.bat(), v.world(), state, "tau", v.config().eps_value);
        let mut chosen = Vec::new();
        for d in &disjuncts {
            let Formula::And(parts) = d else { return Err(format!("disjunct {d}")) };
            let (value, contexts) = parts.split_last().unwrap();
            let holds = contexts.iter().try_fold(true, |acc, c| {
                ev.cond(c).map(|c| acc && c == hybrid_sc::numeric::Cond::Const(true))
            });
            if holds.map_err(|e| e.to_string())? {
                chosen.push(value.clone());
            }
        }
        ensure!(chosen.len() == 1, "{} of {} disjuncts hold for {fluent}", chosen.len(), disjuncts.len());
        let Formula::Compare(_, _, value) = &chosen[0] else { return Err(format!("value {}", chosen[0])) };
        out.push(match value {
            Term::Arith(_, parts) => match parts.get(1) {
                Some(Term::Integral { integrand, .. }) => Some(ev.rexpr(integrand).map_err(|e| e.to_string())?),
                _ => return Err(format!("value {value}")),
            },
            _ => None,
        });
    }
    Ok(out)
}

fn sea_matches_tcas() -> Outcome {
    let t0 = Instant::now();
    let (inst, bat) = setup("car", "problem");
    let v = Validator::new(&inst, &bat, Config::default()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples = 1000;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let state = random_car_state(&v, &mut rng);
        let t = state.start + rng.gen_range(0.0..3.0);
        let from_tcas = v.evolution(&state).map_err(|e| e.to_string())?.values_at(t).map_err(|e| e.to_string())?;
        let rates = rates_from_expanded(&v, &state)?;
        let frozen: Vec<bool> = rates.iter().map(Option::is_none).collect();
        let evo = Evolution::new(state.start, state.init_vals.clone(), rates, v.config().step);
        let from_sea = evo.values_at(t).map_err(|e| e.to_string())?;
        for i in 0..from_sea.len() {
            let diff = (from_sea[i] - from_tcas[i]).abs();
            worst = worst.max(diff);
            ensure!(diff <= 1e-9 * from_sea[i].abs().max(1.0), "{state:?} at {t}: {from_sea:?} vs {from_tcas:?}");
            // The frame disjunct keeps the initial value.
            ensure!(!frozen[i] || from_sea[i] == state.init_vals[i], "frame value moved");
        }
    }
    let took = within(Duration::from_secs(10), t0)?;
    Ok(format!("{samples} samples, worst difference {worst:e}, {took:?}"))
}

fn ssa_frame() -> Outcome {
    let (inst, bat) = setup("car", "problem");
    let v = Validator::new(&inst, &bat, Config::default()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..50 {
        let state = random_car_state(&v, &mut rng);
        let t = state.start + rng.gen_range(0.0..1.0);
        let now = v.evolution(&state).unwrap().values_at(t).unwrap();
        for (idx, def) in bat.actions.iter().enumerate() {
            let mentioned: BTreeSet<&str> =
                bat.effects.iter().filter(|e| e.action == def.symbol).map(|e| e.target.fluent()).collect();
            let (next, _) = v.apply(&state, idx, &[], t).map_err(|e| format!("{}: {e}", def.symbol))?;
            let holds = |s: &GroundState, f: &str| s.rel.contains(&atom(f)) || s.active.contains(&atom(f));
            for f in ["running", "engineblown", "goal_reached", "moving", "windresistance"] {
                ensure!(mentioned.contains(f) || holds(&next, f) == holds(&state, f), "{} changed {f}", def.symbol);
            }
            for f in ["a", "up_limit", "down_limit"] {
                let (before, after) = (state.fns.get(&atom(f)), next.fns.get(&atom(f)));
                ensure!(mentioned.contains(f) || before == after, "{} changed {f}", def.symbol);
            }
            // Temporal fluents continue from where they were.
            ensure!(next.init_vals == now, "{} broke continuity", def.symbol);
            let a = state.fns[&atom("a")];
            let want = match def.symbol.as_str() {
                "accelerate" => Some(a + 1.0),
                "decelerate" => Some(a - 1.0),
                "engineexplode" => Some(0.0),
                _ => None,
            };
            if let Some(w) = want {
                ensure!(mentioned.contains("a"), "{} does not mention a", def.symbol);
                ensure!(next.fns[&atom("a")] == w, "{}: a = {} not {w}", def.symbol, next.fns[&atom("a")]);
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} applications"))
}

fn rk4_order() -> Outcome {
    // v' = 1 - (v-50)^2/10 solves to v = 50 + k tanh(t/k + artanh((v0-50)/k)), k = sqrt(10).
    let k = 10f64.sqrt();
    let (v0, horizon) = (47.0, 4.0);
    let exact = 50.0 + k * (horizon / k + ((v0 - 50.0) / k).atanh()).tanh();
    let dv = RExpr::sub(RExpr::Var(0), RExpr::Const(50.0));
    let rate = RExpr::sub(RExpr::Const(1.0), RExpr::Div(Box::new(RExpr::Mul(vec![dv.clone(), dv])), Box::new(RExpr::Const(10.0))));
    let err = |h: f64| -> Result<f64, String> {
        let e = Evolution::new(0.0, vec![v0], vec![Some(rate.clone())], h);
        Ok((e.value(0, horizon).map_err(|e| e.to_string())? - exact).abs())
    };
    let (coarse, fine) = (err(0.2)?, err(0.1)?);
    let ratio = coarse / fine;
    ensure!((12.0..=20.0).contains(&ratio), "ratio {ratio} ({coarse:e} / {fine:e})");
    Ok(format!("ratio {ratio:.2}"))
}

fn natural_actions() -> Outcome {
    let r = run("events", "problem", &read("events/reset.plan"));
    ensure!(r.report.verdict == Verdict::Valid, "reset.plan: {:?}", r.report.verdict);
    let seq = sequence(&r);
    let overheat = seq.iter().position(|(_, a)| a == "(overheat 10)").ok_or("no overheat at 10")?;
    let reset = seq.iter().position(|(_, a)| a == "(reset 12)").ok_or("no reset at 12")?;
    ensure!(overheat < reset, "{seq:?}");

    for (plan, want) in [
        ("events/early_reset.plan", Verdict::PreconditionFailure),
        ("events/late_claim.plan", Verdict::NaturalActionViolation),
    ] {
        let r = run("events", "problem", &read(plan));
        ensure!(r.report.verdict == want, "{plan}: {:?}", r.report.verdict);
    }

    // All naturals due at 10 come before the agent action planned at 10.
    let r = run("events", "problem", &read("events/reset_same_instant.plan"));
    ensure!(r.report.verdict == Verdict::Valid, "reset_same_instant.plan: {:?}", r.report.verdict);
    let at10: Vec<_> = r.report.actions.iter().filter(|a| a.time == 10.0).map(|a| (a.natural, a.symbol.as_str())).collect();
    let want = [(true, "alarm"), (true, "overheat"), (true, "end_warming"), (false, "reset")];
    ensure!(at10 == want, "{at10:?}");
    Ok("event inserted at 10, early and late claims rejected".into())
}

fn timed_literals() -> Outcome {
    let r = run("til", "problem_harvest", &read("til/at5.plan"));
    ensure!(r.report.verdict == Verdict::Valid, "at5.plan: {:?}", r.report.verdict);
    let j = r.report.actions.iter().position(|a| a.symbol == "til_1").ok_or("no til_1")?;
    ensure!(r.report.actions[j].time == 5.0, "til_1 at {}", r.report.actions[j].time);
    let daylight = atom("daylight");
    ensure!(!r.situations[j].state.rel.contains(&daylight), "daylight before the literal");
    ensure!(r.situations[j + 1].state.rel.contains(&daylight), "no daylight after the literal");

    let r = run("til", "problem_harvest", &read("til/early.plan"));
    ensure!(r.report.verdict == Verdict::PreconditionFailure, "early.plan: {:?}", r.report.verdict);

    // level hits 2 at t = 2; the witness waits for the literal.
    let r = run("til", "problem", &read("til/empty.plan"));
    ensure!(r.report.goal_time == Some(5.0), "witness {:?}", r.report.goal_time);
    Ok("flip at 5, witness 5".into())
}

fn well_definedness() -> Outcome {
    let violations = |dir: &str| {
        let (_, bat) = setup(dir, "problem");
        check_well_defined(&bat).into_iter().filter(|f| f.tag == FindingTag::PotentialViolation).count()
    };
    let (overlap, car) = (violations("overlap"), violations("car"));
    ensure!(overlap > 0, "overlap fixture has no potential violation");
    ensure!(car == 0, "car has {car} potential violations");
    Ok(format!("overlap {overlap}, car 0"))
}

/// Every library entry point behind a command, rendered to text.
fn outputs() -> Vec<String> {
    let fixtures: [(&str, &str, &[&str]); 6] = [
        ("car", "problem", &["accelerate.plan", "stop.plan", "empty.plan"]),
        ("car", "problem_v53", &["accelerate.plan"]),
        ("car_nowind", "problem", &["accelerate.plan"]),
        ("til", "problem", &["at5.plan", "early.plan", "empty.plan"]),
        ("events", "problem", &["reset.plan", "reset_same_instant.plan", "late_claim.plan", "claimed.plan", "early_reset.plan"]),
        ("overlap", "problem", &["set.plan"]),
    ];
    let mut out = Vec::new();
    for (dir, problem, plans) in fixtures {
        let (inst, bat) = setup(dir, problem);
        for expand_sea in [false, true] {
            out.push(bat.render(&CompileOptions { expand_sea, ..Default::default() }).unwrap());
        }
        out.push(format!("{:?}", check_well_defined(&bat)));
        let v = Validator::new(&inst, &bat, Config::default()).unwrap();
        for plan in plans {
            let run = v.validate(&parse_plan(&read(&format!("{dir}/{plan}"))).unwrap()).unwrap();
            out.push(run.report.to_text());
            out.push(format!("{:?}", run.report));
            out.push(trace_csv(&v, &run, 0.5, true).unwrap_or_else(|e| e.to_string()));
        }
    }
    out
}

fn determinism() -> Outcome {
    let first = outputs();
    ensure!(first == outputs(), "outputs differ between runs");
    Ok(format!("{} outputs identical", first.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("car end-to-end", car_end_to_end),
        ("evolution axiom structure", sea_structure),
        ("wind trigger", wind_trigger),
        ("evolution axiom vs change axioms plus frame", sea_matches_tcas),
        ("successor state frame", ssa_frame),
        ("rk4 order", rk4_order),
        ("natural action semantics", natural_actions),
        ("timed initial literals", timed_literals),
        ("well-definedness detection", well_definedness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:2} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
