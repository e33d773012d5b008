mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::setup;
use hybrid_sc::classify::classify;
use hybrid_sc::logic::CmpOp;
use hybrid_sc::numeric::{find_trigger, Cond, Evolution, RExpr};
use hybrid_sc::pddl::link;
use hybrid_sc::validate::{parse_plan, Config, Plan, PlanStep, Validator};

fn wind_rate() -> RExpr {
    // a - (v - 50)^2 / 10 with a = 1
    let dv = RExpr::sub(RExpr::Var(0), RExpr::Const(50.0));
    RExpr::sub(RExpr::Const(1.0), RExpr::Div(Box::new(RExpr::Mul(vec![dv.clone(), dv])), Box::new(RExpr::Const(10.0))))
}

/// Car plans: accelerate/decelerate steps at strictly increasing times.
fn car_plan() -> impl Strategy<Value = Plan> {
    prop::collection::vec((0.1f64..20.0, any::<bool>()), 0..6).prop_map(|steps| {
        let mut t = 0.0;
        let steps = steps
            .into_iter()
            .enumerate()
            .map(|(i, (dt, up))| {
                t += dt;
                PlanStep { time: t, action: if up { "accelerate" } else { "decelerate" }.into(), args: vec![], line: i + 1 }
            })
            .collect();
        Plan { steps }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restarting_from_a_snapshot_changes_nothing(v0 in 47.0f64..60.0, d0 in 0.0f64..100.0, k1 in 1u32..500, k2 in 1u32..500) {
        let h = 0.01;
        // Joint ODE: v' = 1 - (v-50)^2/10, d' = v. Below 50 - sqrt(10) it
        // blows up in finite time.
        let rates = vec![Some(wind_rate()), Some(RExpr::Var(0))];
        let direct = Evolution::new(0.0, vec![v0, d0], rates.clone(), h);
        let (t1, t2) = (k1 as f64 * h, (k1 + k2) as f64 * h);
        let snap = direct.values_at(t1).unwrap();
        let restarted = Evolution::new(t1, snap, rates, h);
        let (a, b) = (direct.values_at(t2).unwrap(), restarted.values_at(t2).unwrap());
        for i in 0..2 {
            prop_assert!((a[i] - b[i]).abs() <= 10.0 * 1e-9 * a[i].abs().max(1.0), "{a:?} {b:?}");
        }

        // Closed forms restart exactly at any time.
        let closed = vec![Some(RExpr::Const(1.0)), Some(RExpr::Var(0))];
        let direct = Evolution::new(0.0, vec![v0, d0], closed.clone(), h);
        let t1 = t1 * 0.731;
        let restarted = Evolution::new(t1, direct.values_at(t1).unwrap(), closed, h);
        let (a, b) = (direct.values_at(t2).unwrap(), restarted.values_at(t2).unwrap());
        for i in 0..2 {
            prop_assert!((a[i] - b[i]).abs() <= 10.0 * 1e-9 * a[i].abs().max(1.0));
        }
    }

    #[test]
    fn a_constant_rate_is_exact(init in -1e3f64..1e3, c in -10.0f64..10.0, t0 in 0.0f64..100.0, dt in 0.0f64..100.0) {
        let e = Evolution::new(t0, vec![init], vec![Some(RExpr::Const(c))], 0.01);
        let t = t0 + dt;
        let expected = init + c * (t - t0);
        prop_assert!((e.value(0, t).unwrap() - expected).abs() <= 4.0 * f64::EPSILON * (init.abs() + (c * (t - t0)).abs()).max(1.0));
    }

    #[test]
    fn triggers_never_precede_the_start_and_hold(v0 in 47.0f64..60.0, threshold in 0.0f64..53.0, lo in 0.0f64..5.0, ode in any::<bool>(), op in 0usize..3) {
        let rate = if ode { wind_rate() } else { RExpr::Const(1.0) };
        let e = Evolution::new(0.0, vec![v0], vec![Some(rate)], 0.01);
        let op = [CmpOp::Ge, CmpOp::Gt, CmpOp::Eq][op];
        let cond = Cond::Cmp(op, RExpr::Var(0), RExpr::Const(threshold));
        let (eps_t, eps_v) = (1e-6, 1e-9);
        if let Some(tr) = find_trigger(&cond, &e, lo, 200.0, eps_t, eps_v).unwrap() {
            prop_assert!(tr.time >= lo);
            let y = e.values_at(tr.time).unwrap();
            let widened = match op {
                CmpOp::Eq => (y[0] - threshold).abs() <= 1e-6,
                _ => cond.eval(tr.time, &y, eps_v).unwrap(),
            };
            prop_assert!(widened, "{op:?} {threshold} at {} gives {}", tr.time, y[0]);
        }
    }

    #[test]
    fn car_runs_respect_natural_action_semantics(plan in car_plan()) {
        let (inst, bat) = setup("car", "problem_v53");
        let cfg = Config { goal_margin: 200.0, ..Config::default() };
        let v = Validator::new(&inst, &bat, cfg.clone()).unwrap();
        let run = v.validate(&plan).unwrap();
        let acts = &run.report.actions;

        // Times never decrease.
        prop_assert!(acts.windows(2).all(|w| w[0].time <= w[1].time));

        for (j, a) in acts.iter().enumerate() {
            let pre = &run.situations[j].state;
            let idx = v.action_index(&a.symbol).unwrap();
            if a.natural {
                // Minimality: not possible just before, unless it is due at the start.
                let before = a.time - 10.0 * cfg.eps_time;
                prop_assert!(a.time == pre.start || !v.poss(pre, idx, &a.args, before).unwrap(), "{} at {}", a.term(), a.time);
            } else {
                // Agent actions never skip a natural action that is due.
                if let Some(c) = v.next_natural(pre, a.time, false, &BTreeSet::new()).unwrap() {
                    let (_, changed) = v.apply(pre, c.action, &c.args, c.trigger.time).unwrap();
                    prop_assert!(!changed, "{} was due before {}", bat.actions[c.action].symbol, a.term());
                }
            }
        }

        // Same inputs, same report.
        prop_assert_eq!(&v.validate(&plan).unwrap().report, &run.report);
    }

    #[test]
    fn plan_steps_print_and_parse_back(plan in car_plan()) {
        let text: String = plan.steps.iter().map(|s| format!("{s}\n")).collect();
        let back = parse_plan(&text).unwrap();
        prop_assert_eq!(back, plan);
    }

    #[test]
    fn classification_ignores_declaration_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let inst = common::instance("car", "problem");
        let base = classify(&inst).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut domain = inst.domain.clone();
        domain.actions.shuffle(&mut rng);
        domain.events.shuffle(&mut rng);
        domain.processes.shuffle(&mut rng);
        let shuffled = classify(&link(domain, inst.problem.clone()).unwrap()).unwrap();
        prop_assert_eq!(shuffled.predicates, base.predicates);
        prop_assert_eq!(shuffled.functions, base.functions);
        prop_assert_eq!(shuffled.signature, base.signature);
    }
}
