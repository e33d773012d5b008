#![allow(dead_code)]

use std::path::PathBuf;

use hybrid_sc::compile::{compile, HybridBat};
use hybrid_sc::pddl::{link, parse_domain, parse_problem, PlanningInstance};
use hybrid_sc::validate::{parse_plan, Config, Run, Validator};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

/// Links `<dir>/domain.pddl` with `<dir>/<problem>.pddl`.
pub fn instance(dir: &str, problem: &str) -> PlanningInstance {
    let d = parse_domain(&read(&format!("{dir}/domain.pddl"))).unwrap();
    let p = parse_problem(&read(&format!("{dir}/{problem}.pddl"))).unwrap();
    link(d, p).unwrap()
}

pub fn setup(dir: &str, problem: &str) -> (PlanningInstance, HybridBat) {
    let inst = instance(dir, problem);
    let bat = compile(&inst).unwrap();
    (inst, bat)
}

pub fn run_with(dir: &str, problem: &str, plan: &str, cfg: Config) -> Run {
    let (inst, bat) = setup(dir, problem);
    let v = Validator::new(&inst, &bat, cfg).unwrap();
    v.validate(&parse_plan(plan).unwrap()).unwrap()
}

pub fn run(dir: &str, problem: &str, plan: &str) -> Run {
    run_with(dir, problem, plan, Config::default())
}

/// `(time term)` for every executed action.
pub fn sequence(run: &Run) -> Vec<(f64, String)> {
    run.report.actions.iter().map(|a| (a.time, a.term())).collect()
}
