mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use hybrid_sc::compile::{check_well_defined, compile, CompileError, CompileOptions, FindingTag, HybridBat, DEFAULT_SEA_CAP};
use hybrid_sc::pddl::{link, parse_domain, parse_problem, PlanningInstance};
use hybrid_sc::validate::{parse_plan, trace_csv, Run, Validator, Verdict};

use config::{FileConfig, NumericFlags};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_SEA_CAP: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_POTENTIAL_VIOLATION: u8 = 4;

/// Compile PDDL+ into hybrid situation-calculus theories and validate
/// timed plans against them.
///
/// Settings can also come from a TOML file named by HSC_CONFIG; flags
/// override it.
#[derive(Parser)]
#[command(name = "hsc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the action theory of a domain and problem.
    Compile {
        domain: PathBuf,
        problem: PathBuf,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Enumerate the disjuncts of every evolution axiom.
        #[arg(long)]
        expand_sea: bool,
        /// Most disjuncts one expanded evolution axiom may have.
        #[arg(long)]
        sea_cap: Option<u128>,
    },
    /// Execute a timed plan and decide whether it reaches the goal.
    Validate {
        domain: PathBuf,
        problem: PathBuf,
        plan: PathBuf,
        #[command(flatten)]
        numeric: NumericFlags,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write the report to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the temporal fluents along an executed plan.
    Trace {
        domain: PathBuf,
        problem: PathBuf,
        plan: PathBuf,
        #[command(flatten)]
        numeric: NumericFlags,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Time between rows.
        #[arg(long)]
        sample: Option<f64>,
        /// Add a column per functional fluent.
        #[arg(long)]
        with_dynamic: bool,
    },
    /// Print the symbol classification and well-definedness findings.
    Check {
        domain: PathBuf,
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let sea_cap = e.chain().any(|c| matches!(c.downcast_ref::<CompileError>(), Some(CompileError::SeaCap { .. })));
            ExitCode::from(if sea_cap { EXIT_SEA_CAP } else { EXIT_ERROR })
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(domain: &Path, problem: &Path) -> Result<PlanningInstance> {
    let d = parse_domain(&read(domain)?).with_context(|| format!("parsing {}", domain.display()))?;
    let p = parse_problem(&read(problem)?).with_context(|| format!("parsing {}", problem.display()))?;
    Ok(link(d, p)?)
}

fn compiled(domain: &Path, problem: &Path) -> Result<(PlanningInstance, HybridBat)> {
    let inst = load(domain, problem)?;
    let bat = compile(&inst)?;
    Ok((inst, bat))
}

fn execute(inst: &PlanningInstance, bat: &HybridBat, plan: &Path, numeric: &NumericFlags, file: &FileConfig) -> Result<Run> {
    let plan = parse_plan(&read(plan)?).with_context(|| format!("parsing {}", plan.display()))?;
    let v = Validator::new(inst, bat, numeric.resolve(file))?;
    Ok(v.validate(&plan)?)
}

fn verdict_code(v: Verdict) -> u8 {
    if v == Verdict::Valid {
        EXIT_OK
    } else {
        EXIT_INVALID
    }
}

fn run(cli: Cli) -> Result<u8> {
    let file = FileConfig::load_env()?;
    match cli.command {
        Command::Compile { domain, problem, out, expand_sea, sea_cap } => {
            let (_, bat) = compiled(&domain, &problem)?;
            let opts = CompileOptions {
                expand_sea: expand_sea || file.expand_sea.unwrap_or(false),
                sea_cap: sea_cap.or(file.sea_cap).unwrap_or(DEFAULT_SEA_CAP),
            };
            write_out(out.as_deref(), &bat.render(&opts)?)?;
            Ok(EXIT_OK)
        }
        Command::Validate { domain, problem, plan, numeric, format, out } => {
            let (inst, bat) = compiled(&domain, &problem)?;
            let run = execute(&inst, &bat, &plan, &numeric, &file)?;
            let text = match format {
                Format::Text => run.report.to_text(),
                Format::Json => serde_json::to_string_pretty(&run.report)? + "\n",
            };
            write_out(out.as_deref(), &text)?;
            Ok(verdict_code(run.report.verdict))
        }
        Command::Trace { domain, problem, plan, numeric, csv, sample, with_dynamic } => {
            let (inst, bat) = compiled(&domain, &problem)?;
            let cfg = numeric.resolve(&file);
            let sample = sample.or(file.sample).unwrap_or(1.0);
            anyhow::ensure!(sample.is_finite() && sample > 0.0, "sample must be positive, got {sample}");
            let plan_text = parse_plan(&read(&plan)?).with_context(|| format!("parsing {}", plan.display()))?;
            let v = Validator::new(&inst, &bat, cfg)?;
            let run = v.validate(&plan_text)?;
            write_out(csv.as_deref(), &trace_csv(&v, &run, sample, with_dynamic)?)?;
            if run.report.verdict != Verdict::Valid {
                eprintln!("{}", run.report.to_text().trim_end());
            }
            Ok(verdict_code(run.report.verdict))
        }
        Command::Check { domain, problem, format } => {
            let (_, bat) = compiled(&domain, &problem)?;
            let findings = check_well_defined(&bat);
            let text = match format {
                Format::Json => {
                    serde_json::to_string_pretty(&serde_json::json!({ "symbols": bat.table, "findings": findings }))? + "\n"
                }
                Format::Text => check_text(&bat, &findings),
            };
            print!("{text}");
            let violated = findings.iter().any(|f| f.tag == FindingTag::PotentialViolation);
            Ok(if violated { EXIT_POTENTIAL_VIOLATION } else { EXIT_OK })
        }
    }
}

fn check_text(bat: &HybridBat, findings: &[hybrid_sc::compile::Finding]) -> String {
    let t = &bat.table;
    let mut out = String::from("predicates:\n");
    for (name, class) in &t.predicates {
        let _ = writeln!(out, "  {name}: {}", format!("{class:?}").to_lowercase());
    }
    out.push_str("functions:\n");
    for (name, class) in &t.functions {
        let _ = writeln!(out, "  {name}: {}", format!("{class:?}").to_lowercase());
    }
    if !t.processes.is_empty() {
        out.push_str("processes:\n");
        for (name, p) in &t.processes {
            let _ = writeln!(out, "  {name}: fluent {}, natural actions {} and {}", p.fluent, p.begin, p.end);
        }
    }
    if !t.tils.is_empty() {
        out.push_str("timed literals:\n");
        for til in &t.tils {
            let _ = writeln!(out, "  {} at {}", til.action, til.time);
        }
    }
    out.push_str("findings:\n");
    for f in findings {
        let _ = writeln!(out, "  [{}] {}: {}", f.tag.label(), f.subject, f.message);
    }
    for w in &bat.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}
