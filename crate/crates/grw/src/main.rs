use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use grw::io::{self, Dialect, Diagnostic};
use grw::run::{self, Algo, Caps, CircuitKind, RunError};
use grw::suite::{self, ExperimentConfig};
use grw::{emit_plan, shipped, validate_plan, PlanRecord};
use grw_core::circuit::{DepthExpr, Outcome};
use grw_core::selector::Selector;
use grw_core::{Domain, Problem, ProblemOptions};

const OK: u8 = 0;
const NO_PLAN: u8 = 2;
const LIMIT: u8 = 3;
const INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "grw", version, about = "Goal-regression planning, width analysis and policy circuits")]
struct Cli {
    /// State-space cap (plan, analyze-width) or breadth cap (compile, rollout).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Search or recursion budget; compile depth budget.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Opt,
    Bwd,
    Sgrs,
    SgrsMemo,
    Iw,
    Select,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CircuitArg {
    Bwd,
    Sgrs,
    Selector,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DialectArg {
    Pddl,
    Strips,
}

#[derive(Subcommand)]
enum Cmd {
    /// Plan for a problem and validate the result.
    Plan {
        /// Domain file or built-in domain name.
        domain: String,
        /// Problem file or shipped problem name.
        problem: String,
        #[arg(long, value_enum, default_value_t = AlgoArg::Bwd)]
        algo: AlgoArg,
        /// IW width.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Selector file or built-in selector name (defaults to the domain's).
        #[arg(long)]
        selector: Option<String>,
    },
    /// Certify the regression width of a problem.
    AnalyzeWidth {
        domain: String,
        problem: String,
        #[arg(long, default_value_t = 2)]
        k_max: usize,
    },
    /// Compile a policy circuit.
    Compile {
        domain: String,
        problem: String,
        #[arg(long, value_enum, default_value_t = CircuitArg::Bwd)]
        method: CircuitArg,
        /// `const(c)`, `linear(a, b)` or an integer.
        #[arg(long, default_value = "const(10)")]
        depth: String,
        /// Goal-set size (bwd) or width (sgrs).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        selector: Option<String>,
    },
    /// Compile a circuit and roll it out from the initial state.
    Rollout {
        domain: String,
        problem: String,
        #[arg(long, value_enum, default_value_t = CircuitArg::Bwd)]
        method: CircuitArg,
        #[arg(long, default_value = "const(10)")]
        depth: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        selector: Option<String>,
        #[arg(long, default_value_t = run::DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// Print generated problem instances.
    Gen {
        /// blocksworld, logistics or assembly3.
        domain: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        extra_edges: usize,
        #[arg(long, value_enum, default_value_t = DialectArg::Pddl)]
        dialect: DialectArg,
        /// Write one file per instance into this directory.
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a built-in suite or a JSON experiment config.
    Bench {
        /// widths, bw-clear, logistics, empty, or a config file.
        suite: String,
        /// Seeds per row (built-in suites).
        #[arg(long)]
        seeds: Option<usize>,
        /// Record wall times.
        #[arg(long)]
        timing: bool,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<String>,
    },
}

struct Fail(u8, String);

impl From<RunError> for Fail {
    fn from(e: RunError) -> Self {
        Fail(if e.is_limit() { LIMIT } else { INPUT }, e.to_string())
    }
}

fn parse_fail(path: &str, d: Diagnostic) -> Fail {
    Fail(INPUT, format!("{path}:{d}"))
}

fn read(path: &str) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail(INPUT, format!("{path}: {e}")))
}

fn load_domain(arg: &str) -> Result<Domain, Fail> {
    if !Path::new(arg).exists() {
        if let Some(d) = shipped::domain(arg) {
            return d.map_err(|e| parse_fail(arg, e));
        }
    }
    let text = read(arg)?;
    io::parse_domain(&text, Dialect::detect(Some(arg), &text)).map_err(|e| parse_fail(arg, e))
}

fn load_problem(arg: &str, d: &Domain) -> Result<Problem, Fail> {
    let (name, text) = if Path::new(arg).exists() {
        (arg.to_string(), read(arg)?)
    } else if let Some(&(_, _, file, text)) = shipped::PROBLEMS.iter().find(|p| p.0 == arg) {
        (file.to_string(), text.to_string())
    } else {
        return Err(Fail(INPUT, format!("{arg}: no such file or shipped problem")));
    };
    io::parse_problem(&text, Dialect::detect(Some(&name), &text), d, ProblemOptions::default()).map_err(|e| parse_fail(&name, e))
}

fn load_selector(arg: Option<&str>, d: &Domain) -> Result<Option<Selector>, Fail> {
    let arg = arg.unwrap_or(&d.name);
    if !Path::new(arg).exists() {
        return match shipped::selector(arg, d) {
            Some(s) => s.map(Some).map_err(|e| parse_fail(arg, e)),
            None => Ok(None),
        };
    }
    let text = read(arg)?;
    io::sel::parse_selector(&text, d).map(Some).map_err(|e| parse_fail(arg, e))
}

fn depth(text: &str) -> Result<DepthExpr, Fail> {
    DepthExpr::parse(text).map_err(|e| Fail(INPUT, format!("--depth: {e}")))
}

fn circuit_kind(m: CircuitArg) -> CircuitKind {
    match m {
        CircuitArg::Bwd => CircuitKind::Bwd,
        CircuitArg::Sgrs => CircuitKind::Sgrs,
        CircuitArg::Selector => CircuitKind::Selector,
    }
}

fn print_plan(fmt: Format, p: &Problem, rec: &PlanRecord) {
    match fmt {
        Format::Json => println!("{}", emit_plan(rec)),
        Format::Table => {
            println!("{}: {} step(s) by {}", p.name, rec.length, rec.algorithm);
            for (i, s) in rec.actions.iter().enumerate() {
                println!("{:>4}  {}({})", i + 1, s.name, s.args.join(", "));
            }
        }
    }
}

fn real_main(cli: Cli) -> Result<u8, Fail> {
    let mut caps = Caps { budget: cli.budget, ..Caps::default() };
    match cli.cmd {
        Cmd::Plan { domain, problem, algo, k, selector } => {
            caps.state_cap = cli.cap;
            let d = load_domain(&domain)?;
            let p = load_problem(&problem, &d)?;
            let algo = match algo {
                AlgoArg::Opt => Algo::Opt,
                AlgoArg::Bwd => Algo::Bwd,
                AlgoArg::Sgrs => Algo::Sgrs,
                AlgoArg::SgrsMemo => Algo::SgrsMemo,
                AlgoArg::Iw => Algo::Iw,
                AlgoArg::Select => Algo::Select,
            };
            let sel = if algo == Algo::Select { load_selector(selector.as_deref(), &p.domain)? } else { None };
            let start = Instant::now();
            let Some(plan) = run::plan_with(algo, &p, k, sel.as_ref(), &caps)? else {
                eprintln!("{}: no plan", p.name);
                return Ok(NO_PLAN);
            };
            let verdict = validate_plan(&p, &plan);
            if !verdict.valid {
                return Err(Fail(NO_PLAN, format!("{}: invalid plan: {}", p.name, verdict.reason.unwrap_or_default())));
            }
            let mut rec = PlanRecord::new(&p, &plan, &run_name(algo, k));
            rec.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            rec.optimal = matches!(algo, Algo::Opt | Algo::Bwd | Algo::Sgrs).then_some(true);
            print_plan(cli.format, &p, &rec);
            Ok(OK)
        }
        Cmd::AnalyzeWidth { domain, problem, k_max } => {
            caps.state_cap = cli.cap;
            caps.k_max = Some(k_max);
            let d = load_domain(&domain)?;
            let p = load_problem(&problem, &d)?;
            let cert = run::width_certificate(&p, &caps)?;
            match (&cert, cli.format) {
                (Some(c), Format::Json) => println!("{}", serde_json::to_string_pretty(c).unwrap()),
                (Some(c), Format::Table) => {
                    println!("{}: goal {} certified at k = {} (k_max {}, N = {})", c.problem, c.goal, c.k, c.k_max, c.n_atoms);
                    println!("plan: {}", c.plan.join(", "));
                    for w in &c.witnesses {
                        println!("  width {}  sos {}  {}", w.width, w.sos, w.rule);
                    }
                    println!("verified: {}", c.verified);
                }
                (None, Format::Json) => println!("null"),
                (None, Format::Table) => println!("{}: no certificate up to k = {k_max}", p.name),
            }
            Ok(if cert.is_some_and(|c| c.verified) { OK } else { NO_PLAN })
        }
        Cmd::Compile { domain, problem, method, depth: dtext, k, selector } => {
            caps.breadth_cap = cli.cap;
            let d = load_domain(&domain)?;
            let p = load_problem(&problem, &d)?;
            let kind = circuit_kind(method);
            let sel = if kind == CircuitKind::Selector { load_selector(selector.as_deref(), &p.domain)? } else { None };
            let c = run::compile(kind, &p, depth(&dtext)?, k.unwrap_or(run::default_k(kind)), sel.as_ref(), &caps)?;
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&c).unwrap()),
                Format::Table => print!("{}", c.to_text()),
            }
            Ok(OK)
        }
        Cmd::Rollout { domain, problem, method, depth: dtext, k, selector, max_steps } => {
            caps.breadth_cap = cli.cap;
            caps.max_steps = Some(max_steps);
            let d = load_domain(&domain)?;
            let p = load_problem(&problem, &d)?;
            let kind = circuit_kind(method);
            let sel = if kind == CircuitKind::Selector { load_selector(selector.as_deref(), &p.domain)? } else { None };
            let c = run::compile(kind, &p, depth(&dtext)?, k.unwrap_or(run::default_k(kind)), sel.as_ref(), &caps)?;
            let start = Instant::now();
            let r = run::rollout(&c, &p, &caps)?;
            let mut rec = PlanRecord::new(&p, &r.plan, &format!("circuit-{}", kind.name()));
            rec.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            let outcome = match r.outcome {
                Outcome::Success => "success",
                Outcome::Stuck => "stuck",
                Outcome::Budget => "step budget",
            };
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({ "outcome": outcome, "layers": r.layers, "plan": rec })
                ),
                Format::Table => {
                    print_plan(cli.format, &p, &rec);
                    println!("outcome: {outcome}; layers {:?}", r.layers);
                }
            }
            Ok(match r.outcome {
                Outcome::Success if validate_plan(&p, &r.plan).valid => OK,
                Outcome::Budget => LIMIT,
                _ => NO_PLAN,
            })
        }
        Cmd::Gen { domain, n, count, extra_edges, dialect, out } => {
            let dialect = match dialect {
                DialectArg::Pddl => Dialect::Pddl,
                DialectArg::Strips => Dialect::Native,
            };
            if !["blocksworld", "logistics", "assembly3"].contains(&domain.as_str()) {
                return Err(Fail(INPUT, format!("no generator for `{domain}` (blocksworld, logistics, assembly3)")));
            }
            for i in 0..count as u64 {
                let seed = cli.seed + i;
                let p = suite::instance(&domain, n, seed, extra_edges).map_err(Fail::from)?;
                let text = io::print_problem(&p.to_spec(), dialect);
                match &out {
                    Some(dir) => {
                        let ext = if dialect == Dialect::Pddl { "pddl" } else { "strips" };
                        let path = Path::new(dir).join(format!("{}.{ext}", p.name));
                        std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, text)).map_err(|e| Fail(INPUT, format!("{dir}: {e}")))?;
                    }
                    None => print!("{text}"),
                }
            }
            Ok(OK)
        }
        Cmd::Bench { suite: name, seeds, timing, out } => {
            let mut config = match suite::builtin_suite(&name, seeds) {
                Some(c) => c,
                None => {
                    let text = read(&name)?;
                    serde_json::from_str::<ExperimentConfig>(&text).map_err(|e| Fail(INPUT, format!("{name}: {e}")))?
                }
            };
            config.timing |= timing;
            if cli.cap.is_some() {
                config.caps.state_cap = cli.cap;
            }
            if cli.budget.is_some() {
                config.caps.budget = cli.budget;
            }
            let report = suite::run_suite(&config);
            if let Some(path) = out {
                std::fs::write(&path, report.to_json()).map_err(|e| Fail(INPUT, format!("{path}: {e}")))?;
            }
            match cli.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Table => print!("{}", suite::format_table(&report)),
            }
            Ok(OK)
        }
    }
}

fn run_name(algo: Algo, k: usize) -> String {
    match algo {
        Algo::Iw => format!("iw({k})"),
        a => a.name().to_string(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match real_main(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
