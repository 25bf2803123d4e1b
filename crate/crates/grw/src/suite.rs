//! Batch experiments: seeded instance suites aggregated into report rows.

use std::fmt::Write;
use std::time::Instant;

use grw_core::circuit::{DepthExpr, Outcome};
use grw_core::domains;
use grw_core::selector::{assembly3_selector, blocksworld_selector, logistics_selector, Selector};
use grw_core::{ModelError, Problem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::plan::validate_plan;
use crate::run::{self, Algo, Caps, CircuitKind, RunError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Method {
    Plan {
        algo: Algo,
        #[serde(default)]
        k: usize,
    },
    Width,
    Circuit {
        circuit: CircuitKind,
        depth: String,
        #[serde(default)]
        k: Option<usize>,
    },
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Plan { algo: Algo::Iw, k } => format!("iw({k})"),
            Method::Plan { algo, .. } => algo.name().to_string(),
            Method::Width => "width".to_string(),
            Method::Circuit { circuit, .. } => format!("circuit-{}", circuit.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub start: u64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowConfig {
    pub domain: String,
    /// Instance size; ignored by the fixed gripper and sokoban instances.
    pub n: usize,
    pub method: Method,
    pub seeds: Seeds,
    /// Extra roads per Logistics instance.
    #[serde(default)]
    pub extra_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub suite: String,
    pub rows: Vec<RowConfig>,
    #[serde(default)]
    pub caps: Caps,
    /// Record wall times in the report (makes it run-dependent).
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("configs serialize");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub domain: String,
    pub n: usize,
    pub method: String,
    pub depth: Option<String>,
    /// Layers the circuit ran with at this `n`.
    pub layers: Option<usize>,
    pub instances: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Over successful runs only.
    pub mean_length: Option<f64>,
    pub stderr_length: Option<f64>,
    pub mean_wall_ms: Option<f64>,
    /// Certified widths as `k=<k>: <count>` entries.
    pub width: Option<String>,
    /// Distinct error messages with their counts.
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config_hash: String,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// One generated instance of a domain.
pub fn instance(domain: &str, n: usize, seed: u64, extra_edges: usize) -> Result<Problem, RunError> {
    Ok(match domain {
        "blocksworld" => domains::gen_blocksworld(n, seed),
        "logistics" => domains::gen_logistics(n, extra_edges, seed),
        "assembly3" => domains::gen_assembly3(n, seed),
        "gripper" => domains::gripper_instance(),
        "sokoban" => domains::sokoban_blocking(),
        other => return Err(RunError::Input(format!("no generator for domain `{other}`"))),
    })
}

fn model(e: ModelError) -> RunError {
    RunError::Input(e.to_string())
}

pub fn builtin_selector(domain: &str, d: &grw_core::Domain) -> Option<Selector> {
    match domain {
        "blocksworld" => blocksworld_selector(d).ok(),
        "logistics" => logistics_selector(d).ok(),
        "assembly3" => assembly3_selector(d).ok(),
        _ => None,
    }
}

#[derive(Clone, Debug, Default)]
struct RunResult {
    success: bool,
    length: Option<usize>,
    wall_ms: f64,
    width_k: Option<usize>,
    error: Option<String>,
}

fn run_one(row: &RowConfig, seed: u64, caps: &Caps) -> RunResult {
    let start = Instant::now();
    let mut out = RunResult::default();
    let res = (|| -> Result<(), RunError> {
        let p = instance(&row.domain, row.n, seed, row.extra_edges)?;
        let sel = builtin_selector(&row.domain, &p.domain);
        let plan = match &row.method {
            Method::Plan { algo, k } => run::plan_with(*algo, &p, *k, sel.as_ref(), caps)?,
            Method::Width => match run::width_certificate(&p, caps)? {
                Some(c) if c.verified => {
                    out.width_k = Some(c.k);
                    let steps: Vec<(String, Vec<String>)> = c.plan.iter().map(|a| grw_core::builder::split_call(a).unwrap()).collect();
                    let ids: Option<Vec<u32>> = steps
                        .iter()
                        .map(|(n, args)| p.find_action(n, &args.iter().map(String::as_str).collect::<Vec<_>>()))
                        .collect();
                    ids
                }
                _ => None,
            },
            Method::Circuit { circuit, depth, k } => {
                let expr = DepthExpr::parse(depth).map_err(model)?;
                let layers = DepthExpr::Const(expr.eval(row.n));
                let c = run::compile(*circuit, &p, layers, k.unwrap_or(run::default_k(*circuit)), sel.as_ref(), caps)?;
                let r = run::rollout(&c, &p, caps)?;
                (r.outcome == Outcome::Success).then_some(r.plan)
            }
        };
        if let Some(plan) = plan {
            let v = validate_plan(&p, &plan);
            if v.valid {
                out.success = true;
                out.length = Some(plan.len());
            } else {
                out.error = Some(format!("invalid plan: {}", v.reason.unwrap_or_default()));
            }
        }
        Ok(())
    })();
    if let Err(e) = res {
        out.error = Some(e.to_string());
    }
    out.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    out
}

fn aggregate(row: &RowConfig, runs: &[RunResult], timing: bool) -> ReportRow {
    let lens: Vec<f64> = runs.iter().filter_map(|r| r.length).map(|l| l as f64).collect();
    let m = lens.len();
    let mean = (m > 0).then(|| lens.iter().sum::<f64>() / m as f64);
    let stderr = mean.map(|mu| {
        if m < 2 {
            0.0
        } else {
            let var = lens.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / (m - 1) as f64;
            (var / m as f64).sqrt()
        }
    });
    let mut errors: Vec<(String, usize)> = Vec::new();
    for e in runs.iter().filter_map(|r| r.error.as_ref()) {
        match errors.iter_mut().find(|(x, _)| x == e) {
            Some((_, c)) => *c += 1,
            None => errors.push((e.clone(), 1)),
        }
    }
    let width = matches!(row.method, Method::Width).then(|| {
        let mut ks: Vec<usize> = runs.iter().filter_map(|r| r.width_k).collect();
        ks.sort_unstable();
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < ks.len() {
            let j = ks[i..].iter().position(|&k| k != ks[i]).map_or(ks.len(), |d| i + d);
            parts.push(format!("k={}: {}", ks[i], j - i));
            i = j;
        }
        let none = runs.len() - ks.len();
        if none > 0 {
            parts.push(format!("none: {none}"));
        }
        parts.join(", ")
    });
    let (depth, layers) = match &row.method {
        Method::Circuit { depth, .. } => (Some(depth.clone()), DepthExpr::parse(depth).ok().map(|d| d.eval(row.n))),
        _ => (None, None),
    };
    let successes = runs.iter().filter(|r| r.success).count();
    ReportRow {
        domain: row.domain.clone(),
        n: row.n,
        method: row.method.label(),
        depth,
        layers,
        instances: runs.len(),
        successes,
        success_rate: if runs.is_empty() { 0.0 } else { successes as f64 / runs.len() as f64 },
        mean_length: mean,
        stderr_length: stderr,
        mean_wall_ms: timing.then(|| runs.iter().map(|r| r.wall_ms).sum::<f64>() / runs.len().max(1) as f64),
        width,
        errors: errors.into_iter().map(|(e, c)| format!("{e} (x{c})")).collect(),
    }
}

/// Runs every (row, seed) pair in parallel; rows keep their order.
pub fn run_suite(config: &ExperimentConfig) -> Report {
    let jobs: Vec<(usize, u64)> = config
        .rows
        .iter()
        .enumerate()
        .flat_map(|(i, r)| (0..r.seeds.count as u64).map(move |s| (i, r.seeds.start + s)))
        .collect();
    let results: Vec<RunResult> = jobs.par_iter().map(|&(i, seed)| run_one(&config.rows[i], seed, &config.caps)).collect();
    let mut rows = Vec::new();
    let mut at = 0;
    for r in &config.rows {
        rows.push(aggregate(r, &results[at..at + r.seeds.count], config.timing));
        at += r.seeds.count;
    }
    Report { suite: config.suite.clone(), config_hash: config.hash(), rows }
}

fn row(domain: &str, n: usize, method: Method, count: usize) -> RowConfig {
    RowConfig { domain: domain.to_string(), n, method, seeds: Seeds { start: 0, count }, extra_edges: 1 }
}

fn circuit(kind: CircuitKind, depth: &str, k: Option<usize>) -> Method {
    Method::Circuit { circuit: kind, depth: depth.to_string(), k }
}

pub const SUITES: &[&str] = &["widths", "bw-clear", "logistics", "empty"];

/// Built-in suites; `count` overrides the number of seeds per row.
pub fn builtin_suite(name: &str, count: Option<usize>) -> Option<ExperimentConfig> {
    let rows = match name {
        "widths" => {
            let c = count.unwrap_or(10);
            vec![
                row("blocksworld", 4, Method::Width, c),
                row("logistics", 6, Method::Width, c),
                row("gripper", 0, Method::Width, 1),
                row("sokoban", 0, Method::Width, 1),
            ]
        }
        "bw-clear" => {
            let c = count.unwrap_or(30);
            let mut rows = Vec::new();
            for n in [10, 30, 50] {
                // the oracle is only affordable on the smallest size
                if n == 10 {
                    rows.push(row("blocksworld", n, Method::Plan { algo: Algo::Opt, k: 0 }, c));
                }
                rows.push(row("blocksworld", n, circuit(CircuitKind::Selector, "linear(1/10, 3)", None), c));
                rows.push(row("blocksworld", n, circuit(CircuitKind::Selector, "const(3)", None), c));
            }
            rows
        }
        "logistics" => {
            let c = count.unwrap_or(30);
            let mut rows = Vec::new();
            for n in [10, 30, 50] {
                rows.push(row("logistics", n, Method::Plan { algo: Algo::Bwd, k: 0 }, c));
                rows.push(row("logistics", n, circuit(CircuitKind::Sgrs, "linear(1/5, 1)", Some(0)), c));
                rows.push(row("logistics", n, circuit(CircuitKind::Sgrs, "const(3)", Some(0)), c));
            }
            rows
        }
        "empty" => Vec::new(),
        _ => return None,
    };
    Some(ExperimentConfig { suite: name.to_string(), rows, caps: Caps::default(), timing: false })
}

fn opt_f(v: Option<f64>, prec: usize) -> String {
    v.map_or("-".to_string(), |x| format!("{x:.prec$}"))
}

/// Plain-text table, one line per row.
pub fn format_table(r: &Report) -> String {
    let mut s = String::new();
    writeln!(s, "suite {} (config {})", r.suite, &r.config_hash[..12.min(r.config_hash.len())]).unwrap();
    writeln!(
        s,
        "{:<12} {:>4} {:<18} {:<16} {:>7} {:>8} {:>15} {:>10}  width",
        "domain", "n", "method", "depth", "inst", "success", "length", "wall ms"
    )
    .unwrap();
    for row in &r.rows {
        let depth = match (&row.depth, row.layers) {
            (Some(d), Some(l)) => format!("{d}={l}"),
            _ => "-".to_string(),
        };
        let len = match (row.mean_length, row.stderr_length) {
            (Some(m), Some(e)) => format!("{m:.2} ± {e:.2}"),
            _ => "-".to_string(),
        };
        writeln!(
            s,
            "{:<12} {:>4} {:<18} {:<16} {:>7} {:>8.3} {:>15} {:>10}  {}",
            row.domain,
            row.n,
            row.method,
            depth,
            row.instances,
            row.success_rate,
            len,
            opt_f(row.mean_wall_ms, 2),
            row.width.as_deref().unwrap_or("-")
        )
        .unwrap();
        for e in &row.errors {
            writeln!(s, "    error: {e}").unwrap();
        }
    }
    s
}
