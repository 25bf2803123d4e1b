//! Readers and printers for domains, problems, selectors and plans.

pub mod diag;
mod lex;
pub mod native;
pub mod pddl;
mod resolve;
pub mod sel;
mod sexp;

use grw_core::{Domain, Problem, ProblemOptions, ProblemSpec};

pub use diag::{DiagKind, Diagnostic, Pos};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    Pddl,
    Native,
}

impl Dialect {
    /// By extension, else by the first non-blank character.
    pub fn detect(path: Option<&str>, text: &str) -> Dialect {
        if let Some(p) = path {
            if p.ends_with(".pddl") {
                return Dialect::Pddl;
            }
            if p.ends_with(".strips") {
                return Dialect::Native;
            }
        }
        let first = text
            .lines()
            .map(str::trim_start)
            .find(|l| !l.is_empty() && !l.starts_with(';') && !l.starts_with('#'));
        if first.is_some_and(|l| l.starts_with('(')) {
            Dialect::Pddl
        } else {
            Dialect::Native
        }
    }
}

pub fn parse_domain(text: &str, dialect: Dialect) -> Result<Domain, Diagnostic> {
    match dialect {
        Dialect::Pddl => pddl::parse_domain(text),
        Dialect::Native => native::parse_domain(text),
    }
}

pub fn parse_problem_spec(text: &str, dialect: Dialect, domain: &Domain) -> Result<ProblemSpec, Diagnostic> {
    match dialect {
        Dialect::Pddl => pddl::parse_problem(text, domain),
        Dialect::Native => native::parse_problem(text, domain),
    }
}

/// Parses and grounds a problem; conjunctive goals are wrapped unless
/// `opts.wrap_goal` is off.
pub fn parse_problem(text: &str, dialect: Dialect, domain: &Domain, opts: ProblemOptions) -> Result<Problem, Diagnostic> {
    let spec = parse_problem_spec(text, dialect, domain)?;
    Problem::from_spec(domain, &spec, opts).map_err(|e| Diagnostic::model(Pos { line: 1, col: 1 }, e))
}

pub fn print_domain(domain: &Domain, dialect: Dialect) -> String {
    match dialect {
        Dialect::Pddl => pddl::print_domain(domain),
        Dialect::Native => native::print_domain(domain),
    }
}

pub fn print_problem(spec: &ProblemSpec, dialect: Dialect) -> String {
    match dialect {
        Dialect::Pddl => pddl::print_problem(spec),
        Dialect::Native => native::print_problem(spec),
    }
}
