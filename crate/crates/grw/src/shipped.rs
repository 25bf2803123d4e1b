//! Domain, problem and selector files bundled with the binary.

use grw_core::selector::Selector;
use grw_core::Domain;

use crate::io::{self, Diagnostic, Dialect};

pub const DOMAINS: &[(&str, &str)] = &[
    ("blocksworld", include_str!("../data/domains/blocksworld.pddl")),
    ("logistics", include_str!("../data/domains/logistics.pddl")),
    ("gripper", include_str!("../data/domains/gripper.pddl")),
    ("assembly3", include_str!("../data/domains/assembly3.pddl")),
    ("sokoban", include_str!("../data/domains/sokoban.pddl")),
];

/// Native-format copies of two domains.
pub const NATIVE_DOMAINS: &[(&str, &str)] = &[
    ("blocksworld", include_str!("../data/domains/blocksworld.strips")),
    ("logistics", include_str!("../data/domains/logistics.strips")),
];

/// `(name, domain, file name, text)`
pub const PROBLEMS: &[(&str, &str, &str, &str)] = &[
    ("three-stack", "blocksworld", "three-stack.pddl", include_str!("../data/problems/three-stack.pddl")),
    ("bw-conj", "blocksworld", "bw-conj.strips", include_str!("../data/problems/bw-conj.strips")),
    ("gripper-4", "gripper", "gripper-4.pddl", include_str!("../data/problems/gripper-4.pddl")),
    ("sokoban-blocking", "sokoban", "sokoban-blocking.pddl", include_str!("../data/problems/sokoban-blocking.pddl")),
];

pub const SELECTORS: &[(&str, &str)] = &[
    ("blocksworld", include_str!("../data/selectors/blocksworld.sel")),
    ("logistics", include_str!("../data/selectors/logistics.sel")),
    ("assembly3", include_str!("../data/selectors/assembly3.sel")),
];

fn lookup<'a>(table: &[(&str, &'a str)], name: &str) -> Option<&'a str> {
    table.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn domain_text(name: &str) -> Option<&'static str> {
    lookup(DOMAINS, name)
}

pub fn domain(name: &str) -> Option<Result<Domain, Diagnostic>> {
    domain_text(name).map(|t| io::parse_domain(t, Dialect::Pddl))
}

pub fn selector(name: &str, d: &Domain) -> Option<Result<Selector, Diagnostic>> {
    lookup(SELECTORS, name).map(|t| io::sel::parse_selector(t, d))
}
