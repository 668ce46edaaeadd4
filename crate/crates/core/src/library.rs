//! Named processes, configurations and formulas used by the CLI and the
//! regression suites.

use crate::history::{parse_ext_configuration, Configuration, ExtConfiguration};
use crate::logic::{parse_formula, Formula};
use crate::syntax::{parse_process, Process};

pub const PROCESSES: &[(&str, &str)] = &[
    ("P1", "txn l { a.co } else { 0 }"),
    ("P1_BRANCH", "txn l { a.co + b } else { 0 }"),
    (
        "P2",
        "txn k1 { a.co } else { 0 } | txn k2 { b.co } else { 0 }",
    ),
    (
        "Q2",
        "nu p.(txn k1 { a.p.co + a.co } else { 0 } | txn k2 { b.'p.co + b.co } else { 0 })",
    ),
    ("P3", "txn k { a.b.co + b.a.co } else { 0 }"),
    (
        "Q3",
        "txn k1 { a.co } else { 0 } | txn k2 { b.co } else { 0 }",
    ),
    (
        "O",
        "txn l1 { 'a.(co | w_1) } else { 0 } | txn l2 { 'b.(co | w_2) } else { 0 }",
    ),
];

pub const FORMULAS: &[(&str, &str)] = &[
    (
        "hasco_intro",
        "<x(a)><y(b)>(~hasco(x) & <tau>hasco(x) & [tau](hasco(x) <-> hasco(y)))",
    ),
    ("eq_together", "<x(a)><y(b)> x =co y"),
    ("canco_together", "<x(a)><y(b)><co{x, y}> tt"),
];

/// The two configurations that agree on committed names but not on
/// which of them committed together.
pub const SPLIT_COMMIT: &str = "{{#k}, {#l}}; {1: #k(co), 2: #l(co)}; 0";
pub const JOINT_COMMIT: &str = "{{#k, #l}}; {1: #k(co), 2: #l(co)}; 0";

pub fn source(name: &str) -> Option<&'static str> {
    PROCESSES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// A library process by name.
///
/// # Panics
/// On an unknown name.
pub fn process(name: &str) -> Process {
    let src = source(name).unwrap_or_else(|| panic!("no library process {name}"));
    parse_process(src).expect("library processes parse")
}

pub fn formula(name: &str) -> Formula {
    let src = FORMULAS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .unwrap_or_else(|| panic!("no library formula {name}"));
    parse_formula(src).expect("library formulas parse")
}

pub fn initial(name: &str) -> Configuration {
    Configuration::initial(process(name))
}

pub fn ext_initial(name: &str) -> ExtConfiguration {
    ExtConfiguration::initial(process(name))
}

pub fn split_commit() -> ExtConfiguration {
    parse_ext_configuration(SPLIT_COMMIT).unwrap()
}

pub fn joint_commit() -> ExtConfiguration {
    parse_ext_configuration(JOINT_COMMIT).unwrap()
}

/// Resolves a library name or parses process text.
pub fn resolve(text: &str) -> Result<Process, crate::lex::ParseError> {
    match source(text.trim()) {
        Some(src) => parse_process(src),
        None => parse_process(text),
    }
}
