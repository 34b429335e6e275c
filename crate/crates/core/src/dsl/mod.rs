//! The text frontend: domain (`.dom`), policy (`.pol`), and scenario (`.scn`)
//! files.
//!
//! The syntax is line-oriented: one statement per line, terminated by `.`,
//! with `%` comments. `normally` marks a statement defeasible, `if`
//! introduces conditions. Variables start with an uppercase letter and are
//! instantiated over their sorts at parse time, so parsing produces fully
//! ground structures. Parsing collects every diagnostic instead of stopping
//! at the first.

mod ground;
mod lex;
mod parse_dom;
mod parse_pol;
mod parse_scn;
pub mod print;

use std::fmt;

pub use parse_scn::{EventRecord, ObsRecord, Scenario, StaticObs};

use crate::domain::Domain;
use crate::policy::GroundPolicy;

/// A parse or validation problem, anchored to a source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    pub(crate) fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

/// Parses and validates a domain description. An empty file is a valid,
/// vacuous domain.
pub fn parse_domain(text: &str) -> Result<Domain, Vec<Diagnostic>> {
    parse_dom::parse(text)
}

/// Parses a policy against an already validated domain.
pub fn parse_policy(text: &str, domain: &Domain) -> Result<GroundPolicy, Vec<Diagnostic>> {
    parse_pol::parse(text, domain)
}

/// Parses a scenario against an already validated domain.
pub fn parse_scenario(text: &str, domain: &Domain) -> Result<Scenario, Vec<Diagnostic>> {
    parse_scn::parse(text, domain)
}
