//! `.tcpkb` text format, result reports and the command-line driver.

mod lexer;
mod parser;
pub mod report;
mod serialize;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use parser::parse_kb;
pub use serialize::{serialize_kb, SerializeError};

use crate::kb::{validate_kb, Item, TcpKnowledgeBase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Location {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A located error message.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{at}: {message}")]
pub struct Diagnostic {
    pub at: Location,
    pub message: String,
}

impl Diagnostic {
    pub fn new(at: Location, message: impl Into<String>) -> Self {
        Self {
            at,
            message: message.into(),
        }
    }
}

/// A parsed knowledge base with the source location of every axiom and formula.
#[derive(Debug, Clone)]
pub struct KbDocument {
    pub kb: TcpKnowledgeBase,
    pub axiom_locations: Vec<Location>,
    pub formula_locations: Vec<Location>,
}

impl KbDocument {
    /// Structural validation with each violation placed at its axiom or formula.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let start = Location { line: 1, col: 1 };
        validate_kb(&self.kb)
            .into_iter()
            .map(|(item, v)| {
                let at = match item {
                    Item::Axiom(i) => self.axiom_locations.get(i).copied(),
                    Item::Formula(i) => self.formula_locations.get(i).copied(),
                    Item::Program => self.formula_locations.first().copied(),
                    Item::Signature => None,
                };
                Diagnostic::new(at.unwrap_or(start), v.to_string())
            })
            .collect()
    }
}

/// Parses and validates; all problems are returned together.
pub fn load_kb(text: &str) -> Result<KbDocument, Vec<Diagnostic>> {
    let doc = parse_kb(text).map_err(|d| vec![d])?;
    let problems = doc.validate();
    if problems.is_empty() {
        Ok(doc)
    } else {
        Err(problems)
    }
}
