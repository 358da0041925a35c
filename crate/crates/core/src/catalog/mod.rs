//! The `.hnov` text format for algebras and morphism families.
//!
//! ```text
//! algebra N6 dim=2 params=(lambda) forbid=(lambda = 0, lambda = 1) {
//!   e1*e2 = e1;
//!   e2*e1 = lambda*e1;
//!   e2*e2 = e2;
//! }
//!
//! morphism N6.f1 on N6 params=(a) forbid=(a = 0) {
//!   alpha(e1) = a*e1;
//!   alpha(e2) = e2;
//! } expect {
//!   e1*e2 = a*e1;
//!   e2*e1 = lambda*a*e1;
//!   e2*e2 = e2;
//! }
//! ```
//!
//! Options may appear in any order, except that `params` and `roots` come
//! before anything that uses them. Besides the constraint options there are
//! `label`, `note` and `skip`, each taking a string. Omitted products and
//! omitted `alpha` rows are zero.

mod bundled;
mod lexer;
mod parser;
mod render;

pub use bundled::{bundled, bundled_catalogs, DIM2_SOURCE, DIM3_SOURCE};
pub use parser::{parse_catalog, parse_scalar};
pub use render::render_catalog;

use std::fmt;

use crate::algebra::Algebra;
use crate::morphisms::MorphismFamily;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, message: &str, expected: &[&str]) -> Self {
        ParseError {
            line,
            col,
            message: message.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// A parsed `.hnov` file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CatalogDocument {
    pub algebras: Vec<Algebra>,
    pub families: Vec<MorphismFamily>,
}

impl CatalogDocument {
    pub fn algebra(&self, name: &str) -> Option<&Algebra> {
        self.algebras.iter().find(|a| a.name == name)
    }

    pub fn family(&self, name: &str) -> Option<&MorphismFamily> {
        self.families.iter().find(|f| f.name == name)
    }

    /// Families on the named algebra, in file order.
    pub fn families_of<'a>(&'a self, algebra: &'a str) -> impl Iterator<Item = &'a MorphismFamily> + 'a {
        self.families.iter().filter(move |f| f.algebra == algebra)
    }
}
