//! A small language for describing radial measures.
//!
//! ```text
//! measure   := term (('+' | '-') term)*
//! term      := [scalar '*'] primitive | scalar
//! primitive := 'dirac' '(' real ')' | 'lebesgue'
//!            | 'poly' '(' '[' real (',' real)* ']' [',' real ',' real] ')'
//!            | 'jacobi' '(' real ',' real ')' | '(' measure ')'
//! scalar    := real | real 'i' | real ('+' | '-') real 'i'
//! ```
//!
//! `lebesgue` is `r dr`, `poly([c…], a, b)` is `(Σ c_m r^m) dr` on `[a, b)`
//! (default `[0, 1)`), `jacobi(p, q)` is `r^q (1-r)^p dr`. A bare scalar `c`
//! stands for `c*lebesgue`, the measure of the operator `c·I`. Reals may carry
//! a sign, and the first term may be negated.

mod ast;
mod elaborate;
mod lexer;
mod parser;
mod print;

use std::fmt;

use serde::Serialize;

pub use ast::{Measure, Num, Primitive, Scalar, ScalarForm, Sign, SignedTerm, Term};
pub use elaborate::elaborate;
pub use parser::{parse, MAX_NESTING};
pub use print::print;

use crate::error::{Error, Result};
use crate::measure::RadialMeasure;

/// Location of a node in the source: byte offset, 1-based line and column, byte length.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Span {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub len: usize,
}

impl Span {
    /// Smallest span covering both.
    pub fn to(self, end: Span) -> Span {
        Span {
            len: (end.offset + end.len).saturating_sub(self.offset),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    Lexical,
    UnexpectedToken,
    Domain,
    TooDeep,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
    pub span: Span,
    /// What the parser would have accepted at this point.
    pub expected: Vec<String>,
}

impl Diagnostic {
    /// Message, source line, and a caret marker under the offending text.
    pub fn render(&self, source: &str) -> String {
        let line_text = source
            .lines()
            .nth(self.span.line.saturating_sub(1))
            .unwrap_or("");
        let indent = line_text
            .chars()
            .take(self.span.column.saturating_sub(1))
            .map(|c| if c == '\t' { '\t' } else { ' ' })
            .collect::<String>();
        let width = source
            .get(self.span.offset..self.span.offset + self.span.len)
            .map(|s| s.chars().count())
            .unwrap_or(1)
            .max(1);
        let mut out = format!(
            "{}:{}: {}\n  {}\n  {}{}",
            self.span.line,
            self.span.column,
            self.message,
            line_text,
            indent,
            "^".repeat(width)
        );
        if !self.expected.is_empty() {
            out.push_str(&format!(
                "\n  expected one of: {}",
                self.expected.join(", ")
            ));
        }
        out
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}",
            self.span.line, self.span.column, self.message
        )
    }
}

/// Parses and elaborates in one step.
pub fn parse_measure(text: &str) -> Result<RadialMeasure> {
    parse(text)
        .and_then(|ast| elaborate(&ast))
        .map_err(Error::Parse)
}

/// Renders every diagnostic of a parse error against its source.
pub fn render_diagnostics(diagnostics: &[Diagnostic], source: &str) -> String {
    diagnostics
        .iter()
        .map(|d| d.render(source))
        .collect::<Vec<_>>()
        .join("\n")
}
