//! Constrained Horn clause programs: syntax tree, text format and printer.
//!
//! The accepted format is a small Prolog-like clause language:
//!
//! ```text
//! while0(X,Y,M) :- X>0, if0(X,Y,M).
//! while0(X,Y,M) :- X=<0.
//! if0(X,Y,M) :- Y<M, Y1=Y+1, while0(X,Y1,M).
//! ```
//!
//! Arithmetic is linear over exact rationals. Head arguments must be distinct
//! variables; any other head pattern is written with an explicit equality.

mod ast;
mod expr;
mod lexer;
pub(crate) mod parser;

use std::fmt::Write as _;

use thiserror::Error;

pub use ast::{BodyAtom, Clause, Goal, Program, ProgramError};
pub use expr::{is_ident, is_var_name, rat, ratio, AtomicConstraint, LinExpr, Rat, RelOp};
pub use lexer::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: non-linear term; only constant coefficients may multiply a variable")]
    NonLinear { pos: Pos },
    #[error(
        "{pos}: argument {index} of the head of `{predicate}` is not a variable; use a fresh variable and an explicit equality constraint"
    )]
    NonVariableHead { pos: Pos, predicate: String, index: usize },
    #[error("{pos}: goal argument is not ground")]
    NonGround { pos: Pos },
    #[error("{pos}: unknown predicate `{predicate}`")]
    UnknownPredicate { pos: Pos, predicate: String },
    #[error("{pos}: `{var}` is not a parameter of `{predicate}`")]
    NotAParameter { pos: Pos, predicate: String, var: String },
    #[error("{pos}: {source}")]
    Invalid { pos: Pos, source: ProgramError },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::NonLinear { pos }
            | ParseError::NonVariableHead { pos, .. }
            | ParseError::NonGround { pos }
            | ParseError::UnknownPredicate { pos, .. }
            | ParseError::NotAParameter { pos, .. }
            | ParseError::Invalid { pos, .. } => *pos,
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parser::Parser::new(text)?.program()
}

/// Parse a ground call such as `while0(5,3,10)`; a trailing `.` is allowed.
pub fn parse_goal(text: &str) -> Result<Goal, ParseError> {
    parser::Parser::new(text)?.goal()
}

/// Parse a single constraint such as `X+1 >= Y`.
pub fn parse_constraint(text: &str) -> Result<AtomicConstraint, ParseError> {
    let mut p = parser::Parser::new(text)?;
    let (c, _) = p.constraint()?;
    if !p.at_eof() {
        return Err(ParseError::Syntax {
            pos: Pos::default(),
            message: "trailing input after constraint".into(),
        });
    }
    Ok(c)
}

pub fn print_clause(clause: &Clause) -> String {
    let mut out = clause.head_atom().to_string();
    let items: Vec<String> = clause
        .constraints
        .iter()
        .map(ToString::to_string)
        .chain(clause.body.iter().map(ToString::to_string))
        .collect();
    if !items.is_empty() {
        out.push_str(" :- ");
        out.push_str(&items.join(", "));
    }
    out.push('.');
    out
}

/// One clause per line; the empty program prints as the empty string.
pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    for c in program.clauses() {
        writeln!(out, "{}", print_clause(c)).expect("writing to a String cannot fail");
    }
    out
}
