//! Text format for property sets: `p(A,B,C): A>0; A=<0; B>=C.`

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::parser::Parser;
use crate::syntax::{ParseError, Program, ProgramError};

use super::{formal, formals, PropertySet};

/// Parse a properties file against `program`, whose predicates and arities
/// the blocks must match. Parameter names are local to each block.
pub fn parse_properties(text: &str, program: &Program) -> Result<PropertySet, ParseError> {
    let mut parser = Parser::new(text)?;
    let mut psi = PropertySet::new();
    while !parser.at_eof() {
        let block = parser.prop_block()?;
        let Some(arity) = program.arity(&block.predicate) else {
            return Err(ParseError::UnknownPredicate {
                pos: block.pos,
                predicate: block.predicate,
            });
        };
        if arity != block.params.len() {
            return Err(ParseError::Invalid {
                pos: block.pos,
                source: ProgramError::ArityMismatch {
                    predicate: block.predicate,
                    expected: arity,
                    found: block.params.len(),
                },
            });
        }
        let mut seen = BTreeSet::new();
        for (p, pos) in &block.params {
            if !seen.insert(p.as_str()) {
                return Err(ParseError::Invalid {
                    pos: *pos,
                    source: ProgramError::RepeatedHeadVar {
                        predicate: block.predicate.clone(),
                        var: p.clone(),
                    },
                });
            }
        }
        let renaming: BTreeMap<String, String> = block
            .params
            .iter()
            .enumerate()
            .map(|(i, (p, _))| (p.clone(), formal(i)))
            .collect();
        for (c, pos) in block.constraints {
            if let Some(v) = c.vars().find(|v| !renaming.contains_key(*v)) {
                return Err(ParseError::NotAParameter {
                    pos,
                    predicate: block.predicate.clone(),
                    var: v.to_owned(),
                });
            }
            psi.insert(&block.predicate, arity, c.rename(&renaming))
                .expect("renamed property mentions only formals");
        }
    }
    Ok(psi)
}

/// One block per predicate with at least one property, over `A1..Ak`.
pub fn print_properties(psi: &PropertySet) -> String {
    let mut out = String::new();
    for pred in psi.predicates() {
        let props = psi.get(pred);
        if props.is_empty() {
            continue;
        }
        let arity = psi.arity(pred).unwrap_or(0);
        let items: Vec<String> = props.iter().map(|p| p.constraint.to_string()).collect();
        out.push_str(&format!(
            "{}({}): {}.\n",
            pred,
            formals(arity).join(","),
            items.join("; ")
        ));
    }
    out
}
