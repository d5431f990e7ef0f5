use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::expr::{is_ident, is_var_name, AtomicConstraint, LinExpr, Rat};

/// Structural problems in a clause or program, independent of source positions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("arity mismatch for `{predicate}`: expected {expected}, found {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error(
        "repeated head variable `{var}` in `{predicate}`; use a fresh variable and an explicit equality constraint"
    )]
    RepeatedHeadVar { predicate: String, var: String },
    #[error(
        "variable `{var}` in a `{predicate}` clause is neither a head parameter nor defined by an equality constraint"
    )]
    UnboundLocal { predicate: String, var: String },
    #[error("`{0}` is not a valid predicate name")]
    BadPredicateName(String),
    #[error("`{0}` is not a valid variable name")]
    BadVariableName(String),
}

/// A call `p(e1, ..., ek)` in a clause body.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BodyAtom {
    pub predicate: String,
    pub args: Vec<LinExpr>,
}

impl BodyAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<LinExpr>) -> Self {
        BodyAtom {
            predicate: predicate.into(),
            args,
        }
    }

    /// Argument variable names, if every argument is a distinct plain variable.
    pub fn distinct_var_args(&self) -> Option<Vec<&str>> {
        let vars: Vec<&str> = self.args.iter().map(LinExpr::as_var).collect::<Option<_>>()?;
        let unique: BTreeSet<&str> = vars.iter().copied().collect();
        (unique.len() == vars.len()).then_some(vars)
    }
}

impl fmt::Display for BodyAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// `head(params) :- constraints, body.`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: String,
    pub params: Vec<String>,
    pub constraints: Vec<AtomicConstraint>,
    pub body: Vec<BodyAtom>,
}

impl Clause {
    pub fn new(
        head: impl Into<String>,
        params: Vec<String>,
        constraints: Vec<AtomicConstraint>,
        body: Vec<BodyAtom>,
    ) -> Result<Self, ProgramError> {
        let clause = Clause {
            head: head.into(),
            params,
            constraints,
            body,
        };
        clause.validate()?;
        Ok(clause)
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn validate(&self) -> Result<(), ProgramError> {
        if !is_ident(&self.head) {
            return Err(ProgramError::BadPredicateName(self.head.clone()));
        }
        let mut seen = BTreeSet::new();
        for p in &self.params {
            if !is_var_name(p) {
                return Err(ProgramError::BadVariableName(p.clone()));
            }
            if !seen.insert(p.as_str()) {
                return Err(ProgramError::RepeatedHeadVar {
                    predicate: self.head.clone(),
                    var: p.clone(),
                });
            }
        }
        for a in &self.body {
            if !is_ident(&a.predicate) {
                return Err(ProgramError::BadPredicateName(a.predicate.clone()));
            }
        }
        let defined: BTreeSet<&str> = self
            .constraints
            .iter()
            .filter(|c| c.is_equality())
            .flat_map(AtomicConstraint::vars)
            .collect();
        for v in self.vars() {
            if !is_var_name(&v) {
                return Err(ProgramError::BadVariableName(v));
            }
            if !seen.contains(v.as_str()) && !defined.contains(v.as_str()) {
                return Err(ProgramError::UnboundLocal {
                    predicate: self.head.clone(),
                    var: v,
                });
            }
        }
        Ok(())
    }

    /// All variables mentioned in constraints or body arguments.
    pub fn vars(&self) -> BTreeSet<String> {
        self.constraints
            .iter()
            .flat_map(AtomicConstraint::vars)
            .chain(self.body.iter().flat_map(|a| a.args.iter().flat_map(LinExpr::vars)))
            .map(str::to_owned)
            .collect()
    }

    /// Variables that are not head parameters.
    pub fn locals(&self) -> BTreeSet<String> {
        let mut vars = self.vars();
        for p in &self.params {
            vars.remove(p);
        }
        vars
    }

    pub fn head_atom(&self) -> BodyAtom {
        BodyAtom::new(
            self.head.clone(),
            self.params.iter().map(|p| LinExpr::var(p.clone())).collect(),
        )
    }
}

/// An ordered list of clauses plus the arity of every predicate they mention.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    clauses: Vec<Clause>,
    predicates: BTreeMap<String, usize>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Result<Self, ProgramError> {
        let mut program = Program::default();
        for c in clauses {
            program.push(c)?;
        }
        Ok(program)
    }

    pub fn push(&mut self, clause: Clause) -> Result<(), ProgramError> {
        clause.validate()?;
        self.declare(&clause.head, clause.arity())?;
        for a in &clause.body {
            self.declare(&a.predicate, a.args.len())?;
        }
        self.clauses.push(clause);
        Ok(())
    }

    /// Record `predicate/arity`, checking consistency with earlier uses.
    pub fn declare(&mut self, predicate: &str, arity: usize) -> Result<(), ProgramError> {
        if !is_ident(predicate) {
            return Err(ProgramError::BadPredicateName(predicate.to_owned()));
        }
        match self.predicates.get(predicate) {
            Some(&expected) if expected != arity => Err(ProgramError::ArityMismatch {
                predicate: predicate.to_owned(),
                expected,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.predicates.insert(predicate.to_owned(), arity);
                Ok(())
            }
        }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn predicates(&self) -> &BTreeMap<String, usize> {
        &self.predicates
    }

    pub fn arity(&self, predicate: &str) -> Option<usize> {
        self.predicates.get(predicate).copied()
    }

    /// Clauses whose head is `predicate`, with their index in the program.
    pub fn clauses_for<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = (usize, &'a Clause)> + 'a {
        self.clauses
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.head == predicate)
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }
}

/// A ground call `p(v1, ..., vk)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Goal {
    pub predicate: String,
    pub args: Vec<Rat>,
}

impl Goal {
    pub fn new(predicate: impl Into<String>, args: Vec<Rat>) -> Self {
        Goal {
            predicate: predicate.into(),
            args,
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::expr::{rat, RelOp};

    fn v(n: &str) -> LinExpr {
        LinExpr::var(n)
    }

    #[test]
    fn repeated_head_variable_is_rejected() {
        let err = Clause::new("p", vec!["X".into(), "X".into()], vec![], vec![]).unwrap_err();
        assert!(matches!(err, ProgramError::RepeatedHeadVar { .. }));
        assert!(err.to_string().contains("explicit equality"));
    }

    #[test]
    fn local_must_be_defined_by_equality() {
        let bad = Clause::new(
            "p",
            vec!["X".into()],
            vec![AtomicConstraint::new(v("Z"), RelOp::Gt, v("X"))],
            vec![BodyAtom::new("q", vec![v("Z")])],
        );
        assert!(matches!(bad, Err(ProgramError::UnboundLocal { .. })));
        let ok = Clause::new(
            "p",
            vec!["X".into()],
            vec![AtomicConstraint::new(
                v("Z"),
                RelOp::Eq,
                v("X").plus(&LinExpr::constant(rat(1))),
            )],
            vec![BodyAtom::new("q", vec![v("Z")])],
        )
        .unwrap();
        assert_eq!(ok.locals().into_iter().collect::<Vec<_>>(), vec!["Z".to_string()]);
    }

    #[test]
    fn arity_must_be_consistent() {
        let c1 = Clause::new("p", vec!["X".into()], vec![], vec![BodyAtom::new("q", vec![v("X")])]).unwrap();
        let c2 = Clause::new("q", vec!["X".into(), "Y".into()], vec![], vec![]).unwrap();
        let err = Program::new(vec![c1, c2]).unwrap_err();
        assert_eq!(
            err,
            ProgramError::ArityMismatch {
                predicate: "q".into(),
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn distinct_var_args() {
        let a = BodyAtom::new("p", vec![v("X"), v("Y")]);
        assert_eq!(a.distinct_var_args(), Some(vec!["X", "Y"]));
        let b = BodyAtom::new("p", vec![v("X"), v("X")]);
        assert_eq!(b.distinct_var_args(), None);
        let c = BodyAtom::new("p", vec![v("X").plus(&LinExpr::constant(rat(1)))]);
        assert_eq!(c.distinct_var_args(), None);
    }
}
