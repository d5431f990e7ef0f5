//! The finite property-based domain.
//!
//! Each predicate `q` of arity `k` carries an ordered list of properties
//! `Psi(q)`, linear constraints over the canonical formals `A1..Ak`. An
//! abstract state for `q` is the subset of `Psi(q)` that holds, and the
//! transfer function computes that subset for a call from the constraints
//! of its calling context.

mod derive;
mod props_file;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::constraints::Store;
use crate::syntax::{AtomicConstraint, BodyAtom, LinExpr, Rat};

pub use derive::derive_properties;
pub use props_file::{parse_properties, print_properties};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("calling context for `{predicate}` is unsatisfiable")]
    UnsatisfiableContext { predicate: String },
    #[error("`{predicate}` is used with arity {found} but its properties have arity {expected}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("property `{constraint}` of `{predicate}` mentions a variable that is not a formal")]
    NotOverFormals { predicate: String, constraint: String },
}

/// Name of the `i`-th (zero-based) formal parameter: `A1`, `A2`, ...
pub fn formal(i: usize) -> String {
    format!("A{}", i + 1)
}

pub fn formals(arity: usize) -> Vec<String> {
    (0..arity).map(formal).collect()
}

/// A single element of `Psi(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Property {
    pub predicate: String,
    pub constraint: AtomicConstraint,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Entry {
    arity: usize,
    props: Vec<Property>,
}

/// The map `q -> Psi(q)`. Predicates without properties are absent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropertySet {
    by_pred: BTreeMap<String, Entry>,
}

impl PropertySet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `constraint` (over `A1..Ak`) to `Psi(predicate)` unless already present.
    /// Returns whether it was added.
    pub fn insert(&mut self, predicate: &str, arity: usize, constraint: AtomicConstraint) -> Result<bool, DomainError> {
        let allowed = formals(arity);
        if constraint.vars().any(|v| !allowed.iter().any(|a| a == v)) {
            return Err(DomainError::NotOverFormals {
                predicate: predicate.to_owned(),
                constraint: constraint.to_string(),
            });
        }
        let entry = self.by_pred.entry(predicate.to_owned()).or_insert_with(|| Entry {
            arity,
            props: Vec::new(),
        });
        if entry.arity != arity {
            return Err(DomainError::ArityMismatch {
                predicate: predicate.to_owned(),
                expected: entry.arity,
                found: arity,
            });
        }
        if entry.props.iter().any(|p| p.constraint == constraint) {
            return Ok(false);
        }
        entry.props.push(Property {
            predicate: predicate.to_owned(),
            constraint,
        });
        Ok(true)
    }

    /// `Psi(predicate)`, empty when the predicate has no properties.
    pub fn get(&self, predicate: &str) -> &[Property] {
        self.by_pred.get(predicate).map(|e| e.props.as_slice()).unwrap_or(&[])
    }

    pub fn arity(&self, predicate: &str) -> Option<usize> {
        self.by_pred.get(predicate).map(|e| e.arity)
    }

    pub fn predicates(&self) -> impl Iterator<Item = &str> {
        self.by_pred.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.by_pred.values().all(|e| e.props.is_empty())
    }

    pub fn total(&self) -> usize {
        self.by_pred.values().map(|e| e.props.len()).sum()
    }

    fn check_arity(&self, predicate: &str, found: usize) -> Result<(), DomainError> {
        match self.arity(predicate) {
            Some(expected) if expected != found => Err(DomainError::ArityMismatch {
                predicate: predicate.to_owned(),
                expected,
                found,
            }),
            _ => Ok(()),
        }
    }
}

/// A subset of `Psi(predicate)`, as ascending indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbstractState {
    predicate: String,
    members: Vec<usize>,
}

impl AbstractState {
    pub fn new(predicate: impl Into<String>, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        AbstractState {
            predicate: predicate.into(),
            members,
        }
    }

    /// The empty set of properties: no information.
    pub fn top(predicate: impl Into<String>) -> Self {
        Self::new(predicate, Vec::new())
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    pub fn is_subset(&self, other: &AbstractState) -> bool {
        self.predicate == other.predicate && self.members.iter().all(|&i| other.contains(i))
    }

    pub fn well_formed(&self, psi: &PropertySet) -> bool {
        let n = psi.get(&self.predicate).len();
        self.members.iter().all(|&i| i < n)
    }

    pub fn properties<'a>(&'a self, psi: &'a PropertySet) -> impl Iterator<Item = &'a Property> + 'a {
        let all = psi.get(&self.predicate);
        self.members.iter().map(move |&i| &all[i])
    }

    /// `[A1>0, A2>=A3]`
    pub fn describe(&self, psi: &PropertySet) -> String {
        let items: Vec<String> = self.properties(psi).map(|p| p.constraint.to_string()).collect();
        format!("[{}]", items.join(", "))
    }

    /// Whether every member property holds at the given argument values.
    pub fn holds_at(&self, psi: &PropertySet, values: &[Rat]) -> bool {
        let names = formals(values.len());
        self.properties(psi).all(|p| {
            p.constraint
                .eval(|v| names.iter().position(|n| n == v).map(|i| values[i].clone()))
                .unwrap_or(false)
        })
    }
}

impl fmt::Display for AbstractState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{", self.predicate)?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

/// Conjunction of the member properties, over `A1..Ak`.
pub fn gamma(phi: &AbstractState, psi: &PropertySet) -> Store {
    phi.properties(psi).map(|p| p.constraint.clone()).collect()
}

/// [`gamma`] with the formals renamed to `params`.
pub fn gamma_over(phi: &AbstractState, psi: &PropertySet, params: &[String]) -> Store {
    gamma(phi, psi).substitute(&formal_binding(params.iter().map(|p| LinExpr::var(p.clone()))))
}

fn formal_binding(args: impl IntoIterator<Item = LinExpr>) -> BTreeMap<String, LinExpr> {
    args.into_iter().enumerate().map(|(i, e)| (formal(i), e)).collect()
}

/// Transfer function: the properties of `callee.predicate` that hold for the
/// call's arguments in every solution of `context`.
pub fn delta_d(context: &Store, callee: &BodyAtom, psi: &PropertySet) -> Result<AbstractState, DomainError> {
    psi.check_arity(&callee.predicate, callee.args.len())?;
    if !context.satisfiable() {
        return Err(DomainError::UnsatisfiableContext {
            predicate: callee.predicate.clone(),
        });
    }
    let binding = formal_binding(callee.args.iter().cloned());
    let members = psi
        .get(&callee.predicate)
        .iter()
        .enumerate()
        .filter(|(_, p)| context.entails(&p.constraint.substitute(&binding)))
        .map(|(i, _)| i)
        .collect();
    Ok(AbstractState::new(callee.predicate.clone(), members))
}

/// The abstract state of `predicate` described by `store` over its formals.
pub fn abstract_of(
    predicate: &str,
    arity: usize,
    store: &Store,
    psi: &PropertySet,
) -> Result<AbstractState, DomainError> {
    let call = BodyAtom::new(predicate, formals(arity).into_iter().map(LinExpr::var).collect());
    delta_d(store, &call, psi)
}

/// The abstract state of a ground call. An equality store `{Ai = vi}`
/// entails a property exactly when the property evaluates to true at the
/// values, so the properties are evaluated directly.
pub fn abstract_ground(predicate: &str, values: &[Rat], psi: &PropertySet) -> Result<AbstractState, DomainError> {
    psi.check_arity(predicate, values.len())?;
    let names = formals(values.len());
    let lookup = |v: &str| names.iter().position(|n| n == v).map(|i| values[i].clone());
    let members = psi
        .get(predicate)
        .iter()
        .enumerate()
        .filter(|(_, p)| p.constraint.eval(lookup) == Some(true))
        .map(|(i, _)| i)
        .collect();
    Ok(AbstractState::new(predicate, members))
}
