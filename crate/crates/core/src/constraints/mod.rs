//! Conjunctions of linear constraints over the rationals and exact decision
//! procedures on them.

mod fm;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{AtomicConstraint, LinExpr};

/// A conjunction of normalized atomic constraints. The empty store is `true`.
///
/// Conjunct order is insertion order and is preserved by every operation, so
/// printing is reproducible.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Store {
    conjuncts: Vec<AtomicConstraint>,
}

impl Store {
    pub fn top() -> Self {
        Store::default()
    }

    pub fn from_conjuncts(conjuncts: impl IntoIterator<Item = AtomicConstraint>) -> Self {
        Store {
            conjuncts: conjuncts.into_iter().collect(),
        }
    }

    /// The store `{X1 = v1, ..., Xk = vk}`.
    pub fn equalities<'a>(pairs: impl IntoIterator<Item = (&'a str, LinExpr)>) -> Self {
        Store::from_conjuncts(
            pairs
                .into_iter()
                .map(|(v, e)| AtomicConstraint::new(LinExpr::var(v), crate::syntax::RelOp::Eq, e)),
        )
    }

    pub fn conjuncts(&self) -> &[AtomicConstraint] {
        &self.conjuncts
    }

    pub fn is_top(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.conjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn push(&mut self, c: AtomicConstraint) {
        self.conjuncts.push(c);
    }

    pub fn vars(&self) -> BTreeSet<String> {
        fm::vars_of(&self.conjuncts)
    }

    /// `self` followed by `other`.
    pub fn conjoin(&self, other: &Store) -> Store {
        let mut conjuncts = self.conjuncts.clone();
        conjuncts.extend(other.conjuncts.iter().cloned());
        Store { conjuncts }
    }

    pub fn with(&self, c: AtomicConstraint) -> Store {
        let mut s = self.clone();
        s.push(c);
        s
    }

    /// Simultaneous substitution of every bound variable.
    pub fn substitute(&self, binding: &BTreeMap<String, LinExpr>) -> Store {
        Store::from_conjuncts(self.conjuncts.iter().map(|c| c.substitute(binding)))
    }

    pub fn satisfiable(&self) -> bool {
        fm::eliminate(&self.conjuncts, &self.vars()).is_some()
    }

    /// Every rational solution of `self` satisfies `c`.
    ///
    /// Decided by refuting `self /\ not c`; the negation of an equality is
    /// checked as two strict cases.
    pub fn entails(&self, c: &AtomicConstraint) -> bool {
        c.negation().into_iter().all(|neg| !self.with(neg).satisfiable())
    }

    pub fn entails_all(&self, other: &Store) -> bool {
        other.conjuncts.iter().all(|c| self.entails(c))
    }

    /// The strongest conjunction over `keep` implied by `self`.
    /// An unsatisfiable store projects to `{0<0}`.
    pub fn project(&self, keep: &BTreeSet<String>) -> Store {
        let elim: BTreeSet<String> = self.vars().difference(keep).cloned().collect();
        match fm::eliminate(&self.conjuncts, &elim) {
            Some(cs) => Store::from_conjuncts(cs),
            None => Store::from_conjuncts([AtomicConstraint::falsum()]),
        }
    }

    /// Drop, left to right, every conjunct entailed by the conjuncts still kept.
    pub fn simplify(&self) -> Store {
        self.simplify_pinned(|_| false)
    }

    /// As [`Store::simplify`], but conjuncts for which `pinned` holds are never
    /// dropped (they still count when checking whether others are redundant).
    pub fn simplify_pinned<F>(&self, pinned: F) -> Store
    where
        F: Fn(&AtomicConstraint) -> bool,
    {
        let mut kept: Vec<Option<&AtomicConstraint>> = self.conjuncts.iter().map(Some).collect();
        for i in 0..kept.len() {
            let c = self.conjuncts[i].clone();
            if pinned(&c) {
                continue;
            }
            let others = Store::from_conjuncts(
                kept.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .filter_map(|(_, c)| c.cloned()),
            );
            if others.entails(&c) {
                kept[i] = None;
            }
        }
        Store::from_conjuncts(kept.into_iter().flatten().cloned())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AtomicConstraint> {
        self.conjuncts.iter()
    }
}

impl FromIterator<AtomicConstraint> for Store {
    fn from_iter<I: IntoIterator<Item = AtomicConstraint>>(iter: I) -> Self {
        Store::from_conjuncts(iter)
    }
}

impl<'a> IntoIterator for &'a Store {
    type Item = &'a AtomicConstraint;
    type IntoIter = std::slice::Iter<'a, AtomicConstraint>;

    fn into_iter(self) -> Self::IntoIter {
        self.conjuncts.iter()
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conjuncts.is_empty() {
            return f.write_str("true");
        }
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
