//! Differential testing of a refined program against its original.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::domain::PropertySet;
use crate::interp::{solve, InterpError, OutcomeKind};
use crate::syntax::{rat, Goal, Program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("unknown entry version `{0}` in the refined program")]
    UnknownEntryVersion(String),
    #[error("entry version `{name}` has arity {found}, goals have arity {expected}")]
    EntryArity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("while running {goal}: {source}")]
    Interp { goal: String, source: InterpError },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub goal: Goal,
    pub original: OutcomeKind,
    pub residual: OutcomeKind,
}

/// `trials == agreements + disagreements.len() + budget_exhausted`
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquivReport {
    pub trials: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
    pub budget_exhausted: usize,
}

impl EquivReport {
    pub fn is_equivalent(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// `n` goals with integer arguments uniform in `[lo, hi]`, reproducible from `seed`.
pub fn sample_goals(predicate: &str, arity: usize, lo: i64, hi: i64, n: usize, seed: u64) -> Vec<Goal> {
    assert!(lo <= hi, "empty sampling range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let args = (0..arity).map(|_| rat(rng.random_range(lo..=hi))).collect();
            Goal::new(predicate, args)
        })
        .collect()
}

/// Run every goal on `original` (with `psi`) and the same arguments on
/// `entry_version` of `residual` (with no properties), and tally agreement
/// of success and failure. Trials run in parallel; the report is in goal order.
pub fn differential(
    original: &Program,
    residual: &Program,
    entry_version: &str,
    goals: &[Goal],
    psi: &PropertySet,
    budget: usize,
) -> Result<EquivReport, EquivError> {
    let Some(found) = residual.arity(entry_version) else {
        return Err(EquivError::UnknownEntryVersion(entry_version.to_owned()));
    };
    if let Some(g) = goals.first() {
        if g.args.len() != found {
            return Err(EquivError::EntryArity {
                name: entry_version.to_owned(),
                expected: g.args.len(),
                found,
            });
        }
    }
    let empty = PropertySet::new();
    let run = |goal: &Goal, program: &Program, psi: &PropertySet| {
        solve(goal, psi, program, budget)
            .map(|o| o.kind())
            .map_err(|source| EquivError::Interp {
                goal: goal.to_string(),
                source,
            })
    };
    let outcomes: Vec<(OutcomeKind, OutcomeKind)> = goals
        .par_iter()
        .map(|g| {
            let renamed = Goal::new(entry_version, g.args.clone());
            Ok((run(g, original, psi)?, run(&renamed, residual, &empty)?))
        })
        .collect::<Result<_, EquivError>>()?;

    let mut report = EquivReport {
        trials: goals.len(),
        ..EquivReport::default()
    };
    for (goal, (a, b)) in goals.iter().zip(outcomes) {
        if a == OutcomeKind::BudgetExhausted || b == OutcomeKind::BudgetExhausted {
            report.budget_exhausted += 1;
        } else if a == b {
            report.agreements += 1;
        } else {
            report.disagreements.push(Disagreement {
                goal: goal.clone(),
                original: a,
                residual: b,
            });
        }
    }
    Ok(report)
}
