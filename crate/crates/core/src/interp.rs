//! Mixed concrete/abstract interpreter.
//!
//! Runs a ground goal by depth-first, clause-order resolution with
//! backtracking, and carries alongside every call the set of properties
//! that hold for its arguments. The concrete step evaluates a clause's
//! constraints on ground values; the abstract step computes the callee's
//! property set with the transfer function.
//!
//! The search keeps its continuation and choice points on the heap, so long
//! tail-recursive loops do not grow the native stack.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::rc::Rc;

use thiserror::Error;

use crate::domain::{abstract_ground, AbstractState, DomainError, PropertySet};
use crate::syntax::{Clause, Goal, Program, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("underdetermined clause for ground evaluation: `{var}` in clause {clause} of `{predicate}` is not fixed by its equalities")]
    Underdetermined {
        predicate: String,
        clause: usize,
        var: String,
    },
    #[error("step budget must be positive")]
    ZeroBudget,
    #[error("goal `{predicate}` has {found} arguments but the program uses arity {expected}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// `<q, {v}, phi>`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpState {
    pub predicate: String,
    pub values: Vec<Rat>,
    pub phi: AbstractState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub state: InterpState,
    /// Program index of the clause that resolved this call, if any did.
    pub clause: Option<usize>,
    pub depth: usize,
}

/// Calls on the current derivation, in the order they were made.
/// `step_count` also counts calls later undone by backtracking.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
    pub step_count: usize,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    Success,
    Failure,
    BudgetExhausted,
}

impl std::fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutcomeKind::Success => "success",
            OutcomeKind::Failure => "failure",
            OutcomeKind::BudgetExhausted => "budget exhausted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success(Trace),
    Failure(Trace),
    BudgetExhausted(Trace),
}

impl Outcome {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            Outcome::Success(_) => OutcomeKind::Success,
            Outcome::Failure(_) => OutcomeKind::Failure,
            Outcome::BudgetExhausted(_) => OutcomeKind::BudgetExhausted,
        }
    }

    pub fn trace(&self) -> &Trace {
        match self {
            Outcome::Success(t) | Outcome::Failure(t) | Outcome::BudgetExhausted(t) => t,
        }
    }
}

struct Frame {
    state: InterpState,
    depth: usize,
}

struct Node {
    frame: Rc<Frame>,
    next: Cont,
}

type Cont = Option<Rc<Node>>;

struct ChoicePoint {
    frame: Rc<Frame>,
    rest: Cont,
    next_alternative: usize,
    trace_slot: usize,
}

/// Run `goal` against `program`, tracking properties from `psi`.
///
/// `budget` bounds the number of calls (resolution steps); the run reports
/// `BudgetExhausted` as soon as one more call would exceed it.
pub fn solve(goal: &Goal, psi: &PropertySet, program: &Program, budget: usize) -> Result<Outcome, InterpError> {
    if budget == 0 {
        return Err(InterpError::ZeroBudget);
    }
    if let Some(expected) = program.arity(&goal.predicate) {
        if expected != goal.args.len() {
            return Err(InterpError::ArityMismatch {
                predicate: goal.predicate.clone(),
                expected,
                found: goal.args.len(),
            });
        }
    }
    let mut by_pred: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, c) in program.clauses().iter().enumerate() {
        by_pred.entry(c.head.as_str()).or_default().push(i);
    }
    let no_clauses = Vec::new();

    let root = Frame {
        state: InterpState {
            predicate: goal.predicate.clone(),
            values: goal.args.clone(),
            phi: phi_for(&goal.predicate, &goal.args, psi)?,
        },
        depth: 0,
    };
    let mut cont: Cont = Some(Rc::new(Node {
        frame: Rc::new(root),
        next: None,
    }));
    let mut choices: Vec<ChoicePoint> = Vec::new();
    let mut trace = Trace::default();

    'calls: loop {
        let Some(node) = cont.take() else {
            return Ok(Outcome::Success(trace));
        };
        if trace.step_count == budget {
            return Ok(Outcome::BudgetExhausted(trace));
        }
        trace.step_count += 1;

        let mut frame = Rc::clone(&node.frame);
        let mut rest = node.next.clone();
        let mut slot = trace.entries.len();
        trace.entries.push(TraceEntry {
            state: frame.state.clone(),
            clause: None,
            depth: frame.depth,
        });
        let mut alternative = 0;

        loop {
            let candidates = by_pred.get(frame.state.predicate.as_str()).unwrap_or(&no_clauses);
            let mut resolved = None;
            for (pos, &ci) in candidates.iter().enumerate().skip(alternative) {
                if let Some(env) = eval_clause(&program.clauses()[ci], ci, &frame.state.values)? {
                    resolved = Some((pos, ci, env));
                    break;
                }
            }
            match resolved {
                Some((pos, ci, env)) => {
                    trace.entries[slot].clause = Some(ci);
                    if pos + 1 < candidates.len() {
                        choices.push(ChoicePoint {
                            frame: Rc::clone(&frame),
                            rest: rest.clone(),
                            next_alternative: pos + 1,
                            trace_slot: slot,
                        });
                    }
                    let clause = &program.clauses()[ci];
                    let mut next = rest;
                    for atom in clause.body.iter().rev() {
                        let values: Vec<Rat> = atom
                            .args
                            .iter()
                            .map(|a| a.eval(|v| env.get(v).cloned()).expect("clause variables are bound"))
                            .collect();
                        let phi = phi_for(&atom.predicate, &values, psi)?;
                        next = Some(Rc::new(Node {
                            frame: Rc::new(Frame {
                                state: InterpState {
                                    predicate: atom.predicate.clone(),
                                    values,
                                    phi,
                                },
                                depth: frame.depth + 1,
                            }),
                            next,
                        }));
                    }
                    cont = next;
                    continue 'calls;
                }
                None => {
                    let Some(cp) = choices.pop() else {
                        return Ok(Outcome::Failure(trace));
                    };
                    trace.entries.truncate(cp.trace_slot + 1);
                    trace.entries[cp.trace_slot].clause = None;
                    frame = cp.frame;
                    rest = cp.rest;
                    alternative = cp.next_alternative;
                    slot = cp.trace_slot;
                }
            }
        }
    }
}

fn phi_for(predicate: &str, values: &[Rat], psi: &PropertySet) -> Result<AbstractState, InterpError> {
    if psi.get(predicate).is_empty() {
        return Ok(AbstractState::top(predicate));
    }
    Ok(abstract_ground(predicate, values, psi)?)
}

/// Concrete transfer: bind the head, solve defining equalities for locals,
/// then check every constraint. `None` means the clause does not apply.
pub fn eval_clause(
    clause: &Clause,
    clause_index: usize,
    values: &[Rat],
) -> Result<Option<BTreeMap<String, Rat>>, InterpError> {
    let mut env: BTreeMap<String, Rat> = clause.params.iter().cloned().zip(values.iter().cloned()).collect();
    let mut progress = true;
    while progress {
        progress = false;
        for c in clause.constraints.iter().filter(|c| c.is_equality()) {
            let mut unbound = c.vars().filter(|v| !env.contains_key(*v));
            let (Some(var), None) = (unbound.next(), unbound.next()) else {
                continue;
            };
            let solved = c
                .lhs()
                .solve_for(var)
                .and_then(|e| e.eval(|v| env.get(v).cloned()))
                .expect("single unbound variable of an equality is solvable");
            env.insert(var.to_owned(), solved);
            progress = true;
        }
    }
    if let Some(var) = clause.vars().into_iter().find(|v| !env.contains_key(v)) {
        return Err(InterpError::Underdetermined {
            predicate: clause.head.clone(),
            clause: clause_index,
            var,
        });
    }
    let lookup = |v: &str| env.get(v).cloned();
    if clause.constraints.iter().all(|c| c.eval(lookup) == Some(true)) {
        Ok(Some(env))
    } else {
        Ok(None)
    }
}

/// Every recorded state's properties hold at its concrete values.
pub fn check_property_soundness(trace: &Trace, psi: &PropertySet) -> bool {
    trace.entries.iter().all(|e| e.state.phi.holds_at(psi, &e.state.values))
}

/// One line per state: `q(v1,...,vk) [phi]`.
pub fn format_trace(trace: &Trace, psi: &PropertySet) -> String {
    let mut out = String::new();
    for e in &trace.entries {
        let values: Vec<String> = e.state.values.iter().map(ToString::to_string).collect();
        writeln!(
            out,
            "{}({}) {}",
            e.state.predicate,
            values.join(","),
            e.state.phi.describe(psi)
        )
        .expect("writing to a String cannot fail");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::Store;
    use crate::domain::{delta_d, derive_properties};
    use crate::syntax::{parse_goal, parse_program, rat, LinExpr};

    const EXAMPLE: &str = "\
while0(X,Y,M) :- X>0, if0(X,Y,M).
while0(X,Y,M) :- X=<0.
if0(X,Y,M) :- Y<M, Y1=Y+1, while0(X,Y1,M).
if0(X,Y,M) :- Y>=M, X1=X-1, while0(X1,Y,M).
";

    /// Direct simulation of the two-phase loop: (terminates, number of calls).
    fn simulate(mut x: i64, mut y: i64, m: i64) -> (bool, usize) {
        let mut calls = 0;
        loop {
            calls += 1;
            if x <= 0 {
                return (true, calls);
            }
            calls += 1;
            if y < m {
                y += 1;
            } else {
                x -= 1;
            }
        }
    }

    #[test]
    fn simulator_oracle_for_reference_goal() {
        assert_eq!(simulate(5, 3, 10), (true, 25));
    }

    #[test]
    fn reference_goal_terminates_with_25_calls() {
        let p = parse_program(EXAMPLE).unwrap();
        let psi = derive_properties(&p);
        let out = solve(&parse_goal("while0(5,3,10)").unwrap(), &psi, &p, 10_000).unwrap();
        assert_eq!(out.kind(), OutcomeKind::Success);
        assert_eq!(out.trace().step_count, 25);
        assert_eq!(out.trace().len(), 25);
        assert!(check_property_soundness(out.trace(), &psi));
        let first = &out.trace().entries[0];
        assert_eq!(first.state.phi.describe(&psi), "[A1>0]");
        assert_eq!(first.clause, Some(0));
    }

    #[test]
    fn immediate_exit() {
        let p = parse_program(EXAMPLE).unwrap();
        let psi = derive_properties(&p);
        let out = solve(&parse_goal("while0(0,0,0)").unwrap(), &psi, &p, 100).unwrap();
        assert_eq!(out.kind(), OutcomeKind::Success);
        assert_eq!(out.trace().step_count, 1);
        assert_eq!(out.trace().entries[0].clause, Some(1));
    }

    #[test]
    fn budget_is_respected() {
        let p = parse_program(EXAMPLE).unwrap();
        let psi = derive_properties(&p);
        let g = parse_goal("while0(5,3,10)").unwrap();
        assert_eq!(solve(&g, &psi, &p, 25).unwrap().kind(), OutcomeKind::Success);
        let out = solve(&g, &psi, &p, 24).unwrap();
        assert_eq!(out.kind(), OutcomeKind::BudgetExhausted);
        assert_eq!(out.trace().step_count, 24);
        assert_eq!(solve(&g, &psi, &p, 0), Err(InterpError::ZeroBudget));
        let looping = parse_program("p(X) :- p(X).").unwrap();
        let out = solve(&parse_goal("p(1)").unwrap(), &PropertySet::new(), &looping, 1000).unwrap();
        assert_eq!(out.kind(), OutcomeKind::BudgetExhausted);
    }

    #[test]
    fn deep_recursion_does_not_overflow() {
        let p = parse_program("count(N) :- N>0, M=N-1, count(M).\ncount(N) :- N=<0.").unwrap();
        let out = solve(&parse_goal("count(50000)").unwrap(), &PropertySet::new(), &p, 1_000_000).unwrap();
        assert_eq!(out.kind(), OutcomeKind::Success);
        assert_eq!(out.trace().step_count, 50_001);
    }

    #[test]
    fn backtracking_across_calls() {
        // q(1) succeeds only through its second clause; p's first clause fails after calling q.
        let p = parse_program(
            "p(X) :- q(X), r(X).\n\
             p(X) :- X=1.\n\
             q(X) :- X=2.\n\
             q(X) :- X=1.\n\
             r(X) :- X=2.",
        )
        .unwrap();
        let out = solve(&parse_goal("p(1)").unwrap(), &PropertySet::new(), &p, 100).unwrap();
        assert_eq!(out.kind(), OutcomeKind::Success);
        // Final derivation is just p(1) via clause 1.
        assert_eq!(out.trace().len(), 1);
        assert_eq!(out.trace().entries[0].clause, Some(1));
        assert!(out.trace().step_count > 1);
        let out = solve(&parse_goal("p(3)").unwrap(), &PropertySet::new(), &p, 100).unwrap();
        assert_eq!(out.kind(), OutcomeKind::Failure);
    }

    #[test]
    fn underdetermined_local() {
        let p = parse_program("p(X) :- Y=Z, q(Y).\nq(X).").unwrap();
        let err = solve(&parse_goal("p(1)").unwrap(), &PropertySet::new(), &p, 10).unwrap_err();
        assert!(matches!(err, InterpError::Underdetermined { .. }));
    }

    #[test]
    fn ground_transfer_matches_delta_d() {
        let p = parse_program(EXAMPLE).unwrap();
        let psi = derive_properties(&p);
        let clause = &p.clauses()[3];
        let env = eval_clause(clause, 3, &[rat(4), rat(7), rat(2)]).unwrap().unwrap();
        let ground = Store::equalities(env.iter().map(|(k, v)| (k.as_str(), LinExpr::constant(v.clone()))));
        let atom = &clause.body[0];
        let via_delta = delta_d(&ground, atom, &psi).unwrap();
        let values: Vec<Rat> = atom
            .args
            .iter()
            .map(|a| a.eval(|v| env.get(v).cloned()).unwrap())
            .collect();
        assert_eq!(phi_for("while0", &values, &psi).unwrap(), via_delta);
    }

    #[test]
    fn soundness_check_detects_violation() {
        let p = parse_program(EXAMPLE).unwrap();
        let psi = derive_properties(&p);
        assert!(check_property_soundness(&Trace::default(), &psi));
        let out = solve(&parse_goal("while0(0,0,0)").unwrap(), &psi, &p, 10).unwrap();
        let mut t = out.trace().clone();
        t.entries[0].state.phi = AbstractState::new("while0", vec![0]);
        assert!(!check_property_soundness(&t, &psi));
    }

    #[test]
    fn trace_format() {
        let p = parse_program(EXAMPLE).unwrap();
        let psi = derive_properties(&p);
        let out = solve(&parse_goal("while0(1,0,0)").unwrap(), &psi, &p, 10).unwrap();
        assert_eq!(
            format_trace(out.trace(), &psi),
            "while0(1,0,0) [A1>0, A2>=A3]\nif0(1,0,0) [A1>0, A2>=A3]\nwhile0(0,0,0) [A1=<0, A2>=A3]\n"
        );
    }
}
