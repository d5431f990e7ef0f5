//! Polyvariant control-flow refinement.
//!
//! Specializing the mixed interpreter with respect to a program treats the
//! predicate and its property set as static and the concrete arguments as
//! dynamic. Every reachable (predicate, property set) pair therefore becomes
//! one residual predicate, and each of its clauses keeps only the dynamic
//! work: the clause constraints and calls to the successor versions. This
//! module computes that result directly with a breadth-first worklist over
//! versions.
//!
//! Binding times, for reference:
//!
//! | interpreter argument | binding time |
//! |----------------------|--------------|
//! | predicate            | static       |
//! | property set         | static       |
//! | all properties       | static       |
//! | program              | static       |
//! | concrete arguments   | nonvar       |
//!
//! Calls to the interpreter and to the concrete transfer are memoized (kept
//! as residual calls and constraints); the abstract transfer is unfolded
//! (evaluated here).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::constraints::Store;
use crate::domain::{abstract_of, delta_d, formals, gamma_over, AbstractState, DomainError, PropertySet};
use crate::syntax::{
    is_ident, print_clause, print_program, AtomicConstraint, BodyAtom, Clause, Goal, LinExpr, Program, ProgramError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("unknown entry predicate `{0}`")]
    UnknownEntry(String),
    #[error("entry `{predicate}` given with arity {found}, program uses {expected}")]
    EntryArity {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("naming prefix `{0}` must be a predicate identifier ([a-z][A-Za-z0-9_]*)")]
    InvalidPrefix(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("residual program is malformed: {0}")]
    Residual(#[from] ProgramError),
}

/// A static pair (predicate, property set): one residual predicate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Version {
    phi: AbstractState,
}

impl Version {
    pub fn new(phi: AbstractState) -> Self {
        Version { phi }
    }

    pub fn predicate(&self) -> &str {
        self.phi.predicate()
    }

    pub fn phi(&self) -> &AbstractState {
        &self.phi
    }
}

/// Where specialization starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    /// No information about the arguments: the empty property set.
    Predicate(String),
    /// Arguments described by a store over the formals `A1..Ak`.
    Constrained { predicate: String, store: Store },
    /// A concrete call; its ground arguments are abstracted.
    Goal(Goal),
}

impl Entry {
    pub fn predicate(&self) -> &str {
        match self {
            Entry::Predicate(p) | Entry::Constrained { predicate: p, .. } => p,
            Entry::Goal(g) => &g.predicate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecConfig {
    /// Conjoin the version's properties into residual constraints, then simplify.
    pub strengthen: bool,
    pub prefix: String,
    pub entry: Entry,
}

impl SpecConfig {
    pub fn new(entry: Entry) -> Self {
        SpecConfig {
            strengthen: true,
            prefix: "solve__".to_owned(),
            entry,
        }
    }
}

/// A call in a residualized clause, before version names are assigned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualCall {
    pub version: Version,
    pub args: Vec<LinExpr>,
}

/// One clause specialized at one version.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualClause {
    pub params: Vec<String>,
    pub constraints: Vec<AtomicConstraint>,
    pub calls: Vec<ResidualCall>,
    /// Version properties conjoined with the clause constraints.
    pub context: Store,
}

impl ResidualClause {
    fn to_clause(&self, head: &str, names: &BTreeMap<Version, String>) -> Result<Clause, ProgramError> {
        let body = self
            .calls
            .iter()
            .map(|c| BodyAtom::new(names[&c.version].clone(), c.args.clone()))
            .collect();
        Clause::new(head, self.params.clone(), self.constraints.clone(), body)
    }
}

/// Specialize clause `clause` at `version`. `None` means the clause is
/// unreachable under the version's properties and is pruned.
pub fn residualize_clause(
    clause: &Clause,
    version: &Version,
    psi: &PropertySet,
    strengthen: bool,
) -> Result<Option<ResidualClause>, DomainError> {
    let gamma = gamma_over(version.phi(), psi, &clause.params);
    let guards = Store::from_conjuncts(clause.constraints.iter().cloned());
    let context = gamma.conjoin(&guards);
    if !context.satisfiable() {
        return Ok(None);
    }
    let mut calls = Vec::with_capacity(clause.body.len());
    for atom in &clause.body {
        calls.push(ResidualCall {
            version: Version::new(delta_d(&context, atom, psi)?),
            args: atom.args.clone(),
        });
    }
    let locals = clause.locals();
    let constraints = if strengthen {
        guards
            .conjoin(&gamma)
            .simplify_pinned(|c| c.is_equality() && c.vars().any(|v| locals.contains(v)))
            .conjuncts()
            .to_vec()
    } else {
        clause.constraints.clone()
    };
    let (constraints, calls) = inline_call_locals(constraints, calls, &clause.params);
    Ok(Some(ResidualClause {
        params: clause.params.clone(),
        constraints,
        calls,
        context,
    }))
}

/// Substitute away locals defined by a single equality and used nowhere else
/// among the constraints.
fn inline_call_locals(
    mut constraints: Vec<AtomicConstraint>,
    mut calls: Vec<ResidualCall>,
    params: &[String],
) -> (Vec<AtomicConstraint>, Vec<ResidualCall>) {
    loop {
        let local_mentions = |var: &str| constraints.iter().filter(|c| c.mentions(var)).count();
        let candidate = constraints.iter().enumerate().find_map(|(i, c)| {
            if !c.is_equality() {
                return None;
            }
            c.vars()
                .find(|v| !params.iter().any(|p| p == v) && local_mentions(v) == 1)
                .map(|v| (i, v.to_owned()))
        });
        let Some((i, var)) = candidate else {
            return (constraints, calls);
        };
        let eq = constraints.remove(i);
        let value = eq
            .lhs()
            .solve_for(&var)
            .expect("variable occurs in its defining equation");
        let binding = BTreeMap::from([(var, value)]);
        for call in &mut calls {
            for arg in &mut call.args {
                *arg = arg.substitute(&binding);
            }
        }
    }
}

/// A clause dropped because its context is unsatisfiable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrunedClause {
    pub version: Version,
    pub clause_index: usize,
    pub context: Store,
}

/// Provenance of one residual clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseOrigin {
    pub version: Version,
    pub clause_index: usize,
    pub residual: ResidualClause,
}

/// The refined program: one predicate per reachable version.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualProgram {
    versions: Vec<(Version, String)>,
    table: BTreeMap<Version, String>,
    program: Program,
    origins: Vec<ClauseOrigin>,
    pruned: Vec<PrunedClause>,
}

impl ResidualProgram {
    /// Versions with their names, in discovery order. The first is the entry.
    pub fn versions(&self) -> &[(Version, String)] {
        &self.versions
    }

    pub fn version_table(&self) -> &BTreeMap<Version, String> {
        &self.table
    }

    pub fn name_of(&self, version: &Version) -> Option<&str> {
        self.table.get(version).map(String::as_str)
    }

    pub fn entry_name(&self) -> Option<&str> {
        self.versions.first().map(|(_, n)| n.as_str())
    }

    /// The residual clauses as an ordinary program.
    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn clauses(&self) -> &[Clause] {
        self.program.clauses()
    }

    /// Parallel to [`ResidualProgram::clauses`].
    pub fn origins(&self) -> &[ClauseOrigin] {
        &self.origins
    }

    pub fn pruned(&self) -> &[PrunedClause] {
        &self.pruned
    }

    /// Residual clauses whose head is the version named `name`.
    pub fn clauses_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Clause> + 'a {
        self.program.clauses().iter().filter(move |c| c.head == name)
    }
}

/// Upper bound on the number of versions: the sum over predicates of
/// `2^|Psi(q)|`.
pub fn version_bound(program: &Program, psi: &PropertySet) -> u128 {
    program
        .predicates()
        .keys()
        .map(|q| 1u128.checked_shl(psi.get(q).len() as u32).unwrap_or(u128::MAX))
        .fold(0u128, u128::saturating_add)
}

pub fn specialize(program: &Program, psi: &PropertySet, cfg: &SpecConfig) -> Result<ResidualProgram, SpecError> {
    if !is_ident(&cfg.prefix) {
        return Err(SpecError::InvalidPrefix(cfg.prefix.clone()));
    }
    let entry_pred = cfg.entry.predicate();
    let arity = program
        .arity(entry_pred)
        .ok_or_else(|| SpecError::UnknownEntry(entry_pred.to_owned()))?;
    let phi0 = match &cfg.entry {
        Entry::Predicate(p) => AbstractState::top(p.clone()),
        Entry::Constrained { predicate, store } => abstract_of(predicate, arity, store, psi)?,
        Entry::Goal(g) => {
            if g.args.len() != arity {
                return Err(SpecError::EntryArity {
                    predicate: g.predicate.clone(),
                    expected: arity,
                    found: g.args.len(),
                });
            }
            let names = formals(arity);
            let store = Store::equalities(
                names
                    .iter()
                    .zip(&g.args)
                    .map(|(n, v)| (n.as_str(), LinExpr::constant(v.clone()))),
            );
            abstract_of(&g.predicate, arity, &store, psi)?
        }
    };

    let mut names: BTreeMap<Version, String> = BTreeMap::new();
    let mut order: Vec<(Version, String)> = Vec::new();
    let mut queue: VecDeque<Version> = VecDeque::new();
    let mut discover = |v: Version, names: &mut BTreeMap<Version, String>, queue: &mut VecDeque<Version>| {
        if !names.contains_key(&v) {
            let name = format!("{}{}", cfg.prefix, names.len() + 1);
            names.insert(v.clone(), name.clone());
            order.push((v.clone(), name));
            queue.push_back(v);
        }
    };
    discover(Version::new(phi0), &mut names, &mut queue);

    let mut staged: Vec<ClauseOrigin> = Vec::new();
    let mut pruned = Vec::new();
    while let Some(version) = queue.pop_front() {
        for (ci, clause) in program.clauses_for(version.predicate()) {
            match residualize_clause(clause, &version, psi, cfg.strengthen)? {
                None => pruned.push(PrunedClause {
                    version: version.clone(),
                    clause_index: ci,
                    context: gamma_over(version.phi(), psi, &clause.params)
                        .conjoin(&Store::from_conjuncts(clause.constraints.iter().cloned())),
                }),
                Some(residual) => {
                    for call in &residual.calls {
                        discover(call.version.clone(), &mut names, &mut queue);
                    }
                    staged.push(ClauseOrigin {
                        version: version.clone(),
                        clause_index: ci,
                        residual,
                    });
                }
            }
        }
    }

    let mut residual = Program::default();
    for (version, name) in &order {
        let arity = program
            .arity(version.predicate())
            .expect("versions come from program predicates");
        residual.declare(name, arity)?;
    }
    for origin in &staged {
        let head = &names[&origin.version];
        residual.push(origin.residual.to_clause(head, &names)?)?;
    }
    Ok(ResidualProgram {
        versions: order,
        table: names,
        program: residual,
        origins: staged,
        pruned,
    })
}

/// The residual program in clause syntax.
///
/// A version left without clauses (every clause pruned) is written as a
/// single failing clause `name(A1,...,Ak) :- 0<0.` so that the text still
/// defines it and reparses to a program with the same predicates.
pub fn emit(residual: &ResidualProgram) -> String {
    let mut text = print_program(residual.program());
    for (_, name) in residual.versions() {
        if residual.clauses_of(name).next().is_some() {
            continue;
        }
        let arity = residual.program().arity(name).expect("every version is declared");
        let failing = Clause {
            head: name.clone(),
            params: formals(arity),
            constraints: vec![AtomicConstraint::falsum()],
            body: Vec::new(),
        };
        text.push_str(&print_clause(&failing));
        text.push('\n');
    }
    text
}

/// Every pruned context is unsatisfiable and every residual call's version
/// is what the transfer function gives for its clause context. Returns the
/// first violation found.
pub fn check_consistency(residual: &ResidualProgram, program: &Program, psi: &PropertySet) -> Result<(), String> {
    for p in residual.pruned() {
        if p.context.satisfiable() {
            return Err(format!(
                "clause {} pruned at {} with satisfiable context",
                p.clause_index,
                p.version.phi()
            ));
        }
    }
    for o in residual.origins() {
        let clause = &program.clauses()[o.clause_index];
        for (atom, call) in clause.body.iter().zip(&o.residual.calls) {
            let expected = delta_d(&o.residual.context, atom, psi).map_err(|e| e.to_string())?;
            if &expected != call.version.phi() {
                return Err(format!(
                    "call to {} in clause {} at {} has {} but context gives {}",
                    atom.predicate,
                    o.clause_index,
                    o.version.phi(),
                    call.version.phi(),
                    expected
                ));
            }
            if residual.name_of(&call.version).is_none() {
                return Err(format!("version {} has no name", call.version.phi()));
            }
        }
    }
    let names: BTreeSet<&str> = residual.versions().iter().map(|(_, n)| n.as_str()).collect();
    for c in residual.clauses() {
        for a in &c.body {
            if !names.contains(a.predicate.as_str()) {
                return Err(format!("body atom `{}` is not a version", a.predicate));
            }
        }
    }
    Ok(())
}
