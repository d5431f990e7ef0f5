use std::collections::BTreeMap;

use crate::syntax::Program;

use super::{formal, PropertySet};

/// Guard-based property derivation.
///
/// Each constraint of a clause is attributed to the head and to every body
/// atom whose arguments are distinct variables covering the constraint's
/// variables, renamed onto that predicate's formals. Order: clause order,
/// then constraint order, then head before body atoms.
pub fn derive_properties(program: &Program) -> PropertySet {
    let mut psi = PropertySet::new();
    for clause in program.clauses() {
        let mut atoms = vec![clause.head_atom()];
        atoms.extend(clause.body.iter().cloned());
        for c in &clause.constraints {
            if c.lhs().is_constant() {
                continue;
            }
            for atom in &atoms {
                let Some(args) = atom.distinct_var_args() else {
                    continue;
                };
                if !c.vars().all(|v| args.contains(&v)) {
                    continue;
                }
                let renaming: BTreeMap<String, String> = args
                    .iter()
                    .enumerate()
                    .map(|(i, v)| ((*v).to_owned(), formal(i)))
                    .collect();
                psi.insert(&atom.predicate, args.len(), c.rename(&renaming))
                    .expect("renamed guard mentions only formals of a consistent arity");
            }
        }
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_constraint, parse_program};

    const EXAMPLE: &str = "\
while0(X,Y,M) :- X>0, if0(X,Y,M).
while0(X,Y,M) :- X=<0.
if0(X,Y,M) :- Y<M, Y1=Y+1, while0(X,Y1,M).
if0(X,Y,M) :- Y>=M, X1=X-1, while0(X1,Y,M).
";

    fn props(psi: &PropertySet, pred: &str) -> Vec<String> {
        psi.get(pred).iter().map(|p| p.constraint.to_string()).collect()
    }

    #[test]
    fn example_program() {
        let psi = derive_properties(&parse_program(EXAMPLE).unwrap());
        let expect = |items: &[&str]| -> Vec<String> {
            items.iter().map(|s| parse_constraint(s).unwrap().to_string()).collect()
        };
        assert_eq!(props(&psi, "while0"), expect(&["A1>0", "A1=<0", "A2>=A3"]));
        assert_eq!(props(&psi, "if0"), expect(&["A1>0", "A2<A3", "A2>=A3"]));
        assert_eq!(psi.total(), 6);
    }

    #[test]
    fn empty_program() {
        assert!(derive_properties(&parse_program("").unwrap()).is_empty());
    }

    #[test]
    fn single_fact() {
        let psi = derive_properties(&parse_program("p(X) :- X>0.").unwrap());
        assert_eq!(props(&psi, "p"), vec!["A1>0".to_string()]);
    }

    #[test]
    fn argument_position_is_respected() {
        let psi = derive_properties(&parse_program("p(X,Y) :- Y>0, q(Y,X).").unwrap());
        assert_eq!(props(&psi, "p"), vec!["A2>0".to_string()]);
        assert_eq!(props(&psi, "q"), vec!["A1>0".to_string()]);
    }
}
