//! Variable elimination over conjunctions of linear constraints.
//!
//! Equalities are used first for Gaussian substitution; remaining variables
//! are removed by Fourier-Motzkin, with parallel-constraint redundancy
//! removal after each step. Strictness is tracked exactly, so the result is
//! the rational projection.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};

use crate::syntax::{AtomicConstraint, Rat, RelOp};

/// Eliminate every variable in `elim` from `conjuncts`.
///
/// Returns `None` when a contradiction is found, otherwise the remaining
/// conjuncts (none of which is a trivially true constant).
pub(crate) fn eliminate(conjuncts: &[AtomicConstraint], elim: &BTreeSet<String>) -> Option<Vec<AtomicConstraint>> {
    let mut cs = clean(conjuncts.to_vec())?;

    // Gaussian pass.
    while let Some((idx, var)) = cs.iter().enumerate().find_map(|(i, c)| {
        c.is_equality()
            .then(|| c.vars().find(|v| elim.contains(*v)).map(|v| (i, v.to_owned())))
            .flatten()
    }) {
        let eq = cs.remove(idx);
        let value = eq.lhs().solve_for(&var).expect("pivot variable occurs in equation");
        let binding = BTreeMap::from([(var, value)]);
        cs = clean(cs.iter().map(|c| c.substitute(&binding)).collect())?;
    }

    // Fourier-Motzkin on what is left.
    let mut remaining: BTreeSet<String> = cs
        .iter()
        .flat_map(AtomicConstraint::vars)
        .filter(|v| elim.contains(*v))
        .map(str::to_owned)
        .collect();
    while let Some(var) = pick_pivot(&cs, &remaining) {
        remaining.remove(&var);
        let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in cs {
            let k = c.lhs().coeff(&var);
            if k.is_zero() {
                rest.push(c);
            } else if k.is_positive() {
                upper.push(c);
            } else {
                lower.push(c);
            }
        }
        for u in &upper {
            let cu = u.lhs().coeff(&var);
            for l in &lower {
                let cl = -l.lhs().coeff(&var);
                let sum = u.lhs().scaled(&cu.recip()).plus_scaled(l.lhs(), &cl.recip());
                let op = if u.is_strict() || l.is_strict() {
                    RelOp::Lt
                } else {
                    RelOp::Le
                };
                rest.push(AtomicConstraint::compare_zero(sum, op));
            }
        }
        cs = clean(rest)?;
    }
    Some(cs)
}

/// Variable whose elimination creates the fewest new constraints; ties by name.
fn pick_pivot(cs: &[AtomicConstraint], candidates: &BTreeSet<String>) -> Option<String> {
    candidates
        .iter()
        .min_by_key(|v| {
            let (mut pos, mut neg) = (0usize, 0usize);
            for c in cs {
                let k = c.lhs().coeff(v);
                if k.is_positive() {
                    pos += 1;
                } else if k.is_negative() {
                    neg += 1;
                }
            }
            pos * neg
        })
        .cloned()
}

/// Drop true constants, detect false ones, remove duplicates and dominated
/// parallel inequalities. Keeps first-occurrence order.
fn clean(cs: Vec<AtomicConstraint>) -> Option<Vec<AtomicConstraint>> {
    let mut out: Vec<AtomicConstraint> = Vec::with_capacity(cs.len());
    let mut by_direction: BTreeMap<BTreeMap<String, Rat>, usize> = BTreeMap::new();
    for c in cs {
        match c.constant_truth() {
            Some(true) => continue,
            Some(false) => return None,
            None => {}
        }
        if c.is_equality() {
            if !out.contains(&c) {
                out.push(c);
            }
            continue;
        }
        let (dir, bound) = direction(&c);
        match by_direction.get(&dir) {
            Some(&i) => {
                let (_, old_bound) = direction(&out[i]);
                // e + k op 0: larger k is tighter; on a tie strict wins.
                if bound > old_bound || (bound == old_bound && c.is_strict()) {
                    out[i] = c;
                }
            }
            None => {
                by_direction.insert(dir, out.len());
                out.push(c);
            }
        }
    }
    Some(out)
}

/// Coefficients scaled so the leading one has magnitude 1, and the constant
/// under the same scaling.
fn direction(c: &AtomicConstraint) -> (BTreeMap<String, Rat>, Rat) {
    let lead = c
        .lhs()
        .coeffs()
        .values()
        .next()
        .map(|k| k.abs())
        .unwrap_or_else(Rat::one);
    let inv = lead.recip();
    let dir = c.lhs().coeffs().iter().map(|(v, k)| (v.clone(), k * &inv)).collect();
    (dir, c.lhs().constant_term() * &inv)
}

/// All variables of the conjuncts.
pub(crate) fn vars_of(cs: &[AtomicConstraint]) -> BTreeSet<String> {
    cs.iter().flat_map(AtomicConstraint::vars).map(str::to_owned).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_constraint;

    fn cs(items: &[&str]) -> Vec<AtomicConstraint> {
        items.iter().map(|s| parse_constraint(s).unwrap()).collect()
    }

    #[test]
    fn parallel_inequalities_keep_tightest() {
        let out = clean(cs(&["X > 1", "X >= 1", "2*X > 1"])).unwrap();
        assert_eq!(out, cs(&["X > 1"]));
    }

    #[test]
    fn strict_bounds_contradict() {
        let all = vars_of(&cs(&["X > 0", "X < 0"]));
        assert!(eliminate(&cs(&["X > 0", "X < 0"]), &all).is_none());
        assert!(eliminate(&cs(&["X >= 0", "X =< 0"]), &all).is_some());
        assert!(eliminate(&cs(&["X > 0", "X =< 0"]), &all).is_none());
    }

    #[test]
    fn chain_of_strict_inequalities() {
        // X < Y < Z < X is infeasible
        let c = cs(&["X < Y", "Y < Z", "Z < X"]);
        assert!(eliminate(&c, &vars_of(&c)).is_none());
        let c = cs(&["X =< Y", "Y =< Z", "Z =< X"]);
        assert!(eliminate(&c, &vars_of(&c)).is_some());
    }
}
