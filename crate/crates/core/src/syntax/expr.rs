//! Linear expressions over exact rationals and normalized atomic constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

/// Exact rational number used for every coefficient and value.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// True if `name` is a variable name: `[A-Z][A-Za-z0-9_]*`.
pub fn is_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// True if `name` is a predicate identifier: `[a-z][A-Za-z0-9_]*`.
pub fn is_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `sum(coeff * var) + constant`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinExpr {
    coeffs: BTreeMap<String, Rat>,
    constant: Rat,
}

impl LinExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: Rat) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: value,
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Self::term(Rat::one(), name)
    }

    pub fn term(coeff: Rat, name: impl Into<String>) -> Self {
        let mut e = Self::zero();
        e.add_term(coeff, name.into());
        e
    }

    pub fn coeffs(&self) -> &BTreeMap<String, Rat> {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &Rat {
        &self.constant
    }

    pub fn coeff(&self, var: &str) -> Rat {
        self.coeffs.get(var).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    /// The variable name if this expression is exactly `1*V + 0`.
    pub fn as_var(&self) -> Option<&str> {
        if !self.constant.is_zero() || self.coeffs.len() != 1 {
            return None;
        }
        let (name, c) = self.coeffs.iter().next()?;
        c.is_one().then_some(name.as_str())
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.coeffs.contains_key(var)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(String::as_str)
    }

    pub fn add_term(&mut self, coeff: Rat, name: String) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(name).or_insert_with(Rat::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.coeffs.retain(|_, c| !c.is_zero());
        }
    }

    pub fn add_constant(&mut self, value: &Rat) {
        self.constant += value;
    }

    pub fn plus(&self, other: &LinExpr) -> LinExpr {
        self.plus_scaled(other, &Rat::one())
    }

    pub fn minus(&self, other: &LinExpr) -> LinExpr {
        self.plus_scaled(other, &-Rat::one())
    }

    /// `self + factor * other`
    pub fn plus_scaled(&self, other: &LinExpr, factor: &Rat) -> LinExpr {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_term(c * factor, v.clone());
        }
        out.constant += &other.constant * factor;
        out
    }

    pub fn scaled(&self, factor: &Rat) -> LinExpr {
        if factor.is_zero() {
            return LinExpr::zero();
        }
        LinExpr {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * factor)).collect(),
            constant: &self.constant * factor,
        }
    }

    pub fn negated(&self) -> LinExpr {
        self.scaled(&-Rat::one())
    }

    /// Simultaneous substitution; unbound variables are kept.
    pub fn substitute(&self, binding: &BTreeMap<String, LinExpr>) -> LinExpr {
        let mut out = LinExpr::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            match binding.get(v) {
                Some(e) => out = out.plus_scaled(e, c),
                None => out.add_term(c.clone(), v.clone()),
            }
        }
        out
    }

    /// Value under `lookup`, or `None` if some variable is unbound.
    pub fn eval<F>(&self, lookup: F) -> Option<Rat>
    where
        F: Fn(&str) -> Option<Rat>,
    {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * lookup(v)?;
        }
        Some(acc)
    }

    /// Solve `self = 0` for `var`, giving the expression `var` equals.
    pub fn solve_for(&self, var: &str) -> Option<LinExpr> {
        let c = self.coeffs.get(var)?;
        let mut rest = self.clone();
        rest.coeffs.remove(var);
        Some(rest.scaled(&(-c.recip())))
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let mag = c.abs();
            if c.is_negative() {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            if mag.is_one() {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}*{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)?;
        } else if self.constant.is_positive() {
            write!(f, "+{}", self.constant)?;
        } else if self.constant.is_negative() {
            write!(f, "-{}", self.constant.abs())?;
        }
        Ok(())
    }
}

/// Relational operator as written in source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "=<",
            RelOp::Eq => "=",
            RelOp::Ge => ">=",
            RelOp::Gt => ">",
        }
    }

    /// The operator obtained by swapping the two sides.
    pub fn flipped(self) -> RelOp {
        match self {
            RelOp::Lt => RelOp::Gt,
            RelOp::Le => RelOp::Ge,
            RelOp::Eq => RelOp::Eq,
            RelOp::Ge => RelOp::Le,
            RelOp::Gt => RelOp::Lt,
        }
    }

    pub fn holds(self, lhs: &Rat, rhs: &Rat) -> bool {
        match self {
            RelOp::Lt => lhs < rhs,
            RelOp::Le => lhs <= rhs,
            RelOp::Eq => lhs == rhs,
            RelOp::Ge => lhs >= rhs,
            RelOp::Gt => lhs > rhs,
        }
    }
}

impl fmt::Display for RelOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `lhs op 0` with `op` one of `<`, `=<`, `=`.
///
/// The left-hand side is kept in a canonical scale: integer coefficients and
/// constant with gcd 1, and for equalities the leading variable (or the
/// constant, when there are no variables) is positive. Two constraints that
/// denote the same relation therefore compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicConstraint {
    lhs: LinExpr,
    op: RelOp,
}

impl AtomicConstraint {
    /// `lhs op rhs`, for any of the five operators.
    pub fn new(lhs: LinExpr, op: RelOp, rhs: LinExpr) -> Self {
        match op {
            RelOp::Lt | RelOp::Le | RelOp::Eq => Self::normalized(lhs.minus(&rhs), op),
            RelOp::Gt => Self::normalized(rhs.minus(&lhs), RelOp::Lt),
            RelOp::Ge => Self::normalized(rhs.minus(&lhs), RelOp::Le),
        }
    }

    /// `expr op 0`, for any of the five operators.
    pub fn compare_zero(expr: LinExpr, op: RelOp) -> Self {
        Self::new(expr, op, LinExpr::zero())
    }

    fn normalized(expr: LinExpr, op: RelOp) -> Self {
        AtomicConstraint {
            lhs: canonical_scale(expr, op == RelOp::Eq),
            op,
        }
    }

    /// The always-false constraint `0 < 0`.
    pub fn falsum() -> Self {
        AtomicConstraint {
            lhs: LinExpr::zero(),
            op: RelOp::Lt,
        }
    }

    pub fn lhs(&self) -> &LinExpr {
        &self.lhs
    }

    /// One of `Lt`, `Le`, `Eq`.
    pub fn op(&self) -> RelOp {
        self.op
    }

    pub fn is_strict(&self) -> bool {
        self.op == RelOp::Lt
    }

    pub fn is_equality(&self) -> bool {
        self.op == RelOp::Eq
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.lhs.vars()
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.lhs.mentions(var)
    }

    /// For a variable-free constraint, whether it holds.
    pub fn constant_truth(&self) -> Option<bool> {
        self.lhs
            .is_constant()
            .then(|| self.op.holds(self.lhs.constant_term(), &Rat::zero()))
    }

    pub fn eval<F>(&self, lookup: F) -> Option<bool>
    where
        F: Fn(&str) -> Option<Rat>,
    {
        let v = self.lhs.eval(lookup)?;
        Some(self.op.holds(&v, &Rat::zero()))
    }

    pub fn substitute(&self, binding: &BTreeMap<String, LinExpr>) -> Self {
        Self::normalized(self.lhs.substitute(binding), self.op)
    }

    pub fn rename(&self, renaming: &BTreeMap<String, String>) -> Self {
        let binding = renaming
            .iter()
            .map(|(from, to)| (from.clone(), LinExpr::var(to.clone())))
            .collect();
        self.substitute(&binding)
    }

    /// The constraints whose disjunction is the negation of `self`.
    /// An equality yields two strict inequalities.
    pub fn negation(&self) -> Vec<AtomicConstraint> {
        match self.op {
            RelOp::Lt => vec![Self::normalized(self.lhs.negated(), RelOp::Le)],
            RelOp::Le => vec![Self::normalized(self.lhs.negated(), RelOp::Lt)],
            _ => vec![
                Self::normalized(self.lhs.clone(), RelOp::Lt),
                Self::normalized(self.lhs.negated(), RelOp::Lt),
            ],
        }
    }

    pub fn var_set(&self) -> BTreeSet<String> {
        self.lhs.vars().map(str::to_owned).collect()
    }
}

fn canonical_scale(expr: LinExpr, fix_sign: bool) -> LinExpr {
    let numbers = || expr.coeffs.values().chain(std::iter::once(&expr.constant));
    let denom_lcm = numbers().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let num_gcd = numbers().fold(BigInt::zero(), |acc, r| {
        acc.gcd(&(r.numer() * (&denom_lcm / r.denom())))
    });
    if num_gcd.is_zero() {
        return LinExpr::zero();
    }
    let mut factor = Rat::new(denom_lcm, num_gcd);
    if fix_sign {
        let lead = expr.coeffs.values().next().unwrap_or(&expr.constant);
        if lead.is_negative() {
            factor = -factor;
        }
    }
    expr.scaled(&factor)
}

impl fmt::Display for AtomicConstraint {
    /// Oriented so the first variable has a positive coefficient on the left:
    /// `-X < 0` prints as `X>0`, `C - B =< 0` as `B>=C`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flip = self.lhs.coeffs.values().next().is_some_and(Signed::is_negative);
        let (expr, op) = if flip {
            (self.lhs.negated(), self.op.flipped())
        } else {
            (self.lhs.clone(), self.op)
        };
        if expr.is_constant() {
            return write!(f, "{}{}0", expr.constant, op);
        }
        let mut left = LinExpr::zero();
        let mut right = LinExpr::constant(-expr.constant.clone());
        for (v, c) in &expr.coeffs {
            if c.is_positive() {
                left.add_term(c.clone(), v.clone());
            } else {
                right.add_term(-c.clone(), v.clone());
            }
        }
        write!(f, "{left}{op}{right}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> LinExpr {
        LinExpr::var(n)
    }

    #[test]
    fn no_zero_coefficients_are_stored() {
        let e = v("X").minus(&v("X")).plus(&v("Y"));
        assert_eq!(e.coeffs().len(), 1);
        assert!(e.mentions("Y"));
        assert!(!e.mentions("X"));
    }

    #[test]
    fn greater_than_flips_to_strict_less() {
        let c = AtomicConstraint::new(v("X"), RelOp::Gt, LinExpr::zero());
        assert_eq!(c.op(), RelOp::Lt);
        assert_eq!(c.lhs().coeff("X"), rat(-1));
        assert_eq!(c.to_string(), "X>0");
    }

    #[test]
    fn scale_is_canonical() {
        let a = AtomicConstraint::compare_zero(v("X").scaled(&rat(4)).plus(&LinExpr::constant(rat(-2))), RelOp::Le);
        let b = AtomicConstraint::compare_zero(
            v("X").scaled(&ratio(1, 3)).plus(&LinExpr::constant(ratio(-1, 6))),
            RelOp::Le,
        );
        assert_eq!(a, b);
        let e1 = AtomicConstraint::new(v("X"), RelOp::Eq, v("Y"));
        let e2 = AtomicConstraint::new(v("Y"), RelOp::Eq, v("X"));
        assert_eq!(e1, e2);
    }

    #[test]
    fn display_forms() {
        let c = AtomicConstraint::new(v("B"), RelOp::Lt, v("C"));
        assert_eq!(c.to_string(), "B<C");
        let c = AtomicConstraint::new(v("Y"), RelOp::Lt, v("M"));
        assert_eq!(c.to_string(), "M>Y");
        let c = AtomicConstraint::new(v("B"), RelOp::Ge, v("C"));
        assert_eq!(c.to_string(), "B>=C");
        let c = AtomicConstraint::new(v("X"), RelOp::Le, LinExpr::constant(rat(-2)));
        assert_eq!(c.to_string(), "X=<-2");
        let c = AtomicConstraint::new(v("Y1"), RelOp::Eq, v("Y").plus(&LinExpr::constant(rat(1))));
        assert_eq!(c.to_string(), "Y=Y1-1");
        assert_eq!(AtomicConstraint::falsum().to_string(), "0<0");
        let half = LinExpr::term(ratio(1, 2), "X").minus(&LinExpr::constant(ratio(3, 4)));
        assert_eq!(half.to_string(), "1/2*X-3/4");
    }

    #[test]
    fn negation_of_equality_is_two_strict() {
        let c = AtomicConstraint::new(v("X"), RelOp::Eq, LinExpr::constant(rat(1)));
        let n = c.negation();
        assert_eq!(n.len(), 2);
        assert!(n.iter().all(AtomicConstraint::is_strict));
    }

    #[test]
    fn solve_for_variable() {
        // Y1 - Y - 1 = 0  =>  Y1 = Y + 1
        let e = v("Y1").minus(&v("Y")).minus(&LinExpr::constant(rat(1)));
        let s = e.solve_for("Y1").unwrap();
        assert_eq!(s, v("Y").plus(&LinExpr::constant(rat(1))));
    }

    #[test]
    fn name_classes() {
        assert!(is_var_name("X1_a"));
        assert!(!is_var_name("x"));
        assert!(is_ident("solve__3"));
        assert!(!is_ident("Solve"));
    }
}
