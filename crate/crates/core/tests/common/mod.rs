//! Test oracles shared by the integration suites. Nothing here calls into the
//! constraint engine: constraints are kept in raw integer form and checked by
//! enumeration, and the example loop has a direct simulator.

#![allow(dead_code)]

use rand::{Rng, RngExt};

pub const EXAMPLE: &str = "\
while0(X,Y,M) :- X>0, if0(X,Y,M).
while0(X,Y,M) :- X=<0.
if0(X,Y,M) :- Y<M, Y1=Y+1, while0(X,Y1,M).
if0(X,Y,M) :- Y>=M, X1=X-1, while0(X1,Y,M).
";

pub const VARS: [&str; 3] = ["X", "Y", "Z"];
pub const BOX: i64 = 10;

/// `sum(coeffs[i] * VARS[i]) + constant  op  0`
#[derive(Clone, Debug)]
pub struct Raw {
    pub coeffs: Vec<i64>,
    pub constant: i64,
    pub op: &'static str,
}

pub const OPS: [&str; 5] = ["<", "=<", "=", ">=", ">"];

impl Raw {
    pub fn holds(&self, point: &[i64]) -> bool {
        let v: i64 = self.coeffs.iter().zip(point).map(|(a, x)| a * x).sum::<i64>() + self.constant;
        match self.op {
            "<" => v < 0,
            "=<" => v <= 0,
            "=" => v == 0,
            ">=" => v >= 0,
            ">" => v > 0,
            _ => unreachable!(),
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for (a, v) in self.coeffs.iter().zip(VARS) {
            if *a == 0 {
                continue;
            }
            if *a < 0 {
                s.push('-');
            } else if !s.is_empty() {
                s.push('+');
            }
            if a.abs() != 1 {
                s.push_str(&format!("{}*", a.abs()));
            }
            s.push_str(v);
        }
        if self.constant != 0 || s.is_empty() {
            if self.constant < 0 {
                s.push('-');
            } else if !s.is_empty() {
                s.push('+');
            }
            s.push_str(&self.constant.abs().to_string());
        }
        format!("{s}{}0", self.op)
    }

    pub fn parsed(&self) -> cfr_core::AtomicConstraint {
        cfr_core::syntax::parse_constraint(&self.text()).expect("generated constraint parses")
    }
}

pub fn random_raw(rng: &mut impl Rng, nvars: usize) -> Raw {
    Raw {
        coeffs: (0..nvars).map(|_| rng.random_range(-3..=3)).collect(),
        constant: rng.random_range(-5..=5),
        op: OPS[rng.random_range(0..OPS.len())],
    }
}

/// Every integer point of `[-BOX, BOX]^n`.
pub fn box_points(n: usize) -> Vec<Vec<i64>> {
    let mut points = vec![Vec::new()];
    for _ in 0..n {
        points = points
            .into_iter()
            .flat_map(|p| {
                (-BOX..=BOX).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    points
}

pub fn holds_all(raws: &[Raw], point: &[i64]) -> bool {
    raws.iter().all(|r| r.holds(point))
}

pub fn store_of(raws: &[Raw]) -> cfr_core::Store {
    raws.iter().map(Raw::parsed).collect()
}

/// Direct simulation of the two-phase loop: (terminates, number of calls).
pub fn simulate_loop(mut x: i64, mut y: i64, m: i64) -> (bool, usize) {
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

/// A random program over `p/2` and `q/2` in the text grammar. Clauses carry
/// up to two guards, may define a local `Z`, and make at most one call.
pub fn random_two_pred_program(rng: &mut impl Rng) -> String {
    let mut text = String::new();
    for head in ["p", "q"] {
        for _ in 0..rng.random_range(1..=3) {
            let mut items: Vec<String> = Vec::new();
            for _ in 0..rng.random_range(0..=2) {
                let guard = Raw {
                    coeffs: vec![rng.random_range(-2..=2), rng.random_range(-2..=2)],
                    constant: rng.random_range(-3..=3),
                    op: OPS[rng.random_range(0..OPS.len())],
                };
                items.push(guard.text());
            }
            if rng.random_bool(0.8) {
                let local = rng.random_bool(0.3);
                if local {
                    items.push(format!("Z=X+{}", rng.random_range(0..=2)));
                }
                let (a, b) = (random_arg(rng, local), random_arg(rng, local));
                let callee = if rng.random_bool(0.5) { "p" } else { "q" };
                items.push(format!("{callee}({a},{b})"));
            }
            if items.is_empty() {
                text.push_str(&format!("{head}(X,Y).\n"));
            } else {
                text.push_str(&format!("{head}(X,Y) :- {}.\n", items.join(", ")));
            }
        }
    }
    text
}

fn random_arg(rng: &mut impl Rng, local: bool) -> String {
    let base = if local && rng.random_bool(0.5) {
        "Z"
    } else if rng.random_bool(0.5) {
        "X"
    } else {
        "Y"
    };
    match rng.random_range(-1..=1) {
        0 => base.to_string(),
        k if k > 0 => format!("{base}+{k}"),
        k => format!("{base}{k}"),
    }
}
