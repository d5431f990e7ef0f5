use num::Zero;

use super::ast::{BodyAtom, Clause, Goal, Program};
use super::expr::{AtomicConstraint, LinExpr, Rat, RelOp};
use super::lexer::{tokenize, Pos, Tok};
use super::ParseError;

/// Recursive-descent parser shared by the program, goal and properties formats.
pub(crate) struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

/// One `p(A,B,C): c1; c2.` block of a properties file, before resolution.
pub(crate) struct PropBlock {
    pub predicate: String,
    pub pos: Pos,
    pub params: Vec<(String, Pos)>,
    pub constraints: Vec<(AtomicConstraint, Pos)>,
}

struct ParsedAtom {
    predicate: String,
    args: Vec<(LinExpr, Pos)>,
    pos: Pos,
}

enum BodyItem {
    Constraint(AtomicConstraint),
    Atom(ParsedAtom),
}

impl Parser {
    pub fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
        })
    }

    fn current(&self) -> &(Tok, Pos) {
        &self.toks[self.at.min(self.toks.len() - 1)]
    }

    fn peek(&self) -> &Tok {
        &self.current().0
    }

    fn pos(&self) -> Pos {
        self.current().1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.current().clone();
        self.at += 1;
        t
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: format!("expected {expected}, found {}", self.peek()),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Pos, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.unexpected(expected)
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn program(&mut self) -> Result<Program, ParseError> {
        let mut program = Program::default();
        while !self.at_eof() {
            let clause_pos = self.pos();
            let clause = self.clause(&mut program)?;
            program.push(clause).map_err(|source| ParseError::Invalid {
                pos: clause_pos,
                source,
            })?;
        }
        Ok(program)
    }

    fn clause(&mut self, program: &mut Program) -> Result<Clause, ParseError> {
        if !matches!(self.peek(), Tok::Ident(_)) {
            return self.unexpected("a clause head");
        }
        let head = self.atom()?;
        declare(program, &head)?;
        let mut params = Vec::with_capacity(head.args.len());
        for (i, (arg, pos)) in head.args.iter().enumerate() {
            match arg.as_var() {
                Some(v) => params.push(v.to_owned()),
                None => {
                    return Err(ParseError::NonVariableHead {
                        pos: *pos,
                        predicate: head.predicate.clone(),
                        index: i + 1,
                    })
                }
            }
        }
        let mut constraints = Vec::new();
        let mut body = Vec::new();
        if *self.peek() == Tok::Neck {
            self.bump();
            loop {
                match self.body_item()? {
                    BodyItem::Constraint(c) => constraints.push(c),
                    BodyItem::Atom(a) => {
                        declare(program, &a)?;
                        body.push(BodyAtom::new(a.predicate, a.args.into_iter().map(|(e, _)| e).collect()));
                    }
                }
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::Dot, "`,` or `.` after clause body")?;
        Ok(Clause {
            head: head.predicate,
            params,
            constraints,
            body,
        })
    }

    fn body_item(&mut self) -> Result<BodyItem, ParseError> {
        if matches!(self.peek(), Tok::Ident(_)) {
            Ok(BodyItem::Atom(self.atom()?))
        } else {
            Ok(BodyItem::Constraint(self.constraint()?.0))
        }
    }

    fn atom(&mut self) -> Result<ParsedAtom, ParseError> {
        let (predicate, pos) = match self.bump() {
            (Tok::Ident(name), pos) => (name, pos),
            (_, _) => {
                self.at -= 1;
                return self.unexpected("a predicate name");
            }
        };
        self.expect(Tok::LParen, &format!("`(` after `{predicate}`"))?;
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
        } else {
            loop {
                args.push(self.linexpr()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return self.unexpected(&format!("`,` or `)` in the argument list of `{predicate}`")),
                }
            }
        }
        Ok(ParsedAtom { predicate, args, pos })
    }

    pub fn constraint(&mut self) -> Result<(AtomicConstraint, Pos), ParseError> {
        let (lhs, pos) = self.linexpr()?;
        let op = match self.peek() {
            Tok::Lt => RelOp::Lt,
            Tok::Le => RelOp::Le,
            Tok::Eq => RelOp::Eq,
            Tok::Ge => RelOp::Ge,
            Tok::Gt => RelOp::Gt,
            _ => return self.unexpected("a relational operator (`<`, `=<`, `=`, `>=`, `>`)"),
        };
        self.bump();
        let (rhs, _) = self.linexpr()?;
        Ok((AtomicConstraint::new(lhs, op, rhs), pos))
    }

    fn linexpr(&mut self) -> Result<(LinExpr, Pos), ParseError> {
        let pos = self.pos();
        let mut sign = Rat::from_integer(1.into());
        match self.peek() {
            Tok::Minus => {
                self.bump();
                sign = -sign;
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        let mut expr = LinExpr::zero();
        loop {
            let term = self.term()?;
            expr = expr.plus_scaled(&term, &sign);
            match self.peek() {
                Tok::Plus => sign = Rat::from_integer(1.into()),
                Tok::Minus => sign = Rat::from_integer((-1).into()),
                _ => break,
            }
            self.bump();
        }
        Ok((expr, pos))
    }

    fn number(&mut self) -> Result<Rat, ParseError> {
        let n = match self.bump() {
            (Tok::Int(n), _) => n,
            _ => {
                self.at -= 1;
                return self.unexpected("a number");
            }
        };
        if *self.peek() != Tok::Slash {
            return Ok(Rat::from_integer(n));
        }
        self.bump();
        match self.bump() {
            (Tok::Int(d), pos) if d.is_zero() => Err(ParseError::Syntax {
                pos,
                message: "zero denominator".into(),
            }),
            (Tok::Int(d), _) => Ok(Rat::new(n, d)),
            _ => {
                self.at -= 1;
                self.unexpected("a denominator")
            }
        }
    }

    fn term(&mut self) -> Result<LinExpr, ParseError> {
        let term = match self.peek().clone() {
            Tok::Int(_) => {
                let coeff = self.number()?;
                if *self.peek() == Tok::Star {
                    self.bump();
                    match self.bump() {
                        (Tok::Var(v), _) => LinExpr::term(coeff, v),
                        (_, _) => {
                            self.at -= 1;
                            return self.unexpected("a variable after `*`");
                        }
                    }
                } else {
                    LinExpr::constant(coeff)
                }
            }
            Tok::Var(v) => {
                self.bump();
                if *self.peek() == Tok::Star {
                    let star = self.bump().1;
                    match self.peek() {
                        Tok::Int(_) => LinExpr::term(self.number()?, v),
                        Tok::Var(_) => return Err(ParseError::NonLinear { pos: star }),
                        _ => return self.unexpected("a coefficient after `*`"),
                    }
                } else {
                    LinExpr::var(v)
                }
            }
            _ => return self.unexpected("a variable or number"),
        };
        if *self.peek() == Tok::Star {
            return Err(ParseError::NonLinear { pos: self.pos() });
        }
        Ok(term)
    }

    pub fn goal(&mut self) -> Result<Goal, ParseError> {
        let atom = self.atom()?;
        let mut args = Vec::with_capacity(atom.args.len());
        for (e, pos) in atom.args {
            if !e.is_constant() {
                return Err(ParseError::NonGround { pos });
            }
            args.push(e.constant_term().clone());
        }
        if *self.peek() == Tok::Dot {
            self.bump();
        }
        if !self.at_eof() {
            return self.unexpected("end of goal");
        }
        Ok(Goal::new(atom.predicate, args))
    }

    pub fn prop_block(&mut self) -> Result<PropBlock, ParseError> {
        let (predicate, pos) = match self.bump() {
            (Tok::Ident(name), pos) => (name, pos),
            _ => {
                self.at -= 1;
                return self.unexpected("a predicate name");
            }
        };
        self.expect(Tok::LParen, &format!("`(` after `{predicate}`"))?;
        let mut params = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
        } else {
            loop {
                match self.bump() {
                    (Tok::Var(v), p) => params.push((v, p)),
                    _ => {
                        self.at -= 1;
                        return self.unexpected("a parameter variable");
                    }
                }
                match self.bump().0 {
                    Tok::Comma => {}
                    Tok::RParen => break,
                    _ => {
                        self.at -= 1;
                        return self.unexpected(&format!("`,` or `)` in the parameter list of `{predicate}`"));
                    }
                }
            }
        }
        self.expect(Tok::Colon, "`:` after the parameter list")?;
        let mut constraints = vec![self.constraint()?];
        while *self.peek() == Tok::Semi {
            self.bump();
            constraints.push(self.constraint()?);
        }
        self.expect(Tok::Dot, "`;` or `.` after a property")?;
        Ok(PropBlock {
            predicate,
            pos,
            params,
            constraints,
        })
    }
}

fn declare(program: &mut Program, atom: &ParsedAtom) -> Result<(), ParseError> {
    program
        .declare(&atom.predicate, atom.args.len())
        .map_err(|source| ParseError::Invalid { pos: atom.pos, source })
}
