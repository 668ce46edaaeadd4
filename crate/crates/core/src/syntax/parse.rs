use std::sync::Arc;

use super::{dormant, nil, par, running, ActName, Prefix, Process, TransName};
use crate::lex::{Cursor, ParseError, Tok};

const KEYWORDS: &[&str] = &["co", "tau", "nu", "rec", "txn", "else"];

/// Parses a closed process term.
pub fn parse_process(src: &str) -> Result<Process, ParseError> {
    parse_with(src, true)
}

/// Parses a term that may contain free process variables.
pub fn parse_open_process(src: &str) -> Result<Process, ParseError> {
    parse_with(src, false)
}

fn parse_with(src: &str, closed: bool) -> Result<Process, ParseError> {
    let mut p = Parser {
        cur: Cursor::new(src)?,
        bound: Vec::new(),
        closed,
    };
    if matches!(p.cur.peek(), Tok::Eof) {
        return p.cur.error("empty input");
    }
    let t = p.par()?;
    p.cur.expect_eof()?;
    Ok(t)
}

/// Parses a closed process from the current position, leaving any
/// trailing tokens for the caller.
pub(crate) fn parse_process_at(cur: &mut Cursor) -> Result<Process, ParseError> {
    let toks = std::mem::replace(cur, Cursor::empty());
    let mut p = Parser {
        cur: toks,
        bound: Vec::new(),
        closed: true,
    };
    if matches!(p.cur.peek(), Tok::Eof) {
        return p.cur.error("expected a process");
    }
    let r = p.par();
    *cur = p.cur;
    r
}

pub(crate) fn parse_trans_name(cur: &mut Cursor) -> Result<TransName, ParseError> {
    match cur.peek().clone() {
        Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
            cur.next();
            Ok(TransName::internal(&s))
        }
        Tok::Percent(s) => {
            cur.next();
            Ok(TransName::internal(&format!("%{s}")))
        }
        Tok::Hash(s) => {
            cur.next();
            Ok(TransName::external(&s))
        }
        t => cur.error(format!("expected a transaction name, found {t}")),
    }
}

pub(crate) fn parse_action(cur: &mut Cursor) -> Result<ActName, ParseError> {
    match cur.peek().clone() {
        Tok::Ident(s) if is_action_ident(&s) => {
            cur.next();
            Ok(ActName::input(&s))
        }
        Tok::Quote(s) if is_action_ident(&s) => {
            cur.next();
            Ok(ActName::output(&s))
        }
        t => cur.error(format!("expected an action name, found {t}")),
    }
}

fn is_action_ident(s: &str) -> bool {
    !KEYWORDS.contains(&s) && !s.starts_with(|c: char| c.is_ascii_uppercase())
}

struct Parser {
    cur: Cursor,
    bound: Vec<Arc<str>>,
    closed: bool,
}

impl Parser {
    fn par(&mut self) -> Result<Process, ParseError> {
        let mut p = self.sum()?;
        while self.cur.eat_sym("|") {
            let q = self.sum()?;
            p = par(p, q);
        }
        Ok(p)
    }

    fn sum(&mut self) -> Result<Process, ParseError> {
        let here = self.cur.here();
        let first = self.unary()?;
        if !self.cur.is_sym("+") {
            return Ok(first);
        }
        let mut branches = Vec::new();
        let mut operand = first;
        let mut at = here;
        loop {
            match operand {
                Process::Sum(bs) => branches.extend(bs),
                _ => {
                    return Err(ParseError {
                        line: at.0,
                        col: at.1,
                        message: "operands of `+` must be prefixed terms".into(),
                    })
                }
            }
            if !self.cur.eat_sym("+") {
                break;
            }
            at = self.cur.here();
            operand = self.unary()?;
        }
        Ok(Process::Sum(branches))
    }

    fn unary(&mut self) -> Result<Process, ParseError> {
        let here = self.cur.here();
        match self.cur.peek().clone() {
            Tok::Num(0) => {
                self.cur.next();
                Ok(nil())
            }
            Tok::Sym("(") => {
                self.cur.next();
                let p = self.par()?;
                self.cur.expect_sym(")")?;
                Ok(p)
            }
            Tok::Ident(kw) if kw == "co" => {
                self.cur.next();
                Ok(Process::Commit)
            }
            Tok::Ident(kw) if kw == "tau" => {
                self.cur.next();
                self.continuation(Prefix::Tau)
            }
            Tok::Ident(kw) if kw == "nu" => {
                self.cur.next();
                let a = parse_action(&mut self.cur)?;
                if a.output {
                    return self.cur.error("restriction binds a plain name");
                }
                self.cur.expect_sym(".")?;
                let body = self.par()?;
                Ok(Process::Restrict(a.name, Box::new(body)))
            }
            Tok::Ident(kw) if kw == "rec" => {
                self.cur.next();
                let x = match self.cur.next() {
                    Tok::Ident(x) if x.starts_with(|c: char| c.is_ascii_uppercase()) => x,
                    t => {
                        return Err(ParseError {
                            line: here.0,
                            col: here.1,
                            message: format!("expected a process variable after `rec`, found {t}"),
                        })
                    }
                };
                self.cur.expect_sym(".")?;
                let x: Arc<str> = x.into();
                self.bound.push(x.clone());
                let body = self.par();
                self.bound.pop();
                Ok(Process::Rec(x, Box::new(body?)))
            }
            Tok::Ident(kw) if kw == "txn" => {
                self.cur.next();
                let name = if self.cur.is_sym("{") {
                    None
                } else {
                    Some(parse_trans_name(&mut self.cur)?)
                };
                self.cur.expect_sym("{")?;
                let d = self.par()?;
                self.cur.expect_sym("}")?;
                self.cur.expect_kw("else")?;
                self.cur.expect_sym("{")?;
                let a = self.par()?;
                self.cur.expect_sym("}")?;
                Ok(match name {
                    Some(k) => running(d, k, a),
                    None => dormant(d, a),
                })
            }
            Tok::Ident(x) if x.starts_with(|c: char| c.is_ascii_uppercase()) => {
                self.cur.next();
                if self.closed && !self.bound.iter().any(|b| **b == *x) {
                    return Err(ParseError {
                        line: here.0,
                        col: here.1,
                        message: format!("unbound process variable {x}"),
                    });
                }
                Ok(Process::Var(x.into()))
            }
            Tok::Ident(_) | Tok::Quote(_) => {
                let a = parse_action(&mut self.cur)?;
                self.continuation(Prefix::Act(a))
            }
            t => self.cur.error(format!("expected a process, found {t}")),
        }
    }

    fn continuation(&mut self, mu: Prefix) -> Result<Process, ParseError> {
        let cont = if self.cur.eat_sym(".") {
            self.unary()?
        } else {
            nil()
        };
        Ok(Process::Sum(vec![(mu, cont)]))
    }
}
