use std::collections::BTreeSet;

use super::{Formula, Value};
use crate::lex::{Cursor, ParseError, Tok};
use crate::syntax::parse::parse_action;
use crate::syntax::TransName;

const RESERVED: &[&str] = &["tt", "ff", "hasco", "tau", "co"];

/// Parses a formula. `a | b`, `a -> b`, `a <-> b`, `ff` and `[tau]f` are
/// sugar over negation, conjunction and `<tau>`.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut cur = Cursor::new(src)?;
    if *cur.peek() == Tok::Eof {
        return cur.error("expected a formula");
    }
    let f = iff(&mut cur)?;
    cur.expect_eof()?;
    Ok(f)
}

fn iff(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let a = imp(cur)?;
    if cur.eat_sym("<->") {
        let b = imp(cur)?;
        return Ok(Formula::iff(a, b));
    }
    Ok(a)
}

fn imp(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let a = or(cur)?;
    if cur.eat_sym("->") {
        let b = imp(cur)?;
        return Ok(Formula::implies(a, b));
    }
    Ok(a)
}

fn or(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let mut fs = vec![and(cur)?];
    while cur.eat_sym("|") {
        fs.push(and(cur)?);
    }
    Ok(Formula::or(fs))
}

fn and(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let mut fs = vec![unary(cur)?];
    while cur.eat_sym("&") {
        fs.push(unary(cur)?);
    }
    Ok(Formula::conj(fs))
}

fn unary(cur: &mut Cursor) -> Result<Formula, ParseError> {
    if cur.eat_sym("~") {
        return Ok(Formula::neg(unary(cur)?));
    }
    if cur.eat_sym("[") {
        cur.expect_kw("tau")?;
        cur.expect_sym("]")?;
        return Ok(Formula::box_tau(unary(cur)?));
    }
    if cur.eat_sym("<") {
        if cur.eat_kw("tau") {
            cur.expect_sym(">")?;
            return Ok(Formula::dia_tau(unary(cur)?));
        }
        if cur.is_kw("co") && *cur.peek_at(1) == Tok::Sym("{") {
            cur.next();
            cur.next();
            let mut k = BTreeSet::new();
            loop {
                k.insert(value(cur)?);
                if !cur.eat_sym(",") {
                    break;
                }
            }
            cur.expect_sym("}")?;
            cur.expect_sym(">")?;
            return Ok(Formula::dia_co(k, unary(cur)?));
        }
        let x = variable(cur)?;
        cur.expect_sym("(")?;
        let a = parse_action(cur)?;
        cur.expect_sym(")")?;
        cur.expect_sym(">")?;
        return Ok(Formula::dia_act(&x, a, unary(cur)?));
    }
    atom(cur)
}

fn atom(cur: &mut Cursor) -> Result<Formula, ParseError> {
    if cur.eat_kw("tt") {
        return Ok(Formula::tt());
    }
    if cur.eat_kw("ff") {
        return Ok(Formula::ff());
    }
    if cur.eat_kw("hasco") {
        cur.expect_sym("(")?;
        let v = value(cur)?;
        cur.expect_sym(")")?;
        return Ok(Formula::Hasco(v));
    }
    if cur.eat_sym("(") {
        let f = iff(cur)?;
        cur.expect_sym(")")?;
        return Ok(f);
    }
    let a = value(cur)?;
    cur.expect_sym("=")?;
    cur.expect_kw("co")?;
    let b = value(cur)?;
    Ok(Formula::EqCo(a, b))
}

fn variable(cur: &mut Cursor) -> Result<String, ParseError> {
    match cur.peek().clone() {
        Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
            cur.next();
            Ok(s)
        }
        t => cur.error(format!("expected a variable, found {t}")),
    }
}

fn value(cur: &mut Cursor) -> Result<Value, ParseError> {
    match cur.peek().clone() {
        Tok::Hash(s) => {
            cur.next();
            Ok(Value::Name(TransName::external(&s)))
        }
        Tok::Percent(_) => cur.error("formulas may only mention external names"),
        _ => Ok(Value::Var(variable(cur)?.into())),
    }
}

const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

pub(super) fn render(f: &Formula) -> String {
    let mut out = String::new();
    go(f, IFF, &mut out);
    out
}

fn disjuncts(f: &Formula) -> Option<Vec<&Formula>> {
    let Formula::Neg(inner) = f else { return None };
    let Formula::Conj(v) = &**inner else {
        return None;
    };
    if v.len() < 2 {
        return None;
    }
    v.iter()
        .map(|g| match g {
            Formula::Neg(h) => Some(&**h),
            _ => None,
        })
        .collect()
}

fn implication(f: &Formula) -> Option<(&Formula, &Formula)> {
    let Formula::Neg(inner) = f else { return None };
    match &**inner {
        Formula::Conj(v) if v.len() == 2 => match &v[1] {
            Formula::Neg(b) => Some((&v[0], &**b)),
            _ => None,
        },
        _ => None,
    }
}

fn go(f: &Formula, ctx: u8, out: &mut String) {
    let wrap = |level: u8, out: &mut String, body: &dyn Fn(&mut String)| {
        if level < ctx {
            out.push('(');
            body(out);
            out.push(')');
        } else {
            body(out);
        }
    };
    if f.is_tt() {
        out.push_str("tt");
        return;
    }
    if let Formula::Neg(g) = f {
        if g.is_tt() {
            out.push_str("ff");
            return;
        }
        if let Some(ds) = disjuncts(f) {
            wrap(OR, out, &|out| {
                for (i, d) in ds.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    go(d, AND, out);
                }
            });
            return;
        }
        if let Some((a, b)) = implication(f) {
            wrap(IMP, out, &|out| {
                go(a, OR, out);
                out.push_str(" -> ");
                go(b, IMP, out);
            });
            return;
        }
        if let Formula::DiamondTau(h) = &**g {
            if let Formula::Neg(body) = &**h {
                out.push_str("[tau]");
                go(body, UNARY, out);
                return;
            }
        }
        out.push('~');
        go(g, UNARY, out);
        return;
    }
    match f {
        Formula::Conj(v) if v.len() == 1 => go(&v[0], ctx, out),
        Formula::Conj(v) => wrap(AND, out, &|out| {
            for (i, g) in v.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                go(g, UNARY, out);
            }
        }),
        Formula::DiamondTau(g) => {
            out.push_str("<tau>");
            go(g, UNARY, out);
        }
        Formula::DiamondAct(x, a, g) => {
            out.push_str(&format!("<{x}({a})>"));
            go(g, UNARY, out);
        }
        Formula::DiamondCo(k, g) => {
            let vs: Vec<String> = k.iter().map(Value::to_string).collect();
            out.push_str(&format!("<co{{{}}}>", vs.join(", ")));
            go(g, UNARY, out);
        }
        Formula::Hasco(v) => out.push_str(&format!("hasco({v})")),
        Formula::EqCo(a, b) => out.push_str(&format!("{a} =co {b}")),
        Formula::Neg(_) => unreachable!(),
    }
}
