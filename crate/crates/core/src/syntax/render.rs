use std::fmt::{self, Write};

use super::Process;

// Context levels: 0 = anywhere a `|` chain may appear, 1 = operand of `|`,
// 2 = prefix continuation. `tail` means nothing follows in the enclosing
// text, so a `nu`/`rec` body may extend to the right unparenthesized.
fn go(p: &Process, out: &mut String, level: u8, tail: bool) {
    match p {
        Process::Sum(bs) if bs.is_empty() => out.push('0'),
        Process::Sum(bs) => {
            let paren = bs.len() > 1 && level >= 2;
            let tail = tail || paren;
            if paren {
                out.push('(');
            }
            for (i, (mu, q)) in bs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                let _ = write!(out, "{mu}");
                if !q.is_nil() {
                    out.push('.');
                    go(q, out, 2, tail && i + 1 == bs.len());
                }
            }
            if paren {
                out.push(')');
            }
        }
        Process::Par(a, b) => {
            let paren = level >= 1;
            if paren {
                out.push('(');
            }
            go(a, out, 0, false);
            out.push_str(" | ");
            go(b, out, 1, tail || paren);
            if paren {
                out.push(')');
            }
        }
        Process::Restrict(x, q) => binder(out, &format!("nu {x}. "), q, tail),
        Process::Rec(x, q) => binder(out, &format!("rec {x}. "), q, tail),
        Process::Var(x) => out.push_str(x),
        Process::Commit => out.push_str("co"),
        Process::Running(d, k, a) => {
            let _ = write!(out, "txn {k} {{ ");
            go(d, out, 0, true);
            out.push_str(" } else { ");
            go(a, out, 0, true);
            out.push_str(" }");
        }
        Process::Dormant(d, a) => {
            out.push_str("txn { ");
            go(d, out, 0, true);
            out.push_str(" } else { ");
            go(a, out, 0, true);
            out.push_str(" }");
        }
    }
}

fn binder(out: &mut String, head: &str, body: &Process, tail: bool) {
    if !tail {
        out.push('(');
    }
    out.push_str(head);
    go(body, out, 0, true);
    if !tail {
        out.push(')');
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        go(self, &mut s, 0, true);
        f.write_str(&s)
    }
}
