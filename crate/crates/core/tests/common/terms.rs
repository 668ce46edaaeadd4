//! Exhaustive enumeration of small closed terms with guarded recursion.

use std::sync::Arc;

use tccs::syntax::{check_well_formed, ActName, Prefix, Process, TransName};

#[derive(Clone, Copy)]
struct Ctx {
    /// Named transactions may appear (not under a prefix, a recursion
    /// or another transaction).
    top: bool,
    /// Inside a recursion body, so `X` may appear.
    in_rec: bool,
    /// Inside a default part, so `co` may appear.
    in_default: bool,
}

pub struct Enumerator {
    prefixes: Vec<Prefix>,
    names: Vec<TransName>,
}

impl Enumerator {
    /// Prefixes over `actions` and their co-names, plus `tau`.
    pub fn new(actions: &[&str], names: &[&str]) -> Self {
        let mut prefixes = vec![Prefix::Tau];
        for a in actions {
            prefixes.push(Prefix::Act(ActName::input(a)));
            prefixes.push(Prefix::Act(ActName::output(a)));
        }
        Enumerator {
            prefixes,
            names: names.iter().map(|n| TransName::internal(n)).collect(),
        }
    }

    /// Every well-formed closed term of at most `max` nodes whose
    /// recursion variables are guarded.
    pub fn all(&self, max: usize) -> Vec<Process> {
        let ctx = Ctx {
            top: true,
            in_rec: false,
            in_default: false,
        };
        let mut out = Vec::new();
        for n in 1..=max {
            for p in self.exact(n, ctx) {
                if p.is_closed() && guarded(&p) && check_well_formed(&p).is_ok() {
                    out.push(p);
                }
            }
        }
        out
    }

    fn exact(&self, n: usize, ctx: Ctx) -> Vec<Process> {
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        if n == 1 {
            out.push(Process::Sum(Vec::new()));
            if ctx.in_default {
                out.push(Process::Commit);
            }
            if ctx.in_rec {
                out.push(Process::Var(Arc::from("X")));
            }
            return out;
        }
        let under_prefix = Ctx { top: false, ..ctx };
        for mu in &self.prefixes {
            for q in self.exact(n - 1, under_prefix) {
                out.push(Process::Sum(vec![(mu.clone(), q)]));
            }
        }
        // Binary sums: (1 + i) + (1 + j) = n.
        for i in 1..n.saturating_sub(2) {
            let j = n - 2 - i;
            for (x, mu) in self.prefixes.iter().enumerate() {
                for (y, nu) in self.prefixes.iter().enumerate() {
                    if (x, i) > (y, j) {
                        continue;
                    }
                    for p in self.exact(i, under_prefix) {
                        for q in self.exact(j, under_prefix) {
                            out.push(Process::Sum(vec![(mu.clone(), p.clone()), (nu.clone(), q)]));
                        }
                    }
                }
            }
        }
        for i in 1..n - 1 {
            for p in self.exact(i, ctx) {
                for q in self.exact(n - 1 - i, ctx) {
                    out.push(Process::Par(Box::new(p.clone()), Box::new(q)));
                }
            }
        }
        for a in ["a", "b"] {
            for q in self.exact(n - 1, ctx) {
                out.push(Process::Restrict(Arc::from(a), Box::new(q)));
            }
        }
        {
            let body = Ctx {
                top: false,
                in_rec: true,
                ..ctx
            };
            for q in self.exact(n - 1, body) {
                out.push(Process::Rec(Arc::from("X"), Box::new(q)));
            }
        }
        if !ctx.in_default {
            let default = Ctx {
                top: false,
                in_rec: false,
                in_default: true,
            };
            let alternative = Ctx {
                top: false,
                in_default: false,
                ..ctx
            };
            for i in 1..n - 1 {
                for d in self.exact(i, default) {
                    for a in self.exact(n - 1 - i, alternative) {
                        out.push(Process::Dormant(Box::new(d.clone()), Box::new(a.clone())));
                        if ctx.top {
                            for k in &self.names {
                                out.push(Process::Running(
                                    Box::new(d.clone()),
                                    k.clone(),
                                    Box::new(a.clone()),
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Every recursion variable occurs under a prefix of its binder's body.
pub fn guarded(p: &Process) -> bool {
    fn walk(p: &Process, unguarded: &mut Vec<Arc<str>>) -> bool {
        match p {
            Process::Var(x) => !unguarded.contains(x),
            Process::Sum(bs) => bs.iter().all(|(_, q)| walk(q, &mut Vec::new())),
            Process::Par(a, b) | Process::Running(a, _, b) | Process::Dormant(a, b) => {
                walk(a, unguarded) && walk(b, unguarded)
            }
            Process::Restrict(_, q) => walk(q, unguarded),
            Process::Rec(x, q) => {
                unguarded.push(x.clone());
                let ok = walk(q, unguarded);
                unguarded.pop();
                ok
            }
            Process::Commit => true,
        }
    }
    walk(p, &mut Vec::new())
}
