//! A direct reading of the process transition rules, kept apart from the
//! library enumerators so the two can be compared. Every rule is tried
//! against every judgement derived for the immediate subterms.

use std::collections::BTreeSet;

use tccs::syntax::{ActName, Prefix, Process, TransName};

/// `None` is the plain scope.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Judgement {
    pub scope: Option<TransName>,
    pub prefix: Prefix,
    pub renamed: BTreeSet<TransName>,
    pub fresh: TransName,
    pub target: Process,
}

impl Judgement {
    /// `(label text, σ domain, target)`, comparable with the library's
    /// transitions.
    pub fn key(&self) -> (String, BTreeSet<TransName>, Process) {
        let label = match &self.scope {
            None => self.prefix.to_string(),
            Some(k) => format!("{k}({})", self.prefix),
        };
        (label, self.renamed.clone(), self.target.clone())
    }
}

fn rename(p: &Process, from: &BTreeSet<TransName>, to: &TransName) -> Process {
    if from.is_empty() {
        return p.clone();
    }
    p.map_names(&|k| {
        if from.contains(k) {
            to.clone()
        } else {
            k.clone()
        }
    })
}

fn bx(p: Process) -> Box<Process> {
    Box::new(p)
}

fn co_action(a: &ActName) -> ActName {
    ActName {
        name: a.name.clone(),
        output: !a.output,
    }
}

fn complementary(x: &Prefix, y: &Prefix) -> bool {
    match (x, y) {
        (Prefix::Act(a), Prefix::Act(b)) => co_action(a) == *b,
        _ => false,
    }
}

/// All `P --α-->σ Q` for a term with guarded recursion.
pub fn actions(p: &Process, m: &TransName) -> Vec<Judgement> {
    let mut out = derive(p, m);
    out.sort();
    out.dedup();
    out
}

fn derive(p: &Process, m: &TransName) -> Vec<Judgement> {
    let mut out = Vec::new();
    match p {
        Process::Sum(branches) => {
            for (mu, q) in branches {
                out.push(Judgement {
                    scope: None,
                    prefix: mu.clone(),
                    renamed: BTreeSet::new(),
                    fresh: m.clone(),
                    target: q.clone(),
                });
                if mu != &Prefix::Tau {
                    let body = Process::Par(bx(q.clone()), bx(Process::Commit));
                    out.push(Judgement {
                        scope: Some(m.clone()),
                        prefix: mu.clone(),
                        renamed: BTreeSet::new(),
                        fresh: m.clone(),
                        target: Process::Running(bx(body), m.clone(), bx(p.clone())),
                    });
                }
            }
        }
        Process::Par(l, r) => {
            let left = derive(l, m);
            let right = derive(r, m);
            for x in &left {
                for y in &right {
                    if !complementary(&x.prefix, &y.prefix) {
                        continue;
                    }
                    match (&x.scope, &y.scope) {
                        (None, None) => out.push(Judgement {
                            scope: None,
                            prefix: Prefix::Tau,
                            renamed: BTreeSet::new(),
                            fresh: m.clone(),
                            target: Process::Par(bx(x.target.clone()), bx(y.target.clone())),
                        }),
                        (Some(_), Some(_)) => out.push(Judgement {
                            scope: Some(m.clone()),
                            prefix: Prefix::Tau,
                            renamed: &x.renamed | &y.renamed,
                            fresh: m.clone(),
                            target: Process::Par(
                                bx(rename(&x.target, &y.renamed, m)),
                                bx(rename(&y.target, &x.renamed, m)),
                            ),
                        }),
                        _ => {}
                    }
                }
            }
            for j in left {
                let other = rename(r, &j.renamed, &j.fresh);
                out.push(Judgement {
                    target: Process::Par(bx(j.target), bx(other)),
                    ..j
                });
            }
            for j in right {
                let other = rename(l, &j.renamed, &j.fresh);
                out.push(Judgement {
                    target: Process::Par(bx(other), bx(j.target)),
                    ..j
                });
            }
        }
        Process::Restrict(a, q) => {
            for j in derive(q, m) {
                if let Prefix::Act(b) = &j.prefix {
                    if b.name == *a {
                        continue;
                    }
                }
                out.push(Judgement {
                    target: Process::Restrict(a.clone(), bx(j.target)),
                    ..j
                });
            }
        }
        Process::Rec(..) => out = derive(&p.unfold().unwrap(), m),
        Process::Running(d, l, alt) => {
            for j in derive(d, m) {
                if j.scope.is_some() {
                    continue;
                }
                out.push(Judgement {
                    scope: Some(m.clone()),
                    prefix: j.prefix,
                    renamed: BTreeSet::from([l.clone()]),
                    fresh: m.clone(),
                    target: Process::Running(bx(j.target), m.clone(), alt.clone()),
                });
            }
        }
        Process::Dormant(..) | Process::Var(_) | Process::Commit => {}
    }
    out
}

/// `co k`, `ab k`, `new k` as `(label text, target)`.
pub fn reconfigurations(p: &Process, fresh: &TransName) -> Vec<(String, Process)> {
    let mut out = Vec::new();
    let mut names = BTreeSet::new();
    p.for_each_name(&mut |k| {
        names.insert(k.clone());
    });
    for k in &names {
        if let Some(q) = commit(p, k) {
            out.push((format!("co {k}"), q));
        }
        out.push((format!("ab {k}"), abort(p, k)));
    }
    for q in activate(p, fresh) {
        out.push((format!("new {fresh}"), q));
    }
    out.sort();
    out.dedup();
    out
}

fn mentions(p: &Process, k: &TransName) -> bool {
    let mut found = false;
    p.for_each_name(&mut |n| found |= n == k);
    found
}

/// Commit broadcast: every component named `k` must hold a top-level
/// `co`, the others are left alone.
fn commit(p: &Process, k: &TransName) -> Option<Process> {
    if !mentions(p, k) {
        return Some(p.clone());
    }
    match p {
        Process::Running(d, l, _) if l == k => has_top_commit(d).then(|| drop_commits(d)),
        Process::Par(a, b) => Some(Process::Par(bx(commit(a, k)?), bx(commit(b, k)?))),
        Process::Restrict(x, q) => Some(Process::Restrict(x.clone(), bx(commit(q, k)?))),
        _ => None,
    }
}

fn has_top_commit(p: &Process) -> bool {
    match p {
        Process::Commit => true,
        Process::Par(a, b) => has_top_commit(a) || has_top_commit(b),
        Process::Restrict(_, q) => has_top_commit(q),
        _ => false,
    }
}

/// The deterministic commit elimination relation.
fn drop_commits(p: &Process) -> Process {
    match p {
        Process::Commit => Process::Sum(Vec::new()),
        Process::Par(a, b) => Process::Par(bx(drop_commits(a)), bx(drop_commits(b))),
        Process::Restrict(x, q) => Process::Restrict(x.clone(), bx(drop_commits(q))),
        Process::Running(d, l, a) => {
            Process::Running(bx(drop_commits(d)), l.clone(), bx(drop_commits(a)))
        }
        _ => p.clone(),
    }
}

fn abort(p: &Process, k: &TransName) -> Process {
    if !mentions(p, k) {
        return p.clone();
    }
    match p {
        Process::Running(_, l, alt) if l == k => (**alt).clone(),
        Process::Par(a, b) => Process::Par(bx(abort(a, k)), bx(abort(b, k))),
        Process::Restrict(x, q) => Process::Restrict(x.clone(), bx(abort(q, k))),
        _ => p.clone(),
    }
}

fn activate(p: &Process, k: &TransName) -> Vec<Process> {
    match p {
        Process::Dormant(d, a) => vec![Process::Running(d.clone(), k.clone(), a.clone())],
        Process::Par(a, b) => {
            let mut out: Vec<Process> = activate(a, k)
                .into_iter()
                .map(|x| Process::Par(bx(x), b.clone()))
                .collect();
            out.extend(
                activate(b, k)
                    .into_iter()
                    .map(|y| Process::Par(a.clone(), bx(y))),
            );
            out
        }
        Process::Restrict(x, q) => activate(q, k)
            .into_iter()
            .map(|y| Process::Restrict(x.clone(), bx(y)))
            .collect(),
        Process::Rec(..) => activate(&p.unfold().unwrap(), k),
        _ => Vec::new(),
    }
}
