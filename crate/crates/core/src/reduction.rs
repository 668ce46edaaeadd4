//! Process-level semantics: action transitions `P --α-->σ Q`,
//! reconfiguration transitions `P --β--> Q`, reductions and barbs.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::syntax::{
    apply_substitution, canonical_names, eliminate_commits, free_transaction_names, par, running,
    top_level_commit_split, ActName, NameKind, NameSubstitution, Prefix, Process, TransName,
};

/// Nested unfoldings of unguarded recursion allowed while deriving a
/// single transition. Guarded recursion never reaches this.
const MAX_UNGUARDED_UNFOLD: usize = 4;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Scope {
    Plain,
    Trans(TransName),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ActionLabel {
    pub scope: Scope,
    pub prefix: Prefix,
}

impl ActionLabel {
    pub fn is_tau(&self) -> bool {
        self.prefix == Prefix::Tau
    }

    pub fn action(&self) -> Option<&ActName> {
        match &self.prefix {
            Prefix::Act(a) => Some(a),
            Prefix::Tau => None,
        }
    }
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.scope {
            Scope::Plain => write!(f, "{}", self.prefix),
            Scope::Trans(k) => write!(f, "{k}({})", self.prefix),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ActionTransition {
    pub label: ActionLabel,
    /// Empty for plain steps.
    pub sigma: NameSubstitution,
    pub target: Process,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Reconfig {
    Co(TransName),
    Ab(TransName),
    New(TransName),
}

impl Reconfig {
    pub fn name(&self) -> &TransName {
        match self {
            Reconfig::Co(k) | Reconfig::Ab(k) | Reconfig::New(k) => k,
        }
    }
}

impl fmt::Display for Reconfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reconfig::Co(k) => write!(f, "co {k}"),
            Reconfig::Ab(k) => write!(f, "ab {k}"),
            Reconfig::New(k) => write!(f, "new {k}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ReconfigTransition {
    pub label: Reconfig,
    pub target: Process,
}

/// The smallest generated name of `kind` not occurring in `p`.
pub fn fresh_name(p: &Process, kind: NameKind) -> TransName {
    TransName::fresh(kind, &free_transaction_names(p))
}

fn empty_sigma(fresh: &TransName) -> NameSubstitution {
    NameSubstitution::new(BTreeSet::new(), fresh.clone())
}

/// All action transitions of `p`. Every rule needing a fresh transaction
/// name uses `fresh`, which must not occur in `p`.
pub fn enumerate_action_steps(p: &Process, fresh: &TransName) -> Vec<ActionTransition> {
    debug_assert!(!free_transaction_names(p).contains(fresh));
    let mut out = Vec::new();
    action_steps(p, fresh, 0, &mut out);
    out.sort();
    out.dedup();
    out
}

fn action_steps(p: &Process, m: &TransName, unfolds: usize, out: &mut Vec<ActionTransition>) {
    match p {
        Process::Sum(bs) => {
            for (mu, q) in bs {
                out.push(ActionTransition {
                    label: ActionLabel {
                        scope: Scope::Plain,
                        prefix: mu.clone(),
                    },
                    sigma: empty_sigma(m),
                    target: q.clone(),
                });
                if let Prefix::Act(_) = mu {
                    out.push(ActionTransition {
                        label: ActionLabel {
                            scope: Scope::Trans(m.clone()),
                            prefix: mu.clone(),
                        },
                        sigma: empty_sigma(m),
                        target: running(par(q.clone(), Process::Commit), m.clone(), p.clone()),
                    });
                }
            }
        }
        Process::Par(a, b) => {
            let mut left = Vec::new();
            let mut right = Vec::new();
            action_steps(a, m, unfolds, &mut left);
            action_steps(b, m, unfolds, &mut right);
            for l in &left {
                let Some(x) = l.label.action() else { continue };
                for r in &right {
                    if r.label.action() != Some(&x.co()) {
                        continue;
                    }
                    match (&l.label.scope, &r.label.scope) {
                        (Scope::Plain, Scope::Plain) => out.push(ActionTransition {
                            label: ActionLabel {
                                scope: Scope::Plain,
                                prefix: Prefix::Tau,
                            },
                            sigma: empty_sigma(m),
                            target: par(l.target.clone(), r.target.clone()),
                        }),
                        (Scope::Trans(_), Scope::Trans(_)) => {
                            let domain = l.sigma.domain.union(&r.sigma.domain).cloned().collect();
                            out.push(ActionTransition {
                                label: ActionLabel {
                                    scope: Scope::Trans(m.clone()),
                                    prefix: Prefix::Tau,
                                },
                                sigma: NameSubstitution::new(domain, m.clone()),
                                target: par(
                                    apply_substitution(&l.target, &r.sigma),
                                    apply_substitution(&r.target, &l.sigma),
                                ),
                            });
                        }
                        _ => {}
                    }
                }
            }
            for t in left {
                let other = apply_substitution(b, &t.sigma);
                out.push(ActionTransition {
                    target: par(t.target, other),
                    ..t
                });
            }
            for t in right {
                let other = apply_substitution(a, &t.sigma);
                out.push(ActionTransition {
                    target: par(other, t.target),
                    ..t
                });
            }
        }
        Process::Restrict(x, q) => {
            let mut inner = Vec::new();
            action_steps(q, m, unfolds, &mut inner);
            for t in inner {
                if t.label.action().is_some_and(|a| a.name == *x) {
                    continue;
                }
                out.push(ActionTransition {
                    target: Process::Restrict(x.clone(), Box::new(t.target)),
                    ..t
                });
            }
        }
        Process::Rec(..) => {
            if unfolds < MAX_UNGUARDED_UNFOLD {
                action_steps(&p.unfold().unwrap(), m, unfolds + 1, out);
            }
        }
        Process::Running(d, l, alt) => {
            let mut inner = Vec::new();
            action_steps(d, m, 0, &mut inner);
            for t in inner {
                if t.label.scope != Scope::Plain {
                    continue;
                }
                out.push(ActionTransition {
                    label: ActionLabel {
                        scope: Scope::Trans(m.clone()),
                        prefix: t.label.prefix,
                    },
                    sigma: NameSubstitution::new([l.clone()].into(), m.clone()),
                    target: running(t.target, m.clone(), (**alt).clone()),
                });
            }
        }
        Process::Dormant(..) | Process::Var(_) | Process::Commit => {}
    }
}

/// All reconfiguration transitions of `p`; `new` steps activate with
/// `fresh`, which must not occur in `p`.
pub fn enumerate_reconfig_steps(p: &Process, fresh: &TransName) -> Vec<ReconfigTransition> {
    let mut out = Vec::new();
    for k in free_transaction_names(p) {
        if let Some(t) = commit_all(p, &k) {
            out.push(ReconfigTransition {
                label: Reconfig::Co(k.clone()),
                target: t,
            });
        }
        out.push(ReconfigTransition {
            label: Reconfig::Ab(k.clone()),
            target: abort_all(p, &k),
        });
    }
    let mut acts = Vec::new();
    activations(p, fresh, 0, &mut acts);
    out.extend(acts.into_iter().map(|target| ReconfigTransition {
        label: Reconfig::New(fresh.clone()),
        target,
    }));
    out.sort();
    out.dedup();
    out
}

/// `co k` across the whole term; `None` when some `k`-component has no
/// top-level commit.
fn commit_all(p: &Process, k: &TransName) -> Option<Process> {
    match p {
        Process::Running(d, l, _) if l == k => {
            top_level_commit_split(d)?;
            Some(eliminate_commits(d))
        }
        Process::Par(a, b) => Some(par(commit_all(a, k)?, commit_all(b, k)?)),
        Process::Restrict(x, q) => Some(Process::Restrict(x.clone(), Box::new(commit_all(q, k)?))),
        _ => Some(p.clone()),
    }
}

fn abort_all(p: &Process, k: &TransName) -> Process {
    match p {
        Process::Running(_, l, alt) if l == k => (**alt).clone(),
        Process::Par(a, b) => par(abort_all(a, k), abort_all(b, k)),
        Process::Restrict(x, q) => Process::Restrict(x.clone(), Box::new(abort_all(q, k))),
        _ => p.clone(),
    }
}

fn activations(p: &Process, m: &TransName, unfolds: usize, out: &mut Vec<Process>) {
    match p {
        Process::Dormant(d, a) => out.push(running((**d).clone(), m.clone(), (**a).clone())),
        Process::Par(a, b) => {
            let mut left = Vec::new();
            activations(a, m, unfolds, &mut left);
            out.extend(left.into_iter().map(|l| par(l, (**b).clone())));
            let mut right = Vec::new();
            activations(b, m, unfolds, &mut right);
            out.extend(right.into_iter().map(|r| par((**a).clone(), r)));
        }
        Process::Restrict(x, q) => {
            let mut inner = Vec::new();
            activations(q, m, unfolds, &mut inner);
            out.extend(
                inner
                    .into_iter()
                    .map(|t| Process::Restrict(x.clone(), Box::new(t))),
            );
        }
        Process::Rec(..) if unfolds < MAX_UNGUARDED_UNFOLD => {
            activations(&p.unfold().unwrap(), m, unfolds + 1, out)
        }
        _ => {}
    }
}

/// One-step reductions: plain `τ`, reconfigurations and `k(τ)` steps.
pub fn reduction_steps(p: &Process) -> Vec<Process> {
    let fresh = fresh_name(p, NameKind::Internal);
    let mut out: Vec<Process> = enumerate_action_steps(p, &fresh)
        .into_iter()
        .filter(|t| t.label.is_tau())
        .map(|t| t.target)
        .collect();
    out.extend(
        enumerate_reconfig_steps(p, &fresh)
            .into_iter()
            .map(|t| t.target),
    );
    out.sort();
    out.dedup();
    out
}

/// `p ≡ Q1 | ω.Q2`: an unguarded single-prefix component `ω.Q2`, looking
/// through `|`, restriction of other names and recursion unfolding.
pub fn has_barb(p: &Process, omega: &ActName) -> bool {
    barb(p, omega, 0)
}

fn barb(p: &Process, omega: &ActName, unfolds: usize) -> bool {
    match p {
        Process::Sum(bs) => bs.len() == 1 && bs[0].0 == Prefix::Act(omega.clone()),
        Process::Par(a, b) => barb(a, omega, unfolds) || barb(b, omega, unfolds),
        Process::Restrict(x, q) => *x != omega.name && barb(q, omega, unfolds),
        Process::Rec(..) if unfolds < MAX_UNGUARDED_UNFOLD => {
            barb(&p.unfold().unwrap(), omega, unfolds + 1)
        }
        _ => false,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict3 {
    Yes,
    No,
    Unknown,
}

/// `p ⇓ ω`: some reduct (up to renaming of transaction names) has the
/// barb. `Unknown` when `max_states` distinct states were explored
/// without finding one.
pub fn weak_barb(p: &Process, omega: &ActName, max_states: usize) -> Verdict3 {
    let start = canonical_names(p).0;
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(q) = queue.pop_front() {
        if has_barb(&q, omega) {
            return Verdict3::Yes;
        }
        for r in reduction_steps(&q) {
            let r = canonical_names(&r).0;
            if seen.contains(&r) {
                continue;
            }
            if seen.len() >= max_states {
                return Verdict3::Unknown;
            }
            seen.insert(r.clone());
            queue.push_back(r);
        }
    }
    Verdict3::No
}
