//! The standard, extended and commit-sensitive transition systems over
//! configurations, canonical forms up to renaming, and bounded weak
//! closure.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use crate::history::{
    Configuration, Entry, Equivalence, ExtConfiguration, ExtEntry, ExtHistory, History,
};
use crate::reduction::{enumerate_action_steps, enumerate_reconfig_steps, Reconfig, Scope};
use crate::syntax::{
    apply_permutation, free_transaction_names, prune_restrictions, ActName, NameKind, Permutation,
    Process, TransName,
};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, serde::Serialize)]
pub struct SearchBounds {
    /// Distinct states explored by a whole check or dump.
    pub max_states: usize,
    /// Distinct states in a single τ-closure.
    pub tau_bound: usize,
    /// Nesting depth of games and modal operators.
    pub depth: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_states: 10_000,
            tau_bound: 2_000,
            depth: 64,
        }
    }
}

/// Which rule produced a step.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, serde::Serialize)]
pub enum Rule {
    Tau,
    TransTau,
    New,
    Co,
    Ab,
    TransAct,
    Star,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Tau => "tau",
            Rule::TransTau => "k(tau)",
            Rule::New => "new",
            Rule::Co => "co",
            Rule::Ab => "ab",
            Rule::TransAct => "k(a)",
            Rule::Star => "star",
        };
        f.write_str(s)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum StdLabel {
    Tau,
    Trans(TransName),
}

impl fmt::Display for StdLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StdLabel::Tau => write!(f, "tau"),
            StdLabel::Trans(k) => write!(f, "{k}"),
        }
    }
}

/// Labels of the extended and commit-sensitive systems. `Co` only occurs
/// in the latter.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ExtLabel {
    Tau,
    Act(TransName, ActName),
    Co(BTreeSet<TransName>),
}

impl fmt::Display for ExtLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtLabel::Tau => write!(f, "tau"),
            ExtLabel::Act(k, a) => write!(f, "{k}({a})"),
            ExtLabel::Co(ks) => {
                write!(f, "co{{")?;
                for (i, k) in ks.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Step<S, L> {
    pub label: L,
    pub target: S,
    pub rule: Rule,
}

impl<S, L> Step<S, L> {
    /// Derivable without the degenerate rule.
    pub fn is_challenger(&self) -> bool {
        self.rule != Rule::Star
    }
}

/// A transition system over configurations. Steps that need a fresh
/// external name use the one supplied by the caller, which must not occur
/// in the state; fresh internal names are chosen per state.
pub trait Semantics {
    type State: Clone + Eq + Hash + Ord + fmt::Debug + fmt::Display;
    type Label: Clone + Eq + Hash + Ord + fmt::Debug + fmt::Display;

    fn steps(&self, s: &Self::State, fresh_ext: &TransName) -> Vec<Step<Self::State, Self::Label>>;
    /// A representative of the state up to renamings that preserve
    /// behaviour.
    fn canonical(&self, s: &Self::State) -> Self::State;
    fn names(&self, s: &Self::State) -> BTreeSet<TransName>;
    fn is_tau(&self, l: &Self::Label) -> bool;
}

fn fresh_avoiding(kind: NameKind, a: &BTreeSet<TransName>, b: &BTreeSet<TransName>) -> TransName {
    (1..)
        .map(|n| TransName::generated(kind, n))
        .find(|k| !a.contains(k) && !b.contains(k))
        .unwrap()
}

/// Smallest generated external name not in `names(s) ∪ avoid`.
pub fn fresh_external<S: Semantics>(
    sem: &S,
    s: &S::State,
    avoid: &BTreeSet<TransName>,
) -> TransName {
    fresh_avoiding(NameKind::External, &sem.names(s), avoid)
}

/// Process steps with `fresh_ext` for visible moves and a separate fresh
/// internal name for `k(τ)` and activation.
fn process_steps(
    p: &Process,
    taken: &BTreeSet<TransName>,
    fresh_ext: &TransName,
) -> (
    Vec<crate::reduction::ActionTransition>,
    Vec<crate::reduction::ReconfigTransition>,
    TransName,
) {
    let fresh_int = fresh_avoiding(NameKind::Internal, taken, &BTreeSet::new());
    let swap = Permutation::swap(fresh_ext.clone(), fresh_int.clone());
    let mut acts = enumerate_action_steps(p, fresh_ext);
    for t in &mut acts {
        if t.label.is_tau() && t.label.scope != Scope::Plain {
            t.label.scope = Scope::Trans(fresh_int.clone());
            t.sigma = t.sigma.permute(&swap);
            t.target = apply_permutation(&t.target, &swap);
        }
    }
    let recon = enumerate_reconfig_steps(p, &fresh_int);
    (acts, recon, fresh_int)
}

/// Standard transitions over plain configurations.
#[derive(Clone, Copy, Debug, Default)]
pub struct StdLts;

impl Semantics for StdLts {
    type State = Configuration;
    type Label = StdLabel;

    fn steps(&self, c: &Configuration, k: &TransName) -> Vec<Step<Configuration, StdLabel>> {
        let taken = self.names(c);
        debug_assert!(!taken.contains(k));
        let (acts, recon, _) = process_steps(&c.process, &taken, k);
        let mut out = Vec::new();
        for t in acts {
            match (&t.label.scope, t.label.is_tau()) {
                (Scope::Plain, true) => out.push(Step {
                    label: StdLabel::Tau,
                    target: Configuration {
                        history: c.history.clone(),
                        process: t.target,
                    },
                    rule: Rule::Tau,
                }),
                (Scope::Plain, false) => {}
                (Scope::Trans(_), true) => out.push(Step {
                    label: StdLabel::Tau,
                    target: Configuration {
                        history: c.history.substitute(&t.sigma),
                        process: t.target,
                    },
                    rule: Rule::TransTau,
                }),
                (Scope::Trans(m), false) => {
                    let a = t.label.action().unwrap().clone();
                    out.push(Step {
                        label: StdLabel::Trans(m.clone()),
                        target: Configuration {
                            history: c
                                .history
                                .substitute(&t.sigma)
                                .with(Entry::Tent(m.clone(), a)),
                            process: t.target,
                        },
                        rule: Rule::TransAct,
                    });
                }
            }
        }
        for r in recon {
            let (history, rule) = match &r.label {
                Reconfig::Co(l) => (c.history.commit(l), Rule::Co),
                Reconfig::Ab(l) => (c.history.abort(l), Rule::Ab),
                Reconfig::New(_) => (c.history.clone(), Rule::New),
            };
            out.push(Step {
                label: StdLabel::Tau,
                target: Configuration {
                    history,
                    process: r.target,
                },
                rule,
            });
        }
        out.push(Step {
            label: StdLabel::Trans(k.clone()),
            target: Configuration {
                history: c.history.with(Entry::TentStar(k.clone())),
                process: c.process.clone(),
            },
            rule: Rule::Star,
        });
        out
    }

    fn canonical(&self, c: &Configuration) -> Configuration {
        canonical_std(c).0
    }

    fn names(&self, c: &Configuration) -> BTreeSet<TransName> {
        c.names()
    }

    fn is_tau(&self, l: &StdLabel) -> bool {
        *l == StdLabel::Tau
    }
}

/// Extended transitions, or their commit-sensitive variant.
/// Degenerate moves range over `alphabet`.
#[derive(Clone, Debug)]
pub struct ExtLts {
    pub alphabet: BTreeSet<ActName>,
    pub commit_sensitive: bool,
}

impl ExtLts {
    pub fn extended(alphabet: BTreeSet<ActName>) -> Self {
        ExtLts {
            alphabet,
            commit_sensitive: false,
        }
    }

    pub fn commit_sensitive(alphabet: BTreeSet<ActName>) -> Self {
        ExtLts {
            alphabet,
            commit_sensitive: true,
        }
    }
}

impl Semantics for ExtLts {
    type State = ExtConfiguration;
    type Label = ExtLabel;

    fn steps(&self, c: &ExtConfiguration, k: &TransName) -> Vec<Step<ExtConfiguration, ExtLabel>> {
        let taken = self.names(c);
        debug_assert!(k.is_external() && !taken.contains(k));
        let (acts, recon, _) = process_steps(&c.process, &taken, k);
        let d = &c.history;
        let mut out = Vec::new();
        for t in acts {
            match (&t.label.scope, t.label.is_tau()) {
                (Scope::Plain, true) => out.push(Step {
                    label: ExtLabel::Tau,
                    target: ExtConfiguration {
                        history: d.clone(),
                        process: t.target,
                    },
                    rule: Rule::Tau,
                }),
                (Scope::Plain, false) => {}
                (Scope::Trans(_), true) => out.push(Step {
                    label: ExtLabel::Tau,
                    target: ExtConfiguration {
                        history: ExtHistory {
                            e: d.e.extend(&t.sigma).expect("fresh internal name"),
                            h: d.h.clone(),
                        },
                        process: t.target,
                    },
                    rule: Rule::TransTau,
                }),
                (Scope::Trans(m), false) => {
                    let a = t.label.action().unwrap().clone();
                    let mut h = ExtHistory {
                        e: d.e.extend(&t.sigma).expect("fresh external name"),
                        h: d.h.clone(),
                    };
                    h.push(ExtEntry::Tent(m.clone(), a.clone()));
                    out.push(Step {
                        label: ExtLabel::Act(m.clone(), a),
                        target: ExtConfiguration {
                            history: h,
                            process: t.target,
                        },
                        rule: Rule::TransAct,
                    });
                }
            }
        }
        for r in recon {
            let (history, label, rule) = match &r.label {
                Reconfig::Co(l) => {
                    let ext = d.e.external_class(l);
                    let label = if self.commit_sensitive && !ext.is_empty() {
                        ExtLabel::Co(ext)
                    } else {
                        ExtLabel::Tau
                    };
                    (d.commit(l), label, Rule::Co)
                }
                Reconfig::Ab(l) => (d.abort(l), ExtLabel::Tau, Rule::Ab),
                Reconfig::New(_) => (d.clone(), ExtLabel::Tau, Rule::New),
            };
            out.push(Step {
                label,
                target: ExtConfiguration {
                    history,
                    process: r.target,
                },
                rule,
            });
        }
        for a in &self.alphabet {
            let mut h = ExtHistory {
                e: d.e.insert(k.clone()),
                h: d.h.clone(),
            };
            h.push(ExtEntry::Ab(k.clone()));
            out.push(Step {
                label: ExtLabel::Act(k.clone(), a.clone()),
                target: ExtConfiguration {
                    history: h,
                    process: c.process.clone(),
                },
                rule: Rule::Star,
            });
        }
        out
    }

    fn canonical(&self, c: &ExtConfiguration) -> ExtConfiguration {
        canonical_ext(c).0
    }

    fn names(&self, c: &ExtConfiguration) -> BTreeSet<TransName> {
        c.names()
    }

    fn is_tau(&self, l: &ExtLabel) -> bool {
        *l == ExtLabel::Tau
    }
}

/// Renaming map built in first-occurrence order, skipping `reserved`
/// targets.
struct Renamer<'a> {
    map: BTreeMap<TransName, TransName>,
    counts: [usize; 2],
    reserved: &'a BTreeSet<TransName>,
}

impl<'a> Renamer<'a> {
    fn new(reserved: &'a BTreeSet<TransName>) -> Self {
        Renamer {
            map: BTreeMap::new(),
            counts: [0, 0],
            reserved,
        }
    }

    fn visit(&mut self, k: &TransName) {
        if self.map.contains_key(k) {
            return;
        }
        let slot = &mut self.counts[(k.kind == NameKind::External) as usize];
        let target = loop {
            *slot += 1;
            let t = TransName::generated(k.kind, *slot);
            if !self.reserved.contains(&t) {
                break t;
            }
        };
        self.map.insert(k.clone(), target);
    }

    fn fix(&mut self, k: &TransName) {
        self.map.insert(k.clone(), k.clone());
    }

    fn finish(self) -> Permutation {
        Permutation::from_injection(self.map).expect("renaming is injective")
    }
}

/// Plain configuration up to renaming: `k(*)` entries become `ab`, dead
/// restrictions are dropped, then all names are renamed by first
/// occurrence over the history and the process.
pub fn canonical_std(c: &Configuration) -> (Configuration, Permutation) {
    let history = History {
        entries: c
            .history
            .entries
            .iter()
            .map(|(i, e)| match e {
                Entry::TentStar(_) => (*i, Entry::Ab),
                e => (*i, e.clone()),
            })
            .collect(),
    };
    let reserved = BTreeSet::new();
    let mut r = Renamer::new(&reserved);
    for e in history.entries.values() {
        if let Some(k) = e.name() {
            r.visit(k);
        }
    }
    c.process.for_each_name(&mut |k| r.visit(k));
    let pi = r.finish();
    let out = Configuration {
        history,
        process: prune_restrictions(&c.process),
    }
    .permute(&pi);
    (out, pi)
}

/// Drops aborted history entries together with their equivalence
/// classes, restricts `E` to names still in the process or the history,
/// discards internal singleton classes, renumbers indices and drops dead
/// restrictions.
pub fn collect_garbage(c: &ExtConfiguration) -> ExtConfiguration {
    let d = &c.history;
    let aborted = d.hasab();
    let dead: BTreeSet<TransName> = aborted.iter().flat_map(|k| d.e.closure_of(k)).collect();
    let entries: Vec<ExtEntry> =
        d.h.values()
            .filter(|en| !dead.contains(en.name()))
            .cloned()
            .collect();
    let trn: BTreeSet<TransName> = entries.iter().map(|e| e.name().clone()).collect();
    let ftn = free_transaction_names(&c.process);
    let e =
        d.e.restrict(|k| !dead.contains(k) && (trn.contains(k) || ftn.contains(k)));
    let e = Equivalence::from_classes(
        e.classes()
            .filter(|cl| cl.len() > 1 || cl.iter().any(|k| k.is_external()))
            .cloned(),
    );
    let h = entries
        .into_iter()
        .enumerate()
        .map(|(i, en)| (i as u32 + 1, en))
        .collect();
    ExtConfiguration {
        history: ExtHistory { e, h },
        process: prune_restrictions(&c.process),
    }
}

fn rename_rest(c: &ExtConfiguration, r: &mut Renamer) {
    c.process.for_each_name(&mut |k| r.visit(k));
    for cl in c.history.e.classes() {
        for k in cl {
            r.visit(k);
        }
    }
}

/// Extended configuration up to renaming: garbage collected, history
/// names kept, all other names renamed by first occurrence.
pub fn canonical_ext(c: &ExtConfiguration) -> (ExtConfiguration, Permutation) {
    let g = collect_garbage(c);
    let fixed = g.history.trn();
    let mut r = Renamer::new(&fixed);
    for k in &fixed {
        r.fix(k);
    }
    rename_rest(&g, &mut r);
    let pi = r.finish();
    (g.permute(&pi), pi)
}

/// Canonical form of a pair for the extended games: history names are
/// renamed jointly in index order over the first history and then the
/// second; all other names per side.
pub fn canonical_ext_pair(
    c1: &ExtConfiguration,
    c2: &ExtConfiguration,
) -> (ExtConfiguration, ExtConfiguration) {
    let (a, b, _) = canonical_ext_pair_renaming(c1, c2);
    (a, b)
}

/// [`canonical_ext_pair`] together with the joint renaming of the history
/// names that survive garbage collection.
pub fn canonical_ext_pair_renaming(
    c1: &ExtConfiguration,
    c2: &ExtConfiguration,
) -> (
    ExtConfiguration,
    ExtConfiguration,
    BTreeMap<TransName, TransName>,
) {
    let (g1, g2) = (collect_garbage(c1), collect_garbage(c2));
    let mut joint = BTreeMap::new();
    for k in g1
        .history
        .h
        .values()
        .chain(g2.history.h.values())
        .map(|e| e.name())
    {
        if !joint.contains_key(k) {
            let n = joint.len() + 1;
            joint.insert(k.clone(), TransName::generated(NameKind::External, n));
        }
    }
    let reserved: BTreeSet<TransName> = joint.values().cloned().collect();
    let side = |g: &ExtConfiguration| {
        let mut r = Renamer::new(&reserved);
        for k in g.history.trn() {
            r.map.insert(k.clone(), joint[&k].clone());
        }
        rename_rest(g, &mut r);
        g.permute(&r.finish())
    };
    let (a, b) = (side(&g1), side(&g2));
    (a, b, joint)
}

/// States reachable by `τ` steps, as canonical forms, including `s`
/// itself. The flag is false when `bound` distinct states were reached
/// with unexplored successors left.
pub fn tau_closure<S: Semantics>(sem: &S, s: &S::State, bound: usize) -> (Vec<S::State>, bool) {
    let start = sem.canonical(s);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        let k = fresh_external(sem, &x, &BTreeSet::new());
        for st in sem.steps(&x, &k) {
            if !sem.is_tau(&st.label) {
                continue;
            }
            let y = sem.canonical(&st.target);
            if seen.contains(&y) {
                continue;
            }
            if seen.len() >= bound {
                return (order, false);
            }
            seen.insert(y.clone());
            order.push(y.clone());
            queue.push_back(y);
        }
    }
    (order, true)
}

/// Weak successors `s ⇒ζ⇒` for a visible `label`, or `s ⇒` when `label`
/// is `None`. Any fresh name in `label` must not occur in `s`.
pub fn weak_successors<S: Semantics>(
    sem: &S,
    s: &S::State,
    label: Option<&S::Label>,
    fresh_ext: &TransName,
    bound: usize,
) -> (Vec<S::State>, bool) {
    let (pre, mut exhaustive) = tau_closure(sem, s, bound);
    let Some(label) = label else {
        return (pre, exhaustive);
    };
    let mut out = BTreeSet::new();
    for y in &pre {
        for st in sem.steps(y, fresh_ext) {
            if &st.label != label {
                continue;
            }
            let (post, ex) = tau_closure(sem, &st.target, bound);
            exhaustive &= ex;
            out.extend(post);
        }
    }
    (out.into_iter().collect(), exhaustive)
}

/// A bounded dump of the reachable canonical states.
#[derive(Clone, Debug)]
pub struct Explored<S, L> {
    pub states: Vec<S>,
    pub edges: Vec<Vec<(L, Rule, usize)>>,
    pub exhaustive: bool,
}

pub fn explore<S: Semantics>(
    sem: &S,
    init: &S::State,
    max_states: usize,
) -> Explored<S::State, S::Label> {
    explore_bounded(sem, init, max_states, usize::MAX)
}

/// As [`explore`], leaving states more than `depth` steps from the start
/// unexpanded.
pub fn explore_bounded<S: Semantics>(
    sem: &S,
    init: &S::State,
    max_states: usize,
    depth: usize,
) -> Explored<S::State, S::Label> {
    let start = sem.canonical(init);
    let mut ids = HashMap::from([(start.clone(), 0usize)]);
    let mut states = vec![start];
    let mut dist = vec![0usize];
    let mut edges = Vec::new();
    let mut exhaustive = true;
    let mut i = 0;
    while i < states.len() {
        let x = states[i].clone();
        if dist[i] >= depth {
            exhaustive = false;
            edges.push(Vec::new());
            i += 1;
            continue;
        }
        let k = fresh_external(sem, &x, &BTreeSet::new());
        let mut out = Vec::new();
        for st in sem.steps(&x, &k) {
            let y = sem.canonical(&st.target);
            let id = match ids.get(&y) {
                Some(id) => *id,
                None if states.len() < max_states => {
                    ids.insert(y.clone(), states.len());
                    states.push(y);
                    dist.push(dist[i] + 1);
                    states.len() - 1
                }
                None => {
                    exhaustive = false;
                    continue;
                }
            };
            out.push((st.label, st.rule, id));
        }
        out.sort();
        out.dedup();
        edges.push(out);
        i += 1;
    }
    Explored {
        states,
        edges,
        exhaustive,
    }
}

/// Free actions of a process, the default alphabet for degenerate moves.
pub fn alphabet_of<'a>(ps: impl IntoIterator<Item = &'a Process>) -> BTreeSet<ActName> {
    ps.into_iter().flat_map(|p| p.free_actions()).collect()
}
