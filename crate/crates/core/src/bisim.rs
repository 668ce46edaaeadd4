//! Bounded checkers for the four weak bisimulations, verification of
//! candidate relations and extraction of distinguishing formulas.
//!
//! A check explores the graph of canonical configuration pairs reachable
//! from the input pair and computes two greatest fixpoints over it. In the
//! pessimistic one every pair cut off by a bound is assumed unrelated, so
//! a surviving root proves bisimilarity. In the optimistic one such pairs
//! are assumed related and moves whose responses were truncated are
//! assumed matched, so a failing root proves the converse.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::rc::Rc;
use std::sync::Arc;

use crate::history::{
    commit_consistent, consistent, eq_holds, Configuration, Entry, ExtConfiguration, History,
};
use crate::logic::{Formula, Value};
use crate::lts::{
    canonical_ext, canonical_ext_pair_renaming, canonical_std, tau_closure, ExtLabel, ExtLts, Rule,
    SearchBounds, Semantics, StdLabel, StdLts,
};
use crate::syntax::{ActName, NameKind, TransName};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, serde::Serialize)]
pub enum BisimKind {
    Standard,
    Hasco,
    Eq,
    Canco,
}

impl BisimKind {
    pub const ALL: [BisimKind; 4] = [
        BisimKind::Standard,
        BisimKind::Hasco,
        BisimKind::Eq,
        BisimKind::Canco,
    ];

    pub fn logic(self) -> Option<crate::logic::Logic> {
        use crate::logic::Logic;
        match self {
            BisimKind::Standard => None,
            BisimKind::Hasco => Some(Logic::Hasco),
            BisimKind::Eq => Some(Logic::Eq),
            BisimKind::Canco => Some(Logic::Canco),
        }
    }
}

impl fmt::Display for BisimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BisimKind::Standard => "standard",
            BisimKind::Hasco => "hasco",
            BisimKind::Eq => "eq",
            BisimKind::Canco => "canco",
        })
    }
}

/// A configuration of either kind.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Config {
    Plain(Configuration),
    Ext(ExtConfiguration),
}

impl Config {
    /// The initial configuration of `p` suitable for `kind`.
    pub fn initial(kind: BisimKind, p: crate::syntax::Process) -> Config {
        match kind {
            BisimKind::Standard => Config::Plain(Configuration::initial(p)),
            _ => Config::Ext(ExtConfiguration::initial(p)),
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Config::Plain(c) => c.fmt(f),
            Config::Ext(c) => c.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BisimError {
    #[error("the {0} bisimulation relates {1} configurations")]
    KindMismatch(BisimKind, &'static str),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, serde::Serialize)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// The label of a challenger move.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Move {
    Tau,
    Trans(TransName),
    Act(TransName, ActName),
    Co(BTreeSet<TransName>),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Tau => write!(f, "tau"),
            Move::Trans(k) => write!(f, "{k}"),
            Move::Act(k, a) => write!(f, "{k}({a})"),
            Move::Co(ks) => ExtLabel::Co(ks.clone()).fmt(f),
        }
    }
}

/// Why a pair violates the consistency clause.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Discrepancy {
    /// Plain histories differ in domain or committed actions.
    History,
    /// `k` is committed on exactly one side; the flag says whether on the
    /// left.
    Hasco(TransName, bool),
    /// `k =co l` holds on exactly one side.
    EqCo(TransName, TransName, bool),
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Discrepancy::History => write!(f, "histories are not consistent"),
            Discrepancy::Hasco(k, left) => write!(
                f,
                "{k} committed only on the {}",
                if *left { Side::Left } else { Side::Right }
            ),
            Discrepancy::EqCo(k, l, left) => write!(
                f,
                "{k} =co {l} holds only on the {}",
                if *left { Side::Left } else { Side::Right }
            ),
        }
    }
}

/// A refutation: the failed predicate at the root, or a challenger move
/// all of whose responses lead to refuted pairs.
#[derive(Clone, Debug)]
pub struct GameTree {
    pub left: String,
    pub right: String,
    pub reason: Refutation,
}

#[derive(Clone, Debug)]
pub enum Refutation {
    Inconsistent(Discrepancy),
    Unmatched {
        side: Side,
        label: Move,
        target: String,
        responses: Vec<GameTree>,
    },
    /// Omitted below the printing budget.
    Elided,
}

impl GameTree {
    fn write(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        writeln!(f, "{pad}{}  ~  {}", self.left, self.right)?;
        match &self.reason {
            Refutation::Inconsistent(d) => writeln!(f, "{pad}  fails: {d}"),
            Refutation::Elided => writeln!(f, "{pad}  ..."),
            Refutation::Unmatched {
                side,
                label,
                target,
                responses,
            } => {
                writeln!(
                    f,
                    "{pad}  {side} plays {label} to {target}; {} response(s) fail",
                    responses.len()
                )?;
                for r in responses {
                    r.write(f, indent + 2)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for GameTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    /// The witness is a bisimulation up to the identity, which it
    /// omits.
    Bisimilar {
        witness: Vec<(Config, Config)>,
    },
    NotBisimilar {
        tree: GameTree,
        formula: Option<Formula>,
    },
    Unknown {
        report: String,
    },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Bisimilar { .. } => "bisimilar",
            Verdict::NotBisimilar { .. } => "not-bisimilar",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Verdict::Bisimilar { .. } => Some(true),
            Verdict::NotBisimilar { .. } => Some(false),
            Verdict::Unknown { .. } => None,
        }
    }
}

/// A failure of [`verify_relation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub left: String,
    pub right: String,
    pub clause: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}  ~  {}: {}", self.left, self.right, self.clause)
    }
}

struct Challenge<S> {
    label: Move,
    target: S,
    responses: Vec<S>,
    complete: bool,
}

type Renaming = BTreeMap<TransName, TransName>;
type Closure<S> = Rc<(Vec<S>, bool)>;

/// The kind-specific parts of a game.
trait Arena {
    type S: Clone + Eq + Hash + Ord + fmt::Debug + fmt::Display;

    /// Canonical pair together with the renaming applied to history
    /// names.
    fn normalize(&self, a: &Self::S, b: &Self::S) -> (Self::S, Self::S, Renaming);
    fn consistency(&self, a: &Self::S, b: &Self::S) -> Result<(), Discrepancy>;
    fn fresh(&self, a: &Self::S, b: &Self::S) -> TransName;
    /// Challenger moves of `from` with their responses from `other`. The
    /// flag is false when the move set itself was truncated.
    fn challenges(
        &mut self,
        from: &Self::S,
        other: &Self::S,
        k: &TransName,
    ) -> (Vec<Challenge<Self::S>>, bool);
    fn wrap(s: Self::S) -> Config;
}

/// Caching weak closure over one transition system.
struct Weak<L: Semantics> {
    sem: L,
    tau_bound: usize,
    closures: HashMap<L::State, Closure<L::State>>,
    visible: HashMap<(L::State, L::Label), Closure<L::State>>,
}

impl<L: Semantics> Weak<L> {
    fn new(sem: L, tau_bound: usize) -> Self {
        Weak {
            sem,
            tau_bound,
            closures: HashMap::new(),
            visible: HashMap::new(),
        }
    }

    fn canonical(&self, s: &L::State) -> L::State {
        self.sem.canonical(s)
    }

    /// `s` must be canonical.
    fn closure(&mut self, s: &L::State) -> Closure<L::State> {
        if let Some(c) = self.closures.get(s) {
            return c.clone();
        }
        let c = Rc::new(tau_closure(&self.sem, s, self.tau_bound));
        self.closures.insert(s.clone(), c.clone());
        c
    }

    fn weak(&mut self, s: &L::State, label: &L::Label, k: &TransName) -> Closure<L::State> {
        if self.sem.is_tau(label) {
            return self.closure(s);
        }
        let key = (s.clone(), label.clone());
        if let Some(c) = self.visible.get(&key) {
            return c.clone();
        }
        let pre = self.closure(s);
        let mut complete = pre.1;
        let mut out = BTreeSet::new();
        for y in &pre.0 {
            for st in self.sem.steps(y, k) {
                if &st.label == label {
                    let t = self.canonical(&st.target);
                    let post = self.closure(&t);
                    complete &= post.1;
                    out.extend(post.0.iter().cloned());
                }
            }
        }
        let c = Rc::new((out.into_iter().collect(), complete));
        self.visible.insert(key, c.clone());
        c
    }
}

struct StdArena {
    weak: Weak<StdLts>,
}

/// Drops the indices at which both histories hold final, mutually
/// consistent entries. Such entries never change again and cannot affect
/// later consistency checks.
fn settle(h1: &mut History, h2: &mut History) {
    if !h1.entries.keys().eq(h2.entries.keys()) {
        return;
    }
    let settled = |e1: &Entry, e2: &Entry| match (e1, e2) {
        (Entry::Act(a), Entry::Act(b)) => a == b,
        (Entry::Star | Entry::Ab, Entry::Star | Entry::Ab) => true,
        _ => false,
    };
    let keep: Vec<u32> = h1
        .entries
        .iter()
        .filter(|(i, e1)| !settled(e1, &h2.entries[*i]))
        .map(|(i, _)| *i)
        .collect();
    if keep.len() == h1.entries.len() {
        return;
    }
    for h in [h1, h2] {
        h.entries = keep
            .iter()
            .zip(1..)
            .map(|(i, n)| (n, h.entries[i].clone()))
            .collect();
    }
}

impl Arena for StdArena {
    type S = Configuration;

    fn normalize(
        &self,
        a: &Configuration,
        b: &Configuration,
    ) -> (Configuration, Configuration, Renaming) {
        let (mut a, mut b) = (canonical_std(a).0, canonical_std(b).0);
        settle(&mut a.history, &mut b.history);
        (a, b, Renaming::new())
    }

    fn consistency(&self, a: &Configuration, b: &Configuration) -> Result<(), Discrepancy> {
        if consistent(&a.history, &b.history) {
            Ok(())
        } else {
            Err(Discrepancy::History)
        }
    }

    fn fresh(&self, a: &Configuration, b: &Configuration) -> TransName {
        let names: BTreeSet<_> = a.names().union(&b.names()).cloned().collect();
        TransName::fresh(NameKind::External, &names)
    }

    fn challenges(
        &mut self,
        from: &Configuration,
        other: &Configuration,
        k: &TransName,
    ) -> (Vec<Challenge<Configuration>>, bool) {
        let mut out = Vec::new();
        for st in self.weak.sem.steps(from, k) {
            if !st.is_challenger() {
                continue;
            }
            let resp = self.weak.weak(other, &st.label, k);
            out.push(Challenge {
                label: match &st.label {
                    StdLabel::Tau => Move::Tau,
                    StdLabel::Trans(k) => Move::Trans(k.clone()),
                },
                target: self.weak.canonical(&st.target),
                responses: resp.0.clone(),
                complete: resp.1,
            });
        }
        (out, true)
    }

    fn wrap(s: Configuration) -> Config {
        Config::Plain(s)
    }
}

struct ExtArena {
    kind: BisimKind,
    weak_challenger: bool,
    weak: Weak<ExtLts>,
}

fn move_of(l: &ExtLabel) -> Move {
    match l {
        ExtLabel::Tau => Move::Tau,
        ExtLabel::Act(k, a) => Move::Act(k.clone(), a.clone()),
        ExtLabel::Co(ks) => Move::Co(ks.clone()),
    }
}

impl ExtArena {
    fn push(
        &mut self,
        out: &mut Vec<Challenge<ExtConfiguration>>,
        label: ExtLabel,
        target: ExtConfiguration,
        other: &ExtConfiguration,
        k: &TransName,
    ) {
        let resp = self.weak.weak(other, &label, k);
        out.push(Challenge {
            label: move_of(&label),
            target,
            responses: resp.0.clone(),
            complete: resp.1,
        });
    }
}

impl Arena for ExtArena {
    type S = ExtConfiguration;

    fn normalize(
        &self,
        a: &ExtConfiguration,
        b: &ExtConfiguration,
    ) -> (ExtConfiguration, ExtConfiguration, Renaming) {
        canonical_ext_pair_renaming(a, b)
    }

    fn consistency(&self, a: &ExtConfiguration, b: &ExtConfiguration) -> Result<(), Discrepancy> {
        match self.kind {
            BisimKind::Hasco => {
                if commit_consistent(&a.history, &b.history) {
                    return Ok(());
                }
                let (ha, hb) = (a.history.hasco(), b.history.hasco());
                let k = ha.symmetric_difference(&hb).next().unwrap().clone();
                let left = ha.contains(&k);
                Err(Discrepancy::Hasco(k, left))
            }
            BisimKind::Eq => {
                let names: BTreeSet<TransName> = a
                    .history
                    .hasco()
                    .union(&b.history.hasco())
                    .cloned()
                    .collect();
                for k in &names {
                    for l in &names {
                        let (x, y) = (eq_holds(&a.history, k, l), eq_holds(&b.history, k, l));
                        if x != y {
                            return Err(Discrepancy::EqCo(k.clone(), l.clone(), x));
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn fresh(&self, a: &ExtConfiguration, b: &ExtConfiguration) -> TransName {
        let names: BTreeSet<_> = a.names().union(&b.names()).cloned().collect();
        TransName::fresh(NameKind::External, &names)
    }

    fn challenges(
        &mut self,
        from: &ExtConfiguration,
        other: &ExtConfiguration,
        k: &TransName,
    ) -> (Vec<Challenge<ExtConfiguration>>, bool) {
        let mut out = Vec::new();
        let mut complete = true;
        // Degenerate challenger moves are dominated by `tau` moves with
        // the same target and are skipped.
        let strong_moves = self.kind == BisimKind::Canco && !self.weak_challenger;
        let commits = self.kind == BisimKind::Canco;
        if strong_moves {
            let mut seen = BTreeSet::new();
            for st in self.weak.sem.steps(from, k) {
                if st.rule == Rule::Star || matches!(st.label, ExtLabel::Co(_)) {
                    continue;
                }
                let t = self.weak.canonical(&st.target);
                if seen.insert((st.label.clone(), t.clone())) {
                    self.push(&mut out, st.label, t, other, k);
                }
            }
        }
        let pre = self.weak.closure(from);
        complete &= pre.1;
        let mut seen = BTreeSet::new();
        for y in &pre.0 {
            if !strong_moves && seen.insert((ExtLabel::Tau, y.clone())) {
                self.push(&mut out, ExtLabel::Tau, y.clone(), other, k);
            }
            for st in self.weak.sem.steps(y, k) {
                let wanted = match st.label {
                    ExtLabel::Tau => false,
                    ExtLabel::Act(..) => !strong_moves && st.rule != Rule::Star,
                    ExtLabel::Co(_) => commits,
                };
                if !wanted {
                    continue;
                }
                let t = self.weak.canonical(&st.target);
                let post = self.weak.closure(&t);
                complete &= post.1;
                for z in post.0.iter() {
                    if seen.insert((st.label.clone(), z.clone())) {
                        self.push(&mut out, st.label.clone(), z.clone(), other, k);
                    }
                }
            }
        }
        (out, complete)
    }

    fn wrap(s: ExtConfiguration) -> Config {
        Config::Ext(s)
    }
}

struct Obligation {
    side: Side,
    label: Move,
    target: usize,
    /// Candidate pair ids with the renaming into their naming.
    candidates: Vec<(usize, Rc<Renaming>)>,
    complete: bool,
}

struct PairInfo<S> {
    left: S,
    right: S,
    explored: bool,
    consistency: Result<(), Discrepancy>,
    complete: bool,
    obligations: Vec<Obligation>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Bad {
    Inconsistent,
    Unexplored,
    Obligation(usize),
}

struct Game<A: Arena> {
    arena: A,
    bounds: SearchBounds,
    ids: HashMap<(A::S, A::S), usize>,
    pairs: Vec<PairInfo<A::S>>,
    /// Targets of challenger moves, for printing.
    targets: Vec<A::S>,
    truncated: bool,
}

impl<A: Arena> Game<A> {
    fn new(arena: A, bounds: SearchBounds) -> Self {
        Game {
            arena,
            bounds,
            ids: HashMap::new(),
            pairs: Vec::new(),
            targets: Vec::new(),
            truncated: false,
        }
    }

    fn intern(
        &mut self,
        a: A::S,
        b: A::S,
        queue: &mut VecDeque<(usize, usize)>,
        depth: usize,
    ) -> usize {
        if let Some(id) = self.ids.get(&(a.clone(), b.clone())) {
            return *id;
        }
        let id = self.pairs.len();
        let identical = a == b;
        self.ids.insert((a.clone(), b.clone()), id);
        self.pairs.push(PairInfo {
            left: a,
            right: b,
            explored: identical,
            consistency: Ok(()),
            complete: true,
            obligations: Vec::new(),
        });
        if identical {
            return id;
        }
        if id < self.bounds.max_states && depth <= self.bounds.depth {
            queue.push_back((id, depth));
        } else {
            self.truncated = true;
        }
        id
    }

    fn explore(&mut self, c1: &A::S, c2: &A::S) {
        let mut queue = VecDeque::new();
        let (a, b, _) = self.arena.normalize(c1, c2);
        self.intern(a, b, &mut queue, 0);
        while let Some((id, depth)) = queue.pop_front() {
            let (a, b) = (self.pairs[id].left.clone(), self.pairs[id].right.clone());
            self.pairs[id].explored = true;
            let cons = self.arena.consistency(&a, &b);
            if cons.is_err() {
                self.pairs[id].consistency = cons;
                continue;
            }
            let k = self.arena.fresh(&a, &b);
            let mut obligations = Vec::new();
            let mut complete = true;
            for side in [Side::Left, Side::Right] {
                let (from, other) = match side {
                    Side::Left => (&a, &b),
                    Side::Right => (&b, &a),
                };
                let (chs, ok) = self.arena.challenges(from, other, &k);
                complete &= ok;
                for ch in chs {
                    let mut candidates = Vec::new();
                    for d in &ch.responses {
                        let (x, y, map) = match side {
                            Side::Left => self.arena.normalize(&ch.target, d),
                            Side::Right => self.arena.normalize(d, &ch.target),
                        };
                        // Identical sides are related by the identity, so
                        // such a response settles the move.
                        if x == y {
                            let cid = self.intern(x, y, &mut queue, depth + 1);
                            candidates = vec![(cid, Rc::new(map))];
                            break;
                        }
                        let cid = self.intern(x, y, &mut queue, depth + 1);
                        if !candidates.iter().any(|(c, _)| *c == cid) {
                            candidates.push((cid, Rc::new(map)));
                        }
                    }
                    if !ch.complete {
                        self.truncated = true;
                    }
                    self.targets.push(ch.target);
                    obligations.push(Obligation {
                        side,
                        label: ch.label,
                        target: self.targets.len() - 1,
                        candidates,
                        complete: ch.complete,
                    });
                }
            }
            if !complete {
                self.truncated = true;
            }
            self.pairs[id].complete = complete;
            self.pairs[id].obligations = obligations;
        }
    }

    /// Greatest fixpoint; returns for each pair the reason and rank of
    /// its failure.
    fn solve(&self, optimistic: bool) -> Vec<Option<Bad>> {
        let n = self.pairs.len();
        let mut bad: Vec<Option<Bad>> = vec![None; n];
        let mut rank = vec![usize::MAX; n];
        let mut next = 0;
        let mut users: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut counts: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        for (id, p) in self.pairs.iter().enumerate() {
            counts.push(p.obligations.iter().map(|o| o.candidates.len()).collect());
            if !p.explored {
                if !optimistic {
                    bad[id] = Some(Bad::Unexplored);
                    queue.push_back(id);
                }
                continue;
            }
            if p.consistency.is_err() {
                bad[id] = Some(Bad::Inconsistent);
                queue.push_back(id);
                continue;
            }
            if !optimistic && !p.complete {
                bad[id] = Some(Bad::Unexplored);
                queue.push_back(id);
                continue;
            }
            for (oi, o) in p.obligations.iter().enumerate() {
                if optimistic && !o.complete {
                    continue;
                }
                for (c, _) in &o.candidates {
                    users[*c].push((id, oi));
                }
                if o.candidates.is_empty() && bad[id].is_none() {
                    bad[id] = Some(Bad::Obligation(oi));
                    queue.push_back(id);
                }
            }
        }
        while let Some(c) = queue.pop_front() {
            rank[c] = next;
            next += 1;
            for &(owner, oi) in &users[c] {
                counts[owner][oi] -= 1;
                if counts[owner][oi] == 0 && bad[owner].is_none() {
                    bad[owner] = Some(Bad::Obligation(oi));
                    queue.push_back(owner);
                }
            }
        }
        // Prefer the failing move with fewest responses, keeping only
        // refutations by pairs that failed earlier.
        for id in 0..n {
            if let Some(Bad::Obligation(_)) = bad[id] {
                let p = &self.pairs[id];
                let best = p
                    .obligations
                    .iter()
                    .enumerate()
                    .filter(|(_, o)| o.complete || !optimistic)
                    .filter(|(_, o)| o.candidates.iter().all(|(c, _)| rank[*c] < rank[id]))
                    .min_by_key(|(_, o)| o.candidates.len())
                    .map(|(oi, _)| oi);
                if let Some(oi) = best {
                    bad[id] = Some(Bad::Obligation(oi));
                }
            }
        }
        bad
    }

    fn witness(&self, bad: &[Option<Bad>]) -> Vec<(Config, Config)> {
        let mut keep = BTreeSet::from([0usize]);
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            for o in &self.pairs[id].obligations {
                let (c, _) = o
                    .candidates
                    .iter()
                    .find(|(c, _)| bad[*c].is_none())
                    .expect("surviving pair has matching responses");
                if keep.insert(*c) {
                    stack.push(*c);
                }
            }
        }
        keep.into_iter()
            .filter(|id| self.pairs[*id].left != self.pairs[*id].right)
            .map(|id| {
                let p = &self.pairs[id];
                (A::wrap(p.left.clone()), A::wrap(p.right.clone()))
            })
            .collect()
    }

    fn tree(&self, id: usize, bad: &[Option<Bad>], budget: &mut usize) -> GameTree {
        let p = &self.pairs[id];
        let (left, right) = (p.left.to_string(), p.right.to_string());
        if *budget == 0 {
            return GameTree {
                left,
                right,
                reason: Refutation::Elided,
            };
        }
        *budget -= 1;
        let reason = match bad[id] {
            Some(Bad::Inconsistent) => Refutation::Inconsistent(p.consistency.clone().unwrap_err()),
            Some(Bad::Obligation(oi)) => {
                let o = &p.obligations[oi];
                Refutation::Unmatched {
                    side: o.side,
                    label: o.label.clone(),
                    target: self.targets[o.target].to_string(),
                    responses: o
                        .candidates
                        .iter()
                        .map(|(c, _)| self.tree(*c, bad, budget))
                        .collect(),
                }
            }
            Some(Bad::Unexplored) | None => Refutation::Elided,
        };
        GameTree {
            left,
            right,
            reason,
        }
    }

    /// A formula true of the left and false of the right configuration of
    /// refuted pair `id`. `env` maps history names to variables.
    fn formula(
        &self,
        id: usize,
        bad: &[Option<Bad>],
        env: &BTreeMap<TransName, Arc<str>>,
        vars: &mut usize,
        budget: &mut usize,
    ) -> Option<Formula> {
        *budget = budget.checked_sub(1)?;
        let p = &self.pairs[id];
        let val = |k: &TransName| match env.get(k) {
            Some(x) => Value::Var(x.clone()),
            None => Value::Name(k.clone()),
        };
        let lit = |f: Formula, positive: bool| if positive { f } else { Formula::neg(f) };
        match bad[id]? {
            Bad::Unexplored => None,
            Bad::Inconsistent => match p.consistency.as_ref().unwrap_err() {
                Discrepancy::History => None,
                Discrepancy::Hasco(k, left) => Some(lit(Formula::Hasco(val(k)), *left)),
                Discrepancy::EqCo(k, l, left) => Some(lit(Formula::EqCo(val(k), val(l)), *left)),
            },
            Bad::Obligation(oi) => {
                let o = &p.obligations[oi];
                let bound = match &o.label {
                    Move::Act(k, _) => {
                        *vars += 1;
                        Some((k.clone(), Arc::<str>::from(format!("x{vars}"))))
                    }
                    _ => None,
                };
                let mut parts = Vec::new();
                for (c, map) in &o.candidates {
                    let mut env2 = BTreeMap::new();
                    for (k, x) in env {
                        if let Some(k2) = map.get(k) {
                            env2.insert(k2.clone(), x.clone());
                        }
                    }
                    if let Some((k, x)) = &bound {
                        if let Some(k2) = map.get(k) {
                            env2.insert(k2.clone(), x.clone());
                        }
                    }
                    let f = self.formula(*c, bad, &env2, vars, budget)?;
                    parts.push(match o.side {
                        Side::Left => f,
                        Side::Right => Formula::neg(f),
                    });
                }
                let body = Formula::conj(parts);
                let dia = match (&o.label, bound) {
                    (Move::Tau, _) => Formula::dia_tau(body),
                    (Move::Act(_, a), Some((_, x))) => {
                        Formula::DiamondAct(x, a.clone(), Box::new(body))
                    }
                    (Move::Co(ks), _) => Formula::dia_co(ks.iter().map(val).collect(), body),
                    _ => return None,
                };
                Some(lit(dia, o.side == Side::Left))
            }
        }
    }

    fn report(&self) -> String {
        format!(
            "explored {} pair(s); bounds: max-states {}, tau-bound {}, depth {}",
            self.pairs.len(),
            self.bounds.max_states,
            self.bounds.tau_bound,
            self.bounds.depth
        )
    }

    fn run(mut self, c1: &A::S, c2: &A::S, formulas: bool) -> Verdict {
        self.explore(c1, c2);
        let optimistic = self.solve(true);
        if optimistic[0].is_some() {
            let mut budget = 200;
            let tree = self.tree(0, &optimistic, &mut budget);
            let formula = if formulas {
                let mut budget = 20_000;
                self.formula(0, &optimistic, &BTreeMap::new(), &mut 0, &mut budget)
                    .map(|f| f.simplify())
            } else {
                None
            };
            return Verdict::NotBisimilar { tree, formula };
        }
        let pessimistic = self.solve(false);
        if pessimistic[0].is_none() {
            return Verdict::Bisimilar {
                witness: self.witness(&pessimistic),
            };
        }
        Verdict::Unknown {
            report: self.report(),
        }
    }
}

fn ext_arena(
    kind: BisimKind,
    alphabet: BTreeSet<ActName>,
    bounds: &SearchBounds,
    weak_challenger: bool,
) -> ExtArena {
    let sem = ExtLts {
        alphabet,
        commit_sensitive: kind == BisimKind::Canco,
    };
    ExtArena {
        kind,
        weak_challenger,
        weak: Weak::new(sem, bounds.tau_bound),
    }
}

fn expect_plain(kind: BisimKind, c: &Config) -> Result<&Configuration, BisimError> {
    match c {
        Config::Plain(c) => Ok(c),
        Config::Ext(_) => Err(BisimError::KindMismatch(kind, "plain")),
    }
}

fn expect_ext(kind: BisimKind, c: &Config) -> Result<&ExtConfiguration, BisimError> {
    match c {
        Config::Ext(c) => Ok(c),
        Config::Plain(_) => Err(BisimError::KindMismatch(kind, "extended")),
    }
}

/// Decides `C1 ≈ C2` for `kind` within `bounds`. Refutations for the
/// extended kinds carry a distinguishing formula of the matching logic
/// when one could be extracted.
pub fn check_bisim(
    kind: BisimKind,
    c1: &Config,
    c2: &Config,
    bounds: &SearchBounds,
) -> Result<Verdict, BisimError> {
    check_bisim_with(kind, c1, c2, bounds, false)
}

/// As [`check_bisim`]; with `weak_challenger` the commit-sensitive game
/// lets the challenger play weak `tau` and action moves too.
pub fn check_bisim_with(
    kind: BisimKind,
    c1: &Config,
    c2: &Config,
    bounds: &SearchBounds,
    weak_challenger: bool,
) -> Result<Verdict, BisimError> {
    Ok(match kind {
        BisimKind::Standard => {
            let (a, b) = (expect_plain(kind, c1)?, expect_plain(kind, c2)?);
            let arena = StdArena {
                weak: Weak::new(StdLts, bounds.tau_bound),
            };
            Game::new(arena, *bounds).run(a, b, false)
        }
        _ => {
            let (a, b) = (expect_ext(kind, c1)?, expect_ext(kind, c2)?);
            let alphabet = crate::lts::alphabet_of([&a.process, &b.process]);
            Game::new(ext_arena(kind, alphabet, bounds, weak_challenger), *bounds).run(a, b, true)
        }
    })
}

/// A formula of the kind's logic satisfied by exactly one of the inputs,
/// or `None` when they are not known to be distinct or extraction
/// exceeded its budget.
pub fn distinguishing_formula(
    kind: BisimKind,
    c1: &Config,
    c2: &Config,
    bounds: &SearchBounds,
) -> Option<Formula> {
    match check_bisim(kind, c1, c2, bounds).ok()? {
        Verdict::NotBisimilar { formula, .. } => formula,
        _ => None,
    }
}

fn verify<A: Arena>(
    mut arena: A,
    pairs: &[(A::S, A::S)],
    identity: bool,
) -> Result<(), Counterexample> {
    let norm: BTreeSet<(A::S, A::S)> = pairs
        .iter()
        .map(|(a, b)| {
            let (x, y, _) = arena.normalize(a, b);
            (x, y)
        })
        .collect();
    let related = |arena: &A, a: &A::S, b: &A::S| {
        let (x, y, _) = arena.normalize(a, b);
        (identity && x == y) || norm.contains(&(x, y))
    };
    for (a, b) in &norm {
        let fail = |clause: String| Counterexample {
            left: a.to_string(),
            right: b.to_string(),
            clause,
        };
        if let Err(d) = arena.consistency(a, b) {
            return Err(fail(format!("consistency: {d}")));
        }
        let k = arena.fresh(a, b);
        for side in [Side::Left, Side::Right] {
            let (from, other) = match side {
                Side::Left => (a, b),
                Side::Right => (b, a),
            };
            let (chs, complete) = arena.challenges(from, other, &k);
            if !complete {
                return Err(fail("challenger moves exceed the bounds".into()));
            }
            for ch in chs {
                let matched = ch.responses.iter().any(|d| match side {
                    Side::Left => related(&arena, &ch.target, d),
                    Side::Right => related(&arena, d, &ch.target),
                });
                if !matched {
                    return Err(fail(format!(
                        "{side} move {} to {} has no related response{}",
                        ch.label,
                        ch.target,
                        if ch.complete {
                            ""
                        } else {
                            " within the bounds"
                        }
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Checks that `pairs`, together with the identity when `identity` is
/// set, is a bisimulation of the given kind up to canonical renaming.
pub fn verify_relation(
    kind: BisimKind,
    pairs: &[(Config, Config)],
    identity: bool,
    bounds: &SearchBounds,
) -> Result<Result<(), Counterexample>, BisimError> {
    match kind {
        BisimKind::Standard => {
            let ps = pairs
                .iter()
                .map(|(a, b)| {
                    Ok((
                        expect_plain(kind, a)?.clone(),
                        expect_plain(kind, b)?.clone(),
                    ))
                })
                .collect::<Result<Vec<_>, BisimError>>()?;
            let arena = StdArena {
                weak: Weak::new(StdLts, bounds.tau_bound),
            };
            Ok(verify(arena, &ps, identity))
        }
        _ => {
            let ps = pairs
                .iter()
                .map(|(a, b)| Ok((expect_ext(kind, a)?.clone(), expect_ext(kind, b)?.clone())))
                .collect::<Result<Vec<_>, BisimError>>()?;
            let alphabet =
                crate::lts::alphabet_of(ps.iter().flat_map(|(a, b)| [&a.process, &b.process]));
            Ok(verify(
                ext_arena(kind, alphabet, bounds, false),
                &ps,
                identity,
            ))
        }
    }
}

/// Canonical form of a single configuration, as used for relation
/// membership.
pub fn canonical(c: &Config) -> Config {
    match c {
        Config::Plain(c) => Config::Plain(canonical_std(c).0),
        Config::Ext(c) => Config::Ext(canonical_ext(c).0),
    }
}
