//! Process terms: names, the AST, permutations and substitutions on
//! transaction names, well-formedness, and commit elimination.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub(crate) mod parse;
mod render;

pub use parse::{parse_open_process, parse_process};

/// A channel name with polarity. `'a` is the output co-name of `a`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ActName {
    pub name: Arc<str>,
    pub output: bool,
}

impl ActName {
    pub fn input(name: &str) -> Self {
        assert!(!name.is_empty(), "action names are nonempty");
        ActName {
            name: name.into(),
            output: false,
        }
    }

    pub fn output(name: &str) -> Self {
        ActName {
            output: true,
            ..ActName::input(name)
        }
    }

    pub fn co(&self) -> Self {
        ActName {
            name: self.name.clone(),
            output: !self.output,
        }
    }

    /// Barb actions are the input names starting with `w_`.
    pub fn is_barb(&self) -> bool {
        !self.output && self.name.starts_with("w_")
    }
}

impl fmt::Display for ActName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.output {
            write!(f, "'{}", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Prefix {
    Act(ActName),
    Tau,
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prefix::Act(a) => a.fmt(f),
            Prefix::Tau => write!(f, "tau"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum NameKind {
    Internal,
    External,
}

/// A transaction name. Internal names print as written (generated ones
/// start with `%`); external names print with a leading `#`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TransName {
    pub kind: NameKind,
    pub id: Arc<str>,
}

impl TransName {
    pub fn internal(id: &str) -> Self {
        TransName {
            kind: NameKind::Internal,
            id: id.into(),
        }
    }

    pub fn external(id: &str) -> Self {
        TransName {
            kind: NameKind::External,
            id: id.into(),
        }
    }

    pub fn is_external(&self) -> bool {
        self.kind == NameKind::External
    }

    /// The `n`-th generated name of the given kind: `%mn` or `#mn`.
    pub fn generated(kind: NameKind, n: usize) -> Self {
        match kind {
            NameKind::Internal => TransName::internal(&format!("%m{n}")),
            NameKind::External => TransName::external(&format!("m{n}")),
        }
    }

    /// Smallest generated name of `kind` not in `avoid`.
    pub fn fresh(kind: NameKind, avoid: &BTreeSet<TransName>) -> Self {
        (1..)
            .map(|n| TransName::generated(kind, n))
            .find(|k| !avoid.contains(k))
            .unwrap()
    }
}

impl fmt::Display for TransName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NameKind::Internal => write!(f, "{}", self.id),
            NameKind::External => write!(f, "#{}", self.id),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Process {
    /// Guarded choice; the empty sum is `0`.
    Sum(Vec<(Prefix, Process)>),
    Par(Box<Process>, Box<Process>),
    Restrict(Arc<str>, Box<Process>),
    Var(Arc<str>),
    Rec(Arc<str>, Box<Process>),
    /// `txn k { default } else { alternative }`
    Running(Box<Process>, TransName, Box<Process>),
    /// `txn { default } else { alternative }`
    Dormant(Box<Process>, Box<Process>),
    Commit,
}

pub fn nil() -> Process {
    Process::Sum(Vec::new())
}

pub fn par(p: Process, q: Process) -> Process {
    Process::Par(Box::new(p), Box::new(q))
}

pub fn prefix(mu: Prefix, p: Process) -> Process {
    Process::Sum(vec![(mu, p)])
}

pub fn running(p: Process, k: TransName, q: Process) -> Process {
    Process::Running(Box::new(p), k, Box::new(q))
}

pub fn dormant(p: Process, q: Process) -> Process {
    Process::Dormant(Box::new(p), Box::new(q))
}

impl Process {
    pub fn is_nil(&self) -> bool {
        matches!(self, Process::Sum(b) if b.is_empty())
    }

    /// Number of AST nodes; `0` counts as one.
    pub fn size(&self) -> usize {
        match self {
            Process::Sum(bs) => 1.max(bs.iter().map(|(_, p)| 1 + p.size()).sum()),
            Process::Par(p, q) => 1 + p.size() + q.size(),
            Process::Restrict(_, p) | Process::Rec(_, p) => 1 + p.size(),
            Process::Var(_) | Process::Commit => 1,
            Process::Running(p, _, q) | Process::Dormant(p, q) => 1 + p.size() + q.size(),
        }
    }

    /// Visits every transaction name in pre-order, left to right.
    pub fn for_each_name(&self, f: &mut impl FnMut(&TransName)) {
        match self {
            Process::Sum(bs) => bs.iter().for_each(|(_, p)| p.for_each_name(f)),
            Process::Par(p, q) | Process::Dormant(p, q) => {
                p.for_each_name(f);
                q.for_each_name(f);
            }
            Process::Restrict(_, p) | Process::Rec(_, p) => p.for_each_name(f),
            Process::Running(p, k, q) => {
                f(k);
                p.for_each_name(f);
                q.for_each_name(f);
            }
            Process::Var(_) | Process::Commit => {}
        }
    }

    pub fn map_names(&self, f: &impl Fn(&TransName) -> TransName) -> Process {
        match self {
            Process::Sum(bs) => Process::Sum(
                bs.iter()
                    .map(|(m, p)| (m.clone(), p.map_names(f)))
                    .collect(),
            ),
            Process::Par(p, q) => par(p.map_names(f), q.map_names(f)),
            Process::Restrict(a, p) => Process::Restrict(a.clone(), Box::new(p.map_names(f))),
            Process::Rec(x, p) => Process::Rec(x.clone(), Box::new(p.map_names(f))),
            Process::Running(p, k, q) => running(p.map_names(f), f(k), q.map_names(f)),
            Process::Dormant(p, q) => dormant(p.map_names(f), q.map_names(f)),
            Process::Var(_) | Process::Commit => self.clone(),
        }
    }

    pub fn free_proc_vars(&self) -> BTreeSet<Arc<str>> {
        fn go(p: &Process, bound: &mut Vec<Arc<str>>, out: &mut BTreeSet<Arc<str>>) {
            match p {
                Process::Sum(bs) => bs.iter().for_each(|(_, q)| go(q, bound, out)),
                Process::Par(p, q) | Process::Running(p, _, q) | Process::Dormant(p, q) => {
                    go(p, bound, out);
                    go(q, bound, out);
                }
                Process::Restrict(_, p) => go(p, bound, out),
                Process::Rec(x, p) => {
                    bound.push(x.clone());
                    go(p, bound, out);
                    bound.pop();
                }
                Process::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Process::Commit => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_proc_vars().is_empty()
    }

    /// Free visible prefixes (both polarities), ignoring restricted names.
    pub fn free_actions(&self) -> BTreeSet<ActName> {
        fn go(p: &Process, bound: &mut Vec<Arc<str>>, out: &mut BTreeSet<ActName>) {
            match p {
                Process::Sum(bs) => {
                    for (m, q) in bs {
                        if let Prefix::Act(a) = m {
                            if !bound.contains(&a.name) {
                                out.insert(a.clone());
                            }
                        }
                        go(q, bound, out);
                    }
                }
                Process::Par(p, q) | Process::Running(p, _, q) | Process::Dormant(p, q) => {
                    go(p, bound, out);
                    go(q, bound, out);
                }
                Process::Restrict(a, p) => {
                    bound.push(a.clone());
                    go(p, bound, out);
                    bound.pop();
                }
                Process::Rec(_, p) => go(p, bound, out),
                Process::Var(_) | Process::Commit => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every action identifier occurring anywhere, bound or free.
    fn all_action_ids(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Process::Sum(bs) => {
                for (m, q) in bs {
                    if let Prefix::Act(a) = m {
                        out.insert(a.name.clone());
                    }
                    q.all_action_ids(out);
                }
            }
            Process::Par(p, q) | Process::Running(p, _, q) | Process::Dormant(p, q) => {
                p.all_action_ids(out);
                q.all_action_ids(out);
            }
            Process::Restrict(a, p) => {
                out.insert(a.clone());
                p.all_action_ids(out);
            }
            Process::Rec(_, p) => p.all_action_ids(out),
            Process::Var(_) | Process::Commit => {}
        }
    }

    fn rename_action(&self, from: &Arc<str>, to: &Arc<str>) -> Process {
        match self {
            Process::Sum(bs) => Process::Sum(
                bs.iter()
                    .map(|(m, q)| {
                        let m = match m {
                            Prefix::Act(a) if &a.name == from => Prefix::Act(ActName {
                                name: to.clone(),
                                output: a.output,
                            }),
                            _ => m.clone(),
                        };
                        (m, q.rename_action(from, to))
                    })
                    .collect(),
            ),
            Process::Par(p, q) => par(p.rename_action(from, to), q.rename_action(from, to)),
            Process::Restrict(a, _) if a == from => self.clone(),
            Process::Restrict(a, p) => {
                Process::Restrict(a.clone(), Box::new(p.rename_action(from, to)))
            }
            Process::Rec(x, p) => Process::Rec(x.clone(), Box::new(p.rename_action(from, to))),
            Process::Running(p, k, q) => running(
                p.rename_action(from, to),
                k.clone(),
                q.rename_action(from, to),
            ),
            Process::Dormant(p, q) => dormant(p.rename_action(from, to), q.rename_action(from, to)),
            Process::Var(_) | Process::Commit => self.clone(),
        }
    }

    /// Capture-avoiding `self{r/X}`; restriction binders are renamed when
    /// they would capture a free action of `r`.
    pub fn substitute_var(&self, x: &str, r: &Process) -> Process {
        let r_free: BTreeSet<Arc<str>> = r.free_actions().into_iter().map(|a| a.name).collect();
        self.subst_var(x, r, &r_free)
    }

    fn subst_var(&self, x: &str, r: &Process, r_free: &BTreeSet<Arc<str>>) -> Process {
        match self {
            Process::Var(y) if &**y == x => r.clone(),
            Process::Var(_) | Process::Commit => self.clone(),
            Process::Sum(bs) => Process::Sum(
                bs.iter()
                    .map(|(m, q)| (m.clone(), q.subst_var(x, r, r_free)))
                    .collect(),
            ),
            Process::Par(p, q) => par(p.subst_var(x, r, r_free), q.subst_var(x, r, r_free)),
            Process::Rec(y, _) if &**y == x => self.clone(),
            Process::Rec(y, p) => Process::Rec(y.clone(), Box::new(p.subst_var(x, r, r_free))),
            Process::Restrict(a, p) => {
                if r_free.contains(a) && p.free_proc_vars().iter().any(|v| &**v == x) {
                    let mut used = r_free.clone();
                    p.all_action_ids(&mut used);
                    let fresh: Arc<str> = (1..)
                        .map(|n| Arc::<str>::from(format!("{a}{n}")))
                        .find(|c| !used.contains(c))
                        .unwrap();
                    let p = p.rename_action(a, &fresh);
                    Process::Restrict(fresh, Box::new(p.subst_var(x, r, r_free)))
                } else {
                    Process::Restrict(a.clone(), Box::new(p.subst_var(x, r, r_free)))
                }
            }
            Process::Running(p, k, q) => running(
                p.subst_var(x, r, r_free),
                k.clone(),
                q.subst_var(x, r, r_free),
            ),
            Process::Dormant(p, q) => dormant(p.subst_var(x, r, r_free), q.subst_var(x, r, r_free)),
        }
    }

    /// One unfolding of a top-level `rec X. P` into `P{rec X. P/X}`.
    pub fn unfold(&self) -> Option<Process> {
        match self {
            Process::Rec(x, body) => Some(body.substitute_var(x, self)),
            _ => None,
        }
    }

    pub fn contains_rec(&self) -> bool {
        match self {
            Process::Rec(..) => true,
            Process::Sum(bs) => bs.iter().any(|(_, p)| p.contains_rec()),
            Process::Par(p, q) | Process::Running(p, _, q) | Process::Dormant(p, q) => {
                p.contains_rec() || q.contains_rec()
            }
            Process::Restrict(_, p) => p.contains_rec(),
            Process::Var(_) | Process::Commit => false,
        }
    }

    pub fn contains_dormant(&self) -> bool {
        match self {
            Process::Dormant(..) => true,
            Process::Sum(bs) => bs.iter().any(|(_, p)| p.contains_dormant()),
            Process::Par(p, q) | Process::Running(p, _, q) => {
                p.contains_dormant() || q.contains_dormant()
            }
            Process::Restrict(_, p) | Process::Rec(_, p) => p.contains_dormant(),
            Process::Var(_) | Process::Commit => false,
        }
    }
}

/// Names of running transactions occurring in `p`.
pub fn free_transaction_names(p: &Process) -> BTreeSet<TransName> {
    let mut out = BTreeSet::new();
    p.for_each_name(&mut |k| {
        out.insert(k.clone());
    });
    out
}

/// A substitution `k~ ↦ l` on transaction names.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NameSubstitution {
    pub domain: BTreeSet<TransName>,
    pub target: TransName,
}

impl NameSubstitution {
    pub fn new(domain: BTreeSet<TransName>, target: TransName) -> Self {
        NameSubstitution { domain, target }
    }

    pub fn apply(&self, k: &TransName) -> TransName {
        if self.domain.contains(k) {
            self.target.clone()
        } else {
            k.clone()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn permute(&self, pi: &Permutation) -> NameSubstitution {
        NameSubstitution {
            domain: self.domain.iter().map(|k| pi.apply(k)).collect(),
            target: pi.apply(&self.target),
        }
    }
}

pub fn apply_substitution(p: &Process, sigma: &NameSubstitution) -> Process {
    if sigma.is_empty() {
        return p.clone();
    }
    p.map_names(&|k| sigma.apply(k))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PermutationError {
    #[error("mapping is not injective at {0}")]
    NotInjective(TransName),
    #[error("mapping {0} to {1} changes the name kind")]
    KindChange(TransName, TransName),
}

/// A finitely supported bijection on transaction names.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Permutation {
    map: BTreeMap<TransName, TransName>,
}

impl Permutation {
    pub fn identity() -> Self {
        Permutation::default()
    }

    /// Exchanges `a` and `b` (kind-preserving only if their kinds agree).
    pub fn swap(a: TransName, b: TransName) -> Self {
        let mut map = BTreeMap::new();
        if a != b {
            map.insert(a.clone(), b.clone());
            map.insert(b, a);
        }
        Permutation { map }
    }

    /// Builds a kind-preserving permutation from an explicit finite bijection.
    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (TransName, TransName)>,
    ) -> Result<Self, PermutationError> {
        let p = Permutation::relaxed_from_pairs(pairs)?;
        for (k, v) in &p.map {
            if k.kind != v.kind {
                return Err(PermutationError::KindChange(k.clone(), v.clone()));
            }
        }
        Ok(p)
    }

    /// As `from_pairs` but without the kind-preservation requirement.
    pub fn relaxed_from_pairs(
        pairs: impl IntoIterator<Item = (TransName, TransName)>,
    ) -> Result<Self, PermutationError> {
        let map: BTreeMap<_, _> = pairs.into_iter().collect();
        let image: BTreeSet<_> = map.values().cloned().collect();
        if image.len() != map.len() {
            let mut seen = BTreeSet::new();
            for v in map.values() {
                if !seen.insert(v) {
                    return Err(PermutationError::NotInjective(v.clone()));
                }
            }
        }
        let domain: BTreeSet<_> = map.keys().cloned().collect();
        if domain != image {
            let k = domain.symmetric_difference(&image).next().unwrap().clone();
            return Err(PermutationError::NotInjective(k));
        }
        Ok(Permutation::normalized(map))
    }

    /// Extends a finite injective kind-preserving map to a permutation by
    /// closing its open chains into cycles.
    pub fn from_injection(map: BTreeMap<TransName, TransName>) -> Result<Self, PermutationError> {
        let mut seen = BTreeSet::new();
        for (k, v) in &map {
            if !seen.insert(v.clone()) {
                return Err(PermutationError::NotInjective(v.clone()));
            }
            if k.kind != v.kind {
                return Err(PermutationError::KindChange(k.clone(), v.clone()));
            }
        }
        let mut full = map.clone();
        // Each chain start (in domain, not in image) receives the end of the
        // chain (in image, not in domain).
        for start in map.keys().filter(|k| !seen.contains(*k)) {
            let mut end = map[start].clone();
            while let Some(next) = map.get(&end) {
                end = next.clone();
            }
            full.insert(end, start.clone());
        }
        Ok(Permutation::normalized(full))
    }

    fn normalized(mut map: BTreeMap<TransName, TransName>) -> Self {
        map.retain(|k, v| k != v);
        Permutation { map }
    }

    pub fn apply(&self, k: &TransName) -> TransName {
        self.map.get(k).cloned().unwrap_or_else(|| k.clone())
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            map: self
                .map
                .iter()
                .map(|(k, v)| (v.clone(), k.clone()))
                .collect(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let mut keys: BTreeSet<TransName> = self.map.keys().cloned().collect();
        keys.extend(other.map.keys().cloned());
        Permutation::normalized(
            keys.into_iter()
                .map(|k| {
                    let v = self.apply(&other.apply(&k));
                    (k, v)
                })
                .collect(),
        )
    }

    pub fn support(&self) -> impl Iterator<Item = &TransName> {
        self.map.keys()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn is_kind_preserving(&self) -> bool {
        self.map.iter().all(|(k, v)| k.kind == v.kind)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (k, v)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}->{v}")?;
        }
        write!(f, "]")
    }
}

pub fn apply_permutation(p: &Process, pi: &Permutation) -> Process {
    if pi.is_identity() {
        return p.clone();
    }
    p.map_names(&|k| pi.apply(k))
}

/// One violated well-formedness condition (numbered 1 to 5).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: u8,
    pub subterm: Process,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "condition {}: {} in `{}`",
            self.condition, self.detail, self.subterm
        )
    }
}

pub fn check_well_formed(p: &Process) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    for x in p.free_proc_vars() {
        out.push(Violation {
            condition: 1,
            subterm: Process::Var(x.clone()),
            detail: format!("process variable {x} is unbound"),
        });
    }
    wf_walk(p, &BTreeSet::new(), &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Dormant transactions are looked for up to unfolding: a variable whose
/// binder body holds one counts as holding one.
fn wf_part(
    whole: &Process,
    part: &Process,
    role: &str,
    dormant_ok: bool,
    closed: bool,
    spawning: &BTreeSet<Arc<str>>,
    out: &mut Vec<Violation>,
) {
    let names = free_transaction_names(part);
    if !names.is_empty() {
        let list: Vec<String> = names.iter().map(|k| k.to_string()).collect();
        out.push(Violation {
            condition: 3,
            subterm: whole.clone(),
            detail: format!("named transaction {} inside {role}", list.join(", ")),
        });
    }
    if !dormant_ok && (part.contains_dormant() || !part.free_proc_vars().is_disjoint(spawning)) {
        out.push(Violation {
            condition: 4,
            subterm: whole.clone(),
            detail: format!("dormant transaction inside {role}"),
        });
    }
    if closed && !part.is_closed() {
        out.push(Violation {
            condition: 5,
            subterm: whole.clone(),
            detail: format!("{role} is not closed"),
        });
    }
}

fn wf_walk(p: &Process, spawning: &BTreeSet<Arc<str>>, out: &mut Vec<Violation>) {
    match p {
        Process::Sum(bs) => {
            for (_, q) in bs {
                wf_part(p, q, "a sum branch", false, false, spawning, out);
                wf_walk(q, spawning, out);
            }
        }
        Process::Par(a, b) => {
            wf_walk(a, spawning, out);
            wf_walk(b, spawning, out);
        }
        Process::Restrict(_, q) => wf_walk(q, spawning, out),
        Process::Rec(x, q) => {
            wf_part(p, q, "a recursion body", true, false, spawning, out);
            let mut inner = spawning.clone();
            if q.contains_dormant() {
                inner.insert(x.clone());
            } else {
                inner.remove(x);
            }
            wf_walk(q, &inner, out);
        }
        Process::Running(d, _, a) | Process::Dormant(d, a) => {
            wf_part(p, d, "a default part", false, true, spawning, out);
            wf_part(p, a, "an alternative part", true, false, spawning, out);
            wf_walk(d, spawning, out);
            wf_walk(a, spawning, out);
        }
        Process::Var(_) | Process::Commit => {}
    }
}

/// Returns `P''` with `p ≡ co | P''` when `p` has an unguarded top-level
/// `co` (looking through `|` and restriction only).
pub fn top_level_commit_split(p: &Process) -> Option<Process> {
    match p {
        Process::Commit => Some(nil()),
        Process::Par(a, b) => {
            if **a == Process::Commit {
                return Some((**b).clone());
            }
            if **b == Process::Commit {
                return Some((**a).clone());
            }
            if let Some(a2) = top_level_commit_split(a) {
                return Some(par(a2, (**b).clone()));
            }
            top_level_commit_split(b).map(|b2| par((**a).clone(), b2))
        }
        Process::Restrict(x, q) => {
            top_level_commit_split(q).map(|q2| Process::Restrict(x.clone(), Box::new(q2)))
        }
        _ => None,
    }
}

/// Replaces every `co` outside prefixes, recursion and dormant
/// transactions by `0`.
pub fn eliminate_commits(p: &Process) -> Process {
    match p {
        Process::Commit => nil(),
        Process::Par(a, b) => par(eliminate_commits(a), eliminate_commits(b)),
        Process::Restrict(x, q) => Process::Restrict(x.clone(), Box::new(eliminate_commits(q))),
        Process::Running(d, k, a) => running(eliminate_commits(d), k.clone(), eliminate_commits(a)),
        Process::Sum(_) | Process::Var(_) | Process::Rec(..) | Process::Dormant(..) => p.clone(),
    }
}

/// Removes restrictions whose action name does not occur free in their
/// body, which never affect behaviour.
pub fn prune_restrictions(p: &Process) -> Process {
    match p {
        Process::Sum(bs) => Process::Sum(
            bs.iter()
                .map(|(mu, q)| (mu.clone(), prune_restrictions(q)))
                .collect(),
        ),
        Process::Par(a, b) => par(prune_restrictions(a), prune_restrictions(b)),
        Process::Restrict(x, q) => {
            let q = prune_restrictions(q);
            if q.free_actions().iter().any(|a| a.name == *x) {
                Process::Restrict(x.clone(), Box::new(q))
            } else {
                q
            }
        }
        Process::Rec(x, q) => Process::Rec(x.clone(), Box::new(prune_restrictions(q))),
        Process::Running(d, k, a) => {
            running(prune_restrictions(d), k.clone(), prune_restrictions(a))
        }
        Process::Dormant(d, a) => dormant(prune_restrictions(d), prune_restrictions(a)),
        Process::Var(_) | Process::Commit => p.clone(),
    }
}

/// Renames every transaction name by order of first occurrence, per kind,
/// to generated names. Used to identify processes up to permutation.
pub fn canonical_names(p: &Process) -> (Process, Permutation) {
    let mut map = BTreeMap::new();
    let mut counts = [0usize; 2];
    p.for_each_name(&mut |k| {
        if !map.contains_key(k) {
            let slot = &mut counts[(k.kind == NameKind::External) as usize];
            *slot += 1;
            map.insert(k.clone(), TransName::generated(k.kind, *slot));
        }
    });
    let pi = Permutation::from_injection(map).expect("first-occurrence renaming is injective");
    (apply_permutation(p, &pi), pi)
}
