//! Histories, extended histories and configurations, with the
//! consistency predicates used by the bisimulation games.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lex::{Cursor, ParseError, Tok};
use crate::syntax::parse::{parse_action, parse_process_at, parse_trans_name};
use crate::syntax::{
    free_transaction_names, ActName, NameSubstitution, Permutation, Process, TransName,
};

/// An entry of a plain history.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Entry {
    /// committed action `a`
    Act(ActName),
    /// committed degenerate action
    Star,
    /// tentative `k(a)`
    Tent(TransName, ActName),
    /// degenerate tentative `k(*)`
    TentStar(TransName),
    Ab,
}

impl Entry {
    pub fn name(&self) -> Option<&TransName> {
        match self {
            Entry::Tent(k, _) | Entry::TentStar(k) => Some(k),
            _ => None,
        }
    }

    fn map_name(&self, f: impl Fn(&TransName) -> TransName) -> Entry {
        match self {
            Entry::Tent(k, a) => Entry::Tent(f(k), a.clone()),
            Entry::TentStar(k) => Entry::TentStar(f(k)),
            e => e.clone(),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Act(a) => write!(f, "{a}"),
            Entry::Star => write!(f, "*"),
            Entry::Tent(k, a) => write!(f, "{k}({a})"),
            Entry::TentStar(k) => write!(f, "{k}(*)"),
            Entry::Ab => write!(f, "ab"),
        }
    }
}

/// A plain history: a finite map from indices to entries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct History {
    pub entries: BTreeMap<u32, Entry>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = Entry>) -> Self {
        let mut h = History::new();
        for e in entries {
            h.push(e);
        }
        h
    }

    /// Appends at the next unused index.
    pub fn push(&mut self, e: Entry) -> u32 {
        let i = next_index(&self.entries);
        self.entries.insert(i, e);
        i
    }

    pub fn with(&self, e: Entry) -> History {
        let mut h = self.clone();
        h.push(e);
        h
    }

    pub fn names(&self) -> BTreeSet<TransName> {
        self.entries
            .values()
            .filter_map(|e| e.name().cloned())
            .collect()
    }

    /// `H \co k`
    pub fn commit(&self, k: &TransName) -> History {
        self.map_entries(|e| match e {
            Entry::Tent(l, a) if l == k => Entry::Act(a.clone()),
            Entry::TentStar(l) if l == k => Entry::Star,
            e => e.clone(),
        })
    }

    /// `H \ab k`
    pub fn abort(&self, k: &TransName) -> History {
        self.map_entries(|e| match e {
            Entry::Tent(l, _) | Entry::TentStar(l) if l == k => Entry::Ab,
            e => e.clone(),
        })
    }

    pub fn substitute(&self, sigma: &NameSubstitution) -> History {
        self.map_entries(|e| e.map_name(|k| sigma.apply(k)))
    }

    pub fn permute(&self, pi: &Permutation) -> History {
        self.map_entries(|e| e.map_name(|k| pi.apply(k)))
    }

    fn map_entries(&self, f: impl Fn(&Entry) -> Entry) -> History {
        History {
            entries: self.entries.iter().map(|(i, e)| (*i, f(e))).collect(),
        }
    }
}

fn next_index<V>(m: &BTreeMap<u32, V>) -> u32 {
    m.keys().next_back().map_or(1, |i| i + 1)
}

fn fmt_map<V: fmt::Display>(f: &mut fmt::Formatter<'_>, m: &BTreeMap<u32, V>) -> fmt::Result {
    write!(f, "{{")?;
    for (n, (i, e)) in m.iter().enumerate() {
        if n > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{i}: {e}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_map(f, &self.entries)
    }
}

/// An entry of an extended history: `k(a)`, `k(ab)` or `k(co)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ExtEntry {
    Tent(TransName, ActName),
    Ab(TransName),
    Co(TransName),
}

impl ExtEntry {
    pub fn name(&self) -> &TransName {
        match self {
            ExtEntry::Tent(k, _) | ExtEntry::Ab(k) | ExtEntry::Co(k) => k,
        }
    }

    fn map_name(&self, f: impl Fn(&TransName) -> TransName) -> ExtEntry {
        match self {
            ExtEntry::Tent(k, a) => ExtEntry::Tent(f(k), a.clone()),
            ExtEntry::Ab(k) => ExtEntry::Ab(f(k)),
            ExtEntry::Co(k) => ExtEntry::Co(f(k)),
        }
    }
}

impl fmt::Display for ExtEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtEntry::Tent(k, a) => write!(f, "{k}({a})"),
            ExtEntry::Ab(k) => write!(f, "{k}(ab)"),
            ExtEntry::Co(k) => write!(f, "{k}(co)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HistoryError {
    #[error("substitution target {0} already occurs in the equivalence")]
    TargetNotFresh(TransName),
}

/// An equivalence relation over a finite set of transaction names, kept
/// as its partition.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Equivalence {
    classes: BTreeSet<BTreeSet<TransName>>,
}

impl Equivalence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity(names: impl IntoIterator<Item = TransName>) -> Self {
        Equivalence {
            classes: names.into_iter().map(|k| BTreeSet::from([k])).collect(),
        }
    }

    pub fn universal(names: impl IntoIterator<Item = TransName>) -> Self {
        let all: BTreeSet<TransName> = names.into_iter().collect();
        Equivalence {
            classes: if all.is_empty() {
                BTreeSet::new()
            } else {
                BTreeSet::from([all])
            },
        }
    }

    /// Builds the partition generated by the given (possibly overlapping)
    /// groups.
    pub fn from_classes(groups: impl IntoIterator<Item = BTreeSet<TransName>>) -> Self {
        let mut e = Equivalence::new();
        for g in groups {
            e = e.merged(g);
        }
        e
    }

    pub fn classes(&self) -> impl Iterator<Item = &BTreeSet<TransName>> {
        self.classes.iter()
    }

    pub fn domain(&self) -> BTreeSet<TransName> {
        self.classes.iter().flatten().cloned().collect()
    }

    pub fn contains(&self, k: &TransName) -> bool {
        self.class_of(k).is_some()
    }

    pub fn class_of(&self, k: &TransName) -> Option<&BTreeSet<TransName>> {
        self.classes.iter().find(|c| c.contains(k))
    }

    pub fn related(&self, a: &TransName, b: &TransName) -> bool {
        self.class_of(a).is_some_and(|c| c.contains(b))
    }

    /// Names related to `k`, including `k` itself.
    pub fn closure_of(&self, k: &TransName) -> BTreeSet<TransName> {
        self.class_of(k)
            .cloned()
            .unwrap_or_else(|| BTreeSet::from([k.clone()]))
    }

    /// The least equivalence containing `self` in which all of `group`
    /// are related.
    pub fn merged(&self, group: BTreeSet<TransName>) -> Equivalence {
        if group.is_empty() {
            return self.clone();
        }
        let (touching, mut rest): (BTreeSet<_>, BTreeSet<_>) = self
            .classes
            .iter()
            .cloned()
            .partition(|c| c.iter().any(|k| group.contains(k)));
        let mut merged = group;
        for c in touching {
            merged.extend(c);
        }
        rest.insert(merged);
        Equivalence { classes: rest }
    }

    /// `σ(E)`: relates every name of `dom(σ)` to the fresh target.
    pub fn extend(&self, sigma: &NameSubstitution) -> Result<Equivalence, HistoryError> {
        if self.contains(&sigma.target) {
            return Err(HistoryError::TargetNotFresh(sigma.target.clone()));
        }
        let mut group = sigma.domain.clone();
        group.insert(sigma.target.clone());
        Ok(self.merged(group))
    }

    pub fn insert(&self, k: TransName) -> Equivalence {
        self.merged(BTreeSet::from([k]))
    }

    /// Restriction to `keep`, dropping emptied classes.
    pub fn restrict(&self, keep: impl Fn(&TransName) -> bool) -> Equivalence {
        Equivalence {
            classes: self
                .classes
                .iter()
                .map(|c| {
                    c.iter()
                        .filter(|k| keep(k))
                        .cloned()
                        .collect::<BTreeSet<_>>()
                })
                .filter(|c| !c.is_empty())
                .collect(),
        }
    }

    pub fn permute(&self, pi: &Permutation) -> Equivalence {
        Equivalence {
            classes: self
                .classes
                .iter()
                .map(|c| c.iter().map(|k| pi.apply(k)).collect())
                .collect(),
        }
    }

    /// `E_ext(k)`: the external names related to `k`.
    pub fn external_class(&self, k: &TransName) -> BTreeSet<TransName> {
        self.class_of(k)
            .map(|c| c.iter().filter(|l| l.is_external()).cloned().collect())
            .unwrap_or_default()
    }
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, c) in self.classes.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{")?;
            for (m, k) in c.iter().enumerate() {
                if m > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{k}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// An extended history `E; H`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ExtHistory {
    pub e: Equivalence,
    pub h: BTreeMap<u32, ExtEntry>,
}

impl ExtHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: ExtEntry) -> u32 {
        let i = next_index(&self.h);
        self.h.insert(i, entry);
        i
    }

    /// `H^trn`
    pub fn trn(&self) -> BTreeSet<TransName> {
        self.h.values().map(|e| e.name().clone()).collect()
    }

    pub fn hasco(&self) -> BTreeSet<TransName> {
        self.h
            .values()
            .filter_map(|e| match e {
                ExtEntry::Co(k) => Some(k.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn isr(&self) -> BTreeSet<TransName> {
        self.h
            .values()
            .filter_map(|e| match e {
                ExtEntry::Tent(k, _) => Some(k.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn hasab(&self) -> BTreeSet<TransName> {
        self.h
            .values()
            .filter_map(|e| match e {
                ExtEntry::Ab(k) => Some(k.clone()),
                _ => None,
            })
            .collect()
    }

    /// `Δ \co k`
    pub fn commit(&self, k: &TransName) -> ExtHistory {
        let related = self.e.closure_of(k);
        self.resolve(&related, ExtEntry::Co)
    }

    /// `Δ \ab k`
    pub fn abort(&self, k: &TransName) -> ExtHistory {
        let related = self.e.closure_of(k);
        self.resolve(&related, ExtEntry::Ab)
    }

    fn resolve(&self, related: &BTreeSet<TransName>, to: fn(TransName) -> ExtEntry) -> ExtHistory {
        ExtHistory {
            e: self.e.clone(),
            h: self
                .h
                .iter()
                .map(|(i, en)| match en {
                    ExtEntry::Tent(l, _) if related.contains(l) => (*i, to(l.clone())),
                    en => (*i, en.clone()),
                })
                .collect(),
        }
    }

    pub fn permute(&self, pi: &Permutation) -> ExtHistory {
        ExtHistory {
            e: self.e.permute(pi),
            h: self
                .h
                .iter()
                .map(|(i, en)| (*i, en.map_name(|k| pi.apply(k))))
                .collect(),
        }
    }

    /// Pairs `(k, k')` with `Δ ⊨ k =co k'`.
    pub fn eq_pairs(&self) -> BTreeSet<(TransName, TransName)> {
        let co = self.hasco();
        let mut out = BTreeSet::new();
        for k in &co {
            for l in &co {
                if self.e.related(k, l) {
                    out.insert((k.clone(), l.clone()));
                }
            }
        }
        out
    }

    /// Checks conditions (i) and (ii) of extended histories.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = BTreeSet::new();
        for (i, en) in &self.h {
            let k = en.name();
            if !k.is_external() {
                return Err(format!("entry {i} uses internal name {k}"));
            }
            if !seen.insert(k.clone()) {
                return Err(format!("name {k} labels two history entries"));
            }
        }
        let co = self.hasco();
        for k in self.e.domain().iter().filter(|k| k.is_external()) {
            if !seen.contains(k) {
                return Err(format!("external {k} is in E but not in the history"));
            }
        }
        for k in &seen {
            if !self.e.contains(k) {
                return Err(format!("history name {k} is missing from E"));
            }
        }
        for c in self.e.classes() {
            let ext: Vec<_> = c.iter().filter(|k| k.is_external()).collect();
            if ext.iter().any(|k| co.contains(*k)) && !ext.iter().all(|k| co.contains(*k)) {
                return Err(format!("class {c:?} mixes committed and uncommitted names"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ExtHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; ", self.e)?;
        fmt_map(f, &self.h)
    }
}

/// `Δ ⊨ k =co k'`
pub fn eq_holds(d: &ExtHistory, k: &TransName, l: &TransName) -> bool {
    let co = d.hasco();
    co.contains(k) && co.contains(l) && (k == l || d.e.related(k, l))
}

/// Same domain and the same committed actions at every index.
pub fn consistent(h1: &History, h2: &History) -> bool {
    h1.entries.len() == h2.entries.len()
        && h1.entries.iter().all(|(i, e1)| {
            let Some(e2) = h2.entries.get(i) else {
                return false;
            };
            match (e1, e2) {
                (Entry::Act(a), Entry::Act(b)) => a == b,
                (Entry::Act(_), _) | (_, Entry::Act(_)) => false,
                _ => true,
            }
        })
}

pub fn commit_consistent(d1: &ExtHistory, d2: &ExtHistory) -> bool {
    d1.hasco() == d2.hasco()
}

pub fn eq_consistent(d1: &ExtHistory, d2: &ExtHistory) -> bool {
    d1.eq_pairs() == d2.eq_pairs()
}

/// Very consistent extended histories.
pub fn vcons(d1: &ExtHistory, d2: &ExtHistory) -> bool {
    commit_consistent(d1, d2)
        && d1.h.keys().eq(d2.h.keys())
        && d1.h.iter().all(|(i, e1)| {
            let e2 = &d2.h[i];
            e1.name() == e2.name()
                && match (e1, e2) {
                    (ExtEntry::Tent(_, a), ExtEntry::Tent(_, b)) => a == b,
                    _ => true,
                }
        })
}

/// Action-consistent plain histories.
pub fn acons(h1: &History, h2: &History) -> bool {
    h1.entries
        .iter()
        .all(|(i, e1)| match (e1, h2.entries.get(i)) {
            (Entry::Tent(_, a), Some(Entry::Tent(_, b))) => a == b,
            _ => true,
        })
}

/// `H ≺ E; K`
pub fn precedes(h: &History, d: &ExtHistory) -> bool {
    h.entries.keys().eq(d.h.keys())
        && h.entries.iter().all(|(i, e)| match (e, &d.h[i]) {
            (Entry::Tent(k, a), ExtEntry::Tent(l, b)) => a == b && d.e.related(k, l),
            (Entry::Tent(..), _) => false,
            (Entry::TentStar(_) | Entry::Ab, ExtEntry::Ab(_)) => true,
            (Entry::TentStar(_) | Entry::Ab, _) => false,
            (Entry::Act(_), ExtEntry::Co(_)) => true,
            (Entry::Act(_), _) => false,
            (Entry::Star, _) => true,
        })
}

/// A configuration `⟨H • P⟩`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Configuration {
    pub history: History,
    pub process: Process,
}

impl Configuration {
    pub fn initial(p: Process) -> Self {
        Configuration {
            history: History::new(),
            process: p,
        }
    }

    pub fn names(&self) -> BTreeSet<TransName> {
        let mut s = free_transaction_names(&self.process);
        s.extend(self.history.names());
        s
    }

    pub fn permute(&self, pi: &Permutation) -> Configuration {
        Configuration {
            history: self.history.permute(pi),
            process: crate::syntax::apply_permutation(&self.process, pi),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let ftn = free_transaction_names(&self.process);
        for (i, e) in &self.history.entries {
            match e {
                Entry::TentStar(k) if ftn.contains(k) => {
                    return Err(format!(
                        "entry {i}: degenerate {k} still occurs in the process"
                    ))
                }
                Entry::Tent(k, _) if !ftn.contains(k) => {
                    return Err(format!("entry {i}: tentative {k} missing from the process"))
                }
                _ => {}
            }
        }
        crate::syntax::check_well_formed(&self.process).map_err(|v| v[0].to_string())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; {}", self.history, self.process)
    }
}

/// An extended configuration `⟨E; H • P⟩`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExtConfiguration {
    pub history: ExtHistory,
    pub process: Process,
}

impl ExtConfiguration {
    pub fn initial(p: Process) -> Self {
        ExtConfiguration {
            history: ExtHistory::new(),
            process: p,
        }
    }

    pub fn names(&self) -> BTreeSet<TransName> {
        let mut s = free_transaction_names(&self.process);
        s.extend(self.history.e.domain());
        s.extend(self.history.trn());
        s
    }

    /// External names of the configuration.
    pub fn eftn(&self) -> BTreeSet<TransName> {
        self.names()
            .into_iter()
            .filter(|k| k.is_external())
            .collect()
    }

    pub fn permute(&self, pi: &Permutation) -> ExtConfiguration {
        ExtConfiguration {
            history: self.history.permute(pi),
            process: crate::syntax::apply_permutation(&self.process, pi),
        }
    }

    /// Checks all four conditions of extended configurations plus
    /// well-formedness of the process.
    pub fn validate(&self) -> Result<(), String> {
        self.history.validate()?;
        let ftn = free_transaction_names(&self.process);
        if let Some(k) = ftn.intersection(&self.history.hasco()).next() {
            return Err(format!("committed {k} still occurs in the process"));
        }
        for c in self.history.e.classes() {
            if c.iter().filter(|k| ftn.contains(*k)).count() > 1 {
                return Err(format!("class {c:?} has two names in the process"));
            }
        }
        crate::syntax::check_well_formed(&self.process).map_err(|v| v[0].to_string())
    }
}

impl fmt::Display for ExtConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; {}", self.history, self.process)
    }
}

// ---- text formats ----

fn parse_index_map<V>(
    cur: &mut Cursor,
    mut entry: impl FnMut(&mut Cursor) -> Result<V, ParseError>,
) -> Result<BTreeMap<u32, V>, ParseError> {
    cur.expect_sym("{")?;
    let mut out = BTreeMap::new();
    if cur.eat_sym("}") {
        return Ok(out);
    }
    loop {
        let i = match cur.next() {
            Tok::Num(n) if n <= u32::MAX as u64 => n as u32,
            t => return cur.error(format!("expected an index, found {t}")),
        };
        cur.expect_sym(":")?;
        let v = entry(cur)?;
        if out.insert(i, v).is_some() {
            return cur.error(format!("index {i} given twice"));
        }
        if cur.eat_sym("}") {
            return Ok(out);
        }
        cur.expect_sym(",")?;
    }
}

fn parse_entry(cur: &mut Cursor) -> Result<Entry, ParseError> {
    if cur.eat_sym("*") {
        return Ok(Entry::Star);
    }
    if cur.is_kw("ab") && !matches!(cur.peek_at(1), Tok::Sym("(")) {
        cur.next();
        return Ok(Entry::Ab);
    }
    let named = matches!(cur.peek(), Tok::Hash(_) | Tok::Percent(_))
        || matches!(cur.peek_at(1), Tok::Sym("("));
    if !named {
        return Ok(Entry::Act(parse_action(cur)?));
    }
    let k = parse_trans_name(cur)?;
    cur.expect_sym("(")?;
    let e = if cur.eat_sym("*") {
        Entry::TentStar(k)
    } else {
        Entry::Tent(k, parse_action(cur)?)
    };
    cur.expect_sym(")")?;
    Ok(e)
}

fn parse_ext_entry(cur: &mut Cursor) -> Result<ExtEntry, ParseError> {
    let k = parse_trans_name(cur)?;
    cur.expect_sym("(")?;
    let e = if cur.eat_kw("ab") {
        ExtEntry::Ab(k)
    } else if cur.eat_kw("co") {
        ExtEntry::Co(k)
    } else {
        ExtEntry::Tent(k, parse_action(cur)?)
    };
    cur.expect_sym(")")?;
    Ok(e)
}

fn parse_equivalence_at(cur: &mut Cursor) -> Result<Equivalence, ParseError> {
    cur.expect_sym("{")?;
    let mut groups = Vec::new();
    if !cur.eat_sym("}") {
        loop {
            cur.expect_sym("{")?;
            let mut g = BTreeSet::new();
            if !cur.eat_sym("}") {
                loop {
                    g.insert(parse_trans_name(cur)?);
                    if cur.eat_sym("}") {
                        break;
                    }
                    cur.expect_sym(",")?;
                }
            }
            groups.push(g);
            if cur.eat_sym("}") {
                break;
            }
            cur.expect_sym(",")?;
        }
    }
    Ok(Equivalence::from_classes(groups))
}

fn whole<T>(
    src: &str,
    f: impl FnOnce(&mut Cursor) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let mut cur = Cursor::new(src)?;
    let v = f(&mut cur)?;
    cur.expect_eof()?;
    Ok(v)
}

/// Parses `{1: a, 2: k(b), 3: l(*), 4: ab, 5: *}`.
pub fn parse_history(src: &str) -> Result<History, ParseError> {
    whole(src, |c| {
        parse_index_map(c, parse_entry).map(|entries| History { entries })
    })
}

/// Parses a partition such as `{{#m1, #m2, %m3}, {#k}}`.
pub fn parse_equivalence(src: &str) -> Result<Equivalence, ParseError> {
    whole(src, parse_equivalence_at)
}

fn parse_ext_history_at(cur: &mut Cursor) -> Result<ExtHistory, ParseError> {
    let e = parse_equivalence_at(cur)?;
    cur.expect_sym(";")?;
    let h = parse_index_map(cur, parse_ext_entry)?;
    Ok(ExtHistory { e, h })
}

/// Parses `E; H`, e.g. `{{#k}, {#l}}; {1: #k(co), 2: #l(co)}`.
pub fn parse_ext_history(src: &str) -> Result<ExtHistory, ParseError> {
    whole(src, parse_ext_history_at)
}

/// Parses `H; P`.
pub fn parse_configuration(src: &str) -> Result<Configuration, ParseError> {
    whole(src, |c| {
        let history = History {
            entries: parse_index_map(c, parse_entry)?,
        };
        c.expect_sym(";")?;
        let process = parse_process_at(c)?;
        Ok(Configuration { history, process })
    })
}

/// Parses `E; H; P`.
pub fn parse_ext_configuration(src: &str) -> Result<ExtConfiguration, ParseError> {
    whole(src, |c| {
        let history = parse_ext_history_at(c)?;
        c.expect_sym(";")?;
        let process = parse_process_at(c)?;
        Ok(ExtConfiguration { history, process })
    })
}
