//! Library transition enumerators against the naive rule interpreter on
//! every small term, and bounded weak closure against plain search.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Debug;

use tccs::history::{Configuration, ExtConfiguration};
use tccs::lts::{
    fresh_external, tau_closure, weak_successors, ExtLabel, ExtLts, Semantics, StdLabel, StdLts,
};
use tccs::reduction::{enumerate_action_steps, enumerate_reconfig_steps};
use tccs::syntax::{ActName, Process, TransName};

use crate::common::terms::Enumerator;
use crate::common::{ext_steps, std_steps, std_steps_of, tau_reach, weak_reach};

/// Closure cap for terms with recursion, which may be infinite-state.
const REC_CAP: usize = 30;
const CAP: usize = 100_000;

#[derive(Default)]
struct Tally {
    terms: usize,
    states: usize,
    closures: usize,
    inconclusive: usize,
    mismatches: Vec<String>,
}

impl Tally {
    fn mismatch(&mut self, what: String) {
        if self.mismatches.len() < 5 {
            self.mismatches.push(what);
        } else {
            self.mismatches.push(String::new());
        }
    }
}

fn process_level(p: &Process, t: &mut Tally) {
    for m in [TransName::internal("%m1"), TransName::external("m1")] {
        let lib: BTreeSet<_> = enumerate_action_steps(p, &m)
            .into_iter()
            .map(|s| (s.label.to_string(), s.sigma.domain, s.target))
            .collect();
        let naive: BTreeSet<_> = crate::common::naive::actions(p, &m)
            .iter()
            .map(|j| j.key())
            .collect();
        if lib != naive {
            t.mismatch(format!("action steps of {p}"));
        }
        let lib: BTreeSet<_> = enumerate_reconfig_steps(p, &m)
            .into_iter()
            .map(|s| (s.label.to_string(), s.target))
            .collect();
        let naive: BTreeSet<_> = crate::common::naive::reconfigurations(p, &m)
            .into_iter()
            .collect();
        if lib != naive {
            t.mismatch(format!("reconfigurations of {p}"));
        }
    }
}

fn one_step<S: Semantics>(
    sem: &S,
    s: &S::State,
    oracle: &dyn Fn(&S::State, &TransName) -> Vec<(S::Label, S::State)>,
    t: &mut Tally,
) {
    let k = fresh_external(sem, s, &BTreeSet::new());
    let lib: BTreeSet<(S::Label, S::State)> = sem
        .steps(s, &k)
        .into_iter()
        .map(|st| (st.label, st.target))
        .collect();
    let naive: BTreeSet<(S::Label, S::State)> = oracle(s, &k).into_iter().collect();
    t.states += 1;
    if lib != naive {
        t.mismatch(format!("steps of {s}"));
    }
}

/// Compares one closure; `Some(states)` when both sides were exhaustive.
fn compare<T: Ord + Clone + Debug>(
    lib: (Vec<T>, bool),
    oracle: Option<BTreeSet<T>>,
    what: impl FnOnce() -> String,
    t: &mut Tally,
) -> Option<Vec<T>> {
    t.closures += 1;
    match (lib.1, oracle) {
        (true, Some(o)) => {
            if lib.0.iter().cloned().collect::<BTreeSet<T>>() != o {
                t.mismatch(what());
                return None;
            }
            Some(lib.0)
        }
        (false, None) => {
            t.inconclusive += 1;
            None
        }
        (ex, _) => {
            t.mismatch(format!("{} (library exhaustive: {ex})", what()));
            None
        }
    }
}

fn std_suite(p: &Process, cap: usize, seen: &mut HashSet<Configuration>, t: &mut Tally) {
    let sem = StdLts;
    let c0 = Configuration::initial(p.clone());
    let k = fresh_external(&sem, &c0, &BTreeSet::new());
    let tau = |c: &Configuration| std_steps_of(c, None);
    let full = |c: &Configuration| std_steps(c, &k);
    let Some(pre) = compare(
        tau_closure(&sem, &c0, cap),
        tau_reach(&sem, &c0, &tau, cap),
        || format!("std closure of {p}"),
        t,
    ) else {
        return;
    };
    let label = StdLabel::Trans(k.clone());
    let post = compare(
        weak_successors(&sem, &c0, Some(&label), &k, cap),
        weak_reach(&sem, &c0, &label, &tau, &full, cap),
        || format!("std weak {label} of {p}"),
        t,
    )
    .unwrap_or_default();
    for s in pre.into_iter().chain(post) {
        if seen.insert(s.clone()) {
            one_step(&sem, &s, &|c, k| std_steps(c, k), t);
        }
    }
}

fn ext_suite(p: &Process, cap: usize, seen: &mut HashSet<ExtConfiguration>, t: &mut Tally) {
    let alphabet: BTreeSet<ActName> = p.free_actions();
    let ext = ExtLts::extended(alphabet.clone());
    let cs = ExtLts::commit_sensitive(alphabet.clone());
    let c0 = ExtConfiguration::initial(p.clone());
    let k = fresh_external(&ext, &c0, &BTreeSet::new());
    let tau = |c: &ExtConfiguration| ext_steps(c, None, &alphabet, false);
    let full = |c: &ExtConfiguration| ext_steps(c, Some(&k), &alphabet, false);
    let cs_tau = |c: &ExtConfiguration| ext_steps(c, None, &alphabet, true);
    compare(
        tau_closure(&cs, &c0, cap),
        tau_reach(&cs, &c0, &cs_tau, cap),
        || format!("cs closure of {p}"),
        t,
    );
    let Some(mut states) = compare(
        tau_closure(&ext, &c0, cap),
        tau_reach(&ext, &c0, &tau, cap),
        || format!("ext closure of {p}"),
        t,
    ) else {
        return;
    };
    for a in &alphabet {
        let label = ExtLabel::Act(k.clone(), a.clone());
        if let Some(post) = compare(
            weak_successors(&ext, &c0, Some(&label), &k, cap),
            weak_reach(&ext, &c0, &label, &tau, &full, cap),
            || format!("ext weak {label} of {p}"),
            t,
        ) {
            states.extend(post);
        }
    }
    for s in states {
        if seen.insert(s.clone()) {
            one_step(&ext, &s, &|c, k| ext_steps(c, Some(k), &alphabet, false), t);
            one_step(&cs, &s, &|c, k| ext_steps(c, Some(k), &alphabet, true), t);
        }
    }
}

pub fn criterion() -> Result<String, String> {
    let terms = Enumerator::new(&["a", "b"], &["k", "l"]).all(6);
    let mut t = Tally::default();
    let mut seen_std = HashSet::new();
    let mut seen_ext = HashSet::new();
    for p in &terms {
        t.terms += 1;
        process_level(p, &mut t);
        let cap = if p.contains_rec() { REC_CAP } else { CAP };
        std_suite(p, cap, &mut seen_std, &mut t);
        ext_suite(p, cap, &mut seen_ext, &mut t);
    }
    let summary = format!(
        "{} terms, {} configurations stepped, {} closures ({} cut off at the cap for recursive terms)",
        t.terms, t.states, t.closures, t.inconclusive
    );
    if t.mismatches.is_empty() {
        Ok(summary)
    } else {
        let shown: Vec<&String> = t.mismatches.iter().filter(|m| !m.is_empty()).collect();
        Err(format!(
            "{} mismatches, e.g. {:?}; {summary}",
            t.mismatches.len(),
            shown
        ))
    }
}
