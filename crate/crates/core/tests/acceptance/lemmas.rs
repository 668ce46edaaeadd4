//! Structural facts about the transition systems, asserted along random
//! traces of generated processes.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use tccs::gen::{self, ProcessShape, Rng8};
use tccs::history::{eq_holds, precedes, Configuration, Equivalence, ExtConfiguration};
use tccs::lts::{
    fresh_external, tau_closure, weak_successors, ExtLabel, ExtLts, Rule, Semantics, StdLabel,
    StdLts,
};
use tccs::reduction::{
    enumerate_action_steps, enumerate_reconfig_steps, ActionTransition, Reconfig, Scope,
};
use tccs::syntax::{
    apply_permutation, check_well_formed, free_transaction_names, ActName, NameKind, Permutation,
    Process, TransName,
};

const TRACES: usize = 1000;
const TRACE_LEN: usize = 8;
const CLOSURE_BOUND: usize = 200;

type Names = BTreeSet<TransName>;

#[derive(Default)]
struct Family {
    checks: usize,
    skipped: usize,
    violations: usize,
    shown: Vec<String>,
}

impl Family {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.shown.len() < 3 {
                self.shown.push(what());
            }
        }
    }
}

fn alphabet(p: &Process) -> BTreeSet<ActName> {
    let mut a = p.free_actions();
    a.insert(ActName::input("a"));
    a
}

fn random_process(rng: &mut Rng8) -> Process {
    gen::process(rng, &ProcessShape::default())
}

fn label_names(l: &ExtLabel) -> Names {
    match l {
        ExtLabel::Tau => Names::new(),
        ExtLabel::Act(k, _) => Names::from([k.clone()]),
        ExtLabel::Co(a) => a.clone(),
    }
}

/// Every class of `e1` lies inside a class of `e2`.
fn finer(e1: &Equivalence, e2: &Equivalence) -> bool {
    e1.classes().filter(|c| c.len() > 1).all(|c| {
        e2.class_of(c.first().unwrap())
            .is_some_and(|d| c.is_subset(d))
    })
}

fn same_relation(e1: &Equivalence, e2: &Equivalence) -> bool {
    finer(e1, e2) && finer(e2, e1)
}

fn ext_trace(rng: &mut Rng8, commit_sensitive: bool) -> Vec<(ExtConfiguration, Option<ExtLabel>)> {
    let p = random_process(rng);
    let alph = alphabet(&p);
    let sem = if commit_sensitive {
        ExtLts::commit_sensitive(alph)
    } else {
        ExtLts::extended(alph)
    };
    let len = rng.gen_range(1..=TRACE_LEN);
    gen::walk(&sem, &ExtConfiguration::initial(p), len, rng)
}

fn transitions(
    trace: &[(ExtConfiguration, Option<ExtLabel>)],
) -> impl Iterator<Item = (&ExtConfiguration, &ExtLabel, &ExtConfiguration)> {
    trace
        .windows(2)
        .map(|w| (&w[0].0, w[1].1.as_ref().unwrap(), &w[1].0))
}

/// Facts common to the extended and commit-sensitive systems: the new
/// history is valid and committed names are never merged afterwards.
fn common_facts(c1: &ExtConfiguration, c2: &ExtConfiguration, f: &mut Family) {
    f.check(c2.validate().is_ok(), || format!("invalid target {c2}"));
    let (h1, e2) = (c1.history.hasco(), &c2.history.e);
    f.check(
        h1.iter().all(|l| {
            h1.iter()
                .all(|m| !e2.related(l, m) || l == m || c1.history.e.related(l, m))
        }),
        || format!("committed names merged from {c1} to {c2}"),
    );
}

fn extended_steps(rng: &mut Rng8) -> Family {
    let mut f = Family::default();
    for _ in 0..TRACES {
        let trace = ext_trace(rng, false);
        f.check(trace[0].0.validate().is_ok(), || {
            format!("invalid start {}", trace[0].0)
        });
        for (c1, z, c2) in transitions(&trace) {
            let (d1, d2) = (&c1.history, &c2.history);
            let zn = label_names(z);
            f.check(zn.is_disjoint(&c1.names()), || {
                format!("{z} not fresh for {c1}")
            });
            f.check(c2.eftn().is_subset(&(&c1.eftn() | &zn)), || {
                format!("eftn grows beyond {z}: {c1} to {c2}")
            });
            common_facts(c1, c2, &mut f);
            f.check(finer(&d1.e, &d2.e), || {
                format!("equivalence shrinks: {c1} to {c2}")
            });
            f.check(d2.isr().is_subset(&(&d1.isr() | &zn)), || {
                format!("IsR grows: {c1} to {c2}")
            });
            f.check(
                d1.hasco().is_subset(&d2.hasco())
                    && d2.hasco().is_subset(&(&d1.hasco() | &d1.isr())),
                || format!("Hasco out of range: {c1} to {c2}"),
            );
        }
    }
    f
}

fn cs_steps(rng: &mut Rng8) -> Family {
    let mut f = Family::default();
    for _ in 0..TRACES {
        let trace = ext_trace(rng, true);
        for (c1, z, c2) in transitions(&trace) {
            let (d1, d2) = (&c1.history, &c2.history);
            common_facts(c1, c2, &mut f);
            let mut names: Names = &d1.trn() | &d2.trn();
            match z {
                ExtLabel::Co(a) => {
                    names.extend(a.iter().cloned());
                    f.check(a.is_subset(&d1.isr()), || {
                        format!("{z} outside IsR of {c1}")
                    });
                    f.check(
                        a.iter()
                            .all(|l| a.iter().all(|m| l == m || d1.e.related(l, m))),
                        || format!("{z} not one class of {c1}"),
                    );
                    f.check(c1.eftn() == c2.eftn(), || {
                        format!("{z} changes eftn of {c1}")
                    });
                    f.check(same_relation(&d1.e, &d2.e), || {
                        format!("{z} changes the equivalence of {c1}")
                    });
                    f.check(d2.isr() == &d1.isr() - a, || {
                        format!("{z} IsR mismatch: {c1} to {c2}")
                    });
                    f.check(d2.hasco() == &d1.hasco() | a, || {
                        format!("{z} Hasco mismatch: {c1} to {c2}")
                    });
                }
                _ => {
                    let zn = label_names(z);
                    f.check(zn.is_disjoint(&c1.names()), || {
                        format!("{z} not fresh for {c1}")
                    });
                    f.check(c2.eftn().is_subset(&(&c1.eftn() | &zn)), || {
                        format!("eftn grows: {c1} to {c2}")
                    });
                    f.check(finer(&d1.e, &d2.e), || {
                        format!("equivalence shrinks: {c1} to {c2}")
                    });
                    f.check(d2.isr().is_subset(&(&d1.isr() | &zn)), || {
                        format!("IsR grows: {c1} to {c2}")
                    });
                    f.check(d1.hasco() == d2.hasco(), || {
                        format!("{z} commits: {c1} to {c2}")
                    });
                }
            }
            for l in &names {
                for m in &names {
                    let (before, after) = (eq_holds(d1, l, m), eq_holds(d2, l, m));
                    let ok = match z {
                        ExtLabel::Co(a) => {
                            (!before || after)
                                && (!(a.contains(l) && a.contains(m)) || after)
                                && (!after || before || (a.contains(l) && a.contains(m)))
                        }
                        _ => before == after,
                    };
                    f.check(ok, || {
                        format!("{l} =co {m} changes across {z}: {c1} to {c2}")
                    });
                }
            }
        }
    }
    f
}

/// Extended and commit-sensitive steps convert into each other.
fn conversions(rng: &mut Rng8) -> Family {
    let mut f = Family::default();
    for _ in 0..TRACES {
        let trace = ext_trace(rng, false);
        let alph = alphabet(&trace[0].0.process);
        let (ext, cs) = (
            ExtLts::extended(alph.clone()),
            ExtLts::commit_sensitive(alph),
        );
        for (c1, _) in &trace {
            let k = fresh_external(&ext, c1, &BTreeSet::new());
            let e: BTreeSet<(ExtLabel, ExtConfiguration)> = ext
                .steps(c1, &k)
                .into_iter()
                .map(|s| (s.label, s.target))
                .collect();
            let c: BTreeSet<(ExtLabel, ExtConfiguration)> = cs
                .steps(c1, &k)
                .into_iter()
                .map(|s| (s.label, s.target))
                .collect();
            for (z, c2) in &e {
                let gained = &c2.history.hasco() - &c1.history.hasco();
                let ok = if gained.is_empty() {
                    c.contains(&(z.clone(), c2.clone()))
                } else {
                    *z == ExtLabel::Tau
                        && c1.history.hasco().is_subset(&c2.history.hasco())
                        && c.contains(&(ExtLabel::Co(gained), c2.clone()))
                };
                f.check(ok, || {
                    format!("{z} to {c2} from {c1} has no commit-sensitive image")
                });
            }
            for (z, c2) in &c {
                let back = match z {
                    ExtLabel::Co(_) => ExtLabel::Tau,
                    other => other.clone(),
                };
                f.check(e.contains(&(back, c2.clone())), || {
                    format!("{z} to {c2} from {c1} has no extended image")
                });
            }
        }
    }
    f
}

fn subsets(r: &Names) -> Vec<Names> {
    let v: Vec<&TransName> = r.iter().collect();
    (1..1usize << v.len())
        .map(|mask| {
            (0..v.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| v[i].clone())
                .collect()
        })
        .collect()
}

/// A joint commit reachable by internal moves is a weak `co` move.
fn joint_commits(rng: &mut Rng8) -> Family {
    let mut f = Family::default();
    for _ in 0..TRACES {
        let trace = ext_trace(rng, false);
        let alph = alphabet(&trace[0].0.process);
        let (ext, cs) = (
            ExtLts::extended(alph.clone()),
            ExtLts::commit_sensitive(alph),
        );
        for (c, _) in &trace {
            joint_commit_facts(&ext, &cs, c, &mut f);
        }
    }
    f
}

fn joint_commit_facts(ext: &ExtLts, cs: &ExtLts, c: &ExtConfiguration, f: &mut Family) {
    let r = c.history.isr();
    if r.is_empty() || r.len() > 3 {
        return;
    }
    let (closure, exhaustive) = tau_closure(ext, c, CLOSURE_BOUND);
    if !exhaustive {
        f.skipped += 1;
        return;
    }
    let k = fresh_external(cs, c, &BTreeSet::new());
    for a in subsets(&r) {
        let premise = c.history.hasco().is_disjoint(&r)
            && closure.iter().all(|s| {
                let n = a.intersection(&s.history.hasco()).count();
                n == 0 || n == a.len()
            });
        if !premise {
            continue;
        }
        let (after, exhaustive) =
            weak_successors(cs, c, Some(&ExtLabel::Co(a.clone())), &k, CLOSURE_BOUND);
        if !exhaustive {
            f.skipped += 1;
            continue;
        }
        let after: BTreeSet<ExtConfiguration> = after.into_iter().collect();
        let rest = &r - &a;
        for s in &closure {
            let hasco = s.history.hasco();
            if a.is_subset(&hasco) && rest.is_disjoint(&hasco) {
                f.check(after.contains(s), || {
                    format!("{s} not reached from {c} by a weak co {a:?}")
                });
            }
        }
    }
}

fn scope_image(
    t: &ActionTransition,
    pi: &Permutation,
) -> (Scope, String, Names, TransName, Process) {
    let scope = match &t.label.scope {
        Scope::Plain => Scope::Plain,
        Scope::Trans(m) => Scope::Trans(pi.apply(m)),
    };
    let s = t.sigma.permute(pi);
    (
        scope,
        t.label.prefix.to_string(),
        s.domain,
        s.target,
        apply_permutation(&t.target, pi),
    )
}

fn action_key(t: &ActionTransition) -> (Scope, String, Names, TransName, Process) {
    scope_image(t, &Permutation::identity())
}

fn reconfig_key(l: &Reconfig, pi: &Permutation) -> Reconfig {
    match l {
        Reconfig::Co(k) => Reconfig::Co(pi.apply(k)),
        Reconfig::Ab(k) => Reconfig::Ab(pi.apply(k)),
        Reconfig::New(k) => Reconfig::New(pi.apply(k)),
    }
}

fn reconfig_steps(p: &Process, fresh: &TransName) -> Vec<(Reconfig, Process)> {
    enumerate_reconfig_steps(p, fresh)
        .into_iter()
        .map(|t| (t.label, t.target))
        .collect()
}

fn abort(p: &Process, k: &TransName) -> Option<Process> {
    reconfig_steps(
        p,
        &TransName::fresh(NameKind::Internal, &free_transaction_names(p)),
    )
    .into_iter()
    .find(|(l, _)| *l == Reconfig::Ab(k.clone()))
    .map(|(_, q)| q)
}

fn substitution_facts(e: &Equivalence, t: &ActionTransition, pi: &Permutation, f: &mut Family) {
    let sigma = &t.sigma;
    let mut probe: Names = e.domain();
    probe.extend(sigma.domain.iter().cloned());
    probe.insert(sigma.target.clone());
    let sp = sigma.permute(pi);
    f.check(
        probe
            .iter()
            .all(|n| pi.apply(&sigma.apply(n)) == sp.apply(&pi.apply(n))),
        || format!("substitution {:?} not equivariant", sigma.domain),
    );
    let Ok(extended) = e.extend(sigma) else {
        f.check(false, || {
            format!("target {} not fresh for {e}", sigma.target)
        });
        return;
    };
    let mut joined: Names = sigma.domain.clone();
    joined.insert(sigma.target.clone());
    for n in &sigma.domain {
        joined.extend(e.closure_of(n));
    }
    for k in &probe {
        for l in &probe {
            let expected = k == l || e.related(k, l) || (joined.contains(k) && joined.contains(l));
            f.check((k == l || extended.related(k, l)) == expected, || {
                format!("{k}, {l} in the extension of {e}")
            });
        }
    }
    let lhs = e.permute(pi).extend(&sp);
    f.check(lhs.as_ref() == Ok(&extended.permute(pi)), || {
        format!("extension of {e} not equivariant")
    });
}

/// Process-level facts: action steps, reconfigurations and their
/// interplay with aborts.
fn process_steps(rng: &mut Rng8) -> Family {
    let mut f = Family::default();
    for _ in 0..TRACES {
        let trace = ext_trace(rng, false);
        let (c, _) = trace.choose(rng).unwrap();
        let p = &c.process;
        if check_well_formed(p).is_err() {
            f.skipped += 1;
            continue;
        }
        let ftn = free_transaction_names(p);
        let taken = c.names();
        for kind in [NameKind::Internal, NameKind::External] {
            let l = TransName::fresh(kind, &taken);
            let mut support = ftn.clone();
            support.insert(l.clone());
            let pi = gen::permutation(rng, &support);
            let steps = enumerate_action_steps(p, &l);
            let image: BTreeSet<_> =
                enumerate_action_steps(&apply_permutation(p, &pi), &pi.apply(&l))
                    .iter()
                    .map(action_key)
                    .collect();
            for t in &steps {
                let q = &t.target;
                let ftn_q = free_transaction_names(q);
                f.check(check_well_formed(q).is_ok(), || {
                    format!("{p} steps to ill-formed {q}")
                });
                f.check(ftn_q.is_subset(&support), || {
                    format!("{q} has names beyond {p} and {l}")
                });
                f.check(image.contains(&scope_image(t, &pi)), || {
                    format!("step of {p} to {q} not equivariant")
                });
                if t.label.scope != Scope::Plain {
                    f.check(
                        t.sigma.target == l && t.sigma.domain.is_subset(&(&ftn - &ftn_q)),
                        || format!("substitution of {p} to {q}"),
                    );
                    substitution_facts(&c.history.e, t, &pi, &mut f);
                }
            }
        }
        let m = TransName::fresh(NameKind::Internal, &taken);
        let recon = reconfig_steps(p, &m);
        let mut support = taken.clone();
        support.insert(m.clone());
        let pi = gen::permutation(rng, &support);
        let permuted: BTreeSet<(Reconfig, Process)> =
            reconfig_steps(&apply_permutation(p, &pi), &pi.apply(&m))
                .into_iter()
                .collect();
        for (b, q) in &recon {
            f.check(check_well_formed(q).is_ok(), || {
                format!("{b} of {p} is ill-formed")
            });
            let image = (reconfig_key(b, &pi), apply_permutation(q, &pi));
            f.check(permuted.contains(&image), || {
                format!("{b} of {p} not equivariant")
            });
        }
        abort_facts(p, &taken, &m, &recon, &mut f);
    }
    f
}

fn abort_facts(
    p: &Process,
    taken: &Names,
    m: &TransName,
    recon: &[(Reconfig, Process)],
    f: &mut Family,
) {
    let mut aborts: BTreeMap<TransName, BTreeSet<Process>> = BTreeMap::new();
    for (b, q) in recon {
        if let Reconfig::Ab(k) = b {
            aborts.entry(k.clone()).or_default().insert(q.clone());
        }
    }
    for (k, targets) in &aborts {
        f.check(targets.len() == 1, || {
            format!("ab {k} of {p} is not deterministic")
        });
        let p_ab = targets.first().unwrap();
        for (b, q) in recon {
            let name = match b {
                Reconfig::Co(l) | Reconfig::Ab(l) | Reconfig::New(l) => l,
            };
            if name == k {
                continue;
            }
            let Some(q_ab) = abort(q, k) else {
                f.check(false, || format!("{b} of {p} loses {k}"));
                continue;
            };
            let after = reconfig_steps(p_ab, m);
            f.check(after.contains(&(b.clone(), q_ab)), || {
                format!("ab {k} and {b} of {p} do not commute")
            });
        }
        let l = TransName::fresh(NameKind::Internal, taken);
        let after: BTreeSet<_> = enumerate_action_steps(p_ab, &l)
            .iter()
            .map(action_key)
            .collect();
        for t in enumerate_action_steps(p, &l) {
            if !t.sigma.domain.contains(k) {
                let ok = abort(&t.target, k).is_some_and(|q| {
                    let mut key = action_key(&t);
                    key.4 = q;
                    after.contains(&key)
                });
                f.check(ok, || format!("ab {k} and a step of {p} do not commute"));
            } else {
                let mut lhs = Some(p_ab.clone());
                for n in t.sigma.domain.iter().filter(|n| *n != k) {
                    lhs = lhs.and_then(|x| abort(&x, n));
                }
                let rhs = abort(&t.target, &t.sigma.target);
                f.check(lhs.is_some() && lhs == rhs, || {
                    format!("ab {k} of {p} against the merged abort")
                });
            }
        }
    }
}

fn external_names(c: &Configuration) -> Names {
    c.names().into_iter().filter(|k| k.is_external()).collect()
}

fn related(c: &Configuration, d: &ExtConfiguration) -> bool {
    precedes(&c.history, &d.history) && c.process == d.process
}

/// Standard and extended runs of the same process shadow each other.
fn lockstep(rng: &mut Rng8) -> Family {
    let mut f = Family::default();
    for _ in 0..TRACES {
        let p = random_process(rng);
        let ext = ExtLts::extended(alphabet(&p));
        let (mut c, mut d) = (
            Configuration::initial(p.clone()),
            ExtConfiguration::initial(p),
        );
        for _ in 0..rng.gen_range(1..=TRACE_LEN) {
            let k = TransName::fresh(NameKind::External, &(&c.names() | &d.names()));
            let align = Permutation::swap(
                TransName::fresh(NameKind::Internal, &c.names()),
                TransName::fresh(NameKind::Internal, &d.names()),
            );
            let c_steps: Vec<_> = StdLts.steps(&c, &k);
            let d_steps: Vec<_> = ext.steps(&d, &k);
            let matching =
                |cl: &StdLabel, ct: &Configuration, dl: &ExtLabel, dt: &ExtConfiguration| {
                    let labels = match (cl, dl) {
                        (StdLabel::Tau, ExtLabel::Tau) => true,
                        (StdLabel::Trans(x), ExtLabel::Act(y, _)) => x == y,
                        _ => false,
                    };
                    if !labels {
                        return None;
                    }
                    [ct.clone(), ct.permute(&align)]
                        .into_iter()
                        .find(|x| related(x, dt))
                };
            let mut moves = Vec::new();
            for ds in d_steps.iter().filter(|s| s.rule != Rule::Star) {
                let found = c_steps
                    .iter()
                    .find_map(|cs| matching(&cs.label, &cs.target, &ds.label, &ds.target));
                f.check(found.is_some(), || {
                    format!("{} of {d} unmatched from {c}", ds.label)
                });
                moves.extend(found.map(|x| (x, ds.target.clone())));
            }
            for cs in &c_steps {
                if cs.label == StdLabel::Tau
                    && !external_names(&cs.target).is_subset(&external_names(&c))
                {
                    continue;
                }
                let found = d_steps.iter().find_map(|ds| {
                    matching(&cs.label, &cs.target, &ds.label, &ds.target)
                        .map(|x| (x, ds.target.clone()))
                });
                f.check(found.is_some(), || {
                    format!("{} of {c} unmatched from {d}", cs.label)
                });
                moves.extend(found);
            }
            let Some((c2, d2)) = moves.choose(rng).cloned() else {
                break;
            };
            (c, d) = (c2, d2);
        }
    }
    f
}

pub fn criterion() -> Result<String, String> {
    let families: [(&str, fn(&mut Rng8) -> Family); 6] = [
        ("extended steps", extended_steps),
        ("commit-sensitive steps", cs_steps),
        ("ext/cs conversions", conversions),
        ("joint commits", joint_commits),
        ("process steps", process_steps),
        ("std/ext lockstep", lockstep),
    ];
    let mut rng = gen::rng(11);
    let mut parts = Vec::new();
    let mut errors = Vec::new();
    for (name, run) in families {
        let f = run(&mut rng);
        parts.push(format!(
            "{name}: {} checks, {} skipped",
            f.checks, f.skipped
        ));
        if f.violations > 0 {
            errors.push(format!(
                "{name}: {} violations, e.g. {:?}",
                f.violations, f.shown
            ));
        }
        if f.checks == 0 {
            errors.push(format!("{name}: nothing checked"));
        }
    }
    if errors.is_empty() {
        Ok(format!("{TRACES} traces per family; {}", parts.join("; ")))
    } else {
        Err(errors.join("; "))
    }
}
