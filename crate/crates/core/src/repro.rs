//! Built-in experiments reproducing the worked examples and sampling the
//! theorem-level properties. Each experiment is self-contained.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::bisim::{check_bisim, verify_relation, BisimKind, Config, Verdict};
use crate::gen;
use crate::history::{commit_consistent, eq_consistent, parse_configuration, ExtConfiguration};
use crate::library;
use crate::logic::{
    parse_formula, sat, translate_canco_to_hasco, translate_eq_to_canco, translate_hasco_to_eq,
    Logic, Relation, SatOptions, SatResult,
};
use crate::lts::{weak_successors, ExtLabel, ExtLts, SearchBounds, Semantics};
use crate::reduction::{reduction_steps, weak_barb, Verdict3};
use crate::syntax::{canonical_names, parse_process, ActName, NameKind, Process, TransName};

#[derive(Clone, Copy, Debug)]
pub struct ReproOptions {
    pub bounds: SearchBounds,
    pub seed: u64,
    /// Sample size of the property experiments.
    pub samples: usize,
}

impl Default for ReproOptions {
    fn default() -> Self {
        ReproOptions {
            bounds: SearchBounds::default(),
            seed: 0,
            samples: 40,
        }
    }
}

/// Outcome of one experiment: named checks with their results.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Report {
    pub id: &'static str,
    pub summary: &'static str,
    pub checks: Vec<(String, bool)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

pub struct Experiment {
    pub id: &'static str,
    pub summary: &'static str,
    run: fn(&ReproOptions, &mut Vec<(String, bool)>),
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        id: "observer",
        summary: "P2 and Q2 are told apart by an observer that waits for both barbs",
        run: observer,
    },
    Experiment {
        id: "tentative-branch",
        summary: "a tentative branch that can never commit is unobservable",
        run: tentative_branch,
    },
    Experiment {
        id: "merged-history",
        summary: "Q2 reaches a configuration whose history names are merged; P2 does not",
        run: merged_history,
    },
    Experiment {
        id: "hasco-formula",
        summary: "an L_Hasco formula separating Q2 from P2",
        run: hasco_formula,
    },
    Experiment {
        id: "eq-formula",
        summary: "x =co y separates one transaction from two",
        run: eq_formula,
    },
    Experiment {
        id: "joint-commit",
        summary: "configurations agreeing on committed names but not on =co",
        run: joint_commit,
    },
    Experiment {
        id: "canco-formula",
        summary: "a joint commit label separates Q2 from P2",
        run: canco_formula,
    },
    Experiment {
        id: "canco-to-hasco",
        summary: "commit modalities translated into L_Hasco",
        run: canco_to_hasco,
    },
    Experiment {
        id: "eq-to-canco",
        summary: "=co translated into commit modalities",
        run: eq_to_canco,
    },
    Experiment {
        id: "standard-vs-hasco",
        summary: "the standard and hasco bisimulations agree on random processes",
        run: standard_vs_hasco,
    },
    Experiment {
        id: "coincidence",
        summary: "all three history-aware bisimulations agree on random processes",
        run: coincidence,
    },
    Experiment {
        id: "ch-preservation",
        summary: "translating L_Canco into L_Hasco preserves satisfaction",
        run: ch_preservation,
    },
    Experiment {
        id: "ec-preservation",
        summary: "translating L_Eq into L_Canco preserves satisfaction",
        run: ec_preservation,
    },
];

pub fn find(id: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.id == id)
}

pub fn run(e: &Experiment, opts: &ReproOptions) -> Report {
    let mut checks = Vec::new();
    (e.run)(opts, &mut checks);
    Report {
        id: e.id,
        summary: e.summary,
        checks,
    }
}

fn push(out: &mut Vec<(String, bool)>, what: impl Into<String>, ok: bool) {
    out.push((what.into(), ok));
}

fn sat_opts(o: &ReproOptions) -> SatOptions {
    SatOptions {
        bounds: o.bounds,
        strong_diamond_tau: false,
    }
}

fn sat_named(o: &ReproOptions, logic: Logic, process: &str, formula: &str) -> SatResult {
    let phi = parse_formula(formula).expect("built-in formula parses");
    sat(logic, &library::ext_initial(process), &phi, sat_opts(o))
        .expect("built-in formula is valid")
}

fn verdict(kind: BisimKind, p: &Process, q: &Process, b: &SearchBounds) -> Verdict {
    check_bisim(
        kind,
        &Config::initial(kind, p.clone()),
        &Config::initial(kind, q.clone()),
        b,
    )
    .expect("kinds match initial configurations")
}

/// All reducts of `p` up to renaming, or `None` past `max`.
fn reducts(p: &Process, max: usize) -> Option<Vec<Process>> {
    let start = canonical_names(p).0;
    let mut seen = HashSet::from([start.clone()]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(q) = queue.pop_front() {
        for r in reduction_steps(&q) {
            let r = canonical_names(&r).0;
            if seen.insert(r.clone()) {
                if seen.len() > max {
                    return None;
                }
                order.push(r.clone());
                queue.push_back(r);
            }
        }
    }
    Some(order)
}

pub const MERGED_RESIDUAL: &str =
    "txn m { co } else { 0 } | txn m { co } else { 0 } | txn m { w_1 | co } else { 0 } | txn m { w_2 | co } else { 0 }";
pub const SPLIT_RESIDUAL: &str =
    "0 | 0 | txn m2 { co } else { 0 } | txn m2 { w_2 | co } else { 0 }";

fn observer(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    let (p2, q2) = (library::process("P2"), library::process("Q2"));
    for kind in BisimKind::ALL {
        let v = verdict(kind, &p2, &q2, &o.bounds);
        push(
            out,
            format!("{kind}: P2 and Q2 not bisimilar"),
            v.as_bool() == Some(false),
        );
    }
    let (w1, w2) = (ActName::input("w_1"), ActName::input("w_2"));
    let barbs = |p: &Process| {
        (
            weak_barb(p, &w1, o.bounds.max_states),
            weak_barb(p, &w2, o.bounds.max_states),
        )
    };
    let r = parse_process(MERGED_RESIDUAL).expect("residual parses");
    match reducts(&r, o.bounds.max_states) {
        Some(all) => {
            let split = all
                .iter()
                .filter(|q| {
                    let (a, b) = barbs(q);
                    !matches!(
                        (a, b),
                        (Verdict3::Yes, Verdict3::Yes) | (Verdict3::No, Verdict3::No)
                    )
                })
                .count();
            push(
                out,
                format!(
                    "merged residual: both barbs or neither in all {} reducts",
                    all.len()
                ),
                split == 0,
            );
        }
        None => push(out, "merged residual: reducts within bounds", false),
    }
    push(
        out,
        "merged residual shows both barbs",
        barbs(&r) == (Verdict3::Yes, Verdict3::Yes),
    );
    let s = parse_process(SPLIT_RESIDUAL).expect("residual parses");
    push(
        out,
        "aborted split residual shows w_2 but not w_1",
        barbs(&s) == (Verdict3::No, Verdict3::Yes),
    );
}

/// The hand-written relation for P1 and P1_BRANCH, plus the variant missing
/// the pair that answers P1_BRANCH's `b` move.
pub fn tentative_relation(mutilated: bool) -> Vec<(Config, Config)> {
    let c = |s: &str| Config::Plain(parse_configuration(s).expect("relation parses"));
    let mut r = vec![
        (
            c("{}; txn l { a.co } else { 0 }"),
            c("{}; txn l { a.co + b } else { 0 }"),
        ),
        (c("{1: #k(*)}; 0"), c("{1: #k(b)}; txn #k { 0 } else { 0 }")),
        (c("{1: #k(*)}; 0"), c("{1: ab}; 0")),
    ];
    if mutilated {
        r.remove(1);
    }
    r
}

fn tentative_branch(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    let (p1, p2) = (library::process("P1"), library::process("P1_BRANCH"));
    for kind in [BisimKind::Hasco, BisimKind::Standard] {
        match verdict(kind, &p1, &p2, &o.bounds) {
            Verdict::Bisimilar { witness } => {
                push(out, format!("{kind}: P1 and P1_BRANCH bisimilar"), true);
                let ok = verify_relation(kind, &witness, true, &o.bounds) == Ok(Ok(()));
                push(
                    out,
                    format!("{kind}: witness of {} pairs verifies", witness.len()),
                    ok,
                );
            }
            _ => push(out, format!("{kind}: P1 and P1_BRANCH bisimilar"), false),
        }
    }
    let ok = verify_relation(
        BisimKind::Standard,
        &tentative_relation(false),
        true,
        &o.bounds,
    );
    push(
        out,
        "hand-written relation with identity is a bisimulation",
        ok == Ok(Ok(())),
    );
    let bad = verify_relation(
        BisimKind::Standard,
        &tentative_relation(true),
        true,
        &o.bounds,
    );
    push(
        out,
        "relation without the b-answer is rejected",
        matches!(bad, Ok(Err(_))),
    );
}

/// Configurations reachable by `a` then `b` tentative moves and `τ`
/// steps in which the two history names are related.
fn merged_after_ab(o: &ReproOptions, name: &str) -> bool {
    let sem = ExtLts::extended(library::process(name).free_actions());
    let c0 = library::ext_initial(name);
    let names: BTreeSet<TransName> = BTreeSet::new();
    let k = TransName::fresh(NameKind::External, &names);
    let (s1, _) = weak_successors(
        &sem,
        &c0,
        Some(&ExtLabel::Act(k.clone(), ActName::input("a"))),
        &k,
        o.bounds.tau_bound,
    );
    s1.iter().any(|c: &ExtConfiguration| {
        let l = TransName::fresh(NameKind::External, &sem.names(c));
        let (s2, _) = weak_successors(
            &sem,
            c,
            Some(&ExtLabel::Act(l.clone(), ActName::input("b"))),
            &l,
            o.bounds.tau_bound,
        );
        s2.iter().any(|d| {
            let hs: Vec<&TransName> = d.history.h.values().map(|e| e.name()).collect();
            hs.len() == 2 && hs[0] != hs[1] && d.history.e.related(hs[0], hs[1])
        })
    })
}

fn merged_history(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    push(
        out,
        "Q2 merges the transactions of its a and b moves",
        merged_after_ab(o, "Q2"),
    );
    push(out, "P2 never merges them", !merged_after_ab(o, "P2"));
}

fn hasco_formula(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    let phi = library::FORMULAS[0].1;
    push(
        out,
        "Q2 satisfies it",
        sat_named(o, Logic::Hasco, "Q2", phi) == SatResult::True,
    );
    push(
        out,
        "P2 does not",
        sat_named(o, Logic::Hasco, "P2", phi) == SatResult::False,
    );
}

fn eq_formula(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    let phi = library::FORMULAS[1].1;
    push(
        out,
        "P3 satisfies it",
        sat_named(o, Logic::Eq, "P3", phi) == SatResult::True,
    );
    push(
        out,
        "Q3 does not",
        sat_named(o, Logic::Eq, "Q3", phi) == SatResult::False,
    );
    let v = verdict(
        BisimKind::Eq,
        &library::process("P3"),
        &library::process("Q3"),
        &o.bounds,
    );
    push(
        out,
        "eq: P3 and Q3 not bisimilar",
        v.as_bool() == Some(false),
    );
}

fn joint_commit(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    let (s, j) = (library::split_commit(), library::joint_commit());
    push(
        out,
        "commit consistent",
        commit_consistent(&s.history, &j.history),
    );
    push(
        out,
        "not eq consistent",
        !eq_consistent(&s.history, &j.history),
    );
    let phi = parse_formula("#l =co #k").unwrap();
    let (a, b) = (
        sat(Logic::Eq, &j, &phi, sat_opts(o)).unwrap(),
        sat(Logic::Eq, &s, &phi, sat_opts(o)).unwrap(),
    );
    push(
        out,
        "#l =co #k holds only when committed together",
        (a, b) == (SatResult::True, SatResult::False),
    );
    let mut rng = gen::rng(o.seed);
    let consts = [TransName::external("k"), TransName::external("l")];
    let mut separated = 0;
    for _ in 0..o.samples * 5 {
        let f = gen::formula_with(&mut rng, Logic::Hasco, &["a", "b"], 3, &consts);
        let (x, y) = (
            sat(Logic::Hasco, &s, &f, sat_opts(o)).unwrap(),
            sat(Logic::Hasco, &j, &f, sat_opts(o)).unwrap(),
        );
        separated += (x != y) as usize;
    }
    push(
        out,
        format!("no L_Hasco formula among {} separates them", o.samples * 5),
        separated == 0,
    );
}

fn canco_formula(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    let phi = library::FORMULAS[2].1;
    push(
        out,
        "Q2 satisfies it",
        sat_named(o, Logic::Canco, "Q2", phi) == SatResult::True,
    );
    push(
        out,
        "P2 does not",
        sat_named(o, Logic::Canco, "P2", phi) == SatResult::False,
    );
}

pub const CH_EXPECTED: &str =
    "<x(a)>(~hasco(x) & <y(b)>(~hasco(x) & ~hasco(y) & <tau>(~hasco(x) & ~hasco(y) \
     & [tau](hasco(x) <-> hasco(y)) & <tau>(hasco(x) & hasco(y)))))";

fn canco_to_hasco(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    let phi = library::formula("canco_together");
    let t = translate_canco_to_hasco(&phi, &BTreeSet::new()).unwrap();
    let expected = parse_formula(CH_EXPECTED).unwrap();
    push(
        out,
        "translation matches the expected shape",
        t.simplify() == expected.simplify(),
    );
    for name in ["P2", "Q2"] {
        let c = library::ext_initial(name);
        let a = sat(Logic::Canco, &c, &phi, sat_opts(o)).unwrap();
        let b = sat(Logic::Hasco, &c, &t, sat_opts(o)).unwrap();
        push(
            out,
            format!("{name}: {a} before and {b} after"),
            a == b && a != SatResult::Unknown,
        );
    }
}

/// The expected `ec` expansion of `<x(a)><y(b)> x =co y`.
pub fn ec_expected() -> String {
    let ly = "(<co{y}><tau>ff | <tau>ff)";
    let lx = "(<co{x}><tau>ff | <tau>ff)";
    let lxy = format!("(<co{{x}}>{ly} | <co{{y}}>{lx} | <co{{x, y}}><tau>tt | <tau>ff)");
    format!("<x(a)>(<co{{x}}><tau><y(b)>{ly} | <tau>(<co{{x}}><y(b)>{ly} | <y(b)>{lxy}))")
}

fn eq_to_canco(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    let phi = library::formula("eq_together");
    let t = translate_eq_to_canco(&phi, &BTreeSet::new(), &Relation::new()).unwrap();
    push(
        out,
        "translation matches the expected expansion",
        t == parse_formula(&ec_expected()).unwrap(),
    );
    for name in ["P2", "Q2", "P3", "Q3"] {
        let c = library::ext_initial(name);
        let a = sat(Logic::Eq, &c, &phi, sat_opts(o)).unwrap();
        let b = sat(Logic::Canco, &c, &t, sat_opts(o)).unwrap();
        push(
            out,
            format!("{name}: {a} before and {b} after"),
            a == b && a != SatResult::Unknown,
        );
    }
}

fn small_bounds(o: &ReproOptions) -> SearchBounds {
    SearchBounds {
        max_states: o.bounds.max_states.min(2_000),
        ..o.bounds
    }
}

fn agreement(o: &ReproOptions, out: &mut Vec<(String, bool)>, kinds: &[BisimKind]) {
    let mut rng = gen::rng(o.seed);
    let shape = gen::ProcessShape::default();
    let b = small_bounds(o);
    let (mut decided, mut disagree) = (0, 0);
    for _ in 0..o.samples {
        let (p, q) = gen::process_pair(&mut rng, &shape);
        let vs: Vec<Option<bool>> = kinds
            .iter()
            .map(|k| verdict(*k, &p, &q, &b).as_bool())
            .collect();
        let known: Vec<bool> = vs.iter().flatten().copied().collect();
        if known.len() == vs.len() {
            decided += 1;
        }
        if known.windows(2).any(|w| w[0] != w[1]) {
            disagree += 1;
        }
    }
    push(
        out,
        format!("{decided} of {} pairs decided by every checker", o.samples),
        decided > 0,
    );
    push(out, format!("{disagree} disagreements"), disagree == 0);
}

fn standard_vs_hasco(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    agreement(o, out, &[BisimKind::Standard, BisimKind::Hasco]);
}

fn coincidence(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    agreement(o, out, &[BisimKind::Hasco, BisimKind::Eq, BisimKind::Canco]);
}

fn preservation(
    o: &ReproOptions,
    out: &mut Vec<(String, bool)>,
    from: Logic,
    to: Logic,
    tr: fn(&crate::logic::Formula) -> crate::logic::Formula,
) {
    let mut rng = gen::rng(o.seed);
    let shape = gen::ProcessShape {
        max_size: 6,
        ..Default::default()
    };
    let (mut decided, mut disagree) = (0, 0);
    for _ in 0..o.samples {
        let p = gen::process(&mut rng, &shape);
        let phi = gen::formula(&mut rng, from, &["a", "b"], 3);
        let c = ExtConfiguration::initial(p);
        let a = sat(from, &c, &phi, sat_opts(o)).unwrap();
        let b = sat(to, &c, &tr(&phi), sat_opts(o)).unwrap();
        if a != SatResult::Unknown && b != SatResult::Unknown {
            decided += 1;
            disagree += (a != b) as usize;
        }
    }
    push(
        out,
        format!("{decided} of {} samples decided", o.samples),
        decided > 0,
    );
    push(out, format!("{disagree} disagreements"), disagree == 0);
}

fn ch_preservation(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    preservation(o, out, Logic::Canco, Logic::Hasco, |f| {
        translate_canco_to_hasco(f, &BTreeSet::new()).unwrap()
    });
}

fn ec_preservation(o: &ReproOptions, out: &mut Vec<(String, bool)>) {
    preservation(o, out, Logic::Eq, Logic::Canco, |f| {
        translate_eq_to_canco(f, &BTreeSet::new(), &Relation::new()).unwrap()
    });
    let mut rng = gen::rng(o.seed ^ 1);
    let mut bad = 0;
    for _ in 0..o.samples {
        let phi = gen::formula(&mut rng, Logic::Hasco, &["a", "b"], 3);
        let t = translate_hasco_to_eq(&phi).unwrap();
        let c = library::ext_initial("Q2");
        bad += (sat(Logic::Hasco, &c, &phi, sat_opts(o)).unwrap()
            != sat(Logic::Eq, &c, &t, sat_opts(o)).unwrap()) as usize;
    }
    push(
        out,
        format!("{bad} disagreements for the hasco-to-eq translation on Q2"),
        bad == 0,
    );
}
