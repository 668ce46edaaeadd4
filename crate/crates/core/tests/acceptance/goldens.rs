//! The worked examples, with expected values written out literally.

use std::collections::{BTreeSet, HashSet, VecDeque};

use tccs::bisim::{check_bisim, verify_relation, BisimKind, Config, Verdict};
use tccs::gen;
use tccs::history::{
    commit_consistent, eq_consistent, parse_configuration, parse_ext_configuration,
    ExtConfiguration,
};
use tccs::logic::{parse_formula, sat, Logic, SatOptions, SatResult};
use tccs::lts::SearchBounds;
use tccs::reduction::{reduction_steps, weak_barb, Verdict3};
use tccs::syntax::{canonical_names, par, parse_process, ActName, Process, TransName};

const P1: &str = "txn l { a.co } else { 0 }";
const P2_BRANCH: &str = "txn l { a.co + b } else { 0 }";
const P2: &str = "txn k1 { a.co } else { 0 } | txn k2 { b.co } else { 0 }";
const Q2: &str =
    "nu p.(txn k1 { a.p.co + a.co } else { 0 } | txn k2 { b.'p.co + b.co } else { 0 })";
const P3: &str = "txn k { a.b.co + b.a.co } else { 0 }";
const Q3: &str = "txn k1 { a.co } else { 0 } | txn k2 { b.co } else { 0 }";
const OBSERVER: &str = "txn l1 { 'a.(co | w_1) } else { 0 } | txn l2 { 'b.(co | w_2) } else { 0 }";

fn p(src: &str) -> Process {
    parse_process(src).unwrap()
}

fn ext(src: &str) -> ExtConfiguration {
    ExtConfiguration::initial(p(src))
}

fn opts() -> SatOptions {
    SatOptions::default()
}

fn expect(ok: bool, what: &str, failures: &mut Vec<String>) {
    if !ok {
        failures.push(what.to_string());
    }
}

fn verdict_of(failures: Vec<String>, detail: String) -> Result<String, String> {
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(failures.join("; "))
    }
}

pub fn tentative_branch() -> Result<String, String> {
    let b = SearchBounds::default();
    let mut fails = Vec::new();
    let kind = BisimKind::Hasco;
    let v = check_bisim(
        kind,
        &Config::initial(kind, p(P1)),
        &Config::initial(kind, p(P2_BRANCH)),
        &b,
    )
    .unwrap();
    let witness = match v {
        Verdict::Bisimilar { witness } => witness,
        other => return Err(format!("hasco verdict {}", other.name())),
    };
    expect(
        verify_relation(kind, &witness, true, &b) == Ok(Ok(())),
        "returned witness does not verify",
        &mut fails,
    );
    let c = |s: &str| Config::Plain(parse_configuration(s).unwrap());
    let relation = vec![
        (c(&format!("{{}}; {P1}")), c(&format!("{{}}; {P2_BRANCH}"))),
        (c("{1: #k(*)}; 0"), c("{1: #k(b)}; txn #k { 0 } else { 0 }")),
        (c("{1: #k(*)}; 0"), c("{1: ab}; 0")),
    ];
    expect(
        verify_relation(BisimKind::Standard, &relation, true, &b) == Ok(Ok(())),
        "hand-written relation rejected",
        &mut fails,
    );
    let mut mutilated = relation.clone();
    mutilated.remove(1);
    let rejected = verify_relation(BisimKind::Standard, &mutilated, true, &b);
    expect(
        matches!(rejected, Ok(Err(_))),
        "mutilated relation accepted",
        &mut fails,
    );
    verdict_of(
        fails,
        format!(
            "bisimilar with a {}-pair witness; relation accepted, mutilated one rejected",
            witness.len()
        ),
    )
}

/// Parallel components with dead restrictions and `0` removed.
fn components(p: &Process, out: &mut Vec<Process>) {
    match p {
        Process::Par(a, b) => {
            components(a, out);
            components(b, out);
        }
        Process::Restrict(x, q) if !q.free_actions().iter().any(|a| a.name == *x) => {
            components(q, out)
        }
        q if q.is_nil() => {}
        q => out.push(q.clone()),
    }
}

fn permutations(v: &[Process]) -> Vec<Vec<Process>> {
    if v.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, x.clone());
            out.push(tail);
        }
    }
    out
}

/// A rendering invariant under reordering components and renaming
/// transactions.
fn normal_form(p: &Process) -> String {
    let mut cs = Vec::new();
    components(p, &mut cs);
    permutations(&cs)
        .into_iter()
        .map(|order| {
            let joined = order
                .into_iter()
                .reduce(par)
                .unwrap_or_else(tccs::syntax::nil);
            canonical_names(&joined).0.to_string()
        })
        .min()
        .unwrap()
}

fn reducts(start: &Process, max: usize) -> Option<Vec<Process>> {
    let mut seen = HashSet::from([canonical_names(start).0]);
    let mut out = vec![start.clone()];
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(q) = queue.pop_front() {
        for r in reduction_steps(&q) {
            if seen.insert(canonical_names(&r).0) {
                if seen.len() > max {
                    return None;
                }
                out.push(r.clone());
                queue.push_back(r);
            }
        }
    }
    Some(out)
}

pub fn observer() -> Result<String, String> {
    let b = SearchBounds::default();
    let mut fails = Vec::new();
    for kind in BisimKind::ALL {
        let v = check_bisim(
            kind,
            &Config::initial(kind, p(P2)),
            &Config::initial(kind, p(Q2)),
            &b,
        )
        .unwrap();
        expect(
            matches!(v, Verdict::NotBisimilar { .. }),
            &format!("{kind}: {}", v.name()),
            &mut fails,
        );
    }
    let (w1, w2) = (ActName::input("w_1"), ActName::input("w_2"));
    let barbs = |q: &Process| (weak_barb(q, &w1, 10_000), weak_barb(q, &w2, 10_000));

    let residual = p("txn m { co } else { 0 } | txn m { co } else { 0 } \
         | txn m { co | w_1 } else { 0 } | txn m { co | w_2 } else { 0 }");
    let target = normal_form(&residual);
    let system = par(p(Q2), p(OBSERVER));
    let Some(all) = reducts(&system, 10_000) else {
        return Err("reducts of Q2 | O exceed 10000".into());
    };
    expect(
        all.iter().any(|q| normal_form(q) == target),
        "Q2 | O never reaches the merged residual",
        &mut fails,
    );

    let Some(after) = reducts(&residual, 10_000) else {
        return Err("reducts of the residual exceed 10000".into());
    };
    let mut both = 0;
    for q in &after {
        match barbs(q) {
            (Verdict3::Yes, Verdict3::Yes) => both += 1,
            (Verdict3::No, Verdict3::No) => {}
            other => fails.push(format!("{q} has barbs {other:?}")),
        }
    }
    expect(
        both > 0,
        "no reduct of the residual shows both barbs",
        &mut fails,
    );
    let split = p("0 | 0 | txn m2 { co } else { 0 } | txn m2 { co | w_2 } else { 0 }");
    expect(
        barbs(&split) == (Verdict3::No, Verdict3::Yes),
        "split residual barbs",
        &mut fails,
    );
    verdict_of(
        fails,
        format!(
            "not bisimilar under all four kinds; {} of {} residual reducts show both barbs, the rest neither",
            both,
            after.len()
        ),
    )
}

fn golden(logic: Logic, formula: &str, yes: &str, no: &str) -> Result<String, String> {
    let phi = parse_formula(formula).map_err(|e| e.to_string())?;
    let a = sat(logic, &ext(yes), &phi, opts()).map_err(|e| e.to_string())?;
    let b = sat(logic, &ext(no), &phi, opts()).map_err(|e| e.to_string())?;
    if (a, b) == (SatResult::True, SatResult::False) {
        Ok(format!("{a} and {b}"))
    } else {
        Err(format!("got {a} and {b}"))
    }
}

pub fn hasco_intro() -> Result<String, String> {
    golden(
        Logic::Hasco,
        "<x(a)><y(b)>(~hasco(x) & <tau>hasco(x) & [tau](hasco(x) <-> hasco(y)))",
        Q2,
        P2,
    )
}

pub fn eq_together() -> Result<String, String> {
    golden(Logic::Eq, "<x(a)><y(b)> x =co y", P3, Q3)
}

pub fn canco_together() -> Result<String, String> {
    golden(Logic::Canco, "<x(a)><y(b)><co{x, y}> tt", Q2, P2)
}

pub fn joint_commit() -> Result<String, String> {
    let split = parse_ext_configuration("{{#k}, {#l}}; {1: #k(co), 2: #l(co)}; 0").unwrap();
    let joint = parse_ext_configuration("{{#k, #l}}; {1: #k(co), 2: #l(co)}; 0").unwrap();
    let mut fails = Vec::new();
    expect(
        commit_consistent(&split.history, &joint.history),
        "not commit consistent",
        &mut fails,
    );
    expect(
        !eq_consistent(&split.history, &joint.history),
        "eq consistent",
        &mut fails,
    );
    let phi = parse_formula("#l =co #k").unwrap();
    let (s, j) = (
        sat(Logic::Eq, &split, &phi, opts()).unwrap(),
        sat(Logic::Eq, &joint, &phi, opts()).unwrap(),
    );
    expect(
        (s, j) == (SatResult::False, SatResult::True),
        "=co does not separate them",
        &mut fails,
    );

    let mut rng = gen::rng(48);
    let consts = [TransName::external("k"), TransName::external("l")];
    let (mut decided, mut separating) = (0, Vec::new());
    let mut distinct = BTreeSet::new();
    for _ in 0..300 {
        let f = gen::formula_with(&mut rng, Logic::Hasco, &["a", "b"], 3, &consts);
        let x = sat(Logic::Hasco, &split, &f, opts()).unwrap();
        let y = sat(Logic::Hasco, &joint, &f, opts()).unwrap();
        if x != SatResult::Unknown && y != SatResult::Unknown {
            decided += 1;
            if x != y {
                separating.push(f.to_string());
            }
        }
        distinct.insert(f);
    }
    expect(
        decided == 300,
        &format!("only {decided} of 300 formulas decided"),
        &mut fails,
    );
    if let Some(f) = separating.first() {
        fails.push(format!(
            "{} hasco formulas separate them, e.g. {f}",
            separating.len()
        ));
    }
    verdict_of(
        fails,
        format!(
            "=co separates; none of 300 hasco formulas ({} distinct) do",
            distinct.len()
        ),
    )
}
