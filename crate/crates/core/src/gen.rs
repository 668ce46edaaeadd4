//! Seeded random generation of well-formed processes, closed formulas,
//! permutations and transition-system walks for the property suites.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::logic::{Formula, Logic, Value};
use crate::lts::Semantics;
use crate::syntax::{
    check_well_formed, dormant, nil, par, prefix, running, ActName, NameKind, Permutation, Prefix,
    Process, TransName,
};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Shape of generated processes.
#[derive(Clone, Debug)]
pub struct ProcessShape {
    pub max_size: usize,
    pub actions: Vec<&'static str>,
    /// Weight of recursion among composite constructors, out of 100.
    pub rec_weight: u32,
    /// Allow named transactions at top level.
    pub named: bool,
}

impl Default for ProcessShape {
    fn default() -> Self {
        ProcessShape {
            max_size: 8,
            actions: vec!["a", "b"],
            rec_weight: 5,
            named: true,
        }
    }
}

struct Ctx {
    /// Inside a default part, where `co` may appear.
    in_txn: bool,
    /// Transactions allowed here (not below a prefix or inside one).
    txn_ok: bool,
    /// Bound process variables and whether a prefix guards them here.
    vars: Vec<(Arc<str>, bool)>,
}

fn action<R: Rng>(rng: &mut R, shape: &ProcessShape) -> Prefix {
    if rng.gen_ratio(1, 8) {
        return Prefix::Tau;
    }
    let a = shape.actions.choose(rng).unwrap();
    if rng.gen_bool(0.5) {
        Prefix::Act(ActName::input(a))
    } else {
        Prefix::Act(ActName::output(a))
    }
}

fn leaf<R: Rng>(rng: &mut R, ctx: &Ctx) -> Process {
    let guarded: Vec<_> = ctx.vars.iter().filter(|(_, g)| *g).collect();
    match rng.gen_range(0..4) {
        0 | 1 if ctx.in_txn => Process::Commit,
        2 if !guarded.is_empty() => Process::Var(guarded.choose(rng).unwrap().0.clone()),
        _ => nil(),
    }
}

fn guarded_ctx(ctx: &Ctx) -> Ctx {
    Ctx {
        in_txn: ctx.in_txn,
        txn_ok: false,
        vars: ctx.vars.iter().map(|(x, _)| (x.clone(), true)).collect(),
    }
}

fn split<R: Rng>(rng: &mut R, budget: usize) -> (usize, usize) {
    let l = rng.gen_range(1..budget);
    (l, budget - l)
}

/// A term of size at most `budget`.
fn term<R: Rng>(rng: &mut R, shape: &ProcessShape, budget: usize, ctx: &Ctx, top: bool) -> Process {
    if budget <= 1 {
        return leaf(rng, ctx);
    }
    let roll = rng.gen_range(0..100);
    if ctx.txn_ok && !ctx.in_txn && budget >= 3 && roll < 40 {
        let (d, a) = split(rng, budget - 1);
        let inner = Ctx {
            in_txn: true,
            txn_ok: false,
            vars: Vec::new(),
        };
        let default = term(rng, shape, d, &inner, false);
        let alt_ctx = Ctx {
            in_txn: false,
            txn_ok: true,
            vars: ctx.vars.clone(),
        };
        let alt = term(rng, shape, a.min(2), &alt_ctx, false);
        if top && shape.named && rng.gen_ratio(1, 4) {
            let k = TransName::internal(["k1", "k2"].choose(rng).unwrap());
            return running(default, k, alt);
        }
        return dormant(default, alt);
    }
    if budget >= 3 && roll < 55 {
        let (l, r) = split(rng, budget - 1);
        return par(term(rng, shape, l, ctx, top), term(rng, shape, r, ctx, top));
    }
    if budget >= 4 && roll < 65 {
        let g = guarded_ctx(ctx);
        let (l, r) = split(rng, budget - 2);
        let p = term(rng, shape, l, &g, false);
        let q = term(rng, shape, r, &g, false);
        return Process::Sum(vec![(action(rng, shape), p), (action(rng, shape), q)]);
    }
    if roll < 65 + shape.rec_weight && !ctx.in_txn {
        let x: Arc<str> = Arc::from(format!("X{}", ctx.vars.len() + 1));
        let mut vars = ctx.vars.clone();
        vars.push((x.clone(), false));
        let inner = Ctx {
            in_txn: ctx.in_txn,
            txn_ok: ctx.txn_ok,
            vars,
        };
        return Process::Rec(x, Box::new(term(rng, shape, budget - 1, &inner, false)));
    }
    if roll < 70 + shape.rec_weight {
        let a = shape.actions.choose(rng).unwrap();
        return Process::Restrict(
            Arc::from(*a),
            Box::new(term(rng, shape, budget - 1, ctx, top)),
        );
    }
    let g = guarded_ctx(ctx);
    prefix(action(rng, shape), term(rng, shape, budget - 1, &g, false))
}

/// A closed well-formed process of size at most `shape.max_size`.
pub fn process<R: Rng>(rng: &mut R, shape: &ProcessShape) -> Process {
    loop {
        let size = rng.gen_range(1..=shape.max_size);
        let ctx = Ctx {
            in_txn: false,
            txn_ok: true,
            vars: Vec::new(),
        };
        let p = term(rng, shape, size, &ctx, true);
        if p.size() <= shape.max_size && check_well_formed(&p).is_ok() {
            return p;
        }
    }
}

struct Scope<'a> {
    vars: Vec<Arc<str>>,
    consts: &'a [TransName],
}

impl Scope<'_> {
    fn values(&self) -> Vec<Value> {
        let vars = self.vars.iter().map(|x| Value::Var(x.clone()));
        vars.chain(self.consts.iter().map(|k| Value::Name(k.clone())))
            .collect()
    }
}

fn formula_at<R: Rng>(
    rng: &mut R,
    logic: Logic,
    actions: &[&str],
    depth: usize,
    scope: &mut Scope,
) -> Formula {
    let values = scope.values();
    if depth == 0 || rng.gen_ratio(1, 5) {
        return match (logic, values.is_empty(), rng.gen_range(0..3)) {
            (_, true, 0) | (Logic::Canco, _, 0) => Formula::ff(),
            (Logic::Hasco, false, _) => Formula::Hasco(values.choose(rng).unwrap().clone()),
            (Logic::Eq, false, _) => Formula::EqCo(
                values.choose(rng).unwrap().clone(),
                values.choose(rng).unwrap().clone(),
            ),
            _ => Formula::tt(),
        };
    }
    match rng.gen_range(0..10) {
        0 | 1 => Formula::neg(formula_at(rng, logic, actions, depth, scope)),
        2 => Formula::conj(vec![
            formula_at(rng, logic, actions, depth - 1, scope),
            formula_at(rng, logic, actions, depth - 1, scope),
        ]),
        3 | 4 => Formula::dia_tau(formula_at(rng, logic, actions, depth - 1, scope)),
        5 if logic == Logic::Canco && !values.is_empty() => {
            let mut ks: BTreeSet<Value> = values
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect();
            if ks.is_empty() {
                ks.insert(values.choose(rng).unwrap().clone());
            }
            Formula::dia_co(ks, formula_at(rng, logic, actions, depth - 1, scope))
        }
        _ => {
            let x: Arc<str> = Arc::from(format!("x{}", scope.vars.len() + 1));
            let a = actions.choose(rng).unwrap();
            let act = if rng.gen_ratio(1, 4) {
                ActName::output(a)
            } else {
                ActName::input(a)
            };
            scope.vars.push(x.clone());
            let body = formula_at(rng, logic, actions, depth - 1, scope);
            scope.vars.pop();
            Formula::DiamondAct(x, act, Box::new(body))
        }
    }
}

/// A closed formula of `logic` with modal depth at most `depth`.
pub fn formula<R: Rng>(rng: &mut R, logic: Logic, actions: &[&str], depth: usize) -> Formula {
    formula_with(rng, logic, actions, depth, &[])
}

/// As [`formula`], also mentioning the given name constants.
pub fn formula_with<R: Rng>(
    rng: &mut R,
    logic: Logic,
    actions: &[&str],
    depth: usize,
    consts: &[TransName],
) -> Formula {
    let mut scope = Scope {
        vars: Vec::new(),
        consts,
    };
    formula_at(rng, logic, actions, depth, &mut scope)
}

/// A variant of `p` that is often, but not always, equivalent to it.
pub fn mutate<R: Rng>(rng: &mut R, p: &Process, shape: &ProcessShape) -> Process {
    match rng.gen_range(0..6) {
        0 => par(p.clone(), nil()),
        1 => match p {
            Process::Par(a, b) => par((**b).clone(), (**a).clone()),
            _ => prefix(Prefix::Tau, p.clone()),
        },
        2 => match p {
            Process::Sum(bs) if bs.len() > 1 => Process::Sum(bs.iter().rev().cloned().collect()),
            _ => Process::Restrict(Arc::from("c"), Box::new(p.clone())),
        },
        3 => {
            let from = *shape.actions.choose(rng).unwrap();
            let to = *shape.actions.choose(rng).unwrap();
            rename_action(p, from, to)
        }
        4 => match p {
            Process::Sum(bs) if bs.len() > 1 => Process::Sum(bs[..1].to_vec()),
            Process::Par(a, _) => (**a).clone(),
            _ => par(p.clone(), p.clone()),
        },
        _ => prefix(Prefix::Tau, p.clone()),
    }
}

fn rename_action(p: &Process, from: &str, to: &str) -> Process {
    let act = |mu: &Prefix| match mu {
        Prefix::Act(a) if &*a.name == from => Prefix::Act(ActName {
            name: Arc::from(to),
            output: a.output,
        }),
        mu => mu.clone(),
    };
    match p {
        Process::Sum(bs) => Process::Sum(
            bs.iter()
                .map(|(mu, q)| (act(mu), rename_action(q, from, to)))
                .collect(),
        ),
        Process::Par(a, b) => par(rename_action(a, from, to), rename_action(b, from, to)),
        Process::Restrict(x, q) => {
            Process::Restrict(x.clone(), Box::new(rename_action(q, from, to)))
        }
        Process::Rec(x, q) => Process::Rec(x.clone(), Box::new(rename_action(q, from, to))),
        Process::Running(d, k, a) => running(
            rename_action(d, from, to),
            k.clone(),
            rename_action(a, from, to),
        ),
        Process::Dormant(d, a) => dormant(rename_action(d, from, to), rename_action(a, from, to)),
        Process::Var(_) | Process::Commit => p.clone(),
    }
}

/// A pair of closed well-formed processes: independent draws half of the
/// time, otherwise a process and a mutation of it.
pub fn process_pair<R: Rng>(rng: &mut R, shape: &ProcessShape) -> (Process, Process) {
    let p = process(rng, shape);
    if rng.gen_bool(0.5) {
        return (p, process(rng, shape));
    }
    loop {
        let q = mutate(rng, &p, shape);
        if q.size() <= shape.max_size && check_well_formed(&q).is_ok() {
            return (p, q);
        }
        if rng.gen_ratio(1, 4) {
            return (p.clone(), p);
        }
    }
}

/// A random kind-preserving permutation moving `names` and a few fresh
/// names among themselves.
pub fn permutation<R: Rng>(rng: &mut R, names: &BTreeSet<TransName>) -> Permutation {
    let mut pairs = Vec::new();
    for kind in [NameKind::Internal, NameKind::External] {
        let mut pool: Vec<TransName> = names.iter().filter(|k| k.kind == kind).cloned().collect();
        let mut avoid = names.clone();
        for _ in 0..rng.gen_range(1..=3) {
            let k = TransName::fresh(kind, &avoid);
            avoid.insert(k.clone());
            pool.push(k);
        }
        let mut image = pool.clone();
        image.shuffle(rng);
        pairs.extend(pool.into_iter().zip(image));
    }
    Permutation::from_pairs(pairs).expect("shuffle is a kind-preserving bijection")
}

/// A random walk of at most `len` steps from `start`, returning the
/// visited states (including `start`) and the labels taken.
pub fn walk<S: Semantics, R: Rng>(
    sem: &S,
    start: &S::State,
    len: usize,
    rng: &mut R,
) -> Vec<(S::State, Option<S::Label>)> {
    let mut out = vec![(start.clone(), None)];
    let mut cur = start.clone();
    for _ in 0..len {
        let k = crate::lts::fresh_external(sem, &cur, &BTreeSet::new());
        let steps = sem.steps(&cur, &k);
        let Some(st) = steps.choose(rng) else { break };
        cur = st.target.clone();
        out.push((cur.clone(), Some(st.label.clone())));
    }
    out
}
