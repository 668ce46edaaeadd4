use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Formula, Logic, LogicError, Value};

/// A relation over values, queried symmetrically.
pub type Relation = BTreeSet<(Value, Value)>;

pub fn hasco_all(s: &BTreeSet<Value>) -> Formula {
    Formula::conj(s.iter().cloned().map(Formula::Hasco).collect())
}

pub fn nhasco(s: &BTreeSet<Value>) -> Formula {
    Formula::conj(
        s.iter()
            .cloned()
            .map(|v| Formula::neg(Formula::Hasco(v)))
            .collect(),
    )
}

/// `Hasco(s) <-> Hasco(s')` over unordered pairs of distinct elements.
pub fn equico(s: &BTreeSet<Value>) -> Formula {
    let v: Vec<&Value> = s.iter().collect();
    let mut out = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            out.push(Formula::iff(
                Formula::Hasco(v[i].clone()),
                Formula::Hasco(v[j].clone()),
            ));
        }
    }
    Formula::conj(out)
}

/// Renames binders that shadow an enclosing binder or a variable of
/// `outer`, so that variables can be tracked by name.
fn rename_apart(f: &Formula, outer: &BTreeSet<Value>) -> Formula {
    let mut scope: BTreeSet<Arc<str>> = outer
        .iter()
        .filter_map(|v| match v {
            Value::Var(x) => Some(x.clone()),
            Value::Name(_) => None,
        })
        .collect();
    go(f, &mut scope)
}

fn go(f: &Formula, scope: &mut BTreeSet<Arc<str>>) -> Formula {
    match f {
        Formula::DiamondAct(x, a, g) => {
            let mut body = (**g).clone();
            let mut y = x.clone();
            if scope.contains(x) {
                let taken: BTreeSet<Arc<str>> = scope.union(&g.free_vars()).cloned().collect();
                y = (1..)
                    .map(|n| Arc::<str>::from(format!("{x}{n}")))
                    .find(|c| !taken.contains(c))
                    .unwrap();
                body = rename_var(&body, x, &y);
            }
            let fresh = scope.insert(y.clone());
            let inner = go(&body, scope);
            if fresh {
                scope.remove(&y);
            }
            Formula::DiamondAct(y, a.clone(), Box::new(inner))
        }
        Formula::DiamondTau(g) => Formula::dia_tau(go(g, scope)),
        Formula::DiamondCo(k, g) => Formula::dia_co(k.clone(), go(g, scope)),
        Formula::Neg(g) => Formula::neg(go(g, scope)),
        Formula::Conj(v) => Formula::Conj(v.iter().map(|g| go(g, scope)).collect()),
        f => f.clone(),
    }
}

fn rename_var(f: &Formula, x: &Arc<str>, y: &Arc<str>) -> Formula {
    let r = |v: &Value| match v {
        Value::Var(z) if z == x => Value::Var(y.clone()),
        v => v.clone(),
    };
    match f {
        Formula::DiamondAct(z, _, _) if z == x => f.clone(),
        Formula::DiamondAct(z, a, g) => {
            Formula::DiamondAct(z.clone(), a.clone(), Box::new(rename_var(g, x, y)))
        }
        Formula::DiamondTau(g) => Formula::dia_tau(rename_var(g, x, y)),
        Formula::DiamondCo(k, g) => Formula::dia_co(k.iter().map(r).collect(), rename_var(g, x, y)),
        Formula::Neg(g) => Formula::neg(rename_var(g, x, y)),
        Formula::Conj(v) => Formula::Conj(v.iter().map(|g| rename_var(g, x, y)).collect()),
        Formula::Hasco(v) => Formula::Hasco(r(v)),
        Formula::EqCo(a, b) => Formula::EqCo(r(a), r(b)),
    }
}

/// `Hasco(v)` becomes `v =co v`.
pub fn translate_hasco_to_eq(f: &Formula) -> Result<Formula, LogicError> {
    f.check_fragment(Logic::Hasco)?;
    Ok(he(f))
}

fn he(f: &Formula) -> Formula {
    match f {
        Formula::Hasco(v) => Formula::EqCo(v.clone(), v.clone()),
        Formula::DiamondTau(g) => Formula::dia_tau(he(g)),
        Formula::DiamondAct(x, a, g) => Formula::dia_act(x, a.clone(), he(g)),
        Formula::Neg(g) => Formula::neg(he(g)),
        Formula::Conj(v) => Formula::Conj(v.iter().map(he).collect()),
        Formula::EqCo(..) | Formula::DiamondCo(..) => unreachable!("checked fragment"),
    }
}

/// Commit modalities expressed through `Hasco`, with `r` the values
/// currently running.
pub fn translate_canco_to_hasco(f: &Formula, r: &BTreeSet<Value>) -> Result<Formula, LogicError> {
    f.check_fragment(Logic::Canco)?;
    Ok(ch(&rename_apart(f, r), r))
}

fn with(r: &BTreeSet<Value>, x: &Arc<str>) -> BTreeSet<Value> {
    let mut s = r.clone();
    s.insert(Value::Var(x.clone()));
    s
}

fn ch(f: &Formula, r: &BTreeSet<Value>) -> Formula {
    match f {
        Formula::DiamondCo(a, g) => {
            let a_r: BTreeSet<Value> = a.union(r).cloned().collect();
            let rest: BTreeSet<Value> = r.difference(a).cloned().collect();
            let psi = Formula::conj(vec![hasco_all(a), nhasco(&rest)]);
            Formula::dia_tau(Formula::conj(vec![
                nhasco(&a_r),
                Formula::box_tau(equico(a)),
                Formula::dia_tau(Formula::conj(vec![psi, ch(g, &rest)])),
            ]))
        }
        Formula::DiamondAct(x, act, g) => {
            let rx = with(r, x);
            Formula::dia_act(x, act.clone(), Formula::conj(vec![nhasco(&rx), ch(g, &rx)]))
        }
        Formula::DiamondTau(g) => Formula::dia_tau(Formula::conj(vec![nhasco(r), ch(g, r)])),
        Formula::Neg(g) => Formula::neg(ch(g, r)),
        Formula::Conj(v) => Formula::Conj(v.iter().map(|g| ch(g, r)).collect()),
        Formula::Hasco(_) | Formula::EqCo(..) => unreachable!("checked fragment"),
    }
}

/// `=co` expressed through commit modalities, with `r` the values
/// currently running and `e` those known to have committed together.
pub fn translate_eq_to_canco(
    f: &Formula,
    r: &BTreeSet<Value>,
    e: &Relation,
) -> Result<Formula, LogicError> {
    f.check_fragment(Logic::Eq)?;
    Ok(ec(&rename_apart(f, r), r, e))
}

fn nonempty_subsets(r: &BTreeSet<Value>) -> Vec<BTreeSet<Value>> {
    let v: Vec<&Value> = r.iter().collect();
    (1u64..1 << v.len())
        .map(|mask| {
            v.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| (*x).clone())
                .collect()
        })
        .collect()
}

fn commit_branches(f: &Formula, r: &BTreeSet<Value>, e: &Relation) -> Vec<Formula> {
    nonempty_subsets(r)
        .into_iter()
        .map(|a| {
            let rest: BTreeSet<Value> = r.difference(&a).cloned().collect();
            let mut e2 = e.clone();
            for x in &a {
                for y in &a {
                    e2.insert((x.clone(), y.clone()));
                }
            }
            Formula::dia_co(a, ec(f, &rest, &e2))
        })
        .collect()
}

fn ec(f: &Formula, r: &BTreeSet<Value>, e: &Relation) -> Formula {
    match f {
        Formula::EqCo(a, b) => {
            if e.contains(&(a.clone(), b.clone())) || e.contains(&(b.clone(), a.clone())) {
                Formula::tt()
            } else {
                Formula::ff()
            }
        }
        Formula::DiamondAct(x, act, g) => {
            let mut ds = commit_branches(f, r, e);
            let after = Formula::dia_tau((**g).clone());
            ds.push(Formula::dia_act(x, act.clone(), ec(&after, &with(r, x), e)));
            Formula::or(ds)
        }
        Formula::DiamondTau(g) => {
            let mut ds = commit_branches(f, r, e);
            ds.push(Formula::dia_tau(ec(g, r, e)));
            Formula::or(ds)
        }
        Formula::Neg(g) => Formula::neg(ec(g, r, e)),
        Formula::Conj(v) => Formula::Conj(v.iter().map(|g| ec(g, r, e)).collect()),
        Formula::Hasco(_) | Formula::DiamondCo(..) => unreachable!("checked fragment"),
    }
}
