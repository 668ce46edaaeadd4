//! Formulas of the three history-aware modal logics, a bounded model
//! checker for each, and translations between them.

mod parse;
mod sat;
mod translate;


use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::syntax::{ActName, Permutation, TransName};

pub use parse::parse_formula;
pub use sat::{sat, sat_canco, sat_eq, sat_hasco, Checker, SatOptions, SatResult};
pub use translate::{
    equico, hasco_all, nhasco, translate_canco_to_hasco, translate_eq_to_canco,
    translate_hasco_to_eq, Relation,
};

/// An external transaction name constant or a variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Value {
    Name(TransName),
    Var(Arc<str>),
}

impl Value {
    pub fn var(x: &str) -> Self {
        Value::Var(x.into())
    }

    pub fn name(&self) -> Option<&TransName> {
        match self {
            Value::Name(k) => Some(k),
            Value::Var(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Name(k) => write!(f, "{k}"),
            Value::Var(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    DiamondTau(Box<Formula>),
    DiamondAct(Arc<str>, ActName, Box<Formula>),
    Neg(Box<Formula>),
    Conj(Vec<Formula>),
    Hasco(Value),
    EqCo(Value, Value),
    DiamondCo(BTreeSet<Value>, Box<Formula>),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, serde::Serialize)]
pub enum Logic {
    Hasco,
    Eq,
    Canco,
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::Hasco => "hasco",
            Logic::Eq => "eq",
            Logic::Canco => "canco",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("{0} is not in the {1} fragment")]
    Fragment(String, Logic),
    #[error("unbound variable `{0}`")]
    Open(String),
    #[error("internal transaction name {0} in a formula")]
    InternalName(String),
}

impl Formula {
    pub fn tt() -> Self {
        Formula::Conj(Vec::new())
    }

    pub fn ff() -> Self {
        Formula::neg(Formula::tt())
    }

    pub fn neg(f: Formula) -> Self {
        Formula::Neg(Box::new(f))
    }

    /// Conjunction; a single conjunct is returned as is.
    pub fn conj(mut fs: Vec<Formula>) -> Self {
        if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Formula::Conj(fs)
        }
    }

    /// Disjunction as `¬⋀¬`; a single disjunct is returned as is.
    pub fn or(mut fs: Vec<Formula>) -> Self {
        if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Formula::neg(Formula::Conj(fs.into_iter().map(Formula::neg).collect()))
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::neg(Formula::Conj(vec![a, Formula::neg(b)]))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Conj(vec![
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        ])
    }

    pub fn dia_tau(f: Formula) -> Self {
        Formula::DiamondTau(Box::new(f))
    }

    pub fn box_tau(f: Formula) -> Self {
        Formula::neg(Formula::dia_tau(Formula::neg(f)))
    }

    pub fn dia_act(x: &str, a: ActName, f: Formula) -> Self {
        Formula::DiamondAct(x.into(), a, Box::new(f))
    }

    pub fn dia_co(k: BTreeSet<Value>, f: Formula) -> Self {
        Formula::DiamondCo(k, Box::new(f))
    }

    pub fn is_tt(&self) -> bool {
        matches!(self, Formula::Conj(v) if v.is_empty())
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::DiamondTau(f)
            | Formula::DiamondAct(_, _, f)
            | Formula::Neg(f)
            | Formula::DiamondCo(_, f) => 1 + f.size(),
            Formula::Conj(v) => 1 + v.iter().map(Formula::size).sum::<usize>(),
            Formula::Hasco(_) | Formula::EqCo(..) => 1,
        }
    }

    /// Nesting depth of modalities.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::DiamondTau(f) | Formula::DiamondAct(_, _, f) | Formula::DiamondCo(_, f) => {
                1 + f.modal_depth()
            }
            Formula::Neg(f) => f.modal_depth(),
            Formula::Conj(v) => v.iter().map(Formula::modal_depth).max().unwrap_or(0),
            Formula::Hasco(_) | Formula::EqCo(..) => 0,
        }
    }

    fn values(&self, out: &mut Vec<Value>) {
        match self {
            Formula::DiamondTau(f) | Formula::DiamondAct(_, _, f) | Formula::Neg(f) => {
                f.values(out)
            }
            Formula::DiamondCo(k, f) => {
                out.extend(k.iter().cloned());
                f.values(out);
            }
            Formula::Conj(v) => v.iter().for_each(|f| f.values(out)),
            Formula::Hasco(v) => out.push(v.clone()),
            Formula::EqCo(a, b) => out.extend([a.clone(), b.clone()]),
        }
    }

    /// Name constants occurring in the formula.
    pub fn ftn(&self) -> BTreeSet<TransName> {
        let mut vs = Vec::new();
        self.values(&mut vs);
        vs.into_iter().filter_map(|v| v.name().cloned()).collect()
    }

    pub fn free_vars(&self) -> BTreeSet<Arc<str>> {
        match self {
            Formula::DiamondTau(f) | Formula::Neg(f) => f.free_vars(),
            Formula::DiamondAct(x, _, f) => {
                let mut s = f.free_vars();
                s.remove(x);
                s
            }
            Formula::DiamondCo(k, f) => {
                let mut s = f.free_vars();
                s.extend(k.iter().filter_map(|v| match v {
                    Value::Var(x) => Some(x.clone()),
                    Value::Name(_) => None,
                }));
                s
            }
            Formula::Conj(v) => v.iter().flat_map(Formula::free_vars).collect(),
            Formula::Hasco(v) => Formula::EqCo(v.clone(), v.clone()).free_vars(),
            Formula::EqCo(a, b) => [a, b]
                .into_iter()
                .filter_map(|v| match v {
                    Value::Var(x) => Some(x.clone()),
                    Value::Name(_) => None,
                })
                .collect(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Actions under `⟨x(a)⟩` modalities.
    pub fn actions(&self) -> BTreeSet<ActName> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::DiamondAct(_, a, _) = f {
                out.insert(a.clone());
            }
        });
        out
    }

    fn visit(&self, g: &mut impl FnMut(&Formula)) {
        g(self);
        match self {
            Formula::DiamondTau(f)
            | Formula::DiamondAct(_, _, f)
            | Formula::Neg(f)
            | Formula::DiamondCo(_, f) => f.visit(g),
            Formula::Conj(v) => v.iter().for_each(|f| f.visit(g)),
            Formula::Hasco(_) | Formula::EqCo(..) => {}
        }
    }

    fn map_values(
        &self,
        g: &impl Fn(&Value, &BTreeSet<Arc<str>>) -> Value,
        bound: &mut Vec<Arc<str>>,
    ) -> Formula {
        let scope: BTreeSet<Arc<str>> = bound.iter().cloned().collect();
        match self {
            Formula::DiamondTau(f) => Formula::dia_tau(f.map_values(g, bound)),
            Formula::Neg(f) => Formula::neg(f.map_values(g, bound)),
            Formula::DiamondAct(x, a, f) => {
                bound.push(x.clone());
                let inner = f.map_values(g, bound);
                bound.pop();
                Formula::DiamondAct(x.clone(), a.clone(), Box::new(inner))
            }
            Formula::DiamondCo(k, f) => Formula::dia_co(
                k.iter().map(|v| g(v, &scope)).collect(),
                f.map_values(g, bound),
            ),
            Formula::Conj(v) => Formula::Conj(v.iter().map(|f| f.map_values(g, bound)).collect()),
            Formula::Hasco(v) => Formula::Hasco(g(v, &scope)),
            Formula::EqCo(a, b) => Formula::EqCo(g(a, &scope), g(b, &scope)),
        }
    }

    /// `φ[k/x]`: replaces the free occurrences of `x`.
    pub fn substitute(&self, x: &str, k: &TransName) -> Formula {
        self.map_values(
            &|v, bound| match v {
                Value::Var(y) if &**y == x && !bound.contains(y) => Value::Name(k.clone()),
                v => v.clone(),
            },
            &mut Vec::new(),
        )
    }

    /// Renames name constants; variables are untouched.
    pub fn permute(&self, pi: &Permutation) -> Formula {
        self.map_values(
            &|v, _| match v {
                Value::Name(k) => Value::Name(pi.apply(k)),
                v => v.clone(),
            },
            &mut Vec::new(),
        )
    }

    /// The smallest logic fragment check: `Ok` when `self` belongs to
    /// `logic`.
    pub fn check_fragment(&self, logic: Logic) -> Result<(), LogicError> {
        let mut err = None;
        self.visit(&mut |f| {
            let bad = match (f, logic) {
                (Formula::EqCo(..), Logic::Hasco | Logic::Canco) => true,
                (Formula::Hasco(_), Logic::Eq | Logic::Canco) => true,
                (Formula::DiamondCo(..), Logic::Hasco | Logic::Eq) => true,
                _ => false,
            };
            if bad && err.is_none() {
                let head = match f {
                    Formula::EqCo(..) => "`=co`",
                    Formula::Hasco(_) => "`hasco`",
                    _ => "`<co{...}>`",
                };
                err = Some(LogicError::Fragment(head.to_string(), logic));
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if let Some(k) = self.ftn().into_iter().find(|k| !k.is_external()) {
            return Err(LogicError::InternalName(k.to_string()));
        }
        Ok(())
    }

    /// Closed and in the fragment.
    pub fn validate(&self, logic: Logic) -> Result<(), LogicError> {
        self.check_fragment(logic)?;
        match self.free_vars().into_iter().next() {
            Some(x) => Err(LogicError::Open(x.to_string())),
            None => Ok(()),
        }
    }

    /// Flattens nested conjunctions (dropping `tt` conjuncts), removes
    /// repeated conjuncts and double negations, and unwraps singletons.
    pub fn simplify(&self) -> Formula {
        match self {
            Formula::DiamondTau(f) => Formula::dia_tau(f.simplify()),
            Formula::DiamondAct(x, a, f) => Formula::dia_act(x, a.clone(), f.simplify()),
            Formula::DiamondCo(k, f) => Formula::dia_co(k.clone(), f.simplify()),
            Formula::Neg(f) => match f.simplify() {
                Formula::Neg(g) => *g,
                g => Formula::neg(g),
            },
            Formula::Conj(v) => {
                let mut out: Vec<Formula> = Vec::new();
                for f in v {
                    match f.simplify() {
                        Formula::Conj(inner) => out.extend(inner),
                        g => out.push(g),
                    }
                }
                let mut seen = std::collections::HashSet::new();
                out.retain(|g| seen.insert(g.clone()));
                Formula::conj(out)
            }
            f => f.clone(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::render(self))
    }
}
