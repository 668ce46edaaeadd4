use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use super::{Formula, Logic, LogicError, Value};
use crate::history::{eq_holds, ExtConfiguration};
use crate::lts::{
    canonical_ext, fresh_external, tau_closure, ExtLabel, ExtLts, SearchBounds, Semantics,
};
use crate::syntax::TransName;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, serde::Serialize)]
pub enum SatResult {
    True,
    False,
    Unknown,
}

impl SatResult {
    pub fn from_bool(b: bool) -> Self {
        if b {
            SatResult::True
        } else {
            SatResult::False
        }
    }

    pub fn negate(self) -> Self {
        match self {
            SatResult::True => SatResult::False,
            SatResult::False => SatResult::True,
            SatResult::Unknown => SatResult::Unknown,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            SatResult::True => Some(true),
            SatResult::False => Some(false),
            SatResult::Unknown => None,
        }
    }
}

impl fmt::Display for SatResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SatResult::True => "true",
            SatResult::False => "false",
            SatResult::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SatOptions {
    pub bounds: SearchBounds,
    /// Read `<tau>` as a single strong step instead of `⇒`.
    pub strong_diamond_tau: bool,
}

type Closure = Rc<(Vec<ExtConfiguration>, bool)>;

/// Memoizing evaluator for closed formulas over one transition system.
pub struct Checker {
    sem: ExtLts,
    opts: SatOptions,
    memo: HashMap<(ExtConfiguration, Formula), SatResult>,
    closures: HashMap<ExtConfiguration, Closure>,
    /// States held across all closures, limited by `max_states`.
    stored: usize,
    /// Set once any enumeration was cut by a bound.
    pub truncated: bool,
}

impl Checker {
    /// `logic` picks the transition system: commit-sensitive for
    /// `Canco`, extended otherwise.
    pub fn new(logic: Logic, alphabet: BTreeSet<crate::syntax::ActName>, opts: SatOptions) -> Self {
        let sem = ExtLts {
            alphabet,
            commit_sensitive: logic == Logic::Canco,
        };
        Checker {
            sem,
            opts,
            memo: HashMap::new(),
            closures: HashMap::new(),
            stored: 0,
            truncated: false,
        }
    }

    fn closure(&mut self, c: &ExtConfiguration) -> Closure {
        if let Some(cl) = self.closures.get(c) {
            return cl.clone();
        }
        let room = self.opts.bounds.max_states.saturating_sub(self.stored);
        let cl = if room == 0 {
            Rc::new((vec![c.clone()], false))
        } else {
            Rc::new(tau_closure(
                &self.sem,
                c,
                self.opts.bounds.tau_bound.min(room),
            ))
        };
        self.stored += cl.0.len();
        if !cl.1 {
            self.truncated = true;
        }
        self.closures.insert(c.clone(), cl.clone());
        cl
    }

    /// Canonical weak successors for `label`, `None` standing for `⇒`.
    fn weak(
        &mut self,
        c: &ExtConfiguration,
        label: Option<&ExtLabel>,
        fresh: &TransName,
    ) -> (Vec<ExtConfiguration>, bool) {
        let pre = self.closure(c);
        let Some(label) = label else {
            return (pre.0.clone(), pre.1);
        };
        let mut exhaustive = pre.1;
        let mut out = BTreeSet::new();
        for y in &pre.0 {
            for st in self.sem.steps(y, fresh) {
                if &st.label != label {
                    continue;
                }
                let t = self.sem.canonical(&st.target);
                let post = self.closure(&t);
                exhaustive &= post.1;
                out.extend(post.0.iter().cloned());
            }
        }
        (out.into_iter().collect(), exhaustive)
    }

    fn strong_tau(&mut self, c: &ExtConfiguration) -> Vec<ExtConfiguration> {
        let k = fresh_external(&self.sem, c, &BTreeSet::new());
        let mut out: Vec<_> = self
            .sem
            .steps(c, &k)
            .into_iter()
            .filter(|s| s.label == ExtLabel::Tau)
            .map(|s| self.sem.canonical(&s.target))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Evaluates a closed formula. The caller is responsible for fragment
    /// checks.
    pub fn eval(&mut self, c: &ExtConfiguration, phi: &Formula) -> SatResult {
        let c = canonical_ext(c).0;
        self.eval_canonical(&c, phi)
    }

    fn eval_canonical(&mut self, c: &ExtConfiguration, phi: &Formula) -> SatResult {
        let key = (c.clone(), phi.clone());
        if let Some(r) = self.memo.get(&key) {
            return *r;
        }
        let r = self.eval_uncached(c, phi);
        self.memo.insert(key, r);
        r
    }

    fn any(&mut self, succs: Vec<ExtConfiguration>, exhaustive: bool, phi: &Formula) -> SatResult {
        let mut unknown = !exhaustive;
        for s in &succs {
            match self.eval_canonical(s, phi) {
                SatResult::True => return SatResult::True,
                SatResult::Unknown => unknown = true,
                SatResult::False => {}
            }
        }
        if unknown {
            SatResult::Unknown
        } else {
            SatResult::False
        }
    }

    fn eval_uncached(&mut self, c: &ExtConfiguration, phi: &Formula) -> SatResult {
        let name = |v: &Value| v.name().expect("closed formula").clone();
        match phi {
            Formula::Hasco(v) => SatResult::from_bool(c.history.hasco().contains(&name(v))),
            Formula::EqCo(a, b) => SatResult::from_bool(eq_holds(&c.history, &name(a), &name(b))),
            Formula::Neg(f) => self.eval_canonical(c, f).negate(),
            Formula::Conj(fs) => {
                let mut unknown = false;
                for f in fs {
                    match self.eval_canonical(c, f) {
                        SatResult::False => return SatResult::False,
                        SatResult::Unknown => unknown = true,
                        SatResult::True => {}
                    }
                }
                if unknown {
                    SatResult::Unknown
                } else {
                    SatResult::True
                }
            }
            Formula::DiamondTau(f) => {
                if self.opts.strong_diamond_tau {
                    let succ = self.strong_tau(c);
                    self.any(succ, true, f)
                } else {
                    let fresh = fresh_external(&self.sem, c, &BTreeSet::new());
                    let (succ, ex) = self.weak(c, None, &fresh);
                    self.any(succ, ex, f)
                }
            }
            Formula::DiamondAct(x, a, f) => {
                let l = fresh_external(&self.sem, c, &f.ftn());
                let label = ExtLabel::Act(l.clone(), a.clone());
                let (succ, ex) = self.weak(c, Some(&label), &l);
                let body = f.substitute(x, &l);
                self.any(succ, ex, &body)
            }
            Formula::DiamondCo(k, f) => {
                let names: BTreeSet<TransName> = k.iter().map(name).collect();
                let fresh = fresh_external(&self.sem, c, &names);
                let (succ, ex) = self.weak(c, Some(&ExtLabel::Co(names)), &fresh);
                self.any(succ, ex, f)
            }
        }
    }
}

/// `C ⊨ φ` in the given logic, with `⟨x(a)⟩` decided by one fresh
/// representative name and degenerate moves ranging over the actions of
/// the process and the formula.
pub fn sat(
    logic: Logic,
    c: &ExtConfiguration,
    phi: &Formula,
    opts: SatOptions,
) -> Result<SatResult, LogicError> {
    phi.validate(logic)?;
    let mut alphabet = c.process.free_actions();
    alphabet.extend(phi.actions());
    let mut ch = Checker::new(logic, alphabet, opts);
    Ok(ch.eval(c, phi))
}

pub fn sat_hasco(
    c: &ExtConfiguration,
    phi: &Formula,
    opts: SatOptions,
) -> Result<SatResult, LogicError> {
    sat(Logic::Hasco, c, phi, opts)
}

pub fn sat_eq(
    c: &ExtConfiguration,
    phi: &Formula,
    opts: SatOptions,
) -> Result<SatResult, LogicError> {
    sat(Logic::Eq, c, phi, opts)
}

pub fn sat_canco(
    c: &ExtConfiguration,
    phi: &Formula,
    opts: SatOptions,
) -> Result<SatResult, LogicError> {
    sat(Logic::Canco, c, phi, opts)
}
