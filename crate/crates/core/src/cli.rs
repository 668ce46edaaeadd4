//! Command-line interface.
//!
//! Exit codes: `check` and `sat` return 0 for a positive answer, 1 for a
//! negative one and 2 when bounds were hit; `parse` returns 1 for an
//! ill-formed term; invalid input is reported with code 3 and usage
//! errors with code 2.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::bisim::{check_bisim, BisimKind, Config, Refutation, Verdict};
use crate::history::{
    parse_configuration, parse_ext_configuration, Configuration, ExtConfiguration,
};
use crate::library;
use crate::logic::{
    parse_formula, sat, translate_canco_to_hasco, translate_eq_to_canco, translate_hasco_to_eq,
    Formula, Logic, Relation, SatOptions, SatResult, Value,
};
use crate::lts::{explore_bounded, ExtLts, SearchBounds, Semantics, StdLts};
use crate::repro::{self, ReproOptions};
use crate::syntax::{check_well_formed, free_transaction_names, Process, TransName};

#[derive(Parser, Debug)]
#[command(
    name = "tccs",
    version,
    about = "Workbench for CCS with communicating transactions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(clap::Args, Debug, Clone)]
pub struct RunConfig {
    /// Transition system for `lts`.
    #[arg(long, global = true, value_enum, default_value_t = LtsKind::Ext)]
    pub lts: LtsKind,
    /// Bisimulation for `check`.
    #[arg(long, global = true, value_enum, default_value_t = KindArg::Hasco)]
    pub kind: KindArg,
    /// Logic for `sat`.
    #[arg(long, global = true, value_enum, default_value_t = LogicArg::Hasco)]
    pub logic: LogicArg,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_states: usize,
    #[arg(long, global = true, default_value_t = 2_000)]
    pub tau_bound: usize,
    #[arg(long, global = true, default_value_t = 64)]
    pub depth: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Read `<tau>` as one strong step.
    #[arg(long, global = true)]
    pub strong_diamond_tau: bool,
}

impl RunConfig {
    pub fn bounds(&self) -> SearchBounds {
        SearchBounds {
            max_states: self.max_states,
            tau_bound: self.tau_bound,
            depth: self.depth,
        }
    }

    fn sat_options(&self) -> SatOptions {
        SatOptions {
            bounds: self.bounds(),
            strong_diamond_tau: self.strong_diamond_tau,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum LtsKind {
    Std,
    Ext,
    Cs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Standard,
    Hasco,
    Eq,
    Canco,
}

impl From<KindArg> for BisimKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Standard => BisimKind::Standard,
            KindArg::Hasco => BisimKind::Hasco,
            KindArg::Eq => BisimKind::Eq,
            KindArg::Canco => BisimKind::Canco,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum LogicArg {
    Hasco,
    Eq,
    Canco,
}

impl From<LogicArg> for Logic {
    fn from(l: LogicArg) -> Self {
        match l {
            LogicArg::Hasco => Logic::Hasco,
            LogicArg::Eq => Logic::Eq,
            LogicArg::Canco => Logic::Canco,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    JsonLines,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// L_Canco to L_Hasco
    Ch,
    /// L_Eq to L_Canco
    Ec,
    /// L_Hasco to L_Eq
    He,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a process and report well-formedness.
    Parse {
        /// Source file; standard input when absent or `-`.
        file: Option<String>,
    },
    /// Dump the reachable transition system of a process.
    Lts {
        /// Process text or library name.
        process: String,
    },
    /// Decide bisimilarity of two processes or configurations.
    Check { left: String, right: String },
    /// Model-check a formula against a process or configuration.
    Sat { process: String, formula: String },
    /// Translate a formula between logics.
    Translate {
        formula: String,
        #[arg(long = "dir", value_enum)]
        direction: Direction,
        /// Running values, comma separated.
        #[arg(long, default_value = "")]
        running: String,
        /// Pairs known to have committed together, as `x=y` separated by
        /// commas.
        #[arg(long, default_value = "")]
        together: String,
        /// Check on this process that both formulas agree.
        #[arg(long)]
        verify: Option<String>,
    },
    /// Run built-in experiments.
    Repro {
        /// Experiment id, or `all`.
        #[arg(default_value = "all")]
        id: String,
        /// Sample size of property experiments.
        #[arg(long, default_value_t = 40)]
        samples: usize,
    },
    /// List the built-in processes, formulas and experiments.
    Library,
}

/// Output of a command: the text to print and the exit code.
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String, code: i32) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code,
        }
    }

    fn input_error(msg: impl std::fmt::Display) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            code: 3,
        }
    }
}

fn lines(records: impl IntoIterator<Item = Json>) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    s
}

fn resolve_process(text: &str) -> Result<Process, String> {
    let p = library::resolve(text).map_err(|e| format!("{e}"))?;
    check_well_formed(&p).map_err(|vs| {
        vs.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    })?;
    Ok(p)
}

fn is_configuration(text: &str) -> bool {
    text.contains(';')
}

fn ext_config(text: &str) -> Result<ExtConfiguration, String> {
    if is_configuration(text) {
        let c = parse_ext_configuration(text).map_err(|e| e.to_string())?;
        c.validate()?;
        Ok(c)
    } else {
        Ok(ExtConfiguration::initial(resolve_process(text)?))
    }
}

fn plain_config(text: &str) -> Result<Configuration, String> {
    if is_configuration(text) {
        let c = parse_configuration(text).map_err(|e| e.to_string())?;
        c.validate()?;
        Ok(c)
    } else {
        Ok(Configuration::initial(resolve_process(text)?))
    }
}

fn config(kind: BisimKind, text: &str) -> Result<Config, String> {
    match kind {
        BisimKind::Standard => plain_config(text).map(Config::Plain),
        _ => ext_config(text).map(Config::Ext),
    }
}

pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Outcome {
    let cfg = &cli.config;
    match &cli.command {
        Command::Parse { file } => cmd_parse(cfg, file.as_deref(), stdin),
        Command::Lts { process } => cmd_lts(cfg, process),
        Command::Check { left, right } => cmd_check(cfg, left, right),
        Command::Sat { process, formula } => cmd_sat(cfg, process, formula),
        Command::Translate {
            formula,
            direction,
            running,
            together,
            verify,
        } => cmd_translate(
            cfg,
            formula,
            *direction,
            running,
            together,
            verify.as_deref(),
        ),
        Command::Repro { id, samples } => cmd_repro(cfg, id, *samples),
        Command::Library => cmd_library(cfg),
    }
}

fn cmd_parse(cfg: &RunConfig, file: Option<&str>, stdin: &mut dyn Read) -> Outcome {
    let mut src = String::new();
    let read = match file {
        None | Some("-") => stdin.read_to_string(&mut src).map(|_| ()),
        Some(path) => std::fs::read_to_string(path).map(|s| src = s),
    };
    if let Err(e) = read {
        return Outcome::input_error(e);
    }
    if src.trim().is_empty() {
        return Outcome {
            stdout: String::new(),
            stderr: "usage: tccs parse [FILE]; the input is empty\n".into(),
            code: 2,
        };
    }
    let p = match library::resolve(&src) {
        Ok(p) => p,
        Err(e) => {
            return Outcome {
                stdout: String::new(),
                stderr: format!("syntax error at {e}\n"),
                code: 1,
            }
        }
    };
    let ftn: Vec<String> = free_transaction_names(&p)
        .iter()
        .map(|k| k.to_string())
        .collect();
    let report = check_well_formed(&p);
    let violations: Vec<String> = report
        .as_ref()
        .err()
        .map(|vs| vs.iter().map(|v| v.to_string()).collect())
        .unwrap_or_default();
    let code = if report.is_ok() { 0 } else { 1 };
    let stdout = match cfg.format {
        Format::JsonLines => lines([json!({
            "process": p.to_string(),
            "size": p.size(),
            "ftn": ftn,
            "well_formed": report.is_ok(),
            "violations": violations,
        })]),
        Format::Text => {
            let mut s = format!("{p}\nsize: {}\nftn: {{{}}}\n", p.size(), ftn.join(", "));
            if violations.is_empty() {
                s.push_str("well-formed\n");
            } else {
                for v in &violations {
                    let _ = writeln!(s, "ill-formed: {v}");
                }
            }
            s
        }
    };
    Outcome::ok(stdout, code)
}

fn dump<S: Semantics>(cfg: &RunConfig, sem: &S, init: &S::State) -> Outcome
where
    S::Label: std::fmt::Display,
{
    let ex = explore_bounded(sem, init, cfg.max_states, cfg.depth);
    let stdout = match cfg.format {
        Format::JsonLines => {
            let mut recs = Vec::new();
            for (i, s) in ex.states.iter().enumerate() {
                recs.push(json!({"state": i, "config": s.to_string()}));
            }
            for (i, es) in ex.edges.iter().enumerate() {
                for (l, r, j) in es {
                    recs.push(
                        json!({"from": i, "label": l.to_string(), "rule": r.to_string(), "to": j}),
                    );
                }
            }
            recs.push(json!({"states": ex.states.len(), "exhaustive": ex.exhaustive}));
            lines(recs)
        }
        Format::Text => {
            let mut s = String::new();
            for (i, st) in ex.states.iter().enumerate() {
                let _ = writeln!(s, "s{i}: {st}");
                for (l, r, j) in &ex.edges[i] {
                    let _ = writeln!(s, "  --{l}--> s{j}  [{r}]");
                }
            }
            let _ = writeln!(
                s,
                "{} states, {}",
                ex.states.len(),
                if ex.exhaustive {
                    "exhaustive"
                } else {
                    "truncated"
                }
            );
            s
        }
    };
    Outcome::ok(stdout, 0)
}

fn cmd_lts(cfg: &RunConfig, text: &str) -> Outcome {
    match cfg.lts {
        LtsKind::Std => match plain_config(text) {
            Ok(c) => dump(cfg, &StdLts, &c),
            Err(e) => Outcome::input_error(e),
        },
        LtsKind::Ext | LtsKind::Cs => match ext_config(text) {
            Ok(c) => {
                let alpha = c.process.free_actions();
                let sem = if cfg.lts == LtsKind::Cs {
                    ExtLts::commit_sensitive(alpha)
                } else {
                    ExtLts::extended(alpha)
                };
                dump(cfg, &sem, &c)
            }
            Err(e) => Outcome::input_error(e),
        },
    }
}

fn tree_json(t: &crate::bisim::GameTree) -> Json {
    let reason = match &t.reason {
        Refutation::Inconsistent(d) => json!({"inconsistent": d.to_string()}),
        Refutation::Elided => json!("elided"),
        Refutation::Unmatched {
            side,
            label,
            target,
            responses,
        } => json!({
            "side": side.to_string(),
            "move": label.to_string(),
            "target": target,
            "responses": responses.iter().map(tree_json).collect::<Vec<_>>(),
        }),
    };
    json!({"left": t.left, "right": t.right, "reason": reason})
}

fn cmd_check(cfg: &RunConfig, left: &str, right: &str) -> Outcome {
    let kind = BisimKind::from(cfg.kind);
    let (c1, c2) = match (config(kind, left), config(kind, right)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::input_error(e),
    };
    let v = match check_bisim(kind, &c1, &c2, &cfg.bounds()) {
        Ok(v) => v,
        Err(e) => return Outcome::input_error(e),
    };
    let code = match v {
        Verdict::Bisimilar { .. } => 0,
        Verdict::NotBisimilar { .. } => 1,
        Verdict::Unknown { .. } => 2,
    };
    let stdout = match (&v, cfg.format) {
        (Verdict::Bisimilar { witness }, Format::JsonLines) => lines(
            std::iter::once(
                json!({"verdict": v.name(), "kind": kind.to_string(), "pairs": witness.len()}),
            )
            .chain(
                witness
                    .iter()
                    .map(|(a, b)| json!({"left": a.to_string(), "right": b.to_string()})),
            ),
        ),
        (Verdict::NotBisimilar { tree, formula }, Format::JsonLines) => lines([json!({
            "verdict": v.name(),
            "kind": kind.to_string(),
            "formula": formula.as_ref().map(|f| f.to_string()),
            "game": tree_json(tree),
        })]),
        (Verdict::Unknown { report }, Format::JsonLines) => {
            lines([json!({"verdict": v.name(), "kind": kind.to_string(), "report": report})])
        }
        (Verdict::Bisimilar { witness }, Format::Text) => {
            let mut s = format!(
                "{kind}: bisimilar\nwitness ({} pairs, up to identity):\n",
                witness.len()
            );
            for (a, b) in witness {
                let _ = writeln!(s, "  {a}  ~  {b}");
            }
            s
        }
        (Verdict::NotBisimilar { tree, formula }, Format::Text) => {
            let mut s = format!("{kind}: not bisimilar\n");
            if let Some(f) = formula {
                let _ = writeln!(s, "formula: {f}");
            }
            let _ = write!(s, "game:\n{tree}");
            s
        }
        (Verdict::Unknown { report }, Format::Text) => format!("{kind}: unknown\n{report}\n"),
    };
    Outcome::ok(stdout, code)
}

fn sat_code(r: SatResult) -> i32 {
    match r {
        SatResult::True => 0,
        SatResult::False => 1,
        SatResult::Unknown => 2,
    }
}

fn cmd_sat(cfg: &RunConfig, process: &str, formula: &str) -> Outcome {
    let c = match ext_config(process) {
        Ok(c) => c,
        Err(e) => return Outcome::input_error(e),
    };
    let phi = match resolve_formula(formula) {
        Ok(f) => f,
        Err(e) => return Outcome::input_error(e),
    };
    let logic = Logic::from(cfg.logic);
    let r = match sat(logic, &c, &phi, cfg.sat_options()) {
        Ok(r) => r,
        Err(e) => return Outcome::input_error(e),
    };
    let stdout = match cfg.format {
        Format::Text => format!("{r}\n"),
        Format::JsonLines => lines([json!({
            "config": c.to_string(),
            "formula": phi.to_string(),
            "logic": format!("{logic:?}").to_lowercase(),
            "result": r.to_string(),
        })]),
    };
    Outcome::ok(stdout, sat_code(r))
}

fn resolve_formula(text: &str) -> Result<Formula, String> {
    match library::FORMULAS.iter().find(|(n, _)| *n == text.trim()) {
        Some((_, src)) => parse_formula(src),
        None => parse_formula(text),
    }
    .map_err(|e| e.to_string())
}

fn value(text: &str) -> Result<Value, String> {
    let t = text.trim();
    match t.strip_prefix('#') {
        Some(id) if !id.is_empty() => Ok(Value::Name(TransName::external(id))),
        Some(_) => Err(format!("bad value `{t}`")),
        None if !t.is_empty() && t.chars().all(|c| c.is_alphanumeric() || c == '_') => {
            Ok(Value::var(t))
        }
        None => Err(format!("bad value `{t}`")),
    }
}

fn value_set(text: &str) -> Result<BTreeSet<Value>, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(value)
        .collect()
}

fn relation(text: &str) -> Result<Relation, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once('=')
                .ok_or_else(|| format!("expected x=y, got `{pair}`"))?;
            Ok((value(a)?, value(b)?))
        })
        .collect()
}

fn cmd_translate(
    cfg: &RunConfig,
    formula: &str,
    dir: Direction,
    running: &str,
    together: &str,
    verify: Option<&str>,
) -> Outcome {
    let phi = match resolve_formula(formula) {
        Ok(f) => f,
        Err(e) => return Outcome::input_error(e),
    };
    let (r, e) = match (value_set(running), relation(together)) {
        (Ok(r), Ok(e)) => (r, e),
        (Err(m), _) | (_, Err(m)) => return Outcome::input_error(m),
    };
    let (from, to, out) = match dir {
        Direction::Ch => (
            Logic::Canco,
            Logic::Hasco,
            translate_canco_to_hasco(&phi, &r),
        ),
        Direction::Ec => (Logic::Eq, Logic::Canco, translate_eq_to_canco(&phi, &r, &e)),
        Direction::He => (Logic::Hasco, Logic::Eq, translate_hasco_to_eq(&phi)),
    };
    let t = match out {
        Ok(t) => t,
        Err(e) => return Outcome::input_error(e),
    };
    let mut record = json!({"formula": t.to_string()});
    let mut text = format!("{t}\n");
    let mut code = 0;
    if let Some(p) = verify {
        let c = match ext_config(p) {
            Ok(c) => c,
            Err(e) => return Outcome::input_error(e),
        };
        let before = sat(from, &c, &phi, cfg.sat_options());
        let after = sat(to, &c, &t, cfg.sat_options());
        let (before, after) = match (before, after) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return Outcome::input_error(e),
        };
        let agree = before == after;
        if !agree {
            code = 1;
        }
        if before == SatResult::Unknown || after == SatResult::Unknown {
            code = 2;
        }
        record["verify"] =
            json!({"before": before.to_string(), "after": after.to_string(), "agree": agree});
        let _ = writeln!(text, "verify: {before} before, {after} after");
    }
    let stdout = match cfg.format {
        Format::Text => text,
        Format::JsonLines => lines([record]),
    };
    Outcome::ok(stdout, code)
}

fn cmd_repro(cfg: &RunConfig, id: &str, samples: usize) -> Outcome {
    let opts = ReproOptions {
        bounds: cfg.bounds(),
        seed: cfg.seed,
        samples,
    };
    let chosen: Vec<_> = if id == "all" {
        repro::EXPERIMENTS.iter().collect()
    } else {
        match repro::find(id) {
            Some(e) => vec![e],
            None => {
                let ids: Vec<&str> = repro::EXPERIMENTS.iter().map(|e| e.id).collect();
                return Outcome::input_error(format!(
                    "unknown experiment `{id}`; known: {}",
                    ids.join(", ")
                ));
            }
        }
    };
    let reports: Vec<_> = chosen.into_iter().map(|e| repro::run(e, &opts)).collect();
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let stdout = match cfg.format {
        Format::JsonLines => lines(reports.iter().map(|r| {
            json!({
                "id": r.id,
                "passed": r.passed(),
                "checks": r.checks.iter().map(|(c, ok)| json!({"check": c, "passed": ok})).collect::<Vec<_>>(),
            })
        })),
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                let _ = writeln!(s, "{} {}: {}", if r.passed() { "PASS" } else { "FAIL" }, r.id, r.summary);
                for (c, ok) in &r.checks {
                    let _ = writeln!(s, "    [{}] {c}", if *ok { "ok" } else { "failed" });
                }
            }
            let _ = writeln!(s, "{} of {} experiments passed", reports.len() - failed, reports.len());
            s
        }
    };
    Outcome::ok(stdout, (failed > 0) as i32)
}

fn cmd_library(cfg: &RunConfig) -> Outcome {
    let procs = library::PROCESSES
        .iter()
        .map(|(n, s)| ("process", *n, s.to_string()));
    let forms = library::FORMULAS
        .iter()
        .map(|(n, s)| ("formula", *n, s.to_string()));
    let exps = repro::EXPERIMENTS
        .iter()
        .map(|e| ("experiment", e.id, e.summary.to_string()));
    let all: Vec<_> = procs.chain(forms).chain(exps).collect();
    let stdout = match cfg.format {
        Format::JsonLines => lines(
            all.iter()
                .map(|(k, n, s)| json!({"kind": k, "name": n, "text": s})),
        ),
        Format::Text => all
            .iter()
            .map(|(k, n, s)| format!("{k:<10} {n:<16} {s}\n"))
            .collect(),
    };
    Outcome::ok(stdout, 0)
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with(args: impl IntoIterator<Item = String>, stdin: &mut dyn Read) -> Outcome {
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdin),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome::ok(text, 0)
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            }
        }
    }
}
