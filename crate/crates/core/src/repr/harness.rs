//! Checks of the representation results on concrete models.
//!
//! Every check enumerates candidates within [`HarnessBounds`] and compares a
//! generic evaluation against a construction. A failure carries enough to
//! replay it through `sstit eval`.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use super::{
    check_complete, extract_partial_with, knowledge_clauses, known_able_formula,
    known_complete_formula, knowledge_action_rule_sets, proposition_action_rule_sets, repr_positional, repr_uniform,
    uniform_domain,
};
use crate::bitset::StateSet;
use crate::epistemic::knowledge_sets_of;
use crate::error::{Error, Result};
use crate::eval::{EvalPoint, ExactEvaluator, ProfileSpace, RuleEvaluator};
use crate::fixtures::{NEG_POSITIONAL_TEXT, NEG_UNIFORM_TEXT};
use crate::model::{ensure_valid, parse_model, write_model, ActionId, Coalition, History, Model, StateId};
use crate::oracle::{histories_up_to, positional_strategies, tree_strategies};
use crate::strategy::{
    is_uniform_on, play_equivalent, reachable_configs, write_positional, PositionalStrategy,
    Profile, Strategy, TreeStrategy, UniformScope,
};
use crate::syntax::{Formula, RuleStrategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremId {
    P1a,
    P1b,
    P2,
    P3,
    Cor,
    P4,
    P5,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::P1a,
        TheoremId::P1b,
        TheoremId::P2,
        TheoremId::P3,
        TheoremId::Cor,
        TheoremId::P4,
        TheoremId::P5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::P1a => "P1a",
            TheoremId::P1b => "P1b",
            TheoremId::P2 => "P2",
            TheoremId::P3 => "P3",
            TheoremId::Cor => "COR",
            TheoremId::P4 => "P4",
            TheoremId::P5 => "P5",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<TheoremId> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Invalid(format!("unknown theorem `{s}` (expected one of P1a P1b P2 P3 COR P4 P5)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarnessBounds {
    /// Largest rule set tried.
    pub max_rules: usize,
    /// Rule sets per coalition (or agent); below this the enumeration is exhaustive.
    pub rule_sets: usize,
    /// Histories with at most this many steps.
    pub history_depth: usize,
    /// Depth of the perfect-recall strategies tried against positional ones.
    pub tree_depth: usize,
    pub seed: u64,
}

impl Default for HarnessBounds {
    fn default() -> Self {
        HarnessBounds {
            max_rules: 4,
            rule_sets: 2000,
            history_depth: 3,
            tree_depth: 1,
            seed: 0,
        }
    }
}

/// A point where a construction and the evaluator disagree.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub model: Model,
    pub history: Vec<StateId>,
    /// A full profile, when the disagreement is about one.
    pub profile: Option<PositionalStrategy>,
    pub rules: Option<RuleStrategy>,
    /// The formula to hand to `sstit eval`, with the value the construction predicts.
    pub formula: Option<(Formula, bool)>,
    pub detail: String,
}

impl Counterexample {
    /// Writes the model, profile and rules next to `stem` and returns a shell
    /// script replaying the contradiction.
    pub fn write(&self, stem: &Path) -> Result<String> {
        let io = |e: std::io::Error| Error::Invalid(format!("{}: {e}", stem.display()));
        let path = |ext: &str| stem.with_extension(ext);
        std::fs::write(path("cegm"), write_model(&self.model)).map_err(io)?;
        let hist: Vec<&str> = self.history.iter().map(|&q| self.model.state_name(q)).collect();
        let mut script = format!("# {}\n", self.detail);
        if let Some(rs) = &self.rules {
            std::fs::write(path("rules"), rs.to_string()).map_err(io)?;
            let _ = writeln!(
                script,
                "sstit extract --model {} --rules {}",
                path("cegm").display(),
                path("rules").display()
            );
        }
        if let (Some(s), Some((f, want))) = (&self.profile, &self.formula) {
            std::fs::write(path("pos"), write_positional(&self.model, s)).map_err(io)?;
            let _ = writeln!(script, "# expected: {want}");
            let _ = writeln!(
                script,
                "sstit eval --model {} --profile {} --history {} --formula '{}' --mode exact",
                path("cegm").display(),
                path("pos").display(),
                hist.join(","),
                f
            );
        }
        std::fs::write(path("sh"), &script).map_err(io)?;
        Ok(path("sh").display().to_string())
    }
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub model: String,
    pub verdict: Verdict,
    /// Instances where the hypotheses held and the conclusion was checked.
    pub checks: usize,
    /// Candidates outside the hypotheses.
    pub skipped: usize,
    /// Rule sets tried against the number available, per coalition or agent.
    pub coverage: String,
    /// A constructed strategy or rule set, when there is one.
    pub witness: String,
    pub counterexample: Option<Counterexample>,
}

impl TheoremReport {
    /// `theorem<TAB>model<TAB>verdict<TAB>witness`; `file` replaces the witness for failures.
    pub fn tsv_line(&self, file: Option<&str>) -> String {
        let last = match (&self.counterexample, file) {
            (Some(_), Some(f)) => f.to_string(),
            (Some(c), None) => c.detail.clone(),
            _ => {
                let mut s = format!("checks={} skipped={}", self.checks, self.skipped);
                if !self.coverage.is_empty() {
                    let _ = write!(s, " rules={}", self.coverage);
                }
                if !self.witness.is_empty() {
                    let _ = write!(s, " witness={}", self.witness);
                }
                s
            }
        };
        format!("{}\t{}\t{}\t{}", self.theorem, self.model, self.verdict, last)
    }
}

/// The report as TSV. Counterexamples go under `dir` when given.
pub fn write_report(reports: &[TheoremReport], dir: Option<&Path>) -> Result<String> {
    let mut out = String::from("theorem\tmodel\tverdict\twitness\n");
    for r in reports {
        let file = match (&r.counterexample, dir) {
            (Some(c), Some(d)) => {
                std::fs::create_dir_all(d).map_err(|e| Error::Invalid(format!("{}: {e}", d.display())))?;
                Some(c.write(&d.join(format!("{}-{}", r.theorem, r.model)))?)
            }
            _ => None,
        };
        out.push_str(&r.tsv_line(file.as_deref()));
        out.push('\n');
    }
    Ok(out)
}

/// One line per rule, on a single line.
fn inline(rs: &RuleStrategy) -> String {
    let rules: Vec<String> = rs
        .rules
        .iter()
        .map(|r| format!("{} => {}", r.condition, r.effect))
        .collect();
    format!("{{{}}}", rules.join("; "))
}

#[derive(Default)]
struct Tally {
    checks: usize,
    skipped: usize,
    coverage: Vec<String>,
    witness: Option<String>,
    failure: Option<Counterexample>,
}

struct Ctx<'m> {
    m: &'m Model,
    b: &'m HarnessBounds,
    space: ProfileSpace,
    /// Distinct (last state, knowledge sets) over histories within the depth bound.
    configs: Vec<(Vec<StateId>, Vec<StateSet>)>,
    full: Coalition,
}

impl<'m> Ctx<'m> {
    fn new(m: &'m Model, b: &'m HarnessBounds) -> Result<Ctx<'m>> {
        let mut seen = BTreeMap::new();
        for h in histories_up_to(m, b.history_depth) {
            let ks = knowledge_sets_of(m, h.states());
            seen.entry((h.last(), ks.clone()))
                .or_insert_with(|| (h.states().to_vec(), ks));
        }
        Ok(Ctx {
            m,
            b,
            space: ProfileSpace::new(m)?,
            configs: seen.into_values().collect(),
            full: Coalition::all(m.num_agents()),
        })
    }

    fn coalitions(&self) -> Vec<Coalition> {
        let k = self.m.num_agents();
        (1u32..(1 << k))
            .map(|mask| Coalition::new((0..k).filter(|&i| mask & (1 << i) != 0)))
            .collect()
    }

    fn seed(&self, c: &Coalition) -> u64 {
        let mask: u64 = c.members().iter().map(|&i| 1u64 << i).sum();
        self.b.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(mask)
    }

    fn rule_sets(&self, c: &Coalition, t: &mut Tally) -> Vec<RuleStrategy> {
        let s = proposition_action_rule_sets(self.m, c, self.b.max_rules, self.b.rule_sets, self.seed(c));
        t.coverage.push(format!("{}:{}", c, s.coverage()));
        s.sets
    }

    fn complete_profile(&self, s: &PositionalStrategy) -> Result<PositionalStrategy> {
        s.complete_with(self.m, &PositionalStrategy::first_available(self.m, self.full.clone()))
    }

    fn complete_tree(&self, t: &TreeStrategy) -> Result<Profile> {
        let rest = PositionalStrategy::first_available(self.m, self.full.clone());
        Profile::tree(self.m, t.complete_with(self.m, &rest)?)
    }

    fn point(&self, q0: StateId, profile: Profile) -> EvalPoint<'m> {
        EvalPoint::new(self.m, History::initial(q0), profile)
    }
}

fn fail(
    ctx: &Ctx<'_>,
    t: &mut Tally,
    history: &[StateId],
    profile: Option<PositionalStrategy>,
    rules: Option<&RuleStrategy>,
    formula: Option<(Formula, bool)>,
    detail: String,
) {
    t.failure = Some(Counterexample {
        model: ctx.m.clone(),
        history: history.to_vec(),
        profile,
        rules: rules.cloned(),
        formula,
        detail,
    });
}

/// `[C acc] RS` against agreement with the extracted strategy wherever it is defined.
fn p1a(ctx: &Ctx<'_>, t: &mut Tally) -> Result<()> {
    let m = ctx.m;
    for c in ctx.coalitions() {
        for rs in ctx.rule_sets(&c, t) {
            let report = extract_partial_with(m, &rs, false)?;
            let mut acc = ExactEvaluator::new(m, &rs.acc_formula())?;
            for (hist, ks) in &ctx.configs {
                let q = *hist.last().unwrap();
                let Some(target) = report.partial.status(m, hist).and_then(|s| s.defined()) else {
                    t.skipped += 1;
                    continue;
                };
                for code in 0..ctx.space.len() {
                    let mine: Vec<ActionId> = c.members().iter().map(|&i| ctx.space.action(m, code, i, q)).collect();
                    let agree = mine == target;
                    let got = acc.eval_code(q, ks, code);
                    t.checks += 1;
                    if got != agree {
                        let s = ctx.space.decode(m, code);
                        let detail = format!("[{c} acc] is {got}, agreement with the extracted strategy is {agree}");
                        fail(ctx, t, hist, Some(s), Some(&rs), Some((rs.acc_formula(), agree)), detail);
                        return Ok(());
                    }
                }
            }
        }
    }
    Ok(())
}

/// `[C perf] RS` against play-equivalence wherever the extracted strategy is
/// defined on the whole outcome cone.
fn p1b(ctx: &Ctx<'_>, t: &mut Tally) -> Result<()> {
    let m = ctx.m;
    for c in ctx.coalitions() {
        let own = positional_strategies(m, &c)?;
        for rs in ctx.rule_sets(&c, t) {
            let report = extract_partial_with(m, &rs, false)?;
            let mut perf = ExactEvaluator::new(m, &rs.perf_formula())?;
            for sc in &own {
                let base = ctx.space.encode(m, &ctx.complete_profile(sc)?);
                for (hist, ks) in &ctx.configs {
                    let h = History::new(m, hist.clone())?;
                    let cone = reachable_configs(m, &h, sc, 0)?;
                    let total = cone
                        .iter()
                        .all(|cf| report.partial.status(m, &cf.history).and_then(|s| s.defined()).is_some());
                    if !total {
                        t.skipped += 1;
                        continue;
                    }
                    let equivalent = play_equivalent(m, &h, &report.partial, sc)?;
                    let q = h.last();
                    for code in ctx.space.extensions(base, &c) {
                        let got = perf.eval_code(q, ks, code);
                        t.checks += 1;
                        if got != equivalent {
                            let s = ctx.space.decode(m, code);
                            let detail = format!("[{c} perf] is {got}, play-equivalence is {equivalent}");
                            fail(ctx, t, hist, Some(s), Some(&rs), Some((rs.perf_formula(), equivalent)), detail);
                            return Ok(());
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Positional completion of the extracted strategy, first available action where undefined.
fn fill(m: &Model, c: &Coalition, report: &super::ExtractionReport) -> Result<PositionalStrategy> {
    PositionalStrategy::from_fn(m, c.clone(), |i, q| {
        let pos = c.position(i).unwrap();
        match report.status_at_state(m, q).and_then(|s| s.defined()) {
            Some(acts) => acts[pos],
            None => m.avail(i, q)[0],
        }
    })
}

/// Complete rule sets performed under a perfect-recall strategy yield a
/// play-equivalent positional one.
fn p2(ctx: &Ctx<'_>, t: &mut Tally) -> Result<()> {
    let m = ctx.m;
    for c in ctx.coalitions() {
        let sets = ctx.rule_sets(&c, t);
        for q0 in 0..m.num_states() {
            let trees = tree_strategies(m, &c, &History::initial(q0), ctx.b.tree_depth)?;
            let profiles = trees.iter().map(|s| ctx.complete_tree(s)).collect::<Result<Vec<_>>>()?;
            for rs in &sets {
                if !check_complete(m, rs, q0)? {
                    t.skipped += 1;
                    continue;
                }
                let report = extract_partial_with(m, rs, false)?;
                let hat = fill(m, &c, &report)?;
                let mut rev = RuleEvaluator::new(m, rs)?;
                for (tree, profile) in trees.iter().zip(&profiles) {
                    if !rev.perf(&ctx.point(q0, profile.clone()))? {
                        t.skipped += 1;
                        continue;
                    }
                    t.checks += 1;
                    if !play_equivalent(m, &History::initial(q0), &hat, tree)? {
                        let detail = format!(
                            "{} is complete and performed at {} but its positional completion is not play-equivalent",
                            inline(rs),
                            m.state_name(q0)
                        );
                        fail(ctx, t, &[q0], None, Some(rs), None, detail);
                        return Ok(());
                    }
                    if t.witness.is_none() {
                        t.witness = Some(format!("{} at {}", write_positional(m, &hat).trim(), m.state_name(q0)));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Definable positional strategies round-trip into complete rule sets they perform.
fn p3(ctx: &Ctx<'_>, t: &mut Tally) -> Result<()> {
    let m = ctx.m;
    for c in ctx.coalitions() {
        for sc in positional_strategies(m, &c)? {
            let rs = match repr_positional(m, &sc) {
                Ok(rs) => rs,
                Err(Error::Undefinable { .. }) => {
                    t.skipped += 1;
                    continue;
                }
                Err(e) => {
                    let detail = format!("construction failed for {}: {e}", write_positional(m, &sc).trim());
                    fail(ctx, t, &[0], None, None, None, detail);
                    return Ok(());
                }
            };
            let mut complete = ExactEvaluator::new(m, &rs.completeness_formula())?;
            let mut perf = ExactEvaluator::new(m, &rs.perf_formula())?;
            let mut rev = RuleEvaluator::new(m, &rs)?;
            let full = ctx.complete_profile(&sc)?;
            let base = ctx.space.encode(m, &full);
            for q0 in 0..m.num_states() {
                let ks: Vec<StateSet> = knowledge_sets_of(m, &[q0]);
                if !complete.eval_code(q0, &ks, base) {
                    let detail = format!("{} is not complete at {}", inline(&rs), m.state_name(q0));
                    fail(ctx, t, &[q0], Some(full), Some(&rs), Some((rs.completeness_formula(), true)), detail);
                    return Ok(());
                }
                for code in ctx.space.extensions(base, &c) {
                    t.checks += 1;
                    let s = ctx.space.decode(m, code);
                    let closed = rev.perf(&ctx.point(q0, Profile::positional(m, s.clone())?))?;
                    if !perf.eval_code(q0, &ks, code) || !closed {
                        let detail = format!("{} is not performed at {}", inline(&rs), m.state_name(q0));
                        fail(ctx, t, &[q0], Some(s), Some(&rs), Some((rs.perf_formula(), true)), detail);
                        return Ok(());
                    }
                }
            }
            if t.witness.is_none() {
                t.witness = Some(inline(&rs));
            }
        }
    }
    Ok(())
}

/// Every state has its own label signature.
fn all_definable(m: &Model) -> Option<(StateId, StateId)> {
    for q in 0..m.num_states() {
        for r in q + 1..m.num_states() {
            if m.signature(q) == m.signature(r) {
                return Some((q, r));
            }
        }
    }
    None
}

/// Both directions: a perfect-recall strategy is play-equivalent to a
/// positional one iff some complete proposition-action rule set is performed.
fn corollary(ctx: &Ctx<'_>, t: &mut Tally) -> Result<()> {
    let m = ctx.m;
    if let Some((q, r)) = all_definable(m) {
        t.witness = Some(format!(
            "not applicable: {} and {} share a label signature",
            m.state_name(q),
            m.state_name(r)
        ));
        return Ok(());
    }
    for c in ctx.coalitions() {
        let sets = ctx.rule_sets(&c, t);
        let own = positional_strategies(m, &c)?;
        let mut evaluators = sets.iter().map(|rs| RuleEvaluator::new(m, rs)).collect::<Result<Vec<_>>>()?;
        for q0 in 0..m.num_states() {
            let root = History::initial(q0);
            let complete: Vec<bool> = sets.iter().map(|rs| check_complete(m, rs, q0)).collect::<Result<_>>()?;
            for tree in tree_strategies(m, &c, &root, ctx.b.tree_depth)? {
                let profile = ctx.complete_tree(&tree)?;
                let pt = ctx.point(q0, profile);
                let mut positional = None;
                for p in &own {
                    if play_equivalent(m, &root, p, &tree)? {
                        positional = Some(p);
                        break;
                    }
                }
                t.checks += 1;
                match positional {
                    Some(p) => {
                        let rs = repr_positional(m, p)?;
                        let mut rev = RuleEvaluator::new(m, &rs)?;
                        if !(check_complete(m, &rs, q0)? && rev.perf(&pt)?) {
                            let detail = format!(
                                "{} comes from a play-equivalent positional strategy but is not performed at {}",
                                inline(&rs),
                                m.state_name(q0)
                            );
                            fail(ctx, t, &[q0], None, Some(&rs), None, detail);
                            return Ok(());
                        }
                    }
                    None => {
                        for (n, rev) in evaluators.iter_mut().enumerate() {
                            if complete[n] && rev.perf(&pt)? {
                                let detail = format!(
                                    "{} is complete and performed at {} by a strategy with no positional equivalent",
                                    inline(&sets[n]),
                                    m.state_name(q0)
                                );
                                fail(ctx, t, &[q0], None, Some(&sets[n]), None, detail);
                                return Ok(());
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Knowledge-action rule sets that are known complete, known feasible and
/// performed yield a uniform play-equivalent strategy.
fn p4(ctx: &Ctx<'_>, t: &mut Tally) -> Result<()> {
    let m = ctx.m;
    for i in 0..m.num_agents() {
        let c = Coalition::singleton(i);
        let sample = knowledge_action_rule_sets(m, i, ctx.b.max_rules, ctx.b.rule_sets, ctx.seed(&c));
        t.coverage.push(format!("{}:{}", c, sample.coverage()));
        let own = positional_strategies(m, &c)?;
        for rs in &sample.sets {
            let mut clause1 = ExactEvaluator::new(m, &known_complete_formula(i, rs))?;
            let mut clause2 = ExactEvaluator::new(m, &known_able_formula(i, rs))?;
            let mut rev = RuleEvaluator::new(m, rs)?;
            let report = extract_partial_with(m, rs, false)?;
            for q0 in 0..m.num_states() {
                let ks = knowledge_sets_of(m, &[q0]);
                let (complete, able) = knowledge_clauses(m, i, &report.partial, q0)?;
                let weaker = if complete && !clause1.eval_code(q0, &ks, 0) {
                    Some(known_complete_formula(i, rs))
                } else if able && !clause2.eval_code(q0, &ks, 0) {
                    Some(known_able_formula(i, rs))
                } else {
                    None
                };
                if let Some(f) = weaker {
                    let detail = format!(
                        "{f} holds at {} over all strategies but fails over positional ones",
                        m.state_name(q0)
                    );
                    let profile = ctx.space.decode(m, 0);
                    fail(ctx, t, &[q0], Some(profile), Some(rs), Some((f, true)), detail);
                    return Ok(());
                }
                if !(complete && able) {
                    t.skipped += 1;
                    continue;
                }
                let domain = uniform_domain(m, i, q0);
                let defined = super::reachable_keys(m, &[i], domain)
                    .keys()
                    .all(|k| report.partial.entries().get(k).and_then(|s| s.defined()).is_some());
                let uniform = is_uniform_on(m, &report.partial, i, domain, UniformScope::Unbounded)?;
                for si in &own {
                    let profile = Profile::positional(m, ctx.complete_profile(si)?)?;
                    if !rev.perf(&ctx.point(q0, profile))? {
                        t.skipped += 1;
                        continue;
                    }
                    t.checks += 1;
                    let equivalent = play_equivalent(m, &History::initial(q0), &report.partial, si)?;
                    if !(defined && uniform && equivalent) {
                        let detail = format!(
                            "{} satisfies all three clauses at {} but the extracted strategy is{}{}{}",
                            inline(rs),
                            m.state_name(q0),
                            if defined { "" } else { " partial on H" },
                            if uniform { "" } else { " non-uniform" },
                            if equivalent { "" } else { " not play-equivalent" },
                        );
                        fail(ctx, t, &[q0], Some(ctx.complete_profile(si)?), Some(rs), None, detail);
                        return Ok(());
                    }
                    if t.witness.is_none() {
                        t.witness = Some(format!("{} at {}", inline(rs), m.state_name(q0)));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Every uniform positional strategy with definable preimages has a knowledge-action representation.
fn p5(ctx: &Ctx<'_>, t: &mut Tally) -> Result<()> {
    let m = ctx.m;
    for i in 0..m.num_agents() {
        let c = Coalition::singleton(i);
        for si in positional_strategies(m, &c)? {
            for q0 in 0..m.num_states() {
                if !is_uniform_on(m, &si, i, uniform_domain(m, i, q0), UniformScope::Unbounded)? {
                    t.skipped += 1;
                    continue;
                }
                let u = match repr_uniform(m, &si, q0) {
                    Ok(u) => u,
                    Err(Error::Undefinable { .. }) => {
                        t.skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                t.checks += 1;
                if !u.holds() {
                    let (formula, clause) = if !u.known_complete {
                        (known_complete_formula(i, &u.rules), "(1)")
                    } else if !u.known_able {
                        (known_able_formula(i, &u.rules), "(2)")
                    } else {
                        (u.rules.perf_formula(), "(3)")
                    };
                    let detail = format!(
                        "clause {clause} fails for {} built from {} at {}",
                        inline(&u.rules),
                        write_positional(m, &si).trim(),
                        m.state_name(q0)
                    );
                    let full = ctx.complete_profile(&si)?;
                    fail(ctx, t, &[q0], Some(full), Some(&u.rules), Some((formula, true)), detail);
                    return Ok(());
                }
                if t.witness.is_none() {
                    t.witness = Some(inline(&u.rules));
                }
            }
        }
    }
    Ok(())
}

/// Checks one theorem on one valid model.
pub fn verify_theorem(m: &Model, model_id: &str, id: TheoremId, bounds: &HarnessBounds) -> Result<TheoremReport> {
    ensure_valid(m)?;
    let ctx = Ctx::new(m, bounds)?;
    let mut t = Tally::default();
    match id {
        TheoremId::P1a => p1a(&ctx, &mut t)?,
        TheoremId::P1b => p1b(&ctx, &mut t)?,
        TheoremId::P2 => p2(&ctx, &mut t)?,
        TheoremId::P3 => p3(&ctx, &mut t)?,
        TheoremId::Cor => corollary(&ctx, &mut t)?,
        TheoremId::P4 => p4(&ctx, &mut t)?,
        TheoremId::P5 => p5(&ctx, &mut t)?,
    }
    Ok(TheoremReport {
        theorem: id,
        model: model_id.to_string(),
        verdict: if t.failure.is_some() { Verdict::Fail } else { Verdict::Pass },
        checks: t.checks,
        skipped: t.skipped,
        coverage: t.coverage.join(","),
        witness: t.witness.unwrap_or_default(),
        counterexample: t.failure,
    })
}

/// Every (model, theorem) pair, checked in parallel, reported in input order.
pub fn verify_all(models: &[(String, Model)], ids: &[TheoremId], bounds: &HarnessBounds) -> Result<Vec<TheoremReport>> {
    let jobs: Vec<(usize, TheoremId)> = (0..models.len())
        .flat_map(|n| ids.iter().map(move |&id| (n, id)))
        .collect();
    jobs.into_par_iter()
        .map(|(n, id)| {
            let (name, m) = &models[n];
            let b = HarnessBounds {
                seed: bounds.seed.wrapping_add(n as u64),
                ..bounds.clone()
            };
            verify_theorem(m, name, id, &b)
        })
        .collect()
}

/// Two identically labelled states where a positional strategy has no
/// proposition-action representation.
pub fn negative_positional_model() -> Model {
    parse_model(NEG_POSITIONAL_TEXT).expect("fixture parses")
}

/// A model where a uniform strategy has no knowledge-action representation.
pub fn negative_uniform_model() -> Model {
    parse_model(NEG_UNIFORM_TEXT).expect("fixture parses")
}

/// True iff no complete proposition-action rule set with at most
/// `max_rules` rules is performed at `q0` under `s` completed to a profile.
/// The search is exhaustive.
pub fn no_proposition_rules_perform(m: &Model, s: &PositionalStrategy, q0: StateId, max_rules: usize) -> Result<bool> {
    let full = s.complete_with(m, &PositionalStrategy::first_available(m, Coalition::all(m.num_agents())))?;
    let pt = EvalPoint::new(m, History::initial(q0), Profile::positional(m, full)?);
    let sets = proposition_action_rule_sets(m, s.coalition(), max_rules, usize::MAX, 0);
    for rs in &sets.sets {
        if check_complete(m, rs, q0)? && RuleEvaluator::new(m, rs)?.perf(&pt)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff no knowledge-action rule set with at most `max_rules` rules
/// satisfies the three clauses at `q0` for any profile extending the
/// single-agent strategy `s`. The search is exhaustive.
pub fn no_knowledge_rules_perform(m: &Model, s: &PositionalStrategy, q0: StateId, max_rules: usize) -> Result<bool> {
    let i = match s.coalition().members() {
        [i] => *i,
        _ => return Err(Error::Invalid("expected a single-agent strategy".into())),
    };
    let space = ProfileSpace::new(m)?;
    let base = space.encode(
        m,
        &s.complete_with(m, &PositionalStrategy::first_available(m, Coalition::all(m.num_agents())))?,
    );
    let ks = knowledge_sets_of(m, &[q0]);
    let sets = knowledge_action_rule_sets(m, i, max_rules, usize::MAX, 0);
    for rs in &sets.sets {
        let c1 = ExactEvaluator::new(m, &known_complete_formula(i, rs))?.eval_code(q0, &ks, 0);
        let c2 = ExactEvaluator::new(m, &known_able_formula(i, rs))?.eval_code(q0, &ks, 0);
        if !(c1 && c2) {
            continue;
        }
        let mut rev = RuleEvaluator::new(m, rs)?;
        for code in space.extensions(base, s.coalition()) {
            let pt = EvalPoint::new(m, History::initial(q0), Profile::positional(m, space.decode(m, code))?);
            if rev.perf(&pt)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{m1, m2, NEG_POSITIONAL_STRATEGY, NEG_UNIFORM_STRATEGY};
    use crate::strategy::parse_positional;

    #[test]
    fn fixtures_pass_every_theorem() {
        let b = HarnessBounds::default();
        for (name, m) in [("M1", m1()), ("M2", m2())] {
            for id in TheoremId::ALL {
                let r = verify_theorem(&m, name, id, &b).unwrap();
                assert_eq!(r.verdict, Verdict::Pass, "{}", r.tsv_line(None));
            }
        }
    }

    #[test]
    fn m2_p5_witness() {
        let r = verify_theorem(&m2(), "M2", TheoremId::P5, &HarnessBounds::default()).unwrap();
        assert!(r.checks > 0);
        assert!(r.witness.contains("K{1}") && r.witness.contains("act{1:a}"), "{}", r.witness);
    }

    #[test]
    fn invalid_models_are_refused() {
        // Agent 1 may not confuse q0 and q1 in M1: their available actions differ.
        let mut parts = m1().parts().clone();
        parts.indist[0] = vec![vec![0, 1]];
        let bad = Model::from_parts(parts).unwrap();
        assert!(matches!(
            verify_theorem(&bad, "bad", TheoremId::P4, &HarnessBounds::default()),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn positional_converse_fails() {
        let m = negative_positional_model();
        let s = parse_positional(&m, NEG_POSITIONAL_STRATEGY).unwrap();
        assert!(no_proposition_rules_perform(&m, &s, 0, 4).unwrap());
        let ok = parse_positional(&m, "positional for {1}: q0 -> a; q1 -> a").unwrap();
        assert!(!no_proposition_rules_perform(&m, &ok, 0, 4).unwrap());
    }

    #[test]
    fn uniform_converse_fails() {
        let m = negative_uniform_model();
        let s = parse_positional(&m, NEG_UNIFORM_STRATEGY).unwrap();
        assert!(is_uniform_on(&m, &s, 0, m.block(0, 0), UniformScope::Unbounded).unwrap());
        assert!(no_knowledge_rules_perform(&m, &s, 0, 4).unwrap());
        assert!(matches!(repr_uniform(&m, &s, 0), Err(Error::Undefinable { .. })));
    }

    #[test]
    fn theorem_names_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.name().parse::<TheoremId>().unwrap(), id);
        }
        assert!("P9".parse::<TheoremId>().is_err());
    }
}
